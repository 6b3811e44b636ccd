//! Numerical ground truth for the closed-form and number-theoretic routes.
//!
//! Nothing here consults `number_theory`, `path` or `cycle`. Ranks come from
//! either the literal Kalman matrix (small `n`) or the PBH eigenspace route,
//! which stays well conditioned for large `n`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DenseMatrix;

/// Largest `n` for which the rank of the stacked Kalman matrix is trusted.
/// Above this the powers `L^k` lose too many digits and the PBH route is used.
pub const KRYLOV_MAX_N: usize = 12;

/// Eigenvalues closer than this are treated as one eigenspace.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Singular values of `C·V_λ` below this count as kernel directions.
pub const KERNEL_TOL: f64 = 1e-6;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericEigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// SVD of the stacked Kalman matrix.
    KrylovSvd,
    /// `n` minus the summed PBH kernel dimensions.
    Pbh,
    /// SVD of a single matrix.
    Svd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    /// Descending. For [`RankMethod::Pbh`] these are the singular values of the
    /// per-eigenspace blocks, pooled.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub method: RankMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbhSide {
    /// `[L − λI; C]`
    Observability,
    /// `[L − λI | B]`
    Reachability,
}

/// One eigenvalue of `L` and an orthonormal basis of `{v : Lv = λv, Cv = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnobservableMode {
    pub eigenvalue: f64,
    pub basis: Vec<Vec<f64>>,
}

fn check_symmetric(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::NonSymmetric(asym));
    }
    Ok(())
}

/// Full symmetric eigendecomposition, ascending, with residual check.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<Vec<NumericEigenPair>> {
    check_symmetric(a)?;
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    order
        .into_iter()
        .map(|k| {
            let value = eig.eigenvalues[k];
            let v = eig.eigenvectors.column(k).into_owned();
            let residual = (a * &v - &v * value).amax();
            if residual > 1e-9 {
                return Err(Error::Numerical(format!(
                    "eigenpair residual {residual:e} at λ={value}"
                )));
            }
            Ok(NumericEigenPair {
                value,
                vector: v.iter().copied().collect(),
            })
        })
        .collect()
}

fn rank_threshold(m: &DenseMatrix, sigma_max: f64) -> f64 {
    sigma_max * m.nrows().max(m.ncols()) as f64 * f64::EPSILON * 64.0
}

/// Numerical rank by SVD with threshold `σ_max · max(rows, cols) · 2⁻⁵² · 64`.
pub fn matrix_rank(m: &DenseMatrix) -> RankResult {
    if m.is_empty() {
        return RankResult {
            rank: 0,
            singular_values: vec![],
            threshold: 0.0,
            method: RankMethod::Svd,
        };
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let threshold = rank_threshold(m, sv[0]);
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    RankResult {
        rank,
        singular_values: sv,
        threshold,
        method: RankMethod::Svd,
    }
}

/// `O_k = [C; CL; …; CL^{k−1}]`.
pub fn observability_matrix_depth(
    l: &DenseMatrix,
    c: &DenseMatrix,
    depth: usize,
) -> Result<DenseMatrix> {
    let n = l.nrows();
    if !l.is_square() || c.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "L is {}x{}, C is {}x{}",
            l.nrows(),
            l.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    let m = c.nrows();
    let mut out = DenseMatrix::zeros(m * depth, n);
    let mut block = c.clone();
    for k in 0..depth {
        out.view_mut((k * m, 0), (m, n)).copy_from(&block);
        block = &block * l;
    }
    Ok(out)
}

pub fn observability_matrix(l: &DenseMatrix, c: &DenseMatrix) -> Result<DenseMatrix> {
    observability_matrix_depth(l, c, l.nrows())
}

/// `R = [B, LB, …, L^{n−1}B]`.
pub fn reachability_matrix(l: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if b.nrows() != l.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "L has {} rows, B has {}",
            l.nrows(),
            b.nrows()
        )));
    }
    let n = l.nrows();
    let m = b.ncols();
    let mut out = DenseMatrix::zeros(n, m * n);
    let mut block = b.clone();
    for k in 0..n {
        out.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = l * &block;
    }
    Ok(out)
}

/// Rank of the PBH matrix at `λ`.
pub fn pbh_rank(
    l: &DenseMatrix,
    x: &DenseMatrix,
    lambda: f64,
    side: PbhSide,
) -> Result<RankResult> {
    let n = l.nrows();
    let shifted = l - DMatrix::identity(n, n) * lambda;
    let stacked = match side {
        PbhSide::Observability => {
            if x.ncols() != n {
                return Err(Error::DimensionMismatch("C must have n columns".into()));
            }
            let mut s = DenseMatrix::zeros(n + x.nrows(), n);
            s.view_mut((0, 0), (n, n)).copy_from(&shifted);
            s.view_mut((n, 0), (x.nrows(), n)).copy_from(x);
            s
        }
        PbhSide::Reachability => {
            if x.nrows() != n {
                return Err(Error::DimensionMismatch("B must have n rows".into()));
            }
            let mut s = DenseMatrix::zeros(n, n + x.ncols());
            s.view_mut((0, 0), (n, n)).copy_from(&shifted);
            s.view_mut((0, n), (n, x.ncols())).copy_from(x);
            s
        }
    };
    Ok(matrix_rank(&stacked))
}

/// Eigendecomposition of a symmetric `L`, grouped into eigenspaces, reusable
/// across many output matrices.
#[derive(Debug, Clone)]
pub struct SpectralOracle {
    n: usize,
    spaces: Vec<(f64, DenseMatrix)>,
}

impl SpectralOracle {
    pub fn new(l: &DenseMatrix) -> Result<Self> {
        let pairs = symmetric_eigen(l)?;
        let n = l.nrows();
        let mut spaces: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
        for p in pairs {
            match spaces.last_mut() {
                Some((value, vecs)) if (p.value - *value).abs() <= CLUSTER_TOL => {
                    vecs.push(p.vector)
                }
                _ => spaces.push((p.value, vec![p.vector])),
            }
        }
        let spaces = spaces
            .into_iter()
            .map(|(value, vecs)| {
                let cols: Vec<DVector<f64>> = vecs.into_iter().map(DVector::from_vec).collect();
                (value, DenseMatrix::from_columns(&cols))
            })
            .collect();
        Ok(Self { n, spaces })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct eigenvalues with their multiplicities.
    pub fn eigenvalues(&self) -> Vec<(f64, usize)> {
        self.spaces
            .iter()
            .map(|(v, basis)| (*v, basis.ncols()))
            .collect()
    }

    fn kernel_in_space(basis: &DenseMatrix, c: &DenseMatrix) -> (Vec<Vec<f64>>, Vec<f64>) {
        let cv = c * basis;
        let gram = cv.transpose() * &cv;
        let eig = SymmetricEigen::new(gram);
        let mut kernel = Vec::new();
        let mut sv = Vec::new();
        for k in 0..basis.ncols() {
            let s = eig.eigenvalues[k].max(0.0).sqrt();
            if s <= KERNEL_TOL {
                let z = eig.eigenvectors.column(k);
                let v = basis * z;
                kernel.push(v.iter().copied().collect());
            } else {
                sv.push(s);
            }
        }
        (kernel, sv)
    }

    /// Basis of `{v : Lv = λv, Cv = 0}` for each eigenvalue where it is nontrivial.
    pub fn unobservable_eigenspace(&self, c: &DenseMatrix) -> Result<Vec<UnobservableMode>> {
        if c.ncols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "C has {} columns, expected {}",
                c.ncols(),
                self.n
            )));
        }
        Ok(self
            .spaces
            .iter()
            .filter_map(|(value, basis)| {
                let (kernel, _) = Self::kernel_in_space(basis, c);
                (!kernel.is_empty()).then_some(UnobservableMode {
                    eigenvalue: *value,
                    basis: kernel,
                })
            })
            .collect())
    }

    /// Left-kernel analogue for `(L, B)`: `{v : Lv = λv, Bᵀv = 0}`.
    pub fn unreachable_eigenspace(&self, b: &DenseMatrix) -> Result<Vec<UnobservableMode>> {
        self.unobservable_eigenspace(&b.transpose())
    }

    /// `rank(O_n)` by the PBH route.
    pub fn observability_rank(&self, c: &DenseMatrix) -> Result<RankResult> {
        if c.ncols() != self.n {
            return Err(Error::DimensionMismatch("C must have n columns".into()));
        }
        let mut deficiency = 0;
        let mut pooled = Vec::new();
        for (_, basis) in &self.spaces {
            let (kernel, sv) = Self::kernel_in_space(basis, c);
            deficiency += kernel.len();
            pooled.extend(sv);
        }
        pooled.sort_by(|a, b| b.total_cmp(a));
        Ok(RankResult {
            rank: self.n - deficiency,
            singular_values: pooled,
            threshold: KERNEL_TOL,
            method: RankMethod::Pbh,
        })
    }

    /// `rank(R_n)` for `(L, B)` by the PBH route.
    pub fn reachability_rank(&self, b: &DenseMatrix) -> Result<RankResult> {
        if b.nrows() != self.n {
            return Err(Error::DimensionMismatch("B must have n rows".into()));
        }
        let mut deficiency = 0;
        let mut pooled = Vec::new();
        for (_, basis) in &self.spaces {
            // Bᵀ restricted to the eigenspace: the left kernel of [L − λI | B].
            let btv = b.transpose() * basis;
            let gram = btv.transpose() * &btv;
            let eig = SymmetricEigen::new(gram);
            for s in eig.eigenvalues.iter() {
                let s = s.max(0.0).sqrt();
                if s <= KERNEL_TOL {
                    deficiency += 1;
                } else {
                    pooled.push(s);
                }
            }
        }
        pooled.sort_by(|a, b| b.total_cmp(a));
        Ok(RankResult {
            rank: self.n - deficiency,
            singular_values: pooled,
            threshold: KERNEL_TOL,
            method: RankMethod::Pbh,
        })
    }
}

/// Basis of the unobservable eigenspaces of `(L, C)`.
pub fn unobservable_eigenspace(l: &DenseMatrix, c: &DenseMatrix) -> Result<Vec<UnobservableMode>> {
    SpectralOracle::new(l)?.unobservable_eigenspace(c)
}

/// `rank(O_n)`: literal Kalman matrix for `n ≤ KRYLOV_MAX_N`, PBH route above.
pub fn observability_rank(l: &DenseMatrix, c: &DenseMatrix) -> Result<RankResult> {
    if l.nrows() <= KRYLOV_MAX_N {
        let o = observability_matrix(l, c)?;
        Ok(RankResult {
            method: RankMethod::KrylovSvd,
            ..matrix_rank(&o)
        })
    } else {
        SpectralOracle::new(l)?.observability_rank(c)
    }
}

/// `rank(R_n)`: literal Kalman matrix for `n ≤ KRYLOV_MAX_N`, PBH route above.
pub fn reachability_rank(l: &DenseMatrix, b: &DenseMatrix) -> Result<RankResult> {
    if l.nrows() <= KRYLOV_MAX_N {
        let r = reachability_matrix(l, b)?;
        Ok(RankResult {
            method: RankMethod::KrylovSvd,
            ..matrix_rank(&r)
        })
    } else {
        SpectralOracle::new(l)?.reachability_rank(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        laplacian, output_matrix, submatrix_m, submatrix_n, GraphTopology, NodeSet,
    };

    fn setup(kind_cycle: bool, n: usize, nodes: &[usize]) -> (DenseMatrix, DenseMatrix) {
        let g = if kind_cycle {
            GraphTopology::cycle(n)
        } else {
            GraphTopology::path(n)
        }
        .unwrap();
        let s = NodeSet::new(nodes.iter().copied(), n).unwrap();
        (laplacian(&g), output_matrix(&g, &s).unwrap())
    }

    #[test]
    fn observability_matrix_small() {
        let (l, c) = setup(false, 2, &[1]);
        let o = observability_matrix(&l, &c).unwrap();
        assert_eq!(o, DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, -1.0]));
        assert_eq!(matrix_rank(&o).rank, 2);
        assert!(observability_matrix(&l, &DenseMatrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn ranks_of_known_configurations() {
        let (l, c) = setup(false, 6, &[2]);
        assert_eq!(observability_rank(&l, &c).unwrap().rank, 5);
        assert_eq!(matrix_rank(&observability_matrix(&l, &c).unwrap()).rank, 5);
        let (l, c) = setup(true, 15, &[4, 13]);
        let r = observability_rank(&l, &c).unwrap();
        assert_eq!(r.method, RankMethod::Pbh);
        // One unobservable eigenvalue (λ = 3), not two.
        assert_eq!(r.rank, 14);
    }

    #[test]
    fn pbh_ranks() {
        let (l, c) = setup(false, 6, &[2]);
        assert_eq!(
            pbh_rank(&l, &c, 1.0, PbhSide::Observability).unwrap().rank,
            5
        );
        assert_eq!(
            pbh_rank(&l, &c, 0.0, PbhSide::Observability).unwrap().rank,
            6
        );
        assert_eq!(
            pbh_rank(&l, &c, 0.7, PbhSide::Observability).unwrap().rank,
            6
        );
        let b = c.transpose();
        assert_eq!(
            pbh_rank(&l, &b, 1.0, PbhSide::Reachability).unwrap().rank,
            5
        );
    }

    #[test]
    fn eigenspaces() {
        let (l, c) = setup(false, 3, &[2]);
        let modes = unobservable_eigenspace(&l, &c).unwrap();
        assert_eq!(modes.len(), 1);
        assert!((modes[0].eigenvalue - 1.0).abs() < 1e-12);
        let v = &modes[0].basis[0];
        let h = 1.0 / 2f64.sqrt();
        assert!(
            (v[0].abs() - h).abs() < 1e-12 && v[1].abs() < 1e-12 && (v[0] + v[2]).abs() < 1e-12
        );

        let (l, c) = setup(false, 4, &[2]);
        assert!(unobservable_eigenspace(&l, &c).unwrap().is_empty());

        let (l, c) = setup(true, 4, &[1]);
        let modes = unobservable_eigenspace(&l, &c).unwrap();
        assert_eq!(modes.len(), 1);
        assert!((modes[0].eigenvalue - 2.0).abs() < 1e-12);
        assert_eq!(modes[0].basis.len(), 1);
    }

    #[test]
    fn symmetric_eigen_examples() {
        let one = symmetric_eigen(&submatrix_n(1).unwrap()).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0].value - 1.0).abs() < 1e-15 && (one[0].vector[0].abs() - 1.0).abs() < 1e-15);
        let m2: Vec<f64> = symmetric_eigen(&submatrix_m(2))
            .unwrap()
            .iter()
            .map(|p| p.value)
            .collect();
        assert!((m2[0] - 1.0).abs() < 1e-12 && (m2[1] - 3.0).abs() < 1e-12);
        let (l, _) = setup(false, 6, &[1]);
        let vals: Vec<f64> = symmetric_eigen(&l)
            .unwrap()
            .iter()
            .map(|p| p.value)
            .collect();
        assert!(vals.iter().any(|v| v.abs() < 1e-12));
        assert!(vals.iter().any(|v| (v - 1.0).abs() < 1e-12));
        let bad = DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(symmetric_eigen(&bad), Err(Error::NonSymmetric(_))));
    }

    #[test]
    fn rank_plus_kernel_is_n_and_krylov_matches_pbh() {
        for cyc in [false, true] {
            for n in 3..=KRYLOV_MAX_N {
                for i in 1..=n {
                    for j in i..=n {
                        let nodes: Vec<usize> = if i == j { vec![i] } else { vec![i, j] };
                        let (l, c) = setup(cyc, n, &nodes);
                        let oracle = SpectralOracle::new(&l).unwrap();
                        let pbh = oracle.observability_rank(&c).unwrap().rank;
                        let kry = matrix_rank(&observability_matrix(&l, &c).unwrap()).rank;
                        assert_eq!(pbh, kry, "cycle={cyc} n={n} {nodes:?}");
                        let dim: usize = oracle
                            .unobservable_eigenspace(&c)
                            .unwrap()
                            .iter()
                            .map(|m| m.basis.len())
                            .sum();
                        assert_eq!(pbh + dim, n);
                        let b = c.transpose();
                        assert_eq!(oracle.reachability_rank(&b).unwrap().rank, pbh);
                        assert_eq!(matrix_rank(&reachability_matrix(&l, &b).unwrap()).rank, pbh);
                    }
                }
            }
        }
    }

    #[test]
    fn pbh_deficiency_only_at_unobservable_eigenvalues() {
        let (l, c) = setup(true, 12, &[1, 5]);
        let oracle = SpectralOracle::new(&l).unwrap();
        let modes = oracle.unobservable_eigenspace(&c).unwrap();
        for (value, _) in oracle.eigenvalues() {
            let deficient = pbh_rank(&l, &c, value, PbhSide::Observability)
                .unwrap()
                .rank
                < 12;
            let listed = modes.iter().any(|m| (m.eigenvalue - value).abs() < 1e-9);
            assert_eq!(deficient, listed, "λ={value}");
        }
    }

    #[test]
    fn cayley_hamilton_ceiling() {
        for n in 3..=8 {
            let (l, c) = setup(false, n, &[2]);
            let base = matrix_rank(&observability_matrix(&l, &c).unwrap()).rank;
            for extra in 1..3 {
                let o = observability_matrix_depth(&l, &c, n + extra).unwrap();
                assert_eq!(matrix_rank(&o).rank, base);
            }
        }
    }
}
