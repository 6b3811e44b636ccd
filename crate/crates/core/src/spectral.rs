//! Closed-form spectra of the path/cycle Laplacians, the boundary blocks `N_ν`
//! and `M_μ`, and the path adjacency matrix.
//!
//! Every eigenvalue here has the form `2 - 2cos(aπ/b)` with `a/b` rational, so
//! it is stored as the reduced fraction `a/b` and compared exactly.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{self, DenseMatrix, GraphTopology};
use crate::number_theory::gcd;

/// Residual tolerance every closed-form eigenpair must meet.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// A reduced fraction `a/b` with `0 <= a/b <= 1`, read as the angle `aπ/b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalAngle {
    num: u64,
    den: u64,
}

impl RationalAngle {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("angle denominator is zero".into()));
        }
        if num > den {
            return Err(Error::InvalidInput(format!("angle {num}/{den} exceeds π")));
        }
        let g = gcd(num, den);
        Ok(if num == 0 {
            Self { num: 0, den: 1 }
        } else {
            Self {
                num: num / g,
                den: den / g,
            }
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn radians(&self) -> f64 {
        PI * self.num as f64 / self.den as f64
    }
}

impl Ord for RationalAngle {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for RationalAngle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Eigenvalue `2 - 2cos(aπ/b)`. Ordering follows the numeric value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosEigenvalue(RationalAngle);

impl CosEigenvalue {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        RationalAngle::new(num, den).map(Self)
    }

    pub fn from_angle(angle: RationalAngle) -> Self {
        Self(angle)
    }

    pub fn angle(&self) -> RationalAngle {
        self.0
    }

    pub fn value(&self) -> f64 {
        2.0 - 2.0 * cos_pi_ratio(self.0.num as i64, self.0.den)
    }
}

impl fmt::Display for CosEigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2-2cos({}π) ≈ {:.6}", self.0, self.value())
    }
}

#[derive(Serialize, Deserialize)]
struct EigenvalueRepr {
    a: u64,
    b: u64,
    value: f64,
}

impl Serialize for CosEigenvalue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        EigenvalueRepr {
            a: self.0.num,
            b: self.0.den,
            value: self.value(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CosEigenvalue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = EigenvalueRepr::deserialize(deserializer)?;
        let ev = CosEigenvalue::new(repr.a, repr.b).map_err(serde::de::Error::custom)?;
        if ev.0.num != repr.a || ev.0.den != repr.b {
            return Err(serde::de::Error::custom(
                "eigenvalue angle not in lowest terms",
            ));
        }
        if (ev.value() - repr.value).abs() > 1e-12 {
            return Err(serde::de::Error::custom(
                "eigenvalue value does not match its angle",
            ));
        }
        Ok(ev)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub eigenvalue: CosEigenvalue,
    pub eigenvector: Vec<f64>,
}

impl EigenPair {
    /// Unit-normalizes and flips the sign so the first nonzero entry is positive.
    pub fn new(eigenvalue: CosEigenvalue, eigenvector: Vec<f64>) -> Self {
        Self {
            eigenvalue,
            eigenvector: normalize(eigenvector),
        }
    }

    pub fn residual(&self, a: &DenseMatrix) -> f64 {
        residual_inf(a, self.eigenvalue.value(), &self.eigenvector)
    }
}

/// Path adjacency eigenpair; the eigenvalue is `2cos(aπ/b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyPair {
    pub angle: RationalAngle,
    pub eigenvector: Vec<f64>,
}

impl AdjacencyPair {
    pub fn value(&self) -> f64 {
        2.0 * cos_pi_ratio(self.angle.num as i64, self.angle.den)
    }
}

/// `sin(π·num/den)`, exactly zero at integer multiples of π.
pub fn sin_pi_ratio(num: i64, den: u64) -> f64 {
    let period = 2 * den as i64;
    let r = num.rem_euclid(period);
    if r == 0 || r == den as i64 {
        return 0.0;
    }
    (PI * r as f64 / den as f64).sin()
}

/// `cos(π·num/den)`, exactly zero at odd multiples of π/2.
pub fn cos_pi_ratio(num: i64, den: u64) -> f64 {
    let period = 2 * den as i64;
    let r = num.rem_euclid(period);
    if 2 * r == den as i64 || 2 * r == 3 * den as i64 {
        return 0.0;
    }
    (PI * r as f64 / den as f64).cos()
}

pub(crate) fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v;
    }
    let tiny = 1e-12;
    let sign = v
        .iter()
        .find(|x| x.abs() > tiny * norm)
        .map_or(1.0, |x| x.signum());
    for x in &mut v {
        *x *= sign / norm;
    }
    v
}

/// `‖A v − λ v‖∞`.
pub fn residual_inf(a: &DenseMatrix, lambda: f64, v: &[f64]) -> f64 {
    let v = DVector::from_column_slice(v);
    (a * &v - v * lambda).amax()
}

fn checked(pairs: Vec<EigenPair>, matrix: impl FnOnce() -> DenseMatrix) -> Vec<EigenPair> {
    if cfg!(debug_assertions) {
        let a = matrix();
        for p in &pairs {
            let r = p.residual(&a);
            assert!(
                r <= RESIDUAL_TOL,
                "closed-form residual {r:e} for {}",
                p.eigenvalue
            );
        }
    }
    pairs
}

/// Closed-form spectrum of `N_ν`, ascending.
pub fn eigen_n(nu: usize) -> Result<Vec<EigenPair>> {
    if nu == 0 {
        return Err(Error::InvalidDimension("N_0 has no spectrum".into()));
    }
    let den = 2 * nu as u64 + 1;
    let pairs = (1..=nu as u64)
        .map(|k| {
            let odd = 2 * k - 1;
            let v = (1..=nu as u64)
                .map(|j| sin_pi_ratio(((nu as u64 + j) * odd) as i64, den))
                .collect();
            EigenPair::new(CosEigenvalue::new(odd, den).expect("odd < den"), v)
        })
        .collect();
    Ok(checked(pairs, || graph::submatrix_n(nu).expect("nu >= 1")))
}

/// Closed-form spectrum of `M_μ`, ascending. `M_0` yields nothing.
pub fn eigen_m(mu: usize) -> Vec<EigenPair> {
    let den = mu as u64 + 1;
    let pairs = (1..=mu as u64)
        .map(|k| {
            let v = (1..=mu as u64)
                .map(|j| sin_pi_ratio((j * k) as i64, den))
                .collect();
            EigenPair::new(CosEigenvalue::new(k, den).expect("k < den"), v)
        })
        .collect();
    checked(pairs, || graph::submatrix_m(mu))
}

/// Path Laplacian: `λ_k = 2 - 2cos((k-1)π/n)` with cosine eigenvectors
/// `(v_k)_j = cos((2j-1)(k-1)π/(2n))`.
pub fn eigen_path_laplacian(n: usize) -> Result<Vec<EigenPair>> {
    if n == 0 {
        return Err(Error::InvalidDimension("empty path".into()));
    }
    let nn = n as u64;
    let pairs = (0..nn)
        .map(|k| {
            let v = (1..=nn)
                .map(|j| cos_pi_ratio(((2 * j - 1) * k) as i64, 2 * nn))
                .collect();
            EigenPair::new(CosEigenvalue::new(k, nn).expect("k < n"), v)
        })
        .collect();
    Ok(checked(pairs, || {
        graph::laplacian(&GraphTopology::path(n).expect("n >= 1"))
    }))
}

/// Cycle Laplacian with multiplicities: `λ_j = 2 - 2cos(2πj/n)`, real
/// cosine/sine eigenvectors, ascending.
pub fn eigen_cycle_laplacian(n: usize) -> Result<Vec<EigenPair>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("cycle needs n >= 3, got {n}")));
    }
    let nn = n as u64;
    let mut pairs = vec![EigenPair::new(CosEigenvalue::new(0, 1)?, vec![1.0; n])];
    for j in 1..nn {
        if 2 * j > nn {
            break;
        }
        let ev = CosEigenvalue::new(2 * j, nn)?;
        let phase = |l: u64| (2 * j * l) as i64;
        if 2 * j == nn {
            pairs.push(EigenPair::new(
                ev,
                (0..nn).map(|l| cos_pi_ratio(phase(l), nn)).collect(),
            ));
        } else {
            pairs.push(EigenPair::new(
                ev,
                (0..nn).map(|l| cos_pi_ratio(phase(l), nn)).collect(),
            ));
            pairs.push(EigenPair::new(
                ev,
                (0..nn).map(|l| sin_pi_ratio(phase(l), nn)).collect(),
            ));
        }
    }
    Ok(checked(pairs, || {
        graph::laplacian(&GraphTopology::cycle(n).expect("n >= 3"))
    }))
}

/// Path adjacency: `λ_k = 2cos(kπ/(n+1))`, `(v_k)_i = sin(ikπ/(n+1))`, in `k` order.
pub fn eigen_path_adjacency(n: usize) -> Result<Vec<AdjacencyPair>> {
    if n == 0 {
        return Err(Error::InvalidDimension("empty path".into()));
    }
    let den = n as u64 + 1;
    Ok((1..den)
        .map(|k| AdjacencyPair {
            angle: RationalAngle::new(k, den).expect("k < den"),
            eigenvector: normalize(
                (1..den)
                    .map(|i| sin_pi_ratio((i * k) as i64, den))
                    .collect(),
            ),
        })
        .collect())
}

/// Spectrum of `N_ν` as exact angles `(2k-1)/(2ν+1)`; empty for `ν = 0`.
pub fn n_angles(nu: usize) -> BTreeSet<RationalAngle> {
    let den = 2 * nu as u64 + 1;
    (1..=nu as u64)
        .map(|k| RationalAngle::new(2 * k - 1, den).expect("odd < den"))
        .collect()
}

/// Spectrum of `M_μ` as exact angles `k/(μ+1)`; empty for `μ = 0`.
pub fn m_angles(mu: usize) -> BTreeSet<RationalAngle> {
    let den = mu as u64 + 1;
    (1..=mu as u64)
        .map(|k| RationalAngle::new(k, den).expect("k < den"))
        .collect()
}

fn char_poly_at(a: &DenseMatrix, s: f64) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 1.0;
    }
    (DMatrix::identity(n, n) * s - a).determinant()
}

/// Checks, at `s ∈ {-1, 0.5, 2.7, 5}`, the three block recursions
/// `det(sI-N_μ) = (s-1)det(sI-M_{μ-1}) - det(sI-M_{μ-2})`,
/// `det(sI-N_μ) = (s-2)det(sI-N_{μ-1}) - det(sI-N_{μ-2})`,
/// `det(sI-M_μ) = (s-2)det(sI-M_{μ-1}) - det(sI-M_{μ-2})`,
/// and `det(sI-L_μ) = s·det(sI-M_{μ-1})` for the path Laplacian.
pub fn charpoly_recursion_check(mu: usize) -> bool {
    if mu < 3 {
        return false;
    }
    let n = |k: usize| graph::submatrix_n(k).expect("k >= 1");
    let m = graph::submatrix_m;
    let l = graph::laplacian(&GraphTopology::path(mu).expect("mu >= 1"));
    let close = |lhs: f64, terms: &[f64]| {
        let rhs: f64 = terms.iter().sum();
        let scale = terms
            .iter()
            .fold(lhs.abs(), |acc, t| acc.max(t.abs()))
            .max(1.0);
        (lhs - rhs).abs() <= 1e-8 * scale
    };
    [-1.0, 0.5, 2.7, 5.0].into_iter().all(|s| {
        let d = char_poly_at;
        close(
            d(&n(mu), s),
            &[(s - 1.0) * d(&m(mu - 1), s), -d(&m(mu - 2), s)],
        ) && close(
            d(&n(mu), s),
            &[(s - 2.0) * d(&n(mu - 1), s), -d(&n(mu - 2), s)],
        ) && close(
            d(&m(mu), s),
            &[(s - 2.0) * d(&m(mu - 1), s), -d(&m(mu - 2), s)],
        ) && close(d(&l, s), &[s * d(&m(mu - 1), s)])
    })
}

/// Every eigenvalue of `N_ν` is one of `M_{2ν}` (exact angles), with eigenvector `[Πv; v]`.
pub fn n_embeds_in_m2nu_check(nu: usize) -> bool {
    let Ok(n_pairs) = eigen_n(nu) else {
        return false;
    };
    let m_spec = m_angles(2 * nu);
    let m2 = graph::submatrix_m(2 * nu);
    n_pairs.iter().all(|p| {
        let v = &p.eigenvector;
        let stacked: Vec<f64> = v.iter().rev().chain(v.iter()).copied().collect();
        m_spec.contains(&p.eigenvalue.angle())
            && residual_inf(&m2, p.eigenvalue.value(), &stacked) <= RESIDUAL_TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(pairs: &[EigenPair]) -> Vec<f64> {
        pairs.iter().map(|p| p.eigenvalue.value()).collect()
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn angles_reduce_and_order() {
        let a = RationalAngle::new(2, 6).unwrap();
        assert_eq!((a.num(), a.den()), (1, 3));
        assert_eq!(
            RationalAngle::new(0, 7).unwrap(),
            RationalAngle::new(0, 1).unwrap()
        );
        assert!(RationalAngle::new(4, 3).is_err());
        assert!(RationalAngle::new(1, 0).is_err());
        assert!(RationalAngle::new(1, 3).unwrap() < RationalAngle::new(2, 5).unwrap());
        assert_eq!(
            CosEigenvalue::new(3, 9).unwrap(),
            CosEigenvalue::new(1, 3).unwrap()
        );
    }

    #[test]
    fn exact_trig_zeros() {
        assert_eq!(sin_pi_ratio(15, 5), 0.0);
        assert_eq!(sin_pi_ratio(-10, 5), 0.0);
        assert_eq!(cos_pi_ratio(3, 6), 0.0);
        assert_eq!(cos_pi_ratio(9, 6), 0.0);
        assert!((cos_pi_ratio(1, 3) - 0.5).abs() < 1e-15);
        assert!((sin_pi_ratio(-1, 2) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn n_spectra() {
        assert_close(&values(&eigen_n(1).unwrap()), &[1.0], 1e-12);
        assert_close(
            &values(&eigen_n(4).unwrap()),
            &[0.12061476, 1.0, 2.34729636, 3.53208889],
            1e-8,
        );
        assert_close(
            &values(&eigen_n(2).unwrap()),
            &[0.38196601, 2.61803399],
            1e-8,
        );
        assert!(eigen_n(0).is_err());
    }

    #[test]
    fn m_spectra() {
        assert!(eigen_m(0).is_empty());
        assert_close(&values(&eigen_m(2)), &[1.0, 3.0], 1e-12);
        assert_close(
            &values(&eigen_m(4)),
            &[0.3820, 1.3820, 2.6180, 3.6180],
            5e-5,
        );
        let m4: Vec<_> = eigen_m(4).iter().map(|p| p.eigenvalue).collect();
        assert!(m4.contains(&CosEigenvalue::new(1, 5).unwrap()));
        assert!(m4.contains(&CosEigenvalue::new(3, 5).unwrap()));
    }

    #[test]
    fn path_laplacian_spectra() {
        assert_close(
            &values(&eigen_path_laplacian(2).unwrap()),
            &[0.0, 2.0],
            1e-12,
        );
        let s2 = 2f64.sqrt();
        assert_close(
            &values(&eigen_path_laplacian(4).unwrap()),
            &[0.0, 2.0 - s2, 2.0, 2.0 + s2],
            1e-12,
        );
        let six: Vec<_> = eigen_path_laplacian(6)
            .unwrap()
            .iter()
            .map(|p| p.eigenvalue)
            .collect();
        assert!(six.contains(&CosEigenvalue::new(1, 3).unwrap()));
    }

    #[test]
    fn cycle_laplacian_spectra() {
        assert_close(
            &values(&eigen_cycle_laplacian(4).unwrap()),
            &[0.0, 2.0, 2.0, 4.0],
            1e-12,
        );
        assert_close(
            &values(&eigen_cycle_laplacian(3).unwrap()),
            &[0.0, 3.0, 3.0],
            1e-12,
        );
        let one = CosEigenvalue::new(1, 3).unwrap();
        let c6 = eigen_cycle_laplacian(6).unwrap();
        assert_eq!(c6.iter().filter(|p| p.eigenvalue == one).count(), 2);
        assert!(eigen_cycle_laplacian(2).is_err());
    }

    #[test]
    fn adjacency_spectra() {
        let vals = |n| {
            eigen_path_adjacency(n)
                .unwrap()
                .iter()
                .map(|p| p.value())
                .collect::<Vec<_>>()
        };
        assert_close(&vals(1), &[0.0], 1e-12);
        assert_close(&vals(2), &[1.0, -1.0], 1e-12);
        let s2 = 2f64.sqrt();
        assert_close(&vals(3), &[s2, 0.0, -s2], 1e-12);
        let mut m3: Vec<f64> = values(&eigen_m(3)).iter().map(|x| x - 2.0).collect();
        let mut a3 = vals(3);
        m3.sort_by(f64::total_cmp);
        a3.sort_by(f64::total_cmp);
        assert_close(&a3, &m3, 1e-12);
    }

    #[test]
    fn recursions_hold() {
        assert!(charpoly_recursion_check(3));
        assert!(charpoly_recursion_check(5));
        assert!(charpoly_recursion_check(10));
        assert!(!charpoly_recursion_check(2));
    }

    #[test]
    fn n_inside_m2nu() {
        for nu in 1..=30 {
            assert!(n_embeds_in_m2nu_check(nu), "nu={nu}");
            let m = m_angles(2 * nu);
            for a in n_angles(nu) {
                assert!(m.contains(&a));
                assert_eq!(a.num() % 2, 1);
            }
        }
    }

    #[test]
    fn boundary_components_nonzero() {
        for k in 1..=200 {
            let fams = [
                eigen_n(k).unwrap(),
                eigen_m(k),
                eigen_path_laplacian(k).unwrap(),
            ];
            for p in fams.iter().flatten() {
                let v = &p.eigenvector;
                assert!(v[0].abs() >= 1e-9 && v[v.len() - 1].abs() >= 1e-9);
                assert!(v.iter().find(|x| **x != 0.0).unwrap() > &0.0);
            }
        }
    }

    #[test]
    fn exact_equality_agrees_with_numeric() {
        let mut all = BTreeSet::new();
        for b in 1..=500u64 {
            for a in 0..=b {
                all.insert(RationalAngle::new(a, b).unwrap());
            }
        }
        let all: Vec<_> = all.into_iter().map(CosEigenvalue::from_angle).collect();
        for w in all.windows(2) {
            assert!((w[0].value() - w[1].value()).abs() > 1e-12);
        }
    }
}
