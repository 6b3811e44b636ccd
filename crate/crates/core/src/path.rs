//! Reachability/observability of Laplacian consensus on a path.
//!
//! Cutting the path at the observed nodes `i_1 < … < i_m` leaves the blocks
//! `N_{i_1−1}, M_{i_2−i_1−1}, …, M_{i_m−i_{m−1}−1}, N_{n−i_m}`. The path is
//! unobservable exactly at the eigenvalues common to all of them. In integer
//! terms: with the chain `t = (2i_1−1, i_2−i_1, …, i_m−i_{m−1}, 2(n−i_m)+1)`
//! and `G = gcd(t)`, the unobservable eigenvalues are
//! `2 − 2cos((2ν−1)π/G)` for `ν = 1..(G−1)/2`.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::{laplacian, GraphTopology, NodeSet};
use crate::number_theory::{congruent, factorize, gcd_list};
use crate::report::{self, check_witness, NodeMarking, ObservabilityReport, Symbol};
use crate::spectral::{eigen_n, m_angles, n_angles, CosEigenvalue, EigenPair, RationalAngle};

/// `(2i_1−1, i_2−i_1, …, i_m−i_{m−1}, 2(n−i_m)+1)`.
pub fn chain_terms(n: usize, s: &NodeSet) -> Vec<u64> {
    let labels = s.labels();
    let first = labels[0] as u64;
    let last = labels[labels.len() - 1] as u64;
    let mut terms = vec![2 * first - 1];
    terms.extend(labels.windows(2).map(|w| (w[1] - w[0]) as u64));
    terms.push(2 * (n as u64 - last) + 1);
    terms
}

/// The congruence chain `t_0 ≡ t_1 ≡ … ≡ t_m (mod q)` with common residue 0.
///
/// Without the zero residue the chain also holds spuriously when `q | m`
/// (e.g. path 15 observed at {4,5,6}, `q = 3`).
pub fn congruence_chain_holds(terms: &[u64], q: u64) -> bool {
    let q = q as i64;
    terms
        .windows(2)
        .all(|w| congruent(w[0] as i64, w[1] as i64, q).unwrap_or(false))
        && terms[0] as i64 % q == 0
}

/// Single-node test `(n − i) ≡ (i − 1) (mod p)`.
pub fn single_node_congruence(n: usize, i: usize, p: u64) -> bool {
    congruent(n as i64 - i as i64, i as i64 - 1, p as i64).unwrap_or(false)
}

/// Odd prime powers `q | n` for which the chain holds.
pub fn blocking_moduli(n: usize, s: &NodeSet) -> Vec<u64> {
    let terms = chain_terms(n, s);
    factorize(n as u64)
        .expect("n >= 1")
        .odd_prime_powers()
        .into_iter()
        .filter(|&q| congruence_chain_holds(&terms, q))
        .collect()
}

/// Exact intersection of the block spectra (as rational angles).
pub fn common_block_angles(n: usize, s: &NodeSet) -> BTreeSet<RationalAngle> {
    let labels = s.labels();
    let mut common = n_angles(labels[0] - 1);
    for w in labels.windows(2) {
        let block = m_angles(w[1] - w[0] - 1);
        common = common.intersection(&block).copied().collect();
    }
    let tail = n_angles(n - labels[labels.len() - 1]);
    common.intersection(&tail).copied().collect()
}

/// Unobservable angles `(2ν−1)/G` from the chain gcd.
fn number_theoretic_angles(n: usize, s: &NodeSet) -> BTreeSet<RationalAngle> {
    let g = gcd_list(&chain_terms(n, s)).expect("non-empty chain");
    (1..=(g - 1) / 2)
        .map(|nu| RationalAngle::new(2 * nu - 1, g).expect("below g"))
        .collect()
}

/// Unit eigenvector of `L_n` at angle `c/d` (`d | n`, `c`, `d` odd), built as
/// `[v, 0, −Πv, −v, 0, Πv, v, 0, …]` from the eigenvector `v` of `N_{(d−1)/2}`.
/// Vanishes on `{ℓd − (d−1)/2}`.
pub fn block_witness(n: usize, angle: RationalAngle) -> Result<Vec<f64>> {
    let (c, d) = (angle.num() as usize, angle.den() as usize);
    if d % 2 == 0 || c % 2 == 0 || !n.is_multiple_of(d) || d < 3 {
        return Err(Error::InvalidInput(format!(
            "angle {angle} has no path block witness for n={n}"
        )));
    }
    let half = (d - 1) / 2;
    let v = eigen_n(half)?
        .into_iter()
        .nth((c - 1) / 2)
        .expect("index within N spectrum")
        .eigenvector;
    let rev: Vec<f64> = v.iter().rev().copied().collect();
    let mut w = Vec::with_capacity(n);
    w.extend(&v);
    let mut sign = 1.0;
    for _ in 1..n / d {
        sign = -sign;
        w.push(0.0);
        w.extend(rev.iter().map(|x| sign * x));
        w.extend(v.iter().map(|x| sign * x));
    }
    w.push(0.0);
    sign = -sign;
    w.extend(rev.iter().map(|x| sign * x));
    debug_assert_eq!(w.len(), n);
    Ok(crate::spectral::normalize(w))
}

fn witness_for(topology: &GraphTopology, s: &NodeSet, angle: RationalAngle) -> Result<Vec<f64>> {
    let l = laplacian(topology);
    let lambda = CosEigenvalue::from_angle(angle).value();
    if let Ok(w) = block_witness(topology.n, angle) {
        if check_witness(&l, s, lambda, &w).is_ok() {
            return Ok(w);
        }
    }
    let basis = report::numeric_witnesses(topology, s, lambda)?;
    let w = report::clean_witness(s, basis.into_iter().next().expect("non-empty kernel"));
    check_witness(&l, s, lambda, &w)?;
    Ok(w)
}

/// Full analysis for any node set on a path of `n` nodes.
///
/// The verdict is computed twice, from the congruence chain and from the
/// exact block-spectrum intersection; any disagreement is an error.
pub fn path_observability(n: usize, s: &NodeSet) -> Result<ObservabilityReport> {
    let topology = GraphTopology::path(n)?;
    if s.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "node set for n={}, path has n={n}",
            s.n()
        )));
    }
    let moduli = blocking_moduli(n, s);
    let arithmetic = number_theoretic_angles(n, s);
    let spectral = common_block_angles(n, s);
    if arithmetic != spectral || moduli.is_empty() != spectral.is_empty() {
        return Err(Error::Disagreement(format!(
            "path {n} at {s}: congruence route {arithmetic:?} (moduli {moduli:?}) vs block spectra {spectral:?}"
        )));
    }
    let mut pairs = Vec::with_capacity(arithmetic.len());
    for angle in arithmetic {
        let w = witness_for(&topology, s, angle)?;
        pairs.push(EigenPair {
            eigenvalue: CosEigenvalue::from_angle(angle),
            eigenvector: w,
        });
    }
    pairs.sort_by_key(|p| p.eigenvalue);
    Ok(ObservabilityReport {
        topology,
        nodes: s.clone(),
        observable: pairs.is_empty(),
        blocking_moduli: moduli,
        witness_subspace: pairs.iter().map(|p| p.eigenvector.clone()).collect(),
        unobservable_eigenpairs: pairs,
        oracle_checked: false,
    })
}

pub fn path_single_node_observable(n: usize, i: usize) -> Result<ObservabilityReport> {
    path_observability(n, &NodeSet::single(i, n)?)
}

pub fn path_multi_node_observable(n: usize, s: &NodeSet) -> Result<ObservabilityReport> {
    path_observability(n, s)
}

/// The nodes `I_o^m`, their shared unobservable eigenpairs and witnesses for
/// an odd divisor `m ≥ 3` of `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnobservableSet {
    pub nodes: NodeSet,
    pub eigenpairs: Vec<EigenPair>,
    pub witnesses: Vec<Vec<f64>>,
}

pub fn unobservable_set_for_prime_power(n: usize, m: usize) -> Result<UnobservableSet> {
    if m < 3 || m.is_multiple_of(2) || !n.is_multiple_of(m) {
        return Err(Error::InvalidInput(format!(
            "modulus {m} must be odd, >= 3 and divide {n}"
        )));
    }
    let nodes = NodeSet::new((1..=n / m).map(|l| l * m - (m - 1) / 2), n)?;
    let report = path_observability(n, &nodes)?;
    let expected: Vec<CosEigenvalue> = (1..=(m as u64 - 1) / 2)
        .map(|nu| CosEigenvalue::new(2 * nu - 1, m as u64).expect("below m"))
        .collect();
    let got: Vec<CosEigenvalue> = report
        .unobservable_eigenpairs
        .iter()
        .map(|p| p.eigenvalue)
        .collect();
    if got != expected {
        return Err(Error::Disagreement(format!(
            "I_o^{m} on path {n}: {got:?} vs {expected:?}"
        )));
    }
    Ok(UnobservableSet {
        nodes,
        witnesses: report.witness_subspace,
        eigenpairs: report.unobservable_eigenpairs,
    })
}

/// One symbol per odd prime power `q | n`, on the nodes `ℓq − (q−1)/2`.
pub fn mark_path_nodes(n: usize) -> Result<NodeMarking> {
    if n < 2 {
        return Err(Error::InvalidInput("marking needs n >= 2".into()));
    }
    let topology = GraphTopology::path(n)?;
    let mut marking = NodeMarking::empty(topology);
    for q in factorize(n as u64)?.odd_prime_powers() {
        let q = q as usize;
        for l in 1..=n / q {
            marking.mark(
                l * q - (q - 1) / 2,
                Symbol {
                    modulus: q as u64,
                    residue: None,
                },
            );
        }
    }
    Ok(marking)
}

fn select_from(n: usize, candidates: Vec<usize>, max_size: usize) -> Result<NodeSet> {
    let marking = mark_path_nodes(n)?;
    for k in 1..=max_size.min(candidates.len()) {
        for combo in candidates.iter().copied().combinations(k) {
            let set = NodeSet::new(combo, n)?;
            if marking.common_symbols(&set).is_empty() {
                let report = path_observability(n, &set)?;
                if !report.observable {
                    return Err(Error::Disagreement(format!(
                        "marking picked unobservable set {set}"
                    )));
                }
                return Ok(set);
            }
        }
    }
    Err(Error::NotFound(max_size))
}

/// Lexicographically smallest minimum-cardinality set with no symbol common
/// to all members. Node 1 is never marked, so this always returns `{1}`.
pub fn select_observable_set(n: usize, max_size: usize) -> Result<NodeSet> {
    select_from(n, (1..=n).collect(), max_size)
}

/// Like [`select_observable_set`] but restricted to internal nodes `2..n−1`.
///
/// For `n ≥ 4` two adjacent internal nodes always work, so `max_size ≥ 2`
/// never fails there; `n = 3` has no observable internal set.
pub fn select_internal_observable_set(n: usize, max_size: usize) -> Result<NodeSet> {
    select_from(n, (2..n).collect(), max_size)
}

/// Central node of an odd path: `(n−1)/2` unobservable eigenvalues, the
/// spectrum of `N_{(n−1)/2}`, with witnesses `[v; 0; −Πv]`.
pub fn central_node_analysis(n: usize) -> Result<ObservabilityReport> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "central node needs odd n >= 3, got {n}"
        )));
    }
    path_single_node_observable(n, n.div_ceil(2))
}
