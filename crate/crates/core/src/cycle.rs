//! Reachability/observability of Laplacian consensus on a cycle.
//!
//! With gaps `(i_2−i_1, …, n+i_1−i_m)` and `g` their gcd, the eigenvalue
//! `2 − 2cos(tπ/g)`, `1 ≤ t < g`, is unobservable iff `t·(n/g)` is even. The
//! parity condition comes from the sign each `M` block eigenvector picks up
//! across an observed node; going once around the ring it must come back
//! to `+1`. So the cycle is observable iff `g = 1`, or `g = 2` with
//! `n ≡ 2 (mod 4)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{laplacian, GraphTopology, NodeSet};
use crate::number_theory::{factorize, gcd_list};
use crate::report::{self, check_witness, NodeMarking, ObservabilityReport, Symbol};
use crate::spectral::{eigen_m, m_angles, sin_pi_ratio, CosEigenvalue, EigenPair, RationalAngle};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapVector {
    pub gaps: Vec<u64>,
}

impl GapVector {
    pub fn gcd(&self) -> u64 {
        gcd_list(&self.gaps).expect("gaps are positive")
    }
}

/// `(i_2−i_1, …, i_m−i_{m−1}, n+i_1−i_m)`; a single node gives `(n)`.
pub fn gap_vector(n: usize, s: &NodeSet) -> GapVector {
    let labels = s.labels();
    let mut gaps: Vec<u64> = labels.windows(2).map(|w| (w[1] - w[0]) as u64).collect();
    gaps.push((n + labels[0] - labels[labels.len() - 1]) as u64);
    GapVector { gaps }
}

/// The unrefined rule: observable iff the gap gcd is 1.
pub fn gcd_rule_observable(gaps: &GapVector) -> bool {
    gaps.gcd() == 1
}

/// Observable iff `g = 1`, or `g = 2` and `n ≡ 2 (mod 4)`.
pub fn refined_gcd_observable(n: usize, g: u64) -> bool {
    g == 1 || (g == 2 && n % 4 == 2)
}

/// Angles `t/g`, `1 ≤ t < g`, with `t·(n/g)` even.
pub fn unobservable_angles(n: usize, g: u64) -> BTreeSet<RationalAngle> {
    let h = n as u64 / g;
    (1..g)
        .filter(|t| (t * h).is_multiple_of(2))
        .map(|t| RationalAngle::new(t, g).expect("t < g"))
        .collect()
}

/// Block-spectrum route: common eigenvalues of the `M_{gap−1}` blocks, kept
/// only when the block eigenvectors close up consistently around the ring.
pub fn common_block_angles(gaps: &GapVector) -> BTreeSet<RationalAngle> {
    let mut common: Option<BTreeSet<RationalAngle>> = None;
    for &gap in &gaps.gaps {
        let block = m_angles(gap as usize - 1);
        common = Some(match common {
            None => block,
            Some(c) => c.intersection(&block).copied().collect(),
        });
    }
    common
        .unwrap_or_default()
        .into_iter()
        .filter(|a| {
            // Inside a block of length gap−1 the eigenvector index is k = a·gap.
            let flips: u64 = gaps.gaps.iter().map(|gap| a.num() * gap / a.den()).sum();
            flips.is_multiple_of(2)
        })
        .collect()
}

/// Symbol moduli on a cycle: every odd prime power of `n`, and powers of 2
/// only when `4 | n`.
fn cycle_moduli(n: usize) -> Vec<u64> {
    factorize(n as u64)
        .expect("n >= 1")
        .prime_powers()
        .into_iter()
        .filter(|q| q % 2 == 1 || n.is_multiple_of(4))
        .collect()
}

/// Witness `sin(tπ(ℓ − i_1)/g)`, exact zeros on every observed node.
pub fn sine_witness(n: usize, anchor: usize, angle: RationalAngle) -> Vec<f64> {
    let (t, g) = (angle.num() as i64, angle.den());
    let w = (1..=n as i64)
        .map(|l| sin_pi_ratio(t * (l - anchor as i64), g))
        .collect();
    crate::spectral::normalize(w)
}

/// Block form for node 1 observed: `[0, w, 0, ±w, …]` with `w` the eigenvector
/// of `M_{d−1}` at angle `t/d` and sign `(−1)^{t·q}` on the `q`-th block.
pub fn block_form_witness(n: usize, angle: RationalAngle) -> Result<Vec<f64>> {
    let (t, d) = (angle.num() as usize, angle.den() as usize);
    if !n.is_multiple_of(d) || t == 0 || t >= d || (t * (n / d)) % 2 == 1 {
        return Err(Error::InvalidInput(format!(
            "angle {angle} has no cycle block witness for n={n}"
        )));
    }
    let w = &eigen_m(d - 1)[t - 1].eigenvector;
    let mut out = Vec::with_capacity(n);
    for q in 0..n / d {
        let sign = if (t * q) % 2 == 0 { 1.0 } else { -1.0 };
        out.push(0.0);
        out.extend(w.iter().map(|x| sign * x));
    }
    Ok(crate::spectral::normalize(out))
}

fn witness_for(topology: &GraphTopology, s: &NodeSet, angle: RationalAngle) -> Result<Vec<f64>> {
    let l = laplacian(topology);
    let lambda = CosEigenvalue::from_angle(angle).value();
    let w = sine_witness(topology.n, s.labels()[0], angle);
    if check_witness(&l, s, lambda, &w).is_ok() {
        return Ok(w);
    }
    let basis = report::numeric_witnesses(topology, s, lambda)?;
    let w = report::clean_witness(s, basis.into_iter().next().expect("non-empty kernel"));
    check_witness(&l, s, lambda, &w)?;
    Ok(w)
}

/// Full analysis for any non-empty node set on a cycle of `n ≥ 3` nodes.
pub fn cycle_observability(n: usize, s: &NodeSet) -> Result<ObservabilityReport> {
    let topology = GraphTopology::cycle(n)?;
    if s.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "node set for n={}, cycle has n={n}",
            s.n()
        )));
    }
    let gaps = gap_vector(n, s);
    let g = gaps.gcd();
    let arithmetic = unobservable_angles(n, g);
    let spectral = common_block_angles(&gaps);
    if arithmetic != spectral || arithmetic.is_empty() != refined_gcd_observable(n, g) {
        return Err(Error::Disagreement(format!(
            "cycle {n} at {s}: gcd route {arithmetic:?} vs block spectra {spectral:?}"
        )));
    }
    let moduli: Vec<u64> = cycle_moduli(n)
        .into_iter()
        .filter(|q| g.is_multiple_of(*q))
        .collect();
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

/// A single node never observes a cycle; `⌊(n−1)/2⌋` eigenvalues (all the
/// doubled ones) are unobservable.
pub fn cycle_single_node(n: usize, i: usize) -> Result<ObservabilityReport> {
    cycle_observability(n, &NodeSet::single(i, n)?)
}

pub fn cycle_multi_node(n: usize, s: &NodeSet) -> Result<ObservabilityReport> {
    if s.len() < 2 {
        return Err(Error::InvalidInput(
            "single observation node: use cycle_single_node".into(),
        ));
    }
    cycle_observability(n, s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSet {
    pub nodes: NodeSet,
    pub eigenpairs: Vec<EigenPair>,
}

/// `{κ + ℓp}` for a divisor `p ≥ 2` of `n`, with its unobservable eigenpairs.
pub fn unobservable_cycle_set(n: usize, p: usize, kappa: usize) -> Result<CycleSet> {
    if p < 2 || !n.is_multiple_of(p) || kappa == 0 || kappa > p {
        return Err(Error::InvalidInput(format!(
            "need p | n, p >= 2 and 1 <= κ <= p (n={n}, p={p}, κ={kappa})"
        )));
    }
    let nodes = NodeSet::new((0..n / p).map(|l| kappa + l * p), n)?;
    let report = cycle_observability(n, &nodes)?;
    Ok(CycleSet {
        nodes,
        eigenpairs: report.unobservable_eigenpairs,
    })
}

/// Symbol `(q, κ)` on nodes `κ + ℓq` for every blocking prime power `q | n`.
pub fn mark_cycle_nodes(n: usize) -> Result<NodeMarking> {
    let topology = GraphTopology::cycle(n)?;
    let mut marking = NodeMarking::empty(topology);
    for q in cycle_moduli(n) {
        let q = q as usize;
        for label in 1..=n {
            let kappa = (label - 1) % q + 1;
            marking.mark(
                label,
                Symbol {
                    modulus: q as u64,
                    residue: Some(kappa as u64),
                },
            );
        }
    }
    Ok(marking)
}
