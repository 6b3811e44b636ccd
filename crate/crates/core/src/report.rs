//! Result types shared by the path and cycle analyses.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{laplacian, output_matrix, DenseMatrix, GraphTopology, NodeSet, TopologyKind};
use crate::oracle::{RankMethod, SpectralOracle};
use crate::spectral::{residual_inf, EigenPair, RESIDUAL_TOL};

/// Bound on `|v_i|` at observed nodes for an emitted witness.
pub const WITNESS_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityReport {
    pub topology: GraphTopology,
    pub nodes: NodeSet,
    pub observable: bool,
    /// Prime powers dividing `n` whose node classes contain every observed node.
    pub blocking_moduli: Vec<u64>,
    pub unobservable_eigenpairs: Vec<EigenPair>,
    /// Orthonormal basis of the unobservable subspace.
    pub witness_subspace: Vec<Vec<f64>>,
    pub oracle_checked: bool,
}

impl ObservabilityReport {
    pub fn unobservable_count(&self) -> usize {
        self.unobservable_eigenpairs.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.unobservable_eigenpairs
            .iter()
            .map(|p| p.eigenvalue.value())
            .collect()
    }

    /// Structural consistency plus PBH validity of every witness.
    pub fn validate(&self) -> Result<()> {
        let empties = [
            self.blocking_moduli.is_empty(),
            self.unobservable_eigenpairs.is_empty(),
            self.witness_subspace.is_empty(),
        ];
        if empties.iter().any(|&e| e != self.observable) {
            return Err(Error::Disagreement(format!(
                "inconsistent report for {} {}: observable={} moduli={:?} pairs={} witnesses={}",
                self.topology,
                self.nodes,
                self.observable,
                self.blocking_moduli,
                self.unobservable_eigenpairs.len(),
                self.witness_subspace.len()
            )));
        }
        let l = laplacian(&self.topology);
        for pair in &self.unobservable_eigenpairs {
            check_witness(&l, &self.nodes, pair.eigenvalue.value(), &pair.eigenvector)?;
        }
        for w in &self.witness_subspace {
            let lambda = rayleigh(&l, w);
            check_witness(&l, &self.nodes, lambda, w)?;
        }
        Ok(())
    }
}

pub(crate) fn rayleigh(l: &DenseMatrix, w: &[f64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(w);
    v.dot(&(l * &v)) / v.dot(&v)
}

/// `‖Lw − λw‖∞ ≤ 1e-9` and `|w_i| ≤ 1e-12` for every observed node.
pub fn check_witness(l: &DenseMatrix, nodes: &NodeSet, lambda: f64, w: &[f64]) -> Result<()> {
    if w.len() != l.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "witness has {} entries",
            w.len()
        )));
    }
    let r = residual_inf(l, lambda, w);
    if r > RESIDUAL_TOL {
        return Err(Error::NotUnobservable(format!(
            "residual {r:e} at λ={lambda}"
        )));
    }
    let seen = nodes
        .labels()
        .iter()
        .map(|&i| w[i - 1].abs())
        .fold(0.0, f64::max);
    if seen > WITNESS_ZERO_TOL {
        return Err(Error::NotUnobservable(format!(
            "visible at observed nodes ({seen:e})"
        )));
    }
    if w.iter().all(|x| *x == 0.0) {
        return Err(Error::NotUnobservable("zero vector".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub oracle_rank: usize,
    pub method: RankMethod,
    pub unobservable_dimension: usize,
    pub agrees: bool,
}

/// Re-derives rank and unobservable eigenvalues numerically and compares them
/// with the report. Marks the report as checked on success.
pub fn cross_check(report: &mut ObservabilityReport) -> Result<OracleSummary> {
    report.validate()?;
    let l = laplacian(&report.topology);
    let c = output_matrix(&report.topology, &report.nodes)?;
    let oracle = SpectralOracle::new(&l)?;
    let rank = oracle.observability_rank(&c)?;
    let modes = oracle.unobservable_eigenspace(&c)?;
    let n = report.topology.n;
    let dim = n - rank.rank;
    let numeric: Vec<f64> = modes
        .iter()
        .flat_map(|m| std::iter::repeat_n(m.eigenvalue, m.basis.len()))
        .collect();
    let claimed = report.eigenvalues();
    let same_values = numeric.len() == claimed.len()
        && numeric
            .iter()
            .zip(&claimed)
            .all(|(a, b)| (a - b).abs() <= 1e-9);
    let agrees = report.observable == (rank.rank == n)
        && report.witness_subspace.len() == dim
        && same_values;
    if !agrees {
        return Err(Error::Disagreement(format!(
            "{} observed at {}: closed form says {} unobservable eigenvalues {:?}, oracle rank {} (eigenvalues {:?})",
            report.topology,
            report.nodes,
            claimed.len(),
            claimed,
            rank.rank,
            numeric
        )));
    }
    report.oracle_checked = true;
    Ok(OracleSummary {
        oracle_rank: rank.rank,
        method: rank.method,
        unobservable_dimension: dim,
        agrees,
    })
}

/// A marking symbol: the modulus `p^α` and, on cycles, the residue class `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub modulus: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue: Option<u64>,
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.residue {
            Some(k) => write!(f, "{}:{}", self.modulus, k),
            None => write!(f, "{}", self.modulus),
        }
    }
}

/// Symbols per node (index `label − 1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMarking {
    pub topology: GraphTopology,
    pub symbols: Vec<Vec<Symbol>>,
}

impl NodeMarking {
    pub(crate) fn empty(topology: GraphTopology) -> Self {
        Self {
            topology,
            symbols: vec![Vec::new(); topology.n],
        }
    }

    pub(crate) fn mark(&mut self, label: usize, symbol: Symbol) {
        let slot = &mut self.symbols[label - 1];
        if !slot.contains(&symbol) {
            slot.push(symbol);
            slot.sort();
        }
    }

    pub fn symbols_of(&self, label: usize) -> &[Symbol] {
        &self.symbols[label - 1]
    }

    pub fn nodes_with_modulus(&self, modulus: u64) -> Vec<usize> {
        (1..=self.topology.n)
            .filter(|&l| self.symbols_of(l).iter().any(|s| s.modulus == modulus))
            .collect()
    }

    pub fn unmarked(&self) -> Vec<usize> {
        (1..=self.topology.n)
            .filter(|&l| self.symbols_of(l).is_empty())
            .collect()
    }

    /// Symbols carried by every node of `set`.
    pub fn common_symbols(&self, set: &NodeSet) -> Vec<Symbol> {
        let mut it = set.labels().iter();
        let Some(&first) = it.next() else {
            return Vec::new();
        };
        let mut common: BTreeSet<Symbol> = self.symbols_of(first).iter().copied().collect();
        for &l in it {
            let here: BTreeSet<Symbol> = self.symbols_of(l).iter().copied().collect();
            common = common.intersection(&here).copied().collect();
        }
        common.into_iter().collect()
    }

    /// One line per node: `label: sym, sym`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in 1..=self.topology.n {
            let syms: Vec<String> = self.symbols_of(l).iter().map(Symbol::to_string).collect();
            let _ = writeln!(out, "{l}: {}", syms.join(","));
        }
        out
    }

    /// Graphviz rendering with symbols carried in node labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let name = format!("{}{}", self.topology.kind, self.topology.n);
        let _ = writeln!(out, "graph {name} {{");
        let _ = writeln!(out, "  node [shape=circle];");
        if self.topology.kind == TopologyKind::Path {
            let _ = writeln!(out, "  rankdir=LR;");
        }
        for l in 1..=self.topology.n {
            let syms: Vec<String> = self.symbols_of(l).iter().map(Symbol::to_string).collect();
            if syms.is_empty() {
                let _ = writeln!(out, "  {l} [label=\"{l}\"];");
            } else {
                let _ = writeln!(out, "  {l} [label=\"{l}\\n[{}]\"];", syms.join(","));
            }
        }
        for (a, b) in self.topology.edges() {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Orthonormal witnesses at a given eigenvalue taken from the numeric kernel.
pub(crate) fn numeric_witnesses(
    topology: &GraphTopology,
    nodes: &NodeSet,
    lambda: f64,
) -> Result<Vec<Vec<f64>>> {
    let l = laplacian(topology);
    let c = output_matrix(topology, nodes)?;
    let modes = SpectralOracle::new(&l)?.unobservable_eigenspace(&c)?;
    modes
        .into_iter()
        .find(|m| (m.eigenvalue - lambda).abs() <= 1e-8)
        .map(|m| m.basis)
        .ok_or_else(|| Error::Numerical(format!("no numeric kernel at λ={lambda}")))
}

/// Snap numerically tiny entries at observed nodes to zero.
pub(crate) fn clean_witness(nodes: &NodeSet, mut w: Vec<f64>) -> Vec<f64> {
    for &i in nodes.labels() {
        if w[i - 1].abs() <= 1e-10 {
            w[i - 1] = 0.0;
        }
    }
    crate::spectral::normalize(w)
}
