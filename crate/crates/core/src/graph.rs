//! Path and cycle graphs, their Laplacians and the boundary blocks `N_ν`, `M_μ`.
//!
//! Labels are 1-based in every public signature. Matrices are dense `f64`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;

/// Default upper bound on `n`.
pub const DEFAULT_MAX_N: usize = 10_000;

/// Environment variable overriding [`DEFAULT_MAX_N`].
pub const MAX_N_ENV: &str = "CONSENSUS_OBS_MAX_N";

/// Parses a cap override; `None` for unset, `Err` for garbage.
pub fn parse_size_cap(raw: Option<&str>) -> Result<Option<usize>> {
    match raw {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(cap) if cap >= 1 => Ok(Some(cap)),
            _ => Err(Error::InvalidInput(format!(
                "{MAX_N_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

/// Active size cap: the environment override if valid, else the default.
pub fn size_cap() -> usize {
    let raw = std::env::var(MAX_N_ENV).ok();
    parse_size_cap(raw.as_deref())
        .ok()
        .flatten()
        .unwrap_or(DEFAULT_MAX_N)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Path,
    Cycle,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyKind::Path => f.write_str("path"),
            TopologyKind::Cycle => f.write_str("cycle"),
        }
    }
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(TopologyKind::Path),
            "cycle" => Ok(TopologyKind::Cycle),
            other => Err(Error::InvalidInput(format!("unknown topology `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphTopology {
    pub kind: TopologyKind,
    pub n: usize,
}

impl GraphTopology {
    pub fn new(kind: TopologyKind, n: usize) -> Result<Self> {
        Self::with_cap(kind, n, size_cap())
    }

    pub fn with_cap(kind: TopologyKind, n: usize, cap: usize) -> Result<Self> {
        let min = match kind {
            TopologyKind::Path => 1,
            TopologyKind::Cycle => 3,
        };
        if n < min {
            return Err(Error::InvalidDimension(format!(
                "a {kind} needs at least {min} nodes, got {n}"
            )));
        }
        if n > cap {
            return Err(Error::SizeCap { n, cap });
        }
        Ok(Self { kind, n })
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(TopologyKind::Path, n)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        Self::new(TopologyKind::Cycle, n)
    }

    /// Undirected edges as 1-based label pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self.kind {
            TopologyKind::Path => (1..self.n).map(|i| (i, i + 1)).collect(),
            TopologyKind::Cycle => (1..=self.n).map(|i| (i, i % self.n + 1)).collect(),
        }
    }

    pub fn max_degree(&self) -> usize {
        match (self.kind, self.n) {
            (_, 1) => 0,
            (TopologyKind::Path, 2) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for GraphTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind, self.n)
    }
}

/// A sorted, duplicate-free set of 1-based node labels within `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeSet {
    labels: Vec<usize>,
    n: usize,
}

impl NodeSet {
    /// Labels may come in any order; duplicates are rejected.
    pub fn new(labels: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut labels: Vec<usize> = labels.into_iter().collect();
        if labels.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        labels.sort_unstable();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateNode(w[0]));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::NodeOutOfRange { label: bad, n });
        }
        Ok(Self { labels, n })
    }

    pub fn single(label: usize, n: usize) -> Result<Self> {
        Self::new([label], n)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: usize) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    /// Cyclic shift by `offset` positions on a ring of `n` nodes.
    pub fn rotated(&self, offset: usize) -> Self {
        let n = self.n;
        let labels = self.labels.iter().map(|&l| (l - 1 + offset) % n + 1);
        Self::new(labels, n).expect("rotation preserves validity")
    }

    /// Reflection `i -> n + 1 - i`.
    pub fn mirrored(&self) -> Self {
        let n = self.n;
        Self::new(self.labels.iter().map(|&l| n + 1 - l), n).expect("mirror preserves validity")
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, l) in self.labels.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

pub fn laplacian(g: &GraphTopology) -> DenseMatrix {
    let n = g.n;
    let mut l = DenseMatrix::zeros(n, n);
    for (a, b) in g.edges() {
        let (a, b) = (a - 1, b - 1);
        if a == b {
            continue;
        }
        l[(a, b)] -= 1.0;
        l[(b, a)] -= 1.0;
        l[(a, a)] += 1.0;
        l[(b, b)] += 1.0;
    }
    l
}

/// Adjacency matrix of the path on `n` nodes.
pub fn path_adjacency(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 })
}

/// `N_ν`: tridiagonal, diagonal `(1, 2, ..., 2)`, off-diagonal `-1`.
pub fn submatrix_n(nu: usize) -> Result<DenseMatrix> {
    if nu == 0 {
        return Err(Error::InvalidDimension("N_0 is undefined".into()));
    }
    let mut m = submatrix_m(nu);
    m[(0, 0)] = 1.0;
    Ok(m)
}

/// `M_μ`: tridiagonal, diagonal all 2, off-diagonal `-1`. `M_0` is the empty matrix.
pub fn submatrix_m(mu: usize) -> DenseMatrix {
    DenseMatrix::from_fn(mu, mu, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    })
}

/// `B = [e_{i_1} | ... | e_{i_m}]`.
pub fn input_matrix(g: &GraphTopology, s: &NodeSet) -> Result<DenseMatrix> {
    if s.n() != g.n {
        return Err(Error::DimensionMismatch(format!(
            "node set is for n={}, graph has n={}",
            s.n(),
            g.n
        )));
    }
    let mut b = DenseMatrix::zeros(g.n, s.len());
    for (col, &label) in s.labels().iter().enumerate() {
        b[(label - 1, col)] = 1.0;
    }
    Ok(b)
}

/// `C = Bᵀ`.
pub fn output_matrix(g: &GraphTopology, s: &NodeSet) -> Result<DenseMatrix> {
    Ok(input_matrix(g, s)?.transpose())
}

/// Index-reversal permutation `Π`.
pub fn reversal(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { 1.0 } else { 0.0 })
}
