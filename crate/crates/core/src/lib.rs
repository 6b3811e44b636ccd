pub mod cli;
pub mod cycle;
pub mod error;
pub mod graph;
pub mod number_theory;
pub mod oracle;
pub mod path;
pub mod report;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{GraphTopology, NodeSet, TopologyKind};
pub use report::{NodeMarking, ObservabilityReport};
