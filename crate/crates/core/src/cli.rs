//! Command-line front end. Exit codes: 0 observable / success, 2 usage,
//! 3 unobservable (or a rejected steering target), 4 verification
//! disagreement, 5 simulation failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    parse_size_cap, GraphTopology, NodeSet, TopologyKind, DEFAULT_MAX_N, MAX_N_ENV,
};
use crate::report::{cross_check, NodeMarking, ObservabilityReport, OracleSummary};
use crate::simulator::{
    analyze, demo_initial_state, indistinguishability_demo, steering_demo, Mode, SteeringOutcome,
    Trajectory,
};
use crate::{cycle, path};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNOBSERVABLE: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;
pub const EXIT_SIMULATION: i32 = 5;

/// `analyze` runs the numeric cross-check automatically up to this size.
pub const AUTO_ORACLE_MAX_N: usize = 200;

#[derive(Debug, Parser)]
#[command(
    name = "consensus-obs",
    version,
    about = "Observability and reachability of consensus on paths and cycles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Path,
    Cycle,
}

impl From<Kind> for TopologyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Path => TopologyKind::Path,
            Kind::Cycle => TopologyKind::Cycle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarkFormat {
    Text,
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Indistinguishable,
    Steer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Continuous,
    Discrete,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide observability for a set of observed nodes and print a JSON report.
    Analyze {
        kind: Kind,
        n: usize,
        /// Comma-separated 1-based labels.
        #[arg(long, value_delimiter = ',', required = true)]
        nodes: Vec<usize>,
        /// Skip the numeric cross-check.
        #[arg(long)]
        no_oracle: bool,
        /// Force the numeric cross-check regardless of size.
        #[arg(long, conflicts_with = "no_oracle")]
        oracle: bool,
        /// Leave the marking table out of the document.
        #[arg(long)]
        no_marking: bool,
    },
    /// Print the node marking.
    Mark {
        kind: Kind,
        n: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: MarkFormat,
    },
    /// Sweep all node subsets and compare closed form with the numeric oracle.
    Verify {
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        subset_sizes: Vec<usize>,
        /// Restrict the sweep to one topology.
        #[arg(long, value_enum)]
        topology: Option<Kind>,
        /// On paths, use interior nodes only.
        #[arg(long)]
        internal_only: bool,
    },
    /// Run a consensus simulation demo.
    Simulate {
        kind: Kind,
        n: usize,
        #[arg(long, value_delimiter = ',')]
        observers: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        leaders: Option<Vec<usize>>,
        #[arg(long, value_enum)]
        demo: Demo,
        #[arg(long, value_enum, default_value = "continuous")]
        mode: SimMode,
        /// Time horizon (continuous mode).
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Steering target; defaults to a fixed reachable state.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        target: Option<Vec<f64>>,
        /// Write the trajectory as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: CommandEcho,
    pub report: ObservabilityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marking: Option<NodeMarking>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCount {
    pub topology: TopologyKind,
    pub subset_size: usize,
    pub configurations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub schema_version: String,
    pub command: CommandEcho,
    pub counts: Vec<SweepCount>,
    pub total: usize,
    pub unobservable: usize,
    pub disagreements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub schema_version: String,
    pub command: CommandEcho,
    pub demo: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_output_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unreachable_component: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
    fn simulation(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_SIMULATION,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let echo = CommandEcho {
        name: args
            .get(1)
            .map(|a| a.to_string_lossy().into_owned())
            .unwrap_or_default(),
        args: args
            .iter()
            .skip(2)
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
    };
    let cap = match parse_size_cap(std::env::var(MAX_N_ENV).ok().as_deref()) {
        Ok(c) => c.unwrap_or(DEFAULT_MAX_N),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Analyze {
            kind,
            n,
            nodes,
            no_oracle,
            oracle,
            no_marking,
        } => cmd_analyze(
            kind.into(),
            n,
            &nodes,
            cap,
            oracle || (!no_oracle && n <= AUTO_ORACLE_MAX_N),
            !no_marking,
            echo,
            stdout,
        ),
        Command::Mark { kind, n, format } => cmd_mark(kind.into(), n, format, cap, stdout),
        Command::Verify {
            max_n,
            subset_sizes,
            topology,
            internal_only,
        } => cmd_verify(
            max_n,
            &subset_sizes,
            topology.map(Into::into),
            internal_only,
            cap,
            echo,
            stdout,
        ),
        Command::Simulate {
            kind,
            n,
            observers,
            leaders,
            demo,
            mode,
            horizon,
            dt,
            epsilon,
            steps,
            target,
            out,
        } => {
            let sim = SimulateArgs {
                observers,
                leaders,
                demo,
                mode,
                horizon,
                dt,
                epsilon,
                steps,
                target,
                out,
            };
            cmd_simulate(kind.into(), n, sim, cap, echo, stdout)
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn topology(
    kind: TopologyKind,
    n: usize,
    cap: usize,
) -> std::result::Result<GraphTopology, Failure> {
    GraphTopology::with_cap(kind, n, cap).map_err(Failure::usage)
}

fn emit<T: Serialize>(stdout: &mut dyn Write, value: &T) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    writeln!(stdout, "{text}").map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })
}

fn marking(topo: &GraphTopology) -> Result<NodeMarking> {
    match topo.kind {
        TopologyKind::Path => path::mark_path_nodes(topo.n),
        TopologyKind::Cycle => cycle::mark_cycle_nodes(topo.n),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    kind: TopologyKind,
    n: usize,
    nodes: &[usize],
    cap: usize,
    run_oracle: bool,
    with_marking: bool,
    command: CommandEcho,
    stdout: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let topo = topology(kind, n, cap)?;
    let set = NodeSet::new(nodes.iter().copied(), n).map_err(Failure::usage)?;
    let mut report = analyze(&topo, &set).map_err(|e| Failure {
        code: EXIT_DISAGREEMENT,
        message: e.to_string(),
    })?;
    let oracle = if run_oracle {
        Some(cross_check(&mut report).map_err(|e| Failure {
            code: EXIT_DISAGREEMENT,
            message: e.to_string(),
        })?)
    } else {
        None
    };
    let marking = if with_marking && !(kind == TopologyKind::Path && n < 2) {
        Some(marking(&topo).map_err(Failure::usage)?)
    } else {
        None
    };
    let observable = report.observable;
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION.into(),
        command,
        report,
        marking,
        oracle,
    };
    emit(stdout, &doc)?;
    Ok(if observable {
        EXIT_OK
    } else {
        EXIT_UNOBSERVABLE
    })
}

fn cmd_mark(
    kind: TopologyKind,
    n: usize,
    format: MarkFormat,
    cap: usize,
    stdout: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let topo = topology(kind, n, cap)?;
    let m = marking(&topo).map_err(Failure::usage)?;
    match format {
        MarkFormat::Text => write!(stdout, "{}", m.to_text()),
        MarkFormat::Dot => write!(stdout, "{}", m.to_dot()),
        MarkFormat::Json => return emit(stdout, &m).map(|_| EXIT_OK),
    }
    .map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    Ok(EXIT_OK)
}

/// Every configuration of the sweep, in deterministic order.
pub fn sweep_configurations(
    max_n: usize,
    subset_sizes: &[usize],
    kinds: &[TopologyKind],
    internal_only: bool,
) -> Vec<(TopologyKind, usize, Vec<usize>)> {
    let mut out = Vec::new();
    for &kind in kinds {
        let min_n = match kind {
            TopologyKind::Path => 2,
            TopologyKind::Cycle => 3,
        };
        for &k in subset_sizes {
            for n in min_n..=max_n {
                let labels: Vec<usize> = match (kind, internal_only) {
                    (TopologyKind::Path, true) => (2..n).collect(),
                    _ => (1..=n).collect(),
                };
                for combo in labels.into_iter().combinations(k) {
                    out.push((kind, n, combo));
                }
            }
        }
    }
    out
}

fn cmd_verify(
    max_n: usize,
    subset_sizes: &[usize],
    only: Option<TopologyKind>,
    internal_only: bool,
    cap: usize,
    command: CommandEcho,
    stdout: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    if max_n > cap {
        return Err(Failure::usage(Error::SizeCap { n: max_n, cap }));
    }
    if subset_sizes.is_empty() || subset_sizes.contains(&0) {
        return Err(Failure::usage("subset sizes must be positive"));
    }
    let kinds: Vec<TopologyKind> = match only {
        Some(k) => vec![k],
        None => vec![TopologyKind::Path, TopologyKind::Cycle],
    };
    let configs = sweep_configurations(max_n, subset_sizes, &kinds, internal_only);
    let outcomes: Vec<std::result::Result<bool, String>> = configs
        .par_iter()
        .map(|(kind, n, labels)| {
            let check = || -> Result<bool> {
                let topo = GraphTopology::with_cap(*kind, *n, cap)?;
                let set = NodeSet::new(labels.iter().copied(), *n)?;
                let mut report = analyze(&topo, &set)?;
                cross_check(&mut report)?;
                Ok(report.observable)
            };
            check().map_err(|e| format!("{kind} {n} nodes {labels:?}: {e}"))
        })
        .collect();

    let mut counts = Vec::new();
    for &kind in &kinds {
        for &k in subset_sizes {
            let c = configs
                .iter()
                .filter(|(t, _, l)| *t == kind && l.len() == k)
                .count();
            counts.push(SweepCount {
                topology: kind,
                subset_size: k,
                configurations: c,
            });
        }
    }
    let disagreements: Vec<String> = outcomes
        .iter()
        .filter_map(|o| o.as_ref().err().cloned())
        .collect();
    let unobservable = outcomes.iter().filter(|o| matches!(o, Ok(false))).count();
    let summary = VerifySummary {
        schema_version: SCHEMA_VERSION.into(),
        command,
        counts,
        total: configs.len(),
        unobservable,
        disagreements,
    };
    emit(stdout, &summary)?;
    Ok(if summary.disagreements.is_empty() {
        EXIT_OK
    } else {
        EXIT_DISAGREEMENT
    })
}

struct SimulateArgs {
    observers: Option<Vec<usize>>,
    leaders: Option<Vec<usize>>,
    demo: Demo,
    mode: SimMode,
    horizon: Option<f64>,
    dt: f64,
    epsilon: f64,
    steps: usize,
    target: Option<Vec<f64>>,
    out: Option<PathBuf>,
}

fn write_csv(
    traj: &Trajectory,
    out: &Option<PathBuf>,
) -> std::result::Result<Option<String>, Failure> {
    let Some(path) = out else { return Ok(None) };
    let file = std::fs::File::create(path)
        .map_err(|e| Failure::simulation(format!("{}: {e}", path.display())))?;
    traj.write_csv(file).map_err(Failure::simulation)?;
    Ok(Some(path.display().to_string()))
}

fn cmd_simulate(
    kind: TopologyKind,
    n: usize,
    a: SimulateArgs,
    cap: usize,
    command: CommandEcho,
    stdout: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let topo = topology(kind, n, cap)?;
    let mut summary = SimulationSummary {
        schema_version: SCHEMA_VERSION.into(),
        command,
        demo: String::new(),
        passed: false,
        eigenvalue: None,
        max_output_gap: None,
        terminal_error: None,
        input_energy: None,
        unreachable_component: None,
        csv: None,
    };
    let code = match a.demo {
        Demo::Indistinguishable => {
            summary.demo = "indistinguishable".into();
            let labels = a
                .observers
                .ok_or_else(|| Failure::usage("--observers is required for this demo"))?;
            let set = NodeSet::new(labels, n).map_err(Failure::usage)?;
            let mode = match a.mode {
                SimMode::Continuous => Mode::ContinuousRk4 {
                    dt: a.dt,
                    horizon: a.horizon.unwrap_or(20.0),
                },
                SimMode::Discrete => Mode::DiscreteEpsilon {
                    epsilon: a.epsilon,
                    steps: a.steps,
                },
            };
            let r = indistinguishability_demo(&topo, &set, mode).map_err(Failure::simulation)?;
            summary.csv = write_csv(&r.base, &a.out)?;
            summary.passed = true;
            summary.eigenvalue = Some(r.eigenvalue);
            summary.max_output_gap = Some(r.max_output_gap);
            EXIT_OK
        }
        Demo::Steer => {
            summary.demo = "steer".into();
            if a.mode == SimMode::Discrete {
                return Err(Failure::usage(
                    "the steering demo runs in continuous mode only",
                ));
            }
            let labels = a
                .leaders
                .ok_or_else(|| Failure::usage("--leaders is required for this demo"))?;
            let set = NodeSet::new(labels, n).map_err(Failure::usage)?;
            let target = match a.target {
                Some(t) => t,
                None => default_target(&topo, &set).map_err(Failure::simulation)?,
            };
            if target.len() != n {
                return Err(Failure::usage(format!("target needs {n} entries")));
            }
            match steering_demo(&topo, &set, &target, a.horizon.unwrap_or(10.0))
                .map_err(Failure::simulation)?
            {
                SteeringOutcome::Reached {
                    terminal_error,
                    input_energy,
                    trajectory,
                } => {
                    summary.csv = write_csv(&trajectory, &a.out)?;
                    summary.passed = true;
                    summary.terminal_error = Some(terminal_error);
                    summary.input_energy = Some(input_energy);
                    EXIT_OK
                }
                SteeringOutcome::Rejected {
                    unreachable_component,
                    ..
                } => {
                    summary.unreachable_component = Some(unreachable_component);
                    EXIT_UNOBSERVABLE
                }
            }
        }
    };
    emit(stdout, &summary)?;
    Ok(code)
}

/// The demo initial state with its unreachable component removed.
fn default_target(topo: &GraphTopology, leaders: &NodeSet) -> Result<Vec<f64>> {
    let report = analyze(topo, leaders)?;
    let mut t = demo_initial_state(topo.n);
    for w in &report.witness_subspace {
        let c: f64 = w.iter().zip(&t).map(|(a, b)| a * b).sum();
        for (x, wi) in t.iter_mut().zip(w) {
            *x -= c * wi;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("consensus-obs").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn report_document_round_trips() {
        let (code, out, _) = call(&["analyze", "path", "6", "--nodes", "2"]);
        assert_eq!(code, EXIT_UNOBSERVABLE);
        let doc: ReportDocument = serde_json::from_str(&out).unwrap();
        let again: ReportDocument =
            serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(doc, again);
        assert_eq!(doc.report.blocking_moduli, vec![3]);
        assert!(doc.oracle.unwrap().agrees);
    }

    #[test]
    fn sweep_counts() {
        let c = sweep_configurations(8, &[1], &[TopologyKind::Path], true);
        assert_eq!(c.len(), (3..=8).map(|n| n - 2).sum::<usize>());
        let c = sweep_configurations(5, &[2], &[TopologyKind::Cycle], false);
        assert_eq!(c.len(), 3 + 6 + 10);
    }
}
