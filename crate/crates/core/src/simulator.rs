//! Consensus dynamics `ẋ = −Lx + Bu`, `y = Cx` (fixed-step RK4) and the
//! discrete variant `x⁺ = (I − εL)x + Bu`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{input_matrix, laplacian, DenseMatrix, GraphTopology, NodeSet, TopologyKind};
use crate::oracle::symmetric_eigen;
use crate::report::{check_witness, rayleigh, ObservabilityReport};
use crate::{cycle, path};

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_GRAMIAN_HORIZON: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    ContinuousRk4 { dt: f64, horizon: f64 },
    DiscreteEpsilon { epsilon: f64, steps: usize },
}

impl Mode {
    pub fn continuous(horizon: f64) -> Self {
        Mode::ContinuousRk4 {
            dt: DEFAULT_DT,
            horizon,
        }
    }
}

/// `nodes` act as leaders (columns of `B`) and observers (rows of `C = Bᵀ`).
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub topology: GraphTopology,
    pub nodes: NodeSet,
    pub mode: Mode,
}

impl SimConfig {
    pub fn new(topology: GraphTopology, nodes: NodeSet, mode: Mode) -> Result<Self> {
        if nodes.n() != topology.n {
            return Err(Error::DimensionMismatch(
                "node set does not match the graph".into(),
            ));
        }
        match mode {
            Mode::ContinuousRk4 { dt, horizon } => {
                if !(dt.is_finite() && dt > 0.0 && horizon.is_finite() && horizon >= 0.0) {
                    return Err(Error::Simulation(format!(
                        "bad dt={dt} / horizon={horizon}"
                    )));
                }
            }
            Mode::DiscreteEpsilon { epsilon, .. } => {
                transition_matrix(&topology, epsilon)?;
            }
        }
        Ok(Self {
            topology,
            nodes,
            mode,
        })
    }
}

/// Input signal `u(t)`, one entry per leader.
pub enum Input {
    Zero,
    /// Piecewise constant, one sample per step.
    Samples(Vec<Vec<f64>>),
    /// Evaluated at the integrator stage times.
    Function(Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>),
}

impl Input {
    fn at(&self, step: usize, t: f64, m: usize) -> Result<DVector<f64>> {
        let v = match self {
            Input::Zero => return Ok(DVector::zeros(m)),
            Input::Samples(s) => s
                .get(step)
                .cloned()
                .ok_or_else(|| Error::Simulation(format!("no input sample for step {step}")))?,
            Input::Function(f) => f(t),
        };
        if v.len() != m || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Simulation(format!(
                "input at step {step} must be {m} finite values"
            )));
        }
        Ok(DVector::from_vec(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory has the initial state")
    }

    /// `max_t ‖y_a(t) − y_b(t)‖∞`.
    pub fn max_output_gap(&self, other: &Trajectory) -> f64 {
        self.outputs
            .iter()
            .zip(&other.outputs)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// State norm never grows by more than `tol` between samples.
    pub fn norm_nonincreasing(&self, tol: f64) -> bool {
        let norms: Vec<f64> = self
            .states
            .iter()
            .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
        norms.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// CSV with header `t, x_1..x_n, y_1..y_m`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Simulation(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let n = self.states.first().map_or(0, Vec::len);
        let m = self.outputs.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x_{i}")));
        header.extend((1..=m).map(|i| format!("y_{i}")));
        w.write_record(&header).map_err(io)?;
        for ((t, x), y) in self.times.iter().zip(&self.states).zip(&self.outputs) {
            let row = std::iter::once(*t)
                .chain(x.iter().copied())
                .chain(y.iter().copied());
            w.write_record(row.map(|v| v.to_string())).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Simulation(format!("csv: {e}")))?;
        Ok(())
    }
}

/// `P = I − εL`; requires `0 < ε < 1/Δ`.
pub fn transition_matrix(topology: &GraphTopology, epsilon: f64) -> Result<DenseMatrix> {
    let delta = topology.max_degree().max(1) as f64;
    if !(epsilon > 0.0 && epsilon < 1.0 / delta) {
        return Err(Error::Simulation(format!(
            "epsilon {epsilon} outside (0, 1/{delta})"
        )));
    }
    let n = topology.n;
    Ok(DMatrix::identity(n, n) - laplacian(topology) * epsilon)
}

pub fn simulate(cfg: &SimConfig, x0: &[f64], input: &Input) -> Result<Trajectory> {
    let n = cfg.topology.n;
    if x0.len() != n || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Simulation(format!(
            "x0 must have {n} finite entries"
        )));
    }
    let l = laplacian(&cfg.topology);
    let b = input_matrix(&cfg.topology, &cfg.nodes)?;
    let c = b.transpose();
    let m = b.ncols();
    let mut x = DVector::from_column_slice(x0);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        outputs: vec![],
    };
    traj.outputs.push((&c * &x).iter().copied().collect());

    match cfg.mode {
        Mode::ContinuousRk4 { dt, horizon } => {
            let steps = (horizon / dt).round() as usize;
            let f = |x: &DVector<f64>, u: &DVector<f64>| -(&l * x) + &b * u;
            for k in 0..steps {
                let t = k as f64 * dt;
                let (u0, um, u1) = match input {
                    Input::Function(_) => (
                        input.at(k, t, m)?,
                        input.at(k, t + dt / 2.0, m)?,
                        input.at(k, t + dt, m)?,
                    ),
                    _ => {
                        let u = input.at(k, t, m)?;
                        (u.clone(), u.clone(), u)
                    }
                };
                let k1 = f(&x, &u0);
                let k2 = f(&(&x + &k1 * (dt / 2.0)), &um);
                let k3 = f(&(&x + &k2 * (dt / 2.0)), &um);
                let k4 = f(&(&x + &k3 * dt), &u1);
                x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
                traj.times.push((k + 1) as f64 * dt);
                traj.states.push(x.iter().copied().collect());
                traj.outputs.push((&c * &x).iter().copied().collect());
            }
        }
        Mode::DiscreteEpsilon { epsilon, steps } => {
            let p = transition_matrix(&cfg.topology, epsilon)?;
            for k in 0..steps {
                let u = input.at(k, k as f64, m)?;
                x = &p * &x + &b * u;
                traj.times.push((k + 1) as f64);
                traj.states.push(x.iter().copied().collect());
                traj.outputs.push((&c * &x).iter().copied().collect());
            }
        }
    }
    if traj.final_state().iter().any(|v| !v.is_finite()) {
        return Err(Error::Simulation("state diverged".into()));
    }
    Ok(traj)
}

/// Closed-form analysis for either topology.
pub fn analyze(topology: &GraphTopology, nodes: &NodeSet) -> Result<ObservabilityReport> {
    match topology.kind {
        TopologyKind::Path => path::path_observability(topology.n, nodes),
        TopologyKind::Cycle => cycle::cycle_observability(topology.n, nodes),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndistinguishabilityReport {
    pub eigenvalue: f64,
    pub max_output_gap: f64,
    pub base: Trajectory,
    pub perturbed: Trajectory,
}

pub const INDISTINGUISHABLE_TOL: f64 = 1e-7;

/// Runs `x0` and `x0 + witness` and checks the outputs coincide.
pub fn indistinguishability_demo_with_witness(
    cfg: &SimConfig,
    witness: &[f64],
    x0: &[f64],
) -> Result<IndistinguishabilityReport> {
    let l = laplacian(&cfg.topology);
    if witness.len() != cfg.topology.n {
        return Err(Error::DimensionMismatch("witness length".into()));
    }
    let lambda = rayleigh(&l, witness);
    check_witness(&l, &cfg.nodes, lambda, witness)?;
    let base = simulate(cfg, x0, &Input::Zero)?;
    let shifted: Vec<f64> = x0.iter().zip(witness).map(|(a, b)| a + b).collect();
    let perturbed = simulate(cfg, &shifted, &Input::Zero)?;
    let gap = base.max_output_gap(&perturbed);
    if gap > INDISTINGUISHABLE_TOL {
        return Err(Error::Simulation(format!("outputs differ by {gap:e}")));
    }
    Ok(IndistinguishabilityReport {
        eigenvalue: lambda,
        max_output_gap: gap,
        base,
        perturbed,
    })
}

/// A fixed, non-symmetric initial state used by the demos.
pub fn demo_initial_state(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| (i as f64).sin() + i as f64 / n as f64)
        .collect()
}

/// Picks the first witness of the closed-form analysis; errors if the
/// configuration is observable.
pub fn indistinguishability_demo(
    topology: &GraphTopology,
    observers: &NodeSet,
    mode: Mode,
) -> Result<IndistinguishabilityReport> {
    let report = analyze(topology, observers)?;
    let witness = report.witness_subspace.first().ok_or(Error::NoWitness)?;
    let cfg = SimConfig::new(*topology, observers.clone(), mode)?;
    indistinguishability_demo_with_witness(&cfg, witness, &demo_initial_state(topology.n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SteeringOutcome {
    Reached {
        terminal_error: f64,
        input_energy: f64,
        trajectory: Trajectory,
    },
    Rejected {
        unreachable_component: Vec<f64>,
        unreachable_norm: f64,
    },
}

pub const STEERING_TOL: f64 = 1e-3;
const REACHABLE_TOL: f64 = 1e-6;

/// Minimum-energy open-loop steering from `x(0) = 0` to `target` over
/// `[0, horizon]`, through the finite-horizon controllability Gramian.
pub fn steering_demo(
    topology: &GraphTopology,
    leaders: &NodeSet,
    target: &[f64],
    horizon: f64,
) -> Result<SteeringOutcome> {
    let n = topology.n;
    if target.len() != n || target.iter().any(|v| !v.is_finite()) {
        return Err(Error::Simulation(format!(
            "target must have {n} finite entries"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Simulation(format!("bad horizon {horizon}")));
    }
    let report = analyze(topology, leaders)?;
    let mut unreachable = vec![0.0; n];
    for w in &report.witness_subspace {
        let coef: f64 = w.iter().zip(target).map(|(a, b)| a * b).sum();
        for (u, wi) in unreachable.iter_mut().zip(w) {
            *u += coef * wi;
        }
    }
    let unreachable_norm = unreachable.iter().map(|v| v * v).sum::<f64>().sqrt();
    if unreachable_norm > REACHABLE_TOL {
        return Ok(SteeringOutcome::Rejected {
            unreachable_component: unreachable,
            unreachable_norm,
        });
    }

    let l = laplacian(topology);
    let b = input_matrix(topology, leaders)?;
    let eig = symmetric_eigen(&l)?;
    let q = DenseMatrix::from_columns(
        &eig.iter()
            .map(|p| DVector::from_column_slice(&p.vector))
            .collect::<Vec<_>>(),
    );
    let lam: Vec<f64> = eig.iter().map(|p| p.value).collect();
    // Gramian in the eigenbasis: (QᵀBBᵀQ)_ij · ∫₀ᵀ e^{−(λ_i+λ_j)s} ds.
    let qb = q.transpose() * &b;
    let weight = &qb * qb.transpose();
    let phi = |a: f64| {
        if a.abs() < 1e-12 {
            horizon
        } else {
            (1.0 - (-a * horizon).exp()) / a
        }
    };
    let gram = DenseMatrix::from_fn(n, n, |i, j| weight[(i, j)] * phi(lam[i] + lam[j]));

    let geig = symmetric_eigen(&gram)?;
    let gmax = geig.iter().map(|p| p.value.abs()).fold(0.0, f64::max);
    let expected_rank = n - report.witness_subspace.len();
    let kept: Vec<_> = geig.iter().filter(|p| p.value > gmax * 1e-13).collect();
    if kept.len() < expected_rank {
        return Err(Error::HorizonTooShort);
    }
    let r = q.transpose() * DVector::from_column_slice(target);
    let mut eta = DVector::zeros(n);
    for p in kept.iter().rev().take(expected_rank) {
        let v = DVector::from_column_slice(&p.vector);
        eta += &v * (v.dot(&r) / p.value);
    }
    // u(s) = Bᵀ Q e^{−Λ(T−s)} η
    let qbt = qb.transpose();
    let lam_c = lam.clone();
    let input = Input::Function(Box::new(move |s: f64| {
        let decay = DVector::from_iterator(
            n,
            (0..n).map(|i| (-(lam_c[i]) * (horizon - s)).exp() * eta[i]),
        );
        (&qbt * decay).iter().copied().collect()
    }));
    let cfg = SimConfig::new(*topology, leaders.clone(), Mode::continuous(horizon))?;
    let trajectory = simulate(&cfg, &vec![0.0; n], &input)?;
    let terminal_error = trajectory
        .final_state()
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if terminal_error > STEERING_TOL {
        return Err(Error::Simulation(format!(
            "terminal error {terminal_error:e} exceeds {STEERING_TOL}"
        )));
    }
    let dt = DEFAULT_DT;
    let input_energy = (0..trajectory.times.len() - 1)
        .map(|k| {
            let u = match &input {
                Input::Function(f) => f((k as f64 + 0.5) * dt),
                _ => unreachable!(),
            };
            u.iter().map(|v| v * v).sum::<f64>() * dt
        })
        .sum();
    Ok(SteeringOutcome::Reached {
        terminal_error,
        input_energy,
        trajectory,
    })
}
