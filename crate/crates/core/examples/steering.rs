//! Minimum-energy steering from leader nodes, and a rejected target.
//!
//! `cargo run --example steering -- /tmp/steer.csv`

use consensus_obs::simulator::{steering_demo, SteeringOutcome};
use consensus_obs::{GraphTopology, NodeSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path4 = GraphTopology::path(4)?;
    let target = [1.0, -0.5, 0.25, 2.0];
    if let SteeringOutcome::Reached {
        terminal_error,
        input_energy,
        trajectory,
    } = steering_demo(&path4, &NodeSet::single(2, 4)?, &target, 10.0)?
    {
        println!("path 4, leader 2: terminal error {terminal_error:.1e}, energy {input_energy:.3}");
        if let Some(out) = std::env::args().nth(1) {
            trajectory.write_csv(std::fs::File::create(&out)?)?;
            println!("trajectory written to {out}");
        }
    }

    let path6 = GraphTopology::path(6)?;
    let hidden = [0.5, 0.0, -0.5, -0.5, 0.0, 0.5];
    match steering_demo(&path6, &NodeSet::single(2, 6)?, &hidden, 10.0)? {
        SteeringOutcome::Rejected {
            unreachable_norm, ..
        } => {
            println!("path 6, leader 2: target rejected, unreachable part has norm {unreachable_norm:.3}")
        }
        SteeringOutcome::Reached { .. } => println!("path 6, leader 2: unexpectedly reached"),
    }
    Ok(())
}
