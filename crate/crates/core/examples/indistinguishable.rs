//! Two initial states that differ by a hidden mode give identical outputs.
//!
//! `cargo run --example indistinguishable`

use consensus_obs::simulator::{indistinguishability_demo, Mode};
use consensus_obs::{GraphTopology, NodeSet};

fn main() -> consensus_obs::Result<()> {
    let cases = [
        (GraphTopology::path(6)?, vec![2]),
        (GraphTopology::cycle(15)?, vec![4, 13]),
        (GraphTopology::path(9)?, vec![5]),
    ];
    for (topo, observers) in cases {
        let s = NodeSet::new(observers, topo.n)?;
        for mode in [
            Mode::continuous(20.0),
            Mode::DiscreteEpsilon {
                epsilon: 0.25,
                steps: 80,
            },
        ] {
            let r = indistinguishability_demo(&topo, &s, mode)?;
            println!(
                "{topo} observed at {s}: λ = {:.4}, max output gap {:.1e} ({mode:?})",
                r.eigenvalue, r.max_output_gap
            );
        }
    }
    Ok(())
}
