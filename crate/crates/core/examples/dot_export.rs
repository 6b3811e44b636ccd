//! Graphviz rendering of a marked ring.
//!
//! `cargo run --example dot_export | dot -Tsvg > ring.svg`

use consensus_obs::cycle::mark_cycle_nodes;

fn main() -> consensus_obs::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(15);
    print!("{}", mark_cycle_nodes(n)?.to_dot());
    Ok(())
}
