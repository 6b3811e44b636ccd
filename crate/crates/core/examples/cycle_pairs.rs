//! Pairs of observers on a 15-node ring.
//!
//! `cargo run --example cycle_pairs`

use consensus_obs::cycle::{cycle_observability, gap_vector, mark_cycle_nodes};
use consensus_obs::report::cross_check;
use consensus_obs::NodeSet;

fn main() -> consensus_obs::Result<()> {
    let n = 15;
    print!("{}", mark_cycle_nodes(n)?.to_text());
    for pair in [[4, 13], [8, 14], [2, 13], [5, 12]] {
        let s = NodeSet::new(pair, n)?;
        let mut r = cycle_observability(n, &s)?;
        let oracle = cross_check(&mut r)?;
        println!(
            "{s}: gaps {:?}, observable={}, hidden={:?}, oracle rank {}",
            gap_vector(n, &s).gaps,
            r.observable,
            r.eigenvalues(),
            oracle.oracle_rank
        );
    }
    Ok(())
}
