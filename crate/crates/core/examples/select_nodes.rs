//! Smallest observer sets found from the node markings.
//!
//! `cargo run --example select_nodes`

use consensus_obs::path::{select_internal_observable_set, select_observable_set};

fn main() -> consensus_obs::Result<()> {
    for n in [4, 6, 8, 9, 15, 30, 105] {
        let any = select_observable_set(n, 3)?;
        let inner = select_internal_observable_set(n, 3)?;
        println!("path {n:>3}: {any} (internal only: {inner})");
    }
    Ok(())
}
