//! Markings and hidden modes on small paths.
//!
//! `cargo run --example path_markings`

use consensus_obs::path::{
    central_node_analysis, mark_path_nodes, path_observability, unobservable_set_for_prime_power,
};
use consensus_obs::NodeSet;

fn main() -> consensus_obs::Result<()> {
    for n in [6, 9, 15] {
        println!("path {n}");
        print!("{}", mark_path_nodes(n)?.to_text());
        println!();
    }

    let r = path_observability(6, &NodeSet::single(2, 6)?)?;
    println!(
        "path 6 observed at node 2: observable={} hidden={:?}",
        r.observable,
        r.eigenvalues()
    );

    let set = unobservable_set_for_prime_power(15, 5)?;
    let values: Vec<f64> = set
        .eigenpairs
        .iter()
        .map(|p| p.eigenvalue.value())
        .collect();
    println!("path 15, class of 5 at {}: hidden {values:.4?}", set.nodes);

    let centre = central_node_analysis(9)?;
    println!(
        "path 9, central node: {} hidden modes {:.4?}",
        centre.unobservable_count(),
        centre.eigenvalues()
    );
    Ok(())
}
