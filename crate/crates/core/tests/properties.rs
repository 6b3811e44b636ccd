use consensus_obs::cycle::{gap_vector, refined_gcd_observable};
use consensus_obs::graph::{input_matrix, laplacian, output_matrix};
use consensus_obs::oracle::{observability_rank, reachability_rank};
use consensus_obs::report::cross_check;
use consensus_obs::simulator::analyze;
use consensus_obs::{GraphTopology, NodeSet, TopologyKind};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn node_set(
    max_n: usize,
    min_n: usize,
    max_k: usize,
) -> impl Strategy<Value = (usize, Vec<usize>)> {
    (min_n..=max_n).prop_flat_map(move |n| {
        let k = 1..=max_k.min(n);
        (
            Just(n),
            k.prop_flat_map(move |k| subsequence((1..=n).collect::<Vec<_>>(), k)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cycle_verdict_is_rotation_invariant((n, labels) in node_set(40, 3, 4), shift in 0usize..40) {
        let topo = GraphTopology::cycle(n).unwrap();
        let s = NodeSet::new(labels, n).unwrap();
        let a = analyze(&topo, &s).unwrap();
        let b = analyze(&topo, &s.rotated(shift % n)).unwrap();
        prop_assert_eq!(a.observable, b.observable);
        prop_assert_eq!(a.eigenvalues().len(), b.eigenvalues().len());
        prop_assert_eq!(a.blocking_moduli, b.blocking_moduli);
    }

    #[test]
    fn verdict_is_mirror_invariant((n, labels) in node_set(60, 3, 4), cycle in any::<bool>()) {
        let kind = if cycle { TopologyKind::Cycle } else { TopologyKind::Path };
        let topo = GraphTopology::new(kind, n).unwrap();
        let s = NodeSet::new(labels, n).unwrap();
        let a = analyze(&topo, &s).unwrap();
        let b = analyze(&topo, &s.mirrored()).unwrap();
        prop_assert_eq!(a.observable, b.observable);
        prop_assert_eq!(a.unobservable_eigenpairs.iter().map(|p| p.eigenvalue).collect::<Vec<_>>(),
                        b.unobservable_eigenpairs.iter().map(|p| p.eigenvalue).collect::<Vec<_>>());
    }

    #[test]
    fn closed_form_matches_oracle((n, labels) in node_set(48, 3, 3), cycle in any::<bool>()) {
        let kind = if cycle { TopologyKind::Cycle } else { TopologyKind::Path };
        let topo = GraphTopology::new(kind, n).unwrap();
        let s = NodeSet::new(labels, n).unwrap();
        let mut r = analyze(&topo, &s).unwrap();
        let summary = cross_check(&mut r).unwrap();
        prop_assert_eq!(r.witness_subspace.len(), n - summary.oracle_rank);
        if cycle {
            prop_assert_eq!(r.observable, refined_gcd_observable(n, gap_vector(n, &s).gcd()));
        }
    }

    #[test]
    fn reachability_equals_observability((n, labels) in node_set(30, 1, 3), cycle in any::<bool>()) {
        let kind = if cycle && n >= 3 { TopologyKind::Cycle } else { TopologyKind::Path };
        let topo = GraphTopology::new(kind, n).unwrap();
        let s = NodeSet::new(labels, n).unwrap();
        let l = laplacian(&topo);
        let reach = reachability_rank(&l, &input_matrix(&topo, &s).unwrap()).unwrap().rank;
        let obs = observability_rank(&l, &output_matrix(&topo, &s).unwrap()).unwrap().rank;
        prop_assert_eq!(reach, obs);
    }

    #[test]
    fn adding_observers_never_hurts((n, labels) in node_set(40, 3, 3), extra in 1usize..=40, cycle in any::<bool>()) {
        let kind = if cycle { TopologyKind::Cycle } else { TopologyKind::Path };
        let topo = GraphTopology::new(kind, n).unwrap();
        let s = NodeSet::new(labels.clone(), n).unwrap();
        let mut more = labels;
        let extra = (extra - 1) % n + 1;
        if !more.contains(&extra) {
            more.push(extra);
        }
        let a = analyze(&topo, &s).unwrap();
        let b = analyze(&topo, &NodeSet::new(more, n).unwrap()).unwrap();
        prop_assert!(b.unobservable_count() <= a.unobservable_count());
        for v in b.eigenvalues() {
            prop_assert!(a.eigenvalues().iter().any(|u| (u - v).abs() < 1e-12));
        }
    }
}
