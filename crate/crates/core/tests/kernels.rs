mod common;

use common::*;
use densest_core::core_decomp::{approx_coreness, exact_coreness, get_core};
use densest_core::refine::{
    density_and_load_update_detailed, load_peel_order, load_peel_order_with, load_sort_order,
    LoadState, PeelBatch,
};
use densest_core::Density;
use proptest::prelude::*;

fn graph_strategy(max_n: u64) -> impl Strategy<Value = densest_core::Graph> {
    (2..=max_n, 0.02f64..0.9, any::<u64>())
        .prop_filter_map("edgeless", |(n, p, seed)| random_graph(n, p, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_coreness_matches_sequential_peel(g in graph_strategy(100)) {
        let dec = exact_coreness(&g).unwrap();
        let expected = sequential_coreness(&g);
        prop_assert_eq!(dec.labels(), &expected[..]);
        prop_assert_eq!(dec.kmax(), *expected.iter().max().unwrap());
    }

    #[test]
    fn approx_labels_are_sandwiched(g in graph_strategy(100), c in 1.05f64..4.0) {
        let dec = approx_coreness(&g, c).unwrap();
        for (v, &k) in sequential_coreness(&g).iter().enumerate() {
            let label = dec.labels()[v];
            prop_assert!(label <= k, "label {} above coreness {}", label, k);
            prop_assert!(label as f64 * c >= k as f64 - 1e-9, "label {} below {}/{}", label, k, c);
        }
    }

    #[test]
    fn cores_have_min_degree(g in graph_strategy(60), k in 1u64..8) {
        let dec = exact_coreness(&g).unwrap();
        let core = get_core(&g, &dec, k);
        for v in core.vertices() {
            prop_assert!(core.degree(v) as u64 >= k);
        }
    }

    #[test]
    fn suffix_densities_match_recount(
        g in graph_strategy(200),
        raw_loads in proptest::collection::vec(0u64..50, 200),
        sort in any::<bool>(),
    ) {
        let adj = adjacency(&g);
        let mut loads = LoadState::from_vec(raw_loads[..g.n()].to_vec());
        let before = loads.clone();
        let order = if sort { load_sort_order(&loads) } else { load_peel_order(&g, &loads) };
        let out = density_and_load_update_detailed(&g, &order, &mut loads).unwrap();
        let densities = out.densities.unwrap();
        let charges = out.charges.unwrap();
        let n = g.n();
        for i in 0..n {
            let e = edges_within(&adj, order.suffix(i));
            prop_assert_eq!(densities[i], Density::new(e, (n - i) as u64));
            // the edge count drop between consecutive suffixes is the charge
            let next = if i + 1 < n { edges_within(&adj, order.suffix(i + 1)) } else { 0 };
            prop_assert_eq!(charges[i], e - next);
        }
        let best = *densities.iter().max().unwrap();
        prop_assert_eq!(out.rho_max, best);
        prop_assert_eq!(out.best_prefix, densities.iter().position(|d| *d == best).unwrap());
        prop_assert_eq!(out.width, *charges.iter().max().unwrap());
        for (i, &v) in order.perm().iter().enumerate() {
            prop_assert_eq!(loads.get(v), before.get(v) + charges[i]);
        }
        prop_assert_eq!(loads.total(), before.total() + g.m() as u64);
    }

    #[test]
    fn peel_orders_match_sequential_reference(
        g in graph_strategy(80),
        raw_loads in proptest::collection::vec(0u64..6, 80),
    ) {
        let l = &raw_loads[..g.n()];
        let loads = LoadState::from_vec(l.to_vec());
        let batched = load_peel_order(&g, &loads);
        let single = load_peel_order_with(&g, &loads, PeelBatch::Single);
        prop_assert_eq!(batched.perm(), &sequential_load_peel(&g, l, true)[..]);
        prop_assert_eq!(single.perm(), &sequential_load_peel(&g, l, false)[..]);
    }

    #[test]
    fn ordering_slack(
        g in graph_strategy(120),
        raw_loads in proptest::collection::vec(0u64..40, 120),
    ) {
        let l = &raw_loads[..g.n()];
        let loads = LoadState::from_vec(l.to_vec());
        let delta = g.max_degree() as u64;
        let peel = load_peel_order(&g, &loads);
        let sort = load_sort_order(&loads);
        for i in 0..g.n() {
            for j in i + 1..g.n() {
                prop_assert!(l[peel.perm()[i] as usize] <= l[peel.perm()[j] as usize] + delta);
                prop_assert!(l[sort.perm()[i] as usize] <= l[sort.perm()[j] as usize]);
            }
        }
    }
}

#[test]
fn sort_handles_wide_load_ranges() {
    let loads = LoadState::from_vec(vec![u64::MAX / 2, 3, 1 << 40, 3, 0]);
    assert_eq!(load_sort_order(&loads).perm(), &[4, 1, 3, 2, 0]);
}

#[test]
fn kernels_agree_across_thread_counts() {
    let g = random_graph(3000, 0.01, 11).unwrap();
    let pools: Vec<_> = [1, 4]
        .iter()
        .map(|&k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap())
        .collect();
    let results: Vec<_> = pools
        .iter()
        .map(|p| {
            p.install(|| {
                let dec = exact_coreness(&g).unwrap();
                let apx = approx_coreness(&g, 1.5).unwrap();
                let mut loads = LoadState::zeros(g.n());
                let mut outs = Vec::new();
                for _ in 0..5 {
                    let order = load_peel_order(&g, &loads);
                    outs.push((order.perm().to_vec(), density_and_load_update_detailed(&g, &order, &mut loads).unwrap()));
                }
                (dec.labels().to_vec(), apx.labels().to_vec(), outs)
            })
        })
        .collect();
    assert_eq!(results[0], results[1]);
}
