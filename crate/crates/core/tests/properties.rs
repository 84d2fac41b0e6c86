//! Randomized invariants over the parsing, alignment, transport and ranking
//! layers, checked with proptest-driven inputs.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entail_core::eval::{alpha_grid, compute_auc, hybrid_score, precision_at_top, Label};
use entail_core::smatch::{smatch_scores, SearchConfig, SearchMode};
use entail_core::synth::{random_graph, renamed_copy};
use entail_core::text::{bag_precision, tokenize};
use entail_core::transport::{solve_transport, CostMatrix};
use entail_core::wl::{wwlk_score, WlConfig};
use entail_core::{AmrGraph, EmbedStore, TransportMode};

fn graph_from(seed: u64, max_vars: usize, max_triples: usize) -> AmrGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_graph(&mut rng, max_vars, max_triples)
}

fn exact_config() -> SearchConfig {
    SearchConfig {
        mode: SearchMode::Exact,
        ..SearchConfig::default()
    }
}

/// Removes one node that has no outgoing relation edges, together with every
/// edge and attribute touching it. Returns `None` when no such node exists
/// (for example when extra edges put every node on a cycle).
fn drop_leaf(graph: &AmrGraph) -> Option<AmrGraph> {
    let victim = (0..graph.node_count())
        .rev()
        .find(|&n| n != graph.root() && graph.edges().iter().all(|e| e.src != n))?;
    let nodes = (0..graph.node_count())
        .filter(|&n| n != victim)
        .map(|n| (graph.var(n).to_string(), graph.concept(n).to_string()))
        .collect();
    let edges = graph
        .edges()
        .iter()
        .filter(|e| e.src != victim && e.dst != victim)
        .map(|e| {
            (
                graph.var(e.src).to_string(),
                e.role.clone(),
                graph.var(e.dst).to_string(),
            )
        })
        .collect();
    let attrs = graph
        .attributes()
        .iter()
        .filter(|a| a.src != victim)
        .map(|a| {
            (
                graph.var(a.src).to_string(),
                a.role.clone(),
                a.value.clone(),
            )
        })
        .collect();
    Some(AmrGraph::from_parts(graph.root_var(), nodes, edges, attrs).unwrap())
}

proptest! {
    #[test]
    fn penman_round_trip_preserves_triples(
        seed in any::<u64>(),
        max_vars in 1usize..=8,
        max_triples in 1usize..=14,
    ) {
        let graph = graph_from(seed, max_vars, max_triples);
        let text = graph.to_penman();
        let reparsed = entail_core::penman::parse(&text).unwrap();
        prop_assert_eq!(graph.triples(), reparsed.triples());
        prop_assert_eq!(graph.root_var(), reparsed.root_var());
    }

    #[test]
    fn triple_count_matches_graph_parts(
        seed in any::<u64>(),
        max_vars in 1usize..=8,
        max_triples in 1usize..=14,
    ) {
        let graph = graph_from(seed, max_vars, max_triples);
        let expected =
            graph.node_count() + graph.edges().len() + graph.attributes().len();
        prop_assert_eq!(graph.triples().len(), expected);
    }

    #[test]
    fn bag_precision_never_drops_when_premise_grows(
        base in "[a-z]{1,6}( [a-z]{1,6}){0,8}",
        extra in "[a-z]{1,6}( [a-z]{1,6}){0,5}",
        hyp in "[a-z]{1,6}( [a-z]{1,6}){0,6}",
    ) {
        let h = tokenize(&hyp);
        let small = tokenize(&base);
        let grown = tokenize(&format!("{base} {extra}"));
        let before = bag_precision(&h, &small).unwrap();
        let after = bag_precision(&h, &grown).unwrap();
        prop_assert!(after >= before, "grew premise, {before} -> {after}");
    }

    #[test]
    fn alignment_precision_mirrors_reversed_recall(
        seed_a in any::<u64>(),
        seed_b in any::<u64>(),
        max_vars in 1usize..=5,
        max_triples in 1usize..=8,
    ) {
        let a = graph_from(seed_a, max_vars, max_triples);
        let b = graph_from(seed_b, max_vars, max_triples);
        let cfg = exact_config();
        let fwd = smatch_scores(&a.triples(), &b.triples(), &cfg).unwrap();
        let rev = smatch_scores(&b.triples(), &a.triples(), &cfg).unwrap();
        // The best match count is direction-free, so swapping the operands
        // swaps precision and recall exactly.
        prop_assert_eq!(fwd.precision, rev.recall);
        prop_assert_eq!(fwd.recall, rev.precision);
    }

    #[test]
    fn subgraph_always_aligns_with_perfect_precision(
        seed in any::<u64>(),
        rename_seed in any::<u64>(),
        max_vars in 2usize..=6,
        max_triples in 2usize..=10,
    ) {
        let premise = graph_from(seed, max_vars, max_triples);
        if let Some(sub) = drop_leaf(&premise) {
            let mut rng = ChaCha8Rng::seed_from_u64(rename_seed);
            let hypothesis = renamed_copy(&mut rng, &sub);
            let cfg = exact_config();
            let scores =
                smatch_scores(&hypothesis.triples(), &premise.triples(), &cfg)
                    .unwrap();
            prop_assert_eq!(scores.precision, 1.0);
        }
    }

    #[test]
    fn hill_climb_never_beats_exact_search(
        seed_a in any::<u64>(),
        seed_b in any::<u64>(),
        max_vars in 1usize..=5,
        max_triples in 1usize..=8,
        search_seed in any::<u64>(),
    ) {
        let a = graph_from(seed_a, max_vars, max_triples);
        let b = graph_from(seed_b, max_vars, max_triples);
        let exact = smatch_scores(&a.triples(), &b.triples(), &exact_config())
            .unwrap();
        let climb_cfg = SearchConfig {
            mode: SearchMode::HillClimb,
            seed: search_seed,
            ..SearchConfig::default()
        };
        let climb =
            smatch_scores(&a.triples(), &b.triples(), &climb_cfg).unwrap();
        prop_assert!(
            climb.precision <= exact.precision,
            "hill-climb {} vs exact {}",
            climb.precision,
            exact.precision
        );
    }

    #[test]
    fn auc_is_invariant_under_order_preserving_rescale(
        raw in prop::collection::vec((0u8..=16, any::<bool>()), 2..60),
    ) {
        let items: Vec<(f64, Label)> = raw
            .iter()
            .map(|&(level, pos)| {
                let label = if pos { Label::Entailed } else { Label::NonEntailed };
                (f64::from(level) / 16.0, label)
            })
            .collect();
        let has_pos = items.iter().any(|(_, l)| *l == Label::Entailed);
        let has_neg = items.iter().any(|(_, l)| *l == Label::NonEntailed);
        prop_assume!(has_pos && has_neg);
        // Halving and shifting by three keeps every value exactly
        // representable, so ranks and ties are untouched.
        let scaled: Vec<(f64, Label)> =
            items.iter().map(|&(s, l)| (s / 2.0 + 3.0, l)).collect();
        let base = compute_auc(&items).unwrap();
        let transformed = compute_auc(&scaled).unwrap();
        prop_assert_eq!(base, transformed);
        let negated: Vec<(f64, Label)> =
            items.iter().map(|&(s, l)| (-s, l)).collect();
        let flipped = compute_auc(&negated).unwrap();
        prop_assert!((flipped - (1.0 - base)).abs() < 1e-12);
    }

    #[test]
    fn full_depth_precision_is_the_base_rate(
        raw in prop::collection::vec((0u8..=16, any::<bool>()), 1..40),
    ) {
        let ids: Vec<String> = (0..raw.len()).map(|i| format!("p{i}")).collect();
        let items: Vec<(&str, f64, Label)> = raw
            .iter()
            .zip(&ids)
            .map(|(&(level, pos), id)| {
                let label = if pos { Label::Entailed } else { Label::NonEntailed };
                (id.as_str(), f64::from(level) / 16.0, label)
            })
            .collect();
        let positives =
            items.iter().filter(|(_, _, l)| *l == Label::Entailed).count();
        let expected = positives as f64 / items.len() as f64;
        let got = precision_at_top(&items, 1.0).unwrap();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn relaxed_transport_never_costs_more(
        rows in 1usize..=5,
        cols in 1usize..=5,
        cells in prop::collection::vec(0u8..=100, 25),
    ) {
        let data: Vec<f64> = cells[..rows * cols]
            .iter()
            .map(|&c| f64::from(c) / 100.0)
            .collect();
        let matrix = CostMatrix::new(rows, cols, data).unwrap();
        let asym = solve_transport(&matrix, TransportMode::Asymmetric).unwrap();
        let sym = solve_transport(&matrix, TransportMode::Symmetric).unwrap();
        prop_assert!(
            asym.objective() <= sym.objective() + 1e-12,
            "asym {} sym {}",
            asym.objective(),
            sym.objective()
        );
    }

    #[test]
    fn transport_scores_on_random_graphs_stay_in_unit_interval(
        seed_a in any::<u64>(),
        seed_b in any::<u64>(),
        max_vars in 1usize..=6,
        max_triples in 1usize..=10,
    ) {
        let a = graph_from(seed_a, max_vars, max_triples);
        let b = graph_from(seed_b, max_vars, max_triples);
        // A tiny store: everything else falls back to hashed unit vectors.
        let store = EmbedStore::from_entries(vec![
            ("cat", vec![1.0, 0.0, 0.0]),
            ("dog", vec![0.0, 1.0, 0.0]),
        ])
        .unwrap();
        for k in [0usize, 1] {
            let asym = wwlk_score(
                &a,
                &b,
                &store,
                &WlConfig { k, mode: TransportMode::Asymmetric },
            )
            .unwrap();
            let sym = wwlk_score(
                &a,
                &b,
                &store,
                &WlConfig { k, mode: TransportMode::Symmetric },
            )
            .unwrap();
            prop_assert!((0.0..=1.0).contains(&asym));
            prop_assert!((0.0..=1.0).contains(&sym));
            prop_assert!(asym >= sym - 1e-12, "k={k} asym {asym} sym {sym}");
        }
    }

    #[test]
    fn hybrid_endpoints_reproduce_their_inputs(
        graph in 0.0f64..=1.0,
        text in 0.0f64..=1.0,
    ) {
        prop_assert_eq!(hybrid_score(graph, text, 1.0).unwrap(), graph);
        prop_assert_eq!(hybrid_score(graph, text, 0.0).unwrap(), text);
    }

    #[test]
    fn alpha_grid_spans_its_range(
        start_step in (0u32..=9).prop_flat_map(|s| {
            // Keep only steps that tile the chosen range exactly.
            let divisors: Vec<u32> =
                (1..=10 - s).filter(|t| (10 - s) % t == 0).collect();
            (Just(s), prop::sample::select(divisors))
        }),
    ) {
        let (start_tenths, step_tenths) = start_step;
        let start = f64::from(start_tenths) / 10.0;
        let step = f64::from(step_tenths) / 10.0;
        let grid = alpha_grid(start, 1.0, step).unwrap();
        prop_assert_eq!(*grid.first().unwrap(), start);
        prop_assert_eq!(*grid.last().unwrap(), 1.0);
        for window in grid.windows(2) {
            prop_assert!(window[0] < window[1]);
        }
        for &alpha in &grid {
            prop_assert!((start..=1.0).contains(&alpha));
        }
    }
}
