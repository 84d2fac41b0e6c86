//! Random graph generation for tests and benchmarks.
//!
//! Graphs are built as a random spanning tree plus optional extra relation
//! edges and attributes, so they are always rooted and connected. All
//! randomness comes from the caller's generator, which keeps runs
//! reproducible from a seed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::amr::AmrGraph;

const CONCEPTS: &[&str] = &[
    "cat", "dog", "person", "house", "tree", "city", "run-01", "see-01", "want-01", "sleep-01",
    "give-01", "small", "old",
];

// Role names are stored without the ':' sigil, matching parsed graphs.
const EDGE_ROLES: &[&str] = &["ARG0", "ARG1", "ARG2", "mod", "time", "location"];

const ATTR_ROLES: &[&str] = &["polarity", "quant", "mode"];

const ATTR_VALUES: &[&str] = &["-", "+", "1", "2", "3", "imperative"];

/// Builds a random rooted graph with at most `max_vars` nodes and at most
/// `max_triples` triples (instances plus edges plus attributes).
///
/// The node count needs `2n - 1` triples for the spanning tree, so it is
/// additionally capped at `(max_triples + 1) / 2`.
pub fn random_graph(rng: &mut impl Rng, max_vars: usize, max_triples: usize) -> AmrGraph {
    assert!(max_vars >= 1, "need room for at least one node");
    assert!(max_triples >= 1, "need room for at least one triple");
    let cap = max_vars.min(max_triples.div_ceil(2));
    let n = rng.gen_range(1..=cap);
    let nodes: Vec<(String, String)> = (0..n)
        .map(|i| {
            (
                format!("n{i}"),
                CONCEPTS.choose(rng).expect("non-empty pool").to_string(),
            )
        })
        .collect();
    let mut edges: Vec<(String, String, String)> = Vec::new();
    for child in 1..n {
        let parent = rng.gen_range(0..child);
        edges.push((
            format!("n{parent}"),
            EDGE_ROLES.choose(rng).expect("non-empty pool").to_string(),
            format!("n{child}"),
        ));
    }
    let mut attrs: Vec<(String, String, String)> = Vec::new();
    let mut budget = max_triples - n - edges.len();
    while budget > 0 && rng.gen_bool(0.6) {
        if n >= 2 && rng.gen_bool(0.5) {
            // An extra relation edge between distinct nodes, skipping exact
            // duplicates so the triple count stays predictable.
            let src = rng.gen_range(0..n);
            let mut dst = rng.gen_range(0..n - 1);
            if dst >= src {
                dst += 1;
            }
            let role = EDGE_ROLES.choose(rng).expect("non-empty pool").to_string();
            let candidate = (format!("n{src}"), role, format!("n{dst}"));
            if !edges.contains(&candidate) {
                edges.push(candidate);
                budget -= 1;
            } else {
                break;
            }
        } else {
            let src = rng.gen_range(0..n);
            let role = ATTR_ROLES.choose(rng).expect("non-empty pool").to_string();
            let value = ATTR_VALUES.choose(rng).expect("non-empty pool").to_string();
            let candidate = (format!("n{src}"), role, value);
            if !attrs.contains(&candidate) {
                attrs.push(candidate);
                budget -= 1;
            } else {
                break;
            }
        }
    }
    AmrGraph::from_parts("n0", nodes, edges, attrs).expect("generated graph is valid")
}

/// Returns the same graph with variables renamed by a random permutation.
/// Useful for checking that alignment recovers structural identity.
pub fn renamed_copy(rng: &mut impl Rng, graph: &AmrGraph) -> AmrGraph {
    let n = graph.node_count();
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.shuffle(rng);
    let rename = |node: usize| format!("m{}", permutation[node]);
    let nodes: Vec<(String, String)> = (0..n)
        .map(|i| (rename(i), graph.concept(i).to_string()))
        .collect();
    let edges: Vec<(String, String, String)> = graph
        .edges()
        .iter()
        .map(|e| (rename(e.src), e.role.clone(), rename(e.dst)))
        .collect();
    let attrs: Vec<(String, String, String)> = graph
        .attributes()
        .iter()
        .map(|a| (rename(a.src), a.role.clone(), a.value.clone()))
        .collect();
    AmrGraph::from_parts(&rename(graph.root()), nodes, edges, attrs)
        .expect("renamed graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penman;
    use crate::smatch::{best_alignment, SearchConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_graphs_respect_their_budgets() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let g = random_graph(&mut rng, 5, 8);
            assert!(g.node_count() <= 5);
            assert!(g.triples().len() <= 8);
            assert_eq!(g.triples().len(), g.node_count() + g.edge_count());
        }
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let a = random_graph(&mut ChaCha8Rng::seed_from_u64(42), 6, 11);
        let b = random_graph(&mut ChaCha8Rng::seed_from_u64(42), 6, 11);
        assert_eq!(a.to_penman(), b.to_penman());
    }

    #[test]
    fn generated_graphs_round_trip_through_text() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_graph(&mut rng, 6, 11);
            let reparsed = penman::parse(&g.to_penman()).unwrap();
            assert_eq!(g.triples(), reparsed.triples());
        }
    }

    #[test]
    fn renamed_copies_align_perfectly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_graph(&mut rng, 5, 9);
            let renamed = renamed_copy(&mut rng, &g);
            let a = g.triples();
            let b = renamed.triples();
            let alignment = best_alignment(&a, &b, &SearchConfig::default()).unwrap();
            assert_eq!(alignment.matched, a.len());
        }
    }
}
