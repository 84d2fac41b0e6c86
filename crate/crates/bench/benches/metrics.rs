//! Criterion benchmarks for the hot paths: PENMAN parsing, alignment search,
//! transport solving, the full graph-transport score, and AUC computation.
//!
//! Inputs are generated once from fixed seeds so numbers are comparable
//! across runs and machines.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entail_core::eval::compute_auc;
use entail_core::penman::parse;
use entail_core::smatch::best_alignment;
use entail_core::synth::random_graph;
use entail_core::transport::solve_transport;
use entail_core::wl::wwlk_score;
use entail_core::{
    AmrGraph, CostMatrix, EmbedStore, Label, SearchConfig, SearchMode, TransportMode, WlConfig,
};

fn store() -> EmbedStore {
    let words = ["alpha", "beta", "gamma", "delta"];
    EmbedStore::from_entries(words.iter().enumerate().map(|(i, w)| {
        let mut v = vec![0.0; words.len()];
        v[i] = 1.0;
        (*w, v)
    }))
    .expect("table builds")
    .with_oov_seed(3)
}

fn graph_pair(seed: u64, max_vars: usize, max_triples: usize) -> (AmrGraph, AmrGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_graph(&mut rng, max_vars, max_triples);
    let b = random_graph(&mut rng, max_vars, max_triples);
    (a, b)
}

fn bench_parse(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let text = random_graph(&mut rng, 20, 40).to_penman();
    c.bench_function("parse_20_var_graph", |b| {
        b.iter(|| parse(black_box(&text)).expect("round-trip text parses"))
    });
}

fn bench_alignment(c: &mut Criterion) {
    let (small_a, small_b) = graph_pair(21, 6, 12);
    let (small_at, small_bt) = (small_a.triples(), small_b.triples());
    let exact = SearchConfig {
        mode: SearchMode::Exact,
        ..SearchConfig::default()
    };
    c.bench_function("alignment_exact_6_vars", |b| {
        b.iter(|| {
            best_alignment(black_box(&small_at), black_box(&small_bt), &exact)
                .expect("search succeeds")
        })
    });

    let (large_a, large_b) = graph_pair(22, 20, 40);
    let (large_at, large_bt) = (large_a.triples(), large_b.triples());
    let climb = SearchConfig {
        mode: SearchMode::HillClimb,
        ..SearchConfig::default()
    };
    c.bench_function("alignment_hill_climb_20_vars", |b| {
        b.iter(|| {
            best_alignment(black_box(&large_at), black_box(&large_bt), &climb)
                .expect("search succeeds")
        })
    });
}

fn bench_transport(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (rows, cols) = (16, 16);
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen::<f64>()).collect();
    let matrix = CostMatrix::new(rows, cols, data).expect("random costs are valid");
    c.bench_function("transport_symmetric_16x16", |b| {
        b.iter(|| solve_transport(black_box(&matrix), TransportMode::Symmetric))
    });
    c.bench_function("transport_asymmetric_16x16", |b| {
        b.iter(|| solve_transport(black_box(&matrix), TransportMode::Asymmetric))
    });
}

fn bench_wwlk(c: &mut Criterion) {
    let (a, b_graph) = graph_pair(41, 12, 24);
    let table = store();
    let cfg = WlConfig {
        k: 1,
        mode: TransportMode::Asymmetric,
    };
    c.bench_function("wwlk_score_12_vars", |b| {
        b.iter(|| {
            wwlk_score(black_box(&a), black_box(&b_graph), &table, &cfg).expect("score computes")
        })
    });
}

fn bench_auc(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let items: Vec<(f64, Label)> = (0..10_000)
        .map(|_| {
            let score = rng.gen_range(0..=100) as f64 / 100.0;
            let label = if rng.gen_bool(0.5) {
                Label::Entailed
            } else {
                Label::NonEntailed
            };
            (score, label)
        })
        .collect();
    c.bench_function("auc_10k_tied_samples", |b| {
        b.iter(|| compute_auc(black_box(&items)).expect("two classes present"))
    });
}

criterion_group!(
    benches,
    bench_parse,
    bench_alignment,
    bench_transport,
    bench_wwlk,
    bench_auc
);
criterion_main!(benches);
