//! Weisfeiler-Leman style node refinement over AMR graphs, and the
//! transport-based similarity built on it.
//!
//! Each node starts from the embedding of its concept. One refinement round
//! replaces a node's vector by the average of itself and the mean of its
//! undirected neighbors:
//!
//! ```text
//! h[t+1](v) = (h[t](v) + mean of h[t](u) over neighbors u) / 2
//! ```
//!
//! A node with no relation edges keeps its own vector as the neighbor mean.
//! The final representation concatenates all rounds `h[0] .. h[k]`, so
//! `k = 0` compares bare concept embeddings and `k = 1` mixes in one hop of
//! context.
//!
//! [`wwlk_score`] turns two refined graphs into a score: pairwise node costs
//! are half the Euclidean distance between L2-normalized vectors (so each
//! cost is in `[0, 1]`), an optimal transport problem is solved over the
//! cost matrix, and the score is one minus the objective.

use thiserror::Error;

use crate::amr::AmrGraph;
use crate::text::l2_normalize;
use crate::transport::{solve_transport, CostMatrix, TransportError, TransportMode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WlError {
    #[error("node vectors disagree in dimension: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Transport(#[from] TransportError),
}

/// Supplies one embedding vector per concept label.
pub trait NodeEmbedder {
    fn dim(&self) -> usize;
    fn embed(&self, concept: &str) -> Vec<f64>;
}

/// Refinement settings: number of rounds and which transport marginals the
/// score uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WlConfig {
    pub k: usize,
    pub mode: TransportMode,
}

impl Default for WlConfig {
    fn default() -> Self {
        WlConfig {
            k: 1,
            mode: TransportMode::Symmetric,
        }
    }
}

/// Refined per-node vectors, in graph node order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeVectors {
    vars: Vec<String>,
    vectors: Vec<Vec<f64>>,
    k: usize,
}

impl NodeVectors {
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Rounds of refinement the vectors include; each vector has
    /// `(k + 1) * embedder_dim` entries.
    pub fn k(&self) -> usize {
        self.k
    }
}

/// Runs `k` refinement rounds and concatenates all levels per node.
pub fn wl_refine(graph: &AmrGraph, embedder: &dyn NodeEmbedder, k: usize) -> NodeVectors {
    let n = graph.node_count();
    let dim = embedder.dim();
    // Undirected multiset neighborhoods over relation edges; attribute
    // edges point at constants, which are not nodes, and are skipped.
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in graph.edges() {
        neighbors[e.src].push(e.dst);
        neighbors[e.dst].push(e.src);
    }
    let mut current: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let v = embedder.embed(graph.concept(i));
            debug_assert_eq!(v.len(), dim, "embedder returned a wrong dimension");
            v
        })
        .collect();
    let mut stacked: Vec<Vec<f64>> = current.clone();
    for _ in 0..k {
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let mean = if neighbors[i].is_empty() {
                current[i].clone()
            } else {
                let mut sum = vec![0.0; dim];
                for &u in &neighbors[i] {
                    for (s, x) in sum.iter_mut().zip(&current[u]) {
                        *s += x;
                    }
                }
                let count = neighbors[i].len() as f64;
                sum.iter_mut().for_each(|s| *s /= count);
                sum
            };
            let refined: Vec<f64> = current[i]
                .iter()
                .zip(&mean)
                .map(|(own, m)| (own + m) / 2.0)
                .collect();
            next.push(refined);
        }
        for (acc, v) in stacked.iter_mut().zip(&next) {
            acc.extend_from_slice(v);
        }
        current = next;
    }
    NodeVectors {
        vars: (0..n).map(|i| graph.var(i).to_string()).collect(),
        vectors: stacked,
        k,
    }
}

/// Pairwise node costs between premise rows and hypothesis columns:
/// `||u - v|| / 2` over L2-normalized vectors, which lands in `[0, 1]`.
pub fn cost_matrix(premise: &NodeVectors, hypothesis: &NodeVectors) -> Result<CostMatrix, WlError> {
    let pd = premise.vectors.first().map_or(0, Vec::len);
    let hd = hypothesis.vectors.first().map_or(0, Vec::len);
    if pd != hd {
        return Err(WlError::DimensionMismatch {
            left: pd,
            right: hd,
        });
    }
    let p_unit: Vec<Vec<f64>> = premise
        .vectors
        .iter()
        .map(|v| l2_normalize(v.clone()))
        .collect();
    let h_unit: Vec<Vec<f64>> = hypothesis
        .vectors
        .iter()
        .map(|v| l2_normalize(v.clone()))
        .collect();
    let mut data = Vec::with_capacity(p_unit.len() * h_unit.len());
    for pv in &p_unit {
        for hv in &h_unit {
            let dist = pv
                .iter()
                .zip(hv)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            // Normalized vectors are at most 2 apart; clamp away any float
            // overshoot so the matrix invariant holds exactly.
            data.push((dist / 2.0).clamp(0.0, 1.0));
        }
    }
    Ok(CostMatrix::new(p_unit.len(), h_unit.len(), data)?)
}

/// Scores hypothesis containment in the premise: refine both graphs, build
/// the cost matrix and return one minus the optimal transport objective.
pub fn wwlk_score(
    hypothesis: &AmrGraph,
    premise: &AmrGraph,
    embedder: &dyn NodeEmbedder,
    cfg: &WlConfig,
) -> Result<f64, WlError> {
    let p = wl_refine(premise, embedder, cfg.k);
    let h = wl_refine(hypothesis, embedder, cfg.k);
    let c = cost_matrix(&p, &h)?;
    let flow = solve_transport(&c, cfg.mode)?;
    Ok((1.0 - flow.objective()).clamp(0.0, 1.0))
}
