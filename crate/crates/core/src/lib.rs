//! Metrics for scoring natural-language-inference pairs by measuring how much
//! of the hypothesis is contained in the premise.
//!
//! The crate offers three families of scorers plus an evaluation harness:
//!
//! * **Token metrics** ([`text`]): bag-of-token precision/recall/F1 and greedy
//!   embedding matching over word vectors.
//! * **Graph metrics** ([`smatch`], [`wl`]): triple alignment over AMR graphs
//!   and Weisfeiler-Leman node refinement combined with optimal transport.
//! * **Evaluation** ([`eval`]): dataset loading, ranking AUC, precision at the
//!   top p%, hybrid graph/text fusion and alpha sweeps.
//!
//! AMR graphs enter the crate as PENMAN text via [`penman::parse`]; word
//! vectors via [`embed::EmbedStore`].
//!
//! All scorers are pure functions of their inputs and configuration, so any
//! fixed input, configuration and seed reproduces bit-identical results.

pub mod amr;
pub mod embed;
pub mod eval;
pub mod metric;
pub mod penman;
mod score;
pub mod smatch;
pub mod synth;
pub mod text;
pub mod transport;
mod util;
pub mod wl;

pub use amr::{AmrGraph, Triple, TripleKind, TripleSet};
pub use embed::{ContextualSidecar, EmbedStore};
pub use eval::{
    compute_auc, hybrid_score, load_dataset, precision_at_top, run_metrics, DataFormat, Dataset,
    EvalReport, Label, NliPair, Resources, ScoreTable,
};
pub use metric::Metric;
pub use score::{harmonic_mean, PrfScores};
pub use smatch::{Alignment, SearchConfig, SearchMode};
pub use text::{Bag, EmbedSet};
pub use transport::{CostMatrix, Flow, TransportMode};
pub use wl::{NodeEmbedder, NodeVectors, WlConfig};
