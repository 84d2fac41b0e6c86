//! Names for the scoring functions this crate computes.
//!
//! Each variant is one column a scoring run can produce. The `P` suffix
//! marks the asymmetric, hypothesis-side precision form of a metric; the
//! `R` suffix its recall form; the `S` suffix the symmetric form
//! (an F-measure for discrete matching, a balanced objective for the
//! transport family). `External(name)` passes through a score column that
//! arrived with the dataset instead of being computed here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Metric {
    /// Token-bag precision: clipped overlap over hypothesis length.
    TokP,
    /// Token-bag recall: clipped overlap over premise length.
    TokR,
    /// Token-bag F1.
    TokS,
    /// Greedy embedding match, hypothesis side.
    BertScoP,
    /// Greedy embedding match, premise side.
    BertScoR,
    /// Greedy embedding match F1.
    BertS,
    /// Graph label-bag precision.
    GTokP,
    /// Graph label-bag recall.
    GTokR,
    /// Graph label-bag F1.
    GTokS,
    /// Triple-alignment precision: matched triples over hypothesis triples.
    SmatchP,
    /// Triple-alignment F1.
    SmatchS,
    /// Node-embedding transport without refinement, asymmetric.
    NMoverP,
    /// Node-embedding transport without refinement, symmetric.
    NMoverS,
    /// Transport over neighborhood-refined node embeddings, asymmetric.
    WwlkP,
    /// Transport over neighborhood-refined node embeddings, symmetric.
    WwlkS,
    /// A score column supplied with the input data.
    External(String),
}

impl Metric {
    /// Every computed metric, in display order. `External` columns are
    /// discovered from data, so they are not listed.
    pub const COMPUTED: [Metric; 15] = [
        Metric::TokP,
        Metric::TokR,
        Metric::TokS,
        Metric::BertScoP,
        Metric::BertScoR,
        Metric::BertS,
        Metric::GTokP,
        Metric::GTokR,
        Metric::GTokS,
        Metric::SmatchP,
        Metric::SmatchS,
        Metric::NMoverP,
        Metric::NMoverS,
        Metric::WwlkP,
        Metric::WwlkS,
    ];

    /// True for metrics that read the pair's graphs.
    pub fn needs_graphs(&self) -> bool {
        matches!(
            self,
            Metric::GTokP
                | Metric::GTokR
                | Metric::GTokS
                | Metric::SmatchP
                | Metric::SmatchS
                | Metric::NMoverP
                | Metric::NMoverS
                | Metric::WwlkP
                | Metric::WwlkS
        )
    }

    /// True for metrics that need a word-vector store.
    pub fn needs_embeddings(&self) -> bool {
        matches!(
            self,
            Metric::NMoverP | Metric::NMoverS | Metric::WwlkP | Metric::WwlkS
        )
    }

    /// True for metrics that embed sentence tokens (static store or
    /// contextual sidecar).
    pub fn needs_token_vectors(&self) -> bool {
        matches!(self, Metric::BertScoP | Metric::BertScoR | Metric::BertS)
    }

    /// True for metrics that run the triple-alignment search.
    pub fn needs_alignment(&self) -> bool {
        matches!(self, Metric::SmatchP | Metric::SmatchS)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::TokP => write!(f, "TokP"),
            Metric::TokR => write!(f, "TokR"),
            Metric::TokS => write!(f, "TokS"),
            Metric::BertScoP => write!(f, "BertScoP"),
            Metric::BertScoR => write!(f, "BertScoR"),
            Metric::BertS => write!(f, "BertS"),
            Metric::GTokP => write!(f, "GTokP"),
            Metric::GTokR => write!(f, "GTokR"),
            Metric::GTokS => write!(f, "GTokS"),
            Metric::SmatchP => write!(f, "SmatchP"),
            Metric::SmatchS => write!(f, "SmatchS"),
            Metric::NMoverP => write!(f, "NMoverP"),
            Metric::NMoverS => write!(f, "NMoverS"),
            Metric::WwlkP => write!(f, "WWLKP"),
            Metric::WwlkS => write!(f, "WWLKS"),
            Metric::External(name) => write!(f, "external:{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "unknown metric '{name}'; expected one of TokP, TokR, TokS, BertScoP, BertScoR, BertS, \
     GTokP, GTokR, GTokS, SmatchP, SmatchS, NMoverP, NMoverS, WWLKP, WWLKS, or external:<name>"
)]
pub struct UnknownMetric {
    pub name: String,
}

impl FromStr for Metric {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(name) = s.strip_prefix("external:") {
            if name.is_empty() {
                return Err(UnknownMetric {
                    name: s.to_string(),
                });
            }
            return Ok(Metric::External(name.to_string()));
        }
        match s {
            "TokP" => Ok(Metric::TokP),
            "TokR" => Ok(Metric::TokR),
            "TokS" => Ok(Metric::TokS),
            "BertScoP" => Ok(Metric::BertScoP),
            "BertScoR" => Ok(Metric::BertScoR),
            "BertS" => Ok(Metric::BertS),
            "GTokP" => Ok(Metric::GTokP),
            "GTokR" => Ok(Metric::GTokR),
            "GTokS" => Ok(Metric::GTokS),
            "SmatchP" => Ok(Metric::SmatchP),
            "SmatchS" => Ok(Metric::SmatchS),
            "NMoverP" => Ok(Metric::NMoverP),
            "NMoverS" => Ok(Metric::NMoverS),
            "WWLKP" => Ok(Metric::WwlkP),
            "WWLKS" => Ok(Metric::WwlkS),
            other => Err(UnknownMetric {
                name: other.to_string(),
            }),
        }
    }
}

impl TryFrom<String> for Metric {
    type Error = UnknownMetric;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Metric> for String {
    fn from(metric: Metric) -> Self {
        metric.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_names_round_trip_through_parsing() {
        for metric in Metric::COMPUTED {
            let name = metric.to_string();
            assert_eq!(name.parse::<Metric>().unwrap(), metric);
        }
        let ext = Metric::External("trainBERT".to_string());
        assert_eq!(ext.to_string(), "external:trainBERT");
        assert_eq!("external:trainBERT".parse::<Metric>().unwrap(), ext);
    }

    #[test]
    fn refinement_metrics_use_upper_case_names() {
        assert_eq!(Metric::WwlkP.to_string(), "WWLKP");
        assert_eq!(Metric::WwlkS.to_string(), "WWLKS");
    }

    #[test]
    fn unknown_names_produce_a_helpful_error() {
        let err = "Bleu".parse::<Metric>().unwrap_err();
        assert_eq!(err.name, "Bleu");
        assert!(err.to_string().contains("WWLKP"));
        assert!("external:".parse::<Metric>().is_err());
    }

    #[test]
    fn resource_requirements() {
        assert!(Metric::WwlkP.needs_embeddings());
        assert!(Metric::WwlkP.needs_graphs());
        assert!(!Metric::WwlkP.needs_token_vectors());
        assert!(Metric::BertS.needs_token_vectors());
        assert!(!Metric::BertS.needs_graphs());
        assert!(Metric::SmatchP.needs_alignment());
        assert!(!Metric::TokP.needs_graphs());
        assert!(!Metric::External("x".into()).needs_graphs());
    }

    #[test]
    fn serde_uses_display_names() {
        let json = serde_json::to_string(&Metric::WwlkP).unwrap();
        assert_eq!(json, "\"WWLKP\"");
        let back: Metric = serde_json::from_str("\"external:devBERT\"").unwrap();
        assert_eq!(back, Metric::External("devBERT".to_string()));
    }
}
