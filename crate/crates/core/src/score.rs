//! Small shared score helpers.

/// Precision, recall and their harmonic mean for one scored pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScores {
    /// Builds the triple from precision and recall, filling in the F1.
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        PrfScores {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }
}

/// Harmonic mean of two non-negative values; zero when both are zero.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}
