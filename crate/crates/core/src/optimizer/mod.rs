//! Search over the lower parent's column arrangement: a best-improvement
//! column-change (CC) local search of sign flips and column swaps, nested in a
//! variable neighborhood search (VNS), with seeded independent restarts.

mod evaluator;
mod search;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use self::evaluator::Evaluator;
pub use self::search::{
    cc_search, optimize, optimize_pairings, vns_shake, CcOutcome, LogEntry, Move, OptimizeResult, PairingResult,
};
use crate::designs::{concatenate, LowerState, ScreeningDesign};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Sum of squared interaction-pair correlations.
    Ssq,
    /// Frequencies at each correlation value, compared from the largest value down.
    F,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::Ssq => "ssq",
            ObjectiveKind::F => "f",
        })
    }
}

impl FromStr for ObjectiveKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ssq" | "s" => Ok(ObjectiveKind::Ssq),
            "f" => Ok(ObjectiveKind::F),
            other => Err(format!("unknown objective {other:?} (expected ssq or f)")),
        }
    }
}

/// Interaction-pair correlations of a concatenated design, held exactly:
/// every correlation is `magnitude / scale` for an integer magnitude.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AliasScore {
    pub scale: u64,
    /// Theoretical nonzero magnitudes, descending.
    pub magnitudes: Vec<u64>,
    /// Pairs at each magnitude.
    pub counts: Vec<u64>,
    pub zero_count: u64,
    /// `Σ magnitude²` over all pairs.
    pub sum_squares: u64,
}

impl AliasScore {
    pub fn ssq(&self) -> f64 {
        self.sum_squares as f64 / (self.scale * self.scale) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        self.magnitudes.iter().map(|&v| v as f64 / self.scale as f64).collect()
    }

    pub fn pairs(&self) -> u64 {
        self.zero_count + self.counts.iter().sum::<u64>()
    }

    /// Largest absolute correlation present.
    pub fn max_correlation(&self) -> f64 {
        self.magnitudes
            .iter()
            .zip(&self.counts)
            .find(|(_, &c)| c > 0)
            .map_or(0.0, |(&v, _)| v as f64 / self.scale as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub score: AliasScore,
}

impl Objective {
    /// Orders by the objective's own criterion; `Less` is better.
    pub fn compare(&self, other: &Objective) -> Ordering {
        match self.kind {
            ObjectiveKind::Ssq => self.score.sum_squares.cmp(&other.score.sum_squares),
            ObjectiveKind::F => self.score.counts.cmp(&other.score.counts),
        }
    }

    pub fn is_better_than(&self, other: &Objective) -> bool {
        self.compare(other) == Ordering::Less
    }

    pub fn ssq(&self) -> f64 {
        self.score.ssq()
    }

    pub fn counts(&self) -> &[u64] {
        &self.score.counts
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<String> = self.score.counts.iter().map(u64::to_string).collect();
        match self.kind {
            ObjectiveKind::Ssq => write!(f, "ssq={:.6} f=({})", self.ssq(), counts.join(",")),
            ObjectiveKind::F => write!(f, "f=({}) ssq={:.6}", counts.join(","), self.ssq()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub objective: ObjectiveKind,
    pub restarts: usize,
    pub seed: u64,
    /// Safety bound on accepted moves per CC run.
    pub max_cc_passes: usize,
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl SearchConfig {
    pub fn new(objective: ObjectiveKind, restarts: usize, seed: u64) -> Self {
        Self { objective, restarts, seed, max_cc_passes: 10_000, threads: None }
    }
}

/// Objective of the concatenation of `d1` and `d2` under `s`. Center runs do
/// not affect interaction correlations, so `n0` only feeds the construction.
pub fn evaluate_objective(
    d1: &ScreeningDesign,
    d2: &ScreeningDesign,
    s: &LowerState,
    n0: usize,
    kind: ObjectiveKind,
) -> Result<Objective> {
    concatenate(d1, d2, s, n0)?;
    Evaluator::new(d1, d2)?.objective(s, kind)
}
