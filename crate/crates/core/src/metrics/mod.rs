//! Second-order model matrices and the empirical aliasing diagnostics computed
//! from them.
//!
//! Correlations are centered Pearson correlations over all runs, center runs
//! included. Column sums are accumulated in integers, so a correlation is
//! determined by its inputs alone and never by evaluation order.

mod aliasing;
mod efficiency;
mod report;
mod theory;

use std::fmt;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

pub use self::aliasing::{
    class_counts, corr_2fi_disjoint_via_j4, f_vector, four_subsets, interaction_spectrum, j4, j4_spectrum,
    quartile_summary, quartiles_of, ssq_2fi, ssq_all_second_order, FrequencyVector, Quartiles,
};
pub use self::efficiency::{
    d_criterion, information_matrix, log_det_information, quadratic_variances, relative_d_efficiency,
};
pub use self::report::{alias_report, infer_center_runs, infer_parent_runs, AliasReport, ValueCount};
pub use self::theory::{check_theory, TheoryCheck, Violation};
use crate::error::{Error, Result};

/// Absolute tolerance for matching an observed correlation to a theoretical one.
pub const THEORY_TOLERANCE: f64 = 1e-9;

/// A model term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Effect {
    Linear(usize),
    Quadratic(usize),
    Interaction(usize, usize),
}

impl Effect {
    pub fn is_second_order(self) -> bool {
        !matches!(self, Effect::Linear(_))
    }

    fn factors(self) -> Vec<usize> {
        match self {
            Effect::Linear(i) | Effect::Quadratic(i) => vec![i],
            Effect::Interaction(i, j) => vec![i, j],
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Effect::Linear(i) => write!(f, "x{}", i + 1),
            Effect::Quadratic(i) => write!(f, "x{}^2", i + 1),
            Effect::Interaction(i, j) => write!(f, "x{}*x{}", i + 1, j + 1),
        }
    }
}

/// Kinds of second-order column pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairClass {
    /// Two quadratic effects.
    QuadQuad,
    /// Quadratic effect and an interaction containing its factor.
    QuadTfiShared,
    /// Quadratic effect and an interaction of two other factors.
    QuadTfiDisjoint,
    /// Two interactions with one factor in common.
    TfiShared,
    /// Two interactions on four distinct factors.
    TfiDisjoint,
}

impl PairClass {
    pub const ALL: [PairClass; 5] = [
        PairClass::QuadQuad,
        PairClass::QuadTfiShared,
        PairClass::QuadTfiDisjoint,
        PairClass::TfiShared,
        PairClass::TfiDisjoint,
    ];

    /// Class of an unordered pair of distinct second-order effects; `None`
    /// when either effect is linear.
    pub fn classify(a: Effect, b: Effect) -> Option<PairClass> {
        use Effect::*;
        let shares = || a.factors().iter().any(|f| b.factors().contains(f));
        match (a, b) {
            (Linear(_), _) | (_, Linear(_)) => None,
            (Quadratic(_), Quadratic(_)) => Some(PairClass::QuadQuad),
            (Quadratic(_), Interaction(..)) | (Interaction(..), Quadratic(_)) => {
                Some(if shares() { PairClass::QuadTfiShared } else { PairClass::QuadTfiDisjoint })
            }
            (Interaction(..), Interaction(..)) => {
                Some(if shares() { PairClass::TfiShared } else { PairClass::TfiDisjoint })
            }
        }
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PairClass::QuadQuad => "quadratic-quadratic",
            PairClass::QuadTfiShared => "quadratic-interaction (shared factor)",
            PairClass::QuadTfiDisjoint => "quadratic-interaction (no shared factor)",
            PairClass::TfiShared => "interaction-interaction (shared factor)",
            PairClass::TfiDisjoint => "interaction-interaction (no shared factor)",
        };
        f.write_str(name)
    }
}

/// Linear, quadratic, and two-factor interaction columns of a design.
/// Interaction columns are ordered lexicographically by factor pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMatrix {
    pub linear: Array2<i8>,
    pub quadratic: Array2<i8>,
    pub twofi: Array2<i8>,
    pub pairs: Vec<(usize, usize)>,
}

impl ModelMatrix {
    pub fn runs(&self) -> usize {
        self.linear.nrows()
    }

    pub fn factors(&self) -> usize {
        self.linear.ncols()
    }

    pub fn column(&self, effect: Effect) -> ArrayView1<'_, i8> {
        match effect {
            Effect::Linear(i) => self.linear.column(i),
            Effect::Quadratic(i) => self.quadratic.column(i),
            Effect::Interaction(i, j) => {
                let idx = self.pairs.iter().position(|&p| p == (i, j)).expect("interaction in model");
                self.twofi.column(idx)
            }
        }
    }

    /// All effects in column order.
    pub fn effects(&self) -> Vec<Effect> {
        let m = self.factors();
        (0..m)
            .map(Effect::Linear)
            .chain((0..m).map(Effect::Quadratic))
            .chain(self.pairs.iter().map(|&(i, j)| Effect::Interaction(i, j)))
            .collect()
    }

    pub fn second_order_effects(&self) -> Vec<Effect> {
        self.effects().into_iter().filter(|e| e.is_second_order()).collect()
    }

    pub fn interaction_effects(&self) -> Vec<Effect> {
        self.pairs.iter().map(|&(i, j)| Effect::Interaction(i, j)).collect()
    }
}

pub fn model_matrix(d: ArrayView2<'_, i8>) -> ModelMatrix {
    let m = d.ncols();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let mut twofi = Array2::zeros((d.nrows(), pairs.len()));
    for (c, &(i, j)) in pairs.iter().enumerate() {
        let product = &d.column(i) * &d.column(j);
        twofi.column_mut(c).assign(&product);
    }
    ModelMatrix { linear: d.to_owned(), quadratic: d.mapv(|v| v * v), twofi, pairs }
}

#[derive(Debug, Clone)]
pub(crate) struct ColumnStats<'a> {
    values: ArrayView1<'a, i8>,
    sum: i64,
    centered_ss: i64,
}

impl<'a> ColumnStats<'a> {
    pub(crate) fn new(values: ArrayView1<'a, i8>) -> Self {
        let n = values.len() as i64;
        let sum: i64 = values.iter().map(|&v| i64::from(v)).sum();
        let sumsq: i64 = values.iter().map(|&v| i64::from(v) * i64::from(v)).sum();
        // n * sum((x - mean)^2), kept integral.
        ColumnStats { values, sum, centered_ss: n * sumsq - sum * sum }
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.centered_ss == 0
    }

    pub(crate) fn correlation(&self, other: &ColumnStats<'_>) -> f64 {
        let n = self.values.len() as i64;
        let cross: i64 = self.values.iter().zip(other.values.iter()).map(|(&a, &b)| i64::from(a) * i64::from(b)).sum();
        let numerator = n * cross - self.sum * other.sum;
        numerator as f64 / ((self.centered_ss as f64) * (other.centered_ss as f64)).sqrt()
    }
}

/// Centered Pearson correlation of two integer columns.
pub fn pearson(u: ArrayView1<'_, i8>, v: ArrayView1<'_, i8>) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len().to_string(), found: v.len().to_string() });
    }
    let (a, b) = (ColumnStats::new(u), ColumnStats::new(v));
    if a.is_constant() {
        return Err(Error::ZeroVariance("first argument".into()));
    }
    if b.is_constant() {
        return Err(Error::ZeroVariance("second argument".into()));
    }
    Ok(a.correlation(&b))
}

/// One classified second-order pair and its signed correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrelation {
    pub a: Effect,
    pub b: Effect,
    pub class: PairClass,
    pub r: f64,
}

/// Correlations of every unordered pair of distinct second-order columns,
/// in column-index order. Fails on the first constant column.
pub fn second_order_correlations(model: &ModelMatrix) -> Result<Vec<PairCorrelation>> {
    let effects = model.second_order_effects();
    let stats = column_stats(model, &effects)?;
    let mut out = Vec::with_capacity(effects.len() * effects.len().saturating_sub(1) / 2);
    for (x, (&a, sa)) in effects.iter().zip(&stats).enumerate() {
        for (&b, sb) in effects[x + 1..].iter().zip(&stats[x + 1..]) {
            let class = PairClass::classify(a, b).expect("second-order pair");
            out.push(PairCorrelation { a, b, class, r: sa.correlation(sb) });
        }
    }
    Ok(out)
}

/// Correlations of every linear column with every other model column.
pub fn first_order_correlations(model: &ModelMatrix) -> Result<Vec<(Effect, Effect, f64)>> {
    let effects = model.effects();
    let stats = column_stats(model, &effects)?;
    let m = model.factors();
    let mut out = Vec::new();
    for x in 0..m {
        for y in x + 1..effects.len() {
            out.push((effects[x], effects[y], stats[x].correlation(&stats[y])));
        }
    }
    Ok(out)
}

fn column_stats<'a>(model: &'a ModelMatrix, effects: &[Effect]) -> Result<Vec<ColumnStats<'a>>> {
    effects
        .iter()
        .map(|&e| {
            let s = ColumnStats::new(model.column(e));
            if s.is_constant() {
                Err(Error::ZeroVariance(e.to_string()))
            } else {
                Ok(s)
            }
        })
        .collect()
}

/// Number of rows that are entirely zero.
pub(crate) fn zero_rows(d: ArrayView2<'_, i8>) -> usize {
    d.axis_iter(Axis(0)).filter(|r| r.iter().all(|&v| v == 0)).count()
}
