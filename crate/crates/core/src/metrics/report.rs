use std::collections::BTreeMap;

use ndarray::ArrayView2;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::aliasing::{f_vector, interaction_spectrum, j4_spectrum, quartiles_of, FrequencyVector, Quartiles};
use super::{d_criterion, model_matrix, second_order_correlations, zero_rows, PairClass, PairCorrelation};
use crate::error::{Error, Result};

/// Aliasing diagnostics of one design.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasReport {
    pub factors: usize,
    /// Parent conference-design run count, when known.
    pub parent_runs: Option<usize>,
    pub center_runs: usize,
    pub runs: usize,
    pub pairs: BTreeMap<PairClass, Vec<PairCorrelation>>,
    pub j4_spectrum: BTreeMap<u64, u64>,
    pub ssq_2fi: f64,
    pub ssq_all_so: f64,
    pub f_vector: FrequencyVector,
    pub quartiles: Quartiles,
    pub d_criterion: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueCount {
    #[serde(serialize_with = "fixed6")]
    pub value: f64,
    pub count: u64,
}

fn fixed6<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format!("{x:.6}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

fn fixed6_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => fixed6(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct QuartilesJson {
    #[serde(serialize_with = "fixed6")]
    q2: f64,
    #[serde(serialize_with = "fixed6")]
    q3: f64,
    #[serde(serialize_with = "fixed6")]
    max: f64,
}

#[derive(Serialize)]
struct ReportJson {
    m: usize,
    n: Option<usize>,
    n0: usize,
    runs: usize,
    #[serde(serialize_with = "fixed6")]
    ssq_2fi: f64,
    #[serde(serialize_with = "fixed6")]
    ssq_all_so: f64,
    f_vector: Vec<ValueCount>,
    quartiles: QuartilesJson,
    j4_spectrum: Vec<J4Count>,
    #[serde(serialize_with = "fixed6_opt")]
    d_criterion: Option<f64>,
}

#[derive(Serialize)]
struct J4Count {
    value: u64,
    count: u64,
}

impl AliasReport {
    /// Nonzero values (descending) followed by the zero count.
    pub fn f_vector_entries(&self) -> Vec<ValueCount> {
        let fv = &self.f_vector;
        fv.values
            .iter()
            .zip(&fv.counts)
            .map(|(&value, &count)| ValueCount { value, count })
            .chain(std::iter::once(ValueCount { value: 0.0, count: fv.zero_count }))
            .collect()
    }

    /// JSON with every real printed to six decimals.
    pub fn to_json(&self) -> String {
        let json = ReportJson {
            m: self.factors,
            n: self.parent_runs,
            n0: self.center_runs,
            runs: self.runs,
            ssq_2fi: self.ssq_2fi,
            ssq_all_so: self.ssq_all_so,
            f_vector: self.f_vector_entries(),
            quartiles: QuartilesJson { q2: self.quartiles.q2, q3: self.quartiles.q3, max: self.quartiles.max },
            j4_spectrum: self.j4_spectrum.iter().map(|(&value, &count)| J4Count { value, count }).collect(),
            d_criterion: self.d_criterion,
        };
        serde_json::to_string_pretty(&json).expect("report serializes")
    }

    /// Number of second-order pairs attaining the maximum absolute correlation.
    pub fn pairs_at_max(&self) -> usize {
        self.pairs
            .values()
            .flatten()
            .filter(|p| (p.r.abs() - self.quartiles.max).abs() <= super::THEORY_TOLERANCE)
            .count()
    }
}

/// Count of trailing all-zero rows.
pub fn infer_center_runs(d: ArrayView2<'_, i8>) -> usize {
    d.rows().into_iter().rev().take_while(|r| r.iter().all(|&v| v == 0)).count()
}

/// Parent conference-design order implied by the zero pattern: each parent
/// foldover puts two zeros in every column and contributes `2n` runs, so the
/// body has `n` runs per zero.
pub fn infer_parent_runs(d: ArrayView2<'_, i8>) -> Option<usize> {
    let n0 = zero_rows(d);
    let body = d.nrows() - n0;
    let zeros = d.column(0).iter().filter(|&&v| v == 0).count() - n0;
    if zeros == 0 || !zeros.is_multiple_of(2) || !body.is_multiple_of(zeros) {
        return None;
    }
    let n = body / zeros;
    (n.is_multiple_of(2) && n >= 6).then_some(n)
}

/// Full diagnostics. With `parent_runs` the interaction frequencies are keyed
/// by the theoretical value set; otherwise by the distinct observed values.
pub fn alias_report(d: ArrayView2<'_, i8>, parent_runs: Option<usize>, center_runs: usize) -> Result<AliasReport> {
    let model = model_matrix(d);
    let correlations = second_order_correlations(&model)?;
    let mut pairs: BTreeMap<PairClass, Vec<PairCorrelation>> = BTreeMap::new();
    for p in &correlations {
        pairs.entry(p.class).or_default().push(*p);
    }
    let ssq_2fi = correlations
        .iter()
        .filter(|p| matches!(p.class, PairClass::TfiShared | PairClass::TfiDisjoint))
        .map(|p| p.r * p.r)
        .sum();
    let ssq_all_so = correlations.iter().map(|p| p.r * p.r).sum();
    let abs: Vec<f64> = correlations.iter().map(|p| p.r.abs()).collect();
    let f_vector = match parent_runs {
        Some(n) => f_vector(d, n)?,
        None => interaction_spectrum(d)?,
    };
    let d_criterion = match d_criterion(d) {
        Ok(v) => Some(v),
        Err(Error::SingularInformation) => None,
        Err(e) => return Err(e),
    };
    Ok(AliasReport {
        factors: d.ncols(),
        parent_runs,
        center_runs,
        runs: d.nrows(),
        pairs,
        j4_spectrum: j4_spectrum(d),
        ssq_2fi,
        ssq_all_so,
        f_vector,
        quartiles: quartiles_of(&abs),
        d_criterion,
    })
}
