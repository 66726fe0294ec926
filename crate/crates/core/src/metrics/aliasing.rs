use std::collections::BTreeMap;

use ndarray::ArrayView2;
use serde::Serialize;

use super::{model_matrix, second_order_correlations, ColumnStats, PairClass, THEORY_TOLERANCE};
use crate::analytic;
use crate::error::{Error, Result};

/// All 4-subsets of `0..m` in lexicographic order.
pub fn four_subsets(m: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                for d in c + 1..m {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Absolute sum of the four-factor interaction column on `factors`.
pub fn j4(d: ArrayView2<'_, i8>, factors: [usize; 4]) -> u64 {
    let [a, b, c, e] = factors;
    let sum: i64 =
        d.rows().into_iter().map(|r| i64::from(r[a]) * i64::from(r[b]) * i64::from(r[c]) * i64::from(r[e])).sum();
    sum.unsigned_abs()
}

/// Frequencies of the J4 values over all 4-subsets of factors.
pub fn j4_spectrum(d: ArrayView2<'_, i8>) -> BTreeMap<u64, u64> {
    let mut spectrum = BTreeMap::new();
    for subset in four_subsets(d.ncols()) {
        *spectrum.entry(j4(d, subset)).or_insert(0) += 1;
    }
    spectrum
}

/// Absolute correlation of the interactions `first` and `second` (four
/// distinct factors) from the J4 route: the four-factor interaction sum divided
/// by the geometric mean of the two interaction columns' nonzero counts. In a
/// design built from foldovers every interaction column sums to zero, so this
/// equals the absolute Pearson correlation.
pub fn corr_2fi_disjoint_via_j4(d: ArrayView2<'_, i8>, first: (usize, usize), second: (usize, usize)) -> f64 {
    let factors = [first.0, first.1, second.0, second.1];
    debug_assert!({
        let mut f = factors;
        f.sort_unstable();
        f.windows(2).all(|w| w[0] != w[1])
    });
    let nonzero = |(i, j): (usize, usize)| d.rows().into_iter().filter(|r| r[i] != 0 && r[j] != 0).count();
    let denominator = ((nonzero(first) * nonzero(second)) as f64).sqrt();
    if denominator == 0.0 {
        return 0.0;
    }
    j4(d, factors) as f64 / denominator
}

/// Sum of squared correlations over all pairs of interaction columns.
pub fn ssq_2fi(d: ArrayView2<'_, i8>) -> Result<f64> {
    let model = model_matrix(d);
    let stats = model
        .interaction_effects()
        .into_iter()
        .map(|e| {
            let s = ColumnStats::new(model.column(e));
            if s.is_constant() {
                Err(Error::ZeroVariance(e.to_string()))
            } else {
                Ok(s)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for (x, a) in stats.iter().enumerate() {
        for b in &stats[x + 1..] {
            let r = a.correlation(b);
            total += r * r;
        }
    }
    Ok(total)
}

/// Sum of squared correlations over all pairs of second-order columns.
pub fn ssq_all_second_order(d: ArrayView2<'_, i8>) -> Result<f64> {
    Ok(second_order_correlations(&model_matrix(d))?.iter().map(|p| p.r * p.r).sum())
}

/// Counts of interaction-pair absolute correlations at each value, nonzero
/// values in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyVector {
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
    pub zero_count: u64,
}

impl FrequencyVector {
    pub fn total(&self) -> u64 {
        self.zero_count + self.counts.iter().sum::<u64>()
    }

    pub fn count_at(&self, value: f64) -> Option<u64> {
        self.values.iter().position(|v| (v - value).abs() <= THEORY_TOLERANCE).map(|i| self.counts[i])
    }
}

fn interaction_abs_correlations(d: ArrayView2<'_, i8>) -> Result<Vec<f64>> {
    let model = model_matrix(d);
    let interactions = model.interaction_effects();
    let stats = interactions
        .iter()
        .map(|&e| {
            let s = ColumnStats::new(model.column(e));
            if s.is_constant() {
                Err(Error::ZeroVariance(e.to_string()))
            } else {
                Ok(s)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (x, a) in stats.iter().enumerate() {
        for b in &stats[x + 1..] {
            out.push(a.correlation(b).abs());
        }
    }
    Ok(out)
}

/// Frequencies at every theoretically possible nonzero value for a design
/// built from `n`-run conference designs. An observed value outside the
/// theoretical set is an error.
pub fn f_vector(d: ArrayView2<'_, i8>, n: usize) -> Result<FrequencyVector> {
    analytic::check_order(n)?;
    let values = analytic::interaction_value_set(n);
    let mut counts = vec![0u64; values.len()];
    let mut zero_count = 0;
    for r in interaction_abs_correlations(d)? {
        if r <= THEORY_TOLERANCE {
            zero_count += 1;
        } else if let Some(i) = values.iter().position(|v| (v - r).abs() <= THEORY_TOLERANCE) {
            counts[i] += 1;
        } else {
            return Err(Error::UnexpectedCorrelationValue(r));
        }
    }
    Ok(FrequencyVector { values, counts, zero_count })
}

/// Frequencies of the distinct observed interaction-pair absolute
/// correlations, for designs without a known theoretical value set.
pub fn interaction_spectrum(d: ArrayView2<'_, i8>) -> Result<FrequencyVector> {
    let mut observed = interaction_abs_correlations(d)?;
    observed.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut values: Vec<f64> = Vec::new();
    let mut counts = Vec::new();
    let mut zero_count = 0;
    for r in observed {
        if r <= THEORY_TOLERANCE {
            zero_count += 1;
        } else if values.last().is_some_and(|v| (v - r).abs() <= THEORY_TOLERANCE) {
            *counts.last_mut().unwrap() += 1;
        } else {
            values.push(r);
            counts.push(1);
        }
    }
    Ok(FrequencyVector { values, counts, zero_count })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub q2: f64,
    pub q3: f64,
    pub max: f64,
}

/// Median, upper quartile, and maximum with linear interpolation between
/// order statistics (the `p`-quantile sits at zero-based position `p(k-1)`).
pub fn quartiles_of(values: &[f64]) -> Quartiles {
    if values.is_empty() {
        return Quartiles { q2: 0.0, q3: 0.0, max: 0.0 };
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let quantile = |p: f64| {
        let h = p * (sorted.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(sorted.len() - 1);
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Quartiles { q2: quantile(0.5), q3: quantile(0.75), max: *sorted.last().unwrap() }
}

/// Quartiles of the absolute correlations over all second-order pairs.
pub fn quartile_summary(d: ArrayView2<'_, i8>) -> Result<Quartiles> {
    let abs: Vec<f64> = second_order_correlations(&model_matrix(d))?.iter().map(|p| p.r.abs()).collect();
    Ok(quartiles_of(&abs))
}

/// Number of pairs per class, for reporting.
pub fn class_counts(m: usize) -> BTreeMap<PairClass, usize> {
    let choose2 = m * (m.saturating_sub(1)) / 2;
    let choose3 = choose2 * m.saturating_sub(2) / 3;
    let choose4 = choose3 * m.saturating_sub(3) / 4;
    BTreeMap::from([
        (PairClass::QuadQuad, choose2),
        (PairClass::QuadTfiShared, 2 * choose2),
        (PairClass::QuadTfiDisjoint, m * choose2.saturating_sub(m.saturating_sub(1))),
        (PairClass::TfiShared, 3 * choose3),
        (PairClass::TfiDisjoint, 3 * choose4),
    ])
}
