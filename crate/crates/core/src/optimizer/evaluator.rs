use ndarray::ArrayView2;

use super::{AliasScore, ObjectiveKind};
use crate::analytic;
use crate::designs::{LowerState, ScreeningDesign};
use crate::error::{Error, Result};

const UNKNOWN: u32 = u32::MAX;

/// Objective evaluation from precomputed block sums.
///
/// For factors `a, b, c, d` of the concatenation, the four-factor sum is the
/// upper block's sum plus `s_a s_b s_c s_d` times the lower parent's sum over
/// the permuted columns; the shared-factor sums `Σ x_i² x_j x_k` split the same
/// way with sign `s_j s_k`. Center runs contribute nothing to either. Every
/// interaction column of the body has `4n - 8` nonzeros and sums to zero, so
/// these integer sums are the correlations on the scale `4n - 8`.
#[derive(Debug, Clone)]
pub struct Evaluator {
    m: usize,
    scale: u64,
    subsets: Vec<[usize; 4]>,
    upper4: Vec<i32>,
    /// Dense over ordered 4-tuples of lower-parent columns.
    lower4: Vec<i32>,
    triples: Vec<[usize; 3]>,
    upper3: Vec<i32>,
    /// Dense over ordered triples `(i, j, k)` of lower-parent columns.
    lower3: Vec<i32>,
    /// Nonzero magnitudes in descending order.
    magnitudes: Vec<u64>,
    slot: Vec<u32>,
}

fn four_sum(d: ArrayView2<'_, i8>, [a, b, c, e]: [usize; 4]) -> i32 {
    d.rows().into_iter().map(|r| i32::from(r[a] * r[b] * r[c] * r[e])).sum()
}

fn shared_sum(d: ArrayView2<'_, i8>, [i, j, k]: [usize; 3]) -> i32 {
    d.rows().into_iter().map(|r| i32::from(r[i] * r[i] * r[j] * r[k])).sum()
}

impl Evaluator {
    pub fn new(d1: &ScreeningDesign, d2: &ScreeningDesign) -> Result<Self> {
        if d1.entries().dim() != d2.entries().dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", d1.entries().dim()),
                found: format!("{:?}", d2.entries().dim()),
            });
        }
        let n = d1.parent_runs();
        analytic::check_order(n)?;
        let m = d1.factors();
        let (up, low) = (d1.entries(), d2.entries());

        let subsets = crate::metrics::four_subsets(m);
        let upper4 = subsets.iter().map(|&s| four_sum(up, s)).collect();
        let mut lower4 = vec![0; m * m * m * m];
        for &[a, b, c, e] in &subsets {
            let v = four_sum(low, [a, b, c, e]);
            for t in permutations4([a, b, c, e]) {
                lower4[index4(m, t)] = v;
            }
        }

        let mut triples = Vec::new();
        for i in 0..m {
            for j in 0..m {
                for k in j + 1..m {
                    if i != j && i != k {
                        triples.push([i, j, k]);
                    }
                }
            }
        }
        let upper3 = triples.iter().map(|&t| shared_sum(up, t)).collect();
        let mut lower3 = vec![0; m * m * m];
        for &[i, j, k] in &triples {
            let v = shared_sum(low, [i, j, k]);
            lower3[(i * m + j) * m + k] = v;
            lower3[(i * m + k) * m + j] = v;
        }

        let scale = analytic::interaction_scale(n);
        let magnitudes: Vec<u64> = analytic::interaction_value_set_exact(n)
            .into_iter()
            .map(|v| {
                let x = v * scale as i64;
                debug_assert!(x.is_integer());
                x.to_integer() as u64
            })
            .collect();
        let mut slot = vec![UNKNOWN; scale as usize + 1];
        for (s, &mag) in magnitudes.iter().enumerate() {
            slot[mag as usize] = s as u32;
        }
        Ok(Self { m, scale, subsets, upper4, lower4, triples, upper3, lower3, magnitudes, slot })
    }

    pub fn factors(&self) -> usize {
        self.m
    }

    /// Interaction correlations of the concatenation under `s`, as counts and
    /// an exact sum of squares on the integer scale.
    pub fn score(&self, s: &LowerState) -> Result<AliasScore> {
        let m = self.m;
        let (perm, signs) = (s.perm(), s.signs());
        let mut counts = vec![0u64; self.magnitudes.len()];
        let mut zero_count = 0u64;
        let mut sum_squares = 0u64;
        let mut tally = |magnitude: u64, pairs: u64| -> Result<()> {
            if magnitude == 0 {
                zero_count += pairs;
                return Ok(());
            }
            match self.slot.get(magnitude as usize).copied().unwrap_or(UNKNOWN) {
                UNKNOWN => Err(Error::UnexpectedCorrelationValue(magnitude as f64 / self.scale as f64)),
                slot => {
                    counts[slot as usize] += pairs;
                    sum_squares += pairs * magnitude * magnitude;
                    Ok(())
                }
            }
        };

        for (&[a, b, c, d], &upper) in self.subsets.iter().zip(&self.upper4) {
            let sign = i32::from(signs[a] * signs[b] * signs[c] * signs[d]);
            let lower = self.lower4[index4(m, [perm[a], perm[b], perm[c], perm[d]])];
            // One four-factor sum fixes the three disjoint pairs on its factors.
            tally((upper + sign * lower).unsigned_abs().into(), 3)?;
        }
        for (&[i, j, k], &upper) in self.triples.iter().zip(&self.upper3) {
            let sign = i32::from(signs[j] * signs[k]);
            let lower = self.lower3[(perm[i] * m + perm[j]) * m + perm[k]];
            tally((upper + sign * lower).unsigned_abs().into(), 1)?;
        }
        Ok(AliasScore { scale: self.scale, magnitudes: self.magnitudes.clone(), counts, zero_count, sum_squares })
    }

    pub fn objective(&self, s: &LowerState, kind: ObjectiveKind) -> Result<super::Objective> {
        Ok(super::Objective { kind, score: self.score(s)? })
    }
}

fn index4(m: usize, [a, b, c, d]: [usize; 4]) -> usize {
    ((a * m + b) * m + c) * m + d
}

fn permutations4(t: [usize; 4]) -> impl Iterator<Item = [usize; 4]> {
    const ORDERS: [[usize; 4]; 24] = [
        [0, 1, 2, 3],
        [0, 1, 3, 2],
        [0, 2, 1, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
        [0, 3, 2, 1],
        [1, 0, 2, 3],
        [1, 0, 3, 2],
        [1, 2, 0, 3],
        [1, 2, 3, 0],
        [1, 3, 0, 2],
        [1, 3, 2, 0],
        [2, 0, 1, 3],
        [2, 0, 3, 1],
        [2, 1, 0, 3],
        [2, 1, 3, 0],
        [2, 3, 0, 1],
        [2, 3, 1, 0],
        [3, 0, 1, 2],
        [3, 0, 2, 1],
        [3, 1, 0, 2],
        [3, 1, 2, 0],
        [3, 2, 0, 1],
        [3, 2, 1, 0],
    ];
    ORDERS.into_iter().map(move |o| o.map(|x| t[x]))
}
