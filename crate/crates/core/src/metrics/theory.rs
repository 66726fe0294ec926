//! Comparison of a design's empirical correlations with the closed-form
//! values that hold for every concatenated design.

use std::collections::BTreeMap;

use ndarray::ArrayView2;
use serde::Serialize;

use super::aliasing::{four_subsets, j4};
use super::{first_order_correlations, model_matrix, second_order_correlations, Effect, PairClass, THEORY_TOLERANCE};
use crate::analytic;
use crate::error::Result;

/// Tolerance for correlations that must vanish exactly.
pub const ZERO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryCheck {
    pub n: usize,
    pub n0: usize,
    /// Pairs checked per class.
    pub checked: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
    /// Largest absolute second-order correlation and how many pairs attain it.
    pub max_abs_correlation: f64,
    pub max_pairs: usize,
    pub max_class: Option<String>,
}

impl TheoryCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Checks every classified correlation of `d` against the values a
/// concatenated design with `n`-run parents and `n0` center runs must show.
pub fn check_theory(d: ArrayView2<'_, i8>, n: usize, n0: usize) -> Result<TheoryCheck> {
    analytic::check_order(n)?;
    let model = model_matrix(d);
    let mut violations = Vec::new();
    let mut checked: BTreeMap<String, usize> = BTreeMap::new();
    let mut flag = |check: &str, detail: String| violations.push(Violation { check: check.into(), detail });

    let first_order = first_order_correlations(&model)?;
    for &(a, b, r) in &first_order {
        if !near(r, 0.0, ZERO_TOLERANCE) {
            flag("first-order orthogonality", format!("r({a}, {b}) = {r:.12}"));
        }
    }
    checked.insert("first-order".into(), first_order.len());

    let qq = analytic::qq_corr_comars(n, n0);
    let q2fi = analytic::q2fi_corr_comars(n, n0);
    let shared = analytic::tfi_shared_corr(n);
    let disjoint = analytic::tfi_disjoint_value_set(n);

    let pairs = second_order_correlations(&model)?;
    let mut q2fi_disjoint: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    let mut tfi_shared: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    for p in &pairs {
        *checked.entry(p.class.to_string()).or_default() += 1;
        let abs = p.r.abs();
        let (a, b) = (p.a, p.b);
        match p.class {
            PairClass::QuadQuad => {
                if !near(p.r, qq, THEORY_TOLERANCE) {
                    flag("quadratic pair", format!("r({a}, {b}) = {:.12}, expected {qq:.12}", p.r));
                }
            }
            PairClass::QuadTfiShared => {
                if !near(p.r, 0.0, ZERO_TOLERANCE) {
                    flag("quadratic/interaction, shared factor", format!("r({a}, {b}) = {:.12}", p.r));
                }
            }
            PairClass::QuadTfiDisjoint => {
                if !near(abs, 0.0, THEORY_TOLERANCE) && !near(abs, q2fi, THEORY_TOLERANCE) {
                    flag("quadratic/interaction, no shared factor", format!("|r({a}, {b})| = {abs:.12}"));
                }
                if let (Effect::Quadratic(i), Effect::Interaction(j, k)) = (a, b) {
                    q2fi_disjoint.insert((i, j, k), abs);
                }
            }
            PairClass::TfiShared => {
                if !near(abs, 0.0, THEORY_TOLERANCE) && !near(abs, shared, THEORY_TOLERANCE) {
                    flag("interactions, shared factor", format!("|r({a}, {b})| = {abs:.12}"));
                }
                if let (Effect::Interaction(a0, a1), Effect::Interaction(b0, b1)) = (a, b) {
                    let common = if a0 == b0 || a0 == b1 { a0 } else { a1 };
                    let other_a = if common == a0 { a1 } else { a0 };
                    let other_b = if common == b0 { b1 } else { b0 };
                    let (j, k) = (other_a.min(other_b), other_a.max(other_b));
                    tfi_shared.insert((common, j, k), abs);
                }
            }
            PairClass::TfiDisjoint => {
                if !disjoint.iter().any(|&v| near(abs, v, THEORY_TOLERANCE)) {
                    flag("interactions, no shared factor", format!("|r({a}, {b})| = {abs:.12}"));
                }
            }
        }
    }

    // r(x_i^2, x_j x_k) and r(x_i x_j, x_i x_k) vanish together, and when
    // nonzero their ratio is q2fi / shared.
    let ratio = q2fi / shared;
    for (&(i, j, k), &rq) in &q2fi_disjoint {
        let Some(&rt) = tfi_shared.get(&(i, j, k)) else { continue };
        let q_zero = near(rq, 0.0, THEORY_TOLERANCE);
        let t_zero = near(rt, 0.0, THEORY_TOLERANCE);
        if q_zero != t_zero || (!q_zero && !near(rq / rt, ratio, 1e-9 * ratio)) {
            flag(
                "proportionality",
                format!("r(x{0}^2, x{1}*x{2}) = {rq:.12} vs r(x{0}*x{1}, x{0}*x{2}) = {rt:.12}", i + 1, j + 1, k + 1),
            );
        }
    }

    let j4_values = analytic::j4_value_set(n);
    for subset in four_subsets(d.ncols()) {
        let value = j4(d, subset);
        if !j4_values.contains(&value) {
            let names: Vec<String> = subset.iter().map(|f| format!("x{}", f + 1)).collect();
            flag("J4 value", format!("J4({}) = {value}", names.join(",")));
        }
    }
    checked.insert("J4".into(), four_subsets(d.ncols()).len());

    let max_abs_correlation = pairs.iter().map(|p| p.r.abs()).fold(0.0, f64::max);
    let at_max: Vec<_> = pairs.iter().filter(|p| near(p.r.abs(), max_abs_correlation, THEORY_TOLERANCE)).collect();
    let max_class = at_max.first().map(|p| p.class).filter(|c| at_max.iter().all(|p| p.class == *c));

    Ok(TheoryCheck {
        n,
        n0,
        checked,
        violations,
        max_abs_correlation,
        max_pairs: at_max.len(),
        max_class: max_class.map(|c| c.to_string()),
    })
}
