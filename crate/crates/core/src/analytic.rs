//! Closed-form correlations for concatenated designs and their screening-design
//! counterparts.
//!
//! `n` is always the run count of the parent conference design (so a
//! concatenated design has `4n + n0` runs) and `n0` the number of center runs.
//! Values are computed as exact rationals and converted to `f64` at the
//! boundary. All functions panic when `n` is odd or below 6.

use std::collections::BTreeSet;

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Validates a parent conference-design order.
pub fn check_order(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddRunCount(n));
    }
    if n < 6 {
        return Err(Error::TooFewFactors(n));
    }
    Ok(())
}

fn order(n: usize) -> i64 {
    check_order(n).expect("parent order must be even and at least 6");
    n as i64
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn qq_corr_comars_exact(n: usize, n0: usize) -> Rational {
    let (n, n0) = (order(n), n0 as i64);
    Rational::new(n0 * (n - 2) - 4, (n - 1) * (n0 + 4))
}

/// Correlation between two quadratic-effect columns of any concatenated
/// design; it does not depend on how the parents are combined.
pub fn qq_corr_comars(n: usize, n0: usize) -> f64 {
    to_f64(qq_corr_comars_exact(n, n0))
}

pub fn qq_corr_dsd_exact(n: usize, n0: usize) -> Rational {
    let (n, n0) = (order(n), n0 as i64);
    Rational::new(n0 * (n - 2) - 2, (n - 1) * (n0 + 2))
}

/// Same quantity for a single foldover with `n0` center runs (`2n + n0` runs).
pub fn qq_corr_dsd(n: usize, n0: usize) -> f64 {
    to_f64(qq_corr_dsd_exact(n, n0))
}

/// Square of the nonzero value a quadratic/interaction correlation can take
/// when the two effects share no factor.
pub fn q2fi_corr_comars_squared(n: usize, n0: usize) -> Rational {
    let (n, n0) = (order(n), n0 as i64);
    Rational::new(4 * n + n0, (n0 + 4) * (n - 1) * (n - 2))
}

/// The nonzero member of `{value, 0}`.
pub fn q2fi_corr_comars(n: usize, n0: usize) -> f64 {
    to_f64(q2fi_corr_comars_squared(n, n0)).sqrt()
}

pub fn tfi_shared_corr_exact(n: usize) -> Rational {
    Rational::new(1, order(n) - 2)
}

/// Nonzero absolute correlation of two interactions sharing a factor.
pub fn tfi_shared_corr(n: usize) -> f64 {
    to_f64(tfi_shared_corr_exact(n))
}

/// Possible absolute sums of a four-factor interaction column.
pub fn j4_value_set(n: usize) -> BTreeSet<u64> {
    let n = order(n) as u64;
    if n.is_multiple_of(4) {
        (2..=n / 2).map(|lambda| 4 * n - 8 * lambda).collect()
    } else {
        (0..=(n - 6) / 4).flat_map(|lambda| [16 * lambda, 4 * n - 16 * (lambda + 1)]).collect()
    }
}

/// Possible absolute correlations of two interactions on four distinct
/// factors, in descending order.
pub fn tfi_disjoint_value_set_exact(n: usize) -> Vec<Rational> {
    let n = order(n);
    let mut values: Vec<Rational> = if n % 4 == 0 {
        (2..=n / 2).map(|lambda| Rational::new(n - 2 * lambda, n - 2)).collect()
    } else {
        (0..=(n - 6) / 4)
            .flat_map(|lambda| [Rational::new(4 * lambda, n - 2), Rational::new(n - 4 * (lambda + 1), n - 2)])
            .collect()
    };
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.dedup();
    values
}

pub fn tfi_disjoint_value_set(n: usize) -> Vec<f64> {
    tfi_disjoint_value_set_exact(n).into_iter().map(to_f64).collect()
}

/// Nonzero absolute interaction-pair correlations of a concatenated design,
/// shared and disjoint together, in descending order.
pub fn interaction_value_set_exact(n: usize) -> Vec<Rational> {
    let mut values = tfi_disjoint_value_set_exact(n);
    values.retain(|v| *v.numer() != 0);
    values.push(tfi_shared_corr_exact(n));
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.dedup();
    values
}

pub fn interaction_value_set(n: usize) -> Vec<f64> {
    interaction_value_set_exact(n).into_iter().map(to_f64).collect()
}

/// Number of nonzero entries in any interaction column of the body of a
/// concatenated design (the common denominator of its interaction correlations).
pub fn interaction_scale(n: usize) -> u64 {
    4 * order(n) as u64 - 8
}
