#![allow(dead_code)]

use comars::designs::{brute_force_conference, foldover, paley_conference, ConferenceDesign, ScreeningDesign};
use ndarray::Array2;

/// An `n`-run conference design: Paley when `n - 1` is prime, else the first
/// design the exhaustive search finds.
pub fn conference(n: usize) -> ConferenceDesign {
    match paley_conference((n - 1) as u64) {
        Ok(c) => c,
        Err(_) => brute_force_conference(n, n).unwrap().remove(0),
    }
}

/// DSD body on the first `m` columns of an `n`-run conference design.
pub fn body(n: usize, m: usize) -> ScreeningDesign {
    foldover(&conference(n).first_columns(m).unwrap())
}

/// Exact Pearson correlation as (numerator, denominator²) in integers.
pub fn exact_corr(u: &[i64], v: &[i64]) -> (i128, i128) {
    let n = u.len() as i128;
    let su: i128 = u.iter().map(|&x| x as i128).sum();
    let sv: i128 = v.iter().map(|&x| x as i128).sum();
    let suv: i128 = u.iter().zip(v).map(|(&a, &b)| (a * b) as i128).sum();
    let suu: i128 = u.iter().map(|&a| (a * a) as i128).sum();
    let svv: i128 = v.iter().map(|&b| (b * b) as i128).sum();
    (n * suv - su * sv, (n * suu - su * su) * (n * svv - sv * sv))
}

pub fn column(d: &Array2<i8>, f: impl Fn(&[i64]) -> i64) -> Vec<i64> {
    d.rows()
        .into_iter()
        .map(|r| {
            let row: Vec<i64> = r.iter().map(|&x| i64::from(x)).collect();
            f(&row)
        })
        .collect()
}
