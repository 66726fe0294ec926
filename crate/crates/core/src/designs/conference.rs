//! Conference designs: validation, the Paley construction, and a small-order
//! backtracking generator used as an independent source of designs.

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result, ZeroFault};

/// Smallest factor count the aliasing results are stated for.
pub const MIN_FACTORS: usize = 5;

/// Number of designs `brute_force_conference` returns at most.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// An `n x m` matrix over {-1, 0, +1} with orthogonal columns, exactly one zero
/// per column and at most one zero per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConferenceDesign {
    entries: Array2<i8>,
}

impl ConferenceDesign {
    pub fn runs(&self) -> usize {
        self.entries.nrows()
    }

    pub fn factors(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> ArrayView2<'_, i8> {
        self.entries.view()
    }

    pub fn into_entries(self) -> Array2<i8> {
        self.entries
    }

    /// Keeps the first `m` columns. Deleting columns preserves every conference
    /// design property, so only the factor-count bounds can fail.
    pub fn first_columns(&self, m: usize) -> Result<ConferenceDesign> {
        if m > self.factors() {
            return Err(Error::FactorsExceedRuns { factors: m, runs: self.runs() });
        }
        if m < MIN_FACTORS {
            return Err(Error::TooFewFactors(m));
        }
        let entries = self.entries.slice(ndarray::s![.., ..m]).to_owned();
        Ok(ConferenceDesign { entries })
    }

    /// Applies a column permutation and per-column sign changes:
    /// column `j` of the result is `signs[j]` times column `perm[j]`.
    pub(crate) fn permute_and_fold(&self, perm: &[usize], signs: &[i8]) -> ConferenceDesign {
        let mut entries = Array2::zeros(self.entries.raw_dim());
        for (j, (&src, &sign)) in perm.iter().zip(signs).enumerate() {
            let column = self.entries.column(src).mapv(|v| v * sign);
            entries.column_mut(j).assign(&column);
        }
        ConferenceDesign { entries }
    }
}

pub(crate) fn check_domain(matrix: ArrayView2<'_, i8>) -> Result<()> {
    for ((row, column), &value) in matrix.indexed_iter() {
        if !(-1..=1).contains(&value) {
            return Err(Error::EntryOutOfDomain { row, column, value: value.into() });
        }
    }
    Ok(())
}

fn inner_product(a: ndarray::ArrayView1<'_, i8>, b: ndarray::ArrayView1<'_, i8>) -> i64 {
    a.iter().zip(b.iter()).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum()
}

/// Checks every conference-design invariant and wraps the matrix.
///
/// Checks run in a fixed order (entry domain, factor count, run parity,
/// shape, orthogonality, zero pattern) and the error names the first
/// violating column or row.
pub fn validate_conference(matrix: Array2<i8>) -> Result<ConferenceDesign> {
    check_domain(matrix.view())?;
    let (n, m) = matrix.dim();
    if m < MIN_FACTORS {
        return Err(Error::TooFewFactors(m));
    }
    if n % 2 != 0 {
        return Err(Error::OddRunCount(n));
    }
    if m > n {
        return Err(Error::FactorsExceedRuns { factors: m, runs: n });
    }
    for a in 0..m {
        for b in a + 1..m {
            let inner = inner_product(matrix.column(a), matrix.column(b));
            if inner != 0 {
                return Err(Error::NonOrthogonalColumns { columns: (a, b), inner });
            }
        }
    }
    if let Some(fault) = zero_fault(matrix.view()) {
        return Err(Error::BadZeroPattern(fault));
    }
    Ok(ConferenceDesign { entries: matrix })
}

fn zero_fault(matrix: ArrayView2<'_, i8>) -> Option<ZeroFault> {
    for (column, col) in matrix.axis_iter(Axis(1)).enumerate() {
        let zeros = col.iter().filter(|&&v| v == 0).count();
        if zeros != 1 {
            return Some(ZeroFault::Column { column, zeros });
        }
    }
    for (row, r) in matrix.axis_iter(Axis(0)).enumerate() {
        let mut zero_columns = r.iter().enumerate().filter(|(_, &v)| v == 0).map(|(j, _)| j);
        if let (Some(first), Some(second)) = (zero_columns.next(), zero_columns.next()) {
            return Some(ZeroFault::Row { row, columns: (first, second) });
        }
    }
    None
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Quadratic character of `a` modulo the odd prime `p`.
fn legendre(a: i64, p: i64) -> i8 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut result = 1i64;
    let mut base = a;
    let mut exp = (p - 1) / 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

/// Paley conference matrix of order `p + 1` for an odd prime `p`.
///
/// The core is the Jacobsthal matrix `Q[i][j] = chi(j - i)`, bordered by a zero
/// corner, a row of ones, and a column of ones (symmetric, `p = 1 mod 4`) or
/// minus ones (skew, `p = 3 mod 4`).
pub fn paley_conference(p: u64) -> Result<ConferenceDesign> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let q = p as usize;
    let n = q + 1;
    let border: i8 = if p % 4 == 1 { 1 } else { -1 };
    let mut entries = Array2::<i8>::zeros((n, n));
    for j in 1..n {
        entries[[0, j]] = 1;
        entries[[j, 0]] = border;
    }
    for i in 0..q {
        for j in 0..q {
            entries[[i + 1, j + 1]] = legendre(j as i64 - i as i64, p as i64);
        }
    }
    validate_conference(entries)
}

/// Backtracking search for `n x m` conference designs with `n` in {6, 8, 10}.
///
/// Rows are normalized so that column `k` has its zero in row `k`, the first
/// column reads `(0, +1, ..., +1)`, and every later column starts with `+1`.
/// Any conference design is equivalent to one of this form under row
/// permutations, row negations and column negations. Up to
/// [`BRUTE_FORCE_LIMIT`] designs are returned in the order they are found.
pub fn brute_force_conference(n: usize, m: usize) -> Result<Vec<ConferenceDesign>> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddRunCount(n));
    }
    if !(6..=10).contains(&n) {
        return Err(Error::DimensionMismatch { expected: "run count in {6, 8, 10}".into(), found: n.to_string() });
    }
    if m < MIN_FACTORS {
        return Err(Error::TooFewFactors(m));
    }
    if m > n {
        return Err(Error::FactorsExceedRuns { factors: m, runs: n });
    }

    let mut search = Search { n, m, columns: Vec::with_capacity(m), found: Vec::new() };
    let mut first = vec![1i8; n];
    first[0] = 0;
    search.columns.push(first);
    search.extend();

    if search.found.is_empty() {
        return Err(Error::NoneFound { runs: n, factors: m });
    }
    search
        .found
        .into_iter()
        .map(|columns| {
            let entries = Array2::from_shape_fn((n, m), |(i, j)| columns[j][i]);
            validate_conference(entries)
        })
        .collect()
}

struct Search {
    n: usize,
    m: usize,
    columns: Vec<Vec<i8>>,
    found: Vec<Vec<Vec<i8>>>,
}

impl Search {
    fn extend(&mut self) {
        if self.found.len() >= BRUTE_FORCE_LIMIT {
            return;
        }
        let k = self.columns.len();
        if k == self.m {
            self.found.push(self.columns.clone());
            return;
        }
        // Free rows exclude row 0 (fixed +1) and row k (the zero).
        let free: Vec<usize> = (1..self.n).filter(|&r| r != k).collect();
        for bits in 0u32..(1 << free.len()) {
            let mut column = vec![0i8; self.n];
            column[0] = 1;
            for (b, &r) in free.iter().enumerate() {
                column[r] = if bits >> b & 1 == 1 { -1 } else { 1 };
            }
            let orthogonal = self
                .columns
                .iter()
                .all(|prev| prev.iter().zip(&column).map(|(&x, &y)| i32::from(x) * i32::from(y)).sum::<i32>() == 0);
            if orthogonal {
                self.columns.push(column);
                self.extend();
                self.columns.pop();
                if self.found.len() >= BRUTE_FORCE_LIMIT {
                    return;
                }
            }
        }
    }
}
