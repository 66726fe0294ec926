//! Conference designs, their foldovers (screening designs without a center
//! run), and concatenations of two foldovers plus center runs.

mod conference;
mod csv;
pub mod data;

use ndarray::{concatenate as stack, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;

pub use self::conference::{
    brute_force_conference, paley_conference, validate_conference, ConferenceDesign, BRUTE_FORCE_LIMIT, MIN_FACTORS,
};
pub use self::csv::{format_design, load_conference_csv, load_design_csv, parse_design, save_csv};
use crate::error::{Error, Result};

/// A conference design stacked over its negation: `2n` runs, two zeros per
/// column, and row `i + n` equal to minus row `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreeningDesign {
    parent: ConferenceDesign,
    entries: Array2<i8>,
}

impl ScreeningDesign {
    pub fn parent(&self) -> &ConferenceDesign {
        &self.parent
    }

    pub fn entries(&self) -> ArrayView2<'_, i8> {
        self.entries.view()
    }

    pub fn runs(&self) -> usize {
        self.entries.nrows()
    }

    pub fn factors(&self) -> usize {
        self.entries.ncols()
    }

    /// Run count of the parent conference design.
    pub fn parent_runs(&self) -> usize {
        self.parent.runs()
    }

    /// The body plus `n0` center runs.
    pub fn with_center_runs(&self, n0: usize) -> Array2<i8> {
        let center = Array2::zeros((n0, self.factors()));
        stack(Axis(0), &[self.entries.view(), center.view()]).expect("equal widths")
    }
}

pub fn foldover(c: &ConferenceDesign) -> ScreeningDesign {
    let top = c.entries();
    let bottom = top.mapv(|v| -v);
    let entries = stack(Axis(0), &[top, bottom.view()]).expect("equal widths");
    ScreeningDesign { parent: c.clone(), entries }
}

/// A column permutation plus per-column folds applied to the lower parent.
/// Column `j` of the transformed design is `signs[j]` times column `perm[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LowerState {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl LowerState {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let m = perm.len();
        if signs.len() != m {
            return Err(Error::DimensionMismatch { expected: format!("{m} signs"), found: signs.len().to_string() });
        }
        let mut seen = vec![false; m];
        for &p in &perm {
            if p >= m || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidState(format!("lower state {perm:?} is not a permutation")));
            }
        }
        if let Some(s) = signs.iter().find(|s| s.abs() != 1) {
            return Err(Error::InvalidState(format!("lower-state sign {s} is not +1 or -1")));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(m: usize) -> Self {
        Self { perm: (0..m).collect(), signs: vec![1; m] }
    }

    /// Uniform permutation and independent uniform signs.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(rng);
        let signs = (0..m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        Self { perm, signs }
    }

    pub fn factors(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Folds over the column in position `j`.
    pub fn flip(&mut self, j: usize) {
        self.signs[j] = -self.signs[j];
    }

    /// Exchanges the columns in positions `j` and `k`.
    pub fn swap(&mut self, j: usize, k: usize) {
        self.perm.swap(j, k);
        self.signs.swap(j, k);
    }

    /// Moves the column at `a` to `b`, `b` to `c`, and `c` to `a`.
    pub fn rotate3(&mut self, a: usize, b: usize, c: usize) {
        // Two transpositions compose to the 3-cycle.
        self.swap(a, b);
        self.swap(a, c);
    }

    /// Same state with every sign flipped.
    pub fn negated(&self) -> Self {
        Self { perm: self.perm.clone(), signs: self.signs.iter().map(|s| -s).collect() }
    }
}

pub fn apply_lower_state(d: &ScreeningDesign, s: &LowerState) -> Result<ScreeningDesign> {
    if s.factors() != d.factors() {
        return Err(Error::DimensionMismatch {
            expected: format!("state over {} factors", d.factors()),
            found: s.factors().to_string(),
        });
    }
    Ok(foldover(&d.parent.permute_and_fold(&s.perm, &s.signs)))
}

/// Two foldovers stacked over `n0` center runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComarsDesign {
    upper: ScreeningDesign,
    lower: ScreeningDesign,
    n0: usize,
    entries: Array2<i8>,
}

impl ComarsDesign {
    pub fn upper(&self) -> &ScreeningDesign {
        &self.upper
    }

    /// The lower parent after its state was applied.
    pub fn lower(&self) -> &ScreeningDesign {
        &self.lower
    }

    pub fn center_runs(&self) -> usize {
        self.n0
    }

    /// Run count `n` of the parent conference designs.
    pub fn parent_runs(&self) -> usize {
        self.upper.parent_runs()
    }

    pub fn runs(&self) -> usize {
        self.entries.nrows()
    }

    pub fn factors(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> ArrayView2<'_, i8> {
        self.entries.view()
    }

    /// Checks the zero-count law: trailing center rows are zero, every column
    /// has `4 + n0` zeros, and every product of two columns has `8 + n0`.
    pub fn verify_structure(&self) -> Result<()> {
        let (runs, m) = self.entries.dim();
        let body = runs - self.n0;
        if self.entries.slice(ndarray::s![body.., ..]).iter().any(|&v| v != 0) {
            return Err(Error::InvalidState("center runs are not all zero".into()));
        }
        for j in 0..m {
            let zeros = self.entries.column(j).iter().filter(|&&v| v == 0).count();
            if zeros != 4 + self.n0 {
                return Err(Error::InvalidState(format!("column {} has {zeros} zeros", j + 1)));
            }
            for k in j + 1..m {
                let zeros =
                    self.entries.column(j).iter().zip(self.entries.column(k)).filter(|(&a, &b)| a * b == 0).count();
                if zeros != 8 + self.n0 {
                    return Err(Error::InvalidState(format!("interaction {}x{} has {zeros} zeros", j + 1, k + 1)));
                }
            }
        }
        Ok(())
    }
}

pub fn concatenate(d1: &ScreeningDesign, d2: &ScreeningDesign, s: &LowerState, n0: usize) -> Result<ComarsDesign> {
    if d1.entries.dim() != d2.entries.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", d1.entries.dim()),
            found: format!("{:?}", d2.entries.dim()),
        });
    }
    let lower = apply_lower_state(d2, s)?;
    let center = Array2::zeros((n0, d1.factors()));
    let entries = stack(Axis(0), &[d1.entries.view(), lower.entries.view(), center.view()]).expect("equal widths");
    Ok(ComarsDesign { upper: d1.clone(), lower, n0, entries })
}

/// The smallest parent for `m` factors: the `m`-column prefix of a conference
/// design with `m` runs (even `m`) or `m + 1` runs (odd `m`).
pub fn smallest_parent(conference: &ConferenceDesign, m: usize) -> Result<ScreeningDesign> {
    let expected = m + m % 2;
    if conference.runs() != expected {
        return Err(Error::DimensionMismatch {
            expected: format!("{expected}-run conference design for {m} factors"),
            found: format!("{} runs", conference.runs()),
        });
    }
    Ok(foldover(&conference.first_columns(m)?))
}

/// Reads a screening design from a matrix that is exactly a foldover.
pub fn screening_from_entries(entries: ArrayView2<'_, i8>) -> Result<ScreeningDesign> {
    let runs = entries.nrows();
    if !runs.is_multiple_of(2) {
        return Err(Error::OddRunCount(runs));
    }
    let half = runs / 2;
    let top = entries.slice(ndarray::s![..half, ..]);
    let bottom = entries.slice(ndarray::s![half.., ..]);
    if top.mapv(|v| -v) != bottom {
        return Err(Error::InvalidState("matrix is not a foldover".into()));
    }
    Ok(foldover(&validate_conference(top.to_owned())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn body7() -> ScreeningDesign {
        smallest_parent(&paley_conference(7).unwrap(), 7).unwrap()
    }

    fn sorted_rows(a: ArrayView2<'_, i8>) -> Vec<Vec<i8>> {
        let mut rows: Vec<Vec<i8>> = a.rows().into_iter().map(|r| r.to_vec()).collect();
        rows.sort();
        rows
    }

    #[test]
    fn foldover_structure() {
        let d = foldover(&paley_conference(7).unwrap());
        assert_eq!(d.entries().dim(), (16, 8));
        for j in 0..8 {
            assert_eq!(d.entries().column(j).iter().filter(|&&v| v == 0).count(), 2);
        }
        for i in 0..8 {
            let sum = &d.entries().row(i) + &d.entries().row(i + 8);
            assert!(sum.iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn seven_factor_body_with_center_run_has_33_runs() {
        let d = body7();
        assert_eq!(d.entries().dim(), (16, 7));
        assert_eq!(d.with_center_runs(1).nrows(), 17);
        let c = concatenate(&d, &d, &LowerState::identity(7), 1).unwrap();
        assert_eq!(c.runs(), 33);
    }

    #[test]
    fn identity_state_is_a_no_op() {
        let d = body7();
        assert_eq!(apply_lower_state(&d, &LowerState::identity(7)).unwrap(), d);
    }

    #[test]
    fn negating_all_columns_exchanges_the_row_blocks() {
        let d = body7();
        let flipped = apply_lower_state(&d, &LowerState::identity(7).negated()).unwrap();
        assert_ne!(flipped.entries(), d.entries());
        assert_eq!(sorted_rows(flipped.entries()), sorted_rows(d.entries()));
    }

    #[test]
    fn swapping_positions_exchanges_columns() {
        let d = body7();
        let mut s = LowerState::identity(7);
        s.swap(0, 1);
        let out = apply_lower_state(&d, &s).unwrap();
        assert_eq!(out.entries().column(0), d.entries().column(1));
        assert_eq!(out.entries().column(1), d.entries().column(0));
        assert_eq!(out.entries().column(2), d.entries().column(2));
    }

    #[test]
    fn state_validation() {
        assert!(LowerState::new(vec![0, 1, 1], vec![1, 1, 1]).is_err());
        assert!(LowerState::new(vec![0, 1, 3], vec![1, 1, 1]).is_err());
        assert!(LowerState::new(vec![0, 1, 2], vec![1, 1]).is_err());
        assert!(LowerState::new(vec![0, 1, 2], vec![1, 0, 1]).is_err());
        assert!(LowerState::new(vec![2, 0, 1], vec![1, -1, 1]).is_ok());
        let d = body7();
        assert!(matches!(apply_lower_state(&d, &LowerState::identity(6)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rotate3_has_order_three() {
        let mut s = LowerState::identity(7);
        s.rotate3(1, 4, 6);
        assert_eq!(s.perm(), &[0, 6, 2, 3, 1, 5, 4]);
        s.rotate3(1, 4, 6);
        s.rotate3(1, 4, 6);
        assert_eq!(s, LowerState::identity(7));
    }

    #[test]
    fn concatenation_zero_counts_and_run_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [5u64, 7, 11, 13] {
            let c = paley_conference(p).unwrap();
            let n = c.runs();
            for m in [n - 1, n] {
                if m % 2 == 0 && m != n {
                    continue;
                }
                let d = smallest_parent(&c, m).unwrap();
                for n0 in [0usize, 1, 3] {
                    let s = LowerState::random(m, &mut rng);
                    let comars = concatenate(&d, &d, &s, n0).unwrap();
                    let expected = if m % 2 == 0 { 4 * m } else { 4 * (m + 1) } + n0;
                    assert_eq!(comars.runs(), expected);
                    comars.verify_structure().unwrap();
                }
            }
        }
    }

    #[test]
    fn concatenate_rejects_mismatched_parents() {
        let d7 = body7();
        let d8 = foldover(&paley_conference(7).unwrap());
        assert!(matches!(concatenate(&d7, &d8, &LowerState::identity(7), 1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn smallest_parent_checks_order() {
        let c12 = paley_conference(11).unwrap();
        assert!(smallest_parent(&c12, 11).is_ok());
        assert!(smallest_parent(&c12, 12).is_ok());
        assert!(smallest_parent(&c12, 9).is_err());
    }

    #[test]
    fn screening_round_trip() {
        let d = body7();
        assert_eq!(screening_from_entries(d.entries()).unwrap(), d);
        let c = concatenate(&d, &d, &LowerState::identity(7), 0).unwrap();
        assert!(screening_from_entries(c.entries()).is_err());
    }
}
