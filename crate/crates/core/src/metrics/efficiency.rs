//! D-criterion for the model with the intercept, all linear effects, and all
//! quadratic effects.

use nalgebra::DMatrix;
use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// `XᵀX` for `X = [1 | x_i | x_i²]`, with `2m + 1` columns.
pub fn information_matrix(d: ArrayView2<'_, i8>) -> DMatrix<f64> {
    let (runs, m) = d.dim();
    let p = 2 * m + 1;
    let x = DMatrix::from_fn(runs, p, |i, j| match j {
        0 => 1.0,
        j if j <= m => f64::from(d[[i, j - 1]]),
        j => f64::from(d[[i, j - 1 - m]] * d[[i, j - 1 - m]]),
    });
    x.transpose() * x
}

/// Natural log of `det(XᵀX)`.
pub fn log_det_information(d: ArrayView2<'_, i8>) -> Result<f64> {
    let info = information_matrix(d);
    let chol = info.cholesky().ok_or(Error::SingularInformation)?;
    let log_det: f64 = chol.l_dirty().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
    if !log_det.is_finite() {
        return Err(Error::SingularInformation);
    }
    Ok(log_det)
}

/// `det(XᵀX)^(1/p) / N` with `p = 2m + 1`.
pub fn d_criterion(d: ArrayView2<'_, i8>) -> Result<f64> {
    let p = (2 * d.ncols() + 1) as f64;
    Ok((log_det_information(d)? / p).exp() / d.nrows() as f64)
}

/// D-efficiency of design `a` relative to design `b` with the determinant
/// ratio normalized per factor: `(det(XaᵀXa) / det(XbᵀXb))^(1/m)`.
///
/// Both designs must have the same number of factors. For equal run sizes the
/// per-parameter ratio of [`d_criterion`] values is the same determinant
/// ratio taken to the power `1/(2m+1)` instead.
pub fn relative_d_efficiency(a: ArrayView2<'_, i8>, b: ArrayView2<'_, i8>) -> Result<f64> {
    if a.ncols() != b.ncols() {
        return Err(Error::FactorMismatch(a.ncols(), b.ncols()));
    }
    let m = a.ncols() as f64;
    Ok(((log_det_information(a)? - log_det_information(b)?) / m).exp())
}

/// Diagonal of `(XᵀX)⁻¹` at the quadratic effects: their least-squares
/// variances in units of the error variance.
pub fn quadratic_variances(d: ArrayView2<'_, i8>) -> Result<Vec<f64>> {
    let m = d.ncols();
    let inverse = information_matrix(d).cholesky().ok_or(Error::SingularInformation)?.inverse();
    Ok((0..m).map(|i| inverse[(m + 1 + i, m + 1 + i)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, concatenate, Axis};

    #[test]
    fn singular_when_quadratics_are_constant() {
        let d = array![[1i8, -1, 1, 1, -1], [-1, 1, 1, -1, -1], [1, 1, -1, -1, 1], [-1, -1, -1, 1, 1]];
        assert!(matches!(d_criterion(d.view()), Err(Error::SingularInformation)));
    }

    #[test]
    fn duplicating_runs_leaves_the_criterion_unchanged() {
        let d = crate::designs::data::table2();
        let doubled = concatenate(Axis(0), &[d.view(), d.view()]).unwrap();
        let p = 15.0;
        let base = log_det_information(d.view()).unwrap();
        let twice = log_det_information(doubled.view()).unwrap();
        // XᵀX doubles, so det scales by 2^p.
        assert!((twice - base - p * 2f64.ln()).abs() < 1e-9);
        let ratio = d_criterion(doubled.view()).unwrap() / d_criterion(d.view()).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_efficiency_rejects_factor_mismatch() {
        let d = crate::designs::data::table2();
        let narrow = d.slice(ndarray::s![.., ..6]).to_owned();
        assert!(matches!(relative_d_efficiency(d.view(), narrow.view()), Err(Error::FactorMismatch(7, 6))));
        assert!((relative_d_efficiency(d.view(), d.view()).unwrap() - 1.0).abs() < 1e-12);
    }
}
