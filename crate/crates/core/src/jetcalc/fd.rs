//! Central-difference derivative estimates, used only as an independent
//! cross-check of the jet arithmetic.

use super::jet::Jet;
use crate::error::{Error, Result};

/// Default step of the finite-difference oracle.
pub const FD_STEP: f64 = 1e-3;

/// Mixed tolerance for comparing oracle and jet derivatives:
/// `|a - b| <= FD_TOLERANCE * max(1, |b|)`.
pub const FD_TOLERANCE: f64 = 1e-5;

/// Estimates `(f, f', f'', f''')` at `z` from samples on `[z - 3h, z + 3h]`.
///
/// f' uses the 3-point stencil with one Richardson step (h, h/2); f'' the
/// 5-point and f''' the 7-point fourth-order stencils at step `h`.
pub fn fd_derivatives<F>(f: F, z: f64, h: f64) -> Result<Jet>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step h = {h} must be positive")));
    }
    let at = |k: f64| f(z + k * h);
    let (m3, m2, m1, f0, p1, p2, p3) = (at(-3.0)?, at(-2.0)?, at(-1.0)?, at(0.0)?, at(1.0)?, at(2.0)?, at(3.0)?);
    let (mh, ph) = (at(-0.5)?, at(0.5)?);

    let d1_h = (p1 - m1) / (2.0 * h);
    let d1_half = (ph - mh) / h;
    let d1 = (4.0 * d1_half - d1_h) / 3.0;
    let d2 = (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h);
    let d3 = (-p3 + 8.0 * p2 - 13.0 * p1 + 13.0 * m1 - 8.0 * m2 + m3) / (8.0 * h * h * h);
    Jet::new(z, &[f0, d1, d2, d3])
}

/// True when every derivative of `a` matches `b` within `tol * max(1, |b|)`.
pub fn agrees_with(a: &Jet, b: &Jet, tol: f64) -> bool {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::{jet_eval, Expr};

    #[test]
    fn sine_at_origin() {
        let j = fd_derivatives(|x| Ok(x.sin()), 0.0, FD_STEP).unwrap();
        let want = Jet::new(0.0, &[0.0, 1.0, 0.0, -1.0]).unwrap();
        assert!(agrees_with(&j, &want, 1e-5), "{j:?}");
    }

    #[test]
    fn cubic_at_two() {
        let j = fd_derivatives(|x| Ok(x * x * x), 2.0, FD_STEP).unwrap();
        for (a, b) in j.coeffs().iter().zip([8.0, 12.0, 12.0, 6.0]) {
            assert!((a - b).abs() <= 1e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn matches_jet_of_exponential() {
        let e = (2.0 * Expr::var()).exp();
        let fd = fd_derivatives(|x| e.eval(x), 0.5, FD_STEP).unwrap();
        let exact = jet_eval(&e, 0.5, 3).unwrap();
        for (a, b) in fd.coeffs().iter().zip(exact.coeffs()) {
            assert!((a - b).abs() <= 1e-5 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_bad_step_and_propagates_failures() {
        assert!(fd_derivatives(Ok, 0.0, 0.0).is_err());
        let ln = Expr::var().ln();
        assert!(fd_derivatives(|x| ln.eval(x), 0.001, FD_STEP).is_err());
    }
}
