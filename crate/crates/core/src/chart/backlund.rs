//! The links of the Bäcklund chart: `v = y^2`, the Schwarzian form, the map
//! `Y^2 = y^2(f) / f'` and its auto-Bäcklund certificate.

use super::domain::{admissible_subinterval, Interval, DOMAIN_SAMPLES};
use super::solution::SolutionEvaluator;
use super::structure::StructureFunction;
use crate::error::{Error, Result};
use crate::jetcalc::{Expr, Jet, CRITICAL_THRESHOLD};

/// Builds `Y(z) = y0(f(z)) / sqrt(f'(z))` on `domain`.
///
/// `f` is checked at [`DOMAIN_SAMPLES`] points of `domain`: `f'` must be
/// positive and `f` must land inside `y0`'s domain. Jets of `Y` are obtained
/// by composing the jet of `y0` with the jet of `f`.
pub fn backlund_b2(y0: &SolutionEvaluator, f: &Expr, domain: Interval) -> Result<SolutionEvaluator> {
    for z in domain.linspace(DOMAIN_SAMPLES)? {
        let fj = f.jet(z, 1)?;
        if !(fj.d(1) > 0.0) {
            return Err(Error::NegativeDerivative { at: z, value: fj.d(1) });
        }
        if !y0.domain().contains(fj.value()) {
            return Err(Error::DomainEscape {
                at: z,
                image: fj.value(),
            });
        }
    }
    Ok(SolutionEvaluator::backlund(y0, f.clone(), domain))
}

/// [`backlund_b2`] on the largest part of `requested` where the transformed
/// solution can be evaluated to second order.
pub fn backlund_b2_within(y0: &SolutionEvaluator, f: &Expr, requested: Interval) -> Result<SolutionEvaluator> {
    let candidate = SolutionEvaluator::backlund(y0, f.clone(), requested);
    let domain = admissible_subinterval(requested, |z| candidate.jet(z, 2).map(|_| ()))?;
    backlund_b2(y0, f, domain)
}

/// Residuals of `y y'' = F(z, y^2)` and of its image under `v = y^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma1Residuals {
    /// `y y'' - F(z, y^2)`
    pub r_eq: f64,
    /// `v'' v - ½ (v')^2 - 2 v F(z, v)`, identically `2 y^2 r_eq`.
    pub r_v: f64,
    /// Magnitude of the largest term entering `r_v`.
    pub scale_v: f64,
}

pub fn lemma1_residuals<F: StructureFunction + ?Sized>(y: &Jet, f: &F) -> Result<Lemma1Residuals> {
    if y.order() < 2 {
        return Err(Error::InsufficientOrder {
            have: y.order(),
            need: 2,
        });
    }
    let z = y.point();
    let (y0, y1, y2) = (y.value(), y.d(1), y.d(2));
    if !(y0 > 0.0) {
        return Err(Error::domain("y must be positive", z));
    }
    let v = y0 * y0;
    let dv = 2.0 * y0 * y1;
    let d2v = 2.0 * y1 * y1 + 2.0 * y0 * y2;
    let fv = f.eval(z, v)?;
    let terms = [d2v * v, 0.5 * dv * dv, 2.0 * v * fv];
    Ok(Lemma1Residuals {
        r_eq: y0 * y2 - fv,
        r_v: terms[0] - terms[1] - terms[2],
        scale_v: terms.iter().fold(0.0f64, |m, t| m.max(t.abs())),
    })
}

/// `{phi, t} - 2 phi_t F(phi, phi_t)`.
pub fn schwarzian_form_residual<F: StructureFunction + ?Sized>(phi: &Jet, f: &F) -> Result<f64> {
    let s = phi.schwarzian()?;
    let (x, v) = (phi.value(), phi.d(1));
    Ok(s - 2.0 * v * f.eval(x, v)?)
}

/// `F(z, v) - f' F(f, f' v) + ½ {f, z} v`; vanishes identically in `(z, v)`
/// exactly when `Y^2 = y^2(f)/f'` maps the equation to itself.
pub fn fde_residual<F: StructureFunction + ?Sized>(f_rhs: &F, f: &Expr, z: f64, v: f64) -> Result<f64> {
    fde_terms(f_rhs, f, z, v).map(|t| t.residual)
}

/// Residual of the auto-Bäcklund condition with its normalization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdeTerms {
    pub residual: f64,
    /// `F(z, v)`
    pub value: f64,
}

impl FdeTerms {
    /// `|residual| / (1 + |F(z, v)|)`.
    pub fn relative(&self) -> f64 {
        self.residual.abs() / (1.0 + self.value.abs())
    }
}

pub fn fde_terms<F: StructureFunction + ?Sized>(f_rhs: &F, f: &Expr, z: f64, v: f64) -> Result<FdeTerms> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("v = {v} must be positive"), z));
    }
    let fj = f.jet(z, 3)?;
    let fp = fj.d(1);
    if fp.abs() < CRITICAL_THRESHOLD {
        return Err(Error::CriticalPoint { at: z, derivative: fp });
    }
    let s = fj.schwarzian()?;
    let value = f_rhs.eval(z, v)?;
    let image = f_rhs.eval(fj.value(), fp * v)?;
    Ok(FdeTerms {
        residual: value - fp * image + 0.5 * s * v,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{PowerTerm, StructureF, TransportedF};
    use crate::jetcalc::jet_eval;

    fn z() -> Expr {
        Expr::var()
    }

    #[test]
    fn identity_map_certifies_anything() {
        let f = StructureF::new(
            vec![PowerTerm::new(3, 2.0, z().powi(2)), PowerTerm::new(-1, -1.0, z())],
            Some((0.5 * z()).exp() + z()),
        )
        .unwrap();
        for (zz, v) in [(0.5, 1.0), (1.3, 0.2), (2.0, 4.0)] {
            assert_eq!(fde_residual(&f, &z(), zz, v).unwrap(), 0.0);
        }
    }

    #[test]
    fn b2_with_identity_reproduces_seed() {
        let y0 = SolutionEvaluator::closed(z() * z() + 1.0, Interval::real_line());
        let d = Interval::new(-1.0, 2.0).unwrap();
        let y = backlund_b2(&y0, &z(), d).unwrap();
        for x in d.linspace(7).unwrap() {
            let (a, b) = (y.jet(x, 3).unwrap(), y0.jet(x, 3).unwrap());
            assert_eq!(a.coeffs(), b.coeffs());
        }
    }

    #[test]
    fn b2_of_square_under_moebius() {
        // y0 = z^2, f = z/(z+1) -> Y = z^2/(z+1)
        let y0 = SolutionEvaluator::closed(z() * z(), Interval::positive());
        let f = z() / (z() + 1.0);
        let d = Interval::new(0.1, 5.0).unwrap();
        let y = backlund_b2(&y0, &f, d).unwrap();
        let want = z() * z() / (z() + 1.0);
        for x in d.linspace(11).unwrap() {
            let a = y.jet(x, 3).unwrap();
            let b = jet_eval(&want, x, 3).unwrap();
            for (p, q) in a.coeffs().iter().zip(b.coeffs()) {
                assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()), "{x}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn b2_guards() {
        let y0 = SolutionEvaluator::closed(z() * z(), Interval::positive());
        let d = Interval::new(0.5, 1.0).unwrap();
        assert!(matches!(
            backlund_b2(&y0, &(-1.0 * z() + 3.0), d),
            Err(Error::NegativeDerivative { .. })
        ));
        assert!(matches!(
            backlund_b2(&y0, &(z() - 2.0), d),
            Err(Error::DomainEscape { .. })
        ));
    }

    #[test]
    fn lemma1_constant_solution() {
        let zero = |_: f64, _: f64| Ok(0.0);
        let r = lemma1_residuals(&Jet::constant(0.3, 1.0, 2), &zero).unwrap();
        assert_eq!((r.r_eq, r.r_v), (0.0, 0.0));
    }

    #[test]
    fn lemma1_identity_for_non_solution() {
        let f = StructureF::new(vec![PowerTerm::new(-1, -1.0, z())], Some((2.0 * z()).exp())).unwrap();
        let y = jet_eval(&z(), 1.0, 3).unwrap();
        let r = lemma1_residuals(&y, &f).unwrap();
        let v = 1.0;
        assert!((r.r_v - 2.0 * v * r.r_eq).abs() <= 1e-12 * (1.0 + r.scale_v));
    }

    #[test]
    fn schwarzian_form_for_moebius_and_zero_f() {
        let zero = |_: f64, _: f64| Ok(0.0);
        let phi = jet_eval(&((2.0 * z() + 1.0) / (z() + 3.0)), 0.4, 3).unwrap();
        assert!(schwarzian_form_residual(&phi, &zero).unwrap().abs() < 1e-12);
    }

    #[test]
    fn schwarzian_form_for_linear_structure() {
        // F(z, v) = -½{e^{2z}, z} v = v; phi(t) = -½ ln(-2t) solves {phi,t} = 2 phi_t^2.
        let f = StructureF::new(vec![], Some((2.0 * z()).exp())).unwrap();
        let phi = -0.5 * (-2.0 * z()).ln();
        for t in [-3.0, -1.0, -0.2] {
            let j = jet_eval(&phi, t, 3).unwrap();
            assert!(schwarzian_form_residual(&j, &f).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn schwarzian_form_transport_under_composition() {
        let f = StructureF::new(vec![PowerTerm::new(2, 0.3, z())], Some(z().exp() + z())).unwrap();
        let g = z() + 0.2 * z().powi(3);
        let psi = (0.7 * z()).sin() + 1.5;
        let tilde = TransportedF::new(f.clone(), g.clone());
        for t in [0.1, 0.6, 1.1] {
            let psi_j = jet_eval(&psi, t, 3).unwrap();
            let phi_j = jet_eval(&g.substitute(&psi), t, 3).unwrap();
            let r_phi = schwarzian_form_residual(&phi_j, &f).unwrap();
            let r_psi = schwarzian_form_residual(&psi_j, &tilde).unwrap();
            assert!((r_phi - r_psi).abs() <= 1e-10 * (1.0 + r_phi.abs()));
        }
    }

    #[test]
    fn fde_requires_positive_v_and_regular_f() {
        let zero = |_: f64, _: f64| Ok(0.0);
        assert!(fde_residual(&zero, &z(), 1.0, 0.0).is_err());
        assert!(matches!(
            fde_residual(&zero, &Expr::constant(2.0), 1.0, 1.0),
            Err(Error::CriticalPoint { .. })
        ));
    }
}
