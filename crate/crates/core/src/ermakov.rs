//! The Ermakov-Pinney equation `y'' = Q(z) y - α / y^3` with
//! `Q(z) = p²(2k+1)² z^{4k} / 4 + k(k+1) / z²`.
//!
//! With `w = exp(p z^{2k+1})` one has `Q = -½ {w, z}`, so the equation is
//! `y y'' = F(z, y²)` for `F(z, v) = Q v - α / v`. The seed `β / z^k` is moved
//! along the family by `f = [ln M(w) / p]^{1/(2k+1)}` for a Möbius map `M`.

use crate::chart::{
    admissible_subinterval, backlund_b2_within, Interval, MoebiusMap, PowerTerm, SolutionEvaluator, StructureF,
};
use crate::error::{Error, Result};
use crate::jetcalc::{Expr, Jet};
use crate::verify::{Equation, Residual};

/// Largest `k` accepted; `z^{4k}` is already enormous well before this.
pub const MAX_K: u32 = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct ErmakovParams {
    pub alpha: f64,
    pub k: u32,
    pub p: f64,
    pub moebius: MoebiusMap,
}

impl ErmakovParams {
    pub fn new(alpha: f64, k: u32, p: f64, moebius: MoebiusMap) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {p} must be positive")));
        }
        if k > MAX_K {
            return Err(Error::InvalidParameter(format!("k = {k} exceeds {MAX_K}")));
        }
        Ok(Self { alpha, k, p, moebius })
    }

    /// Same family, different map.
    pub fn with_moebius(&self, moebius: MoebiusMap) -> Self {
        Self {
            moebius,
            ..self.clone()
        }
    }

    fn odd(&self) -> i32 {
        2 * self.k as i32 + 1
    }

    /// Positive real root of `β⁴ = 4α / (p²(2k+1)²)`.
    pub fn beta(&self) -> f64 {
        let n = self.odd() as f64;
        (4.0 * self.alpha / (self.p * self.p * n * n)).powf(0.25)
    }

    pub fn q(&self, z: f64) -> Result<f64> {
        let n = self.odd() as f64;
        let lead = 0.25 * self.p * self.p * n * n;
        if self.k == 0 {
            return Ok(lead);
        }
        if !(z > 0.0) {
            return Err(Error::domain("Q needs z > 0", z));
        }
        let k = self.k as i32;
        Ok(lead * z.powi(4 * k) + (k * (k + 1)) as f64 / (z * z))
    }

    pub fn q_expr(&self) -> Expr {
        let n = self.odd() as f64;
        let lead = 0.25 * self.p * self.p * n * n;
        if self.k == 0 {
            return Expr::constant(lead);
        }
        let k = self.k as i32;
        lead * Expr::var().powi(4 * k) + ((k * (k + 1)) as f64) * Expr::var().powi(-2)
    }

    /// `exp(p z^{2k+1})`
    pub fn w_expr(&self) -> Expr {
        (self.p * Expr::var().powi(self.odd())).exp()
    }

    /// `[ln M(w) / p]^{1/(2k+1)}`, with the signed odd root.
    pub fn f_expr(&self) -> Expr {
        let log = (1.0 / self.p) * self.moebius.apply_expr(self.w_expr()).ln();
        if self.k == 0 {
            log
        } else {
            log.root(self.odd() as u32)
        }
    }

    pub fn seed_expr(&self) -> Expr {
        let beta = self.beta();
        if self.k == 0 {
            Expr::constant(beta)
        } else {
            beta * Expr::var().powi(-(self.k as i32))
        }
    }

    pub fn seed_domain(&self) -> Interval {
        if self.k == 0 {
            Interval::real_line()
        } else {
            Interval::positive()
        }
    }

    /// `y = β z^{-k} sqrt((a w + b)(c + d / w) / Δ)`, the closed form of
    /// `y² = β² z^{-2k} (a w + b)(c w + d) / (w Δ)` that avoids forming `w²`.
    pub fn general_expr(&self) -> Expr {
        let [a, b, c, d] = self.moebius.coeffs();
        let delta = self.moebius.determinant();
        let w = self.w_expr();
        let ratio = if c == 0.0 {
            Expr::constant(a * d / delta) + (b * d / delta) / w
        } else {
            (a * w.clone() + b) * (c + d / w) / delta
        };
        self.seed_expr() * ratio.sqrt()
    }

    /// `F(z, v) = -½ {w, z} v - α / v`.
    pub fn structure(&self) -> StructureF {
        StructureF::new(vec![PowerTerm::new(-1, -self.alpha, Expr::var())], Some(self.w_expr())).expect("single term")
    }

    pub fn equation(&self) -> PinneyEquation {
        PinneyEquation { params: self.clone() }
    }

    fn guard(&self, z: f64, y: &Expr) -> Result<()> {
        if self.k > 0 && !(z > 0.0) {
            return Err(Error::domain("the family lives on z > 0", z));
        }
        let mw = self.moebius.apply(self.w_expr().eval(z)?)?;
        if !(mw > 0.0) {
            return Err(Error::domain(format!("M(w) = {mw} is not positive"), z));
        }
        let yj = y.jet(z, 2)?;
        if !(yj.value() > 0.0 && yj.is_finite()) {
            return Err(Error::domain("general solution is not positive", z));
        }
        Ok(())
    }

    /// Largest part of `requested` on which `M(w) > 0` and the general
    /// solution is positive and finite.
    ///
    /// The general solution coincides with the map of the seed only where, in
    /// addition, `f > 0` (for `k >= 1`); [`ep_backlund`] checks that itself.
    pub fn admissible_domain(&self, requested: Interval) -> Result<Interval> {
        let y = self.general_expr();
        admissible_subinterval(requested, |z| self.guard(z, &y))
    }
}

pub fn ep_q(params: &ErmakovParams, z: f64) -> Result<f64> {
    params.q(z)
}

pub fn ep_f(params: &ErmakovParams) -> Expr {
    params.f_expr()
}

pub fn ep_seed(params: &ErmakovParams) -> SolutionEvaluator {
    SolutionEvaluator::closed(params.seed_expr(), params.seed_domain()).with_label(format!(
        "Ermakov seed y = {} z^-{}",
        params.beta(),
        params.k
    ))
}

/// General solution on the admissible part of `requested`.
pub fn ep_general(params: &ErmakovParams, requested: Interval) -> Result<SolutionEvaluator> {
    let domain = params.admissible_domain(requested)?;
    Ok(SolutionEvaluator::closed(params.general_expr(), domain)
        .with_label(format!("Ermakov general solution, M = {:?}", params.moebius.coeffs())))
}

/// Moves `y` along the family with the map `f` built from `params.moebius`.
pub fn ep_backlund(y: &SolutionEvaluator, params: &ErmakovParams, requested: Interval) -> Result<SolutionEvaluator> {
    backlund_b2_within(y, &params.f_expr(), requested)
}

/// `y'' - Q y + α / y³`.
pub fn ep_residual(y: &Jet, params: &ErmakovParams) -> Result<f64> {
    params.equation().residual(y).map(|r| r.value)
}

/// The Ermakov-Pinney equation with the closed-form `Q`.
#[derive(Clone, Debug)]
pub struct PinneyEquation {
    params: ErmakovParams,
}

impl Equation for PinneyEquation {
    fn describe(&self) -> String {
        format!(
            "y'' = Q y - {} / y^3 (k = {}, p = {})",
            self.params.alpha, self.params.k, self.params.p
        )
    }

    fn residual(&self, y: &Jet) -> Result<Residual> {
        if y.order() < 2 {
            return Err(Error::InsufficientOrder {
                have: y.order(),
                need: 2,
            });
        }
        let z = y.point();
        let v = y.value();
        if !(v > 0.0) {
            return Err(Error::domain("y must be positive", z));
        }
        let qy = self.params.q(z)? * v;
        let inv = self.params.alpha / (v * v * v);
        Ok(Residual {
            value: y.d(2) - qy + inv,
            scale: qy.abs() + inv.abs(),
        })
    }

    fn acceleration(&self, z: f64, y: f64, _dy: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::SolutionEscape { at: z, value: y });
        }
        Ok(self.params.q(z)? * y - self.params.alpha / (y * y * y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{fde_terms, functional_residuals, StructureFunction};
    use crate::verify::grid_scan;

    fn params(alpha: f64, k: u32, p: f64, m: [f64; 4]) -> ErmakovParams {
        ErmakovParams::new(alpha, k, p, MoebiusMap::from_array(m).unwrap()).unwrap()
    }

    const ID: [f64; 4] = [1.0, 0.0, 0.0, 1.0];

    #[test]
    fn q_values() {
        assert_eq!(params(1.0, 0, 2.0, ID).q(-3.0).unwrap(), 1.0);
        assert_eq!(params(1.0, 1, 1.0, ID).q(1.0).unwrap(), 4.25);
        assert!(params(1.0, 1, 1.0, ID).q(0.0).is_err());
        assert!(ErmakovParams::new(-1.0, 0, 1.0, MoebiusMap::identity()).is_err());
        assert!(ErmakovParams::new(1.0, 0, 0.0, MoebiusMap::identity()).is_err());
    }

    #[test]
    fn q_is_minus_half_schwarzian_of_w() {
        for (k, p) in [(0, 2.0), (1, 1.0), (2, 0.5)] {
            let e = params(1.0, k, p, ID);
            let s = e.structure();
            for z in Interval::new(0.5, 3.0).unwrap().linspace(40).unwrap() {
                let q = e.q(z).unwrap();
                let lin = s.linear_coefficient(z).unwrap();
                assert!((lin - q).abs() <= 1e-9 * q.abs(), "k={k} z={z}: {lin} vs {q}");
                assert!((e.q_expr().eval(z).unwrap() - q).abs() <= 1e-13 * q);
            }
        }
    }

    #[test]
    fn f_examples() {
        let f = params(1.0, 1, 0.7, ID).f_expr();
        for z in [0.3, 1.0, 1.6] {
            assert!((f.eval(z).unwrap() - z).abs() < 1e-14);
        }
        let e = std::f64::consts::E;
        let f = params(1.0, 0, 1.0, [e, 0.0, 0.0, 1.0]).f_expr();
        for z in [-1.0, 0.0, 2.0] {
            assert!((f.eval(z).unwrap() - (z + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn f_realizes_the_moebius_map_on_w() {
        let e = params(2.0, 1, 0.8, [2.0, 1.0, 0.5, 3.0]);
        let (w, f) = (e.w_expr(), e.f_expr());
        for z in Interval::new(0.3, 1.5).unwrap().linspace(20).unwrap() {
            let (_, r_w) = functional_residuals(&Expr::var(), &w, &f, &e.moebius, 0.0, z).unwrap();
            let scale = e.moebius.apply(w.eval(z).unwrap()).unwrap();
            assert!(r_w.abs() <= 1e-10 * (1.0 + scale), "{z}: {r_w}");
        }
    }

    #[test]
    fn seeds_solve_pinney() {
        let one = params(1.0, 0, 2.0, ID);
        let j = ep_seed(&one).jet(0.7, 2).unwrap();
        assert_eq!(j.value(), 1.0);
        assert_eq!(ep_residual(&j, &one).unwrap(), 0.0);

        let e = params(2.25, 1, 2.0, ID);
        assert!((e.beta().powi(4) - 0.25).abs() < 1e-15);
        let d = Interval::new(0.1, 10.0).unwrap();
        let r = grid_scan(&ep_seed(&e), &e.equation(), d, 100, 1e-11).unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn residual_of_non_solution() {
        let e = params(1.0, 0, 2.0, ID);
        let y = |z: f64| Jet::new(z, &[z, 1.0, 0.0]).unwrap();
        assert_eq!(ep_residual(&y(1.0), &e).unwrap(), 0.0);
        assert_eq!(ep_residual(&y(2.0), &e).unwrap(), -1.875);
        assert!(ep_residual(&Jet::new(1.0, &[-1.0, 0.0, 0.0]).unwrap(), &e).is_err());
    }

    #[test]
    fn analytic_general_solution() {
        let e = params(1.0, 0, 2.0, [1.0, 1.0, 0.0, 1.0]);
        let d = Interval::new(0.0, 3.0).unwrap();
        let y = ep_general(&e, d).unwrap();
        assert_eq!(y.domain(), d);
        for z in d.linspace(13).unwrap() {
            let want = (1.0 + (-2.0 * z).exp()).sqrt();
            assert!((y.value(z).unwrap() - want).abs() < 1e-15);
            let r = ep_residual(&y.jet(z, 2).unwrap(), &e).unwrap();
            assert!(r.abs() <= 1e-12, "{z}: {r}");
        }
    }

    #[test]
    fn identity_general_is_seed() {
        let e = params(1.5, 1, 1.2, ID);
        let d = Interval::new(0.2, 1.5).unwrap();
        let y = ep_general(&e, d).unwrap();
        let s = ep_seed(&e);
        for z in d.linspace(9).unwrap() {
            assert!((y.value(z).unwrap() - s.value(z).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn general_matches_b2_of_seed() {
        let e = params(0.8, 1, 1.3, [2.0, 1.0, 0.5, 3.0]);
        let d = Interval::new(0.2, 1.6).unwrap();
        let y = ep_general(&e, d).unwrap();
        // M(w) > 1 only from z ≈ 0.6 on, so the map of the seed lives on a
        // smaller interval than the closed form.
        let b = ep_backlund(&ep_seed(&e), &e, y.domain()).unwrap();
        assert!(b.domain().lo > 0.5 && y.domain().lo == 0.2);
        for z in b.domain().linspace(50).unwrap() {
            let (u, v) = (y.value(z).unwrap(), b.value(z).unwrap());
            assert!((u - v).abs() <= 1e-10 * (1.0 + v.abs()), "{z}: {u} vs {v}");
        }
        let r = grid_scan(&y, &e.equation(), y.domain(), 200, 1e-10).unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn second_map_composes() {
        let m1 = MoebiusMap::new(2.0, 1.0, 0.5, 3.0).unwrap();
        let m2 = MoebiusMap::new(1.0, 0.5, 0.2, 1.0).unwrap();
        let e = ErmakovParams::new(1.1, 1, 0.9, m1).unwrap();
        let d = Interval::new(0.3, 1.4).unwrap();
        let y1 = ep_general(&e, d).unwrap();
        let y2 = ep_backlund(&y1, &e.with_moebius(m2), y1.domain()).unwrap();
        let direct = ep_general(&e.with_moebius(m1.compose(&m2)), y2.domain()).unwrap();
        for z in direct.domain().linspace(30).unwrap() {
            let (u, v) = (y2.value(z).unwrap(), direct.value(z).unwrap());
            assert!((u - v).abs() <= 1e-9 * (1.0 + v.abs()), "{z}: {u} vs {v}");
        }
    }

    #[test]
    fn fde_certificate() {
        let e = params(1.3, 1, 0.9, [2.0, 1.0, 0.5, 3.0]);
        let (s, f) = (e.structure(), e.f_expr());
        for z in [0.4, 0.8, 1.2] {
            for v in [0.1, 1.0, 7.0] {
                let t = fde_terms(&s, &f, z, v).unwrap();
                assert!(t.relative() <= 1e-9, "{z} {v}: {t:?}");
                assert!(s.eval(z, v).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn negative_determinant_has_no_domain() {
        let e = params(1.0, 0, 1.0, [0.0, 1.0, 1.0, 0.0]);
        assert!(ep_general(&e, Interval::new(0.1, 2.0).unwrap()).is_err());
    }
}
