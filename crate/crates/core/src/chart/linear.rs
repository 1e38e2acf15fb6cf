//! Auto-Bäcklund structure built from two solutions of `g'' = 2P'g' + Qg`.

use super::domain::Interval;
use super::functional::g_from_w;
use super::moebius::MoebiusMap;
use super::structure::{PowerTerm, StructureF};
use crate::error::{Error, Result};
use crate::jetcalc::Expr;

/// Grid size used to machine-check the pair at construction.
pub const LINEAR_CHECK_POINTS: usize = 50;

/// Residual tolerance for the pair, relative to `1 + Σ|terms|`.
pub const LINEAR_TOLERANCE: f64 = 1e-9;

/// Two independent solutions `g0`, `g1` of `g'' = 2P'g' + Qg` and the
/// coefficients `(A, B, C, D)` of `G = (A w + B) / (C w + D)`, `w = g0 / g1`.
#[derive(Clone, Debug)]
pub struct LinearPair {
    p: Expr,
    q: Expr,
    g0: Expr,
    g1: Expr,
    abcd: MoebiusMap,
    c1: f64,
    domain: Interval,
}

impl LinearPair {
    pub fn new(p: Expr, q: Expr, g0: Expr, g1: Expr, abcd: MoebiusMap, domain: Interval) -> Result<Self> {
        let mut pair = Self {
            p,
            q,
            g0,
            g1,
            abcd,
            c1: f64::NAN,
            domain,
        };
        let [_, _, c, d] = abcd.coeffs();
        for z in domain.linspace(LINEAR_CHECK_POINTS)? {
            for (name, g) in [("g0", &pair.g0), ("g1", &pair.g1)] {
                let (r, scale) = pair.linear_residual(g, z)?;
                if r.abs() > LINEAR_TOLERANCE * (1.0 + scale) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} does not solve g'' = 2P'g' + Qg at z = {z} (residual {r:e})"
                    )));
                }
            }
            if pair.g1.eval(z)? == 0.0 {
                return Err(Error::Pole { at: z });
            }
            if c * pair.g0.eval(z)? + d * pair.g1.eval(z)? == 0.0 {
                return Err(Error::Pole { at: z });
            }
        }
        let mid = domain.midpoint();
        let scaled_w = pair.wronskian(mid)? * (-2.0 * pair.p.eval(mid)?).exp();
        if scaled_w == 0.0 || !scaled_w.is_finite() {
            return Err(Error::InvalidParameter("g0 and g1 are linearly dependent".into()));
        }
        pair.c1 = scaled_w;
        Ok(pair)
    }

    /// `(g'' - 2P'g' - Qg, |g''| + |2P'g'| + |Qg|)`.
    pub fn linear_residual(&self, g: &Expr, z: f64) -> Result<(f64, f64)> {
        let gj = g.jet(z, 2)?;
        let pp = self.p.jet(z, 1)?.d(1);
        let qv = self.q.eval(z)?;
        let terms = [gj.d(2), 2.0 * pp * gj.d(1), qv * gj.value()];
        Ok((terms[0] - terms[1] - terms[2], terms.iter().map(|t| t.abs()).sum()))
    }

    /// `W = g0' g1 - g0 g1'`.
    pub fn wronskian(&self, z: f64) -> Result<f64> {
        let a = self.g0.jet(z, 1)?;
        let b = self.g1.jet(z, 1)?;
        Ok(a.d(1) * b.value() - a.value() * b.d(1))
    }

    /// `C1 = W e^{-2P}`, constant along the pair by Abel's identity.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn moebius(&self) -> MoebiusMap {
        self.abcd
    }

    pub fn w_expr(&self) -> Expr {
        self.g0.clone() / self.g1.clone()
    }

    pub fn g_expr(&self) -> Expr {
        g_from_w(&self.w_expr(), self.abcd.coeffs())
    }

    /// `{g0/g1, z} - 2(P'' - P'^2 - Q)`.
    pub fn ratio_schwarzian_check(&self, z: f64) -> Result<f64> {
        if self.g1.eval(z)? == 0.0 {
            return Err(Error::Pole { at: z });
        }
        let s = self.w_expr().jet(z, 3)?.schwarzian()?;
        let pj = self.p.jet(z, 2)?;
        let q = self.q.eval(z)?;
        Ok(s - 2.0 * (pj.d(2) - pj.d(1) * pj.d(1) - q))
    }

    /// `Δ C1 (e^P / (C g0 + D g1))^2`.
    pub fn wronskian_g_prime(&self, c1: f64, z: f64) -> Result<f64> {
        let [_, _, c, d] = self.abcd.coeffs();
        let den = c * self.g0.eval(z)? + d * self.g1.eval(z)?;
        if den == 0.0 {
            return Err(Error::Pole { at: z });
        }
        let ratio = self.p.eval(z)?.exp() / den;
        Ok(self.abcd.determinant() * c1 * ratio * ratio)
    }

    /// Structure function whose equation reads
    /// `y'' = Σ a_n (e^P / (C g0 + D g1))^(2n+2) y^(2n-1) + (Q + P'^2 - P'') y`.
    pub fn structure_f(&self, coeffs: &[(i32, f64)]) -> Result<StructureF> {
        let scale = self.abcd.determinant() * self.c1;
        let g = self.g_expr();
        let terms = coeffs
            .iter()
            .map(|&(n, a)| PowerTerm::new(n, a / scale.powi(n + 1), g.clone()))
            .collect();
        StructureF::new(terms, Some(self.w_expr()))
    }
}

pub fn ratio_schwarzian_check(pair: &LinearPair, z: f64) -> Result<f64> {
    pair.ratio_schwarzian_check(z)
}

pub fn wronskian_g_prime(pair: &LinearPair, c1: f64, z: f64) -> Result<f64> {
    pair.wronskian_g_prime(c1, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::StructureFunction;

    fn z() -> Expr {
        Expr::var()
    }

    fn dom() -> Interval {
        Interval::new(0.2, 2.0).unwrap()
    }

    #[test]
    fn trivial_pair() {
        let pair = LinearPair::new(0.0.into(), 0.0.into(), z(), 1.0.into(), MoebiusMap::identity(), dom()).unwrap();
        assert_eq!(pair.ratio_schwarzian_check(0.7).unwrap(), 0.0);
        assert_eq!(pair.c1(), 1.0);
        assert_eq!(pair.wronskian_g_prime(pair.c1(), 0.9).unwrap(), 1.0);
    }

    #[test]
    fn exponential_pair() {
        let pair = LinearPair::new(
            0.0.into(),
            1.0.into(),
            z().exp(),
            (-1.0 * z()).exp(),
            MoebiusMap::identity(),
            dom(),
        )
        .unwrap();
        for x in [0.3, 1.0, 1.9] {
            assert!(pair.ratio_schwarzian_check(x).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn drifted_pair() {
        // g'' = 2 g': g0 = e^{2z}, g1 = 1
        let pair = LinearPair::new(
            z(),
            0.0.into(),
            (2.0 * z()).exp(),
            1.0.into(),
            MoebiusMap::identity(),
            dom(),
        )
        .unwrap();
        for x in [0.25, 0.8, 1.5] {
            assert!(pair.ratio_schwarzian_check(x).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn non_solutions_are_rejected() {
        let err = LinearPair::new(0.0.into(), 1.0.into(), z(), 1.0.into(), MoebiusMap::identity(), dom());
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
        let dependent = LinearPair::new(0.0.into(), 0.0.into(), z(), 2.0 * z(), MoebiusMap::identity(), dom());
        assert!(dependent.is_err());
    }

    #[test]
    fn g_prime_matches_derivative_of_g() {
        // g0 = e^P (D - b z), g1 = e^P (a z - C), aD - bC = 1
        let (a, b, c, d) = (2.0, 1.0, 1.0, 1.0);
        let p = 0.3 * z() * z();
        let q = 0.6 - 0.36 * z() * z();
        let g0 = p.clone().exp() * (d - b * z());
        let g1 = p.clone().exp() * (a * z() - c);
        let abcd = MoebiusMap::new(0.5, 2.0, c, d).unwrap();
        let pair = LinearPair::new(p, q, g0, g1, abcd, Interval::new(1.0, 3.0).unwrap()).unwrap();
        for x in [1.1, 2.0, 2.9] {
            let gp = pair.wronskian_g_prime(pair.c1(), x).unwrap();
            let direct = pair.g_expr().jet(x, 1).unwrap().d(1);
            assert!((gp - direct).abs() <= 1e-8 * (1.0 + direct.abs()));
            // C g0 + D g1 = z e^P, so G' is proportional to z^-2
            assert!((gp * x * x - pair.abcd.determinant() * pair.c1()).abs() < 1e-10);
        }
    }

    #[test]
    fn rescaling_the_pair_rescales_c1() {
        let make = |lambda: f64| {
            LinearPair::new(
                0.0.into(),
                1.0.into(),
                lambda * z().exp(),
                lambda * (-1.0 * z()).exp(),
                MoebiusMap::new(1.0, 0.5, 0.2, 1.0).unwrap(),
                dom(),
            )
            .unwrap()
        };
        let (p1, p3) = (make(1.0), make(3.0));
        assert!((p3.c1() / p1.c1() - 9.0).abs() < 1e-12);
        let x = 1.2;
        let a = p1.wronskian_g_prime(p1.c1(), x).unwrap();
        let b = p3.wronskian_g_prime(p3.c1(), x).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn structure_from_pair_matches_linear_ode_form() {
        let (a, b, c, d) = (2.0, 1.0, 1.0, 1.0);
        let p = 0.3 * z() * z();
        let q = 0.6 - 0.36 * z() * z();
        let g0 = p.clone().exp() * (d - b * z());
        let g1 = p.clone().exp() * (a * z() - c);
        let pair = LinearPair::new(
            p.clone(),
            q.clone(),
            g0.clone(),
            g1.clone(),
            MoebiusMap::new(0.5, 2.0, c, d).unwrap(),
            Interval::new(1.0, 3.0).unwrap(),
        )
        .unwrap();
        let coeffs = [(2, -0.7), (-1, 0.4)];
        let f = pair.structure_f(&coeffs).unwrap();
        for (x, v) in [(1.2, 0.5), (2.4, 3.0)] {
            let pj = p.jet(x, 2).unwrap();
            let base = pj.value().exp() / (c * g0.eval(x).unwrap() + d * g1.eval(x).unwrap());
            let mut want = (q.eval(x).unwrap() + pj.d(1) * pj.d(1) - pj.d(2)) * v;
            for (n, an) in coeffs {
                want += an * base.powi(2 * n + 2) * v.powi(n);
            }
            let got = f.eval(x, v).unwrap();
            assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()), "{got} vs {want}");
        }
    }
}
