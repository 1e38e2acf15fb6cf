use std::collections::HashSet;

use super::domain::Interval;
use crate::error::{Error, Result};
use crate::jetcalc::Expr;

/// Right-hand side `F(z, v)` of `y y'' = F(z, y^2)`.
pub trait StructureFunction: Send + Sync {
    fn eval(&self, z: f64, v: f64) -> Result<f64>;

    /// Sum of the magnitudes of the individual terms of `F(z, v)`, used to
    /// normalize residuals. Defaults to `|F(z, v)|`.
    fn magnitude(&self, z: f64, v: f64) -> Result<f64> {
        self.eval(z, v).map(f64::abs)
    }
}

impl<F> StructureFunction for F
where
    F: Fn(f64, f64) -> Result<f64> + Send + Sync,
{
    fn eval(&self, z: f64, v: f64) -> Result<f64> {
        self(z, v)
    }
}

/// One power-law term `a_n (G_n'(z))^(n+1) v^n`.
#[derive(Clone, Debug)]
pub struct PowerTerm {
    pub exponent: i32,
    pub coeff: f64,
    pub g: Expr,
}

impl PowerTerm {
    pub fn new(exponent: i32, coeff: f64, g: Expr) -> Self {
        Self { exponent, coeff, g }
    }

    fn eval(&self, z: f64, v: f64) -> Result<f64> {
        let n = self.exponent;
        if n < 0 && v == 0.0 {
            return Err(Error::domain(format!("v = 0 in the v^{n} term"), z));
        }
        let weight = if n == -1 {
            1.0
        } else {
            let gp = self.g.jet(z, 1)?.d(1);
            if gp == 0.0 && n + 1 < 0 {
                return Err(Error::domain("G' vanishes under a negative power", z));
            }
            gp.powi(n + 1)
        };
        Ok(self.coeff * weight * v.powi(n))
    }
}

/// `F(z, v) = Σ a_n (G_n'(z))^(n+1) v^n - ½ {w, z} v`, a finite term list.
#[derive(Clone, Debug)]
pub struct StructureF {
    terms: Vec<PowerTerm>,
    w: Option<Expr>,
}

impl StructureF {
    pub fn new(terms: Vec<PowerTerm>, w: Option<Expr>) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &terms {
            if !seen.insert(t.exponent) {
                return Err(Error::DuplicateExponent(t.exponent));
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "coefficient of v^{} is not finite",
                    t.exponent
                )));
            }
        }
        Ok(Self { terms, w })
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn w(&self) -> Option<&Expr> {
        self.w.as_ref()
    }

    /// Coefficient of the linear term, `-½ {w, z}`; zero without `w`.
    pub fn linear_coefficient(&self, z: f64) -> Result<f64> {
        match &self.w {
            None => Ok(0.0),
            Some(w) => Ok(-0.5 * w.jet(z, 3)?.schwarzian()?),
        }
    }

    /// Checks finite evaluation and `w' != 0` at `n` points of `domain`, for
    /// every `v` in `v_samples`.
    pub fn validate_on(&self, domain: Interval, n: usize, v_samples: &[f64]) -> Result<()> {
        for z in domain.grid(n)? {
            for &v in v_samples {
                let f = self.eval(z, v)?;
                if !f.is_finite() {
                    return Err(Error::domain("F is not finite", z));
                }
            }
        }
        Ok(())
    }
}

impl StructureFunction for StructureF {
    fn eval(&self, z: f64, v: f64) -> Result<f64> {
        let mut sum = self.linear_coefficient(z)? * v;
        for t in &self.terms {
            sum += t.eval(z, v)?;
        }
        if !sum.is_finite() {
            return Err(Error::domain("F is not finite", z));
        }
        Ok(sum)
    }

    fn magnitude(&self, z: f64, v: f64) -> Result<f64> {
        let mut sum = (self.linear_coefficient(z)? * v).abs();
        for t in &self.terms {
            sum += t.eval(z, v)?.abs();
        }
        Ok(sum)
    }
}

pub fn build_structure_f(terms: Vec<PowerTerm>, w: Option<Expr>) -> Result<StructureF> {
    StructureF::new(terms, w)
}

/// The structure function seen by `psi` when `phi = g(psi)`:
/// `F~(psi, psi_t) = g'(psi) F(g(psi), g'(psi) psi_t) - (psi_t / 2) {g, psi}`.
pub struct TransportedF<F> {
    base: F,
    g: Expr,
}

impl<F: StructureFunction> TransportedF<F> {
    pub fn new(base: F, g: Expr) -> Self {
        Self { base, g }
    }
}

impl<F: StructureFunction> StructureFunction for TransportedF<F> {
    fn eval(&self, psi: f64, psi_t: f64) -> Result<f64> {
        let gj = self.g.jet(psi, 3)?;
        let gp = gj.d(1);
        let s = gj.schwarzian()?;
        Ok(gp * self.base.eval(gj.value(), gp * psi_t)? - 0.5 * psi_t * s)
    }
}
