//! Emden-Fowler equations after the change of variables `q = y / z`,
//! `z = x^{α-1}`:
//!
//! ```text
//! y'' + β/(α-1)² · y^{2m-1} / (η + γ z)^{2m+2} = 0
//! ```
//!
//! Example 1 is `(η, γ) = (0, 1)`. Seeds are `p (η + γ z)^{m/(m-1)}`; the
//! Bäcklund maps are Möbius maps of `z` with a linear positive factor.

use crate::chart::{admissible_subinterval, Interval, MoebiusMap, PowerTerm, SolutionEvaluator, StructureF};
use crate::error::{Error, Result};
use crate::jetcalc::{jet_compose, Expr, Jet};
use crate::verify::{Equation, Residual};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmdenParams {
    pub alpha: f64,
    pub beta: f64,
    pub m: i32,
    pub eta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Which of the two reduced equations a residual refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    /// `(η, γ) = (0, 1)`
    One,
    /// The parameters' own `(η, γ)`.
    Two,
}

/// Direction of [`ef_canonical`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `(q, x) -> (y, z)`
    ToCanonical,
    /// `(y, z) -> (q, x)`
    FromCanonical,
}

/// Amplitude `p > 0` of the seed and the remaining real roots of its constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedAmplitude {
    pub p: f64,
    pub other_real_roots: Vec<f64>,
}

impl EmdenParams {
    pub fn new(alpha: f64, beta: f64, m: i32, eta: f64, gamma: f64, delta: f64) -> Result<Self> {
        for (name, v) in [
            ("alpha", alpha),
            ("beta", beta),
            ("eta", eta),
            ("gamma", gamma),
            ("delta", delta),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        if alpha == 1.0 {
            return Err(Error::InvalidParameter("alpha must differ from 1".into()));
        }
        if m == 1 {
            return Err(Error::InvalidParameter("m must differ from 1".into()));
        }
        if eta == 0.0 && gamma == 0.0 {
            return Err(Error::InvalidParameter("eta and gamma both vanish".into()));
        }
        if delta == 0.0 {
            return Err(Error::InvalidParameter("delta must be nonzero".into()));
        }
        Ok(Self {
            alpha,
            beta,
            m,
            eta,
            gamma,
            delta,
        })
    }

    pub fn example1(alpha: f64, beta: f64, m: i32) -> Result<Self> {
        Self::new(alpha, beta, m, 0.0, 1.0, 1.0)
    }

    /// The same `(α, β, m)` with `(η, γ, δ) = (0, 1, 1)`.
    pub fn as_example1(&self) -> Self {
        Self {
            eta: 0.0,
            gamma: 1.0,
            delta: 1.0,
            ..*self
        }
    }

    fn variant(&self, ex: Example) -> Self {
        match ex {
            Example::One => self.as_example1(),
            Example::Two => *self,
        }
    }

    /// `β / (α-1)²`
    pub fn coefficient(&self) -> f64 {
        self.beta / ((self.alpha - 1.0) * (self.alpha - 1.0))
    }

    /// `m / (m-1)`
    pub fn seed_exponent(&self) -> f64 {
        self.m as f64 / (self.m - 1) as f64
    }

    /// Solves `β(m-1)² p^{2m-2} + m γ² (α-1)² = 0` for the positive root.
    pub fn seed_amplitude(&self) -> Result<SeedAmplitude> {
        let m = self.m as f64;
        let a1 = self.alpha - 1.0;
        let r = -m * self.gamma * self.gamma * a1 * a1 / (self.beta * (m - 1.0) * (m - 1.0));
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::NoRealSeed(format!(
                "p^{} = {r} has no positive real root (beta = {}, m = {}, gamma = {})",
                2 * self.m - 2,
                self.beta,
                self.m,
                self.gamma
            )));
        }
        let p = r.powf(1.0 / (2.0 * m - 2.0));
        Ok(SeedAmplitude {
            p,
            other_real_roots: vec![-p],
        })
    }

    /// `η + γ z`, kept as a bare `z` when `(η, γ) = (0, 1)`.
    pub fn affine_expr(&self) -> Expr {
        affine(self.eta, self.gamma)
    }

    /// Where `η + γ z > 0`.
    pub fn positive_domain(&self) -> Result<Interval> {
        let (eta, gamma) = (self.eta, self.gamma);
        if gamma > 0.0 {
            Interval::new(-eta / gamma, f64::INFINITY)
        } else if gamma < 0.0 {
            Interval::new(f64::NEG_INFINITY, -eta / gamma)
        } else if eta > 0.0 {
            Ok(Interval::real_line())
        } else {
            Err(Error::InvalidParameter(format!(
                "eta + gamma z = {eta} is never positive"
            )))
        }
    }

    /// `F(z, v) = a_m (G')^{m+1} v^m` with `a_m = -β/(α-1)²` and
    /// `G' = (η + γ z)^{-2}`.
    pub fn structure(&self) -> StructureF {
        let g = if self.eta != 0.0 {
            Expr::var() / (self.eta * (self.eta + self.gamma * Expr::var()))
        } else {
            -1.0 / (self.gamma * self.gamma * Expr::var())
        };
        StructureF::new(vec![PowerTerm::new(self.m, -self.coefficient(), g)], None).expect("single term")
    }

    pub fn equation(&self) -> EmdenEquation {
        EmdenEquation { params: *self }
    }
}

fn affine(eta: f64, gamma: f64) -> Expr {
    let z = Expr::var();
    match (eta, gamma) {
        (0.0, 1.0) => z,
        (0.0, g) => g * z,
        (e, 1.0) => z + e,
        (e, g) => g * z + e,
    }
}

/// `z = x^{α-1}, y = q z` and back.
pub fn ef_canonical(value: f64, at: f64, params: &EmdenParams, direction: Direction) -> Result<(f64, f64)> {
    if !(at > 0.0) {
        return Err(Error::domain(
            "canonical change of variables needs a positive argument",
            at,
        ));
    }
    let s = params.alpha - 1.0;
    match direction {
        Direction::ToCanonical => {
            let z = at.powf(s);
            Ok((value * z, z))
        }
        Direction::FromCanonical => Ok((value / at, at.powf(1.0 / s))),
    }
}

/// `y'' + β/(α-1)² · y^{2m-1} / (η + γ z)^{2m+2}`.
#[derive(Clone, Copy, Debug)]
pub struct EmdenEquation {
    params: EmdenParams,
}

impl EmdenEquation {
    fn forcing(&self, z: f64, y: f64) -> Result<f64> {
        let u = self.params.eta + self.params.gamma * z;
        if u == 0.0 {
            return Err(Error::domain("eta + gamma z vanishes", z));
        }
        let m = self.params.m;
        Ok(self.params.coefficient() * y.powi(2 * m - 1) / u.powi(2 * m + 2))
    }
}

impl Equation for EmdenEquation {
    fn describe(&self) -> String {
        let p = &self.params;
        format!(
            "y'' + {} y^{} / ({} + {} z)^{} = 0",
            p.coefficient(),
            2 * p.m - 1,
            p.eta,
            p.gamma,
            2 * p.m + 2
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
        if !(y.value() > 0.0) {
            return Err(Error::domain("y must be positive", z));
        }
        let n = self.forcing(z, y.value())?;
        Ok(Residual {
            value: y.d(2) + n,
            scale: n.abs(),
        })
    }

    fn acceleration(&self, z: f64, y: f64, _dy: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::SolutionEscape { at: z, value: y });
        }
        Ok(-self.forcing(z, y)?)
    }
}

pub fn ef_residual(y: &Jet, params: &EmdenParams, variant: Example) -> Result<f64> {
    params.variant(variant).equation().residual(y).map(|r| r.value)
}

/// Residual of `x q'' + α q' + β x^{1-2α} (x^{α-1} / (η + γ x^{α-1}))^{2m+2} q^{2m-1}`
/// for `q(x) = y(x^{α-1}) / x^{α-1}`, with `y` a solution in canonical
/// coordinates. The scale is the sum of the three term magnitudes.
pub fn ef_original_residual(sol: &SolutionEvaluator, params: &EmdenParams, x: f64) -> Result<Residual> {
    if !(x > 0.0) {
        return Err(Error::domain("x must be positive", x));
    }
    let s = params.alpha - 1.0;
    let zj = Expr::var().powf(s).jet(x, 2)?;
    let yj = sol.jet(zj.value(), 2)?;
    let q = jet_compose(&yj, &zj)?.try_div(&zj)?;
    let (q0, q1, q2) = (q.value(), q.d(1), q.d(2));
    let z = zj.value();
    let u = params.eta + params.gamma * z;
    if u == 0.0 {
        return Err(Error::domain("eta + gamma x^(alpha-1) vanishes", x));
    }
    let m = params.m;
    let terms = [
        x * q2,
        params.alpha * q1,
        params.beta * x.powf(1.0 - 2.0 * params.alpha) * (z / u).powi(2 * m + 2) * q0.powi(2 * m - 1),
    ];
    Ok(Residual {
        value: terms.iter().sum(),
        scale: terms.iter().map(|t| t.abs()).sum(),
    })
}

fn seed_for(params: &EmdenParams) -> Result<SolutionEvaluator> {
    let amp = params.seed_amplitude()?;
    let domain = params.positive_domain()?;
    let expr = amp.p * params.affine_expr().powf(params.seed_exponent());
    Ok(SolutionEvaluator::closed(expr, domain))
}

/// `p z^{m/(m-1)}` on `z > 0`.
pub fn ef1_seed(params: &EmdenParams) -> Result<SolutionEvaluator> {
    seed_for(&params.as_example1())
}

/// `p (η + γ z)^{m/(m-1)}` where `η + γ z > 0`.
pub fn ef2_seed(params: &EmdenParams) -> Result<SolutionEvaluator> {
    seed_for(params)
}

/// Keeps the largest part of `requested` on which `candidate` evaluates to
/// second order.
fn shrink(candidate: SolutionEvaluator, requested: Interval) -> Result<SolutionEvaluator> {
    let domain = admissible_subinterval(requested, |z| candidate.jet(z, 2).map(|_| ()))?;
    candidate.restricted(domain)
}

/// `y1(z) = y0(Δz / (Kz + Δ)) (Kz + Δ) / Δ`.
pub fn ef1_backlund(y0: &SolutionEvaluator, delta: f64, k: f64, requested: Interval) -> Result<SolutionEvaluator> {
    if delta == 0.0 {
        return Err(Error::DegenerateMap("Delta = 0".into()));
    }
    let map = MoebiusMap::new(delta, 0.0, k, delta)?.to_expr();
    let factor = (k / delta) * Expr::var() + 1.0;
    shrink(SolutionEvaluator::pullback(y0, map, factor, requested), requested)
}

/// Accumulated coefficients of an iterated Example 1 map.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderState {
    pub r: f64,
    pub s: f64,
    pub steps: Vec<(f64, f64)>,
}

impl Default for LadderState {
    fn default() -> Self {
        Self {
            r: 1.0,
            s: 0.0,
            steps: Vec::new(),
        }
    }
}

impl LadderState {
    pub fn new() -> Self {
        Self::default()
    }

    /// `R <- Δ R`, `S <- Δ S + K R`.
    pub fn step(&mut self, delta: f64, k: f64) -> Result<()> {
        if delta == 0.0 || !delta.is_finite() || !k.is_finite() {
            return Err(Error::DegenerateMap(format!("ladder step ({delta}, {k})")));
        }
        self.s = delta * self.s + k * self.r;
        self.r *= delta;
        self.steps.push((delta, k));
        Ok(())
    }

    /// `S / R`, the only combination the solution depends on.
    pub fn ratio(&self) -> f64 {
        self.s / self.r
    }
}

/// Folds `steps` into `(R, S)` and returns the closed-form n-th solution
/// `p (Rz / (Sz + R))^{m/(m-1)} (Sz + R) / R` on the admissible part of `requested`.
pub fn ef1_ladder(
    params: &EmdenParams,
    steps: &[(f64, f64)],
    requested: Interval,
) -> Result<(LadderState, SolutionEvaluator)> {
    let mut state = LadderState::new();
    for &(d, k) in steps {
        state.step(d, k)?;
    }
    let amp = params.as_example1().seed_amplitude()?;
    let sigma = state.ratio();
    let z = Expr::var();
    let lin = sigma * z.clone() + 1.0;
    let expr = amp.p * (z / lin.clone()).powf(params.seed_exponent()) * lin;
    let sol = SolutionEvaluator::closed(expr, requested)
        .with_label(format!("Emden-Fowler ladder, R = {}, S = {}", state.r, state.s));
    Ok((state, shrink(sol, requested)?))
}

/// `((Kηγ + Δδ) z + Kη²) / ((Δδ - Kηγ) - Kγ² z)`, of determinant `(Δδ)²`.
pub fn ef2_moebius(params: &EmdenParams, delta: f64, k: f64) -> Result<MoebiusMap> {
    let dd = delta * params.delta;
    if dd == 0.0 {
        return Err(Error::DegenerateMap("Delta delta = 0".into()));
    }
    let (eta, gamma) = (params.eta, params.gamma);
    // `+ 0.0` turns a signed zero into +0 so that (η, γ) = (0, 1) prints
    // the same formula as Example 1.
    MoebiusMap::new(
        k * eta * gamma + dd + 0.0,
        k * eta * eta + 0.0,
        -k * gamma * gamma + 0.0,
        dd - k * eta * gamma + 0.0,
    )
}

pub fn ef2_f(params: &EmdenParams, delta: f64, k: f64) -> Result<Expr> {
    Ok(ef2_moebius(params, delta, k)?.to_expr())
}

/// `(Δδ - Kηγ - Kγ² z) / (Δδ)` as an expression.
fn ef2_factor(params: &EmdenParams, delta: f64, k: f64) -> Result<Expr> {
    let [_, _, c, d] = ef2_moebius(params, delta, k)?.coeffs();
    let dd = delta * params.delta;
    Ok((c / dd) * Expr::var() + d / dd)
}

/// `y1(z) = y0(f(z)) ((Δδ - Kηγ) - Kγ² z) / (Δδ)` with `f` from [`ef2_f`].
pub fn ef2_backlund(
    y0: &SolutionEvaluator,
    params: &EmdenParams,
    delta: f64,
    k: f64,
    requested: Interval,
) -> Result<SolutionEvaluator> {
    let map = ef2_f(params, delta, k)?;
    let factor = ef2_factor(params, delta, k)?;
    shrink(SolutionEvaluator::pullback(y0, map, factor, requested), requested)
}

/// Closed form of [`ef2_backlund`] applied to [`ef2_seed`]:
/// `p (Δδ (η + γ z) / den)^{m/(m-1)} den / (Δδ)`.
pub fn ef2_transformed(params: &EmdenParams, delta: f64, k: f64, requested: Interval) -> Result<SolutionEvaluator> {
    let amp = params.seed_amplitude()?;
    let factor = ef2_factor(params, delta, k)?;
    let expr = amp.p * (params.affine_expr() / factor.clone()).powf(params.seed_exponent()) * factor;
    shrink(SolutionEvaluator::closed(expr, requested), requested)
}
