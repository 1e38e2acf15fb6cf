use crate::error::{Error, Result};
use crate::jetcalc::Expr;

/// Smallest accepted |ad - bc|.
pub const MIN_DETERMINANT: f64 = 1e-12;

/// Fractional linear map `x -> (a x + b) / (c x + d)` with `ad - bc != 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MoebiusMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::DegenerateMap("non-finite coefficient".into()));
        }
        let det = a * d - b * c;
        if det.abs() < MIN_DETERMINANT {
            return Err(Error::DegenerateMap(format!(
                "determinant {det:e} of ({a}, {b}, {c}, {d}) vanishes"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn from_array(m: [f64; 4]) -> Result<Self> {
        Self::new(m[0], m[1], m[2], m[3])
    }

    pub fn identity() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn translation(k: f64) -> Self {
        Self {
            a: 1.0,
            b: k,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        let den = self.c * x + self.d;
        if den == 0.0 {
            return Err(Error::Pole { at: x });
        }
        let y = (self.a * x + self.b) / den;
        if !y.is_finite() {
            return Err(Error::Pole { at: x });
        }
        Ok(y)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &MoebiusMap) -> MoebiusMap {
        let (m, n) = (self, inner);
        MoebiusMap {
            a: m.a * n.a + m.b * n.c,
            b: m.a * n.b + m.b * n.d,
            c: m.c * n.a + m.d * n.c,
            d: m.c * n.b + m.d * n.d,
        }
    }

    /// Inverse via the adjugate, which equals the true inverse up to scale.
    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Same projective map, i.e. coefficients proportional within `tol`.
    pub fn approx_eq_up_to_scale(&self, other: &MoebiusMap, tol: f64) -> bool {
        let normalize = |m: &MoebiusMap| {
            let v = m.coeffs();
            let pivot = v
                .iter()
                .copied()
                .max_by(|x, y| x.abs().total_cmp(&y.abs()))
                .unwrap_or(1.0);
            v.map(|x| x / pivot)
        };
        let (u, v) = (normalize(self), normalize(other));
        u.iter().zip(v.iter()).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// `(a e + b) / (c e + d)` as an expression in the variable of `e`.
    pub fn apply_expr(&self, e: Expr) -> Expr {
        if self.c == 0.0 {
            return (self.a / self.d) * e + self.b / self.d;
        }
        (self.a * e.clone() + self.b) / (self.c * e + self.d)
    }

    /// The map itself as an expression in `z`.
    pub fn to_expr(&self) -> Expr {
        self.apply_expr(Expr::var())
    }
}

pub fn moebius_apply(m: &MoebiusMap, x: f64) -> Result<f64> {
    m.apply(x)
}

pub fn moebius_compose(m1: &MoebiusMap, m2: &MoebiusMap) -> MoebiusMap {
    m1.compose(m2)
}
