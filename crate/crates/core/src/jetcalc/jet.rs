use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default truncation order. The Schwarzian needs three derivatives; the
/// fourth keeps one derivative of Schwarzian-bearing quantities available.
pub const DEFAULT_ORDER: usize = 4;

/// Absolute threshold on |f'| below which the Schwarzian is refused.
pub const CRITICAL_THRESHOLD: f64 = 1e-12;

/// Value and derivatives of a scalar map at a point, truncated at a fixed order.
///
/// Internally the jet stores normalized Taylor coefficients `f^(k)/k!`, which
/// keeps products and series recurrences free of factorials. The public
/// accessors speak in plain derivatives.
#[derive(Clone, PartialEq)]
pub struct Jet {
    point: f64,
    taylor: Vec<f64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Jet {
    /// Builds a jet from derivatives `(f, f', f'', ...)` at `point`.
    pub fn new(point: f64, derivatives: &[f64]) -> Result<Self> {
        if derivatives.is_empty() {
            return Err(Error::InvalidParameter("a jet needs at least the value".into()));
        }
        if !point.is_finite() {
            return Err(Error::domain("jet point is not finite", point));
        }
        if let Some(k) = derivatives.iter().position(|d| !d.is_finite()) {
            return Err(Error::domain(format!("derivative {k} is not finite"), point));
        }
        let taylor = derivatives.iter().enumerate().map(|(k, d)| d / factorial(k)).collect();
        Ok(Self { point, taylor })
    }

    pub(crate) fn from_taylor(point: f64, taylor: Vec<f64>) -> Self {
        debug_assert!(!taylor.is_empty());
        Self { point, taylor }
    }

    pub fn constant(point: f64, value: f64, order: usize) -> Self {
        let mut taylor = vec![0.0; order + 1];
        taylor[0] = value;
        Self { point, taylor }
    }

    /// The identity map `z -> z` seeded at `point`.
    pub fn variable(point: f64, order: usize) -> Self {
        let mut taylor = vec![0.0; order + 1];
        taylor[0] = point;
        if order >= 1 {
            taylor[1] = 1.0;
        }
        Self { point, taylor }
    }

    pub fn point(&self) -> f64 {
        self.point
    }

    pub fn order(&self) -> usize {
        self.taylor.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.taylor[0]
    }

    /// k-th derivative at the point. Panics if `k > order`.
    pub fn d(&self, k: usize) -> f64 {
        self.taylor[k] * factorial(k)
    }

    /// All derivatives `(f, f', ..., f^(order))`.
    pub fn coeffs(&self) -> Vec<f64> {
        (0..self.taylor.len()).map(|k| self.d(k)).collect()
    }

    pub fn taylor(&self) -> &[f64] {
        &self.taylor
    }

    pub fn is_finite(&self) -> bool {
        self.taylor.iter().all(|c| c.is_finite())
    }

    /// Same derivatives, one order shorter: the jet of the map itself
    /// truncated at `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self::from_taylor(self.point, self.taylor[..=n].to_vec())
    }

    /// Jet of `f'` at the same point, one order lower.
    pub fn derivative(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::InsufficientOrder { have: 0, need: 1 });
        }
        let taylor = (1..self.taylor.len()).map(|k| k as f64 * self.taylor[k]).collect();
        Ok(Self::from_taylor(self.point, taylor))
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.point != other.point {
            return Err(Error::PointMismatch {
                expected: self.point,
                found: other.point,
            });
        }
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let taylor = self.taylor.iter().zip(&other.taylor).map(|(a, b)| a + b).collect();
        Ok(Jet::from_taylor(self.point, taylor))
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let taylor = self.taylor.iter().zip(&other.taylor).map(|(a, b)| a - b).collect();
        Ok(Jet::from_taylor(self.point, taylor))
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(Jet::from_taylor(
            self.point,
            cauchy_product(&self.taylor, &other.taylor),
        ))
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let b = &other.taylor;
        if b[0] == 0.0 {
            return Err(Error::domain("division by zero", self.point));
        }
        let a = &self.taylor;
        let mut c = vec![0.0; a.len()];
        for k in 0..a.len() {
            let acc: f64 = (1..=k).map(|j| b[j] * c[k - j]).sum();
            c[k] = (a[k] - acc) / b[0];
        }
        Ok(Jet::from_taylor(self.point, c))
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet::from_taylor(self.point, self.taylor.iter().map(|c| c * factor).collect())
    }

    pub fn shift(&self, offset: f64) -> Jet {
        let mut taylor = self.taylor.clone();
        taylor[0] += offset;
        Jet::from_taylor(self.point, taylor)
    }

    pub fn recip(&self) -> Result<Jet> {
        Jet::constant(self.point, 1.0, self.order()).try_div(self)
    }

    pub fn exp(&self) -> Jet {
        let a = &self.taylor;
        let mut e = vec![0.0; a.len()];
        e[0] = a[0].exp();
        for k in 1..a.len() {
            let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = acc / k as f64;
        }
        Jet::from_taylor(self.point, e)
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = &self.taylor;
        if a[0] <= 0.0 {
            return Err(Error::domain(
                format!("logarithm of non-positive value {}", a[0]),
                self.point,
            ));
        }
        let mut l = vec![0.0; a.len()];
        l[0] = a[0].ln();
        for k in 1..a.len() {
            let acc: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
            l[k] = (a[k] - acc / k as f64) / a[0];
        }
        Ok(Jet::from_taylor(self.point, l))
    }

    /// Sine and cosine together; their recurrences are coupled.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let a = &self.taylor;
        let mut s = vec![0.0; a.len()];
        let mut c = vec![0.0; a.len()];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..a.len() {
            let mut sk = 0.0;
            let mut ck = 0.0;
            for j in 1..=k {
                sk += j as f64 * a[j] * c[k - j];
                ck -= j as f64 * a[j] * s[k - j];
            }
            s[k] = sk / k as f64;
            c[k] = ck / k as f64;
        }
        (Jet::from_taylor(self.point, s), Jet::from_taylor(self.point, c))
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// Integer power by repeated squaring; exact on polynomials.
    pub fn powi(&self, n: i32) -> Result<Jet> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut result = Jet::constant(self.point, 1.0, self.order());
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Real power. Integer exponents go through [`Jet::powi`]; other exponents
    /// need a strictly positive base.
    pub fn powf(&self, r: f64) -> Result<Jet> {
        if r.fract() == 0.0 && r.abs() < i32::MAX as f64 {
            return self.powi(r as i32);
        }
        let a0 = self.taylor[0];
        if a0 < 0.0 {
            return Err(Error::domain(
                format!("fractional power {r} of negative base {a0}"),
                self.point,
            ));
        }
        if a0 == 0.0 {
            return Err(Error::domain(format!("fractional power {r} at zero base"), self.point));
        }
        Ok(self.power_series(r, a0.powf(r)))
    }

    /// Real odd root, extended to negative arguments as `sign(x)|x|^(1/n)`.
    pub fn root(&self, n: u32) -> Result<Jet> {
        if n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("root index {n} must be odd")));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let a0 = self.taylor[0];
        if a0 == 0.0 {
            return Err(Error::domain("odd root has infinite slope at 0", self.point));
        }
        let p0 = a0.signum() * a0.abs().powf(1.0 / n as f64);
        Ok(self.power_series(1.0 / n as f64, p0))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.powf(0.5)
    }

    // p = a^r from p' a = r a' p; valid for any nonzero a0 once p0 is fixed.
    fn power_series(&self, r: f64, p0: f64) -> Jet {
        let a = &self.taylor;
        let mut p = vec![0.0; a.len()];
        p[0] = p0;
        for k in 1..a.len() {
            let acc: f64 = (1..=k).map(|j| (r * j as f64 - (k - j) as f64) * a[j] * p[k - j]).sum();
            p[k] = acc / (k as f64 * a[0]);
        }
        Jet::from_taylor(self.point, p)
    }

    /// Schwarzian `f'''/f' - 3/2 (f''/f')^2` with the default critical threshold.
    pub fn schwarzian(&self) -> Result<f64> {
        self.schwarzian_with_threshold(CRITICAL_THRESHOLD)
    }

    pub fn schwarzian_with_threshold(&self, threshold: f64) -> Result<f64> {
        if self.order() < 3 {
            return Err(Error::InsufficientOrder {
                have: self.order(),
                need: 3,
            });
        }
        let d1 = self.d(1);
        if d1.abs() < threshold {
            return Err(Error::CriticalPoint {
                at: self.point,
                derivative: d1,
            });
        }
        let r2 = self.d(2) / d1;
        Ok(self.d(3) / d1 - 1.5 * r2 * r2)
    }

    /// Jet of the Schwarzian itself, of order `order - 3`.
    pub fn schwarzian_jet(&self) -> Result<Jet> {
        // Validates order and the critical threshold.
        self.schwarzian()?;
        let d1 = self.derivative()?;
        let d2 = d1.derivative()?;
        let d3 = d2.derivative()?;
        let n = d3.order();
        let d1 = d1.truncate(n);
        let r2 = d2.truncate(n).try_div(&d1)?;
        let r3 = d3.try_div(&d1)?;
        Ok(&r3 - &(&r2 * &r2).scale(1.5))
    }
}

pub(crate) fn cauchy_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// Chain rule: given the jet of `g` at `x = psi(t)` and the jet of `psi` at
/// `t`, returns the jet of `g(psi(t))` at `t`, to the smaller of the two orders.
pub fn jet_compose(outer: &Jet, inner: &Jet) -> Result<Jet> {
    let x = inner.value();
    if (outer.point - x).abs() > 1e-12 * (1.0 + x.abs()) {
        return Err(Error::PointMismatch {
            expected: x,
            found: outer.point,
        });
    }
    let n = outer.order().min(inner.order());
    // delta(h) = psi(t + h) - psi(t) has no constant term, so its powers
    // shift up by one order each time.
    let mut delta = inner.taylor[..=n].to_vec();
    delta[0] = 0.0;
    let mut power = vec![0.0; n + 1];
    power[0] = 1.0;
    let mut out = vec![0.0; n + 1];
    for j in 0..=n {
        let gj = outer.taylor[j];
        for (o, p) in out.iter_mut().zip(&power) {
            *o += gj * p;
        }
        power = cauchy_product(&power, &delta);
    }
    Ok(Jet::from_taylor(inner.point, out))
}

/// Schwarzian of the map carried by `j`, default threshold.
pub fn schwarzian(j: &Jet) -> Result<f64> {
    j.schwarzian()
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("point", &self.point)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.$checked(rhs).expect(concat!("Jet::", stringify!($method)))
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, try_add);
jet_binop!(Sub, sub, try_sub);
jet_binop!(Mul, mul, try_mul);
jet_binop!(Div, div, try_div);

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.shift(rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
