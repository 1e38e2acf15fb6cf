//! Functional equations `G(f) = G + K` and `w(f) = M(w)` that characterize
//! auto-Bäcklund maps, and the constructions that generate their solutions.

use super::moebius::MoebiusMap;
use crate::error::{Error, Result};
use crate::jetcalc::Expr;

/// `(G(f(z)) - G(z) - K, w(f(z)) - M(w(z)))`.
pub fn functional_residuals(g: &Expr, w: &Expr, f: &Expr, m: &MoebiusMap, k: f64, z: f64) -> Result<(f64, f64)> {
    let fz = f.eval(z)?;
    let r_g = g.eval(fz)? - g.eval(z)? - k;
    let r_w = w.eval(fz)? - m.apply(w.eval(z)?)?;
    Ok((r_g, r_w))
}

/// `G(f(z)) - G(z) - K` alone.
pub fn translation_residual(g: &Expr, f: &Expr, k: f64, z: f64) -> Result<f64> {
    let fz = f.eval(z)?;
    Ok(g.eval(fz)? - g.eval(z)? - k)
}

/// `G0 + A sin(2π G0 / K)`: adds a `K`-periodic function of `G0`, which keeps
/// `G(f) = G + K` whenever `G0` satisfies it.
pub fn periodic_extension_g(g0: &Expr, amplitude: f64, k: f64) -> Result<Expr> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::InvalidParameter(format!("period K = {k} must be nonzero")));
    }
    if amplitude == 0.0 {
        return Ok(g0.clone());
    }
    let phase = (2.0 * std::f64::consts::PI / k) * g0.clone();
    Ok(g0.clone() + amplitude * phase.sin())
}

/// `w = (D G - B) / (A - C G)`, the inverse of `G = (A w + B) / (C w + D)`.
pub fn w_from_g(g: &Expr, abcd: [f64; 4]) -> Expr {
    let [a, b, c, d] = abcd;
    (d * g.clone() - b) / (a - c * g.clone())
}

/// `G = (A w + B) / (C w + D)`.
pub fn g_from_w(w: &Expr, abcd: [f64; 4]) -> Expr {
    let [a, b, c, d] = abcd;
    (a * w.clone() + b) / (c * w.clone() + d)
}

/// The Möbius map relating `w(f)` to `w` when `G(f) = G + K`:
/// `((Δ + DCK) w + D²K) / ((Δ - DCK) - C²K w)`, with `Δ = AD - BC`.
pub fn fe2_moebius(abcd: [f64; 4], k: f64) -> Result<MoebiusMap> {
    let [a, b, c, d] = abcd;
    let delta = a * d - b * c;
    if delta == 0.0 {
        return Err(Error::DegenerateMap("AD - BC vanishes".into()));
    }
    MoebiusMap::new(delta + d * c * k, d * d * k, -c * c * k, delta - d * c * k)
}
