use backlund::chart::{
    lemma1_residuals, periodic_extension_g, translation_residual, Interval, MoebiusMap, PowerTerm, StructureF,
};
use backlund::emden::{ef1_ladder, ef_canonical, Direction, EmdenParams};
use backlund::jetcalc::{agrees_with, fd_derivatives, jet_eval, Expr, Jet, FD_STEP, FD_TOLERANCE};
use backlund::verify::{rk_integrate, StructureEquation};
use proptest::prelude::*;

fn z() -> Expr {
    Expr::var()
}

fn coeff() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.2f64, 0.2..3.0f64]
}

fn moebius() -> impl Strategy<Value = MoebiusMap> {
    (coeff(), coeff(), coeff(), coeff())
        .prop_filter("non-degenerate", |(a, b, c, d)| (a * d - b * c).abs() > 0.1)
        .prop_map(|(a, b, c, d)| MoebiusMap::new(a, b, c, d).unwrap())
}

/// `a sin(b z) + exp(c z) + d z^3`, smooth everywhere.
fn smooth(a: f64, b: f64, c: f64, d: f64) -> Expr {
    a * (b * z()).sin() + (c * z()).exp() + d * z().powi(3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jets_agree_with_finite_differences(
        a in coeff(), b in -2.0..2.0f64, c in -1.0..1.0f64, d in -1.0..1.0f64, x in -1.5..1.5f64,
    ) {
        let e = smooth(a, b, c, d);
        let exact = jet_eval(&e, x, 3).unwrap();
        let fd = fd_derivatives(|t| e.eval(t), x, FD_STEP).unwrap();
        prop_assert!(agrees_with(&exact, &fd, FD_TOLERANCE), "{:?} vs {:?}", exact.coeffs(), fd.coeffs());
    }

    #[test]
    fn moebius_schwarzian_vanishes(m in moebius(), x in -4.0..4.0f64) {
        let [_, _, c, d] = m.coeffs();
        prop_assume!((c * x + d).abs() > 0.2);
        let s = jet_eval(&m.to_expr(), x, 3).unwrap().schwarzian().unwrap();
        prop_assert!(s.abs() <= 1e-12 * (1.0 + (c * x + d).powi(-2)), "{s}");
    }

    #[test]
    fn schwarzian_composition_rule(
        a in coeff(), b in -1.0..1.0f64, c in 0.3..1.0f64, x in -1.0..1.0f64,
    ) {
        // g(u) = a u + b u^3 + sin(u), h(z) = exp(c z) + z
        let g = a * z() + 0.2 * b * z().powi(3) + z().sin();
        let h = (c * z()).exp() + z();
        let hj = jet_eval(&h, x, 3).unwrap();
        let gj = jet_eval(&g, hj.value(), 3).unwrap();
        prop_assume!(gj.d(1).abs() > 0.1);
        let lhs = jet_eval(&g.substitute(&h), x, 3).unwrap().schwarzian().unwrap();
        let rhs = gj.schwarzian().unwrap() * hj.d(1).powi(2) + hj.schwarzian().unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn lemma1_is_an_identity(
        y0 in 0.1..3.0f64, y1 in -2.0..2.0f64, y2 in -5.0..5.0f64, x in 0.2..2.0f64, alpha in 0.1..2.0f64,
    ) {
        let f = StructureF::new(
            vec![PowerTerm::new(-1, -alpha, z()), PowerTerm::new(2, 0.3, z().powi(2))],
            Some((0.7 * z()).exp() + z()),
        ).unwrap();
        let y = Jet::new(x, &[y0, y1, y2]).unwrap();
        let r = lemma1_residuals(&y, &f).unwrap();
        let want = 2.0 * y0 * y0 * r.r_eq;
        prop_assert!((r.r_v - want).abs() <= 4.0 * f64::EPSILON * (1.0 + r.scale_v), "{} vs {want}", r.r_v);
    }

    #[test]
    fn moebius_composition_is_associative(m1 in moebius(), m2 in moebius(), m3 in moebius(), x in -3.0..3.0f64) {
        let left = m1.compose(&m2).compose(&m3);
        let right = m1.compose(&m2.compose(&m3));
        prop_assert!(left.approx_eq_up_to_scale(&right, 1e-12));
        if let (Ok(direct), Ok(staged)) = (left.apply(x), m3.apply(x).and_then(|u| m2.apply(u)).and_then(|u| m1.apply(u))) {
            if direct.abs() < 1e6 {
                prop_assert!((direct - staged).abs() <= 1e-8 * (1.0 + direct.abs()));
            }
        }
        let id = m1.compose(&m1.inverse());
        prop_assert!(id.approx_eq_up_to_scale(&MoebiusMap::identity(), 1e-12));
    }

    #[test]
    fn periodic_extension_preserves_translation(amp in -0.3..0.3f64, k in 0.5..3.0f64, x in 0.3..2.0f64) {
        let f = (z().powi(3) + k).root(3);
        let g = periodic_extension_g(&z().powi(3), amp, k).unwrap();
        let r = translation_residual(&g, &f, k, x).unwrap();
        prop_assert!(r.abs() <= 1e-10 * (1.0 + k + x.powi(3)), "{r}");
    }

    #[test]
    fn ladder_depends_only_on_ratio(
        d1 in 0.5..2.0f64, k1 in 0.0..1.0f64, d2 in 0.5..2.0f64, k2 in 0.0..1.0f64,
    ) {
        let p = EmdenParams::example1(2.0, -2.0, 2).unwrap();
        let d = Interval::new(0.5, 3.0).unwrap();
        let (st, y) = ef1_ladder(&p, &[(d1, k1), (d2, k2)], d).unwrap();
        let (_, one) = ef1_ladder(&p, &[(1.0, st.s / st.r)], d).unwrap();
        for x in d.linspace(7).unwrap() {
            let (u, v) = (y.value(x).unwrap(), one.value(x).unwrap());
            prop_assert!((u - v).abs() <= 1e-13 * v);
        }
    }

    #[test]
    fn canonical_round_trip(alpha in prop_oneof![0.2..0.9f64, 1.1..4.0f64], q in -5.0..5.0f64, x in 0.05..20.0f64) {
        let p = EmdenParams::example1(alpha, -1.0, 2).unwrap();
        let (y, zz) = ef_canonical(q, x, &p, Direction::ToCanonical).unwrap();
        let (q2, x2) = ef_canonical(y, zz, &p, Direction::FromCanonical).unwrap();
        prop_assert!((q2 - q).abs() <= 1e-14 * (1.0 + q.abs()));
        prop_assert!((x2 - x).abs() <= 1e-14 * x * (1.0 / (alpha - 1.0)).abs().max(1.0) * 4.0);
    }

    #[test]
    fn free_motion_integrates_exactly(y0 in 0.5..2.0f64, dy0 in 0.0..1.0f64, span in 0.5..3.0f64) {
        let eq = StructureEquation::new(|_z: f64, _v: f64| Ok(0.0), "y'' = 0");
        let t = rk_integrate(&eq, y0, dy0, 0.0, span, 1e-9).unwrap();
        prop_assert!(t.samples.windows(2).all(|w| w[1].z > w[0].z));
        for s in &t.samples {
            prop_assert!((s.y - (y0 + dy0 * s.z)).abs() <= 1e-12);
        }
    }
}
