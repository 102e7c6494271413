use ingham_core::quadrature::{integrate, QuadratureSpec};
use ingham_core::rate_functions::{eval_decay_k, eval_growth_k, eval_growth_log, MonotoneFunction, RateBound, Shape, Variant};
use proptest::prelude::*;

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![
        (1u32..5).prop_map(|k| Variant::InfinityCk { k }),
        Just(Variant::InfinitySmooth),
        (1u32..5).prop_map(|k| Variant::ZeroCk { k }),
        Just(Variant::ZeroSmooth),
        (1u32..5).prop_map(|k| Variant::ZeroInfinityCk { k }),
        Just(Variant::ZeroInfinitySmooth),
    ]
}

fn bound_for(v: Variant, alpha: f64) -> RateBound<f64> {
    let growth = MonotoneFunction::power(Shape::Growth, alpha).unwrap();
    let decay = MonotoneFunction::power(Shape::Decay, alpha).unwrap();
    RateBound::new(v, Some(&growth), Some(&decay), v.default_c()).unwrap()
}

proptest! {
    #[test]
    fn growth_composition_matches_formula(alpha in 0.1f64..4.0, k in 1u32..6, r in 1e-3f64..1e4) {
        let m = MonotoneFunction::power(Shape::Growth, alpha).unwrap();
        let mr = (1.0 + r).powf(alpha);
        let expected = mr * ((1.0 + r).powi(2) * mr).powf(1.0 / k as f64);
        let got = eval_growth_k(&m, k, r).unwrap();
        prop_assert!((got / expected - 1.0).abs() < 1e-12);
        prop_assert!(got >= mr);
    }

    #[test]
    fn decay_composition_matches_formula(alpha in 0.1f64..4.0, k in 1u32..6, r in 1e-3f64..1.0) {
        let m = MonotoneFunction::power(Shape::Decay, alpha).unwrap();
        let mr = r.powf(-alpha);
        let expected = mr * (mr / r).powf(1.0 / k as f64);
        let got = eval_decay_k(&m, k, r).unwrap();
        prop_assert!((got / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_composition_dominates_source(alpha in 0.1f64..4.0, r in 1e-2f64..1e6) {
        let m = MonotoneFunction::power(Shape::Growth, alpha).unwrap();
        let mr = (1.0 + r).powf(alpha);
        let expected = mr * (r.ln_1p() + mr.ln());
        prop_assert!((eval_growth_log(&m, r).unwrap() / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_decrease_in_time(v in variant(), alpha in 0.2f64..3.0, lt in 1.0f64..8.0, step in 0.01f64..2.0) {
        let b = bound_for(v, alpha);
        let t0 = b.t_min().max(1.0) * 10f64.powf(lt);
        let t1 = t0 * 10f64.powf(step);
        let (y0, y1) = (b.eval(t0).unwrap(), b.eval(t1).unwrap());
        prop_assert!(y1 <= y0 * (1.0 + 1e-9), "{v:?}: {y0} then {y1}");
        prop_assert!(y1 > 0.0);
    }

    #[test]
    fn growth_radius_inverts_the_rate(alpha in 0.2f64..3.0, k in 1u32..5, lt in 1.0f64..12.0) {
        let v = Variant::InfinityCk { k };
        let b = bound_for(v, alpha);
        let t = b.t_min() * 10f64.powf(lt);
        let r = b.growth_radius(t).unwrap().unwrap();
        let m = MonotoneFunction::power(Shape::Growth, alpha).unwrap();
        prop_assert!((eval_growth_k(&m, k, r).unwrap() / t - 1.0).abs() < 1e-8);
    }

    #[test]
    fn single_precision_tracks_double(v in variant(), lt in 1.0f64..5.0) {
        let b64 = bound_for(v, 1.0);
        let g = MonotoneFunction::<f32>::power(Shape::Growth, 1.0).unwrap();
        let d = MonotoneFunction::<f32>::power(Shape::Decay, 1.0).unwrap();
        let b32 = RateBound::new(v, Some(&g), Some(&d), v.default_c() as f32).unwrap();
        let t = b64.t_min().max(1.0) * 10f64.powf(lt);
        let (y64, y32) = (b64.eval(t).unwrap(), b32.eval(t as f32).unwrap() as f64);
        prop_assert!((y32 / y64 - 1.0).abs() < 1e-3, "{v:?} at {t}: {y32} vs {y64}");
    }

    #[test]
    fn quadrature_is_exact_on_cubics(a in -3.0f64..3.0, b in -3.0f64..3.0, c0 in -2.0f64..2.0, c3 in -2.0f64..2.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let est = integrate(|x: f64| c0 + c3 * x * x * x, lo, hi, &QuadratureSpec::default()).unwrap();
        let exact = c0 * (hi - lo) + c3 * (hi.powi(4) - lo.powi(4)) / 4.0;
        prop_assert!(est.converged);
        prop_assert!((est.value - exact).abs() < 1e-12 * (1.0 + exact.abs()));
    }
}
