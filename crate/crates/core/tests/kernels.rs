use ingham_core::kernels::{leibniz_tail, Kernel};
use ingham_core::quadrature::{integrate, integrate_semi_infinite, DecayHint, QuadratureSpec};

const S_POINTS: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 1.0, 2.0];

#[test]
fn tent_and_fudge_fourier_pairs() {
    let spec = QuadratureSpec::default();
    for kernel in [Kernel::<f64>::tent(), Kernel::fudge()] {
        for s in S_POINTS {
            let numeric = kernel.fourier_transform(s, &spec).unwrap();
            let exact = kernel.freq(s);
            assert!((numeric - exact).abs() < 1e-6, "{} s={s}: {numeric} vs {exact}", kernel.name());
        }
    }
}

#[test]
fn scaled_fourier_pair() {
    let spec = QuadratureSpec::default();
    let kernel = Kernel::<f64>::tent().scaled(3.0).unwrap();
    for s in [0.0, 1.0, 2.0, 2.5, 4.0] {
        let numeric = kernel.fourier_transform(s, &spec).unwrap();
        assert!((numeric - kernel.freq(s)).abs() < 1e-6);
    }
}

#[test]
fn bump_kernel_table() {
    let kernel = Kernel::<f64>::bump(2.0).unwrap();
    let table = kernel.bump_table().unwrap();
    assert!(table.mass_defect() <= 1e-8, "defect {}", table.mass_defect());
    assert!(table.decay_constant().is_finite());
    assert_eq!(kernel.freq(0.4), 1.0);
    assert_eq!(kernel.freq(1.1), 0.0);
    // Independent mass check with adaptive quadrature on the interpolant.
    let mass = integrate(|t| kernel.time(t), -200.0, 200.0, &QuadratureSpec::default()).unwrap();
    assert!((mass.value - 1.0).abs() < 1e-8, "{}", mass.value);
    let spec = QuadratureSpec::default();
    for s in [0.0, 0.25, 0.75, 2.0] {
        let numeric = kernel.fourier_transform(s, &spec).unwrap();
        assert!((numeric - kernel.freq(s)).abs() < 1e-7, "s={s}: {numeric}");
    }
}

#[test]
fn coarse_bump_grid_is_rejected() {
    assert!(Kernel::<f64>::bump_with_grid(1.0, 20.0, 0.5).is_err());
}

#[test]
fn leibniz_bound_suite() {
    let envelopes: [(&str, fn(f64) -> f64); 3] =
        [("s^-2", |s| s.powi(-2)), ("s^-3/2", |s| s.powf(-1.5)), ("e^-s", |s| (-s).exp())];
    let mut checked = 0;
    for (name, env) in envelopes {
        for alpha in [0.5, 1.0, 2.0, 10.0] {
            for t in [0.1, 1.0, 10.0] {
                let v = leibniz_tail(env, alpha, t).unwrap();
                let bound = 4.0 / alpha * env(t);
                assert!(v.abs() <= bound, "{name} alpha={alpha} t={t}: {v} > {bound}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 36);
}

#[test]
fn leibniz_matches_plain_quadrature_on_inverse_square() {
    // Oracle: adaptive quadrature on [1, 1e4] plus the closed-form envelope tail bound.
    let spec = QuadratureSpec::with_tolerances(1e-13, 1e-12);
    let body = integrate(|s: f64| s.cos() / (s * s), 1.0, 1e4, &QuadratureSpec { max_subdivisions: 100_000, ..spec }).unwrap();
    let v = leibniz_tail(|s: f64| s.powi(-2), 1.0, 1.0).unwrap();
    assert!((v - body.value).abs() < 2e-8, "{v} vs {}", body.value);
    assert!(v.abs() <= 4.0);
}

#[test]
fn tent_tail_cross_module() {
    let kernel = Kernel::<f64>::tent();
    let waves = kernel.waves().unwrap();
    let envelope = |s: f64| s.powi(-2);
    let hint = DecayHint::Oscillatory(
        waves
            .iter()
            .map(|w| ingham_core::quadrature::OscillatoryTerm {
                envelope: &envelope,
                scale: w.coef,
                frequency: w.frequency,
                phase: w.phase,
            })
            .collect(),
    );
    let tail = integrate_semi_infinite(|t| kernel.time(t), 1.0, &hint, &QuadratureSpec::default()).unwrap();
    let phi_plus = kernel.primitive_plus(1.0).unwrap();
    assert!((tail.value + phi_plus).abs() < 1e-8);
}

#[test]
fn tent_primitive_decays_like_inverse_t() {
    let kernel = Kernel::<f64>::tent();
    let c = |points: usize| -> f64 {
        (0..points)
            .map(|j| 10f64.powf(3.0 * j as f64 / (points - 1) as f64))
            .map(|t| t * kernel.primitive_plus(t).unwrap().abs())
            .fold(0.0, f64::max)
    };
    let coarse = c(31);
    let fine = c(61);
    assert!(coarse.is_finite() && coarse > 0.0);
    assert!((fine / coarse - 1.0).abs() < 0.5);
}
