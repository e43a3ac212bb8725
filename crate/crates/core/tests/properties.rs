use proptest::prelude::*;
use sliclab::constitutive::StressLaw1D;
use sliclab::crack1d::{kernel_a, solve_fan};
use sliclab::extrapolate::{extrapolate_limit, richardson};
use sliclab::mollify::{convolve_line, convolve_radial_odd, Mollifier};
use sliclab::quadrature::Quad;
use sliclab::vacuum1d::make_vacuum_fan;
use sliclab::weakform::Bump1;
use std::sync::OnceLock;

fn bump() -> &'static Mollifier {
    static K: OnceLock<Mollifier> = OnceLock::new();
    K.get_or_init(|| Mollifier::from_label("bump").unwrap())
}

fn zero_center() -> &'static Mollifier {
    static K: OnceLock<Mollifier> = OnceLock::new();
    K.get_or_init(|| Mollifier::from_label("bump_zero_center").unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn primitive_is_odd_and_saturates(x in -1.5f64..1.5) {
        for phi in [bump(), zero_center()] {
            prop_assert!((phi.primitive(x) + phi.primitive(-x)).abs() < 1e-15);
            if x.abs() >= 1.0 {
                prop_assert_eq!(phi.primitive(x).abs(), 0.5);
            }
            prop_assert!(phi.phi(x) >= 0.0);
        }
    }

    #[test]
    fn convolution_is_linear(n in 2.0f64..64.0, x in -1.0f64..1.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let q = Quad::with_tol(1e-13, 1e-13);
        let phi = bump();
        let f = |z: f64| z.sin();
        let g = |z: f64| (1.0 + z * z).ln();
        let lhs = convolve_line(&q, phi, n, x, |z| a * f(z) + b * g(z), &[]).unwrap();
        let rhs = a * convolve_line(&q, phi, n, x, f, &[]).unwrap()
            + b * convolve_line(&q, phi, n, x, g, &[]).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn convolution_reproduces_affine_maps(n in 2.0f64..256.0, x in -2.0f64..2.0, c0 in -5.0f64..5.0, c1 in -5.0f64..5.0) {
        let q = Quad::with_tol(1e-14, 1e-14);
        for phi in [bump(), zero_center()] {
            let v = convolve_line(&q, phi, n, x, |z| c0 + c1 * z, &[]).unwrap();
            prop_assert!((v - (c0 + c1 * x)).abs() < 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn odd_extension_keeps_linear_motion(n in 2.0f64..128.0, r in 0.01f64..2.0, slope in 0.1f64..5.0) {
        let q = Quad::with_tol(1e-14, 1e-14);
        let v = convolve_radial_odd(&q, bump(), n, r, |s| slope * s, &[]).unwrap();
        prop_assert!((v - slope * r).abs() < 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn crack_fans_dissipate_and_cost_energy(alpha in 0.3f64..3.0, gap in 0.1f64..4.0) {
        let lambda = alpha + gap;
        if let Ok(fan) = solve_fan(StressLaw1D::saturating(), lambda, alpha) {
            let (plus, minus) = fan.dissipation();
            prop_assert!(plus <= 1e-15 && minus <= 1e-15);
            let t = fan.total_rate_closed_form().finite().unwrap();
            prop_assert!(t > 0.0);
            prop_assert!(fan.inner_speed > fan.sigma && fan.sigma > fan.outer_speed);
        }
    }

    #[test]
    fn kernel_self_interaction_is_one_half(n in 8.0f64..400.0, t in 1.0f64..3.0) {
        let fan = solve_fan(StressLaw1D::saturating(), 4.0, 2.0).unwrap();
        for phi in [bump(), zero_center()] {
            prop_assert!((kernel_a(&fan, phi, n, t).unwrap() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn crack_profile_jumps_by_twice_y0(alpha in 0.5f64..2.0, gap in 0.5f64..3.0) {
        if let Ok(fan) = solve_fan(StressLaw1D::saturating(), alpha + gap, alpha) {
            let left = fan.profile_from(0.0, -1.0).y;
            let right = fan.profile_from(0.0, 1.0).y;
            prop_assert!((right - left - 2.0 * fan.y0).abs() < 1e-14);
            let s = fan.sigma;
            let inner = fan.profile_from(s, -1.0).y;
            let outer = fan.profile_from(s, 1.0).y;
            prop_assert!((inner - outer).abs() < 1e-12, "displacement continuous across the shock");
        }
    }

    #[test]
    fn vacuum_fan_is_odd_and_closes(u_bar in 0.3f64..3.0, v_bar in 0.5f64..8.0, gamma in 1.2f64..3.0) {
        if let Ok(fan) = make_vacuum_fan(u_bar, v_bar, gamma) {
            prop_assert!(fan.delta_mass > 0.0);
            let f = fan.xi_f;
            let jump = fan.displacement(f * (1.0 - 1e-13)) - fan.displacement(f * (1.0 + 1e-13));
            prop_assert!(jump.abs() < 1e-9 * (1.0 + v_bar));
            for xi in [0.1 * f, 0.5 * f, 1.3 * f] {
                prop_assert_eq!(fan.displacement(-xi), -fan.displacement(xi));
                prop_assert_eq!(fan.velocity(-xi), -fan.velocity(xi));
            }
            prop_assert!(fan.closed_energy(f) > 0.0);
        }
    }

    #[test]
    fn three_level_fit_is_exact_on_power_laws(l in -5.0f64..5.0, c in 0.5f64..5.0, p in 0.3f64..3.0) {
        let ns = [8.0f64, 16.0, 32.0, 64.0];
        let vals: Vec<f64> = ns.iter().map(|n| l + c * n.powf(-p)).collect();
        let est = extrapolate_limit(&ns, &vals).unwrap();
        prop_assert!((est.limit - l).abs() < 1e-8 * (1.0 + l.abs()));
        prop_assert!((est.rate - p).abs() < 1e-6);
    }

    #[test]
    fn richardson_is_exact_on_its_expansion(l in -5.0f64..5.0, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0) {
        let ns = [16.0f64, 32.0, 64.0];
        let e = [1.0, 4.0 / 3.0];
        let vals: Vec<f64> = ns.iter().map(|n| l + c1 * n.powf(-e[0]) + c2 * n.powf(-e[1])).collect();
        prop_assert!((richardson(&ns, &vals, &e).unwrap() - l).abs() < 1e-10);
    }

    #[test]
    fn bumps_vanish_outside_their_support(c in -2.0f64..2.0, h in 0.1f64..2.0, z in 1.0f64..3.0) {
        let b = Bump1::new(c, h).unwrap();
        prop_assert_eq!(b.eval(c + z * h), [0.0; 3]);
        prop_assert_eq!(b.eval(c - z * h), [0.0; 3]);
        prop_assert!(b.value(c) > 0.0);
    }
}
