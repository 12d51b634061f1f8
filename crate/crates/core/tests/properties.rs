use proptest::prelude::*;
use topoderiv::expansion::ladder;
use topoderiv::fields::{char_fraction, GridSpec};
use topoderiv::kernels::{kernel_expr, kernel_taylor_term, laplace_fundamental, Kernel, MAX_TAYLOR_ORDER};
use topoderiv::moments::{compute_moments, Shape};
use topoderiv::poly::Poly;
use topoderiv::verify::extract_coefficients;
use topoderiv::{json, Dim};

fn small_poly(dim: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((0u8..3, 0u8..3, 0u8..2, -2.0f64..2.0), 1..5).prop_map(move |ts| {
        let mut p = Poly::zero(dim);
        for (a, b, c, v) in ts {
            p.add_term([a, b, if dim == 3 { c } else { 0 }], v);
        }
        p
    })
}

/// Star-shaped polygon around the origin from sorted angles and radii.
fn star_polygon() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0.0f64..1.0, 0.5f64..1.5), 4..9).prop_map(|mut v| {
        let n = v.len() as f64;
        v.iter_mut().enumerate().for_each(|(i, a)| a.0 = 2.0 * std::f64::consts::PI * (i as f64 + 0.2 + 0.6 * a.0) / n);
        v.into_iter().map(|(t, r)| [r * t.cos(), r * t.sin()]).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shift_is_translation(p in small_poly(3), s in prop::array::uniform3(-1.0f64..1.0), y in prop::array::uniform3(-1.0f64..1.0)) {
        let q = p.shift(&s);
        let x: Vec<f64> = (0..3).map(|i| s[i] + y[i]).collect();
        prop_assert!((q.eval(&y) - p.eval(&x)).abs() < 1e-10 * (1.0 + p.eval(&x).abs()));
    }

    #[test]
    fn product_evaluates_pointwise(p in small_poly(2), q in small_poly(2), x in prop::array::uniform2(-1.5f64..1.5)) {
        let lhs = p.mul(&q).eval(&x);
        prop_assert!((lhs - p.eval(&x) * q.eval(&x)).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn symbolic_derivative_matches_difference(k in 0usize..2, d in 2usize..4, axis in 0usize..3, x in prop::array::uniform3(0.4f64..2.0)) {
        let dim = Dim::try_from(d).unwrap();
        let axis = axis % d;
        let e = kernel_expr(if k == 0 { Kernel::Laplace } else { Kernel::Biharmonic }, dim);
        let de = e.partial(axis);
        let h = 1e-5;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[axis] += h;
        xm[axis] -= h;
        let fd = (e.eval(&xp) - e.eval(&xm)) / (2.0 * h);
        prop_assert!((fd - de.eval(&x)).abs() < 1e-7 * (1.0 + fd.abs()));
    }

    #[test]
    fn taylor_series_converges(d in 2usize..4, x in prop::array::uniform3(-1.0f64..1.0), y in prop::array::uniform3(-0.1f64..0.1)) {
        let dim = Dim::try_from(d).unwrap();
        let n: f64 = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(n > 0.5);
        let diff: Vec<f64> = (0..d).map(|i| x[i] - y[i]).collect();
        let exact = laplace_fundamental(&diff, dim).unwrap();
        let sum: f64 = (0..=MAX_TAYLOR_ORDER).map(|l| kernel_taylor_term(Kernel::Laplace, l, &x[..d], &y[..d], dim).unwrap()).sum();
        let ny: f64 = y[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((sum - exact).abs() <= 10.0 * (ny / n).powi(MAX_TAYLOR_ORDER as i32 + 1) + 1e-13);
    }

    #[test]
    fn reflected_polygon_moments_flip_sign(v in star_polygon()) {
        let shape = Shape::Polygon { vertices: v.clone() };
        prop_assume!(shape.validate().is_ok());
        let refl = Shape::Polygon { vertices: v.iter().rev().map(|p| [-p[0], p[1]]).collect() };
        let a = compute_moments(&shape, 5).unwrap();
        let b = compute_moments(&refl, 5).unwrap();
        for (e, m) in a.iter() {
            let s = if e[0] % 2 == 1 { -1.0 } else { 1.0 };
            prop_assert!((b.get(e).unwrap() - s * m).abs() < 1e-12);
        }
        prop_assert!(a.measure() > 0.0);
    }

    #[test]
    fn disk_fraction_conserves_mass(eps in 0.02f64..0.2, dx in -0.02f64..0.02, dy in -0.02f64..0.02) {
        let g = GridSpec::unit(Dim::Two, 65);
        let chi = char_fraction(&g, &[0.5 + dx, 0.5 + dy], eps, &Shape::unit_ball(Dim::Two)).unwrap();
        let mass = chi.integrate();
        prop_assert!((mass - std::f64::consts::PI * eps * eps).abs() < 1e-12);
        prop_assert!(chi.values.iter().all(|v| (-1e-15..=1.0 + 1e-12).contains(v)));
    }

    #[test]
    fn ladder_ratios_shrink(d in 2usize..4, k in 1usize..7, eps in 1e-4f64..0.2) {
        let dim = Dim::try_from(d).unwrap();
        let r = |e: f64| (ladder(dim, k + 1, 1.0).eval(e) / ladder(dim, k, 1.0).eval(e)).abs();
        prop_assert!(ladder(dim, k, 1.0).eval(eps).abs() > 0.0);
        prop_assert!(r(eps / 4.0) < r(eps));
    }

    #[test]
    fn extraction_round_trip(c in prop::collection::vec(-5.0f64..5.0, 4)) {
        let eps: Vec<f64> = (0..9).map(|i| 2f64.powf(-3.0 - 0.5 * i as f64)).collect();
        let scales: Vec<_> = (1..=4).map(|k| (k, ladder(Dim::Two, k, 1.3))).collect();
        let y: Vec<f64> = eps.iter().map(|&e| scales.iter().zip(&c).map(|((_, s), c)| s.eval(e) * c).sum()).collect();
        let ex = extract_coefficients(&eps, &y, &scales).unwrap();
        for (a, b) in ex.coeffs.iter().zip(&c) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn fmt17_round_trips(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(json::fmt17(x).parse::<f64>().unwrap(), x);
    }
}
