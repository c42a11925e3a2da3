use std::f64::consts::{FRAC_PI_2, PI};

use angmax_core::maximal::{angular_max, hl_maximal, AngleSearchConfig};
use angmax_core::transforms::{hilbert, laplace_ray, poisson, stieltjes};
use angmax_core::{combine, InputFunction, Sector, SimpleFunction, TransformKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn simple(complex: bool, nonneg: bool) -> impl Strategy<Value = SimpleFunction> {
    let lo = if nonneg { 0.0 } else { -2.0 };
    (
        0.0..2.0f64,
        prop::collection::vec((0.05..1.0f64, lo..2.0f64, -2.0..2.0f64), 1..6),
    )
        .prop_map(move |(start, pieces)| {
            let mut bps = vec![start];
            let mut vals = Vec::new();
            for (w, re, im) in pieces {
                bps.push(bps.last().unwrap() + w);
                vals.push(Complex64::new(re, if complex { im } else { 0.0 }));
            }
            SimpleFunction::new(bps, vals).unwrap()
        })
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![1.0..6.0f64, Just(f64::INFINITY)]
}

fn upper_point() -> impl Strategy<Value = Complex64> {
    (-3.0..6.0f64, 0.01..5.0f64).prop_map(|(x, y)| Complex64::new(x, y))
}

fn right_point() -> impl Strategy<Value = Complex64> {
    (0.01..20.0f64, -1.5..1.5f64).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn close(a: Complex64, b: Complex64, scale: f64, tol: f64) -> bool {
    (a - b).norm() <= tol * scale.max(1.0)
}

fn light_search() -> AngleSearchConfig {
    AngleSearchConfig {
        coarse_count: 96,
        boundary_layers: 12,
        refine_iters: 30,
        min_offset: 1e-8,
    }
}

proptest! {
    #[test]
    fn lp_norm_is_homogeneous(f in simple(true, false), p in exponent(), c in -3.0..3.0f64, d in -3.0..3.0f64) {
        let a = Complex64::new(c, d);
        let lhs = f.scale(a).lp_norm(p).unwrap();
        let rhs = a.norm() * f.lp_norm(p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn lp_norm_triangle(f in simple(true, false), g in simple(true, false), p in exponent()) {
        let one = Complex64::new(1.0, 0.0);
        let sum = combine(one, &f, one, &g).lp_norm(p).unwrap();
        prop_assert!(sum <= f.lp_norm(p).unwrap() + g.lp_norm(p).unwrap() + 1e-12);
    }

    #[test]
    fn lp_norm_under_dilation(f in simple(false, false), p in exponent(), s in 0.05..20.0f64) {
        let lhs = f.dilate(s).unwrap().lp_norm(p).unwrap();
        let rhs = s.powf(-1.0 / p) * f.lp_norm(p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn combine_is_pointwise(f in simple(true, false), g in simple(true, false), t in 0.0..8.0f64) {
        let (a, b) = (Complex64::new(0.5, -1.0), Complex64::new(-2.0, 0.25));
        let h = combine(a, &f, b, &g);
        let on_break = f.breakpoints().iter().chain(g.breakpoints()).any(|x| (x - t).abs() < 1e-9);
        prop_assume!(!on_break);
        prop_assert!(close(h.eval(t), a * f.eval(t) + b * g.eval(t), 1.0, 1e-12));
    }

    #[test]
    fn transforms_are_linear(f in simple(true, false), g in simple(true, false), z in upper_point(), w in right_point()) {
        let (a, b) = (Complex64::new(1.5, 0.5), Complex64::new(-0.75, 2.0));
        let h = combine(a, &f, b, &g);
        let scale = f.l1_norm() + g.l1_norm();
        let cases = [
            (TransformKind::Poisson, z),
            (TransformKind::Stieltjes, z),
            (TransformKind::CauchyIntegral, z),
            (TransformKind::LaplaceRay, w),
        ];
        for (kind, p) in cases {
            let lhs = kind.evaluate(&h.clone().into(), p).unwrap();
            let rhs = a * kind.evaluate(&f.clone().into(), p).unwrap()
                + b * kind.evaluate(&g.clone().into(), p).unwrap();
            prop_assert!(close(lhs, rhs, scale / p.im.abs().clamp(0.01, 1.0), 1e-11), "{kind}");
        }
    }

    #[test]
    fn poisson_positive_and_contractive(f in simple(false, true), z in upper_point()) {
        let v = poisson(&f, z.re, z.im).unwrap();
        let top = f.lp_norm(f64::INFINITY).unwrap();
        prop_assert!(v.re >= -1e-15);
        prop_assert!(v.re <= top + 1e-12);
        prop_assert_eq!(v.im, 0.0);
    }

    #[test]
    fn laplace_bounded_by_l1(f in simple(true, false), w in right_point()) {
        let v = laplace_ray(&f, w.norm(), w.arg()).unwrap();
        prop_assert!(v.norm() <= f.l1_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn laplace_dilation_covariance(f in simple(true, false), w in right_point(), s in 0.1..10.0f64) {
        let lhs = laplace_ray(&f.dilate(s).unwrap(), w.norm(), w.arg()).unwrap();
        let rhs = laplace_ray(&f, w.norm() / s, w.arg()).unwrap() / s;
        prop_assert!(close(lhs, rhs, f.l1_norm() / s, 1e-12));
    }

    #[test]
    fn stieltjes_is_continuous_across_negative_axis(f in simple(true, false), r in 0.01..10.0f64) {
        // the cut runs along the positive axis only
        let above = stieltjes(&f, Complex64::from_polar(r, PI - 1e-9)).unwrap();
        let below = stieltjes(&f, Complex64::from_polar(r, PI + 1e-9)).unwrap();
        let on = stieltjes(&f, Complex64::new(-r, 0.0)).unwrap();
        prop_assert!(close(above, on, f.l1_norm() / r, 1e-7));
        prop_assert!(close(below, on, f.l1_norm() / r, 1e-7));
    }

    #[test]
    fn stieltjes_conjugate_symmetry(f in simple(false, false), z in upper_point()) {
        let a = stieltjes(&f, z).unwrap();
        let b = stieltjes(&f, z.conj()).unwrap();
        prop_assert!(close(a, b.conj(), f.l1_norm() / z.im, 1e-13));
    }

    #[test]
    fn hilbert_is_odd_under_reflection(f in simple(false, false), x in -3.0..6.0f64) {
        // g(t) = f(shift - t) has Hg(shift - x) = -Hf(x)
        let shift = 10.0;
        let bps: Vec<f64> = f.breakpoints().iter().rev().map(|b| shift - b).collect();
        let vals: Vec<Complex64> = f.values().iter().rev().copied().collect();
        let g = SimpleFunction::new(bps, vals).unwrap();
        prop_assume!(f.breakpoints().iter().all(|b| (b - x).abs() > 1e-6));
        let a = hilbert(&f, x).unwrap();
        let b = hilbert(&g, shift - x).unwrap();
        prop_assert!(close(a, -b, 1.0, 1e-10));
    }

    #[test]
    fn hardy_littlewood_dominates(f in simple(false, true), x in 0.0..8.0f64) {
        prop_assume!(f.breakpoints().iter().all(|b| (b - x).abs() > 1e-9));
        let m = hl_maximal(&f, x).unwrap();
        prop_assert!(m + 1e-12 >= f.eval(x).norm());
        prop_assert!(m <= f.lp_norm(f64::INFINITY).unwrap() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn search_converges(f in simple(false, false), rho in 0.05..20.0f64) {
        let f: InputFunction = f.into();
        let coarse = angular_max(TransformKind::Poisson, &f, rho, &Sector::UPPER_HALF, &light_search()).unwrap();
        let fine = angular_max(TransformKind::Poisson, &f, rho, &Sector::UPPER_HALF, &AngleSearchConfig::default()).unwrap();
        prop_assert!((coarse.value - fine.value).abs() <= 1e-6 * fine.value.max(1e-12));
        // no sampled angle beats the search
        for k in 1..64 {
            let t = PI * k as f64 / 64.0;
            let v = TransformKind::Poisson.evaluate(&f, Complex64::from_polar(rho, t)).unwrap().norm();
            prop_assert!(v <= fine.value * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn maximal_is_sublinear(f in simple(false, false), g in simple(false, false), rho in 0.05..20.0f64) {
        let one = Complex64::new(1.0, 0.0);
        let h: InputFunction = combine(one, &f, one, &g).into();
        let cfg = light_search();
        for (kind, sector) in [
            (TransformKind::Poisson, Sector::UPPER_HALF),
            (TransformKind::LaplaceRay, Sector::RIGHT_HALF),
        ] {
            let m = |u: &InputFunction| angular_max(kind, u, rho, &sector, &cfg).unwrap().value;
            let (mf, mg, mh) = (m(&f.clone().into()), m(&g.clone().into()), m(&h));
            prop_assert!(mh <= (mf + mg) * (1.0 + 1e-6) + 1e-12, "{kind}");
        }
    }

    #[test]
    fn maximal_dilation_covariance(f in simple(false, false), rho in 0.05..10.0f64, k in -3i32..4) {
        // power-of-two dilations keep the search samples aligned
        let s = 2f64.powi(k);
        let fs: InputFunction = f.dilate(s).unwrap().into();
        let f: InputFunction = f.into();
        let cfg = light_search();
        let p = |u: &InputFunction, r: f64| angular_max(TransformKind::Poisson, u, r, &Sector::UPPER_HALF, &cfg).unwrap().value;
        let a = p(&fs, rho);
        let b = p(&f, s * rho);
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1e-12));
        let l = |u: &InputFunction, r: f64| angular_max(TransformKind::LaplaceRay, u, r, &Sector::RIGHT_HALF, &cfg).unwrap().value;
        let a = l(&fs, rho);
        let b = l(&f, rho / s) / s;
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1e-12));
    }

    #[test]
    fn laplace_search_reaches_edge_for_exponential(rate in 0.1..10.0f64, rho in 0.01..100.0f64) {
        // |1/(rate + rho e^{i theta})| grows toward theta = +-pi/2
        let f: InputFunction = angmax_core::ExpFunction::new(Complex64::new(1.0, 0.0), rate).unwrap().into();
        let m = angular_max(TransformKind::LaplaceRay, &f, rho, &Sector::RIGHT_HALF, &AngleSearchConfig::default()).unwrap();
        let exact = 1.0 / (rate * rate + rho * rho).sqrt();
        prop_assert!((m.value - exact).abs() <= 1e-6 * exact);
        prop_assert!(m.theta.abs() > FRAC_PI_2 - 1e-3);
    }
}
