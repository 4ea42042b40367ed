// Oracle values are kept at the precision they were computed with.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use acf_heisenberg::euclid_eigen::{
    area_fraction, cap_eigenvalue, characteristic_constant, half_angle, psi, EuclidCap,
};
use acf_heisenberg::heis_eigen::{alpha_h1, euclid_bridge, sl_eigen, PhiInterval};
use acf_heisenberg::special::legendre_p;
use acf_heisenberg::sturm::{Endpoint, SturmProblem};
use approx::assert_relative_eq;
use proptest::prelude::*;

/// First Dirichlet eigenvalues of caps in S², computed with mpmath as
/// `ν(ν + 1)` for the first zero in ν of `P_ν(cos φ₀)`.
const CAP_ORACLE: [(f64, f64); 5] = [
    (PI / 6.0, 20.760187128440820238),
    (PI / 4.0, 9.0396894886612655842),
    (PI / 3.0, 4.9360418654035256588),
    (PI / 2.0, 2.0),
    (2.0 * PI / 3.0, 0.96332275867559689855),
];

/// First eigenvalue of `4(sin φ f′)′ = −λ sin φ f` on `(π/4, 3π/4)`, Dirichlet
/// at both ends, by high-precision shooting in mpmath.
const BAND_ORACLE: f64 = 13.906932783554777414;

/// Characteristic constants of the cap with area fraction 1/4 in S^{n−1}.
const QUARTER_ALPHA: [(usize, f64); 3] = [(3, 1.77728827), (4, 1.72013323), (5, 1.69451709)];

/// RK4 shooting for `(p f′)′ = −λ w f` in the variables `(f, p f′)`.
fn shoot(lambda: f64, a: f64, b: f64, start: (f64, f64), p: impl Fn(f64) -> f64, w: impl Fn(f64) -> f64) -> f64 {
    let steps = 20_000;
    let h = (b - a) / steps as f64;
    let rhs = |x: f64, y: [f64; 2]| [y[1] / p(x), -lambda * w(x) * y[0]];
    let mut y = [start.0, start.1];
    let mut x = a;
    for _ in 0..steps {
        let k1 = rhs(x, y);
        let k2 = rhs(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = rhs(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = rhs(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        x += h;
    }
    y[0]
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change in [{lo}, {hi}]");
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Shooting oracle for the cap in S^{n−1}: start off the pole with the
/// series `f = 1 − λφ²/(2(m + 1))`, `m = n − 2`.
fn cap_oracle(phi0: f64, n: usize, lo: f64, hi: f64) -> f64 {
    let m = (n - 2) as i32;
    let eps = 1e-4;
    bisect(lo, hi, |lambda| {
        let f = 1.0 - lambda * eps * eps / (2.0 * (m + 1) as f64);
        let df = -lambda * eps / (m + 1) as f64;
        let p = move |x: f64| x.sin().powi(m);
        shoot(lambda, eps, phi0, (f, p(eps) * df), p, p)
    })
}

#[test]
fn cap_eigenvalues_match_legendre_oracle() {
    for (phi0, expected) in CAP_ORACLE {
        let sol = cap_eigenvalue(EuclidCap::new(phi0, 3).unwrap(), 2048).unwrap();
        assert_relative_eq!(sol.lambda, expected, max_relative = 1e-9);
        assert!(sol.est_error <= 1e-9 * expected.max(1.0));
        let nu = (-1.0 + (1.0 + 4.0 * sol.lambda).sqrt()) / 2.0;
        assert!(legendre_p(nu, phi0.cos()).unwrap().0.abs() < 1e-8);
    }
}

#[test]
fn cap_eigenvalues_match_shooting() {
    for &(phi0, expected) in &CAP_ORACLE[1..4] {
        let shot = cap_oracle(phi0, 3, 0.5 * expected, 1.5 * expected);
        assert_relative_eq!(shot, expected, max_relative = 1e-7);
    }
    let sol = cap_eigenvalue(EuclidCap::new(1.1, 5).unwrap(), 2048).unwrap();
    let shot = cap_oracle(1.1, 5, 0.5 * sol.lambda, 1.5 * sol.lambda);
    assert_relative_eq!(sol.lambda, shot, max_relative = 1e-7);
}

#[test]
fn dirichlet_band_matches_shooting() {
    let band = PhiInterval::new(PI / 4.0, 3.0 * PI / 4.0).unwrap();
    assert_eq!((band.left, band.right), (Endpoint::Dirichlet, Endpoint::Dirichlet));
    let sol = sl_eigen(band, 2048).unwrap();
    assert_relative_eq!(sol.lambda, BAND_ORACLE, max_relative = 1e-9);
    let shot = bisect(10.0, 20.0, |lambda| {
        shoot(lambda, PI / 4.0, 3.0 * PI / 4.0, (0.0, 4.0 * (PI / 4.0).sin()), |x| 4.0 * x.sin(), f64::sin)
    });
    assert_relative_eq!(shot, BAND_ORACLE, max_relative = 1e-8);
    assert_relative_eq!(sol.alpha, alpha_h1(BAND_ORACLE).unwrap(), max_relative = 1e-9);
}

#[test]
fn quarter_caps_across_dimensions() {
    let mut previous = f64::INFINITY;
    for (n, expected) in QUARTER_ALPHA {
        let cap = EuclidCap::from_area_fraction(0.25, n).unwrap();
        assert_relative_eq!(cap.area_fraction(), 0.25, max_relative = 1e-12);
        let sol = cap_eigenvalue(cap, 2048).unwrap();
        assert!((sol.alpha - expected).abs() < 1e-7, "n = {n}: {}", sol.alpha);
        assert!(sol.alpha < previous);
        assert!(sol.alpha >= psi(0.25).unwrap());
        previous = sol.alpha;
    }
}

#[test]
fn characteristic_constant_dominates_psi() {
    for n in [3, 4, 5] {
        for k in 1..20 {
            let s = k as f64 / 20.0;
            let sol = cap_eigenvalue(EuclidCap::from_area_fraction(s, n).unwrap(), 512).unwrap();
            assert!(sol.alpha >= psi(s).unwrap() - 1e-9, "n = {n}, s = {s}: {} < {}", sol.alpha, psi(s).unwrap());
        }
    }
}

#[test]
fn unrefined_solver_converges_at_second_order() {
    let problem = SturmProblem {
        a: 0.0,
        b: PI / 2.0,
        left: Endpoint::Regular,
        right: Endpoint::Dirichlet,
        p: f64::sin,
        w: f64::sin,
    };
    let errors: Vec<f64> = [64, 128, 256].iter().map(|&m| (problem.solve(m).unwrap().lambda - 2.0).abs()).collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.1, "observed order {order}");
    }
}

#[test]
fn bridge_eigenfunctions_coincide() {
    for phi0 in [0.4, 1.3, 2.5] {
        let b = euclid_bridge(phi0, 1024).unwrap();
        assert_relative_eq!(b.ratio, 4.0, max_relative = 1e-9);
        assert!(b.eigenfunction_gap < 1e-9, "gap {}", b.eigenfunction_gap);
    }
}

#[test]
fn eigenfunctions_are_normalized_and_signed() {
    let sol = sl_eigen(PhiInterval::new(0.0, 1.2).unwrap(), 256).unwrap();
    let max = sol.eigenfunction.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_relative_eq!(max, 1.0, max_relative = 1e-12);
    assert!(sol.eigenfunction.iter().all(|&f| f >= -1e-14));
    assert_eq!(*sol.eigenfunction.last().unwrap(), 0.0);
    assert_eq!(sol.alpha_offset, 2.0);
}

#[test]
fn invalid_caps_and_meshes() {
    assert!(EuclidCap::new(0.0, 3).is_err());
    assert!(EuclidCap::new(PI, 3).is_err());
    assert!(EuclidCap::new(1.0, 2).is_err());
    assert!(cap_eigenvalue(EuclidCap::new(1.0, 3).unwrap(), 4).is_err());
    assert!(half_angle(1.0, 3).is_err());
    assert!(characteristic_constant(-1.0, 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bridge_holds_at_random_angles(phi0 in 0.2f64..2.9) {
        let h = sl_eigen(PhiInterval::new(0.0, phi0).unwrap(), 256).unwrap();
        let e = cap_eigenvalue(EuclidCap::new(phi0, 3).unwrap(), 256).unwrap();
        prop_assert!((h.lambda / e.lambda - 4.0).abs() < 1e-9);
        prop_assert!((h.alpha - ((1.0 + 4.0 * e.lambda).sqrt() - 1.0)).abs() < 1e-9 * h.alpha.max(1.0));
    }

    #[test]
    fn eigenvalue_decreases_with_cap_size(phi0 in 0.2f64..2.8, grow in 0.01f64..0.3) {
        let small = cap_eigenvalue(EuclidCap::new(phi0, 3).unwrap(), 128).unwrap().lambda;
        let large = cap_eigenvalue(EuclidCap::new(phi0 + grow, 3).unwrap(), 128).unwrap().lambda;
        prop_assert!(large < small);
    }

    #[test]
    fn characteristic_constants_solve_their_quadratics(lambda in 0.0f64..500.0, n in 3usize..8) {
        let a = characteristic_constant(lambda, n).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a * (a + (n - 2) as f64) - lambda).abs() <= 1e-12 * lambda.max(1.0));
        let h = alpha_h1(lambda).unwrap();
        prop_assert!((h * (h + 2.0) - lambda).abs() <= 1e-12 * lambda.max(1.0));
    }

    #[test]
    fn half_angle_inverts_area_fraction(s in 0.01f64..0.99, n in 3usize..7) {
        let phi0 = half_angle(s, n).unwrap();
        prop_assert!((area_fraction(phi0, n) - s).abs() < 1e-12);
    }
}
