//! Acceptance criteria. Prints one PASS/FAIL line per criterion, then fails
//! if any line failed.

use std::f64::consts::PI;

use acf_heisenberg::euclid_acf::{phi_functional, phi_log_derivative, EuclidField, TwoPhasePair};
use acf_heisenberg::euclid_eigen::{cap_eigenvalue, cap_sum_bound, characteristic_constant, psi, EuclidCap};
use acf_heisenberg::heis_eigen::{euclid_bridge, sl_eigen, PhiInterval};
use acf_heisenberg::heis_mono::{
    boundary_quotient, j_beta, j_log_derivative, linear_minus, linear_plus, lower_bound_check, t_minus, t_plus,
    HTwoPhasePair,
};
use acf_heisenberg::heis_polar::{gradient_split, polar_jets};
use acf_heisenberg::heisenberg_core::{
    dilate, fundamental_solution_residual, fundamental_solution_residual_fd, gauge_norm, HField, HPoint,
};
use acf_heisenberg::quadrature::{koranyi_ball_grid, Resolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MESH: usize = 2048;

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, id: &str, what: &str, pass: bool, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {id:>3} {what}: {detail}");
        self.lines.push((pass, id.to_string()));
    }

    fn close(&mut self, id: &str, what: &str, measured: f64, expected: f64, tol: f64) {
        let err = (measured - expected).abs();
        self.check(
            id,
            what,
            err <= tol,
            format!("measured {measured:.12e}, expected {expected:.12e}, |err| {err:.2e} <= {tol:.0e}"),
        );
    }
}

fn res() -> Resolution {
    Resolution::default()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> HPoint {
    let c: Vec<f64> = (0..2 * n + 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let p = HPoint::from_coords(&c).unwrap();
    let g = rng.gen_range(0.5..2.0);
    dilate(g / gauge_norm(&p), &p).unwrap()
}

fn random_off_axis(rng: &mut ChaCha8Rng) -> HPoint {
    loop {
        let p = HPoint::h1(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let z2 = p.x[0] * p.x[0] + p.y[0] * p.y[0];
        if z2 > 1e-6 * gauge_norm(&p).powi(2) {
            return p;
        }
    }
}

fn criterion_1(r: &mut Report) {
    let sol = sl_eigen(PhiInterval::new(0.0, PI / 2.0).unwrap(), MESH).unwrap();
    r.close("1", "φ-eigenvalue on (0, π/2)", sol.lambda, 8.0, 1e-6 * 8.0);
    r.close("1", "characteristic constant on (0, π/2)", sol.alpha, 2.0, 1e-8);
}

fn criterion_2(r: &mut Report) {
    let sol = cap_eigenvalue(EuclidCap::new(PI / 2.0, 3).unwrap(), MESH).unwrap();
    r.close("2", "hemisphere eigenvalue in S²", sol.lambda, 2.0, 1e-8);
    r.close("2", "characteristic constant for λ = 2, n = 3", characteristic_constant(2.0, 3).unwrap(), 1.0, 1e-12);
}

fn criterion_3(r: &mut Report) {
    for phi0 in [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let b = euclid_bridge(phi0, MESH).unwrap();
        r.close("3", &format!("λ_H/λ_E at φ₀ = {phi0:.4}"), b.ratio, 4.0, 4e-5);
    }
}

fn criterion_4(r: &mut Report, rng: &mut ChaCha8Rng) {
    for _ in 0..5 {
        let (a, b) = loop {
            let (a, b): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if a.hypot(b) > 0.1 {
                break (a, b);
            }
        };
        let pair = HTwoPhasePair::new(linear_plus(a, b).unwrap(), linear_minus(a, b).unwrap()).unwrap();
        let tag = format!("(a, b) = ({a:.3}, {b:.3})");
        r.close(
            "4",
            &format!("boundary quotient of (ax+by)⁺, {tag}"),
            boundary_quotient(&pair.plus, res()).unwrap(),
            2.0,
            1e-3,
        );
        r.close("4", &format!("J′/J at β = 4, {tag}"), j_log_derivative(&pair, 4.0, res()).unwrap(), 0.0, 2e-3);
        let d = j_log_derivative(&pair, 4.5, res()).unwrap();
        r.check("4", &format!("J′/J at β = 4.5, {tag}"), d <= -0.5 + 2e-3, format!("measured {d:.12e} <= -0.5 + 2e-3"));
    }
}

fn criterion_5(r: &mut Report) {
    let pair = HTwoPhasePair::new(t_plus(1.3).unwrap(), t_minus(0.7).unwrap()).unwrap();
    let j1 = j_beta(&pair, 1.0, 8.0, res()).unwrap();
    for radius in [0.25, 0.5, 0.75] {
        let j = j_beta(&pair, radius, 8.0, res()).unwrap();
        r.close("5", &format!("J₈({radius}) vs J₈(1) on the t-pair"), j, j1, 2e-3 * j1);
    }
}

fn criterion_6(r: &mut Report, rng: &mut ChaCha8Rng) {
    let q = psi(0.25).unwrap();
    r.check("6", "ψ(1/4) = 3/2 exactly", q == 1.5, format!("measured {q:e}"));
    let h = psi(0.5).unwrap();
    r.check("6", "ψ(1/2) = 1 exactly", h == 1.0, format!("measured {h:e}"));
    let vals: Vec<f64> = (1..=1000).map(|k| psi(k as f64 / 1001.0).unwrap()).collect();
    let d2 = vals.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::INFINITY, f64::min);
    let d1 = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    r.check("6", "ψ convex on the 10³ grid", d2 >= -1e-10, format!("min second difference {d2:e}"));
    r.check("6", "ψ decreasing on the 10³ grid", d1 <= 0.0, format!("max first difference {d1:e}"));
    let mut worst = f64::INFINITY;
    let mut count = 0;
    while count < 1000 {
        let s1: f64 = rng.gen_range(0.0..1.0);
        let s2: f64 = rng.gen_range(0.0..1.0);
        if s1 == 0.0 || s2 == 0.0 || s1 + s2 > 1.0 {
            continue;
        }
        count += 1;
        worst = worst.min(cap_sum_bound(s1, s2).unwrap());
    }
    r.check("6", "ψ(s₁) + ψ(s₂) over 10³ random pairs", worst >= 2.0 - 1e-12, format!("min {worst:.12e} >= 2 - 1e-12"));
}

fn criterion_7(r: &mut Report, rng: &mut ChaCha8Rng) {
    for n in [1, 2] {
        let pts: Vec<HPoint> = (0..100).map(|_| random_point(rng, n)).collect();
        let a = pts.iter().map(|p| fundamental_solution_residual(p).unwrap().abs()).fold(0.0, f64::max);
        let f = pts.iter().map(|p| fundamental_solution_residual_fd(p).unwrap().abs()).fold(0.0, f64::max);
        r.close("7", &format!("analytic residual, n = {n}, worst of 100"), a, 0.0, 1e-10);
        r.close("7", &format!("finite-difference residual, n = {n}, worst of 100"), f, 0.0, 1e-5);
    }
}

fn criterion_8(r: &mut Report, rng: &mut ChaCha8Rng) {
    let rho_f = HField::h1(|x, y, t| polar_jets(x, y, t).0);
    let phi_f = HField::h1(|x, y, t| polar_jets(x, y, t).1);
    let theta_f = HField::h1(|x, y, t| polar_jets(x, y, t).2);
    let dot = |a: &[f64], b: &[f64]| a[0] * b[0] + a[1] * b[1];
    let names = ["|∇ρ|²", "|∇φ|²", "|∇θ|²", "⟨∇φ,∇ρ⟩", "⟨∇ρ,∇θ⟩", "⟨∇φ,∇θ⟩", "Δθ", "Δρ", "Δφ"];
    let mut worst = [0.0f64; 9];
    for _ in 0..10_000 {
        let p = random_off_axis(rng);
        let (x, y, t) = (p.x[0], p.y[0], p.t);
        let z2 = x * x + y * y;
        let rho = (z2 * z2 + t * t).powf(0.25);
        let cos_phi = t / (rho * rho);
        let gr = rho_f.horizontal_gradient(&p).unwrap();
        let gp = phi_f.horizontal_gradient(&p).unwrap();
        let gt = theta_f.horizontal_gradient(&p).unwrap();
        let (nr, np, nt) = (dot(&gr, &gr).sqrt(), dot(&gp, &gp).sqrt(), dot(&gt, &gt).sqrt());
        // (measured, expected, scale)
        let rows = [
            (dot(&gr, &gr), z2 / (rho * rho), z2 / (rho * rho)),
            (dot(&gp, &gp), 4.0 * z2 / rho.powi(4), 4.0 * z2 / rho.powi(4)),
            (dot(&gt, &gt), 1.0 / z2, 1.0 / z2),
            (dot(&gp, &gr), 0.0, np * nr),
            (dot(&gr, &gt), -cos_phi / rho, nr * nt),
            (dot(&gp, &gt), 2.0 * z2 / rho.powi(4), np * nt),
            (theta_f.sublaplacian(&p).unwrap(), 0.0, nt * nt),
            (rho_f.sublaplacian(&p).unwrap(), 3.0 * z2 / rho.powi(3), 3.0 * z2 / rho.powi(3)),
            (phi_f.sublaplacian(&p).unwrap(), 4.0 * cos_phi / (rho * rho), 4.0 / (rho * rho)),
        ];
        for (w, (m, e, s)) in worst.iter_mut().zip(rows) {
            *w = w.max((m - e).abs() / s);
        }
    }
    for (name, w) in names.iter().zip(worst) {
        r.close("8", &format!("{name} identity, worst relative error over 10⁴ points"), w, 0.0, 1e-10);
    }
}

fn criterion_9(r: &mut Report, rng: &mut ChaCha8Rng) {
    let radius: f64 = 0.8;
    let exact = PI * PI * radius.powi(4) / 2.0;
    let g = res();
    let vol = koranyi_ball_grid(radius, g.n_rho, g.n_phi, g.n_theta).unwrap().integrate(|_| 1.0);
    r.close("9", "Korányi volume by quadrature", vol, exact, 1e-6 * exact);
    let samples = 10_000_000;
    let (r2, r4) = (radius * radius, radius.powi(4));
    let hits = (0..samples)
        .filter(|_| {
            let x: f64 = rng.gen_range(-radius..radius);
            let y: f64 = rng.gen_range(-radius..radius);
            let t: f64 = rng.gen_range(-r2..r2);
            let z2 = x * x + y * y;
            z2 * z2 + t * t < r4
        })
        .count();
    let mc = 8.0 * r4 * hits as f64 / samples as f64;
    r.close("9", "Korányi volume vs Monte Carlo (10⁷ samples)", vol, mc, 1e-2 * mc);
}

fn criterion_10(r: &mut Report) {
    let pair = TwoPhasePair::new(EuclidField::half_space_plus(), EuclidField::half_space_minus()).unwrap();
    for radius in [0.5, 1.0] {
        let phi = phi_functional(&pair, radius, res()).unwrap();
        r.close("10", &format!("Φ({radius}) on the half-space pair"), phi, PI * PI, 1e-3 * PI * PI);
    }
    r.close("10", "Φ′/Φ on the half-space pair", phi_log_derivative(&pair, res()).unwrap(), 0.0, 2e-3);
}

fn criterion_11(r: &mut Report) {
    let pair = HTwoPhasePair::new(t_plus(1.0).unwrap(), t_minus(1.0).unwrap()).unwrap();
    let north = sl_eigen(PhiInterval::new(0.0, PI / 2.0).unwrap(), MESH).unwrap().lambda;
    let south = sl_eigen(PhiInterval::new(PI / 2.0, PI).unwrap(), MESH).unwrap().lambda;
    let report = lower_bound_check(&pair, [north, south], 2e-3, res()).unwrap();
    r.close("11", "lower bound, quotient side", report.left, 8.0, 2e-3);
    r.close("11", "lower bound, eigenvalue side", report.right, 8.0, 2e-3);
}

fn criterion_12(r: &mut Report, rng: &mut ChaCha8Rng) {
    let fields: [(&str, HField); 5] = [
        ("y", HField::h1(|_, y, _| y)),
        ("t", HField::h1(|_, _, t| t)),
        ("x² − y² + xt", HField::h1(|x, y, t| x * x - y * y + x * t)),
        ("x³y − 2t² + y", HField::h1(|x, y, t| x * x * x * y - t * t * 2.0 + y)),
        ("(x² + y²)t + x⁴", HField::h1(|x, y, t| (x * x + y * y) * t + x * x * x * x)),
    ];
    let pts: Vec<HPoint> = (0..10_000).map(|_| random_off_axis(rng)).collect();
    for (name, u) in &fields {
        let mut worst: f64 = 0.0;
        for p in &pts {
            let (radial, angular) = gradient_split(u, p).unwrap();
            let g = u.horizontal_gradient(p).unwrap();
            let direct = g[0] * g[0] + g[1] * g[1];
            if direct > 0.0 {
                worst = worst.max((radial + angular - direct).abs() / direct);
            }
        }
        r.close("12", &format!("gradient split of {name}, worst relative error"), worst, 0.0, 1e-10);
    }
}

#[test]
fn acceptance_criteria() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut r = Report { lines: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r, &mut rng);
    criterion_5(&mut r);
    criterion_6(&mut r, &mut rng);
    criterion_7(&mut r, &mut rng);
    criterion_8(&mut r, &mut rng);
    criterion_9(&mut r, &mut rng);
    criterion_10(&mut r);
    criterion_11(&mut r);
    criterion_12(&mut r, &mut rng);
    let failed: Vec<&String> = r.lines.iter().filter(|l| !l.0).map(|l| &l.1).collect();
    println!("{} checks, {} failed", r.lines.len(), failed.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
