//! The candidate monotonicity functional on ℍ¹
//!
//! ```text
//!     J_β(r) = r^{−β} ∏ᵢ ∫_{B_r} |∇_ℍ uᵢ|² / |ζ|² dζ,
//! ```
//!
//! its logarithmic derivative at `r = 1` through boundary quotients, the
//! lower bound by the φ-eigenvalues of the supports, and a growth
//! diagnostic for the energy near the origin.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::heis_eigen::alpha_h1;
use crate::heis_polar::{from_polar, PolarCoord};
use crate::heisenberg_core::{dilate, HField, HPoint};
use crate::jet::Jet;
use crate::quadrature::{koranyi_kernel_grid, koranyi_shell_grid, polar_sphere_grid, Density, PolarBreaks, Resolution};
use crate::special::legendre_p;

/// Homogeneous dimension of ℍ¹.
pub const Q: f64 = 4.0;

fn point(rho: f64, phi: f64, theta: f64) -> HPoint {
    from_polar(&PolarCoord { rho, phi, theta, on_axis: false })
}

/// `(ax + by)⁺`.
pub fn linear_plus(a: f64, b: f64) -> Result<HField> {
    linear_part(a, b, 1.0)
}

/// `(ax + by)⁻`.
pub fn linear_minus(a: f64, b: f64) -> Result<HField> {
    linear_part(a, b, -1.0)
}

fn linear_part(a: f64, b: f64, sign: f64) -> Result<HField> {
    if a == 0.0 && b == 0.0 {
        return invalid("linear field needs (a, b) ≠ 0");
    }
    let normal = b.atan2(a);
    let breaks = PolarBreaks::new(vec![], vec![normal + PI / 2.0, normal - PI / 2.0]);
    Ok(HField::h1(move |x, y, _| (sign * (a * x + b * y)).pos()).with_breaks(breaks))
}

fn t_breaks() -> PolarBreaks {
    PolarBreaks::new(vec![PI / 2.0], vec![])
}

/// `a·t⁺`.
pub fn t_plus(a: f64) -> Result<HField> {
    if !(a > 0.0) {
        return invalid(format!("coefficient must be positive, got {a}"));
    }
    Ok(HField::h1(move |_, _, t| t.pos() * a).with_breaks(t_breaks()))
}

/// `b·t⁻`.
pub fn t_minus(b: f64) -> Result<HField> {
    if !(b > 0.0) {
        return invalid(format!("coefficient must be positive, got {b}"));
    }
    Ok(HField::h1(move |_, _, t| t.neg_part() * b).with_breaks(t_breaks()))
}

/// `ρ^α P_ν(±cos φ)` on the cap `{φ < φ₀}` (north) or `{φ > π − φ₀}`
/// (south), zero elsewhere, with `ν(ν + 1) = λ/4` so that `P_ν(cos φ)`
/// is the φ-eigenfunction of eigenvalue `λ`. With `α = √(1 + λ) − 1` the
/// field is ℍ-harmonic in the cone over the cap; a larger `α` makes it
/// strictly subharmonic there.
pub fn cap_field(phi0: f64, lambda: f64, alpha: f64, north: bool) -> Result<HField> {
    if !(phi0 > 0.0 && phi0 < PI) {
        return invalid(format!("cap half-angle must lie in (0, π), got {phi0}"));
    }
    if !(lambda >= 0.0) || !(alpha > 0.0) {
        return invalid(format!("need λ ≥ 0 and α > 0, got λ = {lambda}, α = {alpha}"));
    }
    let nu = 0.5 * ((1.0 + lambda).sqrt() - 1.0);
    let cos0 = phi0.cos();
    let sign = if north { 1.0 } else { -1.0 };
    let brk = if north { phi0 } else { PI - phi0 };
    Ok(HField::h1(move |x, y, t| {
        let z2 = x * x + y * y;
        let rho2 = (z2 * z2 + t * t).sqrt();
        if rho2.value == 0.0 {
            return Jet::zero();
        }
        let c = t / rho2 * sign;
        if c.value <= cos0 {
            return Jet::zero();
        }
        let (p, dp, d2p) = legendre_p(nu, c.value).expect("argument inside (-1, 1]");
        (rho2.powf(0.5 * alpha) * c.chain(p, dp, d2p)).pos()
    })
    .with_breaks(PolarBreaks::new(vec![brk], vec![])))
}

/// Two nonnegative phases on ℍ¹ with disjoint supports, both vanishing at
/// the origin.
#[derive(Debug, Clone)]
pub struct HTwoPhasePair {
    pub plus: HField,
    pub minus: HField,
    /// Both horizontal gradients vanish at the origin, so the pair cannot
    /// satisfy a gradient jump condition there in the classical sense.
    pub characteristic_origin: bool,
}

/// Polar lattice of sample points inside `B₁^{ℍ¹}`.
fn ball_samples() -> Vec<HPoint> {
    let mut pts = Vec::new();
    for i in 1..=5 {
        for j in 0..9 {
            for k in 0..12 {
                let rho = 0.2 * i as f64 - 0.013;
                let phi = (j as f64 + 0.5) * PI / 9.0 + 0.011;
                let theta = (k as f64 + 0.37) * 2.0 * PI / 12.0;
                pts.push(point(rho, phi, theta));
            }
        }
    }
    pts
}

impl HTwoPhasePair {
    pub fn new(plus: HField, minus: HField) -> Result<Self> {
        if plus.n != 1 || minus.n != 1 {
            return invalid("two-phase pairs live on ℍ¹");
        }
        let origin = HPoint::origin(1);
        for (name, u) in [("plus", &plus), ("minus", &minus)] {
            if u.value(&origin).abs() > 1e-12 {
                return invalid(format!("{name} phase does not vanish at the origin"));
            }
        }
        let samples = ball_samples();
        for p in &samples {
            let (a, b) = (plus.value(p), minus.value(p));
            if a < -1e-12 || b < -1e-12 {
                return invalid(format!("phases must be nonnegative; got {a}, {b}"));
            }
            if (a * b).abs() > 1e-12 {
                return invalid(format!("phases overlap at {p:?}"));
            }
            for (name, u, v) in [("plus", &plus, a), ("minus", &minus, b)] {
                if v > 1e-9 {
                    let lap = u.sublaplacian(p)?;
                    if lap < -1e-8 {
                        return invalid(format!("{name} phase is not subharmonic at {p:?}: {lap}"));
                    }
                }
            }
        }
        let near_origin_grad = |u: &HField| -> Result<f64> {
            let mut m: f64 = 0.0;
            for p in &samples {
                let q = dilate(1e-4, p)?;
                if u.value(&q) > 0.0 {
                    m = m.max(u.horizontal_gradient_sq(&q)?);
                }
            }
            Ok(m)
        };
        let characteristic_origin = near_origin_grad(&plus)? < 1e-6 && near_origin_grad(&minus)? < 1e-6;
        Ok(Self { plus, minus, characteristic_origin })
    }
}

/// `∫_{B_r} |∇_ℍ u|² / |ζ|² dζ`.
pub fn horizontal_energy(field: &HField, r: f64, res: Resolution) -> Result<f64> {
    let grid = koranyi_kernel_grid(r, res, &field.breaks)?;
    grid.try_integrate(|c| field.horizontal_gradient_sq(&point(c[0], c[1], c[2])))
}

/// `J_β(r) = r^{−β} I₁(r) I₂(r)`.
pub fn j_beta(pair: &HTwoPhasePair, r: f64, beta: f64, res: Resolution) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return invalid(format!("radius must lie in (0, 1], got {r}"));
    }
    if !(beta > 0.0) {
        return invalid(format!("β must be positive, got {beta}"));
    }
    let i1 = horizontal_energy(&pair.plus, r, res)?;
    let i2 = horizontal_energy(&pair.minus, r, res)?;
    Ok(r.powf(-beta) * i1 * i2)
}

/// `∫_{∂B₁} |∇_ℍ u|²/√(x² + y²) dP`, with `dP = √(sin φ) dθ dφ`.
pub fn boundary_energy(field: &HField, res: Resolution) -> Result<f64> {
    let grid = polar_sphere_grid(
        (0.0, PI),
        (0.0, 2.0 * PI),
        res.n_phi,
        res.n_theta,
        &field.breaks,
        Density::KoranyiPerimeter,
    )?;
    grid.try_integrate(|c| {
        let p = point(1.0, c[0], c[1]);
        let z = p.x[0].hypot(p.y[0]);
        Ok(field.horizontal_gradient_sq(&p)? / z)
    })
}

/// Boundary energy on `∂B₁` over the weighted energy on `B₁`.
pub fn boundary_quotient(field: &HField, res: Resolution) -> Result<f64> {
    let den = horizontal_energy(field, 1.0, res)?;
    if !(den > 0.0) {
        return Err(Error::DegenerateField("zero horizontal energy on B₁".into()));
    }
    Ok(boundary_energy(field, res)? / den)
}

/// `J_β′(1)/J_β(1)` = quotient(u₁) + quotient(u₂) − β.
pub fn j_log_derivative(pair: &HTwoPhasePair, beta: f64, res: Resolution) -> Result<f64> {
    Ok(boundary_quotient(&pair.plus, res)? + boundary_quotient(&pair.minus, res)? - beta)
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    /// Sum of the two boundary quotients.
    pub left: f64,
    /// `2 Σ (√(1 + λᵢ) − 1)`.
    pub right: f64,
    pub tolerance: f64,
    pub degenerate: bool,
    /// `None` when a phase is degenerate.
    pub pass: Option<bool>,
}

/// Compares the quotient sum with the bound from eigenvalue lower bounds
/// `lambdas` for the two supports.
pub fn lower_bound_check(
    pair: &HTwoPhasePair,
    lambdas: [f64; 2],
    tolerance: f64,
    res: Resolution,
) -> Result<LowerBoundReport> {
    let right = 2.0 * (alpha_h1(lambdas[0])? + alpha_h1(lambdas[1])?);
    let quotients = [boundary_quotient(&pair.plus, res), boundary_quotient(&pair.minus, res)];
    match quotients {
        [Ok(a), Ok(b)] => {
            let left = a + b;
            Ok(LowerBoundReport { left, right, tolerance, degenerate: false, pass: Some(left >= right - tolerance) })
        }
        [Err(Error::DegenerateField(_)), _] | [_, Err(Error::DegenerateField(_))] => {
            Ok(LowerBoundReport { left: f64::NAN, right, tolerance, degenerate: true, pass: None })
        }
        [Err(e), _] | [_, Err(e)] => Err(e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientBoundReport {
    /// `(ρ, ratio)` pairs.
    pub ratios: Vec<(f64, f64)>,
    pub sup: f64,
    /// `(max − min)/max` over the ratios.
    pub variation: f64,
}

/// For each `ρ`, `∫_{B_ρ} |∇u|²/|ζ|² ÷ (ρ⁻⁴ ∫_{B_{2ρ} ∖ B_ρ} u²)`.
pub fn gradient_bound_diagnostic(field: &HField, rho_grid: &[f64], res: Resolution) -> Result<GradientBoundReport> {
    if rho_grid.is_empty() {
        return invalid("empty ρ grid");
    }
    let mut ratios = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        if !(rho > 0.0 && rho <= 0.5) {
            return invalid(format!("ρ must lie in (0, 1/2], got {rho}"));
        }
        let energy = horizontal_energy(field, rho, res)?;
        let shell = koranyi_shell_grid(rho, 2.0 * rho, res, &field.breaks)?;
        let mass = shell.integrate(|c| {
            let u = field.value(&point(c[0], c[1], c[2]));
            u * u
        });
        if !(mass > 0.0) {
            return Err(Error::DegenerateField(format!("zero L² mass on the annulus at ρ = {rho}")));
        }
        ratios.push((rho, energy / (mass / rho.powf(Q))));
    }
    let sup = ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let inf = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(GradientBoundReport { ratios, sup, variation: (sup - inf) / sup })
}
