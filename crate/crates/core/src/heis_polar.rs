//! Korányi polar coordinates on ℍ¹:
//!
//! ```text
//!     x = ρ √(sin φ) cos θ,   y = ρ √(sin φ) sin θ,   t = ρ² cos φ,
//! ```
//!
//! the horizontal gradients of `ρ, φ, θ`, the orthonormal frame
//! `(e_ρ, e_φ)` and the polar form of the sublaplacian of `ρ^α f(θ, φ)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::heisenberg_core::{gauge_norm, HField, HPoint};
use crate::jet::Jet;

/// Points with `x² + y² ≤ AXIS_TOL · ρ²` are treated as lying on the
/// characteristic axis.
pub const AXIS_TOL: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarCoord {
    pub rho: f64,
    pub phi: f64,
    pub theta: f64,
    /// Set when the point lies on the `t`-axis; `theta` is then 0.
    pub on_axis: bool,
}

impl PolarCoord {
    pub fn new(rho: f64, phi: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return invalid(format!("ρ must be positive, got {rho}"));
        }
        if !(0.0..=PI).contains(&phi) {
            return invalid(format!("φ must lie in [0, π], got {phi}"));
        }
        if !theta.is_finite() {
            return invalid("θ must be finite");
        }
        Ok(Self { rho, phi, theta: theta.rem_euclid(2.0 * PI), on_axis: phi == 0.0 || phi == PI })
    }
}

pub fn to_polar(p: &HPoint) -> Result<PolarCoord> {
    check_h1(p)?;
    if p.is_origin() {
        return Err(Error::Pole);
    }
    let (x, y, t) = (p.x[0], p.y[0], p.t);
    let z2 = x * x + y * y;
    let rho = gauge_norm(p);
    let on_axis = z2 <= AXIS_TOL * rho * rho;
    let theta = if on_axis { 0.0 } else { y.atan2(x).rem_euclid(2.0 * PI) };
    Ok(PolarCoord { rho, phi: z2.atan2(t), theta, on_axis })
}

pub fn from_polar(c: &PolarCoord) -> HPoint {
    let s = c.rho * c.phi.sin().max(0.0).sqrt();
    HPoint::h1(s * c.theta.cos(), s * c.theta.sin(), c.rho * c.rho * c.phi.cos())
}

fn check_h1(p: &HPoint) -> Result<()> {
    if p.n() != 1 {
        return invalid(format!("polar coordinates are defined on ℍ¹, got ℍ^{}", p.n()));
    }
    Ok(())
}

fn off_axis(p: &HPoint) -> Result<(f64, f64, f64, f64, f64)> {
    check_h1(p)?;
    if p.is_origin() {
        return Err(Error::Pole);
    }
    let (x, y, t) = (p.x[0], p.y[0], p.t);
    let z2 = x * x + y * y;
    let rho = gauge_norm(p);
    if z2 <= AXIS_TOL * rho * rho {
        return Err(Error::CharacteristicAxis);
    }
    Ok((x, y, t, z2, rho))
}

/// Horizontal gradients as coefficients on `(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarGradients {
    pub rho: [f64; 2],
    pub phi: [f64; 2],
    pub theta: [f64; 2],
}

/// `∇ρ = ρ⁻³((x² + y²)x + ty, (x² + y²)y − tx)`,
/// `∇φ = 2(t∇ρ + ρ(−y, x)) / (ρ(x² + y²))`, `∇θ = (−y, x)/(x² + y²)`.
pub fn polar_gradients(p: &HPoint) -> Result<PolarGradients> {
    let (x, y, t, z2, rho) = off_axis(p)?;
    let r3 = rho * rho * rho;
    let grad_rho = [(z2 * x + t * y) / r3, (z2 * y - t * x) / r3];
    let k = 2.0 / (rho * z2);
    let grad_phi = [k * (t * grad_rho[0] - rho * y), k * (t * grad_rho[1] + rho * x)];
    Ok(PolarGradients { rho: grad_rho, phi: grad_phi, theta: [-y / z2, x / z2] })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorizontalFrame {
    pub e_rho: [f64; 2],
    pub e_phi: [f64; 2],
}

fn normalized(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

pub fn horizontal_frame(p: &HPoint) -> Result<HorizontalFrame> {
    let g = polar_gradients(p)?;
    Ok(HorizontalFrame { e_rho: normalized(g.rho), e_phi: normalized(g.phi) })
}

/// `(⟨∇u, e_ρ⟩², ⟨∇u, e_φ⟩²)`; their sum is `|∇_ℍ u|²`.
pub fn gradient_split(field: &HField, p: &HPoint) -> Result<(f64, f64)> {
    let frame = horizontal_frame(p)?;
    let g = field.horizontal_gradient(p)?;
    let r = g[0] * frame.e_rho[0] + g[1] * frame.e_rho[1];
    let a = g[0] * frame.e_phi[0] + g[1] * frame.e_phi[1];
    Ok((r * r, a * a))
}

fn check_sin(phi: f64) -> Result<f64> {
    let s = phi.sin();
    if !(phi > 0.0 && phi < PI) || s <= AXIS_TOL {
        return Err(Error::CharacteristicAxis);
    }
    Ok(s)
}

/// `Δ_ℍ(ρ^α f(θ, φ))` by the polar formula. `f` takes jets in `(θ, φ)`.
pub fn sublaplacian_polar<F>(alpha: f64, f: F, c: &PolarCoord) -> Result<f64>
where
    F: Fn(Jet<2>, Jet<2>) -> Jet<2>,
{
    let s = check_sin(c.phi)?;
    let co = c.phi.cos();
    let [th, ph] = Jet::seed([c.theta, c.phi]);
    let j = f(th, ph);
    let (f0, ft, fp) = (j.value, j.grad[0], j.grad[1]);
    let (ftt, ftp, fpp) = (j.hess[0][0], j.hess[0][1], j.hess[1][1]);
    let bracket = alpha * (alpha + 2.0) * s * f0 - 2.0 * alpha * co * ft
        + ftt / s
        + 4.0 * s * ftp
        + 4.0 * s * fpp
        + 4.0 * co * fp;
    Ok(c.rho.powf(alpha - 2.0) * bracket)
}

/// `Δ_ℍ(ρ^α f(φ)) = ρ^{α−2}(α(α+2) sin φ f + 4 (sin φ f′)′)`.
pub fn sublaplacian_polar_phi<F>(alpha: f64, f: F, c: &PolarCoord) -> Result<f64>
where
    F: Fn(Jet<1>) -> Jet<1>,
{
    let s = check_sin(c.phi)?;
    let [ph] = Jet::seed([c.phi]);
    let j = f(ph);
    let div = c.phi.cos() * j.grad[0] + s * j.hess[0][0];
    Ok(c.rho.powf(alpha - 2.0) * (alpha * (alpha + 2.0) * s * j.value + 4.0 * div))
}

/// `ρ`, `φ` and `θ` as jets in `(x, y, t)`.
pub fn polar_jets(x: Jet<3>, y: Jet<3>, t: Jet<3>) -> (Jet<3>, Jet<3>, Jet<3>) {
    let z2 = x * x + y * y;
    let rho = (z2 * z2 + t * t).powf(0.25);
    (rho, z2.atan2(t), y.atan2(x))
}

/// The field `ρ^α f(θ, φ)` on ℍ¹.
pub fn homogeneous_field<F>(alpha: f64, f: F) -> HField
where
    F: Fn(Jet<3>, Jet<3>) -> Jet<3> + Send + Sync + 'static,
{
    HField::h1(move |x, y, t| {
        let (rho, phi, theta) = polar_jets(x, y, t);
        rho.powf(alpha) * f(theta, phi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_examples() {
        let c = to_polar(&HPoint::h1(1.0, 0.0, 0.0)).unwrap();
        assert_eq!((c.rho, c.phi, c.theta, c.on_axis), (1.0, PI / 2.0, 0.0, false));
        let c = to_polar(&HPoint::h1(0.0, 0.0, 1.0)).unwrap();
        assert_eq!((c.rho, c.phi, c.theta, c.on_axis), (1.0, 0.0, 0.0, true));
        assert_eq!(to_polar(&HPoint::origin(1)), Err(Error::Pole));
        let q = HPoint::h1(-0.3, 0.8, -0.25);
        let back = from_polar(&to_polar(&q).unwrap());
        assert!((back.x[0] - q.x[0]).abs() < 1e-15 && (back.y[0] - q.y[0]).abs() < 1e-15);
        assert!((back.t - q.t).abs() < 1e-15);
    }

    #[test]
    fn axis_is_refused() {
        let p = HPoint::h1(0.0, 0.0, -2.0);
        assert_eq!(polar_gradients(&p), Err(Error::CharacteristicAxis));
        let c = PolarCoord::new(1.0, 0.0, 0.0).unwrap();
        assert!(sublaplacian_polar_phi(1.0, |p| p.cos(), &c).is_err());
    }

    #[test]
    fn frame_is_orthonormal() {
        let f = horizontal_frame(&HPoint::h1(0.4, -0.1, 0.9)).unwrap();
        let dot = f.e_rho[0] * f.e_phi[0] + f.e_rho[1] * f.e_phi[1];
        assert!(dot.abs() < 1e-14);
        assert!((f.e_rho[0].hypot(f.e_rho[1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polar_sublaplacian_examples() {
        for &(rho, phi, theta) in &[(0.7, 0.3, 1.0), (1.3, 2.0, 4.0)] {
            let c = PolarCoord::new(rho, phi, theta).unwrap();
            let lap_t = sublaplacian_polar_phi(2.0, |p| p.cos(), &c).unwrap();
            assert!(lap_t.abs() < 1e-14);
            let lap_fund = sublaplacian_polar(-2.0, |_, _| Jet::constant(1.0), &c).unwrap();
            assert_eq!(lap_fund, 0.0);
        }
    }

    #[test]
    fn split_of_t_at_unit_point() {
        let u = HField::h1(|_, _, t| t);
        let (r, a) = gradient_split(&u, &HPoint::h1(1.0, 0.0, 0.0)).unwrap();
        assert!((r + a - 4.0).abs() < 1e-14);
        let radial = homogeneous_field(1.7, |_, _| Jet::constant(1.0));
        let (_, a) = gradient_split(&radial, &HPoint::h1(0.2, 0.5, -0.3)).unwrap();
        assert!(a < 1e-28);
    }
}
