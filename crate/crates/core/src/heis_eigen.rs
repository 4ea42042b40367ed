//! The φ-interval eigenproblem on the Korányi sphere
//!
//! ```text
//!     4 (sin φ f′)′ = −λ sin φ f   on (φ₀, φ₁),
//! ```
//!
//! its characteristic constant `α(α + 2) = λ`, the link `λ = 4λ_E` with
//! spherical caps in ℝ³, and evaluation of the 1D and 2D Rayleigh
//! quotients.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::euclid_eigen::{cap_eigenvalue, check_mesh, EigenSolution, EuclidCap};
use crate::heis_polar::{from_polar, horizontal_frame, PolarCoord};
use crate::heisenberg_core::HField;
use crate::jet::Jet;
use crate::quadrature::{polar_sphere_grid, Density, PolarBreaks};
use crate::sturm::{Endpoint, SturmProblem};

const POLE_TOL: f64 = 1e-15;

fn is_pole(phi: f64) -> bool {
    phi.abs() < POLE_TOL || (phi - PI).abs() < POLE_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiInterval {
    pub phi0: f64,
    pub phi1: f64,
    #[serde(skip)]
    pub left: Endpoint,
    #[serde(skip)]
    pub right: Endpoint,
}

impl PhiInterval {
    /// Interval with endpoints at the poles singular-regular and all other
    /// endpoints Dirichlet.
    pub fn new(phi0: f64, phi1: f64) -> Result<Self> {
        let kind = |phi: f64| if is_pole(phi) { Endpoint::Regular } else { Endpoint::Dirichlet };
        Self::with_endpoints(phi0, phi1, kind(phi0), kind(phi1))
    }

    pub fn with_endpoints(phi0: f64, phi1: f64, left: Endpoint, right: Endpoint) -> Result<Self> {
        if !(0.0 <= phi0 && phi0 < phi1 && phi1 <= PI) {
            return invalid(format!("need 0 <= φ₀ < φ₁ <= π, got ({phi0}, {phi1})"));
        }
        for (phi, kind) in [(phi0, left), (phi1, right)] {
            if kind == Endpoint::Regular && !is_pole(phi) {
                return invalid(format!("singular-regular endpoint must be 0 or π, got {phi}"));
            }
        }
        Ok(Self { phi0, phi1, left, right })
    }
}

/// First eigenpair of `4(sin φ f′)′ = −λ sin φ f` on the interval.
pub fn sl_eigen(interval: PhiInterval, mesh: usize) -> Result<EigenSolution> {
    let interval = PhiInterval::with_endpoints(interval.phi0, interval.phi1, interval.left, interval.right)?;
    check_mesh(mesh)?;
    let problem = SturmProblem {
        a: interval.phi0,
        b: interval.phi1,
        left: interval.left,
        right: interval.right,
        p: |phi: f64| 4.0 * phi.sin(),
        w: f64::sin,
    };
    let sol = problem.solve_extrapolated(mesh)?;
    Ok(EigenSolution {
        lambda: sol.lambda,
        alpha: alpha_h1(sol.lambda.max(0.0))?,
        alpha_offset: 2.0,
        grid: sol.fine.grid,
        eigenfunction: sol.fine.values,
        mesh_size: sol.coarse.mesh,
        est_error: sol.est_error,
    })
}

/// Nonnegative root of `α² + 2α − λ = 0`, i.e. `√(1 + λ) − 1`.
pub fn alpha_h1(lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return invalid(format!("eigenvalue must be nonnegative, got {lambda}"));
    }
    Ok(lambda / ((1.0 + lambda).sqrt() + 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct Bridge {
    pub phi0: f64,
    pub lambda_h: f64,
    pub lambda_e: f64,
    pub ratio: f64,
    /// Largest gap between the two max-normalized eigenfunctions.
    pub eigenfunction_gap: f64,
    pub est_error: f64,
}

/// Solves the φ-problem on `(0, φ₀)` and the cap problem on S² and compares.
pub fn euclid_bridge(phi0: f64, mesh: usize) -> Result<Bridge> {
    if !(phi0 > 0.0 && phi0 < PI) {
        return invalid(format!("φ₀ must lie in (0, π), got {phi0}"));
    }
    let h = sl_eigen(PhiInterval::new(0.0, phi0)?, mesh)?;
    let e = cap_eigenvalue(EuclidCap::new(phi0, 3)?, mesh)?;
    let eigenfunction_gap =
        h.grid.iter().zip(&h.eigenfunction).map(|(&phi, &f)| (f - e.eigenfunction_at(phi)).abs()).fold(0.0, f64::max);
    Ok(Bridge {
        phi0,
        lambda_h: h.lambda,
        lambda_e: e.lambda,
        ratio: h.lambda / e.lambda,
        eigenfunction_gap,
        est_error: h.est_error + 4.0 * e.est_error,
    })
}

/// A `(φ, θ)` rectangle on `∂B₁^{ℍ¹}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceRegion {
    pub phi: (f64, f64),
    pub theta: (f64, f64),
}

impl SurfaceRegion {
    pub fn phi_band(phi0: f64, phi1: f64) -> Self {
        Self { phi: (phi0, phi1), theta: (0.0, 2.0 * PI) }
    }
}

/// `∫_Σ |∇^φ u|²/√(x²+y²) dP ÷ ∫_Σ u² √(x²+y²) dP` for the given field,
/// with `dP = √(sin φ) dθ dφ` on the unit Korányi sphere.
pub fn rayleigh_phi(field: &HField, region: SurfaceRegion, n_phi: usize, n_theta: usize) -> Result<f64> {
    let grid = polar_sphere_grid(region.phi, region.theta, n_phi, n_theta, &field.breaks, Density::KoranyiPerimeter)?;
    let point = |c: &[f64]| from_polar(&PolarCoord { rho: 1.0, phi: c[0], theta: c[1], on_axis: false });
    let num = grid.try_integrate(|c| {
        let p = point(c);
        let z = (p.x[0] * p.x[0] + p.y[0] * p.y[0]).sqrt();
        let frame = horizontal_frame(&p)?;
        let g = field.horizontal_gradient(&p)?;
        let a = g[0] * frame.e_phi[0] + g[1] * frame.e_phi[1];
        Ok(a * a / z)
    })?;
    let den = grid.integrate(|c| {
        let p = point(c);
        let z = (p.x[0] * p.x[0] + p.y[0] * p.y[0]).sqrt();
        let u = field.value(&p);
        u * u * z
    });
    if !(den > 0.0) {
        return Err(Error::DegenerateField("field vanishes on the support region".into()));
    }
    Ok(num / den)
}

/// The 2D quotient
/// `∫ (f_θ²/sin φ + 4 sin φ f_θ f_φ + 4 sin φ f_φ²) ÷ ∫ sin φ f²` over a
/// `(θ, φ)` rectangle; `f` takes jets in `(θ, φ)`.
pub fn rayleigh_2d<F>(f: F, region: SurfaceRegion, n_phi: usize, n_theta: usize) -> Result<f64>
where
    F: Fn(Jet<2>, Jet<2>) -> Jet<2> + Sync,
{
    if region.phi.0 <= 0.0 || region.phi.1 >= PI {
        return Err(Error::CharacteristicAxis);
    }
    let grid = polar_sphere_grid(region.phi, region.theta, n_phi, n_theta, &PolarBreaks::none(), Density::Unit)?;
    let num = grid.integrate(|c| {
        let (phi, theta) = (c[0], c[1]);
        let [th, ph] = Jet::seed([theta, phi]);
        let j = f(th, ph);
        let s = phi.sin();
        let (ft, fp) = (j.grad[0], j.grad[1]);
        ft * ft / s + 4.0 * s * ft * fp + 4.0 * s * fp * fp
    });
    let den = grid.integrate(|c| {
        let v = f(Jet::constant(c[1]), Jet::constant(c[0])).value;
        c[0].sin() * v * v
    });
    if !(den > 0.0) {
        return Err(Error::DegenerateField("zero denominator in the 2D quotient".into()));
    }
    Ok(num / den)
}

/// `A(θ, φ) = [[1/sin φ, (4 + 2α) sin φ], [−2α sin φ, 4 sin φ]]`.
pub fn divergence_matrix(_theta: f64, phi: f64, alpha: f64) -> Result<[[f64; 2]; 2]> {
    let s = phi.sin();
    if !(phi > 0.0 && phi < PI) || s <= 0.0 {
        return Err(Error::CharacteristicAxis);
    }
    Ok([[1.0 / s, (4.0 + 2.0 * alpha) * s], [-2.0 * alpha * s, 4.0 * s]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_interval_gives_eight() {
        let sol = sl_eigen(PhiInterval::new(0.0, PI / 2.0).unwrap(), 64).unwrap();
        assert!((sol.lambda - 8.0).abs() < 1e-7, "{}", sol.lambda);
        assert!((sol.alpha - 2.0).abs() < 1e-8);
        let south = sl_eigen(PhiInterval::new(PI / 2.0, PI).unwrap(), 64).unwrap();
        assert!((south.lambda - 8.0).abs() < 1e-7);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_h1(8.0).unwrap(), 2.0);
        assert_eq!(alpha_h1(0.0).unwrap(), 0.0);
        assert_eq!(alpha_h1(3.0).unwrap(), 1.0);
        assert!(alpha_h1(-0.1).is_err());
    }

    #[test]
    fn interval_validation() {
        assert!(PhiInterval::new(1.0, 0.5).is_err());
        assert!(PhiInterval::with_endpoints(0.2, 1.0, Endpoint::Regular, Endpoint::Dirichlet).is_err());
        let i = PhiInterval::new(0.0, PI).unwrap();
        assert_eq!((i.left, i.right), (Endpoint::Regular, Endpoint::Regular));
        assert!(sl_eigen(PhiInterval::new(0.0, 1.0).unwrap(), 8).is_err());
    }

    #[test]
    fn matrix_entries() {
        assert_eq!(divergence_matrix(0.3, PI / 2.0, 1.0).unwrap(), [[1.0, 6.0], [-2.0, 4.0]]);
        let a = divergence_matrix(0.0, 1.0, 0.0).unwrap();
        assert_eq!(a[1][0], 0.0);
        assert!(divergence_matrix(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn cos_phi_quotient_is_eight() {
        let u = HField::h1(|x, y, t| {
            let z2 = x * x + y * y;
            t / (z2 * z2 + t * t).sqrt()
        });
        let q = rayleigh_phi(&u, SurfaceRegion::phi_band(0.0, PI / 2.0), 64, 16).unwrap();
        assert!((q - 8.0).abs() < 1e-9, "{q}");
        let q7 = rayleigh_phi(&u.scaled(7.0), SurfaceRegion::phi_band(0.0, PI / 2.0), 64, 16).unwrap();
        assert!((q7 - q).abs() < 1e-12 * q);
    }
}
