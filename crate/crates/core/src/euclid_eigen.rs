//! Spherical-cap eigenvalues on S^{n−1}, characteristic constants,
//! β-weights and the lower-bound function ψ.
//!
//! For a cap `{φ < φ₀}` around the north pole, the first Dirichlet
//! eigenfunction of the Laplace–Beltrami operator depends on the polar
//! angle only and solves
//!
//! ```text
//!     (sin^{n−2}φ F′)′ + λ sin^{n−2}φ F = 0,   F′(0) = 0,  F(φ₀) = 0.
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre;
use crate::sturm::{Endpoint, SturmProblem};

/// Smallest mesh accepted by the eigen solvers.
pub const MIN_MESH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclidCap {
    pub phi0: f64,
    pub n: usize,
}

impl EuclidCap {
    pub fn new(phi0: f64, n: usize) -> Result<Self> {
        if !(phi0 > 0.0 && phi0 < PI) {
            return invalid(format!("cap half-angle must lie in (0, π), got {phi0}"));
        }
        if n < 3 {
            return invalid(format!("dimension must be at least 3, got {n}"));
        }
        Ok(Self { phi0, n })
    }

    /// Cap with a prescribed fraction `s` of the sphere's area.
    pub fn from_area_fraction(s: f64, n: usize) -> Result<Self> {
        Self::new(half_angle(s, n)?, n)
    }

    pub fn area_fraction(&self) -> f64 {
        area_fraction(self.phi0, self.n)
    }
}

/// First eigenpair together with its characteristic constant.
#[derive(Debug, Clone, Serialize)]
pub struct EigenSolution {
    pub lambda: f64,
    pub alpha: f64,
    /// `α` solves `α² + alpha_offset·α = λ` (`n − 2` for caps on S^{n−1},
    /// `2` for the Heisenberg φ-problem).
    pub alpha_offset: f64,
    /// φ-grid on which the eigenfunction is sampled.
    pub grid: Vec<f64>,
    /// Eigenfunction samples, positive inside, maximum 1.
    pub eigenfunction: Vec<f64>,
    pub mesh_size: usize,
    pub est_error: f64,
}

impl EigenSolution {
    /// Linear interpolation of the sampled eigenfunction.
    pub fn eigenfunction_at(&self, phi: f64) -> f64 {
        let g = &self.grid;
        let (a, b) = (g[0], g[g.len() - 1]);
        if phi <= a {
            return self.eigenfunction[0];
        }
        if phi >= b {
            return self.eigenfunction[g.len() - 1];
        }
        let h = (b - a) / (g.len() - 1) as f64;
        let i = (((phi - a) / h) as usize).min(g.len() - 2);
        let s = (phi - g[i]) / h;
        (1.0 - s) * self.eigenfunction[i] + s * self.eigenfunction[i + 1]
    }
}

pub(crate) fn check_mesh(mesh: usize) -> Result<()> {
    if mesh < MIN_MESH {
        return invalid(format!("mesh must be at least {MIN_MESH}, got {mesh}"));
    }
    Ok(())
}

/// First Dirichlet eigenvalue of the cap, Richardson-extrapolated.
pub fn cap_eigenvalue(cap: EuclidCap, mesh: usize) -> Result<EigenSolution> {
    let cap = EuclidCap::new(cap.phi0, cap.n)?;
    check_mesh(mesh)?;
    let m = (cap.n - 2) as i32;
    let problem = SturmProblem {
        a: 0.0,
        b: cap.phi0,
        left: Endpoint::Regular,
        right: Endpoint::Dirichlet,
        p: move |phi: f64| phi.sin().powi(m),
        w: move |phi: f64| phi.sin().powi(m),
    };
    let sol = problem.solve_extrapolated(mesh)?;
    Ok(EigenSolution {
        lambda: sol.lambda,
        alpha: characteristic_constant(sol.lambda.max(0.0), cap.n)?,
        alpha_offset: (cap.n - 2) as f64,
        grid: sol.fine.grid,
        eigenfunction: sol.fine.values,
        mesh_size: sol.coarse.mesh,
        est_error: sol.est_error,
    })
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        return invalid(format!("dimension must be at least 3, got {n}"));
    }
    Ok(())
}

/// Nonnegative root of `α² + (n − 2)α − λ = 0`.
pub fn characteristic_constant(lambda: f64, n: usize) -> Result<f64> {
    check_dimension(n)?;
    if !(lambda >= 0.0) {
        return invalid(format!("eigenvalue must be nonnegative, got {lambda}"));
    }
    let m = (n - 2) as f64;
    // Written to avoid cancellation for small λ.
    Ok(2.0 * lambda / (m + (m * m + 4.0 * lambda).sqrt()).max(f64::MIN_POSITIVE))
}

/// `β = (2√λ / ((n − 2) + √((n − 2)² + 4λ)))²`, so that `√(βλ) = α`.
pub fn beta_weight(lambda: f64, n: usize) -> Result<f64> {
    check_dimension(n)?;
    if !(lambda > 0.0) {
        return invalid(format!("eigenvalue must be positive, got {lambda}"));
    }
    let m = (n - 2) as f64;
    let q = 2.0 * lambda.sqrt() / (m + (m * m + 4.0 * lambda).sqrt());
    Ok(q * q)
}

/// `ψ(s) = ½ ln(1/(4s)) + 3/2` for `s ≤ 1/4`, `2(1 − s)` otherwise.
pub fn psi(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("area fraction must lie in (0, 1), got {s}"));
    }
    Ok(if s <= 0.25 { 0.5 * (1.0 / (4.0 * s)).ln() + 1.5 } else { 2.0 * (1.0 - s) })
}

/// `ψ(s₁) + ψ(s₂)` for two disjoint caps.
pub fn cap_sum_bound(s1: f64, s2: f64) -> Result<f64> {
    if s1 + s2 > 1.0 {
        return invalid(format!("area fractions {s1} + {s2} exceed 1: phases overlap"));
    }
    Ok(psi(s1)? + psi(s2)?)
}

/// Fraction of the area of S^{n−1} covered by the cap of half-angle `phi0`.
pub fn area_fraction(phi0: f64, n: usize) -> f64 {
    if n == 3 {
        return 0.5 * (1.0 - phi0.cos());
    }
    let m = (n - 2) as i32;
    let integral = |b: f64| -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        let rule = gauss_legendre(48, 0.0, b).expect("valid Gauss rule");
        rule.integrate(|x| x.sin().powi(m))
    };
    integral(phi0.clamp(0.0, PI)) / integral(PI)
}

/// Half-angle of the cap covering area fraction `s` of S^{n−1}.
pub fn half_angle(s: f64, n: usize) -> Result<f64> {
    check_dimension(n)?;
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("area fraction must lie in (0, 1), got {s}"));
    }
    if n == 3 {
        return Ok((1.0 - 2.0 * s).acos());
    }
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if area_fraction(mid, n) < s {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
