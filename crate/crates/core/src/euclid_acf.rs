//! The Euclidean ACF functional in ℝ³
//!
//! ```text
//!     Φ(r) = r⁻⁴ I₁(r) I₂(r),   I_i(r) = ∫_{B_r} |∇u_i|² / |x| dx,
//! ```
//!
//! the rescaling `(u)_r(x) = u(rx)/r`, the boundary-to-volume ratios
//! `J_i` and the logarithmic derivative `rΦ′/Φ = −4 + J₁ + J₂` at `r = 1`.
//!
//! Spherical coordinates are `x = ρ sin φ cos θ, y = ρ sin φ sin θ,
//! z = ρ cos φ`.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::euclid_eigen::EigenSolution;
use crate::jet::Jet;
use crate::quadrature::{euclid_ball_grid_with_breaks, euclid_sphere_grid, PolarBreaks, Resolution};
use crate::special::legendre_p;

/// Central-difference step for fields without closed-form gradients.
pub const FD_STEP: f64 = 1e-5;

type ScalarFn = dyn Fn([f64; 3]) -> f64 + Send + Sync;
type GradFn = dyn Fn([f64; 3]) -> [f64; 3] + Send + Sync;
type SupportFn = dyn Fn([f64; 3]) -> bool + Send + Sync;

#[derive(Clone)]
pub struct EuclidField {
    value: Arc<ScalarFn>,
    gradient: Arc<GradFn>,
    support: Arc<SupportFn>,
    pub breaks: PolarBreaks,
}

impl std::fmt::Debug for EuclidField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EuclidField").field("breaks", &self.breaks).finish_non_exhaustive()
    }
}

pub fn spherical_to_cartesian(rho: f64, phi: f64, theta: f64) -> [f64; 3] {
    let s = phi.sin();
    [rho * s * theta.cos(), rho * s * theta.sin(), rho * phi.cos()]
}

impl EuclidField {
    /// Field written over jets; value and gradient are exact.
    pub fn from_jet<F>(f: F) -> Self
    where
        F: Fn([Jet<3>; 3]) -> Jet<3> + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let (fv, fs) = (Arc::clone(&f), Arc::clone(&f));
        Self {
            value: Arc::new(move |x| fv(Jet::seed(x)).value),
            gradient: Arc::new(move |x| f(Jet::seed(x)).grad),
            support: Arc::new(move |x| fs(Jet::seed(x)).value > 0.0),
            breaks: PolarBreaks::none(),
        }
    }

    /// Field known by values; gradient by central differences with [`FD_STEP`].
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let (fg, fs) = (Arc::clone(&f), Arc::clone(&f));
        Self {
            value: f,
            gradient: Arc::new(move |x| {
                std::array::from_fn(|i| {
                    let (mut xp, mut xm) = (x, x);
                    xp[i] += FD_STEP;
                    xm[i] -= FD_STEP;
                    (fg(xp) - fg(xm)) / (2.0 * FD_STEP)
                })
            }),
            support: Arc::new(move |x| fs(x) > 0.0),
            breaks: PolarBreaks::none(),
        }
    }

    pub fn with_breaks(mut self, breaks: PolarBreaks) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn value(&self, x: [f64; 3]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: [f64; 3]) -> [f64; 3] {
        (self.gradient)(x)
    }

    pub fn gradient_sq(&self, x: [f64; 3]) -> f64 {
        self.gradient(x).iter().map(|g| g * g).sum()
    }

    pub fn in_support(&self, x: [f64; 3]) -> bool {
        (self.support)(x)
    }

    /// `c · u` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let (v, g) = (Arc::clone(&self.value), Arc::clone(&self.gradient));
        Self {
            value: Arc::new(move |x| c * v(x)),
            gradient: Arc::new(move |x| g(x).map(|d| c * d)),
            support: Arc::clone(&self.support),
            breaks: self.breaks.clone(),
        }
    }

    pub fn zero() -> Self {
        Self::from_jet(|_| Jet::zero())
    }

    /// `x₃⁺`.
    pub fn half_space_plus() -> Self {
        Self::from_jet(|[_, _, z]| z.pos()).with_breaks(PolarBreaks::new(vec![std::f64::consts::FRAC_PI_2], vec![]))
    }

    /// `x₃⁻`.
    pub fn half_space_minus() -> Self {
        Self::from_jet(|[_, _, z]| z.neg_part())
            .with_breaks(PolarBreaks::new(vec![std::f64::consts::FRAC_PI_2], vec![]))
    }

    /// Harmonic field `|x|^α P_ν(±cos φ)` on a polar cap, from the cap's
    /// eigenpair (`ν(ν + 1) = λ`). `north` selects the cap `{φ < φ₀}`,
    /// otherwise the cap `{φ > π − φ₀}` is used.
    pub fn cap_eigenfield(phi0: f64, eigen: &EigenSolution, north: bool) -> Result<Self> {
        if !(phi0 > 0.0 && phi0 < std::f64::consts::PI) {
            return invalid(format!("cap half-angle must lie in (0, π), got {phi0}"));
        }
        let (lambda, alpha) = (eigen.lambda, eigen.alpha);
        let nu = legendre_degree(lambda);
        let cos0 = phi0.cos();
        let sign = if north { 1.0 } else { -1.0 };
        let break_at = if north { phi0 } else { std::f64::consts::PI - phi0 };
        Ok(Self::from_jet(move |[x, y, z]| {
            let r = (x * x + y * y + z * z).sqrt();
            if r.value == 0.0 {
                return Jet::zero();
            }
            let c = z / r * sign;
            if c.value <= cos0 {
                return Jet::zero();
            }
            let (p, dp, d2p) = legendre_p(nu, c.value).expect("argument inside (-1, 1]");
            (r.powf(alpha) * c.chain(p, dp, d2p)).pos()
        })
        .with_breaks(PolarBreaks::new(vec![break_at], vec![])))
    }
}

/// Degree `ν ≥ −1/2` with `ν(ν + 1) = λ`.
pub fn legendre_degree(lambda: f64) -> f64 {
    0.5 * ((1.0 + 4.0 * lambda).sqrt() - 1.0)
}

/// Nonnegative fields with disjoint supports.
#[derive(Debug, Clone)]
pub struct TwoPhasePair {
    pub plus: EuclidField,
    pub minus: EuclidField,
}

/// Points of a 10 × 10 × 10 lattice in `[−1, 1]³` that lie in `B₁`.
fn ball_samples() -> impl Iterator<Item = [f64; 3]> {
    let c = |i: usize| -0.95 + 0.2 * i as f64 + 0.0123;
    (0..1000)
        .map(move |k| [c(k % 10), c((k / 10) % 10), c(k / 100)])
        .filter(|x| x.iter().map(|v| v * v).sum::<f64>() < 1.0)
}

impl TwoPhasePair {
    pub fn new(plus: EuclidField, minus: EuclidField) -> Result<Self> {
        for x in ball_samples() {
            let (a, b) = (plus.value(x), minus.value(x));
            if a < -1e-12 || b < -1e-12 {
                return invalid(format!("phases must be nonnegative; got {a}, {b} at {x:?}"));
            }
            if (a * b).abs() > 1e-12 {
                return invalid(format!("phases overlap at {x:?}: product {}", a * b));
            }
        }
        Ok(Self { plus, minus })
    }

    pub fn rescaled(&self, r: f64) -> Result<Self> {
        Ok(Self { plus: rescale(&self.plus, r)?, minus: rescale(&self.minus, r)? })
    }
}

/// `I(r) = ∫_{B_r} |∇u|² / |x| dx`.
pub fn weighted_energy(field: &EuclidField, r: f64, res: Resolution) -> Result<f64> {
    let grid = euclid_ball_grid_with_breaks(r, 3, res, &field.breaks)?;
    Ok(grid.integrate(|c| field.gradient_sq(spherical_to_cartesian(c[0], c[1], c[2]))))
}

/// `Φ(r) = r⁻⁴ I₁(r) I₂(r)`.
pub fn phi_functional(pair: &TwoPhasePair, r: f64, res: Resolution) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return invalid(format!("radius must lie in (0, 1], got {r}"));
    }
    let i1 = weighted_energy(&pair.plus, r, res)?;
    let i2 = weighted_energy(&pair.minus, r, res)?;
    Ok(i1 * i2 / r.powi(4))
}

/// `(u)_r(x) = u(rx)/r`.
pub fn rescale(field: &EuclidField, r: f64) -> Result<EuclidField> {
    if !(r > 0.0) || !r.is_finite() {
        return invalid(format!("rescaling factor must be positive, got {r}"));
    }
    let (v, g, s) = (Arc::clone(&field.value), Arc::clone(&field.gradient), Arc::clone(&field.support));
    let scale = move |x: [f64; 3]| x.map(|c| r * c);
    Ok(EuclidField {
        value: Arc::new(move |x| v(scale(x)) / r),
        gradient: Arc::new(move |x| g(scale(x))),
        support: Arc::new(move |x| s(scale(x))),
        breaks: field.breaks.clone(),
    })
}

/// `∫_{∂B₁} |∇u|² dσ`.
pub fn boundary_energy(field: &EuclidField, res: Resolution) -> Result<f64> {
    let grid = euclid_sphere_grid(res, &field.breaks)?;
    Ok(grid.integrate(|c| field.gradient_sq(spherical_to_cartesian(1.0, c[0], c[1]))))
}

/// `J = ∫_{∂B₁} |∇u|² dσ ÷ ∫_{B₁} |∇u|²/|x| dx`.
pub fn j_ratio(field: &EuclidField, res: Resolution) -> Result<f64> {
    let den = weighted_energy(field, 1.0, res)?;
    if !(den > 0.0) {
        return Err(Error::DegenerateField("zero weighted energy on B₁".into()));
    }
    Ok(boundary_energy(field, res)? / den)
}

/// `rΦ′(r)/Φ(r)` at `r = 1`, i.e. `−4 + J(u₁) + J(u₂)`.
pub fn phi_log_derivative(pair: &TwoPhasePair, res: Resolution) -> Result<f64> {
    Ok(-4.0 + j_ratio(&pair.plus, res)? + j_ratio(&pair.minus, res)?)
}
