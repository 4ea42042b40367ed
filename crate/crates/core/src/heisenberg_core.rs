//! Group law, gauge norm, dilations and horizontal calculus on ℍⁿ.
//!
//! Points are `(x, y, t)` with `x, y ∈ ℝⁿ`. The left-invariant horizontal
//! fields are `X_i = ∂_{x_i} + 2y_i ∂_t` and `Y_i = ∂_{y_i} − 2x_i ∂_t`;
//! Euclidean coordinates are ordered `(x₁, …, x_n, y₁, …, y_n, t)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::jet::Jet;
use crate::quadrature::PolarBreaks;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
}

impl HPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, t: f64) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return invalid(format!("x and y must have equal nonzero length, got {} and {}", x.len(), y.len()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) || !t.is_finite() {
            return invalid("point has non-finite components");
        }
        Ok(Self { x, y, t })
    }

    /// A point of ℍ¹.
    pub fn h1(x: f64, y: f64, t: f64) -> Self {
        Self { x: vec![x], y: vec![y], t }
    }

    pub fn origin(n: usize) -> Self {
        Self { x: vec![0.0; n], y: vec![0.0; n], t: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn is_origin(&self) -> bool {
        self.t == 0.0 && self.x.iter().chain(&self.y).all(|&v| v == 0.0)
    }

    /// `|x|² + |y|²`.
    pub fn horizontal_norm_sq(&self) -> f64 {
        self.x.iter().chain(&self.y).map(|v| v * v).sum()
    }

    /// Euclidean coordinates `(x, y, t)` as one vector.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(2 * self.n() + 1);
        c.extend_from_slice(&self.x);
        c.extend_from_slice(&self.y);
        c.push(self.t);
        c
    }

    pub fn from_coords(c: &[f64]) -> Result<Self> {
        if c.len() < 3 || c.len().is_multiple_of(2) {
            return invalid(format!("expected 2n + 1 coordinates, got {}", c.len()));
        }
        let n = (c.len() - 1) / 2;
        Self::new(c[..n].to_vec(), c[n..2 * n].to_vec(), c[2 * n])
    }

    pub fn inverse(&self) -> Self {
        Self { x: self.x.iter().map(|v| -v).collect(), y: self.y.iter().map(|v| -v).collect(), t: -self.t }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// `P ∘ M = (x₁ + x₂, y₁ + y₂, t₁ + t₂ + 2(⟨x₂, y₁⟩ − ⟨x₁, y₂⟩))`.
pub fn group_mul(p: &HPoint, m: &HPoint) -> Result<HPoint> {
    if p.n() != m.n() {
        return invalid(format!("dimension mismatch: ℍ^{} vs ℍ^{}", p.n(), m.n()));
    }
    Ok(HPoint {
        x: p.x.iter().zip(&m.x).map(|(a, b)| a + b).collect(),
        y: p.y.iter().zip(&m.y).map(|(a, b)| a + b).collect(),
        t: p.t + m.t + 2.0 * (dot(&m.x, &p.y) - dot(&p.x, &m.y)),
    })
}

/// Korányi gauge `((|x|² + |y|²)² + t²)^{1/4}`.
pub fn gauge_norm(p: &HPoint) -> f64 {
    let z2 = p.horizontal_norm_sq();
    (z2 * z2 + p.t * p.t).sqrt().sqrt()
}

/// `δ_r(x, y, t) = (rx, ry, r²t)`.
pub fn dilate(r: f64, p: &HPoint) -> Result<HPoint> {
    if !(r > 0.0) {
        return invalid(format!("dilation factor must be positive, got {r}"));
    }
    Ok(HPoint { x: p.x.iter().map(|v| r * v).collect(), y: p.y.iter().map(|v| r * v).collect(), t: r * r * p.t })
}

/// Left-invariant gauge distance `|P⁻¹ ∘ T|`.
pub fn koranyi_distance(p: &HPoint, q: &HPoint) -> Result<f64> {
    Ok(gauge_norm(&group_mul(&p.inverse(), q)?))
}

/// Value, gradient and Hessian in Euclidean coordinates `(x, y, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclidDerivatives {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

impl<const D: usize> From<Jet<D>> for EuclidDerivatives {
    fn from(j: Jet<D>) -> Self {
        Self { value: j.value, grad: j.grad.to_vec(), hess: j.hess.iter().map(|row| row.to_vec()).collect() }
    }
}

type ValueFn = dyn Fn(&HPoint) -> f64 + Send + Sync;
type DerivFn = dyn Fn(&HPoint) -> EuclidDerivatives + Send + Sync;

/// Default finite-difference steps: central first differences and
/// second differences along horizontal flows.
pub const FD_STEP_FIRST: f64 = 1e-5;
pub const FD_STEP_SECOND: f64 = 5e-4;

/// A scalar field on ℍⁿ, with optional closed-form derivatives.
#[derive(Clone)]
pub struct HField {
    pub n: usize,
    value: Arc<ValueFn>,
    derivs: Option<Arc<DerivFn>>,
    pub fd_step: f64,
    /// Angles across which the gradient may jump (ℍ¹ polar quadrature).
    pub breaks: PolarBreaks,
}

impl std::fmt::Debug for HField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HField")
            .field("n", &self.n)
            .field("analytic", &self.derivs.is_some())
            .field("fd_step", &self.fd_step)
            .field("breaks", &self.breaks)
            .finish()
    }
}

impl HField {
    /// Field known only through its values; derivatives by finite differences.
    pub fn from_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(&HPoint) -> f64 + Send + Sync + 'static,
    {
        Self { n, value: Arc::new(f), derivs: None, fd_step: FD_STEP_SECOND, breaks: PolarBreaks::none() }
    }

    /// Field written over jets in the `D = 2n + 1` Euclidean coordinates.
    pub fn from_jet<const D: usize, F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn([Jet<D>; D]) -> Jet<D> + Send + Sync + 'static,
    {
        if D != 2 * n + 1 {
            return invalid(format!("jet dimension {D} does not match ℍ^{n}"));
        }
        let f = Arc::new(f);
        let fv = Arc::clone(&f);
        let seed = |p: &HPoint| -> [Jet<D>; D] {
            let c = p.coords();
            Jet::seed(std::array::from_fn(|i| c[i]))
        };
        Ok(Self {
            n,
            value: Arc::new(move |p| fv(seed(p)).value),
            derivs: Some(Arc::new(move |p| f(seed(p)).into())),
            fd_step: FD_STEP_SECOND,
            breaks: PolarBreaks::none(),
        })
    }

    /// Field on ℍ¹ written over jets in `(x, y, t)`.
    pub fn h1<F>(f: F) -> Self
    where
        F: Fn(Jet<3>, Jet<3>, Jet<3>) -> Jet<3> + Send + Sync + 'static,
    {
        Self::from_jet::<3, _>(1, move |[x, y, t]| f(x, y, t)).expect("D = 3 matches n = 1")
    }

    pub fn with_breaks(mut self, breaks: PolarBreaks) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn is_analytic(&self) -> bool {
        self.derivs.is_some()
    }

    /// Drops the closed-form derivatives, forcing finite differences.
    pub fn without_derivatives(mut self) -> Self {
        self.derivs = None;
        self
    }

    pub fn value(&self, p: &HPoint) -> f64 {
        (self.value)(p)
    }

    fn check(&self, p: &HPoint) -> Result<()> {
        if p.n() != self.n {
            return invalid(format!("field on ℍ^{} evaluated at a point of ℍ^{}", self.n, p.n()));
        }
        Ok(())
    }

    pub fn euclid_derivatives(&self, p: &HPoint) -> Option<EuclidDerivatives> {
        self.derivs.as_ref().map(|d| d(p))
    }

    /// `c · u`.
    pub fn scaled(&self, c: f64) -> Self {
        let v = Arc::clone(&self.value);
        let derivs = self.derivs.as_ref().map(|d| {
            let d = Arc::clone(d);
            Arc::new(move |p: &HPoint| {
                let mut e = d(p);
                e.value *= c;
                e.grad.iter_mut().for_each(|g| *g *= c);
                e.hess.iter_mut().flatten().for_each(|h| *h *= c);
                e
            }) as Arc<DerivFn>
        });
        Self {
            n: self.n,
            value: Arc::new(move |p| c * v(p)),
            derivs,
            fd_step: self.fd_step,
            breaks: self.breaks.clone(),
        }
    }

    /// `(X₁u, …, X_nu, Y₁u, …, Y_nu)` at `p`.
    pub fn horizontal_gradient(&self, p: &HPoint) -> Result<Vec<f64>> {
        self.check(p)?;
        let n = self.n;
        if let Some(d) = self.euclid_derivatives(p) {
            let ut = d.grad[2 * n];
            let mut g = Vec::with_capacity(2 * n);
            g.extend((0..n).map(|i| d.grad[i] + 2.0 * p.y[i] * ut));
            g.extend((0..n).map(|i| d.grad[n + i] - 2.0 * p.x[i] * ut));
            return Ok(g);
        }
        let h = FD_STEP_FIRST * gauge_norm(p).max(1.0);
        (0..2 * n)
            .map(|k| {
                let fp = self.value(&group_mul(p, &horizontal_step(n, k, h))?);
                let fm = self.value(&group_mul(p, &horizontal_step(n, k, -h))?);
                Ok((fp - fm) / (2.0 * h))
            })
            .collect()
    }

    /// `|∇_ℍ u|²`.
    pub fn horizontal_gradient_sq(&self, p: &HPoint) -> Result<f64> {
        Ok(self.horizontal_gradient(p)?.iter().map(|g| g * g).sum())
    }

    /// Matrix `Z_a Z_b u` over the frame `(X₁, …, X_n, Y₁, …, Y_n)`.
    /// Requires closed-form derivatives.
    pub fn horizontal_hessian(&self, p: &HPoint) -> Result<Vec<Vec<f64>>> {
        self.check(p)?;
        let d = self
            .euclid_derivatives(p)
            .ok_or_else(|| Error::InvalidArgument("horizontal Hessian needs closed-form derivatives".into()))?;
        let n = self.n;
        let ti = 2 * n;
        // Z_a = ∂_a + c_a ∂_t.
        let c = |a: usize| if a < n { 2.0 * p.y[a] } else { -2.0 * p.x[a - n] };
        // Z_a c_b is constant: X_i(−2x_i) = −2, Y_i(2y_i) = 2.
        let zc = |a: usize, b: usize| {
            if a < n && b == a + n {
                -2.0
            } else if a >= n && b + n == a {
                2.0
            } else {
                0.0
            }
        };
        let (g, hs) = (&d.grad, &d.hess);
        Ok((0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| hs[a][b] + c(a) * hs[b][ti] + zc(a, b) * g[ti] + c(b) * (hs[ti][a] + c(a) * hs[ti][ti]))
                    .collect()
            })
            .collect())
    }

    /// `Σ (X_i² + Y_i²) u` at `p`.
    pub fn sublaplacian(&self, p: &HPoint) -> Result<f64> {
        self.check(p)?;
        let n = self.n;
        if let Some(d) = self.euclid_derivatives(p) {
            let ti = 2 * n;
            let hs = &d.hess;
            let mut s = 0.0;
            for i in 0..n {
                let (cx, cy) = (2.0 * p.y[i], -2.0 * p.x[i]);
                s += hs[i][i] + 2.0 * cx * hs[i][ti] + cx * cx * hs[ti][ti];
                s += hs[n + i][n + i] + 2.0 * cy * hs[n + i][ti] + cy * cy * hs[ti][ti];
            }
            return Ok(s);
        }
        let h = self.fd_step * gauge_norm(p).max(1.0);
        let u0 = self.value(p);
        let mut s = 0.0;
        // Fourth-order five-point stencil along each flow.
        for k in 0..2 * n {
            let f = |s: f64| -> Result<f64> { Ok(self.value(&group_mul(p, &horizontal_step(n, k, s))?)) };
            let (f1, fm1, f2, fm2) = (f(h)?, f(-h)?, f(2.0 * h)?, f(-2.0 * h)?);
            s += (16.0 * (f1 + fm1) - (f2 + fm2) - 30.0 * u0) / (12.0 * h * h);
        }
        Ok(s)
    }
}

/// The group element `s·e_k`; right multiplication by it follows the flow
/// of the `k`-th horizontal field.
fn horizontal_step(n: usize, k: usize, s: f64) -> HPoint {
    let mut e = HPoint::origin(n);
    if k < n {
        e.x[k] = s;
    } else {
        e.y[k - n] = s;
    }
    e
}

/// `Δ_ℍ |P|^{2−Q}` from the closed-form horizontal derivatives of the gauge:
/// `X_i|P| = |P|⁻³(|z|²x_i + y_i t)`, `Y_i|P| = |P|⁻³(|z|²y_i − x_i t)`.
pub fn fundamental_solution_residual(p: &HPoint) -> Result<f64> {
    if p.is_origin() {
        return Err(Error::Pole);
    }
    let n = p.n();
    let q = (2 * n + 2) as f64;
    let z2 = p.horizontal_norm_sq();
    let r = gauge_norm(p);
    let (r3, r7) = (r.powi(3), r.powi(7));
    let mut s = 0.0;
    for i in 0..n {
        let (x, y) = (p.x[i], p.y[i]);
        let common = z2 + 2.0 * x * x + 2.0 * y * y;
        for a in [z2 * x + y * p.t, z2 * y - x * p.t] {
            let first = a / r3;
            let second = common / r3 - 3.0 * a * a / r7;
            s += (2.0 - q) * r.powf(1.0 - q) * second + (2.0 - q) * (1.0 - q) * r.powf(-q) * first * first;
        }
    }
    Ok(s)
}

/// Same residual, by second differences along the horizontal flows.
pub fn fundamental_solution_residual_fd(p: &HPoint) -> Result<f64> {
    if p.is_origin() {
        return Err(Error::Pole);
    }
    let n = p.n();
    let q = (2 * n + 2) as f64;
    HField::from_fn(n, move |m| gauge_norm(m).powf(2.0 - q)).sublaplacian(p)
}

/// H-perimeter density `(Σ ⟨X_j, ν⟩² + ⟨Y_j, ν⟩²)^{1/2}` for a unit
/// Euclidean normal `ν` (normalized here).
pub fn h_perimeter_density(normal: &[f64], p: &HPoint) -> Result<f64> {
    let n = p.n();
    if normal.len() != 2 * n + 1 {
        return invalid(format!("normal needs {} components, got {}", 2 * n + 1, normal.len()));
    }
    let len = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(len > 0.0) || !len.is_finite() {
        return invalid("surface normal must be nonzero and finite");
    }
    let nu: Vec<f64> = normal.iter().map(|v| v / len).collect();
    let nt = nu[2 * n];
    let s: f64 = (0..n)
        .map(|i| {
            let xi = nu[i] + 2.0 * p.y[i] * nt;
            let yi = nu[n + i] - 2.0 * p.x[i] * nt;
            xi * xi + yi * yi
        })
        .sum();
    Ok(s.sqrt())
}
