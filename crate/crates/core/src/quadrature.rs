//! Deterministic quadrature on intervals, Euclidean balls/spheres and
//! Korányi balls/spheres.
//!
//! All multi-dimensional rules are tensor products of (composite)
//! Gauss–Legendre rules in polar coordinates. Singular factors are absorbed
//! into the polar measure density before discretization, so no node ever
//! sits on the origin or on the poles `φ ∈ {0, π}`.
//!
//! Korányi polar coordinates are `x = ρ√(sin φ) cos θ`, `y = ρ√(sin φ) sin θ`,
//! `t = ρ² cos φ`; the Lebesgue measure reads `ρ³ dρ dφ dθ` and the
//! ℍ¹-perimeter measure of `∂B₁` reads `√(sin φ) dφ dθ`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Sums `values` by recursive halving. The reduction tree depends only on the
/// slice length, so results do not depend on how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// A one-dimensional rule on `[a, b]`, possibly composite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Gauss order of the first panel (all panels for a single rule).
    pub order: usize,
    pub a: f64,
    pub b: f64,
}

impl QuadratureRule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
fn legendre_reference(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// The `order`-point Gauss–Legendre rule on `[a, b]`, exact for polynomials
/// of degree `2·order − 1`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<QuadratureRule1D> {
    if order == 0 {
        return invalid("Gauss-Legendre order must be at least 1");
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return invalid(format!("empty or non-finite interval [{a}, {b}]"));
    }
    let (xs, ws) = legendre_reference(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule1D {
        nodes: xs.iter().map(|x| mid + half * x).collect(),
        weights: ws.iter().map(|w| half * w).collect(),
        order,
        a,
        b,
    })
}

/// Endpoint grading for panels whose integrand behaves like a square root
/// at one or both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    None,
    /// `x = a + (b − a) v²`.
    Left,
    /// `x = b − (b − a)(1 − v)²`.
    Right,
    /// `x = a + (b − a)(1 − cos πv)/2`.
    Both,
}

fn graded_panel(order: usize, a: f64, b: f64, grading: Grading) -> Result<QuadratureRule1D> {
    if grading == Grading::None {
        return gauss_legendre(order, a, b);
    }
    let base = gauss_legendre(order, 0.0, 1.0)?;
    let len = b - a;
    let (nodes, weights) = base
        .nodes
        .iter()
        .zip(&base.weights)
        .map(|(&v, &w)| match grading {
            Grading::Left => (a + len * v * v, w * 2.0 * len * v),
            Grading::Right => (b - len * (1.0 - v) * (1.0 - v), w * 2.0 * len * (1.0 - v)),
            Grading::Both => (a + len * 0.5 * (1.0 - (PI * v).cos()), w * len * 0.5 * PI * (PI * v).sin()),
            Grading::None => unreachable!(),
        })
        .unzip();
    Ok(QuadratureRule1D { nodes, weights, order, a, b })
}

/// Composite Gauss–Legendre on `[a, b]` split at the interior points of
/// `breaks`. About `total_nodes` nodes are distributed over the panels in
/// proportion to their length, with at least one node per panel. Panels
/// touching an endpoint listed in `singular_ends` are graded.
pub fn composite_gauss(
    total_nodes: usize,
    a: f64,
    b: f64,
    breaks: &[f64],
    singular_ends: (bool, bool),
) -> Result<QuadratureRule1D> {
    if total_nodes == 0 {
        return invalid("node count must be at least 1");
    }
    if !(a < b) {
        return invalid(format!("empty interval [{a}, {b}]"));
    }
    let tol = 1e-12 * (b - a);
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&c| c > a + tol && c < b - tol).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= tol);
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let panels = edges.len() - 1;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut first_order = 0;
    for p in 0..panels {
        let (pa, pb) = (edges[p], edges[p + 1]);
        let share = (total_nodes as f64 * (pb - pa) / (b - a)).round() as usize;
        let order = share.max(1);
        let grading = match (p == 0 && singular_ends.0, p == panels - 1 && singular_ends.1) {
            (true, true) => Grading::Both,
            (true, false) => Grading::Left,
            (false, true) => Grading::Right,
            (false, false) => Grading::None,
        };
        let panel = graded_panel(order, pa, pb, grading)?;
        if p == 0 {
            first_order = order;
        }
        nodes.extend(panel.nodes);
        weights.extend(panel.weights);
    }
    Ok(QuadratureRule1D { nodes, weights, order: first_order, a, b })
}

/// Composite rule with `panels` equal panels of fixed Gauss `order`.
pub fn composite_uniform(order: usize, panels: usize, a: f64, b: f64) -> Result<QuadratureRule1D> {
    if panels == 0 {
        return invalid("panel count must be at least 1");
    }
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let panel = gauss_legendre(order, a + p as f64 * h, a + (p + 1) as f64 * h)?;
        nodes.extend(panel.nodes);
        weights.extend(panel.weights);
    }
    Ok(QuadratureRule1D { nodes, weights, order, a, b })
}

/// Pointwise measure density of a polar product grid.
///
/// Three-axis grids use coordinates `(ρ, φ, θ)`, two-axis grids `(φ, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    Unit,
    /// Korányi volume element `ρ³`.
    KoranyiVolume,
    /// Korányi volume element against the kernel `|ζ|^{2−Q}` with `Q = 4`: `ρ`.
    KoranyiKernel,
    /// ℍ¹-perimeter of `∂B₁^{ℍ¹}`: `√(sin φ)`.
    KoranyiPerimeter,
    /// Euclidean volume in ℝ³ against the kernel `|x|^{-1}`: `ρ sin φ`.
    EuclidKernel,
    /// Euclidean volume in ℝ³: `ρ² sin φ`.
    EuclidVolume,
    /// Surface measure of `S²`: `sin φ`.
    EuclidSphere,
}

impl Density {
    pub fn eval(self, coords: &[f64]) -> f64 {
        match self {
            Density::Unit => 1.0,
            Density::KoranyiVolume => coords[0].powi(3),
            Density::KoranyiKernel => coords[0],
            Density::KoranyiPerimeter => coords[0].sin().sqrt(),
            Density::EuclidKernel => coords[0] * coords[1].sin(),
            Density::EuclidVolume => coords[0] * coords[0] * coords[1].sin(),
            Density::EuclidSphere => coords[0].sin(),
        }
    }
}

/// Tensor-product grid with a measure density.
#[derive(Debug, Clone)]
pub struct ProductGrid {
    pub axes: Vec<QuadratureRule1D>,
    pub density: Density,
}

impl ProductGrid {
    pub fn new(axes: Vec<QuadratureRule1D>, density: Density) -> Result<Self> {
        if !(2..=3).contains(&axes.len()) {
            return invalid("product grids have 2 or 3 axes");
        }
        Ok(Self { axes, density })
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(QuadratureRule1D::len).product()
    }

    fn unravel(&self, mut idx: usize, coords: &mut [f64; 3]) -> f64 {
        let mut w = 1.0;
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let i = idx % axis.len();
            idx /= axis.len();
            coords[k] = axis.nodes[i];
            w *= axis.weights[i];
        }
        w
    }

    /// Coordinates and combined weight (density included) of node `idx`.
    pub fn node(&self, idx: usize) -> (Vec<f64>, f64) {
        let mut c = [0.0; 3];
        let w = self.unravel(idx, &mut c);
        let coords = c[..self.axes.len()].to_vec();
        let w = w * self.density.eval(&coords);
        (coords, w)
    }

    /// Integrates `f(coords)` against the grid measure. Node contributions
    /// are evaluated in parallel and reduced in a fixed pairwise order.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        self.try_integrate(|c| Ok(f(c))).expect("infallible integrand")
    }

    /// As [`integrate`](Self::integrate), stopping at the first error.
    pub fn try_integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let dim = self.axes.len();
        let terms: Vec<f64> = (0..self.node_count())
            .into_par_iter()
            .map(|idx| {
                let mut c = [0.0; 3];
                let w = self.unravel(idx, &mut c);
                let coords = &c[..dim];
                Ok(w * self.density.eval(coords) * f(coords)?)
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&terms))
    }
}

/// Node counts per polar axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub n_rho: usize,
    pub n_phi: usize,
    pub n_theta: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { n_rho: 64, n_phi: 128, n_theta: 128 }
    }
}

impl Resolution {
    pub fn new(n_rho: usize, n_phi: usize, n_theta: usize) -> Result<Self> {
        if n_rho == 0 || n_phi == 0 || n_theta == 0 {
            return invalid("resolutions must be at least 1");
        }
        Ok(Self { n_rho, n_phi, n_theta })
    }
}

/// Polar angles where an integrand is known to lose smoothness, e.g. the
/// zero set of a positive part. Grids split their panels there.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolarBreaks {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
}

impl PolarBreaks {
    pub fn none() -> Self {
        Self::default()
    }

    /// θ-breaks are reduced to `[0, 2π)`.
    pub fn new(phi: Vec<f64>, theta: Vec<f64>) -> Self {
        let theta = theta.into_iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
        Self { phi, theta }
    }
}

/// A box in polar coordinates `(ρ, φ, θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarBox {
    pub rho: (f64, f64),
    pub phi: (f64, f64),
    pub theta: (f64, f64),
}

impl PolarBox {
    pub fn ball(r: f64) -> Self {
        Self { rho: (0.0, r), phi: (0.0, PI), theta: (0.0, 2.0 * PI) }
    }
}

fn check_box(b: &PolarBox, with_rho: bool) -> Result<()> {
    if with_rho && !(b.rho.0 >= 0.0 && b.rho.0 < b.rho.1 && b.rho.1.is_finite()) {
        return invalid(format!("radial range {:?} must satisfy 0 <= r_in < r_out", b.rho));
    }
    if !(b.phi.0 >= 0.0 && b.phi.0 < b.phi.1 && b.phi.1 <= PI) {
        return invalid(format!("φ range {:?} must lie in [0, π]", b.phi));
    }
    if !(b.theta.0 < b.theta.1 && b.theta.1 - b.theta.0 <= 2.0 * PI + 1e-12) {
        return invalid(format!("θ range {:?} must have length in (0, 2π]", b.theta));
    }
    Ok(())
}

fn theta_rule(res: usize, range: (f64, f64), breaks: &[f64]) -> Result<QuadratureRule1D> {
    // θ-breaks live in [0, 2π); shift copies so they land inside `range`.
    let shifted: Vec<f64> = breaks.iter().flat_map(|&b| [b - 2.0 * PI, b, b + 2.0 * PI]).collect();
    composite_gauss(res, range.0, range.1, &shifted, (false, false))
}

fn is_pole(phi: f64) -> bool {
    phi.abs() < 1e-15 || (phi - PI).abs() < 1e-15
}

/// Ratio between consecutive radial panel edges near the origin.
const RADIAL_RATIO: f64 = 0.25;

/// Rule on `[0, r]` with panels `[rσ^{k+1}, rσ^k]` refined geometrically
/// towards 0 and a graded innermost panel. Homogeneous fields of degree
/// below 1 have integrands `ρ^s`, `s < 1`, which a single Gauss panel
/// resolves poorly.
fn radial_rule(n: usize, r: f64) -> Result<QuadratureRule1D> {
    if n == 0 {
        return invalid("node count must be at least 1");
    }
    let levels = (n / 8).clamp(1, 10);
    let per = n / levels;
    let extra = n % levels;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    // Innermost first so nodes stay sorted.
    for k in (0..levels).rev() {
        let hi = r * RADIAL_RATIO.powi(k as i32);
        let (lo, grading) = if k == levels - 1 { (0.0, Grading::Left) } else { (hi * RADIAL_RATIO, Grading::None) };
        let order = per + usize::from(k < extra);
        let panel = graded_panel(order, lo, hi, grading)?;
        nodes.extend(panel.nodes);
        weights.extend(panel.weights);
    }
    Ok(QuadratureRule1D { nodes, weights, order: per, a: 0.0, b: r })
}

/// General three-axis polar grid over `domain`.
pub fn polar_ball_grid(
    domain: PolarBox,
    res: Resolution,
    breaks: &PolarBreaks,
    density: Density,
) -> Result<ProductGrid> {
    check_box(&domain, true)?;
    let rho = if domain.rho.0 == 0.0 {
        radial_rule(res.n_rho, domain.rho.1)?
    } else {
        composite_gauss(res.n_rho, domain.rho.0, domain.rho.1, &[], (false, false))?
    };
    let phi = composite_gauss(res.n_phi, domain.phi.0, domain.phi.1, &breaks.phi, (false, false))?;
    let theta = theta_rule(res.n_theta, domain.theta, &breaks.theta)?;
    ProductGrid::new(vec![rho, phi, theta], density)
}

/// General two-axis `(φ, θ)` grid. Panels touching a pole are graded when
/// the density carries a square-root singularity there.
pub fn polar_sphere_grid(
    phi_range: (f64, f64),
    theta_range: (f64, f64),
    n_phi: usize,
    n_theta: usize,
    breaks: &PolarBreaks,
    density: Density,
) -> Result<ProductGrid> {
    check_box(&PolarBox { rho: (0.0, 1.0), phi: phi_range, theta: theta_range }, false)?;
    let graded = density == Density::KoranyiPerimeter;
    let ends = (graded && is_pole(phi_range.0), graded && is_pole(phi_range.1));
    let phi = composite_gauss(n_phi, phi_range.0, phi_range.1, &breaks.phi, ends)?;
    let theta = theta_rule(n_theta, theta_range, &breaks.theta)?;
    ProductGrid::new(vec![phi, theta], density)
}

/// Korányi ball `B_r^{ℍ¹}` with volume density `ρ³`.
pub fn koranyi_ball_grid(r: f64, n_rho: usize, n_phi: usize, n_theta: usize) -> Result<ProductGrid> {
    if !(r > 0.0) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    let res = Resolution::new(n_rho, n_phi, n_theta)?;
    polar_ball_grid(PolarBox::ball(r), res, &PolarBreaks::none(), Density::KoranyiVolume)
}

/// Korányi ball with density `ρ³·ρ^{-2} = ρ`, i.e. integration against the
/// kernel `|ζ|^{-2}`, split at the given polar breaks.
pub fn koranyi_kernel_grid(r: f64, res: Resolution, breaks: &PolarBreaks) -> Result<ProductGrid> {
    if !(r > 0.0) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    polar_ball_grid(PolarBox::ball(r), res, breaks, Density::KoranyiKernel)
}

/// Korányi shell `B_{r_out} ∖ B_{r_in}` with volume density.
pub fn koranyi_shell_grid(r_in: f64, r_out: f64, res: Resolution, breaks: &PolarBreaks) -> Result<ProductGrid> {
    let domain = PolarBox { rho: (r_in, r_out), ..PolarBox::ball(1.0) };
    polar_ball_grid(domain, res, breaks, Density::KoranyiVolume)
}

/// `∂B₁^{ℍ¹}` with ℍ¹-perimeter density `√(sin φ)`.
pub fn koranyi_sphere_grid(n_phi: usize, n_theta: usize) -> Result<ProductGrid> {
    polar_sphere_grid((0.0, PI), (0.0, 2.0 * PI), n_phi, n_theta, &PolarBreaks::none(), Density::KoranyiPerimeter)
}

/// Euclidean ball `B_r ⊂ ℝⁿ` against the kernel `|x|^{2−n}`; density `ρ sin φ`.
pub fn euclid_ball_grid(r: f64, n: usize, res: Resolution) -> Result<ProductGrid> {
    euclid_ball_grid_with_breaks(r, n, res, &PolarBreaks::none())
}

pub fn euclid_ball_grid_with_breaks(r: f64, n: usize, res: Resolution, breaks: &PolarBreaks) -> Result<ProductGrid> {
    if n != 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(r > 0.0) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    polar_ball_grid(PolarBox::ball(r), res, breaks, Density::EuclidKernel)
}

/// The unit sphere `S² = ∂B₁ ⊂ ℝ³` with surface density `sin φ`.
pub fn euclid_sphere_grid(res: Resolution, breaks: &PolarBreaks) -> Result<ProductGrid> {
    polar_sphere_grid((0.0, PI), (0.0, 2.0 * PI), res.n_phi, res.n_theta, breaks, Density::EuclidSphere)
}
