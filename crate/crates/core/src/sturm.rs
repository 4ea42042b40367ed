//! First eigenpair of weighted Sturm–Liouville problems
//!
//! ```text
//!     −(p(φ) f′)′ = λ w(φ) f   on (a, b)
//! ```
//!
//! with `p, w > 0` inside the interval and possibly vanishing at an endpoint
//! (the poles of a sphere). Each endpoint is either Dirichlet (`f = 0`) or
//! singular-regular (bounded solution; natural condition `p f′ → 0`).
//!
//! Discretization: continuous piecewise-linear elements on a uniform mesh,
//! which yields the self-adjoint three-point stencil on `(p f′)′` and a
//! symmetric tridiagonal pencil `K f = λ M f`. The smallest eigenvalue is
//! isolated by Sylvester-inertia bisection, the eigenvector by shifted
//! inverse iteration. Meshes `N` and `2N` are combined by Richardson
//! extrapolation, which removes the leading `O(h²)` error term.

use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Dirichlet,
    /// Singular-regular endpoint: the coefficient vanishes there and the
    /// solution is only required to stay bounded.
    Regular,
}

/// A discretized eigenpair on a single mesh.
#[derive(Debug, Clone)]
pub struct DiscreteEigen {
    pub lambda: f64,
    pub mesh: usize,
    /// Mesh nodes `a = φ₀ < … < φ_N = b`.
    pub grid: Vec<f64>,
    /// Eigenfunction at the nodes, positive inside, max-normalized.
    pub values: Vec<f64>,
}

/// Richardson-extrapolated result over meshes `N` and `2N`.
#[derive(Debug, Clone)]
pub struct ExtrapolatedEigen {
    pub lambda: f64,
    pub est_error: f64,
    pub coarse: DiscreteEigen,
    pub fine: DiscreteEigen,
}

pub struct SturmProblem<P, W> {
    pub a: f64,
    pub b: f64,
    pub left: Endpoint,
    pub right: Endpoint,
    pub p: P,
    pub w: W,
}

/// Largest mesh tried before giving up on convergence.
pub const MAX_MESH: usize = 1 << 18;

/// Relative Richardson error below which no further refinement is attempted.
pub const TARGET_REL_ERROR: f64 = 1e-9;

struct Pencil {
    // K and M restricted to free nodes; diagonal and first super-diagonal.
    kd: Vec<f64>,
    ko: Vec<f64>,
    md: Vec<f64>,
    mo: Vec<f64>,
    first_free: usize,
}

impl Pencil {
    fn len(&self) -> usize {
        self.kd.len()
    }

    /// Number of pencil eigenvalues strictly below `sigma`.
    fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            let a = self.kd[i] - sigma * self.md[i];
            d = if i == 0 {
                a
            } else {
                let b = self.ko[i - 1] - sigma * self.mo[i - 1];
                a - b * b / d
            };
            if d == 0.0 {
                d = -f64::EPSILON * a.abs().max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Solves `(K − σM) x = rhs` by the Thomas algorithm. `σ` must lie
    /// below the spectrum so that the matrix is positive definite.
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut diag = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            let a = self.kd[i] - sigma * self.md[i];
            if i == 0 {
                diag[i] = a;
                y[i] = rhs[i];
            } else {
                let b = self.ko[i - 1] - sigma * self.mo[i - 1];
                let l = b / diag[i - 1];
                diag[i] = a - l * b;
                y[i] = rhs[i] - l * y[i - 1];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let upper = if i + 1 < n { (self.ko[i] - sigma * self.mo[i]) * x[i + 1] } else { 0.0 };
            x[i] = (y[i] - upper) / diag[i];
        }
        x
    }

    fn apply_mass(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.md[i] * v[i];
                if i > 0 {
                    s += self.mo[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.mo[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

impl<P, W> SturmProblem<P, W>
where
    P: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    fn assemble(&self, mesh: usize) -> Result<Pencil> {
        let n = mesh;
        let h = (self.b - self.a) / n as f64;
        let gauss = gauss_legendre(3, 0.0, 1.0)?;
        let mut kd = vec![0.0; n + 1];
        let mut ko = vec![0.0; n];
        let mut md = vec![0.0; n + 1];
        let mut mo = vec![0.0; n];
        for e in 0..n {
            let x0 = self.a + e as f64 * h;
            let (mut pint, mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0, 0.0);
            for (&s, &g) in gauss.nodes.iter().zip(&gauss.weights) {
                let x = x0 + s * h;
                let wgt = g * h;
                pint += wgt * (self.p)(x);
                let wx = wgt * (self.w)(x);
                m00 += wx * (1.0 - s) * (1.0 - s);
                m01 += wx * (1.0 - s) * s;
                m11 += wx * s * s;
            }
            let k = pint / (h * h);
            kd[e] += k;
            kd[e + 1] += k;
            ko[e] -= k;
            md[e] += m00;
            md[e + 1] += m11;
            mo[e] += m01;
        }
        let first_free = usize::from(self.left == Endpoint::Dirichlet);
        let last_free = if self.right == Endpoint::Dirichlet { n - 1 } else { n };
        if last_free < first_free {
            return invalid("mesh too coarse for the boundary conditions");
        }
        Ok(Pencil {
            kd: kd[first_free..=last_free].to_vec(),
            ko: ko[first_free..last_free].to_vec(),
            md: md[first_free..=last_free].to_vec(),
            mo: mo[first_free..last_free].to_vec(),
            first_free,
        })
    }

    /// Smallest eigenpair on a mesh of `mesh` uniform elements.
    pub fn solve(&self, mesh: usize) -> Result<DiscreteEigen> {
        if !(self.a < self.b) {
            return invalid(format!("empty interval ({}, {})", self.a, self.b));
        }
        if mesh < 2 {
            return invalid("mesh must have at least 2 elements");
        }
        let pencil = self.assemble(mesh)?;
        if pencil.len() == 0 {
            return invalid("no free unknowns");
        }
        let mut lo = 0.0;
        if pencil.count_below(lo) > 0 {
            return Err(Error::SolverFailure("pencil has a negative eigenvalue".into()));
        }
        // λ = 0 only occurs with regular endpoints on both sides.
        lo = -1.0;
        let mut hi = 1.0;
        while pencil.count_below(hi) == 0 {
            hi *= 2.0;
            if !hi.is_finite() || hi > 1e300 {
                return Err(Error::SolverFailure("no eigenvalue bracket found".into()));
            }
        }
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if pencil.count_below(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);

        let shift = lambda - (1e-9 * lambda.abs()).max(1e-12);
        let mut v = vec![1.0; pencil.len()];
        for _ in 0..4 {
            let rhs = pencil.apply_mass(&v);
            v = pencil.solve_shifted(shift, &rhs);
            let scale = v.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
            if scale == 0.0 || !scale.is_finite() {
                return Err(Error::SolverFailure("inverse iteration broke down".into()));
            }
            v.iter_mut().for_each(|x| *x /= scale);
        }

        let h = (self.b - self.a) / mesh as f64;
        let grid: Vec<f64> = (0..=mesh).map(|i| self.a + i as f64 * h).collect();
        let mut values = vec![0.0; mesh + 1];
        values[pencil.first_free..pencil.first_free + v.len()].copy_from_slice(&v);
        if !lambda.is_finite() {
            return Err(Error::SolverFailure(format!("non-finite eigenvalue on mesh {mesh}")));
        }
        Ok(DiscreteEigen { lambda, mesh, grid, values })
    }

    /// Richardson extrapolation over meshes `N` and `2N`, doubling `N`
    /// until two successive extrapolated values agree to
    /// [`TARGET_REL_ERROR`]. `est_error` is that difference.
    pub fn solve_extrapolated(&self, mesh: usize) -> Result<ExtrapolatedEigen> {
        let mut n = mesh;
        let mut coarse = self.solve(n)?;
        let mut previous: Option<f64> = None;
        loop {
            let fine = self.solve(2 * n)?;
            let lambda = (4.0 * fine.lambda - coarse.lambda) / 3.0;
            if !lambda.is_finite() {
                return Err(Error::SolverFailure(format!(
                    "non-finite extrapolation at mesh {n}: coarse {}, fine {}",
                    coarse.lambda, fine.lambda
                )));
            }
            if let Some(prev) = previous {
                let est_error = (lambda - prev).abs();
                if est_error <= TARGET_REL_ERROR * lambda.abs().max(1.0) {
                    return Ok(ExtrapolatedEigen { lambda, est_error, coarse, fine });
                }
                if 2 * n >= MAX_MESH {
                    return Err(Error::SolverFailure(format!(
                        "no convergence up to mesh {}: lambda {lambda}, estimated error {est_error}",
                        2 * n
                    )));
                }
            }
            previous = Some(lambda);
            n *= 2;
            coarse = fine;
        }
    }
}
