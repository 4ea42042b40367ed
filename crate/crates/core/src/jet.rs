//! Second-order forward-mode automatic differentiation.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to `D` independent variables. Closed-form test fields are written
//! once over jets and then provide exact first and second derivatives, which
//! the horizontal calculus consumes.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const D: usize> {
    pub value: f64,
    pub grad: [f64; D],
    pub hess: [[f64; D]; D],
}

impl<const D: usize> Jet<D> {
    pub fn constant(value: f64) -> Self {
        Self { value, grad: [0.0; D], hess: [[0.0; D]; D] }
    }

    /// The `index`-th coordinate function evaluated at `value`.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut jet = Self::constant(value);
        jet.grad[index] = 1.0;
        jet
    }

    /// Seeds all `D` coordinates at once.
    pub fn seed(point: [f64; D]) -> [Self; D] {
        std::array::from_fn(|i| Self::variable(point[i], i))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Composition `g(self)` given `g`, `g'` and `g''` at `self.value`.
    pub fn chain(self, g0: f64, g1: f64, g2: f64) -> Self {
        let mut out = Self::constant(g0);
        for i in 0..D {
            out.grad[i] = g1 * self.grad[i];
            for j in 0..D {
                out.hess[i][j] = g1 * self.hess[i][j] + g2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    /// Composition `h(a, b)` given the value, both partials and the three
    /// second partials `(h_aa, h_ab, h_bb)` at `(a.value, b.value)`.
    pub fn chain2(a: Self, b: Self, h: f64, d1: [f64; 2], d2: [f64; 3]) -> Self {
        let [ha, hb] = d1;
        let [haa, hab, hbb] = d2;
        let mut out = Self::constant(h);
        for i in 0..D {
            out.grad[i] = ha * a.grad[i] + hb * b.grad[i];
            for j in 0..D {
                out.hess[i][j] = ha * a.hess[i][j]
                    + hb * b.hess[i][j]
                    + haa * a.grad[i] * a.grad[j]
                    + hab * (a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j])
                    + hbb * b.grad[i] * b.grad[j];
            }
        }
        out
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn powf(self, p: f64) -> Self {
        let v = self.value;
        self.chain(v.powf(p), p * v.powf(p - 1.0), p * (p - 1.0) * v.powf(p - 2.0))
    }

    pub fn powi(self, p: i32) -> Self {
        let v = self.value;
        let pf = p as f64;
        self.chain(v.powi(p), pf * v.powi(p - 1), pf * (pf - 1.0) * v.powi(p - 2))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    /// `atan2(self, x)`, i.e. the angle of the point `(x, self)`.
    pub fn atan2(self, x: Self) -> Self {
        let (yv, xv) = (self.value, x.value);
        let r2 = xv * xv + yv * yv;
        let r4 = r2 * r2;
        Self::chain2(
            self,
            x,
            yv.atan2(xv),
            [xv / r2, -yv / r2],
            [-2.0 * xv * yv / r4, (yv * yv - xv * xv) / r4, 2.0 * xv * yv / r4],
        )
    }

    /// Positive part `max(self, 0)`; the zero jet on the closed negative side.
    pub fn pos(self) -> Self {
        if self.value > 0.0 {
            self
        } else {
            Self::zero()
        }
    }

    /// Negative part `max(-self, 0)`.
    pub fn neg_part(self) -> Self {
        (-self).pos()
    }

    pub fn scale(self, c: f64) -> Self {
        let mut out = self;
        out.value *= c;
        for i in 0..D {
            out.grad[i] *= c;
            for j in 0..D {
                out.hess[i][j] *= c;
            }
        }
        out
    }

    pub fn trace_hessian(&self) -> f64 {
        (0..D).map(|i| self.hess[i][i]).sum()
    }
}

impl<const D: usize> Add for Jet<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for i in 0..D {
            self.grad[i] += rhs.grad[i];
            for j in 0..D {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
        self
    }
}

impl<const D: usize> Sub for Jet<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const D: usize> Neg for Jet<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const D: usize> Mul for Jet<D> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.value, rhs.value);
        Self::chain2(self, rhs, a * b, [b, a], [0.0, 1.0, 0.0])
    }
}

impl<const D: usize> Div for Jet<D> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (a, b) = (self.value, rhs.value);
        let b2 = b * b;
        Self::chain2(self, rhs, a / b, [1.0 / b, -a / b2], [0.0, -1.0 / b2, 2.0 * a / (b2 * b)])
    }
}

impl<const D: usize> Add<f64> for Jet<D> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.value += rhs;
        self
    }
}

impl<const D: usize> Sub<f64> for Jet<D> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= rhs;
        self
    }
}

impl<const D: usize> Mul<f64> for Jet<D> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl<const D: usize> Div<f64> for Jet<D> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self.scale(1.0 / rhs)
    }
}

impl<const D: usize> Mul<Jet<D>> for f64 {
    type Output = Jet<D>;
    fn mul(self, rhs: Jet<D>) -> Jet<D> {
        rhs.scale(self)
    }
}

impl<const D: usize> Add<Jet<D>> for f64 {
    type Output = Jet<D>;
    fn add(self, rhs: Jet<D>) -> Jet<D> {
        rhs + self
    }
}

impl<const D: usize> Sub<Jet<D>> for f64 {
    type Output = Jet<D>;
    fn sub(self, rhs: Jet<D>) -> Jet<D> {
        (-rhs) + self
    }
}
