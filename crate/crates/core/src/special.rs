//! Legendre functions of the first kind with non-integer degree.
//!
//! `P_ν(x) = ₂F₁(−ν, ν + 1; 1; (1 − x)/2)`, summed directly. The series
//! converges for `x ∈ (−1, 1]`; it is used on caps around the north pole,
//! where `(1 − x)/2 = sin²(φ/2)` stays away from 1.

use crate::error::{invalid, Result};

/// `(P_ν(x), P_ν'(x), P_ν''(x))`.
pub fn legendre_p(nu: f64, x: f64) -> Result<(f64, f64, f64)> {
    if !(x > -1.0 && x <= 1.0) {
        return invalid(format!("Legendre series needs x in (-1, 1], got {x}"));
    }
    let z = 0.5 * (1.0 - x);
    // F(z) = Σ c_k z^k with c_{k+1} = c_k (k − ν)(k + ν + 1)/(k + 1)².
    let next = |k: f64, c: f64| c * (k - nu) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0));
    let mut c0 = 1.0;
    let mut c1 = next(0.0, c0);
    let mut c2 = next(1.0, c1);
    let (mut f, mut df, mut d2f) = (0.0, 0.0, 0.0);
    let mut zk = 1.0;
    let mut quiet = 0;
    for k in 0..2_000_000usize {
        let kf = k as f64;
        let t0 = c0 * zk;
        let t1 = (kf + 1.0) * c1 * zk;
        let t2 = (kf + 1.0) * (kf + 2.0) * c2 * zk;
        f += t0;
        df += t1;
        d2f += t2;
        let negligible = |t: f64, s: f64| t.abs() <= 1e-17 * s.abs() || t == 0.0;
        if negligible(t0, f) && negligible(t1, df) && negligible(t2, d2f) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        zk *= z;
        c0 = c1;
        c1 = c2;
        c2 = next(kf + 2.0, c2);
    }
    Ok((f, -0.5 * df, 0.25 * d2f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integer_degrees_are_polynomials() {
        for &x in &[-0.9, -0.3, 0.0, 0.4, 0.95, 1.0] {
            let (p1, d1, _) = legendre_p(1.0, x).unwrap();
            assert_relative_eq!(p1, x, epsilon = 1e-14);
            assert_relative_eq!(d1, 1.0, epsilon = 1e-13);
            let (p2, d2, dd2) = legendre_p(2.0, x).unwrap();
            assert_relative_eq!(p2, 0.5 * (3.0 * x * x - 1.0), epsilon = 1e-14);
            assert_relative_eq!(d2, 3.0 * x, epsilon = 1e-13);
            assert_relative_eq!(dd2, 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn satisfies_legendre_equation() {
        let nu = 1.777_288_270_158_946;
        for &x in &[-0.5, 0.0, 0.3, 0.8] {
            let (p, dp, d2p) = legendre_p(nu, x).unwrap();
            let residual = (1.0 - x * x) * d2p - 2.0 * x * dp + nu * (nu + 1.0) * p;
            assert!(residual.abs() < 1e-12, "residual {residual} at {x}");
        }
        // First zero of this degree sits at cos(π/3).
        let (p, _, _) = legendre_p(nu, 0.5).unwrap();
        assert!(p.abs() < 1e-14);
    }

    #[test]
    fn rejects_south_pole() {
        assert!(legendre_p(0.5, -1.0).is_err());
    }
}
