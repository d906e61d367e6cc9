//! Classical Gauss connection coefficients (n = 1) in Gamma form, moved to
//! the basis of Beta-normalized integrals.
//!
//! With `a = α₁, b = α₂, c = β₁` the Kummer solutions at 0 are
//! `w₁ = F(a,b;c;z)` and `w₂ = z^{1−c} F(a−c+1,b−c+1;2−c;z)`. The integral
//! basis at 0 is `F_{D̃₁} = B(b−c+1, 1−b) w₂`, `F_{D̃₂} = B(a, c−a) w₁`, and
//! the basis at 1 and ∞ is scaled the same way. Nothing here touches the sine
//! formulas of the connection module.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::connection::{ConnectionMatrix, MatrixKind, CONVENTION};
use crate::error::{Error, Result};
use crate::params::Parameters;
use crate::special::{beta, gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussTarget {
    Inf0,
    One0,
}

fn g(z: Complex64) -> Result<Complex64> {
    gamma(z)
}

/// `(−z)^{−a} F(a, a−c+1; a−b+1; 1/z) = K₁ w₁ + K₂ w₂`.
fn infinity_coefficients(a: Complex64, b: Complex64, c: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let k1 = g(one - c)? * g(a - b + 1.0)? / (g(a - c + 1.0)? * g(one - b)?);
    let k2 = g(c - 1.0)? * g(a - b + 1.0)? / (g(a)? * g(c - b)?);
    Ok((k1, k2))
}

/// The n = 1 connection matrix computed from Gamma-function formulas.
pub fn gauss_reference(p: &Parameters, target: GaussTarget) -> Result<ConnectionMatrix> {
    if p.n() != 1 {
        return Err(Error::Unsupported(format!("the Gauss oracle needs n = 1 (got n = {})", p.n())));
    }
    let one = Complex64::new(1.0, 0.0);
    let (a, b, c) = (p.alpha(1), p.alpha(2), p.beta(1));
    let p01 = beta(b - c + 1.0, one - b)?;
    let p02 = beta(a, c - a)?;
    let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
    let kind = match target {
        GaussTarget::One0 => {
            // w₃ = F(a,b;a+b−c+1;1−z) = k31 w₁ + k32 w₂
            // w₄ = (1−z)^{c−a−b} F(c−a,c−b;c−a−b+1;1−z) = k41 w₁ + k42 w₂
            let k31 = g(a + b - c + 1.0)? * g(one - c)? / (g(a - c + 1.0)? * g(b - c + 1.0)?);
            let k32 = g(a + b - c + 1.0)? * g(c - 1.0)? / (g(a)? * g(b)?);
            let k41 = g(c - a - b + 1.0)? * g(one - c)? / (g(one - a)? * g(one - b)?);
            let k42 = g(c - a - b + 1.0)? * g(c - 1.0)? / (g(c - a)? * g(c - b)?);
            let p11 = beta(a, b - c + 1.0)?;
            let p12 = beta(c - a, one - b)?;
            m[(0, 0)] = p11 * k32 / p01;
            m[(1, 0)] = p11 * k31 / p02;
            m[(0, 1)] = p12 * k42 / p01;
            m[(1, 1)] = p12 * k41 / p02;
            MatrixKind::One0
        }
        GaussTarget::Inf0 => {
            let pi1 = beta(a, one - b)?;
            let pi2 = beta(b - c + 1.0, c - a)?;
            let (k1, k2) = infinity_coefficients(a, b, c)?;
            m[(0, 0)] = pi1 * k2 / p01;
            m[(1, 0)] = pi1 * k1 / p02;
            let (k1, k2) = infinity_coefficients(b, a, c)?;
            m[(0, 1)] = pi2 * k2 / p01;
            m[(1, 1)] = pi2 * k1 / p02;
            MatrixKind::Inf0
        }
    };
    Ok(ConnectionMatrix {
        kind,
        n: 1,
        convention: CONVENTION.to_string(),
        entries: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{c_10, c_inf0, max_abs_diff};

    #[test]
    fn agrees_with_sine_formulas() {
        let p = Parameters::new(
            vec![Complex64::new(0.31, 0.2), Complex64::new(-0.72, -0.1)],
            vec![Complex64::new(1.37, 0.05)],
        )
        .unwrap();
        let g10 = gauss_reference(&p, GaussTarget::One0).unwrap();
        let ginf = gauss_reference(&p, GaussTarget::Inf0).unwrap();
        assert!(max_abs_diff(&g10.entries, &c_10(&p).unwrap().entries) < 1e-12);
        assert!(max_abs_diff(&ginf.entries, &c_inf0(&p).unwrap().entries) < 1e-12);
    }

    #[test]
    fn only_n1() {
        let p = Parameters::real(&[0.1, 0.2, 0.3], &[0.45, 0.55]).unwrap();
        assert!(gauss_reference(&p, GaussTarget::One0).is_err());
    }
}
