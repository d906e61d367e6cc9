//! Complex special functions: log-gamma, Beta, Pochhammer, `sin(πz)` and `exp(πiz)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_2PI_HALF: f64 = 0.918_938_533_204_672_8; // ln(2π)/2

/// B_{2k} / (2k (2k-1)) for k = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Shift target for the Stirling series; at |w| >= 15 ten terms are far below rounding.
const STIRLING_RADIUS: f64 = 15.0;

/// Products up to this length are formed directly in [`pochhammer`].
const POCHHAMMER_PRODUCT_MAX: usize = 64;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `ln Γ(z)` on the principal branch (cut along the negative real axis).
///
/// Upward recurrence `ln Γ(w) = ln Γ(w+1) − Log w` with principal logarithms
/// until `Re w >= 0` and `|w| >= 15`, then the Stirling series. Summing the
/// logarithms one by one, rather than taking the log of their product, keeps
/// the imaginary part on the principal branch.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFiniteValue {
            field: "log_gamma argument".into(),
        });
    }
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole { z });
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 0.0 || w.norm() < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + LN_2PI_HALF + series - shift)
}

/// `Γ(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// `B(a, b) = Γ(a) Γ(b) / Γ(a + b)`.
pub fn beta(a: Complex64, b: Complex64) -> Result<Complex64> {
    let ab = a + b;
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) || is_nonpositive_integer(ab) {
        return Err(Error::BetaPole { a, b });
    }
    let lg = log_gamma(a)? + log_gamma(b)? - log_gamma(ab)?;
    Ok(lg.exp())
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: Complex64, k: usize) -> Complex64 {
    if k <= POCHHAMMER_PRODUCT_MAX || is_nonpositive_integer(a) {
        let mut p = Complex64::new(1.0, 0.0);
        for j in 0..k {
            p *= a + j as f64;
        }
        return p;
    }
    match (log_gamma(a + k as f64), log_gamma(a)) {
        (Ok(num), Ok(den)) => (num - den).exp(),
        _ => {
            let mut p = Complex64::new(1.0, 0.0);
            for j in 0..k {
                p *= a + j as f64;
            }
            p
        }
    }
}

/// Splits `x` into the nearest integer parity and a remainder in `[-1/2, 1/2]`.
fn reduce(x: f64) -> (f64, f64) {
    let k = x.round();
    let r = x - k;
    let sign = if (k * 0.5).fract() == 0.0 { 1.0 } else { -1.0 };
    (sign, r)
}

/// `(sin(πx), cos(πx))` for real `x`, exact at integers and half-integers.
fn sincos_pi_real(x: f64) -> (f64, f64) {
    let (sign, r) = reduce(x);
    let s = (PI * r).sin();
    let c = (PI * (0.5 - r.abs())).sin();
    (sign * s, sign * c)
}

/// `s(z) = sin(πz)`.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let (s, c) = sincos_pi_real(z.re);
    let y = PI * z.im;
    Complex64::new(s * y.cosh(), c * y.sinh())
}

/// `cos(πz)`.
pub fn cos_pi(z: Complex64) -> Complex64 {
    let (s, c) = sincos_pi_real(z.re);
    let y = PI * z.im;
    Complex64::new(c * y.cosh(), -s * y.sinh())
}

/// `e(z) = exp(π√−1 z)`.
pub fn e_pi(z: Complex64) -> Complex64 {
    let (s, c) = sincos_pi_real(z.re);
    let m = (-PI * z.im).exp();
    Complex64::new(m * c, m * s)
}

/// Distance from a complex number to the nearest integer.
pub fn dist_to_integer(z: Complex64) -> f64 {
    (z.re - z.re.round()).hypot(z.im)
}
