//! Connection matrices between the fundamental systems at 0, 1 and ∞.
//!
//! One convention holds everywhere: `(target row-vector) · C = (source
//! row-vector)`, so column j of C expands the j-th source solution over the
//! target basis. `C10` has target 0 and source 1; `F⁽¹⁾ = F⁽⁰⁾ · C10`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Parameters, EPS_GENERIC};
use crate::special::{dist_to_integer, e_pi, sin_pi};

pub const CONVENTION: &str = "column j holds the coefficients expanding the j-th source solution over the target basis, i.e. (target row-vector)·C = (source row-vector)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Inf0,
    One0,
    Zero1,
    OneInf,
    HatOne0,
    HatInf0,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Inf0 => "inf0",
            MatrixKind::One0 => "one0",
            MatrixKind::Zero1 => "zero1",
            MatrixKind::OneInf => "one_inf",
            MatrixKind::HatOne0 => "hat_one0",
            MatrixKind::HatInf0 => "hat_inf0",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            MatrixKind::Inf0,
            MatrixKind::One0,
            MatrixKind::Zero1,
            MatrixKind::OneInf,
            MatrixKind::HatOne0,
            MatrixKind::HatInf0,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

/// An `(n+1)×(n+1)` connection matrix with its kind and convention tag.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix {
    pub kind: MatrixKind,
    pub n: usize,
    pub convention: String,
    pub entries: DMatrix<Complex64>,
}

impl ConnectionMatrix {
    fn new(kind: MatrixKind, n: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteValue {
                field: format!("{} matrix entries", kind.as_str()),
            });
        }
        Ok(Self {
            kind,
            n,
            convention: CONVENTION.to_string(),
            entries,
        })
    }

    /// 1-based entry access.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i - 1, j - 1)]
    }

    /// Row-major JSON with every real printed to 17 significant digits, so
    /// parsing and re-emitting reproduces the same bytes.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write!(
            out,
            "{{\"kind\":{},\"n\":{},\"convention\":{},\"entries\":[",
            serde_json::to_string(self.kind.as_str()).expect("string"),
            self.n,
            serde_json::to_string(&self.convention).expect("string")
        )
        .expect("write to string");
        let m = self.entries.nrows();
        for i in 0..m {
            out.push_str(if i == 0 { "[" } else { ",[" });
            for j in 0..self.entries.ncols() {
                let z = self.entries[(i, j)];
                if j > 0 {
                    out.push(',');
                }
                write!(out, "[{},{}]", fmt17(z.re), fmt17(z.im)).expect("write to string");
            }
            out.push(']');
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            kind: MatrixKind,
            n: usize,
            convention: String,
            entries: Vec<Vec<[f64; 2]>>,
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| Error::Schema {
            field: "matrix".into(),
            message: e.to_string(),
        })?;
        let m = doc.n + 1;
        if doc.entries.len() != m || doc.entries.iter().any(|r| r.len() != m) {
            return Err(Error::Schema {
                field: "entries".into(),
                message: format!("expected a {m}x{m} array"),
            });
        }
        let entries = DMatrix::from_fn(m, m, |i, j| {
            let [re, im] = doc.entries[i][j];
            Complex64::new(re, im)
        });
        let mut out = Self::new(doc.kind, doc.n, entries)?;
        out.convention = doc.convention;
        Ok(out)
    }
}

/// `{:.16e}` prints 17 significant digits, enough to round-trip any f64.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Sine used as a denominator; refuses magnitudes below `π·ε`.
fn s_den(x: Complex64, eps: f64) -> Result<Complex64> {
    let v = sin_pi(x);
    let mag = v.norm();
    if mag < std::f64::consts::PI * eps {
        return Err(Error::NearDegenerateDenominator {
            argument: x,
            magnitude: mag,
        });
    }
    Ok(v)
}

fn s(x: Complex64) -> Complex64 {
    sin_pi(x)
}

/// `Π_{k≠i} s(α_k − β_i) / s(β_k − β_i)` over k = 1..n+1.
fn beta_row_product(p: &Parameters, i: usize, eps: f64) -> Result<Complex64> {
    let mut out = Complex64::new(1.0, 0.0);
    for k in (1..=p.n() + 1).filter(|&k| k != i) {
        out *= s(p.alpha(k) - p.beta(i)) / s_den(p.beta(k) - p.beta(i), eps)?;
    }
    Ok(out)
}

/// `C∞0`: `(F_{D⁽∞⁾}) = (F_{D⁽⁰⁾}) · C∞0`, both bases at z < 0.
pub fn c_inf0(p: &Parameters) -> Result<ConnectionMatrix> {
    c_inf0_eps(p, EPS_GENERIC)
}

pub fn c_inf0_eps(p: &Parameters, eps: f64) -> Result<ConnectionMatrix> {
    let m = p.n() + 1;
    let mut c = DMatrix::zeros(m, m);
    for i in 1..=m {
        let row = beta_row_product(p, i, eps)?;
        for j in 1..=m {
            c[(i - 1, j - 1)] =
                s(p.beta(j) - p.alpha(j)) / s_den(p.beta(i) - p.alpha(j), eps)? * row;
        }
    }
    ConnectionMatrix::new(MatrixKind::Inf0, p.n(), c)
}

/// `C∞0` assembled from the expansion of each `F_{D_i⁽∞⁾}` as a sum over
/// `F_{D_j⁽⁰⁾}`. Written independently of [`c_inf0`]; the two must agree.
pub fn c_inf0_sum_form(p: &Parameters) -> Result<ConnectionMatrix> {
    let m = p.n() + 1;
    let eps = EPS_GENERIC;
    let mut c = DMatrix::zeros(m, m);
    for i in 1..=m {
        // coefficient of F_{D_j^(0)} in F_{D_i^(∞)} lands in column i, row j
        for j in 1..=m {
            let mut coef = s(p.beta(i) - p.alpha(i)) / s_den(p.beta(j) - p.alpha(i), eps)?;
            for k in 1..=m {
                if k != j {
                    coef *= s(p.alpha(k) - p.beta(j));
                    coef /= s_den(p.beta(k) - p.beta(j), eps)?;
                }
            }
            c[(j - 1, i - 1)] = coef;
        }
    }
    ConnectionMatrix::new(MatrixKind::Inf0, p.n(), c)
}

/// `C10`: `(F_{D̃⁽¹⁾}) = (F_{D̃⁽⁰⁾}) · C10` for 0 < z < 1.
pub fn c_10(p: &Parameters) -> Result<ConnectionMatrix> {
    c_10_eps(p, EPS_GENERIC)
}

pub fn c_10_eps(p: &Parameters, eps: f64) -> Result<ConnectionMatrix> {
    let n = p.n();
    let m = n + 1;
    let top = p.alpha(m);
    let mut c = DMatrix::zeros(m, m);
    for i in 1..=m {
        let row = beta_row_product(p, i, eps)?;
        let top_den = s_den(p.beta(i) - top, eps)?;
        for j in 1..=n {
            c[(i - 1, j - 1)] = s(p.beta(j) - p.alpha(j)) * s(top)
                / (s_den(p.beta(i) - p.alpha(j), eps)? * top_den)
                * row;
        }
        c[(i - 1, n)] = row;
    }
    ConnectionMatrix::new(MatrixKind::One0, n, c)
}

/// `C10` from the two sum forms giving each `F_{D̃_i⁽¹⁾}` over `F_{D̃_j⁽⁰⁾}`.
pub fn c_10_sum_form(p: &Parameters) -> Result<ConnectionMatrix> {
    let n = p.n();
    let m = n + 1;
    let eps = EPS_GENERIC;
    let top = p.alpha(m);
    let mut c = DMatrix::zeros(m, m);
    for i in 1..=m {
        for j in 1..=m {
            let mut coef = Complex64::new(1.0, 0.0);
            for k in (1..=m).filter(|&k| k != j) {
                coef *= s(p.alpha(k) - p.beta(j)) / s_den(p.beta(k) - p.beta(j), eps)?;
            }
            if i <= n {
                coef *= s(p.beta(i) - p.alpha(i)) * s(top);
                coef /= s_den(p.beta(j) - p.alpha(i), eps)? * s_den(p.beta(j) - top, eps)?;
            }
            c[(j - 1, i - 1)] = coef;
        }
    }
    ConnectionMatrix::new(MatrixKind::One0, n, c)
}

/// `C01`, the inverse of `C10`, in closed sine form.
pub fn c_01(p: &Parameters) -> Result<ConnectionMatrix> {
    c_01_eps(p, EPS_GENERIC)
}

pub fn c_01_eps(p: &Parameters, eps: f64) -> Result<ConnectionMatrix> {
    let n = p.n();
    let m = n + 1;
    let total = p.total_exponent();
    if dist_to_integer(total) < eps {
        return Err(Error::ResonantTotalExponent { value: total });
    }
    let s_total = s_den(total, eps)?;
    let s_top = s_den(p.alpha(m), eps)?;
    let mut c = DMatrix::zeros(m, m);
    for i in 1..=n {
        let ai = p.alpha(i);
        let mut prod = Complex64::new(1.0, 0.0);
        for k in (1..=n).filter(|&k| k != i) {
            prod *= s(p.beta(k) - ai) / s_den(p.alpha(k) - ai, eps)?;
        }
        for j in 1..=m {
            let num = s(ai) * s(total - p.beta(j) + ai) * s(p.beta(j) - p.alpha(j));
            let den = s_top * s_total * s_den(p.beta(j) - ai, eps)?;
            c[(i - 1, j - 1)] = -num / den * prod;
        }
    }
    for j in 1..=m {
        c[(n, j - 1)] = -s(p.beta(j) - p.alpha(j)) / s_total;
    }
    ConnectionMatrix::new(MatrixKind::Zero1, n, c)
}

/// Basis at 1 over the basis at ∞, as the product `C∞0⁻¹ · C10`.
///
/// The 0-bases of the two factors are identified through their common
/// normalized series; no closed sine form is claimed for the product.
pub fn c_one_inf(p: &Parameters) -> Result<ConnectionMatrix> {
    let inf0 = c_inf0(p)?;
    let one0 = c_10(p)?;
    let inv = inf0.entries.clone().try_inverse().ok_or_else(|| {
        Error::Unsupported("C∞0 is numerically singular".into())
    })?;
    ConnectionMatrix::new(MatrixKind::OneInf, p.n(), inv * one0.entries)
}

/// Builds the matrix of the given kind.
pub fn build(kind: MatrixKind, p: &Parameters) -> Result<ConnectionMatrix> {
    match kind {
        MatrixKind::Inf0 => c_inf0(p),
        MatrixKind::One0 => c_10(p),
        MatrixKind::Zero1 => c_01(p),
        MatrixKind::OneInf => c_one_inf(p),
        MatrixKind::HatOne0 => c_hat(HatKind::One0, p),
        MatrixKind::HatInf0 => c_hat(HatKind::Inf0, p),
    }
}

/// The diagonal scalings `N₀`, `N₁`, `N∞` (the last two coincide).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingMatrices {
    pub n0: DMatrix<Complex64>,
    pub n1: DMatrix<Complex64>,
    pub ninf: DMatrix<Complex64>,
}

pub fn scaling_matrices(p: &Parameters) -> ScalingMatrices {
    let m = p.n() + 1;
    let phase = e_pi(p.total_exponent());
    let n0 = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            e_pi(p.alpha(i + 1))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let n1 = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            phase * e_pi(p.beta(i + 1))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    ScalingMatrices {
        n0,
        ninf: n1.clone(),
        n1,
    }
}

/// Which scaled matrix to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HatKind {
    One0,
    Inf0,
}

/// `Ĉ10 = N₀⁻¹ diag(−e(β)) C10 N₁` or `Ĉ∞0 = N₀⁻¹ C∞0 N∞`.
pub fn c_hat(kind: HatKind, p: &Parameters) -> Result<ConnectionMatrix> {
    let m = p.n() + 1;
    let sc = scaling_matrices(p);
    // the diagonal inverse is taken entrywise
    let n0_inv = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            sc.n0[(i, i)].inv()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    match kind {
        HatKind::One0 => {
            let minus_eb = DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    -e_pi(p.beta(i + 1))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let c = c_10(p)?.entries;
            ConnectionMatrix::new(MatrixKind::HatOne0, p.n(), n0_inv * minus_eb * c * sc.n1)
        }
        HatKind::Inf0 => {
            let c = c_inf0(p)?.entries;
            ConnectionMatrix::new(MatrixKind::HatInf0, p.n(), n0_inv * c * sc.ninf)
        }
    }
}

/// `max |Ĉ(shifted) − Ĉ(p)|` over all entries.
///
/// Both the original and the shifted parameters must pass the genericity
/// check at `eps`.
pub fn periodicity_residual(
    kind: HatKind,
    p: &Parameters,
    dalpha: &[i64],
    dbeta: &[i64],
    eps: f64,
) -> Result<f64> {
    let q = p.shift(dalpha, dbeta)?;
    crate::params::validate(p, eps).into_result()?;
    crate::params::validate(&q, eps).into_result()?;
    let a = c_hat(kind, p)?;
    let b = c_hat(kind, &q)?;
    Ok(max_abs_diff(&a.entries, &b.entries))
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `‖A − I‖_max`.
pub fn distance_to_identity(a: &DMatrix<Complex64>) -> f64 {
    let id = DMatrix::identity(a.nrows(), a.ncols());
    max_abs_diff(a, &id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> Parameters {
        Parameters::new(
            vec![c(0.21, 0.1), c(0.43, -0.2), c(0.87, 0.05)],
            vec![c(1.13, 0.3), c(0.59, -0.15)],
        )
        .unwrap()
    }

    #[test]
    fn last_column_of_c10_is_the_row_product() {
        let p = sample();
        let m = c_10(&p).unwrap();
        for i in 1..=3 {
            let mut want = c(1.0, 0.0);
            for k in (1..=3).filter(|&k| k != i) {
                want *= sin_pi(p.alpha(k) - p.beta(i)) / sin_pi(p.beta(k) - p.beta(i));
            }
            assert!((m.get(i, 3) - want).norm() < 1e-15 * want.norm().max(1.0));
        }
    }

    #[test]
    fn sum_forms_agree() {
        let p = sample();
        let d = max_abs_diff(&c_10(&p).unwrap().entries, &c_10_sum_form(&p).unwrap().entries);
        assert!(d < 1e-13, "{d}");
        let d = max_abs_diff(&c_inf0(&p).unwrap().entries, &c_inf0_sum_form(&p).unwrap().entries);
        assert!(d < 1e-13, "{d}");
    }

    #[test]
    fn bottom_row_of_c01() {
        let p = sample();
        let m = c_01(&p).unwrap();
        for j in 1..=3 {
            let want = -sin_pi(p.beta(j) - p.alpha(j)) / sin_pi(p.total_exponent());
            assert!((m.get(3, j) - want).norm() < 1e-15 * want.norm().max(1.0));
        }
    }

    #[test]
    fn inverse_pair() {
        let p = sample();
        let a = c_01(&p).unwrap().entries;
        let b = c_10(&p).unwrap().entries;
        assert!(distance_to_identity(&(&a * &b)) < 1e-12);
        assert!(distance_to_identity(&(&b * &a)) < 1e-12);
    }

    #[test]
    fn one_inf_composes_back() {
        let p = sample();
        let prod = c_inf0(&p).unwrap().entries * c_one_inf(&p).unwrap().entries;
        assert!(max_abs_diff(&prod, &c_10(&p).unwrap().entries) < 1e-12);
    }

    #[test]
    fn degenerate_denominator_refused() {
        let p = Parameters::real(&[0.3, 0.7], &[1.3]).unwrap();
        assert!(matches!(c_10(&p), Err(Error::NearDegenerateDenominator { .. })));
        let p = Parameters::real(&[0.3, 0.7], &[2.0]).unwrap();
        assert!(matches!(c_01(&p), Err(Error::ResonantTotalExponent { .. })));
    }

    #[test]
    fn scaling_diagonals() {
        let p = Parameters::real(&[0.0, 0.0, 0.0], &[0.0, 0.0]).unwrap();
        let sc = scaling_matrices(&p);
        assert_eq!(sc.n0, DMatrix::identity(3, 3));
        let p = sample();
        let sc = scaling_matrices(&p);
        assert_eq!(sc.n1, sc.ninf);
        let last = sc.n1[(2, 2)];
        assert!((last + e_pi(p.total_exponent())).norm() < 1e-15);
    }

    #[test]
    fn zero_shift_has_zero_residual() {
        let p = sample();
        for kind in [HatKind::One0, HatKind::Inf0] {
            assert_eq!(periodicity_residual(kind, &p, &[0, 0, 0], &[0, 0], 1e-8).unwrap(), 0.0);
        }
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let m = c_10(&sample()).unwrap();
        let text = m.to_json();
        let back = ConnectionMatrix::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
    }
}
