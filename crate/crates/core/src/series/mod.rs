//! Series solutions at 0, 1 and ∞ and the Beta-prefactored solution vectors.

mod at_one;

pub use at_one::{f1_holo, f1_holo_variant, f1_nonholo, f1_nonholo_variant, HoloBase, HoloSeries, NonHoloWeight};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{partial_sum_of, Parameters};
use crate::special::beta;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 100_000;
pub const DEFAULT_MAX_ORDER: usize = 400;

/// Above this modulus of the expansion variable, evaluation needs an
/// explicitly raised term budget.
pub const BOUNDARY_RADIUS: f64 = 0.8;

/// Truncation controls shared by all series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub tol: f64,
    pub max_terms: usize,
    pub max_order: usize,
    /// Set when the caller chose `max_terms`; unlocks evaluation near the disk boundary.
    pub explicit_max_terms: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_terms: DEFAULT_MAX_TERMS,
            max_order: DEFAULT_MAX_ORDER,
            explicit_max_terms: false,
        }
    }
}

impl SeriesOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    /// Raises (or lowers) the term budget and the order budget together.
    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self.max_order = self.max_order.max(max_terms.min(1 << 16));
        self.explicit_max_terms = true;
        self
    }

    fn guard(&self, what: &'static str, modulus: f64) -> Result<()> {
        if modulus >= 1.0 {
            return Err(Error::OutsideDisk { what, modulus });
        }
        if modulus > BOUNDARY_RADIUS && !self.explicit_max_terms {
            return Err(Error::NearDiskBoundary { what, modulus });
        }
        Ok(())
    }
}

/// A truncated series value.
///
/// `tail_estimate` bounds the omitted terms relative to `max(1, |partial sum|)`
/// of the bare series (before any power prefactor).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    fn scaled(self, factor: Complex64) -> Self {
        Self {
            value: self.value * factor,
            ..self
        }
    }
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

pub(crate) fn check_lower(lower: &[Complex64]) -> Result<()> {
    match lower.iter().find(|b| is_nonpositive_integer(**b)) {
        Some(&base) => Err(Error::LowerPole { base }),
        None => Ok(()),
    }
}

/// Index from which the term-ratio modulus is monotone enough for the
/// geometric tail bound to hold.
pub(crate) fn monotone_start(params: &[Complex64]) -> usize {
    let big = params.iter().map(|p| p.norm()).fold(0.0, f64::max);
    (2.0 * big).ceil() as usize + 2
}

/// `Σ_k Π(upper)_k / (Π(lower)_k k!) z^k`.
pub fn eval_ghs(
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
    opts: &SeriesOptions,
) -> Result<SeriesValue> {
    opts.guard("z", z.norm())?;
    ghs_unguarded(upper, lower, z, opts.tol, opts.max_terms)
}

/// Pairing behind the tail bound of [`ghs_unguarded`].
///
/// Each lower base (and the `k+1` of the factorial) is paired greedily with
/// the nearest upper one; then `|u+k| / |l+k| <= 1 + |u−l| / (Re l + k)`,
/// which only decreases in `k`, bounds every later term ratio.
struct RatioBound {
    /// `(|u − l|, Re l)` per pair
    pairs: Vec<(f64, f64)>,
    /// `Re l` of lower bases left without an upper partner
    unpaired: Vec<f64>,
    /// an upper base left over makes the ratio grow without bound
    unbounded: bool,
}

impl RatioBound {
    fn new(upper: &[Complex64], lower: &[Complex64]) -> Self {
        let mut free: Vec<Complex64> = upper.to_vec();
        let mut pairs = Vec::new();
        let mut unpaired = Vec::new();
        for l in lower.iter().copied().chain(std::iter::once(Complex64::new(1.0, 0.0))) {
            let nearest = (0..free.len()).min_by(|&a, &b| (free[a] - l).norm().total_cmp(&(free[b] - l).norm()));
            match nearest {
                Some(idx) => {
                    let u = free.swap_remove(idx);
                    pairs.push(((u - l).norm(), l.re));
                }
                None => unpaired.push(l.re),
            }
        }
        Self {
            pairs,
            unpaired,
            unbounded: !free.is_empty(),
        }
    }

    /// `sup_{k' >= k} |term_{k'+1} / term_{k'}| / |z|`, if finite yet.
    fn at(&self, k: usize) -> Option<f64> {
        if self.unbounded {
            return None;
        }
        let kf = k as f64;
        let mut bound = 1.0;
        for &(d, re) in &self.pairs {
            if re + kf <= 0.0 {
                return None;
            }
            bound *= 1.0 + d / (re + kf);
        }
        for &re in &self.unpaired {
            if re + kf <= 0.0 {
                return None;
            }
            bound /= re + kf;
        }
        Some(bound)
    }
}

/// [`eval_ghs`] without the boundary refusal; callers have already vetted `z`.
pub(crate) fn ghs_unguarded(
    upper: &[Complex64],
    lower: &[Complex64],
    z: Complex64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesValue> {
    check_lower(lower)?;
    let zabs = z.norm();
    let bound = RatioBound::new(upper, lower);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..max_terms {
        if term == Complex64::new(0.0, 0.0) {
            return Ok(SeriesValue {
                value: sum,
                tail_estimate: 0.0,
                terms_used: k + 1,
            });
        }
        let kf = k as f64;
        let mut ratio = Complex64::new(1.0 / (kf + 1.0), 0.0);
        for a in upper {
            ratio *= a + kf;
        }
        for b in lower {
            ratio /= b + kf;
        }
        if let Some(rho) = bound.at(k) {
            let q = zabs * rho;
            if q < 1.0 {
                let tail = term.norm() * q / (1.0 - q) / sum.norm().max(1.0);
                if tail <= tol {
                    return Ok(SeriesValue {
                        value: sum,
                        tail_estimate: tail,
                        terms_used: k + 1,
                    });
                }
            }
        }
        term *= ratio * z;
        sum += term;
    }
    Err(Error::MaxTermsExceeded {
        partial: sum,
        terms: max_terms,
    })
}

/// Sign convention for the power prefactor at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `z^{1−β_i}`, for 0 < z < 1.
    PosZ,
    /// `(−z)^{1−β_i}`, for z < 0.
    NegZ,
}

fn check_index(i: usize, max: usize, what: &str) -> Result<()> {
    if i == 0 || i > max {
        return Err(Error::IndexOutOfRange {
            what: format!("{what} index {i} not in 1..={max}"),
        });
    }
    Ok(())
}

fn power(base: Complex64, exponent: Complex64) -> Complex64 {
    if exponent == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else {
        base.powc(exponent)
    }
}

/// `f_i^{(0)}`: the local solution at 0 with exponent `1 − β_i`.
pub fn f0(
    i: usize,
    p: &Parameters,
    z: Complex64,
    branch: Branch,
    opts: &SeriesOptions,
) -> Result<SeriesValue> {
    let m = p.n() + 1;
    check_index(i, m, "f0")?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Schema {
            field: "z".into(),
            message: "z must be nonzero".into(),
        });
    }
    let bi = p.beta(i);
    let upper: Vec<Complex64> = (1..=m).map(|s| p.alpha(s) - bi + 1.0).collect();
    let lower: Vec<Complex64> = (1..=m).filter(|&s| s != i).map(|s| p.beta(s) - bi + 1.0).collect();
    let series = eval_ghs(&upper, &lower, z, opts)?;
    let base = match branch {
        Branch::PosZ => z,
        Branch::NegZ => -z,
    };
    Ok(series.scaled(power(base, Complex64::new(1.0, 0.0) - bi)))
}

/// `f_i^{(∞)}`: the local solution at ∞ with exponent `α_i`.
pub fn finf(i: usize, p: &Parameters, z: Complex64, opts: &SeriesOptions) -> Result<SeriesValue> {
    let m = p.n() + 1;
    check_index(i, m, "finf")?;
    if z.norm() <= 1.0 {
        return Err(Error::OutsideDisk {
            what: "1/z",
            modulus: 1.0 / z.norm(),
        });
    }
    let ai = p.alpha(i);
    let upper: Vec<Complex64> = (1..=m).map(|s| ai - p.beta(s) + 1.0).collect();
    let lower: Vec<Complex64> = (1..=m).filter(|&s| s != i).map(|s| ai - p.alpha(s) + 1.0).collect();
    let series = eval_ghs(&upper, &lower, z.inv(), opts)?;
    Ok(series.scaled(power(-z, -ai)))
}

/// Which fundamental system a solution vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Zero,
    One,
    Infinity,
}

/// The values `F_D` for the n+1 domains at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionVector {
    pub point: Point,
    pub z: Complex64,
    pub values: Vec<Complex64>,
    pub branch_note: String,
    /// Per-component truncation records.
    pub series: Vec<SeriesValue>,
}

/// Arguments `(a, b)` of the Beta factors in [`prefactor`].
pub fn prefactor_arguments(point: Point, i: usize, p: &Parameters) -> Result<Vec<(Complex64, Complex64)>> {
    let n = p.n();
    let m = n + 1;
    check_index(i, m, "component")?;
    let args = match point {
        Point::Zero => (1..=m)
            .filter(|&s| s != i)
            .map(|s| (p.alpha(s) - p.beta(i) + 1.0, p.beta(s) - p.alpha(s)))
            .collect(),
        Point::Infinity => (1..=m)
            .filter(|&s| s != i)
            .map(|s| (p.alpha(i) - p.beta(s) + 1.0, p.beta(s) - p.alpha(s)))
            .collect(),
        Point::One if i <= n => {
            let mut v: Vec<_> = (1..=n)
                .filter(|&s| s != i)
                .map(|s| (p.alpha(i) - p.beta(s) + 1.0, p.beta(s) - p.alpha(s)))
                .collect();
            v.push((p.alpha(i), p.alpha(n + 1) - p.beta(i) + 1.0));
            v
        }
        Point::One => {
            let a: Vec<Complex64> = p.alphas().to_vec();
            let b: Vec<Complex64> = (1..=m).map(|k| p.beta(k)).collect();
            let mut v = Vec::with_capacity(n);
            for s in 1..=n {
                let head = partial_sum_of(&b, 1, s)? - partial_sum_of(&a, 1, s)?;
                v.push((head, p.beta(s + 1) - p.alpha(s + 1)));
            }
            v
        }
    };
    Ok(args)
}

/// Beta-product prefactor converting the normalized series of component `i`
/// into the integral over the matching domain.
pub fn prefactor(point: Point, i: usize, p: &Parameters) -> Result<Complex64> {
    let mut out = Complex64::new(1.0, 0.0);
    for (a, b) in prefactor_arguments(point, i, p)? {
        out *= beta(a, b)?;
    }
    Ok(out)
}

/// Normalized series of one component, without its Beta prefactor.
pub fn component(
    point: Point,
    i: usize,
    p: &Parameters,
    z: Complex64,
    opts: &SeriesOptions,
) -> Result<SeriesValue> {
    match point {
        Point::Zero => {
            let branch = zero_branch(z);
            f0(i, p, z, branch, opts)
        }
        Point::Infinity => finf(i, p, z, opts),
        Point::One if i <= p.n() => f1_holo(i, p, z, opts),
        Point::One => {
            check_index(i, p.n() + 1, "component")?;
            f1_nonholo(p, z, opts)
        }
    }
}

/// `pos_z` on the right half plane, `neg_z` otherwise.
pub fn zero_branch(z: Complex64) -> Branch {
    if z.re > 0.0 {
        Branch::PosZ
    } else {
        Branch::NegZ
    }
}

/// All n+1 values `F_D(z)` at the requested point.
pub fn solution_vector(
    point: Point,
    p: &Parameters,
    z: Complex64,
    opts: &SeriesOptions,
) -> Result<SolutionVector> {
    Ok(solution_vectors(point, p, &[z], opts)?.remove(0))
}

/// [`solution_vector`] at several points; z-independent work for the
/// holomorphic solutions at 1 is shared between them.
pub fn solution_vectors(
    point: Point,
    p: &Parameters,
    zs: &[Complex64],
    opts: &SeriesOptions,
) -> Result<Vec<SolutionVector>> {
    let m = p.n() + 1;
    let prefactors: Vec<Complex64> = (1..=m).map(|i| prefactor(point, i, p)).collect::<Result<_>>()?;
    let mut holo: Vec<HoloSeries> = match point {
        Point::One => (1..m).map(|i| HoloSeries::new(i, p, HoloBase::AlphaI)).collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let mut out = Vec::with_capacity(zs.len());
    for &z in zs {
        let mut values = Vec::with_capacity(m);
        let mut series = Vec::with_capacity(m);
        for i in 1..=m {
            let s = match point {
                Point::One if i < m => holo[i - 1].eval(z, opts)?,
                _ => component(point, i, p, z, opts)?,
            };
            values.push(prefactors[i - 1] * s.value);
            series.push(s);
        }
        out.push(SolutionVector {
            point,
            z,
            values,
            branch_note: branch_note(point, z).to_string(),
            series,
        });
    }
    Ok(out)
}

fn branch_note(point: Point, z: Complex64) -> &'static str {
    match point {
        Point::Zero => match zero_branch(z) {
            Branch::PosZ => "z^(1-beta_i) with principal power",
            Branch::NegZ => "(-z)^(1-beta_i) with principal power",
        },
        Point::One => "(1-z)^(beta_(1,n)-alpha_(1,n+1)) on the last component",
        Point::Infinity => "(-z)^(-alpha_i) with principal power",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ghs_log_closed_form() {
        let opts = SeriesOptions::with_tol(1e-15);
        let v = eval_ghs(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0)], c(0.5, 0.0), &opts).unwrap();
        assert!((v.value - 2.0 * 2f64.ln()).norm() < 1e-14);
        assert!(v.tail_estimate <= 1e-15);
    }

    #[test]
    fn ghs_at_zero_is_one() {
        let v = eval_ghs(&[c(0.3, 0.2), c(1.1, 0.0)], &[c(0.7, -0.4)], c(0.0, 0.0), &SeriesOptions::default())
            .unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
    }

    #[test]
    fn ghs_binomial() {
        let a = c(0.3, 0.0);
        let b = c(1.7, 0.2);
        let z = c(0.25, 0.0);
        let v = eval_ghs(&[a, b], &[b], z, &SeriesOptions::with_tol(1e-15)).unwrap();
        let want = (c(1.0, 0.0) - z).powc(-a);
        assert!((v.value - want).norm() < 1e-14);
    }

    #[test]
    fn ghs_refusals() {
        let opts = SeriesOptions::default();
        let r = eval_ghs(&[c(1.0, 0.0)], &[], c(1.0, 0.0), &opts);
        assert!(matches!(r, Err(Error::OutsideDisk { .. })));
        let r = eval_ghs(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0)], c(0.9, 0.0), &opts);
        assert!(matches!(r, Err(Error::NearDiskBoundary { .. })));
        let raised = opts.with_max_terms(1_000_000);
        let v = eval_ghs(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0)], c(0.9, 0.0), &raised).unwrap();
        assert!((v.value - (-(0.1f64).ln() / 0.9)).norm() < 1e-11);
        let r = eval_ghs(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0)], c(0.5, 0.0), &SeriesOptions {
            max_terms: 5,
            ..opts
        });
        match r {
            Err(Error::MaxTermsExceeded { partial, terms }) => {
                assert_eq!(terms, 5);
                assert!(partial.norm() > 1.0);
            }
            other => panic!("{other:?}"),
        }
        let r = eval_ghs(&[c(1.0, 0.0)], &[c(-2.0, 0.0)], c(0.5, 0.0), &opts);
        assert!(matches!(r, Err(Error::LowerPole { .. })));
    }

    #[test]
    fn terminating_series_stops() {
        // (1 - z)^2 as 1F0(-2;;z)
        let v = eval_ghs(&[c(-2.0, 0.0)], &[], c(0.5, 0.0), &SeriesOptions::default()).unwrap();
        assert!((v.value - 0.25).norm() < 1e-16);
        assert_eq!(v.tail_estimate, 0.0);
    }
}
