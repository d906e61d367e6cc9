//! Local solutions at z = 1.
//!
//! The non-holomorphic solution is a power series in `1 − z` whose
//! coefficients come from a dynamic program over running index totals.
//! The holomorphic ones are double sums; the inner index converges only
//! algebraically and is summed with Richardson extrapolation on known
//! exponents.

use num_complex::Complex64;

use super::{check_lower, ghs_unguarded, monotone_start, SeriesOptions, SeriesValue};
use crate::error::{Error, Result};
use crate::params::Parameters;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Per-index weight in the non-holomorphic coefficient recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonHoloWeight {
    /// `(β_s − α_{s+1})_j / j!`.
    Pochhammer,
    /// `(β_s − α_{s+1}) / j!` read literally as a plain factor. Kept only so
    /// the quadrature comparison that rules it out can be rerun.
    PrintedFactor,
}

/// Base of the `(·)_{m₁+m₂}` factor in the holomorphic solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoloBase {
    /// `(α_i)_{m₁+m₂}`, as the Beta-shift step of the integral forces.
    AlphaI,
    /// `(α₁)_{m₁+m₂}` for every i. Kept only for the discriminating test.
    AlphaOne,
}

/// `f_{n+1}^{(1)}(z) = (1−z)^{β_{1,n}−α_{1,n+1}} Σ_m c_m (1−z)^m`.
pub fn f1_nonholo(p: &Parameters, z: Complex64, opts: &SeriesOptions) -> Result<SeriesValue> {
    f1_nonholo_variant(p, z, opts, NonHoloWeight::Pochhammer)
}

pub fn f1_nonholo_variant(
    p: &Parameters,
    z: Complex64,
    opts: &SeriesOptions,
    weight: NonHoloWeight,
) -> Result<SeriesValue> {
    let x = ONE - z;
    opts.guard("1-z", x.norm())?;
    let n = p.n();
    // cum[s] = Σ_{k<=s} (β_k − α_k), s = 0..n+1
    let mut cum = vec![ZERO; n + 2];
    for s in 1..=n + 1 {
        cum[s] = cum[s - 1] + p.beta(s) - p.alpha(s);
    }
    check_lower(&cum[2..=n + 1])?;
    // shift[s] = β_s − α_{s+1}, s = 1..n
    let shift: Vec<Complex64> = (0..=n)
        .map(|s| if s == 0 { ZERO } else { p.beta(s) - p.alpha(s + 1) })
        .collect();

    let mut params: Vec<Complex64> = cum.clone();
    params.extend_from_slice(&shift);
    let start = monotone_start(&params);
    let xabs = x.norm();

    // g[s][I]; weights w[s][j]; ratios r[s] = (cum_s)_I / (cum_{s+1})_I
    let mut g: Vec<Vec<Complex64>> = vec![Vec::new(); n + 1];
    let mut w: Vec<Vec<Complex64>> = vec![Vec::new(); n + 1];
    let mut ratio = vec![ONE; n + 1];
    let mut sum = ZERO;
    let mut xpow = ONE;
    let mut prev_abs = f64::NAN;
    for order in 0..opts.max_order {
        let fi = order as f64;
        g[0].push(if order == 0 { ONE } else { ZERO });
        for s in 1..=n {
            let wj = if order == 0 {
                match weight {
                    NonHoloWeight::Pochhammer => ONE,
                    NonHoloWeight::PrintedFactor => shift[s],
                }
            } else {
                let prev = w[s][order - 1];
                match weight {
                    NonHoloWeight::Pochhammer => prev * (shift[s] + fi - 1.0) / fi,
                    NonHoloWeight::PrintedFactor => prev / fi,
                }
            };
            w[s].push(wj);
            if order > 0 {
                ratio[s] *= (cum[s] + fi - 1.0) / (cum[s + 1] + fi - 1.0);
            }
            let mut conv = ZERO;
            for j in 0..=order {
                conv += g[s - 1][order - j] * w[s][j];
            }
            g[s].push(ratio[s] * conv);
        }
        let term = g[n][order] * xpow;
        sum += term;
        let tabs = term.norm();
        if order >= start && prev_abs > 0.0 {
            let q = (tabs / prev_abs).max(xabs);
            if q < 1.0 {
                let tail = tabs * q / (1.0 - q) / sum.norm().max(1.0);
                if tail <= opts.tol {
                    let pref = if p.total_exponent() == ZERO { ONE } else { x.powc(p.total_exponent()) };
                    return Ok(SeriesValue {
                        value: pref * sum,
                        tail_estimate: tail,
                        terms_used: order + 1,
                    });
                }
            }
        }
        if tabs == 0.0 && order >= start {
            let pref = x.powc(p.total_exponent());
            return Ok(SeriesValue {
                value: pref * sum,
                tail_estimate: 0.0,
                terms_used: order + 1,
            });
        }
        prev_abs = tabs;
        xpow *= x;
    }
    Err(Error::MaxOrderExceeded {
        partial: x.powc(p.total_exponent()) * sum,
        order: opts.max_order,
    })
}

/// `f_i^{(1)}(z)`, 1 <= i <= n: the holomorphic solutions at 1.
pub fn f1_holo(i: usize, p: &Parameters, z: Complex64, opts: &SeriesOptions) -> Result<SeriesValue> {
    f1_holo_variant(i, p, z, opts, HoloBase::AlphaI)
}

pub fn f1_holo_variant(
    i: usize,
    p: &Parameters,
    z: Complex64,
    opts: &SeriesOptions,
    base: HoloBase,
) -> Result<SeriesValue> {
    HoloSeries::new(i, p, base)?.eval(z, opts)
}

/// Smallest partial-sum length used by the extrapolation.
const RICHARDSON_N0: usize = 8;
/// Levels tried first; more are added until the estimate meets the tolerance.
const RICHARDSON_LEVELS: usize = 10;
/// Term budget of each inner Gauss series.
const INNER_MAX_TERMS: usize = 4000;

/// Evaluator for one holomorphic solution at 1.
///
/// `f = Σ_{m₂} P(m₂) G(m₂) · ₂F₁(α_{n+1}, B+m₂; c+m₂; 1−z)` where
/// `P(m) = (A)_m (B)_m / ((c)_m m!)` and `G(m) = m! h(m)`. The outer sum
/// converges only like a power of the cut-off, so it is extrapolated. The
/// z-independent coefficients are kept between calls, which makes repeated
/// evaluation at several points cheap.
pub struct HoloSeries {
    top: Complex64,
    b_up: Complex64,
    c_low: Complex64,
    /// decay exponents of the outer terms, one per factor `s ≠ i`
    exponents: Vec<Complex64>,
    /// `P(m) G(m)`, grown on demand
    coef: Vec<Complex64>,
    p_next: Complex64,
    a_up: Complex64,
    g: AlternatingSums,
}

impl HoloSeries {
    pub fn new(i: usize, p: &Parameters, base: HoloBase) -> Result<Self> {
        let n = p.n();
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange {
                what: format!("f1_holo index {i} not in 1..={n}"),
            });
        }
        let ai = p.alpha(i);
        let top = p.alpha(n + 1);
        let a_up = ai - p.beta(i) + 1.0;
        let b_up = match base {
            HoloBase::AlphaI => ai,
            HoloBase::AlphaOne => p.alpha(1),
        };
        let c_low = ai + top - p.beta(i) + 1.0;
        check_lower(&[c_low])?;
        // inner alternating sum factors (α_i − β_s + 1)_k / (α_i − α_s + 1)_k, s ≠ i
        let factors: Vec<(Complex64, Complex64)> = (1..=n)
            .filter(|&s| s != i)
            .map(|s| (ai - p.beta(s) + 1.0, ai - p.alpha(s) + 1.0))
            .collect();
        check_lower(&factors.iter().map(|f| f.1).collect::<Vec<_>>())?;
        let exponents: Vec<Complex64> = factors
            .iter()
            .map(|(a, _)| c_low + a - a_up - b_up)
            .collect();
        Ok(Self {
            top,
            b_up,
            c_low,
            exponents,
            coef: Vec::new(),
            p_next: ONE,
            a_up,
            g: AlternatingSums::new(&factors),
        })
    }

    fn grow(&mut self, len: usize) {
        self.g.extend(len);
        while self.coef.len() < len {
            let m = self.coef.len();
            self.coef.push(self.p_next * self.g.values[m]);
            let mf = m as f64;
            self.p_next *= (self.a_up + mf) * (self.b_up + mf) / ((self.c_low + mf) * (mf + 1.0));
        }
    }

    /// Inner series `₂F₁(α_{n+1}, B+m; c+m; x)`.
    fn gauss(&self, m: usize, x: Complex64, tol: f64) -> Result<Complex64> {
        let mf = m as f64;
        Ok(ghs_unguarded(&[self.top, self.b_up + mf], &[self.c_low + mf], x, tol, INNER_MAX_TERMS)?.value)
    }

    pub fn eval(&mut self, z: Complex64, opts: &SeriesOptions) -> Result<SeriesValue> {
        let x = ONE - z;
        opts.guard("1-z", x.norm())?;
        let inner_tol = opts.tol * 1e-2;
        if self.exponents.is_empty() {
            // n = 1: only m₂ = 0 contributes
            let v = ghs_unguarded(&[self.top, self.b_up], &[self.c_low], x, opts.tol, opts.max_terms)?;
            return Ok(v);
        }
        if let Some(&bad) = self.exponents.iter().find(|e| e.re <= 0.0) {
            return Err(Error::Divergent { exponent: bad });
        }
        let mut partial = vec![ZERO];
        let mut levels = RICHARDSON_LEVELS;
        loop {
            let n_max = RICHARDSON_N0 << (levels - 1);
            if n_max > opts.max_terms {
                return Err(Error::MaxTermsExceeded {
                    partial: *partial.last().expect("seeded"),
                    terms: opts.max_terms,
                });
            }
            self.grow(n_max);
            while partial.len() <= n_max {
                let m = partial.len() - 1;
                let term = self.coef[m] * self.gauss(m, x, inner_tol)?;
                partial.push(partial[m] + term);
            }
            let sums: Vec<Complex64> = (0..levels).map(|k| partial[RICHARDSON_N0 << k]).collect();
            let (value, estimate) = richardson(&sums, &self.exponents);
            let rel = estimate / value.norm().max(1.0);
            if rel <= opts.tol {
                return Ok(SeriesValue {
                    value,
                    tail_estimate: rel,
                    terms_used: n_max,
                });
            }
            levels += 1;
        }
    }
}

/// `G(m) = Σ_{k=0}^{m} (−1)^k C(m,k) Π_s (a_s)_k / (b_s)_k`, grown on demand.
///
/// Summed directly this loses about 2^m to cancellation. Instead each factor
/// is folded in with the Leibniz rule for forward differences, which turns
/// the alternating sum into a convolution of sign-stable sequences:
/// `G_new(m) = m!/(b)_m · Σ_j (b−a)_{m−j}/(m−j)! · (a)_j/j! · G_old(j)`.
/// The first factor acts on a delta and gives `(b−a)_m / (b)_m` outright.
/// Every stage is causal, so extending the table never revisits old rows.
struct AlternatingSums {
    stages: Vec<Stage>,
    values: Vec<Complex64>,
}

struct Stage {
    a: Complex64,
    b: Complex64,
    /// running `(b−a)_m/m!`, `(a)_m/m!`, `m!/(b)_m` for the next m
    u_next: Complex64,
    v_next: Complex64,
    w_next: Complex64,
    /// `(b−a)_p/p!`, split into parts for the convolution loop
    u_re: Vec<f64>,
    u_im: Vec<f64>,
    /// `(a)_j/j! · G_prev(j)`
    v_re: Vec<f64>,
    v_im: Vec<f64>,
    out: Vec<Complex64>,
}

impl Stage {
    fn new(a: Complex64, b: Complex64) -> Self {
        Self {
            a,
            b,
            u_next: ONE,
            v_next: ONE,
            w_next: ONE,
            u_re: Vec::new(),
            u_im: Vec::new(),
            v_re: Vec::new(),
            v_im: Vec::new(),
            out: Vec::new(),
        }
    }

    /// Appends row m = out.len(), given the previous stage's value at m
    /// (`None` for the first stage, whose input is a delta).
    fn push(&mut self, prev: Option<Complex64>) {
        let m = self.out.len();
        let (u, v, w) = (self.u_next, self.v_next, self.w_next);
        let mf = (m + 1) as f64;
        self.u_next *= (self.b - self.a + mf - 1.0) / mf;
        self.v_next *= (self.a + mf - 1.0) / mf;
        self.w_next *= mf / (self.b + mf - 1.0);
        let value = match prev {
            None => w * u,
            Some(g) => {
                self.u_re.push(u.re);
                self.u_im.push(u.im);
                let vg = v * g;
                self.v_re.push(vg.re);
                self.v_im.push(vg.im);
                w * convolve_at(&self.u_re, &self.u_im, &self.v_re, &self.v_im)
            }
        };
        self.out.push(value);
    }
}

/// `Σ_{j=0}^{m} u(m−j) v(j)` with `m = len − 1`, eight accumulators in a
/// fixed order so results do not depend on the build.
fn convolve_at(u_re: &[f64], u_im: &[f64], v_re: &[f64], v_im: &[f64]) -> Complex64 {
    const W: usize = 8;
    let len = v_re.len();
    let mut acc_re = [0.0f64; W];
    let mut acc_im = [0.0f64; W];
    let head = len - len % W;
    for j0 in (0..head).step_by(W) {
        let k0 = len - j0 - W;
        let (ur, ui) = (&u_re[k0..k0 + W], &u_im[k0..k0 + W]);
        let (vr, vi) = (&v_re[j0..j0 + W], &v_im[j0..j0 + W]);
        for l in 0..W {
            let k = W - 1 - l;
            acc_re[l] += ur[k] * vr[l] - ui[k] * vi[l];
            acc_im[l] += ur[k] * vi[l] + ui[k] * vr[l];
        }
    }
    for j in head..len {
        let k = len - 1 - j;
        acc_re[0] += u_re[k] * v_re[j] - u_im[k] * v_im[j];
        acc_im[0] += u_re[k] * v_im[j] + u_im[k] * v_re[j];
    }
    Complex64::new(acc_re.iter().sum(), acc_im.iter().sum())
}

impl AlternatingSums {
    fn new(factors: &[(Complex64, Complex64)]) -> Self {
        Self {
            stages: factors.iter().map(|&(a, b)| Stage::new(a, b)).collect(),
            values: Vec::new(),
        }
    }

    fn extend(&mut self, len: usize) {
        while self.values.len() < len {
            let m = self.values.len();
            let mut prev: Option<Complex64> = None;
            for stage in &mut self.stages {
                stage.push(prev);
                prev = Some(stage.out[m]);
            }
            self.values.push(prev.unwrap_or(if m == 0 { ONE } else { ZERO }));
        }
    }
}

/// Table of `G(m)` for m < len.
#[cfg(test)]
pub(crate) fn alternating_binomial_sums(factors: &[(Complex64, Complex64)], len: usize) -> Vec<Complex64> {
    let mut g = AlternatingSums::new(factors);
    g.extend(len);
    g.values
}

/// Richardson extrapolation of partial sums taken at N₀·2^k, eliminating
/// error terms `N^{−γ}` for the given exponent families and their integer
/// shifts in order of increasing real part. Returns the value and the
/// difference to the best estimate of the previous column.
fn richardson(sums: &[Complex64], families: &[Complex64]) -> (Complex64, f64) {
    let steps = sums.len() - 1;
    let mut gammas: Vec<Complex64> = Vec::new();
    let mut shift = 0.0;
    while gammas.len() < steps {
        for f in families {
            gammas.push(f + shift);
        }
        shift += 1.0;
    }
    gammas.sort_by(|a, b| a.re.total_cmp(&b.re));
    gammas.truncate(steps);

    let mut row = sums.to_vec();
    let mut prev_best = *row.last().expect("nonempty");
    for g in &gammas {
        prev_best = *row.last().expect("nonempty");
        let f = Complex64::new(2.0, 0.0).powc(*g);
        row = (0..row.len() - 1)
            .map(|k| (f * row[k + 1] - row[k]) / (f - 1.0))
            .collect();
    }
    let value = row[0];
    (value, (value - prev_best).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::eval_ghs;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pochhammer(a: Complex64, k: usize) -> Complex64 {
        (0..k).fold(ONE, |acc, j| acc * (a + j as f64))
    }

    #[test]
    fn alternating_sums_match_direct_for_small_m() {
        let factors = [(c(0.7, 0.1), c(1.3, -0.2)), (c(0.45, -0.3), c(0.9, 0.25))];
        let g = alternating_binomial_sums(&factors, 12);
        for m in 0..12 {
            let mut direct = ZERO;
            let mut binom = 1.0;
            for k in 0..=m {
                let mut r = ONE;
                for (a, b) in factors {
                    r *= pochhammer(a, k) / pochhammer(b, k);
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                direct += r * binom * sign;
                binom = binom * (m - k) as f64 / (k + 1) as f64;
            }
            assert!((g[m] - direct).norm() < 1e-12, "m={m} {} {}", g[m], direct);
        }
    }

    #[test]
    fn single_factor_is_chu_vandermonde() {
        let (a, b) = (c(0.6, 0.2), c(1.4, -0.1));
        let g = alternating_binomial_sums(&[(a, b)], 40);
        for (m, gm) in g.iter().enumerate() {
            let want = pochhammer(b - a, m) / pochhammer(b, m);
            assert!((gm - want).norm() < 1e-13 * want.norm().max(1e-3));
        }
    }

    #[test]
    fn nonholo_n1_is_gauss_solution_at_one() {
        let p = Parameters::real(&[0.3, 0.7], &[1.4]).unwrap();
        let z = c(0.5, 0.0);
        let opts = SeriesOptions::with_tol(1e-15);
        let got = f1_nonholo(&p, z, &opts).unwrap();
        let x = ONE - z;
        let (a1, a2, b1) = (p.alpha(1), p.alpha(2), p.beta(1));
        let want = x.powc(b1 - a1 - a2) * eval_ghs(&[b1 - a2, b1 - a1], &[b1 + 1.0 - a1 - a2], x, &opts).unwrap().value;
        assert!((got.value - want).norm() < 1e-13);
    }

    #[test]
    fn holo_n1_is_gauss_solution_at_one() {
        let p = Parameters::new(vec![c(0.3, 0.1), c(0.7, -0.2)], vec![c(1.4, 0.05)]).unwrap();
        let z = c(0.6, 0.0);
        let opts = SeriesOptions::with_tol(1e-15);
        let got = f1_holo(1, &p, z, &opts).unwrap();
        let x = ONE - z;
        let (a1, a2, b1) = (p.alpha(1), p.alpha(2), p.beta(1));
        let want = eval_ghs(&[a2, a1], &[a1 + a2 - b1 + 1.0], x, &opts).unwrap().value;
        assert!((got.value - want).norm() < 1e-13);
    }

    #[test]
    fn richardson_removes_known_power() {
        // Σ 1/(m+1)^{1.5} partial sums converge like N^{-0.5}
        let zeta = 2.612_375_348_685_488_3;
        let mut sums = Vec::new();
        let mut acc = 0.0;
        let mut m = 0;
        for k in 0..10 {
            while m < 8 << k {
                acc += 1.0 / ((m + 1) as f64).powf(1.5);
                m += 1;
            }
            sums.push(c(acc, 0.0));
        }
        let (v, _) = richardson(&sums, &[c(0.5, 0.0)]);
        assert!((v.re - zeta).abs() < 1e-10, "{v}");
    }
}

