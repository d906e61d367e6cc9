//! Residue bookkeeping behind the inverse-matrix identity.
//!
//! Each entry of `C⁽⁰¹⁾C⁽¹⁰⁾` is a sum over k of sine products; after
//! `s(A) = (e(A) − e(−A))/(2√−1)` every summand is the residue at `b_k²` of
//! a rational function in `x`. The identities then follow from the residue
//! theorem on the Riemann sphere. Here the residues are evaluated numerically
//! by deflating the explicit linear factors.
//!
//! Three prefactors differ from the naive transcription of the rational
//! functions: case (i) carries `a_j` (the column index), case (ii) carries
//! `−1/(2√−1 Π a_l²)` and case (iii) has an overall minus sign. Only with these
//! does every residue equal its sine summand; the residue sums themselves
//! vanish either way.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Parameters;
use crate::special::{e_pi, sin_pi};

/// Minimum separation between two poles.
pub const POLE_SEPARATION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueCase {
    IOffdiag,
    IDiag,
    Ii,
    Iii,
    Iv,
}

impl ResidueCase {
    pub const ALL: [ResidueCase; 5] = [
        ResidueCase::IOffdiag,
        ResidueCase::IDiag,
        ResidueCase::Ii,
        ResidueCase::Iii,
        ResidueCase::Iv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResidueCase::IOffdiag => "i_offdiag",
            ResidueCase::IDiag => "i_diag",
            ResidueCase::Ii => "ii",
            ResidueCase::Iii => "iii",
            ResidueCase::Iv => "iv",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

/// `k · Π(x − zeros) / Π(x − poles)` with simple poles.
#[derive(Debug, Clone)]
struct Rational {
    k: Complex64,
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
}

impl Rational {
    fn residue(&self, idx: usize) -> Complex64 {
        let p = self.poles[idx];
        let mut r = self.k;
        for &z in &self.zeros {
            r *= p - z;
        }
        for (l, &q) in self.poles.iter().enumerate() {
            if l != idx {
                r /= p - q;
            }
        }
        r
    }

    /// Residue at infinity, `−lim x f(x)`.
    fn residue_at_infinity(&self) -> Complex64 {
        if self.poles.len() == self.zeros.len() + 1 {
            -self.k
        } else {
            debug_assert!(self.poles.len() > self.zeros.len() + 1);
            Complex64::new(0.0, 0.0)
        }
    }

    fn check_poles(&self) -> Result<()> {
        for (a, &p) in self.poles.iter().enumerate() {
            for &q in &self.poles[a + 1..] {
                if (p - q).norm() < POLE_SEPARATION {
                    return Err(Error::PoleCollision { first: p, second: q });
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one residue-sum check, for one index choice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueCheck {
    pub case: ResidueCase,
    /// `(i, j)` for case (i), `(i, 0)` for (ii), `(0, j)` for (iii).
    pub indices: (usize, usize),
    /// Sum of the residues at the poles `b_k²`.
    pub residue_sum: Complex64,
    /// What that sum must equal, from the remaining poles.
    pub expected: Complex64,
    /// `|residue_sum − expected|`, and the disagreement with the closed forms
    /// of the remaining residues, relative to `max(1, max |residue|)`.
    pub residual: f64,
    /// Largest difference between a residue and its sine summand, same scale.
    pub translation_residual: f64,
}

struct Data {
    n: usize,
    a2: Vec<Complex64>,
    b2: Vec<Complex64>,
    a: Vec<Complex64>,
    prod_a2: Complex64,
    prod_b2: Complex64,
    prod_a: Complex64,
    prod_b: Complex64,
    total: Complex64,
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
}

impl Data {
    fn new(p: &Parameters) -> Data {
        let n = p.n();
        let alpha: Vec<Complex64> = p.alphas().to_vec();
        let beta: Vec<Complex64> = (1..=n + 1).map(|k| p.beta(k)).collect();
        let a: Vec<Complex64> = alpha.iter().map(|&x| e_pi(x)).collect();
        let b: Vec<Complex64> = beta.iter().map(|&x| e_pi(x)).collect();
        let a2: Vec<Complex64> = alpha.iter().map(|&x| e_pi(2.0 * x)).collect();
        let mut b2: Vec<Complex64> = beta.iter().map(|&x| e_pi(2.0 * x)).collect();
        b2[n] = Complex64::new(1.0, 0.0);
        Data {
            n,
            prod_a2: a2.iter().product(),
            prod_b2: b2[..n].iter().product(),
            prod_a: a.iter().product(),
            prod_b: b[..n].iter().product(),
            total: p.total_exponent(),
            a2,
            b2,
            a,
            alpha,
            beta,
        }
    }

    /// `s(β_k − α_k) Π_{l≠k} s(β_k − α_l)/s(β_k − β_l)`, 0-based k.
    fn base_term(&self, k: usize) -> Complex64 {
        let bk = self.beta[k];
        let mut t = sin_pi(bk - self.alpha[k]);
        for l in (0..=self.n).filter(|&l| l != k) {
            t *= sin_pi(bk - self.alpha[l]) / sin_pi(bk - self.beta[l]);
        }
        t
    }

    fn zeros_except(&self, skip: &[usize]) -> Vec<Complex64> {
        (0..=self.n).filter(|l| !skip.contains(l)).map(|l| self.a2[l]).collect()
    }
}

/// Runs the check for every admissible index choice of `case`.
pub fn residue_checks(case: ResidueCase, p: &Parameters) -> Result<Vec<ResidueCheck>> {
    let d = Data::new(p);
    let n = d.n;
    let m = n + 1;
    let s = sin_pi;
    let i2 = Complex64::new(0.0, 2.0);
    let mut out = Vec::new();
    let mut run = |indices: (usize, usize),
                   f: Rational,
                   b_count: usize,
                   sine: &dyn Fn(usize) -> Complex64,
                   extra: &dyn Fn(&Rational) -> (Complex64, f64)|
     -> Result<()> {
        f.check_poles()?;
        let residues: Vec<Complex64> = (0..b_count).map(|k| f.residue(k)).collect();
        let mut scale = residues.iter().fold(1.0f64, |acc, r| acc.max(r.norm()));
        let residue_sum: Complex64 = residues.iter().sum();
        let (expected, closed_form) = extra(&f);
        scale = scale.max(expected.norm());
        let translation = (0..b_count)
            .map(|k| (residues[k] - sine(k)).norm())
            .fold(0.0, f64::max);
        out.push(ResidueCheck {
            case,
            indices,
            residue_sum,
            expected,
            residual: (residue_sum - expected).norm().max(closed_form) / scale,
            translation_residual: translation / scale,
        });
        Ok(())
    };
    // b-poles always come first in `poles`
    let bpoles = |extra: &[Complex64]| -> Vec<Complex64> {
        let mut v = d.b2.clone();
        v.extend_from_slice(extra);
        v
    };
    match case {
        ResidueCase::IOffdiag | ResidueCase::IDiag => {
            let pairs: Vec<(usize, usize)> = if case == ResidueCase::IDiag {
                (0..n).map(|i| (i, i)).collect()
            } else {
                (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect()
            };
            for (i, j) in pairs {
                // −2√−1 a_j a_{n+1} / Π a_l², times the −Π a_l² of the linear factor
                let k = i2 * d.a[j] * d.a[n];
                let root = d.prod_b2 * d.a2[i] / d.prod_a2;
                let mut zeros = d.zeros_except(&[i, j, n]);
                zeros.push(root);
                let extra_poles = if i == j { vec![d.a2[i]] } else { vec![] };
                let f = Rational {
                    k,
                    zeros,
                    poles: bpoles(&extra_poles),
                };
                let sine = |kk: usize| {
                    let bk = d.beta[kk];
                    s(d.total - bk + d.alpha[i]) / (s(bk - d.alpha[i]) * s(bk - d.alpha[j]) * s(bk - d.alpha[n]))
                        * d.base_term(kk)
                };
                let extra = |f: &Rational| {
                    if i != j {
                        return (Complex64::new(0.0, 0.0), 0.0);
                    }
                    let expected = -f.residue(m);
                    let mut display = -s(d.total) / (s(d.beta[i] - d.alpha[i]) * s(d.alpha[i]));
                    for l in (0..n).filter(|&l| l != i) {
                        display *= s(d.alpha[i] - d.alpha[l]) / s(d.alpha[i] - d.beta[l]);
                    }
                    (expected, (expected - display).norm())
                };
                run((i + 1, j + 1), f, m, &sine, &extra)?;
            }
        }
        ResidueCase::Ii => {
            for i in 0..n {
                // −1/(2√−1 Π a_l²), times the −Π a_l² of the linear factor
                let k = i2.inv();
                let root = d.prod_b2 * d.a2[i] / d.prod_a2;
                let mut zeros = d.zeros_except(&[i]);
                zeros.push(root);
                let f = Rational {
                    k,
                    zeros,
                    poles: bpoles(&[Complex64::new(0.0, 0.0)]),
                };
                let sine = |kk: usize| {
                    let bk = d.beta[kk];
                    s(d.total - bk + d.alpha[i]) / s(bk - d.alpha[i]) * d.base_term(kk)
                };
                let extra = |f: &Rational| {
                    let r0 = f.residue(m);
                    let rinf = f.residue_at_infinity();
                    let half = i2.inv();
                    ((-(r0 + rinf)), (r0 - half).norm().max((rinf + half).norm()))
                };
                run((i + 1, 0), f, m, &sine, &extra)?;
            }
        }
        ResidueCase::Iii => {
            for j in 0..n {
                let k = -i2 * d.prod_b * d.a[j] * d.a[n] / d.prod_a;
                let f = Rational {
                    k,
                    zeros: d.zeros_except(&[j, n]),
                    poles: bpoles(&[]),
                };
                let sine = |kk: usize| {
                    let bk = d.beta[kk];
                    d.base_term(kk) / (s(bk - d.alpha[j]) * s(bk - d.alpha[n]))
                };
                let extra = |_: &Rational| (Complex64::new(0.0, 0.0), 0.0);
                run((0, j + 1), f, m, &sine, &extra)?;
            }
        }
        ResidueCase::Iv => {
            let k = -d.prod_b / (i2 * d.prod_a);
            let f = Rational {
                k,
                zeros: d.zeros_except(&[]),
                poles: bpoles(&[Complex64::new(0.0, 0.0)]),
            };
            let sine = |kk: usize| d.base_term(kk);
            let extra = |f: &Rational| {
                let r0 = f.residue(m);
                let rinf = f.residue_at_infinity();
                let expected = -(r0 + rinf);
                let want0 = -d.prod_a / (i2 * d.prod_b);
                let want_inf = d.prod_b / (i2 * d.prod_a);
                let closed = (r0 - want0)
                    .norm()
                    .max((rinf - want_inf).norm())
                    .max((expected + s(d.total)).norm());
                (expected, closed)
            };
            run((0, 0), f, m, &sine, &extra)?;
        }
    }
    Ok(out)
}

/// Largest residual over all index choices of `case`, and the expected value
/// of the worst one. Case (i) off the diagonal is vacuous for n = 1.
pub fn residue_sum_check(case: ResidueCase, p: &Parameters) -> Result<(f64, Complex64)> {
    let checks = residue_checks(case, p)?;
    Ok(checks
        .iter()
        .max_by(|a, b| a.residual.total_cmp(&b.residual))
        .map_or((0.0, Complex64::new(0.0, 0.0)), |w| (w.residual, w.expected)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize) -> Parameters {
        let alpha: Vec<Complex64> = (0..=n)
            .map(|k| Complex64::new(0.37 + 0.61 * k as f64 - 1.1 * (k % 2) as f64, 0.13 - 0.07 * k as f64))
            .collect();
        let beta: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(1.29 - 0.83 * k as f64, -0.21 + 0.11 * k as f64))
            .collect();
        Parameters::new(alpha, beta).unwrap()
    }

    #[test]
    fn all_cases_hold_termwise() {
        for n in 1..=3 {
            let p = params(n);
            for case in ResidueCase::ALL {
                let checks = residue_checks(case, &p).unwrap();
                for c in checks {
                    assert!(c.residual < 1e-12, "{n} {case:?} {c:?}");
                    assert!(c.translation_residual < 1e-12, "{n} {case:?} {c:?}");
                }
            }
        }
    }

    #[test]
    fn case_iv_expected_is_minus_sine_total() {
        let p = params(1);
        let (residual, expected) = residue_sum_check(ResidueCase::Iv, &p).unwrap();
        assert!(residual < 1e-12);
        assert!((expected + sin_pi(p.total_exponent())).norm() < 1e-12);
    }

    #[test]
    fn offdiag_needs_two_indices() {
        let p = params(1);
        assert!(residue_checks(ResidueCase::IOffdiag, &p).unwrap().is_empty());
        assert_eq!(residue_sum_check(ResidueCase::IOffdiag, &p).unwrap().0, 0.0);
    }

    #[test]
    fn colliding_poles_are_refused() {
        let p = Parameters::real(&[0.2, 0.4, 0.1], &[0.3, 0.3 + 1e-12]).unwrap();
        let err = residue_checks(ResidueCase::Iv, &p).unwrap_err();
        assert_eq!(err.kind(), "pole collision");
    }
}
