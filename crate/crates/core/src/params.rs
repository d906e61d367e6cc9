//! Exponent data `(α, β)`, genericity checks, and the `λ/μ` exponents of the
//! integrand.
//!
//! Public indices are 1-based: `alpha(1)` is α₁, `beta(n + 1)` is the implicit 1.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::dist_to_integer;

/// Default distance to ℤ below which a difference counts as an integer.
pub const EPS_GENERIC: f64 = 1e-8;

/// `n` together with α₁..α_{n+1} and β₁..β_n; β_{n+1} = 1 is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
}

impl Parameters {
    /// Builds parameters from α (length n+1) and β (length n), n >= 1.
    pub fn new(alpha: Vec<Complex64>, beta: Vec<Complex64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::Schema {
                field: "n".into(),
                message: "n must be at least 1".into(),
            });
        }
        if alpha.len() != beta.len() + 1 {
            return Err(Error::Schema {
                field: "alpha".into(),
                message: format!("expected {} entries, found {}", beta.len() + 1, alpha.len()),
            });
        }
        for (name, list) in [("alpha", &alpha), ("beta", &beta)] {
            for (k, v) in list.iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFiniteValue {
                        field: format!("{name}[{k}]"),
                    });
                }
            }
        }
        Ok(Self { alpha, beta })
    }

    /// Convenience constructor from real values.
    pub fn real(alpha: &[f64], beta: &[f64]) -> Result<Self> {
        Self::new(
            alpha.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            beta.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    /// α_i for 1 <= i <= n+1.
    pub fn alpha(&self, i: usize) -> Complex64 {
        self.alpha[i - 1]
    }

    /// β_i for 1 <= i <= n+1, with β_{n+1} = 1.
    pub fn beta(&self, i: usize) -> Complex64 {
        if i == self.n() + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            self.beta[i - 1]
        }
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alpha
    }

    /// β₁..β_n (without the implicit β_{n+1}).
    pub fn betas(&self) -> &[Complex64] {
        &self.beta
    }

    /// `β_{1,n} − α_{1,n+1}`, the exponent of the non-holomorphic solution at 1.
    pub fn total_exponent(&self) -> Complex64 {
        self.beta.iter().sum::<Complex64>() - self.alpha.iter().sum::<Complex64>()
    }

    /// Adds integer shifts to α and β; β_{n+1} stays 1.
    pub fn shift(&self, dalpha: &[i64], dbeta: &[i64]) -> Result<Self> {
        if dalpha.len() != self.alpha.len() || dbeta.len() != self.beta.len() {
            return Err(Error::Schema {
                field: "shift".into(),
                message: format!(
                    "expected {} alpha and {} beta shifts",
                    self.alpha.len(),
                    self.beta.len()
                ),
            });
        }
        let alpha = self.alpha.iter().zip(dalpha).map(|(a, &d)| a + d as f64).collect();
        let beta = self.beta.iter().zip(dbeta).map(|(b, &d)| b + d as f64).collect();
        Self::new(alpha, beta)
    }

    /// Reads the JSON parameter document `{"n", "alpha", "beta"}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ParamsDocument = serde_json::from_str(text).map_err(|e| {
            let message = e.to_string();
            if message.contains("out of range") {
                Error::NonFiniteValue {
                    field: schema_field(&message),
                }
            } else {
                Error::Schema {
                    field: schema_field(&message),
                    message,
                }
            }
        })?;
        doc.into_params()
    }

    pub fn to_document(&self) -> ParamsDocument {
        ParamsDocument {
            n: self.n(),
            alpha: self.alpha.iter().map(|c| [c.re, c.im]).collect(),
            beta: self.beta.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("parameter document serializes")
    }
}

fn schema_field(message: &str) -> String {
    for key in ["alpha", "beta", "n"] {
        if message.contains(&format!("`{key}`")) {
            return key.into();
        }
    }
    "document".into()
}

/// On-disk parameter schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDocument {
    pub n: usize,
    pub alpha: Vec<[f64; 2]>,
    pub beta: Vec<[f64; 2]>,
}

impl ParamsDocument {
    pub fn into_params(self) -> Result<Parameters> {
        if self.n == 0 {
            return Err(Error::Schema {
                field: "n".into(),
                message: "n must be at least 1".into(),
            });
        }
        if self.alpha.len() != self.n + 1 {
            return Err(Error::Schema {
                field: "alpha".into(),
                message: format!("expected {} entries, found {}", self.n + 1, self.alpha.len()),
            });
        }
        if self.beta.len() != self.n {
            return Err(Error::Schema {
                field: "beta".into(),
                message: format!("expected {} entries, found {}", self.n, self.beta.len()),
            });
        }
        let conv = |name: &str, v: &[[f64; 2]]| -> Result<Vec<Complex64>> {
            v.iter()
                .enumerate()
                .map(|(k, p)| {
                    if p[0].is_finite() && p[1].is_finite() {
                        Ok(Complex64::new(p[0], p[1]))
                    } else {
                        Err(Error::NonFiniteValue {
                            field: format!("{name}[{k}]"),
                        })
                    }
                })
                .collect()
        };
        Parameters::new(conv("alpha", &self.alpha)?, conv("beta", &self.beta)?)
    }
}

/// λ₁..λ_n and μ₁..μ_{n+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSet {
    pub lambda: Vec<Complex64>,
    pub mu: Vec<Complex64>,
}

/// λ_i = α_{i+1} − β_i, μ_i = β_i − α_i − 1.
pub fn to_exponents(p: &Parameters) -> ExponentSet {
    let n = p.n();
    let lambda = (1..=n).map(|i| p.alpha(i + 1) - p.beta(i)).collect();
    let mu = (1..=n + 1).map(|i| p.beta(i) - p.alpha(i) - 1.0).collect();
    ExponentSet { lambda, mu }
}

/// Inverse of [`to_exponents`].
///
/// μ_{n+1} = −α_{n+1} fixes α_{n+1}; the rest follows downward.
pub fn from_exponents(e: &ExponentSet) -> Result<Parameters> {
    let n = e.lambda.len();
    if e.mu.len() != n + 1 || n == 0 {
        return Err(Error::Schema {
            field: "mu".into(),
            message: "expected n+1 entries".into(),
        });
    }
    let mut alpha = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut beta = vec![Complex64::new(0.0, 0.0); n];
    alpha[n] = -e.mu[n];
    for i in (1..=n).rev() {
        beta[i - 1] = alpha[i] - e.lambda[i - 1];
        alpha[i - 1] = beta[i - 1] - e.mu[i - 1] - 1.0;
    }
    Parameters::new(alpha, beta)
}

/// Sequence selector for [`partial_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sequence {
    Alpha,
    Beta,
    Lambda,
    Mu,
}

/// Partial sums with the three-case convention:
/// `x_{i,j} = x_i + ... + x_j` for i <= j, `0` for i = j+1,
/// and `−(x_{j+1} + ... + x_{i−1})` for i >= j+2.
///
/// β runs over 1..n+1 including the implicit β_{n+1} = 1.
pub fn partial_sum(p: &Parameters, seq: Sequence, i: usize, j: usize) -> Result<Complex64> {
    let values: Vec<Complex64> = match seq {
        Sequence::Alpha => p.alphas().to_vec(),
        Sequence::Beta => (1..=p.n() + 1).map(|k| p.beta(k)).collect(),
        Sequence::Lambda => to_exponents(p).lambda,
        Sequence::Mu => to_exponents(p).mu,
    };
    partial_sum_of(&values, i, j)
}

/// [`partial_sum`] over an explicit 1-based list.
pub fn partial_sum_of(values: &[Complex64], i: usize, j: usize) -> Result<Complex64> {
    let len = values.len();
    let out = |what: String| Error::IndexOutOfRange { what };
    if i <= j {
        if i == 0 || j > len {
            return Err(out(format!("({i}, {j}) with length {len}")));
        }
        Ok(values[i - 1..j].iter().sum())
    } else if i == j + 1 {
        if i > len + 1 {
            return Err(out(format!("({i}, {j}) with length {len}")));
        }
        Ok(Complex64::new(0.0, 0.0))
    } else {
        // i >= j + 2: the middle run j+1..i-1 must exist
        if i - 1 > len {
            return Err(out(format!("({i}, {j}) with length {len}")));
        }
        Ok(-values[j..i - 1].iter().sum::<Complex64>())
    }
}

/// Which non-integrality condition a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ConstraintKind {
    /// α_i − β_j
    AlphaBeta,
    /// β_i − β_j, i ≠ j
    BetaBeta,
    /// α_i − α_j, i ≠ j
    AlphaAlpha,
    /// β_{1,n} − α_{1,n+1}
    TotalExponent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub i: usize,
    pub j: usize,
    pub value: Complex64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericityReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl GenericityReport {
    /// Keeps only violations of the given kinds.
    pub fn restricted_to(&self, kinds: &[ConstraintKind]) -> GenericityReport {
        let violations: Vec<Violation> = self
            .violations
            .iter()
            .filter(|v| kinds.contains(&v.kind))
            .cloned()
            .collect();
        GenericityReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    /// `Ok(())` when no constraint is violated.
    pub fn into_result(self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            Err(Error::NotGeneric(self))
        }
    }
}

impl fmt::Display for GenericityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{:?}({},{}) = {}", v.kind, v.i, v.j, v.value))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Reports every difference among α_i − β_j, β_i − β_j, α_i − α_j and
/// β_{1,n} − α_{1,n+1} lying within `eps` of an integer.
///
/// α_i − β_j is checked for all 1 <= i, j <= n+1 because the sine
/// denominators of the connection matrices contain the diagonal pairs too.
pub fn validate(p: &Parameters, eps: f64) -> GenericityReport {
    let m = p.n() + 1;
    let mut violations = Vec::new();
    let mut check = |kind, i, j, value: Complex64| {
        let distance = dist_to_integer(value);
        if distance < eps {
            violations.push(Violation {
                kind,
                i,
                j,
                value,
                distance,
            });
        }
    };
    for i in 1..=m {
        for j in 1..=m {
            check(ConstraintKind::AlphaBeta, i, j, p.alpha(i) - p.beta(j));
        }
    }
    for i in 1..=m {
        for j in i + 1..=m {
            check(ConstraintKind::BetaBeta, i, j, p.beta(i) - p.beta(j));
        }
    }
    for i in 1..=m {
        for j in i + 1..=m {
            check(ConstraintKind::AlphaAlpha, i, j, p.alpha(i) - p.alpha(j));
        }
    }
    check(ConstraintKind::TotalExponent, 0, 0, p.total_exponent());
    GenericityReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// Smallest distance to ℤ over all differences [`validate`] inspects.
pub fn genericity_margin(p: &Parameters) -> f64 {
    let m = p.n() + 1;
    let mut best = dist_to_integer(p.total_exponent());
    for i in 1..=m {
        for j in 1..=m {
            best = best.min(dist_to_integer(p.alpha(i) - p.beta(j)));
            if i < j {
                best = best.min(dist_to_integer(p.beta(i) - p.beta(j)));
                best = best.min(dist_to_integer(p.alpha(i) - p.alpha(j)));
            }
        }
    }
    best
}
