//! Loaded integration domains and their maps onto the unit cube.
//!
//! Each domain is a union of at most two chains of inequalities. A chain runs
//! from an anchor (0, 1 or z) towards either a second finite end or infinity;
//! its variables are written as nested products of cube coordinates so that
//! every gap that can vanish is a product and its logarithm is exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate_cube, CubeIntegral, Node, Schedule};
use crate::error::{Error, Result};
use crate::params::{to_exponents, Parameters};
use crate::series::{prefactor_arguments, Point};

/// Minimum real part required of every exponent that controls integrability.
pub const INTEGRABILITY_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    D0,
    Dinf,
    D0tilde,
    D1tilde,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::D0 => "d0",
            Family::Dinf => "dinf",
            Family::D0tilde => "d0tilde",
            Family::D1tilde => "d1tilde",
        }
    }

    /// Which Beta prefactor normalizes the integral.
    pub fn point(self) -> Point {
        match self {
            Family::D0 | Family::D0tilde => Point::Zero,
            Family::Dinf => Point::Infinity,
            Family::D1tilde => Point::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub family: Family,
    pub index: usize,
    pub n: usize,
    pub z: f64,
}

/// Signs pinning the argument of every factor of the integrand to 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchFixing {
    /// `ε_i` with `ε_i t_i > 0`.
    pub epsilon: Vec<i8>,
    /// `η_i` with `η_i (t_{i−1} − t_i) > 0`.
    pub eta: Vec<i8>,
}

impl DomainSpec {
    pub fn new(family: Family, index: usize, n: usize, z: f64) -> Result<Self> {
        let spec = DomainSpec { family, index, n, z };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if !(1..=2).contains(&self.n) {
            return Err(Error::Unsupported(format!(
                "quadrature is limited to n <= 2 (got n = {})",
                self.n
            )));
        }
        if self.index == 0 || self.index > self.n + 1 {
            return Err(Error::IndexOutOfRange {
                what: format!("domain index {} not in 1..={}", self.index, self.n + 1),
            });
        }
        let ok = match self.family {
            Family::D0 | Family::Dinf => self.z < 0.0,
            Family::D0tilde | Family::D1tilde => self.z > 0.0 && self.z < 1.0,
        };
        if !ok || !self.z.is_finite() {
            return Err(Error::Schema {
                field: "z".into(),
                message: format!("z = {} is outside the range of family {}", self.z, self.family.as_str()),
            });
        }
        Ok(())
    }

    /// The sign data of the loaded domain, read off a representative point.
    pub fn branch_fixing(&self) -> Result<BranchFixing> {
        self.check()?;
        let plan = Plan::new(self);
        let mid = Node {
            x: 0.5,
            ln_x: 0.5f64.ln(),
            ln_1mx: 0.5f64.ln(),
            ln_w: 0.0,
        };
        let state = plan.locate(&vec![mid; self.n]).ok_or_else(|| Error::Unsupported("degenerate domain".into()))?;
        let t = &state.t;
        let sign = |x: f64| if x > 0.0 { 1 } else { -1 };
        Ok(BranchFixing {
            epsilon: (1..=self.n).map(|s| sign(t[s])).collect(),
            eta: (1..=self.n + 1).map(|s| sign(t[s - 1] - t[s])).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Anchor {
    Zero,
    One,
    Z,
}

#[derive(Debug, Clone, Copy)]
enum Reach {
    /// Ends at a second finite anchor.
    Bounded(Anchor),
    /// Runs to infinity in the given direction.
    Unbounded(f64),
}

#[derive(Debug, Clone)]
struct Chain {
    /// t-indices, farthest from the anchor first.
    vars: Vec<usize>,
    anchor: Anchor,
    reach: Reach,
    /// Multiply all distances by `|t_s|` (evaluated by an earlier chain).
    scale: Option<usize>,
}

struct Plan {
    n: usize,
    z: f64,
    chains: Vec<Chain>,
}

/// Point in t-space with the exact logarithms the chains provide.
struct State {
    /// `t_0 = 1, t_1..t_n, t_{n+1} = z`.
    t: Vec<f64>,
    /// `ln |t_s|` where known exactly.
    ln_abs: Vec<Option<f64>>,
    /// `ln |t_{s−1} − t_s|` where known exactly, indexed by s.
    ln_gap: Vec<Option<f64>>,
    ln_jacobian: f64,
}

impl Plan {
    fn new(spec: &DomainSpec) -> Plan {
        let n = spec.n;
        let i = spec.index;
        let down = |hi: usize, lo: usize| -> Vec<usize> { (lo..=hi).rev().collect() };
        let up = |lo: usize, hi: usize| -> Vec<usize> { (lo..=hi).collect() };
        let mut chains = Vec::new();
        let mut push = |vars: Vec<usize>, anchor, reach, scale| {
            if !vars.is_empty() {
                chains.push(Chain {
                    vars,
                    anchor,
                    reach,
                    scale,
                });
            }
        };
        match spec.family {
            // z < t_n < ... < t_i < 0,  1 < t_1 < ... < t_{i-1}
            Family::D0 | Family::D0tilde => {
                push(down(n, i), Anchor::Zero, Reach::Bounded(Anchor::Z), None);
                push(down(i.saturating_sub(1), 1), Anchor::One, Reach::Unbounded(1.0), None);
            }
            // t_i < ... < t_n < z,  0 < t_{i-1} < ... < t_1 < 1
            Family::Dinf => {
                push(up(i, n), Anchor::Z, Reach::Unbounded(-1.0), None);
                push(up(1, i - 1), Anchor::Zero, Reach::Bounded(Anchor::One), None);
            }
            Family::D1tilde if i == n + 1 => {
                push(down(n, 1), Anchor::One, Reach::Bounded(Anchor::Z), None);
            }
            // 0 < t_{i-1} < ... < t_1 < 1,  t_i < ... < t_n < 0 scaled by t_{i-1}
            Family::D1tilde => {
                push(up(1, i - 1), Anchor::Zero, Reach::Bounded(Anchor::One), None);
                let scale = if i >= 2 { Some(i - 1) } else { None };
                push(up(i, n), Anchor::Zero, Reach::Unbounded(-1.0), scale);
            }
        }
        Plan { n, z: spec.z, chains }
    }

    fn anchor_value(&self, a: Anchor) -> f64 {
        match a {
            Anchor::Zero => 0.0,
            Anchor::One => 1.0,
            Anchor::Z => self.z,
        }
    }

    /// Gap index between an anchor and the adjacent chain variable.
    fn anchor_gap(&self, a: Anchor, var: usize) -> Option<usize> {
        match a {
            Anchor::Zero => None,
            Anchor::One => {
                debug_assert_eq!(var, 1);
                Some(1)
            }
            Anchor::Z => {
                debug_assert_eq!(var, self.n);
                Some(self.n + 1)
            }
        }
    }

    fn locate(&self, nodes: &[Node]) -> Option<State> {
        let n = self.n;
        let mut st = State {
            t: vec![0.0; n + 2],
            ln_abs: vec![None; n + 2],
            ln_gap: vec![None; n + 2],
            ln_jacobian: 0.0,
        };
        st.t[0] = 1.0;
        st.t[n + 1] = self.z;
        let mut coord = 0;
        for chain in &self.chains {
            let k = chain.vars.len();
            let w = &nodes[coord..coord + k];
            coord += k;
            let a = self.anchor_value(chain.anchor);
            let ln_scale = match chain.scale {
                Some(s) => st.ln_abs[s].unwrap_or_else(|| st.t[s].abs().ln()),
                None => 0.0,
            };
            // ln d_j, the distance of v_j from the anchor
            let mut ln_d = Vec::with_capacity(k);
            let dir;
            match chain.reach {
                Reach::Bounded(far) => {
                    let f = self.anchor_value(far);
                    let ln_len = (f - a).abs().ln();
                    dir = (f - a).signum();
                    let mut acc = ln_len;
                    for node in w {
                        acc += node.ln_x;
                        ln_d.push(acc);
                    }
                    if let Some(g) = self.anchor_gap(far, chain.vars[0]) {
                        st.ln_gap[g] = Some(ln_len + w[0].ln_1mx);
                    } else {
                        st.ln_abs[chain.vars[0]] = Some(ln_len + w[0].ln_1mx);
                    }
                    for (j, node) in w.iter().enumerate() {
                        st.ln_jacobian += ln_d[j] - node.ln_x;
                    }
                }
                Reach::Unbounded(d) => {
                    dir = d;
                    let mut acc = w[0].ln_x - w[0].ln_1mx;
                    ln_d.push(acc);
                    st.ln_jacobian += -2.0 * w[0].ln_1mx;
                    for node in &w[1..] {
                        acc += node.ln_x;
                        ln_d.push(acc);
                        st.ln_jacobian += acc - node.ln_x;
                    }
                    if let Some(s) = chain.scale {
                        // t_s − t_{v_1} = |t_s| (1 + R)
                        let g = s.max(chain.vars[0]);
                        st.ln_gap[g] = Some(ln_scale + softplus(ln_d[0]));
                    }
                }
            }
            for l in ln_d.iter_mut() {
                *l += ln_scale;
            }
            st.ln_jacobian += k as f64 * ln_scale;
            if ln_d.iter().any(|&l| l > 700.0) {
                return None;
            }
            for (j, &v) in chain.vars.iter().enumerate() {
                st.t[v] = a + dir * ln_d[j].exp();
                if let Anchor::Zero = chain.anchor {
                    st.ln_abs[v] = Some(ln_d[j]);
                }
                if j + 1 < k {
                    let next = chain.vars[j + 1];
                    st.ln_gap[v.max(next)] = Some(ln_d[j] + w[j + 1].ln_1mx);
                }
            }
            let last = chain.vars[k - 1];
            match self.anchor_gap(chain.anchor, last) {
                Some(g) => st.ln_gap[g] = Some(ln_d[k - 1]),
                None => st.ln_abs[last] = Some(ln_d[k - 1]),
            }
        }
        Some(st)
    }
}

fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

fn require(what: String, value: f64) -> Result<()> {
    if value >= INTEGRABILITY_MARGIN {
        Ok(())
    } else {
        Err(Error::NonIntegrableExponent { what, real_part: value })
    }
}

/// Checks that every endpoint and every escape to infinity is integrable
/// with margin [`INTEGRABILITY_MARGIN`].
pub fn check_integrability(spec: &DomainSpec, p: &Parameters) -> Result<()> {
    spec.check()?;
    if p.n() != spec.n {
        return Err(Error::Schema {
            field: "n".into(),
            message: format!("domain has n = {} but parameters have n = {}", spec.n, p.n()),
        });
    }
    let n = spec.n;
    let i = spec.index;
    for (a, b) in prefactor_arguments(spec.family.point(), i, p)? {
        require(format!("beta argument {a}"), a.re)?;
        require(format!("beta argument {b}"), b.re)?;
    }
    if spec.family == Family::D1tilde && i <= n {
        // corners where t_s, ..., t_n collapse together
        for s in (1..=n).filter(|&s| s != i) {
            let e = p.alpha(n + 1) - p.beta(s) + 1.0;
            require(format!("alpha_{} - beta_{s} + 1", n + 1), e.re)?;
        }
    }
    let ex = to_exponents(p);
    let plan = Plan::new(spec);
    for chain in &plan.chains {
        if let Reach::Unbounded(_) = chain.reach {
            for j in 1..=chain.vars.len() {
                let set = &chain.vars[..j];
                let mut e = Complex64::new(j as f64, 0.0);
                for &v in set {
                    e += ex.lambda[v - 1];
                }
                for g in 1..=n + 1 {
                    if set.contains(&g) || set.contains(&(g - 1)) {
                        e += ex.mu[g - 1];
                    }
                }
                require(format!("decay exponent of {set:?} at infinity"), -e.re)?;
            }
        }
    }
    Ok(())
}

/// Default tolerance: 1e-8 for n = 1, 1e-6 for n = 2.
pub fn default_tolerance(n: usize) -> f64 {
    if n == 1 {
        1e-8
    } else {
        1e-6
    }
}

/// Refinement schedule used by [`integrate_loaded_domain`].
pub fn default_schedule(n: usize) -> Schedule {
    if n == 1 {
        Schedule {
            first_level: 2,
            max_level: 11,
        }
    } else {
        Schedule {
            first_level: 2,
            max_level: 7,
        }
    }
}

/// `F_D(z) = ∫_D u_D(t) dt` by tanh-sinh quadrature on the mapped cube.
pub fn integrate_loaded_domain(spec: &DomainSpec, p: &Parameters, tol: f64) -> Result<Complex64> {
    Ok(integrate_loaded_domain_with(spec, p, tol, default_schedule(spec.n))?.value)
}

/// [`integrate_loaded_domain`] on an explicit schedule, with the refinement
/// record.
pub fn integrate_loaded_domain_with(
    spec: &DomainSpec,
    p: &Parameters,
    tol: f64,
    schedule: Schedule,
) -> Result<CubeIntegral> {
    check_integrability(spec, p)?;
    let ex = to_exponents(p);
    let plan = Plan::new(spec);
    let n = spec.n;
    integrate_cube(n, tol, schedule, |nodes| {
        let st = plan.locate(nodes)?;
        let mut acc = Complex64::new(st.ln_jacobian, 0.0);
        for s in 1..=n {
            let l = st.ln_abs[s].unwrap_or_else(|| st.t[s].abs().ln());
            acc += ex.lambda[s - 1] * l;
        }
        for s in 1..=n + 1 {
            let l = st.ln_gap[s].unwrap_or_else(|| (st.t[s - 1] - st.t[s]).abs().ln());
            acc += ex.mu[s - 1] * l;
        }
        Some(acc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{f0, f1_nonholo, prefactor, Branch, SeriesOptions};
    use crate::special::beta;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn d0tilde_last_index_is_euler_integral() {
        let p = Parameters::real(&[0.3, 0.7], &[1.4]).unwrap();
        let spec = DomainSpec::new(Family::D0tilde, 2, 1, 0.5).unwrap();
        let got = integrate_loaded_domain(&spec, &p, 1e-10).unwrap();
        let series = f0(2, &p, c(0.5), Branch::PosZ, &SeriesOptions::with_tol(1e-14)).unwrap();
        let want = beta(c(0.3), c(1.1)).unwrap() * series.value;
        assert!((got - want).norm() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn d1tilde_nonholomorphic_n1() {
        let p = Parameters::real(&[0.3, 0.4], &[1.4]).unwrap();
        let spec = DomainSpec::new(Family::D1tilde, 2, 1, 0.5).unwrap();
        let got = integrate_loaded_domain(&spec, &p, 1e-10).unwrap();
        let series = f1_nonholo(&p, c(0.5), &SeriesOptions::with_tol(1e-14)).unwrap();
        let want = prefactor(Point::One, 2, &p).unwrap() * series.value;
        assert!((got - want).norm() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn branch_signs_follow_the_chains() {
        let spec = DomainSpec::new(Family::D1tilde, 2, 2, 0.5).unwrap();
        let b = spec.branch_fixing().unwrap();
        assert_eq!(b.epsilon, vec![1, -1]);
        assert_eq!(b.eta, vec![1, 1, -1]);
        let spec = DomainSpec::new(Family::Dinf, 1, 2, -0.5).unwrap();
        let b = spec.branch_fixing().unwrap();
        assert_eq!(b.epsilon, vec![-1, -1]);
        assert_eq!(b.eta, vec![1, -1, -1]);
    }

    #[test]
    fn refuses_non_integrable_endpoints() {
        let p = Parameters::real(&[-0.3, 0.7], &[1.4]).unwrap();
        let spec = DomainSpec::new(Family::D0tilde, 2, 1, 0.5).unwrap();
        let err = integrate_loaded_domain(&spec, &p, 1e-8).unwrap_err();
        assert_eq!(err.kind(), "non-integrable exponent");
    }

    #[test]
    fn rejects_out_of_range_specs() {
        assert!(DomainSpec::new(Family::D0, 1, 3, -0.5).is_err());
        assert!(DomainSpec::new(Family::D0, 1, 1, 0.5).is_err());
        assert!(DomainSpec::new(Family::D1tilde, 3, 1, 0.5).is_err());
    }
}
