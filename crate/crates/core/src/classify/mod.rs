//! Windowed constraint systems for the classification of weight modules.
//!
//! A module structure is written down with unknown coefficients (the scalars
//! `f(m,t)` of `I(m) v_t = f(m,t) v_{m+t}`, or the matrix entries
//! `F[i,n](k,l)` for two-dimensional weight spaces). The bracket relations of
//! W(2,2) become linear equations in those unknowns, and `[I(m), I(n)] = 0`
//! becomes bilinear relations. On a finite window the linear part is solved
//! exactly; the bilinear relations are then evaluated on the solution rays.

mod f_system;
mod matrix_system;

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::linalg::Echelon;
use crate::scalar::{self, Scalar};

pub use f_system::build_f_system;
pub use matrix_system::{build_matrix_system, normalize_glue_entry, ActionMatrices, ExtType, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unknown {
    /// `f(m, t)`: `I(m) v_t = f(m,t) v_{m+t}`.
    F {
        m: i64,
        t: i64,
    },
    /// Entry `(k, l)` (1-based) of the 2×2 matrix of `I(i)` on weight `α + n`.
    Entry {
        i: i64,
        n: i64,
        k: u8,
        l: u8,
    },
    C1,
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unknown::F { m, t } => write!(f, "f({m},{t})"),
            Unknown::Entry { i, n, k, l } => write!(f, "F[{i},{n}]({k},{l})"),
            Unknown::C1 => write!(f, "C1"),
        }
    }
}

impl FromStr for Unknown {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("malformed unknown name {s:?}");
        if s == "C1" {
            return Ok(Unknown::C1);
        }
        let ints = |body: &str| -> Result<Vec<i64>, String> {
            body.split(',').map(|p| p.parse::<i64>().map_err(|_| bad())).collect()
        };
        if let Some(body) = s.strip_prefix("f(").and_then(|r| r.strip_suffix(')')) {
            let v = ints(body)?;
            return match v[..] {
                [m, t] => Ok(Unknown::F { m, t }),
                _ => Err(bad()),
            };
        }
        if let Some(rest) = s.strip_prefix("F[") {
            let (head, tail) = rest.split_once("](").ok_or_else(bad)?;
            let tail = tail.strip_suffix(')').ok_or_else(bad)?;
            let (h, t) = (ints(head)?, ints(tail)?);
            return match (&h[..], &t[..]) {
                ([i, n], [k @ 1..=2, l @ 1..=2]) => Ok(Unknown::Entry { i: *i, n: *n, k: *k as u8, l: *l as u8 }),
                _ => Err(bad()),
            };
        }
        Err(bad())
    }
}

impl Serialize for Unknown {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Unknown {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub unknown: usize,
    #[serde(with = "scalar::text")]
    pub coeff: Scalar,
}

/// `Σ coeff·x = rhs`, terms sorted by unknown and merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearEquation {
    pub terms: Vec<Term>,
    #[serde(with = "scalar::text")]
    pub rhs: Scalar,
}

impl LinearEquation {
    pub fn residual(&self, x: &[Scalar]) -> Scalar {
        self.terms.iter().fold(-self.rhs.clone(), |acc, t| acc + &t.coeff * &x[t.unknown])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilinearTerm {
    pub left: usize,
    pub right: usize,
    #[serde(with = "scalar::text")]
    pub coeff: Scalar,
}

/// `Σ coeff·x_left·x_right = 0`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticConstraint {
    pub terms: Vec<BilinearTerm>,
}

impl QuadraticConstraint {
    pub fn bilinear(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        self.terms.iter().fold(scalar::zero(), |acc, t| acc + &t.coeff * &x[t.left] * &y[t.right])
    }

    pub fn evaluate(&self, x: &[Scalar]) -> Scalar {
        self.bilinear(x, x)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub unknowns: Vec<Unknown>,
    pub equations: Vec<LinearEquation>,
    pub quadratic: Vec<QuadraticConstraint>,
    #[serde(skip)]
    index: HashMap<Unknown, usize>,
}

impl ConstraintSystem {
    pub fn new(unknowns: Vec<Unknown>) -> Self {
        let index = unknowns.iter().enumerate().map(|(i, u)| (*u, i)).collect();
        Self { unknowns, equations: Vec::new(), quadratic: Vec::new(), index }
    }

    /// Rebuilds the name index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.unknowns.iter().enumerate().map(|(i, u)| (*u, i)).collect();
    }

    pub fn position(&self, u: &Unknown) -> Option<usize> {
        self.index.get(u).copied()
    }

    fn pos(&self, u: &Unknown) -> usize {
        self.position(u).unwrap_or_else(|| panic!("undeclared unknown {u}"))
    }

    /// Adds `Σ coeff·u = rhs`. Returns `false` (and stores nothing) when the
    /// equation is `0 = 0`.
    pub fn add_equation(&mut self, terms: impl IntoIterator<Item = (Unknown, Scalar)>, rhs: Scalar) -> bool {
        let mut merged: Vec<(usize, Scalar)> = Vec::new();
        for (u, c) in terms {
            let p = self.pos(&u);
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some((_, acc)) => *acc += c,
                None => merged.push((p, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        if merged.is_empty() && rhs.is_zero() {
            return false;
        }
        merged.sort_by_key(|(p, _)| *p);
        let terms = merged.into_iter().map(|(unknown, coeff)| Term { unknown, coeff }).collect();
        self.equations.push(LinearEquation { terms, rhs });
        true
    }

    pub fn add_quadratic(&mut self, terms: impl IntoIterator<Item = (Unknown, Unknown, Scalar)>) -> bool {
        let mut merged: Vec<((usize, usize), Scalar)> = Vec::new();
        for (a, b, c) in terms {
            let (pa, pb) = (self.pos(&a), self.pos(&b));
            let key = (pa.min(pb), pa.max(pb));
            match merged.iter_mut().find(|(k, _)| *k == key) {
                Some((_, acc)) => *acc += c,
                None => merged.push((key, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        if merged.is_empty() {
            return false;
        }
        merged.sort_by_key(|(k, _)| *k);
        let terms = merged.into_iter().map(|((left, right), coeff)| BilinearTerm { left, right, coeff }).collect();
        self.quadratic.push(QuadraticConstraint { terms });
        true
    }

    /// Fixes one unknown to a value (a normalization).
    pub fn pin(&mut self, u: Unknown, value: Scalar) {
        self.add_equation([(u, scalar::one())], value);
    }

    /// Values of a dense assignment keyed by unknown.
    pub fn value(&self, x: &[Scalar], u: &Unknown) -> Option<Scalar> {
        self.position(u).map(|p| x[p].clone())
    }

    pub fn residuals(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.equations.iter().map(|e| e.residual(x)).collect()
    }

    /// Dense assignment from named values; unnamed unknowns are zero.
    pub fn assignment(&self, values: impl IntoIterator<Item = (Unknown, Scalar)>) -> Vec<Scalar> {
        let mut x = vec![scalar::zero(); self.unknowns.len()];
        for (u, v) in values {
            x[self.pos(&u)] = v;
        }
        x
    }

    /// Sparse triplets `row<TAB>unknown<TAB>coeff`, one line per nonzero
    /// coefficient. A nonzero right-hand side is written under the name `rhs`.
    pub fn to_triplets(&self) -> String {
        let mut out = String::new();
        for (r, e) in self.equations.iter().enumerate() {
            for t in &e.terms {
                let _ = writeln!(out, "{r}\t{}\t{}", self.unknowns[t.unknown], scalar::format(&t.coeff));
            }
            if !e.rhs.is_zero() {
                let _ = writeln!(out, "{r}\trhs\t{}", scalar::format(&e.rhs));
            }
        }
        out
    }
}

/// Exact solution set `particular + span(basis)` of the linear part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSpace {
    pub feasible: bool,
    /// Solution with every free unknown at zero; all zeros for homogeneous
    /// systems and empty when infeasible.
    #[serde(with = "scalar::text_vec")]
    pub particular: Vec<Scalar>,
    #[serde(with = "basis_text")]
    pub basis: Vec<Vec<Scalar>>,
    pub dimension: usize,
}

mod basis_text {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::{self, Scalar};

    pub fn serialize<S: Serializer>(b: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
        let t: Vec<Vec<String>> = b.iter().map(|v| v.iter().map(scalar::format).collect()).collect();
        t.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Scalar>>, D::Error> {
        let t = Vec::<Vec<String>>::deserialize(d)?;
        t.iter().map(|v| v.iter().map(|x| scalar::parse(x).map_err(serde::de::Error::custom)).collect()).collect()
    }
}

impl SolutionSpace {
    pub fn is_homogeneous(&self) -> bool {
        self.feasible && self.particular.iter().all(Zero::is_zero)
    }
}

pub fn solve_linear(sys: &ConstraintSystem) -> SolutionSpace {
    let mut ech = Echelon::new(sys.unknowns.len());
    // Sparse rows first keeps pivots short and coefficients small.
    let mut order: Vec<&LinearEquation> = sys.equations.iter().collect();
    order.sort_by_key(|e| e.terms.len());
    for e in order {
        ech.push(e.terms.iter().map(|t| (t.unknown, t.coeff.clone())), &e.rhs);
        if !ech.is_consistent() {
            break;
        }
    }
    match ech.particular() {
        None => SolutionSpace { feasible: false, particular: Vec::new(), basis: Vec::new(), dimension: 0 },
        Some(particular) => {
            let basis = ech.kernel();
            SolutionSpace { feasible: true, particular, dimension: basis.len(), basis }
        }
    }
}

/// Polynomial in one variable, lowest degree first, trailing zeros trimmed.
fn trim(mut p: Vec<Scalar>) -> Vec<Scalar> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap().clone() / &lead;
        for (k, c) in b.iter().enumerate() {
            r[shift + k] -= &f * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn poly_gcd(mut a: Vec<Scalar>, mut b: Vec<Scalar>) -> Vec<Scalar> {
    a = trim(a);
    b = trim(b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Whether the polynomial (an empty list is the zero polynomial) has a
/// nonzero complex root.
fn has_nonzero_root(p: &[Scalar]) -> bool {
    if p.is_empty() {
        return true;
    }
    // Strip the factor c^k; any remaining positive-degree part has a nonzero root.
    let first = p.iter().position(|c| !c.is_zero()).unwrap();
    p.len() - first > 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayCheck {
    pub ray: usize,
    pub survives: bool,
    /// A surviving scale when it is rational and unique.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_text")]
    pub scale: Option<Scalar>,
}

mod opt_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::{self, Scalar};

    pub fn serialize<S: Serializer>(v: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&scalar::format(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Scalar>, D::Error> {
        Option::<String>::deserialize(d)?.map(|t| scalar::parse(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticReport {
    /// The particular solution itself satisfies every bilinear relation.
    pub base_survives: bool,
    pub rays: Vec<RayCheck>,
    pub surviving_rays: usize,
}

/// Substitutes `particular + c·basis[k]` into every bilinear relation and asks
/// whether some `c ≠ 0` satisfies all of them at once.
pub fn check_quadratic(sys: &ConstraintSystem, s: &SolutionSpace) -> QuadraticReport {
    if !s.feasible {
        return QuadraticReport { base_survives: false, rays: Vec::new(), surviving_rays: 0 };
    }
    let p = &s.particular;
    let base_survives = sys.quadratic.iter().all(|q| q.evaluate(p).is_zero());
    let rays: Vec<RayCheck> = s
        .basis
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut g: Vec<Scalar> = Vec::new();
            let mut started = false;
            for q in &sys.quadratic {
                let poly = trim(vec![q.evaluate(p), q.bilinear(p, v) + q.bilinear(v, p), q.evaluate(v)]);
                if poly.is_empty() {
                    continue;
                }
                g = if started { poly_gcd(g, poly) } else { poly };
                started = true;
                if g.len() == 1 {
                    break;
                }
            }
            let survives = has_nonzero_root(&g);
            let scale = (survives && g.len() == 2 && !g[0].is_zero()).then(|| -&g[0] / &g[1]);
            RayCheck { ray: k, survives, scale }
        })
        .collect();
    let surviving_rays = rays.iter().filter(|r| r.survives).count();
    QuadraticReport { base_survives, rays, surviving_rays }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedValue {
    pub unknown: Unknown,
    #[serde(with = "scalar::text")]
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemReport {
    pub unknowns: usize,
    pub equations: usize,
    pub quadratic_constraints: usize,
    pub infeasible: bool,
    pub dimension: usize,
    /// `None` when the system has no `C1` unknown.
    pub c1_forced_zero: Option<bool>,
    pub particular: Vec<NamedValue>,
    pub basis: Vec<Vec<NamedValue>>,
    pub quadratic_survivors: usize,
    pub quadratic: QuadraticReport,
}

fn named(sys: &ConstraintSystem, x: &[Scalar]) -> Vec<NamedValue> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| NamedValue { unknown: sys.unknowns[i], value: v.clone() })
        .collect()
}

/// The three headline numbers of a [`SystemReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1_forced_zero: Option<bool>,
    pub quadratic_survivors: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub infeasible: bool,
}

impl From<&SystemReport> for Summary {
    fn from(r: &SystemReport) -> Self {
        Self {
            dimension: r.dimension,
            c1_forced_zero: r.c1_forced_zero,
            quadratic_survivors: r.quadratic_survivors,
            infeasible: r.infeasible,
        }
    }
}

/// Whether every solution has `C1 = 0`.
pub fn c1_forced_zero(sys: &ConstraintSystem, s: &SolutionSpace) -> Option<bool> {
    let c1 = sys.position(&Unknown::C1)?;
    Some(s.feasible && s.particular[c1].is_zero() && s.basis.iter().all(|v| v[c1].is_zero()))
}

pub fn report(sys: &ConstraintSystem, s: &SolutionSpace) -> SystemReport {
    let quadratic = check_quadratic(sys, s);
    SystemReport {
        unknowns: sys.unknowns.len(),
        equations: sys.equations.len(),
        quadratic_constraints: sys.quadratic.len(),
        infeasible: !s.feasible,
        dimension: s.dimension,
        c1_forced_zero: c1_forced_zero(sys, s),
        particular: if s.feasible { named(sys, &s.particular) } else { Vec::new() },
        basis: s.basis.iter().map(|v| named(sys, v)).collect(),
        quadratic_survivors: quadratic.surviving_rays,
        quadratic,
    }
}

/// Checks a window size against the minimum a builder needs.
pub(crate) fn require_window(window: i64, min: i64) -> Result<(), Error> {
    if window < min {
        Err(Error::WindowTooSmall { got: window, min })
    } else {
        Ok(())
    }
}
