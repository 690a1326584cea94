//! The Lie algebra W(2,2): graded basis, sparse elements and the bracket.
//!
//! The basis is `{x(n), I(n), C, C1 : n ∈ Z}` with
//!
//! ```text
//! [x(n), x(m)] = (m-n) x(n+m) + δ(n,-m) (n³-n)/12 C
//! [x(n), I(m)] = (m-n) I(n+m) + δ(n,-m) (n³-n)/12 C1
//! [I(n), I(m)] = 0
//! C, C1 central
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::scalar::{self, Scalar};

/// A basis vector. The derived order `C < C1 < I(n) < x(n)` (ascending `n`
/// within a kind) is the canonical term order and also the PBW order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisElement {
    C,
    C1,
    I(i64),
    X(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    X,
    I,
    C,
    C1,
}

impl BasisElement {
    pub fn kind(&self) -> Kind {
        match self {
            BasisElement::C => Kind::C,
            BasisElement::C1 => Kind::C1,
            BasisElement::I(_) => Kind::I,
            BasisElement::X(_) => Kind::X,
        }
    }

    pub fn index(&self) -> Option<i64> {
        match *self {
            BasisElement::I(n) | BasisElement::X(n) => Some(n),
            _ => None,
        }
    }

    pub fn degree(&self) -> i64 {
        self.index().unwrap_or(0)
    }

    pub fn is_central(&self) -> bool {
        matches!(self, BasisElement::C | BasisElement::C1)
    }

    pub fn from_parts(kind: Kind, index: Option<i64>) -> Option<Self> {
        match (kind, index) {
            (Kind::X, Some(n)) => Some(BasisElement::X(n)),
            (Kind::I, Some(n)) => Some(BasisElement::I(n)),
            (Kind::C, None) => Some(BasisElement::C),
            (Kind::C1, None) => Some(BasisElement::C1),
            _ => None,
        }
    }

    /// All basis elements with `|index| <= window`, in canonical order.
    pub fn window(window: i64) -> Vec<BasisElement> {
        let mut out = vec![BasisElement::C, BasisElement::C1];
        out.extend((-window..=window).map(BasisElement::I));
        out.extend((-window..=window).map(BasisElement::X));
        out
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::C => write!(f, "C"),
            BasisElement::C1 => write!(f, "C1"),
            BasisElement::I(n) => write!(f, "I({n})"),
            BasisElement::X(n) => write!(f, "x({n})"),
        }
    }
}

/// Command-line syntax: `x:n`, `i:n`, `c`, `c1` (case-insensitive kind).
impl FromStr for BasisElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::GeneratorParse(s.to_string());
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "c" => return Ok(BasisElement::C),
            "c1" => return Ok(BasisElement::C1),
            _ => {}
        }
        let (kind, idx) = lower.split_once(':').ok_or_else(bad)?;
        let idx: i64 = idx.parse().map_err(|_| bad())?;
        match kind {
            "x" => Ok(BasisElement::X(idx)),
            "i" => Ok(BasisElement::I(idx)),
            _ => Err(bad()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BasisRecord {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<i64>,
}

impl Serialize for BasisElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BasisRecord { kind: self.kind(), index: self.index() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BasisElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = BasisRecord::deserialize(d)?;
        BasisElement::from_parts(rec.kind, rec.index)
            .ok_or_else(|| serde::de::Error::custom("index must be present exactly for kinds X and I"))
    }
}

/// A finite linear combination of basis elements. Zero coefficients are
/// never stored; iteration follows the canonical basis order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LieElement {
    terms: BTreeMap<BasisElement, Scalar>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: BasisElement) -> Self {
        Self::term(b, scalar::one())
    }

    pub fn term(b: BasisElement, coeff: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(b, coeff);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisElement, Scalar)>) -> Self {
        let mut out = Self::zero();
        for (b, c) in terms {
            out.add_term(b, c);
        }
        out
    }

    pub fn add_term(&mut self, b: BasisElement, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(b).or_insert_with(Scalar::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn add_scaled(&mut self, other: &LieElement, factor: &Scalar) {
        for (b, c) in &other.terms {
            self.add_term(*b, c * factor);
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, b: &BasisElement) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisElement, &Scalar)> {
        self.terms.iter()
    }
}

impl std::ops::Add for &LieElement {
    type Output = LieElement;
    fn add(self, rhs: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &scalar::one());
        out
    }
}

impl std::ops::Sub for &LieElement {
    type Output = LieElement;
    fn sub(self, rhs: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &scalar::int(-1));
        out
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (b, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})·{b}", scalar::format(c))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<i64>,
    #[serde(with = "scalar::text")]
    coeff: Scalar,
}

#[derive(Serialize, Deserialize)]
struct ElementRecord {
    terms: Vec<TermRecord>,
}

impl Serialize for LieElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms =
            self.terms.iter().map(|(b, c)| TermRecord { kind: b.kind(), index: b.index(), coeff: c.clone() }).collect();
        ElementRecord { terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = ElementRecord::deserialize(d)?;
        let mut out = LieElement::zero();
        for t in rec.terms {
            let b = BasisElement::from_parts(t.kind, t.index)
                .ok_or_else(|| serde::de::Error::custom("malformed basis element"))?;
            out.add_term(b, t.coeff);
        }
        Ok(out)
    }
}

/// A bracket table on basis elements. [`W22`] is the real one; tests inject
/// faulty tables to make sure the checks can fail.
pub trait StructureConstants {
    fn bracket_basis(&self, a: BasisElement, b: BasisElement) -> LieElement;

    fn bracket(&self, a: &LieElement, b: &LieElement) -> LieElement {
        let mut out = LieElement::zero();
        for (ba, ca) in a.iter() {
            for (bb, cb) in b.iter() {
                out.add_scaled(&self.bracket_basis(*ba, *bb), &(ca * cb));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct W22;

/// `(n³ - n) / 12`
pub fn central_coefficient(n: i64) -> Scalar {
    scalar::frac(n * n * n - n, 12)
}

impl StructureConstants for W22 {
    fn bracket_basis(&self, a: BasisElement, b: BasisElement) -> LieElement {
        use BasisElement::*;
        match (a, b) {
            (C | C1, _) | (_, C | C1) | (I(_), I(_)) => LieElement::zero(),
            (X(n), X(m)) => {
                let mut out = LieElement::term(X(n + m), scalar::int(m - n));
                if n == -m {
                    out.add_term(C, central_coefficient(n));
                }
                out
            }
            (X(n), I(m)) => {
                let mut out = LieElement::term(I(n + m), scalar::int(m - n));
                if n == -m {
                    out.add_term(C1, central_coefficient(n));
                }
                out
            }
            (I(_), X(_)) => self.bracket_basis(b, a).scaled(&scalar::int(-1)),
        }
    }
}

pub fn bracket_basis(a: BasisElement, b: BasisElement) -> LieElement {
    W22.bracket_basis(a, b)
}

pub fn bracket(a: &LieElement, b: &LieElement) -> LieElement {
    W22.bracket(a, b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiViolation {
    pub triple: [BasisElement; 3],
    pub sum: LieElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiReport {
    pub window: i64,
    pub triples_checked: usize,
    pub violations: Vec<JacobiViolation>,
}

/// Evaluates the Jacobi sum on every ordered triple of basis elements with
/// `|index| <= window` and collects the nonzero ones.
pub fn jacobi_check_with<T: StructureConstants>(table: &T, window: i64) -> JacobiReport {
    let basis = BasisElement::window(window.max(0));
    let elems: Vec<LieElement> = basis.iter().map(|b| LieElement::basis(*b)).collect();
    let mut violations = Vec::new();
    let mut checked = 0;
    for (ia, a) in elems.iter().enumerate() {
        for (ib, b) in elems.iter().enumerate() {
            let ab = table.bracket(a, b);
            for (ic, c) in elems.iter().enumerate() {
                checked += 1;
                let mut sum = table.bracket(a, &table.bracket(b, c));
                sum.add_scaled(&table.bracket(b, &table.bracket(c, a)), &scalar::one());
                sum.add_scaled(&table.bracket(c, &ab), &scalar::one());
                if !sum.is_zero() {
                    violations.push(JacobiViolation { triple: [basis[ia], basis[ib], basis[ic]], sum });
                }
            }
        }
    }
    JacobiReport { window, triples_checked: checked, violations }
}

pub fn jacobi_check(window: i64) -> JacobiReport {
    jacobi_check_with(&W22, window)
}

/// `x(n) + n·e·I(n)`, the image of the Virasoro generator in `Vir[e]`.
pub fn vir_embed(e: &Scalar, n: i64) -> LieElement {
    let mut out = LieElement::basis(BasisElement::X(n));
    out.add_term(BasisElement::I(n), e * scalar::int(n));
    out
}
