//! PBW normal form in the universal enveloping algebra, and the action of
//! words on an abstract highest-weight vector.
//!
//! The PBW order is the canonical basis order: central factors first, then
//! `I(n)` ascending, then `x(n)` ascending. Normal ordering rewrites the
//! leftmost out-of-order adjacent pair `g·h` to `h·g + [g,h]` until no such
//! pair remains.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lie::{bracket_basis, BasisElement};
use crate::scalar::{self, Scalar};

/// An ordered product of basis elements, sorted in PBW order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PbwMonomial {
    factors: Vec<BasisElement>,
}

impl PbwMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// Sorts the factors. Only meaningful when they commute; use
    /// [`normal_order`] for arbitrary words.
    pub fn from_commuting(mut factors: Vec<BasisElement>) -> Self {
        factors.sort();
        Self { factors }
    }

    /// Wraps factors that are already sorted.
    pub fn from_sorted(factors: Vec<BasisElement>) -> Option<Self> {
        factors.windows(2).all(|w| w[0] <= w[1]).then_some(Self { factors })
    }

    pub fn factors(&self) -> &[BasisElement] {
        &self.factors
    }

    pub fn degree(&self) -> i64 {
        self.factors.iter().map(BasisElement::degree).sum()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.factors.iter().all(|b| b.degree() < 0)
    }
}

/// Graded (degree descending, so Verma levels ascend), then lexicographic on
/// the factor sequence.
impl Ord for PbwMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.degree().cmp(&self.degree()).then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for PbwMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PbwMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// A finite linear combination of PBW monomials.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UeaElement {
    terms: BTreeMap<PbwMonomial, Scalar>,
}

impl UeaElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: PbwMonomial) -> Self {
        Self::term(m, scalar::one())
    }

    pub fn term(m: PbwMonomial, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (PbwMonomial, Scalar)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn add_term(&mut self, m: PbwMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &UeaElement, factor: &Scalar) {
        if factor.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * factor);
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

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &PbwMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PbwMonomial, &Scalar)> {
        self.terms.iter()
    }

    /// Product in the enveloping algebra, returned in normal form.
    pub fn mul(&self, rhs: &UeaElement) -> UeaElement {
        let mut out = UeaElement::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let word: Vec<BasisElement> = ma.factors.iter().chain(&mb.factors).copied().collect();
                out.add_scaled(&normal_order(&word), &(ca * cb));
            }
        }
        out
    }
}

impl std::ops::Sub for &UeaElement {
    type Output = UeaElement;
    fn sub(self, rhs: &UeaElement) -> UeaElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &scalar::int(-1));
        out
    }
}

impl fmt::Display for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})·{m}", scalar::format(c))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct UeaTermRecord {
    monomial: PbwMonomial,
    #[serde(with = "scalar::text")]
    coeff: Scalar,
}

impl Serialize for UeaElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let recs: Vec<UeaTermRecord> =
            self.terms.iter().map(|(m, c)| UeaTermRecord { monomial: m.clone(), coeff: c.clone() }).collect();
        recs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UeaElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let recs = Vec::<UeaTermRecord>::deserialize(d)?;
        let mut out = UeaElement::zero();
        for r in recs {
            if r.monomial.factors.windows(2).any(|w| w[0] > w[1]) {
                return Err(serde::de::Error::custom("monomial factors are not in PBW order"));
            }
            out.add_term(r.monomial, r.coeff);
        }
        Ok(out)
    }
}

/// Normal form of a word, rewriting the leftmost out-of-order pair first.
pub fn normal_order(word: &[BasisElement]) -> UeaElement {
    normal_order_with(word, |positions| positions[0])
}

/// Normal form of a word where `pick` chooses which out-of-order adjacent
/// pair to rewrite next (given the nonempty list of their left positions).
/// Every admissible choice yields the same result.
pub fn normal_order_with(word: &[BasisElement], mut pick: impl FnMut(&[usize]) -> usize) -> UeaElement {
    let mut pending: Vec<(Vec<BasisElement>, Scalar)> = vec![(word.to_vec(), scalar::one())];
    let mut out = UeaElement::zero();
    while let Some((w, c)) = pending.pop() {
        let positions: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i] > w[i + 1]).collect();
        if positions.is_empty() {
            out.add_term(PbwMonomial { factors: w }, c);
            continue;
        }
        let i = pick(&positions);
        assert!(positions.contains(&i), "pick returned a position that is not out of order");
        let mut swapped = w.clone();
        swapped.swap(i, i + 1);
        for (b, cb) in bracket_basis(w[i], w[i + 1]).iter() {
            let mut shorter = Vec::with_capacity(w.len() - 1);
            shorter.extend_from_slice(&w[..i]);
            shorter.push(*b);
            shorter.extend_from_slice(&w[i + 2..]);
            pending.push((shorter, &c * cb));
        }
        pending.push((swapped, c));
    }
    out
}

/// Highest-weight data: `x(0) ↦ λ`, `C ↦ c`, `I(0) ↦ c0`, `C1 ↦ c1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HighestWeightParams {
    #[serde(with = "scalar::text")]
    pub lambda: Scalar,
    #[serde(with = "scalar::text")]
    pub c: Scalar,
    #[serde(with = "scalar::text")]
    pub c0: Scalar,
    #[serde(with = "scalar::text")]
    pub c1: Scalar,
}

impl HighestWeightParams {
    pub fn new(lambda: Scalar, c: Scalar, c0: Scalar, c1: Scalar) -> Self {
        Self { lambda, c, c0, c1 }
    }
}

/// Action of the enveloping algebra on the Verma module generated by `v`.
///
/// Vectors are [`UeaElement`]s supported on negative monomials: the term
/// `m ↦ a` stands for `a·m·v`. Generators are pushed through a sorted
/// negative monomial one factor at a time: `g·y·rest = y·(g·rest) + [g,y]·rest`
/// until `g` is negative and sorts before `y`, or reaches `v` where positive
/// generators vanish and `x(0)`, `I(0)`, `C`, `C1` become scalars.
#[derive(Debug, Clone)]
pub struct HighestWeightAction {
    params: HighestWeightParams,
    cache: HashMap<(BasisElement, PbwMonomial), UeaElement>,
}

impl HighestWeightAction {
    pub fn new(params: HighestWeightParams) -> Self {
        Self { params, cache: HashMap::new() }
    }

    pub fn params(&self) -> &HighestWeightParams {
        &self.params
    }

    /// `g · (m·v)` for a sorted negative monomial `m`.
    pub fn apply(&mut self, g: BasisElement, m: &PbwMonomial) -> UeaElement {
        let key = (g, m.clone());
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let out = self.apply_uncached(g, m);
        self.cache.insert(key, out.clone());
        out
    }

    fn apply_uncached(&mut self, g: BasisElement, m: &PbwMonomial) -> UeaElement {
        let p = &self.params;
        match g {
            BasisElement::C => return UeaElement::term(m.clone(), p.c.clone()),
            BasisElement::C1 => return UeaElement::term(m.clone(), p.c1.clone()),
            _ => {}
        }
        let Some((&y, rest)) = m.factors.split_first() else {
            return match g {
                BasisElement::X(0) => UeaElement::term(PbwMonomial::one(), p.lambda.clone()),
                BasisElement::I(0) => UeaElement::term(PbwMonomial::one(), p.c0.clone()),
                _ if g.degree() > 0 => UeaElement::zero(),
                _ => UeaElement::monomial(PbwMonomial { factors: vec![g] }),
            };
        };
        if g.degree() < 0 && g <= y {
            let mut factors = Vec::with_capacity(m.len() + 1);
            factors.push(g);
            factors.extend_from_slice(&m.factors);
            return UeaElement::monomial(PbwMonomial { factors });
        }
        let rest = PbwMonomial { factors: rest.to_vec() };
        let moved = self.apply(g, &rest);
        let mut out = UeaElement::zero();
        for (mono, c) in moved.iter() {
            out.add_scaled(&self.apply(y, mono), c);
        }
        for (b, cb) in bracket_basis(g, y).iter() {
            out.add_scaled(&self.apply(*b, &rest), cb);
        }
        out
    }

    /// `g · w` for a Verma vector `w`.
    pub fn apply_to_vector(&mut self, g: BasisElement, w: &UeaElement) -> UeaElement {
        let mut out = UeaElement::zero();
        for (m, c) in w.iter() {
            out.add_scaled(&self.apply(g, m), c);
        }
        out
    }

    /// `(g_1 ⋯ g_k) · w`, applying the rightmost factor first.
    pub fn apply_word(&mut self, word: &[BasisElement], w: &UeaElement) -> UeaElement {
        word.iter().rev().fold(w.clone(), |acc, g| self.apply_to_vector(*g, &acc))
    }

    /// `u · v` for an arbitrary enveloping-algebra element.
    pub fn act(&mut self, u: &UeaElement) -> UeaElement {
        let v = UeaElement::monomial(PbwMonomial::one());
        let mut out = UeaElement::zero();
        for (m, c) in u.iter() {
            out.add_scaled(&self.apply_word(&m.factors, &v), c);
        }
        out
    }
}

/// `u · v` in the Verma module `M(λ, c, c0, c1)`, as a combination of
/// negative PBW monomials.
pub fn act_on_highest(u: &UeaElement, p: &HighestWeightParams) -> UeaElement {
    HighestWeightAction::new(p.clone()).act(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use BasisElement::*;

    fn mono(f: &[BasisElement]) -> PbwMonomial {
        PbwMonomial::from_sorted(f.to_vec()).expect("sorted")
    }

    fn params(lambda: i64, c: i64, c0: i64, c1: i64) -> HighestWeightParams {
        HighestWeightParams::new(int(lambda), int(c), int(c0), int(c1))
    }

    #[test]
    fn already_ordered_word_is_fixed() {
        assert_eq!(normal_order(&[I(-2), X(-1)]), UeaElement::monomial(mono(&[I(-2), X(-1)])));
    }

    #[test]
    fn single_swap() {
        let expect = UeaElement::from_terms([(mono(&[X(-1), X(1)]), int(1)), (mono(&[X(0)]), int(-2))]);
        assert_eq!(normal_order(&[X(1), X(-1)]), expect);
    }

    #[test]
    fn commuting_i_generators() {
        assert_eq!(normal_order(&[I(5), I(2)]), UeaElement::monomial(mono(&[I(2), I(5)])));
    }

    #[test]
    fn central_terms_surface() {
        // x(2)x(-2) = x(-2)x(2) - 4 x(0) + (1/2) C
        let got = normal_order(&[X(2), X(-2)]);
        assert_eq!(got.coeff(&mono(&[C])), scalar::frac(1, 2));
        assert_eq!(got.coeff(&mono(&[X(0)])), int(-4));
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn act_examples() {
        let p = params(5, 1, 3, 2);
        let v = act_on_highest(&UeaElement::monomial(mono(&[X(0)])), &p);
        assert_eq!(v, UeaElement::term(PbwMonomial::one(), int(5)));

        let u = normal_order(&[X(1), I(-1)]);
        assert_eq!(act_on_highest(&u, &p), UeaElement::term(PbwMonomial::one(), int(-6)));

        let u = normal_order(&[I(1), X(-1)]);
        assert!(act_on_highest(&u, &params(4, 1, 0, 9)).is_zero());
    }

    #[test]
    fn positive_generators_in_the_middle_still_act() {
        // I(2) x(-2) is in PBW order but does not annihilate v:
        // [I(2), x(-2)] = -4 I(0) + (1/2) C1
        let u = normal_order(&[I(2), X(-2)]);
        let p = params(0, 0, 1, 6);
        assert_eq!(act_on_highest(&u, &p), UeaElement::term(PbwMonomial::one(), int(-1)));
    }

    #[test]
    fn lowering_builds_sorted_monomials() {
        let p = params(1, 2, 3, 4);
        let mut act = HighestWeightAction::new(p);
        let v = UeaElement::monomial(PbwMonomial::one());
        let w = act.apply_word(&[X(-1), I(-1)], &v);
        assert_eq!(w, UeaElement::monomial(mono(&[I(-1), X(-1)])));
        // I(-1) x(-1) v = x(-1) I(-1) v + [I(-1), x(-1)] v, and [I(-1),x(-1)] = -[x(-1),I(-1)] = 0
        let w = act.apply_word(&[I(-1), X(-1)], &v);
        assert_eq!(w, UeaElement::monomial(mono(&[I(-1), X(-1)])));
        // x(-1) x(-2) v = x(-2) x(-1) v + [x(-1), x(-2)] v = x(-2)x(-1) v - x(-3) v
        let w = act.apply_word(&[X(-1), X(-2)], &v);
        assert_eq!(w, UeaElement::from_terms([(mono(&[X(-2), X(-1)]), int(1)), (mono(&[X(-3)]), int(-1))]));
    }

    #[test]
    fn serialization_roundtrip() {
        let u = normal_order(&[X(2), I(-1), X(-2)]);
        let json = serde_json::to_string(&u).unwrap();
        let back: UeaElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, u);
        let m = serde_json::to_string(&mono(&[C, I(-1), X(-2)])).unwrap();
        assert_eq!(m, r#"[{"kind":"C"},{"kind":"I","index":-1},{"kind":"X","index":-2}]"#);
        assert!(serde_json::from_str::<UeaElement>(
            r#"[{"monomial":[{"kind":"X","index":1},{"kind":"X","index":0}],"coeff":"1"}]"#
        )
        .is_err());
    }
}
