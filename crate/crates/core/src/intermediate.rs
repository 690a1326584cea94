//! Weight modules with one-dimensional weight spaces.
//!
//! Basis `{v_i : i ∈ Z}`, `I(n)`, `C` and `C1` acting as zero, and `x(m)`
//! acting by one of
//!
//! ```text
//! Aab(a, b): x(m) v_i = (a + i + b m) v_{m+i}
//! Aa(a):     x(m) v_i = (i + m) v_{m+i}  (i ≠ 0),   x(m) v_0 = m(m + a) v_m
//! Ba(a):     x(m) v_i = i v_{m+i}        (i ≠ -m),  x(m) v_{-m} = -m(m + a) v_0
//! ```
//!
//! `A'000` is the nontrivial simple subquotient, realised as the `Aab(0, 1)`
//! table on the indices `i ≠ 0`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lie::{bracket_basis, BasisElement, LieElement};
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Aab,
    Aa,
    Ba,
    #[serde(rename = "APrime000")]
    APrime000,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub family: Family,
    #[serde(with = "scalar::text")]
    pub a: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_scalar")]
    pub b: Option<Scalar>,
}

mod opt_scalar {
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

impl ModuleSpec {
    pub fn aab(a: Scalar, b: Scalar) -> Self {
        Self { family: Family::Aab, a, b: Some(b) }
    }

    pub fn aa(a: Scalar) -> Self {
        Self { family: Family::Aa, a, b: None }
    }

    pub fn ba(a: Scalar) -> Self {
        Self { family: Family::Ba, a, b: None }
    }

    /// The simple subquotient shared by `Aab(0,0)`, `Aab(0,1)`, `Aa(a)` and
    /// `Ba(a)`.
    pub fn a_prime_000() -> Self {
        Self { family: Family::APrime000, a: scalar::zero(), b: None }
    }

    pub fn catalog_name(&self) -> String {
        let a = scalar::format(&self.a);
        match self.family {
            Family::Aab => format!("A({a},{},0)", scalar::format(self.b.as_ref().unwrap_or(&scalar::zero()))),
            Family::Aa => format!("A({a},0)"),
            Family::Ba => format!("B({a},0)"),
            Family::APrime000 => "A'(0,0,0)".to_string(),
        }
    }
}

/// A module with one-dimensional weight spaces indexed by (a subset of) Z.
pub trait WeightModule {
    /// `g · v_i` as `(target index, coefficient)`; `None` when it vanishes.
    fn act_basis(&self, g: BasisElement, i: i64) -> Option<(i64, Scalar)>;

    fn in_support(&self, _i: i64) -> bool {
        true
    }
}

impl WeightModule for ModuleSpec {
    fn act_basis(&self, g: BasisElement, i: i64) -> Option<(i64, Scalar)> {
        let BasisElement::X(m) = g else {
            return None;
        };
        if !self.in_support(i) {
            return None;
        }
        let a = &self.a;
        let coeff = match self.family {
            Family::Aab => a + scalar::int(i) + self.b.clone().unwrap_or_else(scalar::zero) * scalar::int(m),
            Family::Aa if i == 0 => scalar::int(m) * (scalar::int(m) + a),
            Family::Aa => scalar::int(i + m),
            Family::Ba if i == -m => -(scalar::int(m) * (scalar::int(m) + a)),
            Family::Ba => scalar::int(i),
            Family::APrime000 => scalar::int(i + m),
        };
        let target = i + m;
        (!coeff.is_zero() && self.in_support(target)).then_some((target, coeff))
    }

    fn in_support(&self, i: i64) -> bool {
        self.family != Family::APrime000 || i != 0
    }
}

/// A finite combination `Σ coeff_i v_i`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IndexedVector {
    coords: BTreeMap<i64, Scalar>,
}

#[derive(Serialize, Deserialize)]
struct IndexedRecord {
    index: i64,
    #[serde(with = "scalar::text")]
    coeff: Scalar,
}

impl Serialize for IndexedVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let recs: Vec<IndexedRecord> =
            self.coords.iter().map(|(i, c)| IndexedRecord { index: *i, coeff: c.clone() }).collect();
        recs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexedVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let recs = Vec::<IndexedRecord>::deserialize(d)?;
        Ok(IndexedVector::from_terms(recs.into_iter().map(|r| (r.index, r.coeff))))
    }
}

impl IndexedVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: i64) -> Self {
        Self::from_terms([(i, scalar::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut out = Self::zero();
        for (i, c) in terms {
            out.add_term(i, c);
        }
        out
    }

    pub fn add_term(&mut self, i: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.coords.entry(i).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.coords.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, other: &IndexedVector, factor: &Scalar) {
        for (i, c) in &other.coords {
            self.add_term(*i, c * factor);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coeff(&self, i: i64) -> Scalar {
        self.coords.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &Scalar)> {
        self.coords.iter()
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.coords.keys().copied()
    }
}

pub fn act<M: WeightModule + ?Sized>(module: &M, g: BasisElement, v: &IndexedVector) -> IndexedVector {
    let mut out = IndexedVector::zero();
    for (i, c) in v.iter() {
        if let Some((t, k)) = module.act_basis(g, *i) {
            out.add_term(t, k * c);
        }
    }
    out
}

pub fn act_element<M: WeightModule + ?Sized>(module: &M, e: &LieElement, v: &IndexedVector) -> IndexedVector {
    let mut out = IndexedVector::zero();
    for (b, c) in e.iter() {
        out.add_scaled(&act(module, *b, v), c);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityViolation {
    pub left: BasisElement,
    pub right: BasisElement,
    pub source: i64,
    /// `g·(h·v) - h·(g·v)`
    pub commutator: IndexedVector,
    /// `[g,h]·v`
    pub bracket: IndexedVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub window: i64,
    pub checks: usize,
    pub violations: Vec<CompatibilityViolation>,
}

/// Checks `g·(h·v_i) - h·(g·v_i) = [g,h]·v_i` for all basis elements `g, h`
/// with `|index| <= window` and all `|i| <= window` in the support. Checks
/// whose intermediate indices leave `[-3N, 3N]` are skipped.
pub fn bracket_compatibility_check<M: WeightModule + ?Sized>(
    module: &M,
    window: i64,
) -> Result<CompatibilityReport, Error> {
    if window < 1 {
        return Err(Error::WindowTooSmall { got: window, min: 1 });
    }
    let outer = 3 * window;
    let gens = BasisElement::window(window);
    let mut violations = Vec::new();
    let mut checks = 0;
    for &g in &gens {
        for &h in &gens {
            let br = bracket_basis(g, h);
            for i in (-window..=window).filter(|i| module.in_support(*i)) {
                let (dg, dh) = (g.degree(), h.degree());
                if [i + dg, i + dh, i + dg + dh].iter().any(|t| t.abs() > outer) {
                    continue;
                }
                checks += 1;
                let v = IndexedVector::basis(i);
                let mut commutator = act(module, g, &act(module, h, &v));
                commutator.add_scaled(&act(module, h, &act(module, g, &v)), &scalar::int(-1));
                let bracket = act_element(module, &br, &v);
                if commutator != bracket {
                    violations.push(CompatibilityViolation { left: g, right: h, source: i, commutator, bracket });
                }
            }
        }
    }
    Ok(CompatibilityReport { window, checks, violations })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    NoProperInvariantWindowSubspace { window: i64 },
    CandidateSubmodule { window: i64, seed: i64, indices: Vec<i64> },
}

fn reachable<M: WeightModule + ?Sized>(module: &M, seed: i64, window: i64) -> BTreeSet<i64> {
    let mut seen = BTreeSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(i) = queue.pop_front() {
        for t in -window..=window {
            if seen.contains(&t) {
                continue;
            }
            let m = t - i;
            let hit = [BasisElement::X(m), BasisElement::I(m)]
                .into_iter()
                .any(|g| module.act_basis(g, i).is_some_and(|(target, _)| target == t));
            if hit {
                seen.insert(t);
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Windowed reachability probe. From each seed `v_i` with `|i| <= N`, follow
/// nonzero generator actions that stay inside the window. If every seed
/// reaches the whole window the verdict is that no proper invariant window
/// subspace exists; otherwise the smallest reachable set is reported. This is
/// evidence at window size `N`, not a proof about the infinite module.
pub fn simplicity_probe<M: WeightModule + ?Sized>(module: &M, window: i64) -> Result<ProbeVerdict, Error> {
    if window < 2 {
        return Err(Error::WindowTooSmall { got: window, min: 2 });
    }
    let support: Vec<i64> = (-window..=window).filter(|i| module.in_support(*i)).collect();
    let mut smallest: Option<(i64, BTreeSet<i64>)> = None;
    for &seed in &support {
        let reach = reachable(module, seed, window);
        if reach.len() < support.len() && smallest.as_ref().is_none_or(|(_, s)| reach.len() < s.len()) {
            smallest = Some((seed, reach));
        }
    }
    Ok(match smallest {
        None => ProbeVerdict::NoProperInvariantWindowSubspace { window },
        Some((seed, reach)) => ProbeVerdict::CandidateSubmodule { window, seed, indices: reach.into_iter().collect() },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub generator: BasisElement,
    pub source: i64,
    pub target: i64,
    #[serde(with = "scalar::text")]
    pub coeff: Scalar,
}

/// Nonzero entries of the `x(m)`, `I(m)` action for `|m|, |i| <= window`.
pub fn action_table<M: WeightModule + ?Sized>(module: &M, window: i64) -> Vec<ActionEntry> {
    let mut out = Vec::new();
    let gens = (-window..=window).map(BasisElement::X).chain((-window..=window).map(BasisElement::I));
    for g in gens {
        for i in (-window..=window).filter(|i| module.in_support(*i)) {
            if let Some((target, coeff)) = module.act_basis(g, i) {
                out.push(ActionEntry { generator: g, source: i, target, coeff });
            }
        }
    }
    out
}

/// TSV rows `kind  index  source  coeff` with a header line.
pub fn action_table_tsv<M: WeightModule + ?Sized>(module: &M, window: i64) -> String {
    let mut out = String::from("kind\tindex\tsource\tcoeff\n");
    for e in action_table(module, window) {
        let kind = match e.generator {
            BasisElement::X(_) => "X",
            BasisElement::I(_) => "I",
            BasisElement::C => "C",
            BasisElement::C1 => "C1",
        };
        let _ = writeln!(out, "{kind}\t{}\t{}\t{}", e.generator.degree(), e.source, scalar::format(&e.coeff));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::vir_embed;
    use crate::scalar::{frac, int};
    use BasisElement::*;

    fn on(spec: &ModuleSpec, g: BasisElement, i: i64) -> IndexedVector {
        act(spec, g, &IndexedVector::basis(i))
    }

    #[test]
    fn action_examples() {
        let aab = ModuleSpec::aab(frac(1, 2), int(0));
        assert_eq!(on(&aab, X(2), 3), IndexedVector::from_terms([(5, frac(7, 2))]));
        assert!(on(&ModuleSpec::aab(int(3), int(7)), I(4), 3).is_zero());
        assert_eq!(on(&ModuleSpec::aa(int(1)), X(2), 0), IndexedVector::from_terms([(2, int(6))]));
        assert_eq!(on(&ModuleSpec::ba(int(0)), X(1), -1), IndexedVector::from_terms([(0, int(-1))]));
        assert!(on(&aab, C, 1).is_zero());
        assert!(on(&aab, C1, 1).is_zero());
    }

    #[test]
    fn families_are_modules() {
        for spec in [
            ModuleSpec::aab(frac(1, 2), frac(1, 3)),
            ModuleSpec::aab(int(0), int(1)),
            ModuleSpec::aa(int(1)),
            ModuleSpec::aa(frac(-2, 5)),
            ModuleSpec::ba(int(2)),
            ModuleSpec::ba(int(0)),
            ModuleSpec::a_prime_000(),
        ] {
            let r = bracket_compatibility_check(&spec, 3).unwrap();
            assert!(r.violations.is_empty(), "{}: {:?}", spec.catalog_name(), r.violations.first());
            assert!(r.checks > 0);
        }
    }

    /// `Aa(a)` with the `v_0` rule replaced by the generic one is exactly
    /// `Aab(0, 1)`, itself a module, so nothing is reported.
    struct GenericRuleOnZero;

    impl WeightModule for GenericRuleOnZero {
        fn act_basis(&self, g: BasisElement, i: i64) -> Option<(i64, Scalar)> {
            match g {
                X(m) => Some((i + m, scalar::int(i + m))).filter(|(_, c)| !c.is_zero()),
                _ => None,
            }
        }
    }

    /// `Aa(a)` with `x(m) v_0 = (m + a) v_m`, losing the factor `m`.
    struct DroppedFactor(Scalar);

    impl WeightModule for DroppedFactor {
        fn act_basis(&self, g: BasisElement, i: i64) -> Option<(i64, Scalar)> {
            let honest = ModuleSpec::aa(self.0.clone());
            match g {
                X(m) if i == 0 => Some((m, scalar::int(m) + &self.0)).filter(|(_, c)| !c.is_zero()),
                _ => honest.act_basis(g, i),
            }
        }
    }

    #[test]
    fn corrupted_actions() {
        let generic = bracket_compatibility_check(&GenericRuleOnZero, 4).unwrap();
        assert!(generic.violations.is_empty());

        let dropped = bracket_compatibility_check(&DroppedFactor(int(1)), 4).unwrap();
        assert!(!dropped.violations.is_empty());
        // x(2) x(-1) v_0 - x(-1) x(2) v_0 = -3 v_1, but [x(2), x(-1)] v_0 = -3 x(1) v_0 = -6 v_1
        let hit = dropped
            .violations
            .iter()
            .find(|v| v.left == X(2) && v.right == X(-1) && v.source == 0)
            .expect("pair (x(2), x(-1)) on v_0 must fail");
        assert_eq!(hit.commutator, IndexedVector::from_terms([(1, int(-3))]));
        assert_eq!(hit.bracket, IndexedVector::from_terms([(1, int(-6))]));
    }

    #[test]
    fn probes() {
        assert_eq!(
            simplicity_probe(&ModuleSpec::aab(frac(1, 2), int(0)), 5).unwrap(),
            ProbeVerdict::NoProperInvariantWindowSubspace { window: 5 }
        );
        assert_eq!(
            simplicity_probe(&ModuleSpec::aab(int(0), int(0)), 5).unwrap(),
            ProbeVerdict::CandidateSubmodule { window: 5, seed: 0, indices: vec![0] }
        );
        let expected: Vec<i64> = (-5..=5).filter(|i| *i != 0).collect();
        assert_eq!(
            simplicity_probe(&ModuleSpec::aab(int(0), int(1)), 5).unwrap(),
            ProbeVerdict::CandidateSubmodule { window: 5, seed: -5, indices: expected }
        );
        assert_eq!(
            simplicity_probe(&ModuleSpec::a_prime_000(), 5).unwrap(),
            ProbeVerdict::NoProperInvariantWindowSubspace { window: 5 }
        );
        assert!(matches!(simplicity_probe(&ModuleSpec::aa(int(1)), 1), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn weight_additivity_and_vir_consistency() {
        for spec in [ModuleSpec::aab(frac(2, 7), int(3)), ModuleSpec::aa(int(-1)), ModuleSpec::ba(frac(1, 2))] {
            for m in -4..=4 {
                for i in -4..=4 {
                    for g in [X(m), I(m)] {
                        assert!(on(&spec, g, i).indices().all(|t| t == i + m));
                    }
                    for e in [int(0), int(1), frac(-1, 2)] {
                        let v = IndexedVector::basis(i);
                        assert_eq!(act_element(&spec, &vir_embed(&e, m), &v), act(&spec, X(m), &v));
                    }
                }
            }
        }
    }

    #[test]
    fn integer_a_is_an_index_shift() {
        for b in [int(0), int(1), frac(3, 4)] {
            let zero = ModuleSpec::aab(int(0), b.clone());
            for a in [-2, 1, 3] {
                let shifted = ModuleSpec::aab(int(a), b.clone());
                for m in -4..=4 {
                    for i in -4..=4 {
                        let lhs = shifted.act_basis(X(m), i).map(|(t, c)| (t + a, c));
                        assert_eq!(lhs, zero.act_basis(X(m), i + a));
                    }
                }
            }
        }
    }

    #[test]
    fn tsv_export() {
        let tsv = action_table_tsv(&ModuleSpec::aab(int(0), int(0)), 1);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "kind\tindex\tsource\tcoeff");
        assert!(lines.contains(&"X\t1\t-1\t-1"));
        assert!(!lines.iter().any(|l| l.starts_with("X\t1\t0\t")));
        assert!(!lines.iter().any(|l| l.starts_with("I\t")));
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = ModuleSpec::aab(frac(1, 2), frac(-1, 3));
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"Aab","a":"1/2","b":"-1/3"}"#);
        assert_eq!(serde_json::from_str::<ModuleSpec>(&json).unwrap(), spec);
        let ba = serde_json::to_string(&ModuleSpec::ba(int(2))).unwrap();
        assert_eq!(serde_json::from_str::<ModuleSpec>(&ba).unwrap(), ModuleSpec::ba(int(2)));
    }
}
