//! Verma modules `M(λ, c, c0, c1)`, level by level.
//!
//! Level `n` is spanned by the PBW monomials in `{x(-k), I(-k) : k ≥ 1}` of
//! degree `-n`, applied to the highest-weight vector. A singular vector at
//! level `n` lies in the joint kernel of the raising operators `x(k)`, `I(k)`
//! for `1 ≤ k ≤ n`; higher raising operators vanish on it by degree.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lie::{BasisElement, Kind};
use crate::linalg::Matrix;
use crate::pbw::{HighestWeightAction, HighestWeightParams, PbwMonomial, UeaElement};
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelBasis {
    pub level: usize,
    pub monomials: Vec<PbwMonomial>,
}

impl LevelBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: &PbwMonomial) -> Option<usize> {
        self.monomials.binary_search(m).ok()
    }

    /// Coordinates of a level-`n` vector in this basis.
    ///
    /// Panics if the vector has a component outside the level.
    pub fn coordinates(&self, w: &UeaElement) -> Vec<Scalar> {
        let mut out = vec![scalar::zero(); self.len()];
        for (m, c) in w.iter() {
            let pos = self.position(m).unwrap_or_else(|| panic!("{m} is not in level {}", self.level));
            out[pos] = c.clone();
        }
        out
    }

    pub fn vector(&self, coords: &[Scalar]) -> UeaElement {
        UeaElement::from_terms(self.monomials.iter().cloned().zip(coords.iter().cloned()))
    }
}

/// All degree `-n` PBW monomials in the negative generators, in canonical
/// order.
pub fn level_basis(n: usize) -> LevelBasis {
    let n = n as i64;
    let gens: Vec<BasisElement> =
        (1..=n).rev().map(|k| BasisElement::I(-k)).chain((1..=n).rev().map(|k| BasisElement::X(-k))).collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn walk(
        gens: &[BasisElement],
        start: usize,
        remaining: i64,
        current: &mut Vec<BasisElement>,
        out: &mut Vec<PbwMonomial>,
    ) {
        if remaining == 0 {
            out.push(PbwMonomial::from_sorted(current.clone()).expect("generated in order"));
            return;
        }
        for (i, g) in gens.iter().enumerate().skip(start) {
            let d = -g.degree();
            if d <= remaining {
                current.push(*g);
                walk(gens, i, remaining - d, current, out);
                current.pop();
            }
        }
    }
    walk(&gens, 0, n, &mut current, &mut out);
    out.sort();
    LevelBasis { level: n as usize, monomials: out }
}

pub fn character_dims(max_level: usize) -> Vec<usize> {
    (0..=max_level).map(|n| level_basis(n).len()).collect()
}

/// A Verma module with fixed highest weight, caching level bases and the
/// generator action.
#[derive(Debug, Clone)]
pub struct VermaModule {
    action: HighestWeightAction,
    levels: BTreeMap<usize, LevelBasis>,
}

impl VermaModule {
    pub fn new(params: HighestWeightParams) -> Self {
        Self { action: HighestWeightAction::new(params), levels: BTreeMap::new() }
    }

    pub fn params(&self) -> &HighestWeightParams {
        self.action.params()
    }

    pub fn level(&mut self, n: usize) -> &LevelBasis {
        self.levels.entry(n).or_insert_with(|| level_basis(n))
    }

    pub fn action(&mut self) -> &mut HighestWeightAction {
        &mut self.action
    }

    /// Matrix of `g` from level `n` to level `n - deg g`. Column `j` holds the
    /// coordinates of `g·(m_j v)`. Targets above the top give a zero-row
    /// matrix.
    pub fn operator_matrix(&mut self, g: BasisElement, n: usize) -> Matrix {
        let source = self.level(n).clone();
        let target_level = n as i64 - g.degree();
        if target_level < 0 {
            return Matrix::zeros(0, source.len());
        }
        let target = self.level(target_level as usize).clone();
        let mut m = Matrix::zeros(target.len(), source.len());
        for (j, mono) in source.monomials.iter().enumerate() {
            let image = self.action.apply(g, mono);
            for (i, c) in target.coordinates(&image).into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        m
    }

    pub fn raising_matrix(&mut self, k: usize, n: usize, kind: Kind) -> Matrix {
        assert!(k >= 1 && k <= n, "raising index must satisfy 1 <= k <= n");
        let g = match kind {
            Kind::X => BasisElement::X(k as i64),
            Kind::I => BasisElement::I(k as i64),
            Kind::C | Kind::C1 => panic!("raising operators are x(k) or I(k)"),
        };
        self.operator_matrix(g, n)
    }

    /// All raising matrices for `1 <= k <= n`, both kinds, stacked.
    pub fn joint_raising(&mut self, n: usize) -> Matrix {
        let parts: Vec<Matrix> = (1..=n)
            .flat_map(|k| [(k, Kind::X), (k, Kind::I)])
            .map(|(k, kind)| self.raising_matrix(k, n, kind))
            .collect();
        let cols = self.level(n).len();
        Matrix::vstack(cols, &parts)
    }

    pub fn singular_kernel(&mut self, n: usize) -> Vec<Vec<Scalar>> {
        if n == 0 {
            return vec![vec![scalar::one()]];
        }
        self.joint_raising(n).kernel()
    }

    pub fn find_singular(&mut self, max_level: usize) -> Vec<SingularVectorReport> {
        let mut out = Vec::new();
        for n in 1..=max_level {
            let kernel = self.singular_kernel(n);
            if let Some(first) = kernel.first() {
                let basis = self.level(n).clone();
                out.push(SingularVectorReport {
                    params: self.params().clone(),
                    level: n,
                    vector: VermaVector::from_dense(&basis, first),
                    killers_checked: n,
                    kernel_dimension: kernel.len(),
                });
            }
        }
        out
    }
}

pub fn raising_matrix(k: usize, n: usize, p: &HighestWeightParams, kind: Kind) -> Matrix {
    VermaModule::new(p.clone()).raising_matrix(k, n, kind)
}

pub fn find_singular(p: &HighestWeightParams, max_level: usize) -> Vec<SingularVectorReport> {
    VermaModule::new(p.clone()).find_singular(max_level)
}

/// A vector at a fixed level, stored sparsely by basis position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VermaVector {
    pub level: usize,
    pub coords: Vec<Coordinate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coordinate {
    pub position: usize,
    pub monomial: PbwMonomial,
    #[serde(with = "scalar::text")]
    pub coeff: Scalar,
}

impl VermaVector {
    pub fn from_dense(basis: &LevelBasis, coords: &[Scalar]) -> Self {
        let coords = coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(position, c)| Coordinate { position, monomial: basis.monomials[position].clone(), coeff: c.clone() })
            .collect();
        Self { level: basis.level, coords }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut out = vec![scalar::zero(); dim];
        for c in &self.coords {
            out[c.position] = c.coeff.clone();
        }
        out
    }

    pub fn to_element(&self) -> UeaElement {
        UeaElement::from_terms(self.coords.iter().map(|c| (c.monomial.clone(), c.coeff.clone())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularVectorReport {
    pub params: HighestWeightParams,
    pub level: usize,
    /// First kernel basis vector, scaled so its first nonzero coordinate is 1.
    pub vector: VermaVector,
    /// Largest `k` for which `x(k)` and `I(k)` were applied.
    pub killers_checked: usize,
    pub kernel_dimension: usize,
}

/// `(m² - 1)/12 · c1 + 2 c0`, the closed-form irreducibility criterion in
/// its customary form.
pub fn criterion_value(m: i64, c0: &Scalar, c1: &Scalar) -> Scalar {
    scalar::frac(m * m - 1, 12) * c1 + scalar::int(2) * c0
}

/// Positive `m <= max_level` at which [`criterion_value`] vanishes.
pub fn criterion_roots(p: &HighestWeightParams, max_level: usize) -> Vec<i64> {
    (1..=max_level as i64).filter(|&m| criterion_value(m, &p.c0, &p.c1).is_zero()).collect()
}

/// `2 c0 - (m² - 1)/12 · c1`. Under the bracket used here,
/// `I(m) x(-m) v = -m · bracket_criterion_value(m) · v`, so this is the
/// factor that actually controls singular vectors at level `m`. It differs
/// from [`criterion_value`] by the sign of the `c1` term, the trace of a
/// convention change `x(n) = -L(n)`, `I(n) = -M(n)`.
pub fn bracket_criterion_value(m: i64, c0: &Scalar, c1: &Scalar) -> Scalar {
    scalar::int(2) * c0 - scalar::frac(m * m - 1, 12) * c1
}

pub fn bracket_criterion_roots(p: &HighestWeightParams, max_level: usize) -> Vec<i64> {
    (1..=max_level as i64).filter(|&m| bracket_criterion_value(m, &p.c0, &p.c1).is_zero()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Reducible,
    NoSingularVectorUpTo(usize),
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Reducible => s.serialize_str("reducible"),
            Verdict::NoSingularVectorUpTo(n) => s.serialize_str(&format!("no-singular-vector-up-to-{n}")),
        }
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        if raw == "reducible" {
            return Ok(Verdict::Reducible);
        }
        raw.strip_prefix("no-singular-vector-up-to-")
            .and_then(|n| n.parse().ok())
            .map(Verdict::NoSingularVectorUpTo)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown verdict {raw:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibilityCheck {
    pub criterion_roots: Vec<i64>,
    /// Roots of [`bracket_criterion_value`] up to the level bound.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bracket_roots: Vec<i64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<SingularVectorReport>,
    /// Set when the kernel search and the closed-form criterion disagree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disagreement: Option<String>,
}

/// Bounded irreducibility verdict from the kernel search, alongside the
/// closed-form criterion roots. The two are compared: a root `m0` must come
/// with a nonzero kernel at level `m0`, and no roots must mean no kernel.
pub fn is_verma_irreducible(p: &HighestWeightParams, max_level: usize) -> IrreducibilityCheck {
    let mut module = VermaModule::new(p.clone());
    let found = module.find_singular(max_level);
    let roots = criterion_roots(p, max_level);
    let disagreement = match roots.first() {
        Some(&m0) if !found.iter().any(|r| r.level == m0 as usize) => {
            Some(format!("criterion vanishes at m={m0} but level {m0} has no singular vector"))
        }
        None if !found.is_empty() => {
            Some(format!("criterion has no root up to {max_level} but level {} has a singular vector", found[0].level))
        }
        _ => None,
    };
    let witness = found.into_iter().next();
    let verdict = if witness.is_some() { Verdict::Reducible } else { Verdict::NoSingularVectorUpTo(max_level) };
    let bracket_roots = bracket_criterion_roots(p, max_level);
    IrreducibilityCheck { criterion_roots: roots, bracket_roots, verdict, witness, disagreement }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use BasisElement::*;

    fn mono(f: &[BasisElement]) -> PbwMonomial {
        PbwMonomial::from_sorted(f.to_vec()).unwrap()
    }

    fn params(lambda: i64, c: i64, c0: i64, c1: i64) -> HighestWeightParams {
        HighestWeightParams::new(int(lambda), int(c), int(c0), int(c1))
    }

    #[test]
    fn small_level_bases() {
        assert_eq!(level_basis(0).monomials, vec![PbwMonomial::one()]);
        assert_eq!(level_basis(1).monomials, vec![mono(&[I(-1)]), mono(&[X(-1)])]);
        assert_eq!(
            level_basis(2).monomials,
            vec![mono(&[I(-2)]), mono(&[I(-1), I(-1)]), mono(&[I(-1), X(-1)]), mono(&[X(-2)]), mono(&[X(-1), X(-1)])]
        );
        assert_eq!(character_dims(2), vec![1, 2, 5]);
        assert_eq!(character_dims(0), vec![1]);
    }

    #[test]
    fn level_one_raising_entries() {
        let p = params(3, 1, 5, 2);
        let basis = level_basis(1);
        let ix = basis.position(&mono(&[X(-1)])).unwrap();
        let ii = basis.position(&mono(&[I(-1)])).unwrap();
        let rx = raising_matrix(1, 1, &p, Kind::X);
        assert_eq!((rx.rows, rx.cols), (1, 2));
        // [x(1), x(-1)] = -2 x(0)
        assert_eq!(rx.get(0, ix), &int(-6));
        assert_eq!(rx.get(0, ii), &int(-10));
        let ri = raising_matrix(1, 1, &p, Kind::I);
        assert_eq!(ri.get(0, ix), &int(-10));
        assert_eq!(ri.get(0, ii), &int(0));
    }

    #[test]
    fn level_two_x2_on_x_minus_2() {
        let p = params(3, 10, 0, 0);
        let basis = level_basis(2);
        let col = basis.position(&mono(&[X(-2)])).unwrap();
        let r = raising_matrix(2, 2, &p, Kind::X);
        assert_eq!(r.get(0, col), &(int(-12) + int(5)));
    }

    #[test]
    fn singular_at_level_one_when_c0_vanishes() {
        let found = find_singular(&params(5, 0, 0, 7), 2);
        assert_eq!(found[0].level, 1);
        assert_eq!(found[0].vector.to_element(), UeaElement::monomial(mono(&[I(-1)])));
    }

    #[test]
    fn irreducible_sample() {
        assert!(find_singular(&params(1, 0, 1, 0), 4).is_empty());
        let check = is_verma_irreducible(&params(1, 0, 1, 0), 4);
        assert_eq!(check.verdict, Verdict::NoSingularVectorUpTo(4));
        assert!(check.criterion_roots.is_empty());
        assert!(check.disagreement.is_none());
    }

    #[test]
    fn root_at_two() {
        let found = find_singular(&params(2, 3, 1, 8), 2);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].level, 2);
        assert_eq!(bracket_criterion_roots(&params(2, 3, 1, 8), 4), vec![2]);
        assert_eq!(criterion_roots(&params(0, 0, -1, 8), 4), vec![2]);
    }

    #[test]
    fn printed_sign_disagrees_with_the_bracket() {
        // (3/12)(-8) + 2 = 0, but 2 - (3/12)(-8) = 4: no singular vector.
        let check = is_verma_irreducible(&params(2, 3, 1, -8), 4);
        assert_eq!(check.criterion_roots, vec![2]);
        assert!(check.bracket_roots.is_empty());
        assert_eq!(check.verdict, Verdict::NoSingularVectorUpTo(4));
        assert!(check.disagreement.is_some());
    }

    #[test]
    fn pairing_factor_matches_action() {
        let p = HighestWeightParams::new(scalar::frac(2, 3), int(5), scalar::frac(-1, 4), int(7));
        let mut act = crate::pbw::HighestWeightAction::new(p.clone());
        let v = UeaElement::monomial(PbwMonomial::one());
        for m in 1..=4 {
            let got = act.apply_word(&[I(m), X(-m)], &v);
            let expect = -scalar::int(m) * bracket_criterion_value(m, &p.c0, &p.c1);
            assert_eq!(got.coeff(&PbwMonomial::one()), expect);
        }
    }

    #[test]
    fn all_roots_when_degenerate() {
        let check = is_verma_irreducible(&params(2, 1, 0, 0), 3);
        assert_eq!(check.criterion_roots, vec![1, 2, 3]);
        assert_eq!(check.verdict, Verdict::Reducible);
        assert_eq!(check.witness.as_ref().unwrap().level, 1);
    }

    #[test]
    fn verdict_json() {
        let check = is_verma_irreducible(&params(1, 0, 1, 0), 4);
        assert_eq!(
            serde_json::to_string(&check).unwrap(),
            r#"{"criterion_roots":[],"verdict":"no-singular-vector-up-to-4"}"#
        );
    }
}
