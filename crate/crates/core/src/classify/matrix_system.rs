use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lie::central_coefficient;
use crate::scalar::{self, Scalar};

use super::{require_window, ConstraintSystem, Unknown};

/// How the Virasoro action on the two-dimensional weight spaces is glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtType {
    /// `A_{α,β1} ⊕ A_{α,β2}`.
    Decomposable,
    /// `x(i) v'_n = (α+n) v'_{n+i} - i v_{n+i}`.
    ExtA,
    /// Nonsplit gluing through `x(±2)` only:
    /// `x(±2) v'_n = (α+n) v'_{n±2} ± v_{n±2} / ((α+n±2)(α+n±1))`.
    ExtB,
}

/// 2×2 matrix, row-major.
pub type Mat2 = [[Scalar; 2]; 2];

fn mat(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Mat2 {
    [[a, b], [c, d]]
}

fn mul(p: &Mat2, q: &Mat2) -> Mat2 {
    let e = |r: usize, c: usize| &p[r][0] * &q[0][c] + &p[r][1] * &q[1][c];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn scale(p: &Mat2, f: &Scalar) -> Mat2 {
    [[&p[0][0] * f, &p[0][1] * f], [&p[1][0] * f, &p[1][1] * f]]
}

fn lin(p: &Mat2, fp: &Scalar, q: &Mat2, fq: &Scalar) -> Mat2 {
    let e = |r: usize, c: usize| &p[r][c] * fp + &q[r][c] * fq;
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// The matrices `A_{i,n}` of `x(i)` from weight `α+n` to `α+n+i` in the basis
/// `(v_n, v'_n)`: column `l` is the image of the `l`-th basis vector.
#[derive(Debug)]
pub struct ActionMatrices {
    pub alpha: Scalar,
    pub betas: (Scalar, Scalar),
    pub ext: ExtType,
    cache: RefCell<HashMap<(i64, i64), Mat2>>,
}

impl ActionMatrices {
    pub fn new(alpha: Scalar, betas: (Scalar, Scalar), ext: ExtType) -> Result<Self, Error> {
        if ext != ExtType::Decomposable && !(betas.0.is_zero() && betas.1.is_zero()) {
            return Err(Error::InvalidParameter(format!("{ext:?} glues A(α,0) to itself; betas must be (0,0)")));
        }
        if ext == ExtType::ExtB && alpha.is_integer() {
            return Err(Error::InvalidParameter(format!(
                "ExtB needs α outside Z (denominators (α+n+1)(α+n+2) vanish), got {}",
                scalar::format(&alpha)
            )));
        }
        Ok(Self { alpha, betas, ext, cache: RefCell::new(HashMap::new()) })
    }

    fn weight(&self, n: i64) -> Scalar {
        &self.alpha + scalar::int(n)
    }

    pub fn get(&self, i: i64, n: i64) -> Mat2 {
        if let Some(m) = self.cache.borrow().get(&(i, n)) {
            return m.clone();
        }
        let m = self.compute(i, n);
        self.cache.borrow_mut().insert((i, n), m.clone());
        m
    }

    fn compute(&self, i: i64, n: i64) -> Mat2 {
        let w = self.weight(n);
        let z = scalar::zero;
        match self.ext {
            ExtType::Decomposable => {
                let d1 = &w + scalar::int(i) * &self.betas.0;
                let d2 = &w + scalar::int(i) * &self.betas.1;
                mat(d1, z(), z(), d2)
            }
            ExtType::ExtA => mat(w.clone(), scalar::int(-i), z(), w),
            ExtType::ExtB => match i {
                -1..=1 => mat(w.clone(), z(), z(), w),
                2 => {
                    let glue = scalar::one() / ((&w + scalar::int(2)) * (&w + scalar::int(1)));
                    mat(w.clone(), glue, z(), w)
                }
                -2 => {
                    let glue = -(scalar::one() / ((&w - scalar::int(2)) * (&w - scalar::int(1))));
                    mat(w.clone(), glue, z(), w)
                }
                // (i-1) A_{i+1,n} = A_{1,i+n} A_{i,n} - A_{i,1+n} A_{1,n}
                i if i >= 3 => {
                    let k = i - 1;
                    let prod = lin(
                        &mul(&self.get(1, k + n), &self.get(k, n)),
                        &scalar::one(),
                        &mul(&self.get(k, 1 + n), &self.get(1, n)),
                        &scalar::int(-1),
                    );
                    scale(&prod, &(scalar::one() / scalar::int(k - 1)))
                }
                // (k+1) A_{k-1,n} = A_{-1,k+n} A_{k,n} - A_{k,n-1} A_{-1,n}
                _ => {
                    let k = i + 1;
                    let prod = lin(
                        &mul(&self.get(-1, k + n), &self.get(k, n)),
                        &scalar::one(),
                        &mul(&self.get(k, n - 1), &self.get(-1, n)),
                        &scalar::int(-1),
                    );
                    scale(&prod, &(scalar::one() / scalar::int(k + 1)))
                }
            },
        }
    }

    /// `(α+n)(α+n+i)(α+n+j)(α+n+i+j) ≠ 0`, the range where the bracket
    /// relations are imposed.
    pub fn admissible(&self, i: i64, j: i64, n: i64) -> bool {
        [n, n + i, n + j, n + i + j].iter().all(|k| !self.weight(*k).is_zero())
    }

    /// `A_{i,j+n} A_{j,n} - A_{j,i+n} A_{i,n} = (j-i) A_{i+j,n}` on the window.
    pub fn check_virasoro(&self, window: i64) -> Result<(), Error> {
        let w = window;
        for i in -w..=w {
            for j in -w..=w {
                if (i + j).abs() > w {
                    continue;
                }
                for n in -w..=w {
                    if !self.admissible(i, j, n) {
                        continue;
                    }
                    let lhs = lin(
                        &mul(&self.get(i, j + n), &self.get(j, n)),
                        &scalar::one(),
                        &mul(&self.get(j, i + n), &self.get(i, n)),
                        &scalar::int(-1),
                    );
                    let rhs = scale(&self.get(i + j, n), &scalar::int(j - i));
                    if lhs != rhs {
                        return Err(Error::InconsistentAction { i, j, n });
                    }
                }
            }
        }
        Ok(())
    }
}

fn entry(i: i64, n: i64, k: usize, l: usize) -> Unknown {
    Unknown::Entry { i, n, k: (k + 1) as u8, l: (l + 1) as u8 }
}

/// Constraints on the 2×2 matrices `F_{i,n}` of `I(i)` over a module whose
/// Virasoro part is given by [`ActionMatrices`].
///
/// Linear part, entrywise, for `|i|, |j|, |n|, |i+n|, |i+j| <= N` in the
/// admissible range:
///
/// ```text
/// A_{i,j+n} F_{j,n} - F_{j,i+n} A_{i,n} = (j-i) F_{i+j,n} + δ(i,-j) (i³-i)/12 C1 · Id
/// ```
///
/// Bilinear part: `F_{i,j+n} F_{j,n} - F_{j,i+n} F_{i,n} = 0` for `i < j`.
/// The supplied action matrices are validated against the Virasoro relation
/// before anything is generated.
#[allow(clippy::needless_range_loop)]
pub fn build_matrix_system(
    alpha: &Scalar,
    betas: (&Scalar, &Scalar),
    ext: ExtType,
    window: i64,
) -> Result<ConstraintSystem, Error> {
    require_window(window, 4)?;
    let w = window;
    let am = ActionMatrices::new(alpha.clone(), (betas.0.clone(), betas.1.clone()), ext)?;
    am.check_virasoro(w)?;

    let mut unknowns = Vec::new();
    for i in -w..=w {
        for n in -w..=w {
            for k in 0..2 {
                for l in 0..2 {
                    unknowns.push(entry(i, n, k, l));
                }
            }
        }
    }
    unknowns.push(Unknown::C1);
    let mut sys = ConstraintSystem::new(unknowns);
    let inside = |k: i64| k.abs() <= w;

    for i in -w..=w {
        for j in -w..=w {
            for n in -w..=w {
                if !inside(i + n) || !inside(i + j) || !am.admissible(i, j, n) {
                    continue;
                }
                let a_left = am.get(i, j + n);
                let a_right = am.get(i, n);
                for k in 0..2 {
                    for l in 0..2 {
                        let mut terms = Vec::new();
                        for r in 0..2 {
                            terms.push((entry(j, n, r, l), a_left[k][r].clone()));
                            terms.push((entry(j, i + n, k, r), -a_right[r][l].clone()));
                        }
                        terms.push((entry(i + j, n, k, l), -scalar::int(j - i)));
                        if i == -j && k == l {
                            terms.push((Unknown::C1, -central_coefficient(i)));
                        }
                        sys.add_equation(terms, scalar::zero());
                    }
                }
            }
        }
    }

    for i in -w..=w {
        for j in (i + 1)..=w {
            for n in -w..=w {
                if !inside(j + n) || !inside(i + n) || !am.admissible(i, j, n) {
                    continue;
                }
                for k in 0..2 {
                    for l in 0..2 {
                        let mut terms = Vec::new();
                        for r in 0..2 {
                            terms.push((entry(i, j + n, k, r), entry(j, n, r, l), scalar::one()));
                            terms.push((entry(j, i + n, k, r), entry(i, n, r, l), scalar::int(-1)));
                        }
                        sys.add_quadratic(terms);
                    }
                }
            }
        }
    }
    Ok(sys)
}

/// Pins `F[1,0](2,1) = α`: the lowest nonvanishing entry of the first column
/// is rescaled to `α` by a change of basis in the glued copy.
pub fn normalize_glue_entry(sys: &mut ConstraintSystem, alpha: &Scalar) {
    sys.pin(entry(1, 0, 1, 0), alpha.clone());
}
