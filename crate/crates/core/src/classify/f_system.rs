use crate::error::Error;
use crate::lie::central_coefficient;
use crate::scalar::{self, Scalar};

use super::{require_window, ConstraintSystem, Unknown};

/// Constraints on `I(m) v_t = f(m,t) v_{m+t}` over the module
/// `x(n) v_t = (a + t + b n) v_{n+t}`.
///
/// `[x(n), I(m)] v_t` gives, for every `(m, n, t)` with `|m|, |n|, |t|,
/// |n+t|, |n+m| <= N`,
///
/// ```text
/// f(m,t)(a+t+m+bn) - f(m,n+t)(a+t+bn) = (m-n) f(n+m,t) + δ(n+m,0) (n³-n)/12 C1
/// ```
///
/// and `[I(m), I(n)] v_t = 0` gives `f(n,t) f(m,n+t) = f(m,t) f(n,m+t)` for
/// `m < n` with `|n+t|, |m+t| <= N`. Equations that cancel to `0 = 0` are
/// not stored.
pub fn build_f_system(a: &Scalar, b: &Scalar, window: i64) -> Result<ConstraintSystem, Error> {
    require_window(window, 3)?;
    let w = window;
    let inside = |k: i64| k.abs() <= w;
    let f = |m: i64, t: i64| Unknown::F { m, t };

    let mut unknowns: Vec<Unknown> = (-w..=w).flat_map(|m| (-w..=w).map(move |t| Unknown::F { m, t })).collect();
    unknowns.push(Unknown::C1);
    let mut sys = ConstraintSystem::new(unknowns);

    for m in -w..=w {
        for n in -w..=w {
            for t in -w..=w {
                if !inside(n + t) || !inside(n + m) {
                    continue;
                }
                let (mi, ni, ti) = (scalar::int(m), scalar::int(n), scalar::int(t));
                let mut terms = vec![
                    (f(m, t), a + &ti + &mi + b * &ni),
                    (f(m, n + t), -(a + &ti + b * &ni)),
                    (f(n + m, t), -scalar::int(m - n)),
                ];
                if n + m == 0 {
                    terms.push((Unknown::C1, -central_coefficient(n)));
                }
                sys.add_equation(terms, scalar::zero());
            }
        }
    }

    for m in -w..=w {
        for n in (m + 1)..=w {
            for t in -w..=w {
                if !inside(n + t) || !inside(m + t) {
                    continue;
                }
                sys.add_quadratic([(f(n, t), f(m, n + t), scalar::one()), (f(m, t), f(n, m + t), scalar::int(-1))]);
            }
        }
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{check_quadratic, solve_linear};
    use crate::scalar::{frac, int};
    use num_traits::Zero;

    #[test]
    fn unknown_count_and_window_guard() {
        let sys = build_f_system(&frac(1, 2), &frac(1, 3), 5).unwrap();
        assert_eq!(sys.unknowns.len(), 11 * 11 + 1);
        assert!(matches!(build_f_system(&int(1), &int(0), 2), Err(Error::WindowTooSmall { got: 2, min: 3 })));
    }

    #[test]
    fn known_family_has_zero_residuals() {
        let (a, b) = (frac(1, 2), frac(1, 3));
        let sys = build_f_system(&a, &b, 5).unwrap();
        let x = sys.assignment(sys.unknowns.clone().into_iter().filter_map(|u| match u {
            Unknown::F { m, t } => Some((u, &a + &b * int(m) + int(t))),
            _ => None,
        }));
        assert!(sys.residuals(&x).iter().all(Zero::is_zero));
    }

    #[test]
    fn central_charge_alone_is_not_a_solution() {
        let sys = build_f_system(&frac(1, 2), &frac(1, 3), 5).unwrap();
        let x = sys.assignment([(Unknown::C1, int(1))]);
        let bad: Vec<_> = sys.residuals(&x).into_iter().filter(|r| !r.is_zero()).collect();
        assert!(!bad.is_empty());
        // each failing row is one of the (m, -m) rows, residual -(n³-n)/12 with n = -m
        for r in &bad {
            let hit = (2..=5).any(|m: i64| *r == central_coefficient(m) || *r == -central_coefficient(m));
            assert!(hit, "unexpected residual {r}");
        }
    }

    #[test]
    fn solution_is_one_ray_killed_by_commutativity() {
        let (a, b) = (frac(1, 2), frac(1, 3));
        let sys = build_f_system(&a, &b, 5).unwrap();
        let s = solve_linear(&sys);
        assert_eq!(s.dimension, 1);
        let v = &s.basis[0];
        let c1 = sys.position(&Unknown::C1).unwrap();
        assert!(v[c1].is_zero());
        let scale = sys.value(v, &Unknown::F { m: 0, t: 0 }).unwrap() / &a;
        for m in -5..=5 {
            for t in -5..=5 {
                let got = sys.value(v, &Unknown::F { m, t }).unwrap();
                assert_eq!(got, &scale * (&a + &b * int(m) + int(t)));
            }
        }
        assert_eq!(check_quadratic(&sys, &s).surviving_rays, 0);
    }
}
