use rayon::prelude::*;
use serde::Serialize;

use super::{CurveError, CurveModel};
use crate::field::{mul_mod, FieldElement};

/// Largest field size accepted by the exhaustive counter.
pub const COUNT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PointCount {
    pub q: u64,
    pub count: u64,
    pub trace: i64,
}

/// `#E(F_q)` of the smooth projective model by exhaustive enumeration, with
/// the Hasse bound enforced.
pub fn count_points(curve: &CurveModel) -> Result<PointCount, CurveError> {
    let field = curve.field();
    let q = field.order();
    if q > COUNT_BUDGET {
        return Err(CurveError::Budget(format!("q = {q} exceeds the counting budget {COUNT_BUDGET}")));
    }
    let coeffs = rhs_coefficients(curve);
    let affine = if field.degree() == 1 {
        let p = field.characteristic();
        let cs: Vec<u64> = coeffs.iter().map(|c| c.as_prime().expect("prime field")).collect();
        count_affine_prime(p, &cs)
    } else {
        let chi = character_table(field);
        field
            .elements()
            .map(|x| {
                let v = coeffs.iter().rev().fold(field.zero(), |acc, c| &(&acc * &x) + c);
                (1 + chi[v.index() as usize]) as u64
            })
            .sum()
    };
    let at_infinity = match curve {
        CurveModel::QuarticGenus1 { coeffs } => {
            if coeffs[4].is_zero() {
                1
            } else if coeffs[4].is_square() {
                2
            } else {
                0
            }
        }
        _ => 1,
    };
    let count = affine + at_infinity;
    let trace = q as i64 + 1 - count as i64;
    if (trace as i128).pow(2) > 4 * q as i128 {
        return Err(CurveError::HasseViolation { q: q as u64, trace });
    }
    Ok(PointCount {
        q: q as u64,
        count,
        trace,
    })
}

/// Coefficients of the right-hand side polynomial, low degree first.
pub(crate) fn rhs_coefficients(curve: &CurveModel) -> Vec<FieldElement> {
    match curve {
        CurveModel::QuarticGenus1 { coeffs } => coeffs.to_vec(),
        _ => {
            let f = curve.cubic_form().expect("cubic");
            vec![f.a6, f.a4, f.a2, f.lc]
        }
    }
}

/// Quadratic character of every element, indexed by [`FieldElement::index`].
pub(crate) fn character_table(field: &std::sync::Arc<crate::field::Field>) -> Vec<i8> {
    let mut chi = vec![-1i8; field.order() as usize];
    chi[0] = 0;
    for b in field.elements().skip(1) {
        chi[b.square().index() as usize] = 1;
    }
    chi
}

/// Quadratic character table of `F_p`.
pub fn prime_character_table(p: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for b in 1..p {
        chi[mul_mod(b, b, p) as usize] = 1;
    }
    chi
}

/// Number of `(x, y)` in `F_p^2` with `y^2 = sum cs[i] x^i`.
pub fn count_affine_prime(p: u64, cs: &[u64]) -> u64 {
    let chi = prime_character_table(p);
    (0..p)
        .into_par_iter()
        .map(|x| {
            let v = cs.iter().rev().fold(0u64, |acc, &c| (mul_mod(acc, x, p) + c) % p);
            (1 + chi[v as usize] as i64) as u64
        })
        .sum()
}

/// Frobenius trace over `F_{p^k}` from the trace over `F_p`:
/// `s_k = a s_{k-1} - p s_{k-2}` with `s_0 = 2`, `s_1 = a`.
pub fn trace_over_extension(trace: i64, p: u64, k: u32) -> i128 {
    let (a, p) = (trace as i128, p as i128);
    let (mut prev, mut cur) = (2i128, a);
    if k == 0 {
        return 2;
    }
    for _ in 1..k {
        (prev, cur) = (cur, a * cur - p * prev);
    }
    cur
}

/// Short Weierstrass curves `y^2 = x^3 + a x + b` over `F_p` with the given
/// trace, in lexicographic `(a, b)` order, at most `limit` of them.
pub fn curves_with_trace(p: u64, trace: i64, limit: usize) -> Result<Vec<CurveModel>, CurveError> {
    let f = crate::field::Field::prime(p)?;
    let mut out = Vec::new();
    'outer: for a in 0..p {
        for b in 0..p {
            let Ok(e) = CurveModel::short_w(f.from_u64(a), f.from_u64(b)) else { continue };
            if count_points(&e)?.trace == trace {
                out.push(e);
                if out.len() == limit {
                    break 'outer;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn legendre_three_over_f7() {
        let f = Field::prime(7).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let c = count_points(&e).unwrap();
        assert_eq!((c.count, c.trace), (4, 4));
    }

    #[test]
    fn full_two_torsion_forces_multiple_of_four() {
        let f = Field::prime(5).unwrap();
        let e = CurveModel::legendre(f.from_u64(2)).unwrap();
        assert_eq!(count_points(&e).unwrap().count % 4, 0);
    }

    #[test]
    fn even_quartic_over_f5() {
        let f = Field::prime(5).unwrap();
        let e = CurveModel::even_quartic(f.one(), f.zero(), f.one()).unwrap();
        let c = count_points(&e).unwrap();
        assert_eq!((c.count, c.trace), (4, 2));
    }

    #[test]
    fn extension_recurrence_matches_enumeration() {
        let f = Field::prime(7).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let a = count_points(&e).unwrap().trace;
        let f49 = Field::extension(7, 2).unwrap();
        let lifted = e.lift_to(&f49).unwrap();
        let c49 = count_points(&lifted).unwrap();
        assert_eq!(c49.trace as i128, trace_over_extension(a, 7, 2));
    }

    #[test]
    fn budget_is_enforced() {
        let f = Field::prime(1_000_003).unwrap();
        let e = CurveModel::short_w(f.one(), f.one()).unwrap();
        assert!(matches!(count_points(&e), Err(CurveError::Budget(_))));
    }
}
