use serde::Serialize;

use super::{CurveError, CurveModel, Point};
use crate::field::FieldElement;

/// The isomorphism `(x, y) -> (u^2 x, u^3 y)` from `y^2 = x^3 + a x + b` onto
/// `y^2 = x^3 + u^4 a x + u^6 b`. In characteristic > 3 the translation part
/// `r` of a general Weierstrass change of variables is always zero between
/// short models, so only `u` is stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct WeierstrassIso {
    pub u: FieldElement,
}

impl WeierstrassIso {
    pub fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Affine { x, y } => {
                let u2 = self.u.square();
                Point::affine(&u2 * x, &(&u2 * &self.u) * y)
            }
            other => other.clone(),
        }
    }
}

/// All isomorphisms over the base field between the short Weierstrass forms
/// of `e` and `target`, sorted by `u`. For `e == target` this is `Aut(E)`.
pub fn isomorphisms(e: &CurveModel, target: &CurveModel) -> Result<Vec<WeierstrassIso>, CurveError> {
    let (e, _) = e.to_short_weierstrass()?;
    let (t, _) = target.to_short_weierstrass()?;
    let (CurveModel::ShortW { a, b }, CurveModel::ShortW { a: a2, b: b2 }) = (&e, &t) else {
        unreachable!("converted to short form");
    };
    if e.field() != t.field() && !crate::field::same_field(e.field(), t.field()) {
        return Err(CurveError::FieldMismatch);
    }
    if e.j_invariant()? != t.j_invariant()? {
        return Ok(Vec::new());
    }
    let candidates: Vec<FieldElement> = if a.is_zero() {
        b2.try_div(b)?.all_roots(6)
    } else if b.is_zero() {
        a2.try_div(a)?.all_roots(4)
    } else {
        // u^2 = (b'/b) / (a'/a)
        let u2 = b2.try_div(b)?.try_div(&a2.try_div(a)?)?;
        u2.all_roots(2)
    };
    let mut out: Vec<WeierstrassIso> = candidates
        .into_iter()
        .filter(|u| {
            let u2 = u.square();
            &(&u2.square() * a) == a2 && &(&u2.pow(3) * b) == b2
        })
        .map(|u| WeierstrassIso { u })
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn generic_curve_has_only_plus_minus_one() {
        let f = Field::prime(13).unwrap();
        let e = CurveModel::short_w(f.from_u64(2), f.from_u64(3)).unwrap();
        let auts = isomorphisms(&e, &e).unwrap();
        assert_eq!(auts.iter().map(|i| i.u.clone()).collect::<Vec<_>>(), vec![f.one(), f.from_i64(-1)]);
    }

    #[test]
    fn j1728_over_f13_has_four_automorphisms() {
        let f = Field::prime(13).unwrap();
        let e = CurveModel::short_w(f.one(), f.zero()).unwrap();
        let auts = isomorphisms(&e, &e).unwrap();
        assert_eq!(auts.len(), 4);
        // (x, y) -> (-x, 5y) is among them
        let p = e.lift_x(&f.from_u64(2)).unwrap_or_else(|| e.lift_x(&f.from_u64(3)).unwrap());
        let (x, y) = (p.x().unwrap().clone(), p.y().unwrap().clone());
        let image = Point::affine(-&x, &f.from_u64(5) * &y);
        assert!(auts.iter().any(|i| i.apply(&p) == image));
    }

    #[test]
    fn j0_automorphism_group_has_order_six_when_mu6_is_rational() {
        let f = Field::prime(13).unwrap();
        let e = CurveModel::short_w(f.zero(), f.from_u64(5)).unwrap();
        assert_eq!(isomorphisms(&e, &e).unwrap().len(), 6);
    }

    #[test]
    fn non_square_twist_is_not_isomorphic() {
        let f = Field::prime(11).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        assert_eq!(e.j_invariant().unwrap(), f.from_u64(2));
        let twist = e.quadratic_twist(&f.from_u64(2)).unwrap();
        assert!(isomorphisms(&e, &twist).unwrap().is_empty());
        let square = e.quadratic_twist(&f.from_u64(4)).unwrap();
        assert_eq!(isomorphisms(&e, &square).unwrap().len(), 2);
    }
}
