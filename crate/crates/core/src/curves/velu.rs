use super::torsion::FiniteSubgroup;
use super::{CurveError, CurveModel, Point};
use crate::field::FieldElement;

#[derive(Debug, Clone)]
struct VeluTerm {
    x: FieldElement,
    u: FieldElement,
    v: FieldElement,
}

/// A separable isogeny given by Vélu's formulas for an explicit kernel.
#[derive(Debug, Clone)]
pub struct Isogeny {
    domain: CurveModel,
    codomain: CurveModel,
    kernel: FiniteSubgroup,
    terms: Vec<VeluTerm>,
}

/// Vélu isogeny with kernel `kernel` on a short Weierstrass curve.
///
/// With `g^x_Q = 3 x_Q^2 + a`, `u_Q = 4 y_Q^2`, `v_Q = g^x_Q` for 2-torsion
/// and `2 g^x_Q` otherwise, summed over one representative of each `{Q, -Q}`:
/// the codomain is `y^2 = x^3 + (a - 5v) x + (b - 7w)` with `v = sum v_Q` and
/// `w = sum (u_Q + x_Q v_Q)`.
pub fn velu_isogeny(curve: &CurveModel, kernel: &FiniteSubgroup) -> Result<Isogeny, CurveError> {
    let CurveModel::ShortW { a, b } = curve else {
        return Err(CurveError::UnsupportedModel("Vélu needs a short Weierstrass model"));
    };
    if kernel.parent() != curve {
        // re-validate against this curve
        FiniteSubgroup::new(curve, kernel.points().to_vec())?;
    }
    let f = a.field();
    let mut terms = Vec::new();
    let mut used = Vec::<&Point>::new();
    for q in kernel.points() {
        let Point::Affine { x, y } = q else { continue };
        if used.iter().any(|u| u.x() == Some(x)) {
            continue;
        }
        used.push(q);
        let gx = &(&f.from_u64(3) * &x.square()) + a;
        let v = if y.is_zero() { gx } else { &f.from_u64(2) * &gx };
        let u = &f.from_u64(4) * &y.square();
        terms.push(VeluTerm { x: x.clone(), u, v });
    }
    let v_sum = terms.iter().fold(f.zero(), |acc, t| &acc + &t.v);
    let w_sum = terms.iter().fold(f.zero(), |acc, t| &acc + &(&t.u + &(&t.x * &t.v)));
    let codomain = CurveModel::short_w(a - &(&f.from_u64(5) * &v_sum), b - &(&f.from_u64(7) * &w_sum))?;
    Ok(Isogeny {
        domain: curve.clone(),
        codomain,
        kernel: kernel.clone(),
        terms,
    })
}

impl Isogeny {
    pub fn domain(&self) -> &CurveModel {
        &self.domain
    }

    pub fn codomain(&self) -> &CurveModel {
        &self.codomain
    }

    pub fn kernel(&self) -> &FiniteSubgroup {
        &self.kernel
    }

    pub fn degree(&self) -> usize {
        self.kernel.order()
    }

    pub fn eval(&self, p: &Point) -> Result<Point, CurveError> {
        if !self.domain.is_on_curve(p) {
            return Err(CurveError::NotOnCurve(p.to_string()));
        }
        let Point::Affine { x, y } = p else {
            return Ok(Point::Infinity);
        };
        if self.terms.iter().any(|t| t.x == *x) {
            return Ok(Point::Infinity);
        }
        let mut big_x = x.clone();
        let mut big_y = y.clone();
        let two_y = y + y;
        for t in &self.terms {
            let inv = (x - &t.x).inv()?;
            let inv2 = inv.square();
            let inv3 = &inv2 * &inv;
            big_x = &(&big_x + &(&t.v * &inv)) + &(&t.u * &inv2);
            big_y = &(&big_y - &(&(&t.u * &two_y) * &inv3)) - &(&(&t.v * y) * &inv2);
        }
        Ok(Point::affine(big_x, big_y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::torsion::TorsionField;
    use crate::field::Field;

    #[test]
    fn trivial_kernel_is_identity() {
        let f = Field::prime(13).unwrap();
        let e = CurveModel::short_w(f.from_u64(2), f.from_u64(3)).unwrap();
        let iso = velu_isogeny(&e, &FiniteSubgroup::trivial(&e)).unwrap();
        assert_eq!(iso.codomain(), &e);
        for x in f.elements() {
            if let Some(p) = e.lift_x(&x) {
                assert_eq!(iso.eval(&p).unwrap(), p);
            }
        }
    }

    #[test]
    fn two_isogeny_of_j1728_curve() {
        let f = Field::prime(13).unwrap();
        let e = CurveModel::short_w(f.one(), f.zero()).unwrap();
        let k = FiniteSubgroup::new(&e, vec![Point::Infinity, Point::affine(f.zero(), f.zero())]).unwrap();
        let phi = velu_isogeny(&e, &k).unwrap();
        assert_eq!(phi.codomain().j_invariant().unwrap(), f.from_u64(1728));
    }

    #[test]
    fn kernel_maps_to_identity_and_images_lie_on_codomain() {
        let f = Field::prime(13).unwrap();
        let e = CurveModel::short_w(f.from_u64(2), f.from_u64(3)).unwrap();
        let tf = TorsionField::new(&e, 1).unwrap();
        let pts = tf.sylow(2).unwrap();
        for k in 1..pts.len() {
            let Ok(sub) = FiniteSubgroup::new(&e, vec![Point::Infinity, pts[k].clone()]) else { continue };
            let phi = velu_isogeny(&e, &sub).unwrap();
            assert_eq!(phi.eval(&pts[k]).unwrap(), Point::Infinity);
            for x in f.elements() {
                if let Some(p) = e.lift_x(&x) {
                    assert!(phi.codomain().is_on_curve(&phi.eval(&p).unwrap()));
                }
            }
        }
    }
}
