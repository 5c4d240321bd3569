use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::CurveError;
use crate::field::{same_field, Field, FieldElement};

/// An elliptic curve (or genus-1 quartic) over a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveModel {
    /// `y^2 = x^3 + a x + b`
    ShortW { a: FieldElement, b: FieldElement },
    /// `y^2 = c (x - e1)(x - e2)(x - e3)`
    FactoredCubic {
        c: FieldElement,
        e1: FieldElement,
        e2: FieldElement,
        e3: FieldElement,
    },
    /// `y^2 = x (x - 1)(x - lambda)`
    Legendre { lambda: FieldElement },
    /// `w^2 = a4 y^4 + a3 y^3 + a2 y^2 + a1 y + a0`, coefficients stored low
    /// degree first.
    QuarticGenus1 { coeffs: [FieldElement; 5] },
}

/// A point on a [`CurveModel`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine { x: FieldElement, y: FieldElement },
    /// One of the two points at infinity of a quartic model with square
    /// leading coefficient (`w / y^2 -> +sqrt(a4)` or `-sqrt(a4)`).
    QuarticInfinity { positive: bool },
}

impl Point {
    pub fn affine(x: FieldElement, y: FieldElement) -> Point {
        Point::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&FieldElement> {
        match self {
            Point::Affine { x, .. } => Some(x),
            _ => None,
        }
    }

    pub fn y(&self) -> Option<&FieldElement> {
        match self {
            Point::Affine { y, .. } => Some(y),
            _ => None,
        }
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Infinity first, then affine points by `(x, y)`.
impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(p: &Point) -> u8 {
            match p {
                Point::Infinity => 0,
                Point::QuarticInfinity { positive: false } => 1,
                Point::QuarticInfinity { positive: true } => 2,
                Point::Affine { .. } => 3,
            }
        }
        match (self, other) {
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => {
                x1.cmp(x2).then_with(|| y1.cmp(y2))
            }
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "({x}, {y})"),
            Point::QuarticInfinity { positive } => write!(f, "{}inf", if *positive { "+" } else { "-" }),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Point::Infinity => serializer.serialize_str("infinity"),
            Point::QuarticInfinity { positive } => {
                serializer.serialize_str(if *positive { "+infinity" } else { "-infinity" })
            }
            Point::Affine { x, y } => (x, y).serialize(serializer),
        }
    }
}

/// Coefficients `(lc, a2, a4, a6)` of `y^2 = lc x^3 + a2 x^2 + a4 x + a6`.
#[derive(Debug, Clone)]
pub struct CubicForm {
    pub lc: FieldElement,
    pub a2: FieldElement,
    pub a4: FieldElement,
    pub a6: FieldElement,
}

impl CubicForm {
    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let t = &(&(&self.lc * x) + &self.a2) * x;
        &(&(&t + &self.a4) * x) + &self.a6
    }
}

/// Affine change of coordinates `(x, y) -> (alpha x + beta, gamma y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMap {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub gamma: FieldElement,
}

impl ModelMap {
    pub fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Affine { x, y } => Point::affine(&(&self.alpha * x) + &self.beta, &self.gamma * y),
            other => other.clone(),
        }
    }

    pub fn inverse(&self) -> ModelMap {
        let ai = self.alpha.inv().expect("invertible map");
        ModelMap {
            beta: -&(&self.beta * &ai),
            alpha: ai,
            gamma: self.gamma.inv().expect("invertible map"),
        }
    }
}

fn check_same(field: &Arc<Field>, elems: &[&FieldElement]) -> Result<(), CurveError> {
    for e in elems {
        if !same_field(field, e.field()) {
            return Err(CurveError::FieldMismatch);
        }
    }
    Ok(())
}

impl CurveModel {
    pub fn short_w(a: FieldElement, b: FieldElement) -> Result<Self, CurveError> {
        check_same(a.field(), &[&b])?;
        let c = CurveModel::ShortW { a, b };
        c.validate()?;
        Ok(c)
    }

    pub fn factored_cubic(
        c: FieldElement,
        e1: FieldElement,
        e2: FieldElement,
        e3: FieldElement,
    ) -> Result<Self, CurveError> {
        check_same(c.field(), &[&e1, &e2, &e3])?;
        let m = CurveModel::FactoredCubic { c, e1, e2, e3 };
        m.validate()?;
        Ok(m)
    }

    pub fn legendre(lambda: FieldElement) -> Result<Self, CurveError> {
        let m = CurveModel::Legendre { lambda };
        m.validate()?;
        Ok(m)
    }

    /// General quartic `w^2 = a4 y^4 + a3 y^3 + a2 y^2 + a1 y + a0`.
    pub fn quartic(
        a4: FieldElement,
        a3: FieldElement,
        a2: FieldElement,
        a1: FieldElement,
        a0: FieldElement,
    ) -> Result<Self, CurveError> {
        check_same(a4.field(), &[&a3, &a2, &a1, &a0])?;
        let m = CurveModel::QuarticGenus1 {
            coeffs: [a0, a1, a2, a3, a4],
        };
        m.validate()?;
        Ok(m)
    }

    /// Even quartic `w^2 = a4 y^4 + a2 y^2 + a0`.
    pub fn even_quartic(a4: FieldElement, a2: FieldElement, a0: FieldElement) -> Result<Self, CurveError> {
        let z = a4.field().zero();
        Self::quartic(a4, z.clone(), a2, z, a0)
    }

    pub fn field(&self) -> &Arc<Field> {
        match self {
            CurveModel::ShortW { a, .. } => a.field(),
            CurveModel::FactoredCubic { c, .. } => c.field(),
            CurveModel::Legendre { lambda } => lambda.field(),
            CurveModel::QuarticGenus1 { coeffs } => coeffs[0].field(),
        }
    }

    pub fn is_cubic(&self) -> bool {
        !matches!(self, CurveModel::QuarticGenus1 { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CurveModel::ShortW { .. } => "short_weierstrass",
            CurveModel::FactoredCubic { .. } => "factored_cubic",
            CurveModel::Legendre { .. } => "legendre",
            CurveModel::QuarticGenus1 { .. } => "quartic_genus1",
        }
    }

    fn validate(&self) -> Result<(), CurveError> {
        match self {
            CurveModel::ShortW { a, b } => {
                let f = a.field();
                let disc = &(&f.from_u64(4) * &a.pow(3)) + &(&f.from_u64(27) * &b.square());
                if disc.is_zero() {
                    return Err(CurveError::Singular);
                }
            }
            CurveModel::FactoredCubic { c, e1, e2, e3 } => {
                if c.is_zero() || e1 == e2 || e1 == e3 || e2 == e3 {
                    return Err(CurveError::Singular);
                }
            }
            CurveModel::Legendre { lambda } => {
                if lambda.is_zero() || lambda.is_one() {
                    return Err(CurveError::Singular);
                }
            }
            CurveModel::QuarticGenus1 { .. } => {
                let (i, j) = self.quartic_invariants().expect("quartic");
                let f = i.field();
                let disc = &(&f.from_u64(4) * &i.pow(3)) - &j.square();
                if disc.is_zero() {
                    return Err(CurveError::Singular);
                }
            }
        }
        Ok(())
    }

    /// Classical invariants `(I, J)` of the binary quartic.
    pub fn quartic_invariants(&self) -> Option<(FieldElement, FieldElement)> {
        let CurveModel::QuarticGenus1 { coeffs } = self else {
            return None;
        };
        let [e, d, c, b, a] = coeffs;
        let f = a.field();
        let k = |v: i64| f.from_i64(v);
        let i = &(&(&k(12) * &(a * e)) - &(&k(3) * &(b * d))) + &c.square();
        let j = &(&(&(&k(72) * &(&(a * c) * e)) + &(&k(9) * &(&(b * c) * d))) - &(&k(27) * &(&(a * d) * d)))
            - &(&(&k(27) * &(&(e * b) * b)) + &(&k(2) * &c.pow(3)));
        Some((i, j))
    }

    /// Cubic models as `y^2 = lc x^3 + a2 x^2 + a4 x + a6`.
    pub fn cubic_form(&self) -> Result<CubicForm, CurveError> {
        let f = self.field();
        Ok(match self {
            CurveModel::ShortW { a, b } => CubicForm {
                lc: f.one(),
                a2: f.zero(),
                a4: a.clone(),
                a6: b.clone(),
            },
            CurveModel::FactoredCubic { c, e1, e2, e3 } => CubicForm {
                lc: c.clone(),
                a2: -&(c * &(&(e1 + e2) + e3)),
                a4: c * &(&(&(e1 * e2) + &(e1 * e3)) + &(e2 * e3)),
                a6: -&(c * &(&(e1 * e2) * e3)),
            },
            CurveModel::Legendre { lambda } => CubicForm {
                lc: f.one(),
                a2: -&(&f.one() + lambda),
                a4: lambda.clone(),
                a6: f.zero(),
            },
            CurveModel::QuarticGenus1 { .. } => return Err(CurveError::UnsupportedModel("quartic")),
        })
    }

    /// Right-hand side `f(x)` of `y^2 = f(x)` (or `w^2 = f(y)` for quartics).
    pub fn rhs(&self, x: &FieldElement) -> FieldElement {
        match self {
            CurveModel::QuarticGenus1 { coeffs } => coeffs
                .iter()
                .rev()
                .fold(x.field().zero(), |acc, c| &(&acc * x) + c),
            _ => self.cubic_form().expect("cubic").eval(x),
        }
    }

    pub fn is_on_curve(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => self.is_cubic(),
            Point::QuarticInfinity { .. } => match self {
                CurveModel::QuarticGenus1 { coeffs } => !coeffs[4].is_zero() && coeffs[4].is_square(),
                _ => false,
            },
            Point::Affine { x, y } => {
                same_field(self.field(), x.field()) && same_field(self.field(), y.field()) && y.square() == self.rhs(x)
            }
        }
    }

    fn ensure_on(&self, p: &Point) -> Result<(), CurveError> {
        if self.is_on_curve(p) {
            Ok(())
        } else {
            Err(CurveError::NotOnCurve(p.to_string()))
        }
    }

    /// Short Weierstrass model and the coordinate map from `self` to it.
    pub fn to_short_weierstrass(&self) -> Result<(CurveModel, ModelMap), CurveError> {
        let f = self.field();
        if let CurveModel::ShortW { .. } = self {
            return Ok((
                self.clone(),
                ModelMap {
                    alpha: f.one(),
                    beta: f.zero(),
                    gamma: f.one(),
                },
            ));
        }
        let CubicForm { lc, a2, a4, a6 } = self.cubic_form()?;
        // (X, Y) = (lc x, lc y) gives a monic cubic; then shift away the x^2 term
        let third = f.from_u64(3).inv().expect("p > 3");
        let b4 = &lc * &a4;
        let b6 = &lc.square() * &a6;
        let a = &b4 - &(&a2.square() * &third);
        let b = &(&b6 - &(&(&a2 * &b4) * &third)) + &(&(&f.from_u64(2) * &a2.pow(3)) * &f.from_u64(27).inv().unwrap());
        let map = ModelMap {
            alpha: lc.clone(),
            beta: &a2 * &third,
            gamma: lc,
        };
        Ok((CurveModel::short_w(a, b)?, map))
    }

    pub fn j_invariant(&self) -> Result<FieldElement, CurveError> {
        let f = self.field();
        match self {
            CurveModel::ShortW { a, b } => {
                let a3 = &f.from_u64(4) * &a.pow(3);
                let den = &a3 + &(&f.from_u64(27) * &b.square());
                Ok(&(&f.from_u64(1728) * &a3) * &den.inv().map_err(|_| CurveError::Singular)?)
            }
            CurveModel::Legendre { lambda } => legendre_j_formula(lambda),
            CurveModel::FactoredCubic { .. } => self.to_short_weierstrass()?.0.j_invariant(),
            CurveModel::QuarticGenus1 { .. } => {
                let (i, j) = self.quartic_invariants().expect("quartic");
                let i3 = i.pow(3);
                let den = &(&f.from_u64(4) * &i3) - &j.square();
                Ok(&(&f.from_u64(6912) * &i3) * &den.inv().map_err(|_| CurveError::Singular)?)
            }
        }
    }

    /// Same model type over a field containing the current one's prime
    /// subfield coefficients.
    pub fn lift_to(&self, target: &Arc<Field>) -> Result<CurveModel, CurveError> {
        let l = |e: &FieldElement| e.lift_to(target).map_err(|_| CurveError::FieldMismatch);
        Ok(match self {
            CurveModel::ShortW { a, b } => CurveModel::ShortW { a: l(a)?, b: l(b)? },
            CurveModel::FactoredCubic { c, e1, e2, e3 } => CurveModel::FactoredCubic {
                c: l(c)?,
                e1: l(e1)?,
                e2: l(e2)?,
                e3: l(e3)?,
            },
            CurveModel::Legendre { lambda } => CurveModel::Legendre { lambda: l(lambda)? },
            CurveModel::QuarticGenus1 { coeffs } => CurveModel::QuarticGenus1 {
                coeffs: [l(&coeffs[0])?, l(&coeffs[1])?, l(&coeffs[2])?, l(&coeffs[3])?, l(&coeffs[4])?],
            },
        })
    }

    /// Quadratic twist `d y^2 = f(x)`, kept in the same model family where
    /// possible.
    pub fn quadratic_twist(&self, d: &FieldElement) -> Result<CurveModel, CurveError> {
        if d.is_zero() {
            return Err(CurveError::ZeroTwist);
        }
        check_same(self.field(), &[d])?;
        let f = self.field();
        match self {
            CurveModel::ShortW { a, b } => CurveModel::short_w(&d.square() * a, &d.pow(3) * b),
            CurveModel::FactoredCubic { c, e1, e2, e3 } => {
                CurveModel::factored_cubic(d * c, e1.clone(), e2.clone(), e3.clone())
            }
            CurveModel::Legendre { lambda } => CurveModel::factored_cubic(d.clone(), f.zero(), f.one(), lambda.clone()),
            CurveModel::QuarticGenus1 { coeffs } => Ok(CurveModel::QuarticGenus1 {
                coeffs: coeffs.clone().map(|c| d * &c),
            }),
        }
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Affine { x, y } => Point::affine(x.clone(), -y),
            other => other.clone(),
        }
    }

    /// Chord-tangent addition on cubic models.
    pub fn add(&self, p: &Point, q: &Point) -> Result<Point, CurveError> {
        self.ensure_on(p)?;
        self.ensure_on(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
            _ => panic!("quartic points at infinity have no group law here"),
        };
        let form = self.cubic_form().expect("cubic model");
        let slope = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return Point::Infinity;
            }
            let f = x1.field();
            let num = &(&(&(&f.from_u64(3) * &form.lc) * &x1.square()) + &(&(&f.from_u64(2) * &form.a2) * x1)) + &form.a4;
            &num * &(&f.from_u64(2) * y1).inv().expect("y1 != 0")
        } else {
            &(y2 - y1) * &(x2 - x1).inv().expect("distinct x")
        };
        let lc_inv = form.lc.inv().expect("nonzero leading coefficient");
        let x3 = &(&(&(&slope.square() - &form.a2) * &lc_inv) - x1) - x2;
        let y3 = -&(y1 + &(&slope * &(&x3 - x1)));
        Point::affine(x3, y3)
    }

    pub fn double(&self, p: &Point) -> Result<Point, CurveError> {
        self.add(p, p)
    }

    /// `[m] P` by double-and-add; negative `m` negates.
    pub fn mul(&self, p: &Point, m: i128) -> Result<Point, CurveError> {
        self.ensure_on(p)?;
        let base = if m < 0 { self.neg(p) } else { p.clone() };
        Ok(self.mul_unchecked(&base, m.unsigned_abs()))
    }

    pub(crate) fn mul_unchecked(&self, p: &Point, mut m: u128) -> Point {
        let mut acc = Point::Infinity;
        let mut base = p.clone();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            m >>= 1;
            if m > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        acc
    }

    /// Exact order of `p`, searching up to `bound`.
    pub fn order_of(&self, p: &Point, bound: u64) -> Option<u64> {
        let mut cur = p.clone();
        for k in 1..=bound {
            if cur.is_infinity() {
                return Some(k);
            }
            cur = self.add_unchecked(&cur, p);
        }
        if p.is_infinity() {
            Some(1)
        } else {
            None
        }
    }

    /// Some affine point with the given abscissa, choosing the canonical root.
    pub fn lift_x(&self, x: &FieldElement) -> Option<Point> {
        self.rhs(x).sqrt().map(|y| Point::affine(x.clone(), y))
    }
}

pub(crate) fn legendre_j_formula(lambda: &FieldElement) -> Result<FieldElement, CurveError> {
    let f = lambda.field();
    let l2 = lambda.square();
    let num = &f.from_u64(256) * &(&(&l2 - lambda) + &f.one()).pow(3);
    let den = &l2 * &(lambda - &f.one()).square();
    Ok(&num * &den.inv().map_err(|_| CurveError::Singular)?)
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveModel::ShortW { a, b } => write!(f, "y^2 = x^3 + ({a})x + ({b}) over {}", a.field()),
            CurveModel::FactoredCubic { c, e1, e2, e3 } => {
                write!(f, "y^2 = ({c})(x - ({e1}))(x - ({e2}))(x - ({e3})) over {}", c.field())
            }
            CurveModel::Legendre { lambda } => write!(f, "y^2 = x(x - 1)(x - ({lambda})) over {}", lambda.field()),
            CurveModel::QuarticGenus1 { coeffs } => write!(
                f,
                "w^2 = ({})y^4 + ({})y^3 + ({})y^2 + ({})y + ({}) over {}",
                coeffs[4],
                coeffs[3],
                coeffs[2],
                coeffs[1],
                coeffs[0],
                coeffs[0].field()
            ),
        }
    }
}

impl Serialize for CurveModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = serializer.serialize_map(None)?;
        m.serialize_entry("model", self.kind())?;
        match self {
            CurveModel::ShortW { a, b } => {
                m.serialize_entry("a", a)?;
                m.serialize_entry("b", b)?;
            }
            CurveModel::FactoredCubic { c, e1, e2, e3 } => {
                m.serialize_entry("c", c)?;
                m.serialize_entry("roots", &[e1, e2, e3])?;
            }
            CurveModel::Legendre { lambda } => m.serialize_entry("lambda", lambda)?,
            CurveModel::QuarticGenus1 { coeffs } => m.serialize_entry("coeffs_low_first", coeffs)?,
        }
        m.end()
    }
}
