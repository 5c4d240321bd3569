//! Weil pairing via Miller's algorithm, torsion bases with a recorded root of
//! unity, and anti-isometries stored as 2x2 matrices mod n.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::curves::{combine, CurveError, CurveModel, Point, TorsionBasisResult};
use crate::field::FieldElement;

const OFFSET_SCAN_LIMIT: u128 = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairingError {
    #[error("point {0} is not {1}-torsion")]
    NotTorsion(String, u64),
    #[error("no non-degenerate offset point found")]
    Degenerate,
    #[error("level {0} is not supported")]
    UnsupportedLevel(u64),
    #[error("levels differ: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("points do not form a basis: e_n(P, Q) = {0} is not primitive")]
    NotABasis(String),
    #[error("roots of unity are incompatible")]
    IncompatibleRoots,
    #[error("point {0} is not in the span of the basis")]
    NotInSpan(String),
    #[error("matrix {0} has determinant {1}, not -1")]
    NotAntiIsometry(String, u64),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Evaluates `f_{n,P}` (divisor `n(P) - n(O)`) at the affine point `at`.
/// Returns `None` when a zero or pole of an intermediate line is hit.
fn miller(curve: &CurveModel, p: &Point, n: u64, at: &Point) -> Option<FieldElement> {
    let form = curve.cubic_form().ok()?;
    let (xa, ya) = (at.x()?, at.y()?);
    let f = xa.field();
    let (mut num, mut den) = (f.one(), f.one());
    let mut t = p.clone();

    let step = |t: &Point, r: &Point| -> (FieldElement, FieldElement, Point) {
        let (Point::Affine { x: xt, y: yt }, Point::Affine { x: xr, y: yr }) = (t, r) else {
            let sum = if t.is_infinity() { r.clone() } else { t.clone() };
            return (f.one(), f.one(), sum);
        };
        if xt == xr && (yt != yr || yt.is_zero()) {
            return (xa - xt, f.one(), Point::Infinity);
        }
        let lambda = if xt == xr {
            let three = f.from_u64(3);
            let two = f.from_u64(2);
            let slope_num = &(&(&(&three * &form.lc) * &xt.square()) + &(&(&two * &form.a2) * xt)) + &form.a4;
            slope_num.try_div(&(&two * yt)).expect("nonzero y")
        } else {
            (yr - yt).try_div(&(xr - xt)).expect("distinct x")
        };
        let sum = curve.add_unchecked(t, r);
        let line = &(ya - yt) - &(&lambda * &(xa - xt));
        let vert = match sum.x() {
            Some(xs) => xa - xs,
            None => f.one(),
        };
        (line, vert, sum)
    };

    let bits = 64 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        let (l, v, t2) = step(&t, &t);
        num = &num.square() * &l;
        den = &den.square() * &v;
        t = t2;
        if (n >> i) & 1 == 1 {
            let (l, v, t2) = step(&t, p);
            num = &num * &l;
            den = &den * &v;
            t = t2;
        }
    }
    if num.is_zero() || den.is_zero() {
        return None;
    }
    num.try_div(&den).ok()
}

/// `e_n(P, Q) = [f_P(Q+S)/f_P(S)] / [f_Q(P-S)/f_Q(-S)]`, with the offset `S`
/// taken as the first usable point in a scan of x-coordinates by index.
pub fn weil_pairing(curve: &CurveModel, n: u64, p: &Point, q: &Point) -> Result<FieldElement, PairingError> {
    for r in [p, q] {
        if !curve.is_on_curve(r) {
            return Err(CurveError::NotOnCurve(r.to_string()).into());
        }
        if !curve.mul_unchecked(r, n as u128).is_infinity() {
            return Err(PairingError::NotTorsion(r.to_string(), n));
        }
    }
    let field = curve.field();
    if p.is_infinity() || q.is_infinity() || p == q {
        return Ok(field.one());
    }
    let limit = field.order().min(OFFSET_SCAN_LIMIT);
    for idx in 0..limit {
        let Some(s0) = curve.lift_x(&field.element(idx).map_err(CurveError::from)?) else { continue };
        for s in [s0.clone(), curve.neg(&s0)] {
            let neg_s = curve.neg(&s);
            let q_s = curve.add_unchecked(q, &s);
            let p_ms = curve.add_unchecked(p, &neg_s);
            let vals = (
                miller(curve, p, n, &q_s),
                miller(curve, p, n, &s),
                miller(curve, q, n, &p_ms),
                miller(curve, q, n, &neg_s),
            );
            if let (Some(a), Some(b), Some(c), Some(d)) = vals {
                let e = (&a * &d).try_div(&(&b * &c)).map_err(CurveError::from)?;
                return Ok(e);
            }
        }
    }
    offset_free_pairing(curve, n, p, q)
}

/// `(-1)^n f_P(Q) / f_Q(P)`. Used when every rational offset point is
/// degenerate, which happens when `E(F_q)` is barely larger than `E[n]`. The
/// line and vertical factors in the Miller loop have the same shape for `P`
/// and `Q` (it depends only on the bits of `n`), so normalization constants
/// at infinity cancel in the ratio.
fn offset_free_pairing(curve: &CurveModel, n: u64, p: &Point, q: &Point) -> Result<FieldElement, PairingError> {
    let field = curve.field();
    let mut multiple = p.clone();
    for _ in 1..n {
        if &multiple == q {
            return Ok(field.one());
        }
        multiple = curve.add_unchecked(&multiple, p);
    }
    match (miller(curve, p, n, q), miller(curve, q, n, p)) {
        (Some(a), Some(b)) => {
            let e = a.try_div(&b).map_err(CurveError::from)?;
            Ok(if n % 2 == 1 { -&e } else { e })
        }
        _ => Err(PairingError::Degenerate),
    }
}

/// `z^n = 1` and `z^m != 1` for `0 < m < n`.
pub fn is_primitive_root(z: &FieldElement, n: u64) -> bool {
    z.pow(n as u128).is_one() && (1..n).all(|m| !z.pow(m as u128).is_one())
}

fn check_level(n: u64) -> Result<(), PairingError> {
    if [2, 3, 5, 7].contains(&n) {
        Ok(())
    } else {
        Err(PairingError::UnsupportedLevel(n))
    }
}

/// A basis `(P, Q)` of `E[n]` together with `zeta = e_n(P, Q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionBasis {
    pub curve: CurveModel,
    pub n: u64,
    pub p: Point,
    pub q: Point,
    pub zeta: FieldElement,
}

impl TorsionBasis {
    pub fn new(curve: &CurveModel, n: u64, p: Point, q: Point) -> Result<Self, PairingError> {
        check_level(n)?;
        let zeta = weil_pairing(curve, n, &p, &q)?;
        if !is_primitive_root(&zeta, n) {
            return Err(PairingError::NotABasis(zeta.to_string()));
        }
        Ok(TorsionBasis {
            curve: curve.clone(),
            n,
            p,
            q,
            zeta,
        })
    }

    pub fn from_result(r: &TorsionBasisResult, n: u64) -> Result<Self, PairingError> {
        Self::new(&r.curve, n, r.p.clone(), r.q.clone())
    }

    /// `[a]P + [b]Q`.
    pub fn point(&self, a: u64, b: u64) -> Point {
        combine(&self.curve, &self.p, &self.q, a % self.n, b % self.n)
    }

    /// Discrete log `(a, b)` with `R = [a]P + [b]Q`, by exhaustive search.
    pub fn coordinates(&self, r: &Point) -> Result<(u64, u64), PairingError> {
        let n = self.n;
        for a in 0..n {
            let ap = self.curve.mul_unchecked(&self.p, a as u128);
            let mut cur = ap;
            for b in 0..n {
                if &cur == r {
                    return Ok((a, b));
                }
                cur = self.curve.add_unchecked(&cur, &self.q);
            }
        }
        Err(PairingError::NotInSpan(r.to_string()))
    }

    /// The same basis with `Q` replaced by `[u]Q`.
    fn rescaled(&self, u: u64) -> Self {
        let q = self.curve.mul_unchecked(&self.q, u as u128);
        TorsionBasis {
            curve: self.curve.clone(),
            n: self.n,
            p: self.p.clone(),
            zeta: self.zeta.pow(u as u128),
            q,
        }
    }
}

/// Returns `b2` with `Q'` replaced by `[u]Q'` so that its root equals `b.zeta`.
pub fn normalize_bases(b: &TorsionBasis, b2: &TorsionBasis) -> Result<TorsionBasis, PairingError> {
    if b.n != b2.n {
        return Err(PairingError::LevelMismatch(b.n, b2.n));
    }
    for u in 1..b.n {
        if b2.zeta.pow(u as u128) == b.zeta {
            return Ok(b2.rescaled(u));
        }
    }
    Err(PairingError::IncompatibleRoots)
}

/// A 2x2 matrix over `Z/n`, entries `[[a, b], [c, d]]`. Acting on column
/// vectors of coordinates, so the columns are the images of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelMatrix {
    pub n: u64,
    pub m: [[u64; 2]; 2],
}

impl LevelMatrix {
    pub fn new(n: u64, a: i64, b: i64, c: i64, d: i64) -> Self {
        let r = |v: i64| v.rem_euclid(n as i64) as u64;
        LevelMatrix {
            n,
            m: [[r(a), r(b)], [r(c), r(d)]],
        }
    }

    pub fn identity(n: u64) -> Self {
        Self::new(n, 1, 0, 0, 1)
    }

    /// The reference anti-isometry `[[0, 1], [1, 0]]`.
    pub fn swap(n: u64) -> Self {
        Self::new(n, 0, 1, 1, 0)
    }

    pub fn det(&self) -> u64 {
        let n = self.n;
        let [[a, b], [c, d]] = self.m;
        (a * d % n + n - b * c % n) % n
    }

    pub fn mul(&self, other: &LevelMatrix) -> LevelMatrix {
        assert_eq!(self.n, other.n, "level mismatch");
        let n = self.n;
        let (x, y) = (self.m, other.m);
        let e = |i: usize, j: usize| (x[i][0] * y[0][j] + x[i][1] * y[1][j]) % n;
        LevelMatrix {
            n,
            m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn scale(&self, k: u64) -> LevelMatrix {
        let n = self.n;
        let s = |v: u64| v * (k % n) % n;
        LevelMatrix {
            n,
            m: [[s(self.m[0][0]), s(self.m[0][1])], [s(self.m[1][0]), s(self.m[1][1])]],
        }
    }

    pub fn neg(&self) -> LevelMatrix {
        self.scale(self.n - 1)
    }

    pub fn inverse(&self) -> Option<LevelMatrix> {
        let n = self.n;
        let det_inv = (1..n).find(|&u| u * self.det() % n == 1 % n).or((n == 1).then_some(0))?;
        let [[a, b], [c, d]] = self.m;
        Some(LevelMatrix::new(n, d as i64, -(b as i64), -(c as i64), a as i64).scale(det_inv))
    }

    pub fn apply(&self, a: u64, b: u64) -> (u64, u64) {
        let n = self.n;
        let [[m00, m01], [m10, m11]] = self.m;
        ((m00 * a + m01 * b) % n, (m10 * a + m11 * b) % n)
    }

    /// All `n^4` matrices in lexicographic entry order.
    pub fn all(n: u64) -> impl Iterator<Item = LevelMatrix> {
        (0..n.pow(4)).map(move |i| {
            let e = |k: u32| (i / n.pow(3 - k) % n) as i64;
            LevelMatrix::new(n, e(0), e(1), e(2), e(3))
        })
    }
}

impl fmt::Display for LevelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.m;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.n)
    }
}

impl Serialize for LevelMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LevelMatrix", 2)?;
        st.serialize_field("entries", &self.m)?;
        st.serialize_field("n", &self.n)?;
        st.end()
    }
}

/// `det M = -1 mod n`. With the standard symplectic form,
/// `<Ma, Mb> = det(M) <a, b>`.
pub fn is_anti_isometry(m: &LevelMatrix, n: u64) -> bool {
    m.n == n && m.det() == (n - 1) % n
}

/// Number of matrices mod `n` with determinant `-1`, by exhaustive scan.
pub fn anti_isometry_count(n: u64) -> usize {
    LevelMatrix::all(n).filter(|m| is_anti_isometry(m, n)).count()
}

/// A pairing-reversing isomorphism `E[n] -> E'[n]`, as a matrix relative to
/// bases with identical roots of unity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AntiIsometry {
    pub source: TorsionBasis,
    pub target: TorsionBasis,
    pub matrix: LevelMatrix,
}

impl AntiIsometry {
    /// Normalizes `target` against `source` and checks `det = -1`.
    pub fn new(source: TorsionBasis, target: TorsionBasis, matrix: LevelMatrix) -> Result<Self, PairingError> {
        let target = normalize_bases(&source, &target)?;
        if !is_anti_isometry(&matrix, source.n) {
            return Err(PairingError::NotAntiIsometry(matrix.to_string(), matrix.det()));
        }
        Ok(AntiIsometry {
            source,
            target,
            matrix,
        })
    }

    pub fn n(&self) -> u64 {
        self.source.n
    }

    pub fn with_matrix(&self, matrix: LevelMatrix) -> Result<Self, PairingError> {
        Self::new(self.source.clone(), self.target.clone(), matrix)
    }

    pub fn apply(&self, r: &Point) -> Result<Point, PairingError> {
        let (a, b) = self.source.coordinates(r)?;
        let (a2, b2) = self.matrix.apply(a, b);
        Ok(self.target.point(a2, b2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::torsion_basis;
    use crate::field::Field;

    #[test]
    fn two_torsion_pairing_is_minus_one() {
        let f = Field::prime(11).unwrap();
        let e = CurveModel::factored_cubic(f.from_u64(3), f.from_u64(1), f.from_u64(4), f.from_u64(9)).unwrap();
        let p = Point::affine(f.from_u64(1), f.zero());
        let q = Point::affine(f.from_u64(4), f.zero());
        assert_eq!(weil_pairing(&e, 2, &p, &q).unwrap(), f.from_i64(-1));
        assert!(weil_pairing(&e, 2, &p, &p).unwrap().is_one());
    }

    #[test]
    fn three_torsion_pairing_properties() {
        let f = Field::prime(7).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let tb = torsion_basis(&e, 3).unwrap();
        let b = TorsionBasis::from_result(&tb, 3).unwrap();
        let epq = weil_pairing(&b.curve, 3, &b.p, &b.q).unwrap();
        let eqp = weil_pairing(&b.curve, 3, &b.q, &b.p).unwrap();
        assert!((&epq * &eqp).is_one());
        for a in 0..3 {
            let ap = b.point(a, 0);
            assert_eq!(weil_pairing(&b.curve, 3, &ap, &b.q).unwrap(), epq.pow(a as u128));
        }
    }

    #[test]
    fn offset_free_formula_agrees_with_offset_formula() {
        let f = Field::prime(13).unwrap();
        let e = CurveModel::short_w(f.from_u64(2), f.from_u64(3)).unwrap();
        let mut checked = 0;
        for n in [3u64, 5, 7] {
            let Ok(tb) = torsion_basis(&e, n) else { continue };
            checked += 1;
            let b = TorsionBasis::from_result(&tb, n).unwrap();
            for (a1, b1, a2, b2) in [(1, 0, 0, 1), (1, 2, 2, 1), (0, 1, 1, 1)] {
                let (r, s) = (b.point(a1, b1), b.point(a2, b2));
                assert_eq!(
                    offset_free_pairing(&b.curve, n, &r, &s).unwrap(),
                    weil_pairing(&b.curve, n, &r, &s).unwrap()
                );
            }
        }
        assert!(checked >= 2);
    }

    #[test]
    fn matrix_algebra() {
        let s = LevelMatrix::swap(5);
        assert!(is_anti_isometry(&s, 5));
        assert!(!is_anti_isometry(&LevelMatrix::identity(5), 5));
        assert!(is_anti_isometry(&LevelMatrix::identity(2), 2));
        assert_eq!(s.neg(), LevelMatrix::new(5, 0, 4, 4, 0));
        let m = LevelMatrix::new(7, 2, 3, 1, 4);
        assert_eq!(m.mul(&m.inverse().unwrap()), LevelMatrix::identity(7));
    }

    #[test]
    fn anti_isometry_counts_match_sl2() {
        let counts: Vec<usize> = [2, 3, 5, 7].iter().map(|&n| anti_isometry_count(n)).collect();
        assert_eq!(counts, vec![6, 24, 120, 336]);
    }

    #[test]
    fn normalization_rescales_q() {
        let f = Field::prime(7).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let tb = torsion_basis(&e, 3).unwrap();
        let b = TorsionBasis::from_result(&tb, 3).unwrap();
        let b2 = TorsionBasis::new(&b.curve, 3, b.p.clone(), b.point(0, 2)).unwrap();
        assert_eq!(b2.zeta, b.zeta.square());
        let nb = normalize_bases(&b, &b2).unwrap();
        assert_eq!(nb.zeta, b.zeta);
        assert_eq!(nb.q, b.q);
        assert_eq!(normalize_bases(&b, &b).unwrap(), b);
    }
}
