use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::count::{count_points, trace_over_extension};
use super::{CurveError, CurveModel, Point};
use crate::field::{Field, FieldError, SUPPORTED_DEGREES};

/// Upper bound on the size of a Sylow subgroup we are willing to enumerate.
pub const SYLOW_BUDGET: u128 = 1 << 16;

const SAMPLE_ATTEMPTS: usize = 20_000;

/// A curve defined over `F_p`, viewed over `F_{p^k}`, with the exact group
/// order `#E(F_{p^k})` obtained from the trace recurrence.
#[derive(Debug, Clone)]
pub struct TorsionField {
    base: CurveModel,
    curve: CurveModel,
    field: Arc<Field>,
    degree: u32,
    group_order: u128,
}

fn prime_power_split(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut l = 2;
    while m > 1 {
        if m % l == 0 {
            let mut e = 0;
            while m % l == 0 {
                m /= l;
                e += 1;
            }
            out.push((l, e));
        }
        l += 1;
    }
    out
}

impl TorsionField {
    pub fn new(base: &CurveModel, degree: u32) -> Result<Self, CurveError> {
        if !base.is_cubic() {
            return Err(CurveError::UnsupportedModel("quartic"));
        }
        if base.field().degree() != 1 {
            return Err(CurveError::FieldMismatch);
        }
        let p = base.field().characteristic();
        let field = match Field::extension(p, degree) {
            Ok(f) => f,
            Err(FieldError::TooLarge(..)) => {
                return Err(CurveError::Budget(format!("F_{p}^{degree} is too large")))
            }
            Err(e) => return Err(e.into()),
        };
        let a = count_points(base)?.trace;
        let q = field.order();
        let group_order = (q as i128 + 1 - trace_over_extension(a, p, degree)) as u128;
        Ok(TorsionField {
            curve: base.lift_to(&field)?,
            base: base.clone(),
            field,
            degree,
            group_order,
        })
    }

    pub fn base(&self) -> &CurveModel {
        &self.base
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn group_order(&self) -> u128 {
        self.group_order
    }

    /// Necessary condition for `E[m]` to be rational: `m | q - 1` (Weil
    /// pairing) and `m^2 | #E`.
    pub fn may_contain_full_torsion(&self, m: u64) -> bool {
        let m = m as u128;
        (self.field.order() - 1) % m == 0 && self.group_order % (m * m) == 0
    }

    /// The `l`-Sylow subgroup of `E(F_q)`, sorted.
    pub fn sylow(&self, l: u64) -> Result<Vec<Point>, CurveError> {
        let l128 = l as u128;
        let mut size = 1u128;
        let mut cofactor = self.group_order;
        while cofactor % l128 == 0 {
            cofactor /= l128;
            size *= l128;
        }
        if size > SYLOW_BUDGET {
            return Err(CurveError::Budget(format!(
                "{l}-Sylow subgroup of order {size} over {} exceeds {SYLOW_BUDGET}",
                self.field
            )));
        }
        let mut group = vec![Point::Infinity];
        let mut seen: HashSet<Point> = group.iter().cloned().collect();
        let seed = self.field.characteristic() ^ ((self.degree as u64) << 40) ^ (l << 48);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = self.field.order();
        let mut attempts = 0;
        while (group.len() as u128) < size {
            attempts += 1;
            if attempts > SAMPLE_ATTEMPTS {
                return Err(CurveError::Budget(format!("could not generate the {l}-Sylow subgroup")));
            }
            let x = self.field.element(rng.gen_range(0..q))?;
            let Some(r) = self.curve.lift_x(&x) else { continue };
            let t = self.curve.mul_unchecked(&r, cofactor);
            extend_group(&self.curve, &mut group, &mut seen, t);
        }
        group.sort();
        Ok(group)
    }

    /// All points of `E(F_q)[m]`, sorted.
    pub fn torsion_points(&self, m: u64) -> Result<Vec<Point>, CurveError> {
        let mut pts = vec![Point::Infinity];
        for (l, e) in prime_power_split(m) {
            let le = (l as u128).pow(e);
            let part: Vec<Point> = self
                .sylow(l)?
                .into_iter()
                .filter(|t| self.curve.mul_unchecked(t, le).is_infinity())
                .collect();
            pts = pts
                .iter()
                .flat_map(|a| part.iter().map(move |b| (a, b)))
                .map(|(a, b)| self.curve.add_unchecked(a, b))
                .collect();
        }
        pts.sort();
        Ok(pts)
    }

    /// `E[m]` if it is entirely rational over this field.
    pub fn full_torsion(&self, m: u64) -> Result<Option<Vec<Point>>, CurveError> {
        if !self.may_contain_full_torsion(m) {
            return Ok(None);
        }
        let pts = self.torsion_points(m)?;
        Ok((pts.len() as u64 == m * m).then_some(pts))
    }

    /// All subgroups of `E[d]` of order `d`; requires `E[d]` to be rational.
    pub fn subgroups_of_order(&self, d: u64) -> Result<Vec<FiniteSubgroup>, CurveError> {
        if d > 12 {
            return Err(CurveError::Budget(format!("subgroup order {d} exceeds 12")));
        }
        let pts = self.full_torsion(d)?.ok_or_else(|| {
            CurveError::Budget(format!("E[{d}] is not rational over {}", self.field))
        })?;
        subgroups_of_order(&self.curve, &pts, d)
    }
}

/// Adds `g` to the subgroup `group`, closing under the group law.
fn extend_group(curve: &CurveModel, group: &mut Vec<Point>, seen: &mut HashSet<Point>, g: Point) {
    if seen.contains(&g) {
        return;
    }
    let mut multiples = Vec::new();
    let mut cur = g.clone();
    while !seen.contains(&cur) {
        multiples.push(cur.clone());
        cur = curve.add_unchecked(&cur, &g);
    }
    let base = group.clone();
    for m in &multiples {
        for h in &base {
            let s = curve.add_unchecked(h, m);
            seen.insert(s.clone());
            group.push(s);
        }
    }
}

/// Point at `(a, b)` in the basis `(P, Q)`.
pub(crate) fn combine(curve: &CurveModel, p: &Point, q: &Point, a: u64, b: u64) -> Point {
    let ap = curve.mul_unchecked(p, a as u128);
    let bq = curve.mul_unchecked(q, b as u128);
    curve.add_unchecked(&ap, &bq)
}

/// Lexicographically smallest basis of a full `E[m]` given as a point list:
/// `P` is the smallest point of exact order `m`, `Q` the smallest point with
/// `<P, Q> = E[m]`.
pub fn smallest_basis(curve: &CurveModel, torsion: &[Point], m: u64) -> Option<(Point, Point)> {
    let mut sorted = torsion.to_vec();
    sorted.sort();
    let p = sorted
        .iter()
        .find(|t| curve.order_of(t, m) == Some(m))?
        .clone();
    let q = sorted.iter().find(|t| {
        let span: HashSet<Point> = (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .map(|(a, b)| combine(curve, &p, t, a, b))
            .collect();
        span.len() as u64 == m * m
    })?;
    Some((p, q.clone()))
}

/// Canonical basis of `E[n]` over the smallest extension `F_{p^k}`, `k <= 6`.
#[derive(Debug, Clone)]
pub struct TorsionBasisResult {
    pub degree: u32,
    pub field: Arc<Field>,
    pub curve: CurveModel,
    pub p: Point,
    pub q: Point,
}

/// Finds the minimal extension degree carrying all of `E[n]` and the
/// lexicographically smallest basis there. The basis is checked to pair to a
/// primitive `n`-th root of unity.
pub fn torsion_basis(base: &CurveModel, n: u64) -> Result<TorsionBasisResult, CurveError> {
    if ![2, 3, 5, 7].contains(&n) {
        return Err(CurveError::UnsupportedLevel(n));
    }
    if base.field().characteristic() == n {
        return Err(CurveError::UnsupportedLevel(n));
    }
    for k in SUPPORTED_DEGREES {
        let tf = match TorsionField::new(base, k) {
            Ok(tf) => tf,
            Err(CurveError::Budget(_)) => break,
            Err(e) => return Err(e),
        };
        if let Some(pts) = tf.full_torsion(n)? {
            let (p, q) = smallest_basis(tf.curve(), &pts, n).expect("full torsion has a basis");
            let zeta = crate::pairing::weil_pairing(tf.curve(), n, &p, &q)
                .map_err(|e| CurveError::Budget(format!("pairing failed: {e}")))?;
            if !crate::pairing::is_primitive_root(&zeta, n) {
                return Err(CurveError::Budget("torsion basis pairs degenerately".into()));
            }
            return Ok(TorsionBasisResult {
                degree: k,
                field: tf.field().clone(),
                curve: tf.curve().clone(),
                p,
                q,
            });
        }
    }
    Err(CurveError::Budget(format!(
        "no extension of degree <= 6 carries the full {n}-torsion of {base}"
    )))
}

/// An explicit finite subgroup of the points of a curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteSubgroup {
    #[serde(skip)]
    parent: CurveModel,
    points: Vec<Point>,
}

impl FiniteSubgroup {
    /// Validates membership, identity, and closure under addition.
    pub fn new(parent: &CurveModel, mut points: Vec<Point>) -> Result<Self, CurveError> {
        points.sort();
        points.dedup();
        if points.first() != Some(&Point::Infinity) {
            return Err(CurveError::NotASubgroup("missing the identity".into()));
        }
        let set: HashSet<&Point> = points.iter().collect();
        for a in &points {
            if !parent.is_on_curve(a) {
                return Err(CurveError::NotOnCurve(a.to_string()));
            }
            if !set.contains(&parent.neg(a)) {
                return Err(CurveError::NotASubgroup("not closed under negation".into()));
            }
            for b in &points {
                if !set.contains(&parent.add_unchecked(a, b)) {
                    return Err(CurveError::NotASubgroup("not closed under addition".into()));
                }
            }
        }
        Ok(FiniteSubgroup {
            parent: parent.clone(),
            points,
        })
    }

    pub(crate) fn trusted(parent: &CurveModel, mut points: Vec<Point>) -> Self {
        points.sort();
        FiniteSubgroup {
            parent: parent.clone(),
            points,
        }
    }

    pub fn trivial(parent: &CurveModel) -> Self {
        Self::trusted(parent, vec![Point::Infinity])
    }

    pub fn parent(&self) -> &CurveModel {
        &self.parent
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }
}

/// Subgroups of `(Z/d)^2` of order `d`, as sorted coordinate lists.
pub fn abstract_subgroups_of_order(d: u64) -> Vec<Vec<(u64, u64)>> {
    let elems: Vec<(u64, u64)> = (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).collect();
    let mut found: BTreeSet<Vec<(u64, u64)>> = BTreeSet::new();
    for (i, u) in elems.iter().enumerate() {
        for v in &elems[i..] {
            let mut span: Vec<(u64, u64)> = (0..d)
                .flat_map(|a| (0..d).map(move |b| (a, b)))
                .map(|(a, b)| ((a * u.0 + b * v.0) % d, (a * u.1 + b * v.1) % d))
                .collect();
            span.sort();
            span.dedup();
            if span.len() as u64 == d {
                found.insert(span);
            }
        }
    }
    found.into_iter().collect()
}

/// All subgroups of order `d` inside the full torsion group `torsion = E[d]`,
/// sorted by their (sorted) point lists.
pub fn subgroups_of_order(curve: &CurveModel, torsion: &[Point], d: u64) -> Result<Vec<FiniteSubgroup>, CurveError> {
    if d == 1 {
        return Ok(vec![FiniteSubgroup::trivial(curve)]);
    }
    if torsion.len() as u64 != d * d {
        return Err(CurveError::Budget(format!("E[{d}] is not fully available")));
    }
    let (p, q) = smallest_basis(curve, torsion, d).ok_or_else(|| CurveError::Budget(format!("no basis for E[{d}]")))?;
    let mut out: Vec<FiniteSubgroup> = abstract_subgroups_of_order(d)
        .into_iter()
        .map(|coords| {
            let pts = coords.iter().map(|&(a, b)| combine(curve, &p, &q, a, b)).collect();
            FiniteSubgroup::trusted(curve, pts)
        })
        .collect();
    out.sort_by(|a, b| a.points.cmp(&b.points));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_two_torsion_is_rational() {
        let f = Field::prime(7).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let tb = torsion_basis(&e, 2).unwrap();
        assert_eq!(tb.degree, 1);
        assert_eq!(tb.p, Point::affine(f.zero(), f.zero()));
        assert_eq!(tb.q, Point::affine(f.one(), f.zero()));
    }

    #[test]
    fn factored_cubic_two_torsion_is_rational() {
        let f = Field::prime(11).unwrap();
        let e = CurveModel::factored_cubic(f.from_u64(2), f.from_u64(1), f.from_u64(4), f.from_u64(9)).unwrap();
        assert_eq!(torsion_basis(&e, 2).unwrap().degree, 1);
    }

    #[test]
    fn abstract_subgroup_counts() {
        let counts: Vec<usize> = [2, 3, 4, 5, 6, 10, 12]
            .iter()
            .map(|&d| abstract_subgroups_of_order(d).len())
            .collect();
        assert_eq!(counts, vec![3, 4, 7, 6, 12, 18, 28]);
    }

    #[test]
    fn rejects_non_subgroups() {
        let f = Field::prime(7).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let p = Point::affine(f.zero(), f.zero());
        let q = Point::affine(f.one(), f.zero());
        assert!(FiniteSubgroup::new(&e, vec![Point::Infinity, p.clone()]).is_ok());
        assert!(FiniteSubgroup::new(&e, vec![Point::Infinity, p, q]).is_err());
    }

    #[test]
    fn unsupported_levels() {
        let f = Field::prime(7).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        assert!(matches!(torsion_basis(&e, 4), Err(CurveError::UnsupportedLevel(4))));
        assert!(matches!(torsion_basis(&e, 7), Err(CurveError::UnsupportedLevel(7))));
    }
}
