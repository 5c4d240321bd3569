//! The quartic pencil `x^4 + y^4 + z^4 + t(x^2y^2 + y^2z^2 + z^2x^2) = 0`
//! with its quotient quartic, the bielliptic genus-2 family
//! `y^2 = F(x^2)`, and the identities relating their point counts.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curves::{count_points, legendre_j_formula, prime_character_table, CurveError, CurveModel};
use crate::field::{mul_mod, Field, FieldElement, FieldError};

/// Largest prime accepted by the `O(p^2)` plane quartic count.
pub const QUARTIC_PRIME_BUDGET: u64 = 500;
/// Largest prime accepted by the genus-2 count.
pub const GENUS2_PRIME_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("degenerate parameter: {0}")]
    Degenerate(String),
    #[error("singular reduction: {0}")]
    Singular(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("the field has no square root of -1")]
    NoSqrtMinusOne,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2)`.
pub fn legendre_j(lambda: &FieldElement) -> Result<FieldElement, FamilyError> {
    if lambda.is_zero() || lambda.is_one() {
        return Err(FamilyError::Degenerate(format!("lambda = {lambda}")));
    }
    Ok(legendre_j_formula(lambda)?)
}

fn prime_field_of(t: &FieldElement) -> Result<u64, FamilyError> {
    if t.field().degree() != 1 {
        return Err(FamilyError::Degenerate("parameter must lie in a prime field".into()));
    }
    Ok(t.field().characteristic())
}

// ---- quartic pencil ----

fn family_b_parameter(t: &FieldElement) -> Result<(u64, u64), FamilyError> {
    let p = prime_field_of(t)?;
    let tv = t.as_prime().expect("prime field");
    if [p - 1, 2, p - 2].contains(&tv) {
        return Err(FamilyError::Singular(format!("t = {tv} lies in {{-1, 2, -2}} mod {p}")));
    }
    Ok((p, tv))
}

fn quartic_value(t: u64, x2: u64, y2: u64, z2: u64, p: u64) -> u64 {
    let quart = (mul_mod(x2, x2, p) + mul_mod(y2, y2, p) + mul_mod(z2, z2, p)) % p;
    let mixed = (mul_mod(x2, y2, p) + mul_mod(y2, z2, p) + mul_mod(z2, x2, p)) % p;
    (quart + mul_mod(t, mixed, p)) % p
}

/// Projective `F_p` points where all partial derivatives of the quartic
/// vanish. `d/dx = 4x^3 + 2t x (y^2 + z^2)` and cyclically.
pub fn plane_quartic_singular_points(t: &FieldElement) -> Result<Vec<[u64; 3]>, FamilyError> {
    let p = prime_field_of(t)?;
    let tv = t.as_prime().expect("prime field");
    let grad = |a: u64, b: u64, c: u64| {
        let s = (mul_mod(b, b, p) + mul_mod(c, c, p)) % p;
        (mul_mod(4, mul_mod(a, mul_mod(a, a, p), p), p) + mul_mod(mul_mod(2, tv, p), mul_mod(a, s, p), p)) % p
    };
    let mut out = Vec::new();
    for [x, y, z] in projective_representatives(p) {
        if grad(x, y, z) == 0 && grad(y, z, x) == 0 && grad(z, x, y) == 0 {
            out.push([x, y, z]);
        }
    }
    Ok(out)
}

fn projective_representatives(p: u64) -> impl Iterator<Item = [u64; 3]> {
    let a = (0..p).flat_map(move |y| (0..p).map(move |z| [1, y, z]));
    let b = (0..p).map(|z| [0, 1, z]);
    a.chain(b).chain(std::iter::once([0, 0, 1]))
}

/// `#X_t(F_p)` by scanning `(1:y:z)`, `(0:1:z)`, `(0:0:1)`.
pub fn count_plane_quartic(t: &FieldElement) -> Result<u64, FamilyError> {
    let (p, tv) = family_b_parameter(t)?;
    if p > QUARTIC_PRIME_BUDGET {
        return Err(FamilyError::Budget(format!("p = {p} exceeds {QUARTIC_PRIME_BUDGET}")));
    }
    if !plane_quartic_singular_points(t)?.is_empty() {
        return Err(FamilyError::Singular(format!("quartic at t = {tv} mod {p}")));
    }
    let sq: Vec<u64> = (0..p).map(|v| mul_mod(v, v, p)).collect();
    Ok(projective_representatives(p)
        .filter(|&[x, y, z]| quartic_value(tv, sq[x as usize], sq[y as usize], sq[z as usize], p) == 0)
        .count() as u64)
}

/// `Q_t: w^2 = (t^2 - 4) y^4 + (2t^2 - 4t) y^2 + (t^2 - 4)`, the quotient by
/// `x -> -x`, from eliminating `u = x^2` in
/// `u^2 + t u (y^2 + 1) + (y^4 + t y^2 + 1) = 0`.
pub fn family_b_quotient(t: &FieldElement) -> Result<CurveModel, FamilyError> {
    family_b_parameter(t)?;
    let f = t.field();
    let t2 = t.square();
    let a4 = &t2 - &f.from_u64(4);
    let a2 = &(&f.from_u64(2) * &t2) - &(&f.from_u64(4) * t);
    Ok(CurveModel::even_quartic(a4.clone(), a2, a4)?)
}

/// `E_t: y^2 = x (x - 1) (x + t + 1)`.
pub fn family_b_elliptic(t: &FieldElement) -> Result<CurveModel, FamilyError> {
    family_b_parameter(t)?;
    let f = t.field();
    Ok(CurveModel::factored_cubic(f.one(), f.zero(), f.one(), -&(t + &f.one()))?)
}

/// Counts, traces and identity checks for one `(t, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub family: String,
    pub p: u64,
    pub t: u64,
    pub count_main: u64,
    pub count_q1: u64,
    pub count_q2: u64,
    pub trace_q1: i64,
    pub trace_q2: i64,
    pub j_q1: u64,
    pub j_q2: u64,
    pub j_legendre: u64,
    pub checks: BTreeMap<String, bool>,
    /// Quantities recorded without being asserted.
    pub observed: BTreeMap<String, i64>,
}

impl TraceReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }

    pub fn csv_header() -> [&'static str; 9] {
        [
            "p",
            "t",
            "family",
            "count_main",
            "count_q1",
            "count_q2",
            "trace_q1",
            "trace_q2",
            "checks_passed",
        ]
    }

    pub fn csv_row(&self) -> [String; 9] {
        [
            self.p.to_string(),
            self.t.to_string(),
            self.family.clone(),
            self.count_main.to_string(),
            self.count_q1.to_string(),
            self.count_q2.to_string(),
            self.trace_q1.to_string(),
            self.trace_q2.to_string(),
            self.passed().to_string(),
        ]
    }
}

fn prime_value(e: &FieldElement) -> u64 {
    e.as_prime().expect("prime field")
}

/// Checks `#X_t = p + 1 - 3 a(Q_t)`, `j(Q_t) = j(E_t)`, `|a(Q_t)| = |a(E_t)|`
/// and `j(E_t) = legendre_j(-t - 1)`.
pub fn family_b_check(t: &FieldElement) -> Result<TraceReport, FamilyError> {
    let (p, tv) = family_b_parameter(t)?;
    let count_x = count_plane_quartic(t)?;
    let q = family_b_quotient(t)?;
    let e = family_b_elliptic(t)?;
    let (cq, ce) = (count_points(&q)?, count_points(&e)?);
    let (jq, je) = (q.j_invariant()?, e.j_invariant()?);
    let jl = legendre_j(&-&(t + &t.field().one()))?;
    let mut checks = BTreeMap::new();
    checks.insert("trace_identity".into(), count_x as i64 == p as i64 + 1 - 3 * cq.trace);
    checks.insert("j_quotient_equals_j_elliptic".into(), jq == je);
    checks.insert("abs_trace_equal".into(), cq.trace.abs() == ce.trace.abs());
    checks.insert("j_elliptic_equals_legendre".into(), je == jl);
    let mut observed = BTreeMap::new();
    let sign = if ce.trace == 0 { 0 } else { (cq.trace / ce.trace).signum() };
    observed.insert("twist_sign".into(), sign);
    let t2m4 = &t.square() - &t.field().from_u64(4);
    observed.insert("chi_t2_minus_4".into(), t2m4.legendre() as i64);
    Ok(TraceReport {
        family: "B".into(),
        p,
        t: tv,
        count_main: count_x,
        count_q1: cq.count,
        count_q2: ce.count,
        trace_q1: cq.trace,
        trace_q2: ce.trace,
        j_q1: prime_value(&jq),
        j_q2: prime_value(&je),
        j_legendre: prime_value(&jl),
        checks,
        observed,
    })
}

// ---- bielliptic genus 2 ----

fn family_c_parameter(t: &FieldElement) -> Result<(u64, u64), FamilyError> {
    let p = prime_field_of(t)?;
    let tv = t.as_prime().expect("prime field");
    if [0, 1, p - 1].contains(&tv) {
        return Err(FamilyError::Degenerate(format!("t = {tv} lies in {{0, 1, -1}} mod {p}")));
    }
    Ok((p, tv))
}

fn check_family_c(t: &FieldElement) -> Result<(), FamilyError> {
    let f = t.field();
    if t.is_zero() || t.is_one() || *t == f.from_i64(-1) {
        return Err(FamilyError::Degenerate(format!("t = {t} lies in {{0, 1, -1}}")));
    }
    Ok(())
}

/// `c = -t^3 / (1 + t)^3`.
pub fn family_c_scale(t: &FieldElement) -> Result<FieldElement, FamilyError> {
    check_family_c(t)?;
    let one_t = t + &t.field().one();
    Ok(-&(&t.pow(3) * &one_t.pow(3).inv()?))
}

/// Roots `1, -t, -1/t` of `F`.
fn family_c_roots(t: &FieldElement) -> Result<[FieldElement; 3], FamilyError> {
    let f = t.field();
    Ok([f.one(), -t, -&t.inv()?])
}

/// `F(u) = c (u - 1)(u + t)(u + 1/t)`.
pub fn family_c_f(t: &FieldElement, u: &FieldElement) -> Result<FieldElement, FamilyError> {
    let c = family_c_scale(t)?;
    let [r1, r2, r3] = family_c_roots(t)?;
    Ok(&(&(&c * &(u - &r1)) * &(u - &r2)) * &(u - &r3))
}

/// `E1: v^2 = F(u)` and `E2: w^2 = u F(u)`.
pub fn family_c_curves(t: &FieldElement) -> Result<(CurveModel, CurveModel), FamilyError> {
    let c = family_c_scale(t)?;
    let [r1, r2, r3] = family_c_roots(t)?;
    let e1 = CurveModel::factored_cubic(c.clone(), r1.clone(), r2.clone(), r3.clone())?;
    // c (u - r1)(u - r2)(u - r3) = c (u^3 - s1 u^2 + s2 u - s3)
    let s1 = &(&r1 + &r2) + &r3;
    let s2 = &(&(&r1 * &r2) + &(&r1 * &r3)) + &(&r2 * &r3);
    let s3 = &(&r1 * &r2) * &r3;
    let z = t.field().zero();
    let e2 = CurveModel::quartic(c.clone(), -&(&c * &s1), &c * &s2, -&(&c * &s3), z)?;
    Ok((e1, e2))
}

/// `#C_t(F_p)` on the smooth model of `y^2 = F(x^2)`: affine solutions plus
/// two points at infinity when `c` is a square.
pub fn count_genus2(t: &FieldElement) -> Result<u64, FamilyError> {
    let (p, _) = family_c_parameter(t)?;
    if p > GENUS2_PRIME_BUDGET {
        return Err(FamilyError::Budget(format!("p = {p} exceeds {GENUS2_PRIME_BUDGET}")));
    }
    let c = family_c_scale(t)?;
    let [r1, r2, r3] = family_c_roots(t)?;
    let (cv, r1, r2, r3) = (prime_value(&c), prime_value(&r1), prime_value(&r2), prime_value(&r3));
    let chi = prime_character_table(p);
    let affine: u64 = (0..p)
        .into_par_iter()
        .map(|x| {
            let u = mul_mod(x, x, p);
            let v = mul_mod(
                mul_mod(cv, (u + p - r1) % p, p),
                mul_mod((u + p - r2) % p, (u + p - r3) % p, p),
                p,
            );
            (1 + chi[v as usize] as i64) as u64
        })
        .sum();
    let at_infinity = if c.is_square() { 2 } else { 0 };
    let count = affine + at_infinity;
    let bound = 4.0 * (p as f64).sqrt();
    if ((p + 1) as f64 - count as f64).abs() > bound {
        return Err(FamilyError::Curve(CurveError::HasseViolation {
            q: p,
            trace: (p + 1) as i64 - count as i64,
        }));
    }
    Ok(count)
}

/// Checks `#C_t = p + 1 - a(E1) - a(E2)`, `j(E1) = j(E2) = legendre_j(t)`,
/// and `a(E1) = a(E2)` when `-1` is a square mod `p`.
pub fn family_c_check(t: &FieldElement) -> Result<TraceReport, FamilyError> {
    let (p, tv) = family_c_parameter(t)?;
    let count_c = count_genus2(t)?;
    let (e1, e2) = family_c_curves(t)?;
    let (c1, c2) = (count_points(&e1)?, count_points(&e2)?);
    let (j1, j2) = (e1.j_invariant()?, e2.j_invariant()?);
    let jl = legendre_j(t)?;
    let mut checks = BTreeMap::new();
    checks.insert("bisection_identity".into(), count_c as i64 == p as i64 + 1 - c1.trace - c2.trace);
    checks.insert("j_e1_equals_j_e2".into(), j1 == j2);
    checks.insert("j_e1_equals_legendre".into(), j1 == jl);
    let mut observed = BTreeMap::new();
    if p % 4 == 1 {
        checks.insert("traces_equal_when_i_rational".into(), c1.trace == c2.trace);
    } else {
        let rel = if c1.trace == c2.trace && c1.trace != 0 {
            1
        } else if c1.trace == -c2.trace {
            -1
        } else {
            0
        };
        observed.insert("trace_relation_sign".into(), rel);
    }
    Ok(TraceReport {
        family: "C".into(),
        p,
        t: tv,
        count_main: count_c,
        count_q1: c1.count,
        count_q2: c2.count,
        trace_q1: c1.trace,
        trace_q2: c2.trace,
        j_q1: prime_value(&j1),
        j_q2: prime_value(&j2),
        j_legendre: prime_value(&jl),
        checks,
        observed,
    })
}

/// A skipped `(p, t)` with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub p: u64,
    pub t: u64,
    pub reason: String,
}

/// Runs `check` over every residue `t` mod each prime, ordered by `(p, t)`.
/// Inadmissible parameters are skipped and logged, never counted.
pub fn scan_family(
    primes: &[u64],
    check: fn(&FieldElement) -> Result<TraceReport, FamilyError>,
) -> Result<(Vec<TraceReport>, Vec<Skipped>), FamilyError> {
    let mut pairs = Vec::new();
    for &p in primes {
        let f = Field::prime(p)?;
        pairs.extend((0..p).map(|t| f.from_u64(t)));
    }
    let results: Vec<(u64, u64, Result<TraceReport, FamilyError>)> = pairs
        .par_iter()
        .map(|t| (t.field().characteristic(), prime_value(t), check(t)))
        .collect();
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for (p, t, r) in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e @ (FamilyError::Degenerate(_) | FamilyError::Singular(_))) => skipped.push(Skipped {
                p,
                t,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok((reports, skipped))
}

// ---- Möbius map and the automorphism tau ----

/// Minimal arithmetic shared by `F_p` and `Q` for the Möbius check.
pub trait Scalar: Clone + PartialEq + std::fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self {
        self.zero_like().sub(self)
    }
}

impl Scalar for FieldElement {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.try_div(o).ok()
    }
}

impl Scalar for Rational64 {
    fn zero_like(&self) -> Self {
        Rational64::from_integer(0)
    }
    fn one_like(&self) -> Self {
        Rational64::from_integer(1)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (*o != Rational64::from_integer(0)).then(|| self / o)
    }
}

/// A point of the projective line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum P1<T> {
    Finite(T),
    Infinity,
}

impl<T: std::fmt::Display> std::fmt::Display for P1<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            P1::Finite(v) => write!(f, "{v}"),
            P1::Infinity => write!(f, "inf"),
        }
    }
}

/// `m(x) = -t/(1+t) (x - 1)`.
pub fn mobius<T: Scalar>(t: &T, x: &P1<T>) -> Result<P1<T>, FamilyError> {
    let scale = t.neg().div(&t.add(&t.one_like())).ok_or_else(|| FamilyError::Degenerate("t = -1".into()))?;
    if scale == t.zero_like() {
        return Err(FamilyError::Degenerate("t = 0".into()));
    }
    Ok(match x {
        P1::Finite(v) => P1::Finite(scale.mul(&v.sub(&v.one_like()))),
        P1::Infinity => P1::Infinity,
    })
}

/// `m^{-1}(y) = 1 - (1+t) y / t`.
pub fn mobius_inverse<T: Scalar>(t: &T, y: &P1<T>) -> Result<P1<T>, FamilyError> {
    let one = t.one_like();
    let scale = t.add(&one).div(t).ok_or_else(|| FamilyError::Degenerate("t = 0".into()))?;
    if scale == t.zero_like() {
        return Err(FamilyError::Degenerate("t = -1".into()));
    }
    Ok(match y {
        P1::Finite(v) => P1::Finite(one.sub(&scale.mul(v))),
        P1::Infinity => P1::Infinity,
    })
}

/// Preimages of `t, 1, 0, inf` under `m`.
pub fn mobius_preimages<T: Scalar>(t: &T) -> Result<[P1<T>; 4], FamilyError> {
    let targets = [P1::Finite(t.clone()), P1::Finite(t.one_like()), P1::Finite(t.zero_like()), P1::Infinity];
    let pre = targets.map(|y| mobius_inverse(t, &y));
    let [a, b, c, d] = pre;
    Ok([a?, b?, c?, d?])
}

/// The preimages of `{t, 1, 0, inf}` are `{-t, -1/t, 1, inf}`, and `m` maps
/// them back.
pub fn mobius_branch_check<T: Scalar>(t: &T) -> Result<bool, FamilyError> {
    let inv_t = t.one_like().div(t).ok_or_else(|| FamilyError::Degenerate("t = 0".into()))?;
    let expected = [P1::Finite(t.neg()), P1::Finite(inv_t.neg()), P1::Finite(t.one_like()), P1::Infinity];
    let pre = mobius_preimages(t)?;
    let images_ok = pre
        .iter()
        .zip([P1::Finite(t.clone()), P1::Finite(t.one_like()), P1::Finite(t.zero_like()), P1::Infinity])
        .map(|(x, y)| mobius(t, x).map(|m| m == y))
        .collect::<Result<Vec<bool>, _>>()?;
    Ok(pre == expected && images_ok.into_iter().all(|b| b))
}

/// `F(1/u) u^3 = -F(u)`.
pub fn tau_identity_check(t: &FieldElement, u: &FieldElement) -> Result<bool, FamilyError> {
    if u.is_zero() {
        return Err(FamilyError::Degenerate("u = 0".into()));
    }
    let lhs = &family_c_f(t, &u.inv()?)? * &u.pow(3);
    Ok(lhs == -&family_c_f(t, u)?)
}

/// Samples points of `C_t` over `F_{p^2}` and checks that
/// `tau(x, y) = (1/x, i y / x^3)` maps each onto `C_t`. Returns the number
/// of points checked; `Ok(None)` signals a failure.
pub fn tau_point_check(t: &FieldElement, samples: usize, seed: u64) -> Result<Option<usize>, FamilyError> {
    let p = prime_field_of(t)?;
    let f2 = Field::extension(p, 2)?;
    let tl = t.lift_to(&f2)?;
    let i = f2.from_i64(-1).sqrt().ok_or(FamilyError::NoSqrtMinusOne)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < samples {
        attempts += 1;
        if attempts > 100 * samples + 1000 {
            return Err(FamilyError::Budget("could not sample points of C_t".into()));
        }
        let x = f2.element(rng.gen_range(0..f2.order()))?;
        if x.is_zero() {
            continue;
        }
        let Some(y) = family_c_f(&tl, &x.square())?.sqrt() else { continue };
        let (x2, y2) = (x.inv()?, &(&i * &y) * &x.pow(3).inv()?);
        if y2.square() != family_c_f(&tl, &x2.square())? {
            return Ok(None);
        }
        checked += 1;
    }
    Ok(Some(checked))
}

/// The form `c x^k dx / y`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Differential {
    coeff: FieldElement,
    power: i32,
}

/// Substitutes `x -> 1/x`, `y -> i y / x^3`, `dx -> -dx / x^2` into `c x^k dx / y`.
fn tau_pullback(form: &Differential, i: &FieldElement) -> Result<Differential, FamilyError> {
    // x^{-k} * (-x^{-2}) * x^3 / (i y)
    let coeff = &(-&form.coeff) * &i.inv()?;
    Ok(Differential {
        coeff,
        power: 1 - form.power,
    })
}

/// Matrix of `tau^*` on the basis `(dx/y, x dx/y)`; columns are images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauMatrix {
    pub i: FieldElement,
    pub entries: [[FieldElement; 2]; 2],
}

impl TauMatrix {
    pub fn square(&self) -> [[FieldElement; 2]; 2] {
        let m = &self.entries;
        let e = |r: usize, c: usize| &(&m[r][0] * &m[0][c]) + &(&m[r][1] * &m[1][c]);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }

    pub fn squares_to_minus_identity(&self) -> bool {
        let f = self.i.field();
        self.square() == [[f.from_i64(-1), f.zero()], [f.zero(), f.from_i64(-1)]]
    }
}

pub fn tau_pullback_matrix(field: &std::sync::Arc<Field>) -> Result<TauMatrix, FamilyError> {
    let i = field.from_i64(-1).sqrt().ok_or(FamilyError::NoSqrtMinusOne)?;
    let zero = field.zero();
    let mut entries = [[zero.clone(), zero.clone()], [zero.clone(), zero]];
    for col in 0..2 {
        let image = tau_pullback(
            &Differential {
                coeff: field.one(),
                power: col as i32,
            },
            &i,
        )?;
        if !(0..2).contains(&image.power) {
            return Err(FamilyError::Degenerate("pullback leaves the holomorphic basis".into()));
        }
        entries[image.power as usize][col] = image.coeff;
    }
    Ok(TauMatrix { i, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_j_values() {
        let f = Field::prime(13).unwrap();
        assert_eq!(legendre_j(&f.from_i64(-1)).unwrap(), f.from_u64(1728));
        assert_eq!(legendre_j(&f.from_u64(2)).unwrap(), f.from_u64(1728));
        let l = f.from_u64(5);
        assert_eq!(legendre_j(&l).unwrap(), legendre_j(&l.inv().unwrap()).unwrap());
        assert!(legendre_j(&f.one()).is_err());
    }

    #[test]
    fn fermat_fiber_mod_5() {
        let f = Field::prime(5).unwrap();
        let r = family_b_check(&f.zero()).unwrap();
        assert_eq!((r.count_main, r.count_q1, r.trace_q1), (0, 4, 2));
        assert_eq!((r.count_q2, r.trace_q2), (8, -2));
        assert!(r.passed());
    }

    #[test]
    fn singular_quartic_parameters_are_refused() {
        let f = Field::prime(13).unwrap();
        for t in [2i64, -2, -1] {
            assert!(matches!(count_plane_quartic(&f.from_i64(t)), Err(FamilyError::Singular(_))));
            assert!(!plane_quartic_singular_points(&f.from_i64(t)).unwrap().is_empty());
        }
        for t in [0, 1, 3, 5] {
            assert!(plane_quartic_singular_points(&f.from_i64(t)).unwrap().is_empty());
        }
    }

    #[test]
    fn family_c_at_two_mod_13() {
        let f = Field::prime(13).unwrap();
        let r = family_c_check(&f.from_u64(2)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.j_q1, 1728 % 13);
        assert!(r.checks.contains_key("traces_equal_when_i_rational"));
    }

    #[test]
    fn mobius_over_rationals() {
        let t = Rational64::from_integer(2);
        let pre = mobius_preimages(&t).unwrap();
        assert_eq!(pre[0], P1::Finite(Rational64::from_integer(-2)));
        assert_eq!(pre[1], P1::Finite(Rational64::new(-1, 2)));
        assert_eq!(pre[2], P1::Finite(Rational64::from_integer(1)));
        assert_eq!(pre[3], P1::Infinity);
        assert!(mobius_branch_check(&t).unwrap());
        assert!(mobius_branch_check(&Rational64::from_integer(-1)).is_err());
    }

    #[test]
    fn tau_identity_and_points() {
        let f = Field::prime(17).unwrap();
        let t = f.from_u64(3);
        assert!(tau_identity_check(&t, &f.one()).unwrap());
        for u in 1..17 {
            assert!(tau_identity_check(&t, &f.from_u64(u)).unwrap());
        }
        assert_eq!(tau_point_check(&t, 20, 7).unwrap(), Some(20));
    }

    #[test]
    fn tau_matrix() {
        let f = Field::prime(13).unwrap();
        let m = tau_pullback_matrix(&f).unwrap();
        assert_eq!(m.i, f.from_u64(5));
        assert_eq!(m.entries, [[f.zero(), m.i.clone()], [m.i.clone(), f.zero()]]);
        assert!(m.squares_to_minus_identity());
        assert!(tau_pullback_matrix(&Field::prime(7).unwrap()).is_err());
    }
}
