//! Exact arithmetic in prime fields `F_p` and explicit extensions `F_{p^k}`.
//!
//! A [`Field`] carries its characteristic and a monic irreducible modulus
//! polynomial; every [`FieldElement`] keeps an `Arc` to the field it lives in,
//! so mixing elements of different fields is detected at runtime instead of
//! silently producing garbage.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 6;

/// Extension degrees accepted by [`build_extension`].
pub const SUPPORTED_DEGREES: [u32; 5] = [1, 2, 3, 4, 6];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic {0} is not supported (need 3 < p < 2^32)")]
    UnsupportedCharacteristic(u64),
    #[error("extension degree {0} is not one of 1, 2, 3, 4, 6")]
    UnsupportedDegree(u32),
    #[error("modulus polynomial is not monic irreducible of the stated degree")]
    ReducibleModulus,
    #[error("field mismatch: {0} vs {1}")]
    Mismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element index {0} out of range")]
    IndexOutOfRange(u128),
    #[error("field F_{0}^{1} is too large to index")]
    TooLarge(u64, u32),
}

/// A prime `3 < p < 2^32`, checked by trial division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p <= 3 || p >= 1 << 32 {
            return Err(FieldError::UnsupportedCharacteristic(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn mod_pow(mut base: u64, mut exp: u128, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    if r1 == 0 {
        return None;
    }
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

// Dense polynomials over F_p, coefficient i is the coefficient of x^i.
mod poly {
    use super::{inv_mod, mul_mod};

    pub fn trim(mut f: Vec<u64>) -> Vec<u64> {
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let m = trim(m.to_vec());
        let lead_inv = inv_mod(*m.last().expect("nonzero modulus"), p).expect("invertible lead");
        while r.len() >= m.len() {
            let shift = r.len() - m.len();
            let c = mul_mod(*r.last().unwrap(), lead_inv, p);
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mul_mod(c, mi, p)) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        rem(&out, m, p)
    }

    /// x^(p^e) mod m
    pub fn frobenius_power_of_x(m: &[u64], p: u64, e: u32) -> Vec<u64> {
        let mut cur = rem(&[0, 1], m, p);
        for _ in 0..e {
            let mut base = cur.clone();
            let mut acc = vec![1u64];
            let mut exp = p;
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = mulmod(&acc, &base, m, p);
                }
                base = mulmod(&base, &base, m, p);
                exp >>= 1;
            }
            cur = acc;
        }
        cur
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's irreducibility test for a monic polynomial of degree k.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        if k == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        let full = frobenius_power_of_x(f, p, k as u32);
        if !sub(&full, &rem(&x, f, p), p).is_empty() {
            return false;
        }
        let mut r = 2;
        let mut kk = k;
        let mut prime_divisors = Vec::new();
        while kk > 1 {
            if kk % r == 0 {
                prime_divisors.push(r);
                while kk % r == 0 {
                    kk /= r;
                }
            }
            r += 1;
        }
        prime_divisors.into_iter().all(|r| {
            let h = frobenius_power_of_x(f, p, (k / r) as u32);
            let g = gcd(f, &sub(&h, &x, p), p);
            g.len() == 1
        })
    }
}

/// Returns the smallest monic irreducible polynomial of degree `k` over `F_p`,
/// as coefficients `[c_0, ..., c_{k-1}, 1]`.
///
/// Candidates are ordered by `(c_{k-1}, ..., c_0)` lexicographically, the same
/// order used for field elements. For `k = 1` the modulus is `x`.
pub fn build_extension(p: PrimeModulus, k: u32) -> Result<Vec<u64>, FieldError> {
    if !SUPPORTED_DEGREES.contains(&k) {
        return Err(FieldError::UnsupportedDegree(k));
    }
    let p = p.get();
    let k = k as usize;
    if k == 1 {
        return Ok(vec![0, 1]);
    }
    let total = (p as u128).pow(k as u32);
    for idx in 0..total {
        let mut f = vec![0u64; k + 1];
        let mut rest = idx;
        for c in f.iter_mut().take(k) {
            *c = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        f[k] = 1;
        if f[0] == 0 {
            continue;
        }
        if poly::is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn checked_order(p: u64, k: u32) -> Result<u128, FieldError> {
    // keep q^2 representable for exponent arithmetic on group orders
    match (p as u128).checked_pow(k) {
        Some(q) if q < 1 << 62 => Ok(q),
        _ => Err(FieldError::TooLarge(p, k)),
    }
}

/// A finite field `F_p[x]/(m(x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: PrimeModulus,
    modulus: Vec<u64>,
    order: u128,
}

impl Field {
    pub fn prime(p: u64) -> Result<Arc<Field>, FieldError> {
        Self::extension(p, 1)
    }

    /// `F_{p^k}` with the canonical modulus from [`build_extension`].
    pub fn extension(p: u64, k: u32) -> Result<Arc<Field>, FieldError> {
        let p = PrimeModulus::new(p)?;
        let order = checked_order(p.get(), k)?;
        let modulus = build_extension(p, k)?;
        Ok(Arc::new(Field { p, order, modulus }))
    }

    /// A field with an explicitly supplied monic modulus.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Arc<Field>, FieldError> {
        let p = PrimeModulus::new(p)?;
        let modulus = poly::trim(modulus.into_iter().map(|c| c % p.get()).collect());
        let k = modulus.len().saturating_sub(1);
        if k == 0 || k > MAX_DEGREE || modulus[k] != 1 {
            return Err(FieldError::ReducibleModulus);
        }
        if !SUPPORTED_DEGREES.contains(&(k as u32)) {
            return Err(FieldError::UnsupportedDegree(k as u32));
        }
        let order = checked_order(p.get(), k as u32)?;
        if !poly::is_irreducible(&modulus, p.get()) {
            return Err(FieldError::ReducibleModulus);
        }
        Ok(Arc::new(Field { p, order, modulus }))
    }

    pub fn characteristic(&self) -> u64 {
        self.p.get()
    }

    pub fn prime_modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn degree(&self) -> u32 {
        (self.modulus.len() - 1) as u32
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    /// Monic modulus polynomial, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            field: Arc::clone(self),
            coeffs: [0; MAX_DEGREE],
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.from_u64(1)
    }

    pub fn from_u64(self: &Arc<Self>, v: u64) -> FieldElement {
        let mut coeffs = [0; MAX_DEGREE];
        coeffs[0] = v % self.p.get();
        FieldElement {
            field: Arc::clone(self),
            coeffs,
        }
    }

    pub fn from_i64(self: &Arc<Self>, v: i64) -> FieldElement {
        let p = self.p.get() as i128;
        self.from_u64((v as i128).rem_euclid(p) as u64)
    }

    /// Element `c_0 + c_1 x + ...`; missing coefficients are zero.
    pub fn from_coeffs(self: &Arc<Self>, cs: &[u64]) -> FieldElement {
        let mut coeffs = [0; MAX_DEGREE];
        let k = self.degree() as usize;
        let p = self.p.get();
        let mut reduced = vec![0u64; cs.len().max(1)];
        for (i, c) in cs.iter().enumerate() {
            reduced[i] = c % p;
        }
        let reduced = poly::rem(&reduced, &self.modulus, p);
        coeffs[..reduced.len().min(k)].copy_from_slice(&reduced[..reduced.len().min(k)]);
        FieldElement {
            field: Arc::clone(self),
            coeffs,
        }
    }

    /// The class of `x` (a generator of the extension over `F_p`).
    pub fn generator(self: &Arc<Self>) -> FieldElement {
        self.from_coeffs(&[0, 1])
    }

    /// Element with base-`p` digits of `index` as coefficients (low first).
    pub fn element(self: &Arc<Self>, index: u128) -> Result<FieldElement, FieldError> {
        if index >= self.order {
            return Err(FieldError::IndexOutOfRange(index));
        }
        let p = self.p.get() as u128;
        let mut coeffs = [0; MAX_DEGREE];
        let mut rest = index;
        for c in coeffs.iter_mut().take(self.degree() as usize) {
            *c = (rest % p) as u64;
            rest /= p;
        }
        Ok(FieldElement {
            field: Arc::clone(self),
            coeffs,
        })
    }

    /// All elements in increasing [`FieldElement`] order.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(move |i| self.element(i).expect("in range"))
    }

    fn describe(&self) -> String {
        format!("F_{}^{} mod {:?}", self.p.get(), self.degree(), self.modulus)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            write!(f, "F_{}", self.p.get())
        } else {
            write!(f, "F_{}^{}", self.p.get(), self.degree())
        }
    }
}

pub fn same_field(a: &Arc<Field>, b: &Arc<Field>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// An element of a [`Field`].
///
/// Ordering compares coefficient sequences from the highest degree down, which
/// coincides with the integer order of [`FieldElement::index`].
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<Field>,
    coeffs: [u64; MAX_DEGREE],
}

impl FieldElement {
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs[..self.field.degree() as usize]
    }

    pub fn index(&self) -> u128 {
        let p = self.field.characteristic() as u128;
        self.coeffs()
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * p + c as u128)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn is_in_prime_field(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Value of an element of the prime subfield.
    pub fn as_prime(&self) -> Option<u64> {
        self.is_in_prime_field().then_some(self.coeffs[0])
    }

    /// Re-home an element of the prime subfield into another field of the
    /// same characteristic.
    pub fn lift_to(&self, target: &Arc<Field>) -> Result<FieldElement, FieldError> {
        match self.as_prime() {
            Some(v) if target.characteristic() == self.field.characteristic() => Ok(target.from_u64(v)),
            _ => Err(FieldError::Mismatch(self.field.describe(), target.describe())),
        }
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self.field.describe(), other.field.describe()))
        }
    }

    fn with_coeffs(&self, coeffs: [u64; MAX_DEGREE]) -> FieldElement {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        let p = self.field.characteristic();
        let mut out = [0; MAX_DEGREE];
        for (i, o) in out.iter_mut().enumerate() {
            let s = self.coeffs[i] + other.coeffs[i];
            *o = if s >= p { s - p } else { s };
        }
        Ok(self.with_coeffs(out))
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        let p = self.field.characteristic();
        let mut out = [0; MAX_DEGREE];
        for (i, o) in out.iter_mut().enumerate() {
            let (a, b) = (self.coeffs[i], other.coeffs[i]);
            *o = if a >= b { a - b } else { a + p - b };
        }
        Ok(self.with_coeffs(out))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        let p = self.field.characteristic();
        let k = self.field.degree() as usize;
        if k == 1 {
            let mut out = [0; MAX_DEGREE];
            out[0] = mul_mod(self.coeffs[0], other.coeffs[0], p);
            return Ok(self.with_coeffs(out));
        }
        let pp = p as u128;
        let mut prod = [0u128; 2 * MAX_DEGREE - 1];
        for i in 0..k {
            if self.coeffs[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] += self.coeffs[i] as u128 * other.coeffs[j] as u128;
            }
        }
        let mut red = [0u64; 2 * MAX_DEGREE - 1];
        for i in 0..(2 * k - 1) {
            red[i] = (prod[i] % pp) as u64;
        }
        let m = &self.field.modulus;
        for i in (k..(2 * k - 1)).rev() {
            let c = red[i];
            if c == 0 {
                continue;
            }
            red[i] = 0;
            for j in 0..k {
                let t = mul_mod(c, m[j], p);
                let idx = i - k + j;
                red[idx] = if red[idx] >= t { red[idx] - t } else { red[idx] + p - t };
            }
        }
        let mut out = [0; MAX_DEGREE];
        out[..k].copy_from_slice(&red[..k]);
        Ok(self.with_coeffs(out))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.field.degree() == 1 {
            let p = self.field.characteristic();
            let mut out = [0; MAX_DEGREE];
            out[0] = inv_mod(self.coeffs[0], p).ok_or(FieldError::DivisionByZero)?;
            return Ok(self.with_coeffs(out));
        }
        Ok(self.pow(self.field.order - 2))
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn square(&self) -> FieldElement {
        self.try_mul(self).expect("same field")
    }

    pub fn pow(&self, mut exp: u128) -> FieldElement {
        if self.field.degree() == 1 {
            let mut out = [0; MAX_DEGREE];
            out[0] = mod_pow(self.coeffs[0], exp, self.field.characteristic());
            return self.with_coeffs(out);
        }
        let mut acc = self.field.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.square();
            exp >>= 1;
        }
        acc
    }

    /// Signed exponent; negative powers of zero are an error.
    pub fn pow_i(&self, exp: i128) -> Result<FieldElement, FieldError> {
        if exp >= 0 {
            Ok(self.pow(exp as u128))
        } else {
            Ok(self.inv()?.pow(exp.unsigned_abs()))
        }
    }

    pub fn frobenius(&self) -> FieldElement {
        self.pow(self.field.characteristic() as u128)
    }

    /// Square test. Zero is a square by convention.
    pub fn is_square(&self) -> bool {
        self.is_zero() || self.pow((self.field.order - 1) / 2).is_one()
    }

    /// Quadratic character: 0, 1 or -1.
    pub fn legendre(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_square() {
            1
        } else {
            -1
        }
    }

    /// Square root via Tonelli-Shanks, returning the smaller of `{b, -b}`.
    pub fn sqrt(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let r = self.nth_root_prime(2)?;
        let neg = -&r;
        Some(if neg < r { neg } else { r })
    }

    /// Some `r`-th root for a prime `r`, or `None` when `self` is not an
    /// `r`-th power.
    ///
    /// Splits `q - 1 = r^s t` with `r` coprime to `t` and solves the root in
    /// the `r`-Sylow subgroup of `F_q^*` digit by digit.
    pub fn nth_root_prime(&self, r: u32) -> Option<FieldElement> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let q1 = self.field.order - 1;
        let r128 = r as u128;
        if q1 % r128 != 0 {
            // x -> x^r is a bijection
            let e = inverse_mod_u128(r128, q1)?;
            return Some(self.pow(e));
        }
        if !self.pow(q1 / r128).is_one() {
            return None;
        }
        let mut s = 0u32;
        let mut t = q1;
        while t % r128 == 0 {
            t /= r128;
            s += 1;
        }
        // alpha * r = 1 mod t, so c^(alpha r) * c^(1 - alpha r) = c and c^(1 - alpha r) lies in the Sylow part
        let alpha = if t == 1 { 0 } else { inverse_mod_u128(r128, t)? };
        let base_root = self.pow(alpha);
        let sylow_part = {
            // c / (c^alpha)^r
            let denom = base_root.pow(r128);
            self.try_div(&denom).ok()?
        };
        let gen = sylow_generator(&self.field, r, t);
        let log = sylow_log(&sylow_part, &gen, r, s)?;
        if log % r128 != 0 {
            return None;
        }
        let root = &base_root * &gen.pow(log / r128);
        debug_assert!(root.pow(r128) == *self);
        Some(root)
    }

    /// All roots of `X^m = self` for `m` a product of 2s and 3s.
    pub fn all_roots(&self, m: u32) -> Vec<FieldElement> {
        let mut roots = vec![self.clone()];
        let mut rest = m;
        for r in [2u32, 3] {
            while rest % r == 0 {
                rest /= r;
                let mut next = Vec::new();
                for c in &roots {
                    if let Some(x) = c.nth_root_prime(r) {
                        for z in roots_of_unity(&self.field, r) {
                            next.push(&x * &z);
                        }
                    }
                }
                roots = next;
            }
        }
        assert_eq!(rest, 1, "all_roots supports m = 2^a 3^b");
        roots.sort();
        roots.dedup();
        roots
    }
}

fn inverse_mod_u128(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as u128)
}

/// Generator of the `r`-Sylow subgroup of `F_q^*` where `q - 1 = r^s t`.
fn sylow_generator(field: &Arc<Field>, r: u32, t: u128) -> FieldElement {
    let q1 = field.order() - 1;
    for idx in 2..field.order() {
        let z = field.element(idx).expect("in range");
        if !z.pow(q1 / r as u128).is_one() {
            return z.pow(t);
        }
    }
    unreachable!("a non r-th power exists when r divides q - 1")
}

/// Discrete log of `h` to base `g` (order `r^s`) by Pohlig-Hellman digits.
fn sylow_log(h: &FieldElement, g: &FieldElement, r: u32, s: u32) -> Option<u128> {
    let r128 = r as u128;
    let top = g.pow(r128.pow(s - 1));
    let top_powers: Vec<FieldElement> = (0..r).map(|i| top.pow(i as u128)).collect();
    let mut log = 0u128;
    let g_inv = g.inv().ok()?;
    for i in 0..s {
        // (h * g^-log)^(r^(s-1-i)) lands in the order-r subgroup
        let reduced = h * &g_inv.pow(log);
        let probe = reduced.pow(r128.pow(s - 1 - i));
        let digit = top_powers.iter().position(|z| *z == probe)? as u128;
        log += digit * r128.pow(i);
    }
    Some(log)
}

/// The `r`-th roots of unity contained in the field, sorted.
pub fn roots_of_unity(field: &Arc<Field>, r: u32) -> Vec<FieldElement> {
    let q1 = field.order() - 1;
    let mut out = vec![field.one()];
    if r > 1 && q1 % r as u128 == 0 {
        // z^((q-1)/r) for non r-th powers z generates mu_r
        for idx in 2..field.order() {
            let z = field.element(idx).expect("in range").pow(q1 / r as u128);
            if !z.is_one() {
                let mut cur = z.clone();
                while !cur.is_one() {
                    out.push(cur.clone());
                    cur = &cur * &z;
                }
                break;
            }
        }
    }
    out.sort();
    out
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_field(&self.field, &other.field)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.characteristic().hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.iter().rev().cmp(other.coeffs.iter().rev())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let terms: Vec<String> = self
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*a"),
                _ => format!("{c}*a^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FieldElement", 3)?;
        s.serialize_field("modulus", &self.field.characteristic())?;
        s.serialize_field("ext_modulus", &self.field.modulus)?;
        s.serialize_field("coeffs", self.coeffs())?;
        s.end()
    }
}

// Operator sugar. These panic on a field mismatch; the `try_*` methods are the
// checked entry points.

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field mismatch in +")
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch in -")
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch in *")
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.field.characteristic();
        let mut out = [0; MAX_DEGREE];
        for (o, &c) in out.iter_mut().zip(self.coeffs.iter()) {
            *o = if c == 0 { 0 } else { p - c };
        }
        self.with_coeffs(out)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Arc<Field> {
        Field::prime(p).unwrap()
    }

    #[test]
    fn small_prime_arithmetic() {
        let f7 = f(7);
        assert_eq!(&f7.from_u64(3) * &f7.from_u64(5), f7.one());
        assert_eq!(&f7.zero() - &f7.one(), f7.from_u64(6));
    }

    #[test]
    fn f49_generator_squares_to_minus_one() {
        let f49 = Field::extension(7, 2).unwrap();
        assert_eq!(f49.modulus(), &[1, 0, 1]);
        let x = f49.generator();
        assert_eq!(&x * &x, f49.from_u64(6));
    }

    #[test]
    fn mismatch_and_division_by_zero() {
        let a = f(7).one();
        let b = f(11).one();
        assert!(matches!(a.try_add(&b), Err(FieldError::Mismatch(..))));
        assert_eq!(a.try_div(&f(7).zero()), Err(FieldError::DivisionByZero));
        let e = Field::extension(7, 2).unwrap().one();
        assert!(a.try_mul(&e).is_err());
    }

    #[test]
    fn modulus_validation() {
        assert_eq!(PrimeModulus::new(9), Err(FieldError::NotPrime(9)));
        assert!(matches!(PrimeModulus::new(3), Err(FieldError::UnsupportedCharacteristic(3))));
        assert_eq!(build_extension(PrimeModulus::new(7).unwrap(), 5), Err(FieldError::UnsupportedDegree(5)));
        // x^2 + 1 splits mod 5
        assert_eq!(Field::with_modulus(5, vec![1, 0, 1]), Err(FieldError::ReducibleModulus));
    }

    #[test]
    fn squares_and_roots() {
        let f7 = f(7);
        assert!(f7.from_u64(2).is_square());
        assert!(!f7.from_i64(-1).is_square());
        assert!(f(13).from_i64(-1).is_square());
        assert_eq!(f7.from_u64(4).sqrt(), Some(f7.from_u64(2)));
        assert_eq!(f7.from_u64(3).sqrt(), None);
        assert_eq!(f(13).from_i64(-1).sqrt(), Some(f(13).from_u64(5)));
        assert_eq!(f7.zero().sqrt(), Some(f7.zero()));
    }

    #[test]
    fn canonical_extensions() {
        let p7 = PrimeModulus::new(7).unwrap();
        let p5 = PrimeModulus::new(5).unwrap();
        assert_eq!(build_extension(p7, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(build_extension(PrimeModulus::new(13).unwrap(), 1).unwrap(), vec![0, 1]);
        assert_eq!(build_extension(p5, 2).unwrap(), vec![2, 0, 1]);
    }

    #[test]
    fn frobenius_fixes_prime_subfield() {
        let f = Field::extension(5, 3).unwrap();
        let fixed = f.elements().filter(|a| a.frobenius() == *a).count();
        assert_eq!(fixed, 5);
    }

    #[test]
    fn cube_and_fourth_roots() {
        let f = Field::prime(13).unwrap();
        // 13 = 1 mod 3 and 1 mod 4: three cube roots of unity, four fourth roots
        assert_eq!(roots_of_unity(&f, 3).len(), 3);
        assert_eq!(f.one().all_roots(4).len(), 4);
        assert_eq!(f.one().all_roots(6).len(), 6);
        for c in f.elements() {
            for r in c.all_roots(6) {
                assert_eq!(r.pow(6), c);
            }
        }
    }

    #[test]
    fn ordering_matches_index() {
        let f = Field::extension(5, 2).unwrap();
        let elems: Vec<_> = f.elements().collect();
        assert!(elems.windows(2).all(|w| w[0] < w[1]));
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(e.index(), i as u128);
        }
    }
}
