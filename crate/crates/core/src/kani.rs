//! Frey–Kani data and Kani's reducibility criterion, decided by exhaustive
//! search over isogenies of degree `k(n-k)`, plus the `SL_2(Z/n)` census.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curves::{
    isomorphisms, smallest_basis, subgroups_of_order, velu_isogeny, CurveError, CurveModel, FiniteSubgroup, Point,
    TorsionField,
};
use crate::field::{FieldElement, SUPPORTED_DEGREES};
use crate::pairing::{is_anti_isometry, AntiIsometry, LevelMatrix, PairingError, TorsionBasis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KaniError {
    #[error("level {0} is not supported (expected 2, 3, 5 or 7)")]
    UnsupportedLevel(u64),
    #[error("characteristic {p} divides the isogeny degree {d}; inseparable isogenies are not searched")]
    Inseparable { p: u64, d: u64 },
    #[error("curves are not over the same prime field")]
    FieldMismatch,
    #[error("torsion basis is not on the given curve over its working field")]
    BasisMismatch,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("matrix {0} is not an anti-isometry")]
    NotAntiIsometry(String),
    #[error("enumeration of SL_2(Z/{0}) exceeds the budget (n <= 12)")]
    Sl2Budget(u64),
    #[error(transparent)]
    Curve(CurveError),
    #[error(transparent)]
    Pairing(PairingError),
}

impl From<CurveError> for KaniError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Budget(s) => KaniError::Budget(s),
            other => KaniError::Curve(other),
        }
    }
}

impl From<PairingError> for KaniError {
    fn from(e: PairingError) -> Self {
        match e {
            PairingError::Curve(c) => c.into(),
            other => KaniError::Pairing(other),
        }
    }
}

impl KaniError {
    pub fn is_budget(&self) -> bool {
        matches!(self, KaniError::Budget(_) | KaniError::Sl2Budget(_))
    }
}

/// Pairs `(k, m)` with `1 <= k < n` and `k (n - k) = m^2`.
pub fn square_degree_witnesses(n: u64) -> Vec<(u64, u64)> {
    (1..n)
        .filter_map(|k| {
            let d = k * (n - k);
            let m = (d as f64).sqrt() as u64;
            (m.saturating_sub(1)..=m + 1).find(|&m| m * m == d).map(|m| (k, m))
        })
        .collect()
}

fn check_level(n: u64) -> Result<(), KaniError> {
    if [2, 3, 5, 7].contains(&n) {
        Ok(())
    } else {
        Err(KaniError::UnsupportedLevel(n))
    }
}

fn degrees(n: u64) -> Vec<u64> {
    let mut ds: Vec<u64> = (1..n).map(|k| k * (n - k)).collect();
    ds.sort();
    ds.dedup();
    ds
}

fn check_base(e: &CurveModel, e2: &CurveModel, n: u64) -> Result<u64, KaniError> {
    check_level(n)?;
    let (f, f2) = (e.field(), e2.field());
    if f.degree() != 1 || f2.degree() != 1 || f.characteristic() != f2.characteristic() {
        return Err(KaniError::FieldMismatch);
    }
    let p = f.characteristic();
    if p == n {
        return Err(KaniError::Inseparable { p, d: n });
    }
    if let Some(&d) = degrees(n).iter().find(|&&d| d % p == 0) {
        return Err(KaniError::Inseparable { p, d });
    }
    Ok(p)
}

/// Frey–Kani data: curves over `F_p` and an anti-isometry of their
/// `n`-torsion, with bases over a common extension.
#[derive(Debug, Clone, Serialize)]
pub struct FkData {
    pub e: CurveModel,
    pub e2: CurveModel,
    pub n: u64,
    pub phi: AntiIsometry,
}

impl FkData {
    pub fn new(e: &CurveModel, e2: &CurveModel, phi: AntiIsometry) -> Result<Self, KaniError> {
        let n = phi.n();
        check_base(e, e2, n)?;
        if !is_anti_isometry(&phi.matrix, n) {
            return Err(KaniError::NotAntiIsometry(phi.matrix.to_string()));
        }
        Ok(FkData {
            e: e.clone(),
            e2: e2.clone(),
            n,
            phi,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Irreducible,
    Reducible,
}

/// An isogeny `h: E -> E'` of degree `k(n-k)` with `phi o [k] = h` on `E[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub k: u64,
    pub degree: u64,
    pub kernel: Vec<Point>,
    pub codomain_j: FieldElement,
    pub isomorphism_index: usize,
    pub isomorphism_u: FieldElement,
    /// `h` re-evaluated on `P` and `Q` matches `phi([k]P)` and `phi([k]Q)`.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FkClassification {
    pub verdict: Verdict,
    pub matrix: LevelMatrix,
    pub witness: Option<Witness>,
    /// Kernels whose Vélu codomain has `j(E')` but is not isomorphic to `E'`
    /// over the working field. Such twist-only landings never count.
    pub twist_only_codomains: usize,
}

/// One candidate isogeny `E -> E'` and its action on `E[n]` in the fixed bases.
#[derive(Debug, Clone)]
struct Candidate {
    kernel: FiniteSubgroup,
    codomain_j: FieldElement,
    iso_index: usize,
    iso_u: FieldElement,
    action: LevelMatrix,
    images: (Point, Point),
}

/// Precomputed isogeny search for fixed curves and bases; classifying a new
/// matrix is then a table lookup.
#[derive(Debug, Clone)]
pub struct Classifier {
    n: u64,
    source: TorsionBasis,
    target: TorsionBasis,
    by_degree: BTreeMap<u64, Vec<Candidate>>,
    twist_only: BTreeMap<u64, usize>,
}

impl Classifier {
    pub fn new(e: &CurveModel, e2: &CurveModel, source: &TorsionBasis, target: &TorsionBasis) -> Result<Self, KaniError> {
        let n = source.n;
        check_base(e, e2, n)?;
        let field = source.curve.field().clone();
        if !crate::field::same_field(&field, target.curve.field()) || source.zeta != target.zeta {
            return Err(KaniError::BasisMismatch);
        }
        let tf = TorsionField::new(e, field.degree())?;
        if tf.curve() != &source.curve || &e2.lift_to(&field)? != &target.curve {
            return Err(KaniError::BasisMismatch);
        }
        let (e_s, map) = source.curve.to_short_weierstrass()?;
        let (e2_s, map2) = target.curve.to_short_weierstrass()?;
        let back = map2.inverse();
        let (ps, qs) = (map.apply(&source.p), map.apply(&source.q));
        let j_target = e2_s.j_invariant()?;

        let mut by_degree = BTreeMap::new();
        let mut twist_only = BTreeMap::new();
        for d in degrees(n) {
            let kernels = if d == 1 {
                vec![FiniteSubgroup::new(&e_s, vec![Point::Infinity])?]
            } else {
                let pts = tf.full_torsion(d)?.ok_or_else(|| {
                    KaniError::Budget(format!("E[{d}] is not rational over {field}; needed for degree {d}"))
                })?;
                let pts: Vec<Point> = pts.iter().map(|r| map.apply(r)).collect();
                subgroups_of_order(&e_s, &pts, d)?
            };
            let mut cands = Vec::new();
            let mut twists = 0;
            for kernel in kernels {
                let h = velu_isogeny(&e_s, &kernel)?;
                let cod_j = h.codomain().j_invariant()?;
                let isos = isomorphisms(h.codomain(), &e2_s)?;
                if isos.is_empty() && cod_j == j_target {
                    twists += 1;
                }
                let (hp, hq) = (h.eval(&ps)?, h.eval(&qs)?);
                for (idx, iso) in isos.into_iter().enumerate() {
                    let ip = back.apply(&iso.apply(&hp));
                    let iq = back.apply(&iso.apply(&hq));
                    let (a, c) = target.coordinates(&ip)?;
                    let (b, dd) = target.coordinates(&iq)?;
                    cands.push(Candidate {
                        kernel: kernel.clone(),
                        codomain_j: cod_j.clone(),
                        iso_index: idx,
                        iso_u: iso.u.clone(),
                        action: LevelMatrix::new(n, a as i64, b as i64, c as i64, dd as i64),
                        images: (ip, iq),
                    });
                }
            }
            by_degree.insert(d, cands);
            twist_only.insert(d, twists);
        }
        Ok(Classifier {
            n,
            source: source.clone(),
            target: target.clone(),
            by_degree,
            twist_only,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn source(&self) -> &TorsionBasis {
        &self.source
    }

    pub fn target(&self) -> &TorsionBasis {
        &self.target
    }

    pub fn classify(&self, matrix: &LevelMatrix) -> Result<FkClassification, KaniError> {
        let n = self.n;
        if !is_anti_isometry(matrix, n) {
            return Err(KaniError::NotAntiIsometry(matrix.to_string()));
        }
        let twist_only = (1..n).map(|k| self.twist_only[&(k * (n - k))]).sum();
        for k in 1..n {
            let d = k * (n - k);
            let want = matrix.scale(k);
            if let Some(c) = self.by_degree[&d].iter().find(|c| c.action == want) {
                // phi([k]P) and phi([k]Q) are the columns of k M in the target basis
                let verified = self.target.point(want.m[0][0], want.m[1][0]) == c.images.0
                    && self.target.point(want.m[0][1], want.m[1][1]) == c.images.1;
                return Ok(FkClassification {
                    verdict: Verdict::Reducible,
                    matrix: *matrix,
                    witness: Some(Witness {
                        k,
                        degree: d,
                        kernel: c.kernel.points().to_vec(),
                        codomain_j: c.codomain_j.clone(),
                        isomorphism_index: c.iso_index,
                        isomorphism_u: c.iso_u.clone(),
                        verified,
                    }),
                    twist_only_codomains: twist_only,
                });
            }
        }
        Ok(FkClassification {
            verdict: Verdict::Irreducible,
            matrix: *matrix,
            witness: None,
            twist_only_codomains: twist_only,
        })
    }

    /// Action matrices of all isogenies of degree `d` found by the search.
    pub fn actions(&self, d: u64) -> Vec<LevelMatrix> {
        self.by_degree.get(&d).map(|c| c.iter().map(|c| c.action).collect()).unwrap_or_default()
    }
}

/// Kani's criterion by exhaustive search: for `k = 1, ..., n-1`, every kernel
/// of order `k(n-k)`, every Vélu codomain and every isomorphism onto `E'`.
pub fn classify_fk(data: &FkData) -> Result<FkClassification, KaniError> {
    Classifier::new(&data.e, &data.e2, &data.phi.source, &data.phi.target)?.classify(&data.phi.matrix)
}

/// Smallest extension carrying `E[n]`, `E'[n]` and every `E[k(n-k)]`, with
/// canonical (lexicographically smallest) normalized bases.
#[derive(Debug, Clone)]
pub struct FkContext {
    pub e: CurveModel,
    pub e2: CurveModel,
    pub degree: u32,
    pub classifier: Classifier,
}

impl FkContext {
    pub fn new(e: &CurveModel, e2: &CurveModel, n: u64) -> Result<Self, KaniError> {
        check_base(e, e2, n)?;
        let ds = degrees(n);
        let mut last = String::from("no supported extension degree");
        for k in SUPPORTED_DEGREES {
            let (tf, tf2) = match (TorsionField::new(e, k), TorsionField::new(e2, k)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(CurveError::Budget(s)), _) | (_, Err(CurveError::Budget(s))) => {
                    last = s;
                    break;
                }
                (Err(err), _) | (_, Err(err)) => return Err(err.into()),
            };
            let plausible = tf.may_contain_full_torsion(n)
                && tf2.may_contain_full_torsion(n)
                && ds.iter().all(|&d| tf.may_contain_full_torsion(d));
            if !plausible {
                continue;
            }
            match Self::at_degree(e, e2, n, &tf, &tf2, &ds) {
                Ok(Some(ctx)) => return Ok(ctx),
                Ok(None) => continue,
                Err(err) if err.is_budget() => last = err.to_string(),
                Err(err) => return Err(err),
            }
        }
        Err(KaniError::Budget(format!(
            "no extension of degree <= 6 carries E[{n}], E'[{n}] and E[d] for d in {ds:?} ({last})"
        )))
    }

    fn at_degree(
        e: &CurveModel,
        e2: &CurveModel,
        n: u64,
        tf: &TorsionField,
        tf2: &TorsionField,
        ds: &[u64],
    ) -> Result<Option<Self>, KaniError> {
        for &d in ds.iter().filter(|&&d| d > 1) {
            if tf.full_torsion(d)?.is_none() {
                return Ok(None);
            }
        }
        let (Some(en), Some(e2n)) = (tf.full_torsion(n)?, tf2.full_torsion(n)?) else {
            return Ok(None);
        };
        let (p, q) = smallest_basis(tf.curve(), &en, n).expect("full torsion");
        let (p2, q2) = smallest_basis(tf2.curve(), &e2n, n).expect("full torsion");
        let source = TorsionBasis::new(tf.curve(), n, p, q)?;
        let target = crate::pairing::normalize_bases(&source, &TorsionBasis::new(tf2.curve(), n, p2, q2)?)?;
        let classifier = Classifier::new(e, e2, &source, &target)?;
        Ok(Some(FkContext {
            e: e.clone(),
            e2: e2.clone(),
            degree: tf.degree(),
            classifier,
        }))
    }

    pub fn n(&self) -> u64 {
        self.classifier.n
    }

    pub fn data(&self, matrix: LevelMatrix) -> Result<FkData, KaniError> {
        let phi = AntiIsometry::new(self.classifier.source.clone(), self.classifier.target.clone(), matrix)?;
        FkData::new(&self.e, &self.e2, phi)
    }

    pub fn classify(&self, matrix: &LevelMatrix) -> Result<FkClassification, KaniError> {
        self.classifier.classify(matrix)
    }
}

/// `-phi`; the same map when `n = 2`.
pub fn neg_phi(phi: &AntiIsometry) -> AntiIsometry {
    AntiIsometry {
        matrix: phi.matrix.neg(),
        ..phi.clone()
    }
}

/// An element of `SL_2(Z/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Sl2Element(pub LevelMatrix);

impl Sl2Element {
    pub fn new(m: LevelMatrix) -> Option<Self> {
        (m.det() == 1 % m.n).then_some(Sl2Element(m))
    }

    pub fn matrix(&self) -> &LevelMatrix {
        &self.0
    }
}

/// All of `SL_2(Z/n)` in lexicographic entry order.
pub fn sl2_enumerate(n: u64) -> Result<Vec<Sl2Element>, KaniError> {
    if !(1..=12).contains(&n) {
        return Err(KaniError::Sl2Budget(n));
    }
    Ok(LevelMatrix::all(n).filter_map(Sl2Element::new).collect())
}

/// `n^3 prod_{l | n} (1 - l^-2)`.
pub fn sl2_order(n: u64) -> u64 {
    let mut order = n.pow(3);
    let mut m = n;
    let mut l = 2;
    while m > 1 {
        if m % l == 0 {
            while m % l == 0 {
                m /= l;
            }
            order = order / (l * l) * (l * l - 1);
        }
        l += 1;
    }
    order
}

/// `phi_sigma = reference o sigma`.
pub fn sigma_to_phi(sigma: &Sl2Element, reference: &AntiIsometry) -> AntiIsometry {
    AntiIsometry {
        matrix: reference.matrix.mul(&sigma.0),
        ..reference.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub sigma: LevelMatrix,
    pub phi: LevelMatrix,
    pub verdict: Option<Verdict>,
    pub witness_k: Option<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub n: u64,
    pub field_degree: u32,
    pub irreducible_count: usize,
    pub reducible_count: usize,
    pub error_count: usize,
    pub twist_only_codomains: usize,
    pub entries: Vec<CensusEntry>,
}

/// Classifies `phi_sigma = [[0,1],[1,0]] o sigma` on `E[n] -> E[n]` for every
/// `sigma` in `SL_2(Z/n)`, with one common basis on both sides.
pub fn sigma_census(e: &CurveModel, n: u64) -> Result<Census, KaniError> {
    let ctx = FkContext::new(e, e, n)?;
    let reference = ctx.data(LevelMatrix::swap(n))?.phi;
    let sigmas = sl2_enumerate(n)?;
    let entries: Vec<CensusEntry> = sigmas
        .par_iter()
        .map(|s| {
            let phi = sigma_to_phi(s, &reference).matrix;
            match ctx.classify(&phi) {
                Ok(c) => CensusEntry {
                    sigma: s.0,
                    phi,
                    verdict: Some(c.verdict),
                    witness_k: c.witness.map(|w| w.k),
                    error: None,
                },
                Err(err) => CensusEntry {
                    sigma: s.0,
                    phi,
                    verdict: None,
                    witness_k: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();
    let count = |v: Verdict| entries.iter().filter(|c| c.verdict == Some(v)).count();
    let twist_only = ctx.classify(&reference.matrix)?.twist_only_codomains;
    Ok(Census {
        n,
        field_degree: ctx.degree,
        irreducible_count: count(Verdict::Irreducible),
        reducible_count: count(Verdict::Reducible),
        error_count: entries.iter().filter(|c| c.error.is_some()).count(),
        twist_only_codomains: twist_only,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn square_degrees() {
        assert!(square_degree_witnesses(7).is_empty());
        assert!(square_degree_witnesses(3).is_empty());
        assert_eq!(square_degree_witnesses(5), vec![(1, 2), (4, 2)]);
        assert_eq!(square_degree_witnesses(2), vec![(1, 1)]);
    }

    #[test]
    fn sl2_orders() {
        for n in 1..=12 {
            assert_eq!(sl2_enumerate(n).unwrap().len() as u64, sl2_order(n), "n = {n}");
        }
        assert_eq!(sl2_order(7), 336);
        assert!(sl2_enumerate(13).is_err());
    }

    #[test]
    fn n2_identity_is_reducible_and_swap_is_not() {
        let f = Field::prime(11).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let ctx = FkContext::new(&e, &e, 2).unwrap();
        let id = ctx.classify(&LevelMatrix::identity(2)).unwrap();
        assert_eq!(id.verdict, Verdict::Reducible);
        let w = id.witness.unwrap();
        assert_eq!((w.k, w.degree, w.verified), (1, 1, true));
        assert_eq!(ctx.classify(&LevelMatrix::swap(2)).unwrap().verdict, Verdict::Irreducible);
    }

    #[test]
    fn n2_census_counts() {
        let f = Field::prime(11).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let c = sigma_census(&e, 2).unwrap();
        assert_eq!((c.irreducible_count, c.reducible_count, c.error_count), (5, 1, 0));
        let red = c.entries.iter().find(|x| x.verdict == Some(Verdict::Reducible)).unwrap();
        assert_eq!(red.phi, LevelMatrix::identity(2));
        assert_eq!(red.sigma, LevelMatrix::swap(2));
    }

    #[test]
    fn rejects_inseparable_and_bad_levels() {
        let f = Field::prime(5).unwrap();
        let e = CurveModel::legendre(f.from_u64(2)).unwrap();
        assert!(matches!(FkContext::new(&e, &e, 5), Err(KaniError::Inseparable { .. })));
        assert!(matches!(FkContext::new(&e, &e, 4), Err(KaniError::UnsupportedLevel(4))));
        let f = Field::prime(7).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        assert!(matches!(FkContext::new(&e, &e, 7), Err(KaniError::Inseparable { .. })));
    }

    #[test]
    fn neg_phi_is_identity_for_n2() {
        let f = Field::prime(11).unwrap();
        let e = CurveModel::legendre(f.from_u64(3)).unwrap();
        let ctx = FkContext::new(&e, &e, 2).unwrap();
        let d = ctx.data(LevelMatrix::swap(2)).unwrap();
        assert_eq!(neg_phi(&d.phi), d.phi);
    }
}
