//! Shioda–Tate bookkeeping for a fibered surface: Mordell–Weil rank, the
//! `(1,1)`-part of `IH^1`, and the extremal / Picard-maximal predicates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("rho = {rho} exceeds h11 = {h11}")]
    RhoExceedsH11 { rho: u64, h11: u64 },
    #[error("fiber component counts must be positive")]
    ZeroComponents,
    #[error("the fibration has a fixed part; the rank formula does not apply")]
    FixedPart,
    #[error("{what} would be negative ({value}); the ledger is inconsistent")]
    Negative { what: &'static str, value: i64 },
    #[error("cannot parse ledger: {0}")]
    Parse(String),
}

/// `(h11, rho)` with the number of components `m_s` of each singular fiber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankLedger {
    pub h11: u64,
    pub rho: u64,
    pub fiber_components: Vec<u64>,
    pub has_fixed_part: bool,
}

impl RankLedger {
    pub fn new(h11: u64, rho: u64, fiber_components: Vec<u64>, has_fixed_part: bool) -> Result<Self, LedgerError> {
        if rho > h11 {
            return Err(LedgerError::RhoExceedsH11 { rho, h11 });
        }
        if fiber_components.contains(&0) {
            return Err(LedgerError::ZeroComponents);
        }
        Ok(RankLedger {
            h11,
            rho,
            fiber_components,
            has_fixed_part,
        })
    }

    /// Parses `h11=10 rho=10 fibers=5,5 fixed=false`; `fibers` and `fixed`
    /// may be omitted.
    pub fn parse(s: &str) -> Result<Self, LedgerError> {
        let (mut h11, mut rho, mut fibers, mut fixed) = (None, None, Vec::new(), false);
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| LedgerError::Parse(tok.into()))?;
            let num = |v: &str| v.parse::<u64>().map_err(|_| LedgerError::Parse(tok.into()));
            match k {
                "h11" => h11 = Some(num(v)?),
                "rho" => rho = Some(num(v)?),
                "fibers" => fibers = parse_fibers(v)?,
                "fixed" => fixed = v.parse().map_err(|_| LedgerError::Parse(tok.into()))?,
                _ => return Err(LedgerError::Parse(tok.into())),
            }
        }
        let h11 = h11.ok_or_else(|| LedgerError::Parse("missing h11".into()))?;
        let rho = rho.ok_or_else(|| LedgerError::Parse("missing rho".into()))?;
        Self::new(h11, rho, fibers, fixed)
    }

    fn correction(&self) -> i64 {
        self.fiber_components.iter().map(|&m| m as i64 - 1).sum()
    }
}

/// Comma-separated positive integers; empty means no singular fibers.
pub fn parse_fibers(v: &str) -> Result<Vec<u64>, LedgerError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|_| LedgerError::Parse(x.into())))
        .collect()
}

/// `rho - 2 - sum (m_s - 1)`.
pub fn mw_rank(l: &RankLedger) -> Result<u64, LedgerError> {
    if l.has_fixed_part {
        return Err(LedgerError::FixedPart);
    }
    let v = l.rho as i64 - 2 - l.correction();
    u64::try_from(v).map_err(|_| LedgerError::Negative {
        what: "Mordell-Weil rank",
        value: v,
    })
}

/// `h11 - 2 - sum (m_s - 1)`.
pub fn ih11_dim(l: &RankLedger) -> Result<u64, LedgerError> {
    let v = l.h11 as i64 - 2 - l.correction();
    u64::try_from(v).map_err(|_| LedgerError::Negative {
        what: "dim IH^1 (1,1)-part",
        value: v,
    })
}

pub fn is_extremal(l: &RankLedger) -> Result<bool, LedgerError> {
    Ok(ih11_dim(l)? == 0)
}

pub fn is_picard_maximal(l: &RankLedger) -> bool {
    l.rho == l.h11
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerSummary {
    pub ledger: RankLedger,
    pub ih11_dim: Option<u64>,
    pub mw_rank: Option<u64>,
    pub extremal: Option<bool>,
    pub picard_maximal: bool,
    pub errors: Vec<String>,
}

/// Evaluates every quantity, recording errors rather than stopping.
pub fn summarize(l: &RankLedger) -> LedgerSummary {
    let mut errors = Vec::new();
    let ih = ih11_dim(l).map_err(|e| errors.push(e.to_string())).ok();
    let mw = mw_rank(l).map_err(|e| errors.push(e.to_string())).ok();
    LedgerSummary {
        ledger: l.clone(),
        ih11_dim: ih,
        mw_rank: mw,
        extremal: ih.map(|d| d == 0),
        picard_maximal: is_picard_maximal(l),
        errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(h11: u64, rho: u64, m: &[u64]) -> RankLedger {
        RankLedger::new(h11, rho, m.to_vec(), false).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mw_rank(&l(10, 10, &[4, 4, 1, 1])).unwrap(), 2);
        assert_eq!(mw_rank(&l(2, 2, &[])).unwrap(), 0);
        assert_eq!(mw_rank(&l(10, 10, &[5, 5])).unwrap(), 0);
        assert_eq!(ih11_dim(&l(10, 10, &[4, 4, 1, 1])).unwrap(), 2);
        assert_eq!(ih11_dim(&l(10, 10, &[5, 5])).unwrap(), 0);
        assert_eq!(ih11_dim(&l(2, 2, &[])).unwrap(), 0);
    }

    #[test]
    fn predicates() {
        let a = l(10, 10, &[5, 5]);
        assert!(is_extremal(&a).unwrap() && is_picard_maximal(&a));
        let b = l(10, 8, &[5, 5]);
        assert!(is_extremal(&b).unwrap() && !is_picard_maximal(&b));
        assert!(matches!(mw_rank(&b), Err(LedgerError::Negative { value: -2, .. })));
        let c = l(10, 10, &[4, 4, 1, 1]);
        assert!(is_picard_maximal(&c) && !is_extremal(&c).unwrap());
    }

    #[test]
    fn invalid_ledgers() {
        assert!(RankLedger::new(5, 6, vec![], false).is_err());
        assert!(RankLedger::new(5, 5, vec![0], false).is_err());
        let fixed = RankLedger::new(5, 5, vec![], true).unwrap();
        assert_eq!(mw_rank(&fixed), Err(LedgerError::FixedPart));
    }

    #[test]
    fn parsing() {
        let p = RankLedger::parse("h11=10 rho=10 fibers=5,5").unwrap();
        assert_eq!(p, l(10, 10, &[5, 5]));
        assert!(RankLedger::parse("rho=1").is_err());
        assert!(RankLedger::parse("h11=3 rho=2 fibers=a").is_err());
    }
}
