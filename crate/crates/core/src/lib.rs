//! Finite-field verification tools for Frey–Kani data, Kani's reducibility
//! criterion, Shioda–Tate bookkeeping and explicit curve families.

pub mod cli;
pub mod curves;
pub mod families;
pub mod field;
pub mod kani;
pub mod ledger;
pub mod oracle;
pub mod pairing;
