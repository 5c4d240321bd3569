//! Elliptic curve models over finite fields: group law, exhaustive counting,
//! rational torsion, subgroup enumeration, Vélu isogenies and isomorphisms.

mod count;
mod iso;
mod model;
mod torsion;
mod velu;

use thiserror::Error;

use crate::field::FieldError;

pub use count::{count_affine_prime, count_points, curves_with_trace, prime_character_table, trace_over_extension, PointCount, COUNT_BUDGET};
pub use iso::{isomorphisms, WeierstrassIso};
pub use model::{CubicForm, CurveModel, ModelMap, Point};
pub use torsion::{
    abstract_subgroups_of_order, smallest_basis, subgroups_of_order, torsion_basis, FiniteSubgroup,
    TorsionBasisResult, TorsionField, SYLOW_BUDGET,
};
pub use velu::{velu_isogeny, Isogeny};

pub(crate) use model::legendre_j_formula;
pub(crate) use torsion::combine;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("singular model")]
    Singular,
    #[error("coefficients or points live in different fields")]
    FieldMismatch,
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("operation not supported for this model: {0}")]
    UnsupportedModel(&'static str),
    #[error("level {0} is not supported")]
    UnsupportedLevel(u64),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("Hasse bound violated over F_{q}: trace {trace}")]
    HasseViolation { q: u64, trace: i64 },
    #[error("twisting by zero")]
    ZeroTwist,
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}
