//! Plane curves of fixed degree over small finite fields: enumeration,
//! smoothness, point counts, and the exact densities they are compared with.

pub mod gf;
pub mod plane;
pub mod poly;
pub mod scalar;
pub mod sieve;
pub mod smooth;
pub mod stats;

pub use gf::{make_field, FieldDesc, FieldElem, FieldError, FieldSpec};
pub use poly::{parse_form, AffinePoly, PolyError, TernaryForm};
pub use scalar::Scalar;

pub type Rational = num_rational::BigRational;

pub type ExactModel = stats::ModelDist<Rational>;
pub type FloatModel = stats::ModelDist<f64>;
