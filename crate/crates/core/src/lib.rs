//! Point counting and divisibility workbench for polynomial systems over
//! finite fields.
//!
//! The pipeline is: [`bounds`] computes the divisibility exponents for a
//! degree profile, [`counting`] enumerates points over `F_{q^ν}`,
//! [`zeta`] rebuilds the zeta function from the counts and checks that every
//! reciprocal zero and pole is divisible by `q^μ`, and [`harness`] ties the
//! stages together behind a JSON spec / report format.

pub mod bounds;
pub mod counting;
pub mod field;
pub mod harness;
pub mod poly;
pub(crate) mod serde_big;
pub mod zeta;

pub use bounds::{BoundsReport, DegreeProfile};
pub use counting::{Budget, CountKind, CountTable, Counter};
pub use field::{embed, make_field, FieldDesc, FieldElement};
pub use poly::{Mode, MultiPoly, PolySystem};
pub use zeta::{IntPolyT, ZetaFunction};
