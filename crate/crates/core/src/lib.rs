pub mod constructions;
pub mod error;
pub mod exec;
pub mod expr;
pub mod forms;
pub mod profiles;
pub mod report;
pub mod scenario;
pub mod verify;

pub use error::{Error, ParseError, Result};
pub use exec::Exec;
pub use expr::{Expr, Point, Realization, Realizations};
pub use forms::{Chart, ChartRef, Domain, Form, VectorField};
pub use profiles::{make_profile, validate_pair, validate_profile, ProfileFunction, ProfileKind, ProfileParams, ProfileSet};
pub use report::VerificationReport;
