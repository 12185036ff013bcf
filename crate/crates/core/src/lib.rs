//! Elliptic Fermat numbers: the sequence F_k = e_k / e_{k-1} of denominator
//! ratios of 2^k P on y^2 = x^3 + a x^2 + b x + c, with exact generation,
//! the tau recurrence, order checks, compositeness criteria and the CM curve
//! y^2 = x^3 - 2x.

pub mod arith;
pub mod cm;
pub mod compositeness;
pub mod curve;
pub mod error;
pub mod fermat;
pub mod intser;
pub mod order;
pub mod tau;

pub use rug::{Integer, Rational};

pub use arith::{factorize, FactorBudget, Factorization};
pub use curve::{Curve, CurveSpec, ModCurve, ModPoint, PointSpec, QPoint};
pub use error::{Error, Result};
pub use fermat::{generate_direct, generate_recurrence, FermatState, GenerateOptions, SequenceCache};
pub use order::{OrderCertificate, OrderClaim};
pub use tau::{tau_for_all_k, TauOptions};
