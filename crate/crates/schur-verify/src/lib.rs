//! Executable inequality checking for Schur-type sums over partially
//! ordered algebraic structures.
//!
//! The crate turns a family of generalized Schur inequalities into
//! hypothesis predicates and margin evaluators that run over pluggable
//! structures — real multiplication, inner products, quadratic forms,
//! quadrature functionals, and four matrix products — with randomized
//! verification campaigns, an exact-rational oracle, and a numeric
//! falsifier for the converse direction.
//!
//! ```
//! use schur_verify::engine::{check_hypothesis, eval_margin, CaseId, SchurInstance};
//! use schur_verify::gfun::GFunctionSpec;
//! use schur_verify::structure::Structure;
//!
//! let inst = SchurInstance::scalar(&[3.0, 2.0, 1.0], &[1.0, 1.0, 1.0],
//!     GFunctionSpec::identity());
//! let h = check_hypothesis(CaseId::S3, &Structure::RealMul, &inst, 1e-9).unwrap();
//! assert!(h.satisfied);
//! let m = eval_margin(CaseId::S3, &Structure::RealMul, &inst).unwrap();
//! assert!((m.value - 3.0).abs() < 1e-12);
//! ```

pub mod domain;
pub mod element;
pub mod engine;
pub mod error;
pub mod exact;
pub mod gfun;
pub mod jacobi;
pub mod structure;
pub mod verify;

pub use element::{cmp, Element, OrderResult, OrderTag, SymMat};
pub use engine::{check_hypothesis, eval_margin, CaseId, Margin, SchurInstance};
pub use error::{Error, Result};
pub use structure::Structure;
