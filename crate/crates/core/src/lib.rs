//! Closed-form summation of the Laguerre series
//! `S(±ν, ±j) = e^{−x} Σ_n xⁿ L_n^{(ν)}(x) / (1 ± ν ± j)_n`
//! in terms of generalized hypergeometric functions, together with the
//! brute-force series used to check them.

pub mod cli;
pub mod dd;
pub mod error;
pub mod hyper;
pub mod identities;
pub mod series;
pub mod specfun;
pub mod verify;

pub use dd::DoubleDouble;
pub use error::{Error, Result, Singularity};
pub use hyper::{eval_pfq, termination_index, HyperParams};
pub use identities::{
    closed_form, closed_form_singularity, evaluate, kummer, kummer_minus, kummer_plus,
    kummer_series_params, s_closed,
    s_direct, s_middle, transform_sides, CaseKind, ClosedForm, ClosedFormTerm, IdentityCase,
    KummerSign, Method, Sign, ZeroWeights,
};
pub use series::{SeriesEval, TruncationPolicy};
pub use verify::{run_grid, summarize, GridSpec, Status, Summary, VerifyRecord};
