//! Travelling thief problem (TTP) toolkit.
//!
//! A TTP solution is a cyclic tour through all cities plus a picking plan
//! over the items stored in those cities. The thief rents the knapsack per
//! time unit, and picked weight slows the tour down, so neither subproblem
//! can be scored in isolation. This crate provides:
//!
//! * instance parsing and the exact objective ([`instance`], [`eval`]),
//! * suffix-replay delta evaluation that is bit-identical to a full
//!   re-evaluation ([`eval`]),
//! * Delaunay / k-NN candidate edges and move enumeration ([`neighborhoods`]),
//! * greedy construction of tours and plans ([`construction`]),
//! * the alternating 2-OPT / bit-flip solver, two randomized baselines and a
//!   brute-force oracle ([`cosolver`]),
//! * runtime self-check suites shared by tests and the CLI ([`verification`]).
//!
//! City and item ids are 1-based in files and reports, 0-based everywhere in
//! this crate's API.

pub mod construction;
pub mod cosolver;
pub mod eval;
pub mod instance;
pub mod neighborhoods;
pub mod verification;

pub use eval::{evaluate_full, EvalState, PickingPlan, Tour};
pub use instance::Instance;
