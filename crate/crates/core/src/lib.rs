//! Exact counting of homomorphisms from a finite group `A` into `GL_n(q)`.
//!
//! Given the irreducible degree profile of `A`, the crate computes the
//! polynomial `f_n(q) = |Hom(A, GL_n(q))|`, its leading term, the stability
//! threshold beyond which the leading-term formula is guaranteed, and an
//! independent brute-force count over small prime fields to check all of it.
//!
//! Modules, bottom-up:
//! - [`exactpoly`]: integer polynomials and `|GL_n(q)|`.
//! - [`profiles`]: degree profiles, group specs, splitting-field checks.
//! - [`minimizer`]: minimal tuples, `S_r`, `m_r`, `eps_r`, the threshold `N`.
//! - [`counting`]: orbit polynomials, `f_n`, leading term, variety dimension.
//! - [`oracle`]: brute-force enumeration over `GL_n(p)` for small `n`.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod counting;
pub mod exactpoly;
pub mod minimizer;
pub mod oracle;
pub mod profiles;

pub use counting::{hom_count_poly, leading_term, orbit_poly, variety_report, LeadingTerm};
pub use exactpoly::{gl_order_poly, IntPolynomial};
pub use minimizer::{minimal_tuples, stability_bound, IntTuple, MinimalReport, StabilityBound};
pub use profiles::{parse_group_spec, DegreeProfile, GroupSpec};

use thiserror::Error;

/// A computation would exceed one of the configurable work caps.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("resource limit exceeded: {what} needs {needed}, cap is {limit}")]
pub struct ResourceLimit {
    pub what: &'static str,
    pub needed: u128,
    pub limit: u128,
}
