//! Energy-minimizing resource allocation for an OFDMA collaborative mobile
//! cloud whose terminals decode information and harvest energy from radio
//! signals.
//!
//! A base station delivers each data segment to one scheduled terminal, which
//! multicasts it to its peers over a short-range band while the non-scheduled
//! terminals harvest energy from the downlink signal. The crate jointly picks
//! the scheduled terminal, one subchannel per link, and both transmit powers
//! to minimize the net energy of the whole exchange:
//!
//! - [`scenario`] draws reproducible topologies and Rician-faded channels,
//! - [`energy`] holds the rate/energy bookkeeping and the consumption-ratio
//!   metrics,
//! - [`fracprog`] is the iterative ratio solver both links run through,
//! - [`dualalloc`] solves the fixed-ratio subchannel/power subproblem by dual
//!   decomposition with closed-form water-filling,
//! - [`scheduler`] assembles per-candidate allocations into the joint
//!   decision,
//! - [`baselines`] provides the reference schemes and the exhaustive-search
//!   oracle,
//! - [`sim`] runs seeded Monte-Carlo comparisons and writes CSV tables and
//!   SVG plots.
//!
//! Start from the `examples/` directory for runnable walkthroughs of each
//! capability, or from [`sim::run`] for the full experiment pipeline.

pub mod baselines;
pub mod dualalloc;
pub mod energy;
pub mod error;
pub mod fracprog;
pub mod scenario;
pub mod scheduler;
pub mod seeding;
pub mod sim;

pub use error::{Error, Result};
