//! Learner-to-gale constructions for concept classes in the
//! characteristic-sequence model, with exact finite-depth verification.
//!
//! Module map:
//! - [`entropy`]: binary entropy, cross entropy, inverse entropy and
//!   binomial tail counts with rigorous enclosures.
//! - [`gale`]: betting strategies, log-domain capital traces, exact
//!   martingale tables.
//! - [`classes`]: the block model, density and padded classes, sampling.
//! - [`learners`]: online, membership-query, equivalence-query and PAC
//!   learners plus the equivalence-to-online reduction.
//! - [`constructions`]: compilers from learners to gales, the padded gale
//!   and its diagonalisation adversary, closed-form capital bounds.
//! - [`oracles`]: brute-force references (counting gale, censuses).

pub mod bits;
pub mod classes;
pub mod constructions;
pub mod entropy;
pub mod error;
pub mod gale;
pub mod learners;
pub mod numeric;
pub mod oracles;

pub use error::{Error, Result};
