//! Group decision making with double-hierarchy fuzzy interval linguistic
//! terms.
//!
//! Experts judge alternatives with linguistic intervals carrying a degree of
//! doubt ([`terms`]) on a two-level scale ([`scale`]). Pairwise judgements form
//! preference relations from which expert weights and priority vectors are
//! fitted ([`prefs`], [`solver`]); attribute weights evolve over periods by a
//! Markov chain fitted from linguistic assessments ([`markov`]). [`pipeline`]
//! runs the whole procedure on a [`scenario`] and [`report`] renders the
//! result.
//!
//! ```
//! use linguistic_decision::prefs::{collective_priorities, PreferenceRelation};
//!
//! let r = PreferenceRelation::consistent(&[0.6, 0.3, 0.1], 1.0)?;
//! let w = collective_priorities(&[r], &[1.0])?.vector;
//! assert!((w[0] - 0.6).abs() < 1e-9);
//! # Ok::<(), linguistic_decision::Error>(())
//! ```

pub mod error;
pub mod markov;
pub mod pipeline;
pub mod prefs;
pub mod report;
pub mod scale;
pub mod scenario;
pub mod solver;
pub mod terms;

pub use error::{Error, Result};
pub use scale::{LinguisticScale, TermCoord};
