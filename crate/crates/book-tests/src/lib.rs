//! Runs the guide's code listings as doc-tests, one module per chapter so a
//! failure names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/scale.md")]
pub mod scale {}
#[doc = include_str!("../../../book/src/terms.md")]
pub mod terms {}
#[doc = include_str!("../../../book/src/preferences.md")]
pub mod preferences {}
#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}
#[doc = include_str!("../../../book/src/markov.md")]
pub mod markov {}
#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}
