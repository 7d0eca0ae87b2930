//! Fuzzy interval linguistic terms.
//!
//! An expert describes an evaluation as one or more linguistic intervals, each
//! with a *fuzzy degree* `fd ∈ [0, 1]`: the residual doubt that the true
//! evaluation falls inside it. A [`FuzzyIntervalSet`] with `Σ fd = 0` covers the
//! complete information, `Σ fd > 0` leaves partial uncertainty, and `Σ fd = 1`
//! is complete uncertainty.
//!
//! The interval with the smallest fuzzy degree is the *peak*
//! ([`PeakIntervalTerm`]); it carries certainty `p = 1 − fd`. Inside the peak,
//! evaluations are modelled as a normal density whose `±3σ` band spans the
//! interval ([`NormalPeakModel`]), so in unit space
//!
//! ```text
//! score μ = (g_l + g_r) / 2        deviation σ = (g_r − g_l) / 6
//! ```
//!
//! All quantities are held in unit space; term coordinates are produced on
//! demand with the scale.

mod integral;
pub mod normal;
mod plts;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::{check_fraction, LinguisticScale, TermCoord};

pub use integral::{integrate_unit, linguistic_integral, QUADRATURE_TOLERANCE};
pub use normal::{Clamped, NormalPeakModel};
pub use plts::ProbabilisticTermSet;

/// Width below which an interval is treated as a point.
const POINT_WIDTH: f64 = 1e-15;

fn check_interval(lower: f64, upper: f64) -> Result<()> {
    if !(lower.is_finite() && upper.is_finite()) {
        return Err(Error::InvalidTerm("interval endpoints must be finite".into()));
    }
    if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) {
        return Err(Error::InvalidTerm(format!(
            "unit endpoints [{lower}, {upper}] leave [0, 1]"
        )));
    }
    if lower > upper {
        return Err(Error::InvalidTerm(format!(
            "lower endpoint {lower} exceeds upper endpoint {upper}"
        )));
    }
    Ok(())
}

/// One member interval of a [`FuzzyIntervalSet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyIntervalTerm {
    lower: f64,
    upper: f64,
    fd: f64,
}

impl FuzzyIntervalTerm {
    pub fn new(scale: &LinguisticScale, lower: TermCoord, upper: TermCoord, fd: f64) -> Result<Self> {
        Self::from_unit(scale.to_unit(lower)?, scale.to_unit(upper)?, fd)
    }

    pub fn from_unit(lower: f64, upper: f64, fd: f64) -> Result<Self> {
        check_interval(lower, upper)?;
        check_fraction("fd", fd)?;
        Ok(Self { lower, upper, fd })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn fd(&self) -> f64 {
        self.fd
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// The interval as a peak term with `p = 1 − fd`.
    pub fn to_peak(&self) -> PeakIntervalTerm {
        PeakIntervalTerm {
            lower: self.lower,
            upper: self.upper,
            p: 1.0 - self.fd,
        }
    }
}

/// A nonempty set of fuzzy intervals with `Σ fd ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyIntervalSet {
    intervals: Vec<FuzzyIntervalTerm>,
}

impl FuzzyIntervalSet {
    pub fn new(intervals: Vec<FuzzyIntervalTerm>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidTerm(
                "a fuzzy interval set needs at least one interval".into(),
            ));
        }
        let total: f64 = intervals.iter().map(|i| i.fd).sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidTerm(format!(
                "fuzzy degrees sum to {total}, which exceeds 1"
            )));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[FuzzyIntervalTerm] {
        &self.intervals
    }

    pub fn total_fd(&self) -> f64 {
        self.intervals.iter().map(|i| i.fd).sum()
    }

    /// The minimum-fd interval; see [`peak_of`].
    pub fn peak(&self) -> PeakIntervalTerm {
        peak_of(&self.intervals).expect("set is nonempty")
    }
}

/// Picks the interval with the smallest fuzzy degree.
///
/// Ties go to the narrowest interval, then to the smallest lower endpoint.
/// Returns `None` for an empty slice.
pub fn peak_of(intervals: &[FuzzyIntervalTerm]) -> Option<PeakIntervalTerm> {
    intervals
        .iter()
        .min_by(|a, b| {
            a.fd.total_cmp(&b.fd)
                .then(a.width().total_cmp(&b.width()))
                .then(a.lower.total_cmp(&b.lower))
        })
        .map(FuzzyIntervalTerm::to_peak)
}

/// A peak interval `[h_l, h_r]` with certainty `p`, held in unit space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakIntervalTerm {
    lower: f64,
    upper: f64,
    p: f64,
}

impl PeakIntervalTerm {
    pub fn new(scale: &LinguisticScale, lower: TermCoord, upper: TermCoord, p: f64) -> Result<Self> {
        Self::from_unit(scale.to_unit(lower)?, scale.to_unit(upper)?, p)
    }

    pub fn point(scale: &LinguisticScale, term: TermCoord, p: f64) -> Result<Self> {
        Self::new(scale, term, term, p)
    }

    pub fn from_unit(lower: f64, upper: f64, p: f64) -> Result<Self> {
        check_interval(lower, upper)?;
        check_fraction("p", p)?;
        Ok(Self { lower, upper, p })
    }

    pub fn unit_point(at: f64, p: f64) -> Result<Self> {
        Self::from_unit(at, at, p)
    }

    /// The diagonal element of a preference relation: the point `s_0<o_0>` with `p = 1`.
    pub fn indifference() -> Self {
        Self {
            lower: 0.5,
            upper: 0.5,
            p: 1.0,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn fd(&self) -> f64 {
        1.0 - self.p
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_point(&self) -> bool {
        self.width() <= POINT_WIDTH
    }

    pub fn lower_coord(&self, scale: &LinguisticScale) -> Result<TermCoord> {
        scale.from_unit(self.lower)
    }

    pub fn upper_coord(&self, scale: &LinguisticScale) -> Result<TermCoord> {
        scale.from_unit(self.upper)
    }

    /// The normal model of the peak.
    pub fn model(&self) -> NormalPeakModel {
        NormalPeakModel {
            mu: self.score(),
            sigma: self.sigma(),
        }
    }

    /// Score under the normal peak model: the unit midpoint.
    pub fn score(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// Deviation under the normal peak model, `(g_r − g_l) / 6`.
    pub fn sigma(&self) -> f64 {
        self.width() / 6.0
    }

    /// The linguistic expectation `g⁻¹(score)`.
    pub fn expectation_term(&self, scale: &LinguisticScale) -> Result<TermCoord> {
        scale.from_unit(self.score())
    }

    /// The linguistic deviation `g⁻¹(σ + g(s_0<o_0>))`.
    pub fn linguistic_sigma(&self, scale: &LinguisticScale) -> Result<TermCoord> {
        scale.from_unit(self.sigma() + 0.5)
    }

    /// Expectation `∫ x f(x) dx` over the peak for an arbitrary mass density `f`
    /// on unit space. With the normal peak density this is `μ` times the
    /// `±3σ` mass.
    pub fn expectation_with<F: Fn(f64) -> f64>(&self, density: F) -> Result<f64> {
        integrate_unit(|x| x * density(x), self.lower, self.upper, QUADRATURE_TOLERANCE)
    }

    /// Orders by score, then prefers the smaller deviation.
    pub fn compare(&self, other: &Self) -> Ordering {
        self.score()
            .total_cmp(&other.score())
            .then_with(|| other.sigma().total_cmp(&self.sigma()))
    }
}

/// Scenario-file encoding of a peak term:
/// `{"interval": [[t,k],[t,k]], "p": 0.8}` or `{"point": [t,k], "p": 1}`.
///
/// Coordinates may also be written as literals such as `"s-2(o1)"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PeakTermSpec {
    Interval { interval: [TermCoord; 2], p: f64 },
    Point { point: TermCoord, p: f64 },
}

impl PeakTermSpec {
    pub fn resolve(&self, scale: &LinguisticScale) -> Result<PeakIntervalTerm> {
        match *self {
            PeakTermSpec::Interval { interval: [lo, hi], p } => PeakIntervalTerm::new(scale, lo, hi, p),
            PeakTermSpec::Point { point, p } => PeakIntervalTerm::point(scale, point, p),
        }
    }

    pub fn from_term(scale: &LinguisticScale, term: &PeakIntervalTerm) -> Result<Self> {
        let lower = term.lower_coord(scale)?;
        Ok(if term.is_point() {
            PeakTermSpec::Point {
                point: lower,
                p: term.p,
            }
        } else {
            PeakTermSpec::Interval {
                interval: [lower, term.upper_coord(scale)?],
                p: term.p,
            }
        })
    }
}
