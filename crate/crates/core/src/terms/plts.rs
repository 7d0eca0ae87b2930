//! Probabilistic linguistic term sets: discrete terms with probabilities.
//!
//! Kept as the baseline representation. Its score is the probability-weighted
//! mean subscript, which for evidence split symmetrically around `s_0` lands on
//! `s_0` even when `s_0` itself was given no probability at all.

use crate::error::{Error, Result};
use crate::scale::{LinguisticScale, TermCoord};

use super::FuzzyIntervalTerm;

/// `{(term, probability)}` with nonnegative probabilities summing to at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticTermSet {
    entries: Vec<(TermCoord, f64)>,
}

impl ProbabilisticTermSet {
    pub fn new(scale: &LinguisticScale, entries: Vec<(TermCoord, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for &(term, prob) in &entries {
            scale.check(term)?;
            if !(prob >= 0.0 && prob.is_finite()) {
                return Err(Error::Parameter {
                    name: "probability",
                    value: prob,
                    min: 0.0,
                    max: 1.0,
                });
            }
            total += prob;
        }
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidTerm(format!(
                "probabilities sum to {total}, which exceeds 1"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(TermCoord, f64)] {
        &self.entries
    }

    fn total(&self) -> Result<f64> {
        let total: f64 = self.entries.iter().map(|e| e.1).sum();
        if total > 0.0 {
            Ok(total)
        } else {
            Err(Error::EmptyEvidence)
        }
    }

    /// The term at the probability-weighted mean subscript. Both hierarchies are
    /// averaged, which is the same as averaging unit values.
    pub fn score(&self) -> Result<TermCoord> {
        let total = self.total()?;
        let (t, k) = self
            .entries
            .iter()
            .fold((0.0, 0.0), |(t, k), (term, p)| (t + term.t * p, k + term.k * p));
        Ok(TermCoord::new(t / total, k / total))
    }

    /// `sqrt(Σ (p (r − ᾱ))² / Σ p)` over first-hierarchy-equivalent subscripts
    /// `r = t + k/ζ`.
    pub fn deviation(&self, scale: &LinguisticScale) -> Result<f64> {
        let total = self.total()?;
        let zeta = scale.zeta() as f64;
        let subscript = |c: &TermCoord| c.t + c.k / zeta;
        let mean = self.entries.iter().map(|(c, p)| subscript(c) * p).sum::<f64>() / total;
        let sq: f64 = self
            .entries
            .iter()
            .map(|(c, p)| (p * (subscript(c) - mean)).powi(2))
            .sum();
        Ok((sq / total).sqrt())
    }

    /// Reads each entry as a point interval with fuzzy degree `1 − probability`.
    pub fn to_point_intervals(&self, scale: &LinguisticScale) -> Result<Vec<FuzzyIntervalTerm>> {
        self.entries
            .iter()
            .map(|&(term, p)| FuzzyIntervalTerm::new(scale, term, term, 1.0 - p.min(1.0)))
            .collect()
    }
}
