//! Interval operators under the normal peak model.
//!
//! Each operand is read as `N(μ, σ²)` in unit space and the result interval is
//! rebuilt as `[μ − 3σ, μ + 3σ]`. Results leaving `[0, 1]` are clamped and the
//! clamp is reported. The certainty of a result is the smaller operand
//! certainty.

use crate::error::{Error, Result};
use crate::scale::check_fraction;

use super::PeakIntervalTerm;

/// A value together with whether it had to be clamped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped<T> {
    pub value: T,
    pub clamped: bool,
}

/// `N(μ, σ²)` on unit space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPeakModel {
    pub mu: f64,
    pub sigma: f64,
}

impl NormalPeakModel {
    /// Probability density at `x`. Only meaningful for `σ > 0`.
    pub fn density(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    /// Rebuilds the `±3σ` interval with certainty `p`, clamping to `[0, 1]`.
    pub fn to_interval(&self, p: f64) -> Clamped<PeakIntervalTerm> {
        let (lo, hi) = (self.mu - 3.0 * self.sigma, self.mu + 3.0 * self.sigma);
        let (clo, chi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
        Clamped {
            value: PeakIntervalTerm {
                lower: clo,
                upper: chi,
                p,
            },
            clamped: clo != lo || chi != hi,
        }
    }
}

/// Sum of independent normals: `μ = μ₁ + μ₂`, `σ² = σ₁² + σ₂²`.
pub fn add(a: &PeakIntervalTerm, b: &PeakIntervalTerm) -> Clamped<PeakIntervalTerm> {
    let (ma, mb) = (a.model(), b.model());
    NormalPeakModel {
        mu: ma.mu + mb.mu,
        sigma: ma.sigma.hypot(mb.sigma),
    }
    .to_interval(a.p.min(b.p))
}

/// Precision-weighted fusion:
/// `μ = (μ₁σ₂² + μ₂σ₁²)/(σ₁² + σ₂²)`, `σ² = σ₁²σ₂²/(σ₁² + σ₂²)`.
///
/// A point operand dominates; two different points cannot be fused.
pub fn fuse(a: &PeakIntervalTerm, b: &PeakIntervalTerm) -> Result<Clamped<PeakIntervalTerm>> {
    let (ma, mb) = (a.model(), b.model());
    let p = a.p.min(b.p);
    let (va, vb) = (ma.sigma * ma.sigma, mb.sigma * mb.sigma);
    let model = match (a.is_point(), b.is_point()) {
        (true, true) if ma.mu != mb.mu => return Err(Error::DegenerateFusion { a: ma.mu, b: mb.mu }),
        (true, _) => NormalPeakModel { mu: ma.mu, sigma: 0.0 },
        (false, true) => NormalPeakModel { mu: mb.mu, sigma: 0.0 },
        (false, false) => NormalPeakModel {
            mu: (ma.mu * vb + mb.mu * va) / (va + vb),
            sigma: (va * vb / (va + vb)).sqrt(),
        },
    };
    Ok(model.to_interval(p))
}

/// `λI = [λμ − 3λσ, λμ + 3λσ]`; certainty unchanged.
pub fn scale(lambda: f64, a: &PeakIntervalTerm) -> Result<PeakIntervalTerm> {
    check_fraction("lambda", lambda)?;
    Ok(PeakIntervalTerm {
        lower: lambda * a.lower,
        upper: lambda * a.upper,
        p: a.p,
    })
}
