//! Preference relations and expert weighting.
//!
//! A [`PreferenceRelation`] compares `m` alternatives pairwise with peak
//! interval terms. It is additive-reciprocal about `s0(o0)`: in unit space the
//! lower end of `(i, j)` and the upper end of `(j, i)` sum to one, and both
//! entries carry the same certainty.
//!
//! Expert weights come from three sources that are blended convexly:
//!
//! * outer weights from the pairwise distances between experts,
//! * inner weights from each expert's self-consistency, through an entropy,
//! * trust degrees assigned by the decision maker.
//!
//! A relation is consistent when its score matrix has the form
//! `E_ij = w_i − w_j + 0.5`. The indirect score through a third alternative
//! `v` is `E_iv − E_jv + 0.5`, which reproduces `E_ij` exactly on consistent
//! relations.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{self, Positivity, SimplexSolution, SimplexWlsProblem, WlsTerm};
use crate::terms::PeakIntervalTerm;

/// Tolerance for the reciprocity and diagonal checks.
pub const RECIPROCITY_TOLERANCE: f64 = 1e-9;

/// Entropy values are floored here before inversion.
pub const ENTROPY_FLOOR: f64 = 1e-12;

/// `m × m` matrix of peak interval terms, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceRelation {
    m: usize,
    entries: Vec<PeakIntervalTerm>,
}

/// Which rule an entry breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// The diagonal must be the certain point `s0(o0)`.
    Diagonal,
    /// `g(lower_ij) + g(upper_ji) = 1` and `g(upper_ij) + g(lower_ji) = 1`.
    Reciprocity,
    /// `p_ij = p_ji`.
    ProbabilityReciprocity,
}

/// A broken rule at a zero-based entry `(row, col)`. Reciprocity violations
/// are reported once, at the upper-triangle position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.rule {
            Rule::Diagonal => "diagonal entry is not the certain point s0(o0)",
            Rule::Reciprocity => "interval is not reciprocal to its mirror entry",
            Rule::ProbabilityReciprocity => "certainty differs from its mirror entry",
        };
        write!(f, "entry ({}, {}): {what}", self.row, self.col)
    }
}

impl PreferenceRelation {
    /// Builds a relation from rows. Only the shape is checked here; see
    /// [`validate`](Self::validate).
    pub fn new(rows: Vec<Vec<PeakIntervalTerm>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Shape(
                "a preference relation needs at least one alternative".into(),
            ));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {m}", r.len())));
        }
        Ok(Self {
            m,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// The consistent relation of point terms `E_ij = (w_i − w_j)/2 + 0.5`,
    /// all with certainty `p`. [`collective_priorities`] recovers `w` from it.
    pub fn consistent(w: &[f64], p: f64) -> Result<Self> {
        let rows = (0..w.len())
            .map(|i| {
                (0..w.len())
                    .map(|j| {
                        if i == j {
                            Ok(PeakIntervalTerm::indifference())
                        } else {
                            PeakIntervalTerm::unit_point(0.5 * (w[i] - w[j]) + 0.5, p)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &PeakIntervalTerm {
        &self.entries[i * self.m + j]
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let tol = RECIPROCITY_TOLERANCE;
        for i in 0..self.m {
            let d = self.entry(i, i);
            if (d.lower() - 0.5).abs() > tol || (d.upper() - 0.5).abs() > tol || (d.p() - 1.0).abs() > tol {
                out.push(Violation {
                    row: i,
                    col: i,
                    rule: Rule::Diagonal,
                });
            }
            for j in i + 1..self.m {
                let (a, b) = (self.entry(i, j), self.entry(j, i));
                if (a.lower() + b.upper() - 1.0).abs() > tol || (a.upper() + b.lower() - 1.0).abs() > tol {
                    out.push(Violation {
                        row: i,
                        col: j,
                        rule: Rule::Reciprocity,
                    });
                }
                if (a.p() - b.p()).abs() > tol {
                    out.push(Violation {
                        row: i,
                        col: j,
                        rule: Rule::ProbabilityReciprocity,
                    });
                }
            }
        }
        out
    }

    /// Entrywise peak scores; the diagonal is exactly 0.5.
    pub fn score_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(
            self.m,
            self.m,
            |i, j| if i == j { 0.5 } else { self.entry(i, j).score() },
        )
    }

    /// Entrywise certainties.
    pub fn certainty_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| self.entry(i, j).p())
    }
}

fn same_size(relations: &[PreferenceRelation]) -> Result<usize> {
    let m = relations
        .first()
        .ok_or_else(|| Error::Shape("no preference relations".into()))?
        .m;
    if let Some(r) = relations.iter().find(|r| r.m != m) {
        return Err(Error::Shape(format!("relations compare {m} and {} alternatives", r.m)));
    }
    Ok(m)
}

/// `sqrt( 2/(m(m−1)) Σ_{i<j} (E^p_ij p^p_ij − E^q_ij p^q_ij)² )`.
pub fn distance(a: &PreferenceRelation, b: &PreferenceRelation) -> Result<f64> {
    if a.m != b.m {
        return Err(Error::Shape(format!(
            "relations compare {} and {} alternatives",
            a.m, b.m
        )));
    }
    let m = a.m;
    if m < 2 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            let (x, y) = (a.entry(i, j), b.entry(i, j));
            sum += (x.score() * x.p() - y.score() * y.p()).powi(2);
        }
    }
    Ok((2.0 / (m * (m - 1)) as f64 * sum).sqrt())
}

/// Symmetric matrix of pairwise [`distance`]s.
pub fn distance_matrix(relations: &[PreferenceRelation]) -> Result<DMatrix<f64>> {
    same_size(relations)?;
    let n = relations.len();
    let mut d = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in p + 1..n {
            let v = distance(&relations[p], &relations[q])?;
            d[(p, q)] = v;
            d[(q, p)] = v;
        }
    }
    Ok(d)
}

/// `ω_k = Σ_j d_jk / Σ_k Σ_j d_jk`, uniform when every distance is zero.
///
/// Experts farther from the others receive more weight.
pub fn outer_weights_from_distances(d: &DMatrix<f64>) -> Vec<f64> {
    let n = d.ncols();
    let cols: Vec<f64> = (0..n).map(|k| d.column(k).sum()).collect();
    let total: f64 = cols.iter().sum();
    if total > 0.0 {
        cols.iter().map(|c| c / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    }
}

pub fn outer_weights(relations: &[PreferenceRelation]) -> Result<Vec<f64>> {
    if relations.len() < 2 {
        return Err(Error::Shape("outer weights need at least two experts".into()));
    }
    Ok(outer_weights_from_distances(&distance_matrix(relations)?))
}

/// `E_ij^{−v} = E_iv − E_jv + 0.5` for `i < j`, `v ∉ {i, j}`.
pub fn indirect_score(e: &DMatrix<f64>, i: usize, j: usize, v: usize) -> Result<f64> {
    let m = e.nrows();
    if i >= m || j >= m || v >= m {
        return Err(Error::Index(format!("({i}, {j}) through {v} in a {m}x{m} matrix")));
    }
    if i >= j || v == i || v == j {
        return Err(Error::Index(format!(
            "indirect score needs i < j and v distinct from both, got ({i}, {j}) through {v}"
        )));
    }
    Ok(e[(i, v)] - e[(j, v)] + 0.5)
}

/// Inner deviation of one expert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerDeviation {
    pub value: f64,
    /// `m < 3`, so there was nothing to compare.
    pub no_indirect_path: bool,
}

/// Sums `|E_ij − E_ij^{−v}|` over all triples `v`, `i < j` with `i, j ≠ v`.
///
/// Written as the sum of `D = 0.5 + |E_ij − E_ij^{−v}|` minus a constant: the
/// default constant is `0.5` per triple, so the value is never negative. With
/// `literal_constant` the constant is `0.5·m(m−1)` instead, which agrees with
/// the default only at `m = 4` and can go negative for `m = 3`.
pub fn inner_deviation_from_scores(e: &DMatrix<f64>, literal_constant: bool) -> InnerDeviation {
    let m = e.nrows();
    if m < 3 {
        return InnerDeviation {
            value: 0.0,
            no_indirect_path: true,
        };
    }
    let mut sum = 0.0;
    let mut triples = 0usize;
    for v in 0..m {
        for i in 0..m {
            for j in i + 1..m {
                if i == v || j == v {
                    continue;
                }
                let indirect = e[(i, v)] - e[(j, v)] + 0.5;
                sum += 0.5 + (e[(i, j)] - indirect).abs();
                triples += 1;
            }
        }
    }
    let constant = if literal_constant { m * (m - 1) } else { triples };
    InnerDeviation {
        value: sum - 0.5 * constant as f64,
        no_indirect_path: false,
    }
}

pub fn inner_deviation(r: &PreferenceRelation, literal_constant: bool) -> InnerDeviation {
    inner_deviation_from_scores(&r.score_matrix(), literal_constant)
}

/// Inner weights together with the experts whose entropy hit the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerWeights {
    pub weights: Vec<f64>,
    pub floored: Vec<usize>,
}

/// `le_k = −(1/log₂ m)·p_k·log₂ p_k` with `p_k = u_k / Σ u`, and `ω_k ∝ 1/le_k`.
///
/// `m` is the number of alternatives. Entropies below [`ENTROPY_FLOOR`] are
/// raised to it; all deviations zero gives the uniform vector.
pub fn inner_weights(deviations: &[f64], m: usize) -> Result<InnerWeights> {
    let n = deviations.len();
    if n < 2 {
        return Err(Error::Shape("inner weights need at least two experts".into()));
    }
    if m < 2 {
        return Err(Error::Shape("inner weights need at least two alternatives".into()));
    }
    if let Some(&u) = deviations.iter().find(|u| !(u.is_finite() && **u >= 0.0)) {
        return Err(Error::Parameter {
            name: "inner deviation",
            value: u,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let total: f64 = deviations.iter().sum();
    if total == 0.0 {
        return Ok(InnerWeights {
            weights: vec![1.0 / n as f64; n],
            floored: Vec::new(),
        });
    }
    let norm = 1.0 / (m as f64).log2();
    let mut floored = Vec::new();
    let inverse: Vec<f64> = deviations
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let p = u / total;
            let le = if p > 0.0 { -norm * p * p.log2() } else { 0.0 };
            if le < ENTROPY_FLOOR {
                floored.push(k);
                1.0 / ENTROPY_FLOOR
            } else {
                1.0 / le
            }
        })
        .collect();
    let s: f64 = inverse.iter().sum();
    Ok(InnerWeights {
        weights: inverse.iter().map(|v| v / s).collect(),
        floored,
    })
}

/// `ψ / Σ ψ`.
pub fn trust_weights(psi: &[f64]) -> Result<Vec<f64>> {
    for &v in psi {
        crate::scale::check_fraction("trust", v)?;
    }
    let total: f64 = psi.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyTrust);
    }
    Ok(psi.iter().map(|v| v / total).collect())
}

/// Coefficients of the convex blend of outer, inner and trust weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Blend {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for Blend {
    fn default() -> Self {
        Self {
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
        }
    }
}

impl Blend {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            crate::scale::check_fraction(name, v)?;
        }
        let s = self.alpha + self.beta + self.gamma;
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("blend coefficients sum to {s}, not 1")));
        }
        Ok(())
    }
}

/// `α·out + β·inn + γ·tru`.
pub fn blend_weights(out: &[f64], inn: &[f64], tru: &[f64], blend: Blend) -> Result<Vec<f64>> {
    blend.check()?;
    if out.len() != inn.len() || out.len() != tru.len() {
        return Err(Error::Shape(format!(
            "weight vectors have lengths {}, {} and {}",
            out.len(),
            inn.len(),
            tru.len()
        )));
    }
    for v in [out, inn, tru] {
        let s: f64 = v.iter().sum();
        if (s - 1.0).abs() > 1e-9 || v.iter().any(|x| *x < 0.0) {
            return Err(Error::Config(format!(
                "weight vector {v:?} is not a probability vector"
            )));
        }
    }
    Ok((0..out.len())
        .map(|k| blend.alpha * out[k] + blend.beta * inn[k] + blend.gamma * tru[k])
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpertWeightReport {
    pub outer: Vec<f64>,
    pub inner: Vec<f64>,
    pub trust: Vec<f64>,
    pub blended: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub inner_deviations: Vec<f64>,
    /// Experts whose entropy was raised to the floor.
    pub entropy_floored: Vec<usize>,
    pub no_indirect_path: bool,
}

/// Outer, inner, trust and blended weights for one attribute.
pub fn expert_weights(
    relations: &[PreferenceRelation],
    psi: &[f64],
    blend: Blend,
    literal_constant: bool,
) -> Result<ExpertWeightReport> {
    let m = same_size(relations)?;
    if psi.len() != relations.len() {
        return Err(Error::Shape(format!(
            "{} trust degrees for {} experts",
            psi.len(),
            relations.len()
        )));
    }
    let outer = outer_weights(relations)?;
    let devs: Vec<InnerDeviation> = relations.iter().map(|r| inner_deviation(r, literal_constant)).collect();
    let inner_deviations: Vec<f64> = devs.iter().map(|d| d.value).collect();
    let inner = inner_weights(&inner_deviations, m)?;
    let trust = trust_weights(psi)?;
    let blended = blend_weights(&outer, &inner.weights, &trust, blend)?;
    Ok(ExpertWeightReport {
        outer,
        inner: inner.weights,
        trust,
        blended,
        alpha: blend.alpha,
        beta: blend.beta,
        gamma: blend.gamma,
        inner_deviations,
        entropy_floored: inner.floored,
        no_indirect_path: devs.iter().any(|d| d.no_indirect_path),
    })
}

/// The weighted least-squares problem for a collective priority vector:
///
/// ```text
/// Σ_k ω_k Σ_{i<j} c^k_ij ((w_i − w_j)/2 − E^k_ij + 0.5)²
/// ```
///
/// over strictly positive `w` on the simplex, where `c^k` are the per-entry
/// weights (the certainties, usually).
pub fn priority_problem(
    scores: &[DMatrix<f64>],
    entry_weights: &[DMatrix<f64>],
    expert_weights: &[f64],
) -> Result<SimplexWlsProblem> {
    if scores.is_empty() || scores.len() != entry_weights.len() || scores.len() != expert_weights.len() {
        return Err(Error::Shape(format!(
            "{} score matrices, {} weight matrices, {} expert weights",
            scores.len(),
            entry_weights.len(),
            expert_weights.len()
        )));
    }
    let m = scores[0].nrows();
    let mut terms = Vec::new();
    for ((e, c), &omega) in scores.iter().zip(entry_weights).zip(expert_weights) {
        if e.shape() != (m, m) || c.shape() != (m, m) {
            return Err(Error::Shape(format!("expected {m}x{m} matrices")));
        }
        for i in 0..m {
            for j in i + 1..m {
                let mut row = vec![0.0; m];
                row[i] = 0.5;
                row[j] = -0.5;
                terms.push(WlsTerm {
                    row,
                    target: e[(i, j)] - 0.5,
                    weight: omega * c[(i, j)],
                });
            }
        }
    }
    SimplexWlsProblem::new(m, terms, Positivity::Strict)
}

/// Collective priority vector of `relations` under `weights`.
pub fn collective_priorities(relations: &[PreferenceRelation], weights: &[f64]) -> Result<SimplexSolution> {
    same_size(relations)?;
    let scores: Vec<_> = relations.iter().map(|r| r.score_matrix()).collect();
    let certainties: Vec<_> = relations.iter().map(|r| r.certainty_matrix()).collect();
    solver::solve(&priority_problem(&scores, &certainties, weights)?)
}
