//! Linguistic Markov assessments and attribute weights over periods.
//!
//! Experts assess how likely attention moves from one attribute (risk state)
//! to another with peak interval terms. The crisp transition matrix is fitted
//! row by row as a certainty-weighted least-squares problem on the simplex, and
//! the attribute weights of period `t` are the distribution reached from the
//! origin attribute after `Z + t − 1` transitions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{self, Positivity, SimplexWlsProblem, SolveStatus, WlsTerm};
use crate::terms::PeakIntervalTerm;

/// Row sums must match one within this tolerance.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

/// `q × q` terms; row `i` assesses transitions out of attribute `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticMarkovAssessment {
    q: usize,
    entries: Vec<PeakIntervalTerm>,
}

impl LinguisticMarkovAssessment {
    pub fn new(rows: Vec<Vec<PeakIntervalTerm>>) -> Result<Self> {
        let q = rows.len();
        if q == 0 {
            return Err(Error::Shape("an assessment needs at least one attribute".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != q) {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {q}", r.len())));
        }
        Ok(Self {
            q,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn entry(&self, i: usize, j: usize) -> &PeakIntervalTerm {
        &self.entries[i * self.q + j]
    }
}

fn check_rows(rows: &[Vec<f64>]) -> Result<()> {
    let q = rows.len();
    if q == 0 {
        return Err(Error::Shape("empty matrix".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != q {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {q}", row.len())));
        }
        if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::NotStochastic(format!("row {i} holds {v}")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(Error::NotStochastic(format!("row {i} sums to {s}")));
        }
    }
    Ok(())
}

/// A row-stochastic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TransitionMatrix {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for TransitionMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<TransitionMatrix> for Vec<Vec<f64>> {
    fn from(m: TransitionMatrix) -> Self {
        m.rows
    }
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        check_rows(&rows)?;
        Ok(Self { rows })
    }

    /// Accepts rows whose sums miss one by at most `slack`, as happens with
    /// matrices printed to a few decimals, and rescales them. Returns the
    /// matrix and the `(row, original sum)` of each rescaled row.
    pub fn renormalized(mut rows: Vec<Vec<f64>>, slack: f64) -> Result<(Self, Vec<(usize, f64)>)> {
        let mut changed = Vec::new();
        for (i, row) in rows.iter_mut().enumerate() {
            let s: f64 = row.iter().sum();
            let off = (s - 1.0).abs();
            if off > STOCHASTIC_TOLERANCE && off <= slack && row.iter().all(|v| *v >= 0.0) {
                row.iter_mut().for_each(|v| *v /= s);
                changed.push((i, s));
            }
        }
        Ok((Self::new(rows)?, changed))
    }

    pub fn identity(q: usize) -> Self {
        Self {
            rows: (0..q)
                .map(|i| (0..q).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn q(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Row vector times matrix.
    pub fn step(&self, v: &[f64]) -> Vec<f64> {
        let q = self.q();
        let mut out = vec![0.0; q];
        for (i, &vi) in v.iter().enumerate() {
            for (o, p) in out.iter_mut().zip(&self.rows[i]) {
                *o += vi * p;
            }
        }
        out
    }

    pub fn nonzero_count(&self) -> usize {
        self.rows.iter().flatten().filter(|v| **v != 0.0).count()
    }
}

/// Per-period attribute weights, one probability vector per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PeriodWeights {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for PeriodWeights {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<PeriodWeights> for Vec<Vec<f64>> {
    fn from(w: PeriodWeights) -> Self {
        w.rows
    }
}

impl PeriodWeights {
    /// Checks only that all periods have the same width and finite,
    /// nonnegative entries. Row sums are not enforced so that printed vectors
    /// that miss one (see the typo fixture in the tests) can still be injected.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let q = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || q == 0 {
            return Err(Error::Shape(
                "period weights need at least one period and attribute".into(),
            ));
        }
        for (t, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(Error::Shape(format!(
                    "period {t} has {} weights, expected {q}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::Shape(format!("period {t} holds weight {v}")));
            }
        }
        Ok(Self { rows })
    }

    pub fn periods(&self) -> usize {
        self.rows.len()
    }

    pub fn q(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Index of the first period whose weights do not sum to one.
    pub fn first_unnormalized(&self) -> Option<usize> {
        self.rows
            .iter()
            .position(|r| (r.iter().sum::<f64>() - 1.0).abs() > STOCHASTIC_TOLERANCE)
    }
}

/// A fitted transition matrix with per-row solver outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub matrix: TransitionMatrix,
    /// `(row, col)` entries fixed at zero because every expert gave the floor
    /// point with full certainty.
    pub pinned: Vec<(usize, usize)>,
    pub row_status: Vec<SolveStatus>,
}

fn is_certain_floor(t: &PeakIntervalTerm) -> bool {
    t.is_point() && t.upper() == 0.0 && t.p() == 1.0
}

/// Fits the transition matrix: each row minimizes
/// `Σ_j Σ_k p^k_ij (P_ij − E^k_ij)²` subject to `Σ_j P_ij = 1`, `P_ij > 0`,
/// after pinning unanimous certain-zero entries.
pub fn estimate_transition(assessments: &[LinguisticMarkovAssessment]) -> Result<Estimate> {
    let q = assessments
        .first()
        .ok_or_else(|| Error::Shape("no Markov assessments".into()))?
        .q;
    if let Some(a) = assessments.iter().find(|a| a.q != q) {
        return Err(Error::Shape(format!("assessments cover {q} and {} attributes", a.q)));
    }
    let mut rows = Vec::with_capacity(q);
    let mut pinned = Vec::new();
    let mut row_status = Vec::with_capacity(q);
    for i in 0..q {
        let free: Vec<usize> = (0..q)
            .filter(|&j| !assessments.iter().all(|a| is_certain_floor(a.entry(i, j))))
            .collect();
        pinned.extend((0..q).filter(|j| !free.contains(j)).map(|j| (i, j)));
        if free.is_empty() {
            return Err(Error::NotStochastic(format!(
                "every transition out of attribute {i} is pinned to zero"
            )));
        }
        let mut terms = Vec::new();
        for a in assessments {
            for (col, &j) in free.iter().enumerate() {
                let mut row = vec![0.0; free.len()];
                row[col] = 1.0;
                let e = a.entry(i, j);
                terms.push(WlsTerm {
                    row,
                    target: e.score(),
                    weight: e.p(),
                });
            }
        }
        let problem = SimplexWlsProblem::new(free.len(), terms, Positivity::Strict)
            .map_err(|e| Error::Solver(format!("row {i}: {e}")))?;
        let sol = solver::solve(&problem)?;
        let mut full = vec![0.0; q];
        for (col, &j) in free.iter().enumerate() {
            full[j] = sol.vector[col];
        }
        rows.push(full);
        row_status.push(sol.status);
    }
    Ok(Estimate {
        matrix: TransitionMatrix::new(rows)?,
        pinned,
        row_status,
    })
}

fn check_schedule(m: &TransitionMatrix, periods: usize, z: usize, origin: usize) -> Result<()> {
    if periods == 0 {
        return Err(Error::Config("at least one period is needed".into()));
    }
    if z == 0 {
        return Err(Error::Config("at least one initial iteration is needed".into()));
    }
    if origin >= m.q() {
        return Err(Error::Index(format!("origin {origin} with {} attributes", m.q())));
    }
    check_rows(&m.rows)
}

/// `ω^t = e_origin · M^(Z + t − 1)` for `t = 1..=periods`.
pub fn period_weights(m: &TransitionMatrix, periods: usize, z: usize, origin: usize) -> Result<PeriodWeights> {
    check_schedule(m, periods, z, origin)?;
    let mut v = vec![0.0; m.q()];
    v[origin] = 1.0;
    for _ in 0..z {
        v = m.step(&v);
    }
    let mut rows = vec![v];
    for _ in 1..periods {
        let next = m.step(rows.last().unwrap());
        rows.push(next);
    }
    PeriodWeights::new(rows)
}

/// Variant in which the origin probability is re-estimated each period.
///
/// The start vector of period `t` puts `updates[t]` on the origin and spreads
/// the remainder over the other attributes in proportion to their weights in
/// the previous period (uniformly when those weights are all zero, as for the
/// first period whose predecessor is `e_origin`). The start vector is then
/// carried through `Z + t − 1` transitions.
pub fn period_weights_reshaped(
    m: &TransitionMatrix,
    z: usize,
    origin: usize,
    updates: &[f64],
) -> Result<PeriodWeights> {
    check_schedule(m, updates.len(), z, origin)?;
    let q = m.q();
    let mut previous = vec![0.0; q];
    previous[origin] = 1.0;
    let mut rows = Vec::with_capacity(updates.len());
    for (t, &u) in updates.iter().enumerate() {
        crate::scale::check_fraction("origin update", u)?;
        let others: f64 = (0..q).filter(|&j| j != origin).map(|j| previous[j]).sum();
        let mut start: Vec<f64> = (0..q)
            .map(|j| {
                if j == origin {
                    u
                } else if others > 0.0 {
                    (1.0 - u) * previous[j] / others
                } else {
                    (1.0 - u) / (q - 1).max(1) as f64
                }
            })
            .collect();
        if q == 1 {
            start[0] = 1.0;
        }
        for _ in 0..z + t {
            start = m.step(&start);
        }
        previous = start.clone();
        rows.push(start);
    }
    PeriodWeights::new(rows)
}

/// Graphviz digraph with one edge per nonzero transition, labelled to four
/// decimals, in row-major order.
pub fn export_dot(m: &TransitionMatrix, labels: &[String]) -> Result<String> {
    if labels.len() != m.q() {
        return Err(Error::Shape(format!(
            "{} labels for {} attributes",
            labels.len(),
            m.q()
        )));
    }
    let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
    let mut out = String::from("digraph transitions {\n");
    for l in labels {
        writeln!(out, "  {};", quote(l)).unwrap();
    }
    for (i, row) in m.rows.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p != 0.0 {
                writeln!(
                    out,
                    "  {} -> {} [label=\"{p:.4}\"];",
                    quote(&labels[i]),
                    quote(&labels[j])
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
