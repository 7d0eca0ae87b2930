//! The five-step decision procedure.
//!
//! 1. Fit the transition matrix from the Markov assessments.
//! 2. Derive per-period attribute weights.
//! 3. Weight the experts of each attribute and fit its collective priority
//!    vector.
//! 4. Aggregate `U_x = Σ_t Σ_q ω_q^t w_q^x`.
//! 5. Rank the alternatives by `U`.
//!
//! Each stage can be replaced by an override from the scenario; overrides are
//! echoed in the report diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::{self, PeriodWeights, TransitionMatrix};
use crate::prefs::{self, ExpertWeightReport, PreferenceRelation};
use crate::scenario::{Scenario, Scheme};
use crate::solver::{self, SolveStatus};
use crate::terms::ProbabilisticTermSet;

/// Values closer than this are reported as ties when ranking.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// How far the pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Steps 1 and 2.
    Markov,
    /// Steps 1 to 3, expert weights only.
    Weights,
    /// Steps 1 to 3.
    Priorities,
    /// Steps 1 to 4.
    Aggregate,
    /// Steps 1 to 5, plus the comparison against the discrete baseline.
    #[default]
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Options {
    pub stage: Stage,
    /// Use the printed inner-deviation constant `0.5·m(m−1)`.
    pub paper_literal: bool,
    /// Overrides the scenario's scheme.
    pub scheme: Option<Scheme>,
}

/// A stage failure tagged with its step number.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("step {step} ({}): {source}", step_name(*.step))]
pub struct PipelineError {
    pub step: u8,
    pub source: Error,
}

fn step_name(step: u8) -> &'static str {
    match step {
        1 => "transition matrix",
        2 => "period weights",
        3 => "expert weights and priorities",
        4 => "aggregation",
        _ => "ranking",
    }
}

fn at<T>(step: u8, r: Result<T>) -> Result<T, PipelineError> {
    r.map_err(|source| PipelineError { step, source })
}

/// Something worth flagging in a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// A stage result was taken from the scenario instead of computed.
    Override { stage: String },
    /// An injected transition row rescaled to sum to one.
    RenormalizedRow { row: String, sum: f64 },
    /// A transition fixed at zero because every expert gave it the certain floor term.
    PinnedTransition { from: String, to: String },
    /// Period weights that do not sum to one.
    UnnormalizedPeriod { period: usize, sum: f64 },
    /// An expert's inner entropy was raised to the floor.
    EntropyFloor { attribute: String, expert: String },
    /// The printed inner-deviation constant was used.
    PaperLiteral { attribute: String, constant: f64 },
    /// Fewer than three alternatives, so inner deviations are zero.
    NoIndirectPath { attribute: String },
    /// A least-squares fit had no unique optimum, or stopped early.
    Solver { stage: String, status: SolveStatus },
    /// Alternatives with equal comparable values, ranked by index.
    Tie { alternatives: Vec<String>, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeReport {
    pub attribute: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expert_weights: Option<ExpertWeightReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub priority_vector: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedAlternative {
    pub alternative: String,
    pub value: f64,
}

/// Priority vectors fitted from the interval evidence and from its
/// discrete-term reduction, with their spreads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PltsComparison {
    pub attribute: String,
    pub interval: Vec<f64>,
    pub discrete: Vec<f64>,
    pub interval_min_gap: f64,
    pub discrete_min_gap: f64,
    pub interval_range: f64,
    pub discrete_range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionReport {
    pub format: u32,
    pub stage: Stage,
    pub scheme: Scheme,
    pub attributes: Vec<String>,
    pub alternatives: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition_matrix: Option<TransitionMatrix>,
    pub period_weights: PeriodWeights,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub attribute_reports: Vec<AttributeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparable_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<RankedAlternative>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub plts_comparison: Vec<PltsComparison>,
    pub diagnostics: Vec<Diagnostic>,
}

/// `U_x = Σ_t Σ_q ω_q^t w_q^x`.
pub fn aggregate(weights: &PeriodWeights, priorities: &[Vec<f64>]) -> Result<Vec<f64>> {
    if priorities.len() != weights.q() {
        return Err(Error::Shape(format!(
            "{} priority vectors for {} attributes",
            priorities.len(),
            weights.q()
        )));
    }
    let m = priorities.first().map_or(0, Vec::len);
    if let Some(v) = priorities.iter().find(|v| v.len() != m) {
        return Err(Error::Shape(format!("priority vectors of lengths {m} and {}", v.len())));
    }
    let mut u = vec![0.0; m];
    for row in weights.rows() {
        for (omega, w) in row.iter().zip(priorities) {
            for (ux, wx) in u.iter_mut().zip(w) {
                *ux += omega * wx;
            }
        }
    }
    Ok(u)
}

/// Indices by descending value, ties in index order, together with the
/// groups of tied indices.
pub fn rank(values: &[f64]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && (values[order[start]] - values[order[end]]).abs() <= TIE_TOLERANCE {
            end += 1;
        }
        if end - start > 1 {
            ties.push(order[start..end].to_vec());
        }
        start = end;
    }
    (order, ties)
}

fn min_gap(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

/// Fits the priority vector twice: from the peak scores weighted by their
/// certainties, and from a discrete reduction of the same evidence.
///
/// The reduction reads each entry as the term at its peak's expectation with
/// probability `p`, the remaining `1 − p` split evenly between the two ends of
/// the scale; every entry is then weighted equally.
pub fn compare_with_plts(
    scenario: &Scenario,
    relations: &[PreferenceRelation],
    expert_weights: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let scale = &scenario.scale;
    let interval = prefs::collective_priorities(relations, expert_weights)?.vector;
    let mut scores = Vec::with_capacity(relations.len());
    let mut ones = Vec::with_capacity(relations.len());
    for r in relations {
        let m = r.m();
        let mut e = nalgebra::DMatrix::from_element(m, m, 0.5);
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let t = r.entry(i, j);
                let rest = (1.0 - t.p()) / 2.0;
                let set = ProbabilisticTermSet::new(
                    scale,
                    vec![
                        (t.expectation_term(scale)?, t.p()),
                        (scale.floor_term(), rest),
                        (scale.ceiling_term(), rest),
                    ],
                )?;
                e[(i, j)] = scale.to_unit(set.score()?)?;
            }
        }
        ones.push(nalgebra::DMatrix::from_element(m, m, 1.0));
        scores.push(e);
    }
    let discrete = solver::solve(&prefs::priority_problem(&scores, &ones, expert_weights)?)?.vector;
    Ok((interval, discrete))
}

/// Runs the pipeline up to `options.stage`.
pub fn run_pipeline(scenario: &Scenario, options: &Options) -> Result<DecisionReport, PipelineError> {
    let mut diagnostics = Vec::new();
    let names = &scenario.attributes;
    let spec = &scenario.markov;
    let scheme = options.scheme.unwrap_or(spec.scheme);

    // Step 1
    let transition_matrix = match &scenario.overrides.transition_matrix {
        Some(m) => {
            diagnostics.push(Diagnostic::Override {
                stage: "transition_matrix".into(),
            });
            for &(i, sum) in &scenario.overrides.renormalized_rows {
                diagnostics.push(Diagnostic::RenormalizedRow {
                    row: names[i].clone(),
                    sum,
                });
            }
            Some(m.clone())
        }
        // only reachable when the period weights are overridden
        None if spec.assessments.is_empty() => None,
        None => {
            let est = at(1, markov::estimate_transition(&spec.assessments))?;
            for &(i, j) in &est.pinned {
                diagnostics.push(Diagnostic::PinnedTransition {
                    from: names[i].clone(),
                    to: names[j].clone(),
                });
            }
            for (i, status) in est.row_status.iter().enumerate() {
                if *status != SolveStatus::Optimal {
                    diagnostics.push(Diagnostic::Solver {
                        stage: format!("transition row {}", names[i]),
                        status: *status,
                    });
                }
            }
            Some(est.matrix)
        }
    };

    // Step 2
    let period_weights = match &scenario.overrides.period_weights {
        Some(w) => {
            diagnostics.push(Diagnostic::Override {
                stage: "period_weights".into(),
            });
            w.clone()
        }
        None => at(2, {
            let transition_matrix = at(
                2,
                transition_matrix
                    .as_ref()
                    .ok_or_else(|| Error::Config("no transition matrix to derive period weights from".into())),
            )?;
            match scheme {
                Scheme::Power => {
                    markov::period_weights(transition_matrix, spec.periods, spec.initial_iterations, spec.origin)
                }
                Scheme::Reshape => match &spec.updates {
                    Some(u) => {
                        markov::period_weights_reshaped(transition_matrix, spec.initial_iterations, spec.origin, u)
                    }
                    None => Err(Error::Config("the reshape scheme needs markov.updates".into())),
                },
            }
        })?,
    };
    for (t, row) in period_weights.rows().iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > markov::STOCHASTIC_TOLERANCE {
            diagnostics.push(Diagnostic::UnnormalizedPeriod { period: t + 1, sum });
        }
    }

    let mut report = DecisionReport {
        format: crate::scenario::FORMAT_VERSION,
        stage: options.stage,
        scheme,
        attributes: names.clone(),
        alternatives: scenario.alternatives.clone(),
        transition_matrix,
        period_weights,
        attribute_reports: Vec::new(),
        comparable_values: None,
        ranking: None,
        plts_comparison: Vec::new(),
        diagnostics: Vec::new(),
    };
    if options.stage == Stage::Markov {
        report.diagnostics = diagnostics;
        return Ok(report);
    }

    // Step 3
    let psi: Vec<f64> = scenario.experts.iter().map(|e| e.trust).collect();
    let m = scenario.alternatives.len();
    let mut priorities = Vec::with_capacity(names.len());
    for (a, name) in names.iter().enumerate() {
        let relations = scenario.preferences[a].as_deref();
        let mut attr = AttributeReport {
            attribute: name.clone(),
            expert_weights: None,
            priority_vector: None,
        };
        let priority_override = scenario.overrides.priority_vectors[a].clone();
        let weight_override = scenario.overrides.expert_weight_vectors[a].clone();
        let mut blended = weight_override.clone();
        if let Some(rels) = relations.filter(|_| weight_override.is_none()) {
            let rep = at(
                3,
                prefs::expert_weights(rels, &psi, scenario.blend, options.paper_literal),
            )?;
            for &k in &rep.entropy_floored {
                diagnostics.push(Diagnostic::EntropyFloor {
                    attribute: name.clone(),
                    expert: scenario.experts[k].id.clone(),
                });
            }
            if options.paper_literal {
                diagnostics.push(Diagnostic::PaperLiteral {
                    attribute: name.clone(),
                    constant: 0.5 * (m * (m.saturating_sub(1))) as f64,
                });
            }
            if rep.no_indirect_path {
                diagnostics.push(Diagnostic::NoIndirectPath {
                    attribute: name.clone(),
                });
            }
            blended = Some(rep.blended.clone());
            attr.expert_weights = Some(rep);
        } else if weight_override.is_some() {
            diagnostics.push(Diagnostic::Override {
                stage: format!("expert_weight_vectors.{name}"),
            });
        }
        if options.stage != Stage::Weights {
            let w = match (priority_override, relations, &blended) {
                (Some(w), _, _) => {
                    diagnostics.push(Diagnostic::Override {
                        stage: format!("priority_vectors.{name}"),
                    });
                    w
                }
                (None, Some(rels), Some(omega)) => {
                    let sol = at(3, prefs::collective_priorities(rels, omega))?;
                    if sol.status != SolveStatus::Optimal {
                        diagnostics.push(Diagnostic::Solver {
                            stage: format!("priorities {name}"),
                            status: sol.status,
                        });
                    }
                    if options.stage == Stage::All {
                        let (interval, discrete) = at(3, compare_with_plts(scenario, rels, omega))?;
                        report.plts_comparison.push(PltsComparison {
                            attribute: name.clone(),
                            interval_min_gap: min_gap(&interval),
                            discrete_min_gap: min_gap(&discrete),
                            interval_range: spread(&interval),
                            discrete_range: spread(&discrete),
                            interval,
                            discrete,
                        });
                    }
                    sol.vector
                }
                _ => {
                    return Err(PipelineError {
                        step: 3,
                        source: Error::Config(format!("no preferences or priority vector for {name}")),
                    })
                }
            };
            attr.priority_vector = Some(w.clone());
            priorities.push(w);
        }
        report.attribute_reports.push(attr);
    }
    if matches!(options.stage, Stage::Weights | Stage::Priorities) {
        report.diagnostics = diagnostics;
        return Ok(report);
    }

    // Step 4
    let u = at(4, aggregate(&report.period_weights, &priorities))?;
    if options.stage == Stage::All {
        // Step 5
        let (order, ties) = rank(&u);
        for group in ties {
            diagnostics.push(Diagnostic::Tie {
                value: u[group[0]],
                alternatives: group.iter().map(|&i| scenario.alternatives[i].clone()).collect(),
            });
        }
        report.ranking = Some(
            order
                .iter()
                .map(|&i| RankedAlternative {
                    alternative: scenario.alternatives[i].clone(),
                    value: u[i],
                })
                .collect(),
        );
    }
    report.comparable_values = Some(u);
    report.diagnostics = diagnostics;
    Ok(report)
}
