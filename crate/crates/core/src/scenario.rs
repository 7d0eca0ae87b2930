//! Scenario files.
//!
//! A scenario is a UTF-8 JSON document describing the whole decision problem:
//!
//! ```json
//! {
//!   "format": 1,
//!   "scale": { "tau": 4, "zeta": 4 },
//!   "attributes": ["IRR", "ALR"],
//!   "alternatives": ["A1", "A2", "A3"],
//!   "experts": [{ "id": "e1", "trust": 0.8 }, { "id": "e2", "trust": 0.9 }],
//!   "blend": { "alpha": 0.5, "beta": 0.3, "gamma": 0.2 },
//!   "markov": {
//!     "assessments": [[[{ "point": [0, 0], "p": 1 }, ...], ...], ...],
//!     "periods": 3, "initial_iterations": 1, "origin": "IRR",
//!     "updates": [0.25, 0.8, 1.0], "scheme": "power"
//!   },
//!   "preferences": { "IRR": [[[{ "interval": ["s1(o1)", "s1(o3)"], "p": 0.5 }, ...], ...], ...] },
//!   "overrides": {
//!     "transition_matrix": [[...], ...],
//!     "period_weights": [[...], ...],
//!     "priority_vectors": { "ALR": [0.45, 0.09, 0.21, 0.25] },
//!     "expert_weight_vectors": { "IRR": [0.25, 0.29, 0.23, 0.23] }
//!   }
//! }
//! ```
//!
//! Markov assessments hold one `q × q` matrix per expert; preferences hold, per
//! attribute, one `m × m` matrix per expert. Every block may be replaced by an
//! override, in which case its inputs may be omitted. Loading reports every
//! violation it finds, each with its location.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::markov::{LinguisticMarkovAssessment, PeriodWeights, TransitionMatrix};
use crate::prefs::{Blend, PreferenceRelation};
use crate::scale::LinguisticScale;
use crate::terms::{PeakIntervalTerm, PeakTermSpec};

pub const FORMAT_VERSION: u32 = 1;

/// Injected vectors and transition rows may miss a unit sum by this much
/// (rounding of printed values). Transition rows are rescaled and reported;
/// priority and expert weight vectors are kept as given.
pub const ROUNDING_SLACK: f64 = 1e-3;

/// Why a scenario could not be loaded.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

/// How period weights are produced from the transition matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `e_origin · M^(Z+t−1)`.
    #[default]
    Power,
    /// Origin probability reset to `updates[t]` each period.
    Reshape,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Power => "power",
            Scheme::Reshape => "reshape",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expert {
    pub id: String,
    pub trust: f64,
}

type RawMatrix = Vec<Vec<PeakTermSpec>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScale {
    tau: u32,
    zeta: u32,
    #[serde(default)]
    first_labels: Option<Vec<String>>,
    #[serde(default)]
    second_labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarkov {
    #[serde(default)]
    assessments: Vec<RawMatrix>,
    periods: usize,
    #[serde(default = "one")]
    initial_iterations: usize,
    origin: String,
    #[serde(default)]
    updates: Option<Vec<f64>>,
    #[serde(default)]
    scheme: Scheme,
}

fn one() -> usize {
    1
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOverrides {
    #[serde(default)]
    transition_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    period_weights: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    priority_vectors: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    expert_weight_vectors: BTreeMap<String, Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    format: u32,
    scale: RawScale,
    attributes: Vec<String>,
    alternatives: Vec<String>,
    experts: Vec<Expert>,
    #[serde(default)]
    blend: Option<Blend>,
    markov: RawMarkov,
    #[serde(default)]
    preferences: BTreeMap<String, Vec<RawMatrix>>,
    #[serde(default)]
    overrides: RawOverrides,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSpec {
    /// One assessment per expert; empty when the matrix or the period
    /// weights are overridden.
    pub assessments: Vec<LinguisticMarkovAssessment>,
    pub periods: usize,
    pub initial_iterations: usize,
    /// Attribute index.
    pub origin: usize,
    pub updates: Option<Vec<f64>>,
    pub scheme: Scheme,
}

/// Results injected in place of a computed stage.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Overrides {
    pub transition_matrix: Option<TransitionMatrix>,
    pub period_weights: Option<PeriodWeights>,
    /// Indexed by attribute.
    pub priority_vectors: Vec<Option<Vec<f64>>>,
    /// Indexed by attribute; blended expert weights.
    pub expert_weight_vectors: Vec<Option<Vec<f64>>>,
    /// Rows of the injected transition matrix that were rescaled, with their
    /// original sums.
    pub renormalized_rows: Vec<(usize, f64)>,
}

/// A validated decision problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scale: LinguisticScale,
    pub attributes: Vec<String>,
    pub alternatives: Vec<String>,
    pub experts: Vec<Expert>,
    pub blend: Blend,
    pub markov: MarkovSpec,
    /// Indexed by attribute; one relation per expert.
    pub preferences: Vec<Option<Vec<PreferenceRelation>>>,
    pub overrides: Overrides,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        validate(raw)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }
}

fn check_vector(errors: &mut Vec<String>, at: &str, v: &[f64], len: usize) {
    if v.len() != len {
        errors.push(format!("{at}: {} values, expected {len}", v.len()));
        return;
    }
    if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        errors.push(format!("{at}: values must be finite and nonnegative"));
        return;
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > ROUNDING_SLACK {
        errors.push(format!("{at}: values sum to {s}, not 1"));
    }
}

fn resolve_matrix(
    errors: &mut Vec<String>,
    at: &str,
    scale: &LinguisticScale,
    raw: &RawMatrix,
    size: usize,
) -> Option<Vec<Vec<PeakIntervalTerm>>> {
    if raw.len() != size || raw.iter().any(|r| r.len() != size) {
        errors.push(format!("{at}: expected a {size}x{size} matrix"));
        return None;
    }
    let before = errors.len();
    let rows: Vec<Vec<PeakIntervalTerm>> = raw
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter_map(|(j, spec)| match spec.resolve(scale) {
                    Ok(t) => Some(t),
                    Err(e) => {
                        errors.push(format!("{at}[{i}][{j}]: {e}"));
                        None
                    }
                })
                .collect()
        })
        .collect();
    (errors.len() == before).then_some(rows)
}

fn validate(raw: RawScenario) -> Result<Scenario, ScenarioError> {
    let mut errors = Vec::new();
    if raw.format != FORMAT_VERSION {
        errors.push(format!(
            "format: version {} is not supported (expected {FORMAT_VERSION})",
            raw.format
        ));
    }
    let scale = match LinguisticScale::new(raw.scale.tau, raw.scale.zeta)
        .and_then(|s| s.with_labels(raw.scale.first_labels, raw.scale.second_labels))
    {
        Ok(s) => s,
        Err(e) => {
            errors.push(format!("scale: {e}"));
            return Err(ScenarioError::Validation(errors));
        }
    };

    let (q, m, n) = (raw.attributes.len(), raw.alternatives.len(), raw.experts.len());
    if q == 0 {
        errors.push("attributes: at least one attribute is required".into());
    }
    if m == 0 {
        errors.push("alternatives: at least one alternative is required".into());
    }
    if n == 0 {
        errors.push("experts: at least one expert is required".into());
    }
    for (what, names) in [("attributes", &raw.attributes), ("alternatives", &raw.alternatives)] {
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                errors.push(format!("{what}[{i}]: duplicate name {name:?}"));
            }
        }
    }
    for (k, e) in raw.experts.iter().enumerate() {
        if !(0.0..=1.0).contains(&e.trust) {
            errors.push(format!("experts[{k}].trust: {} is outside [0, 1]", e.trust));
        }
    }
    let blend = raw.blend.unwrap_or_default();
    if let Err(e) = blend.check() {
        errors.push(format!("blend: {e}"));
    }
    let attr = |name: &str| raw.attributes.iter().position(|a| a == name);

    // overrides
    let mut overrides = Overrides {
        priority_vectors: vec![None; q],
        expert_weight_vectors: vec![None; q],
        ..Default::default()
    };
    if let Some(rows) = raw.overrides.transition_matrix {
        match TransitionMatrix::renormalized(rows, ROUNDING_SLACK) {
            Ok((t, changed)) if t.q() == q => {
                overrides.transition_matrix = Some(t);
                overrides.renormalized_rows = changed;
            }
            Ok((t, _)) => errors.push(format!("overrides.transition_matrix: {}x{0} for {q} attributes", t.q())),
            Err(e) => errors.push(format!("overrides.transition_matrix: {e}")),
        }
    }
    if let Some(rows) = raw.overrides.period_weights {
        match PeriodWeights::new(rows) {
            Ok(w) if w.q() != q => errors.push(format!(
                "overrides.period_weights: {} weights per period for {q} attributes",
                w.q()
            )),
            Ok(w) if w.periods() != raw.markov.periods => errors.push(format!(
                "overrides.period_weights: {} periods, but markov.periods is {}",
                w.periods(),
                raw.markov.periods
            )),
            Ok(w) => overrides.period_weights = Some(w),
            Err(e) => errors.push(format!("overrides.period_weights: {e}")),
        }
    }
    for (name, v) in &raw.overrides.priority_vectors {
        let at = format!("overrides.priority_vectors.{name}");
        match attr(name) {
            Some(a) => {
                let before = errors.len();
                check_vector(&mut errors, &at, v, m);
                if errors.len() == before {
                    overrides.priority_vectors[a] = Some(v.clone());
                }
            }
            None => errors.push(format!("{at}: unknown attribute")),
        }
    }
    for (name, v) in &raw.overrides.expert_weight_vectors {
        let at = format!("overrides.expert_weight_vectors.{name}");
        match attr(name) {
            Some(a) => {
                let before = errors.len();
                check_vector(&mut errors, &at, v, n);
                if errors.len() == before {
                    overrides.expert_weight_vectors[a] = Some(v.clone());
                }
            }
            None => errors.push(format!("{at}: unknown attribute")),
        }
    }

    // markov block
    let rm = raw.markov;
    if rm.periods == 0 {
        errors.push("markov.periods: at least one period is required".into());
    }
    if rm.initial_iterations == 0 {
        errors.push("markov.initial_iterations: at least one iteration is required".into());
    }
    let origin = attr(&rm.origin).unwrap_or_else(|| {
        errors.push(format!("markov.origin: unknown attribute {:?}", rm.origin));
        0
    });
    if let Some(u) = &rm.updates {
        if u.len() != rm.periods {
            errors.push(format!("markov.updates: {} values for {} periods", u.len(), rm.periods));
        }
        for (t, v) in u.iter().enumerate() {
            if !(0.0..=1.0).contains(v) {
                errors.push(format!("markov.updates[{t}]: {v} is outside [0, 1]"));
            }
        }
    }
    let markov_needed = overrides.transition_matrix.is_none() && overrides.period_weights.is_none();
    if rm.assessments.is_empty() && markov_needed {
        errors
            .push("markov.assessments: required unless the transition matrix or period weights are overridden".into());
    }
    if !rm.assessments.is_empty() && rm.assessments.len() != n {
        errors.push(format!(
            "markov.assessments: {} matrices for {n} experts",
            rm.assessments.len()
        ));
    }
    let mut assessments = Vec::new();
    for (k, a) in rm.assessments.iter().enumerate() {
        let at = format!("markov.assessments[{k}]");
        if let Some(rows) = resolve_matrix(&mut errors, &at, &scale, a, q) {
            match LinguisticMarkovAssessment::new(rows) {
                Ok(a) => assessments.push(a),
                Err(e) => errors.push(format!("{at}: {e}")),
            }
        }
    }

    // preferences
    let mut preferences = vec![None; q];
    for (name, mats) in &raw.preferences {
        let Some(a) = attr(name) else {
            errors.push(format!("preferences.{name}: unknown attribute"));
            continue;
        };
        if mats.len() != n {
            errors.push(format!("preferences.{name}: {} matrices for {n} experts", mats.len()));
        }
        let mut relations = Vec::new();
        for (k, mat) in mats.iter().enumerate() {
            let at = format!("preferences.{name}[{k}]");
            let Some(rows) = resolve_matrix(&mut errors, &at, &scale, mat, m) else {
                continue;
            };
            match PreferenceRelation::new(rows) {
                Ok(r) => {
                    for v in r.validate() {
                        errors.push(format!("{at}: {v}"));
                    }
                    relations.push(r);
                }
                Err(e) => errors.push(format!("{at}: {e}")),
            }
        }
        preferences[a] = Some(relations);
    }
    for (a, name) in raw.attributes.iter().enumerate() {
        if preferences[a].is_none() && !raw.overrides.priority_vectors.contains_key(name) {
            errors.push(format!(
                "preferences.{name}: required unless overrides.priority_vectors.{name} is given"
            ));
        }
    }

    if !errors.is_empty() {
        return Err(ScenarioError::Validation(errors));
    }
    Ok(Scenario {
        scale,
        attributes: raw.attributes,
        alternatives: raw.alternatives,
        experts: raw.experts,
        blend,
        markov: MarkovSpec {
            assessments,
            periods: rm.periods,
            initial_iterations: rm.initial_iterations,
            origin,
            updates: rm.updates,
            scheme: rm.scheme,
        },
        preferences,
        overrides,
    })
}
