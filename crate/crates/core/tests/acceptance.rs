//! Acceptance criteria, one line each. Criterion 8 is reported but does not
//! fail the run.

use linguistic_decision::markov::{self, LinguisticMarkovAssessment, TransitionMatrix};
use linguistic_decision::pipeline::{run_pipeline, Options};
use linguistic_decision::prefs::{self, Blend, PreferenceRelation};
use linguistic_decision::report;
use linguistic_decision::scenario::{Scenario, ROUNDING_SLACK};
use linguistic_decision::solver::{self, Positivity, SimplexWlsProblem, WlsTerm};
use linguistic_decision::terms::{peak_of, PeakIntervalTerm, ProbabilisticTermSet};
use linguistic_decision::{LinguisticScale, TermCoord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CRISIS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/financial_crisis.json");
const CRISIS_STAGES: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../scenarios/financial_crisis_printed_stages.json"
);

const PRINTED_M: [[f64; 4]; 4] = [
    [0.2104, 0.4854, 0.2969, 0.0072],
    [0.0, 0.4429, 0.0, 0.5571],
    [0.0, 0.0, 0.5679, 0.4321],
    [0.5050, 0.0, 0.0, 0.4950],
];
const OMEGA_2: [f64; 4] = [0.0480, 0.3171, 0.2311, 0.4038];
const OMEGA_3: [f64; 4] = [0.2140, 0.1637, 0.1455, 0.3768];
const OUTER: [f64; 4] = [0.2253, 0.3320, 0.2439, 0.1988];
const INNER: [f64; 4] = [0.2898, 0.2401, 0.2212, 0.2489];
const TRUST: [f64; 4] = [0.25, 0.28125, 0.21875, 0.25];

type Criterion = (u8, &'static str, bool, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

fn transform_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let scale = LinguisticScale::new(rng.random_range(1..=9), rng.random_range(1..=9)).unwrap();
        let g: f64 = rng.random_range(0.0..=1.0);
        let back = scale.to_unit(scale.from_unit(g).unwrap()).unwrap();
        worst = worst.max((back - g).abs());
    }
    let mut centre: f64 = 0.0;
    for _ in 0..20 {
        let scale = LinguisticScale::new(rng.random_range(1..=20), rng.random_range(1..=20)).unwrap();
        centre = centre.max((scale.to_unit(TermCoord::ZERO).unwrap() - 0.5).abs());
    }
    outcome(
        worst <= 1e-12 && centre <= 1e-12,
        format!("round-trip max error {worst:.1e}, centre max error {centre:.1e}"),
    )
}

fn markov_golden() -> Outcome {
    let rows: Vec<Vec<f64>> = PRINTED_M.iter().map(|r| r.to_vec()).collect();
    let (m, changed) = TransitionMatrix::renormalized(rows, ROUNDING_SLACK).unwrap();
    let irr = 0;
    let w = markov::period_weights(&m, 3, 1, irr).unwrap();
    let r = w.rows();
    // the row prints 0.2104 and the vector 0.2105
    let first = (r[0][0] - 0.2104).abs().min((r[0][0] - 0.2105).abs());
    let p1 = first.max(max_diff(&r[0][1..], &PRINTED_M[0][1..]));
    let p2 = max_diff(&r[1], &OMEGA_2);
    let p3 = max_diff(&r[2][..3], &OMEGA_3[..3]);
    let c4 = (r[2][3] - 0.4768).abs();
    let printed_sum: f64 = OMEGA_3.iter().sum();
    let typo = (printed_sum - 1.0).abs() > 0.05;
    outcome(
        p1 <= 5e-4 && p2 <= 5e-4 && p3 <= 5e-4 && c4 <= 5e-4 && typo && changed.len() == 1,
        format!(
            "period 1 {p1:.1e}, period 2 {p2:.1e}, period 3 (1..3) {p3:.1e}, ω³₄ = {:.4}; printed ω³ sums to {printed_sum:.4}",
            r[2][3]
        ),
    )
}

fn blend_golden() -> Outcome {
    let blend = Blend {
        alpha: 0.5,
        beta: 0.3,
        gamma: 0.2,
    };
    let b = prefs::blend_weights(&OUTER, &INNER, &TRUST, blend).unwrap();
    let t = prefs::trust_weights(&[0.80, 0.90, 0.70, 0.80]).unwrap();
    let db = max_diff(&b, &[0.2496, 0.2943, 0.2321, 0.2241]);
    let dt = max_diff(&t, &[0.2500, 0.2812, 0.2188, 0.2500]);
    outcome(db <= 1e-4 && dt <= 1e-4, format!("blend {db:.1e}, trust {dt:.1e}"))
}

fn aggregation_golden() -> Outcome {
    let scenario = Scenario::load(CRISIS_STAGES).unwrap();
    let rep = run_pipeline(&scenario, &Options::default()).unwrap();
    let u = rep.comparable_values.unwrap();
    let du = max_diff(&u, &[0.8279, 0.6743, 0.6993, 0.6981]);
    let order: Vec<String> = rep.ranking.unwrap().into_iter().map(|r| r.alternative).collect();
    outcome(
        du <= 5e-4 && order == ["A1", "A3", "A4", "A2"],
        format!("U max error {du:.1e}, ranking {}", order.join(" > ")),
    )
}

fn closed_form_row(targets: &[f64], weights: &[f64]) -> Vec<f64> {
    let inv: f64 = weights.iter().map(|p| 1.0 / p).sum();
    let lambda = (1.0 - targets.iter().sum::<f64>()) / inv;
    targets.iter().zip(weights).map(|(e, p)| e + lambda / p).collect()
}

fn assessment(g: &[&[f64]], p: &[&[f64]]) -> LinguisticMarkovAssessment {
    LinguisticMarkovAssessment::new(
        g.iter()
            .zip(p)
            .map(|(gr, pr)| {
                gr.iter()
                    .zip(*pr)
                    .map(|(&x, &c)| PeakIntervalTerm::unit_point(x, c).unwrap())
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

fn solver_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_gap = f64::NEG_INFINITY;
    for n in 0..100 {
        let m = 3 + n % 2;
        let terms = (0..m + 2)
            .map(|_| WlsTerm {
                row: (0..m).map(|_| rng.random_range(-1.0..1.0)).collect(),
                target: rng.random_range(-1.0..1.0),
                weight: rng.random_range(0.1..1.0),
            })
            .collect();
        let problem = SimplexWlsProblem::new(m, terms, Positivity::Strict).unwrap();
        let fast = solver::solve(&problem).unwrap();
        let grid = solver::brute_force_oracle(&problem, 1e-3).unwrap();
        worst_gap = worst_gap.max(fast.objective - grid.objective);
    }

    let mut recovery: f64 = 0.0;
    for _ in 0..50 {
        let m = rng.random_range(2..=6);
        let w = random_simplex(&mut rng, m);
        let experts = rng.random_range(1..=3);
        let relations: Vec<_> = (0..experts)
            .map(|_| PreferenceRelation::consistent(&w, rng.random_range(0.3..=1.0)).unwrap())
            .collect();
        let omega = random_simplex(&mut rng, experts);
        let got = prefs::collective_priorities(&relations, &omega).unwrap();
        recovery = recovery.max(max_diff(&got.vector, &w));
    }

    // Model 2 rows against the Lagrange closed form
    let mut hand: f64 = 0.0;
    let cases: Vec<(Vec<LinguisticMarkovAssessment>, Vec<Vec<f64>>)> = vec![
        (
            vec![assessment(&[&[0.3, 0.7], &[0.8, 0.8]], &[&[1.0, 1.0], &[1.0, 1.0]])],
            vec![vec![0.3, 0.7], vec![0.5, 0.5]],
        ),
        (
            vec![assessment(
                &[&[0.6, 0.3, 0.4], &[0.2, 0.2, 0.2], &[0.5, 0.4, 0.3]],
                &[&[1.0, 0.5, 0.8], &[0.9, 0.6, 0.3], &[0.7, 0.7, 0.7]],
            )],
            vec![
                closed_form_row(&[0.6, 0.3, 0.4], &[1.0, 0.5, 0.8]),
                closed_form_row(&[0.2, 0.2, 0.2], &[0.9, 0.6, 0.3]),
                closed_form_row(&[0.5, 0.4, 0.3], &[0.7, 0.7, 0.7]),
            ],
        ),
        (
            vec![
                assessment(&[&[0.2, 0.8], &[0.5, 0.6]], &[&[1.0, 0.5], &[0.4, 0.9]]),
                assessment(&[&[0.4, 0.6], &[0.3, 0.6]], &[&[0.5, 1.0], &[0.8, 0.3]]),
            ],
            // two experts pool into one target per entry with summed weight
            vec![
                closed_form_row(&[(0.2 + 0.2) / 1.5, (0.4 + 0.6) / 1.5], &[1.5, 1.5]),
                closed_form_row(&[(0.2 + 0.24) / 1.2, (0.54 + 0.18) / 1.2], &[1.2, 1.2]),
            ],
        ),
        (
            vec![assessment(&[&[0.0, 0.9], &[0.4, 0.4]], &[&[1.0, 1.0], &[1.0, 1.0]])],
            vec![vec![0.0, 1.0], vec![0.5, 0.5]],
        ),
    ];
    for (assessments, expected) in &cases {
        let est = markov::estimate_transition(assessments).unwrap();
        for (row, want) in est.matrix.rows().iter().zip(expected) {
            hand = hand.max(max_diff(row, want));
        }
    }
    outcome(
        worst_gap <= 1e-6 && recovery <= 1e-6 && hand <= 1e-9,
        format!("solver minus grid {worst_gap:.1e}, Model 1 recovery {recovery:.1e}, Model 2 rows {hand:.1e}"),
    )
}

fn noisy_relation(rng: &mut ChaCha8Rng, w: &[f64], p: f64, noise: f64) -> PreferenceRelation {
    let m = w.len();
    let mut e = PreferenceRelation::consistent(w, p).unwrap().score_matrix();
    for i in 0..m {
        for j in i + 1..m {
            let v = (e[(i, j)] + rng.random_range(-noise..=noise)).clamp(0.0, 1.0);
            e[(i, j)] = v;
            e[(j, i)] = 1.0 - v;
        }
    }
    PreferenceRelation::new(
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            PeakIntervalTerm::indifference()
                        } else {
                            PeakIntervalTerm::unit_point(e[(i, j)], p).unwrap()
                        }
                    })
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

fn consistency_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut deviation: f64 = 0.0;
    for m in 3..=6 {
        for _ in 0..25 {
            let w = random_simplex(&mut rng, m);
            let r = PreferenceRelation::consistent(&w, rng.random_range(0.2..=1.0)).unwrap();
            deviation = deviation.max(prefs::inner_deviation(&r, false).value.abs());
        }
    }

    let mut off_simplex: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(3..=6);
        let n = rng.random_range(2..=5);
        let relations: Vec<_> = (0..n)
            .map(|_| {
                let w = random_simplex(&mut rng, m);
                let p = rng.random_range(0.3..=1.0);
                noisy_relation(&mut rng, &w, p, 0.1)
            })
            .collect();
        let psi: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..=1.0)).collect();
        let rep = prefs::expert_weights(&relations, &psi, Blend::default(), false).unwrap();
        let prio = prefs::collective_priorities(&relations, &rep.blended).unwrap().vector;
        for v in [&rep.outer, &rep.inner, &rep.trust, &rep.blended, &prio] {
            off_simplex = off_simplex.max((v.iter().sum::<f64>() - 1.0).abs());
            if v.iter().any(|x| *x < 0.0) {
                off_simplex = f64::INFINITY;
            }
        }
    }

    // two consistent experts and one inconsistent: all entropies vanish
    let w = [0.4, 0.35, 0.25];
    let relations = vec![
        PreferenceRelation::consistent(&w, 0.9).unwrap(),
        noisy_relation(&mut rng, &w, 0.9, 0.2),
        PreferenceRelation::consistent(&w, 0.9).unwrap(),
    ];
    let rep = prefs::expert_weights(&relations, &[0.5, 0.5, 0.5], Blend::default(), false).unwrap();
    let floored = rep.entropy_floored.len();
    let floor_ok =
        floored > 0 && rep.inner.iter().all(|x| x.is_finite()) && (rep.blended.iter().sum::<f64>() - 1.0).abs() <= 1e-9;

    outcome(
        deviation <= 1e-9 && off_simplex <= 1e-9 && floor_ok,
        format!(
            "consistent inner deviation {deviation:.1e}, simplex error {off_simplex:.1e}, {floored} experts floored"
        ),
    )
}

fn paradox_two() -> Outcome {
    let scale = LinguisticScale::new(4, 4).unwrap();
    let s = |t: f64| TermCoord::new(t, 0.0);
    let bimodal = ProbabilisticTermSet::new(&scale, vec![(s(-2.0), 0.5), (s(2.0), 0.5)]).unwrap();
    let score = bimodal.score().unwrap();
    let centre = scale.to_unit(TermCoord::ZERO).unwrap();
    let intervals = bimodal.to_point_intervals(&scale).unwrap();
    let peak = peak_of(&intervals).unwrap();
    let excludes = |l: f64, u: f64| u < centre || l > centre;
    let all_exclude = intervals.iter().all(|i| excludes(i.lower(), i.upper()));
    outcome(
        score == TermCoord::ZERO && excludes(peak.lower(), peak.upper()) && all_exclude,
        format!(
            "discrete score {score}, peak interval [{:.4}, {:.4}] against s_0 at {centre}",
            peak.lower(),
            peak.upper()
        ),
    )
}

fn transcription_diagnostics() -> Outcome {
    let scenario = Scenario::load(CRISIS).unwrap();
    let irr = scenario.attribute_index("IRR").unwrap();
    let relations = scenario.preferences[irr].as_ref().unwrap();
    let psi: Vec<f64> = scenario.experts.iter().map(|e| e.trust).collect();
    let rep = prefs::expert_weights(relations, &psi, scenario.blend, false).unwrap();
    let dout = max_diff(&rep.outer, &OUTER);
    let din = max_diff(&rep.inner, &INNER);

    let est = markov::estimate_transition(&scenario.markov.assessments).unwrap();
    let mut pattern = true;
    let mut nonzero: f64 = 0.0;
    for (row, printed) in est.matrix.rows().iter().zip(PRINTED_M) {
        for (x, y) in row.iter().zip(printed) {
            pattern &= (*x == 0.0) == (y == 0.0);
            if y != 0.0 {
                nonzero = nonzero.max((x - y).abs());
            }
        }
    }
    outcome(
        dout <= 0.02 && din <= 0.02 && pattern && nonzero <= 0.05,
        format!(
            "outer {dout:.4}, inner {din:.4} (tolerance 0.02); zero pattern {}, nonzero entries {nonzero:.4} (tolerance 0.05)",
            if pattern { "matches" } else { "differs" }
        ),
    )
}

fn determinism() -> Outcome {
    let render = || {
        let scenario = Scenario::load(CRISIS).unwrap();
        report::to_json(&run_pipeline(&scenario, &Options::default()).unwrap())
    };
    let (a, b) = (render(), render());
    outcome(a == b, format!("{} bytes", a.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "unit transform round trip", true, transform_suite),
        (2, "Markov period weights from the printed matrix", true, markov_golden),
        (3, "expert weight blend and trust normalization", true, blend_golden),
        (
            4,
            "aggregation and ranking from printed stages",
            true,
            aggregation_golden,
        ),
        (5, "solver against oracles", true, solver_suite),
        (6, "consistency and entropy properties", true, consistency_suite),
        (
            7,
            "symmetric discrete evidence scores the empty centre",
            true,
            paradox_two,
        ),
        (8, "transcribed fixtures (diagnostic)", false, transcription_diagnostics),
        (9, "end-to-end determinism", true, determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, hard, run) in criteria {
        let o = run();
        let verdict = match (o.ok, hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (not gating)",
        };
        println!("criterion {id}: {verdict}: {name}: {}", o.detail);
        if hard && !o.ok {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
