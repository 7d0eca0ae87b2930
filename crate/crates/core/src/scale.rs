//! The double-hierarchy linguistic scale.
//!
//! A term `s_t<o_k>` pairs a first-hierarchy adjective index `t ∈ [-τ, τ]` with a
//! second-hierarchy adverb index `k ∈ [-ζ, ζ]`. Both indices are real-valued, so the
//! scale is continuous. Every term maps to a unit value
//!
//! ```text
//! γ = (k + (τ + t) ζ) / (2 ζ τ)
//! ```
//!
//! and the engine computes with `γ` throughout. The `(t, k)` pair is only a
//! presentation form: it is not unique at hierarchy boundaries (`s1<o4>` and
//! `s2<o0>` name the same point when `ζ = 4`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Slack allowed when checking that a unit value stays inside `[0, 1]`.
const UNIT_SLACK: f64 = 1e-12;

/// A double-hierarchy scale with half-ranges `τ` (first hierarchy) and `ζ` (second).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawScale")]
pub struct LinguisticScale {
    tau: u32,
    zeta: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    second_labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawScale {
    tau: u32,
    zeta: u32,
    #[serde(default)]
    first_labels: Option<Vec<String>>,
    #[serde(default)]
    second_labels: Option<Vec<String>>,
}

impl TryFrom<RawScale> for LinguisticScale {
    type Error = Error;

    fn try_from(raw: RawScale) -> Result<Self> {
        LinguisticScale::new(raw.tau, raw.zeta)?.with_labels(raw.first_labels, raw.second_labels)
    }
}

impl LinguisticScale {
    pub fn new(tau: u32, zeta: u32) -> Result<Self> {
        if tau == 0 {
            return Err(Error::Config("tau must be at least 1".into()));
        }
        if zeta == 0 {
            return Err(Error::Config("zeta must be at least 1".into()));
        }
        Ok(Self {
            tau,
            zeta,
            first_labels: None,
            second_labels: None,
        })
    }

    /// Attaches display labels; lengths must be `2τ+1` and `2ζ+1`.
    pub fn with_labels(mut self, first: Option<Vec<String>>, second: Option<Vec<String>>) -> Result<Self> {
        if let Some(labels) = &first {
            let want = 2 * self.tau as usize + 1;
            if labels.len() != want {
                return Err(Error::Config(format!(
                    "first_labels has {} entries, expected {want}",
                    labels.len()
                )));
            }
        }
        if let Some(labels) = &second {
            let want = 2 * self.zeta as usize + 1;
            if labels.len() != want {
                return Err(Error::Config(format!(
                    "second_labels has {} entries, expected {want}",
                    labels.len()
                )));
            }
        }
        self.first_labels = first;
        self.second_labels = second;
        Ok(self)
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn zeta(&self) -> u32 {
        self.zeta
    }

    pub fn first_labels(&self) -> Option<&[String]> {
        self.first_labels.as_deref()
    }

    pub fn second_labels(&self) -> Option<&[String]> {
        self.second_labels.as_deref()
    }

    /// Display label for an integral coordinate pair, when labels are present.
    pub fn label(&self, term: TermCoord) -> Option<String> {
        let (first, second) = (self.first_labels.as_ref()?, self.second_labels.as_ref()?);
        if term.t.fract() != 0.0 || term.k.fract() != 0.0 {
            return None;
        }
        let ti = (term.t + self.tau as f64) as usize;
        let ki = (term.k + self.zeta as f64) as usize;
        Some(format!("{} {}", second.get(ki)?, first.get(ti)?))
    }

    /// The lowest term `s_{-τ}<o_0>`.
    pub fn floor_term(&self) -> TermCoord {
        TermCoord::new(-(self.tau as f64), 0.0)
    }

    /// The highest term `s_τ<o_0>`.
    pub fn ceiling_term(&self) -> TermCoord {
        TermCoord::new(self.tau as f64, 0.0)
    }

    /// Checks the coordinate box and that the unit image stays inside `[0, 1]`.
    pub fn check(&self, term: TermCoord) -> Result<()> {
        let (tau, zeta) = (self.tau as f64, self.zeta as f64);
        if !term.t.is_finite() || term.t < -tau || term.t > tau {
            return Err(Error::OutOfRange {
                coordinate: "t",
                value: term.t,
                min: -tau,
                max: tau,
            });
        }
        if !term.k.is_finite() || term.k < -zeta || term.k > zeta {
            return Err(Error::OutOfRange {
                coordinate: "k",
                value: term.k,
                min: -zeta,
                max: zeta,
            });
        }
        // At t = ±τ the second hierarchy can only point inward.
        let gamma = self.raw_unit(term);
        if !(-UNIT_SLACK..=1.0 + UNIT_SLACK).contains(&gamma) {
            let base = (tau + term.t) * zeta;
            let (min, max) = (-base, 2.0 * zeta * tau - base);
            return Err(Error::OutOfRange {
                coordinate: "k",
                value: term.k,
                min,
                max,
            });
        }
        Ok(())
    }

    fn raw_unit(&self, term: TermCoord) -> f64 {
        let (tau, zeta) = (self.tau as f64, self.zeta as f64);
        (term.k + (tau + term.t) * zeta) / (2.0 * zeta * tau)
    }

    /// Maps a term to its unit value `γ ∈ [0, 1]`.
    pub fn to_unit(&self, term: TermCoord) -> Result<f64> {
        self.check(term)?;
        Ok(self.raw_unit(term).clamp(0.0, 1.0))
    }

    /// Inverse of [`to_unit`](Self::to_unit) on the canonical branch
    /// `t = ⌊2τγ − τ⌋`, `k = ζ(2τγ − τ − t)`; `γ = 1` maps to `(τ, 0)`.
    pub fn from_unit(&self, gamma: f64) -> Result<TermCoord> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::OutOfRange {
                coordinate: "gamma",
                value: gamma,
                min: 0.0,
                max: 1.0,
            });
        }
        let (tau, zeta) = (self.tau as f64, self.zeta as f64);
        if gamma == 1.0 {
            return Ok(TermCoord::new(tau, 0.0));
        }
        let x = 2.0 * tau * gamma - tau;
        let t = x.floor();
        let k = zeta * (x - t);
        Ok(TermCoord::new(t, k))
    }

    /// Componentwise addition `s_{t1+t2}<o_{k1+k2}>`; leaving the scale is an error.
    pub fn add(&self, a: TermCoord, b: TermCoord) -> Result<TermCoord> {
        self.check(a)?;
        self.check(b)?;
        let sum = TermCoord::new(a.t + b.t, a.k + b.k);
        self.check(sum)
            .map_err(|e| Error::Overflow(format!("{a} + {b} = {sum}: {e}")))?;
        Ok(sum)
    }

    /// Scalar multiple as the DHLT algebra defines it, `λ s_t<o_k> = s_{λt}<o_k>`.
    ///
    /// The second hierarchy is left untouched, so this is *not* the same as
    /// scaling the unit value; see [`scale_unit`](Self::scale_unit).
    pub fn scale_term(&self, lambda: f64, a: TermCoord) -> Result<TermCoord> {
        check_fraction("lambda", lambda)?;
        self.check(a)?;
        let out = TermCoord::new(lambda * a.t, a.k);
        self.check(out)?;
        Ok(out)
    }

    /// Scales the unit value: `g⁻¹(λ g(a))`.
    pub fn scale_unit(&self, lambda: f64, a: TermCoord) -> Result<TermCoord> {
        check_fraction("lambda", lambda)?;
        self.from_unit(lambda * self.to_unit(a)?)
    }

    /// Two coordinates are equivalent when their unit values agree.
    pub fn equivalent(&self, a: TermCoord, b: TermCoord) -> Result<bool> {
        Ok((self.to_unit(a)? - self.to_unit(b)?).abs() <= UNIT_SLACK)
    }
}

pub(crate) fn check_fraction(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Parameter {
            name,
            value,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// A continuous double-hierarchy coordinate `s_t<o_k>`.
///
/// Written and parsed in the literal form `s<t>(o<k>)`, e.g. `s-2(o1)` or `s2.5(o0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermCoord {
    pub t: f64,
    pub k: f64,
}

impl TermCoord {
    pub const fn new(t: f64, k: f64) -> Self {
        Self { t, k }
    }

    /// The additive identity `s_0<o_0>`.
    pub const ZERO: TermCoord = TermCoord::new(0.0, 0.0);
}

fn fmt_number(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // avoid printing "-0"
    let x = if x == 0.0 { 0.0 } else { x };
    write!(f, "{x}")
}

impl fmt::Display for TermCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("s")?;
        fmt_number(f, self.t)?;
        f.write_str("(o")?;
        fmt_number(f, self.k)?;
        f.write_str(")")
    }
}

impl FromStr for TermCoord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidTerm(format!("`{s}` is not a term literal like s-2(o1)"));
        let body = s.trim().strip_prefix('s').ok_or_else(bad)?;
        let (t, rest) = body.split_once("(o").ok_or_else(bad)?;
        let k = rest.strip_suffix(')').ok_or_else(bad)?;
        let t: f64 = t.parse().map_err(|_| bad())?;
        let k: f64 = k.parse().map_err(|_| bad())?;
        if !t.is_finite() || !k.is_finite() {
            return Err(bad());
        }
        Ok(TermCoord::new(t, k))
    }
}

impl Serialize for TermCoord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TermCoord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Literal(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Pair([t, k]) => Ok(TermCoord::new(t, k)),
            Repr::Literal(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn s44() -> LinguisticScale {
        LinguisticScale::new(4, 4).unwrap()
    }

    #[test]
    fn to_unit_examples() {
        let s = s44();
        assert_eq!(s.to_unit(TermCoord::new(0.0, 0.0)).unwrap(), 0.5);
        assert_eq!(s.to_unit(TermCoord::new(-4.0, 0.0)).unwrap(), 0.0);
        assert_eq!(s.to_unit(TermCoord::new(2.0, 2.0)).unwrap(), 26.0 / 32.0);
    }

    #[test]
    fn to_unit_rejects_out_of_range() {
        let s = s44();
        match s.to_unit(TermCoord::new(4.5, 0.0)) {
            Err(Error::OutOfRange { coordinate, .. }) => assert_eq!(coordinate, "t"),
            other => panic!("unexpected {other:?}"),
        }
        match s.to_unit(TermCoord::new(0.0, -5.0)) {
            Err(Error::OutOfRange { coordinate, .. }) => assert_eq!(coordinate, "k"),
            other => panic!("unexpected {other:?}"),
        }
        // inside the box but past the top of the scale
        assert!(s.to_unit(TermCoord::new(4.0, 1.0)).is_err());
        assert!(s.to_unit(TermCoord::new(-4.0, -1.0)).is_err());
    }

    #[test]
    fn from_unit_examples() {
        let s = s44();
        assert_eq!(s.from_unit(0.5).unwrap(), TermCoord::new(0.0, 0.0));
        assert_eq!(s.from_unit(1.0).unwrap(), TermCoord::new(4.0, 0.0));
        assert_eq!(s.from_unit(0.8125).unwrap(), TermCoord::new(2.0, 2.0));
        assert_eq!(s.from_unit(0.0).unwrap(), TermCoord::new(-4.0, 0.0));
        assert!(s.from_unit(1.01).is_err());
        assert!(s.from_unit(-0.01).is_err());
    }

    #[test]
    fn add_examples() {
        let s = s44();
        assert_eq!(
            s.add(TermCoord::new(2.0, 1.0), TermCoord::new(-2.0, -1.0)).unwrap(),
            TermCoord::ZERO
        );
        assert_eq!(
            s.add(TermCoord::new(1.0, 2.0), TermCoord::new(1.0, 1.0)).unwrap(),
            TermCoord::new(2.0, 3.0)
        );
        assert!(matches!(
            s.add(TermCoord::new(4.0, 0.0), TermCoord::new(1.0, 0.0)),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn scale_term_is_literal() {
        let s = s44();
        let a = TermCoord::new(3.0, 2.0);
        assert_eq!(s.scale_term(1.0, a).unwrap(), a);
        assert_eq!(
            s.scale_term(0.5, TermCoord::new(2.0, 0.0)).unwrap(),
            TermCoord::new(1.0, 0.0)
        );
        assert_eq!(s.scale_term(0.0, a).unwrap(), TermCoord::new(0.0, 2.0));
        assert!(s.scale_term(1.5, a).is_err());
        // the unit-space version disagrees whenever k != 0
        let unit = s.scale_unit(0.0, a).unwrap();
        assert_eq!(s.to_unit(unit).unwrap(), 0.0);
    }

    #[test]
    fn literal_round_trip() {
        for lit in ["s-2(o1)", "s0(o0)", "s2.5(o-1.25)"] {
            let t: TermCoord = lit.parse().unwrap();
            assert_eq!(t.to_string(), lit);
        }
        assert_eq!(TermCoord::new(-0.0, 0.0).to_string(), "s0(o0)");
        assert!("x1(o0)".parse::<TermCoord>().is_err());
        assert!("s1(o0".parse::<TermCoord>().is_err());
        assert!("s(o0)".parse::<TermCoord>().is_err());
    }

    #[test]
    fn serde_accepts_pairs_and_literals() {
        let a: TermCoord = serde_json::from_str("[-2, 1]").unwrap();
        let b: TermCoord = serde_json::from_str("\"s-2(o1)\"").unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"s-2(o1)\"");
    }

    #[test]
    fn scale_validation() {
        assert!(LinguisticScale::new(0, 4).is_err());
        assert!(LinguisticScale::new(4, 0).is_err());
        let labels: Vec<String> = (0..9).map(|i| i.to_string()).collect();
        assert!(s44().with_labels(Some(labels.clone()), None).is_ok());
        assert!(s44().with_labels(Some(labels[..8].to_vec()), None).is_err());
        assert!(serde_json::from_str::<LinguisticScale>(r#"{"tau":0,"zeta":4}"#).is_err());
    }

    #[test]
    fn labels_render() {
        let first = ["eb", "vb", "b", "sb", "eq", "sg", "g", "vg", "eg"];
        let second = ["ff", "sc", "ol", "al", "jr", "mu", "vm", "em", "en"];
        let s = s44()
            .with_labels(
                Some(first.iter().map(|x| x.to_string()).collect()),
                Some(second.iter().map(|x| x.to_string()).collect()),
            )
            .unwrap();
        assert_eq!(s.label(TermCoord::new(2.0, 1.0)).as_deref(), Some("mu g"));
        assert_eq!(s.label(TermCoord::new(2.5, 1.0)), None);
    }

    fn valid_coord(tau: u32, zeta: u32) -> impl Strategy<Value = TermCoord> {
        let (tf, zf) = (tau as f64, zeta as f64);
        (-tf..=tf, -zf..=zf).prop_filter_map("inside scale", move |(t, k)| {
            let g = (k + (tf + t) * zf) / (2.0 * zf * tf);
            (0.0..=1.0).contains(&g).then_some(TermCoord::new(t, k))
        })
    }

    proptest! {
        #[test]
        fn round_trip(tau in 1u32..12, zeta in 1u32..12, gamma in 0.0f64..=1.0) {
            let s = LinguisticScale::new(tau, zeta).unwrap();
            let c = s.from_unit(gamma).unwrap();
            s.check(c).unwrap();
            assert_abs_diff_eq!(s.to_unit(c).unwrap(), gamma, epsilon = 1e-12);
        }

        #[test]
        fn center_is_half(tau in 1u32..50, zeta in 1u32..50) {
            let s = LinguisticScale::new(tau, zeta).unwrap();
            prop_assert_eq!(s.to_unit(TermCoord::ZERO).unwrap(), 0.5);
        }

        #[test]
        fn reciprocal_pair((tau, zeta, c) in (1u32..9, 1u32..9).prop_flat_map(|(t, z)| (Just(t), Just(z), valid_coord(t, z)))) {
            let s = LinguisticScale::new(tau, zeta).unwrap();
            let sum = s.to_unit(c).unwrap() + s.to_unit(TermCoord::new(-c.t, -c.k)).unwrap();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        }

        #[test]
        fn monotone_in_each_coordinate(t in -3.0f64..3.0, k in -3.0f64..0.0, dt in 1e-6f64..1.0) {
            let s = s44();
            let base = s.to_unit(TermCoord::new(t, k)).unwrap();
            prop_assert!(s.to_unit(TermCoord::new(t + dt, k)).unwrap() > base);
            prop_assert!(s.to_unit(TermCoord::new(t, k + dt)).unwrap() > base);
        }
    }
}
