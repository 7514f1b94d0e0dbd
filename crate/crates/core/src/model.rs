//! Problem specifications, trajectories, the win criterion and stopping
//! regions.
//!
//! Stages are 1-indexed throughout: stage `k` refers to observation `X_k`,
//! `1 <= k <= n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which parametrisation a [`ProblemSpec`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// `P(+1) = P(-1) = p` at every stage.
    Weber,
    /// `P(+1) = p`, `P(-1) = p'`, constant over time.
    Biased,
    /// `P(+1) = P(-1) = p_k`, varying with the stage.
    #[serde(rename = "timevarying")]
    TimeVarying,
    /// Arbitrary per-stage `a_k = P(+1)` and `b_k = P(-1)`.
    General,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Weber => "weber",
            Kind::Biased => "biased",
            Kind::TimeVarying => "timevarying",
            Kind::General => "general",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weber" => Ok(Kind::Weber),
            "biased" => Ok(Kind::Biased),
            "timevarying" => Ok(Kind::TimeVarying),
            "general" => Ok(Kind::General),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// Unvalidated problem description, as read from a spec file or assembled
/// from command-line flags.
///
/// Exactly the fields required by `kind` must be present:
///
/// | kind          | fields                     |
/// |---------------|----------------------------|
/// | `weber`       | `n`, `p`                   |
/// | `biased`      | `n`, `p`, `p_prime`        |
/// | `timevarying` | `n`, `p_seq`               |
/// | `general`     | `n`, `plus_seq`, `minus_seq` |
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_seq: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plus_seq: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus_seq: Option<Vec<f64>>,
}

/// A validated problem: horizon `n` and per-stage probabilities of `+1` and
/// `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    plus: Vec<f64>,
    minus: Vec<f64>,
    kind: Kind,
}

impl ProblemSpec {
    pub fn weber(n: usize, p: f64) -> Result<Self> {
        Self::build(vec![p; n], vec![p; n])
    }

    pub fn biased(n: usize, p: f64, p_prime: f64) -> Result<Self> {
        Self::build(vec![p; n], vec![p_prime; n])
    }

    pub fn time_varying(p_seq: Vec<f64>) -> Result<Self> {
        Self::build(p_seq.clone(), p_seq)
    }

    pub fn general(plus_seq: Vec<f64>, minus_seq: Vec<f64>) -> Result<Self> {
        if plus_seq.len() != minus_seq.len() {
            return Err(Error::LengthMismatch {
                expected: plus_seq.len(),
                got: minus_seq.len(),
            });
        }
        Self::build(plus_seq, minus_seq)
    }

    fn build(plus: Vec<f64>, minus: Vec<f64>) -> Result<Self> {
        if plus.is_empty() {
            return Err(Error::EmptyHorizon);
        }
        for (i, (&a, &b)) in plus.iter().zip(&minus).enumerate() {
            check_prob("plus", i + 1, a)?;
            check_prob("minus", i + 1, b)?;
            if a + b > 1.0 {
                return Err(Error::ProbabilitySumExceedsOne {
                    stage: i + 1,
                    sum: a + b,
                });
            }
        }
        let kind = classify(&plus, &minus);
        Ok(Self { plus, minus, kind })
    }

    pub fn n(&self) -> usize {
        self.plus.len()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// `a_k = P(X_k = +1)`, 1-indexed.
    pub fn plus_prob(&self, stage: usize) -> f64 {
        self.plus[stage - 1]
    }

    /// `b_k = P(X_k = -1)`, 1-indexed.
    pub fn minus_prob(&self, stage: usize) -> f64 {
        self.minus[stage - 1]
    }

    pub fn plus_seq(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus_seq(&self) -> &[f64] {
        &self.minus
    }

    /// Constant `P(+1)` for the weber and biased kinds.
    pub fn p(&self) -> Option<f64> {
        matches!(self.kind, Kind::Weber | Kind::Biased).then(|| self.plus[0])
    }

    /// Constant `P(-1)` for the weber and biased kinds.
    pub fn p_prime(&self) -> Option<f64> {
        matches!(self.kind, Kind::Weber | Kind::Biased).then(|| self.minus[0])
    }

    pub fn q(&self) -> Option<f64> {
        self.p().map(|p| 1.0 - p)
    }

    pub fn q_prime(&self) -> Option<f64> {
        self.p_prime().map(|p| 1.0 - p)
    }

    pub fn q_tilde(&self) -> Option<f64> {
        Some(1.0 - self.p()? - self.p_prime()?)
    }

    /// Serialisable form, using the fields of the normalised kind.
    pub fn to_raw(&self) -> RawSpec {
        let mut raw = RawSpec {
            kind: self.kind.as_str().to_string(),
            n: self.n(),
            ..RawSpec::default()
        };
        match self.kind {
            Kind::Weber => raw.p = Some(self.plus[0]),
            Kind::Biased => {
                raw.p = Some(self.plus[0]);
                raw.p_prime = Some(self.minus[0]);
            }
            Kind::TimeVarying => raw.p_seq = Some(self.plus.clone()),
            Kind::General => {
                raw.plus_seq = Some(self.plus.clone());
                raw.minus_seq = Some(self.minus.clone());
            }
        }
        raw
    }
}

fn check_prob(field: &'static str, index: usize, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            field,
            index,
            value,
        })
    }
}

fn is_constant(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x == xs[0])
}

fn classify(plus: &[f64], minus: &[f64]) -> Kind {
    let symmetric = plus == minus;
    match (symmetric, is_constant(plus) && is_constant(minus)) {
        (true, true) => Kind::Weber,
        (true, false) => Kind::TimeVarying,
        (false, true) => Kind::Biased,
        (false, false) => Kind::General,
    }
}

/// Checks a raw description and builds the spec.
///
/// The returned kind is the most specific one the sequences allow, e.g. a
/// `biased` request with `p == p'` comes back as [`Kind::Weber`].
pub fn validate_spec(raw: &RawSpec) -> Result<ProblemSpec> {
    let kind: Kind = raw.kind.parse()?;
    let name = kind.as_str();
    let n = raw.n;
    if n < 1 {
        return Err(Error::EmptyHorizon);
    }

    let present = [
        ("p", raw.p.is_some()),
        ("p_prime", raw.p_prime.is_some()),
        ("p_seq", raw.p_seq.is_some()),
        ("plus_seq", raw.plus_seq.is_some()),
        ("minus_seq", raw.minus_seq.is_some()),
    ];
    let required: &[&'static str] = match kind {
        Kind::Weber => &["p"],
        Kind::Biased => &["p", "p_prime"],
        Kind::TimeVarying => &["p_seq"],
        Kind::General => &["plus_seq", "minus_seq"],
    };
    for (field, is_present) in present {
        let wanted = required.contains(&field);
        if wanted && !is_present {
            return Err(Error::MissingField { kind: name, field });
        }
        if !wanted && is_present {
            return Err(Error::UnexpectedField { kind: name, field });
        }
    }

    let check_len = |seq: &Vec<f64>| {
        if seq.is_empty() {
            Err(Error::EmptyHorizon)
        } else if seq.len() != n {
            Err(Error::LengthMismatch {
                expected: n,
                got: seq.len(),
            })
        } else {
            Ok(())
        }
    };

    match kind {
        Kind::Weber => ProblemSpec::weber(n, raw.p.unwrap_or_default()),
        Kind::Biased => ProblemSpec::biased(
            n,
            raw.p.unwrap_or_default(),
            raw.p_prime.unwrap_or_default(),
        ),
        Kind::TimeVarying => {
            let seq = raw.p_seq.clone().unwrap_or_default();
            check_len(&seq)?;
            ProblemSpec::time_varying(seq)
        }
        Kind::General => {
            let plus = raw.plus_seq.clone().unwrap_or_default();
            let minus = raw.minus_seq.clone().unwrap_or_default();
            check_len(&plus)?;
            check_len(&minus)?;
            ProblemSpec::general(plus, minus)
        }
    }
}

/// One realisation `x_1, ..., x_n` with every `x_k` in `{-1, 0, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trajectory(Vec<i8>);

impl Trajectory {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(Error::InvalidObservation(bad as i64));
        }
        Ok(Self(values))
    }

    pub fn from_slice(values: &[i64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| match v {
                -1..=1 => Ok(v as i8),
                _ => Err(Error::InvalidObservation(v)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    /// `x_k`, 1-indexed.
    pub fn get(&self, stage: usize) -> i8 {
        self.0[stage - 1]
    }
}

/// Whether stopping at stage `t` wins: `x_t != 0` and no later `x_i` equals
/// `x_t`.
pub fn win(traj: &Trajectory, t: usize) -> Result<bool> {
    let n = traj.len();
    if t < 1 || t > n {
        return Err(Error::StageOutOfRange { stage: t, n });
    }
    Ok(wins_at(traj.values(), t))
}

#[inline]
pub(crate) fn wins_at(values: &[i8], t: usize) -> bool {
    let x = values[t - 1];
    x != 0 && values[t..].iter().all(|&v| v != x)
}

/// Threshold pair `(s, s')`: stop on the first `+1` at a stage `>= s` or the
/// first `-1` at a stage `>= s'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub s: usize,
    pub s_prime: usize,
}

impl ThresholdPolicy {
    pub fn new(n: usize, s: usize, s_prime: usize) -> Result<Self> {
        for stage in [s, s_prime] {
            if stage < 1 || stage > n {
                return Err(Error::StageOutOfRange { stage, n });
            }
        }
        Ok(Self { s, s_prime })
    }

    /// Swaps the roles of `+1` and `-1`.
    pub fn swapped(self) -> Self {
        Self {
            s: self.s_prime,
            s_prime: self.s,
        }
    }
}

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.s, self.s_prime)
    }
}

/// Stopping region `{(k, +1): k in J+} ∪ {(k, -1): k in J-} ∪ {(n, 0)}`.
///
/// The terminal point `(n, 0)` is implicit: [`apply_policy`] always stops at
/// `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StoppingRegion {
    plus: Vec<bool>,
    minus: Vec<bool>,
}

impl StoppingRegion {
    /// Region holding only the forced terminal stop.
    pub fn terminal(n: usize) -> Self {
        Self {
            plus: vec![false; n],
            minus: vec![false; n],
        }
    }

    pub fn threshold(n: usize, policy: ThresholdPolicy) -> Self {
        Self {
            plus: (1..=n).map(|k| k >= policy.s).collect(),
            minus: (1..=n).map(|k| k >= policy.s_prime).collect(),
        }
    }

    pub fn from_stages(
        n: usize,
        plus: impl IntoIterator<Item = usize>,
        minus: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut region = Self::terminal(n);
        for (set, stages) in [
            (&mut region.plus, plus.into_iter().collect::<Vec<_>>()),
            (&mut region.minus, minus.into_iter().collect()),
        ] {
            for k in stages {
                if k < 1 || k > n {
                    return Err(Error::StageOutOfRange { stage: k, n });
                }
                set[k - 1] = true;
            }
        }
        Ok(region)
    }

    pub fn n(&self) -> usize {
        self.plus.len()
    }

    pub fn contains_plus(&self, stage: usize) -> bool {
        self.plus[stage - 1]
    }

    pub fn contains_minus(&self, stage: usize) -> bool {
        self.minus[stage - 1]
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self.plus.iter().zip(&other.plus).all(|(a, b)| !a || *b)
            && self.minus.iter().zip(&other.minus).all(|(a, b)| !a || *b)
    }

    /// First hitting time on raw values; the caller guarantees the length.
    #[inline]
    pub(crate) fn hit(&self, values: &[i8]) -> usize {
        let n = values.len();
        for (i, &x) in values[..n - 1].iter().enumerate() {
            if (x == 1 && self.plus[i]) || (x == -1 && self.minus[i]) {
                return i + 1;
            }
        }
        n
    }
}

/// First stage `k` with `(k, x_k)` in the region, or `n` if there is none.
pub fn apply_policy(region: &StoppingRegion, traj: &Trajectory) -> Result<usize> {
    if region.n() != traj.len() {
        return Err(Error::TrajectoryLength {
            expected: region.n(),
            got: traj.len(),
        });
    }
    Ok(region.hit(traj.values()))
}
