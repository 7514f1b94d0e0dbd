//! Equal probabilities of `+1` and `-1`, possibly changing with the stage:
//! `P(X_k = 1) = P(X_k = -1) = p_k <= 1/2`.
//!
//! The problem is monotone, so the one-stage look-ahead rule is optimal:
//! stop on a nonzero observation at stage `k` when winning with it now
//! (`V_k = Π_{j>k} q_j`) is at least as likely as winning with the next
//! nonzero observation (`W_k`). Both rules share the same threshold for `+1`
//! and `-1`.

use serde::Serialize;

use crate::model::{ProblemSpec, StoppingRegion, ThresholdPolicy};
use crate::oracle::policy_value;
use crate::tie::{at_least, strictly_below};
use crate::{Error, Result};

fn check_half(probs: &[f64]) -> Result<()> {
    for (i, &p) in probs.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability {
                field: "p_seq",
                index: i + 1,
                value: p,
            });
        }
        if p > 0.5 {
            return Err(Error::AboveOneHalf {
                stage: i + 1,
                value: p,
            });
        }
    }
    Ok(())
}

/// `r_j = p_j / (1 - p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OddsSequence(Vec<f64>);

impl OddsSequence {
    pub fn new(probs: &[f64]) -> Result<Self> {
        check_half(probs)?;
        Ok(Self(probs.iter().map(|&p| p / (1.0 - p)).collect()))
    }

    /// `r_j`, 1-indexed.
    pub fn get(&self, stage: usize) -> f64 {
        self.0[stage - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `Λ_k = W_k / (2 V_k)` for `k = 1, ..., n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSequence(Vec<f64>);

impl LambdaSequence {
    /// `Λ_k`, `1 <= k <= n - 1`.
    pub fn get(&self, k: usize) -> f64 {
        self.0[k - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Backward fill `Λ_{n-1} = r_n`, `Λ_k = r_{k+1} + (1 - r_{k+1}) Λ_{k+1}`.
pub fn lambda_sequence(probs: &[f64]) -> Result<LambdaSequence> {
    let n = probs.len();
    if n < 2 {
        return Err(Error::HorizonTooSmall { n, min: 2 });
    }
    let r = OddsSequence::new(probs)?;
    let mut out = vec![0.0; n - 1];
    out[n - 2] = r.get(n);
    for k in (1..n - 1).rev() {
        let rk = r.get(k + 1);
        out[k - 1] = rk + (1.0 - rk) * out[k];
    }
    Ok(LambdaSequence(out))
}

/// `V_k = Π_{j>k} q_j`: win probability when stopping on a nonzero `X_k`.
pub fn stop_value(probs: &[f64], k: usize) -> f64 {
    probs[k..].iter().map(|p| 1.0 - p).product()
}

/// `W_k`: win probability of passing stage `k` and stopping on the next
/// nonzero observation, as the explicit sum
/// `2 Σ_m [Π_{j=k+1}^{k+m} (1 - 2p_j)] p_{k+m+1} [Π_{j=k+m+2}^{n} q_j]`.
pub fn continue_next_value(probs: &[f64], k: usize) -> f64 {
    let n = probs.len();
    let mut total = 0.0;
    for m in 0..n - k {
        let quiet: f64 = probs[k..k + m].iter().map(|p| 1.0 - 2.0 * p).product();
        let hit = probs[k + m];
        let after: f64 = probs[k + m + 1..].iter().map(|p| 1.0 - p).product();
        total += quiet * hit * after;
    }
    2.0 * total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeVaryingSolution {
    /// First stage from which any nonzero observation is accepted.
    pub k_star: usize,
    pub policy: ThresholdPolicy,
    pub value: f64,
    /// Number of `Λ_k` values computed by the scan.
    pub lambda_evaluations: usize,
}

/// Linear backward scan for `k*`.
///
/// Walks `k = n-1, n-2, ...`, extending `Λ_k` one term at a time, and stops
/// at the first `k` where continuing beats stopping (`2 Λ_k > 1`), giving
/// `k* = k + 1`. If the scan reaches `k = 1` without that happening, `k* = 1`.
/// The policy accepts the first nonzero observation at a stage `>= k*`
/// (inclusive), which is the optimal rule; equality `2 Λ_k = 1` counts as
/// stopping.
pub fn solve_time_varying(probs: &[f64]) -> Result<TimeVaryingSolution> {
    let n = probs.len();
    if n == 0 {
        return Err(Error::EmptyHorizon);
    }
    let r = OddsSequence::new(probs)?;
    let mut k_star = 1;
    let mut evaluations = 0;
    if n > 1 {
        let mut k = n - 1;
        let mut lambda = r.get(n);
        evaluations = 1;
        loop {
            if strictly_below(1.0, 2.0 * lambda) {
                k_star = k + 1;
                break;
            }
            if k == 1 {
                break;
            }
            k -= 1;
            let rk = r.get(k + 1);
            lambda = rk + (1.0 - rk) * lambda;
            evaluations += 1;
        }
    }
    let policy = ThresholdPolicy {
        s: k_star,
        s_prime: k_star,
    };
    let spec = ProblemSpec::time_varying(probs.to_vec())?;
    let value = policy_value(&spec, &StoppingRegion::threshold(n, policy))?;
    Ok(TimeVaryingSolution {
        k_star,
        policy,
        value,
        lambda_evaluations: evaluations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeberSolution {
    pub s: usize,
    pub value: f64,
}

/// Constant `p`: `V_k = q^(n-k)`, `W_k = 2(q^(n-k) - (1-2p)^(n-k))`.
///
/// `s` is the smallest stage with `W_k <= V_k`; the optimal rule stops on the
/// first nonzero observation from stage `s` on, and wins with probability
/// `2(q^m - (1-2p)^m)`, `m = n - s + 1`.
pub fn weber_threshold(n: usize, p: f64) -> Result<WeberSolution> {
    if n == 0 {
        return Err(Error::EmptyHorizon);
    }
    check_half(&[p])?;
    let (q, q_tilde) = (1.0 - p, 1.0 - 2.0 * p);
    let stop_ok = |k: usize| {
        let e = (n - k) as i32;
        let v = q.powi(e);
        let w = 2.0 * (v - q_tilde.powi(e));
        at_least(v, w)
    };
    // W_k / V_k decreases in k and W_n = 0, so the stopping stages form a
    // suffix of 1..=n.
    let mut s = n;
    while s > 1 && stop_ok(s - 1) {
        s -= 1;
    }
    let m = (n - s + 1) as i32;
    Ok(WeberSolution {
        s,
        value: 2.0 * (q.powi(m) - q_tilde.powi(m)),
    })
}
