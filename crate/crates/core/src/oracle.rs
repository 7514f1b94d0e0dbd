//! Ground-truth solvers: exact backward induction for arbitrary independent
//! stages and exhaustive `3^n` evaluation of a stopping region.
//!
//! Every fast solver in the crate is checked against these.

use serde::Serialize;

use crate::model::{wins_at, ProblemSpec, StoppingRegion, ThresholdPolicy};
use crate::par::map_chunks;
use crate::tie::at_least;
use crate::{Error, Result};

/// Largest horizon accepted by [`enumerate_policy_value`] (`3^14` ≈ 4.8M
/// trajectories).
pub const MAX_ENUMERATION_N: usize = 14;

/// Output of [`solve_backward`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DPResult {
    /// `v_0, ..., v_n`: optimal win probability with `j` observations still
    /// to come. `v_0 = 0` and the problem value is `v_n`.
    pub continue_value: Vec<f64>,
    /// `stop_plus[k - 1]`: stop on `+1` at stage `k`.
    pub stop_plus: Vec<bool>,
    /// `stop_minus[k - 1]`: stop on `-1` at stage `k`.
    pub stop_minus: Vec<bool>,
    pub policy: ThresholdPolicy,
    pub value: f64,
}

impl DPResult {
    pub fn n(&self) -> usize {
        self.stop_plus.len()
    }

    /// Value of continuing past stage `k`, i.e. `v_{n-k}`.
    pub fn continue_value_after(&self, stage: usize) -> f64 {
        self.continue_value[self.n() - stage]
    }
}

/// `suffix[k - 1] = Π_{j > k} (1 - probs[j - 1])`: the chance that a value
/// seen at stage `k` is never seen again.
pub(crate) fn survival_after(probs: &[f64]) -> Vec<f64> {
    let n = probs.len();
    let mut out = vec![1.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        out[k] = out[k + 1] * (1.0 - probs[k + 1]);
    }
    out
}

/// Backward induction over the stages.
///
/// At stage `k` a `+1` is worth `Π_{j>k}(1 - a_j)` if we stop and `v_{n-k}`
/// if we continue; the rule stops when the former is at least the latter
/// (ties stop, giving the smallest optimal thresholds). The last stage always
/// stops.
pub fn solve_backward(spec: &ProblemSpec) -> DPResult {
    let n = spec.n();
    let plus_stop = survival_after(spec.plus_seq());
    let minus_stop = survival_after(spec.minus_seq());

    let mut continue_value = Vec::with_capacity(n + 1);
    continue_value.push(0.0);
    let mut stop_plus = vec![false; n];
    let mut stop_minus = vec![false; n];
    let mut v = 0.0_f64;
    for k in (1..=n).rev() {
        let (a, b) = (spec.plus_prob(k), spec.minus_prob(k));
        let (sp, sm) = (plus_stop[k - 1], minus_stop[k - 1]);
        stop_plus[k - 1] = at_least(sp, v);
        stop_minus[k - 1] = at_least(sm, v);
        v = a * sp.max(v) + b * sm.max(v) + (1.0 - a - b) * v;
        continue_value.push(v);
    }

    // Stage n always stops, so both searches succeed.
    let first = |flags: &[bool]| flags.iter().position(|&f| f).map_or(n, |i| i + 1);
    let policy = ThresholdPolicy {
        s: first(&stop_plus),
        s_prime: first(&stop_minus),
    };
    DPResult {
        continue_value,
        stop_plus,
        stop_minus,
        policy,
        value: v,
    }
}

/// Exact win probability of a stopping region by backward recursion in
/// `O(n)`. Independent of the enumeration path.
pub fn policy_value(spec: &ProblemSpec, region: &StoppingRegion) -> Result<f64> {
    let n = spec.n();
    if region.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: region.n(),
        });
    }
    let plus_stop = survival_after(spec.plus_seq());
    let minus_stop = survival_after(spec.minus_seq());
    let mut u = 0.0;
    for k in (1..=n).rev() {
        let (a, b) = (spec.plus_prob(k), spec.minus_prob(k));
        let last = k == n;
        let on_plus = if last || region.contains_plus(k) {
            plus_stop[k - 1]
        } else {
            u
        };
        let on_minus = if last || region.contains_minus(k) {
            minus_stop[k - 1]
        } else {
            u
        };
        let on_zero = if last { 0.0 } else { u };
        u = a * on_plus + b * on_minus + (1.0 - a - b) * on_zero;
    }
    Ok(u)
}

/// Exact win probability of `region` by summing over all `3^n` trajectories.
///
/// Trajectories are split into fixed chunks whose partial sums are added in
/// chunk order, so the result does not depend on threading.
pub fn enumerate_policy_value(spec: &ProblemSpec, region: &StoppingRegion) -> Result<f64> {
    let n = spec.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::HorizonTooLarge {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    if region.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: region.n(),
        });
    }

    // Digit d of a trajectory index encodes x_{d+1}: 0 -> 0, 1 -> +1, 2 -> -1.
    let probs: Vec<[f64; 3]> = (1..=n)
        .map(|k| {
            let (a, b) = (spec.plus_prob(k), spec.minus_prob(k));
            [1.0 - a - b, a, b]
        })
        .collect();
    const VALUE: [i8; 3] = [0, 1, -1];

    let inner = n.min(9);
    let chunk_len = 3u64.pow(inner as u32);
    let chunks = 3u64.pow((n - inner) as u32);

    let partial = map_chunks(chunks, |chunk| {
        let mut digits = vec![0usize; n];
        let mut rest = chunk;
        for d in digits[inner..].iter_mut() {
            *d = (rest % 3) as usize;
            rest /= 3;
        }
        let mut values: Vec<i8> = digits.iter().map(|&d| VALUE[d]).collect();
        let mut sum = 0.0;
        for _ in 0..chunk_len {
            let t = region.hit(&values);
            if wins_at(&values, t) {
                let prob: f64 = digits.iter().zip(&probs).map(|(&d, p)| p[d]).product();
                sum += prob;
            }
            // odometer over the low `inner` digits
            for i in 0..inner {
                digits[i] += 1;
                if digits[i] < 3 {
                    values[i] = VALUE[digits[i]];
                    break;
                }
                digits[i] = 0;
                values[i] = 0;
            }
        }
        sum
    });
    Ok(partial.iter().sum())
}

/// Result of [`verify_monotone`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub monotone: bool,
    /// First stage where a `+1` stop decision switches back to continue.
    pub plus_violation: Option<usize>,
    pub minus_violation: Option<usize>,
    /// Stages where the decisions first become "stop".
    pub plus_switch: usize,
    pub minus_switch: usize,
}

fn first_drop(flags: &[bool]) -> Option<usize> {
    flags.windows(2).position(|w| w[0] && !w[1]).map(|i| i + 2)
}

/// Runs [`solve_backward`] and checks that both stop decisions are
/// nondecreasing in the stage.
pub fn verify_monotone(spec: &ProblemSpec) -> MonotoneReport {
    let dp = solve_backward(spec);
    let plus_violation = first_drop(&dp.stop_plus);
    let minus_violation = first_drop(&dp.stop_minus);
    MonotoneReport {
        monotone: plus_violation.is_none() && minus_violation.is_none(),
        plus_violation,
        minus_violation,
        plus_switch: dp.policy.s,
        minus_switch: dp.policy.s_prime,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sum over every outcome, written independently of `enumerate_policy_value`:
    /// recursive expansion with a fresh trajectory per leaf.
    fn brute_force(spec: &ProblemSpec, region: &StoppingRegion) -> f64 {
        fn go(
            spec: &ProblemSpec,
            region: &StoppingRegion,
            prefix: &mut Vec<i64>,
            prob: f64,
        ) -> f64 {
            let k = prefix.len() + 1;
            if k > spec.n() {
                let traj = crate::Trajectory::from_slice(prefix).unwrap();
                let t = crate::model::apply_policy(region, &traj).unwrap();
                return if crate::model::win(&traj, t).unwrap() {
                    prob
                } else {
                    0.0
                };
            }
            let (a, b) = (spec.plus_prob(k), spec.minus_prob(k));
            let mut total = 0.0;
            for (x, px) in [(1, a), (-1, b), (0, 1.0 - a - b)] {
                prefix.push(x);
                total += go(spec, region, prefix, prob * px);
                prefix.pop();
            }
            total
        }
        go(spec, region, &mut Vec::new(), 1.0)
    }

    fn thresholds(n: usize, s: usize, s_prime: usize) -> StoppingRegion {
        StoppingRegion::threshold(n, ThresholdPolicy::new(n, s, s_prime).unwrap())
    }

    #[test]
    fn two_stage_example() {
        let spec = ProblemSpec::biased(2, 0.3, 0.2).unwrap();
        // hand enumeration: 0.3*0.7 + 0.2*0.8 + 0.5*0.5
        let expect = 0.3 * 0.7 + 0.2 * 0.8 + 0.5 * 0.5;
        assert!((brute_force(&spec, &thresholds(2, 1, 1)) - expect).abs() < 1e-15);
        let dp = solve_backward(&spec);
        assert_eq!(dp.policy, ThresholdPolicy { s: 1, s_prime: 1 });
        assert!((dp.value - 0.62).abs() < 1e-12);
        let e = enumerate_policy_value(&spec, &thresholds(2, 1, 1)).unwrap();
        assert!((e - 0.62).abs() < 1e-12);
        let e = enumerate_policy_value(&spec, &thresholds(2, 2, 1)).unwrap();
        assert!((e - 0.56).abs() < 1e-12);
    }

    #[test]
    fn three_stage_example() {
        let spec = ProblemSpec::biased(3, 0.4, 0.1).unwrap();
        let dp = solve_backward(&spec);
        assert_eq!(dp.policy, ThresholdPolicy { s: 2, s_prime: 1 });
        let oracle = brute_force(&spec, &thresholds(3, 2, 1));
        assert!((oracle - 0.603).abs() < 1e-12);
        assert!((dp.value - oracle).abs() < 1e-12);
        // every other threshold pair is worse
        for s in 1..=3 {
            for sp in 1..=3 {
                assert!(brute_force(&spec, &thresholds(3, s, sp)) <= oracle + 1e-15);
            }
        }
    }

    #[test]
    fn headline_instance() {
        let spec = ProblemSpec::biased(40, 0.09, 0.05).unwrap();
        let dp = solve_backward(&spec);
        assert_eq!(dp.policy, ThresholdPolicy { s: 33, s_prime: 28 });
        assert!((dp.value - 0.52987).abs() < 5e-5);
        let report = verify_monotone(&spec);
        assert!(report.monotone);
        assert_eq!((report.plus_switch, report.minus_switch), (33, 28));
    }

    #[test]
    fn certain_nonzero_stops_at_the_end() {
        let spec = ProblemSpec::biased(5, 0.6, 0.4).unwrap();
        let dp = solve_backward(&spec);
        assert_eq!(dp.policy, ThresholdPolicy { s: 5, s_prime: 5 });
        assert!((dp.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_stage_is_trivially_monotone() {
        for (p, pp) in [(0.0, 0.0), (0.3, 0.1), (0.5, 0.5)] {
            let spec = ProblemSpec::biased(1, p, pp).unwrap();
            let r = verify_monotone(&spec);
            assert!(r.monotone);
            assert_eq!((r.plus_switch, r.minus_switch), (1, 1));
            assert!((solve_backward(&spec).value - (p + pp)).abs() < 1e-15);
        }
    }

    #[test]
    fn time_varying_ramp_is_monotone() {
        let spec = ProblemSpec::time_varying((1..=10).map(|k| k as f64 / 25.0).collect()).unwrap();
        assert!(verify_monotone(&spec).monotone);
    }

    #[test]
    fn continue_values_nondecreasing() {
        let spec = ProblemSpec::general(
            vec![0.1, 0.3, 0.05, 0.2, 0.4, 0.1],
            vec![0.2, 0.1, 0.3, 0.25, 0.05, 0.3],
        )
        .unwrap();
        let dp = solve_backward(&spec);
        assert_eq!(dp.continue_value.len(), 7);
        assert_eq!(dp.continue_value[0], 0.0);
        assert!(dp.continue_value.windows(2).all(|w| w[0] <= w[1] + 1e-15));
        assert_eq!(dp.value, dp.continue_value[6]);
        assert_eq!(dp.continue_value_after(6), 0.0);
        let region = StoppingRegion::threshold(6, dp.policy);
        assert!((brute_force(&spec, &region) - dp.value).abs() < 1e-12);
        assert!((policy_value(&spec, &region).unwrap() - dp.value).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_recursive_brute_force_on_irregular_regions() {
        let spec = ProblemSpec::general(
            vec![0.1, 0.3, 0.05, 0.2, 0.4, 0.1, 0.2],
            vec![0.2, 0.1, 0.3, 0.25, 0.05, 0.3, 0.2],
        )
        .unwrap();
        let region = StoppingRegion::from_stages(7, [2, 5], [1, 4, 6]).unwrap();
        let e = enumerate_policy_value(&spec, &region).unwrap();
        assert!((e - brute_force(&spec, &region)).abs() < 1e-12);
        assert!((e - policy_value(&spec, &region).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn terminal_region_wins_iff_last_nonzero() {
        let spec = ProblemSpec::general(vec![0.1, 0.3, 0.25], vec![0.2, 0.1, 0.35]).unwrap();
        let e = enumerate_policy_value(&spec, &StoppingRegion::terminal(3)).unwrap();
        assert!((e - 0.6).abs() < 1e-12);
    }

    #[test]
    fn enumeration_guard() {
        let spec = ProblemSpec::weber(15, 0.2).unwrap();
        assert_eq!(
            enumerate_policy_value(&spec, &StoppingRegion::terminal(15)).unwrap_err(),
            Error::HorizonTooLarge { n: 15, max: 14 }
        );
        let spec = ProblemSpec::weber(3, 0.2).unwrap();
        assert!(enumerate_policy_value(&spec, &StoppingRegion::terminal(4)).is_err());
        assert!(policy_value(&spec, &StoppingRegion::terminal(4)).is_err());
    }

    #[test]
    fn first_drop_reports_the_stage() {
        assert_eq!(first_drop(&[false, true, true]), None);
        assert_eq!(first_drop(&[false, true, false, true]), Some(3));
    }
}
