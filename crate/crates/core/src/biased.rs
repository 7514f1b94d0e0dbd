//! Constant but unequal probabilities `P(+1) = p`, `P(-1) = p'`.
//!
//! `w_{j,k}` is the win probability of the threshold rule that stops on the
//! first `+1` at a stage `>= j` or the first `-1` at a stage `>= k`. With
//! `p >= p'` the optimal thresholds satisfy `s >= s'`, so only the lower
//! triangle `j >= k` is ever needed by the solvers.

use std::cell::Cell;
use std::fmt;

use serde::Serialize;

use crate::model::{ProblemSpec, ThresholdPolicy};
use crate::symmetric::weber_threshold;
use crate::tie::{at_least, strictly_below};
use crate::{Error, Result};

/// Which algorithm produced a [`SolveReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Walk,
    Bisection,
    Dp,
    Odds,
    Weber,
    Lambda,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Walk => "walk",
            Method::Bisection => "bisection",
            Method::Dp => "dp",
            Method::Odds => "odds",
            Method::Weber => "weber",
            Method::Lambda => "lambda",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub thresholds: ThresholdPolicy,
    pub value: f64,
    pub method: Method,
    /// Number of `w` (or odds) evaluations performed.
    pub evaluation_count: usize,
}

/// Lower triangle `w_{j,k}`, `1 <= k <= j <= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WGrid {
    n: usize,
    p: f64,
    p_prime: f64,
    entries: Vec<f64>,
}

impl WGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn p_prime(&self) -> f64 {
        self.p_prime
    }

    #[inline]
    fn index(j: usize, k: usize) -> usize {
        j * (j - 1) / 2 + (k - 1)
    }

    /// `w_{j,k}` for `1 <= k <= j <= n`.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        assert!(
            1 <= k && k <= j && j <= self.n,
            "({j}, {k}) outside the lower triangle"
        );
        self.entries[Self::index(j, k)]
    }

    /// `(k_plus, k_minus, w)` rows, `k_plus` ascending then `k_minus`
    /// ascending.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.n).flat_map(move |j| (1..=j).map(move |k| (j, k, self.get(j, k))))
    }

    /// Largest entry, ties resolved to the first row in [`rows`](Self::rows)
    /// order.
    pub fn argmax(&self) -> (usize, usize, f64) {
        self.rows().fold((1, 1, f64::NEG_INFINITY), |best, row| {
            if row.2 > best.2 {
                row
            } else {
                best
            }
        })
    }
}

fn check_biased(n: usize, p: f64, p_prime: f64) -> Result<()> {
    ProblemSpec::biased(n, p, p_prime).map(|_| ())
}

/// Fills the grid backward from `w_{n,n} = p + p'`:
///
/// ```text
/// w_{j,j} = p' q'^(n-j) + p q^(n-j) + q~ w_{j+1,j+1}
/// w_{j,k} = p' q'^(n-k) + q' w_{j,k+1}          (j > k)
/// ```
pub fn w_recurrence(n: usize, p: f64, p_prime: f64) -> Result<WGrid> {
    check_biased(n, p, p_prime)?;
    if p_prime == 0.0 {
        return Err(Error::DegenerateMinus);
    }
    let (q, q_prime, q_tilde) = (1.0 - p, 1.0 - p_prime, 1.0 - p - p_prime);
    let mut entries = vec![0.0; n * (n + 1) / 2];

    let mut diag = p + p_prime;
    entries[WGrid::index(n, n)] = diag;
    for j in (1..n).rev() {
        let e = (n - j) as i32;
        diag = p_prime * q_prime.powi(e) + p * q.powi(e) + q_tilde * diag;
        entries[WGrid::index(j, j)] = diag;
    }
    for j in 2..=n {
        for k in (1..j).rev() {
            let next = entries[WGrid::index(j, k + 1)];
            entries[WGrid::index(j, k)] = p_prime * q_prime.powi((n - k) as i32) + q_prime * next;
        }
    }
    Ok(WGrid {
        n,
        p,
        p_prime,
        entries,
    })
}

/// Single `w_{j,k}` from the closed form, any `1 <= j, k <= n`.
///
/// ```text
/// w_{j,j} = (p/p')(q^m - q~^m) + (p'/p)(q'^m - q~^m),   m = n - j + 1
/// w_{j,k} = (j-k) p' q'^(n-k) + q'^(j-k) w_{j,j}        (j > k)
/// ```
///
/// For `j < k` the roles of `+1` and `-1` are exchanged.
pub fn w_closed_form(n: usize, p: f64, p_prime: f64, j: usize, k: usize) -> Result<f64> {
    check_biased(n, p, p_prime)?;
    if p == 0.0 || p_prime == 0.0 {
        return Err(Error::DegenerateClosedForm);
    }
    for stage in [j, k] {
        if stage < 1 || stage > n {
            return Err(Error::StageOutOfRange { stage, n });
        }
    }
    Ok(closed_form(n, p, p_prime, j, k))
}

fn closed_form(n: usize, p: f64, p_prime: f64, j: usize, k: usize) -> f64 {
    if j < k {
        return closed_form(n, p_prime, p, k, j);
    }
    let (q, q_prime, q_tilde) = (1.0 - p, 1.0 - p_prime, 1.0 - p - p_prime);
    let m = (n - j + 1) as i32;
    let diag = (p / p_prime) * (q.powi(m) - q_tilde.powi(m))
        + (p_prime / p) * (q_prime.powi(m) - q_tilde.powi(m));
    let gap = j - k;
    gap as f64 * p_prime * q_prime.powi((n - k) as i32) + q_prime.powi(gap as i32) * diag
}

/// Closed-form evaluator that counts calls.
struct Counted {
    n: usize,
    p: f64,
    p_prime: f64,
    calls: Cell<usize>,
}

impl Counted {
    fn new(n: usize, p: f64, p_prime: f64) -> Self {
        Self {
            n,
            p,
            p_prime,
            calls: Cell::new(0),
        }
    }

    fn w(&self, j: usize, k: usize) -> f64 {
        self.calls.set(self.calls.get() + 1);
        closed_form(self.n, self.p, self.p_prime, j, k)
    }
}

/// Cases every fast solver settles before touching `w`.
fn degenerate(n: usize, p: f64, p_prime: f64) -> Result<Option<SolveReport>> {
    check_biased(n, p, p_prime)?;
    let report = if p == 0.0 && p_prime == 0.0 {
        Some(SolveReport {
            thresholds: ThresholdPolicy { s: n, s_prime: n },
            value: 0.0,
            method: Method::Odds,
            evaluation_count: 0,
        })
    } else if p + p_prime == 1.0 {
        // every observation is nonzero: stop on the last one
        Some(SolveReport {
            thresholds: ThresholdPolicy { s: n, s_prime: n },
            value: 1.0,
            method: Method::Walk,
            evaluation_count: 0,
        })
    } else if p_prime == 0.0 {
        Some(odds_threshold(&vec![p; n])?)
    } else if p == 0.0 {
        let mut r = odds_threshold(&vec![p_prime; n])?;
        r.thresholds = r.thresholds.swapped();
        Some(r)
    } else if p == p_prime {
        let weber = weber_threshold(n, p)?;
        Some(SolveReport {
            thresholds: ThresholdPolicy {
                s: weber.s,
                s_prime: weber.s,
            },
            value: weber.value,
            method: Method::Weber,
            evaluation_count: 0,
        })
    } else {
        None
    };
    Ok(report)
}

/// Runs `solve` with `p >= p'`, swapping roles (and the returned thresholds)
/// when `p < p'`.
fn oriented(
    n: usize,
    p: f64,
    p_prime: f64,
    solve: impl Fn(&Counted) -> Result<ThresholdPolicy>,
    method: Method,
) -> Result<SolveReport> {
    if let Some(report) = degenerate(n, p, p_prime)? {
        return Ok(report);
    }
    let swap = p < p_prime;
    let w = if swap {
        Counted::new(n, p_prime, p)
    } else {
        Counted::new(n, p, p_prime)
    };
    let policy = solve(&w)?;
    let value = closed_form(w.n, w.p, w.p_prime, policy.s, policy.s_prime);
    Ok(SolveReport {
        thresholds: if swap { policy.swapped() } else { policy },
        value,
        method,
        evaluation_count: w.calls.get(),
    })
}

/// Zigzag descent from the terminal region.
///
/// Alternately tries lowering the `-1` threshold (`w_{k,k-1}` against
/// `w_{k,k}`) and the `+1` threshold (`w_{k-1,k-1}` against `w_{k,k-1}`).
/// A failed `-1` move ends with `s = s' = k`. A failed `+1` move fixes
/// `s = k + 1`, the last accepted plus-threshold, and the descent continues
/// on the `-1` threshold alone.
///
/// The published pseudo-code assigns `s := k` after the decrement at this
/// point, which is one too low: on `(n, p, p') = (3, 0.4, 0.1)` it returns
/// `(1, 1)` with value `0.515` instead of the optimal `(2, 1)` with `0.603`.
///
/// Moves are accepted on ties, so the result is the smallest optimal pair.
pub fn solve_walk(n: usize, p: f64, p_prime: f64) -> Result<SolveReport> {
    oriented(n, p, p_prime, walk, Method::Walk)
}

fn walk(w: &Counted) -> Result<ThresholdPolicy> {
    let mut k = w.n;
    let mut alpha = w.w(k, k);
    loop {
        if k == 1 {
            return Ok(ThresholdPolicy { s: 1, s_prime: 1 });
        }
        let beta = w.w(k, k - 1);
        if strictly_below(beta, alpha) {
            return Ok(ThresholdPolicy { s: k, s_prime: k });
        }
        alpha = beta;
        k -= 1;
        let beta = w.w(k, k);
        if strictly_below(beta, alpha) {
            let s = k + 1;
            return Ok(ThresholdPolicy {
                s,
                s_prime: walk_minus_only(w, s, k, alpha),
            });
        }
        alpha = beta;
    }
}

/// Lowers the `-1` threshold from `k` with the `+1` threshold fixed at `s`.
fn walk_minus_only(w: &Counted, s: usize, mut k: usize, mut alpha: f64) -> usize {
    loop {
        if k == 1 {
            return 1;
        }
        let beta = w.w(s, k - 1);
        if strictly_below(beta, alpha) {
            return k;
        }
        alpha = beta;
        k -= 1;
    }
}

/// Smallest argmax of `f` on `lo..=hi` for a unimodal `f`.
///
/// Ternary search; equal probes shrink toward the smaller index, and brackets
/// of width at most 4 are finished by a linear scan.
pub(crate) fn unimodal_argmax(mut lo: usize, mut hi: usize, f: impl Fn(usize) -> f64) -> usize {
    while hi - lo > 4 {
        let third = (hi - lo) / 3;
        let (m1, m2) = (lo + third, hi - third);
        if strictly_below(f(m1), f(m2)) {
            lo = m1 + 1;
        } else {
            hi = m2 - 1;
        }
    }
    let mut best = lo;
    let mut best_value = f(lo);
    for i in lo + 1..=hi {
        let v = f(i);
        if strictly_below(best_value, v) {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Checks that `at` is the smallest argmax of `f` against its neighbours.
fn check_mode(
    at: usize,
    lo: usize,
    hi: usize,
    f: impl Fn(usize) -> f64,
    context: &'static str,
) -> Result<()> {
    let here = f(at);
    let left_ok = at == lo || strictly_below(f(at - 1), here);
    let right_ok = at == hi || at_least(here, f(at + 1));
    if left_ok && right_ok {
        Ok(())
    } else {
        Err(Error::UnimodalityViolation { index: at, context })
    }
}

/// Finds `s` as the mode of `j -> w_{j,1}` and then `s'` as the mode of
/// `k -> w_{s,k}` on `k <= s`, each by ternary search over the closed form.
/// Uses `O(log n)` evaluations.
///
/// Returns [`Error::UnimodalityViolation`] if either mode fails a check
/// against its neighbours.
pub fn solve_bisection(n: usize, p: f64, p_prime: f64) -> Result<SolveReport> {
    oriented(n, p, p_prime, bisection, Method::Bisection)
}

fn bisection(w: &Counted) -> Result<ThresholdPolicy> {
    let n = w.n;
    let s = unimodal_argmax(1, n, |j| w.w(j, 1));
    check_mode(s, 1, n, |j| w.w(j, 1), "j -> w(j, 1)")?;
    let s_prime = unimodal_argmax(1, s, |k| w.w(s, k));
    check_mode(s_prime, 1, s, |k| w.w(s, k), "k -> w(s, k)")?;
    Ok(ThresholdPolicy { s, s_prime })
}

/// Odds rule for independent indicators with success probabilities `p_k`
/// (`-1` never occurs).
///
/// With `r_k = p_k / (1 - p_k)`, `s` is the largest index whose backward odds
/// sum `Σ_{j>=s} r_j` reaches 1 (ties count as reaching it), or 1 if the
/// total stays below 1. A certain success (`p_k = 1`) has infinite odds and
/// ends the scan at its index. The reported `s'` is 1 since a `-1` never
/// occurs.
pub fn odds_threshold(probs: &[f64]) -> Result<SolveReport> {
    if probs.is_empty() {
        return Err(Error::EmptyHorizon);
    }
    for (i, &p) in probs.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability {
                field: "odds",
                index: i + 1,
                value: p,
            });
        }
    }
    let n = probs.len();
    let mut sum = 0.0;
    let mut s = 1;
    let mut evaluations = 0;
    for k in (1..=n).rev() {
        let p = probs[k - 1];
        evaluations += 1;
        if p == 1.0 {
            s = k;
            break;
        }
        sum += p / (1.0 - p);
        if at_least(sum, 1.0) {
            s = k;
            break;
        }
    }

    // P(exactly one success among stages s..=n)
    let tail = &probs[s - 1..];
    let mut value = 0.0;
    let mut none_before = 1.0;
    let mut none_after: Vec<f64> = vec![1.0; tail.len()];
    for i in (0..tail.len().saturating_sub(1)).rev() {
        none_after[i] = none_after[i + 1] * (1.0 - tail[i + 1]);
    }
    for (i, &p) in tail.iter().enumerate() {
        value += none_before * p * none_after[i];
        none_before *= 1.0 - p;
    }

    Ok(SolveReport {
        thresholds: ThresholdPolicy { s, s_prime: 1 },
        value,
        method: Method::Odds,
        evaluation_count: evaluations,
    })
}

/// Smallest-argmax modes of the two slice families of `(j, k) -> w_{j,k}`
/// over the full square.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Modes {
    /// `plus_modes[k - 1]` = argmax over `j` of `w_{j,k}`.
    pub plus_modes: Vec<usize>,
    /// `minus_modes[j - 1]` = argmax over `k` of `w_{j,k}`.
    pub minus_modes: Vec<usize>,
}

pub fn modes(n: usize, p: f64, p_prime: f64) -> Result<Modes> {
    w_closed_form(n, p, p_prime, 1, 1)?;
    let argmax = |f: &dyn Fn(usize) -> f64| {
        let mut best = 1;
        for i in 2..=n {
            if strictly_below(f(best), f(i)) {
                best = i;
            }
        }
        best
    };
    let w = |j, k| closed_form(n, p, p_prime, j, k);
    Ok(Modes {
        plus_modes: (1..=n).map(|k| argmax(&|j| w(j, k))).collect(),
        minus_modes: (1..=n).map(|j| argmax(&|k| w(j, k))).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_stage_grid() {
        let g = w_recurrence(2, 0.3, 0.2).unwrap();
        assert!((g.get(2, 2) - 0.5).abs() < 1e-15);
        assert!((g.get(2, 1) - 0.56).abs() < 1e-15);
        assert!((g.get(1, 1) - 0.62).abs() < 1e-15);
        let rows: Vec<_> = g.rows().map(|(j, k, _)| (j, k)).collect();
        assert_eq!(rows, vec![(1, 1), (2, 1), (2, 2)]);
    }

    #[test]
    fn terminal_entry_is_p_plus_p_prime() {
        for (n, p, pp) in [(1, 0.3, 0.2), (7, 0.45, 0.05), (40, 0.09, 0.05)] {
            let g = w_recurrence(n, p, pp).unwrap();
            assert!((g.get(n, n) - (p + pp)).abs() < 1e-15);
            assert!((w_closed_form(n, p, pp, n, n).unwrap() - (p + pp)).abs() < 1e-15);
        }
    }

    #[test]
    fn three_stage_entries() {
        let g = w_recurrence(3, 0.4, 0.1).unwrap();
        assert!((g.get(2, 1) - 0.603).abs() < 1e-12);
        assert!((w_closed_form(3, 0.4, 0.1, 2, 1).unwrap() - 0.603).abs() < 1e-12);
        assert!((w_closed_form(2, 0.3, 0.2, 1, 1).unwrap() - 0.62).abs() < 1e-12);
    }

    #[test]
    fn upper_triangle_swaps_roles() {
        let a = w_closed_form(6, 0.3, 0.1, 2, 5).unwrap();
        let b = w_closed_form(6, 0.1, 0.3, 5, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            w_recurrence(5, 0.3, 0.0).unwrap_err(),
            Error::DegenerateMinus
        );
        assert_eq!(
            w_closed_form(5, 0.0, 0.3, 1, 1).unwrap_err(),
            Error::DegenerateClosedForm
        );
        assert!(w_closed_form(5, 0.2, 0.3, 6, 1).is_err());
        assert!(w_recurrence(5, 0.7, 0.4).is_err());

        let r = solve_walk(6, 0.6, 0.4).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 6, s_prime: 6 });
        assert_eq!(r.value, 1.0);

        let r = solve_walk(6, 0.0, 0.0).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 6, s_prime: 6 });
        assert_eq!(r.value, 0.0);

        let r = solve_bisection(10, 0.2, 0.0).unwrap();
        assert_eq!(r.method, Method::Odds);
        assert_eq!(r.thresholds.s, 7);

        let r = solve_walk(10, 0.0, 0.2).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 1, s_prime: 7 });

        let r = solve_walk(10, 0.2, 0.2).unwrap();
        assert_eq!(r.method, Method::Weber);
        assert_eq!(r.thresholds, ThresholdPolicy { s: 8, s_prime: 8 });
        assert!((r.value - 0.592).abs() < 1e-12);
    }

    #[test]
    fn walk_examples() {
        let r = solve_walk(40, 0.09, 0.05).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 33, s_prime: 28 });
        assert!((r.value - 0.52987).abs() < 5e-5);
        assert_eq!(r.method, Method::Walk);

        let r = solve_walk(2, 0.3, 0.2).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 1, s_prime: 1 });
        assert!((r.value - 0.62).abs() < 1e-12);

        // exercises the failed plus-move branch
        let r = solve_walk(3, 0.4, 0.1).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 2, s_prime: 1 });
        assert!((r.value - 0.603).abs() < 1e-12);
    }

    #[test]
    fn walk_swaps_when_minus_is_likelier() {
        let r = solve_walk(40, 0.05, 0.09).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 28, s_prime: 33 });
        let b = solve_bisection(40, 0.05, 0.09).unwrap();
        assert_eq!(b.thresholds, r.thresholds);
    }

    #[test]
    fn bisection_examples() {
        let r = solve_bisection(40, 0.09, 0.05).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 33, s_prime: 28 });
        assert!(
            r.evaluation_count < 60,
            "{} evaluations",
            r.evaluation_count
        );

        let r = solve_bisection(3, 0.4, 0.1).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 2, s_prime: 1 });
        let w = |j| w_closed_form(3, 0.4, 0.1, j, 1).unwrap();
        assert!((w(1) - 0.515).abs() < 1e-12);
        assert!((w(2) - 0.603).abs() < 1e-12);
        assert!((w(3) - 0.567).abs() < 1e-12);

        let r = solve_bisection(2, 0.3, 0.2).unwrap();
        assert_eq!(r.thresholds, ThresholdPolicy { s: 1, s_prime: 1 });
        assert!((r.value - 0.62).abs() < 1e-12);
    }

    #[test]
    fn bisection_evaluations_grow_logarithmically() {
        let r = solve_bisection(100_000, 0.00003, 0.00001).unwrap();
        assert!(
            r.evaluation_count < 200,
            "{} evaluations",
            r.evaluation_count
        );
    }

    #[test]
    fn ternary_search_plateaus_and_edges() {
        let f = [1.0, 2.0, 3.0, 3.0, 3.0, 2.0, 1.0, 0.0];
        assert_eq!(unimodal_argmax(1, 8, |i| f[i - 1]), 3);
        let inc: Vec<f64> = (0..20).map(|i| i as f64).collect();
        assert_eq!(unimodal_argmax(1, 20, |i| inc[i - 1]), 20);
        assert_eq!(unimodal_argmax(1, 20, |i| -inc[i - 1]), 1);
        assert_eq!(unimodal_argmax(4, 4, |_| 0.0), 4);
        assert!(check_mode(2, 1, 8, |i| f[i - 1], "test").is_err());
        assert!(check_mode(3, 1, 8, |i| f[i - 1], "test").is_ok());
    }

    #[test]
    fn odds_examples() {
        let secretary: Vec<f64> = (1..=4).map(|k| 1.0 / k as f64).collect();
        let r = odds_threshold(&secretary).unwrap();
        assert_eq!(r.thresholds.s, 2);
        assert!((r.value - 11.0 / 24.0).abs() < 1e-12);

        let r = odds_threshold(&[0.0, 0.0, 0.5]).unwrap();
        assert_eq!(r.thresholds.s, 3);
        assert!((r.value - 0.5).abs() < 1e-12);

        let r = odds_threshold(&[0.2; 10]).unwrap();
        assert_eq!(r.thresholds.s, 7);
        assert!((r.value - 0.4096).abs() < 1e-12);

        // total odds below one: stop from the start
        let r = odds_threshold(&[0.1, 0.1, 0.1]).unwrap();
        assert_eq!(r.thresholds.s, 1);
        assert!((r.value - 3.0 * 0.1 * 0.81).abs() < 1e-12);

        // certain success late in the sequence
        let r = odds_threshold(&[0.3, 1.0, 0.2]).unwrap();
        assert_eq!(r.thresholds.s, 2);
        assert!((r.value - 0.8).abs() < 1e-12);

        assert!(odds_threshold(&[]).is_err());
        assert!(odds_threshold(&[0.5, 1.5]).is_err());
    }

    #[test]
    fn headline_grid_maximum() {
        let g = w_recurrence(40, 0.09, 0.05).unwrap();
        let (j, k, w) = g.argmax();
        assert_eq!((j, k), (33, 28));
        assert!((w - 0.52987).abs() < 5e-5);
    }

    #[test]
    fn modes_figure_data() {
        let n = 40;
        let s = solve_walk(n, 0.1, 0.05).unwrap().thresholds;
        let m = modes(n, 0.1, 0.05).unwrap();
        assert!(m.plus_modes[..s.s_prime].iter().all(|&j| j == s.s));
        assert_eq!(m.minus_modes[s.s - 1], s.s_prime);
    }
}
