//! Continuous-arrival approximation of the constant-`p` problem.
//!
//! The `n` observations arrive at the order statistics of `n` uniform times
//! on `[0, 1]`. An `x`-strategy accepts the first nonzero observation
//! arriving after time `x`; it wins with probability
//! `p_n(x) = 2((q + p x)^n - (q~ + 2 p x)^n)`, `q = 1 - p`, `q~ = 1 - 2p`.

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XStrategyReport {
    pub n: usize,
    pub p: f64,
    /// `β_n = 2^(1/(n-1))`; infinite for `n = 1`.
    pub beta: f64,
    /// Optimal cut, clamped to `[0, 1]`.
    pub x_star: f64,
    /// `p_n(x_star)`.
    pub value: f64,
    /// Whether the stationary point lies in `[0, 1]`.
    pub interior: bool,
    /// `n = 1`: no stationary point exists.
    pub degenerate: bool,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidSymmetricProb(p))
    }
}

/// `ln β_n` and `β_n - 1`, the latter via `expm1` to keep precision for
/// large `n`.
fn beta_parts(n: usize) -> (f64, f64) {
    let ln_beta = std::f64::consts::LN_2 / (n - 1) as f64;
    (ln_beta, ln_beta.exp_m1())
}

pub fn success_prob_x(n: usize, p: f64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyHorizon);
    }
    check_p(p)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::CutOutOfRange(x));
    }
    let (q, q_tilde) = (1.0 - p, 1.0 - 2.0 * p);
    let e = n as i32;
    Ok(2.0 * ((q + p * x).powi(e) - (q_tilde + 2.0 * p * x).powi(e)))
}

/// Smallest `p` for which the stationary point is interior,
/// `(β_n - 1) / (2 β_n - 1)`.
pub fn interior_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::HorizonTooSmall { n, min: 2 });
    }
    let (_, beta_m1) = beta_parts(n);
    Ok(beta_m1 / (1.0 + 2.0 * beta_m1))
}

/// Maximises `p_n` over `[0, 1]`.
///
/// The stationary point is `x* = (q - q~ β_n) / (p (2β_n - 1))`. When it is
/// negative (`p` below [`interior_threshold`]) `p_n` decreases on `[0, 1]`
/// and the cut is clamped to 0.
pub fn optimal_x(n: usize, p: f64) -> Result<XStrategyReport> {
    if n == 0 {
        return Err(Error::EmptyHorizon);
    }
    check_p(p)?;
    if n == 1 {
        return Ok(XStrategyReport {
            n,
            p,
            beta: f64::INFINITY,
            x_star: 0.0,
            value: 2.0 * p,
            interior: false,
            degenerate: true,
        });
    }
    let (_, beta_m1) = beta_parts(n);
    let beta = 1.0 + beta_m1;
    let (q, q_tilde) = (1.0 - p, 1.0 - 2.0 * p);
    let stationary = (q - q_tilde * beta) / (p * (1.0 + 2.0 * beta_m1));
    let x_star = stationary.clamp(0.0, 1.0);
    Ok(XStrategyReport {
        n,
        p,
        beta,
        x_star,
        value: success_prob_x(n, p, x_star)?,
        interior: lower_bound_condition(n, p)?,
        degenerate: false,
    })
}

/// `2 (2β_n - 1)^(1-n)`, evaluated in log space.
pub fn optimal_value(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::HorizonTooSmall { n, min: 2 });
    }
    let (_, beta_m1) = beta_parts(n);
    Ok(2.0 * ((1.0 - n as f64) * (2.0 * beta_m1).ln_1p()).exp())
}

/// `p >= (β_n - 1) / (2β_n - 1)`: the best `x`-strategy then wins with
/// probability at least 1/2.
pub fn lower_bound_condition(n: usize, p: f64) -> Result<bool> {
    Ok(p >= interior_threshold(n)?)
}
