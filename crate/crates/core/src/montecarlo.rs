//! Seeded simulation of stopping regions.
//!
//! The generator is ChaCha8 as implemented by `rand_chacha` 0.3. Trials are
//! split into chunks of [`CHUNK_TRIALS`]; chunk `c` draws from the stream
//! `c` of the generator seeded with `seed_from_u64(seed)`. Each stage
//! consumes one uniform `f64`, mapped to `+1` below `a_k`, `-1` below
//! `a_k + b_k` and `0` otherwise. Wins are counted as integers, so a report
//! depends only on `(spec, region, trials, seed)`, never on the number of
//! worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::model::{wins_at, ProblemSpec, StoppingRegion, Trajectory};
use crate::par::map_chunks;
use crate::{Error, Result};

pub const CHUNK_TRIALS: u64 = 16_384;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationReport {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub wins: u64,
}

impl SimulationReport {
    fn new(wins: u64, trials: u64, seed: u64) -> Self {
        let estimate = wins as f64 / trials as f64;
        Self {
            estimate,
            stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            trials,
            seed,
            wins,
        }
    }
}

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn fill<R: Rng + ?Sized>(spec: &ProblemSpec, rng: &mut R, out: &mut [i8]) {
    for (k, x) in out.iter_mut().enumerate() {
        let u: f64 = rng.gen();
        let a = spec.plus_seq()[k];
        *x = if u < a {
            1
        } else if u < a + spec.minus_seq()[k] {
            -1
        } else {
            0
        };
    }
}

/// Draws one trajectory, advancing `rng` by `n` uniforms.
pub fn sample_trajectory<R: Rng + ?Sized>(spec: &ProblemSpec, rng: &mut R) -> Trajectory {
    let mut values = vec![0; spec.n()];
    fill(spec, rng, &mut values);
    Trajectory::new(values).expect("sampled values are ternary")
}

/// Monte Carlo estimate of the win probability of `region`.
pub fn estimate(
    spec: &ProblemSpec,
    region: &StoppingRegion,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let mut reports = estimate_common(spec, std::slice::from_ref(region), trials, seed)?;
    Ok(reports.remove(0))
}

/// Estimates several regions on the same simulated trajectories (common
/// random numbers).
pub fn estimate_common(
    spec: &ProblemSpec,
    regions: &[StoppingRegion],
    trials: u64,
    seed: u64,
) -> Result<Vec<SimulationReport>> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let n = spec.n();
    if let Some(r) = regions.iter().find(|r| r.n() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: r.n(),
        });
    }
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let per_chunk = map_chunks(chunks, |c| {
        let count = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
        let mut rng = chunk_rng(seed, c);
        let mut values = vec![0i8; n];
        let mut wins = vec![0u64; regions.len()];
        for _ in 0..count {
            fill(spec, &mut rng, &mut values);
            for (w, region) in wins.iter_mut().zip(regions) {
                if wins_at(&values, region.hit(&values)) {
                    *w += 1;
                }
            }
        }
        wins
    });
    let mut totals = vec![0u64; regions.len()];
    for chunk in per_chunk {
        for (t, w) in totals.iter_mut().zip(chunk) {
            *t += w;
        }
    }
    Ok(totals
        .into_iter()
        .map(|w| SimulationReport::new(w, trials, seed))
        .collect())
}
