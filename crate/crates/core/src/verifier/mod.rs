//! Empirical and exhaustive checks of key agreement: Monte Carlo reliability,
//! exact average min-entropy, exact secrecy at tiny block lengths, and a
//! collision census of the hash family.

mod secrecy;

pub use secrecy::{
    lhl_bound, secrecy_sd_exact, secrecy_sweep, SecrecyOptions, SecrecyReport, MAX_SECRECY_WORK,
};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::Plan;
use crate::protocol::{field_bits, run_session_with, Outcome, ProtocolError, SessionOptions};
use crate::scalar::Real;
use crate::source_model::JointSource;
use crate::uhash::{GfContext, HashError};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Largest `|X|^n · |Side|^n` the exhaustive routines will enumerate.
pub const MAX_JOINT_CELLS: f64 = 1e8;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("{what}: enumeration size {size:.3e} exceeds the limit {limit:.3e}")]
    Infeasible {
        what: &'static str,
        size: f64,
        limit: f64,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Hash(#[from] HashError),
}

/// Wilson score interval for `failures` successes in `trials` draws.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityEstimate {
    pub trials: u64,
    /// Sessions that did not end with equal keys (aborts included).
    pub failures: u64,
    pub aborts: u64,
    pub mismatches: u64,
    /// Sessions where Bob settled on a vector other than Alice's, whether or
    /// not the keys happened to agree.
    pub misreconciled: u64,
    pub p_hat: f64,
    pub ci95: (f64, f64),
    pub mean_scanned: f64,
}

impl ReliabilityEstimate {
    fn from_counts(c: Counts) -> Self {
        let p_hat = if c.trials == 0 {
            0.0
        } else {
            c.failures as f64 / c.trials as f64
        };
        ReliabilityEstimate {
            trials: c.trials,
            failures: c.failures,
            aborts: c.aborts,
            mismatches: c.mismatches,
            misreconciled: c.misreconciled,
            p_hat,
            ci95: wilson_interval(c.failures, c.trials, Z95),
            mean_scanned: if c.trials == 0 {
                0.0
            } else {
                c.scanned as f64 / c.trials as f64
            },
        }
    }

    pub fn ci_width(&self) -> f64 {
        self.ci95.1 - self.ci95.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    trials: u64,
    failures: u64,
    aborts: u64,
    mismatches: u64,
    misreconciled: u64,
    scanned: u64,
}

impl Counts {
    fn merge(self, o: Counts) -> Counts {
        Counts {
            trials: self.trials + o.trials,
            failures: self.failures + o.failures,
            aborts: self.aborts + o.aborts,
            mismatches: self.mismatches + o.mismatches,
            misreconciled: self.misreconciled + o.misreconciled,
            scanned: self.scanned + o.scanned,
        }
    }
}

/// Session seed for trial `i`: word 0 of ChaCha8 stream `i` under `rng_seed`.
/// Independent of how trials are scheduled.
pub fn trial_seed(rng_seed: u64, i: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(i);
    rng.next_u64()
}

/// Runs `trials` independent sessions and counts failures.
pub fn estimate_reliability<T: Real>(
    src: &JointSource<T>,
    plan: &Plan<T>,
    trials: u64,
    rng_seed: u64,
    opts: SessionOptions,
) -> Result<ReliabilityEstimate, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::Invalid("trials must be positive".into()));
    }
    let ctx = GfContext::new(field_bits(plan.n as usize, src.sizes().x))?;
    let counts = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Counts, VerifyError> {
            let r = run_session_with(src, plan, &ctx, trial_seed(rng_seed, i), opts)?;
            let wrong_x = r.decoded_x.as_ref().is_some_and(|_| !r.reconciled);
            Ok(Counts {
                trials: 1,
                failures: r.failed() as u64,
                aborts: (r.outcome == Outcome::Aborted) as u64,
                mismatches: (r.outcome == Outcome::Mismatched) as u64,
                misreconciled: wrong_x as u64,
                scanned: r.scanned,
            })
        })
        .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))?;
    Ok(ReliabilityEstimate::from_counts(counts))
}

/// Which party's observation the min-entropy conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Given {
    Y,
    Z,
}

/// `P_{X,Side}` in `f64`, laid out as `x * |Side| + w`, plus `|Side|`.
fn pair_table<T: Real>(src: &JointSource<T>, given: Given) -> (Vec<f64>, usize) {
    let sizes = src.sizes();
    let (table, nw) = match given {
        Given::Y => (src.joint_xy(), sizes.y),
        Given::Z => (src.joint_xz(), sizes.z),
    };
    (table.into_iter().map(Real::f64).collect(), nw)
}

fn pow_checked(base: usize, n: usize) -> f64 {
    (base as f64).powi(n as i32)
}

/// `H̃∞(X^n | W^n) = −log Σ_w max_x P(x, w)` by enumerating every pair of
/// `n`-vectors, with the maximum taken in log space.
pub fn avg_min_entropy_exact<T: Real>(
    src: &JointSource<T>,
    n: usize,
    given: Given,
) -> Result<T, VerifyError> {
    let (pxw, nw) = pair_table(src, given);
    let nx = src.sizes().x;
    let cells = pow_checked(nx, n) * pow_checked(nw, n);
    if cells > MAX_JOINT_CELLS {
        return Err(VerifyError::Infeasible {
            what: "min-entropy enumeration",
            size: cells,
            limit: MAX_JOINT_CELLS,
        });
    }
    let logs: Vec<f64> = pxw.iter().map(|p| p.log2()).collect();
    let count_x = nx.pow(n as u32);
    let count_w = nw.pow(n as u32);
    let mut best = Vec::with_capacity(count_w);
    let mut xs = vec![0usize; n];
    let mut ws = vec![0usize; n];
    for wi in 0..count_w {
        digits(wi, nw, &mut ws);
        let mut top = f64::NEG_INFINITY;
        for xi in 0..count_x {
            digits(xi, nx, &mut xs);
            let l: f64 = xs.iter().zip(&ws).map(|(&x, &w)| logs[x * nw + w]).sum();
            if l > top {
                top = l;
            }
        }
        if top > f64::NEG_INFINITY {
            best.push(top);
        }
    }
    let m = best.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = best.iter().map(|b| (b - m).exp2()).sum();
    Ok(T::lit(-(m + s.log2())))
}

/// Little-endian mixed-radix digits of `i` (position 0 varies fastest).
pub(crate) fn digits(mut i: usize, radix: usize, out: &mut [usize]) {
    for d in out.iter_mut() {
        *d = i % radix;
        i /= radix;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub m: usize,
    pub t: usize,
    pub pairs: u64,
    /// Fewest seeds on which a pair collides.
    pub min: u64,
    /// Most seeds on which a pair collides.
    pub max: u64,
}

/// For every pair `x ≠ x′` of field elements, counts the seeds `s` with
/// `h_s(x) = h_s(x′)`.
pub fn uhf_collision_census(ctx: &GfContext, t: usize) -> Result<CensusReport, VerifyError> {
    let m = ctx.degree();
    if m > 10 {
        return Err(VerifyError::Infeasible {
            what: "collision census",
            size: (m as f64).exp2(),
            limit: 1024.0,
        });
    }
    if t > m {
        return Err(HashError::OutBits { out_bits: t, m }.into());
    }
    let q = 1usize << m;
    // h[s * q + x]
    let h: Vec<u64> = (0..q)
        .flat_map(|s| (0..q).map(move |x| (s as u64, x as u64)))
        .map(|(s, x)| {
            if t == 0 {
                0
            } else {
                ctx.mul_limbs(&[x], &[s])[0] >> (m - t)
            }
        })
        .collect();
    let (min, max) = (0..q)
        .into_par_iter()
        .map(|x| {
            let mut lo = u64::MAX;
            let mut hi = 0u64;
            for y in x + 1..q {
                let c = (0..q).filter(|&s| h[s * q + x] == h[s * q + y]).count() as u64;
                lo = lo.min(c);
                hi = hi.max(c);
            }
            (lo, hi)
        })
        .reduce(|| (u64::MAX, 0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    Ok(CensusReport {
        m,
        t,
        pairs: (q as u64) * (q as u64 - 1) / 2,
        min,
        max,
    })
}
