//! Exact statistical distance between `(K, S, S′, V, Z^n)` and
//! `(U, S, S′, V, Z^n)` for tiny block lengths.
//!
//! For a fixed pair of seeds the distance splits over `z^n`:
//! `½ Σ_{k,v} |P(k, v, z) − 2^{−ℓ} P(v, z)|`. Keys of every length up to
//! `L` come out of one `(v, k_L)` table because shorter keys are prefixes,
//! so halving `ℓ` is a pairwise sum of adjacent cells.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{avg_min_entropy_exact, digits, pow_checked, Given, VerifyError, MAX_JOINT_CELLS};
use crate::planner::Plan;
use crate::protocol::field_bits;
use crate::scalar::Real;
use crate::source_model::JointSource;
use crate::uhash::{encode_symbols, GfContext, HashError};

/// Cap on `seeds(s) · 2^m · |X|^n · |Z|^n`.
pub const MAX_SECRECY_WORK: f64 = 2e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecrecyOptions {
    /// Reconciliation seeds to average over. When `2^m` is no larger, every
    /// seed is enumerated instead.
    pub seed_samples: usize,
    pub rng_seed: u64,
}

impl Default for SecrecyOptions {
    fn default() -> Self {
        SecrecyOptions {
            seed_samples: 256,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecrecyReport {
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub ell: usize,
    pub sd_exact: f64,
    /// Standard error from sampling `s`; zero when all seeds were enumerated.
    pub sd_stderr: f64,
    pub s_enumerated: bool,
    pub s_count: usize,
    /// `H̃∞(X^n|Z^n)`.
    pub avg_min_entropy: f64,
    /// `½ √(2^{t+ℓ−H̃∞})`.
    pub lhl_bound: f64,
    pub eps_prime: f64,
    /// `2ε′ + lhl_bound`.
    pub lhl_smooth: f64,
    /// `sd_exact ≤ lhl_bound + 1e-9`.
    pub dominated: bool,
}

pub fn lhl_bound(t: usize, ell: usize, min_entropy: f64) -> f64 {
    0.5 * ((t + ell) as f64 - min_entropy).exp2().sqrt()
}

/// Secrecy of one planned session at `plan.n`, `plan.t`, `plan.ell`.
pub fn secrecy_sd_exact<T: Real>(
    src: &JointSource<T>,
    plan: &Plan<T>,
    ctx: &GfContext,
    opts: SecrecyOptions,
) -> Result<SecrecyReport, VerifyError> {
    let mut out = secrecy_sweep(
        src,
        plan.n as usize,
        plan.t as usize,
        &[plan.ell as usize],
        ctx,
        opts,
    )?;
    let mut r = out.remove(0);
    r.eps_prime = plan.eps_prime.f64();
    r.lhl_smooth = 2.0 * r.eps_prime + r.lhl_bound;
    Ok(r)
}

/// Secrecy at a fixed `t` for several key lengths, sharing one pass.
pub fn secrecy_sweep<T: Real>(
    src: &JointSource<T>,
    n: usize,
    t: usize,
    ells: &[usize],
    ctx: &GfContext,
    opts: SecrecyOptions,
) -> Result<Vec<SecrecyReport>, VerifyError> {
    let sizes = src.sizes();
    let m = ctx.degree();
    if field_bits(n, sizes.x) != m {
        return Err(VerifyError::Invalid(format!(
            "field degree {m} does not match n = {n} over |X| = {}",
            sizes.x
        )));
    }
    let big_l = ells.iter().copied().max().unwrap_or(0);
    if t + big_l > m {
        return Err(VerifyError::Invalid(format!(
            "t + ell = {} exceeds m = {m}",
            t + big_l
        )));
    }
    let cells = pow_checked(sizes.x, n) * pow_checked(sizes.z, n);
    if cells > MAX_JOINT_CELLS || m > 24 {
        return Err(VerifyError::Infeasible {
            what: "secrecy enumeration",
            size: cells.max((m as f64).exp2()),
            limit: MAX_JOINT_CELLS,
        });
    }
    let q = 1usize << m;
    let enumerate = q <= opts.seed_samples;
    let s_count = if enumerate {
        q
    } else {
        opts.seed_samples.max(1)
    };
    let work = s_count as f64 * q as f64 * cells;
    if work > MAX_SECRECY_WORK {
        return Err(VerifyError::Infeasible {
            what: "secrecy enumeration",
            size: work,
            limit: MAX_SECRECY_WORK,
        });
    }

    let count_x = sizes.x.pow(n as u32);
    let count_z = sizes.z.pow(n as u32);
    let pxz: Vec<f64> = src.joint_xz().into_iter().map(Real::f64).collect();
    let mut xs = vec![0usize; n];
    let mut zs = vec![0usize; n];
    let mut packed = Vec::with_capacity(count_x);
    for xi in 0..count_x {
        digits(xi, sizes.x, &mut xs);
        let bits = encode_symbols(&xs, sizes.x).map_err(VerifyError::Hash)?;
        packed.push(bits.to_u64().ok_or(HashError::FieldDegree(m))?);
    }
    // weights[z * count_x + x] = P(x^n, z^n); rows with P(z^n) = 0 dropped.
    let mut weights = Vec::new();
    for zi in 0..count_z {
        digits(zi, sizes.z, &mut zs);
        let row: Vec<f64> = (0..count_x)
            .map(|xi| {
                digits(xi, sizes.x, &mut xs);
                xs.iter()
                    .zip(&zs)
                    .map(|(&x, &z)| pxz[x * sizes.z + z])
                    .product()
            })
            .collect();
        if row.iter().any(|&w| w > 0.0) {
            weights.extend(row);
        }
    }

    let top = |seed: u64, bits: usize| -> Vec<u32> {
        packed
            .iter()
            .map(|&x| {
                if bits == 0 {
                    0
                } else {
                    (ctx.mul_limbs(&[x], &[seed])[0] >> (m - bits)) as u32
                }
            })
            .collect()
    };
    let keys: Vec<Vec<u32>> = (0..q as u64).map(|s| top(s, big_l)).collect();
    let seeds: Vec<u64> = if enumerate {
        (0..q as u64).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
        (0..s_count)
            .map(|_| rng.next_u64() & (q as u64 - 1))
            .collect()
    };
    let mut want = vec![false; big_l + 1];
    for &l in ells {
        want[l] = true;
    }

    // Per reconciliation seed: mean over s′ of the distance, for each ℓ.
    let per_seed: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&s| {
            let v_of = top(s, t);
            let base: Vec<usize> = v_of.iter().map(|&v| (v as usize) << big_l).collect();
            let mut acc = vec![0.0f64; big_l + 1];
            let mut table = vec![0.0f64; 1 << (t + big_l)];
            let mut idx = vec![0usize; count_x];
            for k_of in &keys {
                for ((i, &b), &k) in idx.iter_mut().zip(&base).zip(k_of) {
                    *i = b | k as usize;
                }
                for row in weights.chunks_exact(count_x) {
                    table.iter_mut().for_each(|c| *c = 0.0);
                    for (&i, &w) in idx.iter().zip(row) {
                        table[i] += w;
                    }
                    let mut len = table.len();
                    for l in (0..=big_l).rev() {
                        if want[l] {
                            acc[l] += block_distance(&table[..len], 1 << l);
                        }
                        if l > 0 {
                            for j in 0..len / 2 {
                                table[j] = table[2 * j] + table[2 * j + 1];
                            }
                            len /= 2;
                        }
                    }
                }
            }
            acc.iter().map(|a| a / q as f64).collect()
        })
        .collect();

    let h = avg_min_entropy_exact(src, n, Given::Z)?.f64();
    Ok(ells
        .iter()
        .map(|&ell| {
            let vals: Vec<f64> = per_seed.iter().map(|r| r[ell]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let stderr = if enumerate || vals.len() < 2 {
                0.0
            } else {
                let var =
                    vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
                (var / vals.len() as f64).sqrt()
            };
            let bound = lhl_bound(t, ell, h);
            SecrecyReport {
                n,
                m,
                t,
                ell,
                sd_exact: mean,
                sd_stderr: stderr,
                s_enumerated: enumerate,
                s_count,
                avg_min_entropy: h,
                lhl_bound: bound,
                eps_prime: 0.0,
                lhl_smooth: bound,
                dominated: mean <= bound + 1e-9,
            }
        })
        .collect())
}

/// `½ Σ_v Σ_k |P(v, k) − P(v)/K|` over blocks of `K` key cells.
fn block_distance(cells: &[f64], keys: usize) -> f64 {
    let inv = 1.0 / keys as f64;
    let mut total = 0.0;
    for block in cells.chunks_exact(keys) {
        let pv: f64 = block.iter().sum();
        if pv == 0.0 {
            continue;
        }
        let u = pv * inv;
        total += block.iter().map(|c| (c - u).abs()).sum::<f64>();
    }
    0.5 * total
}
