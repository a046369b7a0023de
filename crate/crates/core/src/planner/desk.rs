//! Exact finite-`n` planner for binary symmetric sources.

use serde::{Deserialize, Serialize};

use super::{check_unit, Plan, PlanError, PlanMode};
use crate::scalar::Real;
use crate::source_model::{avg_min_entropy_iid, bsc_chain, BscChainParams};

/// Largest `n` the desk planner accepts.
pub const DESK_MAX_N: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DeskDetail<T: Real = f64> {
    /// Hamming radius of Bob's guess set.
    pub radius: u64,
    /// Number of vectors in the guess set.
    pub guess_set_size: u128,
    /// `P(Binomial(n, p) > radius)`.
    pub tail: T,
    /// `H̃∞(X^n|Z^n)`, exact.
    pub min_entropy: T,
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Plans a session over `n ≤ 64` uses of a binary symmetric chain with the
/// exact binomial tail in place of a concentration bound.
///
/// The guess set is the Hamming ball of radius
/// `d = min{d : P(Bin(n,p) > d) ≤ ε/2}` around `y^n`, `t = ⌈log|T| + log(2/ε)⌉`
/// (capped at `n`), and `ℓ = ⌊H̃∞(X^n|Z^n) − t + 2 log(2σ)⌋⁺`.
pub fn plan_desk_exact<T: Real>(
    n: u64,
    eps: T,
    bsc: BscChainParams<T>,
    sigma: T,
) -> Result<Plan<T>, PlanError> {
    check_unit("eps", eps)?;
    check_unit("sigma", sigma)?;
    if n == 0 || n > DESK_MAX_N {
        return Err(PlanError::Domain {
            what: "desk block length",
            value: n as f64,
        });
    }
    let p = bsc.p;
    if p >= T::lit(0.5) {
        return Err(PlanError::Domain {
            what: "crossover p (desk planner needs p < 1/2)",
            value: p.f64(),
        });
    }
    let half_eps = eps / T::lit(2.0);
    let pmf = |k: u64| -> T {
        T::count(binomial(n, k) as u64) * p.powi(k as i32) * (T::one() - p).powi((n - k) as i32)
    };
    let tail_above = |d: u64| -> T { (d + 1..=n).map(pmf).fold(T::zero(), |a, b| a + b) };
    let radius = (0..=n).find(|&d| tail_above(d) <= half_eps).unwrap_or(n);
    let size: u128 = (0..=radius).map(|d| binomial(n, d)).sum();
    let size_t = T::lit(size as f64);
    let t_real = size_t.log2() + (T::lit(2.0) / eps).log2();
    let t = t_real.ceil().to_u64().unwrap_or(u64::MAX).min(n);
    let h_min = avg_min_entropy_iid(&bsc_chain(bsc), n as usize);
    let raw = h_min - T::count(t) + T::lit(2.0) * (T::lit(2.0) * sigma).log2();
    let ell = if raw >= T::one() {
        raw.floor().to_u64().unwrap_or(0).min(n)
    } else {
        0
    };
    // −log P of a weight-d error pattern; 0 log 0 counts as 0.
    let d = T::count(radius);
    let mut lambda = T::zero();
    if radius > 0 {
        lambda = lambda - d * p.log2();
    }
    if radius < n {
        lambda = lambda - (T::count(n) - d) * (T::one() - p).log2();
    }
    Ok(Plan {
        mode: PlanMode::DeskExact,
        n,
        eps,
        sigma,
        eps1: tail_above(radius),
        eps2: size_t * T::lit(2.0).powi(-(t as i32)),
        eps_prime: T::zero(),
        delta1: T::zero(),
        delta_prime: T::zero(),
        lambda,
        t,
        ell,
        ell_exact: raw,
        feasible: ell > 0,
        approximate: false,
        desk: Some(DeskDetail {
            radius,
            guess_set_size: size,
            tail: tail_above(radius),
            min_entropy: h_min,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Binomial tail by an independent route: Pascal's triangle of
    /// probabilities.
    fn tail_oracle(n: usize, p: f64, d: usize) -> f64 {
        let mut row = vec![1.0f64];
        for _ in 0..n {
            let mut next = vec![0.0; row.len() + 1];
            for (k, &v) in row.iter().enumerate() {
                next[k] += v * (1.0 - p);
                next[k + 1] += v * p;
            }
            row = next;
        }
        row[d + 1..].iter().sum()
    }

    #[test]
    fn n32_example() {
        let params = BscChainParams::new(0.02, 0.15).unwrap();
        let plan = plan_desk_exact(32, 0.05, params, 0.05).unwrap();
        let desk = plan.desk.as_ref().unwrap();
        assert_eq!(desk.radius, 3);
        assert!(tail_oracle(32, 0.02, 3) <= 0.025 && tail_oracle(32, 0.02, 2) > 0.025);
        // 1 + 32 + 496 + 4960
        assert_eq!(desk.guess_set_size, 5489);
        assert_eq!(plan.t, 18);
        assert!(plan.eps1 + plan.eps2 <= 0.05);
        assert!((plan.eps1 - tail_oracle(32, 0.02, 3)).abs() < 1e-15);
        // H̃∞ = −32 log(1 − 0.164) ≈ 8.27 < t: reconciliation only.
        assert!((desk.min_entropy + 32.0 * 0.836f64.log2()).abs() < 1e-9);
        assert_eq!(plan.ell, 0);
        assert!(!plan.feasible);
        let lambda = -3.0 * 0.02f64.log2() - 29.0 * 0.98f64.log2();
        assert!((plan.lambda - lambda).abs() < 1e-12);
    }

    #[test]
    fn noiseless_channel() {
        let params = BscChainParams::new(0.0, 0.3).unwrap();
        let plan = plan_desk_exact(16, 0.05, params, 0.2).unwrap();
        let desk = plan.desk.unwrap();
        assert_eq!(desk.radius, 0);
        assert_eq!(desk.guess_set_size, 1);
        assert_eq!(plan.t, (2.0f64 / 0.05).log2().ceil() as u64);
        assert_eq!(plan.lambda, 0.0);
    }

    #[test]
    fn key_when_eve_is_blind() {
        let params = BscChainParams::new(0.01, 0.5).unwrap();
        let plan = plan_desk_exact(64, 0.05, params, 0.1).unwrap();
        // H̃∞ = 64 when Z carries nothing.
        let desk = plan.desk.as_ref().unwrap();
        assert!((desk.min_entropy - 64.0f64).abs() < 1e-9);
        let expect = (64.0 - plan.t as f64 + 2.0 * 0.2f64.log2()).floor() as u64;
        assert_eq!(plan.ell, expect);
        assert!(plan.feasible);
        // LHL at the chosen lengths.
        let lhl = 0.5 * 2f64.powf((plan.t + plan.ell) as f64 - 64.0).sqrt();
        assert!(lhl <= 0.1 + 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let params = BscChainParams::new(0.02, 0.15).unwrap();
        assert!(plan_desk_exact(65, 0.05, params, 0.05).is_err());
        assert!(plan_desk_exact(0, 0.05, params, 0.05).is_err());
        assert!(plan_desk_exact(8, 0.0, params, 0.05).is_err());
        let coin = BscChainParams::new(0.5, 0.1).unwrap();
        assert!(plan_desk_exact(8, 0.05, coin, 0.05).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!((0..=64).map(|k| binomial(64, k)).sum::<u128>(), 1u128 << 64);
    }
}
