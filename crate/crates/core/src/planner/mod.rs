//! Protocol parameters and finite-blocklength key-length bounds.
//!
//! All logarithms are base 2. A [`Plan`] fixes everything a session needs
//! (`λ`, `t`, `ℓ` and the error split); a [`BoundReport`] is a single
//! evaluated bound for tabulation.

mod bounds;
mod desk;
mod export;
mod qfunc;

pub use bounds::{
    bound_berry_esseen, bound_berry_esseen_finite, bound_hr_concatenated, bound_hr_random_linear,
    comm_cost, evaluate, min_positive_n, BoundKind, BoundReport, BoundStatus, MAX_SEARCH_CEILING,
};
pub use desk::{plan_desk_exact, DeskDetail, DESK_MAX_N};
pub use export::{read_csv, write_csv, CsvRow};
pub use qfunc::{qfunc, qfunc_inv};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::source_model::EntropyProfile;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("{what} = {value} outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("block length n = {n} is too small (need n >= {min})")]
    TooShort { n: u64, min: u64 },
    #[error("{0}")]
    Hypothesis(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    TheoremMain,
    Remark,
    BerryEsseen,
    DeskExact,
    Manual,
}

impl PlanMode {
    pub fn name(self) -> &'static str {
        match self {
            PlanMode::TheoremMain => "theorem_main",
            PlanMode::Remark => "remark",
            PlanMode::BerryEsseen => "berry_esseen",
            PlanMode::DeskExact => "desk_exact",
            PlanMode::Manual => "manual",
        }
    }
}

impl std::str::FromStr for PlanMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "theorem_main" => PlanMode::TheoremMain,
            "remark" => PlanMode::Remark,
            "berry_esseen" => PlanMode::BerryEsseen,
            "desk_exact" => PlanMode::DeskExact,
            "manual" => PlanMode::Manual,
            other => return Err(format!("unknown plan mode {other:?}")),
        })
    }
}

/// Parameters of one protocol session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Plan<T: Real = f64> {
    pub mode: PlanMode,
    pub n: u64,
    pub eps: T,
    pub sigma: T,
    /// Budget for Alice's vector falling outside Bob's guess set.
    pub eps1: T,
    /// Budget for a hash collision inside the guess set.
    pub eps2: T,
    /// Smoothing of Eve's min-entropy.
    pub eps_prime: T,
    pub delta1: T,
    pub delta_prime: T,
    /// Guess-set threshold on `−log P(x^n|y^n)`, bits.
    pub lambda: T,
    pub t: u64,
    pub ell: u64,
    /// Key length before flooring and clamping; may be negative.
    pub ell_exact: T,
    /// `false` when the key length clamps to 0.
    pub feasible: bool,
    /// Some inputs were outside the range where the bound is rigorous.
    #[serde(default)]
    pub approximate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desk: Option<DeskDetail<T>>,
}

impl<T: Real> Plan<T> {
    pub fn rate(&self) -> T {
        T::count(self.ell) / T::count(self.n)
    }

    /// A plan with hand-picked `t`, `ℓ` and `λ`; nothing is derived.
    pub fn manual(n: u64, eps: T, sigma: T, lambda: T, t: u64, ell: u64) -> Self {
        Plan {
            mode: PlanMode::Manual,
            n,
            eps,
            sigma,
            eps1: eps,
            eps2: T::zero(),
            eps_prime: T::zero(),
            delta1: T::zero(),
            delta_prime: T::zero(),
            lambda,
            t,
            ell,
            ell_exact: T::count(ell),
            feasible: ell > 0,
            approximate: false,
            desk: None,
        }
    }
}

pub(crate) fn check_unit<T: Real>(what: &'static str, v: T) -> Result<(), PlanError> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(PlanError::Domain {
            what,
            value: v.f64(),
        })
    }
}

/// `δ` with `2^{−nδ²/(2 log²(|X|+3))} = e`.
fn delta_for<T: Real>(n: u64, e: T, alphabet_x: usize) -> T {
    let l = T::count(alphabet_x as u64 + 3).log2();
    (T::lit(2.0) * l * l * e.recip().log2() / T::count(n)).sqrt()
}

struct Split<T> {
    eps1: T,
    eps2: T,
    eps_prime: T,
}

/// Shared tail of the two concentration-based plans: `λ`, integer `t`, and
/// `ℓ ≤ nH(X|Z) − nδ′ − t + 2 + 2 log(σ − 2ε′)`.
#[allow(clippy::too_many_arguments)]
fn finish_plan<T: Real>(
    mode: PlanMode,
    n: u64,
    eps: T,
    sigma: T,
    split: Split<T>,
    profile: &EntropyProfile<T>,
    alphabet_x: usize,
    closed_form: T,
) -> Plan<T> {
    let nt = T::count(n);
    let delta1 = delta_for(n, split.eps1, alphabet_x);
    let delta_prime = delta_for(n, split.eps_prime, alphabet_x);
    let lambda = nt * profile.h_x_given_y + nt * delta1;
    let t_real = lambda - split.eps2.log2();
    let t = t_real.ceil().max(T::zero()).to_u64().unwrap_or(u64::MAX);
    let gap = sigma - T::lit(2.0) * split.eps_prime;
    let raw = if gap > T::zero() {
        nt * profile.h_x_given_z - nt * delta_prime - T::count(t)
            + T::lit(2.0)
            + T::lit(2.0) * gap.log2()
    } else {
        T::neg_infinity()
    };
    let ell = if raw >= T::one() {
        raw.floor().to_u64().unwrap_or(0)
    } else {
        0
    };
    Plan {
        mode,
        n,
        eps,
        sigma,
        eps1: split.eps1,
        eps2: split.eps2,
        eps_prime: split.eps_prime,
        delta1,
        delta_prime,
        lambda,
        t,
        ell,
        ell_exact: if gap > T::zero() { closed_form } else { raw },
        feasible: ell > 0,
        approximate: false,
        desk: None,
    }
}

fn check_inputs<T: Real>(n: u64, eps: T, sigma: T) -> Result<(), PlanError> {
    check_unit("eps", eps)?;
    check_unit("sigma", sigma)?;
    if n < 2 {
        return Err(PlanError::TooShort { n, min: 2 });
    }
    Ok(())
}

/// The `theorem_main` split: `ε₁ = (n−1)ε/n`, `ε₂ = ε/n`,
/// `ε′ = (n−1)σ/(2n)`.
///
/// `ell_exact` is the closed-form key length; `ell` floors the general
/// key-length inequality evaluated at the integer `t`, so it can sit up to one bit lower.
pub fn plan_theorem_main<T: Real>(
    n: u64,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
    alphabet_x: usize,
) -> Result<Plan<T>, PlanError> {
    check_inputs(n, eps, sigma)?;
    let nt = T::count(n);
    let m1 = nt - T::one();
    let two = T::lit(2.0);
    let split = Split {
        eps1: m1 * eps / nt,
        eps2: eps / nt,
        eps_prime: m1 * sigma / (two * nt),
    };
    let lx = T::count(alphabet_x as u64 + 3).log2();
    let closed_form = nt * profile.capacity() + two + (eps * sigma * sigma / (nt * nt * nt)).log2()
        - (two * nt).sqrt()
            * lx
            * ((nt / (m1 * eps)).log2().sqrt() + (two * nt / (m1 * sigma)).log2().sqrt());
    Ok(finish_plan(
        PlanMode::TheoremMain,
        n,
        eps,
        sigma,
        split,
        profile,
        alphabet_x,
        closed_form,
    ))
}

/// The alternative split `ε₁ = (√n−1)ε/√n`, `ε₂ = ε/√n`,
/// `ε′ = (n^{1/4}−1)σ/(2n^{1/4})`, which trades a `log n` term for a slightly
/// larger `δ`.
pub fn plan_remark<T: Real>(
    n: u64,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
    alphabet_x: usize,
) -> Result<Plan<T>, PlanError> {
    check_inputs(n, eps, sigma)?;
    let nt = T::count(n);
    let two = T::lit(2.0);
    let rn = nt.sqrt();
    let qn = rn.sqrt();
    let split = Split {
        eps1: (rn - T::one()) * eps / rn,
        eps2: eps / rn,
        eps_prime: (qn - T::one()) * sigma / (two * qn),
    };
    let lx = T::count(alphabet_x as u64 + 3).log2();
    let gap = sigma - two * split.eps_prime;
    let closed_form = nt * profile.capacity() + two + (split.eps2 * gap * gap).log2()
        - (two * nt).sqrt()
            * lx
            * (split.eps_prime.recip().log2().sqrt() + split.eps1.recip().log2().sqrt());
    Ok(finish_plan(
        PlanMode::Remark,
        n,
        eps,
        sigma,
        split,
        profile,
        alphabet_x,
        closed_form,
    ))
}

/// Second-order plan for IID sources.
///
/// When `ε > θₙ` and `σ > ηₙ` the guess-set threshold uses `Q⁻¹(ε − θₙ)` and
/// the key length is [`bound_berry_esseen_finite`]; otherwise both fall back
/// to the uncorrected `Q⁻¹(ε)` form and the plan is marked approximate.
pub fn plan_berry_esseen<T: Real>(
    n: u64,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
) -> Result<Plan<T>, PlanError> {
    check_inputs(n, eps, sigma)?;
    let nt = T::count(n);
    let rn = nt.sqrt();
    let two = T::lit(2.0);
    let (theta, eta) = bounds::theta_eta(n, profile);
    let finite = bound_berry_esseen_finite(n, eps, sigma, profile)?;
    let approximate = finite.status == BoundStatus::NotApplicable;
    let (report, q_eps, eps_prime) = if approximate {
        (
            bound_berry_esseen(n, eps, sigma, profile)?,
            qfunc_inv(eps)?,
            sigma / two,
        )
    } else {
        (finite, qfunc_inv(eps - theta)?, (sigma - eta) / two)
    };
    let lambda = nt * profile.h_x_given_y + (nt * profile.var_x_given_y).sqrt() * q_eps;
    let eps2 = rn.recip();
    let t = (lambda - eps2.log2())
        .ceil()
        .max(T::zero())
        .to_u64()
        .unwrap_or(u64::MAX);
    let ell = if report.raw_bits >= T::one() {
        report.raw_bits.floor().to_u64().unwrap_or(0)
    } else {
        0
    };
    Ok(Plan {
        mode: PlanMode::BerryEsseen,
        n,
        eps,
        sigma,
        eps1: (eps - eps2).max(T::zero()),
        eps2,
        eps_prime,
        delta1: (lambda / nt - profile.h_x_given_y).max(T::zero()),
        delta_prime: T::zero(),
        lambda: lambda.max(T::zero()),
        t,
        ell,
        ell_exact: report.raw_bits,
        feasible: ell > 0,
        approximate,
        desk: None,
    })
}
