use serde::{Deserialize, Serialize};

use super::{check_unit, plan_remark, plan_theorem_main, qfunc_inv, PlanError};
use crate::scalar::Real;
use crate::source_model::{AlphabetSizes, EntropyProfile};

/// Largest `n` [`min_positive_n`] will search to.
pub const MAX_SEARCH_CEILING: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    TheoremMain,
    Remark,
    BerryEsseen,
    BerryEsseenFinite,
    HrLinear,
    HrConcat,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::TheoremMain,
        BoundKind::Remark,
        BoundKind::BerryEsseen,
        BoundKind::BerryEsseenFinite,
        BoundKind::HrLinear,
        BoundKind::HrConcat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::TheoremMain => "theorem_main",
            BoundKind::Remark => "remark",
            BoundKind::BerryEsseen => "berry_esseen",
            BoundKind::BerryEsseenFinite => "berry_esseen_finite",
            BoundKind::HrLinear => "hr_linear",
            BoundKind::HrConcat => "hr_concat",
        }
    }
}

impl std::str::FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown bound {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Valid,
    /// Second-order form with the `O(1)` term set to zero.
    Approximate,
    /// Preconditions of the bound fail at this `n`; the value is 0.
    NotApplicable,
    /// Evaluated below the range where the bound is claimed to hold.
    OutsideValidity,
}

/// One evaluated key-length bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundReport<T: Real = f64> {
    pub bound: BoundKind,
    pub n: u64,
    pub eps: T,
    pub sigma: T,
    /// Before clamping at zero.
    pub raw_bits: T,
    pub value_bits: T,
    /// `value_bits / n`.
    pub rate: T,
    pub status: BoundStatus,
    pub profile: EntropyProfile<T>,
}

impl<T: Real> BoundReport<T> {
    fn new(
        bound: BoundKind,
        n: u64,
        eps: T,
        sigma: T,
        raw_bits: T,
        status: BoundStatus,
        profile: &EntropyProfile<T>,
    ) -> Self {
        let value_bits = if status == BoundStatus::NotApplicable {
            T::zero()
        } else {
            raw_bits.max(T::zero())
        };
        BoundReport {
            bound,
            n,
            eps,
            sigma,
            raw_bits,
            value_bits,
            rate: value_bits / T::count(n.max(1)),
            status,
            profile: *profile,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.status != BoundStatus::NotApplicable && self.raw_bits > T::zero()
    }
}

/// `θₙ = 1/√n + 3ρ/(Δ^{3/2}√n)` and `ηₙ = 2/√n`. A degenerate `Δ = 0`
/// drops the third-moment term.
pub(crate) fn theta_eta<T: Real>(n: u64, profile: &EntropyProfile<T>) -> (T, T) {
    let rn = T::count(n).sqrt();
    let v = profile.var_x_given_y;
    let moment = if v > T::zero() {
        T::lit(3.0) * profile.rho_x_given_y / (v * v.sqrt())
    } else {
        T::zero()
    };
    ((T::one() + moment) / rn, T::lit(2.0) / rn)
}

fn second_order<T: Real>(n: u64, profile: &EntropyProfile<T>, q_y: T, q_z: T) -> T {
    let nt = T::count(n);
    nt * profile.capacity()
        - nt.sqrt() * (q_y * profile.var_x_given_y.sqrt() + q_z * profile.var_x_given_z.sqrt())
        - T::lit(1.5) * nt.log2()
}

/// `n C − √n (Q⁻¹(ε)√Δ_{X|Y} + Q⁻¹(σ/2)√Δ_{X|Z}) − (3/2) log n`, the IID
/// second-order key length with the constant term taken as 0. Always
/// reported as approximate.
pub fn bound_berry_esseen<T: Real>(
    n: u64,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
) -> Result<BoundReport<T>, PlanError> {
    check_unit("eps", eps)?;
    check_unit("sigma", sigma)?;
    let raw = second_order(
        n.max(1),
        profile,
        qfunc_inv(eps)?,
        qfunc_inv(sigma / T::lit(2.0))?,
    );
    Ok(BoundReport::new(
        BoundKind::BerryEsseen,
        n,
        eps,
        sigma,
        raw,
        BoundStatus::Approximate,
        profile,
    ))
}

/// As [`bound_berry_esseen`] but with `ε − θₙ` and `(σ − ηₙ)/2` inside the
/// quantiles. Not applicable unless both arguments are positive.
pub fn bound_berry_esseen_finite<T: Real>(
    n: u64,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
) -> Result<BoundReport<T>, PlanError> {
    check_unit("eps", eps)?;
    check_unit("sigma", sigma)?;
    let n = n.max(1);
    let (theta, eta) = theta_eta(n, profile);
    let (a, b) = (eps - theta, (sigma - eta) / T::lit(2.0));
    if a <= T::zero() || b <= T::zero() {
        return Ok(BoundReport::new(
            BoundKind::BerryEsseenFinite,
            n,
            eps,
            sigma,
            T::zero(),
            BoundStatus::NotApplicable,
            profile,
        ));
    }
    let raw = second_order(n, profile, qfunc_inv(a)?, qfunc_inv(b)?);
    Ok(BoundReport::new(
        BoundKind::BerryEsseenFinite,
        n,
        eps,
        sigma,
        raw,
        BoundStatus::Approximate,
        profile,
    ))
}

fn hr_check<T: Real>(eps: T, sigma: T) -> Result<(), PlanError> {
    check_unit("eps", eps)?;
    check_unit("sigma", sigma)?;
    let quarter = T::lit(0.25);
    if eps >= quarter || sigma >= quarter {
        return Err(PlanError::Hypothesis(format!(
            "random-code bounds need eps, sigma < 1/4 (got {}, {})",
            eps.f64(),
            sigma.f64()
        )));
    }
    Ok(())
}

fn hr_status(n: u64) -> BoundStatus {
    if n < 100 {
        BoundStatus::OutsideValidity
    } else {
        BoundStatus::Valid
    }
}

/// `[nC − √n f′]⁺` with `f′ = 90 log(|X||Y|)(√log(1/ε) + √log(1/σ))`.
pub fn bound_hr_random_linear<T: Real>(
    n: u64,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
    alphabet_x: usize,
    alphabet_y: usize,
) -> Result<BoundReport<T>, PlanError> {
    hr_check(eps, sigma)?;
    let nt = T::count(n);
    let f = T::lit(90.0)
        * T::count((alphabet_x * alphabet_y) as u64).log2()
        * (eps.recip().log2().sqrt() + sigma.recip().log2().sqrt());
    let raw = nt * profile.capacity() - nt.sqrt() * f;
    Ok(BoundReport::new(
        BoundKind::HrLinear,
        n,
        eps,
        sigma,
        raw,
        hr_status(n),
        profile,
    ))
}

/// `[nC − n^{3/4} g″ − √n f″]⁺` with
/// `g″ = (2²² log(1/ε) log²|X| log²(|X||Y|))^{1/4}` and `f″ = 8 log|X| √log(1/σ)`.
pub fn bound_hr_concatenated<T: Real>(
    n: u64,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
    alphabet_x: usize,
    alphabet_y: usize,
) -> Result<BoundReport<T>, PlanError> {
    hr_check(eps, sigma)?;
    let nt = T::count(n);
    let lx = T::count(alphabet_x as u64).log2();
    let lxy = T::count((alphabet_x * alphabet_y) as u64).log2();
    let g = (T::lit(4_194_304.0) * eps.recip().log2() * lx * lx * lxy * lxy).powf(T::lit(0.25));
    let f = T::lit(8.0) * lx * sigma.recip().log2().sqrt();
    let raw = nt * profile.capacity() - nt.powf(T::lit(0.75)) * g - nt.sqrt() * f;
    Ok(BoundReport::new(
        BoundKind::HrConcat,
        n,
        eps,
        sigma,
        raw,
        hr_status(n),
        profile,
    ))
}

/// Upper bound on the reconciliation message length,
/// `H(X^n|Y^n) + √n B + ½ log n`, with the constant term taken as 0.
///
/// `B = √2 log(|X|+3) √log(1/ε)` in general, or `Q⁻¹(ε)√Δ_{X|Y}` when
/// `iid` is set.
pub fn comm_cost<T: Real>(
    n: u64,
    eps: T,
    profile: &EntropyProfile<T>,
    alphabet_x: usize,
    iid: bool,
) -> Result<T, PlanError> {
    check_unit("eps", eps)?;
    let nt = T::count(n.max(1));
    let b = if iid {
        qfunc_inv(eps)? * profile.var_x_given_y.sqrt()
    } else {
        T::lit(2.0).sqrt() * T::count(alphabet_x as u64 + 3).log2() * eps.recip().log2().sqrt()
    };
    Ok(nt * profile.h_x_given_y + nt.sqrt() * b + T::lit(0.5) * nt.log2())
}

/// Evaluates any bound by name.
pub fn evaluate<T: Real>(
    kind: BoundKind,
    n: u64,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
    sizes: AlphabetSizes,
) -> Result<BoundReport<T>, PlanError> {
    match kind {
        BoundKind::TheoremMain | BoundKind::Remark => {
            let plan = if kind == BoundKind::TheoremMain {
                plan_theorem_main(n, eps, sigma, profile, sizes.x)?
            } else {
                plan_remark(n, eps, sigma, profile, sizes.x)?
            };
            let mut r = BoundReport::new(
                kind,
                n,
                eps,
                sigma,
                plan.ell_exact,
                BoundStatus::Valid,
                profile,
            );
            // The session key length is the floored, integer-t value.
            r.value_bits = T::count(plan.ell);
            r.rate = plan.rate();
            Ok(r)
        }
        BoundKind::BerryEsseen => bound_berry_esseen(n, eps, sigma, profile),
        BoundKind::BerryEsseenFinite => bound_berry_esseen_finite(n, eps, sigma, profile),
        BoundKind::HrLinear => bound_hr_random_linear(n, eps, sigma, profile, sizes.x, sizes.y),
        BoundKind::HrConcat => bound_hr_concatenated(n, eps, sigma, profile, sizes.x, sizes.y),
    }
}

/// Smallest `n ≤ ceiling` at which `kind` is strictly positive (before
/// clamping), by doubling then bisection. `None` when no such `n` is found.
///
/// The returned `n*` satisfies `bound(n*) > 0` and `bound(n* − 1) ≤ 0`.
pub fn min_positive_n<T: Real>(
    kind: BoundKind,
    eps: T,
    sigma: T,
    profile: &EntropyProfile<T>,
    sizes: AlphabetSizes,
    ceiling: u64,
) -> Result<Option<u64>, PlanError> {
    if ceiling > MAX_SEARCH_CEILING {
        return Err(PlanError::Domain {
            what: "search ceiling",
            value: ceiling as f64,
        });
    }
    let positive = |n: u64| -> Result<bool, PlanError> {
        if n < 2 {
            return Ok(false);
        }
        Ok(evaluate(kind, n, eps, sigma, profile, sizes)?.is_positive())
    };
    // Surface argument errors once rather than reporting "none found".
    evaluate(kind, 2, eps, sigma, profile, sizes)?;
    let mut hi = 2u64;
    while !positive(hi)? {
        if hi >= ceiling {
            return Ok(None);
        }
        hi = (hi * 2).min(ceiling);
    }
    let mut lo = hi / 2;
    if positive(lo)? {
        // Only possible at the very start.
        lo = 1;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if positive(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source_model::{bsc_chain, entropy_profile, BscChainParams};

    fn fig1() -> EntropyProfile {
        entropy_profile(&bsc_chain(BscChainParams::new(0.02, 0.15).unwrap()))
    }

    const BIN: AlphabetSizes = AlphabetSizes { x: 2, y: 2, z: 2 };

    #[test]
    fn hr_linear_constant() {
        // f′ at |X| = |Y| = 2, ε = σ = 0.05: 90 · 2 · 2√log₂20.
        let f = 90.0 * 2.0 * 2.0 * 20f64.log2().sqrt();
        let prof = fig1();
        let n = 1_000_000u64;
        let r = bound_hr_random_linear(n, 0.05, 0.05, &prof, 2, 2).unwrap();
        let expect = 1e6 * prof.capacity() - 1e3 * f;
        assert!((r.raw_bits - expect).abs() < 1e-6);
        assert_eq!(r.value_bits, 0.0);
        assert!(bound_hr_random_linear(n, 0.3, 0.05, &prof, 2, 2).is_err());
        assert_eq!(
            bound_hr_random_linear(50, 0.05, 0.05, &prof, 2, 2)
                .unwrap()
                .status,
            BoundStatus::OutsideValidity
        );
    }

    #[test]
    fn hr_concat_below_linear_up_to_a_million() {
        let prof = fig1();
        for k in 0..=60 {
            let n = 10f64.powf(k as f64 / 10.0).round() as u64;
            let a = bound_hr_concatenated(n, 0.05, 0.05, &prof, 2, 2).unwrap();
            let b = bound_hr_random_linear(n, 0.05, 0.05, &prof, 2, 2).unwrap();
            assert!(a.value_bits <= b.value_bits, "n={n}");
        }
        assert_eq!(
            bound_hr_concatenated(1, 0.05, 0.05, &prof, 2, 2)
                .unwrap()
                .value_bits,
            0.0
        );
    }

    #[test]
    fn berry_esseen_finite_small_n_not_applicable() {
        let prof = fig1();
        let (theta, _) = theta_eta(100, &prof);
        assert!(theta > 0.05);
        let r = bound_berry_esseen_finite(100, 0.05, 0.05, &prof).unwrap();
        assert_eq!(r.status, BoundStatus::NotApplicable);
        assert_eq!(r.value_bits, 0.0);
        let big = bound_berry_esseen_finite(10_000_000, 0.05, 0.05, &prof).unwrap();
        assert_eq!(big.status, BoundStatus::Approximate);
        let second_order = bound_berry_esseen(10_000_000, 0.05, 0.05, &prof).unwrap();
        assert!(big.raw_bits < second_order.raw_bits);
    }

    #[test]
    fn degenerate_variance_theta() {
        let mut prof = fig1();
        prof.var_x_given_y = 0.0;
        let (theta, eta) = theta_eta(400, &prof);
        assert_eq!(theta, 0.05);
        assert_eq!(eta, 0.1);
    }

    #[test]
    fn comm_cost_example() {
        let prof = fig1();
        let c = comm_cost(10_000, 0.05, &prof, 2, true).unwrap();
        let h2 = -0.02 * 0.02f64.log2() - 0.98 * 0.98f64.log2();
        let v = 0.02 * 0.98 * (0.98f64 / 0.02).log2().powi(2);
        let expect = 1e4 * h2 + 100.0 * 1.644_853_626_951_472_2 * v.sqrt() + 0.5 * 1e4f64.log2();
        assert!((c - expect).abs() < 1e-6, "{c} vs {expect}");
        assert!((c - (1414.4 + 129.3 + 6.64)).abs() < 0.5);
        let hi_eps = comm_cost(10_000, 0.9, &prof, 2, true).unwrap();
        assert!(hi_eps < 1e4 * h2 + 0.5 * 1e4f64.log2());
        assert!(comm_cost(10_000, 0.05, &prof, 2, false).unwrap() > c);
    }

    #[test]
    fn comm_cost_tracks_main_plan_t() {
        let prof = fig1();
        for n in [10_000u64, 100_000, 1_000_000] {
            let plan = super::super::plan_theorem_main(n, 0.05, 0.05, &prof, 2).unwrap();
            let c = comm_cost(n, 0.05, &prof, 2, false).unwrap();
            // t carries an extra log(n/ε) − ½ log n over the cost bound.
            let slack = (n as f64).log2() + (1.0f64 / 0.05).log2() - 0.5 * (n as f64).log2();
            let gap = plan.t as f64 - c;
            assert!(gap >= -1.0 && gap <= slack + 2.0, "n={n} gap={gap}");
        }
    }

    #[test]
    fn min_positive_n_properties() {
        let prof = fig1();
        for kind in [
            BoundKind::TheoremMain,
            BoundKind::HrConcat,
            BoundKind::HrLinear,
        ] {
            let n = min_positive_n(kind, 0.05, 0.05, &prof, BIN, MAX_SEARCH_CEILING)
                .unwrap()
                .unwrap();
            assert!(evaluate(kind, n, 0.05, 0.05, &prof, BIN).unwrap().raw_bits > 0.0);
            assert!(
                evaluate(kind, n - 1, 0.05, 0.05, &prof, BIN)
                    .unwrap()
                    .raw_bits
                    <= 0.0
            );
        }
        let t = min_positive_n(BoundKind::TheoremMain, 0.05, 0.05, &prof, BIN, 1 << 20)
            .unwrap()
            .unwrap();
        assert!(t < 2000, "{t}");
        let flat = entropy_profile(&bsc_chain(BscChainParams::new(0.1, 0.0).unwrap()));
        assert_eq!(
            min_positive_n(BoundKind::HrLinear, 0.05, 0.05, &flat, BIN, 1 << 30).unwrap(),
            None
        );
        assert!(min_positive_n(BoundKind::HrLinear, 0.05, 0.05, &prof, BIN, u64::MAX).is_err());
    }

    #[test]
    fn monotone_in_eps_and_sigma() {
        let prof = fig1();
        let grid = [0.01, 0.02, 0.05, 0.1, 0.2];
        for kind in BoundKind::ALL {
            for n in [5_000u64, 50_000, 5_000_000] {
                for w in grid.windows(2) {
                    let (small, big) = (w[0], w[1]);
                    let v =
                        |e: f64, s: f64| evaluate(kind, n, e, s, &prof, BIN).unwrap().value_bits;
                    assert!(v(small, 0.05) <= v(big, 0.05), "{kind:?} n={n} eps");
                    assert!(v(0.05, small) <= v(0.05, big), "{kind:?} n={n} sigma");
                }
            }
        }
    }

    #[test]
    fn rates_below_capacity() {
        let prof = fig1();
        let cap = prof.capacity();
        for k in 0..20 {
            let n = (2_000.0 * 10f64.powf(k as f64 * 0.3)) as u64;
            for kind in BoundKind::ALL {
                let r = evaluate(kind, n, 0.05, 0.05, &prof, BIN).unwrap();
                assert!(r.rate < cap, "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn names_parse() {
        for k in BoundKind::ALL {
            assert_eq!(k.name().parse::<BoundKind>().unwrap(), k);
        }
        assert!("nope".parse::<BoundKind>().is_err());
    }
}
