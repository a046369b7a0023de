//! One-message key agreement: Alice hashes her vector and sends the hash;
//! Bob searches his list of likely vectors for the unique match; both hash
//! the agreed vector again with a second seed to get the key.

mod guess;
mod hasher;

pub use guess::{conditional_log_loss, lambda_tolerance, Decoder, GuessSet};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::Plan;
use crate::scalar::Real;
use crate::source_model::{sample, JointSource, Samples, SourceError};
use crate::uhash::{
    encode_symbols, hash, seed_from_rng, symbol_width, BitString, GfContext, HashError, HashSeed,
};
use hasher::LinearHasher;

/// Default cap on the number of guess-set candidates Bob will examine.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// `OMSKA_BUDGET` if set and parseable, otherwise [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u64 {
    std::env::var("OMSKA_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("{what}: expected length {expected}, found {found}")]
    Dimensions {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("symbol {symbol} at position {index} is outside an alphabet of size {alphabet}")]
    Symbol {
        index: usize,
        symbol: usize,
        alphabet: usize,
    },
    #[error("observation at position {index} has probability zero under the source")]
    ImpossibleObservation { index: usize },
    #[error("guess set of about {estimated} candidates exceeds the budget of {budget}")]
    Budget { estimated: u128, budget: u64 },
    #[error("{0}")]
    Decoder(String),
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Source(#[from] SourceError),
}

/// Alice's public message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Transcript<T: Real = f64> {
    /// Reconciliation seed.
    pub s: HashSeed,
    /// Extraction seed.
    pub s_prime: HashSeed,
    /// `h_s(x^n)`, `t` bits.
    pub v: BitString,
    pub plan: Plan<T>,
}

impl<T: Real> Transcript<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HashError> {
        serde_json::from_str(text).map_err(|e| HashError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Agreed,
    Aborted,
    Mismatched,
}

/// Result of Bob's search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Unique(Vec<usize>),
    NoMatch,
    /// At least two hash-consistent candidates.
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SessionResult<T: Real = f64> {
    pub outcome: Outcome,
    pub k_a: BitString,
    pub k_b: Option<BitString>,
    pub decoded_x: Option<Vec<usize>>,
    /// Bob's decoded vector equals Alice's.
    pub reconciled: bool,
    /// Guess-set members Bob examined.
    pub scanned: u64,
    pub samples: Samples,
    pub transcript: Transcript<T>,
}

impl<T: Real> SessionResult<T> {
    /// Abort or differing keys.
    pub fn failed(&self) -> bool {
        self.outcome != Outcome::Agreed
    }
}

/// `m = n ⌈log |X|⌉`, the bit length of packed vectors.
pub fn field_bits(n: usize, alphabet_x: usize) -> usize {
    n * symbol_width(alphabet_x)
}

fn check_lengths<T: Real>(plan: &Plan<T>, n: usize, ctx: &GfContext) -> Result<(), ProtocolError> {
    if plan.n as usize != n {
        return Err(ProtocolError::Dimensions {
            what: "vector vs plan.n",
            expected: plan.n as usize,
            found: n,
        });
    }
    let m = ctx.degree();
    for (what, bits) in [("t", plan.t), ("ell", plan.ell)] {
        if bits as usize > m {
            return Err(ProtocolError::Dimensions {
                what,
                expected: m,
                found: bits as usize,
            });
        }
    }
    Ok(())
}

fn check_seed(what: &'static str, s: &HashSeed, m: usize) -> Result<(), ProtocolError> {
    if s.len() != m {
        return Err(ProtocolError::Dimensions {
            what,
            expected: m,
            found: s.len(),
        });
    }
    Ok(())
}

/// Alice's side: the transcript `(s, s′, h_s(x^n))` and her key `h_{s′}(x^n)`.
pub fn alice_send<T: Real>(
    x: &[usize],
    alphabet_x: usize,
    plan: &Plan<T>,
    s: &HashSeed,
    s_prime: &HashSeed,
    ctx: &GfContext,
) -> Result<(Transcript<T>, BitString), ProtocolError> {
    check_lengths(plan, x.len(), ctx)?;
    let m = ctx.degree();
    check_seed("s", s, m)?;
    check_seed("s_prime", s_prime, m)?;
    let packed = encode_symbols(x, alphabet_x)?;
    if packed.len() != m {
        return Err(ProtocolError::Dimensions {
            what: "packed vector",
            expected: m,
            found: packed.len(),
        });
    }
    let v = hash(&packed, s, plan.t as usize, ctx)?;
    let k_a = hash(&packed, s_prime, plan.ell as usize, ctx)?;
    Ok((
        Transcript {
            s: s.clone(),
            s_prime: s_prime.clone(),
            v,
            plan: plan.clone(),
        },
        k_a,
    ))
}

/// Bob's search over [`GuessSet`] for candidates with `h_s(x̂) = v`. Stops at
/// the second match. Returns the decision and the number of candidates seen.
pub fn bob_decode<T: Real>(
    y: &[usize],
    transcript: &Transcript<T>,
    src: &JointSource<T>,
    ctx: &GfContext,
    decoder: Decoder,
    budget: u64,
) -> Result<(Decoded, u64), ProtocolError> {
    let plan = &transcript.plan;
    check_lengths(plan, y.len(), ctx)?;
    let m = ctx.degree();
    check_seed("s", &transcript.s, m)?;
    let nx = src.sizes().x;
    if field_bits(y.len(), nx) != m {
        return Err(ProtocolError::Dimensions {
            what: "field degree",
            expected: field_bits(y.len(), nx),
            found: m,
        });
    }
    let t = plan.t as usize;
    if transcript.v.len() != t {
        return Err(ProtocolError::Dimensions {
            what: "v",
            expected: t,
            found: transcript.v.len(),
        });
    }
    let guesses = GuessSet::new(y, plan.lambda.f64(), src, decoder, budget)?;
    let mut first: Option<Vec<usize>> = None;
    let mut scanned = 0u64;
    if decoder == Decoder::Exhaustive {
        // Reference path: hash each candidate directly.
        for cand in guesses {
            let cand = cand?;
            scanned += 1;
            if hash(&encode_symbols(&cand, nx)?, &transcript.s, t, ctx)? == transcript.v {
                if first.is_some() {
                    return Ok((Decoded::Ambiguous, scanned));
                }
                first = Some(cand);
            }
        }
    } else {
        let table = LinearHasher::new(y.len(), nx, &transcript.s, t, ctx);
        let target = table.target(&transcript.v);
        let mut buf = vec![0u64; table.stride()];
        for cand in guesses {
            let cand = cand?;
            scanned += 1;
            table.hash_into(&cand, &mut buf);
            if buf == target {
                if first.is_some() {
                    return Ok((Decoded::Ambiguous, scanned));
                }
                first = Some(cand);
            }
        }
    }
    Ok((
        match first {
            Some(x) => Decoded::Unique(x),
            None => Decoded::NoMatch,
        },
        scanned,
    ))
}

/// `k_B = h_{s′}(x̂^n)`.
pub fn bob_extract<T: Real>(
    decoded_x: &[usize],
    alphabet_x: usize,
    s_prime: &HashSeed,
    plan: &Plan<T>,
    ctx: &GfContext,
) -> Result<BitString, ProtocolError> {
    check_lengths(plan, decoded_x.len(), ctx)?;
    check_seed("s_prime", s_prime, ctx.degree())?;
    Ok(hash(
        &encode_symbols(decoded_x, alphabet_x)?,
        s_prime,
        plan.ell as usize,
        ctx,
    )?)
}

/// Options for [`run_session`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionOptions {
    pub decoder: Decoder,
    pub budget: u64,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions {
            decoder: Decoder::Auto,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// One full session: sample `(x^n, y^n, z^n)`, draw `s, s′`, run both sides.
/// Deterministic in `rng_seed`.
pub fn run_session<T: Real>(
    src: &JointSource<T>,
    plan: &Plan<T>,
    rng_seed: u64,
    opts: SessionOptions,
) -> Result<SessionResult<T>, ProtocolError> {
    let n = plan.n as usize;
    let nx = src.sizes().x;
    let ctx = GfContext::new(field_bits(n, nx))?;
    run_session_with(src, plan, &ctx, rng_seed, opts)
}

/// As [`run_session`] with a prebuilt field.
pub fn run_session_with<T: Real>(
    src: &JointSource<T>,
    plan: &Plan<T>,
    ctx: &GfContext,
    rng_seed: u64,
    opts: SessionOptions,
) -> Result<SessionResult<T>, ProtocolError> {
    let n = plan.n as usize;
    let nx = src.sizes().x;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let samples = sample(src, n, rng.next_u64())?;
    let m = ctx.degree();
    let s = seed_from_rng(m, &mut rng);
    let s_prime = seed_from_rng(m, &mut rng);
    let (transcript, k_a) = alice_send(&samples.x, nx, plan, &s, &s_prime, ctx)?;
    let (decoded, scanned) =
        bob_decode(&samples.y, &transcript, src, ctx, opts.decoder, opts.budget)?;
    let (outcome, k_b, decoded_x) = match decoded {
        Decoded::Unique(x) => {
            let k_b = bob_extract(&x, nx, &s_prime, plan, ctx)?;
            let outcome = if k_b == k_a {
                Outcome::Agreed
            } else {
                Outcome::Mismatched
            };
            (outcome, Some(k_b), Some(x))
        }
        Decoded::NoMatch | Decoded::Ambiguous => (Outcome::Aborted, None, None),
    };
    Ok(SessionResult {
        outcome,
        k_a,
        k_b,
        reconciled: decoded_x.as_deref() == Some(samples.x.as_slice()),
        decoded_x,
        scanned,
        samples,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::plan_desk_exact;
    use crate::source_model::{bsc_chain, BscChainParams};

    fn desk(n: u64, p: f64, q: f64) -> (JointSource, Plan) {
        let params = BscChainParams::new(p, q).unwrap();
        (
            bsc_chain(params),
            plan_desk_exact(n, 0.05, params, 0.05).unwrap(),
        )
    }

    #[test]
    fn empty_key_and_identity_leak() {
        let ctx = GfContext::new(8).unwrap();
        let x = vec![1, 0, 1, 1, 0, 0, 1, 0];
        let plan = Plan::manual(8, 0.05, 0.05, 0.0, 8, 0);
        let (tr, k) = alice_send(&x, 2, &plan, &HashSeed::one(8), &HashSeed::one(8), &ctx).unwrap();
        assert!(k.is_empty());
        assert_eq!(tr.v, encode_symbols(&x, 2).unwrap());
    }

    #[test]
    fn transcript_is_deterministic_and_round_trips() {
        let (src, plan) = desk(32, 0.02, 0.15);
        let a = run_session(&src, &plan, 99, SessionOptions::default()).unwrap();
        let b = run_session(&src, &plan, 99, SessionOptions::default()).unwrap();
        assert_eq!(a.transcript.to_json(), b.transcript.to_json());
        assert_eq!(a, b);
        let back: Transcript = Transcript::from_json(&a.transcript.to_json()).unwrap();
        assert_eq!(back, a.transcript);
        assert_eq!(back.v.len(), plan.t as usize);
        assert_eq!(back.s.len(), 32);
    }

    #[test]
    fn noiseless_always_agrees() {
        let (src, plan) = desk(24, 0.0, 0.3);
        for seed in 0..50 {
            let r = run_session(&src, &plan, seed, SessionOptions::default()).unwrap();
            assert_eq!(r.outcome, Outcome::Agreed);
            assert!(r.reconciled);
            assert_eq!(r.scanned, 1);
        }
    }

    #[test]
    fn unmatched_v_aborts() {
        let (src, plan) = desk(16, 0.05, 0.1);
        let ctx = GfContext::new(16).unwrap();
        let y = vec![0usize; 16];
        // With the zero seed every candidate hashes to 0, so any nonzero v
        // matches nothing.
        let mut v = BitString::zeros(plan.t as usize);
        v.set(0, true);
        let tr = Transcript {
            s: HashSeed::zero(16),
            s_prime: HashSeed::zero(16),
            v,
            plan: plan.clone(),
        };
        let (d, _) = bob_decode(&y, &tr, &src, &ctx, Decoder::Auto, DEFAULT_BUDGET).unwrap();
        assert_eq!(d, Decoded::NoMatch);
        let tr0 = Transcript {
            v: BitString::zeros(plan.t as usize),
            ..tr
        };
        let (d, scanned) = bob_decode(&y, &tr0, &src, &ctx, Decoder::Auto, DEFAULT_BUDGET).unwrap();
        assert_eq!(d, Decoded::Ambiguous);
        assert_eq!(scanned, 2);
    }

    #[test]
    fn extract_matches_alice_on_true_vector() {
        let (src, plan) = desk(32, 0.02, 0.15);
        let r = run_session(&src, &plan, 5, SessionOptions::default()).unwrap();
        let ctx = GfContext::new(32).unwrap();
        let plan8 = Plan::manual(32, 0.05, 0.05, plan.lambda, plan.t, 8);
        let (_, k_a) = alice_send(
            &r.samples.x,
            2,
            &plan8,
            &r.transcript.s,
            &r.transcript.s_prime,
            &ctx,
        )
        .unwrap();
        let k_b = bob_extract(&r.samples.x, 2, &r.transcript.s_prime, &plan8, &ctx).unwrap();
        assert_eq!(k_a, k_b);
        assert_eq!(k_a.len(), 8);
    }

    #[test]
    fn wrong_vector_keys_differ_at_rate_one_minus_two_to_minus_ell() {
        // Over all 2^8 extraction seeds, two distinct vectors share an
        // ℓ-bit key on exactly 2^{8−ℓ} seeds.
        let ctx = GfContext::new(8).unwrap();
        let x = vec![1, 0, 0, 1, 1, 0, 1, 0];
        let xh = vec![1, 0, 0, 1, 1, 1, 1, 0];
        for ell in 1..=8u64 {
            let plan = Plan::manual(8, 0.05, 0.05, 0.0, 0, ell);
            let same = (0..256u64)
                .filter(|&s| {
                    let sp = HashSeed::new(BitString::from_u64(8, s));
                    bob_extract(&x, 2, &sp, &plan, &ctx).unwrap()
                        == bob_extract(&xh, 2, &sp, &plan, &ctx).unwrap()
                })
                .count();
            assert_eq!(same, 1 << (8 - ell));
        }
    }

    #[test]
    fn dimension_errors() {
        let ctx = GfContext::new(8).unwrap();
        let plan = Plan::manual(8, 0.05, 0.05, 0.0, 9, 0);
        let x = vec![0; 8];
        assert!(matches!(
            alice_send(&x, 2, &plan, &HashSeed::one(8), &HashSeed::one(8), &ctx),
            Err(ProtocolError::Dimensions { what: "t", .. })
        ));
        let plan = Plan::manual(8, 0.05, 0.05, 0.0, 3, 0);
        assert!(alice_send(
            &x[..7],
            2,
            &plan,
            &HashSeed::one(8),
            &HashSeed::one(8),
            &ctx
        )
        .is_err());
        assert!(alice_send(&x, 2, &plan, &HashSeed::one(7), &HashSeed::one(8), &ctx).is_err());
    }

    #[test]
    fn decoders_agree_on_sessions() {
        let (src, plan) = desk(8, 0.25, 0.1);
        for seed in 0..200 {
            let run = |decoder| {
                run_session(
                    &src,
                    &plan,
                    seed,
                    SessionOptions {
                        decoder,
                        budget: DEFAULT_BUDGET,
                    },
                )
                .unwrap()
            };
            let reference = run(Decoder::Exhaustive);
            for d in [Decoder::Auto, Decoder::Ball, Decoder::General] {
                let r = run(d);
                assert_eq!(r.outcome, reference.outcome, "seed {seed} {d:?}");
                assert_eq!(r.decoded_x, reference.decoded_x, "seed {seed} {d:?}");
                assert_eq!(r.k_b, reference.k_b);
            }
        }
    }

    #[test]
    fn env_budget() {
        assert_eq!(DEFAULT_BUDGET, 100_000_000);
        assert!(budget_from_env() > 0);
    }
}
