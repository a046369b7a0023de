//! Multiplicative 2-universal hashing over GF(2^m).
//!
//! `h_s(x)` is the leading `t` bits of the field product `x ⊙ s`. Inputs are
//! symbol vectors packed with [`encode_symbols`].

mod bits;
mod field;
mod poly;

pub use bits::BitString;
pub(crate) use bits::{limbs_for, shr_limbs};
pub use field::{gf_mul, GfContext, MAX_DEGREE};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HashError {
    #[error("expected a {expected}-bit operand, got {found} bits")]
    Length { expected: usize, found: usize },
    #[error("cannot output {out_bits} bits from a {m}-bit field")]
    OutBits { out_bits: usize, m: usize },
    #[error("symbol {symbol} at position {index} is outside an alphabet of size {alphabet}")]
    Symbol {
        index: usize,
        symbol: usize,
        alphabet: usize,
    },
    #[error("field degree {0} outside 1..=4096")]
    FieldDegree(usize),
    #[error("reduction polynomial of degree {0} is not irreducible")]
    Reducible(usize),
    #[error("{0}")]
    Parse(String),
}

/// A field element used as the hash key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HashSeed(pub BitString);

impl HashSeed {
    pub fn new(bits: BitString) -> Self {
        Self(bits)
    }

    pub fn zero(m: usize) -> Self {
        Self(BitString::zeros(m))
    }

    /// The multiplicative identity.
    pub fn one(m: usize) -> Self {
        let mut b = BitString::zeros(m);
        if m > 0 {
            b.set(m - 1, true);
        }
        Self(b)
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Bits per symbol: `⌈log₂ q⌉`, at least 1.
pub fn symbol_width(alphabet: usize) -> usize {
    if alphabet <= 2 {
        1
    } else {
        (usize::BITS - (alphabet - 1).leading_zeros()) as usize
    }
}

/// Packs symbols big-endian at a fixed width; the first symbol lands in the
/// most significant bits.
pub fn encode_symbols(xs: &[usize], alphabet: usize) -> Result<BitString, HashError> {
    let w = symbol_width(alphabet);
    let mut out = BitString::zeros(xs.len() * w);
    for (i, &s) in xs.iter().enumerate() {
        if s >= alphabet {
            return Err(HashError::Symbol {
                index: i,
                symbol: s,
                alphabet,
            });
        }
        for b in 0..w {
            if (s >> (w - 1 - b)) & 1 == 1 {
                out.set(i * w + b, true);
            }
        }
    }
    Ok(out)
}

pub fn decode_symbols(bits: &BitString, alphabet: usize) -> Result<Vec<usize>, HashError> {
    let w = symbol_width(alphabet);
    if !bits.len().is_multiple_of(w) {
        return Err(HashError::Parse(format!(
            "{} bits is not a multiple of the symbol width {w}",
            bits.len()
        )));
    }
    (0..bits.len() / w)
        .map(|i| {
            let s = (0..w).fold(0usize, |acc, b| (acc << 1) | bits.bit(i * w + b) as usize);
            if s >= alphabet {
                Err(HashError::Symbol {
                    index: i,
                    symbol: s,
                    alphabet,
                })
            } else {
                Ok(s)
            }
        })
        .collect()
}

/// `h_s(x)`: the `out_bits` most significant bits of `x ⊙ s`.
pub fn hash(
    x: &BitString,
    s: &HashSeed,
    out_bits: usize,
    ctx: &GfContext,
) -> Result<BitString, HashError> {
    let m = ctx.degree();
    if out_bits > m {
        return Err(HashError::OutBits { out_bits, m });
    }
    Ok(ctx.mul(x, &s.0)?.prefix(out_bits))
}

/// Uniform seed of `m` bits from a ChaCha8 stream keyed by `rng_seed`.
pub fn fresh_seed(m: usize, rng_seed: u64) -> HashSeed {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    seed_from_rng(m, &mut rng)
}

pub fn seed_from_rng<R: RngCore + ?Sized>(m: usize, rng: &mut R) -> HashSeed {
    let limbs = (0..m.div_ceil(64)).map(|_| rng.next_u64()).collect();
    HashSeed(BitString::from_limbs(m, limbs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::RngCore;

    #[test]
    fn encoding_examples() {
        assert_eq!(encode_symbols(&[1, 0, 1], 2).unwrap().to_string(), "101");
        assert_eq!(encode_symbols(&[2, 1], 3).unwrap().to_string(), "1001");
        assert_eq!(symbol_width(1), 1);
        assert_eq!(symbol_width(4), 2);
        assert_eq!(symbol_width(5), 3);
        assert!(matches!(
            encode_symbols(&[0, 3], 3),
            Err(HashError::Symbol { index: 1, .. })
        ));
        assert!(decode_symbols(&BitString::from_binary_str("11").unwrap(), 3).is_err());
    }

    #[test]
    fn hash_edge_cases() {
        let ctx = GfContext::new(8).unwrap();
        let x = BitString::from_u64(8, 0xa7);
        assert_eq!(hash(&x, &HashSeed::one(8), 8, &ctx).unwrap(), x);
        assert!(hash(&x, &HashSeed::one(8), 0, &ctx).unwrap().is_empty());
        assert_eq!(
            hash(&x, &HashSeed::zero(8), 5, &ctx).unwrap(),
            BitString::zeros(5)
        );
        assert!(matches!(
            hash(&x, &HashSeed::one(8), 9, &ctx),
            Err(HashError::OutBits { .. })
        ));
    }

    #[test]
    fn m8_t3_collides_on_32_seeds() {
        let ctx = GfContext::new(8).unwrap();
        let (x, y) = (BitString::from_u64(8, 0x3c), BitString::from_u64(8, 0xd1));
        let hits = (0..256u64)
            .filter(|&s| {
                let s = HashSeed(BitString::from_u64(8, s));
                hash(&x, &s, 3, &ctx).unwrap() == hash(&y, &s, 3, &ctx).unwrap()
            })
            .count();
        assert_eq!(hits, 32);
    }

    #[test]
    fn exact_two_universality_small_fields() {
        for m in 1..=10usize {
            let ctx = GfContext::new(m).unwrap();
            let size = 1u64 << m;
            // Collisions depend only on d = x ⊕ x′, so every nonzero d covers all pairs.
            let pairs: Vec<(u64, u64)> = if m <= 4 {
                (0..size)
                    .flat_map(|a| (0..size).filter(move |&b| b != a).map(move |b| (a, b)))
                    .collect()
            } else {
                (1..size)
                    .map(|d| (0, d))
                    .chain([(5 % size, size - 1)])
                    .collect()
            };
            for (a, b) in pairs {
                let (xa, xb) = (BitString::from_u64(m, a), BitString::from_u64(m, b));
                let prods: Vec<(u64, u64)> = (0..size)
                    .map(|s| {
                        let s = BitString::from_u64(m, s);
                        (
                            ctx.mul(&xa, &s).unwrap().to_u64().unwrap(),
                            ctx.mul(&xb, &s).unwrap().to_u64().unwrap(),
                        )
                    })
                    .collect();
                for t in 0..=m {
                    let hits = prods
                        .iter()
                        .filter(|(p, q)| p >> (m - t) == q >> (m - t))
                        .count();
                    assert_eq!(hits as u64, 1 << (m - t), "m={m} t={t} pair=({a},{b})");
                }
            }
        }
    }

    #[test]
    fn seed_bit_balance() {
        let mut ones = 0usize;
        let draws = 100_000u64;
        for r in 0..draws {
            ones += fresh_seed(16, r).0.count_ones();
        }
        let frac = ones as f64 / (16 * draws) as f64;
        assert!((frac - 0.5).abs() < 0.01, "{frac}");
        assert_eq!(fresh_seed(100, 7), fresh_seed(100, 7));
        assert_ne!(fresh_seed(64, 7), fresh_seed(64, 8));
        assert_eq!(fresh_seed(100, 7).len(), 100);
    }

    #[test]
    fn uniform_input_gives_uniform_output() {
        // Chi-square over the 8 output cells of t = 3, pooled over all 256 seeds.
        let ctx = GfContext::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0u64; 8];
        let draws = 40_000;
        for _ in 0..draws {
            let x = BitString::from_u64(8, rng.next_u64() & 0xff);
            let s = seed_from_rng(8, &mut rng);
            let v = hash(&x, &s, 3, &ctx).unwrap().to_u64().unwrap();
            counts[v as usize] += 1;
        }
        let expected = draws as f64 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 7 degrees of freedom; 24.32 is the 0.999 quantile.
        assert!(chi2 < 24.32, "chi2 = {chi2}");
    }

    proptest! {
        #[test]
        fn encode_round_trip(alphabet in 1usize..9, xs in proptest::collection::vec(0usize..64, 0..40)) {
            let xs: Vec<usize> = xs.into_iter().map(|v| v % alphabet).collect();
            let bits = encode_symbols(&xs, alphabet).unwrap();
            prop_assert_eq!(bits.len(), xs.len() * symbol_width(alphabet));
            prop_assert_eq!(decode_symbols(&bits, alphabet).unwrap(), xs);
        }

        #[test]
        fn hash_is_linear(m in prop::sample::select(vec![8usize, 13, 64, 100, 128]), seed in any::<u64>(), t in 0usize..9) {
            let ctx = GfContext::new(m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = seed_from_rng(m, &mut rng).0;
            let y = seed_from_rng(m, &mut rng).0;
            let s = seed_from_rng(m, &mut rng);
            let lhs = hash(&x.xor(&y), &s, t, &ctx).unwrap();
            let rhs = hash(&x, &s, t, &ctx).unwrap().xor(&hash(&y, &s, t, &ctx).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
