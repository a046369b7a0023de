//! Arithmetic in GF(2^m) on little-endian `u64` limbs.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::bits::{limbs_for, BitString};
use super::HashError;

pub const MAX_DEGREE: usize = 4096;

/// Low-weight irreducible polynomials, as the exponents of `x^m + ... + 1`
/// below `m`. Each entry is checked by the irreducibility test in the test
/// suite.
const TABLE: &[(usize, &[usize])] = &[
    (8, &[4, 3, 1, 0]),
    (16, &[5, 3, 1, 0]),
    (32, &[7, 3, 2, 0]),
    (64, &[4, 3, 1, 0]),
    (128, &[7, 2, 1, 0]),
    (256, &[10, 5, 2, 0]),
    (512, &[8, 5, 2, 0]),
    (1024, &[19, 6, 1, 0]),
    (2048, &[19, 14, 13, 0]),
    (4096, &[27, 15, 1, 0]),
];

/// The field GF(2^m) = GF(2)[x] / (f), with `f` irreducible of degree `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfContext {
    m: usize,
    /// Exponents of `f` below `m`, descending; always ends in `0`.
    taps: Vec<usize>,
}

impl GfContext {
    /// Field of degree `m` using the built-in table, or the first irreducible
    /// `x^m + r(x)` in increasing numeric order of `r` when `m` is not tabled.
    pub fn new(m: usize) -> Result<Self, HashError> {
        if m == 0 || m > MAX_DEGREE {
            return Err(HashError::FieldDegree(m));
        }
        if let Some((_, taps)) = TABLE.iter().find(|(d, _)| *d == m) {
            return Ok(Self {
                m,
                taps: taps.to_vec(),
            });
        }
        static CACHE: OnceLock<Mutex<HashMap<usize, Vec<usize>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(taps) = cache.lock().expect("cache lock").get(&m) {
            return Ok(Self {
                m,
                taps: taps.clone(),
            });
        }
        let taps = super::poly::first_irreducible(m);
        cache.lock().expect("cache lock").insert(m, taps.clone());
        Ok(Self { m, taps })
    }

    /// Field with an explicit reduction polynomial; `taps` are the exponents
    /// below `m`. Fails unless the polynomial is irreducible.
    pub fn with_taps(m: usize, taps: &[usize]) -> Result<Self, HashError> {
        if m == 0 || m > MAX_DEGREE {
            return Err(HashError::FieldDegree(m));
        }
        let mut taps = taps.to_vec();
        taps.sort_unstable_by(|a, b| b.cmp(a));
        taps.dedup();
        if taps.first().is_some_and(|&e| e >= m) || taps.last() != Some(&0) {
            return Err(HashError::Reducible(m));
        }
        let ctx = Self { m, taps };
        if !super::poly::is_irreducible(&ctx.modulus_limbs()) {
            return Err(HashError::Reducible(m));
        }
        Ok(ctx)
    }

    pub(crate) fn unchecked(m: usize, taps: Vec<usize>) -> Self {
        Self { m, taps }
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn taps(&self) -> &[usize] {
        &self.taps
    }

    /// The reduction polynomial including the leading `x^m` term.
    pub fn modulus_limbs(&self) -> Vec<u64> {
        let mut out = vec![0u64; limbs_for(self.m + 1)];
        for &e in std::iter::once(&self.m).chain(&self.taps) {
            out[e / 64] |= 1 << (e % 64);
        }
        out
    }

    /// Human-readable polynomial, e.g. `x^8 + x^4 + x^3 + x + 1`.
    pub fn polynomial(&self) -> String {
        std::iter::once(self.m)
            .chain(self.taps.iter().copied())
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                e => format!("x^{e}"),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Product of two field elements, each an `m`-bit string.
    pub fn mul(&self, a: &BitString, b: &BitString) -> Result<BitString, HashError> {
        for v in [a, b] {
            if v.len() != self.m {
                return Err(HashError::Length {
                    expected: self.m,
                    found: v.len(),
                });
            }
        }
        Ok(BitString::from_limbs(
            self.m,
            self.mul_limbs(a.limbs(), b.limbs()),
        ))
    }

    pub(crate) fn mul_limbs(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if self.m <= 64 {
            let prod = clmul64(
                a.first().copied().unwrap_or(0),
                b.first().copied().unwrap_or(0),
            );
            return vec![self.reduce_u128(prod)];
        }
        let mut prod = clmul_limbs(a, b);
        self.reduce(&mut prod);
        prod.truncate(limbs_for(self.m));
        prod
    }

    /// `a ← a · x`, for `a` a reduced element in `limbs_for(m)` limbs.
    pub(crate) fn mul_x_assign(&self, a: &mut [u64]) {
        let m = self.m;
        let mut carry = 0u64;
        for l in a.iter_mut() {
            let next = *l >> 63;
            *l = (*l << 1) | carry;
            carry = next;
        }
        let top = if m.is_multiple_of(64) {
            carry
        } else {
            let w = m / 64;
            let bit = (a[w] >> (m % 64)) & 1;
            a[w] &= !(1u64 << (m % 64));
            bit
        };
        if top == 1 {
            for &e in &self.taps {
                a[e / 64] ^= 1 << (e % 64);
            }
        }
    }

    fn reduce_u128(&self, mut p: u128) -> u64 {
        let m = self.m;
        let mut low: u128 = 0;
        for &e in &self.taps {
            low |= 1 << e;
        }
        let modulus = low | (1u128 << m);
        for i in (m..2 * m - 1).rev() {
            if (p >> i) & 1 == 1 {
                p ^= modulus << (i - m);
            }
        }
        p as u64
    }

    /// Reduces a product of degree `< 2m − 1` in place.
    pub(crate) fn reduce(&self, p: &mut [u64]) {
        let m = self.m;
        let top = (p.len() * 64).min(2 * m - 1);
        for i in (m..top).rev() {
            if (p[i / 64] >> (i % 64)) & 1 == 1 {
                p[i / 64] ^= 1 << (i % 64);
                for &e in &self.taps {
                    let j = i - m + e;
                    p[j / 64] ^= 1 << (j % 64);
                }
            }
        }
    }
}

/// Carry-less 64×64 → 128 bit product.
#[inline]
pub(crate) fn clmul64(a: u64, b: u64) -> u128 {
    let a = a as u128;
    let mut acc = 0u128;
    let mut b = b;
    while b != 0 {
        let i = b.trailing_zeros();
        acc ^= a << i;
        b &= b - 1;
    }
    acc
}

/// Carry-less product of two limb vectors.
pub(crate) fn clmul_limbs(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y == 0 {
                continue;
            }
            let p = clmul64(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
    out
}

pub fn gf_mul(a: &BitString, b: &BitString, ctx: &GfContext) -> Result<BitString, HashError> {
    ctx.mul(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Shift-and-add multiply with reduction after every step; independent
    /// of the clmul + reduce path.
    fn peasant(a: u64, b: u64, m: usize, modulus: u128) -> u64 {
        let mut a = a as u128;
        let mut b = b;
        let mut acc = 0u128;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if (a >> m) & 1 == 1 {
                a ^= modulus;
            }
        }
        acc as u64
    }

    fn elem(m: usize, v: u64) -> BitString {
        BitString::from_u64(m, v)
    }

    #[test]
    fn aes_field_inverse_pair() {
        let ctx = GfContext::new(8).unwrap();
        assert_eq!(ctx.polynomial(), "x^8 + x^4 + x^3 + x + 1");
        let p = ctx.mul(&elem(8, 0x53), &elem(8, 0xca)).unwrap();
        assert_eq!(p.to_u64(), Some(0x01));
        assert_eq!(peasant(0x53, 0xca, 8, 0x11b), 0x01);
    }

    #[test]
    fn mul_x_matches_mul() {
        for m in [5usize, 8, 63, 64, 65, 128, 200] {
            let ctx = GfContext::new(m).unwrap();
            let mut x = BitString::zeros(m);
            x.set(m - 2, true);
            let mut a: Vec<u64> = (0..limbs_for(m))
                .map(|i| 0x9e37_79b9_7f4a_7c15u64.rotate_left(i as u32 * 7))
                .collect();
            let a_bits = BitString::from_limbs(m, a.clone());
            a = a_bits.limbs().to_vec();
            ctx.mul_x_assign(&mut a);
            assert_eq!(a, ctx.mul(&a_bits, &x).unwrap().limbs(), "m={m}");
        }
    }

    #[test]
    fn table_entries_are_irreducible() {
        for (m, taps) in TABLE {
            let ctx = GfContext::unchecked(*m, taps.to_vec());
            assert!(
                super::super::poly::is_irreducible(&ctx.modulus_limbs()),
                "m={m}"
            );
        }
    }

    #[test]
    fn identities() {
        for m in [1, 3, 8, 13, 64, 100, 128] {
            let ctx = GfContext::new(m).unwrap();
            let mut a = BitString::zeros(m);
            for i in (0..m).step_by(3) {
                a.set(i, true);
            }
            let one = BitString::from_u64(m, 1);
            assert_eq!(ctx.mul(&a, &one).unwrap(), a, "m={m}");
            assert_eq!(
                ctx.mul(&a, &BitString::zeros(m)).unwrap(),
                BitString::zeros(m)
            );
        }
    }

    #[test]
    fn rejects_wrong_lengths_and_degrees() {
        let ctx = GfContext::new(8).unwrap();
        assert!(ctx.mul(&elem(7, 1), &elem(8, 1)).is_err());
        assert!(GfContext::new(0).is_err());
        assert!(GfContext::new(MAX_DEGREE + 1).is_err());
        // x^8 + 1 = (x + 1)^8.
        assert!(matches!(
            GfContext::with_taps(8, &[0]),
            Err(HashError::Reducible(8))
        ));
        assert!(GfContext::with_taps(8, &[4, 3, 1, 0]).is_ok());
    }

    #[test]
    fn small_fields_match_peasant_multiply_exhaustively() {
        for m in 1..=8 {
            let ctx = GfContext::new(m).unwrap();
            let modulus = ctx.modulus_limbs()[0] as u128;
            for a in 0..(1u64 << m) {
                for b in 0..(1u64 << m) {
                    let got = ctx.mul(&elem(m, a), &elem(m, b)).unwrap().to_u64().unwrap();
                    assert_eq!(got, peasant(a, b, m, modulus), "m={m} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn nonzero_elements_have_inverses_gf16() {
        let ctx = GfContext::new(4).unwrap();
        for a in 1..16u64 {
            let inv = (1..16u64)
                .filter(|&b| ctx.mul(&elem(4, a), &elem(4, b)).unwrap().to_u64() == Some(1));
            assert_eq!(inv.count(), 1, "a={a}");
        }
    }

    fn arb_elem(m: usize) -> impl Strategy<Value = BitString> {
        proptest::collection::vec(any::<bool>(), m).prop_map(|b| BitString::from_bits(&b))
    }

    proptest! {
        #[test]
        fn commutative_associative_gf8(a in arb_elem(8), b in arb_elem(8), c in arb_elem(8)) {
            let ctx = GfContext::new(8).unwrap();
            prop_assert_eq!(ctx.mul(&a, &b).unwrap(), ctx.mul(&b, &a).unwrap());
            let ab_c = ctx.mul(&ctx.mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = ctx.mul(&a, &ctx.mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
        }

        #[test]
        fn commutative_associative_gf64(a in arb_elem(64), b in arb_elem(64), c in arb_elem(64)) {
            let ctx = GfContext::new(64).unwrap();
            prop_assert_eq!(ctx.mul(&a, &b).unwrap(), ctx.mul(&b, &a).unwrap());
            let ab_c = ctx.mul(&ctx.mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = ctx.mul(&a, &ctx.mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
        }

        #[test]
        fn distributive_gf200(a in arb_elem(200), b in arb_elem(200), c in arb_elem(200)) {
            let ctx = GfContext::new(200).unwrap();
            let lhs = ctx.mul(&a.xor(&b), &c).unwrap();
            let rhs = ctx.mul(&a, &c).unwrap().xor(&ctx.mul(&b, &c).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn multi_limb_matches_single_limb_on_embedded_field() {
        // GF(2^64) via the multi-limb path must agree with the u128 path.
        let ctx = GfContext::new(64).unwrap();
        let a = [0x0123_4567_89ab_cdefu64];
        let b = [0xfedc_ba98_7654_3210u64];
        let fast = ctx.mul_limbs(&a, &b);
        let mut slow = clmul_limbs(&a, &b);
        ctx.reduce(&mut slow);
        assert_eq!(fast[0], slow[0]);
        assert_eq!(slow[1], 0);
    }
}
