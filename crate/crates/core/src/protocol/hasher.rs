//! Table-driven evaluation of `h_s` on symbol vectors.
//!
//! `x ↦ x ⊙ s` is GF(2)-linear, so the `t`-bit hash of a packed vector is the
//! XOR of per-position contributions `h_s(a · e_i)`.

use crate::uhash::{limbs_for, shr_limbs, symbol_width, BitString, GfContext, HashSeed};

#[derive(Debug, Clone)]
pub(crate) struct LinearHasher {
    #[cfg_attr(not(test), allow(dead_code))]
    t: usize,
    stride: usize,
    alphabet: usize,
    /// Row `i * alphabet + a` is the hash of symbol `a` alone at position `i`.
    rows: Vec<u64>,
}

impl LinearHasher {
    pub(crate) fn new(
        n: usize,
        alphabet: usize,
        seed: &HashSeed,
        t: usize,
        ctx: &GfContext,
    ) -> Self {
        let m = ctx.degree();
        let w = symbol_width(alphabet);
        debug_assert_eq!(m, n * w);
        let stride = limbs_for(t).max(1);
        // bit_rows[j]: hash of the unit vector with only bit j (from the left) set.
        let mut bit_rows = vec![0u64; m * stride];
        let mut cur = seed.bits().limbs().to_vec();
        for k in 0..m {
            let j = m - 1 - k;
            let pre = shr_limbs(&cur, m - t);
            for (dst, src) in bit_rows[j * stride..(j + 1) * stride].iter_mut().zip(&pre) {
                *dst = *src;
            }
            ctx.mul_x_assign(&mut cur);
        }
        let mut rows = vec![0u64; n * alphabet * stride];
        for i in 0..n {
            for a in 0..alphabet {
                let row = (i * alphabet + a) * stride;
                for b in 0..w {
                    if (a >> (w - 1 - b)) & 1 == 1 {
                        let j = (i * w + b) * stride;
                        for k in 0..stride {
                            rows[row + k] ^= bit_rows[j + k];
                        }
                    }
                }
            }
        }
        LinearHasher {
            t,
            stride,
            alphabet,
            rows,
        }
    }

    pub(crate) fn stride(&self) -> usize {
        self.stride
    }

    /// Row for symbol `a` at position `i`.
    pub(crate) fn row(&self, i: usize, a: usize) -> &[u64] {
        let r = (i * self.alphabet + a) * self.stride;
        &self.rows[r..r + self.stride]
    }

    pub(crate) fn hash_into(&self, xs: &[usize], out: &mut [u64]) {
        out.fill(0);
        for (i, &a) in xs.iter().enumerate() {
            for (o, r) in out.iter_mut().zip(self.row(i, a)) {
                *o ^= r;
            }
        }
    }

    /// `v` in the same limb layout as [`hash_into`](Self::hash_into).
    pub(crate) fn target(&self, v: &BitString) -> Vec<u64> {
        let mut out = v.limbs().to_vec();
        out.resize(self.stride, 0);
        out
    }

    #[cfg(test)]
    pub(crate) fn hash(&self, xs: &[usize]) -> BitString {
        let mut out = vec![0u64; self.stride];
        self.hash_into(xs, &mut out);
        BitString::from_limbs(self.t, out)
    }
}
