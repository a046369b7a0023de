use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HashError;

/// A fixed-length bit string, most significant bit first.
///
/// Stored as the integer whose big-endian binary expansion is the string:
/// bit `i` (0-based from the left) is value bit `len − 1 − i`. Limbs are
/// little-endian and bits above `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: usize,
    limbs: Vec<u64>,
}

pub(crate) fn limbs_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            limbs: vec![0; limbs_for(len)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                out.set(i, true);
            }
        }
        out
    }

    /// Parses `"0101..."`; any other character is rejected.
    pub fn from_binary_str(s: &str) -> Result<Self, HashError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(HashError::Parse(format!("not a binary digit: {c:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(&bits))
    }

    /// The low `len` bits of `value`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut out = Self::zeros(len);
        if let Some(l) = out.limbs.first_mut() {
            *l = value;
        }
        out.mask_top();
        out
    }

    pub(crate) fn from_limbs(len: usize, mut limbs: Vec<u64>) -> Self {
        limbs.resize(limbs_for(len), 0);
        let mut out = Self { len, limbs };
        out.mask_top();
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    /// Integer value when it fits in 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0]),
            _ => None,
        }
    }

    /// Bit `i`, counted from the left.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let v = self.len - 1 - i;
        (self.limbs[v / 64] >> (v % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, on: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let v = self.len - 1 - i;
        let mask = 1u64 << (v % 64);
        if on {
            self.limbs[v / 64] |= mask;
        } else {
            self.limbs[v / 64] &= !mask;
        }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    /// The leftmost `t` bits.
    pub fn prefix(&self, t: usize) -> BitString {
        assert!(t <= self.len);
        let shift = self.len - t;
        BitString::from_limbs(t, shr_limbs(&self.limbs, shift))
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    /// Lowercase hex of the integer value, zero-padded to `⌈len/4⌉` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let nib = (self.limbs[bit / 64] >> (bit % 64)) & 0xf;
            out.push(char::from_digit(nib as u32, 16).expect("nibble"));
        }
        out
    }

    /// Inverse of [`to_hex`](Self::to_hex). Digits beyond `len` bits must be zero.
    pub fn from_hex(len: usize, hex: &str) -> Result<Self, HashError> {
        let digits = len.div_ceil(4);
        if hex.len() != digits {
            return Err(HashError::Parse(format!(
                "expected {digits} hex digits for {len} bits, got {}",
                hex.len()
            )));
        }
        let mut limbs = vec![0u64; limbs_for(len).max(limbs_for(digits * 4))];
        for (k, c) in hex.chars().rev().enumerate() {
            let nib = c
                .to_digit(16)
                .filter(|_| !c.is_ascii_uppercase())
                .ok_or_else(|| HashError::Parse(format!("not a lowercase hex digit: {c:?}")))?;
            let bit = k * 4;
            limbs[bit / 64] |= (nib as u64) << (bit % 64);
        }
        let out = BitString::from_limbs(len, limbs.clone());
        let extra = limbs
            .iter()
            .zip(out.limbs.iter().chain(std::iter::repeat(&0)))
            .any(|(a, b)| a != b);
        if extra {
            return Err(HashError::Parse(format!("hex value exceeds {len} bits")));
        }
        Ok(out)
    }

    fn mask_top(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(top) = self.limbs.last_mut() {
                *top &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Logical right shift of a little-endian limb vector.
pub(crate) fn shr_limbs(limbs: &[u64], shift: usize) -> Vec<u64> {
    let (ws, bs) = (shift / 64, shift % 64);
    let n = limbs.len().saturating_sub(ws);
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let lo = limbs[i + ws] >> bs;
        let hi = if bs > 0 {
            limbs.get(i + ws + 1).map_or(0, |&h| h << (64 - bs))
        } else {
            0
        };
        *o = lo | hi;
    }
    out
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct HexRecord {
    bits: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HexRecord {
            bits: self.len,
            hex: self.to_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = HexRecord::deserialize(d)?;
        BitString::from_hex(rec.bits, &rec.hex).map_err(D::Error::custom)
    }
}
