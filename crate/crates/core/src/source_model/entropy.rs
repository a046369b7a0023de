use serde::{Deserialize, Serialize};

use super::{JointSource, SourceError};
use crate::scalar::{xlog2x, Real};

/// Per-symbol entropic quantities of a source, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EntropyProfile<T: Real = f64> {
    pub h_x: T,
    pub h_x_given_y: T,
    pub h_x_given_z: T,
    /// `Var(−log P_{X|Y})`, bits².
    pub var_x_given_y: T,
    /// `Var(−log P_{X|Z})`, bits².
    pub var_x_given_z: T,
    /// `E|−log P_{X|Y} − H(X|Y)|³`, bits³.
    pub rho_x_given_y: T,
}

impl<T: Real> EntropyProfile<T> {
    /// Less-noisy one-way capacity `H(X|Z) − H(X|Y)` of the profiled source.
    pub fn capacity(&self) -> T {
        self.h_x_given_z - self.h_x_given_y
    }
}

/// Mean, variance and third absolute central moment of `−log P_{A|B}`.
///
/// `joint` is laid out `a * nb + b`.
fn conditional_moments<T: Real>(joint: &[T], na: usize, nb: usize) -> (T, T, T) {
    let mut pb = vec![T::zero(); nb];
    for a in 0..na {
        for b in 0..nb {
            pb[b] = pb[b] + joint[a * nb + b];
        }
    }
    let surprisal = |a: usize, b: usize| -> Option<(T, T)> {
        let pab = joint[a * nb + b];
        (pab > T::zero()).then(|| (pab, -(pab / pb[b]).log2()))
    };
    let mut mean = T::zero();
    for a in 0..na {
        for b in 0..nb {
            if let Some((w, s)) = surprisal(a, b) {
                mean = mean + w * s;
            }
        }
    }
    let mut var = T::zero();
    let mut rho = T::zero();
    for a in 0..na {
        for b in 0..nb {
            if let Some((w, s)) = surprisal(a, b) {
                let d = (s - mean).abs();
                var = var + w * d * d;
                rho = rho + w * d * d * d;
            }
        }
    }
    (mean.max(T::zero()), var, rho)
}

pub fn entropy_profile<T: Real>(src: &JointSource<T>) -> EntropyProfile<T> {
    let sizes = src.sizes();
    let h_x = -src.marginal_x().into_iter().map(xlog2x).sum::<T>();
    let (h_xy, var_xy, rho_xy) = conditional_moments(&src.joint_xy(), sizes.x, sizes.y);
    let (h_xz, var_xz, _) = conditional_moments(&src.joint_xz(), sizes.x, sizes.z);
    EntropyProfile {
        h_x,
        h_x_given_y: h_xy,
        h_x_given_z: h_xz,
        var_x_given_y: var_xy,
        var_x_given_z: var_xz,
        rho_x_given_y: rho_xy,
    }
}

/// Profile of independent, non-identical experiments, averaged per position.
///
/// `n · h` of the result equals the block entropy of the whole sequence, so
/// the planner's formulas apply unchanged with `n = sources.len()`. The
/// moment fields are averaged likewise; the Berry–Esseen bounds assume
/// identically distributed positions and should only be fed IID profiles.
pub fn entropy_profile_independent<T: Real>(sources: &[JointSource<T>]) -> EntropyProfile<T> {
    let k = T::count(sources.len().max(1) as u64);
    let mut acc = EntropyProfile {
        h_x: T::zero(),
        h_x_given_y: T::zero(),
        h_x_given_z: T::zero(),
        var_x_given_y: T::zero(),
        var_x_given_z: T::zero(),
        rho_x_given_y: T::zero(),
    };
    for p in sources.iter().map(entropy_profile) {
        acc.h_x = acc.h_x + p.h_x;
        acc.h_x_given_y = acc.h_x_given_y + p.h_x_given_y;
        acc.h_x_given_z = acc.h_x_given_z + p.h_x_given_z;
        acc.var_x_given_y = acc.var_x_given_y + p.var_x_given_y;
        acc.var_x_given_z = acc.var_x_given_z + p.var_x_given_z;
        acc.rho_x_given_y = acc.rho_x_given_y + p.rho_x_given_y;
    }
    EntropyProfile {
        h_x: acc.h_x / k,
        h_x_given_y: acc.h_x_given_y / k,
        h_x_given_z: acc.h_x_given_z / k,
        var_x_given_y: acc.var_x_given_y / k,
        var_x_given_z: acc.var_x_given_z / k,
        rho_x_given_y: acc.rho_x_given_y / k,
    }
}

/// `h₂(p) = −p log p − (1−p) log(1−p)`.
pub fn binary_entropy<T: Real>(p: T) -> Result<T, SourceError> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(SourceError::Domain {
            what: "p",
            value: p.f64(),
        });
    }
    Ok(-xlog2x(p) - xlog2x(T::one() - p))
}

/// Crossover of two cascaded binary symmetric channels, `p(1−q) + (1−p)q`.
pub fn crossover_convolve<T: Real>(p: T, q: T) -> Result<T, SourceError> {
    for (what, v) in [("p", p), ("q", q)] {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(SourceError::Domain {
                what,
                value: v.f64(),
            });
        }
    }
    Ok(p * (T::one() - q) + (T::one() - p) * q)
}

/// One-way secret key capacity `H(X|Z) − H(X|Y)`.
///
/// Only meaningful when `Y` is less noisy than `Z` with respect to `X`
/// (in particular when `X − Y − Z` is a Markov chain). The condition is not
/// checked; a negative value is returned as-is.
pub fn ow_capacity_less_noisy<T: Real>(src: &JointSource<T>) -> T {
    entropy_profile(src).capacity()
}

/// Average conditional min-entropy `H̃∞(X^n|Z^n)` of `n` IID copies.
///
/// Both the max and the expectation factor over positions, so this is
/// `−n log Σ_z max_x P_XZ(x, z)` exactly.
pub fn avg_min_entropy_iid<T: Real>(src: &JointSource<T>, n: usize) -> T {
    let sizes = src.sizes();
    let pxz = src.joint_xz();
    let mut guess = T::zero();
    for z in 0..sizes.z {
        let best = (0..sizes.x)
            .map(|x| pxz[x * sizes.z + z])
            .fold(T::zero(), T::max);
        guess = guess + best;
    }
    -T::count(n as u64) * guess.log2()
}
