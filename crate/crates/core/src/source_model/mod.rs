//! Finite source models `P_XYZ`.
//!
//! A [`JointSource`] is a dense probability table over `(x, y, z)` with
//! row-major layout (`z` fastest). Alice observes `X`, Bob `Y` and Eve `Z`.

mod entropy;
mod io;
mod sample;

pub use entropy::{
    avg_min_entropy_iid, binary_entropy, crossover_convolve, entropy_profile,
    entropy_profile_independent, ow_capacity_less_noisy, EntropyProfile,
};
pub use io::{load_joint_pmf, load_joint_pmf_file, SourceSpec};
pub use sample::{sample, Samples};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("source description does not parse: {0}")]
    Parse(String),
    #[error("unknown builtin source {0:?}")]
    UnknownBuiltin(String),
    #[error("alphabet sizes must be positive, got {0:?}")]
    EmptyAlphabet([usize; 3]),
    #[error("pmf has {found} entries but alphabet sizes require {expected}")]
    Dimensions { expected: usize, found: usize },
    #[error("{axis} labels: expected {expected}, found {found}")]
    Labels {
        axis: char,
        expected: usize,
        found: usize,
    },
    #[error("negative probability {value} at cell {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("non-finite probability at cell {0}")]
    NonFinite(usize),
    #[error("pmf sums to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("{what} = {value} outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `(|X|, |Y|, |Z|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct AlphabetSizes {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl AlphabetSizes {
    pub fn new(x: usize, y: usize, z: usize) -> Self {
        Self { x, y, z }
    }

    pub fn cells(&self) -> usize {
        self.x * self.y * self.z
    }
}

impl From<[usize; 3]> for AlphabetSizes {
    fn from([x, y, z]: [usize; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<AlphabetSizes> for [usize; 3] {
    fn from(s: AlphabetSizes) -> Self {
        [s.x, s.y, s.z]
    }
}

/// Optional symbol names per alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

/// Crossover probabilities of the chain `X → BSC_p → Y → BSC_q → Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BscChainParams<T: Real = f64> {
    pub p: T,
    pub q: T,
}

impl<T: Real> BscChainParams<T> {
    pub fn new(p: T, q: T) -> Result<Self, SourceError> {
        let half = T::lit(0.5);
        for (what, v) in [("p", p), ("q", q)] {
            if !(v >= T::zero() && v <= half) {
                return Err(SourceError::Domain {
                    what,
                    value: v.f64(),
                });
            }
        }
        Ok(Self { p, q })
    }
}

/// Joint distribution of `(X, Y, Z)` on finite alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSource<T: Real = f64> {
    sizes: AlphabetSizes,
    pmf: Vec<T>,
    labels: Option<Labels>,
    bsc: Option<BscChainParams<T>>,
}

impl<T: Real> JointSource<T> {
    /// Validates and wraps a row-major pmf table.
    pub fn new(sizes: AlphabetSizes, pmf: Vec<T>) -> Result<Self, SourceError> {
        if sizes.x == 0 || sizes.y == 0 || sizes.z == 0 {
            return Err(SourceError::EmptyAlphabet(sizes.into()));
        }
        if pmf.len() != sizes.cells() {
            return Err(SourceError::Dimensions {
                expected: sizes.cells(),
                found: pmf.len(),
            });
        }
        for (index, &v) in pmf.iter().enumerate() {
            if !v.is_finite() {
                return Err(SourceError::NonFinite(index));
            }
            if v < T::zero() {
                return Err(SourceError::NegativeProbability {
                    index,
                    value: v.f64(),
                });
            }
        }
        let sum: T = pmf.iter().copied().sum();
        if (sum - T::one()).abs() > T::pmf_tolerance(pmf.len()) {
            return Err(SourceError::NotNormalized { sum: sum.f64() });
        }
        Ok(Self {
            sizes,
            pmf,
            labels: None,
            bsc: None,
        })
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self, SourceError> {
        for (axis, expected, found) in [
            ('x', self.sizes.x, labels.x.len()),
            ('y', self.sizes.y, labels.y.len()),
            ('z', self.sizes.z, labels.z.len()),
        ] {
            if expected != found {
                return Err(SourceError::Labels {
                    axis,
                    expected,
                    found,
                });
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Uniform binary `X`, `Y = BSC_p(X)`, `Z = BSC_q(Y)`.
    pub fn bsc_chain(params: BscChainParams<T>) -> Self {
        let BscChainParams { p, q } = params;
        let half = T::lit(0.5);
        let one = T::one();
        let mut pmf = Vec::with_capacity(8);
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let pxy = if x == y { one - p } else { p };
                    let pyz = if y == z { one - q } else { q };
                    pmf.push(half * pxy * pyz);
                }
            }
        }
        Self {
            sizes: AlphabetSizes::new(2, 2, 2),
            pmf,
            labels: None,
            bsc: Some(params),
        }
    }

    pub fn sizes(&self) -> AlphabetSizes {
        self.sizes
    }

    pub fn pmf(&self) -> &[T] {
        &self.pmf
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    /// Parameters when the source was built as a BSC chain.
    pub fn bsc_params(&self) -> Option<BscChainParams<T>> {
        self.bsc
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.sizes.y + y) * self.sizes.z + z
    }

    #[inline]
    pub fn p(&self, x: usize, y: usize, z: usize) -> T {
        self.pmf[self.index(x, y, z)]
    }

    pub fn marginal_x(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.sizes.x];
        self.for_each_cell(|x, _, _, v| out[x] = out[x] + v);
        out
    }

    pub fn marginal_y(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.sizes.y];
        self.for_each_cell(|_, y, _, v| out[y] = out[y] + v);
        out
    }

    pub fn marginal_z(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.sizes.z];
        self.for_each_cell(|_, _, z, v| out[z] = out[z] + v);
        out
    }

    /// `P_XY` laid out as `x * |Y| + y`.
    pub fn joint_xy(&self) -> Vec<T> {
        let ny = self.sizes.y;
        let mut out = vec![T::zero(); self.sizes.x * ny];
        self.for_each_cell(|x, y, _, v| out[x * ny + y] = out[x * ny + y] + v);
        out
    }

    /// `P_XZ` laid out as `x * |Z| + z`.
    pub fn joint_xz(&self) -> Vec<T> {
        let nz = self.sizes.z;
        let mut out = vec![T::zero(); self.sizes.x * nz];
        self.for_each_cell(|x, _, z, v| out[x * nz + z] = out[x * nz + z] + v);
        out
    }

    /// `P_YZ` laid out as `y * |Z| + z`.
    pub fn joint_yz(&self) -> Vec<T> {
        let nz = self.sizes.z;
        let mut out = vec![T::zero(); self.sizes.y * nz];
        self.for_each_cell(|_, y, z, v| out[y * nz + z] = out[y * nz + z] + v);
        out
    }

    /// Symbols of `X` with zero marginal mass.
    pub fn unused_x(&self) -> Vec<usize> {
        self.marginal_x()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == T::zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Table of `P_{X|Y}(x|y)` laid out as `y * |X| + x`; rows for
    /// `P_Y(y) = 0` are all zero.
    pub fn conditional_x_given_y(&self) -> Vec<T> {
        let (nx, ny) = (self.sizes.x, self.sizes.y);
        let pxy = self.joint_xy();
        let py = self.marginal_y();
        let mut out = vec![T::zero(); nx * ny];
        for y in 0..ny {
            if py[y] > T::zero() {
                for x in 0..nx {
                    out[y * nx + x] = pxy[x * ny + y] / py[y];
                }
            }
        }
        out
    }

    /// Crossover `P(X ≠ y | Y = y)` when `X` given `Y` is a binary
    /// symmetric channel; `None` for any other conditional structure.
    pub fn crossover_x_given_y(&self) -> Option<T> {
        if self.sizes.x != 2 || self.sizes.y != 2 {
            return None;
        }
        let cond = self.conditional_x_given_y();
        let py = self.marginal_y();
        if py.iter().any(|&v| v == T::zero()) {
            return None;
        }
        let a = cond[1]; // P(x=1 | y=0)
        let b = cond[2]; // P(x=0 | y=1)
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        if (a - b).abs() <= tol && a <= T::lit(0.5) {
            Some(a)
        } else {
            None
        }
    }

    fn for_each_cell(&self, mut f: impl FnMut(usize, usize, usize, T)) {
        let AlphabetSizes {
            x: nx,
            y: ny,
            z: nz,
        } = self.sizes;
        let mut i = 0;
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    f(x, y, z, self.pmf[i]);
                    i += 1;
                }
            }
        }
    }
}

/// Convenience wrapper around [`JointSource::bsc_chain`].
pub fn bsc_chain<T: Real>(params: BscChainParams<T>) -> JointSource<T> {
    JointSource::bsc_chain(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(p: f64, q: f64) -> JointSource {
        bsc_chain(BscChainParams::new(p, q).unwrap())
    }

    #[test]
    fn rejects_negative_probability() {
        let mut pmf = vec![0.125; 8];
        pmf[0] = -0.1;
        pmf[1] = 0.35;
        let err = JointSource::new(AlphabetSizes::new(2, 2, 2), pmf).unwrap_err();
        assert!(matches!(
            err,
            SourceError::NegativeProbability { index: 0, .. }
        ));
        assert!(err.to_string().contains("negative probability"));
    }

    #[test]
    fn rejects_unnormalized_and_bad_dims() {
        let err = JointSource::new(AlphabetSizes::new(2, 2, 2), vec![0.1; 8]).unwrap_err();
        assert!(matches!(err, SourceError::NotNormalized { .. }));
        let err = JointSource::new(AlphabetSizes::new(2, 2, 2), vec![0.25; 4]).unwrap_err();
        assert!(matches!(
            err,
            SourceError::Dimensions {
                expected: 8,
                found: 4
            }
        ));
        let err = JointSource::<f64>::new(AlphabetSizes::new(0, 2, 2), vec![]).unwrap_err();
        assert!(matches!(err, SourceError::EmptyAlphabet(_)));
    }

    #[test]
    fn bsc_params_domain() {
        assert!(BscChainParams::new(0.6, 0.1).is_err());
        assert!(BscChainParams::new(0.1, -0.01).is_err());
        assert!(BscChainParams::new(f64::NAN, 0.1).is_err());
        assert!(BscChainParams::new(0.5, 0.0).is_ok());
    }

    #[test]
    fn bsc_chain_is_markov() {
        for &(p, q) in &[(0.02, 0.15), (0.1, 0.3), (0.0, 0.5), (0.5, 0.25)] {
            let src = chain(p, q);
            let pxy = src.joint_xy();
            let pyz = src.joint_yz();
            let py = src.marginal_y();
            for x in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let lhs = src.p(x, y, z) * py[y];
                        let rhs = pxy[x * 2 + y] * pyz[y * 2 + z];
                        assert!((lhs - rhs).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn crossover_detection() {
        assert_eq!(chain(0.02, 0.15).crossover_x_given_y(), Some(0.02));
        let skewed =
            JointSource::new(AlphabetSizes::new(2, 2, 1), vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        assert_eq!(skewed.crossover_x_given_y(), None);
    }

    #[test]
    fn unused_symbols() {
        let src = JointSource::new(AlphabetSizes::new(3, 1, 1), vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(src.unused_x(), vec![1]);
    }

    #[test]
    fn labels_must_match() {
        let src = chain(0.1, 0.1);
        let bad = Labels {
            x: vec!["a".into()],
            y: vec!["0".into(), "1".into()],
            z: vec!["0".into(), "1".into()],
        };
        assert!(matches!(
            src.with_labels(bad),
            Err(SourceError::Labels { axis: 'x', .. })
        ));
    }
}
