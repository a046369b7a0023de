use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{JointSource, SourceError};
use crate::scalar::Real;

/// `n` IID draws of `(X, Y, Z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Samples {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

pub fn sample<T: Real>(
    src: &JointSource<T>,
    n: usize,
    rng_seed: u64,
) -> Result<Samples, SourceError> {
    if n == 0 {
        return Err(SourceError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let weights: Vec<f64> = src.pmf().iter().map(|v| v.f64()).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| SourceError::Parse(e.to_string()))?;
    let sizes = src.sizes();
    let mut out = Samples {
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let cell = dist.sample(&mut rng);
        out.z.push(cell % sizes.z);
        out.y.push((cell / sizes.z) % sizes.y);
        out.x.push(cell / (sizes.z * sizes.y));
    }
    Ok(out)
}
