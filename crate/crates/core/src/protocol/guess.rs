//! Bob's list of guesses `T(X^n|y^n) = {x : −log P(x|y^n) ≤ λ}`.

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::scalar::Real;
use crate::source_model::JointSource;

/// How the guess set is enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    /// Hamming ball for binary symmetric `X|Y`, otherwise branch-and-bound.
    #[default]
    Auto,
    /// Hamming ball around `y^n` by increasing weight; binary symmetric only.
    Ball,
    /// Depth-first branch-and-bound over per-position sorted costs.
    General,
    /// Every vector in `X^n`, filtered by cost.
    Exhaustive,
}

impl std::str::FromStr for Decoder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "auto" => Decoder::Auto,
            "ball" => Decoder::Ball,
            "general" => Decoder::General,
            "exhaustive" => Decoder::Exhaustive,
            other => return Err(format!("unknown decoder {other:?}")),
        })
    }
}

/// Slack added to `λ` so that vectors whose cost equals `λ` in exact
/// arithmetic are not lost to rounding.
pub fn lambda_tolerance(lambda: f64) -> f64 {
    1e-9 * lambda.abs().max(1.0)
}

/// `−log P(x|y)` per symbol pair, `+∞` for impossible pairs.
#[derive(Debug, Clone)]
pub(crate) struct CostTable {
    nx: usize,
    costs: Vec<f64>,
}

impl CostTable {
    pub(crate) fn new<T: Real>(src: &JointSource<T>) -> Self {
        let nx = src.sizes().x;
        let costs = src
            .conditional_x_given_y()
            .into_iter()
            .map(|p| {
                let p = p.f64();
                if p > 0.0 {
                    -p.log2()
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        CostTable { nx, costs }
    }

    pub(crate) fn cost(&self, x: usize, y: usize) -> f64 {
        self.costs[y * self.nx + x]
    }

    pub(crate) fn total(&self, xs: &[usize], ys: &[usize]) -> f64 {
        xs.iter().zip(ys).map(|(&x, &y)| self.cost(x, y)).sum()
    }
}

/// `−log P_{X^n|Y^n}(x^n|y^n)` in bits.
pub fn conditional_log_loss<T: Real>(src: &JointSource<T>, xs: &[usize], ys: &[usize]) -> f64 {
    CostTable::new(src).total(xs, ys)
}

fn binomial_sat(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

enum State {
    Ball {
        y: Vec<usize>,
        radius: usize,
        weight: usize,
        /// Flip positions of the current pattern, increasing; `None` before
        /// the first pattern of this weight.
        flips: Option<Vec<usize>>,
    },
    General {
        /// Per position: `(cost, symbol)` ascending, finite costs only.
        cols: Vec<Vec<(f64, usize)>>,
        /// `suffix[i]` = Σ_{j ≥ i} min cost at `j`.
        suffix: Vec<f64>,
        idx: Vec<usize>,
        partial: Vec<f64>,
        depth: usize,
    },
    Exhaustive {
        y: Vec<usize>,
        costs: CostTable,
        current: Vec<usize>,
        started: bool,
    },
    Done,
}

/// Iterator over the guess set. Items are `Err` only when the enumeration
/// budget is exhausted.
pub struct GuessSet {
    state: State,
    threshold: f64,
    nx: usize,
    budget: u64,
    yielded: u64,
}

impl GuessSet {
    /// Enumerates `{x : −log P(x|y) ≤ λ}` with the chosen decoder.
    ///
    /// Fails up front when the set is known to exceed `budget`, when `y`
    /// contains a symbol of zero probability, or when [`Decoder::Ball`] is
    /// requested for a source that is not binary symmetric.
    pub fn new<T: Real>(
        y: &[usize],
        lambda: f64,
        src: &JointSource<T>,
        decoder: Decoder,
        budget: u64,
    ) -> Result<Self, ProtocolError> {
        let n = y.len();
        if n == 0 {
            return Err(ProtocolError::Dimensions {
                what: "y^n",
                expected: 1,
                found: 0,
            });
        }
        let sizes = src.sizes();
        let py = src.marginal_y();
        for (i, &s) in y.iter().enumerate() {
            if s >= sizes.y {
                return Err(ProtocolError::Symbol {
                    index: i,
                    symbol: s,
                    alphabet: sizes.y,
                });
            }
            if py[s] <= T::zero() {
                return Err(ProtocolError::ImpossibleObservation { index: i });
            }
        }
        let threshold = lambda + lambda_tolerance(lambda);
        let costs = CostTable::new(src);
        let crossover = src.crossover_x_given_y().map(|p| p.f64());
        let decoder = match decoder {
            Decoder::Auto if crossover.is_some() => Decoder::Ball,
            Decoder::Auto => Decoder::General,
            d => d,
        };
        let state = match decoder {
            Decoder::Ball => {
                if crossover.is_none() {
                    return Err(ProtocolError::Decoder(
                        "ball decoder needs a binary symmetric X|Y".into(),
                    ));
                }
                // Weight-d cost is d·c(flip) + (n−d)·c(keep); take the largest d
                // within the threshold. Costs are read from the same table the
                // other decoders use.
                let keep = costs.cost(0, 0);
                let flip = costs.cost(1, 0);
                let within = |d: usize| {
                    let c = if d == 0 { 0.0 } else { d as f64 * flip }
                        + if d == n { 0.0 } else { (n - d) as f64 * keep };
                    c <= threshold
                };
                let mut radius: Option<usize> = None;
                if keep <= flip {
                    for d in 0..=n {
                        if within(d) {
                            radius = Some(d);
                        } else {
                            break;
                        }
                    }
                } else {
                    return Err(ProtocolError::Decoder(
                        "ball decoder needs crossover below 1/2".into(),
                    ));
                }
                match radius {
                    None => State::Done,
                    Some(radius) => {
                        let size: u128 = (0..=radius)
                            .map(|d| binomial_sat(n as u64, d as u64))
                            .fold(0u128, |a, b| a.saturating_add(b));
                        if size > budget as u128 {
                            return Err(ProtocolError::Budget {
                                estimated: size,
                                budget,
                            });
                        }
                        State::Ball {
                            y: y.to_vec(),
                            radius,
                            weight: 0,
                            flips: None,
                        }
                    }
                }
            }
            Decoder::General => {
                let cols: Vec<Vec<(f64, usize)>> = y
                    .iter()
                    .map(|&ys| {
                        let mut col: Vec<(f64, usize)> = (0..sizes.x)
                            .map(|x| (costs.cost(x, ys), x))
                            .filter(|(c, _)| c.is_finite())
                            .collect();
                        col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                        col
                    })
                    .collect();
                let mut suffix = vec![0.0; n + 1];
                for i in (0..n).rev() {
                    suffix[i] = suffix[i + 1] + cols[i][0].0;
                }
                if suffix[0] > threshold {
                    State::Done
                } else {
                    State::General {
                        cols,
                        suffix,
                        idx: vec![0; n],
                        partial: vec![0.0; n + 1],
                        depth: 0,
                    }
                }
            }
            Decoder::Exhaustive => {
                let total = (sizes.x as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
                if total > budget as u128 {
                    return Err(ProtocolError::Budget {
                        estimated: total,
                        budget,
                    });
                }
                State::Exhaustive {
                    y: y.to_vec(),
                    costs,
                    current: vec![0; n],
                    started: false,
                }
            }
            Decoder::Auto => unreachable!("resolved above"),
        };
        Ok(GuessSet {
            state,
            threshold,
            nx: sizes.x,
            budget,
            yielded: 0,
        })
    }

    fn advance(&mut self) -> Option<Vec<usize>> {
        let threshold = self.threshold;
        let nx = self.nx;
        match &mut self.state {
            State::Done => None,
            State::Ball {
                y,
                radius,
                weight,
                flips,
            } => {
                let n = y.len();
                loop {
                    match flips {
                        None => {
                            *flips = Some((0..*weight).collect());
                        }
                        Some(f) => {
                            // Next combination of `weight` positions out of n.
                            let k = f.len();
                            let mut i = k;
                            let mut moved = false;
                            while i > 0 {
                                i -= 1;
                                if f[i] < n - k + i {
                                    f[i] += 1;
                                    for j in i + 1..k {
                                        f[j] = f[j - 1] + 1;
                                    }
                                    moved = true;
                                    break;
                                }
                            }
                            if !moved {
                                *weight += 1;
                                if *weight > *radius {
                                    self.state = State::Done;
                                    return None;
                                }
                                *flips = None;
                                continue;
                            }
                        }
                    }
                    let mut x = y.clone();
                    for &i in flips.as_ref().expect("set above") {
                        x[i] ^= 1;
                    }
                    return Some(x);
                }
            }
            State::General {
                cols,
                suffix,
                idx,
                partial,
                depth,
            } => {
                let n = cols.len();
                loop {
                    let d = *depth;
                    if d == n {
                        let x = (0..n).map(|i| cols[i][idx[i]].1).collect();
                        *depth = n - 1;
                        idx[n - 1] += 1;
                        return Some(x);
                    }
                    let ok = idx[d] < cols[d].len()
                        && partial[d] + cols[d][idx[d]].0 + suffix[d + 1] <= threshold;
                    if ok {
                        partial[d + 1] = partial[d] + cols[d][idx[d]].0;
                        *depth = d + 1;
                        if d + 1 < n {
                            idx[d + 1] = 0;
                        }
                    } else {
                        // Columns are sorted, so later symbols at `d` fail too.
                        if d == 0 {
                            self.state = State::Done;
                            return None;
                        }
                        *depth = d - 1;
                        idx[d - 1] += 1;
                    }
                }
            }
            State::Exhaustive {
                y,
                costs,
                current,
                started,
            } => loop {
                if *started {
                    let mut i = current.len();
                    loop {
                        if i == 0 {
                            self.state = State::Done;
                            return None;
                        }
                        i -= 1;
                        current[i] += 1;
                        if current[i] < nx {
                            break;
                        }
                        current[i] = 0;
                    }
                }
                *started = true;
                if costs.total(current, y) <= threshold {
                    return Some(current.clone());
                }
            },
        }
    }
}

impl Iterator for GuessSet {
    type Item = Result<Vec<usize>, ProtocolError>;

    fn next(&mut self) -> Option<Self::Item> {
        let x = self.advance()?;
        self.yielded += 1;
        if self.yielded > self.budget {
            self.state = State::Done;
            return Some(Err(ProtocolError::Budget {
                estimated: self.yielded as u128,
                budget: self.budget,
            }));
        }
        Some(Ok(x))
    }
}
