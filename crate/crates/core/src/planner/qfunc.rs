//! Gaussian tail `Q(x) = P(N(0,1) > x)` and its inverse.

use super::PlanError;
use crate::scalar::Real;

pub fn qfunc<T: Real>(x: T) -> T {
    T::lit(0.5) * (x / T::lit(std::f64::consts::SQRT_2)).erfc()
}

fn q64(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Acklam's rational approximation to the lower normal quantile `Φ⁻¹(p)`,
/// good to about 1e-9 relative before refinement.
#[allow(clippy::excessive_precision)]
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const LOW: f64 = 0.02425;
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// `Q⁻¹(p)` for `0 < p < 1`.
pub fn qfunc_inv<T: Real>(p: T) -> Result<T, PlanError> {
    let p64 = p.f64();
    if !(p64 > 0.0 && p64 < 1.0) {
        return Err(PlanError::Domain {
            what: "tail probability",
            value: p64,
        });
    }
    Ok(T::lit(qinv64(p64)))
}

fn qinv64(p: f64) -> f64 {
    if p > 0.5 {
        return -qinv64(1.0 - p);
    }
    let mut x = -acklam(p);
    for _ in 0..3 {
        let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if phi == 0.0 {
            break;
        }
        // Newton on Q(x) − p, with Q' = −φ.
        let step = (q64(x) - p) / phi;
        x += step;
        if step.abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Composite Simpson integral of the standard normal density on [a, b].
    fn simpson_tail(a: f64, b: f64, steps: usize) -> f64 {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let h = (b - a) / steps as f64;
        let mut acc = phi(a) + phi(b);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * phi(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn median_is_zero() {
        assert_eq!(qfunc_inv(0.5f64).unwrap(), 0.0);
        assert!((qfunc(0.0f64) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn five_percent_point_against_quadrature() {
        let x = qfunc_inv(0.05f64).unwrap();
        assert!((x - 1.6449).abs() < 1e-4, "{x}");
        let tail = simpson_tail(x, 40.0, 400_000);
        assert!((tail - 0.05).abs() < 1e-10, "{tail}");
    }

    #[test]
    fn qfunc_matches_quadrature() {
        for x in [-2.0, -0.3, 0.0, 0.7, 1.5, 3.0, 5.0] {
            let tail = simpson_tail(x, 40.0, 400_000);
            assert!((qfunc(x) - tail).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let p: f64 = rng.random_range(1e-6..1.0 - 1e-6);
            let x = qfunc_inv(p).unwrap();
            assert!((qfunc(x) - p).abs() < 1e-9, "p={p}");
        }
        for p in [1e-12, 1e-30, 0.999_999_9] {
            let x = qfunc_inv(p).unwrap();
            assert!(((qfunc::<f64>(x) - p) / p).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn domain() {
        assert!(qfunc_inv(0.0f64).is_err());
        assert!(qfunc_inv(1.0f64).is_err());
        assert!(qfunc_inv(f64::NAN).is_err());
        assert!((qfunc_inv(0.05f32).unwrap() - 1.644_853_6).abs() < 1e-5);
    }
}
