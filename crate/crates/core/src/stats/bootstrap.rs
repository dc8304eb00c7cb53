use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const DEFAULT_RESAMPLES: usize = 2000;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    Bca,
    Percentile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BootstrapResult {
    pub diff: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bias: f64,
    pub se: f64,
    pub n: usize,
    pub significant: bool,
    pub method: CiMethod,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn resample_mean(xs: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let mut s = 0.0;
    for _ in 0..xs.len() {
        s += xs[rng.random_range(0..xs.len())];
    }
    s / xs.len() as f64
}

/// Linear interpolation between order statistics.
pub(crate) fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Acceleration from the empirical influence values of the difference of
/// means. `None` when every influence value is zero.
fn acceleration(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let u = a.iter().map(|x| (x - ma) / na).chain(b.iter().map(|x| -(x - mb) / nb));
    let (num, den) = u.fold((0.0, 0.0), |(n3, n2), u| (n3 + u * u * u, n2 + u * u));
    (den > 0.0).then(|| num / (6.0 * den.powf(1.5)))
}

/// Bootstrap the difference of means `mean(a) - mean(b)` at 95% confidence.
pub fn bootstrap_diff(a: &[f64], b: &[f64], n: usize, seed: u64) -> Result<BootstrapResult> {
    bootstrap_diff_level(a, b, n, seed, DEFAULT_CONFIDENCE)
}

/// As [`bootstrap_diff`] at an arbitrary two-sided confidence level.
///
/// Each group is resampled independently with replacement from a single
/// ChaCha8 stream seeded with `seed`. The interval is BCa, falling back to
/// the plain percentile interval when the bias correction or acceleration
/// is not finite.
pub fn bootstrap_diff_level(a: &[f64], b: &[f64], n: usize, seed: u64, level: f64) -> Result<BootstrapResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("both groups must be non-empty"));
    }
    if n == 0 {
        return Err(Error::invalid("resample count must be at least 1"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("confidence level {level} outside (0, 1)")));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let diff = mean(a) - mean(b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats: Vec<f64> = (0..n)
        .map(|_| {
            let ra = resample_mean(a, &mut rng);
            let rb = resample_mean(b, &mut rng);
            ra - rb
        })
        .collect();
    let boot_mean = mean(&stats);
    let bias = boot_mean - diff;
    let se = if n > 1 {
        (stats.iter().map(|s| (s - boot_mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    stats.sort_by(f64::total_cmp);

    let alpha = (1.0 - level) / 2.0;
    let normal = Normal::standard();
    let below = stats.iter().filter(|&&s| s < diff).count() as f64;
    let ties = stats.iter().filter(|&&s| s == diff).count() as f64;
    let z0 = normal.inverse_cdf((below + 0.5 * ties) / n as f64);
    let bca = acceleration(a, b).filter(|_| z0.is_finite() && se > 0.0).and_then(|acc| {
        let adjust = |z: f64| {
            let t = z0 + z;
            let d = 1.0 - acc * t;
            (d > 0.0).then(|| normal.cdf(z0 + t / d))
        };
        Some((adjust(normal.inverse_cdf(alpha))?, adjust(normal.inverse_cdf(1.0 - alpha))?))
    });
    let (method, (p_lo, p_hi)) = match bca {
        Some(ps) if ps.0.is_finite() && ps.1.is_finite() => (CiMethod::Bca, ps),
        _ => (CiMethod::Percentile, (alpha, 1.0 - alpha)),
    };
    let ci_low = quantile(&stats, p_lo);
    let ci_high = quantile(&stats, p_hi).max(ci_low);
    let significant = !(ci_low <= 0.0 && 0.0 <= ci_high);
    Ok(BootstrapResult { diff, ci_low, ci_high, bias, se, n, significant, method })
}
