//! Goodness-of-fit statistics used to validate the samplers.
//!
//! The Kolmogorov distribution is not provided by `statrs`, so its asymptotic
//! series is evaluated here; χ² tail probabilities come from `statrs`.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided Kolmogorov–Smirnov statistic `sup |F_n − F|` of `samples`
/// (sorted in place) against the continuous CDF `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Asymptotic p-value of the KS statistic `d` for `n` samples,
/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)` with the small-sample correction
/// `λ = (√n + 0.12 + 0.11/√n)·d`.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// KS p-value of `samples` against `cdf`.
pub fn ks_test(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = samples.len();
    ks_p_value(ks_statistic(samples, cdf), n)
}

/// Pearson χ² p-value of observed bin counts against expected bin probabilities.
pub fn chi_square_test(observed: &[u64], probabilities: &[f64]) -> f64 {
    assert_eq!(observed.len(), probabilities.len());
    let n: u64 = observed.iter().sum();
    let total_p: f64 = probabilities.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probabilities)
        .map(|(&o, &p)| {
            let e = n as f64 * p / total_p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

/// χ² p-value of `samples` binned on the CDF's equiprobable-in-`x` grid
/// `lo + (hi − lo)·i/bins`.
pub fn chi_square_binned(samples: &[f64], lo: f64, hi: f64, bins: usize, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut counts = vec![0u64; bins];
    let width = (hi - lo) / bins as f64;
    for &x in samples {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let probs: Vec<f64> =
        (0..bins).map(|i| cdf(lo + width * (i + 1) as f64) - cdf(lo + width * i as f64)).collect();
    chi_square_test(&counts, &probs)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Tabulated CDF of an unnormalized density on `[a, b]`, built by Simpson
/// integration over `panels` cells and linear interpolation between them.
pub struct TabulatedCdf {
    a: f64,
    h: f64,
    values: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(density: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> Self {
        let h = (b - a) / panels as f64;
        let mut values = Vec::with_capacity(panels + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for i in 0..panels {
            let x0 = a + h * i as f64;
            acc += simpson(&density, x0, x0 + h, 8);
            values.push(acc);
        }
        for v in &mut values {
            *v /= acc;
        }
        Self { a, h, values }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let t = (x - self.a) / self.h;
        if t <= 0.0 {
            return 0.0;
        }
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return 1.0;
        }
        let f = t - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}
