//! Goodness-of-fit checks of the samplers against independently written
//! target laws. Each check returns the p-values of its tests.

use std::f64::consts::PI;

use grisom::sampling::{Distribution, Sampler};

use super::stats::{chi_square_binned, ks_test, TabulatedCdf};

/// Number of χ² bins used throughout.
pub const BINS: usize = 100;

/// Significance level every check must clear.
pub const ALPHA: f64 = 0.01;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn draw(dist: Distribution, n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut sampler = Sampler::new(dist, seed).unwrap();
    let mut out = Vec::with_capacity(n);
    let mut x = [0.0; 3];
    for _ in 0..n {
        sampler.sample_into(&mut x).unwrap();
        out.push(x);
    }
    out
}

/// Radial density of the uniform measure on the slab of half-width `s` over
/// the disk of radius `big_r`: the area of the sphere of radius `r` lying
/// inside the slab, up to the constant 4π.
pub fn slab_density_oracle(big_r: f64, s: f64, r: f64) -> f64 {
    if r <= s {
        // Whole sphere inside the slab.
        return r.sinh().powi(2);
    }
    // Polar band |cos φ| ≤ sinh s / sinh r lies inside the slab; its
    // fraction of the sphere is sinh s / sinh r.
    let band = s.sinh() / r.sinh();
    if r <= big_r {
        return r.sinh().powi(2) * band;
    }
    // Beyond R the projection constraint cosh r / cosh h ≤ cosh R removes
    // the part |sinh h| < √(cosh² r / cosh² R − 1) of the band, where
    // sinh h = sinh r · cos φ.
    let cut = ((r.cosh() / big_r.cosh()).powi(2) - 1.0).max(0.0).sqrt() / r.sinh();
    (r.sinh().powi(2) * (band - cut)).max(0.0)
}

/// `(KS, χ²)` p-values of the hyperbolic radius of slab samples against the
/// slab's radial density.
pub fn slab_radial(n: usize, seed: u64) -> (f64, f64) {
    let (big_r, s) = (2.0f64, 1.0f64);
    let r_max = (s.cosh() * big_r.cosh()).acosh();
    let cdf = TabulatedCdf::new(|r| slab_density_oracle(big_r, s, r), 0.0, r_max, 20_000);
    let mut radii: Vec<f64> =
        draw(Distribution::hyp_slab(big_r, s).unwrap(), n, seed).iter().map(|x| 2.0 * norm(x).atanh()).collect();
    let chi = chi_square_binned(&radii, 0.0, r_max, BINS, |r| cdf.cdf(r));
    (ks_test(&mut radii, |r| cdf.cdf(r)), chi)
}

/// `(KS, χ²)` p-values of the Poincaré radius of samples falling inside the
/// hyperbolic ball of radius `s` (wholly contained in the slab) against the
/// ball's volume element `ρ² / (1 − ρ²)³`. Draws until `n` such samples exist.
pub fn ball_shell(n: usize, seed: u64) -> (f64, f64) {
    let s = 1.0f64;
    let rho_max = (0.5 * s).tanh();
    let mut sampler = Sampler::new(Distribution::hyp_slab(s, s).unwrap(), seed).unwrap();
    let mut rho = Vec::with_capacity(n);
    let mut x = [0.0; 3];
    while rho.len() < n {
        sampler.sample_into(&mut x).unwrap();
        let r = norm(&x);
        if r <= rho_max {
            rho.push(r);
        }
    }
    let cdf = TabulatedCdf::new(|p| p * p / (1.0 - p * p).powi(3), 0.0, rho_max, 20_000);
    let chi = chi_square_binned(&rho, 0.0, rho_max, BINS, |p| cdf.cdf(p));
    (ks_test(&mut rho, |p| cdf.cdf(p)), chi)
}

/// `(KS, χ²)` p-values of the disk radius of disk × strip samples against
/// `F(r) = (cosh r − 1) / (cosh R − 1)`, plus the KS p-value of the strip
/// coordinate against the uniform law.
pub fn disk_radial(n: usize, seed: u64) -> (f64, f64, f64) {
    let (big_r, s) = (2.0f64, 0.5);
    let pts = draw(Distribution::hyp_disk_strip(big_r, s).unwrap(), n, seed);
    let cdf = |r: f64| (r.cosh() - 1.0) / (big_r.cosh() - 1.0);
    let mut radii: Vec<f64> = pts.iter().map(|x| 2.0 * x[0].hypot(x[1]).atanh()).collect();
    let chi = chi_square_binned(&radii, 0.0, big_r, BINS, cdf);
    let mut z: Vec<f64> = pts.iter().map(|x| x[2]).collect();
    let ks_z = ks_test(&mut z, |v| ((v + s) / (2.0 * s)).clamp(0.0, 1.0));
    (ks_test(&mut radii, cdf), chi, ks_z)
}

/// `(KS, χ²)` p-values of the azimuth `atan2(x₁, x₀)` of slab samples and of
/// disk × strip samples against the uniform law on `(−π, π]`.
pub fn azimuth(n: usize, seed: u64) -> [(f64, f64); 2] {
    let dists = [Distribution::hyp_slab(2.0, 1.0).unwrap(), Distribution::hyp_disk_strip(2.0, 0.5).unwrap()];
    let mut out = [(0.0, 0.0); 2];
    for (k, d) in dists.into_iter().enumerate() {
        let mut phi: Vec<f64> = draw(d, n, seed + k as u64).iter().map(|x| x[1].atan2(x[0])).collect();
        let cdf = |p: f64| ((p + PI) / (2.0 * PI)).clamp(0.0, 1.0);
        let chi = chi_square_binned(&phi, -PI, PI, BINS, cdf);
        out[k] = (ks_test(&mut phi, cdf), chi);
    }
    out
}
