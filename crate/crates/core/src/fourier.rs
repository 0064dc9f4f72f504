//! Discrete Fourier transform wrapper with continuum normalisation.
//!
//! Convention: g_hat(xi) = int g(x) e^{-2 pi i x xi} dx, approximated by the
//! zero-padded DFT scaled by the grid spacing. Frequencies follow the signed
//! DFT layout xi_k = k / L for k < n/2 and (k - n) / L above, so Parseval
//! reads sum |g_hat|^2 dxi = int |g|^2 dx with no extra constants.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Complex spectrum samples of a real signal on a padded frequency grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub d_xi: f64,
    pub bins: Vec<Complex64>,
}

impl Spectrum {
    #[inline]
    pub fn xi(&self, k: usize) -> f64 {
        let n = self.bins.len();
        if k <= n / 2 {
            k as f64 * self.d_xi
        } else {
            (k as f64 - n as f64) * self.d_xi
        }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// Transform samples (assumed to decay to zero at both ends of the grid),
/// zero-padded to at least four times the support and to `min_len` bins.
pub fn transform(samples: &[f64], grid: &Grid1D, min_len: usize) -> Spectrum {
    assert_eq!(samples.len(), grid.n);
    let h = grid.spacing();
    let n_pad = next_pow2((4 * samples.len()).max(min_len).max(16));
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n_pad)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n_pad).process(&mut buf);
    let d_xi = 1.0 / (n_pad as f64 * h);
    // continuum scaling + phase anchoring the first sample at x_min
    let x0 = grid.x_min;
    for (k, b) in buf.iter_mut().enumerate() {
        let xi = if k <= n_pad / 2 {
            k as f64 * d_xi
        } else {
            (k as f64 - n_pad as f64) * d_xi
        };
        let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * x0 * xi);
        *b = *b * h * phase;
    }
    Spectrum { d_xi, bins: buf }
}

/// |g_hat(xi)|^2 sampled on the padded frequency grid, components summed.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    pub d_xi: f64,
    pub vals: Vec<f64>,
}

impl SpectralDensity {
    #[inline]
    pub fn xi(&self, k: usize) -> f64 {
        let n = self.vals.len();
        if k <= n / 2 {
            k as f64 * self.d_xi
        } else {
            (k as f64 - n as f64) * self.d_xi
        }
    }

    /// sum |g_hat|^2 dxi over all bins (Parseval partner of int |g|^2 dx).
    pub fn total_power(&self) -> f64 {
        self.vals.iter().sum::<f64>() * self.d_xi
    }

    /// sum w(|xi|) |g_hat|^2 dxi over bins with xi != 0.
    pub fn weighted_power(&self, w: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.vals.len() {
            let xi = self.xi(k);
            if xi != 0.0 {
                acc += w(xi.abs()) * self.vals[k];
            }
        }
        acc * self.d_xi
    }

    /// L^2 masses over dyadic annuli 2^j <= |xi| < 2^{j+1}, optionally with a
    /// multiplicative weight; returns (j, mass) for blocks with any content.
    pub fn dyadic_masses(&self, w: impl Fn(f64) -> f64) -> Vec<(i32, f64)> {
        let mut blocks: std::collections::BTreeMap<i32, f64> = std::collections::BTreeMap::new();
        for k in 0..self.vals.len() {
            let xi = self.xi(k).abs();
            if xi == 0.0 {
                continue;
            }
            let j = xi.log2().floor() as i32;
            *blocks.entry(j).or_insert(0.0) += w(xi) * self.vals[k] * self.d_xi;
        }
        blocks.into_iter().collect()
    }
}

/// Maximum deviation from the tail constant over the outer `frac` of the grid.
fn tail_size(samples: &[f64], tail_const: f64, frac: f64) -> f64 {
    let k = ((samples.len() as f64 * frac) as usize).max(2);
    samples[..k]
        .iter()
        .chain(samples[samples.len() - k..].iter())
        .fold(0.0f64, |m, &v| m.max((v - tail_const).abs()))
}

/// Spectral density of a compactly supported (after constant subtraction)
/// scalar or vector signal. The common tail constant is estimated from the
/// grid ends, verified, and subtracted before transforming.
pub fn dft_halfline_density(
    components: &[&[f64]],
    grid: &Grid1D,
    min_len: usize,
    tail_tol: f64,
) -> Result<SpectralDensity> {
    assert!(!components.is_empty());
    let mut density: Option<SpectralDensity> = None;
    for comp in components {
        assert_eq!(comp.len(), grid.n);
        let c0 = 0.5 * (comp[0] + comp[comp.len() - 1]);
        let tail = tail_size(comp, c0, 0.02);
        let scale = comp.iter().fold(0.0f64, |m, &v| m.max((v - c0).abs())).max(1e-300);
        if tail > tail_tol * scale.max(1.0) {
            return Err(Error::NonConstantTail { tail });
        }
        let shifted: Vec<f64> = comp.iter().map(|&v| v - c0).collect();
        let spec = transform(&shifted, grid, min_len);
        match &mut density {
            None => {
                density = Some(SpectralDensity {
                    d_xi: spec.d_xi,
                    vals: spec.bins.iter().map(|b| b.norm_sqr()).collect(),
                })
            }
            Some(d) => {
                for (v, b) in d.vals.iter_mut().zip(spec.bins.iter()) {
                    *v += b.norm_sqr();
                }
            }
        }
    }
    Ok(density.unwrap())
}
