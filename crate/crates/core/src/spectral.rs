//! Homogeneous Sobolev and Besov norms of slices, the explicit low-frequency
//! lower-bound integral, and the smoothed-step borderline demonstration.
//!
//! Conventions: g_hat(xi) = int g e^{-2 pi i x xi} dx; Hdot^s norm squared is
//! int |xi|^{2s} |g_hat|^2 dxi over both signs of xi with the DC bin dropped;
//! Besov blocks are sharp dyadic annuli 2^j <= |xi| < 2^{j+1} weighted 2^{j/2}
//! on the L^2 block mass. Constants are convention-bound; growth statements
//! are ratios and fits, which are not.

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::field::SphereSlice;
use crate::fourier::{dft_halfline_density, SpectralDensity};
use crate::grid::Grid1D;
use crate::profile::AsymptoticProfile;
use crate::quad::cumquad;

pub const TAIL_TOL: f64 = 1e-8;
/// Fixed window constants for the lower-bound integral: [K1/T, K2].
pub const KAPPA_1: f64 = 10.0;
pub const KAPPA_2: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct BlockNorm {
    pub j: i32,
    /// 2^{j/2} (int_{|xi| ~ 2^j} |g_hat|^2 dxi)^{1/2}
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct NormReport {
    pub t: f64,
    pub hdot_half: f64,
    pub besov: f64,
    pub blocks: Vec<BlockNorm>,
    pub lower_bound: Option<f64>,
}

/// Spectral density of (slice - e1), componentwise, padded so that the
/// frequency resolution satisfies d_xi <= 1 / (10 max(|t|, domain scale)).
fn slice_density(slice: &SphereSlice) -> Result<SpectralDensity> {
    let h = slice.grid.spacing();
    let t_scale = slice.time.abs().max(0.4 * (slice.grid.x_max - slice.grid.x_min));
    let min_len = ((10.0 * t_scale / h).ceil() as usize).max(16);
    let comps: Vec<Vec<f64>> = (0..slice.m).map(|c| slice.component(c)).collect();
    let refs: Vec<&[f64]> = comps.iter().map(|v| v.as_slice()).collect();
    dft_halfline_density(&refs, &slice.grid, min_len, TAIL_TOL)
}

/// Density of the spatial derivative of the slice (centered differences).
fn slice_derivative_density(slice: &SphereSlice) -> Result<SpectralDensity> {
    let h = slice.grid.spacing();
    let t_scale = slice.time.abs().max(0.4 * (slice.grid.x_max - slice.grid.x_min));
    let min_len = ((10.0 * t_scale / h).ceil() as usize).max(16);
    let deriv = slice.derivative();
    let refs: Vec<&[f64]> = deriv.iter().map(|v| v.as_slice()).collect();
    dft_halfline_density(&refs, &slice.grid, min_len, 1e-6)
}

/// Homogeneous Sobolev norm of order s in (-1, 1) of (slice - const).
/// s = 1/2 is evaluated as the Hdot^{-1/2} norm of the spatial derivative,
/// whose spectrum carries no DC mass.
pub fn sobolev_norm(slice: &SphereSlice, s: f64) -> Result<f64> {
    if !(-1.0 < s && s < 1.0) {
        return Err(Error::InvalidConfig(format!("Sobolev order s = {s} outside (-1, 1)")));
    }
    if (s - 0.5).abs() < 1e-12 {
        let d = slice_derivative_density(slice)?;
        Ok(d.weighted_power(|xi| 1.0 / xi).sqrt())
    } else {
        let d = slice_density(slice)?;
        Ok(d.weighted_power(|xi| xi.powf(2.0 * s)).sqrt())
    }
}

fn besov_from_density(d: &SpectralDensity) -> (f64, Vec<BlockNorm>) {
    let blocks: Vec<BlockNorm> = d
        .dyadic_masses(|_| 1.0)
        .into_iter()
        .map(|(j, mass)| BlockNorm {
            j,
            value: 2f64.powf(0.5 * j as f64) * mass.sqrt(),
        })
        .collect();
    (blocks.iter().map(|b| b.value).sum(), blocks)
}

/// Besov Bdot^{1/2,1}_2 norm of (slice - e1) with the per-block partials.
pub fn besov_norm(slice: &SphereSlice) -> Result<(f64, Vec<BlockNorm>)> {
    let d = slice_density(slice)?;
    Ok(besov_from_density(&d))
}

/// Frequency tables of the strip-profile derivative transforms A = (F')^hat
/// and B = (G')^hat on a uniform xi grid, for the phase-explicit route.
pub struct ProfileSpectra {
    pub m: usize,
    pub d_xi: f64,
    pub xi_max: f64,
    pub c: f64,
    /// a[c][k] = component c of A(k d_xi); same layout for b
    pub a: Vec<Vec<(f64, f64)>>,
    pub b: Vec<Vec<(f64, f64)>>,
}

impl ProfileSpectra {
    /// Direct Fourier sums of the strip derivatives, decimated to ~256
    /// samples per strip (their spectra die long before the table cap).
    pub fn build(p: &AsymptoticProfile) -> ProfileSpectra {
        let c = p.c;
        let mut dec = 1usize;
        while (p.n_samples() - 1) / dec > 256 && (p.n_samples() - 1) % (2 * dec) == 0 {
            dec *= 2;
        }
        let q = p.decimate(dec);
        let n = q.n_samples();
        let h = q.spacing;
        let m = q.m;
        // centered derivative of the strip profiles in s
        let deriv = |samples: &Vec<f64>| -> Vec<Vec<f64>> {
            (0..m)
                .map(|cc| {
                    let mut d = vec![0.0; n];
                    for i in 1..n - 1 {
                        d[i] = (samples[(i + 1) * m + cc] - samples[(i - 1) * m + cc]) / (2.0 * h);
                    }
                    d
                })
                .collect()
        };
        let fp = deriv(&q.f_samples);
        let gp = deriv(&q.g_samples);
        let d_xi = 1.0 / (512.0 * c);
        let xi_max = 48.0 / c;
        let n_tab = (xi_max / d_xi).ceil() as usize + 2;
        let table = |src: &Vec<Vec<f64>>| -> Vec<Vec<(f64, f64)>> {
            (0..m)
                .map(|cc| {
                    (0..n_tab)
                        .map(|k| {
                            let xi = k as f64 * d_xi;
                            let mut re = 0.0;
                            let mut im = 0.0;
                            for i in 0..n {
                                let s = -c + i as f64 * h;
                                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                                let (sn, cs) = (-2.0 * std::f64::consts::PI * s * xi).sin_cos();
                                re += w * src[cc][i] * cs;
                                im += w * src[cc][i] * sn;
                            }
                            (re * h, im * h)
                        })
                        .collect()
                })
                .collect()
        };
        ProfileSpectra { m, d_xi, xi_max, c, a: table(&fp), b: table(&gp) }
    }

    /// Linear interpolation of a table entry for xi >= 0.
    #[inline]
    fn interp(tab: &[(f64, f64)], d_xi: f64, xi: f64) -> (f64, f64) {
        let fk = xi / d_xi;
        let k = (fk.floor() as usize).min(tab.len() - 2);
        let w = fk - k as f64;
        (
            tab[k].0 * (1.0 - w) + tab[k + 1].0 * w,
            tab[k].1 * (1.0 - w) + tab[k + 1].1 * w,
        )
    }

    /// |phi_x_hat(xi)|^2 summed over components, for signed xi:
    /// |e^{2 pi i T xi} A(xi) - e^{-2 pi i T xi} B(-xi)|^2 with
    /// A(-xi) = conj A(xi) for the real strip derivatives.
    pub fn deriv_spectrum_sq(&self, t: f64, xi: f64) -> f64 {
        let th = 2.0 * std::f64::consts::PI * t * xi;
        let (sn, cs) = th.sin_cos();
        let ax = xi.abs();
        let mut total = 0.0;
        for c in 0..self.m {
            let (ar, ai_raw) = Self::interp(&self.a[c], self.d_xi, ax);
            let (br, bi_raw) = Self::interp(&self.b[c], self.d_xi, ax);
            let (ai, bi) = if xi >= 0.0 { (ai_raw, bi_raw) } else { (-ai_raw, -bi_raw) };
            // e^{i th} (ar + i ai) - e^{-i th} (br - i bi)   [B(-xi) = conj B(xi)]
            let re = cs * ar - sn * ai - (cs * br - sn * bi);
            let im = sn * ar + cs * ai + (sn * br + cs * bi);
            total += re * re + im * im;
        }
        total
    }
}

/// The explicit lower-bound integral over the window [K1/T, K2] (positive
/// frequencies), integrand |phi_x_hat|^2 / xi.
pub fn lower_bound_integral(p: &AsymptoticProfile, t: f64) -> Result<f64> {
    lower_bound_windowed(p, t, KAPPA_1, KAPPA_2)
}

pub fn lower_bound_windowed(p: &AsymptoticProfile, t: f64, k1: f64, k2: f64) -> Result<f64> {
    let spectra = ProfileSpectra::build(p);
    lower_bound_from_spectra(&spectra, t, k1, k2)
}

pub fn lower_bound_from_spectra(
    spectra: &ProfileSpectra,
    t: f64,
    k1: f64,
    k2: f64,
) -> Result<f64> {
    let lo = k1 / t;
    let hi = k2;
    if !(lo < hi) {
        return Err(Error::DegenerateWindow { lo, hi, t });
    }
    let d_xi = (1.0 / (20.0 * t)).min((hi - lo) / 64.0);
    let n = ((hi - lo) / d_xi).ceil() as usize;
    let d_xi = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for k in 0..=n {
        let xi = lo + k as f64 * d_xi;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        acc += w * spectra.deriv_spectrum_sq(t, xi) / xi;
    }
    Ok(acc * d_xi)
}

/// Norm report computed directly from the profile spectra (no slice is
/// materialised); cheap at any T, exact up to table interpolation.
pub fn profile_norm_report(p: &AsymptoticProfile, t: f64) -> Result<NormReport> {
    let spectra = ProfileSpectra::build(p);
    let xi_min = 1.0 / (10.0 * t);
    // beyond this the T-phase cross term between the separated strips is
    // spectrally negligible for the smooth profiles at hand
    let xi_cross = 6.0 / p.c;
    let xi_max = spectra.xi_max;

    let d_fine = 1.0 / (20.0 * t);
    let n_fine = ((xi_cross - xi_min) / d_fine).ceil() as usize;
    let d_fine = (xi_cross - xi_min) / n_fine as f64;
    let mut hdot2 = 0.0;
    let mut blocks: std::collections::BTreeMap<i32, f64> = std::collections::BTreeMap::new();
    for k in 0..=n_fine {
        let xi = xi_min + k as f64 * d_fine;
        let w = if k == 0 || k == n_fine { 0.5 } else { 1.0 };
        let dens = spectra.deriv_spectrum_sq(t, xi) + spectra.deriv_spectrum_sq(t, -xi);
        hdot2 += w * dens / xi * d_fine;
        let j = xi.log2().floor() as i32;
        *blocks.entry(j).or_insert(0.0) +=
            w * dens / (4.0 * std::f64::consts::PI.powi(2) * xi * xi) * d_fine;
    }
    // smooth tail with the cross term dropped (|A|^2 + |B|^2), coarse grid
    let d_tail = spectra.d_xi;
    let n_tail = ((xi_max - xi_cross) / d_tail).floor() as usize;
    for k in 1..=n_tail {
        let xi = xi_cross + k as f64 * d_tail;
        let w = if k == n_tail { 0.5 } else { 1.0 };
        let mut dens = 0.0;
        for c in 0..spectra.m {
            let (ar, ai) = ProfileSpectra::interp(&spectra.a[c], spectra.d_xi, xi);
            let (br, bi) = ProfileSpectra::interp(&spectra.b[c], spectra.d_xi, xi);
            dens += ar * ar + ai * ai + br * br + bi * bi;
        }
        dens *= 2.0; // both signs of xi
        hdot2 += w * dens / xi * d_tail;
        let j = xi.log2().floor() as i32;
        *blocks.entry(j).or_insert(0.0) +=
            w * dens / (4.0 * std::f64::consts::PI.powi(2) * xi * xi) * d_tail;
    }
    let blocks: Vec<BlockNorm> = blocks
        .into_iter()
        .map(|(j, mass)| BlockNorm { j, value: 2f64.powf(0.5 * j as f64) * mass.sqrt() })
        .collect();
    let besov = blocks.iter().map(|b| b.value).sum();
    let lower = lower_bound_from_spectra(&spectra, t, KAPPA_1, KAPPA_2).ok();
    Ok(NormReport { t, hdot_half: hdot2.sqrt(), besov, blocks, lower_bound: lower })
}

/// Norm report from a materialised slice (FFT route); the lower bound comes
/// from the profile spectra when a profile is supplied.
pub fn slice_norm_report(
    slice: &SphereSlice,
    profile: Option<&AsymptoticProfile>,
) -> Result<NormReport> {
    let hdot_half = sobolev_norm(slice, 0.5)?;
    let (besov, blocks) = besov_norm(slice)?;
    let lower = match profile {
        Some(p) => lower_bound_integral(p, slice.time.abs()).ok(),
        None => None,
    };
    Ok(NormReport { t: slice.time.abs(), hdot_half, besov, blocks, lower_bound: lower })
}

#[derive(Debug, Clone)]
pub struct HeavisideReport {
    /// int (h')^2, the step height
    pub mass: f64,
    /// per-block Besov partials of the step, lowest block first
    pub blocks: Vec<BlockNorm>,
    /// partial sums of the J lowest blocks, index J-1
    pub partial_sums: Vec<f64>,
    /// |w_hat(xi)| 2 pi |xi| / mass at a few low frequencies (-> 1)
    pub limit_ratio: Vec<(f64, f64)>,
    /// w sampled on the bump grid (running integral of (h')^2)
    pub w_samples: Vec<f64>,
}

/// The borderline smoothed step w = D^{-1}((Dh)^2) for a scalar bump
/// component h. Its transform is (Dh)^2-hat / (2 pi i xi); every
/// low-frequency dyadic block then contributes the same constant, so block
/// partial sums grow linearly in the block count while the square-function
/// stays bounded.
pub fn heaviside_demo(bump: &BumpProfile, comp: usize) -> Result<HeavisideReport> {
    let c = bump.half_width();
    let grid = Grid1D::symmetric(c, c / 256.0)?;
    let sq = |x: f64| bump.deriv(comp, 1, x).powi(2);
    let samples: Vec<f64> = grid.nodes().map(sq).collect();
    let mass = crate::quad::quad(sq, -c, c, 512)?;
    // pad far: blocks resolved down to xi ~ 2^-13 / C
    let dens = dft_halfline_density(&[&samples], &grid, 1 << 22, 1e-12)?;
    let w_blocks = dens.dyadic_masses(|xi| 1.0 / (4.0 * std::f64::consts::PI.powi(2) * xi * xi));
    let blocks: Vec<BlockNorm> = w_blocks
        .into_iter()
        .map(|(j, m)| BlockNorm { j, value: 2f64.powf(0.5 * j as f64) * m.sqrt() })
        .collect();
    let partial_sums: Vec<f64> = blocks
        .iter()
        .scan(0.0, |acc, b| {
            *acc += b.value;
            Some(*acc)
        })
        .collect();
    // |w_hat| 2 pi |xi| / mass = |(Dh)^2-hat| / mass -> 1 at the origin
    let mut limit_ratio = Vec::new();
    for k in [1usize, 2, 4, 8, 16] {
        let xi = k as f64 * dens.d_xi;
        let ratio = if mass > 0.0 { dens.vals[k].sqrt() / mass } else { 0.0 };
        limit_ratio.push((xi, ratio));
    }
    let w_samples = cumquad(&sq, -c, &grid)?;
    Ok(HeavisideReport { mass, blocks, partial_sums, limit_ratio, w_samples })
}
