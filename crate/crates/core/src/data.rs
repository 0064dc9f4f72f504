//! Construction of the small sphere-valued initial data from a bump profile.
//!
//! The data is the geodesic exponential of eps * h at e1. Its power series in
//! eps alternates between e1-parallel and h-parallel terms; the closed-form
//! resummation below is exactly sphere-valued, which the integrator relies on.

use crate::bump::{make_bump_pair, BumpProfile};
use crate::error::{Error, Result};
use crate::field::SphereSlice;
use crate::grid::Grid1D;

pub const EPS_MAX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    ClosedForm,
    /// Partial series sum through eps^N (leaves the sphere at O(eps^{N+1})).
    Series(usize),
}

#[derive(Debug, Clone)]
pub struct DataSpec {
    pub c: f64,
    pub eps: f64,
    pub m: usize,
    pub bump: BumpProfile,
    pub truncation: Truncation,
}

impl DataSpec {
    /// Canonical sphere data: m = 3 with the default (h2, h3) pair.
    pub fn canonical(c: f64, eps: f64) -> Result<Self> {
        let spec = DataSpec {
            c,
            eps,
            m: 3,
            bump: make_bump_pair(c)?,
            truncation: Truncation::ClosedForm,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Circle data: m = 2 with a single angle profile theta(x).
    pub fn circle(c: f64, eps: f64) -> Result<Self> {
        let spec = DataSpec {
            c,
            eps,
            m: 2,
            bump: crate::bump::circle_theta(c)?,
            truncation: Truncation::ClosedForm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || self.eps > EPS_MAX {
            return Err(Error::InvalidConfig(format!(
                "eps must lie in (0, {EPS_MAX}], got {}",
                self.eps
            )));
        }
        if self.m < 2 {
            return Err(Error::InvalidConfig(format!("target dimension m >= 2 required, got {}", self.m)));
        }
        if self.bump.target_dim() != self.m - 1 {
            return Err(Error::InvalidConfig(format!(
                "bump has {} components but m - 1 = {}",
                self.bump.target_dim(),
                self.m - 1
            )));
        }
        if self.m > 2 && self.bump.target_dim() < 2 {
            return Err(Error::InvalidConfig(
                "sphere targets with m > 2 need at least two bump components".into(),
            ));
        }
        if (self.c - self.bump.half_width()).abs() > 1e-12 * self.c {
            return Err(Error::InvalidConfig("bump half-width differs from C".into()));
        }
        Ok(())
    }
}

#[inline]
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z * z * z * z / 120.0
    } else {
        z.sin() / z
    }
}

/// Data value at a single point, exact closed form (unit norm by construction).
pub fn point_value(spec: &DataSpec, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; spec.m];
    let h = spec.bump.values(x);
    let r = h.iter().map(|v| v * v).sum::<f64>().sqrt();
    let z = spec.eps * r;
    out[0] = z.cos();
    let s = spec.eps * sinc(z);
    for c in 1..spec.m {
        out[c] = s * h[c - 1];
    }
    out
}

/// Partial series sum through eps^N with the even/odd resummation rule.
fn point_value_truncated(spec: &DataSpec, x: f64, n_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; spec.m];
    let h = spec.bump.values(x);
    let r = h.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut coeff_e1 = 0.0; // sum over even n of (-1)^{n/2} (eps r)^n / n!
    let mut coeff_h = 0.0; // sum over odd n of (-1)^{(n-1)/2} (eps r)^{n-1} eps / n!
    let mut fact = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            fact *= n as f64;
        }
        let zr = (spec.eps * r).powi(n as i32);
        if n % 2 == 0 {
            coeff_e1 += (if n % 4 == 0 { 1.0 } else { -1.0 }) * zr / fact;
        } else {
            let sign = if (n - 1) % 4 == 0 { 1.0 } else { -1.0 };
            // (eps r)^{n-1} * eps = zr / r when r > 0; handle r = 0 via n = 1 term
            let t = if r > 0.0 { zr / r } else if n == 1 { spec.eps } else { 0.0 };
            coeff_h += sign * t / fact;
        }
    }
    out[0] = coeff_e1;
    for c in 1..spec.m {
        out[c] = coeff_h * h[c - 1];
    }
    out
}

/// Sample the initial data on a grid. The grid must contain [-C, C].
pub fn build_initial_data(spec: &DataSpec, grid: &Grid1D) -> Result<SphereSlice> {
    spec.validate()?;
    if grid.x_min > -spec.c || grid.x_max < spec.c {
        return Err(Error::InvalidGrid(format!(
            "data grid [{}, {}] does not cover [-C, C] = [{}, {}]",
            grid.x_min, grid.x_max, -spec.c, spec.c
        )));
    }
    let mut slice = SphereSlice::constant_e1(*grid, spec.m, 0.0);
    for (i, x) in grid.nodes().enumerate() {
        let v = match spec.truncation {
            Truncation::ClosedForm => point_value(spec, x),
            Truncation::Series(n) => point_value_truncated(spec, x, n),
        };
        slice.node_mut(i).copy_from_slice(&v);
    }
    Ok(slice)
}

#[derive(Debug, Clone)]
pub struct SmallnessReport {
    pub max_deviation: f64,
    pub max_slope_scaled: f64,
    pub bump_value_scale: f64,
    pub bump_slope_scale: f64,
}

/// Verify the data is eps-small in C^0 and C^1 (slope scaled by C) and that
/// f - e1 is supported in [-C, C].
pub fn smallness_check(slice: &SphereSlice, spec: &DataSpec) -> Result<SmallnessReport> {
    let c = spec.c;
    let mut max_dev: f64 = 0.0;
    for (i, x) in slice.grid.nodes().enumerate() {
        let dev = slice.deviation_from_e1(i);
        if x.abs() > c + 0.5 * slice.grid.spacing() && dev > 1e-14 {
            return Err(Error::SupportLeak { x, deviation: dev });
        }
        max_dev = max_dev.max(dev);
    }
    let deriv = slice.derivative();
    let mut max_slope: f64 = 0.0;
    for i in 0..slice.grid.n {
        let s: f64 = deriv.iter().map(|d| d[i] * d[i]).sum::<f64>().sqrt();
        max_slope = max_slope.max(s);
    }
    let samples = 4096;
    let mut val_scale: f64 = 0.0;
    let mut slope_scale: f64 = 0.0;
    for i in 0..=samples {
        let x = -c + 2.0 * c * i as f64 / samples as f64;
        val_scale = val_scale.max(spec.bump.norm(x));
        let g: f64 = (0..spec.bump.target_dim())
            .map(|cc| spec.bump.deriv(cc, 1, x).powi(2))
            .sum::<f64>()
            .sqrt();
        slope_scale = slope_scale.max(g);
    }
    Ok(SmallnessReport {
        max_deviation: max_dev,
        max_slope_scaled: c * max_slope,
        bump_value_scale: val_scale,
        bump_slope_scale: c * slope_scale,
    })
}
