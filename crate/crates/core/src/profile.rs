//! Asymptotic traveling-wave structure of slices beyond the interaction time.
//!
//! For t > C the field is e1 | F(t+x) | alpha | G(t-x) | e1 across five
//! regions. Extraction reads F, G off the two boundary strips and alpha off
//! the interior plateau; synthesis evaluates the five-piece formula at any
//! later time without further PDE work.

use crate::error::{Error, Result};
use crate::evolve::Evolution;
use crate::field::SphereSlice;
use crate::grid::Grid1D;

#[derive(Debug, Clone)]
pub struct AsymptoticProfile {
    pub c: f64,
    pub m: usize,
    pub spacing: f64,
    /// F sampled on s = -C..C (stride m); F(-C) = e1, F(C) = alpha
    pub f_samples: Vec<f64>,
    /// G sampled on s = -C..C (stride m); G(-C) = e1, G(C) = alpha
    pub g_samples: Vec<f64>,
    pub alpha: Vec<f64>,
    /// max deviation of the source slice from the five-piece formula
    pub residual: f64,
    /// extraction time
    pub t0: f64,
}

impl AsymptoticProfile {
    pub fn n_samples(&self) -> usize {
        self.f_samples.len() / self.m
    }

    pub fn f_at(&self, i: usize) -> &[f64] {
        &self.f_samples[i * self.m..(i + 1) * self.m]
    }

    pub fn g_at(&self, i: usize) -> &[f64] {
        &self.g_samples[i * self.m..(i + 1) * self.m]
    }

    /// |alpha - e1|
    pub fn alpha_deviation(&self) -> f64 {
        let mut s = (self.alpha[0] - 1.0).powi(2);
        for c in 1..self.m {
            s += self.alpha[c] * self.alpha[c];
        }
        s.sqrt()
    }

    /// Profile decimated by `k` (exact subsampling; k must divide the sample count).
    pub fn decimate(&self, k: usize) -> AsymptoticProfile {
        assert!(k >= 1 && (self.n_samples() - 1) % k == 0);
        let pick = |src: &Vec<f64>| -> Vec<f64> {
            (0..self.n_samples())
                .step_by(k)
                .flat_map(|i| src[i * self.m..(i + 1) * self.m].to_vec())
                .collect()
        };
        AsymptoticProfile {
            spacing: self.spacing * k as f64,
            f_samples: pick(&self.f_samples),
            g_samples: pick(&self.g_samples),
            ..self.clone()
        }
    }
}

/// Pointwise Richardson extrapolation of two profiles extracted at spacings
/// h (fine) and 2h (coarse) on nested grids; second-order error cancels.
pub fn richardson_profile(
    fine: &AsymptoticProfile,
    coarse: &AsymptoticProfile,
) -> AsymptoticProfile {
    assert_eq!(fine.m, coarse.m);
    assert!((coarse.spacing / fine.spacing - 2.0).abs() < 1e-9);
    let dec = fine.decimate(2);
    let comb = |a: &Vec<f64>, b: &Vec<f64>| -> Vec<f64> {
        a.iter().zip(b.iter()).map(|(x, y)| (4.0 * x - y) / 3.0).collect()
    };
    let mut alpha = comb(&dec.alpha, &coarse.alpha);
    let r: f64 = alpha.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in alpha.iter_mut() {
        *v /= r;
    }
    AsymptoticProfile {
        f_samples: comb(&dec.f_samples, &coarse.f_samples),
        g_samples: comb(&dec.g_samples, &coarse.g_samples),
        alpha,
        residual: fine.residual.max(coarse.residual),
        ..dec
    }
}

/// Interior-plateau average of a slice, renormalised onto the sphere.
/// The averaging window is inset C/2 from the strip edges at |x| = t - C.
pub fn extract_alpha(slice: &SphereSlice, c: f64) -> Result<Vec<f64>> {
    let t = slice.time.abs();
    if t < 2.0 * c - 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "interior plateau needs t >= 2C (t = {t}, C = {c})"
        )));
    }
    let cut = t - 1.5 * c;
    let mut acc = vec![0.0; slice.m];
    let mut count = 0usize;
    for (i, x) in slice.grid.nodes().enumerate() {
        if x.abs() <= cut + 1e-12 {
            for (a, v) in acc.iter_mut().zip(slice.node(i)) {
                *a += v;
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InvalidConfig("empty interior averaging window".into()));
    }
    let r: f64 = acc.iter().map(|v| (v / count as f64).powi(2)).sum::<f64>().sqrt();
    Ok(acc.iter().map(|v| v / count as f64 / r).collect())
}

/// Extract (F, G, alpha) from a slice at time T0 >= 2C. `tol_scale`
/// multiplies the default residual tolerance 10 h^2.
pub fn extract_profile(slice: &SphereSlice, c: f64, tol_scale: f64) -> Result<AsymptoticProfile> {
    let t0 = slice.time.abs();
    if t0 < 2.0 * c - 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "strips are separated only for t >= 2C (t = {t0}, C = {c})"
        )));
    }
    let h = slice.grid.spacing();
    let m = slice.m;
    let n_s = (2.0 * c / h).round() as usize + 1;
    let idx = |x: f64| -> Result<usize> {
        slice.grid.index_of(x).ok_or_else(|| {
            Error::InvalidGrid(format!("profile sample point x = {x} is off the slice grid"))
        })
    };
    let mut f_samples = Vec::with_capacity(n_s * m);
    let mut g_samples = Vec::with_capacity(n_s * m);
    for i in 0..n_s {
        let s = -c + i as f64 * h;
        f_samples.extend_from_slice(slice.node(idx(s - t0)?));
        g_samples.extend_from_slice(slice.node(idx(t0 - s)?));
    }
    let alpha = extract_alpha(slice, c)?;

    let prof = AsymptoticProfile {
        c,
        m,
        spacing: h,
        f_samples,
        g_samples,
        alpha,
        residual: 0.0,
        t0: slice.time,
    };
    // residual against the five-piece description built from the extraction
    let mut worst: f64 = 0.0;
    for (i, x) in slice.grid.nodes().enumerate() {
        let model = five_piece(&prof, t0, x);
        let d: f64 = slice
            .node(i)
            .iter()
            .zip(model.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(d);
    }
    let tol = 10.0 * h * h * tol_scale;
    if worst > tol {
        return Err(Error::ProfileResidual { residual: worst, tol });
    }
    Ok(AsymptoticProfile { residual: worst, ..prof })
}

/// Five-piece evaluation at (t, x); strip lookups snap to the nearest
/// profile sample (exact when t and x live on the profile lattice).
fn five_piece(p: &AsymptoticProfile, t: f64, x: f64) -> Vec<f64> {
    let c = p.c;
    let m = p.m;
    let mut e1 = vec![0.0; m];
    e1[0] = 1.0;
    let at = |samples: &Vec<f64>, s: f64| -> Vec<f64> {
        let i = ((s + c) / p.spacing).round().clamp(0.0, (p.n_samples() - 1) as f64) as usize;
        samples[i * m..(i + 1) * m].to_vec()
    };
    if x <= -t - c {
        e1
    } else if x <= -t + c {
        at(&p.f_samples, t + x)
    } else if x <= t - c {
        p.alpha.clone()
    } else if x <= t + c {
        at(&p.g_samples, t - x)
    } else {
        e1
    }
}

/// Evaluate the five-piece formula on a grid covering [-T-C-pad, T+C+pad].
/// T and pad are rounded to multiples of the profile spacing so the strip
/// lookups copy samples exactly.
pub fn synthesize_slice(p: &AsymptoticProfile, t: f64, pad: f64) -> Result<SphereSlice> {
    if t <= p.c {
        return Err(Error::InvalidConfig(format!(
            "synthesis needs T > C (T = {t}, C = {})",
            p.c
        )));
    }
    let h = p.spacing;
    let t_r = (t / h).round() * h;
    let half = t_r + p.c + pad.max(0.5 * p.c);
    let grid = Grid1D::symmetric(half, h)?;
    let mut values = Vec::with_capacity(grid.n * p.m);
    for x in grid.nodes() {
        values.extend_from_slice(&five_piece(p, t_r, x));
    }
    Ok(SphereSlice::from_values(grid, p.m, t_r, values))
}

#[derive(Debug, Clone)]
pub struct FlatnessReport {
    /// max |(d_x + d_t) phi| over |t + x| >= C + margin
    pub outgoing: f64,
    /// max |(d_x - d_t) phi| over |t - x| >= C + margin
    pub incoming: f64,
    /// max deviation from alpha over the interior t > |x| + C region
    pub interior: f64,
}

/// Verify the flatness conditions and the interior constancy on the stored
/// slices of an evolution.
pub fn consistency_check(ev: &Evolution, alpha: &[f64]) -> FlatnessReport {
    let margin = 2.0 * ev.h_step;
    let mut rep = FlatnessReport { outgoing: 0.0, incoming: 0.0, interior: 0.0 };
    for (s, slope) in ev.slices.iter().zip(ev.slopes.iter()) {
        let t = s.time;
        let h = s.grid.spacing();
        let m = s.m;
        for j in 1..s.grid.n - 1 {
            let x = s.grid.node(j);
            let mut out_sq = 0.0;
            let mut in_sq = 0.0;
            for c in 0..m {
                let px = (s.node(j + 1)[c] - s.node(j - 1)[c]) / (2.0 * h);
                let pt = slope[j * m + c];
                out_sq += (px + pt) * (px + pt);
                in_sq += (px - pt) * (px - pt);
            }
            if (t + x).abs() >= ev.c + margin {
                rep.outgoing = rep.outgoing.max(out_sq.sqrt());
            }
            if (t - x).abs() >= ev.c + margin {
                rep.incoming = rep.incoming.max(in_sq.sqrt());
            }
            if t.abs() > x.abs() + ev.c + margin {
                let d: f64 = s
                    .node(j)
                    .iter()
                    .zip(alpha.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                rep.interior = rep.interior.max(d);
            }
        }
    }
    rep
}
