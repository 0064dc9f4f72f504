//! Sphere-valued fields sampled on spatial and null-coordinate grids.

use crate::grid::Grid1D;

/// Unit-norm tolerance for sphere-valued slices.
pub const TOL_SPHERE: f64 = 1e-12;
/// Symmetry tolerance for time-symmetric null-lattice fields.
pub const TOL_SYM: f64 = 1e-10;

/// A spatial slice of an R^m-valued field at a fixed time, stored flat with
/// stride m. e1 is the vacuum value.
#[derive(Debug, Clone)]
pub struct SphereSlice {
    pub grid: Grid1D,
    pub m: usize,
    pub time: f64,
    values: Vec<f64>,
}

impl SphereSlice {
    pub fn constant_e1(grid: Grid1D, m: usize, time: f64) -> Self {
        let mut values = vec![0.0; grid.n * m];
        for i in 0..grid.n {
            values[i * m] = 1.0;
        }
        Self { grid, m, time, values }
    }

    pub fn from_values(grid: Grid1D, m: usize, time: f64, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.n * m);
        Self { grid, m, time, values }
    }

    #[inline]
    pub fn node(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    #[inline]
    pub fn node_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    /// Max over nodes of | |phi| - 1 |.
    pub fn max_norm_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.grid.n {
            let r: f64 = self.node(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            worst = worst.max((r - 1.0).abs());
        }
        worst
    }

    /// Max over nodes of |phi - e1|.
    pub fn max_deviation_from_e1(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.grid.n {
            worst = worst.max(self.deviation_from_e1(i));
        }
        worst
    }

    #[inline]
    pub fn deviation_from_e1(&self, i: usize) -> f64 {
        let v = self.node(i);
        let mut s = (v[0] - 1.0) * (v[0] - 1.0);
        for c in 1..self.m {
            s += v[c] * v[c];
        }
        s.sqrt()
    }

    /// One component as a plain vector (component 0 shifted by -1 on request
    /// is left to callers).
    pub fn component(&self, c: usize) -> Vec<f64> {
        (0..self.grid.n).map(|i| self.node(i)[c]).collect()
    }

    /// Centered spatial derivative, one-sided at the ends.
    pub fn derivative(&self) -> Vec<Vec<f64>> {
        let h = self.grid.spacing();
        let n = self.grid.n;
        (0..self.m)
            .map(|c| {
                let mut d = vec![0.0; n];
                for i in 1..n - 1 {
                    d[i] = (self.node(i + 1)[c] - self.node(i - 1)[c]) / (2.0 * h);
                }
                d[0] = (self.node(1)[c] - self.node(0)[c]) / h;
                d[n - 1] = (self.node(n - 1)[c] - self.node(n - 2)[c]) / h;
                d
            })
            .collect()
    }

    /// Same field with the grid translated by dx; values untouched.
    pub fn translated(&self, dx: f64) -> SphereSlice {
        let mut s = self.clone();
        s.grid = Grid1D {
            x_min: self.grid.x_min + dx,
            x_max: self.grid.x_max + dx,
            n: self.grid.n,
        };
        s
    }
}

/// Field values on a null-coordinate lattice over [-C, C]^2, stride m over
/// the (u, v) index pair, v fastest.
#[derive(Debug, Clone)]
pub struct NullField {
    pub u_grid: Grid1D,
    pub v_grid: Grid1D,
    pub m: usize,
    values: Vec<f64>,
}

impl NullField {
    pub fn from_fn(u_grid: Grid1D, v_grid: Grid1D, m: usize, f: impl Fn(f64, f64) -> Vec<f64>) -> Self {
        let mut values = Vec::with_capacity(u_grid.n * v_grid.n * m);
        for iu in 0..u_grid.n {
            for iv in 0..v_grid.n {
                let val = f(u_grid.node(iu), v_grid.node(iv));
                assert_eq!(val.len(), m);
                values.extend_from_slice(&val);
            }
        }
        Self { u_grid, v_grid, m, values }
    }

    #[inline]
    pub fn node(&self, iu: usize, iv: usize) -> &[f64] {
        let k = (iu * self.v_grid.n + iv) * self.m;
        &self.values[k..k + self.m]
    }

    /// Max over the lattice of |phi(u,v) - phi(v,u)|; requires equal grids.
    pub fn symmetry_residual(&self) -> f64 {
        assert_eq!(self.u_grid, self.v_grid);
        let mut worst: f64 = 0.0;
        for iu in 0..self.u_grid.n {
            for iv in 0..iu {
                let a = self.node(iu, iv);
                let b = self.node(iv, iu);
                let d: f64 = a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(d);
            }
        }
        worst
    }
}
