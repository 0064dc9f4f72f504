use crate::error::{Error, Result};

/// Uniform 1-D grid with nodes x_i = x_min + i * spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need n >= 2 samples, got {n}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid covering [-half, half] with the given spacing; half is rounded up
    /// to a whole number of cells so the nodes land on multiples of `spacing`.
    pub fn symmetric(half: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be > 0, got {spacing}")));
        }
        let cells = (half / spacing).ceil().max(1.0) as usize;
        let l = cells as f64 * spacing;
        Grid1D::new(-l, l, 2 * cells + 1)
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Index of the node nearest to x, provided x lies on the grid to within
    /// a small fraction of the spacing.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let h = self.spacing();
        let fi = (x - self.x_min) / h;
        let i = fi.round();
        if i < 0.0 || i as usize >= self.n || (fi - i).abs() > 1e-6 {
            None
        } else {
            Some(i as usize)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_nodes() {
        let g = Grid1D::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        let xs: Vec<f64> = g.nodes().collect();
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.index_of(0.5), Some(3));
        assert_eq!(g.index_of(0.3), None);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn symmetric_contains_origin() {
        let g = Grid1D::symmetric(3.2, 0.5).unwrap();
        assert_eq!(g.index_of(0.0), Some((g.n - 1) / 2));
        assert!(g.x_max >= 3.2);
    }
}
