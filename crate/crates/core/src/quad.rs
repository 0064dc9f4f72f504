//! Composite Gauss-Legendre quadrature and cumulative integrals.

use crate::error::{Error, Result};
use crate::grid::Grid1D;

// 5-point Gauss-Legendre rule on [-1, 1]; order 10.
const GL_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

fn cell<T: LinCombine>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> Result<T> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = T::zero();
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        let xv = mid + half * x;
        let fv = f(xv);
        if !fv.is_finite() {
            return Err(Error::NonFiniteSample { x: xv });
        }
        acc = acc.add(fv.scale(w * half));
    }
    Ok(acc)
}

/// Composite 5-point Gauss-Legendre integral of f over [a, b] with n cells.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<f64> {
    quad_gen(&f, a, b, n)
}

/// Same rule for any value type with a linear structure (vectors, matrices).
pub fn quad_gen<T: LinCombine>(f: &impl Fn(f64) -> T, a: f64, b: f64, n: usize) -> Result<T> {
    assert!(n >= 1);
    let h = (b - a) / n as f64;
    let mut acc = T::zero();
    for i in 0..n {
        let lo = a + i as f64 * h;
        acc = acc.add(cell(f, lo, lo + h)?);
    }
    Ok(acc)
}

/// Running integral of f from `a`, sampled at the grid nodes; the grid must
/// start at `a`. Each cell is integrated with the Gauss rule, so the result
/// is accurate far beyond the grid resolution for smooth closed forms.
pub fn cumquad<T: LinCombine>(
    f: &impl Fn(f64) -> T,
    a: f64,
    grid: &Grid1D,
) -> Result<Vec<T>> {
    if (grid.x_min - a).abs() > 1e-12 * grid.spacing().max(1.0) {
        return Err(Error::CumQuadOrigin { a, x_min: grid.x_min });
    }
    let mut out = Vec::with_capacity(grid.n);
    let mut acc = T::zero();
    out.push(acc);
    for i in 1..grid.n {
        acc = acc.add(cell(f, grid.node(i - 1), grid.node(i))?);
        out.push(acc);
    }
    Ok(out)
}

/// Minimal linear-combination interface for quadrature values.
pub trait LinCombine: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, k: f64) -> Self;
    fn is_finite(&self) -> bool;
}

impl LinCombine for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl<const N: usize> LinCombine for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(mut self, other: Self) -> Self {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            *a += b;
        }
        self
    }
    fn scale(mut self, k: f64) -> Self {
        for a in self.iter_mut() {
            *a *= k;
        }
        self
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// 2x2 matrix used for the cumulative profile moment H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn outer(u: [f64; 2], v: [f64; 2]) -> Self {
        Mat2([[u[0] * v[0], u[0] * v[1]], [u[1] * v[0], u[1] * v[1]]])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let mut m = *self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] -= other.0[i][j];
            }
        }
        m
    }

    /// Max-abs norm of M + M^t, zero iff antisymmetric.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] + self.0[j][i]).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl LinCombine for Mat2 {
    fn zero() -> Self {
        Mat2([[0.0; 2]; 2])
    }
    fn add(mut self, other: Self) -> Self {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] += other.0[i][j];
            }
        }
        self
    }
    fn scale(mut self, k: f64) -> Self {
        for r in self.0.iter_mut() {
            for v in r.iter_mut() {
                *v *= k;
            }
        }
        self
    }
    fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::make_bump_pair;

    #[test]
    fn constant_integrand_is_exact() {
        let q = quad(|_| 1.0, 0.0, 1.0, 64).unwrap();
        assert!((q - 1.0).abs() < 1e-14, "got {q}");
    }

    #[test]
    fn full_period_sine_vanishes() {
        let q = quad(|x| (2.0 * std::f64::consts::PI * x).sin(), 0.0, 1.0, 64).unwrap();
        assert!(q.abs() < 1e-12, "got {q}");
    }

    #[test]
    fn exact_derivative_integrates_to_zero() {
        // all the mean-zero eliminations: h2', h3', h2 h2', h3 h3', h2^2 h2', h3^2 h3'
        let b = make_bump_pair(1.0).unwrap();
        let h2 = |x: f64| b.value(0, x);
        let h2p = |x: f64| b.deriv(0, 1, x);
        let h3 = |x: f64| b.value(1, x);
        let h3p = |x: f64| b.deriv(1, 1, x);
        let cases: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(h2p),
            Box::new(h3p),
            Box::new(move |x| h2(x) * h2p(x)),
            Box::new(move |x| h3(x) * h3p(x)),
            Box::new(move |x| h2(x) * h2(x) * h2p(x)),
            Box::new(move |x| h3(x) * h3(x) * h3p(x)),
        ];
        for (i, f) in cases.iter().enumerate() {
            let q = quad(f, -1.0, 1.0, 256).unwrap();
            assert!(q.abs() < 1e-10, "case {i}: {q}");
        }
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let err = quad(|x| 1.0 / x, -1.0, 1.0, 9).unwrap_err();
        match err {
            Error::NonFiniteSample { x } => assert!(x.abs() < 0.2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn cumquad_zero_integrand() {
        let g = Grid1D::new(-1.0, 1.0, 33).unwrap();
        let v = cumquad(&|_| 0.0f64, -1.0, &g).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn cumquad_recovers_antiderivative() {
        // integral of h3' from -C is h3 itself
        let b = make_bump_pair(1.0).unwrap();
        let g = Grid1D::new(-1.0, 1.0, 257).unwrap();
        let v = cumquad(&|x| b.deriv(1, 1, x), -1.0, &g).unwrap();
        for (i, x) in g.nodes().enumerate() {
            assert!(
                (v[i] - b.value(1, x)).abs() < 1e-12,
                "at {x}: {} vs {}",
                v[i],
                b.value(1, x)
            );
        }
    }

    #[test]
    fn cumquad_rejects_wrong_origin() {
        let g = Grid1D::new(-1.0, 1.0, 17).unwrap();
        assert!(cumquad(&|_| 0.0f64, -0.5, &g).is_err());
    }

    #[test]
    fn cumulative_moment_is_antisymmetric_at_endpoint() {
        // H(u) = int_{-C}^u (1/8) h h'^t; H(C) + H(C)^t telescopes to zero
        let b = make_bump_pair(1.0).unwrap();
        let g = Grid1D::new(-1.0, 1.0, 513).unwrap();
        let f = |x: f64| {
            Mat2::outer(
                [b.value(0, x), b.value(1, x)],
                [b.deriv(0, 1, x), b.deriv(1, 1, x)],
            )
            .scale(1.0 / 8.0)
        };
        let h = cumquad(&f, -1.0, &g).unwrap();
        let hc = h.last().unwrap();
        assert!(hc.symmetry_defect() < 1e-10, "defect {}", hc.symmetry_defect());
        // off-diagonal entry is A/8 for the canonical pair
        assert!((hc.0[0][1] - 1.494362065058827e-1 / 8.0).abs() < 1e-12);
    }
}
