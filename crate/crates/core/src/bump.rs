//! Smooth compactly supported profiles with exact closed-form derivatives.
//!
//! Everything is built from the mollifier g(s) = exp(-1/(1-s^2)) on |s| < 1.
//! Derivatives are evaluated analytically (no numerical differentiation), up
//! to fourth order so that a profile defined as the derivative of another
//! still exposes three exact derivatives.

use crate::error::{Error, Result};
use crate::quad::quad;

/// g and its first four s-derivatives. Zero outside |s| < 1; the rational
/// prefactors are only evaluated where the exponential has not underflowed,
/// which avoids 0 * inf at the support boundary.
fn mollifier_derivs(s: f64) -> [f64; 5] {
    let one_minus = 1.0 - s * s;
    // exp(-1/one_minus) underflows for one_minus < 1/745; everything is then 0.
    if one_minus < 1.4e-3 {
        return [0.0; 5];
    }
    let g = (-1.0 / one_minus).exp();
    if g == 0.0 {
        return [0.0; 5];
    }
    let im = 1.0 / one_minus;
    let im2 = im * im;
    let im3 = im2 * im;
    let im4 = im2 * im2;
    let im5 = im4 * im;
    // r = d/ds(-1/(1-s^2)) and its derivatives
    let r = -2.0 * s * im2;
    let rp = -2.0 * (1.0 + 3.0 * s * s) * im3;
    let rpp = -24.0 * s * (1.0 + s * s) * im4;
    let rppp = -24.0 * (1.0 + 10.0 * s * s + 5.0 * s * s * s * s) * im5;
    let g1 = g * r;
    let g2 = g * (r * r + rp);
    let g3 = g * (r * r * r + 3.0 * r * rp + rpp);
    let g4 = g * (r * r * r * r + 6.0 * r * r * rp + 3.0 * rp * rp + 4.0 * r * rpp + rppp);
    [g, g1, g2, g3, g4]
}

/// The asymmetric profile g(s) * (1+s)/2 and its first four s-derivatives
/// (Leibniz against the linear weight).
fn asym_derivs(s: f64) -> [f64; 5] {
    let g = mollifier_derivs(s);
    let w = 0.5 * (1.0 + s);
    [
        g[0] * w,
        g[1] * w + 0.5 * g[0],
        g[2] * w + g[1],
        g[3] * w + 1.5 * g[2],
        g[4] * w + 2.0 * g[3],
    ]
}

/// Closed-form scalar profile in the rescaled variable s = x/C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpShape {
    /// g(s) * (1+s)/2: the default asymmetric bump.
    AsymMollifier,
    /// g(s): even bump (zero cubed-derivative integral; used as a negative control).
    Mollifier,
    /// s-derivative of the asymmetric bump.
    AsymMollifierDeriv,
    /// s-derivative of the even bump.
    MollifierDeriv,
    Zero,
}

impl BumpShape {
    /// Value and first three s-derivatives.
    fn derivs(self, s: f64) -> [f64; 4] {
        match self {
            BumpShape::AsymMollifier => {
                let d = asym_derivs(s);
                [d[0], d[1], d[2], d[3]]
            }
            BumpShape::Mollifier => {
                let d = mollifier_derivs(s);
                [d[0], d[1], d[2], d[3]]
            }
            BumpShape::AsymMollifierDeriv => {
                let d = asym_derivs(s);
                [d[1], d[2], d[3], d[4]]
            }
            BumpShape::MollifierDeriv => {
                let d = mollifier_derivs(s);
                [d[1], d[2], d[3], d[4]]
            }
            BumpShape::Zero => [0.0; 4],
        }
    }
}

/// A smooth R^{m-1}-valued profile supported on [-C, C], one closed-form
/// scalar shape per component.
#[derive(Debug, Clone)]
pub struct BumpProfile {
    half_width: f64,
    components: Vec<BumpShape>,
    sign: f64,
}

impl BumpProfile {
    pub fn new(half_width: f64, components: Vec<BumpShape>) -> Result<Self> {
        if !(half_width > 0.0) || components.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "bump needs half_width > 0 and at least one component (got C = {half_width})"
            )));
        }
        Ok(Self { half_width, components, sign: 1.0 })
    }

    /// The profile with every component negated (h -> -h); the data built
    /// from it equals the data at -eps.
    pub fn negated(&self) -> BumpProfile {
        BumpProfile { sign: -self.sign, ..self.clone() }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn shapes(&self) -> &[BumpShape] {
        &self.components
    }

    /// Component value at x; exactly zero for |x| >= C.
    pub fn value(&self, comp: usize, x: f64) -> f64 {
        self.deriv(comp, 0, x)
    }

    /// k-th x-derivative (k <= 3) of a component, exact closed form.
    pub fn deriv(&self, comp: usize, k: usize, x: f64) -> f64 {
        assert!(k <= 3, "closed-form derivatives available up to order 3");
        let c = self.half_width;
        let s = x / c;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        self.sign * self.components[comp].derivs(s)[k] / c.powi(k as i32)
    }

    /// All component values at x.
    pub fn values(&self, x: f64) -> Vec<f64> {
        (0..self.components.len()).map(|c| self.value(c, x)).collect()
    }

    /// Euclidean norm of the component vector at x.
    pub fn norm(&self, x: f64) -> f64 {
        self.components
            .iter()
            .enumerate()
            .map(|(c, _)| {
                let v = self.value(c, x);
                v * v
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// The canonical pair (h2, h3) with h2 = h3' and h3 the default asymmetric
/// bump. Rejects shapes whose cubed-derivative integral is too small to
/// witness the obstruction.
pub fn make_bump_pair(half_width: f64) -> Result<BumpProfile> {
    make_bump_pair_from(half_width, BumpShape::AsymMollifier)
}

/// Same construction from an arbitrary h3 shape; the companion is its
/// derivative. Fails when int (h3')^3 is negligible relative to the L^2
/// scale of h3' (symmetric shapes land here).
pub fn make_bump_pair_from(half_width: f64, h3: BumpShape) -> Result<BumpProfile> {
    let h2 = match h3 {
        BumpShape::AsymMollifier => BumpShape::AsymMollifierDeriv,
        BumpShape::Mollifier => BumpShape::MollifierDeriv,
        other => {
            return Err(Error::InvalidConfig(format!(
                "no derivative companion available for {other:?}"
            )))
        }
    };
    let bump = BumpProfile::new(half_width, vec![h2, h3])?;
    let c = half_width;
    let cubed = quad(|x| bump.deriv(1, 1, x).powi(3), -c, c, 512)?;
    let sq = quad(|x| bump.deriv(1, 1, x).powi(2), -c, c, 512)?;
    let threshold = 1e-6 * sq.powf(1.5) / (2.0 * c).sqrt();
    if cubed.abs() < threshold {
        return Err(Error::DegenerateBumpPair { value: cubed, threshold });
    }
    Ok(bump)
}

/// Single-component angle profile for the circle target.
pub fn circle_theta(half_width: f64) -> Result<BumpProfile> {
    BumpProfile::new(half_width, vec![BumpShape::AsymMollifier])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::quad;

    #[test]
    fn support_and_derivatives_vanish_outside() {
        let b = make_bump_pair(1.0).unwrap();
        for comp in 0..2 {
            for k in 0..=3 {
                for &x in &[-1.0, 1.0, -1.5, 2.0, -1.0000001] {
                    assert_eq!(b.deriv(comp, k, x), 0.0, "comp {comp} deriv {k} at {x}");
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = make_bump_pair(1.0).unwrap();
        let d = 1e-5;
        for comp in 0..2 {
            for k in 0..=2 {
                for &x in &[-0.7, -0.2, 0.0, 0.31, 0.6, 0.9] {
                    let fd = (b.deriv(comp, k, x + d) - b.deriv(comp, k, x - d)) / (2.0 * d);
                    let an = b.deriv(comp, k + 1, x);
                    assert!(
                        (fd - an).abs() < 2e-5 * (1.0 + an.abs()),
                        "comp {comp} order {k} at {x}: fd {fd} vs analytic {an}"
                    );
                }
            }
        }
    }

    #[test]
    fn pair_is_derivative_coupled() {
        // h2 = h3' as closed forms, not numerically
        let b = make_bump_pair(0.7).unwrap();
        for &x in &[-0.5, -0.1, 0.2, 0.55] {
            assert_eq!(b.value(0, x), b.deriv(1, 1, x));
        }
    }

    #[test]
    fn symmetric_shape_is_rejected() {
        let err = make_bump_pair_from(1.0, BumpShape::Mollifier).unwrap_err();
        match err {
            crate::error::Error::DegenerateBumpPair { value, .. } => {
                assert!(value.abs() < 1e-12, "even bump should have zero cubed integral")
            }
            other => panic!("expected DegenerateBumpPair, got {other}"),
        }
    }

    #[test]
    fn canonical_quadratures_match_reference() {
        // Reference values computed independently with adaptive quadrature
        // (scipy.integrate.quad) on the same closed forms.
        let b = make_bump_pair(1.0).unwrap();
        let a = quad(|x| b.deriv(1, 1, x).powi(2), -1.0, 1.0, 1024).unwrap();
        let e = quad(|x| b.deriv(1, 1, x).powi(3), -1.0, 1.0, 1024).unwrap();
        assert!((a - 1.494362065058827e-1).abs() < 1e-12, "A = {a}");
        assert!((e - -4.649094421014896e-2).abs() < 1e-12, "E = {e}");
    }

    #[test]
    fn scales_with_half_width() {
        // h_{C}(x) = h_1(x/C): values carry over, derivatives gain 1/C
        let b1 = make_bump_pair(1.0).unwrap();
        let b2 = make_bump_pair(2.0).unwrap();
        assert!((b1.value(1, 0.3) - b2.value(1, 0.6)).abs() < 1e-15);
        assert!((b1.deriv(1, 1, 0.3) - 2.0 * b2.deriv(1, 1, 0.6)).abs() < 1e-15);
    }
}
