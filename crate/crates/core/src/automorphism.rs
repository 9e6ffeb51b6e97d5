//! Disc automorphisms acting on the symmetrized bidisc through
//! `H(Phi(z1, z2)) = Phi(h(z1), h(z2))`, and normalization of a point to
//! `(x, 0)`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::chainrule::{phi, quadratic_roots};
use crate::error::{Error, Result};
use crate::point::ComplexPoint2;

/// Roots within this distance of the unit circle count as outside.
pub const MEMBERSHIP_MARGIN: f64 = 1e-12;

/// `h(z) = e^{i theta} (z - alpha) / (1 - conj(alpha) z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscAutomorphism {
    alpha: Complex64,
    theta: f64,
}

type Mobius = [[Complex64; 2]; 2];

impl DiscAutomorphism {
    pub fn new(alpha: Complex64, theta: f64) -> Result<Self> {
        if !(alpha.norm() < 1.0) || !theta.is_finite() {
            return Err(Error::Domain(format!(
                "automorphism needs |alpha| < 1 and finite theta, got alpha = {alpha}, theta = {theta}"
            )));
        }
        Ok(Self {
            alpha,
            theta: theta.rem_euclid(TAU),
        })
    }

    pub fn identity() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            theta: 0.0,
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// Rotation angle in `[0, 2 pi)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.theta) * (z - self.alpha) / (1.0 - self.alpha.conj() * z)
    }

    fn matrix(&self) -> Mobius {
        let l = Complex64::from_polar(1.0, self.theta);
        [[l, -l * self.alpha], [-self.alpha.conj(), Complex64::new(1.0, 0.0)]]
    }

    fn from_matrix(m: Mobius) -> Self {
        let s = m[1][1];
        let alpha = -(m[1][0] / s).conj();
        let theta = (m[0][0] / s).arg().rem_euclid(TAU);
        Self { alpha, theta }
    }

    /// `self ∘ inner`, that is `z ↦ self(inner(z))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let (a, b) = (self.matrix(), inner.matrix());
        let m = std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        });
        Self::from_matrix(m)
    }

    pub fn inverse(&self) -> Self {
        let m = self.matrix();
        Self::from_matrix([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }
}

impl fmt::Display for DiscAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha = {}, theta = {}", self.alpha, self.theta)
    }
}

fn roots_inside(w: ComplexPoint2) -> Option<(Complex64, Complex64)> {
    let (big, small) = quadratic_roots(w);
    (big.norm() < 1.0 - MEMBERSHIP_MARGIN).then_some((big, small))
}

/// Both roots of `t^2 - w1 t + w2` lie strictly inside the unit disc.
pub fn is_member(w: ComplexPoint2) -> bool {
    w.first.is_finite() && w.second.is_finite() && roots_inside(w).is_some()
}

fn member_roots(w: ComplexPoint2) -> Result<(Complex64, Complex64)> {
    if !(w.first.is_finite() && w.second.is_finite()) {
        return Err(Error::Domain(format!("{w} is not finite")));
    }
    roots_inside(w).ok_or_else(|| Error::Domain(format!("{w} is not in the symmetrized bidisc")))
}

/// `Phi(h(z1), h(z2))` for `w = Phi(z1, z2)`.
pub fn apply_automorphism(h: &DiscAutomorphism, w: ComplexPoint2) -> Result<ComplexPoint2> {
    let (z1, z2) = member_roots(w)?;
    Ok(phi(ComplexPoint2::new(h.apply(z1), h.apply(z2))))
}

/// An automorphism taking a point to `(x, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationResult {
    pub x: f64,
    pub h: DiscAutomorphism,
}

impl NormalizationResult {
    pub fn point(&self) -> ComplexPoint2 {
        ComplexPoint2::real(self.x, 0.0)
    }
}

/// Centers `h` at the root of smaller modulus and rotates the image of the
/// other root onto `[0, 1)`.
pub fn normalize(w: ComplexPoint2) -> Result<NormalizationResult> {
    let (big, small) = member_roots(w)?;
    let centered = DiscAutomorphism::new(small, 0.0)?;
    let image = centered.apply(big);
    let theta = if image.norm() > 0.0 { -image.arg() } else { 0.0 };
    let h = DiscAutomorphism::new(small, theta)?;
    Ok(NormalizationResult {
        x: image.norm().min(1.0 - MEMBERSHIP_MARGIN),
        h,
    })
}
