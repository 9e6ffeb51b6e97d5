//! Gram-Schmidt frame `X, Y` and the curvatures measured in it.

use num_complex::Complex64;

use super::{check_x, BidiscData, CurvatureTensor2, Geometry, HermitianMetric2};
use crate::chainrule::phi_jacobian;
use crate::error::{Error, Result};

/// Tolerance on `|a|^2 + |b|^2 - 1` for a [`Direction`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// `X = X_coeff d_1` and `Y = t_1 d_1 + t_2 d_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthonormalFrame {
    pub x_coeff: Complex64,
    /// Coefficients of the unnormalized `Y`.
    pub a: [Complex64; 2],
    pub t: [Complex64; 2],
}

impl OrthonormalFrame {
    pub fn new(metric: &HermitianMetric2) -> Result<Self> {
        let g = &metric.g;
        let g11 = g[0][0].re;
        let g22 = g[1][1].re;
        if !(g11 > 0.0 && g22 > 0.0 && metric.det > 0.0) {
            return Err(Error::DegenerateMetric(format!(
                "g11 = {g11}, g22 = {g22}, det = {}",
                metric.det
            )));
        }
        let x_coeff = Complex64::new(1.0 / g11.sqrt(), 0.0);
        let a = [
            -g[1][0] / (g11 * g22.sqrt()),
            Complex64::new(1.0 / g22.sqrt(), 0.0),
        ];
        let norm = metric.inner(a, a).re.sqrt();
        let t = [a[0] / norm, a[1] / norm];
        Ok(Self { x_coeff, a, t })
    }

    pub fn x(&self) -> [Complex64; 2] {
        [self.x_coeff, Complex64::new(0.0, 0.0)]
    }

    pub fn y(&self) -> [Complex64; 2] {
        self.t
    }

    /// Largest deviation from orthonormality under `metric`.
    pub fn orthonormality_residual(&self, metric: &HermitianMetric2) -> f64 {
        let (x, y) = (self.x(), self.y());
        (metric.inner(x, x) - 1.0)
            .norm()
            .max((metric.inner(y, y) - 1.0).norm())
            .max(metric.inner(x, y).norm())
    }
}

/// Unit vector `V = a X + b Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    a: Complex64,
    b: Complex64,
}

impl Direction {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NonUnitDirection(n));
        }
        Ok(Self { a, b })
    }

    /// `a = sqrt(s)`, `b = sqrt(1 - s) e^{i phi}`.
    pub fn from_params(s: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::NonUnitDirection(s));
        }
        Self::new(
            Complex64::new(s.sqrt(), 0.0),
            Complex64::from_polar((1.0 - s).sqrt(), phi),
        )
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Multiply both coefficients by `e^{i psi}`.
    pub fn rotated(&self, psi: f64) -> Self {
        let u = Complex64::from_polar(1.0, psi);
        Self {
            a: self.a * u,
            b: self.b * u,
        }
    }

    /// Components of `V` in the coordinate basis.
    pub fn vector(&self, frame: &OrthonormalFrame) -> [Complex64; 2] {
        let (x, y) = (frame.x(), frame.y());
        [self.a * x[0] + self.b * y[0], self.a * x[1] + self.b * y[1]]
    }
}

/// Which frame vector for [`hsc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    X,
    Y,
}

/// The six frame components that determine every sectional value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCurvatures {
    pub h_x: f64,
    pub h_y: f64,
    pub b_xy: f64,
    /// `R(X, conj X, X, conj Y)`
    pub r_xxxy: Complex64,
    /// `R(Y, conj Y, Y, conj X)`
    pub r_yyyx: Complex64,
    /// `R(X, conj Y, X, conj Y)`
    pub r_xyxy: Complex64,
}

impl FrameCurvatures {
    pub fn new(curvature: &CurvatureTensor2, frame: &OrthonormalFrame) -> Self {
        Self::from_vectors(curvature, frame.x(), frame.y())
    }

    /// Components for frame vectors given in the coordinates of `curvature`.
    pub fn from_vectors(curvature: &CurvatureTensor2, x: [Complex64; 2], y: [Complex64; 2]) -> Self {
        let r = |p, q, u, v| curvature.contract(p, q, u, v);
        Self {
            h_x: r(x, x, x, x).re,
            h_y: r(y, y, y, y).re,
            b_xy: r(x, x, y, y).re,
            r_xxxy: r(x, x, x, y),
            r_yyyx: r(y, y, y, x),
            r_xyxy: r(x, y, x, y),
        }
    }

    pub fn from_geometry(geometry: &Geometry) -> Result<Self> {
        let f = FrameVectors::new(geometry)?;
        Ok(Self::from_vectors(f.curvature, f.x, f.y))
    }

    /// `R(V, conj V, V, conj V)` for `V = a X + b Y`, from the collected expansion
    ///
    /// ```text
    /// |a|^4 H_X + |b|^4 H_Y + 4|a|^2|b|^2 B_XY
    ///   + 4|a|^2 Re(a conj(b) R_XXXY) + 4|b|^2 Re(conj(a) b R_YYYX)
    ///   + 2 Re(a^2 conj(b)^2 R_XYXY)
    /// ```
    ///
    /// which reduces to the real-coefficient form when the mixed terms are real.
    pub fn sectional(&self, dir: &Direction) -> f64 {
        let (a, b) = (dir.a, dir.b);
        let (na, nb) = (a.norm_sqr(), b.norm_sqr());
        na * na * self.h_x
            + nb * nb * self.h_y
            + 4.0 * na * nb * self.b_xy
            + 4.0 * na * (a * b.conj() * self.r_xxxy).re
            + 4.0 * nb * (a.conj() * b * self.r_yyyx).re
            + 2.0 * (a * a * b.conj() * b.conj() * self.r_xyxy).re
    }

    /// Sectional value in the `(s, phi)` parameterization.
    pub fn sectional_params(&self, s: f64, phi: f64) -> f64 {
        let a = s.sqrt();
        let b = Complex64::from_polar((1.0 - s).sqrt(), phi);
        let nb = 1.0 - s;
        s * s * self.h_x
            + nb * nb * self.h_y
            + 4.0 * s * nb * self.b_xy
            + 4.0 * s * (a * b.conj() * self.r_xxxy).re
            + 4.0 * nb * (a * b * self.r_yyyx).re
            + 2.0 * (a * a * b.conj() * b.conj() * self.r_xyxy).re
    }
}

/// The frame `X, Y` written in bidisc coordinates.
///
/// `X` is the image of `d/dw1`; `Y` is its g-orthogonal complement with the
/// phase chosen so that its `d/dw2` component is positive, matching
/// [`OrthonormalFrame`].
pub fn bidisc_frame(data: &BidiscData) -> Result<([Complex64; 2], [Complex64; 2])> {
    let g = &data.metric;
    let u = [data.conversion.first[0][0], data.conversion.first[1][0]];
    let nu = g.inner(u, u).re;
    // gu[i] = sum_j g_{i jbar} conj(u_j); v = (-gu[1], gu[0]) is orthogonal to u
    let gu: [Complex64; 2] =
        std::array::from_fn(|i| g.g[i][0] * u[0].conj() + g.g[i][1] * u[1].conj());
    let v = [-gu[1], gu[0]];
    let nv = g.inner(v, v).re;
    if !(nu > 0.0 && nv > 0.0) {
        return Err(Error::DegenerateMetric(format!("frame norms {nu}, {nv}")));
    }
    let jac = phi_jacobian(data.z);
    let w2 = jac[1][0] * v[0] + jac[1][1] * v[1];
    let phase = Complex64::from_polar(1.0 / nv.sqrt(), -w2.arg());
    let su = 1.0 / nu.sqrt();
    Ok(([u[0] * su, u[1] * su], [v[0] * phase, v[1] * phase]))
}

/// The frame `X, Y` with the curvature tensor, in one coordinate system.
///
/// Uses whichever coordinates have the more nearly orthogonal axes: `w`
/// near the diagonal of the bidisc, `z` near its boundary, where the
/// `w`-components of the tensor grow like `(1 - x^2)^{-4}` and contractions
/// with the frame cancel.
#[derive(Debug, Clone, Copy)]
pub struct FrameVectors<'a> {
    pub x: [Complex64; 2],
    pub y: [Complex64; 2],
    pub curvature: &'a CurvatureTensor2,
    pub in_bidisc: bool,
}

impl<'a> FrameVectors<'a> {
    pub fn new(geometry: &'a Geometry) -> Result<Self> {
        match &geometry.bidisc {
            Some(b) if b.metric.axis_separation() > geometry.metric.axis_separation() => {
                let (x, y) = bidisc_frame(b)?;
                Ok(Self {
                    x,
                    y,
                    curvature: &b.curvature,
                    in_bidisc: true,
                })
            }
            _ => {
                let f = geometry.frame()?;
                Ok(Self {
                    x: f.x(),
                    y: f.y(),
                    curvature: &geometry.curvature,
                    in_bidisc: false,
                })
            }
        }
    }

    /// Components of `a X + b Y`.
    pub fn vector(&self, dir: &Direction) -> [Complex64; 2] {
        [
            dir.a * self.x[0] + dir.b * self.y[0],
            dir.a * self.x[1] + dir.b * self.y[1],
        ]
    }
}

/// Sectional value by contracting the full tensor with `V`.
pub fn sectional_direct(geometry: &Geometry, dir: &Direction) -> Result<f64> {
    let f = FrameVectors::new(geometry)?;
    let v = f.vector(dir);
    Ok(f.curvature.contract(v, v, v, v).re)
}

/// Frame at `(x, 0)`.
pub fn frame_at(x: f64) -> Result<OrthonormalFrame> {
    Geometry::at_auto(x)?.frame()
}

fn curvatures_at(x: f64) -> Result<FrameCurvatures> {
    check_x(x)?;
    FrameCurvatures::from_geometry(&Geometry::at_auto(x)?)
}

/// `H(X) = R_{1111} / g_{11}^2` or `H(Y)` at `(x, 0)`.
pub fn hsc(x: f64, which: Which) -> Result<f64> {
    let c = curvatures_at(x)?;
    Ok(match which {
        Which::X => c.h_x,
        Which::Y => c.h_y,
    })
}

/// `B(X, Y) = R(X, conj X, Y, conj Y)` at `(x, 0)`.
pub fn bisectional(x: f64) -> Result<f64> {
    Ok(curvatures_at(x)?.b_xy)
}

/// Mixed frame components at `(x, 0)`, where they are real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedTerms {
    pub r_xxxy: f64,
    pub r_yyyx: f64,
    pub r_xyxy: f64,
}

pub fn mixed_terms(x: f64) -> Result<MixedTerms> {
    let c = curvatures_at(x)?;
    Ok(MixedTerms {
        r_xxxy: c.r_xxxy.re,
        r_yyyx: c.r_yyyx.re,
        r_xyxy: c.r_xyxy.re,
    })
}

/// `R(V, conj V, V, conj V)` at `(x, 0)` from the collected expansion.
pub fn hsc_general(x: f64, dir: &Direction) -> Result<f64> {
    Ok(curvatures_at(x)?.sectional(dir))
}
