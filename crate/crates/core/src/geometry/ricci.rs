//! Ricci curvature `Ric_{i jbar} = -d_i d_jbar log det g` on the jet path.

use num_complex::Complex64;

use super::check_x;
use crate::chainrule::{phi_inverse, Mat2};
use crate::error::{Error, Result};
use crate::jet::{Jet4, MultiIndex};
use crate::kernel::Kernel;
use crate::point::ComplexPoint2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ricci {
    pub ric: Mat2,
    pub metric: Mat2,
    /// `|Ric_11/g_11 - Ric_22/g_22| + |Ric_12 - l g_12| + |Ric_21 - l g_21|`
    /// with `l = Ric_11/g_11`.
    pub einstein_deviation: f64,
}

impl Ricci {
    pub fn hermitian_residual(&self) -> f64 {
        (self.ric[0][1] - self.ric[1][0].conj())
            .norm()
            .max(self.ric[0][0].im.abs())
            .max(self.ric[1][1].im.abs())
    }
}

fn mixed(i: usize, j: usize) -> MultiIndex {
    let mut m = [0u8; 4];
    m[i] += 1;
    m[2 + j] += 1;
    m
}

/// Ricci tensor at a point, from the order-4 jet of `log B` in `(w, v)`.
pub fn ricci_at_point(w: ComplexPoint2) -> Result<Ricci> {
    let (z, _) = phi_inverse(w);
    if z.first.norm() >= 1.0 || z.second.norm() >= 1.0 {
        return Err(Error::Domain(format!("{w} is outside the domain")));
    }
    let log_b = Kernel::default().symmetric_jet(w, w.conj()).ln();
    let g: [[Jet4; 2]; 2] = std::array::from_fn(|k| {
        std::array::from_fn(|l| log_b.differentiate(k).differentiate(2 + l))
    });
    let det = &(&g[0][0] * &g[1][1]) - &(&g[0][1] * &g[1][0]);
    if !(det.value().re > 0.0) {
        return Err(Error::DegenerateMetric(format!("det = {}", det.value())));
    }
    let log_det = det.ln();
    let ric: Mat2 = std::array::from_fn(|i| {
        std::array::from_fn(|j| -log_det.derivative(&mixed(i, j)))
    });
    let metric: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].value()));
    Ok(Ricci {
        ric,
        metric,
        einstein_deviation: einstein_deviation(&ric, &metric),
    })
}

fn einstein_deviation(ric: &Mat2, g: &Mat2) -> f64 {
    let l: Complex64 = ric[0][0] / g[0][0];
    (l - ric[1][1] / g[1][1]).norm()
        + (ric[0][1] - l * g[0][1]).norm()
        + (ric[1][0] - l * g[1][0]).norm()
}

/// Ricci tensor at `(x, 0)`.
pub fn ricci_at(x: f64) -> Result<Ricci> {
    check_x(x)?;
    ricci_at_point(ComplexPoint2::real(x, 0.0))
}
