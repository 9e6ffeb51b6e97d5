//! Metric, connection and curvature of the Bergman metric in `w` coordinates.
//!
//! Everything here is computed from a [`WDerivativeTable`] of the kernel.
//! With `B` the kernel and subscripts denoting `w`-derivatives,
//!
//! ```text
//! g_{k l}  = B_{k l} / B - B_k B_l / B^2
//! R_{a b c d} = -d_c d_dbar g_{a b} + g^{q p} d_c g_{a p} d_dbar g_{q b}
//! Gamma^k_{i j} = g^{k l} d_i g_{j l}
//! ```
//!
//! (second slots antiholomorphic throughout).

mod frame;
mod ricci;
mod scan;

use num_complex::Complex64;

use twofloat::TwoFloat;

use crate::chainrule::{
    conversion_at, jet_entries, multiset_position, phi_inverse, pushforward_extended,
    ConversionData, Mat2, WDerivativeTable,
};
use crate::jet::{reciprocal, Coefficient};
use crate::error::{Error, Result};
use crate::kernel::{extended_kernel_jet, Kernel, PolarizedKernelArgs};
use crate::oracle::{w_table_fd, z_table_fd, FdOptions};
use crate::point::ComplexPoint2;

pub use frame::{
    bidisc_frame, bisectional, frame_at, hsc, hsc_general, mixed_terms, sectional_direct, Direction,
    FrameCurvatures, FrameVectors, MixedTerms, OrthonormalFrame, Which, UNIT_TOLERANCE,
};
pub use ricci::{ricci_at, ricci_at_point, Ricci};
pub use scan::{
    default_x_grid, hsc_extrema, pinch_scan, refine_direction, Extremum, HscExtrema,
    PinchReport, ScanOptions, L_BOUNDS, R_BOUNDS,
};

pub type Tensor3 = [[[Complex64; 2]; 2]; 2];
pub type Tensor4 = [[[[Complex64; 2]; 2]; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Below this `x` the chain-rule route is replaced by the symmetric one.
pub const CHAIN_RULE_MIN_X: f64 = 1e-2;

/// How the kernel derivatives in `w` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    /// Kernel jet on the bidisc pushed forward through `Phi^{-1}`.
    ChainRule,
    /// Jet of the kernel written directly in `w`.
    Symmetric,
    /// Finite differences of `B(Phi^{-1}(w))`.
    FiniteDifference,
}

impl Route {
    /// Chain rule where the conversion is well conditioned, else symmetric.
    pub fn auto(x: f64) -> Self {
        if x >= CHAIN_RULE_MIN_X {
            Route::ChainRule
        } else {
            Route::Symmetric
        }
    }
}

/// Kernel derivatives at a point of the symmetrized bidisc.
pub fn w_table(w: ComplexPoint2, route: Route, kernel: &Kernel) -> Result<WDerivativeTable> {
    match route {
        Route::ChainRule => Ok(Geometry::with_kernel(w, route, kernel)?.table),
        Route::Symmetric => {
            let (z, _) = phi_inverse(w);
            if z.first.norm() >= 1.0 || z.second.norm() >= 1.0 {
                return Err(Error::Domain(format!("{w} is outside the domain")));
            }
            Ok(WDerivativeTable::from_w_jet(&kernel.symmetric_jet(w, w.conj())))
        }
        Route::FiniteDifference => Ok(w_table_fd(w, &FdOptions::default())?.scaled(kernel.scale)),
    }
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} must lie in [0, 1)")))
    }
}

/// The metric `g_{i jbar}` with its inverse and determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMetric2 {
    pub g: Mat2,
    /// `g_inv[k][l] = g^{k lbar}`, normalized by `sum_l g^{k lbar} g_{j lbar} = delta_kj`.
    pub g_inv: Mat2,
    pub det: f64,
}

impl HermitianMetric2 {
    pub fn new(g: Mat2) -> Result<Self> {
        let det_c = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let inv = det_c.inv();
        let g_inv = [
            [g[1][1] * inv, -g[1][0] * inv],
            [-g[0][1] * inv, g[0][0] * inv],
        ];
        Self::checked(g, g_inv, det_c.re)
    }

    fn checked(g: Mat2, g_inv: Mat2, det: f64) -> Result<Self> {
        if !(g[0][0].re > 0.0 && det > 0.0) {
            return Err(Error::DegenerateMetric(format!(
                "g11 = {}, det = {det}",
                g[0][0].re
            )));
        }
        Ok(Self { g, g_inv, det })
    }

    /// `<u, v> = sum u^i conj(v^j) g_{i jbar}`
    pub fn inner(&self, u: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
        let mut s = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                s += u[i] * v[j].conj() * self.g[i][j];
            }
        }
        s
    }

    pub fn hermitian_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.g[i][j] - self.g[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn identity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..2 {
            for j in 0..2 {
                let s: Complex64 = (0..2).map(|l| self.g_inv[k][l] * self.g[j][l]).sum();
                let id = if k == j { 1.0 } else { 0.0 };
                worst = worst.max((s - id).norm());
            }
        }
        worst
    }

    /// `det g / (g11 g22)`: one for g-orthogonal coordinate axes, near zero
    /// when they are almost parallel.
    pub fn axis_separation(&self) -> f64 {
        self.det / (self.g[0][0].re * self.g[1][1].re)
    }

    /// Smallest eigenvalue of the Hermitian matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.g[0][0].re;
        let d = self.g[1][1].re;
        let b = self.g[0][1].norm();
        let mean = 0.5 * (a + d);
        mean - (0.25 * (a - d) * (a - d) + b * b).sqrt()
    }
}

/// Curvature components `R[a][b][c][d] = R_{a bbar c dbar}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTensor2 {
    pub r: Tensor4,
}

impl CurvatureTensor2 {
    pub fn component(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.r[a][b][c][d]
    }

    /// `R(u, conj v, w, conj z)`
    pub fn contract(
        &self,
        u: [Complex64; 2],
        v: [Complex64; 2],
        w: [Complex64; 2],
        z: [Complex64; 2],
    ) -> Complex64 {
        let mut s = ZERO;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        s += u[a] * v[b].conj() * w[c] * z[d].conj() * self.r[a][b][c][d];
                    }
                }
            }
        }
        s
    }

    /// Largest violation of the Kahler symmetries and the conjugation rule.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.r;
        let mut worst: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        worst = worst
                            .max((r[a][b][c][d] - r[c][b][a][d]).norm())
                            .max((r[a][b][c][d] - r[a][d][c][b]).norm())
                            .max((r[a][b][c][d] - r[b][a][d][c].conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn max_imaginary(&self) -> f64 {
        self.r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `sum g^{a bbar} g^{c dbar} R_{a bbar c dbar}`
    pub fn scalar(&self, metric: &HermitianMetric2) -> f64 {
        let h = &metric.g_inv;
        let mut s = ZERO;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        s += h[a][b] * h[c][d] * self.r[a][b][c][d];
                    }
                }
            }
        }
        s.re
    }

    /// `Ric_{i jbar} = sum g^{k lbar} R_{i jbar k lbar}`
    pub fn ricci_trace(&self, metric: &HermitianMetric2) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    for l in 0..2 {
                        *v += metric.g_inv[k][l] * self.r[i][j][k][l];
                    }
                }
            }
        }
        out
    }
}

/// The full pipeline output at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub table: WDerivativeTable,
    pub metric: HermitianMetric2,
    /// `dg_hol[i][k][l] = d_i g_{k lbar}`
    pub dg_hol: Tensor3,
    /// `dg_anti[j][k][l] = d_jbar g_{k lbar}`
    pub dg_anti: Tensor3,
    /// `ddg[i][j][k][l] = d_i d_jbar g_{k lbar}`
    pub ddg: Tensor4,
    /// `christoffel[k][i][j] = Gamma^k_{i j}`
    pub christoffel: Tensor3,
    pub curvature: CurvatureTensor2,
    /// Metric and curvature in bidisc coordinates, when the roots are
    /// distinct enough for the conversion.
    pub bidisc: Option<BidiscData>,
}

/// The pulled-back metric and curvature at a preimage `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BidiscData {
    pub z: ComplexPoint2,
    pub conversion: ConversionData,
    pub metric: HermitianMetric2,
    pub curvature: CurvatureTensor2,
}

/// Scalars the tensor assembly can run in.
trait Scalar: Coefficient + Copy {
    fn to_complex(self) -> Complex64;
}

impl Scalar for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
}

impl Scalar for TwoFloat {
    fn to_complex(self) -> Complex64 {
        Complex64::new(f64::from(self), 0.0)
    }
}

/// Everything [`Geometry`] holds except the table.
struct Parts {
    metric: HermitianMetric2,
    dg_hol: Tensor3,
    dg_anti: Tensor3,
    ddg: Tensor4,
    christoffel: Tensor3,
    curvature: CurvatureTensor2,
}

/// Metric, its derivatives, connection and curvature from kernel derivatives
/// `e[P][Q]` (positions as in [`WDerivativeTable`]).
fn assemble<T: Scalar>(e: &[[T; 6]; 6]) -> Result<Parts> {
    let pos = |idx: &[usize]| multiset_position(idx).expect("at most two indices");
    let d = |hol: &[usize], anti: &[usize]| e[pos(hol)][pos(anti)];
    let n = |k: u8| T::from_u8(k).expect("small integer");
    let bi = reciprocal(e[0][0]);
    let bi2 = bi * bi;
    let bi3 = bi2 * bi;
    let bi4 = bi3 * bi;
    let h = |i: usize| d(&[i], &[]);
    let a = |j: usize| d(&[], &[j]);
    let ha = |i: usize, j: usize| d(&[i], &[j]);
    let hh = |i: usize, k: usize| d(&[i, k], &[]);
    let aa = |j: usize, l: usize| d(&[], &[j, l]);
    let hha = |i: usize, k: usize, j: usize| d(&[i, k], &[j]);
    let haa = |i: usize, j: usize, l: usize| d(&[i], &[j, l]);
    let hhaa = |i: usize, k: usize, j: usize, l: usize| d(&[i, k], &[j, l]);

    let zero = T::zero();
    let mut g = [[zero; 2]; 2];
    let mut dg_hol = [[[zero; 2]; 2]; 2];
    let mut dg_anti = [[[zero; 2]; 2]; 2];
    let mut ddg = [[[[zero; 2]; 2]; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            g[k][l] = bi * ha(k, l) - bi2 * h(k) * a(l);
            for i in 0..2 {
                dg_hol[i][k][l] = -(bi2 * h(i) * ha(k, l)) + bi * hha(k, i, l)
                    + n(2) * bi3 * h(i) * h(k) * a(l)
                    - bi2 * (hh(k, i) * a(l) + h(k) * ha(i, l));
            }
            for j in 0..2 {
                dg_anti[j][k][l] = -(bi2 * a(j) * ha(k, l)) + bi * haa(k, l, j)
                    + n(2) * bi3 * a(j) * h(k) * a(l)
                    - bi2 * (ha(k, j) * a(l) + h(k) * aa(l, j));
            }
            for i in 0..2 {
                for j in 0..2 {
                    ddg[i][j][k][l] = n(2) * bi3 * a(j) * h(i) * ha(k, l)
                        - bi2 * ha(i, j) * ha(k, l)
                        - bi2 * h(i) * haa(k, l, j)
                        - bi2 * a(j) * hha(k, i, l)
                        + bi * hhaa(k, i, l, j)
                        - n(6) * bi4 * a(j) * h(i) * h(k) * a(l)
                        + n(2)
                            * bi3
                            * (ha(i, j) * h(k) * a(l)
                                + h(i) * ha(k, j) * a(l)
                                + h(i) * h(k) * aa(l, j))
                        + n(2) * bi3 * a(j) * hh(k, i) * a(l)
                        - bi2 * hha(k, i, j) * a(l)
                        - bi2 * hh(k, i) * aa(l, j)
                        + n(2) * bi3 * a(j) * h(k) * ha(i, l)
                        - bi2 * ha(k, j) * ha(i, l)
                        - bi2 * h(k) * haa(i, l, j);
                }
            }
        }
    }

    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let inv = reciprocal(det);
    let gi = [
        [g[1][1] * inv, -(g[1][0] * inv)],
        [-(g[0][1] * inv), g[0][0] * inv],
    ];

    let mut christoffel = [[[zero; 2]; 2]; 2];
    for (k, block) in christoffel.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                block[i][j] = gi[k][0] * dg_hol[i][j][0] + gi[k][1] * dg_hol[i][j][1];
            }
        }
    }

    let mut r = [[[[zero; 2]; 2]; 2]; 2];
    for a_ in 0..2 {
        for b_ in 0..2 {
            for c in 0..2 {
                for d_ in 0..2 {
                    let mut s = -ddg[c][d_][a_][b_];
                    for p in 0..2 {
                        for q in 0..2 {
                            s = s + gi[q][p] * dg_hol[c][a_][p] * dg_anti[d_][q][b_];
                        }
                    }
                    r[a_][b_][c][d_] = s;
                }
            }
        }
    }

    let c2 = |m: [[T; 2]; 2]| m.map(|row| row.map(T::to_complex));
    let c3 = |t: [[[T; 2]; 2]; 2]| t.map(c2);
    let metric = HermitianMetric2::checked(c2(g), c2(gi), det.to_complex().re)?;
    Ok(Parts {
        metric,
        dg_hol: c3(dg_hol),
        dg_anti: c3(dg_anti),
        ddg: ddg.map(c3),
        christoffel: c3(christoffel),
        curvature: CurvatureTensor2 { r: r.map(c3) },
    })
}

impl Geometry {
    fn from_parts(table: WDerivativeTable, p: Parts) -> Self {
        Self {
            table,
            metric: p.metric,
            dg_hol: p.dg_hol,
            dg_anti: p.dg_anti,
            ddg: p.ddg,
            christoffel: p.christoffel,
            curvature: p.curvature,
            bidisc: None,
        }
    }

    pub fn from_table(t: &WDerivativeTable) -> Result<Self> {
        Ok(Self::from_parts(*t, assemble(t.entries())?))
    }

    /// Pipeline at a point with an explicit kernel normalization.
    ///
    /// On the chain-rule route, points with real roots are processed in
    /// double-double arithmetic from the kernel jet to the curvature tensor
    /// and rounded once. The transfer divides by powers of `z1 - z2` and the
    /// curvature formula cancels terms of order `(1 - x^2)^{-4}`, so plain
    /// `f64` loses many digits near both ends of `[0, 1)`.
    pub fn with_kernel(w: ComplexPoint2, route: Route, kernel: &Kernel) -> Result<Self> {
        match route {
            Route::ChainRule => {}
            Route::Symmetric => return Self::from_table(&w_table(w, route, kernel)?),
            Route::FiniteDifference => {
                let mut geometry = Self::from_table(&w_table(w, route, kernel)?)?;
                // Bidisc data from differences in z, where the root
                // separation allows the conversion at all.
                let (z, _) = phi_inverse(w);
                if let Ok(conversion) = conversion_at(z) {
                    let table = z_table_fd(z, &FdOptions::default())?;
                    let pulled = assemble(table.entries())?;
                    geometry.bidisc = Some(BidiscData {
                        z,
                        conversion,
                        metric: pulled.metric,
                        curvature: pulled.curvature,
                    });
                }
                return Ok(geometry);
            }
        }
        let (z, _) = phi_inverse(w);
        let args = PolarizedKernelArgs::on_diagonal(z);
        let conversion = conversion_at(z)?;
        let (mut geometry, pulled) = if z.first.im == 0.0 && z.second.im == 0.0 {
            let jet = extended_kernel_jet(&args)?;
            let entries = pushforward_extended(&jet, z)?;
            let table = WDerivativeTable::from_extended(&entries, kernel.constant_factor());
            (
                Self::from_parts(table, assemble(&entries)?),
                assemble(&jet_entries(&jet))?,
            )
        } else {
            let jet = kernel.jet(&args)?;
            (
                Self::from_table(&WDerivativeTable::pushforward(&jet, &conversion))?,
                assemble(&jet_entries(&jet))?,
            )
        };
        geometry.bidisc = Some(BidiscData {
            z,
            conversion,
            metric: pulled.metric,
            curvature: pulled.curvature,
        });
        Ok(geometry)
    }

    /// Pipeline at a point of the symmetrized bidisc.
    pub fn at_point(w: ComplexPoint2, route: Route) -> Result<Self> {
        Self::with_kernel(w, route, &Kernel::default())
    }

    /// Pipeline at the normalization point `(x, 0)`.
    pub fn at(x: f64, route: Route) -> Result<Self> {
        check_x(x)?;
        Self::at_point(ComplexPoint2::real(x, 0.0), route)
    }

    /// Pipeline at `(x, 0)` along [`Route::auto`].
    pub fn at_auto(x: f64) -> Result<Self> {
        Self::at(x, Route::auto(x))
    }

    pub fn frame(&self) -> Result<OrthonormalFrame> {
        OrthonormalFrame::new(&self.metric)
    }

    /// Scalar curvature, contracted in whichever coordinates have the more
    /// nearly orthogonal axes.
    pub fn scalar_curvature(&self) -> f64 {
        match &self.bidisc {
            Some(b) if b.metric.axis_separation() > self.metric.axis_separation() => {
                b.curvature.scalar(&b.metric)
            }
            _ => self.curvature.scalar(&self.metric),
        }
    }

    /// Largest `|Gamma^k_{ij} - Gamma^k_{ji}|`.
    pub fn torsion(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for block in &self.christoffel {
            worst = worst.max((block[0][1] - block[1][0]).norm());
        }
        worst
    }
}

/// Metric at `(x, 0)`.
pub fn metric_at(x: f64) -> Result<HermitianMetric2> {
    Ok(Geometry::at_auto(x)?.metric)
}

/// `d_i g_{j lbar}` at `(x, 0)`, indexed `[i][j][l]`.
pub fn metric_first_derivative(x: f64) -> Result<Tensor3> {
    Ok(Geometry::at_auto(x)?.dg_hol)
}

/// `Gamma^k_{ij}` at `(x, 0)`, indexed `[k][i][j]`.
pub fn christoffel_at(x: f64) -> Result<Tensor3> {
    Ok(Geometry::at_auto(x)?.christoffel)
}

/// Curvature tensor at `(x, 0)`.
pub fn curvature_at(x: f64) -> Result<CurvatureTensor2> {
    Ok(Geometry::at_auto(x)?.curvature)
}

/// Pipeline at an arbitrary point.
pub fn geometry_at_point(w: ComplexPoint2, route: Route) -> Result<Geometry> {
    Geometry::at_point(w, route)
}
