//! Central finite differences with Richardson extrapolation, used as an
//! independent check on the jet and chain-rule derivatives.
//!
//! A real function `f` of a point in `C^2` is sampled on a lattice in the
//! four real coordinates `(Re p1, Im p1, Re p2, Im p2)`. Wirtinger operators
//! `d/dp = (d/da - i d/db) / 2` and `d/dconj(p) = (d/da + i d/db) / 2` are
//! expanded into real partials, each estimated with a tensor-product
//! stencil.
//!
//! Lattice coordinates, samples and differences are carried in
//! double-double arithmetic, so fourth differences at small steps keep
//! their digits and the step can be chosen for truncation error alone.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::chainrule::{quadratic_roots, WDerivativeTable, MULTISETS};
use crate::error::{Error, Result};
use crate::jet::{degree, multi_indices, reciprocal, MultiIndex};
use crate::point::ComplexPoint2;

/// Real coordinates `(Re p1, Im p1, Re p2, Im p2)` of a lattice point.
pub type RealPoint = [TwoFloat; 4];

/// Step controls for the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    pub base_step: f64,
    /// Number of Richardson levels; the finest step is `base_step / 2^levels`.
    pub levels: usize,
    /// The step never exceeds this fraction of the distance to the boundary.
    pub boundary_fraction: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            base_step: 2e-2,
            levels: 4,
            boundary_fraction: 0.1,
        }
    }
}

const RADIUS: i32 = 2;
const SIDE: usize = (2 * RADIUS + 1) as usize;

/// 1D central stencils of order 0..=4: (offset, weight), before dividing by `h^m`.
fn stencil(order: u8) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("order above four"),
    }
}

fn lattice_index(k: [i32; 4]) -> usize {
    k.iter()
        .fold(0usize, |acc, &ki| acc * SIDE + (ki + RADIUS) as usize)
}

fn real_coords(p: ComplexPoint2) -> [f64; 4] {
    [p.first.re, p.first.im, p.second.re, p.second.im]
}

/// Samples of `f` on the `5^4` lattice of spacing `h` around `center`.
fn sample<F: Fn(RealPoint) -> TwoFloat>(f: &F, center: ComplexPoint2, h: f64) -> Vec<TwoFloat> {
    let c = real_coords(center);
    let coord = |i: usize, k: i32| TwoFloat::from(c[i]) + TwoFloat::new_mul(k as f64, h);
    let mut values = vec![TwoFloat::from(0.0); SIDE.pow(4)];
    for a in -RADIUS..=RADIUS {
        for b in -RADIUS..=RADIUS {
            for cc in -RADIUS..=RADIUS {
                for d in -RADIUS..=RADIUS {
                    let p = [coord(0, a), coord(1, b), coord(2, cc), coord(3, d)];
                    values[lattice_index([a, b, cc, d])] = f(p);
                }
            }
        }
    }
    values
}

fn real_partials(values: &[TwoFloat], h: f64) -> BTreeMap<MultiIndex, TwoFloat> {
    let mut out = BTreeMap::new();
    for m in multi_indices() {
        let mut s = TwoFloat::from(0.0);
        for &(o0, w0) in stencil(m[0]) {
            for &(o1, w1) in stencil(m[1]) {
                for &(o2, w2) in stencil(m[2]) {
                    for &(o3, w3) in stencil(m[3]) {
                        s += values[lattice_index([o0, o1, o2, o3])] * (w0 * w1 * w2 * w3);
                    }
                }
            }
        }
        out.insert(*m, s * reciprocal(TwoFloat::from(h).powi(degree(m) as i32)));
    }
    out
}

fn partials_dd<F: Fn(RealPoint) -> TwoFloat>(
    f: &F,
    center: ComplexPoint2,
    step: f64,
    levels: usize,
) -> BTreeMap<MultiIndex, TwoFloat> {
    let mut table: Vec<BTreeMap<MultiIndex, TwoFloat>> = (0..=levels)
        .map(|k| {
            let h = step / f64::powi(2.0, k as i32);
            real_partials(&sample(f, center, h), h)
        })
        .collect();
    // Richardson in h^2: each level removes the next even power.
    for level in 1..=levels {
        let factor = f64::powi(4.0, level as i32);
        table = table
            .windows(2)
            .map(|pair| {
                pair[0]
                    .iter()
                    .map(|(m, coarse)| (*m, (pair[1][m] * factor - *coarse) / (factor - 1.0)))
                    .collect()
            })
            .collect();
    }
    table.pop().expect("at least one level")
}

/// All real partials of order at most four at `center`, extrapolated.
pub fn real_partials_extrapolated<F: Fn(RealPoint) -> TwoFloat>(
    f: &F,
    center: ComplexPoint2,
    step: f64,
    levels: usize,
) -> BTreeMap<MultiIndex, f64> {
    partials_dd(f, center, step, levels)
        .into_iter()
        .map(|(m, v)| (m, f64::from(v)))
        .collect()
}

type Operator = BTreeMap<MultiIndex, Complex64>;

fn wirtinger(hol: &[usize], anti: &[usize]) -> Operator {
    let mut op: Operator = BTreeMap::from([([0u8; 4], Complex64::new(1.0, 0.0))]);
    let factors = hol
        .iter()
        .map(|&v| (v, -1.0))
        .chain(anti.iter().map(|&v| (v, 1.0)));
    for (var, sign) in factors {
        let mut next = Operator::new();
        for (m, c) in &op {
            let mut re = *m;
            re[2 * var] += 1;
            *next.entry(re).or_default() += c * 0.5;
            let mut im = *m;
            im[2 * var + 1] += 1;
            *next.entry(im).or_default() += c * Complex64::new(0.0, 0.5 * sign);
        }
        op = next;
    }
    op
}

/// Wirtinger derivatives of a real function, up to two holomorphic and two
/// antiholomorphic indices.
pub fn wirtinger_table<F: Fn(RealPoint) -> TwoFloat>(
    f: &F,
    center: ComplexPoint2,
    step: f64,
    levels: usize,
) -> WDerivativeTable {
    let partials = partials_dd(f, center, step, levels);
    let mut entries = [[Complex64::new(0.0, 0.0); 6]; 6];
    for (p, hol) in MULTISETS.iter().enumerate() {
        for (q, anti) in MULTISETS.iter().enumerate() {
            let (mut re, mut im) = (TwoFloat::from(0.0), TwoFloat::from(0.0));
            for (m, c) in wirtinger(hol, anti) {
                // coefficients are dyadic, so these products are exact
                re += partials[&m] * c.re;
                im += partials[&m] * c.im;
            }
            entries[p][q] = Complex64::new(f64::from(re), f64::from(im));
        }
    }
    WDerivativeTable::from_entries(entries)
}

/// Complex double-double number, enough for the kernel and root formulas.
#[derive(Debug, Clone, Copy)]
struct Dc {
    re: TwoFloat,
    im: TwoFloat,
}

impl Dc {
    fn new(re: TwoFloat, im: TwoFloat) -> Self {
        Self { re, im }
    }

    fn norm_sqr(self) -> TwoFloat {
        self.re * self.re + self.im * self.im
    }

    fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }

    /// Principal square root.
    fn sqrt(self) -> Self {
        let zero = TwoFloat::from(0.0);
        let r = self.norm_sqr().sqrt();
        if r == zero {
            return self;
        }
        let t = ((r + self.re.abs()) * 0.5).sqrt();
        let u = self.im * reciprocal(t * 2.0);
        if self.re >= zero {
            Self::new(t, u)
        } else if self.im >= zero {
            Self::new(u.abs(), t)
        } else {
            Self::new(u.abs(), -t)
        }
    }
}

impl Add for Dc {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Dc {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Dc {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// `(A + A') / (2 pi^2 A^2 A'^2)` on the diagonal, with
/// `A = (1 - |z1|^2)(1 - |z2|^2)` and `A' = |1 - z1 conj(z2)|^2`.
/// NaN outside the bidisc.
fn kernel_dd(z1: Dc, z2: Dc) -> TwoFloat {
    let one = TwoFloat::from(1.0);
    let (m1, m2) = (one - z1.norm_sqr(), one - z2.norm_sqr());
    if !(m1.hi() > 0.0 && m2.hi() > 0.0) {
        return TwoFloat::NAN;
    }
    let a = m1 * m2;
    let c = z1 * z2.conj();
    let a_swap = (one - c.re) * (one - c.re) + c.im * c.im;
    let aa = a * a_swap;
    (a + a_swap) * reciprocal(aa * aa) / (2.0 * PI * PI)
}

fn kernel_z(p: RealPoint) -> TwoFloat {
    kernel_dd(Dc::new(p[0], p[1]), Dc::new(p[2], p[3]))
}

/// Kernel as a function of `w`, through the roots of `t^2 - w1 t + w2`.
fn kernel_w(p: RealPoint) -> TwoFloat {
    let (w1, w2) = (Dc::new(p[0], p[1]), Dc::new(p[2], p[3]));
    let root = (w1 * w1 - w2.scale(4.0)).sqrt();
    kernel_dd((w1 + root).scale(0.5), (w1 - root).scale(0.5))
}

/// Largest root modulus over the sampling lattice of spacing `h` at `w`.
fn lattice_reach(w: ComplexPoint2, h: f64) -> f64 {
    let r = RADIUS as f64 * h;
    let offsets = [-r, 0.0, r];
    let mut reach: f64 = 0.0;
    for a in offsets {
        for b in offsets {
            for c in offsets {
                for d in offsets {
                    let p = ComplexPoint2::new(
                        w.first + Complex64::new(a, b),
                        w.second + Complex64::new(c, d),
                    );
                    let (z1, z2) = quadratic_roots(p);
                    reach = reach.max(z1.norm()).max(z2.norm());
                }
            }
        }
    }
    reach
}

fn step_for(margin: f64, opts: &FdOptions) -> Result<f64> {
    if !(margin > 0.0) {
        return Err(Error::Domain("point is not interior".into()));
    }
    Ok(opts.base_step.min(opts.boundary_fraction * margin))
}

/// Oracle for the kernel in `w` coordinates: `B(Phi^{-1}(w))` differentiated
/// numerically in the four real coordinates of `w`.
pub fn w_table_fd(w: ComplexPoint2, opts: &FdOptions) -> Result<WDerivativeTable> {
    let (r1, r2) = quadratic_roots(w);
    let margin = 1.0 - r1.norm().max(r2.norm());
    let mut h = step_for(margin, opts)?;
    // A step in w moves the roots by roughly h / |z1 - z2|, so shrink it
    // until the whole lattice keeps half of the margin.
    while lattice_reach(w, h) > 1.0 - 0.5 * margin {
        h *= 0.5;
        if h < 1e-8 {
            return Err(Error::Domain(format!("no usable step at {w}")));
        }
    }
    Ok(wirtinger_table(&kernel_w, w, h, opts.levels))
}

/// Oracle for the kernel on the bidisc in `z` coordinates.
pub fn z_table_fd(z: ComplexPoint2, opts: &FdOptions) -> Result<WDerivativeTable> {
    let h = step_for(1.0 - z.first.norm().max(z.second.norm()), opts)?;
    Ok(wirtinger_table(&kernel_z, z, h, opts.levels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainrule::{conversion_at, phi};
    use crate::kernel::{kernel_jet, PolarizedKernelArgs};

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn polynomial_partials_are_exact_up_to_rounding() {
        // f = a1^2 b1 a2 + b2^4 has d^4/da1^2 db1 da2 = 2 and d^4/db2^4 = 24
        let f = |p: RealPoint| p[0] * p[0] * p[1] * p[2] + p[3].powi(4);
        let d = real_partials_extrapolated(&f, ComplexPoint2::real(0.3, -0.2), 0.1, 2);
        assert!((d[&[2, 1, 1, 0]] - 2.0).abs() < 1e-6);
        assert!((d[&[0, 0, 0, 4]] - 24.0).abs() < 1e-6);
        assert!(d[&[1, 1, 1, 1]].abs() < 1e-6);
    }

    #[test]
    fn wirtinger_of_modulus_squared() {
        // |p1|^2 |p2|^2: d/dp1 d/dconj(p1) d/dp2 d/dconj(p2) = 1
        let f = |p: RealPoint| (p[0] * p[0] + p[1] * p[1]) * (p[2] * p[2] + p[3] * p[3]);
        let t = wirtinger_table(&f, ComplexPoint2::real(0.2, 0.1), 0.1, 2);
        assert!((t.d(&[0, 1], &[0, 1]) - 1.0).norm() < 1e-8);
        assert!((t.d(&[0], &[0]).re - 0.01).abs() < 1e-8);
        assert!(t.d(&[0, 0], &[]).norm() < 1e-8);
    }

    #[test]
    fn z_oracle_matches_jet() {
        let z = ComplexPoint2::real(0.5, 0.0);
        let fd = z_table_fd(z, &FdOptions::default()).unwrap();
        let jet = kernel_jet(&PolarizedKernelArgs::on_diagonal(z)).unwrap();
        for hol in MULTISETS {
            for anti in MULTISETS {
                let mut m = [0u8; 4];
                for &i in hol {
                    m[i] += 1;
                }
                for &j in anti {
                    m[j + 2] += 1;
                }
                let exact = jet.derivative(&m);
                assert!(rel(fd.d(hol, anti), exact) < 1e-11, "{hol:?} {anti:?}");
            }
        }
    }

    #[test]
    fn w_oracle_matches_pushforward() {
        for x in [0.05, 0.5, 0.95, 0.99] {
            let z = ComplexPoint2::real(x, 0.0);
            let fd = w_table_fd(phi(z), &FdOptions::default()).unwrap();
            let jet = kernel_jet(&PolarizedKernelArgs::on_diagonal(z)).unwrap();
            let pushed = WDerivativeTable::pushforward(&jet, &conversion_at(z).unwrap());
            for hol in MULTISETS {
                for anti in MULTISETS {
                    let exact = pushed.d(hol, anti);
                    if exact.norm() < 1e-9 {
                        continue;
                    }
                    assert!(rel(fd.d(hol, anti), exact) < 1e-8, "x={x} {hol:?} {anti:?}");
                }
            }
        }
    }

    #[test]
    fn w_oracle_is_defined_at_origin() {
        let t = w_table_fd(ComplexPoint2::real(0.0, 0.0), &FdOptions::default()).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((t.value().re - 1.0 / pi2).abs() < 1e-12);
        assert!(t.d(&[0], &[]).norm() < 1e-10);
    }

    #[test]
    fn boundary_point_is_rejected() {
        assert!(w_table_fd(ComplexPoint2::real(2.0, 1.0), &FdOptions::default()).is_err());
    }
}
