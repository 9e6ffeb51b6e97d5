//! Grid search for the extrema of `R(V, conj V, V, conj V)` and
//! `L(V) = (3 - 2x^2)^2 R(V, conj V, V, conj V)` over points `(x, 0)` and
//! unit directions `V`.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::frame::FrameCurvatures;
use super::Geometry;
use crate::error::{Error, Result};

/// Bounds on `L(V)` that the scan checks containment in.
pub const L_BOUNDS: (f64, f64) = (-10.0, -0.5);
/// Bounds on `R(V, conj V, V, conj V)`.
pub const R_BOUNDS: (f64, f64) = (-10.0, -1.0 / 18.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub s_steps: usize,
    pub phase_steps: usize,
    /// Upper bound on coordinate golden-section rounds per refinement.
    pub refine_rounds: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            s_steps: 50,
            phase_steps: 64,
            refine_rounds: 60,
        }
    }
}

/// A sampled value with its location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub x: f64,
    pub s: f64,
    pub phi: f64,
}

impl Extremum {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.x.total_cmp(&other.x))
            .then(self.s.total_cmp(&other.s))
            .then(self.phi.total_cmp(&other.phi))
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            ..*self
        }
    }
}

/// Smaller value wins; ties go to the lexicographically smaller location.
fn min_of(a: Extremum, b: Extremum) -> Extremum {
    if b.key_cmp(&a) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Larger value wins; ties go to the lexicographically smaller location.
fn max_of(a: Extremum, b: Extremum) -> Extremum {
    match b.value.total_cmp(&a.value) {
        Ordering::Greater => b,
        Ordering::Less => a,
        Ordering::Equal => min_of(a, b),
    }
}

/// Direction extrema at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HscExtrema {
    pub min: Extremum,
    pub max: Extremum,
    pub samples: usize,
    pub nonnegative: usize,
}

fn s_grid(steps: usize) -> impl Iterator<Item = f64> {
    let denom = steps.saturating_sub(1).max(1) as f64;
    (0..steps).map(move |k| k as f64 / denom)
}

fn phase_grid(steps: usize) -> impl Iterator<Item = f64> + Clone {
    (0..steps).map(move |j| TAU * j as f64 / steps as f64)
}

/// Sectional values on the direction grid, `s`-major, plus the grid extrema.
struct DirectionGrid {
    values: Vec<Extremum>,
    extrema: HscExtrema,
}

fn direction_grid(c: &FrameCurvatures, x: f64, opts: &ScanOptions) -> DirectionGrid {
    let mut values = Vec::with_capacity(opts.s_steps * opts.phase_steps);
    for s in s_grid(opts.s_steps) {
        for phi in phase_grid(opts.phase_steps) {
            values.push(Extremum {
                value: c.sectional_params(s, phi),
                x,
                s,
                phi,
            });
        }
    }
    let min = values.iter().copied().reduce(min_of).expect("nonempty grid");
    let max = values.iter().copied().reduce(max_of).expect("nonempty grid");
    let nonnegative = values.iter().filter(|e| !(e.value < 0.0)).count();
    DirectionGrid {
        extrema: HscExtrema {
            min,
            max,
            samples: values.len(),
            nonnegative,
        },
        values,
    }
}

/// Discrete local extrema of the grid, `phi` periodic. On the rows `s = 0`
/// and `s = 1` the value does not depend on `phi`, so only `phi = 0` counts.
fn local_extrema(grid: &DirectionGrid, opts: &ScanOptions, maximize: bool) -> Vec<Extremum> {
    let (ns, np) = (opts.s_steps, opts.phase_steps);
    let sign = if maximize { -1.0 } else { 1.0 };
    let v = |i: usize, j: usize| sign * grid.values[i * np + j].value;
    let mut out = Vec::new();
    for i in 0..ns {
        let edge = i == 0 || i + 1 == ns;
        for j in 0..np {
            if edge && j > 0 {
                continue;
            }
            let here = v(i, j);
            let rows = i.saturating_sub(1)..=(i + 1).min(ns - 1);
            let beaten = rows.into_iter().any(|k| {
                [np - 1, 0, 1]
                    .iter()
                    .any(|&dj| v(k, (j + dj) % np) < here)
            });
            if !beaten {
                out.push(grid.values[i * np + j]);
            }
        }
    }
    out
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizer of `f` on `[lo, hi]` by golden-section search.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// `(s, phi)` for `a = cos t`, `b = sin t e^{i phi}` up to a global phase.
fn canonical(t: f64, phi: f64) -> (f64, f64) {
    let (sin, cos) = t.sin_cos();
    let mut p = phi;
    if cos < 0.0 {
        p += PI;
    }
    if sin < 0.0 {
        p += PI;
    }
    ((cos * cos).clamp(0.0, 1.0), p.rem_euclid(TAU))
}

/// Local improvement of a grid extremum by alternating golden-section
/// searches in `phi` and in the angle `t` with `s = cos^2 t`, in which the
/// sectional value is smooth at `s = 0` and `s = 1`. Brackets shrink when
/// the steps become small. `maximize` selects the direction of improvement.
/// The result is never worse than the start.
pub fn refine_direction(
    c: &FrameCurvatures,
    start: Extremum,
    opts: &ScanOptions,
    maximize: bool,
) -> Extremum {
    let sign = if maximize { -1.0 } else { 1.0 };
    let f = |t: f64, phi: f64| {
        let (s, p) = canonical(t, phi);
        sign * c.sectional_params(s, p)
    };
    let (mut t, mut phi) = (start.s.sqrt().acos(), start.phi);
    let mut dt = 0.2;
    let mut dphi = TAU / opts.phase_steps.max(1) as f64;
    for _ in 0..opts.refine_rounds {
        let (t0, phi0) = (t, phi);
        let nt = golden_min(|u| f(u, phi), t - dt, t + dt);
        if f(nt, phi) < f(t, phi) {
            t = nt;
        }
        let np = golden_min(|p| f(t, p), phi - dphi, phi + dphi);
        if f(t, np) < f(t, phi) {
            phi = np;
        }
        if (t - t0).abs().max((phi - phi0).abs()) < 0.25 * dt.min(dphi) {
            dt *= 0.5;
            dphi *= 0.5;
        }
        if dt < 1e-12 {
            break;
        }
    }
    let (s, p) = canonical(t, phi);
    let value = c.sectional_params(s, p);
    if sign * value < sign * start.value {
        Extremum {
            value,
            s,
            phi: p,
            ..start
        }
    } else {
        start
    }
}

fn refined(c: &FrameCurvatures, grid: &DirectionGrid, opts: &ScanOptions) -> HscExtrema {
    let best = |maximize: bool| {
        let pick = if maximize { max_of } else { min_of };
        let start = if maximize { grid.extrema.max } else { grid.extrema.min };
        local_extrema(grid, opts, maximize)
            .into_iter()
            .map(|e| refine_direction(c, e, opts, maximize))
            .fold(start, pick)
    };
    HscExtrema {
        min: best(false),
        max: best(true),
        ..grid.extrema
    }
}

/// Direction extrema of the sectional value at one point, refined from
/// every local extremum of the grid.
pub fn hsc_extrema(c: &FrameCurvatures, opts: &ScanOptions) -> HscExtrema {
    refined(c, &direction_grid(c, f64::NAN, opts), opts)
}

/// Result of [`pinch_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct PinchReport {
    pub l_min: Extremum,
    pub l_max: Extremum,
    pub r_min: Extremum,
    pub r_max: Extremum,
    pub l_min_refined: Extremum,
    pub l_max_refined: Extremum,
    pub r_min_refined: Extremum,
    pub r_max_refined: Extremum,
    /// Largest `B(X, Y)` over the `x` grid; `s` and `phi` are unused.
    pub b_xy_max: Extremum,
    pub samples: usize,
    pub nonnegative: usize,
}

fn inside(e: &Extremum, bounds: (f64, f64), tol: f64) -> bool {
    e.value >= bounds.0 - tol && e.value <= bounds.1 + tol
}

impl PinchReport {
    /// All reported `L` extrema lie in [`L_BOUNDS`] widened by `tol`.
    pub fn l_contained(&self, tol: f64) -> bool {
        [self.l_min, self.l_max, self.l_min_refined, self.l_max_refined]
            .iter()
            .all(|e| inside(e, L_BOUNDS, tol))
    }

    /// All reported `R` extrema lie in [`R_BOUNDS`] widened by `tol`.
    pub fn r_contained(&self, tol: f64) -> bool {
        [self.r_min, self.r_max, self.r_min_refined, self.r_max_refined]
            .iter()
            .all(|e| inside(e, R_BOUNDS, tol))
    }
}

struct Cell {
    x: f64,
    factor: f64,
    b_xy: f64,
    grid: HscExtrema,
    refined: HscExtrema,
}

fn l_factor(x: f64) -> f64 {
    let u = 3.0 - 2.0 * x * x;
    u * u
}

/// Scan `x_grid` times an `s_steps` by `phase_steps` direction grid.
///
/// Directions are `a = sqrt(s)`, `b = sqrt(1 - s) e^{i phi}` with `s` evenly
/// spaced on `[0, 1]` and `phi` on `[0, 2 pi)`. Each point is also refined
/// from every local extremum of its grid. Points are evaluated in parallel
/// and reduced in grid order, so the report does not depend on scheduling.
pub fn pinch_scan(x_grid: &[f64], opts: &ScanOptions) -> Result<PinchReport> {
    if x_grid.is_empty() || opts.s_steps == 0 || opts.phase_steps == 0 {
        return Err(Error::Domain("scan grids must be nonempty".into()));
    }
    let cells: Vec<Cell> = x_grid
        .par_iter()
        .map(|&x| {
            let curvatures = FrameCurvatures::from_geometry(&Geometry::at_auto(x)?)?;
            let grid = direction_grid(&curvatures, x, opts);
            Ok(Cell {
                x,
                factor: l_factor(x),
                b_xy: curvatures.b_xy,
                refined: refined(&curvatures, &grid, opts),
                grid: grid.extrema,
            })
        })
        .collect::<Result<_>>()?;

    let reduce = |f: fn(Extremum, Extremum) -> Extremum, e: &dyn Fn(&Cell) -> Extremum| {
        cells.iter().map(e).reduce(f).expect("nonempty grid")
    };
    let b_xy_max = cells
        .iter()
        .map(|c| Extremum {
            value: c.b_xy,
            x: c.x,
            s: f64::NAN,
            phi: f64::NAN,
        })
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("nonempty grid");
    Ok(PinchReport {
        l_min: reduce(min_of, &|c| c.grid.min.scaled(c.factor)),
        l_max: reduce(max_of, &|c| c.grid.max.scaled(c.factor)),
        r_min: reduce(min_of, &|c| c.grid.min),
        r_max: reduce(max_of, &|c| c.grid.max),
        l_min_refined: reduce(min_of, &|c| c.refined.min.scaled(c.factor)),
        l_max_refined: reduce(max_of, &|c| c.refined.max.scaled(c.factor)),
        r_min_refined: reduce(min_of, &|c| c.refined.min),
        r_max_refined: reduce(max_of, &|c| c.refined.max),
        b_xy_max,
        samples: cells.iter().map(|c| c.grid.samples).sum(),
        nonnegative: cells.iter().map(|c| c.grid.nonnegative).sum(),
    })
}

/// The grid `{0, 0.01, ..., 0.99}`.
pub fn default_x_grid() -> Vec<f64> {
    (0..100).map(|k| k as f64 / 100.0).collect()
}
