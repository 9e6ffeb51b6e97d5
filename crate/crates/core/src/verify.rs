//! Three-way comparison of every registered closed form against the jet
//! pipeline and the finite-difference oracle, with CSV export.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::closed_forms::{ClosedForm, Family, Poly, Registry};
use crate::error::{Error, Result};
use crate::geometry::{FrameCurvatures, Geometry, Route, CHAIN_RULE_MIN_X};
use crate::kernel::{kernel_jet, DerivativeLabel, PolarizedKernelArgs};
use crate::oracle::{z_table_fd, FdOptions};
use crate::point::ComplexPoint2;

pub const PIPELINE_TOLERANCE: f64 = 1e-8;
/// For the mixed frame components, whose closed forms carry radicals.
pub const RADICAL_TOLERANCE: f64 = 1e-7;
pub const ORACLE_TOLERANCE: f64 = 1e-4;
/// Relative errors are taken against `max(|closed form|, REL_FLOOR)`, so
/// that quantities vanishing at `x = 0` are compared absolutely there.
pub const REL_FLOOR: f64 = 1e-3;

pub const CSV_HEADER: &str = "quantity,x,closed_form,pipeline,oracle,abs_err,rel_err,pass";

/// Acceptance thresholds on relative error.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub pipeline: f64,
    pub radical: f64,
    pub oracle: f64,
    /// Pipeline tolerance for individual quantities.
    pub per_quantity: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pipeline: PIPELINE_TOLERANCE,
            radical: RADICAL_TOLERANCE,
            oracle: ORACLE_TOLERANCE,
            per_quantity: BTreeMap::new(),
        }
    }
}

impl Tolerances {
    /// Sets `pipeline`, `radical`, `oracle`, or the pipeline tolerance of one
    /// registered quantity.
    pub fn set(&mut self, name: &str, value: f64, registry: &Registry) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Domain(format!("tolerance {name} = {value} must be finite and nonnegative")));
        }
        match name {
            "pipeline" => self.pipeline = value,
            "radical" => self.radical = value,
            "oracle" => self.oracle = value,
            _ => {
                registry.get(name)?;
                self.per_quantity.insert(name.to_string(), value);
            }
        }
        Ok(())
    }

    pub fn pipeline_for(&self, form: &ClosedForm) -> f64 {
        if let Some(&t) = self.per_quantity.get(form.name()) {
            return t;
        }
        if form.has_radicals() || form.family() == Family::Mixed {
            self.radical
        } else {
            self.pipeline
        }
    }
}

/// Evaluation points `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            start: 0.05,
            stop: 0.95,
            step: 0.05,
        }
    }
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let ok = start.is_finite() && stop.is_finite() && step.is_finite();
        if !ok || step <= 0.0 || stop < start || start < 0.0 || stop >= 1.0 {
            return Err(Error::Domain(format!(
                "grid {start}:{stop}:{step} needs 0 <= start <= stop < 1 and step > 0"
            )));
        }
        Ok(Self { start, stop, step })
    }

    /// Points rounded to twelve decimals so that `0.05:0.95:0.05` gives
    /// the decimal values one expects.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("bad grid `{s}`, expected start:stop:step")))
        };
        match parts.as_slice() {
            [a, b, c] => Self::new(parse(a)?, parse(b)?, parse(c)?),
            [a] => {
                let x = parse(a)?;
                Self::new(x, x, 1.0)
            }
            _ => Err(Error::Domain(format!("bad grid `{s}`, expected start:stop:step"))),
        }
    }
}

/// Polynomial in `x` with ascending integer coefficients.
fn poly(c: &[i64], x: f64) -> f64 {
    Poly::new(c).eval(x)
}

const P8: &[i64] = &[15, 0, -30, 0, 23, 0, -8, 0, 1];
const U4: &[i64] = &[5, 0, -5, 0, 1];
const V4: &[i64] = &[3, 0, -3, 0, 1];

fn index(c: char) -> Result<usize> {
    match c {
        '1' => Ok(0),
        '2' => Ok(1),
        _ => Err(Error::UnknownQuantity(c.to_string())),
    }
}

fn indices<const N: usize>(name: &str, digits: &str) -> Result<[usize; N]> {
    let v: Vec<usize> = digits.chars().map(index).collect::<Result<_>>().map_err(|_| unknown(name))?;
    v.try_into().map_err(|_| unknown(name))
}

fn unknown(name: &str) -> Error {
    Error::UnknownQuantity(name.to_string())
}

/// A registered quantity other than the bidisc kernel derivatives, read from
/// a geometry evaluated at `(x, 0)`.
pub fn geometry_quantity(name: &str, x: f64, geo: &Geometry) -> Result<f64> {
    let frame = || FrameCurvatures::from_geometry(geo);
    let l = 3.0 - 2.0 * x * x;
    let one_m_x2 = 1.0 - x * x;
    let g = &geo.metric;
    if let Some(label) = name.strip_prefix("dBG_") {
        let (hol, anti) = label.parse::<DerivativeLabel>().map_err(|_| unknown(name))?.split();
        if hol.len() > 2 || anti.len() > 2 {
            return Err(unknown(name));
        }
        return Ok(geo.table.d(&hol, &anti).re);
    }
    if let Some(rest) = name.strip_prefix("g_inv_") {
        let [i, j] = indices(name, rest)?;
        return Ok(g.g_inv[i][j].re);
    }
    if let Some(rest) = name.strip_prefix("Gamma_") {
        let (k, ij) = rest.split_once('_').ok_or_else(|| unknown(name))?;
        let [k] = indices(name, k)?;
        let [i, j] = indices(name, ij)?;
        return Ok(geo.christoffel[k][i][j].re);
    }
    if let Some(rest) = name.strip_prefix("R_").filter(|r| r.len() == 4 && r.chars().all(|c| c.is_ascii_digit())) {
        let [a, b, c, d] = indices(name, rest)?;
        return Ok(geo.curvature.component(a, b, c, d).re);
    }
    if let Some(rest) = name.strip_prefix('g').filter(|r| r.len() == 2) {
        let [i, j] = indices(name, rest)?;
        return Ok(g.g[i][j].re);
    }
    Ok(match name {
        "det_g" => g.det,
        "H_X" => frame()?.h_x,
        "H_Y" => frame()?.h_y,
        "B_XY" => frame()?.b_xy,
        "R_XXXY" => frame()?.r_xxxy.re,
        "R_YYYX" => frame()?.r_yyyx.re,
        "R_XYXY" => frame()?.r_xyxy.re,
        "H_Y_poly" => frame()?.h_y * l * l * poly(U4, x).powi(3) * poly(V4, x).powi(2),
        "f1" => -frame()?.b_xy * (l * poly(P8, x) / one_m_x2).powi(2),
        "f2" => g.axis_separation() / (one_m_x2 * one_m_x2),
        _ => return Err(unknown(name)),
    })
}

fn kernel_label(name: &str) -> Option<Result<DerivativeLabel>> {
    name.strip_prefix("dB_")
        .map(|label| label.parse::<DerivativeLabel>().map_err(|_| unknown(name)))
}

/// Pipeline value of a registered quantity at `(x, 0)`.
///
/// Kernel derivatives come from the bidisc jet; everything else from the
/// geometry on `route`.
pub fn quantity_at(name: &str, x: f64, route: Route) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} must lie in [0, 1)")));
    }
    match kernel_label(name) {
        Some(label) => {
            let jet = kernel_jet(&PolarizedKernelArgs::normalized(x))?;
            Ok(jet.derivative(&label?.multi_index()).re)
        }
        None => geometry_quantity(name, x, &Geometry::at(x, route)?),
    }
}

/// One compared value. Errors are those of the pipeline when present,
/// otherwise of the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRow {
    pub quantity: String,
    pub x: f64,
    pub closed_form: Option<f64>,
    pub pipeline: Option<f64>,
    pub oracle: Option<f64>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub pass: bool,
}

impl VerificationRow {
    fn compare(
        form: &ClosedForm,
        x: f64,
        pipeline: Option<f64>,
        oracle: Option<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let cf = form.eval(x)?;
        let err = |v: f64| {
            let a = (v - cf).abs();
            (a, a / cf.abs().max(REL_FLOOR))
        };
        let p = pipeline.map(err);
        let o = oracle.map(err);
        let pass = (p.is_some() || o.is_some())
            && p.is_none_or(|(_, r)| r <= tol.pipeline_for(form))
            && o.is_none_or(|(_, r)| r <= tol.oracle);
        let shown = p.or(o);
        Ok(Self {
            quantity: form.name().to_string(),
            x,
            closed_form: Some(cf),
            pipeline,
            oracle,
            abs_err: shown.map(|e| e.0),
            rel_err: shown.map(|e| e.1),
            pass,
        })
    }

    /// Relative error of the oracle against the closed form.
    pub fn oracle_rel_err(&self) -> Option<f64> {
        let (cf, o) = (self.closed_form?, self.oracle?);
        Some((o - cf).abs() / cf.abs().max(REL_FLOOR))
    }
}

/// Seventeen significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn field(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

impl fmt::Display for VerificationRow {
    /// The row as one CSV line, without newline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{}",
            self.quantity,
            format_float(self.x),
            field(self.closed_form),
            field(self.pipeline),
            field(self.oracle),
            field(self.abs_err),
            field(self.rel_err),
            self.pass
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_rel_err: f64,
    pub max_oracle_rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub rows: Vec<VerificationRow>,
}

impl VerificationReport {
    /// Sorts rows by quantity name, then `x`.
    pub fn from_rows(mut rows: Vec<VerificationRow>) -> Self {
        rows.sort_by(|a, b| a.quantity.cmp(&b.quantity).then(a.x.total_cmp(&b.x)));
        Self { rows }
    }

    pub fn summary(&self) -> Summary {
        let passed = self.rows.iter().filter(|r| r.pass).count();
        let fold = |f: &dyn Fn(&VerificationRow) -> Option<f64>| {
            self.rows.iter().filter_map(f).fold(0.0, f64::max)
        };
        Summary {
            total: self.rows.len(),
            passed,
            failed: self.rows.len() - passed,
            max_rel_err: fold(&|r| r.pipeline.and(r.rel_err)),
            max_oracle_rel_err: fold(&|r| r.oracle_rel_err()),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(out, "{r}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

fn rows_at(x: f64, registry: &Registry, tol: &Tolerances) -> Result<Vec<VerificationRow>> {
    let point = ComplexPoint2::real(x, 0.0);
    let jet = kernel_jet(&PolarizedKernelArgs::normalized(x))?;
    let z_fd = z_table_fd(point, &FdOptions::default())?;
    // Below the cutoff the chain rule is ill conditioned; those rows rest on
    // the oracle alone.
    let pipeline_geo = if x >= CHAIN_RULE_MIN_X {
        Some(Geometry::at(x, Route::ChainRule)?)
    } else {
        None
    };
    let oracle_geo = Geometry::at(x, Route::FiniteDifference)?;
    registry
        .forms()
        .iter()
        .map(|form| {
            let name = form.name();
            let (pipeline, oracle) = match kernel_label(name) {
                Some(label) => {
                    let label = label?;
                    let (hol, anti) = label.split();
                    let p = jet.derivative(&label.multi_index()).re;
                    (Some(p), Some(z_fd.d(&hol, &anti).re))
                }
                None => {
                    let p = pipeline_geo
                        .as_ref()
                        .map(|g| geometry_quantity(name, x, g))
                        .transpose()?;
                    (p, Some(geometry_quantity(name, x, &oracle_geo)?))
                }
            };
            VerificationRow::compare(form, x, pipeline, oracle, tol)
        })
        .collect()
}

/// Compares every form of `registry` at every grid point.
pub fn verify(registry: &Registry, grid: &[f64], tol: &Tolerances) -> Result<VerificationReport> {
    let rows: Vec<Vec<VerificationRow>> = grid
        .par_iter()
        .map(|&x| rows_at(x, registry, tol))
        .collect::<Result<_>>()?;
    Ok(VerificationReport::from_rows(rows.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing_and_points() {
        let g: Grid = "0.05:0.95:0.05".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 19);
        assert_eq!(p[2], 0.15);
        assert_eq!(p[18], 0.95);
        assert_eq!("0.3".parse::<Grid>().unwrap().points(), vec![0.3]);
        assert!("0.5:0.1:0.1".parse::<Grid>().is_err());
        assert!("0:1:0.1".parse::<Grid>().is_err());
        assert!("a:b".parse::<Grid>().is_err());
        assert!("0:0.5:0".parse::<Grid>().is_err());
    }

    #[test]
    fn every_registered_name_has_a_pipeline_value() {
        for form in Registry::standard().forms() {
            let v = quantity_at(form.name(), 0.5, Route::ChainRule).unwrap();
            let cf = form.eval(0.5).unwrap();
            let tol = Tolerances::default().pipeline_for(form);
            assert!((v - cf).abs() <= tol * cf.abs().max(REL_FLOOR), "{}: {v} vs {cf}", form.name());
        }
        assert!(matches!(quantity_at("R_9999", 0.5, Route::ChainRule), Err(Error::UnknownQuantity(_))));
        assert!(quantity_at("dB_3", 0.5, Route::ChainRule).is_err());
        assert!(quantity_at("H_X", 1.0, Route::ChainRule).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let reg = Registry::standard();
        let mut t = Tolerances::default();
        t.set("oracle", 1e-3, reg).unwrap();
        t.set("H_X", 1e-12, reg).unwrap();
        assert_eq!(t.oracle, 1e-3);
        assert_eq!(t.pipeline_for(reg.get("H_X").unwrap()), 1e-12);
        assert_eq!(t.pipeline_for(reg.get("R_XXXY").unwrap()), RADICAL_TOLERANCE);
        assert_eq!(t.pipeline_for(reg.get("g11").unwrap()), PIPELINE_TOLERANCE);
        assert!(t.set("nope", 1.0, reg).is_err());
        assert!(t.set("pipeline", -1.0, reg).is_err());
    }

    #[test]
    fn single_point_report() {
        let report = verify(Registry::standard(), &[0.5], &Tolerances::default()).unwrap();
        let s = report.summary();
        assert_eq!(s.total, Registry::standard().len());
        assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
        assert!(s.max_rel_err <= RADICAL_TOLERANCE);
        assert!(s.max_oracle_rel_err <= ORACLE_TOLERANCE);
        let names: Vec<&str> = report.rows.iter().map(|r| r.quantity.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn origin_rows_use_the_oracle_only() {
        let report = verify(Registry::standard(), &[0.0], &Tolerances::default()).unwrap();
        assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
        let h = report.rows.iter().find(|r| r.quantity == "H_X").unwrap();
        assert!(h.pipeline.is_none() && h.oracle.is_some());
        let k = report.rows.iter().find(|r| r.quantity == "dB_1_1b").unwrap();
        assert!(k.pipeline.is_some());
    }

    #[test]
    fn corrupted_form_fails_by_name() {
        let reg = Registry::standard().perturbed("B_XY", 1.0 + 1e-6).unwrap();
        let report = verify(&reg, &[0.9], &Tolerances::default()).unwrap();
        let failed: Vec<&str> = report.failures().map(|r| r.quantity.as_str()).collect();
        assert_eq!(failed, vec!["B_XY"], "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn csv_layout() {
        let row = VerificationRow {
            quantity: "g11".into(),
            x: 0.5,
            closed_form: Some(1.0 / 3.0),
            pipeline: None,
            oracle: Some(0.25),
            abs_err: Some(0.0),
            rel_err: Some(0.0),
            pass: true,
        };
        let csv = VerificationReport::from_rows(vec![row]).to_csv();
        assert_eq!(
            csv,
            "quantity,x,closed_form,pipeline,oracle,abs_err,rel_err,pass\n\
             g11,5.0000000000000000e-1,3.3333333333333331e-1,,2.5000000000000000e-1,0.0000000000000000e0,0.0000000000000000e0,true\n"
        );
    }
}
