//! Closed-form expressions in the normalization parameter `x`.
//!
//! A form is `c * pi^k * prod_i base_i(x)^{e_i}` where `c` is rational, each
//! base is an integer polynomial or a quotient of two, and each exponent is
//! rational. Factors with integer exponents are evaluated exactly in rational
//! arithmetic; the remaining radical factors take principal positive roots.

mod registry;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use registry::standard_forms;

/// Integer polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<i64>);

impl Poly {
    pub fn new(ascending: &[i64]) -> Self {
        let mut c = ascending.to_vec();
        while c.len() > 1 && c.last() == Some(&0) {
            c.pop();
        }
        Self(c)
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }

    /// Exact value; Horner runs over integers with a single reduction.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let (n, d) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for &c in self.0.iter().rev() {
            acc = acc * n + BigInt::from(c) * &dpow;
            dpow *= d;
        }
        // dpow overshoots by one factor of d
        BigRational::new(acc * d, dpow)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.0.iter().enumerate().rev() {
            if c == 0 && self.0.len() > 1 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match k {
                0 => write!(f, "{a}")?,
                _ if a == 1 => {}
                _ => write!(f, "{a}")?,
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    Poly(Poly),
    Quotient(Poly, Poly),
}

impl Base {
    fn eval_exact(&self, x: &BigRational) -> Result<BigRational> {
        match self {
            Base::Poly(p) => Ok(p.eval_exact(x)),
            Base::Quotient(n, d) => {
                let den = d.eval_exact(x);
                if den.is_zero() {
                    return Err(Error::Domain(format!("denominator {d} vanishes")));
                }
                Ok(n.eval_exact(x) / den)
            }
        }
    }
}

/// `base^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub base: Base,
    pub exponent: Rational64,
}

impl Factor {
    pub fn is_radical(&self) -> bool {
        !self.exponent.is_integer()
    }
}

/// Grouping used for tolerances and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    KernelDerivative,
    SymmetricDerivative,
    Metric,
    InverseMetric,
    Determinant,
    Christoffel,
    Curvature,
    Sectional,
    Bisectional,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    name: String,
    family: Family,
    coefficient: Rational64,
    pi_power: i32,
    factors: Vec<Factor>,
    /// Extra multiplier; 1 except in deliberately perturbed registries.
    scale: f64,
}

fn pow_exact(base: &BigRational, e: i64) -> Result<BigRational> {
    if e < 0 && base.is_zero() {
        return Err(Error::Domain("zero raised to a negative power".into()));
    }
    let mut out = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        out *= base;
    }
    Ok(if e < 0 { out.recip() } else { out })
}

impl ClosedForm {
    pub fn new(
        name: &str,
        family: Family,
        coefficient: Rational64,
        pi_power: i32,
        factors: Vec<Factor>,
    ) -> Self {
        Self {
            name: name.to_string(),
            family,
            coefficient,
            pi_power,
            factors,
            scale: 1.0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn has_radicals(&self) -> bool {
        self.factors.iter().any(Factor::is_radical)
    }

    /// Product of the rational coefficient and every integer-exponent factor.
    fn rational_part(&self, x: &BigRational) -> Result<BigRational> {
        let c = BigRational::new(
            BigInt::from(*self.coefficient.numer()),
            BigInt::from(*self.coefficient.denom()),
        );
        self.factors
            .iter()
            .filter(|f| !f.is_radical())
            .try_fold(c, |acc, f| {
                Ok(acc * pow_exact(&f.base.eval_exact(x)?, f.exponent.to_integer())?)
            })
    }

    /// Exact value, available when the form has no `pi` and no radicals.
    pub fn eval_exact(&self, x: &BigRational) -> Option<BigRational> {
        if self.pi_power != 0 || self.has_radicals() {
            return None;
        }
        let mut v = self.rational_part(x).ok()?;
        if self.scale != 1.0 {
            v *= BigRational::from_float(self.scale)?;
        }
        Some(v)
    }

    /// Value at `x` in `[0, 1)`. The rational part is computed exactly at the
    /// binary value of `x` and rounded once.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} must lie in [0, 1)")));
        }
        let xr = BigRational::from_float(x).expect("finite");
        let mut value = self
            .rational_part(&xr)?
            .to_f64()
            .expect("finite rational");
        value *= PI.powi(self.pi_power);
        for f in self.factors.iter().filter(|f| f.is_radical()) {
            let radicand = f.base.eval_exact(&xr)?;
            if !radicand.is_positive() {
                return Err(Error::Domain(format!(
                    "radicand of {} is not positive at x = {x}",
                    self.name
                )));
            }
            let e = *f.exponent.numer() as f64 / *f.exponent.denom() as f64;
            value *= radicand.to_f64().expect("finite").powf(e);
        }
        Ok(value * self.scale)
    }

    /// Plain floating-point evaluation without exact arithmetic.
    pub fn eval_fast(&self, x: f64) -> f64 {
        let c = *self.coefficient.numer() as f64 / *self.coefficient.denom() as f64;
        self.factors.iter().fold(c * PI.powi(self.pi_power) * self.scale, |acc, f| {
            let b = match &f.base {
                Base::Poly(p) => p.eval(x),
                Base::Quotient(n, d) => n.eval(x) / d.eval(x),
            };
            let e = *f.exponent.numer() as f64 / *f.exponent.denom() as f64;
            acc * if f.is_radical() { b.powf(e) } else { b.powi(e as i32) }
        })
    }
}

/// Named collection of closed forms.
#[derive(Debug, Clone)]
pub struct Registry {
    forms: Vec<ClosedForm>,
    index: BTreeMap<String, usize>,
}

static STANDARD: LazyLock<Registry> = LazyLock::new(|| Registry::from_forms(standard_forms()));

impl Registry {
    pub fn from_forms(forms: Vec<ClosedForm>) -> Self {
        let index = forms
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.clone(), i))
            .collect();
        Self { forms, index }
    }

    /// Every form transcribed for the normalization point.
    pub fn standard() -> &'static Registry {
        &STANDARD
    }

    /// Copy with one form multiplied by `factor`, for exercising failure paths.
    pub fn perturbed(&self, name: &str, factor: f64) -> Result<Registry> {
        let mut out = self.clone();
        let i = *self
            .index
            .get(name)
            .ok_or_else(|| Error::UnknownQuantity(name.to_string()))?;
        out.forms[i].scale *= factor;
        Ok(out)
    }

    pub fn get(&self, name: &str) -> Result<&ClosedForm> {
        self.index
            .get(name)
            .map(|&i| &self.forms[i])
            .ok_or_else(|| Error::UnknownQuantity(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.forms.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn forms(&self) -> &[ClosedForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn eval(&self, name: &str, x: f64) -> Result<f64> {
        self.get(name)?.eval(x)
    }
}

/// Names of all registered forms.
pub fn closed_form_names() -> Vec<&'static str> {
    Registry::standard().names()
}

/// Evaluates a registered form at `x` in `[0, 1)`.
pub fn eval_closed_form(name: &str, x: f64) -> Result<f64> {
    Registry::standard().eval(name, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(name: &str, num: i64, den: i64) -> BigRational {
        Registry::standard()
            .get(name)
            .unwrap()
            .eval_exact(&BigRational::new(num.into(), den.into()))
            .unwrap()
    }

    fn ratio(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn poly_display_and_eval() {
        let p = Poly::new(&[15, 0, -30, 0, 23, 0, -8, 0, 1]);
        assert_eq!(p.to_string(), "x^8 - 8x^6 + 23x^4 - 30x^2 + 15");
        assert_eq!(p.degree(), 8);
        assert_eq!(p.eval(1.0), 1.0);
        assert_eq!(Poly::new(&[0, 0]).to_string(), "0");
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(exact("g11", 0, 1), ratio(3, 2));
        assert_eq!(exact("g12", 0, 1), ratio(0, 1));
        assert_eq!(exact("g22", 0, 1), ratio(5, 1));
        assert_eq!(exact("det_g", 0, 1), ratio(15, 2));
        assert_eq!(exact("g_inv_11", 0, 1), ratio(2, 3));
        assert_eq!(exact("g_inv_22", 0, 1), ratio(1, 5));
        assert_eq!(exact("Gamma_2_11", 0, 1), ratio(-4, 5));
        assert_eq!(exact("R_1111", 0, 1), ratio(-3, 10));
        assert_eq!(exact("R_2111", 0, 1), ratio(0, 1));
        assert_eq!(exact("H_X", 0, 1), ratio(-2, 15));
        assert_eq!(exact("H_Y", 0, 1), ratio(-6, 25));
        assert_eq!(exact("B_XY", 0, 1), ratio(-13, 15));
        assert_eq!(exact("f2", 0, 1), ratio(1, 1));
        assert_eq!(exact("f1", 0, 1), ratio(1755, 1));
    }

    #[test]
    fn odd_entries_vanish_at_origin() {
        for name in ["Gamma_1_11", "Gamma_1_12", "Gamma_1_22", "Gamma_2_12", "Gamma_2_22"] {
            assert_eq!(exact(name, 0, 1), ratio(0, 1), "{name}");
        }
        for name in ["R_XXXY", "R_YYYX", "R_XYXY"] {
            assert_eq!(eval_closed_form(name, 0.0).unwrap(), 0.0, "{name}");
        }
    }

    #[test]
    fn kernel_entries_at_origin() {
        let pi2 = PI * PI;
        assert!((eval_closed_form("dB_2_2b", 0.0).unwrap() - 3.0 / (2.0 * pi2)).abs() < 1e-16);
        assert_eq!(eval_closed_form("dB_1", 0.0).unwrap(), 0.0);
    }

    #[test]
    fn metric_inverse_identity_exact() {
        for (n, d) in [(0, 1), (1, 4), (1, 2), (3, 4), (9, 10)] {
            let g11 = exact("g11", n, d);
            let g12 = exact("g12", n, d);
            let g22 = exact("g22", n, d);
            let i11 = exact("g_inv_11", n, d);
            let i12 = exact("g_inv_12", n, d);
            let i22 = exact("g_inv_22", n, d);
            assert_eq!(&g11 * &i11 + &g12 * &i12, ratio(1, 1));
            assert_eq!(&g11 * &i12 + &g12 * &i22, ratio(0, 1));
            assert_eq!(&g12 * &i12 + &g22 * &i22, ratio(1, 1));
            assert_eq!(&g11 * &g22 - &g12 * &g12, exact("det_g", n, d));
        }
    }

    #[test]
    fn sectional_forms_are_consistent_exactly() {
        for (n, d) in [(0, 1), (1, 4), (1, 2), (3, 4)] {
            let hx = exact("H_X", n, d);
            let r = exact("R_1111", n, d);
            let g = exact("g11", n, d);
            assert_eq!(hx, &r / (&g * &g));
        }
    }

    #[test]
    fn h_y_product_identity() {
        let reg = Registry::standard();
        for (n, d) in [(0i64, 1i64), (1, 4), (1, 2), (3, 4)] {
            let x = ratio(n, d);
            let hy = exact("H_Y", n, d);
            let t = Poly::new(&[3, 0, -2]).eval_exact(&x);
            let u = Poly::new(&[5, 0, -5, 0, 1]).eval_exact(&x);
            let v = Poly::new(&[3, 0, -3, 0, 1]).eval_exact(&x);
            let lhs = hy * &t * &t * &u * &u * &u * &v * &v;
            let rhs = reg.get("H_Y_poly").unwrap().eval_exact(&x).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn printed_bisectional_value() {
        let b = eval_closed_form("B_XY", 0.9).unwrap();
        assert!((b - 0.006_790_73).abs() < 1e-8, "{b}");
    }

    #[test]
    fn registry_contents() {
        let names = closed_form_names();
        assert!(names.len() >= 48);
        assert!(names.contains(&"H_Y"));
        for name in &names {
            assert!(eval_closed_form(name, 0.5).is_ok(), "{name}");
        }
        assert!(matches!(eval_closed_form("nope", 0.5), Err(Error::UnknownQuantity(_))));
        assert!(matches!(eval_closed_form("g11", 1.0), Err(Error::Domain(_))));
        assert!(matches!(eval_closed_form("g11", -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn fast_and_exact_paths_agree() {
        for form in Registry::standard().forms() {
            for k in 1..20 {
                let x = 0.05 * k as f64;
                let a = form.eval(x).unwrap();
                let b = form.eval_fast(x);
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-3), "{} {x}", form.name());
            }
        }
    }

    #[test]
    fn denominators_and_radicands_keep_sign() {
        let grid: Vec<BigRational> = (0..100).map(|k| ratio(k, 100)).collect();
        for form in Registry::standard().forms() {
            for f in form.factors() {
                let watched: Vec<&Poly> = match &f.base {
                    Base::Poly(p) if f.exponent < Rational64::from(0) || f.is_radical() => vec![p],
                    Base::Quotient(n, d) if f.is_radical() => vec![n, d],
                    Base::Quotient(_, d) => vec![d],
                    _ => vec![],
                };
                for p in watched {
                    let signs: Vec<i32> = grid
                        .iter()
                        .map(|x| {
                            let v = p.eval_exact(x);
                            assert!(!v.is_zero(), "{} vanishes in {}", p, form.name());
                            if v.is_positive() { 1 } else { -1 }
                        })
                        .collect();
                    assert!(signs.windows(2).all(|w| w[0] == w[1]), "{} changes sign in {}", p, form.name());
                    if f.is_radical() {
                        assert!(f.base.eval_exact(&grid[50]).unwrap().is_positive());
                    }
                }
            }
        }
    }

    #[test]
    fn perturbed_registry() {
        let reg = Registry::standard().perturbed("g11", 1.5).unwrap();
        assert_eq!(reg.eval("g11", 0.0).unwrap(), 2.25);
        assert!(Registry::standard().perturbed("missing", 2.0).is_err());
    }

    #[test]
    fn sign_claims_on_grid() {
        for k in 0..100 {
            let x = k as f64 / 100.0;
            assert!(eval_closed_form("H_X", x).unwrap() < 0.0);
            assert!(eval_closed_form("H_Y", x).unwrap() < 0.0);
        }
        assert!(eval_closed_form("B_XY", 0.0).unwrap() < 0.0);
        assert!(eval_closed_form("B_XY", 0.9).unwrap() > 0.0);
    }

    #[test]
    fn boundary_limits() {
        let hx = |x| eval_closed_form("H_X", x).unwrap();
        let hy = |x| eval_closed_form("H_Y", x).unwrap();
        let b = |x| eval_closed_form("B_XY", x).unwrap();
        assert!((hx(0.9999) + 1.0).abs() <= 1e-2);
        assert!((hy(0.9999) + 1.0).abs() <= 1e-2);
        assert!(b(0.9999).abs() <= 1e-2);
        assert!((hx(0.9999) + 1.0).abs() < (hx(0.999) + 1.0).abs());
        assert!((hy(0.9999) + 1.0).abs() < (hy(0.999) + 1.0).abs());
        assert!(b(0.9999).abs() < b(0.999).abs());
    }
}
