//! The Bergman kernel of the symmetrized bidisc, pulled back to the bidisc.
//!
//! In polarized form, with `c` standing for the conjugate slots,
//!
//! ```text
//! B(z; c) = 1/(2 pi^2) * 1/((z1 - z2)(c1 - c2))
//!           * [ 1/((1 - z1 c1)^2 (1 - z2 c2)^2) - 1/((1 - z1 c2)^2 (1 - z2 c1)^2) ]
//! ```
//!
//! Writing `A = (1 - z1 c1)(1 - z2 c2)` and `A' = (1 - z1 c2)(1 - z2 c1)` one
//! has `A' - A = (z1 - z2)(c1 - c2)`, so the bracket factors and
//!
//! ```text
//! B(z; c) = (A + A') / (2 pi^2 A^2 A'^2),
//! ```
//!
//! which is regular on the diagonal `z1 = z2`. Both `A + A'` and `A A'` are
//! symmetric in the roots, giving the kernel directly in `w = (z1 + z2, z1 z2)`
//! (see [`Kernel::eval_symmetric`]).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::jet::{Coefficient, Jet, Jet4, MultiIndex, ExtendedJet};
use crate::point::ComplexPoint2;

/// Below this separation of the roots the factored form is used.
pub const DEFAULT_DIAGONAL_THRESHOLD: f64 = 1e-6;

fn prefactor() -> f64 {
    1.0 / (2.0 * PI * PI)
}

/// Arguments of the polarized kernel: holomorphic slots `z` and
/// antiholomorphic slots `c` (the values substituted for `conj(z)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizedKernelArgs {
    z: ComplexPoint2,
    c: ComplexPoint2,
    on_diagonal: bool,
}

impl PolarizedKernelArgs {
    /// The on-diagonal arguments `(z; conj z)`.
    pub fn on_diagonal(z: ComplexPoint2) -> Self {
        Self {
            z,
            c: z.conj(),
            on_diagonal: true,
        }
    }

    pub fn polarized(z: ComplexPoint2, c: ComplexPoint2) -> Self {
        Self {
            z,
            c,
            on_diagonal: z.conj() == c,
        }
    }

    /// On-diagonal arguments at the normalization point `(x, 0)`.
    pub fn normalized(x: f64) -> Self {
        Self::on_diagonal(ComplexPoint2::real(x, 0.0))
    }

    pub fn z(&self) -> ComplexPoint2 {
        self.z
    }

    pub fn c(&self) -> ComplexPoint2 {
        self.c
    }

    pub fn is_on_diagonal(&self) -> bool {
        self.on_diagonal
    }

    /// Simultaneous swap of the two holomorphic and the two antiholomorphic slots.
    pub fn swapped(&self) -> Self {
        Self {
            z: self.z.swapped(),
            c: self.c.swapped(),
            on_diagonal: self.on_diagonal,
        }
    }

    fn slots(&self) -> [Complex64; 4] {
        [self.z.first, self.z.second, self.c.first, self.c.second]
    }

    fn check_domain(&self) -> Result<()> {
        for (name, v) in ["z1", "z2", "c1", "c2"].iter().zip(self.slots()) {
            if !(v.norm() < 1.0) {
                return Err(Error::Domain(format!(
                    "{name} = {v} lies outside the unit disc"
                )));
            }
        }
        Ok(())
    }

    fn root_separation(&self) -> f64 {
        (self.z.first - self.z.second)
            .norm()
            .min((self.c.first - self.c.second).norm())
    }
}

/// Evaluator for the pulled-back kernel.
///
/// `scale` multiplies the kernel uniformly; the metric and everything derived
/// from it must not depend on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub scale: f64,
    pub diagonal_threshold: f64,
}

impl Default for Kernel {
    fn default() -> Self {
        Self {
            scale: 1.0,
            diagonal_threshold: DEFAULT_DIAGONAL_THRESHOLD,
        }
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl Kernel {
    pub fn with_scale(scale: f64) -> Self {
        Self {
            scale,
            ..Self::default()
        }
    }

    /// Kernel value. Uses the literal expression away from the diagonal and
    /// the factored one when either root pair is closer than the threshold.
    pub fn eval(&self, args: &PolarizedKernelArgs) -> Result<Complex64> {
        args.check_domain()?;
        let value = if args.root_separation() < self.diagonal_threshold {
            factored(args)
        } else {
            literal(args)
        };
        Ok(value * self.scale)
    }

    /// Order-4 jet of the kernel in `(z1, z2, c1, c2)` around `center`.
    ///
    /// The jet is built from the factored expression, which is regular on
    /// the diagonal, so any point of the polydisc is accepted.
    pub fn jet(&self, center: &PolarizedKernelArgs) -> Result<Jet4> {
        center.check_domain()?;
        Ok(reduced_jet(center.slots()).scale(Complex64::new(self.constant_factor(), 0.0)))
    }

    /// The constant `scale / (2 pi^2)` in front of the rational part.
    pub fn constant_factor(&self) -> f64 {
        prefactor() * self.scale
    }

    /// Kernel in symmetric coordinates: `w = Phi(z)` and `v = Phi(c)`.
    ///
    /// ```text
    /// B = (2 - w1 v1 + 2 w2 v2) / (2 pi^2 D^2),
    /// D = (1 + w2 v2)^2 - (1 + w2 v2) w1 v1 + v2 w1^2 + w2 v1^2 - 4 w2 v2.
    /// ```
    pub fn eval_symmetric(&self, w: ComplexPoint2, v: ComplexPoint2) -> Complex64 {
        let (w1, w2, v1, v2) = (w.first, w.second, v.first, v.second);
        let s = one() + w2 * v2;
        let d = s * s - s * w1 * v1 + v2 * w1 * w1 + w2 * v1 * v1 - 4.0 * w2 * v2;
        let num = 2.0 - w1 * v1 + 2.0 * w2 * v2;
        num / (d * d) * (prefactor() * self.scale)
    }

    /// Order-4 jet of [`Kernel::eval_symmetric`] in `(w1, w2, v1, v2)`.
    pub fn symmetric_jet(&self, w: ComplexPoint2, v: ComplexPoint2) -> Jet4 {
        let [w1, w2, v1, v2] = Jet4::seed([w.first, w.second, v.first, v.second]);
        let wv2 = &w2 * &v2;
        let s = &wv2 + one();
        let wv1 = &w1 * &v1;
        let d = &(&(&s * &s) - &(&s * &wv1))
            + &(&(&(&v2 * &w1) * &w1) + &(&(&w2 * &v1) * &v1))
            - wv2.scale(Complex64::new(4.0, 0.0));
        let num = &(&wv2.scale(Complex64::new(2.0, 0.0)) - &wv1) + Complex64::new(2.0, 0.0);
        (num / d.powi(2)).scale(Complex64::new(prefactor() * self.scale, 0.0))
    }
}

fn literal(args: &PolarizedKernelArgs) -> Complex64 {
    let [z1, z2, c1, c2] = args.slots();
    let first = ((one() - z1 * c1) * (one() - z2 * c2)).powi(2).inv();
    let second = ((one() - z1 * c2) * (one() - z2 * c1)).powi(2).inv();
    prefactor() / ((z1 - z2) * (c1 - c2)) * (first - second)
}

fn factored(args: &PolarizedKernelArgs) -> Complex64 {
    let [z1, z2, c1, c2] = args.slots();
    let a = (one() - z1 * c1) * (one() - z2 * c2);
    let a_swap = (one() - z1 * c2) * (one() - z2 * c1);
    prefactor() * (a + a_swap) / (a * a_swap).powi(2)
}

/// Jet of `(A + A') / (A A')^2`, the kernel without its constant factor.
fn reduced_jet<T: Coefficient>(slots: [T; 4]) -> Jet<T> {
    let [z1, z2, c1, c2] = Jet::seed(slots);
    let one = Jet::constant(T::one());
    let a = (&one - &z1 * &c1) * (&one - &z2 * &c2);
    let a_swap = (&one - &z1 * &c2) * (&one - &z2 * &c1);
    (&a + &a_swap) / (&a * &a_swap).powi(2)
}

/// Double-double jet of the rational part of the kernel at a center whose
/// slots are all real. Multiply by [`Kernel::constant_factor`] to get the
/// kernel.
pub fn extended_kernel_jet(center: &PolarizedKernelArgs) -> Result<ExtendedJet> {
    center.check_domain()?;
    let slots = center.slots();
    if slots.iter().any(|s| s.im != 0.0) {
        return Err(Error::Domain(
            "extended-precision kernel jets need real slot values".into(),
        ));
    }
    Ok(reduced_jet(slots.map(|s| TwoFloat::from(s.re))))
}

/// Kernel value with the default evaluator.
pub fn eval_kernel(args: &PolarizedKernelArgs) -> Result<Complex64> {
    Kernel::default().eval(args)
}

/// Kernel jet with the default evaluator.
pub fn kernel_jet(center: &PolarizedKernelArgs) -> Result<Jet4> {
    Kernel::default().jet(center)
}

/// One slot of a derivative label: holomorphic (`1`, `2`) or
/// antiholomorphic (`1b`, `2b`) with respect to coordinate 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Hol(u8),
    Anti(u8),
}

/// A mixed partial derivative such as `d^3 / dz1 dconj(z1) dz2`,
/// written `1_1b_2`. Slot order is kept for display only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivativeLabel(Vec<Slot>);

impl DerivativeLabel {
    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Exponents over `(z1, z2, c1, c2)`.
    pub fn multi_index(&self) -> MultiIndex {
        let mut m = [0u8; 4];
        for s in &self.0 {
            match *s {
                Slot::Hol(i) => m[i as usize - 1] += 1,
                Slot::Anti(i) => m[i as usize + 1] += 1,
            }
        }
        m
    }

    /// The label with coordinate indices 1 and 2 exchanged.
    pub fn swapped(&self) -> Self {
        Self(
            self.0
                .iter()
                .map(|s| match *s {
                    Slot::Hol(i) => Slot::Hol(3 - i),
                    Slot::Anti(i) => Slot::Anti(3 - i),
                })
                .collect(),
        )
    }

    /// Holomorphic and antiholomorphic coordinate indices, zero-based.
    pub fn split(&self) -> (Vec<usize>, Vec<usize>) {
        let mut hol = Vec::new();
        let mut anti = Vec::new();
        for s in &self.0 {
            match *s {
                Slot::Hol(i) => hol.push(i as usize - 1),
                Slot::Anti(i) => anti.push(i as usize - 1),
            }
        }
        (hol, anti)
    }
}

impl FromStr for DerivativeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let slots = s
            .split('_')
            .map(|tok| match tok {
                "1" => Ok(Slot::Hol(1)),
                "2" => Ok(Slot::Hol(2)),
                "1b" => Ok(Slot::Anti(1)),
                "2b" => Ok(Slot::Anti(2)),
                _ => Err(Error::UnknownQuantity(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if slots.is_empty() {
            return Err(Error::UnknownQuantity(s.to_string()));
        }
        Ok(Self(slots))
    }
}

impl fmt::Display for DerivativeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|s| match s {
                Slot::Hol(i) => i.to_string(),
                Slot::Anti(i) => format!("{i}b"),
            })
            .collect();
        f.write_str(&parts.join("_"))
    }
}

/// Every kernel derivative tabulated at the normalization point, in the
/// order they are usually listed.
pub const TABULATED_LABELS: [&str; 39] = [
    "1", "1b", "2", "2b",
    "1_1b", "1_2b", "2_1b", "2_2b", "1_1", "1_2", "2_2",
    "1_1b_1", "1_1b_2", "1_2b_1", "2_1b_1", "1_2b_2", "2_2b_1", "2_1b_2", "2_2b_2",
    "1_1b_1b", "1_1b_2b", "1_2b_1b", "2_1b_1b", "1_2b_2b", "2_2b_1b", "2_1b_2b", "2_2b_2b",
    "1_1b_1_1b", "1_1b_1_2b", "1_1b_2_1b", "1_2b_1_1b", "1_1b_2_2b", "1_2b_2_1b",
    "2_2b_1_1b", "1_2b_1_2b", "2_2b_1_2b", "2_2b_2_1b", "1_2b_2_2b", "2_2b_2_2b",
];

pub fn tabulated_labels() -> Vec<DerivativeLabel> {
    TABULATED_LABELS
        .iter()
        .map(|s| s.parse().expect("static label"))
        .collect()
}

/// Kernel derivatives at `(x, 0)` and at the other preimage `(0, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTable {
    pub x: f64,
    pub at_x0: BTreeMap<DerivativeLabel, f64>,
    pub at_0x: BTreeMap<DerivativeLabel, f64>,
    /// Entry for each label read at `(0, x)` with indices 1 and 2 exchanged.
    pub at_0x_relabeled: BTreeMap<DerivativeLabel, f64>,
}

impl DerivativeTable {
    /// Largest relative mismatch between `at_x0` and `at_0x_relabeled`.
    pub fn preimage_mismatch(&self) -> f64 {
        self.at_x0
            .iter()
            .map(|(label, v)| {
                let other = self.at_0x_relabeled[label];
                (v - other).abs() / v.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// All tabulated kernel derivatives at `(x, 0)` and `(0, x)`, read off the jet.
pub fn derivative_table(x: f64) -> Result<DerivativeTable> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} must lie in [0, 1)")));
    }
    let kernel = Kernel::default();
    let jet_x0 = kernel.jet(&PolarizedKernelArgs::normalized(x))?;
    let jet_0x = kernel.jet(&PolarizedKernelArgs::on_diagonal(ComplexPoint2::real(0.0, x)))?;
    let mut table = DerivativeTable {
        x,
        at_x0: BTreeMap::new(),
        at_0x: BTreeMap::new(),
        at_0x_relabeled: BTreeMap::new(),
    };
    for label in tabulated_labels() {
        let m = label.multi_index();
        let swapped = label.swapped().multi_index();
        table.at_x0.insert(label.clone(), jet_x0.derivative(&m).re);
        table.at_0x.insert(label.clone(), jet_0x.derivative(&m).re);
        table.at_0x_relabeled.insert(label, jet_0x.derivative(&swapped).re);
    }
    Ok(table)
}
