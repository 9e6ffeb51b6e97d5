//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores every Taylor coefficient of total degree at most four
//! of a function of four complex variables. For the kernel the variables are
//! the polarized slots `(z1, z2, c1, c2)`, where `c` stands in for the
//! conjugate coordinates; for the symmetric form they are `(w1, w2, v1, v2)`.
//!
//! Coefficients are normalized as `d^a f(p) / a!`, so the coefficient of a
//! product is the Cauchy product of coefficients truncated at degree four.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::LazyLock;

use num_complex::Complex64;
use num_traits::{FromPrimitive, Num};
use twofloat::TwoFloat;

/// Number of variables carried by a jet.
pub const NVARS: usize = 4;
/// Maximum total degree kept.
pub const ORDER: usize = 4;
/// Number of multi-indices of total degree `<= ORDER` in `NVARS` variables.
pub const LEN: usize = 70;

/// Exponent vector of a monomial.
pub type MultiIndex = [u8; NVARS];

struct Tables {
    indices: Vec<MultiIndex>,
    /// Dense lookup over `5^4` exponent vectors; `usize::MAX` marks out-of-range.
    lookup: Vec<usize>,
    /// `(i, j, k)` with `indices[i] + indices[j] == indices[k]`.
    products: Vec<(usize, usize, usize)>,
}

fn dense_key(m: &MultiIndex) -> usize {
    m.iter()
        .fold(0, |acc, &e| acc * (ORDER + 1) + e as usize)
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut indices = Vec::with_capacity(LEN);
    for degree in 0..=ORDER {
        for a in (0..=degree).rev() {
            for b in (0..=degree - a).rev() {
                for c in (0..=degree - a - b).rev() {
                    let d = degree - a - b - c;
                    indices.push([a as u8, b as u8, c as u8, d as u8]);
                }
            }
        }
    }
    assert_eq!(indices.len(), LEN);

    let mut lookup = vec![usize::MAX; (ORDER + 1).pow(NVARS as u32)];
    for (i, m) in indices.iter().enumerate() {
        lookup[dense_key(m)] = i;
    }

    let mut products = Vec::new();
    for (i, a) in indices.iter().enumerate() {
        for (j, b) in indices.iter().enumerate() {
            if degree(a) + degree(b) > ORDER {
                continue;
            }
            let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
            products.push((i, j, lookup[dense_key(&sum)]));
        }
    }

    Tables {
        indices,
        lookup,
        products,
    }
});

/// Total degree of a multi-index.
pub fn degree(m: &MultiIndex) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// `a!` for a multi-index.
pub fn factorial(m: &MultiIndex) -> f64 {
    m.iter()
        .map(|&e| (1..=e as u32).product::<u32>() as f64)
        .product()
}

/// All multi-indices in storage order (by degree, then lexicographically descending).
pub fn multi_indices() -> &'static [MultiIndex] {
    &TABLES.indices
}

/// Storage position of a multi-index, or `None` when its degree exceeds [`ORDER`].
pub fn position(m: &MultiIndex) -> Option<usize> {
    if degree(m) > ORDER {
        return None;
    }
    Some(TABLES.lookup[dense_key(m)])
}

/// Scalar type carried by a [`Jet`].
pub trait Coefficient: Clone + PartialEq + Num + Neg<Output = Self> + FromPrimitive {}

impl<T: Clone + PartialEq + Num + Neg<Output = T> + FromPrimitive> Coefficient for T {}

/// `1 / a` with one Newton correction. The double-double quotient from
/// `twofloat` is only accurate to about `1e-16`; its products are exact
/// enough that the correction restores full precision.
pub fn reciprocal<T: Coefficient>(a: T) -> T {
    let r = T::one() / a.clone();
    r.clone() + r.clone() * (T::one() - a * r)
}

/// Order-4 Taylor jet in four variables.
#[derive(Clone, PartialEq)]
pub struct Jet<T> {
    coeffs: [T; LEN],
}

/// Jet over double-precision complex numbers.
pub type Jet4 = Jet<Complex64>;
/// Jet over double-double reals (about 106 bits), for real centers.
pub type ExtendedJet = Jet<TwoFloat>;

impl<T: Coefficient + std::fmt::Debug> std::fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut map = f.debug_map();
        for (m, c) in TABLES.indices.iter().zip(self.coeffs.iter()) {
            if !c.is_zero() {
                map.entry(m, c);
            }
        }
        map.finish()
    }
}

fn factorial_int(m: &MultiIndex) -> u64 {
    m.iter().map(|&e| (1..=e as u64).product::<u64>()).product()
}

impl<T: Coefficient> Jet<T> {
    pub fn zero() -> Self {
        Self {
            coeffs: std::array::from_fn(|_| T::zero()),
        }
    }

    pub fn constant(value: T) -> Self {
        let mut jet = Self::zero();
        jet.coeffs[0] = value;
        jet
    }

    /// The coordinate function `u_var` expanded around `center`.
    pub fn variable(var: usize, center: T) -> Self {
        assert!(var < NVARS, "variable index {var} out of range");
        let mut jet = Self::constant(center);
        let mut m = [0u8; NVARS];
        m[var] = 1;
        jet.coeffs[TABLES.lookup[dense_key(&m)]] = T::one();
        jet
    }

    /// Seeds all four variables at `center`.
    pub fn seed(center: [T; NVARS]) -> [Self; NVARS] {
        std::array::from_fn(|v| Self::variable(v, center[v].clone()))
    }

    pub fn from_coefficients(coeffs: [T; LEN]) -> Self {
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[T; LEN] {
        &self.coeffs
    }

    pub fn value(&self) -> T {
        self.coeffs[0].clone()
    }

    /// Taylor coefficient at `m`, zero beyond the truncation order.
    pub fn coeff(&self, m: &MultiIndex) -> T {
        position(m).map_or_else(T::zero, |i| self.coeffs[i].clone())
    }

    /// Partial derivative `d^m f` at the center, i.e. `coeff(m) * m!`.
    pub fn derivative(&self, m: &MultiIndex) -> T {
        self.coeff(m) * T::from_u64(factorial_int(m)).expect("small factorial")
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            coeffs: std::array::from_fn(|i| self.coeffs[i].clone() * factor.clone()),
        }
    }

    /// Jet of `d f / d u_var`.
    ///
    /// The top-degree coefficients of the result are unknown and set to
    /// zero; the returned jet is exact only through degree `ORDER - 1`.
    pub fn differentiate(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (i, m) in TABLES.indices.iter().enumerate() {
            let mut up = *m;
            up[var] += 1;
            if let Some(j) = position(&up) {
                out.coeffs[i] = self.coeffs[j].clone() * T::from_u8(up[var]).expect("small");
            }
        }
        out
    }

    /// Applies the power series `sum_k series[k] * h^k` to the
    /// non-constant part `h` of `self`.
    fn compose_nilpotent(&self, series: &[T; ORDER + 1]) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = T::zero();
        // Horner in h; h^5 vanishes after truncation.
        let mut acc = Self::constant(series[ORDER].clone());
        for k in (0..ORDER).rev() {
            acc = &acc * &h;
            acc.coeffs[0] = acc.coeffs[0].clone() + series[k].clone();
        }
        acc
    }

    pub fn recip(&self) -> Self {
        let a0 = self.value();
        assert!(!a0.is_zero(), "reciprocal of a jet with zero constant term");
        let inv = reciprocal(a0);
        let mut term = inv.clone();
        let series = std::array::from_fn(|_| {
            let s = term.clone();
            term = term.clone() * -inv.clone();
            s
        });
        self.compose_nilpotent(&series)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::constant(T::one());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Jet<U> {
        Jet {
            coeffs: std::array::from_fn(|i| f(&self.coeffs[i])),
        }
    }
}

impl Jet4 {
    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let a0 = self.coeffs[0];
        assert!(a0.norm() > 0.0, "logarithm of a jet with zero constant term");
        let inv = a0.inv();
        let mut series = [Complex64::new(0.0, 0.0); ORDER + 1];
        series[0] = a0.ln();
        let mut power = inv;
        for (k, s) in series.iter_mut().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *s = power * (sign / k as f64);
            power *= inv;
        }
        self.compose_nilpotent(&series)
    }

    /// Largest coefficient modulus difference, for tests and diagnostics.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl<T: Coefficient> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &Jet<T>) -> Jet<T> {
        Jet {
            coeffs: std::array::from_fn(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone()),
        }
    }
}

impl<T: Coefficient> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &Jet<T>) -> Jet<T> {
        Jet {
            coeffs: std::array::from_fn(|i| self.coeffs[i].clone() - rhs.coeffs[i].clone()),
        }
    }
}

impl<T: Coefficient> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &Jet<T>) -> Jet<T> {
        let mut out = Jet::<T>::zero();
        for &(i, j, k) in TABLES.products.iter() {
            if self.coeffs[i].is_zero() || rhs.coeffs[j].is_zero() {
                continue;
            }
            out.coeffs[k] =
                out.coeffs[k].clone() + self.coeffs[i].clone() * rhs.coeffs[j].clone();
        }
        out
    }
}

impl<T: Coefficient> Div for &Jet<T> {
    type Output = Jet<T>;
    fn div(self, rhs: &Jet<T>) -> Jet<T> {
        self * &rhs.recip()
    }
}

impl<T: Coefficient> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet {
            coeffs: std::array::from_fn(|i| -self.coeffs[i].clone()),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl<T: Coefficient> $tr for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: Coefficient> $tr<&Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &Jet<T>) -> Jet<T> {
                (&self).$method(rhs)
            }
        }
        impl<T: Coefficient> $tr<Jet<T>> for &Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl<T: Coefficient> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

impl<T: Coefficient> Add<T> for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].clone() + rhs;
        out
    }
}

impl<T: Coefficient> Add<T> for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        &self + rhs
    }
}

impl<T: Coefficient> Mul<T> for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Coefficient> Mul<T> for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn double_double_reciprocal_is_exact_to_working_precision() {
        for v in [0.7, 3.0, 1e-5, -0.123456789] {
            let a = TwoFloat::from(v) + TwoFloat::from(v * 1e-17);
            let residual = reciprocal(a) * a - 1.0;
            assert!(f64::from(residual).abs() < 1e-30, "{v}: {residual:?}");
        }
    }

    #[test]
    fn index_tables_are_consistent() {
        assert_eq!(multi_indices().len(), LEN);
        for (i, m) in multi_indices().iter().enumerate() {
            assert_eq!(position(m), Some(i));
        }
        assert_eq!(multi_indices()[0], [0, 0, 0, 0]);
        assert_eq!(position(&[5, 0, 0, 0]), None);
        assert_eq!(position(&[2, 2, 1, 0]), None);
    }

    #[test]
    fn variable_product_gives_mixed_monomial() {
        let [a, b, _, d] = Jet4::seed([c(0.0); 4]);
        let prod = &(&a * &b) * &(&d * &d);
        assert_eq!(prod.coeff(&[1, 1, 0, 2]), c(1.0));
        assert_eq!(prod.derivative(&[1, 1, 0, 2]), c(2.0));
        assert_eq!(prod.value(), c(0.0));
        // degree 5 product truncates to zero
        let five = &prod * &a;
        assert!(five.coefficients().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn reciprocal_matches_geometric_series() {
        // f = 1 / (1 - u0) at u0 = 0.5  =>  d^k f = k! / 0.5^(k+1)
        let [u, ..] = Jet4::seed([c(0.5), c(0.0), c(0.0), c(0.0)]);
        let f = (Jet4::constant(c(1.0)) - u).recip();
        for k in 0..=4u8 {
            let expect = (1..=k as u32).product::<u32>() as f64 / 0.5f64.powi(k as i32 + 1);
            let got = f.derivative(&[k, 0, 0, 0]).re;
            assert!((got - expect).abs() < 1e-12 * expect, "k={k}: {got} vs {expect}");
        }
    }

    #[test]
    fn log_of_product_is_sum_of_logs() {
        let [a, b, cc, d] = Jet4::seed([c(0.3), c(-0.2), c(0.7), c(1.1)]);
        let f = &(&a * &b) + &cc;
        let g = &(&cc * &d) + c(2.0);
        let lhs = (&f * &g).ln();
        let rhs = &f.ln() + &g.ln();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn log_derivatives_of_single_variable() {
        // d^k log(u) at u = 2: (-1)^(k+1) (k-1)! / 2^k
        let [_, u, ..] = Jet4::seed([c(0.0), c(2.0), c(0.0), c(0.0)]);
        let f = u.ln();
        assert!((f.value().re - 2f64.ln()).abs() < 1e-15);
        let expect = [0.5, -0.25, 0.25, -0.375];
        for k in 1..=4u8 {
            let got = f.derivative(&[0, k, 0, 0]).re;
            assert!((got - expect[k as usize - 1]).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn differentiate_shifts_coefficients() {
        let [a, b, ..] = Jet4::seed([c(1.0), c(2.0), c(0.0), c(0.0)]);
        // f = a^2 b, df/da = 2ab
        let f = &a.powi(2) * &b;
        let df = f.differentiate(0);
        let expect = (&a * &b).scale(c(2.0));
        // exact through degree 3
        for m in multi_indices() {
            if degree(m) <= 3 {
                assert!((df.coeff(m) - expect.coeff(m)).norm() < 1e-14, "{m:?}");
            }
        }
    }

    fn poly_jet(coeffs: &[f64]) -> Jet4 {
        let mut arr = [Complex64::new(0.0, 0.0); LEN];
        for (slot, v) in arr.iter_mut().zip(coeffs.iter()) {
            *slot = c(*v);
        }
        Jet4::from_coefficients(arr)
    }

    /// Schoolbook product of two polynomials given by coefficient maps,
    /// truncated at degree 4; independent of the precomputed product table.
    fn brute_product(a: &Jet4, b: &Jet4) -> Jet4 {
        let mut out = Jet4::zero();
        let mut coeffs = *out.coefficients();
        for ma in multi_indices() {
            for mb in multi_indices() {
                let sum = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3]];
                if degree(&sum) <= ORDER {
                    let k = multi_indices().iter().position(|m| *m == sum).unwrap();
                    coeffs[k] += a.coeff(ma) * b.coeff(mb);
                }
            }
        }
        out = Jet4::from_coefficients(coeffs);
        out
    }

    proptest! {
        #[test]
        fn product_matches_schoolbook(
            a in prop::collection::vec(-2.0f64..2.0, LEN),
            b in prop::collection::vec(-2.0f64..2.0, LEN),
        ) {
            let ja = poly_jet(&a);
            let jb = poly_jet(&b);
            let fast = &ja * &jb;
            let slow = brute_product(&ja, &jb);
            for (x, y) in fast.coefficients().iter().zip(slow.coefficients()) {
                prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
            }
        }

        #[test]
        fn reciprocal_is_inverse(
            a in prop::collection::vec(-1.0f64..1.0, LEN),
            a0 in 0.5f64..3.0,
        ) {
            let mut ja = poly_jet(&a);
            let mut coeffs = *ja.coefficients();
            coeffs[0] = c(a0);
            ja = Jet4::from_coefficients(coeffs);
            let one = &ja * &ja.recip();
            prop_assert!(one.max_abs_diff(&Jet4::constant(c(1.0))) < 1e-9);
        }
    }
}
