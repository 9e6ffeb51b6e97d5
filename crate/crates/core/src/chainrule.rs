//! The symmetrization map `Phi(z1, z2) = (z1 + z2, z1 z2)`, its inverse
//! branches, and the transfer of kernel derivatives from `z` to `w`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use twofloat::TwoFloat;

use crate::jet::{reciprocal, Coefficient, ExtendedJet, Jet, Jet4, MultiIndex};
use crate::kernel::DEFAULT_DIAGONAL_THRESHOLD;
use crate::point::ComplexPoint2;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn phi(z: ComplexPoint2) -> ComplexPoint2 {
    ComplexPoint2::new(z.first + z.second, z.first * z.second)
}

/// Jacobian `dw_i / dz_j` of [`phi`].
pub fn phi_jacobian(z: ComplexPoint2) -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    [[one, one], [z.second, z.first]]
}

/// Roots of `t^2 - w1 t + w2`.
///
/// The root of larger modulus comes first in the first ordering; the second
/// ordering is the swap. Uses the cancellation-free form of the quadratic
/// formula.
pub fn phi_inverse(w: ComplexPoint2) -> (ComplexPoint2, ComplexPoint2) {
    let (big, small) = quadratic_roots(w);
    let z = ComplexPoint2::new(big, small);
    (z, z.swapped())
}

pub(crate) fn quadratic_roots(w: ComplexPoint2) -> (Complex64, Complex64) {
    let (w1, w2) = (w.first, w.second);
    let d = (w1 * w1 - 4.0 * w2).sqrt();
    let plus = w1 + d;
    let minus = w1 - d;
    let q = if plus.norm() >= minus.norm() { plus } else { minus } * 0.5;
    if q == ZERO {
        return (ZERO, ZERO);
    }
    let other = w2 / q;
    if q.norm() >= other.norm() {
        (q, other)
    } else {
        (other, q)
    }
}

/// First and second derivatives of the local inverse `z(w)` of [`phi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionData {
    pub base: ComplexPoint2,
    /// `first[i][j] = dz_i / dw_j`
    pub first: Mat2,
    /// `second[i][j][k] = d^2 z_i / dw_j dw_k`
    pub second: [Mat2; 2],
}

impl ConversionData {
    /// Conversion at the conjugate base point, used for the
    /// antiholomorphic slots on the diagonal.
    pub fn conj(&self) -> Self {
        let c = |m: Mat2| m.map(|row| row.map(|v| v.conj()));
        Self {
            base: self.base.conj(),
            first: c(self.first),
            second: self.second.map(c),
        }
    }

    /// `(first * jacobian) - I`, largest entry.
    pub fn inverse_residual(&self) -> f64 {
        let jac = phi_jacobian(self.base);
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = ZERO;
                for k in 0..2 {
                    s += self.first[i][k] * jac[k][j];
                }
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - id).norm());
            }
        }
        worst
    }
}

/// Derivatives of the inverse branch of `Phi` through `z`.
///
/// With `Z = dz/dw = (J Phi)^{-1}`, differentiating `J Phi(z(w)) Z = I` gives
/// `d^2 z_i / dw_j dw_k = -Z[i][1] (Z[0][j] Z[1][k] + Z[1][j] Z[0][k])`,
/// since the only nonzero second derivative of `Phi` is `d^2 w2 / dz1 dz2 = 1`.
pub fn conversion_at(z: ComplexPoint2) -> Result<ConversionData> {
    let delta = z.first - z.second;
    if delta.norm() < DEFAULT_DIAGONAL_THRESHOLD {
        return Err(Error::SingularConfiguration(format!(
            "roots {} and {} coincide; use the symmetric-coordinate or finite-difference route",
            z.first, z.second
        )));
    }
    let (first, second) = conversion_matrices(z.first, z.second);
    Ok(ConversionData {
        base: z,
        first,
        second,
    })
}

type Conversion<T> = ([[T; 2]; 2], [[[T; 2]; 2]; 2]);

/// First and second derivatives of `z(w)` for distinct roots `z1`, `z2`.
fn conversion_matrices<T: Coefficient>(z1: T, z2: T) -> Conversion<T> {
    let inv = reciprocal(z1.clone() - z2.clone());
    let first = [
        [z1 * inv.clone(), -inv.clone()],
        [-(z2 * inv.clone()), inv],
    ];
    let second = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                -first[i][1].clone()
                    * (first[0][j].clone() * first[1][k].clone()
                        + first[1][j].clone() * first[0][k].clone())
            })
        })
    });
    (first, second)
}

/// Table entries in double-double precision, indexed like [`WDerivativeTable`].
pub type ExtendedEntries = [[TwoFloat; 6]; 6];

/// Derivatives of a jet at the table positions, without transfer.
pub fn jet_entries<T: Coefficient>(jet: &Jet<T>) -> [[T; 6]; 6] {
    std::array::from_fn(|p| {
        std::array::from_fn(|q| {
            let (a, b) = (counts(MULTISETS[p]), counts(MULTISETS[q]));
            jet.derivative(&[a[0], a[1], b[0], b[1]])
        })
    })
}

/// Transfer at an on-diagonal point with distinct real roots, carried out in
/// double-double arithmetic. `jet` is the rational part of the kernel (see
/// [`extended_kernel_jet`](crate::kernel::extended_kernel_jet)).
pub fn pushforward_extended(jet: &ExtendedJet, z: ComplexPoint2) -> Result<ExtendedEntries> {
    if z.first.im != 0.0 || z.second.im != 0.0 {
        return Err(Error::Domain("extended transfer needs real roots".into()));
    }
    if (z.first - z.second).norm() < DEFAULT_DIAGONAL_THRESHOLD {
        return Err(Error::SingularConfiguration(format!(
            "roots {} and {} coincide",
            z.first, z.second
        )));
    }
    let conv = conversion_matrices(TwoFloat::from(z.first.re), TwoFloat::from(z.second.re));
    Ok(transfer(jet, &conv, &conv))
}

/// Position of a multiset of indices in table order.
pub fn multiset_position(indices: &[usize]) -> Option<usize> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    MULTISETS.iter().position(|m| *m == sorted.as_slice())
}

/// Multisets of coordinate indices of size at most two, in table order.
pub const MULTISETS: [&[usize]; 6] = [&[], &[0], &[1], &[0, 0], &[0, 1], &[1, 1]];

fn counts(indices: &[usize]) -> [u8; 2] {
    let mut c = [0u8; 2];
    for &i in indices {
        c[i] += 1;
    }
    c
}

/// Mixed partials of the kernel in `w` coordinates with up to two
/// holomorphic and two antiholomorphic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WDerivativeTable {
    entries: [[Complex64; 6]; 6],
}

/// Chain-rule expansion of `d/dw_P` for a multiset `P` of size at most two:
/// pairs of (exponent over `z`, coefficient).
fn expansion<T: Coefficient>(conv: &Conversion<T>, p: &[usize]) -> Vec<([u8; 2], T)> {
    let (z, second) = conv;
    let unit = |a: usize| if a == 0 { [1u8, 0] } else { [0, 1] };
    match *p {
        [] => vec![([0, 0], T::one())],
        [j] => (0..2).map(|a| (unit(a), z[a][j].clone())).collect(),
        [j, k] => {
            let mut out = Vec::with_capacity(6);
            for a in 0..2 {
                for b in 0..2 {
                    let mut e = unit(a);
                    e[b] += 1;
                    out.push((e, z[a][j].clone() * z[b][k].clone()));
                }
            }
            for (a, block) in second.iter().enumerate() {
                out.push((unit(a), block[j][k].clone()));
            }
            out
        }
        _ => unreachable!("multisets have size at most two"),
    }
}

/// Faa di Bruno transfer of a jet in `(z1, z2, c1, c2)` to `w` derivatives.
fn transfer<T: Coefficient>(
    jet: &Jet<T>,
    hol: &Conversion<T>,
    anti: &Conversion<T>,
) -> [[T; 6]; 6] {
    let hol_exp: Vec<_> = MULTISETS.iter().map(|p| expansion(hol, p)).collect();
    let anti_exp: Vec<_> = MULTISETS.iter().map(|q| expansion(anti, q)).collect();
    std::array::from_fn(|p| {
        std::array::from_fn(|q| {
            let mut s = T::zero();
            for (alpha, cp) in &hol_exp[p] {
                for (beta, cq) in &anti_exp[q] {
                    let m: MultiIndex = [alpha[0], alpha[1], beta[0], beta[1]];
                    s = s + cp.clone() * cq.clone() * jet.derivative(&m);
                }
            }
            s
        })
    })
}

impl WDerivativeTable {
    pub fn from_entries(entries: [[Complex64; 6]; 6]) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[[Complex64; 6]; 6] {
        &self.entries
    }

    /// Derivative with holomorphic indices `hol` and antiholomorphic
    /// indices `anti` (zero-based, any order).
    pub fn d(&self, hol: &[usize], anti: &[usize]) -> Complex64 {
        let p = multiset_position(hol).expect("at most two holomorphic indices");
        let q = multiset_position(anti).expect("at most two antiholomorphic indices");
        self.entries[p][q]
    }

    pub fn value(&self) -> Complex64 {
        self.entries[0][0]
    }

    /// Transfer on the diagonal: the antiholomorphic slots use the
    /// conjugate conversion.
    pub fn pushforward(jet: &Jet4, conv: &ConversionData) -> Self {
        Self::pushforward_polarized(jet, conv, &conv.conj())
    }

    /// Transfer with independent conversions for the two slot groups.
    pub fn pushforward_polarized(jet: &Jet4, hol: &ConversionData, anti: &ConversionData) -> Self {
        Self {
            entries: transfer(jet, &(hol.first, hol.second), &(anti.first, anti.second)),
        }
    }

    /// Rounds an extended-precision table and multiplies it by `factor`.
    pub fn from_extended(entries: &ExtendedEntries, factor: f64) -> Self {
        Self {
            entries: entries.map(|row| row.map(|v| Complex64::new(f64::from(v) * factor, 0.0))),
        }
    }

    /// Read directly from a jet in `(w1, w2, v1, v2)`.
    pub fn from_w_jet(jet: &Jet4) -> Self {
        Self {
            entries: jet_entries(jet),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.map(|row| row.map(|v| v * factor)),
        }
    }

    /// Largest `|d(P, Q) - conj(d(Q, P))|`, zero for a real kernel on the diagonal.
    pub fn conjugation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in 0..6 {
            for q in 0..6 {
                worst = worst.max((self.entries[p][q] - self.entries[q][p].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in 0..6 {
            for q in 0..6 {
                worst = worst.max((self.entries[p][q] - other.entries[p][q]).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{kernel_jet, Kernel, PolarizedKernelArgs};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(ComplexPoint2::real(0.5, 0.0)), ComplexPoint2::real(0.5, 0.0));
        assert_eq!(phi(ComplexPoint2::real(0.5, 0.5)), ComplexPoint2::real(1.0, 0.25));
        let z = ComplexPoint2::new(c(0.1, 0.3), c(-0.4, 0.2));
        assert_eq!(phi(z), phi(z.swapped()));
    }

    #[test]
    fn inverse_examples() {
        let (a, b) = phi_inverse(ComplexPoint2::real(0.9, 0.0));
        assert_eq!(a, ComplexPoint2::real(0.9, 0.0));
        assert_eq!(b, ComplexPoint2::real(0.0, 0.9));
        let (a, _) = phi_inverse(ComplexPoint2::real(1.0, 0.25));
        assert!(a.distance_max(&ComplexPoint2::real(0.5, 0.5)) < 1e-12);
        let (a, _) = phi_inverse(ComplexPoint2::real(0.0, -0.25));
        assert!((a.first.norm() - 0.5).abs() < 1e-15 && (a.first + a.second).norm() < 1e-15);
    }

    #[test]
    fn conversion_at_normalization_point() {
        let x = 0.5;
        let conv = conversion_at(ComplexPoint2::real(x, 0.0)).unwrap();
        let expect = [[1.0, -2.0], [0.0, 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((conv.first[i][j] - expect[i][j]).norm() < 1e-15);
            }
        }
        let s = conv.second;
        let x2 = x * x;
        let x3 = x2 * x;
        assert!(s[0][0][0].norm() < 1e-15 && s[1][0][0].norm() < 1e-15);
        assert!((s[0][0][1].re - 1.0 / x2).abs() < 1e-12);
        assert!((s[0][1][1].re + 2.0 / x3).abs() < 1e-12);
        assert!((s[1][0][1].re + 1.0 / x2).abs() < 1e-12);
        assert!((s[1][1][1].re - 2.0 / x3).abs() < 1e-12);
    }

    #[test]
    fn conversion_errors_on_diagonal() {
        let err = conversion_at(ComplexPoint2::real(0.3, 0.3)).unwrap_err();
        assert!(matches!(err, Error::SingularConfiguration(_)));
    }

    #[test]
    fn first_derivatives_at_half() {
        let x: f64 = 0.5;
        let args = PolarizedKernelArgs::normalized(x);
        let jet = kernel_jet(&args).unwrap();
        let conv = conversion_at(args.z()).unwrap();
        let t = WDerivativeTable::pushforward(&jet, &conv);
        let pi2 = PI * PI;
        let x2 = x * x;
        let d1 = x * (x2 - 3.0) / (2.0 * pi2 * (x2 - 1.0).powi(3));
        assert!((t.d(&[0], &[]).re - d1).abs() < 1e-12 * d1.abs());
        let d12b = x * (x2 - 4.0) / (pi2 * (x2 - 1.0).powi(4));
        assert!((t.d(&[0], &[1]).re - d12b).abs() < 1e-12 * d12b.abs());
        assert!(t.conjugation_residual() < 1e-12);
    }

    #[test]
    fn conjugation_at_generic_point() {
        let z = ComplexPoint2::new(c(0.3, -0.2), c(-0.1, 0.45));
        let jet = kernel_jet(&PolarizedKernelArgs::on_diagonal(z)).unwrap();
        let t = WDerivativeTable::pushforward(&jet, &conversion_at(z).unwrap());
        assert!(t.conjugation_residual() < 1e-10 * t.d(&[0, 1], &[0, 1]).norm());
    }

    #[test]
    fn pushforward_matches_symmetric_jet() {
        let z = ComplexPoint2::new(c(0.3, -0.2), c(-0.1, 0.45));
        let kernel = Kernel::default();
        let jet = kernel.jet(&PolarizedKernelArgs::on_diagonal(z)).unwrap();
        let pushed = WDerivativeTable::pushforward(&jet, &conversion_at(z).unwrap());
        let w = phi(z);
        let direct = WDerivativeTable::from_w_jet(&kernel.symmetric_jet(w, w.conj()));
        let scale = direct.d(&[1, 1], &[1, 1]).norm();
        assert!(pushed.max_abs_diff(&direct) < 1e-11 * scale);
    }

    #[test]
    fn pushforward_is_linear() {
        let z = ComplexPoint2::new(c(0.6, 0.1), c(-0.2, -0.3));
        let conv = conversion_at(z).unwrap();
        let a = kernel_jet(&PolarizedKernelArgs::on_diagonal(z)).unwrap();
        let b = kernel_jet(&PolarizedKernelArgs::on_diagonal(ComplexPoint2::real(0.2, -0.5))).unwrap();
        let k = c(1.5, -0.25);
        let lhs = WDerivativeTable::pushforward(&(&a.scale(k) + &b), &conv);
        let ta = WDerivativeTable::pushforward(&a, &conv);
        let tb = WDerivativeTable::pushforward(&b, &conv);
        let mut entries = [[ZERO; 6]; 6];
        for p in 0..6 {
            for q in 0..6 {
                entries[p][q] = ta.entries()[p][q] * k + tb.entries()[p][q];
            }
        }
        let rhs = WDerivativeTable::from_entries(entries);
        assert!(lhs.max_abs_diff(&rhs) < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn disc_point() -> impl Strategy<Value = Complex64> {
            (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
        }

        proptest! {
            #[test]
            fn conversion_inverts_jacobian(a in disc_point(), b in disc_point()) {
                prop_assume!((a - b).norm() > 1e-2);
                let conv = conversion_at(ComplexPoint2::new(a, b)).unwrap();
                prop_assert!(conv.inverse_residual() < 1e-12 / (a - b).norm());
                let col_sum = conv.first[0][0] + conv.first[1][0];
                prop_assert!((col_sum - 1.0).norm() < 1e-12 / (a - b).norm());
                for i in 0..2 {
                    prop_assert!((conv.second[i][0][1] - conv.second[i][1][0]).norm() == 0.0);
                }
            }

            #[test]
            fn inverse_reproduces_w(a in disc_point(), b in disc_point()) {
                let w = phi(ComplexPoint2::new(a, b));
                let (z, swapped) = phi_inverse(w);
                let back = phi(z);
                let scale = w.first.norm().max(w.second.norm()).max(1e-300);
                prop_assert!(back.distance_max(&w) <= 1e-12 * scale.max(1.0));
                prop_assert!(z.first.norm() >= z.second.norm());
                prop_assert_eq!(swapped, z.swapped());
            }
        }
    }
}
