use std::fmt;

use num_complex::Complex64;

/// A point of C^2.
///
/// Used both for points (z1, z2) of the bidisc and for points (w1, w2) of
/// the symmetrized bidisc; which one is meant follows from context.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint2 {
    pub first: Complex64,
    pub second: Complex64,
}

impl ComplexPoint2 {
    pub const fn new(first: Complex64, second: Complex64) -> Self {
        Self { first, second }
    }

    pub fn real(first: f64, second: f64) -> Self {
        Self::new(Complex64::new(first, 0.0), Complex64::new(second, 0.0))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.first.conj(), self.second.conj())
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.second, self.first)
    }

    pub fn coords(&self) -> [Complex64; 2] {
        [self.first, self.second]
    }

    /// Largest componentwise distance to `other`.
    pub fn distance_max(&self, other: &Self) -> f64 {
        (self.first - other.first)
            .norm()
            .max((self.second - other.second).norm())
    }
}

impl From<[Complex64; 2]> for ComplexPoint2 {
    fn from(c: [Complex64; 2]) -> Self {
        Self::new(c[0], c[1])
    }
}

impl fmt::Display for ComplexPoint2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}
