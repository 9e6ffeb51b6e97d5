//! Bergman-metric geometry of the symmetrized bidisc
//! `G2 = { (z1 + z2, z1 z2) : |z1|, |z2| < 1 }`.
//!
//! The kernel is differentiated with order-4 Taylor jets, transferred to
//! the coordinates of `G2`, and assembled into the metric, connection and
//! curvature. Closed forms at the normal points `(x, 0)` are checked
//! against that pipeline and against a finite-difference oracle.
//!
//! ```
//! use g2_bergman::geometry::bisectional;
//!
//! let b = bisectional(0.9).unwrap();
//! assert!((b - 0.00679073).abs() < 1e-8);
//! ```

pub mod error;
pub mod jet;
pub mod kernel;
pub mod point;
pub mod chainrule;
pub mod oracle;
pub mod closed_forms;
pub mod geometry;
pub mod automorphism;
pub mod verify;

pub use automorphism::{normalize, DiscAutomorphism, NormalizationResult};
pub use error::{Error, Result};
pub use geometry::{Geometry, Route};
pub use point::ComplexPoint2;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/kernel.md")]
    struct Kernel;
    #[doc = include_str!("../../../book/src/coordinates.md")]
    struct Coordinates;
    #[doc = include_str!("../../../book/src/geometry.md")]
    struct Geometry;
    #[doc = include_str!("../../../book/src/pinching.md")]
    struct Pinching;
    #[doc = include_str!("../../../book/src/automorphisms.md")]
    struct Automorphisms;
    #[doc = include_str!("../../../book/src/verification.md")]
    struct Verification;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
