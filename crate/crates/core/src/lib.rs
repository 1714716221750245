//! Exact broken-line computations on log Calabi-Yau surface pairs.
//!
//! A pair is given as a toric surface together with blowups of
//! non-torus-fixed points on its boundary. From that data the crate builds
//! the canonical scattering diagram in the toric-model chart, enumerates
//! broken lines, and computes theta functions and their structure constants
//! `N_{p,q,r}^A` with integer coefficients and rational geometry throughout.
//!
//! Module map:
//!
//! * [`lattice_fan`]: rank-2 lattice, complete fans, PL functions, `B(Z)`.
//! * [`pair`]: curve classes, intersection pairing, balancing, truncation.
//! * [`scattering`]: walls, completion, path-ordered products.
//! * [`theta`]: broken lines, theta expansions, the product and its checks.
//! * [`troptype`]: tropical types, exact realizability, refinement index.
//! * [`modify`]: corner blowups, ray refinements, birational comparison.
//! * [`cli`]: the `mirage` command line.

pub mod cli;
mod error;
pub mod intlin;
pub mod lattice_fan;
pub mod lp;
pub mod modify;
pub mod notation;
pub mod pair;
pub mod scattering;
pub mod series;
pub mod svg;
pub mod theta;
pub mod troptype;

pub use error::{Error, Result};
pub use lattice_fan::{ConeComplex, ConeId, IntegralPointB, LatticePoint, PLFunction, RatPoint};
pub use pair::{CurveClass, LogCYSurfacePair, SignedPoint, Truncation};
pub use scattering::{ScatteringDiagram, Wall, WallFunction};
pub use theta::{BrokenLine, MirrorAlgebra, Monomial, ThetaElement};
pub use troptype::{RealizabilityResult, TropicalType};

/// Rational numbers used for positions, PL values and the LP.
pub type Q = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}
