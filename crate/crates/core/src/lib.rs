//! Exact computation with stellar sequences of weighted abstract simplicial
//! complexes.
//!
//! A stellar sequence `W0, W1, ...` is realized as a descending chain of
//! supports of regular (unimodular) rational complexes in the unit cube. The
//! chain determines a finitely generated unital lattice-ordered abelian group,
//! and the crate offers certificate-producing checks for its properties and
//! for isomorphism between two such groups.
//!
//! All arithmetic is exact: integers are arbitrary precision and there is no
//! floating point in any algorithm.
//!
//! Module map:
//!
//! * [`exactgeom`]: rationals, homogeneous correspondents, unimodularity.
//! * [`complex`]: weighted abstract complexes and stellar steps.
//! * [`regular`]: regular complexes, realizations, Farey blow-ups.
//! * [`zhomeo`]: integer piecewise-linear maps.
//! * [`mcnfun`]: integer piecewise-linear functions and lattice-group terms.
//! * [`sequences`]: stellar sequences, orbits and confluence.
//! * [`classify`]: property reports and equivalence verdicts.

pub mod classify;
pub mod complex;
pub mod exactgeom;
pub mod mcnfun;
pub mod regular;
pub mod sequences;
pub mod serial;
pub mod zhomeo;

mod lp;

pub use complex::{Label, StellarStep, WeightedComplex};
pub use exactgeom::{den, homogeneous, is_regular, Rational, RationalPoint, RationalSimplex};
pub use regular::{Realization, RegularComplex};
