//! Construction and numerical certification of Swiss-cheese disc families.
//!
//! A Swiss cheese here is the closed unit disc with a (possibly infinite)
//! collection of open discs removed. The crate provides
//!
//! * disc primitives and the square-root-of-a-disc transform ([`geometry`]),
//! * finite and parametric disc families with the road-runner, square-root,
//!   annulus-filter, synthetic-budget and affine generators ([`families`]),
//! * Browder sums of any order with certified truncation tails ([`browder`]),
//! * rational functions, Taylor functionals and the even-part descent
//!   ([`rational`]),
//! * property suites emitting JSON certificates plus SVG rendering ([`verify`]).
//!
//! All real arithmetic runs at a configurable binary precision (128 bits by
//! default) on top of MPFR.

pub mod browder;
pub mod error;
pub mod families;
pub mod geometry;
pub mod par;
pub mod precision;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use families::{CheeseSpec, DiscFamily, Generator};
pub use geometry::{Disc, SqrtDiscPair};
pub use par::Execution;
pub use precision::{Precision, StrictCheck, Tolerance, Verdict};
pub use rational::RationalFunction;
pub use rug::{Complex, Float, Rational};
