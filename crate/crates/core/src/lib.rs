//! Exact-arithmetic laboratory for asymptotically stable Markov-Feller operators.
//!
//! The crate iterates transition kernels on finitely supported measures with
//! exact rational weights, computes Fortet-Mourier norms by linear
//! programming, builds the partition-of-unity Lipschitz approximation of a
//! continuous function, and probes the e-property (equicontinuity of the dual
//! iterates `U^n f`) numerically.
//!
//! Built-in operators live in [`examples`]: the doubling kernel on the circle,
//! the Smith-Volterra-Cantor kernel on `[-2,-1] ∪ [0,1]`, and translation on
//! the real line.

pub mod error;
pub mod examples;
pub mod fm;
pub mod kernel;
pub mod lipapprox;
pub mod lp;
pub mod measure;
pub mod probe;
pub mod rational;
pub mod space;

pub use error::{Error, Result};
pub use kernel::TransitionKernel;
pub use measure::{DiscreteMeasure, ScalarField};
pub use rational::Rational;
pub use space::{MetricSpace, SpaceKind, UnitRational};
