//! Exact weighted ergodic sums, periodic limits, marker sequences and
//! greedy orbit tilings on desk-scale dynamical systems.
//!
//! Finite systems are the exact backend: every quantity is a rational
//! computed without rounding, and every set property is decided. Stream
//! systems model aperiodic transformations (successor on `ℕ` being the
//! built-in one) and are explored through a hard window; anything they
//! report is marked as windowed.

pub mod cocycle;
pub mod error;
pub mod generate;
pub mod markers;
pub mod measure;
pub mod orbit;
pub mod periodic;
pub mod rational;
pub mod sets;
pub mod simulate;
pub mod system;
pub mod tiling;

pub use error::{Error, Result};
pub use orbit::{OrbitShape, SetProperties};
pub use periodic::{LimitPointSet, PeriodicAnalysis};
pub use rational::Rational;
pub use sets::{FiniteSet, PointSet, Predicate};
pub use system::{Dynamics, FiniteSystem, Observable, StreamSystem};
