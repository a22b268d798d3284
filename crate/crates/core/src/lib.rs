//! Arithmetic-geometric means over finite fields and the elliptic curves
//! they organize.
//!
//! Over `F_q` with `q = 3 (mod 4)` the AGM step `(a, b) -> ((a+b)/2, sqrt(ab))`
//! has a unique admissible choice of square root, so it defines a functional
//! graph on admissible pairs. Its components ("jellyfish") are cycles with
//! one length-one tentacle per cycle node, and mapping a pair to the
//! Legendre curve `y^2 = x(x-1)(x - b^2/a^2)` turns every component into a
//! 2-isogeny graph. Counting `j`-invariants per trace family recovers
//! Hurwitz class numbers.
//!
//! - [`field`]: `F_q` arithmetic, quadratic character, canonical square roots.
//! - [`real_agm`]: the classical AGM, Euler's `pi` sequence, the elliptic
//!   integral and the Gauss hypergeometric series.
//! - [`swarm`]: the finite-field AGM, orbits, swarms and their statistics.
//! - [`legendre`]: Legendre curves, group structure, the 2-isogenies.
//! - [`hypergeometric`]: characters, Gauss/Jacobi sums, Greene's `2F1`.
//! - [`class_numbers`]: reduced forms, `h(D)`, `H(N)`, `r_3(n)` and the
//!   class-number identity for jellyfish trace families.

pub mod arith;
pub mod class_numbers;
mod error;
pub mod field;
pub mod hypergeometric;
pub mod legendre;
pub mod real_agm;
pub mod swarm;

pub use error::{Error, Result};
pub use field::{Field, FieldElement, FieldParams};

pub use legendre::{CurvePoint, GroupStructure, LegendreCurve};
pub use swarm::{AdmissiblePair, Jellyfish, Swarm};
