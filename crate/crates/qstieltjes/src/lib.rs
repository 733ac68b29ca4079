//! Classical q-orthogonal polynomials on the lattice x(s) = (q^s - 1)/(q - 1),
//! 0 < q < 1, and the first-order non-homogeneous q-difference equation
//! satisfied by their Stieltjes function in the q-falling-factorial basis.
//!
//! The crate is organized around the verification pipeline:
//!
//! - [`scalar`]: exact arithmetic in Q(r), r = q^{1/2}, or arbitrary-precision
//!   floats with a configured decimal precision
//! - [`lattice`]: x(s), q-numbers, q-Pochhammer symbols, q-falling factorials,
//!   Gamma_q, e_q, and the Delta/Nabla grid operators
//! - [`hyper`]: basic hypergeometric series r_phi_s and the transformation
//!   identities (Heine, Jackson, Chu-Vandermonde, q-binomial, 3phi2)
//! - [`family`]: the q-Charlier, q-Kravchuk, q-Meixner and q-Hahn data —
//!   weights, Pearson pairs, closed moments, closed Stieltjes forms, C_q
//! - [`functional`]: the moment functional as a lattice sum — brute-force
//!   oracles, Pearson/boundary/adjoint residuals, the moment recurrence
//! - [`stieltjes`]: the three representations of S_q(z) and the certified
//!   residual of the difference equation
//! - [`orthopoly`]: orthogonal polynomials from moments and the classical
//!   characterization suite (orthogonality, differences, Rodrigues, TTRR,
//!   eigenvalue equation, Pade conditions)
//!
//! Everything is pure and reentrant; values are freely shareable across
//! threads and parameter sweeps parallelize safely.

pub mod error;
pub mod family;
pub mod functional;
pub mod hyper;
pub mod lattice;
pub mod orthopoly;
pub mod point;
pub mod poly;
pub mod scalar;
pub mod stieltjes;

pub use error::{QError, Result};
pub use family::{FamilyKind, FamilySpec};
pub use point::EvalPoint;
pub use scalar::{Mode, QContext, Scalar};
