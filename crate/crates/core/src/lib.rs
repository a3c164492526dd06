//! Exact computation of right-symmetric (pre-Lie) cohomology, homology and
//! formal deformations for finite-dimensional structure-constant algebras
//! over the rationals or a prime field.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`scalars`] — exact field arithmetic (arbitrary-precision rationals,
//!   prime fields) plus the binomial/Steenrod coefficients the divided-power
//!   constructions need;
//! * [`linalg`] — sparse fraction-preserving Gaussian elimination: ranks,
//!   reduced kernel bases and particular solutions, deterministic across runs;
//! * [`algebra`] — structure-constant algebras with one or two products,
//!   identity checking, the `gl(n)`, divided-power `O_n(m)` and half-Witt
//!   `W_n(m)` presets, and left-structure (`Z_l`, `Q_l`, `A^{l.ass}`) spaces;
//! * [`modcomod`] — right-symmetric modules and comodules as explicit action
//!   tensors, axiom checkers and the standard constructions (regular, trivial,
//!   antisymmetrized, bar, functions, top forms, `C^1(A,M)`, tensor,
//!   coregular, `M (x) A`, point modules);
//! * [`cochain`] — cochains, Lie cochains and chains together with every
//!   operator on them: face maps, coboundaries, Cartan operators, the
//!   comparison maps between right-symmetric and Chevalley–Eilenberg
//!   complexes, cup products, the `T` operator and the homology boundary;
//! * [`cohomology`] — assembles coboundary matrices, computes `Z`/`B`/`H`
//!   spaces with representatives, Novikov `H^2`, derivation spaces and the
//!   named cocycle families;
//! * [`deform`] — Gerstenhaber deformation machinery: the `star` product,
//!   insertion compositions, obstruction classes, order-by-order
//!   prolongation, Steenrod squares and formal equivalences;
//! * [`json`] — the bit-exact JSON interchange formats used by the CLI.
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod algebra;
pub mod cochain;
pub mod cohomology;
pub mod deform;
mod error;
pub mod json;
pub mod linalg;
pub mod modcomod;
pub mod scalars;

pub use error::{Error, Result};
