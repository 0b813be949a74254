//! Moduli polytopes of convex planar polygons with fixed vertex angles.
//!
//! A necklace of positive rationals `[s_1, ..., s_n]` fixes the external
//! angles of a convex n-gon, up to the common scale `S = s_1 + ... + s_n`:
//! the k-th vertex turns by `2*pi*s_k/S`. The unit-perimeter length vectors
//! of such polygons form a convex polytope of dimension `n - 3`, and this
//! crate computes its combinatorics exactly:
//!
//! - [`necklace`]: exact-rational necklaces, substring weights, ties,
//!   majority dominance, and dipole tie-breaking.
//! - [`fixed_angles`]: the face lattice of the fixed-angles polytope via
//!   zero-edge sets, trigon/digon vertices, vertex figures, and a
//!   one-parameter sweep over a varying necklace entry.
//! - [`cyclic`]: cyclic polytopes `C_d(m)` through Gale's evenness
//!   condition, cross-checked by an exact moment-curve determinant oracle.
//! - [`tours`]: length-3 necklaces of residues mod n, small/odd step
//!   classification, and the multiply-by-(-2) bijection.
//! - [`duality`]: lattice anti-isomorphism checks between fixed-angles
//!   polytopes and cyclic polytopes, explicit for odd n, by search for
//!   even n.
//! - [`geometry`]: floating-point polygon realizations, tangential interior
//!   witnesses, vertex realizations, and the area-form signature.
//! - [`scmap`]: the conformal (Schwarz-Christoffel) transform from a
//!   fixed-lengths convex polygon to a point of the fixed-angles polytope,
//!   with the boundary exponent probe.

pub mod cyclic;
pub mod duality;
pub mod fixed_angles;
pub mod geometry;
pub mod necklace;
pub mod scmap;
pub mod tours;

pub use necklace::{Balance, Necklace, Rational, Substring, SubsetTie, TieRecord};
