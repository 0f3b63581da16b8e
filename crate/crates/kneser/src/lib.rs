//! Exact arithmetic for integral lattices and finite quadratic modules,
//! the Kneser 2-neighbourhood graph method, and the central-charge-24
//! vector-valued character calculus.
//!
//! The crate is organised around five subsystems:
//!
//! * [`lattice`] - positive-definite lattices over exact rationals:
//!   constructors, duals, sublattices, glue extensions, short-vector
//!   enumeration, root systems, isometry testing;
//! * [`discform`] - discriminant forms (finite quadratic modules),
//!   their invariants, subgroup machinery and Weil matrices;
//! * [`neighbour`] - the 2-neighbourhood method: neighbour construction,
//!   automorphism orbits on L/2L, graph building, odd unimodular
//!   classification;
//! * [`qchar`] - exact truncated q-expansions, eta quotients, theta series
//!   and the 4-component character basis for central charge 24;
//! * [`glue`] - the glueing-type classifier for even-part extensions and
//!   the bundled classification count tables.

pub mod discform;
pub mod lattice;
pub mod matrix;
