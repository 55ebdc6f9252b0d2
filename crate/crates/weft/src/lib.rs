//! weft: an exact-rational workbench for homological algebra around
//! degenerating structures.
//!
//! Everything is computed over arbitrary-precision rationals; no floating
//! point appears anywhere. The crate is organized bottom-up:
//!
//! * [`linalg`]: matrices, subspaces in canonical form, chain complexes.
//! * [`filtration`]: finite increasing filtrations, monodromy weight
//!   filtrations (absolute and relative to a second filtration).
//! * [`orbit`]: nilpotent orbit data with Hodge and weight filtrations,
//!   polarization pairings, and the associated compatibility checkers.
//! * [`perverse`]: combinatorial objects with can/var/N structure maps
//!   indexed by coordinate subsets, and their nearby-cycle construction.
//! * [`groupcoh`]: group rings, free resolutions, group cohomology.
//! * [`liecoh`]: nilpotent Lie algebras and Chevalley-Eilenberg cohomology.
//! * [`fan`]: periodic two-dimensional fans and their star covers, yielding
//!   free resolutions over the group ring of the period action.
//! * [`poset`]: sheaves on finite posets and Cech covers by closed subsets.
//! * [`degeneration`]: the end-to-end boundary degeneration pipeline that
//!   stitches the previous modules into a weighted cohomology table.
//! * [`io`]: serde data-transfer types for every on-disk format.

pub mod linalg;
pub mod filtration;
pub mod orbit;
pub mod perverse;
pub mod groupcoh;
pub mod liecoh;
pub mod fan;
pub mod poset;
pub mod degeneration;
pub mod io;

pub use filtration::{Filtration, NilpotentOp};
pub use linalg::{ChainComplex, RatMatrix, Subspace};
pub use orbit::OrbitDatum;
