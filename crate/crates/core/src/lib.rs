//! Coding-theoretic machinery for framed lattice constructions: binary and
//! quaternary codes carried by a pairing of coordinates, the lattices they
//! define, and exact character-polynomial decompositions of the associated
//! module structures.

pub mod autsearch;
pub mod bits;
pub mod catalog;
pub mod codes;
pub mod cyclo;
pub mod decomp;
pub mod error;
pub mod lattices;
pub mod markings;
pub mod perm;
pub mod poly;
pub mod z4;

pub use bits::BitWord;
pub use codes::BinaryCode;
pub use error::{Error, Result};
pub use markings::Marking;
pub use perm::{Perm, PermGroup};
pub use poly::{RatPoly, TriPoly};
