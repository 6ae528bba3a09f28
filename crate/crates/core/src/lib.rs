//! Finite fields, elliptic curve families and exhaustive censuses of their
//! j-invariant and isomorphism classes.

pub mod census;
pub mod error;
pub mod families;
pub mod formulas;
pub mod gf;
pub mod iso;

pub use census::{census, ClassPartition, Guards};
pub use error::{Error, Result};
pub use families::{CurveDescriptor, CurveParams, Family, LongWeierstrass};
pub use iso::ClassKey;
pub use gf::{make_field, Fe, FieldElement, GaloisField};
