//! Exact and certified computation for integer-part sequences, difference
//! sets, Følner families, and rotation-system averages.
//!
//! Everything here is deterministic: integer paths are exact big-integer
//! arithmetic, transcendental paths are dyadic interval arithmetic that
//! either certifies a result or reports that the precision cap was reached.

pub mod bitset;
pub mod density;
pub mod dynamics;
pub mod equidist;
pub mod folner;
pub mod interval;
pub mod real;
pub mod semigroup;
pub mod seq;

pub use interval::DyadicInterval;
pub use real::RealConstant;
pub use seq::{FloorResult, PrecisionPolicy, SequenceSpec};
