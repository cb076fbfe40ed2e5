//! Rotation numbers, small divisors, orbit gaps and the disc automorphism.

pub mod angle;
pub mod divisor;
pub mod moebius;
pub mod number;
pub mod orbit;

pub use angle::{AngleValue, LinearForm};
pub use divisor::{small_divisor, small_divisor_sequence, CirclePoint, DivisorEngine, SmallDivisor};
pub use moebius::moebius;
pub use number::{DecimalBall, LiouvilleNumber, QuadraticSurd, RotationNumber, SurdExpansion};
pub use orbit::{orbit_gaps, GapClass, GapReport};
