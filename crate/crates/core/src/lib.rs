pub mod error;
pub mod exact;
pub mod geometry;
pub mod depth;
pub mod detour;
pub mod dynamics;
pub mod json;
pub mod lang;
pub mod ops;
pub mod rng;
pub mod tensor;
pub mod verify;
