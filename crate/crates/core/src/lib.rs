pub mod analysis;
pub mod cli;
pub mod construct;
pub mod diameter;
pub mod dyadic;
pub mod error;
pub mod interval;
pub mod numeric;
pub mod profile;
pub mod random;
pub mod shapes;
pub mod slab;
pub mod verify;
