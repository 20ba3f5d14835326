pub mod acceptance;
pub mod bigcomb;
pub mod census;
pub mod error;
pub mod exact;
pub mod perm;
pub mod permcore;
pub mod specmat;

pub use error::{Error, Result};
pub use perm::Permutation;
