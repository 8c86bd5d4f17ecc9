pub mod bitset;
pub mod caps;
pub mod constructions;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod oracle;
pub mod realisations;
pub mod structures;
pub mod unfolding;

pub use bitset::BitSet;
pub use caps::Caps;
pub use error::{Error, Result};
