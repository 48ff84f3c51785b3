//! Exact combinatorial engine for curve dynamics on flapped square pillows.
//!
//! The library builds blown-up Lattès maps on the square pillow as exact
//! square complexes, pulls back curves of any rational slope, classifies the
//! resulting components, and derives slope maps, Thurston obstructions,
//! annulus circuit lengths, and global curve attractors. All arithmetic is
//! exact; no floating point appears anywhere.
//!
//! Everything is immutable after construction and every operation is a pure
//! function, so independent queries can run concurrently without
//! coordination.

pub mod annuli;
pub mod complex;
pub mod dynamics;
pub mod error;
mod geom;
pub mod oracle;
pub mod pullback;
pub mod slopes;

pub use error::{Error, Result};
