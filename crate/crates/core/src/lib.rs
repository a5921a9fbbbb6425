//! Integer multiplier generator for LUT/carry-chain FPGA fabrics.
//!
//! The partial-product board is tiled with DSP blocks, small LUT multipliers
//! and radix-4 Booth arrays, the tile outputs are collected on a bit heap and
//! compressed with generalized parallel counters and row adders, and the
//! result is a gate-level netlist that is simulated before it is emitted.

pub mod bitheap;
pub mod booth;
pub mod cli;
pub mod cost;
pub mod error;
pub mod lutpack;
pub mod multiplier;
pub mod netlist;
pub mod run;
pub mod tileset;
pub mod tiling;

pub use cost::Luts;
pub use error::{Error, Result};
