//! Bit heap: weighted columns of single bits awaiting compression.

mod compressor;
mod schedule;

pub use compressor::{Compressor, Library, LutCost, RowKind, Shape, DEFAULT_LIBRARY};
pub use schedule::{
    compression_cost, realize, schedule, CompressorSchedule, FinalAdder, FinalAdderKind, Instance, Mode, Realized,
    Stage,
};

use crate::netlist::{Netlist, Signal};

/// Where a heap bit came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitSource {
    /// Output of the tile with this index in the tiling solution.
    Tile(usize),
    /// A one-bit of the folded constant word.
    Constant,
    /// Added directly by the caller.
    External,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeapBit {
    pub signal: Signal,
    pub source: BitSource,
}

/// Columns of bits with weight `2^column`, plus a constant word. All
/// arithmetic is modulo `2^width`; bits at or above `width` are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitHeap {
    width: u32,
    columns: Vec<Vec<HeapBit>>,
    constant: u128,
}

fn mask(width: u32) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

impl BitHeap {
    pub fn new(width: u32) -> Self {
        assert!((1..=128).contains(&width), "heap width out of range");
        BitHeap { width, columns: vec![Vec::new(); width as usize], constant: 0 }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn columns(&self) -> &[Vec<HeapBit>] {
        &self.columns
    }

    pub fn constant(&self) -> u128 {
        self.constant
    }

    pub fn add_bit(&mut self, weight: u32, signal: Signal, source: BitSource) {
        if weight < self.width {
            self.columns[weight as usize].push(HeapBit { signal, source });
        }
    }

    /// Adds `value · 2^weight` to the constant word.
    pub fn add_constant(&mut self, value: i128, weight: u32) {
        if weight >= self.width {
            return;
        }
        let shifted = (value as u128).wrapping_shl(weight);
        self.constant = self.constant.wrapping_add(shifted) & mask(self.width);
    }

    /// Column heights counting the constant word's one-bits.
    pub fn heights(&self) -> Vec<u32> {
        (0..self.width as usize).map(|c| self.columns[c].len() as u32 + (self.constant >> c & 1) as u32).collect()
    }

    pub fn bit_count(&self) -> usize {
        self.heights().iter().map(|&h| h as usize).sum()
    }

    /// Turns the constant word into constant-one bits on the heap.
    pub fn fold_constant(&mut self, net: &mut Netlist) {
        if self.constant == 0 {
            return;
        }
        let one = net.constant(true);
        for c in 0..self.width {
            if self.constant >> c & 1 == 1 {
                self.columns[c as usize].push(HeapBit { signal: one, source: BitSource::Constant });
            }
        }
        self.constant = 0;
    }

    /// Every bit signal, column by column.
    pub fn signals(&self) -> Vec<Signal> {
        self.columns.iter().flatten().map(|b| b.signal).collect()
    }

    /// Heap value given bit values in [`BitHeap::signals`] order.
    pub fn value_of(&self, bits: &[bool]) -> u128 {
        let mut it = bits.iter();
        let mut v = self.constant;
        for (c, col) in self.columns.iter().enumerate() {
            for _ in col {
                if *it.next().expect("one value per heap bit") {
                    v = v.wrapping_add(1u128 << c);
                }
            }
        }
        v & mask(self.width)
    }
}
