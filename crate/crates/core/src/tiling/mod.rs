//! Exact-cover tiling of the partial-product board.
//!
//! Cell `(x, y)` of a `wx`×`wy` board is the partial product `x_x·y_y` with
//! weight `2^(x+y)`. A tile anchored at `(x, y)` multiplies the X slice
//! `[x, x+width)` by the Y slice `[y, y+height)`, and its output word is
//! shifted by the anchor's Manhattan weight.

mod lp;
mod search;

pub use lp::{export_lp, import_solution};
pub use search::{solve_exact, SolveLimits};

use std::fmt;

use crate::cost::Luts;
use crate::error::{Error, Result};
use crate::tileset::{OperandSigns, TileCost, TileFamily, TileKind, TileShape};

pub const MAX_BOARD_DIM: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Board {
    pub wx: u32,
    pub wy: u32,
    pub signed: bool,
    pub dsp_budget: u32,
}

impl Board {
    pub fn new(wx: u32, wy: u32, signed: bool, dsp_budget: u32) -> Result<Self> {
        for (name, w) in [("wx", wx), ("wy", wy)] {
            if !(1..=MAX_BOARD_DIM).contains(&w) {
                return Err(Error::InvalidBoard(format!("{name} = {w} outside [1, {MAX_BOARD_DIM}]")));
            }
        }
        Ok(Board { wx, wy, signed, dsp_budget })
    }

    pub fn unsigned(wx: u32, wy: u32) -> Self {
        Self::new(wx, wy, false, 0).expect("board dimensions in range")
    }

    pub fn area(&self) -> u32 {
        self.wx * self.wy
    }

    pub fn transposed(&self) -> Self {
        Board { wx: self.wy, wy: self.wx, ..*self }
    }

    /// Width of the full product.
    pub fn product_width(&self) -> u32 {
        self.wx + self.wy
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} {}", self.wx, self.wy, if self.signed { "signed" } else { "unsigned" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub kind: TileKind,
    pub x: u32,
    pub y: u32,
}

impl Placement {
    pub fn new(kind: TileKind, x: u32, y: u32) -> Self {
        Placement { kind, x, y }
    }

    pub fn shape(&self) -> TileShape {
        self.kind.shape()
    }

    /// Manhattan weight: the power-of-two shift of the tile's output word.
    pub fn weight(&self) -> u32 {
        self.x + self.y
    }

    pub fn fits(&self, board: &Board) -> bool {
        let s = self.shape();
        self.x + s.width <= board.wx && self.y + s.height <= board.wy
    }

    pub fn covers(&self, cx: u32, cy: u32) -> bool {
        let s = self.shape();
        (self.x..self.x + s.width).contains(&cx) && (self.y..self.y + s.height).contains(&cy)
    }

    /// Signedness of the operand slices: a slice is two's-complement exactly
    /// when it contains the MSB of a signed board operand.
    pub fn signs(&self, board: &Board) -> OperandSigns {
        let s = self.shape();
        OperandSigns {
            x: board.signed && self.x + s.width == board.wx,
            y: board.signed && self.y + s.height == board.wy,
        }
    }

    pub fn cost(&self, board: &Board) -> Result<TileCost> {
        self.kind.cost_for(self.signs(board))
    }

    pub fn transposed(&self) -> Self {
        Placement { kind: self.kind.transposed(), x: self.y, y: self.x }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ ({}, {})", self.kind.label(), self.x, self.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingSolution {
    pub placements: Vec<Placement>,
    /// Σ cost^tile over the placements.
    pub objective: Luts,
    pub dsp_used: u32,
    pub optimal: bool,
}

impl TilingSolution {
    /// Validates an exact cover of `board` within the DSP budget and
    /// recomputes the objective.
    pub fn from_placements(board: &Board, mut placements: Vec<Placement>, optimal: bool) -> Result<Self> {
        let mut count = vec![0u32; board.area() as usize];
        let mut objective = Luts::ZERO;
        let mut dsp_used = 0;
        for p in &placements {
            if !p.fits(board) {
                return Err(Error::InvalidBoard(format!("{p} exceeds the {board} board")));
            }
            let cost = p.cost(board)?;
            objective += cost.lut_total;
            dsp_used += cost.dsp;
            let s = p.shape();
            for y in p.y..p.y + s.height {
                for x in p.x..p.x + s.width {
                    count[(y * board.wx + x) as usize] += 1;
                }
            }
        }
        if let Some(i) = count.iter().position(|&c| c != 1) {
            let i = i as u32;
            return Err(Error::Coverage { x: i % board.wx, y: i / board.wx, count: count[i as usize] });
        }
        if dsp_used > board.dsp_budget {
            return Err(Error::Budget { used: dsp_used, budget: board.dsp_budget });
        }
        placements.sort_by_key(|p| (p.y, p.x));
        Ok(TilingSolution { placements, objective, dsp_used, optimal })
    }

    /// Σ cost^mult: the LUTs of the sub-multipliers alone.
    pub fn mult_luts(&self, board: &Board) -> Luts {
        self.placements.iter().map(|p| p.cost(board).map(|c| c.lut_mult).unwrap_or_default()).sum()
    }
}

/// All admissible in-bounds placements of every family, with parametric
/// lengths from the family minimum up to the board dimension. Order: family,
/// length, then anchor row and column.
pub fn enumerate_placements(board: &Board, tileset: &[TileFamily]) -> Vec<Placement> {
    let mut out = Vec::new();
    for fam in tileset {
        let lengths: Vec<u32> =
            if fam.kind.is_parametric() { (fam.kind.min_length()..=board.wx.max(board.wy)).collect() } else { vec![0] };
        for k in lengths {
            let Ok(variant) = fam.kind.instantiate(k) else { continue };
            let Ok(kind) = TileKind::new(variant, fam.orientation) else { continue };
            let s = kind.shape();
            if s.width > board.wx || s.height > board.wy {
                continue;
            }
            for y in 0..=board.wy - s.height {
                for x in 0..=board.wx - s.width {
                    let p = Placement::new(kind, x, y);
                    if p.cost(board).is_ok() {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}
