//! Assembly of a complete multiplier: tile netlists, bit heap, compressor
//! tree and final adder.

use crate::bitheap::{self, BitHeap, BitSource, CompressorSchedule, FinalAdderKind, Library, Mode};
use crate::booth::{build_booth, partial_product_columns};
use crate::cost::Luts;
use crate::error::{Error, Result};
use crate::lutpack;
use crate::netlist::{Netlist, Signal};
use crate::tileset::{Orientation, Variant, DSP_HEIGHT, DSP_WIDTH};
use crate::tiling::{Board, Placement, TilingSolution};

/// Output word of one placed tile: `Σ 2^w·bit + constant`, weights local to
/// the tile anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileBits {
    pub bits: Vec<(u32, Signal)>,
    pub constant: i128,
}

fn full_table(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

/// Instantiates the sub-multiplier of `p` reading the board operands `x`
/// and `y`.
pub fn build_tile(net: &mut Netlist, board: &Board, p: &Placement, x: &[Signal], y: &[Signal]) -> Result<TileBits> {
    // reject placements the cost model does not admit
    p.cost(board)?;
    let shape = p.shape();
    let xs = &x[p.x as usize..(p.x + shape.width) as usize];
    let ys = &y[p.y as usize..(p.y + shape.height) as usize];
    let signs = p.signs(board);
    let tile = match p.kind.variant {
        Variant::Lut1x1 | Variant::Lut1x2 | Variant::Lut2x3 | Variant::Lut3x3 => {
            let t = lutpack::small_product(xs.len(), ys.len(), signs.x, signs.y);
            let inputs: Vec<Signal> = xs.iter().chain(ys).copied().collect();
            let mut tables = t.tables.clone();
            let mut constant = 0;
            if t.negative_msb {
                let top = tables.len() - 1;
                tables[top] ^= full_table(t.inputs);
                constant = -(1i128 << top);
            }
            let supports: Vec<u32> = tables.iter().map(|&tb| lutpack::support(tb, t.inputs)).collect();
            let mut bits = vec![None; tables.len()];
            for group in lutpack::pack(&supports) {
                let ts: Vec<u64> = group.iter().map(|&g| tables[g]).collect();
                let outs = net.lut_compact(&inputs, &ts);
                for (g, s) in group.iter().zip(outs) {
                    bits[*g] = Some(s);
                }
            }
            let bits = bits.into_iter().enumerate().map(|(i, s)| (i as u32, s.expect("packed"))).collect();
            TileBits { bits, constant }
        }
        Variant::Lut2xK { .. } => {
            let (two, long) = match p.kind.orientation {
                Orientation::Normal => (xs, ys),
                Orientation::Transposed => (ys, xs),
            };
            two_by_k(net, two, long)
        }
        Variant::BoothArray { .. } => {
            // the encoded operand runs along Y in normal orientation
            let (other, other_signed, enc, enc_signed) = match p.kind.orientation {
                Orientation::Normal => (xs, signs.x, ys, signs.y),
                Orientation::Transposed => (ys, signs.y, xs, signs.x),
            };
            let bb = build_booth(net, other, other_signed, enc, enc_signed, None);
            let constant = if bb.msb_complemented { -(1i128 << (bb.bits.len() - 1)) } else { 0 };
            TileBits { bits: partial_product_columns(&bb, (0, 0)), constant }
        }
        Variant::Dsp24x17 => {
            let (a, a_signed, b, b_signed) = match p.kind.orientation {
                Orientation::Normal => (xs, signs.x, ys, signs.y),
                Orientation::Transposed => (ys, signs.y, xs, signs.x),
            };
            let width = DSP_WIDTH + DSP_HEIGHT;
            let negative = signs.any();
            let out = net.dsp(a.to_vec(), b.to_vec(), a_signed, b_signed, width, negative);
            let constant = if negative { -(1i128 << (width - 1)) } else { 0 };
            TileBits { bits: out.into_iter().enumerate().map(|(i, s)| (i as u32, s)).collect(), constant }
        }
    };
    Ok(tile)
}

/// `two`×`long` unsigned product with one LUT per output position feeding
/// the carry chain: position `n` adds `two[0]·long[n]` and
/// `two[1]·long[n-1]`.
fn two_by_k(net: &mut Netlist, two: &[Signal], long: &[Signal]) -> TileBits {
    let zero = net.constant(false);
    let k = long.len();
    // inputs: t0, t1, l_n, l_{n-1}
    let prop = lutpack::table_from_fn(4, |r| ((r & 1 != 0) && (r & 4 != 0)) != ((r & 2 != 0) && (r & 8 != 0)));
    let gen = lutpack::table_from_fn(4, |r| (r & 1 != 0) && (r & 4 != 0));
    let mut bits = Vec::with_capacity(k + 2);
    let mut cin = zero;
    for n in 0..=k {
        let ln = long.get(n).copied().unwrap_or(zero);
        let lp = if n == 0 { zero } else { long[n - 1] };
        let o = net.lut(vec![two[0], two[1], ln, lp], vec![prop, gen]);
        let (sum, cout) = net.carry(o[0], o[1], cin);
        bits.push((n as u32, sum));
        cin = cout;
    }
    bits.push((k as u32 + 1, cin));
    TileBits { bits, constant: 0 }
}

/// Instantiates every tile of `solution` and collects their outputs on a
/// heap of the product's width.
pub fn build_heap(
    net: &mut Netlist,
    board: &Board,
    solution: &TilingSolution,
    x: &[Signal],
    y: &[Signal],
) -> Result<BitHeap> {
    let mut heap = BitHeap::new(board.product_width());
    for (i, p) in solution.placements.iter().enumerate() {
        let t = build_tile(net, board, p, x, y)?;
        let shift = p.weight();
        for (w, s) in t.bits {
            heap.add_bit(shift + w, s, BitSource::Tile(i));
        }
        heap.add_constant(t.constant, shift);
    }
    Ok(heap)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionOptions {
    pub library: Library,
    pub mode: Mode,
    pub final_adder: FinalAdderKind,
}

impl Default for CompressionOptions {
    fn default() -> Self {
        CompressionOptions { library: Library::default(), mode: Mode::Heuristic, final_adder: FinalAdderKind::Binary }
    }
}

/// A generated multiplier and the intermediate results that produced it.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub board: Board,
    pub solution: TilingSolution,
    pub netlist: Netlist,
    /// The heap before compression.
    pub heap: BitHeap,
    pub schedule: CompressorSchedule,
    /// Columns entering the final adder.
    pub final_columns: Vec<Vec<Signal>>,
}

impl Multiplier {
    /// Σ cost^mult of the tiles.
    pub fn tile_luts(&self) -> Luts {
        self.solution.mult_luts(&self.board)
    }

    /// Tile LUTs plus the scheduled compressor tree and final adder.
    pub fn exact_luts(&self) -> Luts {
        self.tile_luts() + self.schedule.total_lut
    }
}

/// Builds the netlist `P = X·Y` for `solution` on `board`.
pub fn build_multiplier(board: &Board, solution: &TilingSolution, opts: &CompressionOptions) -> Result<Multiplier> {
    let mut net = Netlist::new();
    let x = net.add_input("X", board.wx, board.signed);
    let y = net.add_input("Y", board.wy, board.signed);
    let heap = build_heap(&mut net, board, solution, &x, &y)?;
    let schedule = bitheap::schedule(&heap, &opts.library, opts.mode, opts.final_adder)?;
    let realized = bitheap::realize(&mut net, &heap, &schedule, &opts.library)?;
    net.set_output("P", realized.output.clone(), board.signed);
    net.validate()?;
    if net.output_bits().len() as u32 != board.product_width() {
        return Err(Error::Compressor("product width mismatch".into()));
    }
    Ok(Multiplier {
        board: *board,
        solution: solution.clone(),
        netlist: net,
        heap,
        schedule,
        final_columns: realized.final_columns,
    })
}
