//! Radix-4 Booth encoding and LUT/carry-chain Booth arrays.
//!
//! Level `r` of an array recodes the Y triplet `(y[2r+1], y[2r], y[2r-1])`
//! into a digit in {-2..2}, forms the digit times X in one LUT per X bit and
//! adds it to the previous level's partial sum along a carry chain. The
//! complement flag doubles as the chain's carry-in. Every level but the last
//! retires its two LSBs as product bits and hands the rest, sign-extended,
//! to the next level. The first level's addend is the MAC input D.
//!
//! Each level uses `k` type-A LUTs plus one dual-output LUT covering the two
//! sign positions `k` and `k+1`, so an L-level array costs `L·(k+1)` LUTs.

use crate::error::{Error, Result};
use crate::lutpack::table_from_fn;
use crate::netlist::{Netlist, Signal};
use crate::tileset::{booth_height, MAX_BOOTH_LEVEL, MIN_BOOTH_LEVEL};

/// Control flags for one Booth digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoothFlags {
    pub be: i8,
    /// Digit is zero.
    pub z: bool,
    /// Digit is negative (complement), set for `111` as well.
    pub c: bool,
    /// Digit magnitude is two (shift).
    pub s: bool,
}

/// Radix-4 Booth encoder truth table.
pub fn booth_encode(y_next: bool, y_cur: bool, y_prev: bool) -> BoothFlags {
    let f = |be, z, c, s| BoothFlags { be, z, c, s };
    match (y_next, y_cur, y_prev) {
        (false, false, false) => f(0, true, false, false),
        (false, false, true) => f(1, false, false, false),
        (false, true, false) => f(1, false, false, false),
        (false, true, true) => f(2, false, false, true),
        (true, false, false) => f(-2, false, true, true),
        (true, false, true) => f(-1, false, true, false),
        (true, true, false) => f(-1, false, true, false),
        (true, true, true) => f(0, true, true, false),
    }
}

/// A standalone Booth array: `x_width`×(2L-1) unsigned or `x_width`×2L
/// two's-complement, optionally with a MAC addend `D` of `x_width` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoothArraySpec {
    pub levels: u32,
    pub x_width: u32,
    pub signed: bool,
    pub mac: bool,
}

impl BoothArraySpec {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_BOOTH_LEVEL..=MAX_BOOTH_LEVEL).contains(&self.levels) {
            return Err(Error::BoothLevel(self.levels));
        }
        if self.x_width < 2 {
            return Err(Error::InvalidTile(format!("booth array needs x_width >= 2, got {}", self.x_width)));
        }
        Ok(())
    }

    pub fn height(&self) -> u32 {
        booth_height(self.levels, self.signed)
    }

    pub fn output_width(&self) -> u32 {
        self.x_width + self.height()
    }
}

/// LUT mapping of one cell in a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellType {
    /// Digit times `x[n]`/`x[n-1]` plus the previous level's bit `t[n]`.
    A,
    /// Sign positions of the first level; the extension comes from D.
    B,
    /// Sign positions of a middle level; extends the previous level's sign.
    C,
    /// Sign positions of the final level.
    D,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoothCell {
    pub kind: CellType,
    /// Chain positions (relative to the level's LSB) this LUT drives.
    pub positions: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoothLevelRow {
    pub level: u32,
    pub cells: Vec<BoothCell>,
    /// Local weights of the product bits this level retires.
    pub retired: Vec<u32>,
}

fn level_count(height: u32, y_signed: bool) -> u32 {
    if y_signed {
        height.div_ceil(2)
    } else {
        // an unsigned operand needs a zero above its MSB inside the top triplet
        (height + 2) / 2
    }
}

/// Cell layout of an array with `levels` levels, `k` X bits and a final
/// level that is `final_width` chain positions wide.
fn layout(levels: u32, k: u32, final_width: u32) -> Vec<BoothLevelRow> {
    (0..levels)
        .map(|r| {
            let last = r + 1 == levels;
            let mut cells: Vec<BoothCell> =
                (0..k).map(|n| BoothCell { kind: CellType::A, positions: vec![n] }).collect();
            let kind = match (r, last) {
                (_, true) => CellType::D,
                (0, false) => CellType::B,
                _ => CellType::C,
            };
            let top = if last { final_width } else { k + 2 };
            cells.push(BoothCell { kind, positions: (k..top).collect() });
            let retired = if last { (0..final_width).map(|n| 2 * r + n).collect() } else { vec![2 * r, 2 * r + 1] };
            BoothLevelRow { level: r, cells, retired }
        })
        .collect()
}

pub fn level_rows(spec: &BoothArraySpec) -> Result<Vec<BoothLevelRow>> {
    spec.validate()?;
    let final_width = spec.output_width() - 2 * (spec.levels - 1);
    Ok(layout(spec.levels, spec.x_width, final_width))
}

/// Output bits of a Booth array, LSB first; bit `i` has local weight `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoothBits {
    pub bits: Vec<Signal>,
    /// The MSB is stored complemented and carries weight -2^(len-1).
    pub msb_complemented: bool,
    pub levels: u32,
}

/// Builds a Booth array into `net` for `x` times `y` (+ `d`).
///
/// `y` is the Booth-encoded operand. An unsigned `y` must be odd-length
/// (2L-1); a signed `y` may be 2L or 2L-1 bits (sign-extended). `d`, when
/// given, has `x.len()` bits and the signedness of `x`. When either operand
/// is signed the MSB of the result is emitted complemented, ready for
/// complement-plus-constant handling on a bit heap.
pub fn build_booth(
    net: &mut Netlist,
    x: &[Signal],
    x_signed: bool,
    y: &[Signal],
    y_signed: bool,
    d: Option<&[Signal]>,
) -> BoothBits {
    let k = x.len() as u32;
    let h = y.len() as u32;
    assert!(k >= 2, "booth array needs at least two X bits");
    let levels = level_count(h, y_signed);
    assert!(y_signed || h % 2 == 1, "unsigned booth operand must have odd height");
    let negative = x_signed || y_signed;
    let zero = net.constant(false);
    let xs = |n: i64| -> Signal {
        if n < 0 {
            zero
        } else if n < k as i64 {
            x[n as usize]
        } else if x_signed {
            x[k as usize - 1]
        } else {
            zero
        }
    };
    let ys = |i: i64| -> Signal {
        if i < 0 {
            zero
        } else if i < h as i64 {
            y[i as usize]
        } else if y_signed {
            y[h as usize - 1]
        } else {
            zero
        }
    };
    let final_width = k + h - 2 * (levels - 1);
    let rows = layout(levels, k, final_width);

    let mut t: Vec<Signal> = match d {
        Some(d) => {
            assert_eq!(d.len(), k as usize, "MAC addend must match the X width");
            d.to_vec()
        }
        None => vec![zero; k as usize],
    };
    let mut t_ext = match d {
        Some(d) if x_signed => d[k as usize - 1],
        _ => zero,
    };
    let mut out = Vec::new();

    // pp(x_n, x_{n-1}, y_next, y_cur, y_prev) of one digit
    let pp = |xn: bool, xm: bool, yn: bool, yc: bool, yp: bool| {
        let f = booth_encode(yn, yc, yp);
        let mag = !f.z && if f.s { xm } else { xn };
        mag ^ f.c
    };
    let bit = |r: u32, i: u32| (r >> i) & 1 == 1;

    for row in &rows {
        let r = row.level as i64;
        let last = row.level + 1 == levels;
        let (yn, yc, yp) = (ys(2 * r + 1), ys(2 * r), ys(2 * r - 1));
        let mut props = Vec::new();
        let mut gens = Vec::new();
        for cell in &row.cells {
            if cell.kind == CellType::A {
                let n = cell.positions[0] as i64;
                let inputs = vec![xs(n), xs(n - 1), yn, yc, yp, t[n as usize]];
                let table = table_from_fn(6, |q| pp(bit(q, 0), bit(q, 1), bit(q, 2), bit(q, 3), bit(q, 4)) ^ bit(q, 5));
                props.push(net.lut1(inputs, table));
                gens.push(t[n as usize]);
                continue;
            }
            // sign positions k and k+1: the X sources are x[k-1] or its
            // extension, selected by signedness
            let ext = |xk1: bool| if x_signed { xk1 } else { false };
            let prop_k = |q: u32| pp(ext(bit(q, 0)), bit(q, 0), bit(q, 1), bit(q, 2), bit(q, 3)) ^ bit(q, 4);
            let prop_k1 = |q: u32| pp(ext(bit(q, 0)), ext(bit(q, 0)), bit(q, 1), bit(q, 2), bit(q, 3)) ^ bit(q, 4);
            let inputs = vec![x[k as usize - 1], yn, yc, yp, t_ext];
            let top = *cell.positions.last().unwrap();
            let invert = |pos: u32, v: bool| v ^ (last && negative && pos == top);
            let mut tables = vec![table_from_fn(5, |q| invert(k, prop_k(q)))];
            if cell.positions.len() == 2 {
                tables.push(table_from_fn(5, |q| invert(k + 1, prop_k1(q))));
            }
            let outs = net.lut(inputs, tables);
            for o in outs {
                props.push(o);
                gens.push(t_ext);
            }
        }
        let mut cin = yn;
        let mut sums = Vec::with_capacity(props.len());
        for (p, g) in props.into_iter().zip(gens) {
            let (s, c) = net.carry(p, g, cin);
            sums.push(s);
            cin = c;
        }
        if last {
            out.extend(sums);
        } else {
            out.extend_from_slice(&sums[..2]);
            t = sums[2..2 + k as usize].to_vec();
            t_ext = sums[k as usize + 1];
        }
    }
    debug_assert_eq!(out.len() as u32, k + h);
    BoothBits { bits: out, msb_complemented: negative, levels }
}

/// A standalone Booth array netlist with ports `X`, `Y`, optional `D` and
/// product `P`.
#[derive(Clone, Debug)]
pub struct BoothFragment {
    pub spec: BoothArraySpec,
    pub netlist: Netlist,
    pub bits: BoothBits,
}

pub fn build_booth_array(spec: BoothArraySpec) -> Result<BoothFragment> {
    spec.validate()?;
    let mut net = Netlist::new();
    let x = net.add_input("X", spec.x_width, spec.signed);
    let y = net.add_input("Y", spec.height(), spec.signed);
    let d = spec.mac.then(|| net.add_input("D", spec.x_width, spec.signed));
    let bits = build_booth(&mut net, &x, spec.signed, &y, spec.signed, d.as_deref());
    // undo the MSB complement so P is a plain two's-complement word
    let mut p = bits.bits.clone();
    if bits.msb_complemented {
        let msb = p.pop().unwrap();
        let inv = net.lut1(vec![msb], 0b01);
        p.push(inv);
    }
    net.set_output("P", p, spec.signed);
    Ok(BoothFragment { spec, netlist: net, bits })
}

impl BoothFragment {
    /// LUTs of the array proper (the output inverter of signed fragments is
    /// port plumbing, not part of the array).
    pub fn array_luts(&self) -> usize {
        self.netlist.diagnostics().lut_count - self.bits.msb_complemented as usize
    }
}

/// Board weights of the array's output bits for a tile anchored at
/// `(ax, ay)`: local weight plus the anchor's Manhattan weight.
pub fn partial_product_columns(bits: &BoothBits, anchor: (u32, u32)) -> Vec<(u32, Signal)> {
    let shift = anchor.0 + anchor.1;
    bits.bits.iter().enumerate().map(|(i, s)| (shift + i as u32, *s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let e = booth_encode(false, false, false);
        assert_eq!((e.be, e.z, e.c, e.s), (0, true, false, false));
        let e = booth_encode(true, false, false);
        assert_eq!((e.be, e.z, e.c, e.s), (-2, false, true, true));
        let e = booth_encode(true, true, true);
        assert_eq!((e.be, e.z, e.c, e.s), (0, true, true, false));
    }

    #[test]
    fn encoding_identity_and_flag_invariants() {
        for r in 0..8u8 {
            let (n, c, p) = (r & 4 != 0, r & 2 != 0, r & 1 != 0);
            let f = booth_encode(n, c, p);
            assert_eq!(f.be as i32, -2 * n as i32 + c as i32 + p as i32);
            assert_eq!(f.z, f.be == 0);
            assert_eq!(f.s, f.be.abs() == 2);
            assert!(!f.c || f.be <= 0);
            assert_eq!(f.c, n);
        }
    }

    #[test]
    fn mac_example() {
        let f = build_booth_array(BoothArraySpec { levels: 3, x_width: 5, signed: false, mac: true }).unwrap();
        assert_eq!(f.netlist.simulate_values(&[31, 31, 31]).unwrap(), 992);
    }

    #[test]
    fn lut_count_l4_k8() {
        let f = build_booth_array(BoothArraySpec { levels: 4, x_width: 8, signed: false, mac: false }).unwrap();
        assert_eq!(f.array_luts(), 36);
        assert_eq!(f.bits.bits.len(), 15);
    }

    #[test]
    fn output_columns() {
        let f = build_booth_array(BoothArraySpec { levels: 3, x_width: 5, signed: false, mac: false }).unwrap();
        let cols = partial_product_columns(&f.bits, (0, 0));
        assert_eq!(cols.iter().map(|c| c.0).collect::<Vec<_>>(), (0..10).collect::<Vec<_>>());
        let shifted = partial_product_columns(&f.bits, (18, 0));
        assert!(shifted.iter().zip(&cols).all(|(a, b)| a.0 == b.0 + 18));
        assert_eq!(f.netlist.simulate_values(&[0, 0]).unwrap(), 0);
    }

    #[test]
    fn rows_layout() {
        let rows = level_rows(&BoothArraySpec { levels: 3, x_width: 4, signed: false, mac: false }).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].cells.last().unwrap().kind, CellType::B);
        assert_eq!(rows[1].cells.last().unwrap().kind, CellType::C);
        assert_eq!(rows[2].cells.last().unwrap().kind, CellType::D);
        assert_eq!(rows[2].cells.last().unwrap().positions, vec![4]);
        let signed = level_rows(&BoothArraySpec { levels: 3, x_width: 4, signed: true, mac: false }).unwrap();
        assert_eq!(signed[2].cells.last().unwrap().positions, vec![4, 5]);
        let retired: usize = rows.iter().map(|r| r.retired.len()).sum();
        assert_eq!(retired, 9);
    }
}
