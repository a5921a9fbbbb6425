//! Truth-table helpers and packing of single-bit functions into LUT6_2 sites.
//!
//! A LUT6_2 site implements either one function of up to six inputs or two
//! functions whose combined support is at most five inputs.

pub const LUT_INPUTS: usize = 6;
pub const DUAL_OUTPUT_INPUTS: usize = 5;

/// Bitmask of the inputs a truth table over `n` inputs actually depends on.
pub fn support(table: u64, n: usize) -> u32 {
    let rows = 1usize << n;
    let mut mask = 0;
    for i in 0..n {
        for r in 0..rows {
            if r & (1 << i) == 0 {
                let lo = (table >> r) & 1;
                let hi = (table >> (r | (1 << i))) & 1;
                if lo != hi {
                    mask |= 1 << i;
                    break;
                }
            }
        }
    }
    mask
}

/// Builds a truth table over `n` inputs from a predicate on the row index.
pub fn table_from_fn(n: usize, f: impl Fn(u32) -> bool) -> u64 {
    let mut t = 0u64;
    for r in 0..(1u32 << n) {
        if f(r) {
            t |= 1 << r;
        }
    }
    t
}

/// Pairs outputs into LUT sites, minimising the site count. Returns the
/// groups (one or two output indices each) in ascending order of first index.
pub fn pack(supports: &[u32]) -> Vec<Vec<usize>> {
    let n = supports.len();
    assert!(n <= 16, "too many outputs to pack");
    let full = (1usize << n) - 1;
    // best[mask] = minimal site count for the outputs in `mask`
    let mut best = vec![u32::MAX; 1 << n];
    let mut choice = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut b = best[rest] + 1;
        let mut c = i;
        for j in (i + 1)..n {
            if rest & (1 << j) != 0 && (supports[i] | supports[j]).count_ones() as usize <= DUAL_OUTPUT_INPUTS {
                let v = best[rest & !(1 << j)] + 1;
                if v < b {
                    b = v;
                    c = j;
                }
            }
        }
        best[mask] = b;
        choice[mask] = c;
    }
    let mut groups = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask];
        if j == i {
            groups.push(vec![i]);
            mask &= !(1 << i);
        } else {
            groups.push(vec![i, j]);
            mask &= !((1 << i) | (1 << j));
        }
    }
    groups
}

pub fn site_count(tables: &[u64], n_inputs: usize) -> usize {
    let supports: Vec<u32> = tables.iter().map(|&t| support(t, n_inputs)).collect();
    pack(&supports).len()
}

/// Output bits of a small `p`×`q` product computed entirely in LUTs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTables {
    /// Inputs are ordered a[0..p] then b[0..q].
    pub inputs: usize,
    /// One truth table per output bit, LSB first.
    pub tables: Vec<u64>,
    /// The top output bit carries weight -2^(width-1).
    pub negative_msb: bool,
}

impl ProductTables {
    pub fn width(&self) -> usize {
        self.tables.len()
    }

    pub fn lut_count(&self) -> usize {
        site_count(&self.tables, self.inputs)
    }
}

fn operand(bits: u32, width: usize, signed: bool) -> i64 {
    let v = bits as i64;
    if signed && width > 0 && (bits >> (width - 1)) & 1 == 1 {
        v - (1 << width)
    } else {
        v
    }
}

/// Truth tables of a `p`-bit by `q`-bit product with per-operand signedness.
/// The output is the narrowest two's-complement (or unsigned, when the
/// product is never negative) word holding every product value.
pub fn small_product(p: usize, q: usize, a_signed: bool, b_signed: bool) -> ProductTables {
    let n = p + q;
    assert!(p >= 1 && q >= 1 && n <= LUT_INPUTS, "small product too wide");
    let value = |r: u32| {
        let a = operand(r & ((1 << p) - 1), p, a_signed);
        let b = operand(r >> p, q, b_signed);
        a * b
    };
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for r in 0..(1u32 << n) {
        let v = value(r);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let negative = lo < 0;
    let mut width = 1;
    if negative {
        while !(-(1i64 << (width - 1)) <= lo && hi < (1i64 << (width - 1))) {
            width += 1;
        }
    } else {
        while hi >= (1i64 << width) {
            width += 1;
        }
    }
    let tables =
        (0..width).map(|bit| table_from_fn(n, |r| (value(r).rem_euclid(1 << width) >> bit) & 1 == 1)).collect();
    ProductTables { inputs: n, tables, negative_msb: negative }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsigned_catalog_costs() {
        // LUT counts and output widths of the fixed-size LUT multipliers
        assert_eq!(small_product(1, 1, false, false).lut_count(), 1);
        assert_eq!(small_product(1, 2, false, false).lut_count(), 1);
        assert_eq!(small_product(1, 2, false, false).width(), 2);
        assert_eq!(small_product(2, 3, false, false).lut_count(), 3);
        assert_eq!(small_product(2, 3, false, false).width(), 5);
        assert_eq!(small_product(3, 3, false, false).lut_count(), 5);
        assert_eq!(small_product(3, 3, false, false).width(), 6);
    }

    #[test]
    fn signed_single_bit() {
        let t = small_product(1, 1, true, false);
        assert_eq!(t.width(), 1);
        assert!(t.negative_msb);
        let t = small_product(1, 1, true, true);
        assert!(!t.negative_msb);
    }

    #[test]
    fn support_detects_dependence() {
        let and01 = table_from_fn(3, |r| r & 0b11 == 0b11);
        assert_eq!(support(and01, 3), 0b011);
    }

    #[test]
    fn pack_pairs_small_supports() {
        let g = pack(&[0b11, 0b111111, 0b1111, 0b111111]);
        assert_eq!(g.len(), 3);
    }
}
