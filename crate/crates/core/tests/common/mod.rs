//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

/// LUT-only tile shapes `(width, height, cost^tile in hundredths)` written
/// out from the published tile table, independently of the crate's catalog.
pub fn lut_only_shapes(max_dim: u32) -> Vec<(u32, u32, i64)> {
    let mut v = vec![(1, 1, 165), (1, 2, 230), (2, 1, 230), (2, 3, 625), (3, 2, 625), (3, 3, 890)];
    for k in 3..=max_dim {
        let cost = 165 * k as i64 + 230;
        v.push((2, k, cost));
        v.push((k, 2, cost));
    }
    v
}

/// Minimum exact-cover cost of a `wx`×`wy` board by bitmask dynamic
/// programming over covered-cell sets.
pub fn oracle_min_cost(wx: u32, wy: u32, shapes: &[(u32, u32, i64)]) -> i64 {
    assert!(wx * wy <= 64);
    let full = if wx * wy == 64 { u64::MAX } else { (1u64 << (wx * wy)) - 1 };
    let mut memo = HashMap::new();
    fn go(mask: u64, full: u64, wx: u32, wy: u32, shapes: &[(u32, u32, i64)], memo: &mut HashMap<u64, i64>) -> i64 {
        if mask == full {
            return 0;
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let cell = (!mask).trailing_zeros();
        let (x, y) = (cell % wx, cell / wx);
        let mut best = i64::MAX;
        for &(w, h, cost) in shapes {
            if x + w > wx || y + h > wy {
                continue;
            }
            let mut tile = 0u64;
            for dy in 0..h {
                for dx in 0..w {
                    tile |= 1 << ((y + dy) * wx + x + dx);
                }
            }
            if tile & mask != 0 {
                continue;
            }
            let rest = go(mask | tile, full, wx, wy, shapes, memo);
            if rest != i64::MAX {
                best = best.min(rest + cost);
            }
        }
        memo.insert(mask, best);
        best
    }
    go(0, full, wx, wy, shapes, &mut memo)
}
