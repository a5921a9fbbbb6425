mod common;

use booth_tiling::tileset::{build_tile_set, TileSetConfig};
use booth_tiling::tiling::{
    enumerate_placements, export_lp, import_solution, solve_exact, Board, SolveLimits, TilingSolution,
};
use booth_tiling::Luts;
use proptest::prelude::*;

fn solve(board: &Board, cfg: &TileSetConfig) -> TilingSolution {
    let set = build_tile_set(cfg).unwrap();
    let cands = enumerate_placements(board, &set);
    solve_exact(board, &cands, SolveLimits::default(), None).unwrap()
}

#[test]
fn lut_only_optimum_matches_bitmask_oracle() {
    for wx in 1..=6 {
        for wy in 1..=6 {
            let board = Board::unsigned(wx, wy);
            let s = solve(&board, &TileSetConfig::lut_only());
            let oracle = common::oracle_min_cost(wx, wy, &common::lut_only_shapes(wx.max(wy)));
            assert!(s.optimal, "{wx}x{wy}");
            assert_eq!(s.objective, Luts::from_hundredths(oracle), "{wx}x{wy}");
        }
    }
}

#[test]
fn oracle_sanity() {
    let shapes = common::lut_only_shapes(3);
    assert_eq!(common::oracle_min_cost(1, 1, &shapes), 165);
    assert_eq!(common::oracle_min_cost(3, 3, &shapes), 890);
    // two 1x2 tiles beat four 1x1 tiles on a 2x2 board
    assert_eq!(common::oracle_min_cost(2, 2, &shapes), 460);
}

#[test]
fn transposed_boards_cost_the_same() {
    for (wx, wy) in [(3, 5), (4, 7), (2, 8), (6, 9), (5, 12)] {
        for signed in [false, true] {
            let b = Board::new(wx, wy, signed, 0).unwrap();
            let a = solve(&b, &TileSetConfig::default());
            let t = solve(&b.transposed(), &TileSetConfig::default());
            assert!(a.optimal && t.optimal);
            assert_eq!(a.objective, t.objective, "{b}");
            let back: Vec<_> = a.placements.iter().map(|p| p.transposed()).collect();
            let mirrored = TilingSolution::from_placements(&b.transposed(), back, false).unwrap();
            assert_eq!(mirrored.objective, a.objective);
        }
    }
}

#[test]
fn larger_tile_sets_never_cost_more() {
    for n in [5u32, 8, 11] {
        let b = Board::unsigned(n, n);
        let none = solve(&b, &TileSetConfig::lut_only());
        let l3 = solve(&b, &TileSetConfig { booth_max_level: 3, dsp: false, ..TileSetConfig::default() });
        let l4 = solve(&b, &TileSetConfig { booth_max_level: 4, dsp: false, ..TileSetConfig::default() });
        assert!(l4.objective <= l3.objective && l3.objective <= none.objective, "{n}");
    }
}

#[test]
fn dsp_budget_is_respected() {
    let b = Board::new(24, 24, false, 1).unwrap();
    let s = solve(&b, &TileSetConfig::default());
    assert_eq!(s.dsp_used, 1);
    let zero = Board { dsp_budget: 0, ..b };
    let set = build_tile_set(&TileSetConfig::default()).unwrap();
    let cands = enumerate_placements(&zero, &set);
    let s0 = solve_exact(&zero, &cands, SolveLimits::default(), None).unwrap();
    assert_eq!(s0.dsp_used, 0);
    assert!(s.objective < s0.objective);
}

/// Parses the objective row of an exported model into `(coefficient, index)`.
fn lp_objective(lp: &str) -> Vec<(f64, usize)> {
    let start = lp.find(" obj:").unwrap() + 5;
    let end = lp.find("Subject To").unwrap();
    lp[start..end]
        .split('+')
        .map(|t| {
            let mut it = t.split_whitespace();
            let c: f64 = it.next().unwrap().parse().unwrap();
            let v = it.next().unwrap();
            (c, v[1..].parse().unwrap())
        })
        .collect()
}

#[test]
fn lp_model_agrees_with_the_exact_solution() {
    for (wx, wy) in [(3, 3), (4, 6), (7, 5)] {
        let b = Board::unsigned(wx, wy);
        let set = build_tile_set(&TileSetConfig::default()).unwrap();
        let cands = enumerate_placements(&b, &set);
        let s = solve_exact(&b, &cands, SolveLimits::default(), None).unwrap();
        let lp = export_lp(&b, &cands);
        // one cover row per cell, one binary per candidate
        assert_eq!(lp.matches("cover_").count(), (wx * wy) as usize);
        let binaries = lp.split("Binary").nth(1).unwrap();
        assert_eq!(binaries.split_whitespace().filter(|t| t.starts_with('p')).count(), cands.len());
        // the chosen assignment has the same objective in the model
        let chosen: Vec<usize> = s.placements.iter().map(|p| cands.iter().position(|c| c == p).unwrap()).collect();
        let obj: f64 = lp_objective(&lp).iter().filter(|(_, i)| chosen.contains(i)).map(|(c, _)| c).sum();
        assert!((obj - s.objective.as_f64()).abs() < 1e-9);
        let text: String = chosen.iter().map(|i| format!("p{i} 1\n")).collect();
        let back = import_solution(&b, &cands, &text).unwrap();
        assert_eq!(back.objective, s.objective);
        assert_eq!(back.placements, s.placements);
    }
}

#[test]
fn node_budget_keeps_a_feasible_incumbent() {
    let b = Board::unsigned(20, 20);
    let set = build_tile_set(&TileSetConfig::default()).unwrap();
    let cands = enumerate_placements(&b, &set);
    let limits = SolveLimits { max_nodes: 2_000, ..SolveLimits::default() };
    let s = solve_exact(&b, &cands, limits, None).unwrap();
    assert!(!s.optimal);
    let again = solve_exact(&b, &cands, limits, Some(&s)).unwrap();
    assert!(again.objective <= s.objective);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solutions_are_exact_covers(wx in 1u32..=8, wy in 1u32..=8, signed: bool, level in prop::sample::select(vec![0u32, 3, 4])) {
        let b = Board::new(wx, wy, signed, 0).unwrap();
        let cfg = TileSetConfig { booth_max_level: level, dsp: false, ..TileSetConfig::default() };
        let s = solve(&b, &cfg);
        // from_placements re-checks coverage, bounds and admissibility
        let again = TilingSolution::from_placements(&b, s.placements.clone(), s.optimal).unwrap();
        prop_assert_eq!(again.objective, s.objective);
        // never worse than covering every cell with a 1x1 tile
        let singles = Luts::from_hundredths(165) * (wx * wy) as i64;
        if !signed {
            prop_assert!(s.objective <= singles);
        }
    }
}

#[test]
fn lp_export_matches_golden_file() {
    let b = Board::unsigned(2, 2);
    let set = build_tile_set(&TileSetConfig::default()).unwrap();
    let cands = enumerate_placements(&b, &set);
    assert_eq!(export_lp(&b, &cands), include_str!("golden/unsigned_2x2.lp"));
    let s = import_solution(&b, &cands, include_str!("golden/unsigned_2x2.sol")).unwrap();
    assert_eq!(s.objective, Luts::from_hundredths(460));
    assert_eq!(s.placements.len(), 2);
}
