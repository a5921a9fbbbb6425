//! LP-format model export and solution import for external ILP solvers.
//!
//! Variable `p<i>` selects candidate `i`. The model has one equality per
//! board cell (exact cover), one DSP budget row when DSP candidates exist,
//! and minimises Σ cost^tile.

use std::fmt::Write;

use super::{Board, Placement, TilingSolution};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &[String]) {
    for (i, chunk) in terms.chunks(TERMS_PER_LINE).enumerate() {
        if i > 0 {
            out.push_str("\n   ");
        }
        out.push(' ');
        out.push_str(&chunk.join(" + "));
    }
}

pub fn export_lp(board: &Board, candidates: &[Placement]) -> String {
    let mut out = String::new();
    writeln!(out, "\\ multiplier tiling model: {board} board, DSP budget {}", board.dsp_budget).unwrap();
    let mut costs = Vec::with_capacity(candidates.len());
    for (i, p) in candidates.iter().enumerate() {
        let cost = p.cost(board).ok();
        writeln!(out, "\\ p{i} = {p}").unwrap();
        costs.push(cost);
    }
    out.push_str("Minimize\n obj:");
    let terms: Vec<String> =
        costs.iter().enumerate().filter_map(|(i, c)| c.as_ref().map(|c| format!("{} p{i}", c.lut_total))).collect();
    write_terms(&mut out, &terms);
    out.push_str("\nSubject To\n");
    let mut cover: Vec<Vec<usize>> = vec![Vec::new(); board.area() as usize];
    for (i, p) in candidates.iter().enumerate() {
        if costs[i].is_none() || !p.fits(board) {
            continue;
        }
        let s = p.shape();
        for y in p.y..p.y + s.height {
            for x in p.x..p.x + s.width {
                cover[(y * board.wx + x) as usize].push(i);
            }
        }
    }
    for (cell, vars) in cover.iter().enumerate() {
        let (x, y) = (cell as u32 % board.wx, cell as u32 / board.wx);
        write!(out, " cover_{x}_{y}:").unwrap();
        if vars.is_empty() {
            // uncoverable cell: leave an infeasible row rather than dropping it
            out.push_str(" 0 p0 = 1\n");
            continue;
        }
        let terms: Vec<String> = vars.iter().map(|i| format!("p{i}")).collect();
        write_terms(&mut out, &terms);
        out.push_str(" = 1\n");
    }
    let dsp_terms: Vec<String> = costs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.as_ref().filter(|c| c.dsp > 0).map(|c| format!("{} p{i}", c.dsp)))
        .collect();
    if !dsp_terms.is_empty() {
        out.push_str(" dsp_budget:");
        write_terms(&mut out, &dsp_terms);
        writeln!(out, " <= {}", board.dsp_budget).unwrap();
    }
    out.push_str("Binary\n");
    let vars: Vec<String> = (0..candidates.len()).map(|i| format!("p{i}")).collect();
    for chunk in vars.chunks(16) {
        writeln!(out, " {}", chunk.join(" ")).unwrap();
    }
    out.push_str("End\n");
    out
}

/// Reads `<var> <value>` lines (blank lines and `#` comments ignored) and
/// rebuilds the selected tiling, re-checking coverage and budget.
pub fn import_solution(board: &Board, candidates: &[Placement], assignment: &str) -> Result<TilingSolution> {
    let mut chosen = Vec::new();
    for (n, line) in assignment.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(var), Some(val), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse { line: n + 1, msg: format!("expected `<var> <value>`, got `{line}`") });
        };
        let index = var
            .strip_prefix('p')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&i| i < candidates.len())
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        let value: f64 = val.parse().map_err(|_| Error::Parse { line: n + 1, msg: format!("bad value `{val}`") })?;
        if value > 0.5 {
            chosen.push(candidates[index]);
        }
    }
    TilingSolution::from_placements(board, chosen, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tileset::{TileKind, Variant};

    fn two_by_one() -> (Board, Vec<Placement>) {
        let b = Board::unsigned(2, 1);
        let one = TileKind::normal(Variant::Lut1x1).unwrap();
        let pair = TileKind::normal(Variant::Lut1x2).unwrap().transposed();
        (b, vec![Placement::new(one, 0, 0), Placement::new(one, 1, 0), Placement::new(pair, 0, 0)])
    }

    #[test]
    fn small_model_shape() {
        let (b, c) = two_by_one();
        let lp = export_lp(&b, &c);
        assert!(lp.contains(" obj: 1.65 p0 + 1.65 p1 + 2.3 p2"));
        assert!(lp.contains(" cover_0_0: p0 + p2 = 1"));
        assert!(lp.contains(" cover_1_0: p1 + p2 = 1"));
        assert!(!lp.contains("dsp_budget"));
        assert!(lp.ends_with("End\n"));
    }

    #[test]
    fn import_errors() {
        let (b, c) = two_by_one();
        let s = import_solution(&b, &c, "p2 1\np0 0\n").unwrap();
        assert_eq!(s.objective.to_string(), "2.3");
        assert!(matches!(import_solution(&b, &c, "p1 1\n"), Err(Error::Coverage { x: 0, y: 0, .. })));
        assert!(matches!(import_solution(&b, &c, "q7 1\n"), Err(Error::UnknownVariable(_))));
        assert!(matches!(import_solution(&b, &c, "p9 1\n"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn budget_violation() {
        let b = Board::new(48, 17, false, 1).unwrap();
        let dsp = TileKind::normal(Variant::Dsp24x17).unwrap();
        let c = vec![Placement::new(dsp, 0, 0), Placement::new(dsp, 24, 0)];
        assert_eq!(import_solution(&b, &c, "p0 1\np1 1"), Err(Error::Budget { used: 2, budget: 1 }));
        let lp = export_lp(&Board { dsp_budget: 0, ..b }, &c);
        assert!(lp.contains(" dsp_budget: 1 p0 + 1 p1 <= 0"));
    }
}
