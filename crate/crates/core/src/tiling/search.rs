//! Depth-first branch and bound over exact covers.
//!
//! The first uncovered cell in row-major order can only be covered by a tile
//! anchored on it, so each node branches over the candidates anchored there.
//! Nodes are pruned with `remaining cells × cheapest cost per cell` and with
//! a dominance table over covered-cell sets.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use super::{Board, Placement, TilingSolution};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveLimits {
    pub time_limit: Duration,
    /// Deterministic effort cap: search nodes expanded before giving up on
    /// proving optimality.
    pub max_nodes: u64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { time_limit: Duration::from_secs(60), max_nodes: 10_000_000 }
    }
}

const MEMO_CAP: usize = 4_000_000;

struct Cand {
    index: usize,
    cost: i64,
    area: i64,
    dsp: u32,
    /// (word, mask) pairs of covered cells.
    rows: Vec<(usize, u64)>,
}

struct Search<'a> {
    cands: Vec<Cand>,
    by_anchor: Vec<Vec<usize>>,
    cells: usize,
    budget: u32,
    /// Cheapest cost per cell as a fraction, with and without DSP tiles.
    ratio_any: (i64, i64),
    ratio_logic: (i64, i64),
    best_cost: i64,
    best: Option<Vec<usize>>,
    memo: HashMap<Vec<u64>, i64>,
    nodes: u64,
    limits: SolveLimits,
    start: Instant,
    aborted: bool,
    placements: &'a [Placement],
}

fn better(a: (i64, i64), b: (i64, i64)) -> bool {
    // a.0/a.1 < b.0/b.1
    (a.0 as i128) * (b.1 as i128) < (b.0 as i128) * (a.1 as i128)
}

impl Search<'_> {
    fn lower_bound(&self, remaining: i64, dsp_left: bool) -> i64 {
        let (n, d) = if dsp_left { self.ratio_any } else { self.ratio_logic };
        if d == 0 {
            return if remaining == 0 { 0 } else { i64::MAX / 4 };
        }
        // ceil(remaining * n / d)
        ((remaining as i128 * n as i128 + d as i128 - 1) / d as i128) as i64
    }

    fn first_free(&self, covered: &[u64], from: usize) -> Option<usize> {
        if from >= self.cells {
            return None;
        }
        let mut w = from / 64;
        let mut free = !covered[w] & (u64::MAX << (from % 64));
        loop {
            if free != 0 {
                return Some(w * 64 + free.trailing_zeros() as usize);
            }
            w += 1;
            if w == covered.len() {
                return None;
            }
            free = !covered[w];
        }
    }

    fn dfs(&mut self, covered: &mut Vec<u64>, from: usize, cost: i64, remaining: i64, dsp: u32, path: &mut Vec<usize>) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes
            || (self.nodes.is_multiple_of(4096) && self.start.elapsed() > self.limits.time_limit)
        {
            self.aborted = true;
            return;
        }
        let Some(cell) = self.first_free(covered, from) else {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = Some(path.clone());
            }
            return;
        };
        if cost + self.lower_bound(remaining, dsp < self.budget) >= self.best_cost {
            return;
        }
        if self.memo.len() < MEMO_CAP || self.memo.contains_key(covered.as_slice()) {
            match self.memo.get(covered.as_slice()) {
                Some(&c) if c <= cost => return,
                _ => {
                    self.memo.insert(covered.clone(), cost);
                }
            }
        }
        for i in 0..self.by_anchor[cell].len() {
            let ci = self.by_anchor[cell][i];
            let c = &self.cands[ci];
            if dsp + c.dsp > self.budget {
                continue;
            }
            if c.rows.iter().any(|&(w, m)| covered[w] & m != 0) {
                continue;
            }
            let (ccost, carea, cdsp) = (c.cost, c.area, c.dsp);
            for &(w, m) in &self.cands[ci].rows {
                covered[w] |= m;
            }
            path.push(ci);
            self.dfs(covered, cell + 1, cost + ccost, remaining - carea, dsp + cdsp, path);
            path.pop();
            for &(w, m) in &self.cands[ci].rows {
                covered[w] &= !m;
            }
            if self.aborted {
                return;
            }
        }
    }
}

/// Minimises Σ cost^tile over exact covers of `board` drawn from
/// `candidates`, with at most `board.dsp_budget` DSP tiles.
///
/// Returns the proven optimum, or the best cover found with
/// `optimal = false` once a limit is hit. `warm_start`, when given and
/// valid for `board`, seeds the incumbent so the result is never worse.
pub fn solve_exact(
    board: &Board,
    candidates: &[Placement],
    limits: SolveLimits,
    warm_start: Option<&TilingSolution>,
) -> Result<TilingSolution> {
    let wx = board.wx as usize;
    let cells = board.area() as usize;
    let words = cells.div_ceil(64);
    let mut cands = Vec::new();
    let mut by_anchor = vec![Vec::new(); cells];
    let mut ratio_any = (0i64, 0i64);
    let mut ratio_logic = (0i64, 0i64);
    for (index, p) in candidates.iter().enumerate() {
        if !p.fits(board) {
            continue;
        }
        let Ok(cost) = p.cost(board) else { continue };
        if cost.dsp > board.dsp_budget {
            continue;
        }
        let s = p.shape();
        let mut rows = Vec::new();
        for y in p.y..p.y + s.height {
            let start = y as usize * wx + p.x as usize;
            for bit in start..start + s.width as usize {
                match rows.last_mut() {
                    Some((w, m)) if *w == bit / 64 => *m |= 1u64 << (bit % 64),
                    _ => rows.push((bit / 64, 1u64 << (bit % 64))),
                }
            }
        }
        let c = Cand { index, cost: cost.lut_total.hundredths(), area: s.area() as i64, dsp: cost.dsp, rows };
        let r = (c.cost, c.area);
        if ratio_any.1 == 0 || better(r, ratio_any) {
            ratio_any = r;
        }
        if c.dsp == 0 && (ratio_logic.1 == 0 || better(r, ratio_logic)) {
            ratio_logic = r;
        }
        by_anchor[p.y as usize * wx + p.x as usize].push(cands.len());
        cands.push(c);
    }
    for list in &mut by_anchor {
        // cheapest per cell first, larger tiles first on ties
        list.sort_by(|&a, &b| {
            let (ca, cb) = (&cands[a], &cands[b]);
            let l = ca.cost as i128 * cb.area as i128;
            let r = cb.cost as i128 * ca.area as i128;
            l.cmp(&r).then(cb.area.cmp(&ca.area)).then(ca.index.cmp(&cb.index))
        });
    }

    let warm = warm_start.and_then(|w| TilingSolution::from_placements(board, w.placements.clone(), false).ok());
    let mut search = Search {
        cands,
        by_anchor,
        cells,
        budget: board.dsp_budget,
        ratio_any,
        ratio_logic,
        best_cost: warm.as_ref().map(|w| w.objective.hundredths()).unwrap_or(i64::MAX),
        best: None,
        memo: HashMap::new(),
        nodes: 0,
        limits,
        start: Instant::now(),
        aborted: false,
        placements: candidates,
    };
    let mut covered = vec![0u64; words];
    // padding bits past the last cell count as covered
    if !cells.is_multiple_of(64) {
        covered[words - 1] |= !((1u64 << (cells % 64)) - 1);
    }
    let mut path = Vec::new();
    search.dfs(&mut covered, 0, 0, cells as i64, 0, &mut path);

    let optimal = !search.aborted;
    match (search.best.take(), warm) {
        (Some(path), _) => {
            let placements = path.iter().map(|&ci| search.placements[search.cands[ci].index]).collect();
            TilingSolution::from_placements(board, placements, optimal)
        }
        (None, Some(mut w)) => {
            w.optimal = optimal;
            Ok(w)
        }
        (None, None) if optimal => Err(Error::Infeasible),
        (None, None) => Err(Error::Timeout),
    }
}
