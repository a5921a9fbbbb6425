//! Compressor-tree scheduling and its netlist realization.
//!
//! Scheduling works on column heights only. Each stage reads the bits that
//! exist at its start and writes compressor outputs into the next stage, so
//! a stage adds one compressor delay to every bit it touches. Compression
//! stops once every column holds at most two bits (three for a ternary final
//! adder); a carry-propagate adder then produces the result word.

use std::cmp::Ordering;

use super::compressor::{Library, RowKind, Shape};
use super::BitHeap;
use crate::cost::Luts;
use crate::error::{Error, Result};
use crate::lutpack;
use crate::netlist::{Netlist, Signal};

/// Reduction targets following the Dadda sequence.
const DADDA: [u32; 10] = [2, 3, 4, 6, 9, 13, 19, 28, 42, 63];
const MAX_STAGES: usize = 64;
/// Search budget of [`Mode::ExactStages`], in planned stages.
const EXACT_STAGE_BUDGET: usize = 50_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Per stage, greedily apply the compressor with the best bits removed
    /// per LUT at the lowest column that is still too high.
    #[default]
    Heuristic,
    /// Bounded search over per-stage reduction targets for the fewest
    /// stages, ties broken by LUT cost. Never worse than the heuristic.
    ExactStages,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FinalAdderKind {
    /// Two-input carry-propagate adder.
    #[default]
    Binary,
    /// Three-input adder built from the ternary row compressor.
    Ternary,
}

impl FinalAdderKind {
    fn rows(self) -> u32 {
        match self {
            FinalAdderKind::Binary => 2,
            FinalAdderKind::Ternary => 3,
        }
    }
}

/// One compressor placed with its lowest input column at `column`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    /// Index into the library.
    pub compressor: usize,
    pub column: u32,
    /// Columns spanned by a row compressor; 1 for counters.
    pub width: u32,
    /// Bits actually taken per relative column (missing inputs are zero).
    pub taken: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stage {
    pub instances: Vec<Instance>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FinalAdder {
    pub kind: FinalAdderKind,
    /// First column the adder covers; lower columns hold at most one bit.
    pub lsb: u32,
    /// Columns summed, one LUT each.
    pub width: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressorSchedule {
    pub heap_width: u32,
    pub initial_heights: Vec<u32>,
    pub stages: Vec<Stage>,
    pub final_heights: Vec<u32>,
    pub final_adder: Option<FinalAdder>,
    pub total_lut: Luts,
    pub stage_count: usize,
}

/// Bits removed per LUT of an application, compared as fractions.
#[derive(Clone, Copy)]
struct Gain {
    removed: i64,
    cost: Luts,
}

impl Gain {
    fn cmp(&self, other: &Gain) -> Ordering {
        (self.removed * other.cost.hundredths())
            .cmp(&(other.removed * self.cost.hundredths()))
            .then(self.removed.cmp(&other.removed))
    }
}

fn candidate(lib: &Library, idx: usize, avail: &[u32], c: usize, rows: bool) -> Option<(Instance, Gain)> {
    let comp = &lib.compressors[idx];
    let width = avail.len();
    let (w, taken) = match &comp.shape {
        Shape::Gpc { inputs, .. } => {
            let taken: Vec<u32> =
                inputs.iter().enumerate().map(|(j, &n)| avail.get(c + j).map_or(0, |&a| a.min(n))).collect();
            if taken[0] < 2 {
                return None;
            }
            (1, taken)
        }
        Shape::Row(kind) => {
            if !rows {
                return None;
            }
            // extend while each column still removes at least one bit
            let w = (c..width).take_while(|&j| avail[j] > kind.rows_out()).count();
            if w == 0 {
                return None;
            }
            (w as u32, avail[c..c + w].iter().map(|&a| a.min(kind.rows_in())).collect())
        }
    };
    let produced: u32 = comp.output_columns(w).iter().enumerate().filter(|(j, _)| c + j < width).map(|(_, &n)| n).sum();
    let removed = taken.iter().sum::<u32>() as i64 - produced as i64;
    let gain = Gain { removed, cost: comp.cost.at(w) };
    Some((Instance { compressor: idx, column: c as u32, width: w, taken }, gain))
}

/// Plans one stage reducing every column to at most `threshold` bits where
/// the bits available at the start of the stage allow it.
fn plan_stage(heights: &[u32], lib: &Library, threshold: u32, rows: bool) -> (Stage, Vec<u32>) {
    let width = heights.len();
    let mut avail = heights.to_vec();
    let mut next = vec![0u32; width];
    let mut stage = Stage::default();
    for c in 0..width {
        while avail[c] >= 2 && avail[c] + next[c] > threshold {
            let mut best: Option<(Instance, Gain)> = None;
            for idx in 0..lib.compressors.len() {
                if let Some((inst, g)) = candidate(lib, idx, &avail, c, rows) {
                    if best.as_ref().is_none_or(|(_, b)| g.cmp(b) == Ordering::Greater) {
                        best = Some((inst, g));
                    }
                }
            }
            let Some((inst, _)) = best else { break };
            for (j, &t) in inst.taken.iter().enumerate() {
                avail[c + j] -= t;
            }
            let outs = lib.compressors[inst.compressor].output_columns(inst.width);
            for (j, &n) in outs.iter().enumerate() {
                if c + j < width {
                    next[c + j] += n;
                }
            }
            stage.instances.push(inst);
        }
    }
    for c in 0..width {
        next[c] += avail[c];
    }
    (stage, next)
}

fn stage_cost(stage: &Stage, lib: &Library) -> Luts {
    stage.instances.iter().map(|i| lib.compressors[i.compressor].cost.at(i.width)).sum()
}

/// The adder spans from the first column holding two bits to the highest
/// non-empty column; the carry-out lands in the column above.
fn final_adder(heights: &[u32], kind: FinalAdderKind) -> Option<FinalAdder> {
    let lsb = heights.iter().position(|&h| h >= 2)? as u32;
    let top = heights.iter().rposition(|&h| h > 0)? as u32;
    Some(FinalAdder { kind, lsb, width: top - lsb + 1 })
}

fn final_cost(fa: &Option<FinalAdder>) -> Luts {
    fa.map_or(Luts::ZERO, |f| Luts::whole(f.width as i64))
}

fn has_rows(lib: &Library) -> bool {
    lib.compressors.iter().any(|c| matches!(c.shape, Shape::Row(_)))
}

fn heuristic(heights: &[u32], lib: &Library, target: u32) -> Result<(Vec<Stage>, Vec<u32>)> {
    let mut h = heights.to_vec();
    let mut stages = Vec::new();
    while h.iter().any(|&x| x > target) {
        let (stage, next) = plan_stage(&h, lib, target, true);
        if next == h || stages.len() == MAX_STAGES {
            return Err(Error::Compressor(format!("library cannot reduce heights {h:?} to {target}")));
        }
        stages.push(stage);
        h = next;
    }
    Ok((stages, h))
}

struct Search<'a> {
    lib: &'a Library,
    target: u32,
    kind: FinalAdderKind,
    with_rows: bool,
    budget: usize,
    best: (Vec<Stage>, Vec<u32>, Luts),
    path: Vec<Stage>,
}

impl Search<'_> {
    fn options(&self, heights: &[u32]) -> Vec<(u32, bool)> {
        let maxh = heights.iter().copied().max().unwrap_or(0);
        let mut targets = vec![self.target];
        let below: Vec<u32> = DADDA.iter().copied().filter(|&d| d > self.target && d < maxh).collect();
        targets.extend(below.iter().rev().take(2));
        let mut opts = Vec::new();
        for t in targets {
            opts.push((t, true));
            if self.with_rows {
                opts.push((t, false));
            }
        }
        opts
    }

    fn run(&mut self, heights: &[u32], cost: Luts) {
        if heights.iter().all(|&h| h <= self.target) {
            let total = cost + final_cost(&final_adder(heights, self.kind));
            let better =
                self.path.len() < self.best.0.len() || (self.path.len() == self.best.0.len() && total < self.best.2);
            if better {
                self.best = (self.path.clone(), heights.to_vec(), total);
            }
            return;
        }
        // one more stage would tie the best count at most
        if self.path.len() + 1 > self.best.0.len() || self.budget == 0 {
            return;
        }
        if self.path.len() + 1 == self.best.0.len() && cost >= self.best.2 {
            return;
        }
        for (t, rows) in self.options(heights) {
            if self.budget == 0 {
                return;
            }
            self.budget -= 1;
            let (stage, next) = plan_stage(heights, self.lib, t, rows);
            if next == heights {
                continue;
            }
            let c = cost + stage_cost(&stage, self.lib);
            self.path.push(stage);
            self.run(&next, c);
            self.path.pop();
        }
    }
}

/// Plans compression of `heap` (constant bits included) down to the final
/// adder's row count.
pub fn schedule(heap: &BitHeap, lib: &Library, mode: Mode, kind: FinalAdderKind) -> Result<CompressorSchedule> {
    let initial = heap.heights();
    let target = kind.rows();
    let (stages, final_heights) = match mode {
        Mode::Heuristic => heuristic(&initial, lib, target)?,
        Mode::ExactStages => {
            let (stages, h) = heuristic(&initial, lib, target)?;
            let cost = stages.iter().map(|s| stage_cost(s, lib)).sum::<Luts>() + final_cost(&final_adder(&h, kind));
            let mut search = Search {
                lib,
                target,
                kind,
                with_rows: has_rows(lib),
                budget: EXACT_STAGE_BUDGET,
                best: (stages, h, cost),
                path: Vec::new(),
            };
            search.run(&initial, Luts::ZERO);
            let (stages, h, _) = search.best;
            (stages, h)
        }
    };
    let final_adder = final_adder(&final_heights, kind);
    let mut s = CompressorSchedule {
        heap_width: heap.width(),
        initial_heights: initial,
        stage_count: stages.len(),
        stages,
        final_heights,
        final_adder,
        total_lut: Luts::ZERO,
    };
    s.total_lut = compression_cost(&s, lib);
    Ok(s)
}

/// Σ compressor LUT costs plus one LUT per final-adder column.
pub fn compression_cost(s: &CompressorSchedule, lib: &Library) -> Luts {
    s.stages.iter().map(|st| stage_cost(st, lib)).sum::<Luts>() + final_cost(&s.final_adder)
}

/// Netlist signals of a realized compressor tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realized {
    /// Columns entering the final adder, LSB first.
    pub final_columns: Vec<Vec<Signal>>,
    /// The result word, `heap_width` bits.
    pub output: Vec<Signal>,
}

/// Instantiates the scheduled compressors and the final adder in `net`.
pub fn realize(net: &mut Netlist, heap: &BitHeap, s: &CompressorSchedule, lib: &Library) -> Result<Realized> {
    let mut heap = heap.clone();
    if heap.heights() != s.initial_heights {
        return Err(Error::Compressor("schedule was planned for a different heap".into()));
    }
    heap.fold_constant(net);
    let width = heap.width() as usize;
    let mut cols: Vec<Vec<Signal>> = heap.columns().iter().map(|c| c.iter().map(|b| b.signal).collect()).collect();
    for stage in &s.stages {
        let mut next: Vec<Vec<Signal>> = vec![Vec::new(); width];
        for inst in &stage.instances {
            let c0 = inst.column as usize;
            let inputs: Vec<Vec<Signal>> =
                inst.taken.iter().enumerate().map(|(j, &t)| cols[c0 + j].drain(..t as usize).collect()).collect();
            for (j, sig) in lib.compressors[inst.compressor].build(net, &inputs) {
                if c0 + (j as usize) < width {
                    next[c0 + j as usize].push(sig);
                }
            }
        }
        for (n, rest) in next.iter_mut().zip(cols) {
            n.extend(rest);
        }
        cols = next;
    }
    let heights: Vec<u32> = cols.iter().map(|c| c.len() as u32).collect();
    if heights != s.final_heights {
        return Err(Error::Compressor("realized heights diverge from the schedule".into()));
    }
    let zero = net.constant(false);
    let mut output: Vec<Signal> = cols.iter().map(|c| c.first().copied().unwrap_or(zero)).collect();
    if let Some(fa) = s.final_adder {
        let lo = fa.lsb as usize;
        match fa.kind {
            FinalAdderKind::Binary => {
                let xor = lutpack::table_from_fn(2, |r| r.count_ones() == 1);
                let mut cin = zero;
                let hi = lo + fa.width as usize;
                for c in lo..hi {
                    let a = cols[c].first().copied().unwrap_or(zero);
                    let b = cols[c].get(1).copied().unwrap_or(zero);
                    let prop = net.lut1(vec![a, b], xor);
                    let (sum, cout) = net.carry(prop, a, cin);
                    output[c] = sum;
                    cin = cout;
                }
                if hi < width {
                    output[hi] = cin;
                }
            }
            FinalAdderKind::Ternary => {
                let adder = super::Compressor::row("final", RowKind::Ternary, super::LutCost::fixed(Luts::ZERO));
                for (j, sig) in adder.build(net, &cols[lo..lo + fa.width as usize]) {
                    if lo + (j as usize) < width {
                        output[lo + j as usize] = sig;
                    }
                }
            }
        }
    }
    Ok(Realized { final_columns: cols, output })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitheap::BitSource;
    use crate::lutpack::table_from_fn;

    /// Heap of a plain `n`×`n` AND array.
    fn and_array(net: &mut Netlist, n: u32) -> BitHeap {
        let x = net.add_input("X", n, false);
        let y = net.add_input("Y", n, false);
        let and = table_from_fn(2, |r| r == 3);
        let mut h = BitHeap::new(2 * n);
        for i in 0..n {
            for j in 0..n {
                let b = net.lut1(vec![x[i as usize], y[j as usize]], and);
                h.add_bit(i + j, b, BitSource::External);
            }
        }
        h
    }

    #[test]
    fn four_by_four_reduces_in_one_stage() {
        let mut net = Netlist::new();
        let heap = and_array(&mut net, 4);
        assert_eq!(heap.heights(), [1, 2, 3, 4, 3, 2, 1, 0]);
        let lib = Library::default();
        for mode in [Mode::Heuristic, Mode::ExactStages] {
            let s = schedule(&heap, &lib, mode, FinalAdderKind::Binary).unwrap();
            assert_eq!(s.stage_count, 1, "{mode:?}");
            assert!(s.final_heights.iter().all(|&h| h <= 2));
        }
    }

    #[test]
    fn empty_schedule_costs_its_final_adder() {
        let mut net = Netlist::new();
        let x = net.add_input("X", 8, false);
        let y = net.add_input("Y", 8, false);
        let mut heap = BitHeap::new(8);
        for i in 0..8 {
            heap.add_bit(i, x[i as usize], BitSource::External);
            heap.add_bit(i, y[i as usize], BitSource::External);
        }
        let lib = Library::default();
        let s = schedule(&heap, &lib, Mode::Heuristic, FinalAdderKind::Binary).unwrap();
        assert_eq!(s.stage_count, 0);
        assert_eq!(compression_cost(&s, &lib), Luts::whole(8));
    }

    #[test]
    fn realized_products_are_exact() {
        for n in 1..=5u32 {
            for kind in [FinalAdderKind::Binary, FinalAdderKind::Ternary] {
                let mut net = Netlist::new();
                let heap = and_array(&mut net, n);
                let lib = Library::default();
                let s = schedule(&heap, &lib, Mode::Heuristic, kind).unwrap();
                let r = realize(&mut net, &heap, &s, &lib).unwrap();
                net.set_output("P", r.output, false);
                for a in 0..1u128 << n {
                    for b in 0..1u128 << n {
                        assert_eq!(net.simulate(&[a, b]).unwrap(), a * b, "{n} bits, {kind:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn exact_never_worse_than_heuristic() {
        let lib = Library::default();
        for n in [3u32, 6, 9, 12, 16] {
            let mut net = Netlist::new();
            let heap = and_array(&mut net, n);
            let h = schedule(&heap, &lib, Mode::Heuristic, FinalAdderKind::Binary).unwrap();
            let e = schedule(&heap, &lib, Mode::ExactStages, FinalAdderKind::Binary).unwrap();
            assert!(
                (e.stage_count, e.total_lut) <= (h.stage_count, h.total_lut),
                "{n}: exact {} / {} vs heuristic {} / {}",
                e.stage_count,
                e.total_lut,
                h.stage_count,
                h.total_lut
            );
        }
    }

    #[test]
    fn modeled_cost_equals_instantiated_luts() {
        let lib = Library::default();
        for n in [4u32, 7, 10] {
            let mut net = Netlist::new();
            let heap = and_array(&mut net, n);
            let base = net.diagnostics().lut_count;
            let s = schedule(&heap, &lib, Mode::Heuristic, FinalAdderKind::Binary).unwrap();
            realize(&mut net, &heap, &s, &lib).unwrap();
            let built = net.diagnostics().lut_count - base;
            assert_eq!(Luts::whole(built as i64), s.total_lut);
        }
    }

    #[test]
    fn gpc_only_library_still_converges() {
        let lib = Library::default().gpcs_only();
        let mut net = Netlist::new();
        let heap = and_array(&mut net, 12);
        let s = schedule(&heap, &lib, Mode::Heuristic, FinalAdderKind::Binary).unwrap();
        assert!(s.final_heights.iter().all(|&h| h <= 2));
    }
}
