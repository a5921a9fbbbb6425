//! End-to-end generation: tiling, compression, netlist, self-verification
//! and artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitheap::{FinalAdderKind, Library, Mode};
use crate::cost::Luts;
use crate::error::{Error, Result};
use crate::multiplier::{build_multiplier, CompressionOptions, Multiplier};
use crate::netlist::{emit_hdl, render_tiling, Diagnostics, Dialect, RenderFormat};
use crate::tileset::{build_tile_set, TileFamily, TileSetConfig};
use crate::tiling::{
    enumerate_placements, export_lp, import_solution, solve_exact, Board, SolveLimits, TilingSolution,
};

/// Boards above this many cells go to LP export unless exact search is forced.
pub const EXACT_AREA_LIMIT: u32 = 256;
/// Operands up to this width are verified exhaustively.
pub const EXHAUSTIVE_WIDTH: u32 = 8;
pub const RANDOM_VECTORS: usize = 10_000;
pub const COMPRESSION_STIMULI: usize = 1_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolverMode {
    /// Exact search up to [`EXACT_AREA_LIMIT`] cells, LP export above.
    #[default]
    Auto,
    Exact,
    Lp,
}

impl FromStr for SolverMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(SolverMode::Auto),
            "exact" => Ok(SolverMode::Exact),
            "lp" => Ok(SolverMode::Lp),
            other => Err(format!("unknown solver mode `{other}` (auto, exact, lp)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub wx: u32,
    pub wy: u32,
    pub signed: bool,
    pub dsp_budget: u32,
    pub booth_max_level: u32,
    pub small_luts: bool,
    pub two_by_k: bool,
    pub booth_signed: bool,
    pub solver: SolverMode,
    pub force_exact: bool,
    /// Wall-clock limit of the exact search, in seconds.
    pub time_limit: f64,
    pub max_nodes: u64,
    pub compression: Mode,
    pub ternary_final_adder: bool,
    pub library: Option<PathBuf>,
    pub seed: u64,
    pub module: String,
    pub dialect: Dialect,
    pub hdl: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub ascii: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub lp: Option<PathBuf>,
    /// Solver output (`<var> <value>` lines) for a previously exported LP.
    pub solution: Option<PathBuf>,
    /// Put measured solve times in the report; off keeps artifacts
    /// byte-identical across runs.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let limits = SolveLimits::default();
        RunConfig {
            wx: 8,
            wy: 8,
            signed: false,
            dsp_budget: 0,
            booth_max_level: 4,
            small_luts: true,
            two_by_k: true,
            booth_signed: true,
            solver: SolverMode::Auto,
            force_exact: false,
            time_limit: limits.time_limit.as_secs_f64(),
            max_nodes: limits.max_nodes,
            compression: Mode::Heuristic,
            ternary_final_adder: false,
            library: None,
            seed: DEFAULT_SEED,
            module: "mult".into(),
            dialect: Dialect::Generic,
            hdl: None,
            svg: None,
            ascii: None,
            report: None,
            lp: None,
            solution: None,
            timing: false,
        }
    }
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got `{v}`")),
    }
}

fn parse_num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("expected a number, got `{v}`"))
}

impl RunConfig {
    pub fn board(&self) -> Result<Board> {
        Board::new(self.wx, self.wy, self.signed, self.dsp_budget)
    }

    pub fn tile_set_config(&self) -> TileSetConfig {
        TileSetConfig {
            small_luts: self.small_luts,
            two_by_k: self.two_by_k,
            booth_max_level: self.booth_max_level,
            booth_signed: self.booth_signed,
            dsp: self.dsp_budget > 0,
        }
    }

    pub fn limits(&self) -> SolveLimits {
        SolveLimits { time_limit: Duration::from_secs_f64(self.time_limit.max(0.0)), max_nodes: self.max_nodes }
    }

    pub fn compression_options(&self) -> anyhow::Result<CompressionOptions> {
        let library = match &self.library {
            Some(p) => Library::load(p).with_context(|| format!("loading compressor library {}", p.display()))?,
            None => Library::default(),
        };
        let final_adder = if self.ternary_final_adder { FinalAdderKind::Ternary } else { FinalAdderKind::Binary };
        Ok(CompressionOptions { library, mode: self.compression, final_adder })
    }

    /// Whether the exact search runs for this board.
    pub fn uses_exact(&self) -> bool {
        match self.solver {
            SolverMode::Exact => true,
            SolverMode::Lp => false,
            SolverMode::Auto => self.force_exact || self.wx * self.wy <= EXACT_AREA_LIMIT,
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let path = || Some(PathBuf::from(value));
        match key {
            "wx" => self.wx = parse_num(value)?,
            "wy" => self.wy = parse_num(value)?,
            "signed" => self.signed = parse_bool(value)?,
            "dsp" | "dsp_budget" => self.dsp_budget = parse_num(value)?,
            "booth_max_level" => self.booth_max_level = parse_num(value)?,
            "small_luts" => self.small_luts = parse_bool(value)?,
            "two_by_k" => self.two_by_k = parse_bool(value)?,
            "booth_signed" => self.booth_signed = parse_bool(value)?,
            "solver" => self.solver = value.parse()?,
            "force_exact" => self.force_exact = parse_bool(value)?,
            "time_limit" => self.time_limit = parse_num(value)?,
            "max_nodes" => self.max_nodes = parse_num(value)?,
            "compression" => {
                self.compression = match value {
                    "heuristic" => Mode::Heuristic,
                    "exact" | "exact_stages" => Mode::ExactStages,
                    _ => return Err(format!("unknown compression mode `{value}` (heuristic, exact)")),
                }
            }
            "ternary_final_adder" => self.ternary_final_adder = parse_bool(value)?,
            "library" => self.library = path(),
            "seed" => self.seed = parse_num(value)?,
            "module" => self.module = value.to_string(),
            "dialect" => self.dialect = value.parse()?,
            "hdl" => self.hdl = path(),
            "svg" => self.svg = path(),
            "ascii" => self.ascii = path(),
            "report" => self.report = path(),
            "lp" => self.lp = path(),
            "solution" => self.solution = path(),
            "timing" => self.timing = parse_bool(value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected `key = value`".into() })?;
            self.set(k.trim(), v.trim()).map_err(|msg| Error::Parse { line: i + 1, msg })?;
        }
        Ok(())
    }
}

/// What self-verification covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verification {
    pub exhaustive: bool,
    pub vectors: usize,
    pub compression_stimuli: usize,
}

fn mask(w: u32) -> u128 {
    if w >= 128 {
        u128::MAX
    } else {
        (1u128 << w) - 1
    }
}

fn operand(raw: u128, w: u32, signed: bool) -> i128 {
    if signed && raw >> (w - 1) & 1 == 1 {
        raw as i128 - (1i128 << w)
    } else {
        raw as i128
    }
}

/// Boundary operand values: zero, one, all ones and the extremes.
fn corners(w: u32, signed: bool) -> Vec<u128> {
    let mut v = vec![0, 1, mask(w), 1u128 << (w - 1), mask(w - 1)];
    if signed {
        v.push((1u128 << (w - 1)) | 1);
    }
    v.sort_unstable();
    v.dedup();
    v
}

/// Checks the multiplier against integer multiplication (exhaustively up
/// to 8×8, otherwise corners plus seeded random vectors) and checks that
/// compression preserved the heap value on random stimuli.
pub fn verify(m: &Multiplier, seed: u64) -> Result<Verification> {
    let b = m.board;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exhaustive = b.wx <= EXHAUSTIVE_WIDTH && b.wy <= EXHAUSTIVE_WIDTH;
    let vectors: Vec<Vec<u128>> = if exhaustive {
        (0..1u128 << b.wx).flat_map(|x| (0..1u128 << b.wy).map(move |y| vec![x, y])).collect()
    } else {
        let mut v = Vec::new();
        for x in corners(b.wx, b.signed) {
            for y in corners(b.wy, b.signed) {
                v.push(vec![x, y]);
            }
        }
        for _ in 0..RANDOM_VECTORS {
            v.push(vec![rng.gen::<u128>() & mask(b.wx), rng.gen::<u128>() & mask(b.wy)]);
        }
        v
    };
    let outs = m.netlist.simulate_batch(&vectors)?;
    for (v, raw) in vectors.iter().zip(outs) {
        let expect = operand(v[0], b.wx, b.signed) * operand(v[1], b.wy, b.signed);
        let got = m.netlist.decode_output(raw);
        if got != expect {
            return Err(Error::Verification(format!(
                "{b}: {} * {} gave {got}, expected {expect}",
                operand(v[0], b.wx, b.signed),
                operand(v[1], b.wy, b.signed)
            )));
        }
    }

    let stimuli: Vec<Vec<u128>> = (0..COMPRESSION_STIMULI)
        .map(|_| vec![rng.gen::<u128>() & mask(b.wx), rng.gen::<u128>() & mask(b.wy)])
        .collect();
    let heap_signals = m.heap.signals();
    let mut probes = heap_signals.clone();
    probes.extend(m.final_columns.iter().flatten());
    let values = m.netlist.probe_batch(&stimuli, &probes)?;
    let outs = m.netlist.simulate_batch(&stimuli)?;
    let width = m.heap.width();
    for ((v, bits), out) in stimuli.iter().zip(values).zip(outs) {
        let (heap_bits, rows) = bits.split_at(heap_signals.len());
        let before = m.heap.value_of(heap_bits);
        let mut it = rows.iter();
        let mut after = 0u128;
        for (c, col) in m.final_columns.iter().enumerate() {
            for _ in col {
                if *it.next().expect("probe per bit") {
                    after = after.wrapping_add(1u128 << c);
                }
            }
        }
        after &= mask(width);
        if before != after || after != out {
            return Err(Error::Verification(format!(
                "{b}: heap value {before:#x}, compressed {after:#x}, adder {out:#x} for X={:#x} Y={:#x}",
                v[0], v[1]
            )));
        }
    }
    Ok(Verification { exhaustive, vectors: vectors.len(), compression_stimuli: stimuli.len() })
}

/// A verified design and the data its report is made of.
#[derive(Clone, Debug)]
pub struct Design {
    pub multiplier: Multiplier,
    pub diagnostics: Diagnostics,
    pub verification: Verification,
    pub solve_time: Duration,
    pub candidates: usize,
}

impl Design {
    pub fn lut_model(&self) -> Luts {
        self.multiplier.solution.objective
    }

    pub fn lut_exact(&self) -> Luts {
        self.multiplier.exact_luts()
    }
}

/// Tile families and placements for `cfg`.
pub fn candidates(cfg: &RunConfig) -> Result<(Board, Vec<TileFamily>, Vec<crate::tiling::Placement>)> {
    let board = cfg.board()?;
    let families = build_tile_set(&cfg.tile_set_config())?;
    let cands = enumerate_placements(&board, &families);
    Ok((board, families, cands))
}

/// Exact tiling, multiplier construction and self-verification, without
/// touching the file system.
pub fn generate(cfg: &RunConfig, warm_start: Option<&TilingSolution>) -> anyhow::Result<Design> {
    let (board, _, cands) = candidates(cfg)?;
    let start = Instant::now();
    let solution = solve_exact(&board, &cands, cfg.limits(), warm_start)?;
    let solve_time = start.elapsed();
    finish(cfg, &board, solution, solve_time, cands.len())
}

fn finish(
    cfg: &RunConfig,
    board: &Board,
    solution: TilingSolution,
    solve_time: Duration,
    candidates: usize,
) -> anyhow::Result<Design> {
    let opts = cfg.compression_options()?;
    let multiplier = build_multiplier(board, &solution, &opts)?;
    let verification = verify(&multiplier, cfg.seed)?;
    let diagnostics = multiplier.netlist.diagnostics();
    Ok(Design { multiplier, diagnostics, verification, solve_time, candidates })
}

fn solve_time_text(cfg: &RunConfig, t: Duration) -> String {
    if cfg.timing {
        format!("{:.3}", t.as_secs_f64())
    } else {
        "na".into()
    }
}

/// Key-value report block.
pub fn report(cfg: &RunConfig, d: &Design) -> String {
    let m = &d.multiplier;
    let b = &m.board;
    let s = &m.schedule;
    let mut r = String::new();
    let mut kv = |k: &str, v: String| writeln!(r, "{k}: {v}").unwrap();
    kv("board", format!("{}x{}", b.wx, b.wy));
    kv("signed", b.signed.to_string());
    kv("dsp_budget", b.dsp_budget.to_string());
    kv("booth_max_level", cfg.booth_max_level.to_string());
    kv("candidates", d.candidates.to_string());
    kv("tiles", m.solution.placements.len().to_string());
    kv("objective", m.solution.objective.to_string());
    kv("lut_tiles", m.tile_luts().to_string());
    kv("lut_compression", s.total_lut.to_string());
    kv("lut_exact", d.lut_exact().to_string());
    kv("lut_count", d.diagnostics.lut_count.to_string());
    kv("carry_cells", d.diagnostics.carry_cell_count.to_string());
    kv("dsp_used", m.solution.dsp_used.to_string());
    kv("logic_depth", d.diagnostics.logic_depth.to_string());
    kv("stage_count", s.stage_count.to_string());
    kv("final_adder", s.final_adder.map_or("none".into(), |f| format!("{} columns from {}", f.width, f.lsb)));
    kv("optimal", m.solution.optimal.to_string());
    kv("solve_s", solve_time_text(cfg, d.solve_time));
    kv("seed", cfg.seed.to_string());
    let how = if d.verification.exhaustive { "exhaustive" } else { "corners+random" };
    kv("verified", format!("{how}, {} vectors", d.verification.vectors));
    kv("compression_checked", format!("{} stimuli", d.verification.compression_stimuli));
    for p in &m.solution.placements {
        kv("tile", p.to_string());
    }
    r
}

/// Result of [`run`].
#[derive(Clone, Debug)]
pub enum RunOutcome {
    Generated(Box<Design>),
    /// The board was exported as an LP model and no solution was supplied.
    LpExported(PathBuf),
}

/// Writes an artifact; the path `-` means standard output.
pub fn write_artifact(path: &Path, text: &str) -> anyhow::Result<()> {
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Runs the whole flow for `cfg` and writes the requested artifacts. Fails
/// on infeasibility, on a search that found nothing, and on any
/// self-verification mismatch; no netlist is written in those cases.
pub fn run(cfg: &RunConfig) -> anyhow::Result<RunOutcome> {
    let (board, _, cands) = candidates(cfg)?;
    let lp_text = || export_lp(&board, &cands);
    if let Some(p) = &cfg.lp {
        write_artifact(p, &lp_text())?;
    }
    let start = Instant::now();
    let solution = if let Some(sol) = &cfg.solution {
        let text = std::fs::read_to_string(sol).with_context(|| format!("reading {}", sol.display()))?;
        import_solution(&board, &cands, &text)?
    } else if cfg.uses_exact() {
        solve_exact(&board, &cands, cfg.limits(), None)?
    } else {
        let path = cfg.lp.clone().unwrap_or_else(|| PathBuf::from(format!("{}.lp", cfg.module)));
        if cfg.lp.is_none() {
            write_artifact(&path, &lp_text())?;
        }
        let why = if cfg.solver == SolverMode::Lp {
            "the LP solver mode was selected".to_string()
        } else {
            format!("{board} board has {} cells (> {EXACT_AREA_LIMIT})", board.area())
        };
        eprintln!(
            "warning: {why}; wrote LP model {} instead of searching. \
             Solve it externally and pass --solution, or use --force-exact.",
            path.display()
        );
        return Ok(RunOutcome::LpExported(path));
    };
    let solve_time = start.elapsed();
    let design = finish(cfg, &board, solution, solve_time, cands.len())?;
    let m = &design.multiplier;
    if let Some(p) = &cfg.hdl {
        write_artifact(p, &emit_hdl(&m.netlist, &cfg.module, cfg.dialect))?;
    }
    if let Some(p) = &cfg.svg {
        write_artifact(p, &render_tiling(&m.solution, &board, RenderFormat::Svg))?;
    }
    if let Some(p) = &cfg.ascii {
        write_artifact(p, &render_tiling(&m.solution, &board, RenderFormat::Ascii))?;
    }
    if let Some(p) = &cfg.report {
        write_artifact(p, &report(cfg, &design))?;
    }
    Ok(RunOutcome::Generated(Box::new(design)))
}

/// Booth policy of one sweep row: the highest permitted level, 0 for none.
pub const SWEEP_POLICIES: [u32; 3] = [0, 3, 4];
pub const CSV_HEADER: &str = "wx,wy,signed,dsp,booth_level,lut_model,lut_exact,depth,stages,optimal,solve_s";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub wx: u32,
    pub wy: u32,
    pub signed: bool,
    pub dsp: u32,
    pub booth_level: u32,
    pub lut_model: Luts,
    pub lut_exact: Luts,
    pub depth: u32,
    pub stages: usize,
    pub optimal: bool,
    pub solve_s: Option<f64>,
}

impl SweepRow {
    pub fn csv(&self) -> String {
        let level = if self.booth_level == 0 { "none".to_string() } else { self.booth_level.to_string() };
        let t = self.solve_s.map_or("na".to_string(), |s| format!("{s:.3}"));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.wx,
            self.wy,
            self.signed,
            self.dsp,
            level,
            self.lut_model,
            self.lut_exact,
            self.depth,
            self.stages,
            self.optimal,
            t
        )
    }
}

/// Runs square boards of each size under each Booth policy. Within a size
/// each policy starts from the previous policy's tiling, which is still
/// valid because the tile sets are nested; model LUTs therefore never rise
/// from one policy to the next. Failed rows are reported and skipped.
pub fn sweep(base: &RunConfig, sizes: &[u32], policies: &[u32]) -> (Vec<SweepRow>, Vec<String>) {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &n in sizes {
        let mut warm: Option<TilingSolution> = None;
        for &level in policies {
            let cfg = RunConfig { wx: n, wy: n, booth_max_level: level, ..base.clone() };
            match generate(&cfg, warm.as_ref()) {
                Ok(d) => {
                    rows.push(SweepRow {
                        wx: n,
                        wy: n,
                        signed: cfg.signed,
                        dsp: cfg.dsp_budget,
                        booth_level: level,
                        lut_model: d.lut_model(),
                        lut_exact: d.lut_exact(),
                        depth: d.diagnostics.logic_depth,
                        stages: d.multiplier.schedule.stage_count,
                        optimal: d.multiplier.solution.optimal,
                        solve_s: cfg.timing.then_some(d.solve_time.as_secs_f64()),
                    });
                    warm = Some(d.multiplier.solution);
                }
                Err(e) => errors.push(format!("{n}x{n} level {level}: {e:#}")),
            }
        }
    }
    (rows, errors)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    s
}

/// Fails unless every default compressor passes its exhaustive check.
pub fn check_library(lib: &Library) -> anyhow::Result<usize> {
    let mut total = 0;
    for c in &lib.compressors {
        total += c.verify_exhaustive()?;
    }
    if lib.compressors.is_empty() {
        bail!("empty compressor library");
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_overrides_defaults() {
        let mut c = RunConfig::default();
        c.apply_file_text("# board\nwx = 12\nwy=10 # inline\nsigned = yes\nsolver = exact\ncompression = exact\n")
            .unwrap();
        assert_eq!(
            (c.wx, c.wy, c.signed, c.solver, c.compression),
            (12, 10, true, SolverMode::Exact, Mode::ExactStages)
        );
        assert!(c.apply_file_text("wx 3").is_err());
        assert!(c.apply_file_text("bogus = 1").is_err());
        assert!(c.apply_file_text("signed = maybe").is_err());
    }

    #[test]
    fn solver_selection_follows_area() {
        let mut c = RunConfig { wx: 16, wy: 16, ..RunConfig::default() };
        assert!(c.uses_exact());
        c.wy = 17;
        assert!(!c.uses_exact());
        c.force_exact = true;
        assert!(c.uses_exact());
    }

    #[test]
    fn corner_values_cover_sign_boundaries() {
        assert_eq!(corners(4, false), [0, 1, 7, 8, 15]);
        assert_eq!(corners(4, true), [0, 1, 7, 8, 9, 15]);
        assert_eq!(operand(8, 4, true), -8);
        assert_eq!(operand(15, 4, true), -1);
        assert_eq!(operand(15, 4, false), 15);
    }

    #[test]
    fn small_design_verifies_and_reports() {
        let cfg = RunConfig { wx: 4, wy: 4, ..RunConfig::default() };
        let d = generate(&cfg, None).unwrap();
        assert!(d.verification.exhaustive);
        assert_eq!(d.verification.vectors, 256);
        let r = report(&cfg, &d);
        assert!(r.contains("solve_s: na"));
        assert!(r.contains("optimal: true"));
        assert_eq!(Luts::whole(d.diagnostics.lut_count as i64), d.lut_exact());
    }
}
