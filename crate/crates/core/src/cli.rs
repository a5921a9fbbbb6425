//! Command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crate::netlist::{primitive_models, Dialect};
use crate::run::{self, RunConfig, SolverMode, SWEEP_POLICIES};

#[derive(Parser, Debug)]
#[command(name = "booth-tiling", version, about = "Generate LUT/carry-chain FPGA multipliers from an optimal tiling")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub generate: GenerateArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate one multiplier (the default when no subcommand is given).
    Generate(GenerateArgs),
    /// Sweep square sizes against Booth policies and print a CSV.
    Sweep(SweepArgs),
    /// Validate a compressor library exhaustively and print it.
    Library {
        /// Library file; the built-in default when omitted.
        #[arg(long)]
        library: Option<PathBuf>,
    },
    /// Print behavioural models of the generic HDL primitives.
    Models,
}

/// Settings shared by `generate` and `sweep`. Flags override values read
/// from `--config`.
#[derive(Args, Debug, Default, Clone)]
pub struct GenerateArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub wx: Option<u32>,
    #[arg(long)]
    pub wy: Option<u32>,
    /// Two's-complement operands.
    #[arg(long, conflicts_with = "unsigned")]
    pub signed: bool,
    #[arg(long)]
    pub unsigned: bool,
    /// DSP tile budget.
    #[arg(long, value_name = "N")]
    pub dsp: Option<u32>,
    /// Highest Booth array level, 0 disables Booth arrays.
    #[arg(long, value_name = "L")]
    pub booth_max_level: Option<u32>,
    #[arg(long)]
    pub no_small_luts: bool,
    #[arg(long)]
    pub no_two_by_k: bool,
    /// Do not use 2L-high signed Booth arrays.
    #[arg(long)]
    pub no_booth_signed: bool,
    /// auto, exact or lp.
    #[arg(long)]
    pub solver: Option<SolverMode>,
    /// Search exactly even above the LP export threshold.
    #[arg(long)]
    pub force_exact: bool,
    /// Exact search time limit in seconds.
    #[arg(long, value_name = "SECONDS")]
    pub time_limit: Option<f64>,
    /// Exact search node budget.
    #[arg(long, value_name = "N")]
    pub max_nodes: Option<u64>,
    /// Compressor scheduling: heuristic or exact.
    #[arg(long)]
    pub compression: Option<String>,
    #[arg(long)]
    pub ternary_final_adder: bool,
    /// Compressor library file.
    #[arg(long, value_name = "FILE")]
    pub library: Option<PathBuf>,
    /// Seed of the random verification vectors.
    #[arg(long)]
    pub seed: Option<u64>,
    /// HDL module name.
    #[arg(long)]
    pub module: Option<String>,
    /// HDL primitive set: generic or amd.
    #[arg(long)]
    pub dialect: Option<Dialect>,
    /// Write structural Verilog here (`-` for standard output).
    #[arg(long, value_name = "FILE")]
    pub hdl: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub ascii: Option<PathBuf>,
    /// Report file; the report goes to standard output when no artifact is
    /// requested.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Write the tiling model in LP format.
    #[arg(long, value_name = "FILE")]
    pub lp: Option<PathBuf>,
    /// Solver output for the exported LP (`<var> <value>` lines).
    #[arg(long, value_name = "FILE")]
    pub solution: Option<PathBuf>,
    /// Record measured solve times (makes artifacts run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Square board sizes.
    #[arg(long, value_delimiter = ',', default_value = "8,16,24,32")]
    pub sizes: Vec<u32>,
    /// Booth policies: `none` or a maximum level.
    #[arg(long, value_delimiter = ',', default_value = "none,3,4")]
    pub levels: Vec<String>,
    /// CSV output file (standard output when omitted).
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: GenerateArgs,
}

impl GenerateArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn to_config(&self) -> anyhow::Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(p) = &self.config {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            c.apply_file_text(&text).with_context(|| format!("in {}", p.display()))?;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { c.$f = v.clone(); } )* };
        }
        macro_rules! take_path {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f.clone(); } )* };
        }
        take!(wx, wy, booth_max_level, solver, time_limit, max_nodes, seed, module, dialect);
        take_path!(library, hdl, svg, ascii, report, lp, solution);
        if let Some(d) = self.dsp {
            c.dsp_budget = d;
        }
        if let Some(m) = &self.compression {
            c.set("compression", m).map_err(anyhow::Error::msg)?;
        }
        if self.signed {
            c.signed = true;
        }
        if self.unsigned {
            c.signed = false;
        }
        c.small_luts &= !self.no_small_luts;
        c.two_by_k &= !self.no_two_by_k;
        c.booth_signed &= !self.no_booth_signed;
        c.force_exact |= self.force_exact;
        c.ternary_final_adder |= self.ternary_final_adder;
        c.timing |= self.timing;
        Ok(c)
    }
}

fn parse_level(s: &str) -> anyhow::Result<u32> {
    match s.trim() {
        "none" | "0" => Ok(0),
        other => other.parse().with_context(|| format!("bad Booth level `{other}`")),
    }
}

fn generate(args: &GenerateArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = args.to_config()?;
    let wants_artifact = [&cfg.hdl, &cfg.svg, &cfg.ascii, &cfg.report, &cfg.lp].iter().any(|p| p.is_some());
    if !wants_artifact {
        cfg.report = Some(PathBuf::from("-"));
    }
    run::run(&cfg)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: &SweepArgs) -> anyhow::Result<ExitCode> {
    let cfg = args.common.to_config()?;
    let levels: Vec<u32> = if args.levels.is_empty() {
        SWEEP_POLICIES.to_vec()
    } else {
        args.levels.iter().map(|l| parse_level(l)).collect::<anyhow::Result<_>>()?
    };
    let (rows, errors) = run::sweep(&cfg, &args.sizes, &levels);
    let csv = run::sweep_csv(&rows);
    match &args.csv {
        Some(p) => run::write_artifact(p, &csv)?,
        None => print!("{csv}"),
    }
    for e in &errors {
        eprintln!("error: {e}");
    }
    Ok(if errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

/// Entry point used by the binary.
pub fn main_with(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        None => generate(&cli.generate),
        Some(Command::Generate(args)) => generate(&args),
        Some(Command::Sweep(args)) => sweep(&args),
        Some(Command::Library { library }) => {
            let lib = match library {
                Some(p) => crate::bitheap::Library::load(&p)?,
                None => crate::bitheap::Library::default(),
            };
            let patterns = run::check_library(&lib)?;
            print!("{}", lib.to_text());
            println!("# all {} compressors verified over {patterns} input patterns", lib.compressors.len());
            let off = lib.cost_mismatches();
            if !off.is_empty() {
                eprintln!("warning: declared cost differs from the realization for {}", off.join(", "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Some(Command::Models) => {
            print!("{}", primitive_models());
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse_into_config() {
        let cli = Cli::try_parse_from(["booth-tiling", "--wx", "6", "--wy", "5", "--signed", "--dsp", "1"]).unwrap();
        let c = cli.generate.to_config().unwrap();
        assert_eq!((c.wx, c.wy, c.signed, c.dsp_budget), (6, 5, true, 1));
        let cli = Cli::try_parse_from(["booth-tiling", "sweep", "--sizes", "8,16", "--levels", "none,4"]).unwrap();
        match cli.command {
            Some(Command::Sweep(s)) => assert_eq!(s.sizes, [8, 16]),
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["booth-tiling", "--signed", "--unsigned"]).is_err());
        assert!(Cli::try_parse_from(["booth-tiling", "--solver", "magic"]).is_err());
    }

    #[test]
    fn levels_accept_none() {
        assert_eq!(parse_level("none").unwrap(), 0);
        assert_eq!(parse_level("4").unwrap(), 4);
        assert!(parse_level("four").is_err());
    }
}
