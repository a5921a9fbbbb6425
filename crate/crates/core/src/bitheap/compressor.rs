//! Compressor library: generalized parallel counters and row compressors.

use std::fmt;
use std::path::Path;

use crate::cost::Luts;
use crate::error::{Error, Result};
use crate::lutpack::{self, LUT_INPUTS};
use crate::netlist::{Netlist, Signal};

/// Row compressors operate on `w` consecutive columns at once and use the
/// carry chain for the horizontal connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Four rows in, two rows out (sum row plus majority row).
    FourToTwo,
    /// Three rows in, one row out.
    Ternary,
}

impl RowKind {
    pub fn rows_in(self) -> u32 {
        match self {
            RowKind::FourToTwo => 4,
            RowKind::Ternary => 3,
        }
    }

    pub fn rows_out(self) -> u32 {
        match self {
            RowKind::FourToTwo => 2,
            RowKind::Ternary => 1,
        }
    }

    /// Output bits of a `w`-column instance, as `(relative column, count)`.
    pub fn outputs(self, w: u32) -> Vec<u32> {
        let mut cols = vec![0; w as usize + 2];
        match self {
            RowKind::FourToTwo => {
                // sum bits 0..w, carry-out at w, majority bits 1..=w
                for c in 0..=w {
                    cols[c as usize] += 1;
                }
                for c in 1..=w {
                    cols[c as usize] += 1;
                }
            }
            RowKind::Ternary => {
                for c in 0..w + 2 {
                    cols[c as usize] += 1;
                }
            }
        }
        while cols.last() == Some(&0) {
            cols.pop();
        }
        cols
    }

    /// LUTs of the realization for `w` columns.
    pub fn realized_luts(self, w: u32) -> u32 {
        w
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Input bit counts per column, LSB first.
    Gpc {
        inputs: Vec<u32>,
        outputs: u32,
    },
    Row(RowKind),
}

/// `slope * w + offset` LUTs in hundredths; GPCs use a zero slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LutCost {
    pub slope: Luts,
    pub offset: Luts,
}

impl LutCost {
    pub fn fixed(l: Luts) -> Self {
        LutCost { slope: Luts::ZERO, offset: l }
    }

    pub fn at(&self, w: u32) -> Luts {
        self.slope * w as i64 + self.offset
    }
}

impl fmt::Display for LutCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.slope.hundredths(), self.offset.hundredths()) {
            (0, _) => write!(f, "{}", self.offset),
            (_, 0) => write!(f, "{}*w", self.slope),
            _ => write!(f, "{}*w+{}", self.slope, self.offset),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Compressor {
    pub name: String,
    pub shape: Shape,
    pub cost: LutCost,
}

impl Compressor {
    pub fn gpc(name: &str, msb_first: &[u32], outputs: u32, cost: i64) -> Result<Self> {
        let c = Compressor {
            name: name.to_string(),
            shape: Shape::Gpc { inputs: msb_first.iter().rev().copied().collect(), outputs },
            cost: LutCost::fixed(Luts::whole(cost)),
        };
        c.check()?;
        Ok(c)
    }

    pub fn row(name: &str, kind: RowKind, cost: LutCost) -> Self {
        Compressor { name: name.to_string(), shape: Shape::Row(kind), cost }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Compressor(format!("{}: {msg}", self.name)));
        if let Shape::Gpc { inputs, outputs } = &self.shape {
            let n: u32 = inputs.iter().sum();
            if inputs.is_empty() || inputs[0] == 0 {
                return bad("the lowest column must take at least one bit".into());
            }
            if n as usize > LUT_INPUTS {
                return bad(format!("{n} inputs do not fit one LUT level"));
            }
            let max: u64 = inputs.iter().enumerate().map(|(i, c)| (*c as u64) << i).sum();
            if *outputs == 0 || *outputs > 16 || max >= 1 << outputs {
                return bad(format!("{outputs} output bits cannot hold a count of {max}"));
            }
        }
        if self.cost.slope.hundredths() < 0 || self.cost.offset.hundredths() < 0 || self.cost.at(1).hundredths() <= 0 {
            return bad("cost must be positive".into());
        }
        Ok(())
    }

    /// Signature in the usual notation, e.g. `(1,5;3)` or `4:2 row`.
    pub fn signature(&self) -> String {
        match &self.shape {
            Shape::Gpc { inputs, outputs } => {
                let cols: Vec<String> = inputs.iter().rev().map(|c| c.to_string()).collect();
                format!("({};{outputs})", cols.join(","))
            }
            Shape::Row(RowKind::FourToTwo) => "4:2 row".into(),
            Shape::Row(RowKind::Ternary) => "3:1 row".into(),
        }
    }

    /// Input bits taken per relative column for an instance `w` columns wide.
    pub fn input_columns(&self, w: u32) -> Vec<u32> {
        match &self.shape {
            Shape::Gpc { inputs, .. } => inputs.clone(),
            Shape::Row(k) => vec![k.rows_in(); w as usize],
        }
    }

    /// Output bits per relative column for an instance `w` columns wide.
    pub fn output_columns(&self, w: u32) -> Vec<u32> {
        match &self.shape {
            Shape::Gpc { outputs, .. } => vec![1; *outputs as usize],
            Shape::Row(k) => k.outputs(w),
        }
    }

    /// LUTs actually instantiated by [`Compressor::build`].
    pub fn realized_luts(&self, w: u32) -> u32 {
        match &self.shape {
            Shape::Gpc { inputs, outputs } => {
                let (n, tables) = gpc_tables(inputs, *outputs);
                lutpack::site_count(&tables, n) as u32
            }
            Shape::Row(k) => k.realized_luts(w),
        }
    }

    /// Instantiates the compressor. `inputs[c]` holds the bits of relative
    /// column `c` (missing bits are tied to zero). Returns output bits as
    /// `(relative column, signal)`.
    pub fn build(&self, net: &mut Netlist, inputs: &[Vec<Signal>]) -> Vec<(u32, Signal)> {
        let zero = net.constant(false);
        match &self.shape {
            Shape::Gpc { inputs: sig, outputs } => {
                let mut flat = Vec::new();
                for (c, &count) in sig.iter().enumerate() {
                    for i in 0..count as usize {
                        flat.push(inputs.get(c).and_then(|v| v.get(i)).copied().unwrap_or(zero));
                    }
                }
                let (n, tables) = gpc_tables(sig, *outputs);
                let supports: Vec<u32> = tables.iter().map(|&t| lutpack::support(t, n)).collect();
                let mut out = vec![zero; tables.len()];
                for group in lutpack::pack(&supports) {
                    let ts: Vec<u64> = group.iter().map(|&g| tables[g]).collect();
                    let sigs = net.lut_compact(&flat, &ts);
                    for (g, s) in group.iter().zip(sigs) {
                        out[*g] = s;
                    }
                }
                out.into_iter().enumerate().map(|(i, s)| (i as u32, s)).collect()
            }
            Shape::Row(kind) => {
                let w = inputs.len();
                let rows = kind.rows_in() as usize;
                let bit = |c: usize, r: usize| inputs[c].get(r).copied().unwrap_or(zero);
                let mut out = Vec::new();
                let mut cin = zero;
                match kind {
                    RowKind::FourToTwo => {
                        // prop = a^b^c^d, gen = d, O5 = maj(a,b,c) to column c+1
                        let prop = lutpack::table_from_fn(4, |r| r.count_ones() % 2 == 1);
                        let maj = lutpack::table_from_fn(4, |r| (r & 7).count_ones() >= 2);
                        for c in 0..w {
                            let ins: Vec<Signal> = (0..rows).map(|r| bit(c, r)).collect();
                            let gen = ins[3];
                            let s = net.lut(ins, vec![prop, maj]);
                            let (sum, cout) = net.carry(s[0], gen, cin);
                            out.push((c as u32, sum));
                            out.push((c as u32 + 1, s[1]));
                            cin = cout;
                        }
                        out.push((w as u32, cin));
                    }
                    RowKind::Ternary => {
                        // prop = a^b^c^m, gen = m, where m is the previous
                        // column's majority (O5 of its LUT)
                        let prop = lutpack::table_from_fn(4, |r| r.count_ones() % 2 == 1);
                        let maj = lutpack::table_from_fn(4, |r| (r & 7).count_ones() >= 2);
                        let mut m = zero;
                        for c in 0..w {
                            let mut ins: Vec<Signal> = (0..rows).map(|r| bit(c, r)).collect();
                            ins.push(m);
                            let s = net.lut(ins, vec![prop, maj]);
                            let (sum, cout) = net.carry(s[0], m, cin);
                            out.push((c as u32, sum));
                            cin = cout;
                            m = s[1];
                        }
                        // the last majority enters the chain directly
                        let (sum, cout) = net.carry(m, m, cin);
                        out.push((w as u32, sum));
                        out.push((w as u32 + 1, cout));
                    }
                }
                out
            }
        }
    }
}

impl Compressor {
    /// Checks the realization against binary addition over its whole input
    /// space (row compressors at widths 1 to 3). Returns the pattern count.
    pub fn verify_exhaustive(&self) -> Result<usize> {
        let widths: Vec<u32> = match self.shape {
            Shape::Gpc { .. } => vec![1],
            Shape::Row(_) => vec![1, 2, 3],
        };
        let mut patterns = 0;
        for w in widths {
            let cols = self.input_columns(w);
            let n: u32 = cols.iter().sum();
            let mut net = Netlist::new();
            let x = net.add_input("X", n, false);
            let mut inputs = Vec::new();
            let mut weights = Vec::new();
            let mut it = x.iter();
            for (c, &count) in cols.iter().enumerate() {
                inputs.push(it.by_ref().take(count as usize).copied().collect::<Vec<_>>());
                weights.extend(std::iter::repeat_n(c as u32, count as usize));
            }
            let outs = self.build(&mut net, &inputs);
            let probes: Vec<Signal> = outs.iter().map(|(_, s)| *s).collect();
            let vectors: Vec<Vec<u128>> = (0..1u128 << n).map(|v| vec![v]).collect();
            let values = net.probe_batch(&vectors, &probes)?;
            for (v, bits) in vectors.iter().zip(values) {
                let expect: u64 = (0..n).filter(|i| v[0] >> i & 1 == 1).map(|i| 1u64 << weights[i as usize]).sum();
                let got: u64 = outs.iter().zip(bits).filter(|(_, b)| *b).map(|((c, _), _)| 1u64 << c).sum();
                if got != expect {
                    return Err(Error::Verification(format!(
                        "{} at width {w}: input {:#x} counts {expect}, realization gives {got}",
                        self.name, v[0]
                    )));
                }
            }
            patterns += vectors.len();
        }
        Ok(patterns)
    }
}

/// Truth tables of a GPC: inputs flattened column by column, LSB first.
fn gpc_tables(inputs: &[u32], outputs: u32) -> (usize, Vec<u64>) {
    let n: usize = inputs.iter().sum::<u32>() as usize;
    let mut weights = Vec::with_capacity(n);
    for (c, &count) in inputs.iter().enumerate() {
        weights.extend(std::iter::repeat_n(1u32 << c, count as usize));
    }
    let count = |r: u32| -> u32 { (0..n).filter(|i| r >> i & 1 == 1).map(|i| weights[i]).sum() };
    let tables = (0..outputs).map(|o| lutpack::table_from_fn(n, |r| count(r) >> o & 1 == 1)).collect();
    (n, tables)
}

/// An ordered set of compressors available to the scheduler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Library {
    pub compressors: Vec<Compressor>,
}

/// Default library shipped with the tool, in library-file syntax.
pub const DEFAULT_LIBRARY: &str = include_str!("../../compressors.lib");

impl Default for Library {
    fn default() -> Self {
        Library::parse(DEFAULT_LIBRARY).expect("built-in library parses")
    }
}

impl Library {
    /// Parses `name; signature; outputs; cost` lines. Signatures are GPC
    /// column counts MSB first, e.g. `(1,5)`, or `row4` / `row3` for the
    /// 4:2 and ternary row compressors. Costs are LUTs, optionally of the
    /// form `a*w+b` for row compressors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut compressors = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let fields: Vec<&str> = line.split(';').map(str::trim).collect();
            let [name, sig, outs, cost] = fields[..] else {
                return Err(err("expected `name; signature; outputs; cost`"));
            };
            let outputs: u32 = outs.parse().map_err(|_| err("bad output count"))?;
            let cost = parse_cost(cost).ok_or_else(|| err("bad cost"))?;
            let c = if let Some(rows) = sig.strip_prefix("row") {
                let kind = match rows {
                    "4" => RowKind::FourToTwo,
                    "3" => RowKind::Ternary,
                    _ => return Err(err("row compressors take 3 or 4 rows")),
                };
                if outputs != kind.rows_out() {
                    return Err(err("row compressor output rows do not match its kind"));
                }
                Compressor::row(name, kind, cost)
            } else {
                let inner = sig
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| err("signature must be `(c1,c0)` or `rowN`"))?;
                let cols: Vec<u32> = inner
                    .split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err("bad column count"))?;
                if cost.slope.hundredths() != 0 {
                    return Err(err("GPC costs cannot depend on w"));
                }
                Compressor {
                    name: name.to_string(),
                    shape: Shape::Gpc { inputs: cols.into_iter().rev().collect(), outputs },
                    cost,
                }
            };
            c.check().map_err(|e| err(&e.to_string()))?;
            compressors.push(c);
        }
        if compressors.is_empty() {
            return Err(Error::Compressor("library is empty".into()));
        }
        Ok(Library { compressors })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Library::parse(&text)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# name; signature; outputs; lut-cost\n");
        for c in &self.compressors {
            let (sig, outs) = match &c.shape {
                Shape::Gpc { inputs, outputs } => {
                    let cols: Vec<String> = inputs.iter().rev().map(|c| c.to_string()).collect();
                    (format!("({})", cols.join(",")), *outputs)
                }
                Shape::Row(k) => (format!("row{}", k.rows_in()), k.rows_out()),
            };
            s.push_str(&format!("{}; {}; {}; {}\n", c.name, sig, outs, c.cost));
        }
        s
    }

    /// Compressors whose declared cost differs from what the netlist
    /// realization instantiates (checked at `w = 1..=4`).
    pub fn cost_mismatches(&self) -> Vec<String> {
        self.compressors
            .iter()
            .filter(|c| (1..=4).any(|w| c.cost.at(w) != Luts::whole(c.realized_luts(w) as i64)))
            .map(|c| c.name.clone())
            .collect()
    }

    /// Without row compressors (GPCs only).
    pub fn gpcs_only(&self) -> Library {
        Library {
            compressors: self.compressors.iter().filter(|c| matches!(c.shape, Shape::Gpc { .. })).cloned().collect(),
        }
    }
}

fn parse_cost(s: &str) -> Option<LutCost> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let num = |t: &str| -> Option<Luts> {
        let v: f64 = t.parse().ok()?;
        (v >= 0.0).then(|| Luts::from_hundredths((v * 100.0).round() as i64))
    };
    let (lin, off) = match s.find('w') {
        None => return num(&s).map(LutCost::fixed),
        Some(p) => (&s[..=p], &s[p + 1..]),
    };
    let slope = match lin.strip_suffix('w')?.strip_suffix('*') {
        Some(a) => num(a)?,
        None if lin == "w" => Luts::whole(1),
        None => return None,
    };
    let offset = match off {
        "" => Luts::ZERO,
        o => num(o.strip_prefix('+')?)?,
    };
    Some(LutCost { slope, offset })
}
