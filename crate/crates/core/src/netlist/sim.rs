//! Bit-parallel evaluation: 64 input vectors per pass, one lane per vector.

use super::{Netlist, Node, Port, Signal};
use crate::error::{Error, Result};

const LANES: usize = 64;

fn eval_table(table: u64, vals: &[u64]) -> u64 {
    match vals.split_last() {
        None => {
            if table & 1 == 1 {
                u64::MAX
            } else {
                0
            }
        }
        Some((&v, rest)) => {
            // at most six inputs, so the half table is at most 32 rows
            let half = 1u32 << rest.len();
            let mask = (1u64 << half) - 1;
            let lo = table & mask;
            let hi = (table >> half) & mask;
            if lo == hi {
                eval_table(lo, rest)
            } else {
                (v & eval_table(hi, rest)) | (!v & eval_table(lo, rest))
            }
        }
    }
}

fn to_signed(raw: u128, width: u32) -> i128 {
    if width == 0 {
        return 0;
    }
    if width < 128 && (raw >> (width - 1)) & 1 == 1 {
        raw as i128 - (1i128 << width)
    } else {
        raw as i128
    }
}

fn check_width(port: &Port, raw: u128) -> Result<()> {
    if port.width < 128 && raw >> port.width != 0 {
        return Err(Error::Width {
            port: port.name.clone(),
            msg: format!("value {raw:#x} exceeds {} bits", port.width),
        });
    }
    Ok(())
}

impl Netlist {
    /// Evaluates up to 64 vectors; `inputs[port][lane]` holds raw port bits.
    fn eval_lanes(&self, inputs: &[Vec<u128>], lanes: usize, probes: &[Signal]) -> Vec<u64> {
        let mut offsets = Vec::with_capacity(self.nodes.len());
        let mut total = 0usize;
        for n in &self.nodes {
            offsets.push(total);
            total += n.output_count();
        }
        let mut v = vec![0u64; total];
        let get = |v: &Vec<u64>, s: Signal| v[offsets[s.node as usize] + s.port as usize];
        for (id, node) in self.nodes.iter().enumerate() {
            let o = offsets[id];
            match node {
                Node::Input { port, bit } => {
                    let mut w = 0u64;
                    for (lane, val) in inputs[*port as usize].iter().enumerate().take(lanes) {
                        w |= (((val >> bit) & 1) as u64) << lane;
                    }
                    v[o] = w;
                }
                Node::Const(b) => v[o] = if *b { u64::MAX } else { 0 },
                Node::Lut { inputs, tables } => {
                    let vals: Vec<u64> = inputs.iter().map(|s| get(&v, *s)).collect();
                    for (p, t) in tables.iter().enumerate() {
                        v[o + p] = eval_table(*t, &vals);
                    }
                }
                Node::Carry { prop, gen, cin } => {
                    let (p, g, c) = (get(&v, *prop), get(&v, *gen), get(&v, *cin));
                    v[o] = p ^ c;
                    v[o + 1] = (p & c) | (!p & g);
                }
                Node::Dsp { a, b, a_signed, b_signed, width, invert_msb } => {
                    let av: Vec<u64> = a.iter().map(|s| get(&v, *s)).collect();
                    let bv: Vec<u64> = b.iter().map(|s| get(&v, *s)).collect();
                    let word = |bits: &[u64], lane: usize, signed: bool| {
                        let raw =
                            bits.iter().enumerate().fold(0u128, |acc, (i, w)| acc | (((w >> lane) & 1) as u128) << i);
                        if signed {
                            to_signed(raw, bits.len() as u32)
                        } else {
                            raw as i128
                        }
                    };
                    for lane in 0..lanes {
                        let prod = word(&av, lane, *a_signed) * word(&bv, lane, *b_signed);
                        for bit in 0..*width as usize {
                            let mut b = ((prod >> bit) & 1) as u64;
                            if *invert_msb && bit + 1 == *width as usize {
                                b ^= 1;
                            }
                            v[o + bit] |= b << lane;
                        }
                    }
                }
            }
        }
        probes.iter().map(|s| get(&v, *s)).collect()
    }

    fn check_vectors(&self, vectors: &[Vec<u128>]) -> Result<()> {
        for vec in vectors {
            if vec.len() != self.inputs.len() {
                return Err(Error::Width {
                    port: "*".into(),
                    msg: format!("expected {} input values, got {}", self.inputs.len(), vec.len()),
                });
            }
            for (port, raw) in self.inputs.iter().zip(vec) {
                check_width(port, *raw)?;
            }
        }
        Ok(())
    }

    /// Values of arbitrary signals for each input vector.
    pub fn probe_batch(&self, vectors: &[Vec<u128>], signals: &[Signal]) -> Result<Vec<Vec<bool>>> {
        self.check_vectors(vectors)?;
        let mut out = Vec::with_capacity(vectors.len());
        for chunk in vectors.chunks(LANES) {
            let by_port: Vec<Vec<u128>> =
                (0..self.inputs.len()).map(|p| chunk.iter().map(|v| v[p]).collect()).collect();
            let words = self.eval_lanes(&by_port, chunk.len(), signals);
            for lane in 0..chunk.len() {
                out.push(words.iter().map(|w| (w >> lane) & 1 == 1).collect());
            }
        }
        Ok(out)
    }

    /// Raw output bits for each input vector. `vectors[i][port]` is the raw
    /// (two's-complement for signed ports) value of an input port.
    pub fn simulate_batch(&self, vectors: &[Vec<u128>]) -> Result<Vec<u128>> {
        self.check_vectors(vectors)?;
        let mut out = Vec::with_capacity(vectors.len());
        for chunk in vectors.chunks(LANES) {
            let by_port: Vec<Vec<u128>> =
                (0..self.inputs.len()).map(|p| chunk.iter().map(|v| v[p]).collect()).collect();
            let bits = self.eval_lanes(&by_port, chunk.len(), self.output_bits());
            for lane in 0..chunk.len() {
                let raw = bits.iter().enumerate().fold(0u128, |acc, (i, w)| acc | (((w >> lane) & 1) as u128) << i);
                out.push(raw);
            }
        }
        Ok(out)
    }

    /// Raw output bits for one input vector.
    pub fn simulate(&self, inputs: &[u128]) -> Result<u128> {
        Ok(self.simulate_batch(&[inputs.to_vec()])?[0])
    }

    /// Converts signed or unsigned integer operands to raw port bits.
    pub fn encode_inputs(&self, values: &[i128]) -> Result<Vec<u128>> {
        if values.len() != self.inputs.len() {
            return Err(Error::Width {
                port: "*".into(),
                msg: format!("expected {} input values, got {}", self.inputs.len(), values.len()),
            });
        }
        self.inputs
            .iter()
            .zip(values)
            .map(|(p, &v)| {
                let (lo, hi) = if p.signed {
                    (-(1i128 << (p.width.max(1) - 1)), (1i128 << (p.width.max(1) - 1)) - 1)
                } else {
                    (0, (1i128 << p.width) - 1)
                };
                if v < lo || v > hi {
                    return Err(Error::Width { port: p.name.clone(), msg: format!("{v} out of range [{lo}, {hi}]") });
                }
                Ok((v as u128) & ((1u128 << p.width) - 1))
            })
            .collect()
    }

    /// Interprets raw output bits according to the output port signedness.
    pub fn decode_output(&self, raw: u128) -> i128 {
        match self.output_port() {
            Some(p) if p.signed => to_signed(raw, p.width),
            _ => raw as i128,
        }
    }

    /// Simulates integer operands and returns the integer output.
    pub fn simulate_values(&self, values: &[i128]) -> Result<i128> {
        let raw = self.encode_inputs(values)?;
        Ok(self.decode_output(self.simulate(&raw)?))
    }
}
