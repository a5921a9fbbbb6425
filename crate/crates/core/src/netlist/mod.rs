//! Gate-level IR: LUT sites with explicit truth tables, carry-chain cells and
//! behavioural DSP multipliers.
//!
//! Nodes are stored in creation order and may only reference earlier nodes,
//! so the node list is always a topological order.

mod hdl;
mod render;
mod sim;

pub use hdl::{emit_hdl, primitive_models, Dialect};
pub use render::{render_tiling, RenderFormat};

use crate::error::{Error, Result};
use crate::lutpack::{support, table_from_fn, LUT_INPUTS};

pub type NodeId = u32;

/// One output port of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signal {
    pub node: NodeId,
    pub port: u16,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Input {
        port: u16,
        bit: u32,
    },
    Const(bool),
    /// One output: any function of up to six inputs. Two outputs: functions
    /// of at most five shared inputs. Table row `r` has input `i` at bit `i`.
    Lut {
        inputs: Vec<Signal>,
        tables: Vec<u64>,
    },
    /// Carry-chain cell: `sum = prop ^ cin`, `cout = prop ? cin : gen`.
    Carry {
        prop: Signal,
        gen: Signal,
        cin: Signal,
    },
    /// Hard multiplier. Outputs the low `width` bits of `a * b`, the top one
    /// complemented when `invert_msb` is set.
    Dsp {
        a: Vec<Signal>,
        b: Vec<Signal>,
        a_signed: bool,
        b_signed: bool,
        width: u32,
        invert_msb: bool,
    },
}

impl Node {
    pub fn output_count(&self) -> usize {
        match self {
            Node::Input { .. } | Node::Const(_) => 1,
            Node::Lut { tables, .. } => tables.len(),
            Node::Carry { .. } => 2,
            Node::Dsp { width, .. } => *width as usize,
        }
    }

    pub fn fanin(&self) -> Vec<Signal> {
        match self {
            Node::Input { .. } | Node::Const(_) => Vec::new(),
            Node::Lut { inputs, .. } => inputs.clone(),
            Node::Carry { prop, gen, cin } => vec![*prop, *gen, *cin],
            Node::Dsp { a, b, .. } => a.iter().chain(b).copied().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub width: u32,
    pub signed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Netlist {
    inputs: Vec<Port>,
    output: Option<(Port, Vec<Signal>)>,
    nodes: Vec<Node>,
    consts: [Option<Signal>; 2],
}

/// Structural summary of a netlist.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub lut_count: usize,
    pub carry_cell_count: usize,
    /// LUT stages on the longest input-to-output path; a carry chain adds no
    /// stage beyond the LUTs feeding it.
    pub logic_depth: u32,
    pub dsp_count: usize,
}

impl Netlist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn input_ports(&self) -> &[Port] {
        &self.inputs
    }

    pub fn output_port(&self) -> Option<&Port> {
        self.output.as_ref().map(|(p, _)| p)
    }

    pub fn output_bits(&self) -> &[Signal] {
        self.output.as_ref().map(|(_, b)| b.as_slice()).unwrap_or(&[])
    }

    fn push(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len() as NodeId;
        for s in node.fanin() {
            assert!(s.node < id, "fanin must reference an earlier node");
            assert!((s.port as usize) < self.nodes[s.node as usize].output_count(), "fanin port out of range");
        }
        self.nodes.push(node);
        id
    }

    pub fn add_input(&mut self, name: &str, width: u32, signed: bool) -> Vec<Signal> {
        let port = self.inputs.len() as u16;
        self.inputs.push(Port { name: name.to_string(), width, signed });
        (0..width).map(|bit| Signal { node: self.push(Node::Input { port, bit }), port: 0 }).collect()
    }

    pub fn constant(&mut self, value: bool) -> Signal {
        if let Some(s) = self.consts[value as usize] {
            return s;
        }
        let s = Signal { node: self.push(Node::Const(value)), port: 0 };
        self.consts[value as usize] = Some(s);
        s
    }

    /// Adds a LUT site and returns its outputs.
    pub fn lut(&mut self, inputs: Vec<Signal>, tables: Vec<u64>) -> Vec<Signal> {
        assert!(!tables.is_empty() && tables.len() <= 2, "a LUT site has one or two outputs");
        let limit = if tables.len() == 2 { LUT_INPUTS - 1 } else { LUT_INPUTS };
        assert!(inputs.len() <= limit, "too many LUT inputs");
        let mask = if inputs.len() == 6 { u64::MAX } else { (1u64 << (1 << inputs.len())) - 1 };
        let tables = tables.into_iter().map(|t| t & mask).collect::<Vec<_>>();
        let n = tables.len();
        let id = self.push(Node::Lut { inputs, tables });
        (0..n).map(|p| Signal { node: id, port: p as u16 }).collect()
    }

    /// Like [`Netlist::lut`], but drops inputs none of the tables depend on.
    pub fn lut_compact(&mut self, inputs: &[Signal], tables: &[u64]) -> Vec<Signal> {
        let n = inputs.len();
        let used = tables.iter().fold(0u32, |m, &t| m | support(t, n));
        let keep: Vec<usize> = (0..n).filter(|i| used & (1 << i) != 0).collect();
        let remap = |t: u64| {
            table_from_fn(keep.len(), |r| {
                let full = keep.iter().enumerate().fold(0u32, |a, (j, &i)| a | ((r >> j) & 1) << i);
                t >> full & 1 == 1
            })
        };
        let ins = keep.iter().map(|&i| inputs[i]).collect();
        self.lut(ins, tables.iter().map(|&t| remap(t)).collect())
    }

    /// Single-output LUT.
    pub fn lut1(&mut self, inputs: Vec<Signal>, table: u64) -> Signal {
        self.lut(inputs, vec![table])[0]
    }

    /// Returns `(sum, carry_out)`.
    pub fn carry(&mut self, prop: Signal, gen: Signal, cin: Signal) -> (Signal, Signal) {
        let id = self.push(Node::Carry { prop, gen, cin });
        (Signal { node: id, port: 0 }, Signal { node: id, port: 1 })
    }

    pub fn dsp(
        &mut self,
        a: Vec<Signal>,
        b: Vec<Signal>,
        a_signed: bool,
        b_signed: bool,
        width: u32,
        invert_msb: bool,
    ) -> Vec<Signal> {
        let id = self.push(Node::Dsp { a, b, a_signed, b_signed, width, invert_msb });
        (0..width).map(|p| Signal { node: id, port: p as u16 }).collect()
    }

    pub fn set_output(&mut self, name: &str, bits: Vec<Signal>, signed: bool) {
        let port = Port { name: name.to_string(), width: bits.len() as u32, signed };
        self.output = Some((port, bits));
    }

    /// Checks structural invariants: fanin references, LUT arity, output set.
    pub fn validate(&self) -> Result<()> {
        for (id, node) in self.nodes.iter().enumerate() {
            for s in node.fanin() {
                if s.node as usize >= id || s.port as usize >= self.nodes[s.node as usize].output_count() {
                    return Err(Error::Verification(format!("node {id} has a dangling or cyclic input")));
                }
            }
            if let Node::Lut { inputs, tables } = node {
                let limit = if tables.len() == 2 { LUT_INPUTS - 1 } else { LUT_INPUTS };
                if tables.is_empty() || tables.len() > 2 || inputs.len() > limit {
                    return Err(Error::Verification(format!("node {id} is not a valid LUT site")));
                }
            }
            if let Node::Input { port, bit } = node {
                let p = self.inputs.get(*port as usize);
                if p.is_none_or(|p| *bit >= p.width) {
                    return Err(Error::Verification(format!("node {id} reads a missing input bit")));
                }
            }
        }
        if self.output.is_none() {
            return Err(Error::Verification("netlist has no output port".into()));
        }
        Ok(())
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let mut depth: Vec<Vec<u32>> = Vec::with_capacity(self.nodes.len());
        let at = |depth: &Vec<Vec<u32>>, s: &Signal| depth[s.node as usize][s.port as usize];
        for node in &self.nodes {
            let fanin_depth = node.fanin().iter().map(|s| at(&depth, s)).max().unwrap_or(0);
            let v = match node {
                Node::Input { .. } | Node::Const(_) => vec![0],
                Node::Lut { inputs, tables } => {
                    d.lut_count += 1;
                    // each output only waits for the inputs it depends on
                    tables
                        .iter()
                        .map(|t| {
                            let sup = support(*t, inputs.len());
                            let arrive = inputs
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| sup & (1 << i) != 0)
                                .map(|(_, s)| at(&depth, s))
                                .max()
                                .unwrap_or(0);
                            arrive + 1
                        })
                        .collect()
                }
                Node::Carry { .. } => {
                    d.carry_cell_count += 1;
                    vec![fanin_depth; 2]
                }
                Node::Dsp { width, .. } => {
                    d.dsp_count += 1;
                    vec![fanin_depth; *width as usize]
                }
            };
            depth.push(v);
        }
        d.logic_depth = self.output_bits().iter().map(|s| at(&depth, s)).max().unwrap_or(0);
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn const_nodes_are_shared() {
        let mut n = Netlist::new();
        let a = n.constant(true);
        let b = n.constant(true);
        assert_eq!(a, b);
        assert_ne!(a, n.constant(false));
    }

    #[test]
    fn diagnostics_count_chain_as_one_stage() {
        let mut n = Netlist::new();
        let x = n.add_input("X", 2, false);
        let y = n.add_input("Y", 2, false);
        let zero = n.constant(false);
        let mut cin = zero;
        let mut out = Vec::new();
        for i in 0..2 {
            let p = n.lut1(vec![x[i], y[i]], 0b0110);
            let (s, c) = n.carry(p, x[i], cin);
            out.push(s);
            cin = c;
        }
        out.push(cin);
        n.set_output("S", out, false);
        n.validate().unwrap();
        let d = n.diagnostics();
        assert_eq!(d.lut_count, 2);
        assert_eq!(d.carry_cell_count, 2);
        assert_eq!(d.logic_depth, 1);
        assert_eq!(n.simulate(&[3, 3]).unwrap(), 6);
    }
}
