//! Structural Verilog emission.

use std::fmt::Write;

use super::{Netlist, Node, Signal};

/// Primitive naming. `Generic` uses vendor-neutral cells whose behavioural
/// models come from [`primitive_models`]; `Amd` maps onto the 7-series and
/// UltraScale primitive set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Dialect {
    #[default]
    Generic,
    Amd,
}

impl std::str::FromStr for Dialect {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "generic" => Ok(Dialect::Generic),
            "amd" => Ok(Dialect::Amd),
            other => Err(format!("unknown HDL dialect `{other}`")),
        }
    }
}

struct Names {
    lut_single: &'static str,
    lut_dual: &'static str,
    carry: &'static str,
    dsp: &'static str,
}

const GENERIC: Names = Names { lut_single: "GEN_LUT", lut_dual: "GEN_LUT_DUAL", carry: "GEN_CARRY", dsp: "GEN_MULT" };
const AMD: Names = Names { lut_single: "LUT", lut_dual: "LUT6_2", carry: "MUXCY", dsp: "DSP_MULT" };

fn net(n: &Netlist, s: Signal) -> String {
    match &n.nodes[s.node as usize] {
        Node::Input { port, bit } => format!("{}[{}]", n.inputs[*port as usize].name, bit),
        Node::Const(b) => format!("1'b{}", *b as u8),
        _ => format!("n{}_{}", s.node, s.port),
    }
}

/// Replicates a table over `n` inputs to 32 rows (unused inputs ignored).
fn widen32(table: u64, n: usize) -> u64 {
    let rows = 1usize << n;
    (0..32).fold(0u64, |acc, r| acc | (((table >> (r % rows)) & 1) << r))
}

fn bus(n: &Netlist, bits: &[Signal]) -> String {
    let parts: Vec<String> = bits.iter().rev().map(|s| net(n, *s)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Emits one primitive instance per node in node order. The output is a pure
/// function of the netlist, so identical netlists give identical text.
pub fn emit_hdl(netlist: &Netlist, module: &str, dialect: Dialect) -> String {
    let names = match dialect {
        Dialect::Generic => &GENERIC,
        Dialect::Amd => &AMD,
    };
    let mut out = String::new();
    let mut ports = Vec::new();
    for p in &netlist.inputs {
        let sign = if p.signed { " signed" } else { "" };
        ports.push(format!("    input  wire{sign} [{}:0] {}", p.width.max(1) - 1, p.name));
    }
    if let Some(p) = netlist.output_port() {
        let sign = if p.signed { " signed" } else { "" };
        ports.push(format!("    output wire{sign} [{}:0] {}", p.width.max(1) - 1, p.name));
    }
    writeln!(out, "// Structural netlist, {} primitives.", if dialect == Dialect::Amd { "AMD" } else { "generic" })
        .unwrap();
    writeln!(out, "module {module} (\n{}\n);", ports.join(",\n")).unwrap();

    for (id, node) in netlist.nodes.iter().enumerate() {
        let outs = match node {
            Node::Input { .. } | Node::Const(_) => 0,
            n => n.output_count(),
        };
        for p in 0..outs {
            writeln!(out, "    wire n{id}_{p};").unwrap();
        }
    }

    for (id, node) in netlist.nodes.iter().enumerate() {
        match node {
            Node::Input { .. } | Node::Const(_) => {}
            Node::Lut { inputs, tables } if tables.len() == 1 => {
                let k = inputs.len().max(1);
                let rows = 1usize << k;
                let digits = rows.div_ceil(4);
                let cell = match dialect {
                    Dialect::Generic => names.lut_single.to_string(),
                    Dialect::Amd => format!("{}{k}", names.lut_single),
                };
                let mut pins: Vec<String> =
                    inputs.iter().enumerate().map(|(i, s)| format!(".I{i}({})", net(netlist, *s))).collect();
                if inputs.is_empty() {
                    pins.push(".I0(1'b0)".into());
                }
                pins.push(format!(".O(n{id}_0)"));
                let param = if dialect == Dialect::Generic { format!(".K({k}), ") } else { String::new() };
                writeln!(
                    out,
                    "    {cell} #({param}.INIT({rows}'h{:0digits$x})) lut_{id} ({});",
                    tables[0] & if rows == 64 { u64::MAX } else { (1u64 << rows) - 1 },
                    pins.join(", ")
                )
                .unwrap();
            }
            Node::Lut { inputs, tables } => {
                let o6 = widen32(tables[0], inputs.len());
                let o5 = widen32(tables[1], inputs.len());
                let mut pins: Vec<String> = (0..5)
                    .map(|i| format!(".I{i}({})", inputs.get(i).map(|s| net(netlist, *s)).unwrap_or("1'b0".into())))
                    .collect();
                pins.push(".I5(1'b1)".into());
                pins.push(format!(".O6(n{id}_0)"));
                pins.push(format!(".O5(n{id}_1)"));
                writeln!(
                    out,
                    "    {} #(.INIT(64'h{:08x}{:08x})) lut_{id} ({});",
                    names.lut_dual,
                    o6,
                    o5,
                    pins.join(", ")
                )
                .unwrap();
            }
            Node::Carry { prop, gen, cin } => {
                let (p, g, c) = (net(netlist, *prop), net(netlist, *gen), net(netlist, *cin));
                match dialect {
                    Dialect::Generic => writeln!(
                        out,
                        "    {} cc_{id} (.P({p}), .G({g}), .CI({c}), .S(n{id}_0), .CO(n{id}_1));",
                        names.carry
                    )
                    .unwrap(),
                    Dialect::Amd => {
                        writeln!(out, "    {} mux_{id} (.S({p}), .DI({g}), .CI({c}), .O(n{id}_1));", names.carry)
                            .unwrap();
                        writeln!(out, "    XORCY xor_{id} (.LI({p}), .CI({c}), .O(n{id}_0));").unwrap();
                    }
                }
            }
            Node::Dsp { a, b, a_signed, b_signed, width, invert_msb } => {
                let outs: Vec<Signal> = (0..*width).map(|p| Signal { node: id as u32, port: p as u16 }).collect();
                writeln!(
                    out,
                    "    {} #(.A_WIDTH({}), .B_WIDTH({}), .A_SIGNED({}), .B_SIGNED({}), .P_WIDTH({width}), .INVERT_MSB({})) dsp_{id} (.A({}), .B({}), .P({}));",
                    names.dsp,
                    a.len(),
                    b.len(),
                    *a_signed as u8,
                    *b_signed as u8,
                    *invert_msb as u8,
                    bus(netlist, a),
                    bus(netlist, b),
                    bus(netlist, &outs)
                )
                .unwrap();
            }
        }
    }
    if let Some((p, bits)) = &netlist.output {
        writeln!(out, "    assign {} = {};", p.name, bus(netlist, bits)).unwrap();
    }
    writeln!(out, "endmodule").unwrap();
    out
}

/// Behavioural Verilog models of the generic primitives, for simulating
/// emitted netlists with an ordinary HDL simulator.
pub fn primitive_models() -> &'static str {
    r#"module GEN_LUT #(parameter K = 6, parameter [63:0] INIT = 64'h0) (
    input wire I0, input wire I1, input wire I2, input wire I3, input wire I4, input wire I5,
    output wire O
);
    wire [5:0] sel = {I5, I4, I3, I2, I1, I0};
    assign O = INIT[sel & ((1 << K) - 1)];
endmodule

module GEN_LUT_DUAL #(parameter [63:0] INIT = 64'h0) (
    input wire I0, input wire I1, input wire I2, input wire I3, input wire I4, input wire I5,
    output wire O6, output wire O5
);
    wire [4:0] sel = {I4, I3, I2, I1, I0};
    assign O6 = INIT[{1'b1, sel}];
    assign O5 = INIT[{1'b0, sel}];
endmodule

module GEN_CARRY (input wire P, input wire G, input wire CI, output wire S, output wire CO);
    assign S = P ^ CI;
    assign CO = P ? CI : G;
endmodule

module GEN_MULT #(parameter A_WIDTH = 24, parameter B_WIDTH = 17, parameter A_SIGNED = 0,
                  parameter B_SIGNED = 0, parameter P_WIDTH = 41, parameter INVERT_MSB = 0) (
    input wire [A_WIDTH-1:0] A, input wire [B_WIDTH-1:0] B, output wire [P_WIDTH-1:0] P
);
    wire signed [A_WIDTH:0] a = A_SIGNED ? {A[A_WIDTH-1], A} : {1'b0, A};
    wire signed [B_WIDTH:0] b = B_SIGNED ? {B[B_WIDTH-1], B} : {1'b0, B};
    wire signed [A_WIDTH+B_WIDTH+1:0] p = a * b;
    assign P = p[P_WIDTH-1:0] ^ (INVERT_MSB ? (1 << (P_WIDTH - 1)) : 0);
endmodule
"#
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and_gate() -> Netlist {
        let mut n = Netlist::new();
        let x = n.add_input("X", 1, false);
        let y = n.add_input("Y", 1, false);
        let o = n.lut1(vec![x[0], y[0]], 0b1000);
        n.set_output("P", vec![o], false);
        n
    }

    #[test]
    fn single_and_lut() {
        let text = emit_hdl(&and_gate(), "mult_1x1", Dialect::Generic);
        assert_eq!(text.matches("GEN_LUT ").count(), 1);
        assert!(text.contains(".INIT(4'h8)"));
        assert!(text.contains("assign P = {n2_0};"));
    }

    #[test]
    fn amd_names() {
        let text = emit_hdl(&and_gate(), "m", Dialect::Amd);
        assert!(text.contains("LUT2 #(.INIT(4'h8))"));
    }

    #[test]
    fn widen_replicates() {
        assert_eq!(widen32(0b10, 1), 0xAAAA_AAAA);
    }
}
