//! Tiling diagrams. Both formats put the LSB corner (cell `(0, 0)`) at the
//! top right: X grows to the left, Y grows downward.

use std::fmt::Write;

use crate::tiling::{Board, TilingSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Ascii,
}

const GLYPHS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
const CELL: u32 = 16;

fn glyph(i: usize) -> char {
    GLYPHS[i % GLYPHS.len()] as char
}

pub fn render_tiling(solution: &TilingSolution, board: &Board, format: RenderFormat) -> String {
    match format {
        RenderFormat::Ascii => ascii(solution, board),
        RenderFormat::Svg => svg(solution, board),
    }
}

fn ascii(solution: &TilingSolution, board: &Board) -> String {
    let mut grid = vec![vec!['.'; board.wx as usize]; board.wy as usize];
    for (i, p) in solution.placements.iter().enumerate() {
        let s = p.shape();
        for y in p.y..(p.y + s.height).min(board.wy) {
            for x in p.x..(p.x + s.width).min(board.wx) {
                grid[y as usize][(board.wx - 1 - x) as usize] = glyph(i);
            }
        }
    }
    let mut out = String::new();
    for row in grid {
        out.extend(row);
        out.push('\n');
    }
    out.push('\n');
    for (i, p) in solution.placements.iter().enumerate() {
        writeln!(out, "{}: {p}", glyph(i)).unwrap();
    }
    out
}

fn svg(solution: &TilingSolution, board: &Board) -> String {
    let (w, h) = (board.wx * CELL, board.wy * CELL);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="-2 -2 {} {}">"#,
        w + 4,
        h + 4,
        w + 4,
        h + 4
    )
    .unwrap();
    writeln!(out, r##"  <rect x="0" y="0" width="{w}" height="{h}" fill="none" stroke="#000" stroke-width="2"/>"##)
        .unwrap();
    for p in &solution.placements {
        let s = p.shape();
        let rx = (board.wx - p.x - s.width) * CELL;
        let ry = p.y * CELL;
        let (rw, rh) = (s.width * CELL, s.height * CELL);
        let fill = match p.kind.variant {
            crate::tileset::Variant::Dsp24x17 => "#f4c26b",
            crate::tileset::Variant::BoothArray { .. } => "#8fc1e3",
            _ => "#c8e6a0",
        };
        writeln!(out, r##"  <g class="tile">"##).unwrap();
        writeln!(
            out,
            r##"    <rect x="{rx}" y="{ry}" width="{rw}" height="{rh}" fill="{fill}" stroke="#333" stroke-width="1"/>"##
        )
        .unwrap();
        writeln!(
            out,
            r#"    <text x="{}" y="{}" font-family="monospace" font-size="8" text-anchor="middle">{}</text>"#,
            rx + rw / 2,
            ry + rh / 2 + 3,
            p.kind.label()
        )
        .unwrap();
        writeln!(out, "  </g>").unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}
