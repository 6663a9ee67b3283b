//! Space-time diagrams as plain (P2) grayscale images.

use std::fmt::Write as _;
use std::path::Path;

use nuca_core::State;

/// One row per time step; state `v` of `s` is drawn as `255 v / (s - 1)`.
pub fn render(rows: &[Vec<State>], states: u32) -> String {
    let width = rows.first().map_or(0, Vec::len);
    let mut out = format!("P2\n{} {}\n255\n", width, rows.len());
    for row in rows {
        let pixels: Vec<String> = row
            .iter()
            .map(|&v| {
                let level = if states > 1 { 255 * v as u64 / (states as u64 - 1) } else { 0 };
                level.to_string()
            })
            .collect();
        let _ = writeln!(out, "{}", pixels.join(" "));
    }
    out
}

pub fn write(path: &Path, rows: &[Vec<State>], states: u32) -> std::io::Result<()> {
    std::fs::write(path, render(rows, states))
}
