//! CSV and SVG artifacts for convergence studies and deflection tables.

use crate::verify::ConvergenceRecord;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Published exact normalized central deflections `w_bar` of the uniformly
/// loaded unit square, by thickness ratio (clamped / hard simply supported).
pub const EXACT_WBAR_CLAMPED: [(f64, f64); 2] = [(1e-5, 0.1265), (0.1, 0.1499)];
pub const EXACT_WBAR_SIMPLY_SUPPORTED: [(f64, f64); 2] = [(1e-5, 0.4062), (0.1, 0.4273)];

/// One row of a deflection table.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DeflectionRow {
    pub nodes: usize,
    pub h_over_a: f64,
    pub w_bar: f64,
}

/// Convergence table with the columns (mesh_size, dofs, l2_rel, h1_rel,
/// seconds).
pub fn convergence_csv(record: &ConvergenceRecord) -> String {
    let mut out = String::from("mesh_size,dofs,l2_rel,h1_rel,seconds\n");
    for p in &record.points {
        let _ = writeln!(
            out,
            "{:.12e},{},{:.12e},{:.12e},{:.6}",
            p.mesh_size, p.dofs, p.l2_rel, p.h1_rel, p.seconds
        );
    }
    out
}

pub fn deflection_csv(rows: &[DeflectionRow]) -> String {
    let mut out = String::from("nodes,h_over_a,w_bar\n");
    for r in rows {
        let _ = writeln!(out, "{},{:e},{:.6}", r.nodes, r.h_over_a, r.w_bar);
    }
    out
}

/// Which error column a plot shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    L2,
    H1,
}

/// Log-log SVG plot of one error norm across several series, with fitted
/// slopes in the legend.
pub fn convergence_svg(records: &[ConvergenceRecord], norm: ErrorNorm) -> Result<String> {
    if records.is_empty() || records.iter().any(|r| r.points.len() < 2) {
        return Err(Error::invalid_argument(
            "convergence plot needs at least 2 refinements per series",
        ));
    }
    let value = |p: &crate::verify::ConvergencePoint| match norm {
        ErrorNorm::L2 => p.l2_rel,
        ErrorNorm::H1 => p.h1_rel,
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in records {
        for p in &r.points {
            if p.mesh_size <= 0.0 || value(p) <= 0.0 {
                return Err(Error::invalid_argument(
                    "log-log plot needs positive sizes and errors",
                ));
            }
            xs.push(p.mesh_size.log10());
            ys.push(value(p).log10());
        }
    }
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let (w, h, ml, mb) = (640.0, 480.0, 70.0, 50.0);
    let sx = |x: f64| ml + (x - x0) / (x1 - x0).max(1e-12) * (w - ml - 20.0);
    let sy = |y: f64| (h - mb) - (y - y0) / (y1 - y0).max(1e-12) * (h - mb - 20.0);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\
         <line x1=\"{ml}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\"/>\
         <line x1=\"{ml}\" y1=\"20\" x2=\"{ml}\" y2=\"{y}\" stroke=\"black\"/>",
        y = h - mb,
        x2 = w - 20.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">log10(mesh size)</text>\
         <text x=\"16\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 16 {})\" \
         text-anchor=\"middle\">log10(relative {} error)</text>",
        (ml + w - 20.0) / 2.0,
        h - 12.0,
        (h - mb) / 2.0,
        (h - mb) / 2.0,
        match norm {
            ErrorNorm::L2 => "L2",
            ErrorNorm::H1 => "H1",
        }
    );
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (i, r) in records.iter().enumerate() {
        let color = palette[i % palette.len()];
        let pts: Vec<String> = r
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.mesh_size.log10()), sy(value(p).log10())))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
        for p in pts {
            let (px, py) = p.split_once(',').unwrap();
            let _ = writeln!(svg, "<circle cx=\"{px}\" cy=\"{py}\" r=\"3\" fill=\"{color}\"/>");
        }
        let slope = {
            let hs: Vec<f64> = r.points.iter().map(|p| p.mesh_size).collect();
            let es: Vec<f64> = r.points.iter().map(value).collect();
            crate::verify::fit_log_slope(&hs, &es)?
        };
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{} (slope {slope:.2})</text>",
            ml + 10.0,
            30.0 + 16.0 * i as f64,
            r.label
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo).abs() < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Writes one CSV and one SVG pair (L2 and H1) per record under `dir` and
/// returns the created paths.
pub fn convergence_report(records: &[ConvergenceRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::invalid_argument("no convergence records to report"));
    }
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for r in records {
        r.validate()?;
        let csv = dir.join(format!("{}.csv", r.label));
        std::fs::write(&csv, convergence_csv(r))?;
        paths.push(csv);
    }
    for (norm, stem) in [(ErrorNorm::L2, "l2"), (ErrorNorm::H1, "h1")] {
        let svg = dir.join(format!("convergence_{stem}.svg"));
        std::fs::write(&svg, convergence_svg(records, norm)?)?;
        paths.push(svg);
    }
    Ok(paths)
}

pub fn write_deflection_table(rows: &[DeflectionRow], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, deflection_csv(rows))?;
    Ok(())
}
