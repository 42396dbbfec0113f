//! Deterministic output formatting: fixed column orders, floats at 17
//! significant digits, byte-stable across runs and thread counts.

use crate::sweep::SweepRecord;
use anyhow::{Context, Result};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// 17 significant digits, scientific.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn json_num(x: f64) -> String {
    fmt_float(x)
}

fn json_opt(x: Option<f64>) -> String {
    x.map(json_num).unwrap_or_else(|| "null".to_string())
}

fn table_num(x: f64) -> String {
    format!("{x:.9e}")
}

fn table_opt(x: Option<f64>) -> String {
    x.map(table_num).unwrap_or_else(|| "-".to_string())
}

pub const SWEEP_CSV_HEADER: &str = "a,b,m,lambda1_sq_minus_m2,err,lower_sq,upper_sq,improved_lower_sq,reference_iso,conjecture_margin,region_base,region_large_mass,fitted_order";

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_float(r.a),
            fmt_float(r.b),
            fmt_float(r.m),
            csv_opt(r.lambda1_sq_minus_m2),
            csv_opt(r.err),
            fmt_float(r.lower_sq),
            fmt_float(r.upper_sq),
            csv_opt(r.improved_lower_sq),
            fmt_float(r.reference_iso),
            csv_opt(r.conjecture_margin),
            r.region_base,
            r.region_large_mass,
            csv_opt(r.fitted_order),
        );
    }
    out
}

pub fn sweep_json(records: &[SweepRecord]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in records.iter().enumerate() {
        let _ = write!(
            out,
            "  {{\"a\": {}, \"b\": {}, \"m\": {}, \"lambda1_sq_minus_m2\": {}, \"err\": {}, \"lower_sq\": {}, \"upper_sq\": {}, \"improved_lower_sq\": {}, \"reference_iso\": {}, \"conjecture_margin\": {}, \"region_base\": {}, \"region_large_mass\": {}, \"fitted_order\": {}}}",
            json_num(r.a),
            json_num(r.b),
            json_num(r.m),
            json_opt(r.lambda1_sq_minus_m2),
            json_opt(r.err),
            json_num(r.lower_sq),
            json_num(r.upper_sq),
            json_opt(r.improved_lower_sq),
            json_num(r.reference_iso),
            json_opt(r.conjecture_margin),
            r.region_base,
            r.region_large_mass,
            json_opt(r.fitted_order),
        );
        out.push_str(if i + 1 < records.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

pub fn sweep_table(records: &[SweepRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>10} {:>10} {:>6} {:>16} {:>10} {:>13} {:>13} {:>16} {:>13} {:>6} {:>6} {:>7}",
        "a", "b", "m", "lam1^2-m^2", "err", "lower", "upper", "margin", "ref_iso", "base", "large", "order"
    );
    for r in records {
        let _ = writeln!(
            out,
            "{:>10.5} {:>10.5} {:>6.3} {:>16} {:>10} {:>13} {:>13} {:>16} {:>13} {:>6} {:>6} {:>7}",
            r.a,
            r.b,
            r.m,
            table_opt(r.lambda1_sq_minus_m2),
            r.err.map(|e| format!("{e:.2e}")).unwrap_or_else(|| "-".into()),
            table_num(r.lower_sq),
            table_num(r.upper_sq),
            table_opt(r.conjecture_margin),
            table_num(r.reference_iso),
            r.region_base,
            r.region_large_mass,
            r.fitted_order
                .map(|p| format!("{p:.3}"))
                .unwrap_or_else(|| "-".into()),
        );
        if let Some(e) = &r.error {
            let _ = writeln!(out, "    ! point failed: {e}");
        }
    }
    out
}

/// Closed-form bound evaluations for one triangle.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub lower_sq: f64,
    pub upper_sq: f64,
    pub improved_lower_sq: Option<f64>,
    pub mass_threshold: f64,
}

pub fn bounds_output(r: &BoundsReport, format: Format) -> String {
    match format {
        Format::Csv => format!(
            "a,b,m,lower_sq,upper_sq,improved_lower_sq,mass_threshold\n{},{},{},{},{},{},{}\n",
            fmt_float(r.a),
            fmt_float(r.b),
            fmt_float(r.m),
            fmt_float(r.lower_sq),
            fmt_float(r.upper_sq),
            csv_opt(r.improved_lower_sq),
            fmt_float(r.mass_threshold),
        ),
        Format::Json => format!(
            "{{\"a\": {}, \"b\": {}, \"m\": {}, \"lower_sq\": {}, \"upper_sq\": {}, \"improved_lower_sq\": {}, \"mass_threshold\": {}}}\n",
            json_num(r.a),
            json_num(r.b),
            json_num(r.m),
            json_num(r.lower_sq),
            json_num(r.upper_sq),
            json_opt(r.improved_lower_sq),
            json_num(r.mass_threshold),
        ),
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "triangle a={} b={} m={}", r.a, r.b, r.m);
            let _ = writeln!(out, "  lower_sq            {}", table_num(r.lower_sq));
            let _ = writeln!(out, "  upper_sq            {}", table_num(r.upper_sq));
            let _ = writeln!(
                out,
                "  improved_lower_sq   {}",
                table_opt(r.improved_lower_sq)
            );
            let _ = writeln!(out, "  mass_threshold      {}", table_num(r.mass_threshold));
            out
        }
    }
}

/// One row of a fiber spectrum listing.
#[derive(Debug, Clone)]
pub struct FiberRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub energy: f64,
    pub branch: usize,
    pub validated: bool,
    pub defect: f64,
}

pub fn fiber_output(rows: &[FiberRow], note: Option<&str>, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("index,eigenvalue,energy,branch,validated,defect\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.index,
                    fmt_float(r.eigenvalue),
                    fmt_float(r.energy),
                    r.branch,
                    r.validated,
                    fmt_float(r.defect),
                );
            }
            out
        }
        Format::Json => {
            let mut out = String::from("[\n");
            for (i, r) in rows.iter().enumerate() {
                let _ = write!(
                    out,
                    "  {{\"index\": {}, \"eigenvalue\": {}, \"energy\": {}, \"branch\": {}, \"validated\": {}, \"defect\": {}}}",
                    r.index,
                    json_num(r.eigenvalue),
                    json_num(r.energy),
                    r.branch,
                    r.validated,
                    json_num(r.defect),
                );
                out.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
            }
            out.push_str("]\n");
            out
        }
        Format::Table => {
            let mut out = String::new();
            if let Some(n) = note {
                let _ = writeln!(out, "note: {n}");
            }
            let _ = writeln!(
                out,
                "{:>5} {:>22} {:>22} {:>6} {:>9} {:>11}",
                "idx", "eigenvalue", "energy", "branch", "validated", "defect"
            );
            for r in rows {
                let _ = writeln!(
                    out,
                    "{:>5} {:>22} {:>22} {:>6} {:>9} {:>11.3e}",
                    r.index,
                    table_num(r.eigenvalue),
                    table_num(r.energy),
                    r.branch,
                    r.validated,
                    r.defect,
                );
            }
            out
        }
    }
}

/// Ladder summary of a single-triangle 2D solve.
#[derive(Debug, Clone)]
pub struct Lambda1Report {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub points: Vec<(usize, f64)>,
    pub nu: f64,
    pub err: f64,
    pub order: Option<f64>,
    pub declined: bool,
    pub lambda1: f64,
}

pub fn lambda1_output(r: &Lambda1Report, format: Format) -> String {
    let mesh_list = r
        .points
        .iter()
        .map(|p| p.0.to_string())
        .collect::<Vec<_>>()
        .join(";");
    match format {
        Format::Csv => format!(
            "a,b,m,lambda1_sq_minus_m2,err,fitted_order,lambda1,mesh_ns\n{},{},{},{},{},{},{},{}\n",
            fmt_float(r.a),
            fmt_float(r.b),
            fmt_float(r.m),
            fmt_float(r.nu),
            fmt_float(r.err),
            csv_opt(r.order),
            fmt_float(r.lambda1),
            mesh_list,
        ),
        Format::Json => {
            let mut pts = String::from("[");
            for (i, (n, nu)) in r.points.iter().enumerate() {
                let _ = write!(pts, "{{\"n\": {}, \"nu\": {}}}", n, json_num(*nu));
                if i + 1 < r.points.len() {
                    pts.push_str(", ");
                }
            }
            pts.push(']');
            format!(
                "{{\"a\": {}, \"b\": {}, \"m\": {}, \"points\": {}, \"lambda1_sq_minus_m2\": {}, \"err\": {}, \"fitted_order\": {}, \"declined\": {}, \"lambda1\": {}}}\n",
                json_num(r.a),
                json_num(r.b),
                json_num(r.m),
                pts,
                json_num(r.nu),
                json_num(r.err),
                json_opt(r.order),
                r.declined,
                json_num(r.lambda1),
            )
        }
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "triangle a={} b={} m={}", r.a, r.b, r.m);
            for (n, nu) in &r.points {
                let _ = writeln!(out, "  n={n:<4} lambda1^2 - m^2 = {}", table_num(*nu));
            }
            let _ = writeln!(
                out,
                "extrapolated: {} +- {:.2e} (order {}){}",
                table_num(r.nu),
                r.err,
                r.order
                    .map(|p| format!("{p:.3}"))
                    .unwrap_or_else(|| "-".into()),
                if r.declined { " [declined]" } else { "" },
            );
            let _ = writeln!(out, "lambda1 = {}", table_num(r.lambda1));
            out
        }
    }
}

/// Per-refinement polygon solve summary.
#[derive(Debug, Clone)]
pub struct PolygonReport {
    pub n_vertices: usize,
    pub m: f64,
    /// `(refinement, subdivisions, reduced complex dim, nu_min)`.
    pub rows: Vec<(usize, usize, usize, f64)>,
    pub extrapolated: Option<(f64, Option<f64>, f64)>,
    pub hermiticity_defect: f64,
}

pub fn polygon_output(r: &PolygonReport, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("refinement,subdivisions,dim,nu_min\n");
            for (refine, sub, dim, nu) in &r.rows {
                let _ = writeln!(out, "{},{},{},{}", refine, sub, dim, fmt_float(*nu));
            }
            out
        }
        Format::Json => {
            let mut out = String::from("{\"rows\": [\n");
            for (i, (refine, sub, dim, nu)) in r.rows.iter().enumerate() {
                let _ = write!(
                    out,
                    "  {{\"refinement\": {}, \"subdivisions\": {}, \"dim\": {}, \"nu_min\": {}}}",
                    refine,
                    sub,
                    dim,
                    json_num(*nu)
                );
                out.push_str(if i + 1 < r.rows.len() { ",\n" } else { "\n" });
            }
            let extrap = match r.extrapolated {
                Some((v, p, e)) => format!(
                    "{{\"nu\": {}, \"order\": {}, \"err\": {}}}",
                    json_num(v),
                    json_opt(p),
                    json_num(e)
                ),
                None => "null".to_string(),
            };
            let _ = writeln!(
                out,
                "], \"extrapolated\": {}, \"hermiticity_defect\": {}}}",
                extrap,
                json_num(r.hermiticity_defect)
            );
            out
        }
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "polygon with {} vertices, m={}", r.n_vertices, r.m);
            for (refine, sub, dim, nu) in &r.rows {
                let _ = writeln!(
                    out,
                    "  refinement {refine} (1/{sub}, dim {dim}): nu_min = {}",
                    table_num(*nu)
                );
            }
            if let Some((v, p, e)) = r.extrapolated {
                let _ = writeln!(
                    out,
                    "extrapolated: {} +- {e:.2e} (order {})",
                    table_num(v),
                    p.map(|p| format!("{p:.3}")).unwrap_or_else(|| "-".into())
                );
            }
            let _ = writeln!(out, "hermiticity defect: {:.3e}", r.hermiticity_defect);
            out
        }
    }
}

/// Writes to the path or stdout.
pub fn emit(out_path: Option<&Path>, content: &str) -> Result<()> {
    match out_path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
