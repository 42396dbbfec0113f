//! `spectra` — command-line front end for the Dirac right-triangle toolkit.
//!
//! Subcommands: `bounds`, `fiber`, `lambda1`, `sweep`, `polygon`.
//! Exit codes: 0 success, 2 invalid arguments, 3 numeric/runtime failure.

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use spectra_cli::report::{
    self, bounds_output, emit, fiber_output, lambda1_output, polygon_output, BoundsReport,
    FiberRow, Format, Lambda1Report, PolygonReport,
};
use spectra_cli::sweep::run_sweep;
use spectra_core::bounds as sbounds;
use spectra_core::dirac1d::{
    eigenvalues_in_window, shooting_defect, FiberFamily, FiberProblem,
};
use spectra_core::dirac2d::{
    assemble_form, build_polygon_mesh, extrapolate, lambda1_ladder, smallest_eigenpair,
    EigenOptions, Polygon,
};
use spectra_core::{ConstraintKind, ConstraintSpec, Mass, RightTriangle};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "spectra",
    version,
    about = "Spectral toolkit for the Dirac operator with infinite-mass boundary conditions on right triangles"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// Fibers starting on the horizontal leg (trace phase 1).
    #[value(alias = "v")]
    Vertical,
    /// Fibers starting on the vertical leg (trace phase -i).
    #[value(alias = "h")]
    Horizontal,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    Area,
    Perimeter,
    /// Linear-leg perimeter mode `b = (2+sqrt(2))k - a`.
    PerimeterPaper,
}

impl From<ConstraintArg> for ConstraintKind {
    fn from(c: ConstraintArg) -> ConstraintKind {
        match c {
            ConstraintArg::Area => ConstraintKind::Area,
            ConstraintArg::Perimeter => ConstraintKind::Perimeter,
            ConstraintArg::PerimeterPaper => ConstraintKind::PerimeterLinear,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form spectral bounds for one triangle.
    Bounds {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact 1D fiber spectrum with shooting-oracle defects.
    Fiber {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        l: f64,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        /// Window "lo,hi" on the eigenvalue axis.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = 32)]
        max_count: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Variational 2D solve over a mesh ladder with extrapolation.
    Lambda1 {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        /// Mesh ladder, e.g. 24,48,96 (geometric, at least 3 levels).
        #[arg(long, value_delimiter = ',', default_value = "24,48,96")]
        mesh: Vec<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constraint sweep: conjecture margins against the isosceles reference.
    Sweep {
        #[arg(long, value_enum)]
        constraint: ConstraintArg,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        /// Grid of a-values, e.g. 1.25,1.5,2,3.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "24,48,96")]
        mesh: Vec<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assembles the form on a polygon and reports the smallest energy.
    Polygon {
        /// Counterclockwise vertices "x0,y0;x1,y1;...".
        #[arg(long, allow_hyphen_values = true)]
        vertices: String,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        /// Refinement levels (each level quarters the elements).
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        mesh: Vec<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("SPECTRA_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(anyhow!("window must be \"lo,hi\", got {s:?}"));
    }
    let lo: f64 = parts[0].trim().parse().context("window low end")?;
    let hi: f64 = parts[1].trim().parse().context("window high end")?;
    if !(lo < hi) {
        return Err(anyhow!("window must satisfy lo < hi, got ({lo}, {hi})"));
    }
    Ok((lo, hi))
}

fn parse_vertices(s: &str) -> Result<Vec<[f64; 2]>> {
    s.split(';')
        .map(|pair| {
            let xy: Vec<&str> = pair.split(',').collect();
            if xy.len() != 2 {
                return Err(anyhow!("vertex must be \"x,y\", got {pair:?}"));
            }
            Ok([
                xy[0].trim().parse::<f64>().context("vertex x")?,
                xy[1].trim().parse::<f64>().context("vertex y")?,
            ])
        })
        .collect()
}

fn validate_ladder(mesh: &[usize]) -> Result<()> {
    if mesh.len() < 3 {
        return Err(anyhow!(
            "mesh ladder needs at least 3 levels for extrapolation, got {mesh:?}"
        ));
    }
    for w in mesh.windows(2) {
        if w[1] <= w[0] {
            return Err(anyhow!("mesh ladder must increase, got {mesh:?}"));
        }
    }
    let tail = &mesh[mesh.len() - 3..];
    if tail[1] % tail[0] != 0 || tail[2] * tail[0] != tail[1] * tail[1] {
        return Err(anyhow!(
            "last three mesh levels must be geometric (e.g. 24,48,96), got {mesh:?}"
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Bounds {
            a,
            b,
            m,
            format,
            out,
        } => {
            let tri = RightTriangle::new(a, b).map_err(usage)?;
            let mass = Mass::new(m).map_err(usage)?;
            let rep = BoundsReport {
                a,
                b,
                m,
                lower_sq: sbounds::lower_bound_sq(&tri),
                upper_sq: sbounds::upper_bound_sq(&tri),
                improved_lower_sq: sbounds::improved_lower_bound_sq(&tri, mass),
                mass_threshold: sbounds::mass_threshold(&tri),
            };
            emit(out.as_deref(), &bounds_output(&rep, format.into())).map_err(runtime)
        }
        Cmd::Fiber {
            family,
            a,
            b,
            l,
            m,
            window,
            max_count,
            format,
            out,
        } => {
            let tri = RightTriangle::new(a, b).map_err(usage)?;
            let mass = Mass::new(m).map_err(usage)?;
            let window = parse_window(&window).map_err(usage)?;
            let fam = match family {
                FamilyArg::Vertical => FiberFamily::Vertical,
                FamilyArg::Horizontal => FiberFamily::Horizontal,
            };
            let prob = FiberProblem::new(fam, &tri, l, mass).map_err(usage)?;
            let spectrum = eigenvalues_in_window(&prob, window, max_count).map_err(runtime)?;
            let mut rows = Vec::with_capacity(spectrum.eigenvalues.len());
            for (i, ev) in spectrum.eigenvalues.iter().enumerate() {
                let defect = shooting_defect(&prob, ev.value).map_err(runtime)?;
                rows.push(FiberRow {
                    index: i,
                    eigenvalue: ev.value,
                    energy: ev.energy,
                    branch: ev.branch,
                    validated: ev.validated,
                    defect: defect.norm(),
                });
            }
            let note = if rows.is_empty() {
                Some("window contains no spectrum (it may lie inside the mass gap)")
            } else {
                None
            };
            emit(out.as_deref(), &fiber_output(&rows, note, format.into())).map_err(runtime)
        }
        Cmd::Lambda1 {
            a,
            b,
            m,
            mesh,
            format,
            out,
        } => {
            let tri = RightTriangle::new(a, b).map_err(usage)?;
            let mass = Mass::new(m).map_err(usage)?;
            validate_ladder(&mesh).map_err(usage)?;
            let ladder = lambda1_ladder(&tri, mass, &mesh).map_err(runtime)?;
            let rep = Lambda1Report {
                a,
                b,
                m,
                points: ladder.points.clone(),
                nu: ladder.extrapolation.value,
                err: ladder.extrapolation.error_bound,
                order: ladder.extrapolation.order,
                declined: ladder.extrapolation.declined,
                lambda1: ladder.lambda1,
            };
            emit(out.as_deref(), &lambda1_output(&rep, format.into())).map_err(runtime)
        }
        Cmd::Sweep {
            constraint,
            k,
            m,
            a,
            mesh,
            format,
            out,
        } => {
            let spec = ConstraintSpec::new(constraint.into(), k).map_err(usage)?;
            let mass = Mass::new(m).map_err(usage)?;
            validate_ladder(&mesh).map_err(usage)?;
            for &ai in &a {
                spec.partner(ai).map_err(usage)?;
            }
            let records = run_sweep(&spec, &a, mass, &mesh).map_err(runtime)?;
            let failures = records.iter().filter(|r| r.error.is_some()).count();
            if failures > 0 {
                eprintln!("warning: {failures} sweep point(s) failed; rows are marked");
            }
            let content = match Format::from(format) {
                Format::Table => report::sweep_table(&records),
                Format::Csv => report::sweep_csv(&records),
                Format::Json => report::sweep_json(&records),
            };
            emit(out.as_deref(), &content).map_err(runtime)
        }
        Cmd::Polygon {
            vertices,
            m,
            mesh,
            format,
            out,
        } => {
            let verts = parse_vertices(&vertices).map_err(usage)?;
            let poly = Polygon::new(verts).map_err(usage)?;
            let mass = Mass::new(m).map_err(usage)?;
            if mesh.is_empty() {
                return Err(usage(anyhow!("need at least one refinement level")));
            }
            let mut rows = Vec::new();
            let mut points = Vec::new();
            let mut herm: f64 = 0.0;
            for &refinement in &mesh {
                let pmesh = build_polygon_mesh(&poly, refinement).map_err(runtime)?;
                let form = assemble_form(&pmesh, mass).map_err(runtime)?;
                let pair = smallest_eigenpair(
                    &form.energy.realified(),
                    &form.b.realified(),
                    &EigenOptions::default(),
                )
                .map_err(runtime)?;
                herm = herm.max(form.hermiticity_defect());
                rows.push((refinement, pmesh.subdivisions, form.dim(), pair.value));
                points.push((pmesh.subdivisions, pair.value));
            }
            let extrapolated = if points.len() >= 3 {
                extrapolate(&points)
                    .ok()
                    .map(|e| (e.value, e.order, e.error_bound))
            } else {
                None
            };
            let rep = PolygonReport {
                n_vertices: poly.vertices().len(),
                m,
                rows,
                extrapolated,
                hermiticity_defect: herm,
            };
            emit(out.as_deref(), &polygon_output(&rep, format.into())).map_err(runtime)
        }
    }
}
