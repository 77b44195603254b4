use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use ellipse_bound::baseline::ywcc16;
use ellipse_bound::conic::{EllipseAffine, EllipseRecord};
use ellipse_bound::exec::Execution;
use ellipse_bound::experiment::{emit_report, run_experiment, summary_path, Method};
use ellipse_bound::mvee::DEFAULT_EPS;
use ellipse_bound::pipeline::{bound_until_converged, RefineOptions, DEFAULT_AREA_TOL, DEFAULT_K_MAX};
use ellipse_bound::scenario::{self, Scenario};
use ellipse_bound::svg::{emit_svg, Figure};
use ellipse_bound::Error;

#[derive(Parser)]
#[command(version, about = "Outer-bounding ellipses for intersections of planar ellipses")]
struct Cli {
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random scenarios whose ellipses share a known common point.
    Gen {
        #[arg(long)]
        m_ellipses: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run methods over a scenario file and write a CSV report.
    Run {
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "proposed,ywcc16")]
        methods: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        m: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        report: PathBuf,
        /// Also draw one figure per scenario and method at the largest m.
        #[arg(long)]
        svg_dir: Option<PathBuf>,
    },
    /// Bound a single scenario and print the result as JSON.
    Bound {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Keep doubling m until the area settles.
        #[arg(long)]
        converge: bool,
        #[arg(long, default_value_t = DEFAULT_AREA_TOL)]
        area_tol: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

enum Failure {
    Invalid(String),
    Empty,
    RepairBudget(usize),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Empty => 3,
            Failure::RepairBudget(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyIntersection => Failure::Empty,
            Error::RepairBudgetExceeded { arc } => Failure::RepairBudget(arc),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn read_scenarios(path: &Path) -> Result<Vec<Scenario>, Failure> {
    match scenario::load(path) {
        Ok(Ok(s)) => Ok(s),
        Ok(Err(e)) => Err(e.into()),
        Err(e) => Err(Failure::Invalid(format!("{}: {e}", path.display()))),
    }
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn draw(ellipses: &[EllipseAffine], method: Method, m: usize, eps: f64, exec: Execution, path: &Path) -> Result<(), Failure> {
    match method {
        Method::Proposed => {
            let opts = RefineOptions { m0: m, eps, k_max: 1, exec, ..RefineOptions::default() };
            let fig = bound_until_converged(ellipses, &opts).ok();
            let f = Figure {
                inputs: ellipses,
                polygon: fig.as_ref().and_then(|r| r.polygon.as_ref()),
                bound: fig.as_ref().map(|r| &r.ellipse),
            };
            emit_svg(&f, path).map_err(io(path))
        }
        Method::Ywcc16 => {
            let rep = ywcc16(ellipses, m, eps).ok();
            let f = Figure {
                inputs: ellipses,
                polygon: rep.as_ref().and_then(|r| r.polygon()),
                bound: rep.as_ref().and_then(|r| r.ellipse()),
            };
            emit_svg(&f, path).map_err(io(path))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Gen { m_ellipses, count, seed, out } => {
            if m_ellipses == 0 || count == 0 {
                return Err(Failure::Invalid("--m-ellipses and --count must be positive".into()));
            }
            scenario::save(&scenario::gen_scenarios(m_ellipses, count, seed), &out).map_err(io(&out))
        }
        Command::Run { scenarios, methods, m, eps, report, svg_dir } => {
            let list = read_scenarios(&scenarios)?;
            let methods = methods
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<Method>())
                .collect::<Result<Vec<_>, _>>()?;
            if m.contains(&0) {
                return Err(Failure::Invalid("m values must be positive".into()));
            }
            if !(eps > 0.0 && eps <= 1e-3) {
                return Err(Failure::Invalid(format!("eps must lie in (0, 1e-3], got {eps}")));
            }
            let records = run_experiment(&list, &methods, &m, eps, exec);
            emit_report(&records, &report).map_err(io(&report))?;
            eprintln!(
                "{} records written to {} (summary in {})",
                records.len(),
                report.display(),
                summary_path(&report).display()
            );
            if let (Some(dir), Some(&m_max)) = (svg_dir, m.iter().max()) {
                std::fs::create_dir_all(&dir).map_err(io(&dir))?;
                for s in &list {
                    let Ok(ellipses) = s.affine() else { continue };
                    for &method in &methods {
                        let path = dir.join(format!("{}-{method}-m{m_max}.svg", file_stem(&s.id)));
                        draw(&ellipses, method, m_max, eps, exec, &path)?;
                    }
                }
            }
            Ok(())
        }
        Command::Bound { scenario, index, m, eps, converge, area_tol, svg } => {
            let list = read_scenarios(&scenario)?;
            let s = list.get(index).ok_or_else(|| {
                Failure::Invalid(format!("index {index} out of range ({} scenarios)", list.len()))
            })?;
            let ellipses = s.affine()?;
            let opts = RefineOptions {
                m0: m,
                eps,
                area_tol,
                k_max: if converge { DEFAULT_K_MAX } else { 1 },
                exec,
            };
            let r = bound_until_converged(&ellipses, &opts)?;
            let t = r.timings;
            let out = json!({
                "scenario": s.id,
                "ellipse": EllipseRecord::from(&r.ellipse),
                "area": r.area(),
                "vertices": r.polygon.as_ref().map_or(0, |p| p.len()),
                "repairs": r.repairs,
                "per_arc_m": r.per_arc_m,
                "area_trace": r.area_trace,
                "gap": r.solution.as_ref().map(|s| s.gap),
                "timings_ms": {
                    "reduce": t.reduce.as_secs_f64() * 1e3,
                    "walk": t.walk.as_secs_f64() * 1e3,
                    "polygon": t.polygon.as_secs_f64() * 1e3,
                    "mvee": t.mvee.as_secs_f64() * 1e3,
                },
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            if let Some(path) = svg {
                let f = Figure { inputs: &ellipses, polygon: r.polygon.as_ref(), bound: Some(&r.ellipse) };
                emit_svg(&f, &path).map_err(io(&path))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(msg) => eprintln!("error: {msg}"),
                Failure::Empty => eprintln!("error: the ellipses have no common interior"),
                Failure::RepairBudget(arc) => eprintln!("error: degeneracy repair budget exceeded on arc {arc}"),
                Failure::Io(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
