//! Command-line pipeline: validate metrics, generate fixtures, compute
//! Delaunay triangulations, solve for radii and embed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use alexandrov::delaunay::{
    delaunay_triangulation, weighted_delaunay, Triangulation, TriangulationDoc,
};
use alexandrov::embed::{embed_mesh, export_obj, QualityReport};
use alexandrov::fixtures;
use alexandrov::hull::{hull_metric, HullMetric};
use alexandrov::solver::{
    solve_radii_with_seed, SolveOutput, SolverConfig, SolverError, TraceRecord,
};
use alexandrov::star::RadiusAssignment;
use alexandrov::{MetricError, PolyhedralMetric, Surface};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

impl CommandResult {
    fn ok(summary: String, artifacts: Vec<PathBuf>) -> Self {
        CommandResult {
            exit_code: EXIT_OK,
            artifacts,
            summary,
        }
    }

    fn fail(exit_code: i32, summary: String) -> Self {
        CommandResult {
            exit_code,
            artifacts: Vec::new(),
            summary,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "alexandrov",
    version,
    about = "Embed convex polyhedral metrics in 3D"
)]
struct Cli {
    /// Worker threads for internal parallelism; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a metric file.
    Validate { input: PathBuf },
    /// Write a fixture metric.
    Gen(GenArgs),
    /// Weighted Delaunay triangulation of a metric.
    Delaunay {
        input: PathBuf,
        /// JSON array of vertex weights; zero weights if omitted.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Solve for apex radii.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Embed a solved metric and write a mesh.
    Embed {
        input: PathBuf,
        radii: PathBuf,
        #[arg(short = 'o')]
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// gen, solve and embed in one call.
    Pipeline {
        #[command(flatten)]
        gen: ShapeArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short = 'o')]
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(short = 'o')]
    output: PathBuf,
    /// Also write the generating 3D points as a JSON array.
    #[arg(long)]
    points: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ShapeArgs {
    #[arg(long, value_enum)]
    shape: Shape,
    /// Vertex count for random shapes.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long = "max-iters", default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long = "full-retriangulate")]
    full_retriangulate: bool,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Shape {
    Tetra,
    Cube,
    Octa,
    Random,
}

/// Output of `solve`, input of `embed`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveDoc {
    pub radii: Vec<f64>,
    pub max_curvature: f64,
    pub iterations: usize,
    pub triangulation: TriangulationDoc,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Invalid(String),
    NoConvergence(String),
    Io(String),
}

impl Failure {
    fn into_result(self) -> CommandResult {
        match self {
            Failure::Usage(s) => CommandResult::fail(EXIT_USAGE, s),
            Failure::Invalid(s) => CommandResult::fail(EXIT_INVALID, format!("invalid: {s}")),
            Failure::NoConvergence(s) => {
                CommandResult::fail(EXIT_NO_CONVERGENCE, format!("no convergence: {s}"))
            }
            Failure::Io(s) => CommandResult::fail(EXIT_IO, format!("i/o error: {s}")),
        }
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Config(s) => Failure::Usage(s),
            SolverError::MaxIterations(_)
            | SolverError::StepCollapse(_)
            | SolverError::Initialization { .. } => Failure::NoConvergence(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

/// Files to write once the command has succeeded.
struct Outputs(Vec<(PathBuf, Vec<u8>)>);

impl Outputs {
    fn new() -> Self {
        Outputs(Vec::new())
    }

    fn add(&mut self, path: &Path, bytes: Vec<u8>) {
        self.0.push((path.to_path_buf(), bytes));
    }

    fn add_json<T: Serialize>(&mut self, path: &Path, value: &T) {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.add(path, text.into_bytes());
    }

    /// Write every file via a temporary in the target directory and a rename.
    fn commit(self) -> Result<Vec<PathBuf>, Failure> {
        let mut staged = Vec::new();
        for (path, bytes) in &self.0 {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(&dir)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            tmp.write_all(bytes)
                .and_then(|_| tmp.flush())
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            staged.push((tmp, path.clone()));
        }
        let mut written = Vec::new();
        for (tmp, path) in staged {
            tmp.persist(&path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_metric(path: &Path) -> Result<(PolyhedralMetric, Surface), Failure> {
    let metric = PolyhedralMetric::from_json(&read(path)?)?;
    metric.check_structure()?;
    let report = metric.validate();
    if !report.is_valid() {
        return Err(Failure::Invalid(report.to_string()));
    }
    let surface = Surface::new(&metric)?;
    Ok((metric, surface))
}

fn generate(args: &ShapeArgs) -> Result<HullMetric, Failure> {
    let points = match args.shape {
        Shape::Tetra => fixtures::tetrahedron_points(),
        Shape::Cube => fixtures::cube_points(),
        Shape::Octa => fixtures::octahedron_points(),
        Shape::Random => {
            if args.n < 4 {
                return Err(Failure::Usage(format!(
                    "--n must be at least 4, got {}",
                    args.n
                )));
            }
            fixtures::random_sphere_points(args.n, args.seed)
        }
    };
    Ok(hull_metric(&points)?)
}

fn solver_config(args: &SolverArgs) -> SolverConfig {
    SolverConfig {
        eps: args.eps,
        max_iters: args.max_iters,
        full_retriangulate: args.full_retriangulate,
        ..SolverConfig::default()
    }
}

fn trace_lines(trace: &[TraceRecord]) -> Vec<u8> {
    let mut out = String::new();
    for r in trace {
        out.push_str(&serde_json::to_string(r).expect("trace serializes"));
        out.push('\n');
    }
    out.into_bytes()
}

fn solve(surface: &Surface, args: &SolverArgs) -> Result<SolveOutput, Failure> {
    let config = solver_config(args);
    config.check().map_err(Failure::from)?;
    let seed = delaunay_triangulation(surface).map_err(|e| Failure::Invalid(e.to_string()))?;
    Ok(solve_radii_with_seed(surface, &seed, &config)?)
}

fn solve_doc(out: &SolveOutput) -> SolveDoc {
    SolveDoc {
        radii: out.radii.r.clone(),
        max_curvature: out.star.diagnostics.eps4,
        iterations: out.iterations,
        triangulation: out.triangulation.to_doc(Some(&out.radii.weights())),
    }
}

fn embed_outputs(
    t: &Triangulation,
    r: &RadiusAssignment,
    outputs: &mut Outputs,
    output: &Path,
    report: Option<&PathBuf>,
) -> Result<QualityReport, Failure> {
    let (emb, quality) = embed_mesh(t, r).map_err(|e| Failure::Invalid(e.to_string()))?;
    outputs.add(output, export_obj(&emb, t));
    if let Some(path) = report {
        outputs.add_json(path, &quality);
    }
    Ok(quality)
}

fn dispatch(command: Command) -> Result<CommandResult, Failure> {
    match command {
        Command::Validate { input } => {
            let (metric, _) = load_metric(&input)?;
            Ok(CommandResult::ok(
                format!("valid: n={}", metric.vertex_count),
                Vec::new(),
            ))
        }
        Command::Gen(args) => {
            let hull = generate(&args.shape)?;
            let mut outputs = Outputs::new();
            let mut text = hull.metric.to_json();
            text.push('\n');
            outputs.add(&args.output, text.into_bytes());
            if let Some(path) = &args.points {
                let pts: Vec<[f64; 3]> = hull.points.iter().map(|p| [p.x, p.y, p.z]).collect();
                outputs.add_json(path, &pts);
            }
            let written = outputs.commit()?;
            Ok(CommandResult::ok(
                format!(
                    "generated: n={} faces={}",
                    hull.metric.vertex_count,
                    hull.metric.triangles.len()
                ),
                written,
            ))
        }
        Command::Delaunay {
            input,
            weights,
            output,
        } => {
            let (metric, surface) = load_metric(&input)?;
            let n = metric.vertex_count;
            let w: Vec<f64> = match weights {
                Some(path) => serde_json::from_str(&read(&path)?)
                    .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?,
                None => vec![0.0; n],
            };
            if w.len() != n || w.iter().any(|x| !x.is_finite()) {
                return Err(Failure::Invalid(format!(
                    "need {n} finite weights, got {}",
                    w.len()
                )));
            }
            let seed =
                delaunay_triangulation(&surface).map_err(|e| Failure::Invalid(e.to_string()))?;
            let (t, stats) =
                weighted_delaunay(&seed, &w).map_err(|e| Failure::Invalid(e.to_string()))?;
            let mut outputs = Outputs::new();
            outputs.add(&output, (t.to_json(Some(&w)) + "\n").into_bytes());
            let written = outputs.commit()?;
            Ok(CommandResult::ok(
                format!(
                    "delaunay: n={n} edges={} flips={}",
                    t.mesh().edge_count(),
                    stats.flips
                ),
                written,
            ))
        }
        Command::Solve {
            input,
            solver,
            output,
        } => {
            let (_, surface) = load_metric(&input)?;
            let out = solve(&surface, &solver)?;
            let mut outputs = Outputs::new();
            outputs.add_json(&output, &solve_doc(&out));
            if let Some(path) = &solver.trace {
                outputs.add(path, trace_lines(&out.trace));
            }
            let written = outputs.commit()?;
            Ok(CommandResult::ok(
                format!(
                    "solved: n={} iterations={} max_curvature={:.3e}",
                    surface.vertex_count(),
                    out.iterations,
                    out.star.diagnostics.eps4
                ),
                written,
            ))
        }
        Command::Embed {
            input,
            radii,
            output,
            report,
        } => {
            let (metric, _) = load_metric(&input)?;
            let doc: SolveDoc = serde_json::from_str(&read(&radii)?)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", radii.display())))?;
            if doc.radii.len() != metric.vertex_count
                || doc.triangulation.vertices != metric.vertex_count
            {
                return Err(Failure::Invalid(format!(
                    "{} has {} radii for {} vertices",
                    radii.display(),
                    doc.radii.len(),
                    metric.vertex_count
                )));
            }
            let (t, _) = Triangulation::from_doc(doc.triangulation)
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            let r =
                RadiusAssignment::new(doc.radii).map_err(|e| Failure::Invalid(e.to_string()))?;
            let mut outputs = Outputs::new();
            let q = embed_outputs(&t, &r, &mut outputs, &output, report.as_ref())?;
            let written = outputs.commit()?;
            Ok(CommandResult::ok(
                format!(
                    "embedded: n={} accuracy={:.3e} convexity_slack={:.3e}",
                    metric.vertex_count, q.accuracy, q.convexity_slack
                ),
                written,
            ))
        }
        Command::Pipeline {
            gen,
            solver,
            output,
            report,
        } => {
            let hull = generate(&gen)?;
            let surface = Surface::new(&hull.metric)?;
            let out = solve(&surface, &solver)?;
            let mut outputs = Outputs::new();
            let q = embed_outputs(
                &out.triangulation,
                &out.radii,
                &mut outputs,
                &output,
                report.as_ref(),
            )?;
            if let Some(path) = &solver.trace {
                outputs.add(path, trace_lines(&out.trace));
            }
            let written = outputs.commit()?;
            Ok(CommandResult::ok(
                format!(
                    "pipeline: n={} iterations={} accuracy={:.3e} convexity_slack={:.3e}",
                    surface.vertex_count(),
                    out.iterations,
                    q.accuracy,
                    q.convexity_slack
                ),
                written,
            ))
        }
    }
}

/// Parse `argv` (without the program name) and run the command.
pub fn run<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("alexandrov"))
        .chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return CommandResult::fail(code, e.to_string().trim_end().to_string());
        }
    };
    if cli.threads == 0 {
        return CommandResult::fail(EXIT_USAGE, "--threads must be at least 1".into());
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => return CommandResult::fail(EXIT_USAGE, format!("thread pool: {e}")),
    };
    pool.install(|| dispatch(cli.command))
        .unwrap_or_else(Failure::into_result)
}
