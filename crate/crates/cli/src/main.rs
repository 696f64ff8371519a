use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ibody_core::body::{BodyError, IntersectionBody, MeshError, Mode, RadialValue};
use ibody_core::io::{degree_graph_dot, InputError, PolytopeFile, ResultFile};
use ibody_core::linalg::parse_rat;
use ibody_core::polytope::VPolytope;
use ibody_core::verify::{run_checks, verify_result};

#[derive(Parser)]
#[command(name = "ibody", version, about = "Exact intersection bodies of rational polytopes")]
struct Cli {
    /// Worker threads for per-chamber work
    #[arg(long, global = true, env = "IBODY_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// ρ(x) = Vol(P ∩ x⊥)/‖x‖
    True,
    /// the true radial function divided by d
    Paper,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::True => Mode::TrueVolume,
            ModeArg::Paper => Mode::Paper,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the radial function on every chamber and write a result file
    Compute {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "true")]
        mode: ModeArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify a point against the intersection body
    Member {
        input: PathBuf,
        /// Comma-separated rational coordinates, e.g. "0,1/2,3"
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value = "true")]
        mode: ModeArg,
    },
    /// Triangulate the boundary as a Wavefront OBJ mesh (d = 3)
    Mesh {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        refine: u32,
        #[arg(long)]
        obj: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "true")]
        mode: ModeArg,
    },
    /// Export chamber adjacency labeled by boundary degree as DOT
    Graph {
        input: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "true")]
        mode: ModeArg,
    },
    /// Run the invariant suite, optionally replaying a stored result file
    Check {
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        result: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "true")]
        mode: ModeArg,
    },
}

/// Exit 2 for bad input, 3 for internal consistency failures.
enum Failure {
    Input(String),
    Internal(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<BodyError> for Failure {
    fn from(e: BodyError) -> Failure {
        match e {
            BodyError::Dimension(_) | BodyError::PointDimension { .. } => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(VPolytope, String), Failure> {
    let file = PolytopeFile::from_json(&read_to_string(path)?)?;
    let p = file.to_polytope()?;
    let name = file.name.unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    Ok((p, name))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Compute { input, mode, output } => {
            let (p, name) = load(&input)?;
            let body = IntersectionBody::compute(p, mode.into())?;
            body.degree_table()?;
            emit(output.as_deref(), &ResultFile::from_body(&body, &name).to_json())
        }
        Command::Member { input, point, mode } => {
            let (p, _) = load(&input)?;
            let x = point
                .split(',')
                .map(|s| parse_rat(s.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Input(format!("--point: {e}")))?;
            if x.len() != p.dim() {
                return Err(Failure::Input(format!("--point has {} coordinates, expected {}", x.len(), p.dim())));
            }
            let body = IntersectionBody::compute(p, mode.into())?;
            let rho = match body.evaluate_radial(&x)? {
                RadialValue::Finite(r) => r.to_string(),
                RadialValue::Infinite => "inf".to_string(),
            };
            println!("{} rho={rho}", body.membership(&x)?.as_str());
            Ok(())
        }
        Command::Mesh { input, refine, obj, mode } => {
            let (p, _) = load(&input)?;
            if p.dim() != 3 {
                return Err(Failure::Input(MeshError::Dimension(p.dim()).to_string()));
            }
            let body = IntersectionBody::compute(p, mode.into())?;
            let mesh = body.mesh_boundary(refine).map_err(|e| Failure::Internal(e.to_string()))?;
            emit(obj.as_deref(), &mesh.to_obj())
        }
        Command::Graph { input, dot, mode } => {
            let (p, _) = load(&input)?;
            let body = IntersectionBody::compute(p, mode.into())?;
            emit(dot.as_deref(), &degree_graph_dot(&body))
        }
        Command::Check { input, samples, seed, result, mode } => {
            let (p, _) = load(&input)?;
            let mut ok = true;
            if let Some(path) = result {
                let stored = ResultFile::from_json(&read_to_string(&path)?)?;
                match verify_result(&p, &stored) {
                    Ok(()) => println!("PASS replay: {}", path.display()),
                    Err(v) => {
                        println!("FAIL replay: {v}");
                        ok = false;
                    }
                }
            }
            let body = IntersectionBody::compute(p, mode.into())?;
            let report = run_checks(&body, samples, seed);
            print!("{}", report.render());
            if ok && report.passed() {
                Ok(())
            } else {
                Err(Failure::Internal("invariant check failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
