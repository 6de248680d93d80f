//! The `stgeo` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O failure writing output, 2 unreadable or
//! malformed input, 3 shooting did not converge (a JSON diagnostic with the
//! best residual goes to stderr), 4 input violates a geometric invariant.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::grassmann::{grassmann_distance, grassmann_log, horizontalize_path, GrassmannPoint};
use crate::io::{
    read_curve_points, write_curve, CurveFrameJson, FrameJson, GrassmannJson, TangentJson,
};
use crate::matcore::Matrix;
use crate::shapes::{
    curve_distance, curve_distance_mod_rotation, curve_to_frame, frame_to_curve, CurveFrame,
    PlanarCurve,
};
use crate::stiefel::{
    geodesic_sample, stiefel_distance, stiefel_exp, stiefel_log, ShootingConfig, StiefelPoint,
    TangentVector,
};

const FORMATS: &str = "\
FORMATS
  matrix        {\"rows\": r, \"cols\": c, \"data\": [row-major numbers]}
  frame         {\"ambient_dim\": n, \"frame_dim\": p, \"matrix\": <matrix n x p>}
                columns orthonormal to 1e-10
  tangent       frame object for v plus \"base\": <frame>; x^T v skew to 1e-10
  subspace      {\"oriented\": bool, \"representative\": <frame>} or a bare frame
                (oriented when --oriented is given)
  curve         CSV, one `x,y` line per sample, at least 8 samples, the last
                sample joined back to the first
  curve frame   {\"frame\": <frame n x 2>, \"scale\": length}
  path          JSON array of frames sampled uniformly on [0, 1]

OUTPUT
  dist, gr-dist, curve-dist   {\"distance\": d}
  exp                         frame
  log, gr-log                 tangent
  geodesic                    JSON array of frames
  horizontalize               {\"path\": [frames], \"rotations\": [matrices]}
  curve2frame                 curve frame
  frame2curve                 curve CSV (17 significant digits)

EXIT CODES
  0 success, 1 cannot write output, 2 parse error, 3 no convergence
  (diagnostic JSON on stderr), 4 input violates an invariant";

#[derive(Debug, Parser)]
#[command(name = "stgeo", version, about = "Geodesics on Stiefel and Grassmann manifolds", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Seed for the restart perturbations of the shooting solver.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Endpoint residual at which shooting stops.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Number of shooting starts.
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exponential map: tangent -> frame at time --t.
    Exp {
        tangent: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Log map between two frames.
    Log { from: PathBuf, to: PathBuf },
    /// Geodesic distance between two frames.
    Dist { from: PathBuf, to: PathBuf },
    /// Sample a geodesic from a tangent, or the minimal geodesic between two frames.
    Geodesic {
        from: PathBuf,
        to: Option<PathBuf>,
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Distance between two subspaces.
    GrDist {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        oriented: bool,
    },
    /// Horizontal log between two subspaces.
    GrLog {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        oriented: bool,
    },
    /// Horizontal lift of a sampled path of frames.
    Horizontalize { path: PathBuf },
    /// Curve CSV -> curve frame JSON.
    Curve2frame { curve: PathBuf },
    /// Curve frame JSON -> curve CSV.
    Frame2curve { frame: PathBuf },
    /// Distance between two curves modulo translation and scale.
    CurveDist {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        mod_rotations: bool,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
    diagnostic: Option<serde_json::Value>,
}

impl Failure {
    fn parse(file: &Path, msg: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: format!("{}: {msg}", file.display()),
            diagnostic: None,
        }
    }

    fn from_error(context: &str, e: Error) -> Self {
        match e {
            Error::NoConvergence { best_residual } => Failure {
                code: 3,
                message: format!("{context}: {e}"),
                diagnostic: Some(serde_json::json!({
                    "error": "no_convergence",
                    "context": context,
                    "best_residual": best_residual,
                })),
            },
            e => Failure {
                code: 4,
                message: format!("{context}: {e}"),
                diagnostic: None,
            },
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read_json<J: DeserializeOwned>(file: &Path) -> Outcome<J> {
    let text = fs::read_to_string(file).map_err(|e| Failure::parse(file, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::parse(file, e))
}

fn validate<J, T: TryFrom<J, Error = Error>>(file: &Path, raw: J) -> Outcome<T> {
    T::try_from(raw).map_err(|e| Failure::from_error(&file.display().to_string(), e))
}

fn read_frame(file: &Path) -> Outcome<StiefelPoint> {
    validate(file, read_json::<FrameJson>(file)?)
}

fn read_tangent(file: &Path) -> Outcome<TangentVector> {
    validate(file, read_json::<TangentJson>(file)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SubspaceInput {
    Point(GrassmannJson),
    Frame(FrameJson),
}

fn read_subspace(file: &Path, oriented: bool) -> Outcome<GrassmannPoint> {
    match read_json::<SubspaceInput>(file)? {
        SubspaceInput::Point(mut g) => {
            g.oriented |= oriented;
            validate(file, g)
        }
        SubspaceInput::Frame(f) => Ok(GrassmannPoint::new(validate(file, f)?, oriented)),
    }
}

fn read_curve(file: &Path) -> Outcome<PlanarCurve> {
    let f = fs::File::open(file).map_err(|e| Failure::parse(file, e))?;
    let pts = read_curve_points(f).map_err(|e| Failure::parse(file, e))?;
    PlanarCurve::new(pts).map_err(|e| Failure::from_error(&file.display().to_string(), e))
}

#[derive(Serialize)]
struct Distance {
    distance: f64,
}

#[derive(Serialize)]
struct HorizontalLift {
    path: Vec<FrameJson>,
    rotations: Vec<Matrix>,
}

enum Output {
    Json(String),
    Csv(PlanarCurve),
}

fn to_json<T: Serialize>(v: T) -> Output {
    Output::Json(serde_json::to_string_pretty(&v).expect("library types serialize"))
}

fn pair_context(a: &Path, b: &Path) -> String {
    format!("{} -> {}", a.display(), b.display())
}

fn execute(cmd: &Command, cfg: &ShootingConfig) -> Outcome<Output> {
    let lib = |ctx: &str| {
        let ctx = ctx.to_string();
        move |e: Error| Failure::from_error(&ctx, e)
    };
    Ok(match cmd {
        Command::Exp { tangent, t } => {
            let v = read_tangent(tangent)?;
            to_json(stiefel_exp(&v, *t).0)
        }
        Command::Log { from, to } => {
            let (x, y) = (read_frame(from)?, read_frame(to)?);
            to_json(stiefel_log(&x, &y, cfg).map_err(lib(&pair_context(from, to)))?)
        }
        Command::Dist { from, to } => {
            let (x, y) = (read_frame(from)?, read_frame(to)?);
            let distance = stiefel_distance(&x, &y, cfg).map_err(lib(&pair_context(from, to)))?;
            to_json(Distance { distance })
        }
        Command::Geodesic { from, to, samples } => {
            let v = match to {
                None => read_tangent(from)?,
                Some(to) => {
                    let (x, y) = (read_frame(from)?, read_frame(to)?);
                    stiefel_log(&x, &y, cfg).map_err(lib(&pair_context(from, to)))?
                }
            };
            to_json(geodesic_sample(&v, *samples).map_err(lib("geodesic"))?)
        }
        Command::GrDist { from, to, oriented } => {
            let (x, y) = (
                read_subspace(from, *oriented)?,
                read_subspace(to, *oriented)?,
            );
            let distance = grassmann_distance(&x, &y, cfg).map_err(lib(&pair_context(from, to)))?;
            to_json(Distance { distance })
        }
        Command::GrLog { from, to, oriented } => {
            let (x, y) = (
                read_subspace(from, *oriented)?,
                read_subspace(to, *oriented)?,
            );
            to_json(grassmann_log(&x, &y, cfg).map_err(lib(&pair_context(from, to)))?)
        }
        Command::Horizontalize { path } => {
            let raw: Vec<FrameJson> = read_json(path)?;
            let frames = raw
                .into_iter()
                .map(|f| validate(path, f))
                .collect::<Outcome<Vec<StiefelPoint>>>()?;
            let (out, g) = horizontalize_path(&frames).map_err(lib(&path.display().to_string()))?;
            to_json(HorizontalLift {
                path: out.into_iter().map(FrameJson::from).collect(),
                rotations: g.samples().to_vec(),
            })
        }
        Command::Curve2frame { curve } => {
            let c = read_curve(curve)?;
            to_json(curve_to_frame(&c).map_err(lib(&curve.display().to_string()))?)
        }
        Command::Frame2curve { frame } => {
            let f: CurveFrame = validate(frame, read_json::<CurveFrameJson>(frame)?)?;
            Output::Csv(frame_to_curve(&f))
        }
        Command::CurveDist {
            from,
            to,
            mod_rotations,
        } => {
            let (a, b) = (read_curve(from)?, read_curve(to)?);
            let distance = if *mod_rotations {
                curve_distance_mod_rotation(&a, &b, cfg)
            } else {
                curve_distance(&a, &b, cfg)
            }
            .map_err(lib(&pair_context(from, to)))?;
            to_json(Distance { distance })
        }
    })
}

fn write_output(out: &Output, target: Option<&Path>) -> std::io::Result<()> {
    let mut buf = Vec::new();
    match out {
        Output::Json(v) => {
            buf.extend_from_slice(v.as_bytes());
            buf.push(b'\n');
        }
        Output::Csv(c) => write_curve(&mut buf, c)?,
    }
    match target {
        Some(p) => fs::write(p, buf),
        None => std::io::stdout().lock().write_all(&buf),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = ShootingConfig {
        residual_tol: cli.common.tol,
        restarts: cli.common.restarts,
        rng_seed: cli.common.seed,
        ..ShootingConfig::default()
    };
    if let Err(e) = cfg.validate() {
        eprintln!("stgeo: {e}");
        return 2;
    }
    match execute(&cli.command, &cfg) {
        Ok(out) => match write_output(&out, cli.common.output.as_deref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("stgeo: cannot write output: {e}");
                1
            }
        },
        Err(f) => {
            eprintln!("stgeo: {}", f.message);
            if let Some(d) = f.diagnostic {
                eprintln!("{d}");
            }
            f.code
        }
    }
}
