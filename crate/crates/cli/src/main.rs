//! `lightcone`: runs one verification job and writes a canonical JSON report.
//!
//! Exit codes: 0 when every asserted identity holds, 1 on a verification failure,
//! 2 on a usage error.

mod jobs;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "lightcone", version, about = "Exact checks for CR-automorphism algebras of Levi-degenerate hypersurfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Add wall-clock timing to the metadata block (makes the report non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SurfaceArgs {
    /// `Mt` (with --t), `M0`, `M1`, `T` for the light-cone tube, `file` (with --germ-file),
    /// or a DSL expression for rho.
    #[arg(long, default_value = "Mt")]
    pub surface: String,
    /// Family parameter for `Mt`, e.g. `1`, `-1`, `1/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// File holding a DSL expression for rho.
    #[arg(long)]
    pub germ_file: Option<PathBuf>,
    /// Require the custom germ to be in the normal form of the family.
    #[arg(long)]
    pub normal_form: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Bounds {
    /// Degree bound for polynomial fields.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Truncation degree for tangency equations.
    #[arg(long = "D", env = "LIGHTCONE_TRUNCATION", default_value_t = 8)]
    pub big_d: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension of the algebra of tangent polynomial fields.
    HolDim {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        bounds: Bounds,
        /// Assert this dimension.
        #[arg(long)]
        expect_dim: Option<usize>,
    },
    /// Tangency residual of fields along a surface.
    Tangency {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// DSL field, e.g. `2*w*Dw + z1*Dz1`; repeatable.
        #[arg(long, required = true)]
        field: Vec<String>,
        #[arg(long = "D", env = "LIGHTCONE_TRUNCATION", default_value_t = 8)]
        big_d: u32,
    },
    /// Lie bracket of two fields.
    Bracket {
        /// Exactly two DSL fields.
        #[arg(long, num_args = 1, required = true)]
        field: Vec<String>,
        /// Assert that the bracket equals this field.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Structure constants, Killing form and label of the algebra.
    Classify {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        bounds: Bounds,
        /// Assert this label, e.g. `so(2,3)`.
        #[arg(long)]
        expect_label: Option<String>,
    },
    /// Weight decomposition under ad(ζ1 + iζ2).
    Grading {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Levi matrix at a point of the slice.
    Levi {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        z1: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z2: String,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Exact verification of an explicit equivalence map.
    VerifyMap {
        /// `cayley`, `phi_oc` or `phi_ob`.
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long = "D", env = "LIGHTCONE_TRUNCATION", default_value_t = 8)]
        big_d: u32,
    },
    /// Affine invariance, cone tangency of sp(2), δ invariants and the Θ group law.
    TubeChecks {
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Separation certificates for φ on N and W.
    Qt {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Taylor coefficients of the non-analytic example and the radius estimate.
    Qr {
        #[arg(long, default_value_t = 2000)]
        kmax: usize,
    },
    /// Number of points identified by CR-functions on T_t.
    Sigma {
        /// A rational `p/q`, a real DSL constant such as `SQRT2`, or `irrational`.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Fundamental group of the higher tubes.
    Pi1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<lightcone::Error> for CliError {
    fn from(e: lightcone::Error) -> Self {
        use lightcone::Error::*;
        match e {
            Parse { .. } | Semantic(_) | InvalidArgument(_) | UnsupportedAngle(_) | NormalForm(_) | NotReal
            | CoordinateMismatch(..) | SliceRequiresV | InsufficientCutoff { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

pub struct Outcome {
    pub job: Value,
    pub results: Value,
    pub passed: bool,
}

fn metadata(passed: bool, elapsed: Option<f64>) -> Value {
    let mut m = json!({
        "passed": passed,
        "tool": "lightcone",
        "version": env!("CARGO_PKG_VERSION"),
        "toolchain": env!("LIGHTCONE_RUSTC_VERSION"),
    });
    if let Some(ms) = elapsed {
        m["elapsed_ms"] = json!((ms * 1000.0).round() / 1000.0);
    }
    m
}

/// Writes to a sibling temporary file and renames it into place.
fn write_atomically(path: &Path, text: &str) -> std::io::Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = jobs::run(&cli.command);
    let elapsed = cli.timing.then(|| start.elapsed().as_secs_f64() * 1000.0);
    let (report, code) = match outcome {
        Ok(o) => {
            let code = if o.passed { 0 } else { 1 };
            (json!({ "job": o.job, "results": o.results, "metadata": metadata(o.passed, elapsed) }), code)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("verification failed: {msg}");
            let job = jobs::echo(&cli.command);
            (json!({ "job": job, "error": msg, "metadata": metadata(false, elapsed) }), 1)
        }
    };
    let mut text = serde_json::to_string_pretty(&report).expect("serializable");
    text.push('\n');
    let written = match &cli.output {
        Some(path) => write_atomically(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
