use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use distharm::error::{CliError, Result, EXIT_OK};
use distharm::output::{self, Format};
use distharm::report::{self, PointSource};
use distharm::scene_file::{self, SceneFile};
use distharm::verify::{self, VerifyRequest};
use distharm::radial;
use distharm_core::scene::BUILTIN_NAMES;

#[derive(Parser)]
#[command(name = "distharm", version)]
#[command(about = "Tension fields of distributions and their conformal transformation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity checks at seeded sample points
    Verify {
        /// Builtin scene name or path to a scene file
        #[arg(long)]
        scene: String,
        /// `all` or a comma-separated list of check names
        #[arg(long, default_value = "all")]
        checks: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Conformal factor; repeat for several. Overrides the scene's own.
        #[arg(long, allow_hyphen_values = true)]
        mu: Vec<String>,
        /// `TOL` for every check or `CHECK=TOL` for one; repeatable
        #[arg(long)]
        tol: Vec<String>,
        /// Check these points instead of sampling, e.g. `--point 1,1`
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Worker threads; 0 uses all cores
        #[arg(long, env = "DISTHARM_THREADS", default_value_t = 0)]
        threads: usize,
    },
    /// Tension report at grid or given points
    Report {
        #[arg(long)]
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        /// File with one comma-separated point per line
        #[arg(long, conflicts_with = "point")]
        points_file: Option<PathBuf>,
        /// Grid nodes per axis, used when no points are given
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, allow_hyphen_values = true)]
        mu: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, env = "DISTHARM_THREADS", default_value_t = 0)]
        threads: usize,
    },
    /// Integrate the radial ODE and compare with its closed form
    Radial {
        #[arg(long = "C", alias = "c", default_value_t = 1.0, allow_negative_numbers = true)]
        c: f64,
        #[arg(long = "D", alias = "d", default_value_t = 1.0, allow_negative_numbers = true)]
        d: f64,
        /// Radius range `r0:r1`
        #[arg(long = "r", default_value = "0.5:3", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List builtin scenes, or print one (or a validated file) as JSON
    Scene { scene: Option<String> },
}

fn run(cli: Cli) -> Result<i32> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Verify {
            scene,
            checks,
            samples,
            seed,
            mu,
            tol,
            point,
            format,
            threads,
        } => {
            let scene = scene_file::resolve(&scene)?;
            let points = if point.is_empty() {
                None
            } else {
                Some(point.iter().map(|p| verify::parse_point(p)).collect::<Result<Vec<_>>>()?)
            };
            let request = VerifyRequest {
                selection: verify::parse_checks(&checks)?,
                mus: verify::parse_mus(&scene, &mu)?,
                tolerances: verify::parse_tolerances(&tol)?,
                scene,
                samples,
                seed,
                points,
                threads,
            };
            let outcome = verify::run_verify(request)?;
            output::write_verify(&mut out, &outcome, format)?;
            Ok(outcome.exit_code())
        }
        Command::Report {
            scene,
            point,
            points_file,
            grid,
            mu,
            format,
            threads,
        } => {
            let scene = scene_file::resolve(&scene)?;
            let source = match (points_file, point.is_empty()) {
                (Some(path), _) => PointSource::Explicit(report::read_points(&path)?),
                (None, false) => {
                    PointSource::Explicit(point.iter().map(|p| verify::parse_point(p)).collect::<Result<Vec<_>>>()?)
                }
                (None, true) => PointSource::Grid(grid),
            };
            let mus = verify::parse_mus(&scene, &mu)?;
            let reports = report::run_report(&scene, source, &mus, threads)?;
            output::write_reports(&mut out, &scene.name, &reports, format)?;
            Ok(EXIT_OK)
        }
        Command::Radial {
            c,
            d,
            range,
            steps,
            format,
        } => {
            let (r0, r1) = radial::parse_range(&range)?;
            let outcome = radial::run_radial(c, d, r0, r1, steps)?;
            output::write_radial(&mut out, &outcome, format)?;
            if format != Format::Text {
                eprintln!("{}", output::radial_summary_line(&outcome));
            }
            Ok(EXIT_OK)
        }
        Command::Scene { scene: None } => {
            for name in BUILTIN_NAMES {
                writeln!(out, "{name}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Scene { scene: Some(spec) } => {
            let scene = scene_file::resolve(&spec)?;
            serde_json::to_writer_pretty(&mut out, &SceneFile::from_scene(&scene))?;
            writeln!(out)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        // a closed pipe (`| head`) is not worth a diagnostic
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
