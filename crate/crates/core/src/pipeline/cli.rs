//! The `robust-wheel` command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 filesystem error, 64 usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::anova::confirm;
use crate::design_space::export::{profile_polyline_csv, profile_svg, DEFAULT_POLYLINE_STEP_DEG};
use crate::design_space::{wheel_profile, WheelSpec};
use crate::error::{Error, Result};
use crate::taguchi::{build_l9, ResponseMatrix};

use super::config::{load_config, OutputFormat, PipelineConfig};
use super::dataset::{study_config, study_responses};
use super::report::{config_bounds, emit_report, ingest_responses, run_analysis};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "robust-wheel", version, about = "Robust design of arc-blended stair-climbing wheels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the feasible ranges of the control factors.
    Design {
        /// Study configuration; the shipped study when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print CSV instead of text.
        #[arg(long)]
        csv: bool,
    },
    /// Print the L9 experiment plan as CSV.
    Oa {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the plan here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full analysis and write the report files.
    Analyze {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Power replicates, `run,replicate_1,...`; the shipped data when omitted.
        #[arg(long)]
        responses: Option<PathBuf>,
        /// A plan CSV to check against the configured factors.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output formats; overrides the config.
        #[arg(long, value_delimiter = ',')]
        formats: Option<Vec<FormatArg>>,
    },
    /// Print metrics for one wheel and optionally write its profile.
    Wheel {
        /// Parent circle radius, mm.
        #[arg(long)]
        rp: f64,
        /// Child circle radius, mm.
        #[arg(long, default_value_t = 10.0)]
        rc: f64,
        /// Number of child circles.
        #[arg(long)]
        nc: u32,
        /// Directory for the SVG and polyline files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Polyline sampling step, degrees.
        #[arg(long, default_value_t = DEFAULT_POLYLINE_STEP_DEG)]
        step_deg: f64,
    },
    /// Compare an observed grade at the optimal setting with the prediction.
    Confirm {
        /// Grade observed when running the optimal setting.
        #[arg(long)]
        grade: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        responses: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
    Svg,
    Polyline,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Svg => OutputFormat::Svg,
            FormatArg::Polyline => OutputFormat::Polyline,
        }
    }
}

fn config_or_default(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => load_config(p),
        None => study_config(),
    }
}

fn responses_or_default(path: Option<&Path>, runs: usize) -> Result<ResponseMatrix> {
    match path {
        Some(p) => {
            let file = std::fs::File::open(p).map_err(|e| Error::io(p, e))?;
            ResponseMatrix::from_csv(std::io::BufReader::new(file), runs)
        }
        None => study_responses(),
    }
}

fn io_out(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Design { config, csv } => {
            let config = config_or_default(config.as_deref())?;
            let bounds = config_bounds(&config)?;
            let text = if csv { bounds.to_csv() } else { bounds.to_text(config.rp_min_reference) };
            write!(out, "{text}").map_err(io_out)
        }
        Command::Oa { config, out: path } => {
            let config = config_or_default(config.as_deref())?;
            let plan = build_l9(&config.factors)?;
            match path {
                Some(p) => std::fs::write(&p, plan.to_csv()).map_err(|e| Error::io(&p, e)),
                None => write!(out, "{}", plan.to_csv()).map_err(io_out),
            }
        }
        Command::Analyze { config, responses, plan, out: out_dir, formats } => {
            let config = config_or_default(config.as_deref())?;
            let l9 = build_l9(&config.factors)?;
            if let Some(p) = plan {
                let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
                l9.check_csv(&text)?;
            }
            let responses = match responses {
                Some(p) => ingest_responses(&p, &l9)?,
                None => study_responses()?,
            };
            let report = run_analysis(&config, &responses)?;
            let formats: Vec<OutputFormat> = match formats {
                Some(f) => f.into_iter().map(Into::into).collect(),
                None => config.output.formats.clone(),
            };
            let dir = out_dir.unwrap_or_else(|| config.output.dir.clone());
            let written = emit_report(&report, &formats, &dir)?;
            write!(out, "{}", report.summary()).map_err(io_out)?;
            let _ = writeln!(err, "wrote {} files to {}", written.len(), dir.display());
            Ok(())
        }
        Command::Wheel { rp, rc, nc, out: dir, step_deg } => {
            let wheel = WheelSpec::new(rp, rc, nc)?;
            let profile = wheel_profile(&wheel)?;
            writeln!(
                out,
                "amplitude {:.4} mm, frequency {}, outer radius {:.4} mm",
                wheel.transverse_amplitude(),
                wheel.transverse_frequency(),
                wheel.outer_radius()
            )
            .map_err(io_out)?;
            if let Some(dir) = dir {
                if !(step_deg > 0.0 && step_deg <= 360.0) {
                    return Err(Error::InvalidInput(format!("step must lie in (0, 360] degrees, got {step_deg}")));
                }
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                let stem = format!("wheel_rp{rp}_rc{rc}_nc{nc}");
                let svg = dir.join(format!("{stem}.svg"));
                std::fs::write(&svg, profile_svg(&profile)).map_err(|e| Error::io(&svg, e))?;
                let csv = dir.join(format!("{stem}.csv"));
                std::fs::write(&csv, profile_polyline_csv(&profile, step_deg)).map_err(|e| Error::io(&csv, e))?;
            }
            Ok(())
        }
        Command::Confirm { grade, config, responses } => {
            let config = config_or_default(config.as_deref())?;
            let l9 = build_l9(&config.factors)?;
            let responses = responses_or_default(responses.as_deref(), l9.run_count())?;
            let report = run_analysis(&config, &responses)?;
            let prediction = report.prediction.ok_or(Error::EmptySignificantSet)?;
            write!(out, "{}", confirm(&prediction, grade)?.to_text()).map_err(io_out)
        }
    }
}
