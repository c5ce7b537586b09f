use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, CommandFactory, Parser, Subcommand};
use roelab::formats::{
    format_operator, read_operator, read_text, write_text, MetricSpec, SpaceSpec,
};
use roelab::{ExperimentConfig, LabError};
use roelab_core::CoarseSpace;

/// Experiments on band operators over discrete metric spaces.
#[derive(Parser)]
#[command(name = "roelab", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Print the operator norm of an operator file.
    Norm {
        operator: PathBuf,
        #[arg(long, default_value_t = roelab_core::operator::NORM_TOL)]
        tol: f64,
    },
    /// Drop entries of modulus below ε.
    Truncate {
        operator: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print `r, max |B(x, r)|` for r = 0..=cap as CSV.
    Profile {
        #[command(flatten)]
        source: SpaceSource,
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpaceSource {
    /// Grid as DIMSxSIDE, e.g. 2x30.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, value_enum, default_value = "sup", requires = "grid")]
    metric: Metric,
    /// Edge list file.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Operator file whose header names the space.
    #[arg(long)]
    operator: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Metric {
    EuclideanRounded,
    Sup,
    Graph,
}

impl From<Metric> for MetricSpec {
    fn from(m: Metric) -> Self {
        match m {
            Metric::EuclideanRounded => MetricSpec::EuclideanRounded,
            Metric::Sup => MetricSpec::Sup,
            Metric::Graph => MetricSpec::Graph,
        }
    }
}

fn base_of(p: &Path) -> &Path {
    p.parent().unwrap_or(Path::new("."))
}

fn profile_space(src: &SpaceSource) -> roelab::Result<Arc<CoarseSpace>> {
    if let Some(g) = &src.grid {
        let bad = || LabError::Usage(format!("--grid expects DIMSxSIDE, got `{g}`"));
        let (d, s) = g.split_once('x').ok_or_else(bad)?;
        let spec = SpaceSpec::Grid {
            dims: d.trim().parse().map_err(|_| bad())?,
            side: s.trim().parse().map_err(|_| bad())?,
            metric: src.metric.into(),
        };
        return Ok(Arc::new(spec.build(Path::new("."))?));
    }
    if let Some(e) = &src.edges {
        let spec = SpaceSpec::EdgeList {
            path: e.clone(),
            vertices: None,
            separation: None,
        };
        return Ok(Arc::new(spec.build(Path::new("."))?));
    }
    let op = src.operator.as_ref().expect("clap requires one source");
    Ok(read_operator(op, None)?.0.space().clone())
}

fn execute(cmd: Command) -> roelab::Result<i32> {
    match cmd {
        Command::Run { config } => {
            let text = read_text(&config)?;
            if text.trim().is_empty() {
                eprintln!("{}", Cli::command().render_long_help());
                return Ok(2);
            }
            let cfg = ExperimentConfig::from_toml(&text)?;
            let base = base_of(&config);
            let outcome = roelab::run(&cfg, base)?;
            roelab::write_outputs(&outcome, base)?;
            for a in &outcome.report.assertions {
                eprintln!(
                    "{} {}: {}",
                    if a.passed { "ok  " } else { "FAIL" },
                    a.name,
                    a.detail
                );
            }
            Ok(if outcome.report.header.audit && !outcome.report.passed {
                1
            } else {
                0
            })
        }
        Command::Norm { operator, tol } => {
            let (t, _) = read_operator(&operator, None)?;
            println!("{}", t.operator_norm(tol)?);
            Ok(0)
        }
        Command::Truncate {
            operator,
            eps,
            output,
        } => {
            if eps.is_nan() || eps < 0.0 {
                return Err(LabError::Usage("--eps must be non-negative".into()));
            }
            let (t, header) = read_operator(&operator, None)?;
            let text = format_operator(&t.truncate(eps), header.space.as_ref())?;
            match output {
                Some(p) => write_text(&p, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Profile { source, cap } => {
            let space = profile_space(&source)?;
            println!("r,max_ball");
            for (r, b) in space.profile_table(cap).iter().enumerate() {
                println!("{r},{b}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
