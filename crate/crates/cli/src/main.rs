use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use planecount::experiments::field_info;
use planecount::{run, CliError, Experiment, Kind, Manifest, StrategySpec};
use planecount_core::sieve::PointConstraint;
use planecount_core::stats::{Mode, DEFAULT_BUDGET};
use planecount_core::FieldSpec;

#[derive(Parser)]
#[command(name = "planecount", version, about = "Point counts and smoothness of plane curves over small finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a finite field.
    Field {
        #[command(subcommand)]
        what: FieldCommand,
    },
    /// Histogram of rational point counts compared with the binomial model.
    Dist(Common),
    /// Histogram plus normalized moments, empirical and model.
    Moments {
        #[command(flatten)]
        common: Common,
        /// Highest moment order.
        #[arg(long, default_value_t = 4)]
        k: u32,
    },
    /// Jet map ranks and exact densities for a jet scheme.
    Sieve {
        #[command(flatten)]
        common: Common,
        /// Jet scheme: none, all^1, all^2, or a list like [0:0:1]^2,[0:1:0]^1.
        #[arg(long, default_value = "none")]
        z: String,
        /// Constraint per point, comma separated, or one for all points.
        #[arg(long, value_delimiter = ',')]
        target: Vec<Constraint>,
        /// Also evaluate the product formula for closed points of degree below r.
        #[arg(long, default_value_t = 0)]
        r: u32,
        /// Largest degree searched for the surjectivity threshold.
        #[arg(long, default_value_t = 64)]
        max_degree: u32,
    },
    /// Compare the smoothness decision with an exhaustive singular-point scan.
    SmoothCheck {
        #[command(flatten)]
        common: Common,
        /// Scan extensions up to this degree; defaults to (d-1)^2.
        #[arg(long)]
        oracle_max_e: Option<u32>,
    },
    /// Exact point-count distribution over all forms from the value map.
    PropExact {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        max_degree: u32,
    },
    /// Tail bounds next to the densities they bound.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        r_max: u32,
    },
    /// Run a manifest file.
    Run {
        manifest: PathBuf,
        #[arg(long)]
        shards: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        resume: bool,
    },
}

#[derive(Subcommand)]
enum FieldCommand {
    Info {
        #[arg(long)]
        field: FieldSpec,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    All,
    Smooth,
}

#[derive(Clone, Copy, ValueEnum)]
enum Constraint {
    ValueZero,
    ValueNonzero,
    JetZero,
    JetNonzero,
    OnCurveSmooth,
    Unconstrained,
}

impl From<Constraint> for PointConstraint {
    fn from(c: Constraint) -> Self {
        match c {
            Constraint::ValueZero => PointConstraint::ValueZero,
            Constraint::ValueNonzero => PointConstraint::ValueNonzero,
            Constraint::JetZero => PointConstraint::JetZero,
            Constraint::JetNonzero => PointConstraint::JetNonzero,
            Constraint::OnCurveSmooth => PointConstraint::OnCurveSmooth,
            Constraint::Unconstrained => PointConstraint::Unconstrained,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Field as p^k.
    #[arg(long)]
    field: FieldSpec,
    #[arg(long)]
    degree: u32,
    #[arg(long, value_enum, default_value = "smooth")]
    mode: ModeArg,
    /// Visit every nonzero form (the default).
    #[arg(long, conflicts_with = "sample")]
    exhaustive: bool,
    /// Draw this many random nonzero forms instead.
    #[arg(long)]
    sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Most candidate forms an exhaustive run may visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 1)]
    shards: u32,
    /// Report path; `.json` and `.csv` are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continue from checkpoints left by an interrupted run.
    #[arg(long)]
    resume: bool,
    #[arg(long, default_value_t = planecount::manifest::DEFAULT_CHECKPOINT_EVERY)]
    checkpoint_every: u64,
    /// Also save the manifest describing this run.
    #[arg(long)]
    save_manifest: Option<PathBuf>,
}

impl Common {
    fn manifest(&self, kind: Kind) -> Manifest {
        let mut e = Experiment::new(self.field, self.degree, kind);
        e.mode = match self.mode {
            ModeArg::All => Mode::All,
            ModeArg::Smooth => Mode::Smooth,
        };
        e.strategy = match self.sample {
            Some(n) => StrategySpec::Sample { n, seed: self.seed },
            None => StrategySpec::Exhaustive { budget: self.budget },
        };
        let mut m = Manifest::new(e);
        m.execution.shards = self.shards;
        m.execution.out = self.out.clone();
        m.execution.resume = self.resume;
        m.execution.checkpoint_every = self.checkpoint_every;
        m
    }
}

// a closed pipe (e.g. `| head`) is not an error
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn execute(manifest: &Manifest, save: Option<&PathBuf>) -> Result<(), CliError> {
    manifest.validate()?;
    if let Some(path) = save {
        manifest.save(path)?;
    }
    let report = run(manifest)?;
    match &manifest.execution.out {
        Some(out) => {
            for path in report.write(out, &manifest.execution)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let doc = report.document(&manifest.execution);
            emit(&serde_json::to_string_pretty(&doc).expect("documents serialize"));
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Field {
            what: FieldCommand::Info { field },
        } => {
            let f = field.build().map_err(|e| CliError::InvalidManifest(e.to_string()))?;
            emit(&serde_json::to_string_pretty(&field_info(&f)).expect("values serialize"));
            Ok(())
        }
        Command::Dist(c) => execute(&c.manifest(Kind::Distribution), c.save_manifest.as_ref()),
        Command::Moments { common, k } => {
            let mut m = common.manifest(Kind::Moments);
            m.experiment.moments_k = k;
            execute(&m, common.save_manifest.as_ref())
        }
        Command::Sieve {
            common,
            z,
            target,
            r,
            max_degree,
        } => {
            let mut m = common.manifest(Kind::SieveVerify);
            m.experiment.sieve.z = z;
            m.experiment.sieve.target = target.into_iter().map(PointConstraint::from).collect();
            m.experiment.sieve.r = r;
            m.experiment.sieve.max_degree = max_degree;
            execute(&m, common.save_manifest.as_ref())
        }
        Command::SmoothCheck { common, oracle_max_e } => {
            let mut m = common.manifest(Kind::SmoothCrosscheck);
            m.experiment.oracle_max_e = oracle_max_e;
            execute(&m, common.save_manifest.as_ref())
        }
        Command::PropExact { common, max_degree } => {
            let mut m = common.manifest(Kind::PropositionExact);
            m.experiment.sieve.max_degree = max_degree;
            execute(&m, common.save_manifest.as_ref())
        }
        Command::Bounds { common, r_max } => {
            let mut m = common.manifest(Kind::Bounds);
            m.experiment.r_max = r_max;
            execute(&m, common.save_manifest.as_ref())
        }
        Command::Run {
            manifest,
            shards,
            out,
            resume,
        } => {
            let mut m = Manifest::load(&manifest)?;
            if let Some(s) = shards {
                m.execution.shards = s;
            }
            if out.is_some() {
                m.execution.out = out;
            }
            m.execution.resume |= resume;
            execute(&m, None)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
