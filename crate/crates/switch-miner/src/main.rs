//! Command-line entry point: discover models from logs, evaluate them,
//! generate logs by playout, check soundness, and convert between formats.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use switch_miner::conformance::evaluate;
use switch_miner::discovery::{discover, DiscoveryConfig};
use switch_miner::eventlog::{parse_csv, parse_xes, write_xes, Classifier, CsvColumns, EventLog};
use switch_miner::petrinet::{
    check_soundness, export_dot, export_pnml, import_pnml, translate, WorkflowNet,
};
use switch_miner::playout::{playout, PlayoutConfig, PlayoutMode};
use switch_miner::tree::{parse_tree, render_tree, tree_to_dot};
use switch_miner::{Error, Result};

#[derive(Parser)]
#[command(
    name = "switch-miner",
    version,
    about = "Process discovery with switch behaviours"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discover a process model from an event log
    Discover(DiscoverArgs),
    /// Evaluate a model against a log (fitness, precision, F-score, size, CFC)
    Eval(EvalArgs),
    /// Generate an event log from a process tree
    Playout(PlayoutArgs),
    /// Check the soundness of a workflow net
    Soundness(SoundnessArgs),
    /// Convert between tree, net, and log formats
    Convert(ConvertArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Name,
    #[value(name = "name+lifecycle")]
    NameLifecycle,
}

impl From<ClassifierArg> for Classifier {
    fn from(value: ClassifierArg) -> Classifier {
        match value {
            ClassifierArg::Name => Classifier::Name,
            ClassifierArg::NameLifecycle => Classifier::NamePlusLifecycle,
        }
    }
}

#[derive(Args)]
struct LogInput {
    /// Event log file (XES by default)
    #[arg(long)]
    input: PathBuf,
    /// Treat the input as CSV instead of XES
    #[arg(long)]
    csv: bool,
    /// XES event classifier
    #[arg(long, value_enum, default_value = "name")]
    classifier: ClassifierArg,
    /// CSV column holding the case identifier
    #[arg(long, default_value = "case")]
    case_column: String,
    /// CSV column holding the activity name
    #[arg(long, default_value = "activity")]
    activity_column: String,
    /// Optional CSV column holding the event timestamp
    #[arg(long)]
    timestamp_column: Option<String>,
}

impl LogInput {
    fn read(&self) -> Result<EventLog> {
        let file = fs::File::open(&self.input)?;
        if self.csv {
            let columns = CsvColumns {
                case: self.case_column.clone(),
                activity: self.activity_column.clone(),
                timestamp: self.timestamp_column.clone(),
            };
            parse_csv(file, &columns)
        } else {
            let outcome = parse_xes(file, self.classifier.into())?;
            if outcome.skipped_events > 0 {
                eprintln!(
                    "warning: skipped {} unclassifiable events",
                    outcome.skipped_events
                );
            }
            Ok(outcome.log)
        }
    }
}

#[derive(Args)]
struct DiscoverArgs {
    #[command(flatten)]
    log: LogInput,
    /// Drop traces containing a switch adjacency before splitting
    #[arg(long)]
    delete_switch_traces: bool,
    /// Relative directly-follows edge frequency threshold in [0, 1]
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Use the plain exclusive choice cut without switch detection
    #[arg(long)]
    disable_switch_cut: bool,
    /// Output PNML model path
    #[arg(long)]
    out: PathBuf,
    /// Also write the process tree in text form
    #[arg(long)]
    tree_out: Option<PathBuf>,
    /// Also write a DOT rendering of the net
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    log: LogInput,
    /// PNML model to evaluate
    #[arg(long)]
    model: PathBuf,
    /// Write the report as JSON
    #[arg(long)]
    report: Option<PathBuf>,
    /// State budget for alignment and soundness search
    #[arg(long, default_value_t = 1_000_000)]
    state_bound: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Args)]
struct PlayoutArgs {
    /// Process tree file in text form
    #[arg(long)]
    tree: PathBuf,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    #[arg(long, default_value_t = 10)]
    max_length: usize,
    /// Number of traces to sample (sample mode)
    #[arg(long, default_value_t = 100)]
    n_traces: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output XES log path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SoundnessArgs {
    /// PNML model to analyse
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    state_bound: usize,
}

#[derive(Args)]
struct ConvertArgs {
    /// Process tree file to convert
    #[arg(long, conflicts_with = "model")]
    tree: Option<PathBuf>,
    /// PNML model file to convert
    #[arg(long)]
    model: Option<PathBuf>,
    /// Write the result as PNML (tree input only)
    #[arg(long)]
    pnml_out: Option<PathBuf>,
    /// Write the result as DOT
    #[arg(long)]
    dot_out: Option<PathBuf>,
}

fn load_net(path: &Path) -> Result<WorkflowNet> {
    import_pnml(&fs::read(path)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Discover(args) => {
            let log = args.log.read()?;
            let config = DiscoveryConfig {
                delete_switch_traces: args.delete_switch_traces,
                noise_threshold: args.noise,
                enable_switch_cut: !args.disable_switch_cut,
                ..DiscoveryConfig::default()
            };
            let tree = discover(&log, &config)?;
            let net = translate(&tree)?;
            fs::write(&args.out, export_pnml(&net)?)?;
            if let Some(path) = &args.tree_out {
                fs::write(path, format!("{}\n", render_tree(&tree)))?;
            }
            if let Some(path) = &args.dot {
                fs::write(path, export_dot(&net))?;
            }
            println!("{}", render_tree(&tree));
        }
        Command::Eval(args) => {
            let log = args.log.read()?;
            let net = load_net(&args.model)?;
            let report = evaluate(&log, &net, args.state_bound);
            if let Some(path) = &args.report {
                let json = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Internal(e.to_string()))?;
                fs::write(path, json + "\n")?;
            }
            println!("fitness    {:.4}", report.fitness);
            println!("precision  {:.4}", report.precision);
            println!("f-score    {:.4}", report.f_score);
            println!("size       {}", report.size);
            println!("cfc        {}", report.cfc);
            println!("sound      {}", report.sound);
            if report.unaligned_traces > 0 {
                eprintln!(
                    "warning: {} traces exceeded the alignment budget",
                    report.unaligned_traces
                );
            }
        }
        Command::Playout(args) => {
            let text = fs::read_to_string(&args.tree)?;
            let tree = parse_tree(text.trim())?;
            let mode = match args.mode {
                ModeArg::Exhaustive => PlayoutMode::Exhaustive {
                    max_length: args.max_length,
                },
                ModeArg::Sample => PlayoutMode::Sample {
                    n_traces: args.n_traces,
                    max_length: args.max_length,
                    seed: args.seed,
                },
            };
            let outcome = playout(
                &tree,
                &PlayoutConfig {
                    mode,
                    ..PlayoutConfig::default()
                },
            )?;
            if outcome.partial {
                eprintln!("warning: playout budget exhausted; log may be incomplete");
            }
            let file = fs::File::create(&args.out)?;
            write_xes(&outcome.log, file)?;
            println!("{} traces written", outcome.log.traces.len());
        }
        Command::Soundness(args) => {
            let net = load_net(&args.model)?;
            let report = check_soundness(&net, args.state_bound);
            println!("sound               {}", report.is_sound);
            println!("safe                {}", report.safe);
            println!("proper completion   {}", report.proper_completion);
            println!("option to complete  {}", report.option_to_complete);
            println!("dead tasks          {:?}", report.dead_tasks);
            println!("states explored     {}", report.states_explored);
            if report.indeterminate {
                println!("verdict indeterminate: state bound reached");
            }
        }
        Command::Convert(args) => match (&args.tree, &args.model) {
            (Some(tree_path), None) => {
                let tree = parse_tree(fs::read_to_string(tree_path)?.trim())?;
                let net = translate(&tree)?;
                if let Some(path) = &args.pnml_out {
                    fs::write(path, export_pnml(&net)?)?;
                }
                if let Some(path) = &args.dot_out {
                    fs::write(path, tree_to_dot(&tree))?;
                }
                if args.pnml_out.is_none() && args.dot_out.is_none() {
                    return Err(Error::Config(
                        "convert needs --pnml-out or --dot-out".into(),
                    ));
                }
            }
            (None, Some(model_path)) => {
                let net = load_net(model_path)?;
                let Some(path) = &args.dot_out else {
                    return Err(Error::Config("convert --model needs --dot-out".into()));
                };
                fs::write(path, export_dot(&net))?;
            }
            _ => {
                return Err(Error::Config(
                    "convert needs exactly one of --tree or --model".into(),
                ))
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Internal(message)) => {
            eprintln!("internal error: {message}");
            ExitCode::from(2)
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(1)
        }
    }
}
