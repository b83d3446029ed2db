//! `strom`: analyze a specification or run it as a monitor over a trace.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use strom_core::engine::{Event, Monitor, MonitorError, Verbosity, Verdict};
use strom_core::time::Timestamp;
use strom_core::trace::{self, ReadOptions, TraceError, TraceReader, VerdictWriter};
use strom_core::CheckedSpec;

const EXIT_REJECTED: u8 = 1;
const EXIT_TRACE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "strom", version, about = "Stream specification analyzer and monitor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a specification and print its types, pacing and memory bounds.
    Analyze {
        /// Specification file.
        spec: PathBuf,
        /// Print the dependency graph in DOT format instead.
        #[arg(long)]
        dot: bool,
    },
    /// Run a specification over a trace.
    Monitor(MonitorArgs),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["offline", "online"]))]
struct MonitorArgs {
    /// Specification file.
    spec: PathBuf,
    /// Replay a CSV file. The time column format; only `relative`
    /// (seconds since monitor start) is supported.
    #[arg(long, value_name = "FORMAT", requires = "csv_in",
          value_parser = PossibleValuesParser::new(trace::time_formats().names()))]
    offline: Option<String>,
    /// Trace file for offline mode.
    #[arg(long, value_name = "FILE")]
    csv_in: Option<PathBuf>,
    /// Read CSV rows from stdin as they arrive.
    #[arg(long, requires = "stdin")]
    online: bool,
    /// Input source for online mode (required with --online).
    #[arg(long)]
    stdin: bool,
    /// Print trigger verdicts only, or every output value as well.
    #[arg(long, value_enum, default_value_t = VerbosityArg::Triggers)]
    verbosity: VerbosityArg,
    /// Allow trace columns that are not inputs, and inputs without a column.
    #[arg(long)]
    lax: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerbosityArg {
    Triggers,
    AllStreams,
}

impl From<VerbosityArg> for Verbosity {
    fn from(v: VerbosityArg) -> Self {
        match v {
            VerbosityArg::Triggers => Verbosity::Triggers,
            VerbosityArg::AllStreams => Verbosity::AllStreams,
        }
    }
}

enum Failure {
    Rejected,
    Trace(String),
    Internal(String),
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        Failure::Trace(e.to_string())
    }
}

impl From<MonitorError> for Failure {
    fn from(e: MonitorError) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Trace(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { spec, dot } => analyze(&spec, dot),
        Command::Monitor(args) => monitor(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(EXIT_REJECTED),
        Err(Failure::Trace(msg)) => {
            eprintln!("strom: {msg}");
            ExitCode::from(EXIT_TRACE)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("strom: internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

/// Reads and checks a spec, printing diagnostics to stderr on rejection.
fn load(path: &Path) -> Result<CheckedSpec, Failure> {
    let source = fs::read_to_string(path)
        .map_err(|e| Failure::Trace(format!("{}: {e}", path.display())))?;
    strom_core::check(&source).map_err(|diags| {
        let file = path.display().to_string();
        for d in &diags {
            eprintln!("{}", d.render(&file, &source));
        }
        Failure::Rejected
    })
}

fn analyze(path: &Path, dot: bool) -> Result<(), Failure> {
    let checked = load(path)?;
    let text = if dot {
        checked.graph.to_dot()
    } else {
        checked.summary()
    };
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn monitor(args: &MonitorArgs) -> Result<(), Failure> {
    let checked = Arc::new(load(&args.spec)?);
    let opts = ReadOptions {
        lax: args.lax,
        require_time: args.offline.is_some(),
        format: args.offline.clone().unwrap_or_else(|| "relative".into()),
    };
    let monitor = Monitor::with_verbosity(checked.clone(), Timestamp::ZERO, args.verbosity.into());
    let out = VerdictWriter::new(BufWriter::new(io::stdout().lock()));
    if let Some(path) = &args.csv_in {
        let file = fs::File::open(path)
            .map_err(|e| Failure::Trace(format!("{}: {e}", path.display())))?;
        let reader = TraceReader::new(io::BufReader::new(file), &checked.spec, &opts)?;
        offline(reader, monitor, out)
    } else {
        let reader = TraceReader::new(io::stdin(), &checked.spec, &opts)?;
        online(reader, monitor, out)
    }
}

fn emit<W: Write>(out: &mut VerdictWriter<W>, verdicts: &[Verdict]) -> Result<(), Failure> {
    for v in verdicts {
        out.write(v)?;
    }
    Ok(())
}

fn offline<R: io::Read, W: Write>(
    reader: TraceReader<R>,
    mut monitor: Monitor,
    mut out: VerdictWriter<W>,
) -> Result<(), Failure> {
    for event in reader {
        let event = event?;
        emit(&mut out, &monitor.accept_event(&event)?)?;
    }
    emit(&mut out, &monitor.finish()?)?;
    out.flush()?;
    Ok(())
}

/// Rows are parsed on a reader thread. Rows without a time column are
/// stamped on arrival here, so stamps and deadlines share one clock.
fn online<R: io::Read + Send + 'static, W: Write>(
    mut reader: TraceReader<R>,
    mut monitor: Monitor,
    mut out: VerdictWriter<W>,
) -> Result<(), Failure> {
    let wall = !reader.has_time();
    let (tx, rx) = mpsc::channel::<Result<Event, TraceError>>();
    thread::spawn(move || {
        while let Some(row) = reader.next_event_at(|| Timestamp::ZERO) {
            let stop = row.is_err();
            if tx.send(row).is_err() || stop {
                break;
            }
        }
    });
    let start = Instant::now();
    let now = || Timestamp(start.elapsed().as_nanos() as u64);
    loop {
        let received = match monitor.next_deadline().filter(|_| wall) {
            Some(deadline) => {
                let wait = Duration::from_nanos(deadline.0.saturating_sub(now().0));
                rx.recv_timeout(wait)
            }
            None => rx.recv().map_err(|_| RecvTimeoutError::Disconnected),
        };
        match received {
            Ok(event) => {
                let mut event = event?;
                if wall {
                    event.time = now();
                }
                emit(&mut out, &monitor.accept_event(&event)?)?;
            }
            Err(RecvTimeoutError::Timeout) => {
                emit(&mut out, &monitor.advance_time(now())?)?;
            }
            Err(RecvTimeoutError::Disconnected) => break,
        }
        out.flush()?;
    }
    emit(&mut out, &monitor.finish()?)?;
    out.flush()?;
    Ok(())
}
