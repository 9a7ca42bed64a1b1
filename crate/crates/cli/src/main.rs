use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use udapp_core::demos::DemoKind;
use udapp_core::harness::{parse_trace, replay, verify, HarnessError, Session};
use udapp_core::interpreter::{evaluate, parse};
use udapp_core::persistence::{save_layout_file, write_atomic};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "udapp", version, about = "Headless driver for the udapp demos")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Calculator,
    Personaldata,
    Functions,
}

impl From<Demo> for DemoKind {
    fn from(d: Demo) -> Self {
        match d {
            Demo::Calculator => DemoKind::Calculator,
            Demo::Personaldata => DemoKind::PersonalData,
            Demo::Functions => DemoKind::Functions,
        }
    }
}

#[derive(clap::Args)]
struct Outputs {
    /// Layout file to load after building the demo.
    #[arg(long, value_name = "FILE")]
    layout: Option<PathBuf>,
    /// Write the final layout here.
    #[arg(long, value_name = "FILE")]
    save_layout: Option<PathBuf>,
    /// Write an SVG rendering of the final scene here.
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a demo, optionally load a layout, and print its scene hash.
    Demo {
        name: Demo,
        #[command(flatten)]
        out: Outputs,
    },
    /// Replay a JSON Lines trace against a demo and print the final hash.
    Replay {
        name: Demo,
        trace: PathBuf,
        #[command(flatten)]
        out: Outputs,
    },
    /// Evaluate an expression in x.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        at: f64,
    },
    /// Run the randomized invariant checks for a demo.
    Verify {
        name: Demo,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        sequences: usize,
        #[arg(long, default_value_t = 30)]
        gestures: usize,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("udapp: {msg}");
    ExitCode::from(code)
}

fn start(name: Demo, layout: Option<&Path>, base: &Path) -> Result<Session, ExitCode> {
    let mut session = Session::new(name.into()).with_base_dir(base);
    if let Some(path) = layout {
        session
            .load_layout_path(path)
            .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    }
    Ok(session)
}

fn finish(session: &Session, out: &Outputs) -> ExitCode {
    if let Some(path) = &out.save_layout {
        if let Err(e) = save_layout_file(path, &session.app.scene, &session.app.side_data()) {
            return fail(EXIT_USAGE, format!("{}: {e}", path.display()));
        }
    }
    if let Some(path) = &out.svg {
        if let Err(e) = write_atomic(path, session.svg().as_bytes()) {
            return fail(EXIT_USAGE, format!("{}: {e}", path.display()));
        }
    }
    println!("{}", session.hash());
    ExitCode::SUCCESS
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Cmd::Demo { name, out } => match start(name, out.layout.as_deref(), Path::new(".")) {
            Ok(session) => finish(&session, &out),
            Err(code) => code,
        },
        Cmd::Replay { name, trace, out } => {
            let text = match fs::read_to_string(&trace) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", trace.display())),
            };
            let events = match parse_trace(&text) {
                Ok(ev) => ev,
                Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", trace.display())),
            };
            let base = trace.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut session = match start(name, out.layout.as_deref(), base) {
                Ok(s) => s,
                Err(code) => return code,
            };
            match replay(&mut session, &events) {
                Ok(_) => finish(&session, &out),
                Err(e @ HarnessError::Event { .. }) => fail(EXIT_FAILURE, e),
                Err(e) => fail(EXIT_USAGE, e),
            }
        }
        Cmd::Eval { expr, at } => match parse(&expr) {
            Ok(ast) => {
                println!("{}", evaluate(&ast, at));
                ExitCode::SUCCESS
            }
            Err(e) => fail(EXIT_USAGE, e),
        },
        Cmd::Verify {
            name,
            seed,
            sequences,
            gestures,
        } => match verify(name.into(), seed, sequences, gestures) {
            Ok(report) => {
                println!("{report}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(EXIT_FAILURE, e),
        },
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
