//! `afflang`: check, run, trace and denote `.afl` programs, enumerate
//! values, and run the metatheory suites.
//!
//! Exit codes: 0 success, 1 type error or failed verification, 2 out of
//! fuel or bottom, 64 usage error, 65 syntax error or incomplete program,
//! 66 unreadable input.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use afflang_core::denote::{denote_term, sem_elems, FuelModel, Outcome};
use afflang_core::frontend::{parse_program, parse_type_in, Abbreviation, Printer, SourceProgram};
use afflang_core::interp::{run, trace, Configuration, RunOutcome};
use afflang_core::oracle::{verify, Suite, VerifyOptions};
use afflang_core::{Checker, Type, ValueAssignment, VarContext};

const EXIT_TYPE: u8 = 1;
const EXIT_FUEL: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;
const EXIT_IO: u8 = 66;

#[derive(Parser)]
#[command(name = "afflang", version, about = "Affine first-order language with inductive types")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    /// One unit per loop iteration.
    Unfoldings,
    /// One unit per reduction step.
    Steps,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck a program and print its input and output contexts.
    Check { file: PathBuf },
    /// Execute a program with the small-step interpreter.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
    },
    /// Print every configuration visited while executing.
    Trace {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the denotation of a program on its inputs.
    Denote {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        #[arg(long, value_enum, default_value_t = Model::Unfoldings)]
        fuel_model: Model,
    },
    /// Run the property suites.
    Verify {
        /// Suite to run; repeatable. Runs every suite when omitted.
        #[arg(long)]
        suite: Vec<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        size_bound: usize,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the values of a closed type up to a size bound.
    Enumerate {
        /// Type in concrete syntax; `Nat` and `List(A)` are predefined.
        #[arg(name = "TYPE")]
        ty: String,
        #[arg(long, default_value_t = 12)]
        size_bound: usize,
        /// Take type abbreviations from this program instead.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

type CliResult = Result<u8, Failure>;

fn read_source(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::new(EXIT_IO, format!("cannot read standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SourceProgram, Failure> {
    let src = read_source(path)?;
    parse_program(&src).map_err(|e| Failure::new(EXIT_PARSE, format!("{}:{e}", path.display())))
}

fn declared(program: &SourceProgram) -> Result<VarContext, Failure> {
    program.declared_context().map_err(|e| Failure::new(EXIT_TYPE, format!("error: {e}")))
}

/// Typechecks the program and returns `(Γ, Σ)`.
fn typecheck(path: &Path, program: &SourceProgram) -> Result<(VarContext, VarContext), Failure> {
    let gamma = declared(program)?;
    let checker = Checker::default();
    let result = match program.initial_store() {
        Some(store) => checker.check_declared_configuration(&gamma, &program.term, &store),
        None => checker.check_term(&gamma, &program.term),
    };
    result.map(|sigma| (gamma, sigma)).map_err(|e| Failure::new(EXIT_TYPE, format!("{}:{e}", path.display())))
}

fn configuration(path: &Path, program: &SourceProgram) -> Result<(VarContext, Configuration), Failure> {
    let (gamma, _) = typecheck(path, program)?;
    let store = program.initial_store().ok_or_else(|| {
        let missing = program.inputs.iter().find(|i| i.value.is_none()).map(|i| i.name.clone()).unwrap_or_default();
        Failure::new(EXIT_PARSE, format!("{}: input `{missing}` needs a value to execute", path.display()))
    })?;
    Ok((gamma, Configuration::new(program.term.clone(), store)))
}

fn print_store(out: &mut impl Write, printer: &Printer, store: &ValueAssignment) -> io::Result<()> {
    for (name, value) in store.sorted() {
        writeln!(out, "{name} = {}", printer.value(value))?;
    }
    Ok(())
}

fn io_failure(e: io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("cannot write output: {e}"))
}

fn default_abbreviations() -> Vec<Abbreviation> {
    vec![
        Abbreviation { name: "Nat".into(), params: vec![], body: Type::nat() },
        Abbreviation {
            name: "List".into(),
            params: vec!["A".into()],
            body: Type::mu("Y", Type::sum(Type::Unit, Type::tensor(Type::var("A"), Type::var("Y")))),
        },
    ]
}

fn execute(cmd: Command) -> CliResult {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cmd {
        Command::Check { file } => {
            let program = load(&file)?;
            let (gamma, sigma) = typecheck(&file, &program)?;
            let p = Printer::for_program(&program);
            writeln!(out, "ok: {} -> {}", p.context(&gamma), p.context(&sigma)).map_err(io_failure)?;
            Ok(0)
        }
        Command::Run { file, fuel } => {
            let program = load(&file)?;
            let (_, c) = configuration(&file, &program)?;
            let p = Printer::for_program(&program);
            match run(&c, fuel) {
                RunOutcome::Terminated { store, .. } => {
                    print_store(&mut out, &p, &store).map_err(io_failure)?;
                    Ok(0)
                }
                RunOutcome::OutOfFuel(_) => {
                    writeln!(out, "OUT_OF_FUEL").map_err(io_failure)?;
                    Ok(EXIT_FUEL)
                }
                RunOutcome::Stuck { reason, .. } => Err(Failure::new(EXIT_TYPE, format!("stuck: {reason}"))),
            }
        }
        Command::Trace { file, fuel, format } => {
            let program = load(&file)?;
            let (_, c) = configuration(&file, &program)?;
            let t = trace(&c, fuel);
            let text = match format {
                Format::Text => t.to_text(),
                Format::Records => t.to_records(),
            };
            out.write_all(text.as_bytes()).map_err(io_failure)?;
            Ok(if t.terminated() { 0 } else { EXIT_FUEL })
        }
        Command::Denote { file, fuel, fuel_model } => {
            let program = load(&file)?;
            let (gamma, c) = configuration(&file, &program)?;
            let d =
                denote_term(&gamma, &c.term).map_err(|e| Failure::new(EXIT_TYPE, format!("{}:{e}", file.display())))?;
            let model = match fuel_model {
                Model::Unfoldings => FuelModel::Unfoldings,
                Model::Steps => FuelModel::OperationalSteps,
            };
            match d.eval(&c.store, fuel, model) {
                Outcome::Defined(store) => {
                    print_store(&mut out, &Printer::for_program(&program), &store).map_err(io_failure)?;
                    Ok(0)
                }
                Outcome::Bottom => {
                    writeln!(out, "BOTTOM").map_err(io_failure)?;
                    Ok(EXIT_FUEL)
                }
            }
        }
        Command::Verify { suite, seed, size_bound, fuel, format } => {
            if size_bound == 0 {
                return Err(Failure::new(EXIT_USAGE, "error: --size-bound must be at least 1"));
            }
            let suites = if suite.is_empty() { Suite::ALL.to_vec() } else { suite };
            let opts = VerifyOptions { seed, size_bound, fuel, ..VerifyOptions::default() };
            let report = verify(&suites, &opts);
            let text = match format {
                Format::Text => report.to_text(),
                Format::Records => report.to_records(),
            };
            out.write_all(text.as_bytes()).map_err(io_failure)?;
            Ok(if report.passed() { 0 } else { EXIT_TYPE })
        }
        Command::Enumerate { ty, size_bound, file } => {
            let abbreviations = match &file {
                Some(f) => load(f)?.abbreviations,
                None => default_abbreviations(),
            };
            let parsed =
                parse_type_in(&ty, &abbreviations).map_err(|e| Failure::new(EXIT_PARSE, format!("<type>:{e}")))?;
            if let Some(var) = parsed.free_vars().into_iter().next() {
                return Err(Failure::new(EXIT_TYPE, format!("error: type has free variable `{var}`")));
            }
            let mut printer = Printer::sugared();
            for a in abbreviations.iter().filter(|a| a.params.is_empty()) {
                printer = printer.with_abbreviation(a.name.clone(), a.body.clone());
            }
            for v in sem_elems(&parsed, size_bound) {
                writeln!(out, "{}", printer.value(&v)).map_err(io_failure)?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
