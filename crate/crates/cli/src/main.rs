//! `matchfab`: generate graphs, verify closed forms against exact solvers,
//! and tabulate per-generation reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matchfab_core::format::{graph_to_json, write_dot, write_edge_list, write_orientation};
use matchfab_core::generators::{Generator, DEFAULT_GENERATION_CAP};
use matchfab_core::verify::{report_row, verify, Caps, ReportRow, Verdict};
use matchfab_core::{Error, Family};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "matchfab", version, about = "Exact matching combinatorics of self-similar graph families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one graph of a family.
    Generate(GenerateArgs),
    /// Check every closed form for one generation against exact computation.
    Verify(VerifyArgs),
    /// Tabulate closed-form and empirical values over a range of generations.
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Fractal,
    Nonfractal,
    Sierpinski,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Fractal => Family::Fractal,
            FamilyArg::Nonfractal => Family::Nonfractal,
            FamilyArg::Sierpinski => Family::Sierpinski,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Edgelist,
    Dot,
    Table,
}

#[derive(Args)]
struct CapArgs {
    /// Edge budget for exhaustive matching enumeration.
    #[arg(long, default_value_t = Caps::default().enum_edges, value_parser = positive_usize)]
    enum_cap: usize,
    /// Largest generation for determinant computations.
    #[arg(long, default_value_t = Caps::default().det_generation, value_parser = clap::value_parser!(u32).range(1..))]
    det_cap: u32,
    /// Cycle budget for nice-cycle enumeration.
    #[arg(long, default_value_t = Caps::default().cycle_count, value_parser = positive_usize)]
    cycle_cap: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            enum_edges: self.enum_cap,
            det_generation: self.det_cap,
            cycle_count: self.cycle_cap,
            ..Caps::default()
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    g: u32,
    /// One of json, edgelist, dot.
    #[arg(long, value_enum, default_value = "edgelist")]
    format: Format,
    /// Also write the orientation to `<out>.orient` (nonfractal only).
    #[arg(long, requires = "out")]
    oriented: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    g: u32,
    /// One of json, table.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    caps: CapArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// First generation.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    g: u32,
    /// Last generation.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    g_max: u32,
    /// One of json, table.
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[command(flatten)]
    caps: CapArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// A failure together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GenerationTooLarge { .. } | Error::CapExceeded { .. } => EXIT_CAP,
            Error::InvalidGeneration(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn generator() -> Result<Generator, Failure> {
    match std::env::var("MATCHFAB_MAX_G") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .map(Generator::with_cap)
            .map_err(|_| Failure::usage(format!("MATCHFAB_MAX_G must be a non-negative integer, got {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(Generator::with_cap(DEFAULT_GENERATION_CAP)),
        Err(e) => Err(Failure::usage(format!("MATCHFAB_MAX_G: {e}"))),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure {
            code: EXIT_FAIL,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let family = Family::from(args.family);
    if args.oriented && family != Family::Nonfractal {
        return Err(Failure::usage("--oriented applies to the nonfractal family only"));
    }
    let gen = generator()?;
    let graph = gen.family(family, args.g)?;
    let text = match args.format {
        Format::Edgelist => write_edge_list(&graph),
        Format::Dot => write_dot(&graph),
        Format::Json => to_json(&graph_to_json(&graph)),
        Format::Table => return Err(Failure::usage("generate writes json, edgelist or dot")),
    };
    emit(args.out.as_deref(), &text)?;
    if args.oriented {
        let og = gen.nonfractal_oriented(args.g)?;
        let out = args.out.as_ref().expect("clap enforces --out");
        let mut sidecar = out.clone().into_os_string();
        sidecar.push(".orient");
        emit(Some(Path::new(&sidecar)), &write_orientation(&og))?;
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let gen = generator()?;
    let report = verify(&gen, args.family.into(), args.g, &args.caps.caps())?;
    let text = match args.format {
        Format::Json => to_json(&report),
        Format::Table => {
            let mut s = String::new();
            for c in &report.checks {
                writeln!(s, "{:<8} {}  expected={} observed={}", c.verdict.to_string(), c.name, c.expected, c.observed).unwrap();
            }
            s
        }
        _ => return Err(Failure::usage("verify writes json or table")),
    };
    emit(args.out.as_deref(), &text)?;
    for c in report.checks.iter().filter(|c| c.verdict != Verdict::Pass) {
        eprintln!("{}: {}", c.verdict, c.name);
    }
    Ok(if report.failed() {
        EXIT_FAIL
    } else if report.skipped() {
        EXIT_CAP
    } else {
        0
    })
}

fn cell(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("-")
}

fn table(rows: &[ReportRow]) -> String {
    let header = [
        "g", "N", "E", "nu", "nu_solver", "count", "count_empirical", "entropy", "mu", "mu_empirical", "r",
        "r_empirical",
    ];
    let mut s = header.join("\t");
    s.push('\n');
    for r in rows {
        let cols = [
            r.g.to_string(),
            r.n.clone(),
            r.e.clone(),
            r.matching_number.clone(),
            r.matching_number_solver.map_or("-".into(), |v| v.to_string()),
            r.count.clone(),
            cell(&r.count_empirical).to_string(),
            r.entropy.map_or("-".into(), |z| format!("{z:.6}")),
            cell(&r.mu).to_string(),
            cell(&r.mu_empirical).to_string(),
            cell(&r.pearson).to_string(),
            cell(&r.pearson_empirical).to_string(),
        ];
        s.push_str(&cols.join("\t"));
        s.push('\n');
    }
    s
}

fn cmd_report(args: &ReportArgs) -> Result<u8, Failure> {
    if args.g_max < args.g {
        return Err(Failure::usage(format!("--g-max {} is below --g {}", args.g_max, args.g)));
    }
    let gen = generator()?;
    if args.g_max > gen.cap {
        return Err(Error::GenerationTooLarge {
            requested: args.g_max,
            cap: gen.cap,
        }
        .into());
    }
    let caps = args.caps.caps();
    let rows = (args.g..=args.g_max)
        .map(|g| report_row(&gen, args.family.into(), g, &caps))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match args.format {
        Format::Json => to_json(&rows),
        Format::Table => table(&rows),
        _ => return Err(Failure::usage("report writes json or table")),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
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
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
