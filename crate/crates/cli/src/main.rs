//! Command-line front end for the farey-trees library.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use farey_trees::export::{self, Format};
use farey_trees::terminal::DEFAULT_ENUMERATION_GUARD;
use farey_trees::tree::DEFAULT_MAX_VERTICES;
use farey_trees::verify::DEFAULT_LSHAPE_MAX_SUM;
use farey_trees::{
    build_tree, decompress, delta, delta_one_sided, enumerate_e_lshapes, farey_intervals, farey_sequence,
    ranking_table, suranyi_terminal, verify, BuildOptions, Error, ExtendedRational, FareyVertex, MemoryMode, Side,
    TerminalPair, TreeKind, VerifyMode, VerifyOptions,
};

/// Heights above this need `--yes-large`.
const LARGE_HEIGHT: u32 = 300;

#[derive(Parser)]
#[command(
    name = "farey-trees",
    version,
    about = "Farey intervals, terminal pairs and Young tables as trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the terms of G_{m,n} in increasing order.
    Seq { m: u32, n: u32 },
    /// Print the open intervals between adjacent terms of G_{m,n}.
    Intervals { m: u32, n: u32 },
    /// Print the ranking table of size (m, n) at slope p/q, top row first.
    Table {
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        xi: ExtendedRational,
        #[arg(long)]
        json: bool,
    },
    /// Print tau(m,1) - tau(1,n) at slope p/q, or a one-sided limit.
    Delta {
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        xi: ExtendedRational,
        #[arg(long, conflicts_with = "right")]
        left: bool,
        #[arg(long)]
        right: bool,
    },
    /// Map the interval (a, b) of G_{m,n} to its corner pair "s t m+1 n+1".
    Suranyi {
        a: ExtendedRational,
        b: ExtendedRational,
        m: u32,
        n: u32,
    },
    /// Recover the L-shape of a terminal pair, as JSON.
    Decompress { s: u64, t: u64, m: u32, n: u32 },
    /// Build, export or verify trees.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Brute-force reference computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum TreeCommand {
    /// Build one tree and write it as JSON or DOT.
    Build(BuildArgs),
    /// Check that the three trees agree up to a height.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Enumerate every L-shape of size (m, n) satisfying the difference equations.
    Lshapes {
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_GUARD, value_parser = clap::value_parser!(u32).range(2..))]
        guard: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Farey,
    Terminal,
    Young,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "theorem1")]
    LevelSets,
    Isomorphism,
    #[value(name = "corollary2")]
    LShapes,
    All,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    height: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    #[arg(long)]
    yes_large: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 60)]
    height: u32,
    #[arg(long, value_enum, default_value = "all")]
    mode: ModeArg,
    /// Keep only two adjacent levels in memory.
    #[arg(long, conflicts_with = "resident")]
    stream: bool,
    /// Build whole trees before checking.
    #[arg(long)]
    resident: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Largest m + n for the L-shape enumeration.
    #[arg(long, default_value_t = DEFAULT_LSHAPE_MAX_SUM)]
    lshape_max_sum: u32,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_GUARD, value_parser = clap::value_parser!(u32).range(2..))]
    guard: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    #[arg(long)]
    yes_large: bool,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

enum Failure {
    /// The checked statement does not hold.
    Verification,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            match text.lines().find(|l| l.starts_with("error:")) {
                Some(line) => eprintln!("{line}"),
                None => eprintln!("error: missing subcommand or argument, see --help"),
            }
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(why)) => {
            let _ = out.flush();
            eprintln!("error: {}", why.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Seq { m, n } => {
            let terms: Vec<String> = farey_sequence(m, n).terms().iter().map(ToString::to_string).collect();
            writeln!(out, "{}", terms.join(" "))?;
        }
        Command::Intervals { m, n } => {
            for v in farey_intervals(m, n) {
                writeln!(out, "{} {}", v.a, v.b)?;
            }
        }
        Command::Table { m, n, xi, json } => {
            let table = ranking_table(m, n, xi)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&table).expect("table serializes"))?;
            } else {
                let width = (m as u64 * n as u64).to_string().len();
                for row in table.rows.iter().rev() {
                    let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
                    writeln!(out, "{}", cells.join(" "))?;
                }
            }
        }
        Command::Delta { m, n, xi, left, right } => {
            let value = match (left, right) {
                (true, _) => delta_one_sided(m, n, xi, Side::Left)?,
                (_, true) => delta_one_sided(m, n, xi, Side::Right)?,
                _ => delta(m, n, xi)?,
            };
            writeln!(out, "{value}")?;
        }
        Command::Suranyi { a, b, m, n } => {
            let v = FareyVertex::new(a, b, m, n)?;
            let TerminalPair { s, t, m, n } = suranyi_terminal(&v)?;
            writeln!(out, "{s} {t} {m} {n}")?;
        }
        Command::Decompress { s, t, m, n } => {
            let shape = decompress(&TerminalPair::new(s, t, m, n)?)?;
            writeln!(out, "{}", serde_json::to_string(&shape).expect("L-shape serializes"))?;
        }
        Command::Tree(TreeCommand::Build(args)) => build(args, out)?,
        Command::Tree(TreeCommand::Verify(args)) => check(args, out)?,
        Command::Oracle(OracleCommand::Lshapes { m, n, guard }) => {
            for shape in enumerate_e_lshapes(m, n, guard)? {
                writeln!(
                    out,
                    "{} {}",
                    serde_json::to_string(&shape).expect("L-shape serializes"),
                    shape.terminal_pair()
                )?;
            }
        }
    }
    Ok(())
}

fn guard_height(height: u32, yes_large: bool) -> Result<(), Failure> {
    if height > LARGE_HEIGHT && !yes_large {
        return Err(Failure::Usage(format!(
            "height {height} is above {LARGE_HEIGHT}; pass --yes-large to run it"
        )));
    }
    Ok(())
}

fn build(args: BuildArgs, out: &mut impl Write) -> Result<(), Failure> {
    guard_height(args.height, args.yes_large)?;
    let kind = match args.kind {
        KindArg::Farey => TreeKind::Farey,
        KindArg::Terminal => TreeKind::Terminal,
        KindArg::Young => TreeKind::Young,
    };
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Dot => Format::Dot,
    };
    let options = BuildOptions {
        max_vertices: Some(args.max_vertices),
        jobs: args.jobs as usize,
    };
    let tree = build_tree(kind, args.height, &options)?;
    match args.output {
        Some(path) => {
            let mut file =
                BufWriter::new(File::create(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?);
            export::write_tree(&tree, format, &mut file)?;
            file.flush()?;
        }
        None => export::write_tree(&tree, format, out)?,
    }
    Ok(())
}

fn check(args: VerifyArgs, out: &mut impl Write) -> Result<(), Failure> {
    guard_height(args.height, args.yes_large)?;
    let mode = match args.mode {
        ModeArg::LevelSets => VerifyMode::LevelSets,
        ModeArg::Isomorphism => VerifyMode::Isomorphism,
        ModeArg::LShapes => VerifyMode::LShapes,
        ModeArg::All => VerifyMode::All,
    };
    let memory = match (args.stream, args.resident) {
        (true, _) => Some(MemoryMode::Streaming),
        (_, true) => Some(MemoryMode::Resident),
        _ => None,
    };
    let options = VerifyOptions {
        mode,
        memory,
        jobs: args.jobs as usize,
        lshape_max_sum: args.lshape_max_sum,
        guard: args.guard,
        max_vertices: Some(args.max_vertices),
    };
    let report = verify(args.height, &options)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?;
    } else {
        writeln!(out, "{report}")?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
