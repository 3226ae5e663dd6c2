//! Command-line front end: set-algebra calculator, filter builder and
//! verifier, search operators, ultralimit runner, term tools, and the
//! elimination pipeline.
//!
//! Machine-readable JSON goes to stdout, diagnostics to stderr.  Exit codes:
//! 0 success, 1 usage error, 2 domain error (with a structured error object
//! on stderr).  Identical inputs, config, and seed produce identical output
//! bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use upfilter::termlang::{
    collect_usites, eval_applied, eval_closed_nat, parse_term, typecheck, Oracles, Term,
};
use upfilter::{
    eliminate, k_prime, mu_via_filter, subsequence_witness, ultralimit, Algebra, Config,
    PartialFilter, SearchableFn, TieBreak, UPSeq, UPSet,
};

#[derive(Parser)]
#[command(name = "upfilter", version, about = "Partial ultrafilters on ultimately periodic sets")]
struct Cli {
    #[command(flatten)]
    config_args: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to a JSON config file; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    tiebreak: Option<TieBreakArg>,
    /// Seed for sampled verification.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Step budget for term evaluation.
    #[arg(long, global = true)]
    fuel: Option<u64>,
    /// Maximal number of algebra generators.
    #[arg(long, global = true)]
    gen_cap: Option<usize>,
    /// Maximal dyadic precision.
    #[arg(long, global = true)]
    k_max: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    Bit0,
    ComplementFirst,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on ultimately periodic sets.
    #[command(subcommand)]
    Upset(UpsetCmd),
    /// Finitely generated set algebras and their atoms.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Partial ultrafilter construction and verification.
    #[command(subcommand)]
    Filter(FilterCmd),
    /// Search operators.
    #[command(subcommand)]
    Mu(MuCmd),
    /// Ultralimit of an eventually periodic sequence.
    Ultralimit {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        precision: u32,
        /// Starting filter (default: the trivial filter).
        #[arg(long)]
        filter: Option<PathBuf>,
    },
    /// Term tools.
    #[command(subcommand)]
    Term(TermCmd),
    /// Staged replacement of the ultrafilter constant in a term.
    Eliminate {
        /// Term file or inline expression.
        #[arg(long)]
        term: String,
        /// Comma-separated numeral assignments, e.g. `x=3,y=5`.
        #[arg(long, default_value = "")]
        inputs: String,
        /// Where to write the full trace (JSON).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum UpsetCmd {
    Member { set: PathBuf, n: u64 },
    Complement { set: PathBuf },
    Intersect { a: PathBuf, b: PathBuf },
    Union { a: PathBuf, b: PathBuf },
    Equals { a: PathBuf, b: PathBuf },
    Subset { a: PathBuf, b: PathBuf },
    /// The (k+1)-st smallest element (0-based).
    Kth { set: PathBuf, k: u64 },
    /// Least element strictly above n.
    Above { set: PathBuf, n: u64 },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Span an algebra from a JSON list of generators.
    Span { generators: PathBuf },
    /// Print the atom of every branch word.
    Atoms { generators: PathBuf },
    /// Check the partition property pointwise and symbolically.
    Verify {
        generators: PathBuf,
        #[arg(long, default_value_t = 256)]
        bound: u64,
    },
}

#[derive(Subcommand)]
enum FilterCmd {
    /// The filter on the trivial algebra.
    New,
    /// Extend a filter by the generators in a JSON list.
    Extend { filter: PathBuf, generators: PathBuf },
    /// Check the relativized ultrafilter clauses.
    Verify { filter: PathBuf },
    /// Select the unique partition part belonging to the extended filter.
    Select { filter: PathBuf, parts: PathBuf },
    /// Index-set export over an enumeration of sets.
    Index {
        filter: PathBuf,
        #[arg(long = "enum")]
        enumeration: PathBuf,
    },
}

#[derive(Subcommand)]
enum MuCmd {
    /// Least zero of a type-1 term below the bound.
    Search {
        /// Function term (file or inline), e.g. `lam x:0. sub x 5`.
        #[arg(long)]
        f: String,
        #[arg(long)]
        bound: u64,
    },
    /// Filter-based search from a certified zero set.
    ViaFilter {
        #[arg(long)]
        zeros: PathBuf,
        #[arg(long)]
        filter: Option<PathBuf>,
    },
    /// Least element of a set strictly above n (0 when none).
    Kprime { n: u64, set: PathBuf },
}

#[derive(Subcommand)]
enum TermCmd {
    /// Parse and typecheck; print the type and its degree.
    Check { term: String },
    /// Evaluate a closed term, optionally against a filter oracle.
    Eval {
        term: String,
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// Numeral arguments applied before evaluation.
        #[arg(long, value_delimiter = ',')]
        args: Vec<u64>,
    },
    /// List the ultrafilter application sites in subterm order.
    Sites { term: String },
}

#[derive(Debug)]
enum CliError {
    Domain(upfilter::Error),
    Io(String),
}

impl From<upfilter::Error> for CliError {
    fn from(e: upfilter::Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with success status
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let config = match build_config(&cli.config_args) {
        Ok(c) => c,
        Err(e) => return report_error(e),
    };
    match run(cli.command, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(e),
    }
}

fn report_error(e: CliError) -> ExitCode {
    let object = match &e {
        CliError::Domain(err) => json!({
            "error": { "kind": err.kind(), "message": err.to_string() }
        }),
        CliError::Io(message) => json!({
            "error": { "kind": "Io", "message": message }
        }),
    };
    eprintln!("{object}");
    ExitCode::from(2)
}

fn build_config(args: &ConfigArgs) -> CliResult<Config> {
    let mut config = match &args.config {
        Some(path) => serde_json::from_str(&read_file(path)?)
            .map_err(|e| CliError::Io(format!("bad config file: {e}")))?,
        None => Config::default(),
    };
    if let Some(tb) = args.tiebreak {
        config.tiebreak = match tb {
            TieBreakArg::Bit0 => TieBreak::Bit0,
            TieBreakArg::ComplementFirst => TieBreak::ComplementFirst,
        };
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(fuel) = args.fuel {
        config.fuel = fuel;
    }
    if let Some(cap) = args.gen_cap {
        config.generator_cap = cap;
    }
    if let Some(k) = args.k_max {
        config.k_max = k;
    }
    config.validate()?;
    Ok(config)
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_upset(path: &Path) -> CliResult<UPSet> {
    load_json(path)
}

fn load_upsets(path: &Path) -> CliResult<Vec<UPSet>> {
    load_json(path)
}

fn load_filter(path: &Path) -> CliResult<PartialFilter> {
    load_json(path)
}

/// A term argument is a file path when one exists, otherwise inline text.
fn load_term(spec: &str) -> CliResult<Term> {
    let text = if Path::new(spec).is_file() {
        read_file(Path::new(spec))?
    } else {
        spec.to_string()
    };
    Ok(parse_term(&text)?)
}

fn emit<T: serde::Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serialization: {e}")))?;
    println!("{text}");
    Ok(())
}

fn run(command: Command, config: &Config) -> CliResult<()> {
    match command {
        Command::Upset(cmd) => run_upset(cmd),
        Command::Algebra(cmd) => run_algebra(cmd, config),
        Command::Filter(cmd) => run_filter(cmd, config),
        Command::Mu(cmd) => run_mu(cmd, config),
        Command::Ultralimit {
            seq,
            precision,
            filter,
        } => {
            let seq: UPSeq = load_json(&seq)?;
            let filter = match filter {
                Some(path) => load_filter(&path)?,
                None => PartialFilter::trivial(),
            };
            let (interval, trace, final_filter) = ultralimit(&seq, precision, &filter, config)?;
            let witness = subsequence_witness(&trace, &seq)?;
            let levels: Vec<_> = trace
                .levels
                .iter()
                .zip(&witness)
                .map(|(record, (g, x))| {
                    json!({
                        "level": record.level,
                        "chosen_cell": record.chosen_cell,
                        "cell": record.cell,
                        "witness_index": g,
                        "witness_value": upfilter::rat::format_rational(x),
                    })
                })
                .collect();
            emit(&json!({
                "config": config,
                "interval": interval,
                "levels": levels,
                "filter": final_filter,
            }))
        }
        Command::Term(cmd) => run_term(cmd, config),
        Command::Eliminate {
            term,
            inputs,
            trace,
        } => {
            let term = load_term(&term)?;
            let inputs = parse_inputs(&inputs)?;
            let (value, full_trace) = eliminate(&term, &inputs, config)?;
            if let Some(path) = trace {
                let text = serde_json::to_string_pretty(&full_trace)
                    .map_err(|e| CliError::Io(format!("serialization: {e}")))?;
                fs::write(&path, text + "\n")
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            emit(&json!({ "value": value }))
        }
    }
}

fn parse_inputs(text: &str) -> CliResult<BTreeMap<String, u64>> {
    let mut map = BTreeMap::new();
    for piece in text.split(',').filter(|p| !p.trim().is_empty()) {
        let Some((name, value)) = piece.split_once('=') else {
            return Err(CliError::Io(format!(
                "input `{piece}` is not of the form name=value"
            )));
        };
        let value: u64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Io(format!("input `{piece}` has a non-numeral value")))?;
        map.insert(name.trim().to_string(), value);
    }
    Ok(map)
}

fn run_upset(cmd: UpsetCmd) -> CliResult<()> {
    match cmd {
        UpsetCmd::Member { set, n } => emit(&load_upset(&set)?.member(n)),
        UpsetCmd::Complement { set } => emit(&load_upset(&set)?.complement()),
        UpsetCmd::Intersect { a, b } => emit(&load_upset(&a)?.intersect(&load_upset(&b)?)?),
        UpsetCmd::Union { a, b } => emit(&load_upset(&a)?.union(&load_upset(&b)?)?),
        UpsetCmd::Equals { a, b } => emit(&(load_upset(&a)? == load_upset(&b)?)),
        UpsetCmd::Subset { a, b } => emit(&load_upset(&a)?.subset(&load_upset(&b)?)),
        UpsetCmd::Kth { set, k } => emit(&load_upset(&set)?.kth_element(k)?),
        UpsetCmd::Above { set, n } => emit(&load_upset(&set)?.least_above(n)),
    }
}

fn run_algebra(cmd: AlgebraCmd, config: &Config) -> CliResult<()> {
    match cmd {
        AlgebraCmd::Span { generators } => {
            let algebra = Algebra::span_capped(load_upsets(&generators)?, config.generator_cap)?;
            emit(&json!({
                "generators": algebra.generators(),
                "atom_count": algebra.atom_count(),
            }))
        }
        AlgebraCmd::Atoms { generators } => {
            let algebra = Algebra::span_capped(load_upsets(&generators)?, config.generator_cap)?;
            let atoms: BTreeMap<String, &UPSet> = algebra
                .atoms()
                .map(|(word, atom)| (word.to_string(), atom))
                .collect();
            emit(&atoms)
        }
        AlgebraCmd::Verify { generators, bound } => {
            let algebra = Algebra::span_capped(load_upsets(&generators)?, config.generator_cap)?;
            emit(&algebra.verify_partition(bound))
        }
    }
}

fn run_filter(cmd: FilterCmd, config: &Config) -> CliResult<()> {
    match cmd {
        FilterCmd::New => emit(&PartialFilter::trivial()),
        FilterCmd::Extend { filter, generators } => {
            let filter = load_filter(&filter)?;
            emit(&filter.extend(&load_upsets(&generators)?, config)?)
        }
        FilterCmd::Verify { filter } => {
            let filter = load_filter(&filter)?;
            emit(&filter.verify_axioms(config))
        }
        FilterCmd::Select { filter, parts } => {
            let filter = load_filter(&filter)?;
            let (selected, extended) =
                filter.select_from_partition(&load_upsets(&parts)?, config)?;
            emit(&json!({ "selected": selected, "filter": extended }))
        }
        FilterCmd::Index {
            filter,
            enumeration,
        } => {
            let filter = load_filter(&filter)?;
            emit(&filter.index_filter(&load_upsets(&enumeration)?)?)
        }
    }
}

fn run_mu(cmd: MuCmd, config: &Config) -> CliResult<()> {
    match cmd {
        MuCmd::Search { f, bound } => {
            let term = load_term(&f)?;
            let ty = typecheck(&term)?;
            if ty != upfilter::FinType::one() {
                return Err(upfilter::Error::TypeMismatch {
                    expected: "0 -> 0".into(),
                    found: ty.to_string(),
                }
                .into());
            }
            let oracles = Oracles::none();
            let mut result = None;
            for x in 0..bound {
                if eval_applied(&term, &[x], &oracles, config)? == 0 {
                    result = Some(x);
                    break;
                }
            }
            emit(&result)
        }
        MuCmd::ViaFilter { zeros, filter } => {
            let zeros = load_upset(&zeros)?;
            let filter = match filter {
                Some(path) => load_filter(&path)?,
                None => PartialFilter::trivial(),
            };
            let f = SearchableFn::from_zero_set(&zeros);
            let (result, extended) = mu_via_filter(&f, &filter, config)?;
            emit(&json!({ "result": result, "filter": extended }))
        }
        MuCmd::Kprime { n, set } => emit(&k_prime(n, &load_upset(&set)?)),
    }
}

fn run_term(cmd: TermCmd, config: &Config) -> CliResult<()> {
    match cmd {
        TermCmd::Check { term } => {
            let term = load_term(&term)?;
            let ty = typecheck(&term)?;
            emit(&json!({ "type": ty.to_string(), "degree": ty.degree() }))
        }
        TermCmd::Eval { term, oracle, args } => {
            let term = load_term(&term)?;
            let oracles = match oracle {
                Some(path) => Oracles::with_filter(load_filter(&path)?),
                None => Oracles::none(),
            };
            let value = if args.is_empty() {
                eval_closed_nat(&term, &oracles, config)?
            } else {
                eval_applied(&term, &args, &oracles, config)?
            };
            emit(&value)
        }
        TermCmd::Sites { term } => {
            let term = load_term(&term)?;
            let sites: Vec<String> = collect_usites(&term)?
                .iter()
                .map(|site| site.to_string())
                .collect();
            emit(&sites)
        }
    }
}
