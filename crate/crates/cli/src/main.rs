use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use sftgroup::builtin;
use sftgroup::export;
use sftgroup::invariants::{self, Comparison};
use sftgroup::perron::field::parse_rational;
use sftgroup::perron::{AlgebraicNumber, PerronData, PerronError};
use sftgroup::pl::{self, PlError, PlMap};
use sftgroup::selftest;
use sftgroup::sft::{EppJson, EppPoint, MatrixJson, SftError, TransitionMatrix};
use sftgroup::table::{AdicTable, TableError, TableJson};

const EXIT_VALIDATION: u8 = 2;
const EXIT_COMPUTATION: u8 = 3;
const EXIT_SELFTEST: u8 = 4;

#[derive(Parser)]
#[command(name = "sftgroup", version, about = "Exact computations in the full group of a one-sided Markov shift")]
struct Cli {
    /// Transition matrix: a JSON file, inline JSON, or `builtin:<name>`
    /// (full2, full3, fibonacci, cubic, triangle).
    #[arg(long, global = true, default_value = "builtin:fibonacci")]
    matrix: String,
    /// Decimal digits in approximations.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    digits: u32,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; `pl render` defaults to JSON, `selftest` to text lines.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Check the matrix (zero-one, irreducible, not a permutation).
    Validate,
    /// Admissible words of length m in lexicographic order.
    Words { m: usize },
    /// Perron eigenvalue, minimal polynomial and normalized eigenvector.
    Perron,
    /// The intervals [l, r) of all admissible words of length m.
    Intervals { m: usize },
    #[command(subcommand)]
    Table(TableCommand),
    #[command(subcommand)]
    Pl(PlCommand),
    /// The image of an eventually periodic point in [0, 1].
    Rho { point: String },
    /// K0, det(I - A) and the simplicity verdict.
    Invariants,
    /// Compare invariants with a second matrix.
    Compare { other: String },
    /// Run the acceptance checks on the built-in matrices.
    Selftest,
}

/// Table arguments are a JSON file, inline JSON, or `-` for stdin.
#[derive(Subcommand)]
enum TableCommand {
    Check { table: String },
    Reduce { table: String },
    /// `first ∘ second`: apply `second`, then `first`.
    Compose { first: String, second: String },
    Invert { table: String },
    Equal { first: String, second: String },
    Classify { table: String },
    Apply { table: String, point: String },
    Derivative { table: String },
    /// A seeded random table of domain depth at most `depth`.
    Random {
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum PlCommand {
    /// The PL function of a table, as JSON pieces, CSV or SVG.
    Render { table: String },
    /// Evaluate at `t`, given as a rational (`1/3`) or `{"poly":[...]}`.
    Eval { table: String, t: String },
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Computation(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Computation(_) | CliError::Io(_) => EXIT_COMPUTATION,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Validation(m) => ("validation", m),
            CliError::Computation(m) => ("computation", m),
            CliError::Io(m) => ("io", m),
        };
        json!({ "error": { "kind": kind, "message": message, "exit_code": self.code() } })
    }
}

impl From<SftError> for CliError {
    fn from(e: SftError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        match e {
            TableError::GenerationFailed(_) => CliError::Computation(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<PerronError> for CliError {
    fn from(e: PerronError) -> Self {
        match e {
            PerronError::Sft(_) => CliError::Validation(e.to_string()),
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<PlError> for CliError {
    fn from(e: PlError) -> Self {
        match e {
            PlError::OutOfDomain(_) | PlError::OutsideJ { .. } | PlError::BadSymbol(_) | PlError::Table(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Computation(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            let err = CliError::Validation(first.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.code());
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let digits = cli.digits as usize;
    if let Command::Selftest = cli.command {
        return selftest_cmd(cli);
    }
    let a = load_matrix(&cli.matrix)?;
    let out: Output = match &cli.command {
        Command::Validate => json_out(&json!({ "valid": true, "n": a.n(), "rows": a.to_json().rows })),
        Command::Words { m } => json_out(&a.words(*m)),
        Command::Perron => json_out(&perron(&a)?.to_json(digits)),
        Command::Intervals { m } => {
            let pd = perron(&a)?;
            let mut rows = Vec::new();
            for w in a.words(*m) {
                let (l, r) = pd.interval(&w)?;
                rows.push(json!({ "word": w, "l": l.to_json(digits), "r": r.to_json(digits) }));
            }
            json_out(&rows)
        }
        Command::Table(t) => table_cmd(cli, &a, t, digits)?,
        Command::Pl(p) => pl_cmd(cli, &a, p, digits)?,
        Command::Rho { point } => {
            let pd = perron(&a)?;
            let x = load_point(&a, point)?;
            json_out(&pl::rho(&pd, &x).to_json(digits))
        }
        Command::Invariants => json_out(&invariants::invariants_json(&a)),
        Command::Compare { other } => {
            let b = load_matrix(other)?;
            let verdict = match invariants::compare_invariants(&a, &b) {
                Comparison::Distinguished => "distinguished",
                Comparison::NecessaryConditionsPass => "necessary_conditions_pass",
            };
            json_out(&json!({
                "a": invariants::invariants_json(&a),
                "b": invariants::invariants_json(&b),
                "verdict": verdict,
            }))
        }
        Command::Selftest => unreachable!(),
    };
    emit(cli, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn table_cmd(cli: &Cli, a: &TransitionMatrix, cmd: &TableCommand, digits: usize) -> Result<Output> {
    Ok(match cmd {
        TableCommand::Check { table } => {
            let t = load_table(a, table)?;
            json_out(&json!({ "valid": true, "rows": t.len(), "depth": t.depth() }))
        }
        TableCommand::Reduce { table } => json_out(&load_table(a, table)?.reduce().to_json()),
        TableCommand::Compose { first, second } => {
            let (t1, t2) = (load_table(a, first)?, load_table(a, second)?);
            json_out(&t1.compose(&t2)?.to_json())
        }
        TableCommand::Invert { table } => json_out(&load_table(a, table)?.inverse().to_json()),
        TableCommand::Equal { first, second } => {
            let (t1, t2) = (load_table(a, first)?, load_table(a, second)?);
            json_out(&json!({ "equal": t1.equivalent(&t2)? }))
        }
        TableCommand::Classify { table } => {
            json_out(&json!({ "class": load_table(a, table)?.classify_order() }))
        }
        TableCommand::Apply { table, point } => {
            let t = load_table(a, table)?;
            let x = load_point(a, point)?;
            json_out(&t.apply(&x).to_json())
        }
        TableCommand::Derivative { table } => {
            let t = load_table(a, table)?;
            let pd = perron(a)?;
            let d = pl::derivative(&pd, &t);
            let steps: Vec<Value> = t
                .rows()
                .iter()
                .zip(&d.steps)
                .map(|(r, (w, v))| json!({ "domain": w, "exponent": r.exponent(), "value": v.to_json(digits) }))
                .collect();
            let phi = pl::kms_expectation(&pd, &d)?;
            json_out(&json!({ "steps": steps, "kms_expectation": phi.to_json(digits) }))
        }
        TableCommand::Random { depth } => {
            json_out(&sftgroup::random::random_table(a, cli.seed, (*depth).max(1))?.to_json())
        }
    })
}

fn pl_cmd(cli: &Cli, a: &TransitionMatrix, cmd: &PlCommand, digits: usize) -> Result<Output> {
    let pd = perron(a)?;
    Ok(match cmd {
        PlCommand::Render { table } => {
            let f = PlMap::from_table(&pd, &load_table(a, table)?)?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => json_out(&f.to_json(digits)),
                Format::Csv => Output(export::to_csv(&f, digits)),
                Format::Svg => Output(export::to_svg(&f, digits)),
            }
        }
        PlCommand::Eval { table, t } => {
            let f = PlMap::from_table(&pd, &load_table(a, table)?)?;
            let t = parse_number(&pd, t)?;
            let y = f.eval(&t)?;
            let slope = f.slope_at(&t)?;
            json_out(&json!({
                "t": t.to_json(digits),
                "value": y.to_json(digits),
                "slope": slope.to_json(digits),
            }))
        }
    })
}

fn selftest_cmd(cli: &Cli) -> Result<ExitCode> {
    let reports = selftest::run_all(cli.seed);
    let passed = reports.iter().all(|r| r.passed);
    let out = match cli.format {
        Some(Format::Json) => json_out(&reports),
        _ => Output(reports.iter().map(|r| format!("{r}\n")).collect::<String>().into_bytes()),
    };
    emit(cli, &out)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_SELFTEST) })
}

struct Output(Vec<u8>);

fn json_out<T: Serialize + ?Sized>(v: &T) -> Output {
    let mut bytes = serde_json::to_vec(v).expect("serializable");
    bytes.push(b'\n');
    Output(bytes)
}

fn emit(cli: &Cli, out: &Output) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, &out.0).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(&out.0).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn perron(a: &TransitionMatrix) -> Result<PerronData> {
    Ok(PerronData::compute(a)?)
}

/// Inline JSON if the argument looks like JSON, stdin for `-`, else a file.
fn read_arg(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(e.to_string()))?;
        return Ok(s);
    }
    fs::read_to_string(Path::new(arg)).map_err(|e| CliError::Io(format!("{arg}: {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed {what} JSON: {e}")))
}

fn load_matrix(arg: &str) -> Result<TransitionMatrix> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return builtin::by_name(name).ok_or_else(|| CliError::Validation(format!("unknown built-in matrix {name:?}")));
    }
    let json: MatrixJson = parse_json("matrix", &read_arg(arg)?)?;
    Ok(TransitionMatrix::from_json(&json)?)
}

fn load_table(a: &TransitionMatrix, arg: &str) -> Result<AdicTable> {
    let json: TableJson = parse_json("table", &read_arg(arg)?)?;
    Ok(AdicTable::from_json(a, &json)?)
}

fn load_point(a: &TransitionMatrix, arg: &str) -> Result<EppPoint> {
    let json: EppJson = parse_json("point", &read_arg(arg)?)?;
    Ok(EppPoint::from_json(a, &json)?)
}

fn parse_number(pd: &PerronData, arg: &str) -> Result<AlgebraicNumber> {
    let invalid = |e: &dyn std::fmt::Display| CliError::Validation(format!("bad number {arg:?}: {e}"));
    if arg.trim_start().starts_with('{') {
        #[derive(serde::Deserialize)]
        struct Poly {
            poly: Vec<String>,
        }
        let p: Poly = parse_json("number", arg)?;
        return AlgebraicNumber::from_strings(pd.field(), &p.poly).map_err(|e| invalid(&e));
    }
    Ok(pd.rational(parse_rational(arg).map_err(|e| invalid(&e))?))
}
