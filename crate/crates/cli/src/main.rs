//! `symdisc`: point sets, exact L2 discrepancies, the constant `c_b^σ` and
//! the minimal-constant search from the command line.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or input error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use symdisc::acceptance;
use symdisc::discrepancy::warnock_l2_sq;
use symdisc::faure::{faure_l2_sq, Target};
use symdisc::formulas::{
    c_constant, c_constant_closed, c_constant_definition, leading_constant_of, scrambled_l2_sq_closed,
    sym_l2_sq_closed, CMethod,
};
use symdisc::phi::{capital_phi, PhiKind};
use symdisc::pointset::{scrambled_hammersley, symmetrized, DEFAULT_SIZE_CAP};
use symdisc::search::{search_min_c, SearchMode, SearchOptions, SearchResult};
use symdisc::{parse_sigma, Error, PointSet, Rational, SigmaPattern};

const DECIMALS: u32 = 6;
const SIZE_CAP_VAR: &str = "SYMDISC_SIZE_CAP";

#[derive(Parser)]
#[command(name = "symdisc", version, about = "Exact discrepancy of symmetrized scrambled Hammersley sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the points of a scrambled or symmetrized set
    Pointset {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_enum, default_value_t = Which::Sym)]
        what: Which,
        #[arg(long, value_enum, default_value_t = PointFormat::Csv)]
        format: PointFormat,
    },
    /// Exact (N·L2)² of a set, N its number of points
    L2 {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_enum, default_value_t = Which::Sym)]
        what: Which,
        #[arg(long, value_enum, default_value_t = L2Method::Warnock)]
        method: L2Method,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// The constant c_b^σ as JSON, or one Φ value with --phi
    Constant {
        #[arg(long)]
        b: usize,
        /// `id`, cycles on the lower half such as `(0,1)(2,3)`, or images `[..]`
        #[arg(long, default_value = "id")]
        sigma: String,
        /// def | closed | id-formula
        #[arg(long, default_value = "closed")]
        method: CMethod,
        /// single:h | sum | square-sum | tilde | tilde1 | tilde2
        #[arg(long)]
        phi: Option<PhiKind>,
    },
    /// Minimize c_b^σ over the permutations commuting with the reversal
    Search {
        /// a base or an inclusive range `lo..hi`
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// lower half in cycle notation, for verify mode
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        /// permit full runs at b >= 22
        #[arg(long)]
        allow_long: bool,
        /// refuse runs scanning more permutations than this
        #[arg(long)]
        budget: Option<u128>,
        /// list every minimizer instead of the first
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = SearchFormat::Text)]
        format: SearchFormat,
        /// also write the CSV table to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance criteria; nonzero exit on any failure
    Verify {
        /// `all`, `list`, or a criterion number
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(clap::Args)]
struct SetArgs {
    #[arg(long)]
    b: usize,
    /// number of digits; taken from --word when omitted
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "id")]
    sigma: String,
    /// letters s (σ) and c (σ̄), one per digit; defaults to all s
    #[arg(long)]
    word: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Sym,
    Scrambled,
}

#[derive(Clone, Copy, ValueEnum)]
enum L2Method {
    Warnock,
    Faure,
    Closed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PointFormat {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchFormat {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Verify,
    Sample,
}

/// `Input` exits with 2, `Verification` with 1.
enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(format!("io: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(format!("csv: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let result = match cli.command {
        Command::Pointset { set, what, format } => pointset(&mut out, &set, what, format),
        Command::L2 { set, what, method, format } => l2(&mut out, &set, what, method, format),
        Command::Constant { b, sigma, method, phi } => constant(&mut out, b, &sigma, method, phi),
        Command::Search {
            b,
            mode,
            sigma,
            samples,
            seed,
            threads,
            allow_long,
            budget,
            all,
            format,
            out: path,
        } => {
            let options = SearchOptions {
                threads,
                allow_long,
                budget,
                progress: Some(Arc::new(|done, total| {
                    eprintln!("progress: {done}/{total}");
                })),
            };
            search(&mut out, &b, mode, sigma.as_deref(), samples, seed, &options, all, format, path)
        }
        Command::Verify { suite } => verify(&mut out, &suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("symdisc: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("symdisc: {msg}");
            ExitCode::from(2)
        }
    }
}

fn size_cap() -> Result<u64, Failure> {
    match std::env::var(SIZE_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{SIZE_CAP_VAR}={v:?} is not a positive integer"))),
        Err(_) => Ok(DEFAULT_SIZE_CAP),
    }
}

fn pattern(set: &SetArgs) -> Result<SigmaPattern, Failure> {
    let sigma = parse_sigma(&set.sigma, set.b)?;
    let word = match (&set.word, set.n) {
        (Some(w), Some(n)) if w.chars().count() != n => {
            return Err(Failure::Input(format!("--word {w:?} has length {}, --n is {n}", w.chars().count())))
        }
        (Some(w), _) => w.clone(),
        (None, Some(n)) => "s".repeat(n),
        (None, None) => return Err(Failure::Input("give --n or --word".into())),
    };
    Ok(SigmaPattern::parse(sigma, &word)?)
}

fn build(set: &SetArgs, what: Which) -> Result<(SigmaPattern, PointSet), Failure> {
    let p = pattern(set)?;
    let cap = size_cap()?;
    let ps = match what {
        Which::Sym => symmetrized(&p, cap)?,
        Which::Scrambled => scrambled_hammersley(&p, cap)?,
    };
    Ok((p, ps))
}

fn pointset(out: &mut impl Write, set: &SetArgs, what: Which, format: PointFormat) -> Result<(), Failure> {
    let (_, ps) = build(set, what)?;
    let coords = ps.coords();
    match format {
        PointFormat::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
            w.write_record(["x_num", "x_den", "y_num", "y_den"])?;
            for (x, y) in &coords {
                w.write_record([
                    x.numer().to_string(),
                    x.denom().to_string(),
                    y.numer().to_string(),
                    y.denom().to_string(),
                ])?;
            }
            w.flush()?;
        }
        PointFormat::Json => {
            let rows: Vec<[String; 2]> = coords.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect();
            writeln!(out, "{}", serde_json::to_string(&rows).expect("strings serialize"))?;
        }
        PointFormat::Text => {
            for (x, y) in &coords {
                writeln!(out, "{x} {y}")?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct L2Report {
    b: usize,
    n: usize,
    sigma: String,
    word: String,
    what: &'static str,
    method: &'static str,
    value: Rational,
    approx: String,
}

fn l2(out: &mut impl Write, set: &SetArgs, what: Which, method: L2Method, format: Format) -> Result<(), Failure> {
    let p = pattern(set)?;
    let cap = size_cap()?;
    let n = p.len();
    let value = match (method, what) {
        (L2Method::Warnock, _) => warnock_l2_sq(&build(set, what)?.1),
        (L2Method::Faure, Which::Sym) => faure_l2_sq(&p, Target::Symmetrized, cap)?,
        (L2Method::Faure, Which::Scrambled) => faure_l2_sq(&p, Target::Scrambled, cap)?,
        (L2Method::Closed, Which::Sym) => sym_l2_sq_closed(p.sigma(), n, CMethod::Closed)?,
        (L2Method::Closed, Which::Scrambled) => scrambled_l2_sq_closed(p.sigma(), n, p.l())?,
    };
    let approx = value.to_decimal(DECIMALS);
    let (what_name, lhs) = match what {
        Which::Sym => ("sym", "(2b^n L2)^2"),
        Which::Scrambled => ("scrambled", "(b^n L2)^2"),
    };
    match format {
        Format::Text => writeln!(out, "{lhs} = {value} ≈ {approx}")?,
        Format::Json => {
            let report = L2Report {
                b: p.base(),
                n,
                sigma: p.sigma().to_string(),
                word: p.word_string(),
                what: what_name,
                method: match method {
                    L2Method::Warnock => "warnock",
                    L2Method::Faure => "faure",
                    L2Method::Closed => "closed",
                },
                value,
                approx,
            };
            writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstantReport {
    b: usize,
    sigma: String,
    c: Rational,
    approx: String,
    leading: String,
    method: String,
    oracle_checked: bool,
}

#[derive(Serialize)]
struct PhiReport {
    b: usize,
    sigma: String,
    phi: String,
    value: Rational,
    approx: String,
}

fn constant(
    out: &mut impl Write,
    b: usize,
    sigma: &str,
    method: CMethod,
    phi: Option<PhiKind>,
) -> Result<(), Failure> {
    let s = parse_sigma(sigma, b)?;
    if let Some(kind) = phi {
        let value = capital_phi(&s, kind)?;
        let report = PhiReport {
            b,
            sigma: s.to_string(),
            phi: kind.to_string(),
            approx: value.to_decimal(DECIMALS),
            value,
        };
        writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?;
        return Ok(());
    }
    let c = c_constant(&s, method)?;
    // an independent route to the same value; the closed form needs σ∘τ = τ∘σ
    let oracle = match method {
        CMethod::Definition => c_constant_closed(&s).ok(),
        CMethod::Closed | CMethod::IdFormula => Some(c_constant_definition(&s)),
    };
    let report = ConstantReport {
        b,
        sigma: s.to_string(),
        approx: c.to_decimal(DECIMALS),
        leading: leading_constant_of(&c, b, DECIMALS)?,
        method: method.to_string(),
        oracle_checked: oracle.as_ref() == Some(&c),
        c,
    };
    writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?;
    match oracle {
        Some(o) if o != report.c => Err(Failure::Verification(format!("{method} gives {}, oracle gives {o}", report.c))),
        _ => Ok(()),
    }
}

fn parse_bases(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Input(format!("--b {text:?}: expected B or LO..HI"));
    match text.split_once("..") {
        Some((lo, hi)) => {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok((lo..=hi).collect())
        }
        None => Ok(vec![text.trim().parse().map_err(|_| bad())?]),
    }
}

#[derive(Serialize)]
struct SearchReport {
    b: usize,
    mode: &'static str,
    min_c: Rational,
    leading: String,
    /// `None` unless the whole class was scanned
    g: Option<usize>,
    minimizers: Vec<String>,
    max_c: Rational,
    scanned: String,
}

fn csv_rows(res: &SearchResult, report: &SearchReport, all: bool) -> Vec<[String; 6]> {
    let take = if all { res.minimizers.len() } else { 1 };
    res.minimizers
        .iter()
        .take(take)
        .map(|m| {
            [
                res.base.to_string(),
                m.cycles(),
                report.g.map(|g| g.to_string()).unwrap_or_default(),
                res.min_c.numer().to_string(),
                res.min_c.denom().to_string(),
                report.leading.clone(),
            ]
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn search(
    out: &mut impl Write,
    bases: &str,
    mode: ModeArg,
    sigma: Option<&str>,
    samples: usize,
    seed: u64,
    options: &SearchOptions,
    all: bool,
    format: SearchFormat,
    path: Option<PathBuf>,
) -> Result<(), Failure> {
    let bases = parse_bases(bases)?;
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for &b in &bases {
        let mode = match mode {
            ModeArg::Full => SearchMode::Full,
            ModeArg::Sample => SearchMode::Sample { count: samples, seed },
            ModeArg::Verify => {
                let text = sigma.ok_or_else(|| Failure::Input("verify mode needs --sigma".into()))?;
                let s = parse_sigma(text, b)?;
                SearchMode::Verify(s.images()[..b / 2].to_vec())
            }
        };
        let full = mode == SearchMode::Full;
        let res = search_min_c(b, mode, options).map_err(|e| match e {
            Error::LongRunNotAllowed { total, estimate_secs, .. } => Failure::Input(format!(
                "full search at b={b} scans {total} permutations (about {estimate_secs}s); rerun with --allow-long"
            )),
            e => e.into(),
        })?;
        eprintln!("b={b}: scanned {} in {:.2?}", res.scanned, res.elapsed);
        let report = SearchReport {
            b,
            mode: res.mode.label(),
            leading: leading_constant_of(&res.min_c, b, DECIMALS)?,
            g: full.then_some(res.g),
            minimizers: res.minimizers.iter().map(|m| m.cycles()).collect(),
            min_c: res.min_c.clone(),
            max_c: res.max_c.clone(),
            scanned: res.scanned.to_string(),
        };
        rows.extend(csv_rows(&res, &report, all));
        reports.push(report);
    }
    let write_csv = |w: &mut dyn Write| -> Result<(), Failure> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        w.write_record(["b", "sigma_cycles", "g", "c_num", "c_den", "leading_6dp"])?;
        for row in &rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    };
    match format {
        SearchFormat::Csv => write_csv(out)?,
        SearchFormat::Json => writeln!(out, "{}", serde_json::to_string(&reports).expect("report serializes"))?,
        SearchFormat::Text => {
            for r in &reports {
                let g = r.g.map(|g| format!(", g={g}")).unwrap_or_default();
                let shown = if all { r.minimizers.join(" ") } else { r.minimizers[0].clone() };
                writeln!(
                    out,
                    "b={} {}: min c = {} ≈ {}{}, leading {}, sigma {}",
                    r.b,
                    r.mode,
                    r.min_c,
                    r.min_c.to_decimal(DECIMALS),
                    g,
                    r.leading,
                    shown
                )?;
            }
        }
    }
    if let Some(path) = path {
        write_csv(&mut File::create(&path)?)?;
    }
    Ok(())
}

fn verify(out: &mut impl Write, suite: &str) -> Result<(), Failure> {
    let ids: Vec<u32> = match suite {
        "all" => acceptance::CRITERIA.iter().map(|(id, _)| *id).collect(),
        "list" => {
            for (id, title) in acceptance::CRITERIA {
                writeln!(out, "{id:>2} {title}")?;
            }
            return Ok(());
        }
        n => vec![n
            .parse()
            .map_err(|_| Failure::Input(format!("--suite {n:?}: expected all, list or a number")))?],
    };
    let mut failed = 0;
    for id in ids {
        let outcome = acceptance::run(id)?;
        writeln!(out, "{}", outcome.line())?;
        out.flush()?;
        failed += usize::from(!outcome.passed);
    }
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} criterion line(s) failed")));
    }
    Ok(())
}
