//! Command-line front end. Every command writes JSON (or CSV for detect) to
//! stdout or `--out`, and reports through the exit status:
//! 0 success, 1 failed check, 2 invalid input, 3 partial result.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{cyclotomic_family, quadric_case_probe, standard_quadric_point, verify_sextic_example, VerificationReport};
use crate::detect::{enumerate_exceptional, random_primes, DetectConfig, DEFAULT_PRIME_COUNT, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::field::{cyclotomic, field_make, monicize, parse_rational, rationals, Field, FieldSpec, FieldValue, Rational};
use crate::linalg::{deleted_row_rank_of, rank};
use crate::oracles::power_diff_classify;
use crate::orbit::{iterate_matrix, ExpTuple, ExponentBudget, ProjPoint, DEFAULT_EXPONENT_BUDGET};
use crate::relations::relation_lattice;
use crate::subsum::{all_column_selects, block_sums, bullet_partition, classify_exceptional, finest_zero_partition, terms_from_matrix, ColumnSelect};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

const MIN_BUDGET: u64 = 1 << 10;

#[derive(Parser, Debug)]
#[command(name = "superspan", version, about = "Exceptional subspaces of power-map orbits, computed exactly")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    /// Inline point: a JSON array of coordinates or {"field": ..., "coords": [...]}.
    #[arg(long)]
    pub point: Option<String>,
    /// File holding the point JSON.
    #[arg(long)]
    pub point_file: Option<PathBuf>,
    /// rational | cyclotomic:<l> | numberfield:<c0,c1,...> (constant term first).
    #[arg(long)]
    pub field: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArg {
    /// Largest exponent d^m materialized exactly.
    #[arg(long, env = "SUPERSPAN_BUDGET", default_value_t = DEFAULT_EXPONENT_BUDGET)]
    pub budget: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Sextic,
    Cyclotomic,
    Quadric,
    Lemmas,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeMode {
    Finest,
    Bullet,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate super-rank tuples and the subspaces they span.
    Detect {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 2)]
        d: u64,
        #[arg(long)]
        r: usize,
        #[arg(long = "max-iter")]
        max_iter: u64,
        /// Number of random filter primes.
        #[arg(long, default_value_t = DEFAULT_PRIME_COUNT)]
        primes: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Skip the modular filter and check every tuple exactly.
        #[arg(long)]
        no_filter: bool,
        #[command(flatten)]
        budget: BudgetArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Multiplicative relation lattice of a point.
    Relations {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run one of the built-in verifications.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 2)]
        d: u64,
        #[arg(long, default_value_t = 5)]
        ell: u64,
        /// Comma-separated rational tail for the cyclotomic family.
        #[arg(long, default_value = "2,3")]
        tail: String,
        #[arg(long = "max-iter", default_value_t = 20)]
        max_iter: u64,
        /// Exponent bound (lemmas) or tuple entry bound (quadric).
        #[arg(long)]
        bound: Option<u64>,
        #[command(flatten)]
        budget: BudgetArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Term vectors and zero-sum partitions of one iterate matrix.
    Analyze {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 2)]
        d: u64,
        /// Comma-separated increasing iterate indices.
        #[arg(long)]
        m: String,
        /// Comma-separated column selection; all selections when omitted.
        #[arg(long)]
        cols: Option<String>,
        #[arg(long, value_enum, default_value_t = AnalyzeMode::Finest)]
        mode: AnalyzeMode,
        #[command(flatten)]
        budget: BudgetArg,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Parses a field flag. Number-field polynomials are made monic.
pub fn parse_field(s: &str) -> Result<Field> {
    let s = s.trim();
    if s == "rational" {
        return Ok(rationals());
    }
    if let Some(l) = s.strip_prefix("cyclotomic:") {
        let ell = l.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad cyclotomic order {l:?}")))?;
        return cyclotomic(ell);
    }
    if let Some(cs) = s.strip_prefix("numberfield:") {
        let coeffs = cs.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        return field_make(FieldSpec::NumberField(monicize(&coeffs)?));
    }
    Err(Error::Parse(format!("unknown field {s:?}")))
}

fn parse_element(field: &Field, v: &Value) -> Result<FieldValue> {
    let scalar = |v: &Value| -> Result<String> {
        match v {
            Value::Number(n) => Ok(n.to_string()),
            Value::String(s) => Ok(s.clone()),
            _ => Err(Error::Parse(format!("bad coefficient {v}"))),
        }
    };
    match v {
        Value::Array(cs) => FieldValue::parse(field, &cs.iter().map(scalar).collect::<Result<Vec<_>>>()?),
        _ => FieldValue::parse(field, &[scalar(v)?]),
    }
}

/// Parses point JSON; `default_field` applies to the bare-array form.
pub fn parse_point_json(text: &str, default_field: Option<&str>) -> Result<ProjPoint> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("point JSON: {e}")))?;
    let (field, coords) = match &v {
        Value::Array(cs) => (parse_field(default_field.unwrap_or("rational"))?, cs.clone()),
        Value::Object(o) => {
            let f = match (o.get("field"), default_field) {
                (Some(Value::String(s)), _) => parse_field(s)?,
                (None, Some(s)) => parse_field(s)?,
                (None, None) => rationals(),
                _ => return Err(Error::Parse("field must be a string".into())),
            };
            let cs = o
                .get("coords")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("point object needs a coords array".into()))?;
            (f, cs.clone())
        }
        _ => return Err(Error::Parse("point must be an array or an object".into())),
    };
    let coords = coords.iter().map(|c| parse_element(&field, c)).collect::<Result<Vec<_>>>()?;
    ProjPoint::new(&field, coords)
}

pub fn point_to_json(p: &ProjPoint) -> Value {
    json!({
        "field": p.field().to_string(),
        "coords": p.coords().iter().map(FieldValue::to_strings).collect::<Vec<_>>(),
    })
}

fn load_point(args: &PointArgs) -> Result<ProjPoint> {
    let text = match (&args.point, &args.point_file) {
        (Some(s), None) => s.clone(),
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?,
        (Some(_), Some(_)) => return Err(Error::Parse("give either --point or --point-file".into())),
        (None, None) => return Err(Error::Parse("a point is required (--point or --point-file)".into())),
    };
    parse_point_json(&text, args.field.as_deref())
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad integer {x:?}"))))
        .collect()
}

fn check_budget(b: &BudgetArg) -> Result<ExponentBudget> {
    if b.budget < MIN_BUDGET {
        return Err(Error::Parse(format!("budget {} is below {MIN_BUDGET}", b.budget)));
    }
    Ok(ExponentBudget(b.budget))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// What a command produced: text to write and the exit status.
pub struct Output {
    pub text: String,
    pub status: i32,
}

fn verification_output(rep: &VerificationReport) -> Output {
    Output {
        text: to_json(rep),
        status: if rep.passed() { EXIT_OK } else { EXIT_CHECK_FAILED },
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_detect(
    point: &PointArgs,
    d: u64,
    r: usize,
    max_iter: u64,
    primes: usize,
    seed: u64,
    no_filter: bool,
    budget: &BudgetArg,
    format: Format,
) -> Result<Output> {
    if r == 0 {
        return Err(Error::Unsupported("unsupported r = 0".into()));
    }
    let p = load_point(point)?;
    let mut cfg = DetectConfig::new(d, r, max_iter);
    cfg.primes = random_primes(primes.max(1), seed);
    cfg.use_filter = !no_filter;
    cfg.budget = check_budget(budget)?;
    let rep = enumerate_exceptional(&p, &cfg)?;
    let text = match format {
        Format::Json => to_json(&rep),
        Format::Csv => rep.to_csv(),
    };
    Ok(Output {
        text,
        status: if rep.complete { EXIT_OK } else { EXIT_PARTIAL },
    })
}

fn cmd_relations(point: &PointArgs) -> Result<Output> {
    let p = load_point(point)?;
    let l = relation_lattice(&p)?;
    Ok(Output { text: to_json(&l.to_json()), status: EXIT_OK })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    target: VerifyTarget,
    point: &PointArgs,
    d: u64,
    ell: u64,
    tail: &str,
    max_iter: u64,
    bound: Option<u64>,
    budget: &BudgetArg,
) -> Result<Output> {
    let budget = check_budget(budget)?;
    let mut rep = VerificationReport::default();
    match target {
        VerifyTarget::Sextic => rep = verify_sextic_example(),
        VerifyTarget::Cyclotomic => {
            let tail = tail.split(',').map(parse_rational).collect::<Result<Vec<Rational>>>()?;
            let fam = cyclotomic_family(d, ell, &tail)?;
            let table = fam.membership_table(max_iter, budget)?;
            for i in 1..ell {
                let mut mismatches = Vec::new();
                let mut hits = 0;
                for (n, row) in table.iter().enumerate() {
                    let predicted = crate::numtheory::pow_mod(d, n as u64, ell) == i;
                    if row[(i - 1) as usize] {
                        hits += 1;
                    }
                    if row[(i - 1) as usize] != predicted {
                        mismatches.push(n);
                    }
                }
                rep.push(
                    &format!("membership_H{i}"),
                    mismatches.is_empty(),
                    format!("{hits} of iterates 0..={max_iter} lie on H_{i}; mismatches {mismatches:?}"),
                );
            }
            for i in 1..ell {
                let m = fam.spanning_tuple(i)?;
                rep.push(
                    &format!("super_span_H{i}"),
                    fam.super_spans(i, budget)?,
                    format!("iterates {:?}", m.entries()),
                );
            }
            for w in &fam.warnings {
                rep.push("tail_independence", true, format!("warning: {w}"));
            }
        }
        VerifyTarget::Quadric => {
            let p = if point.point.is_some() || point.point_file.is_some() {
                load_point(point)?
            } else {
                standard_quadric_point()
            };
            let bound = bound.unwrap_or(6);
            let q = quadric_case_probe(&p, d, bound)?;
            rep.push(
                "quadric_case_analysis",
                q.passed(),
                format!(
                    "{} tuple pairs, {} derangement cases ({} double transpositions), {} fixed-point cases, {} counterexamples",
                    q.tuple_pairs,
                    q.derangement_cases,
                    q.double_transposition_shapes,
                    q.fixed_point_cases,
                    q.counterexamples.len()
                ),
            );
            for c in q.counterexamples.iter().take(20) {
                rep.push("counterexample", false, serde_json::to_string(c).expect("serializes"));
            }
        }
        VerifyTarget::Lemmas => {
            let bound = bound.unwrap_or(12);
            let b = u32::try_from(bound).ok().filter(|&b| b <= 20).ok_or_else(|| Error::Parse("bound must be at most 20".into()))?;
            let res = power_diff_classify(d, b);
            rep.push(
                "power_difference",
                res.passed(),
                format!("{}: {} cases, counterexamples {:?}", res.space, res.checked, res.counterexamples),
            );
        }
    }
    Ok(verification_output(&rep))
}

fn cmd_analyze(point: &PointArgs, d: u64, m: &str, cols: Option<&str>, mode: AnalyzeMode, budget: &BudgetArg) -> Result<Output> {
    let p = load_point(point)?;
    let m = ExpTuple::new(parse_u64_list(m)?)?;
    let r = m.r();
    if mode == AnalyzeMode::Finest && r > crate::subsum::MAX_EXHAUSTIVE_R {
        return Err(Error::TooManyTerms(crate::perm::factorial(r + 1)));
    }
    let a = iterate_matrix(&p, d, &m, check_budget(budget)?)?;
    let mat = a.materialize()?;
    let selects = match cols {
        Some(c) => vec![ColumnSelect::new(p.dim(), parse_u64_list(c)?.into_iter().map(|v| v as usize).collect())?],
        None => all_column_selects(r, p.dim()),
    };
    let mut per_select = Vec::new();
    for sel in &selects {
        if sel.r() != r {
            return Err(Error::DimensionMismatch { expected: r + 1, found: sel.r() + 1 });
        }
        let tv = terms_from_matrix(&mat, sel)?;
        let total = tv.total();
        let mut entry = json!({
            "cols": sel.map(),
            "total": total.to_strings(),
            "bullet": (0..=r).map(|t| {
                let part = bullet_partition(r, t).expect("t <= r");
                let sums = block_sums(&tv, &part);
                json!({"t": t, "all_zero": sums.iter().all(FieldValue::is_zero),
                       "block_sums": sums.iter().map(FieldValue::to_strings).collect::<Vec<_>>()})
            }).collect::<Vec<_>>(),
        });
        if mode == AnalyzeMode::Finest {
            entry["terms"] = serde_json::to_value(tv.to_json()).expect("serializes");
            entry["finest"] = match finest_zero_partition(&tv) {
                Ok(fp) => json!({
                    "partition": fp.partition.to_json(),
                    "non_unique": fp.non_unique,
                    "exceptional_for": classify_exceptional(&fp.partition),
                }),
                Err(e @ Error::NonVanishingTotal) => json!({"diagnostic": e.to_string()}),
                Err(e) => return Err(e),
            };
        }
        per_select.push(entry);
    }
    let deleted: Vec<usize> = (0..=r).map(|t| deleted_row_rank_of(&mat, t)).collect::<Result<_>>()?;
    let out = json!({
        "point": point_to_json(&p),
        "d": d,
        "m": m.entries(),
        "rank": rank(&mat)?,
        "deleted_row_ranks": deleted,
        "selections": per_select,
    });
    Ok(Output { text: to_json(&out), status: EXIT_OK })
}

fn dispatch(cli: &Cli) -> Result<(Output, Option<PathBuf>)> {
    Ok(match &cli.command {
        Command::Detect { point, d, r, max_iter, primes, seed, no_filter, budget, output } => (
            cmd_detect(point, *d, *r, *max_iter, *primes, *seed, *no_filter, budget, output.format)?,
            output.out.clone(),
        ),
        Command::Relations { point, output } => (cmd_relations(point)?, output.out.clone()),
        Command::Verify { target, point, d, ell, tail, max_iter, bound, budget, output } => (
            cmd_verify(*target, point, *d, *ell, tail, *max_iter, *bound, budget)?,
            output.out.clone(),
        ),
        Command::Analyze { point, d, m, cols, mode, budget, output } => {
            (cmd_analyze(point, *d, m, cols.as_deref(), *mode, budget)?, output.out.clone())
        }
    })
}

/// Runs a parsed command, writing output and diagnostics; returns the exit status.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match dispatch(cli) {
        Ok((out, path)) => {
            let written = match path {
                Some(p) => fs::write(&p, &out.text).map_err(|e| format!("{}: {e}", p.display())),
                None => stdout.write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INVALID;
            }
            out.status
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            }
        }
    }
}
