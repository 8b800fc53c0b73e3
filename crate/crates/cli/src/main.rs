//! `uoppm` command-line front end.
//!
//! Exit status: 0 match (or success), 1 definitive no-match, 2 error.

mod input;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use uoppm::alternate::{
    encode_alternate, extract_alternate, preprocess_alternate, AlternateOptions, Preprocessed,
};
use uoppm::cnf::{read_dimacs, solve, solve_2sat, solve_dpll, write_dimacs, CnfFormula, Lit};
use uoppm::corestr::is_determinate;
use uoppm::filtration::{
    search, verify_pair, Match, Method, SearchOptions, SearchStats, StreamSearcher,
};
use uoppm::hardness::{check_reduction, random_3cnf, reduce_3sat, sanitize_formula};
use uoppm::oracle::{
    gen_instance, oracle_match, oracle_search, GenMode, InstanceGenSpec, DEFAULT_BUDGET,
};
use uoppm::satencode::{decode_eq1, decode_eq2, encode_eq1, encode_eq2};
use uoppm::{serialize_string, Assignment, CharSet, IndetString, Witness};

use input::{for_each_line, read_pair, Source};

const SCHEMA: &str = "uoppm.report/1";
const REDUCTION_SCHEMA: &str = "uoppm.reduction/1";

#[derive(Parser, Debug)]
#[command(
    name = "uoppm",
    version,
    about = "Order-preserving matching over indeterminate strings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Assignment budget for exhaustive enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Seed for the generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

/// Strings are given inline (`"1 2|3 4"`), as `@path`, or as `-` for stdin.
#[derive(Args, Debug)]
struct PairArgs {
    pattern: String,
    text: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether two strings of equal length op-match.
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "auto", value_parser = method_parser())]
        method: Method,
    },
    /// Report every window of the text that op-matches the pattern.
    Search {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "auto", value_parser = method_parser())]
        method: Method,
        /// Verify every window instead of only the filter's candidates.
        #[arg(long)]
        no_filter: bool,
        #[arg(long, value_enum, default_value_t = Report::Start)]
        report: Report,
    },
    /// Emit the SAT encoding of a pair as DIMACS.
    Cnf {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, alias = "method", value_enum)]
        encoding: Encoding,
        /// Write DIMACS here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also solve the formula and print the decoded assignment.
        #[arg(long)]
        solve: bool,
        /// Alternate only: constrain neighbours in sorted order instead of all pairs.
        #[arg(long)]
        adjacency: bool,
    },
    /// Build the pattern/text pair of a 3CNF formula given in DIMACS.
    Reduce {
        /// DIMACS file, or `-` for stdin.
        input: String,
        #[arg(long)]
        out_prefix: PathBuf,
        /// Cross-check with the solver and an exhaustive match search.
        #[arg(long)]
        check: bool,
    },
    /// Exhaustive reference: match for equal lengths, window search otherwise.
    Oracle {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = Report::Start)]
        report: Report,
    },
    /// Generate random instances.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Two strings of equal length, one per line.
    Pair {
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        r_max: usize,
        #[arg(long, default_value_t = 8)]
        alphabet: u32,
        #[arg(long, value_enum, default_value_t = Mode::OneIndet)]
        mode: Mode,
    },
    /// A random 3CNF formula in DIMACS.
    #[command(name = "3cnf")]
    Cnf3 {
        #[arg(long, default_value_t = 5)]
        vars: u32,
        #[arg(long, default_value_t = 20)]
        clauses: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Report {
    Start,
    End,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Encoding {
    Eq1,
    Eq2,
    Alternate,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    OneIndet,
    Both,
    Alternate,
    Determinate,
}

impl From<Mode> for GenMode {
    fn from(m: Mode) -> GenMode {
        match m {
            Mode::OneIndet => GenMode::OneIndet,
            Mode::Both => GenMode::BothIndet,
            Mode::Alternate => GenMode::Alternate,
            Mode::Determinate => GenMode::Determinate,
        }
    }
}

fn method_parser() -> impl TypedValueParser<Value = Method> {
    PossibleValuesParser::new(Method::ALL.map(Method::name))
        .map(|s| s.parse::<Method>().expect("listed method"))
}

enum Outcome {
    Found,
    NotFound,
}

impl From<bool> for Outcome {
    fn from(found: bool) -> Outcome {
        if found {
            Outcome::Found
        } else {
            Outcome::NotFound
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Found) => ExitCode::SUCCESS,
        Ok(Outcome::NotFound) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let mut out = io::stdout().lock();
    match &cli.command {
        Command::Verify { pair, method } => cmd_verify(cli, &mut out, pair, *method),
        Command::Search {
            pair,
            method,
            no_filter,
            report,
        } => {
            let opts = SearchOptions {
                method: *method,
                use_filter: !no_filter,
                budget: cli.budget,
            };
            cmd_search(cli, &mut out, pair, opts, *report)
        }
        Command::Cnf {
            pair,
            encoding,
            out: path,
            solve,
            adjacency,
        } => cmd_cnf(
            cli,
            &mut out,
            pair,
            *encoding,
            path.as_deref(),
            *solve,
            *adjacency,
        ),
        Command::Reduce {
            input,
            out_prefix,
            check,
        } => cmd_reduce(cli, &mut out, input, out_prefix, *check),
        Command::Oracle { pair, report } => cmd_oracle(cli, &mut out, pair, *report),
        Command::Gen { kind } => cmd_gen(cli, &mut out, kind),
    }
}

fn witness_json(w: Option<&Witness>) -> Value {
    match w {
        Some(w) => json!({ "pattern": w.x.0, "text": w.y.0 }),
        None => Value::Null,
    }
}

fn write_witness(out: &mut impl Write, w: &Witness) -> io::Result<()> {
    writeln!(out, "pattern: {}", w.x)?;
    writeln!(out, "text:    {}", w.y)
}

fn print_json(out: &mut impl Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn cmd_verify(cli: &Cli, out: &mut impl Write, pair: &PairArgs, method: Method) -> Result<Outcome> {
    let (p, t) = read_pair(&pair.pattern, &pair.text)?;
    let v = verify_pair(&p, &t, method, cli.budget)?;
    if cli.json {
        print_json(
            out,
            &json!({
                "schema": SCHEMA,
                "command": "verify",
                "matched": v.matched,
                "method": v.method.name(),
                "length": p.len(),
                "witness": witness_json(v.witness.as_ref()),
            }),
        )?;
    } else {
        let verdict = if v.matched { "match" } else { "no match" };
        writeln!(out, "{verdict} ({})", v.method.name())?;
        if let Some(w) = &v.witness {
            write_witness(out, w)?;
        }
    }
    Ok(v.matched.into())
}

fn reported(start: usize, m: usize, report: Report) -> usize {
    match report {
        Report::Start => start,
        Report::End => start + m - 1,
    }
}

fn stats_json(s: &SearchStats) -> Value {
    json!({
        "windows_total": s.windows_total,
        "candidates_after_filter": s.candidates_after_filter,
        "verified_matches": s.verified_matches,
    })
}

fn match_json(m: &Match, len: usize, report: Report) -> Value {
    json!({
        "position": reported(m.start, len, report),
        "start": m.start,
        "method": m.method.name(),
        "witness": witness_json(m.witness.as_ref()),
    })
}

fn cmd_search(
    cli: &Cli,
    out: &mut impl Write,
    pair: &PairArgs,
    opts: SearchOptions,
    report: Report,
) -> Result<Outcome> {
    let text_src = Source::new(&pair.text);
    if text_src != Source::Stdin {
        let (p, t) = read_pair(&pair.pattern, &pair.text)?;
        let r = search(&p, &t, opts)?;
        if cli.json {
            let matches: Vec<Value> = r
                .matches
                .iter()
                .map(|m| match_json(m, p.len(), report))
                .collect();
            print_json(
                out,
                &json!({
                    "schema": SCHEMA,
                    "command": "search",
                    "report": report_name(report),
                    "pattern_length": p.len(),
                    "text_length": t.len(),
                    "positions": r.matches.iter().map(|m| reported(m.start, p.len(), report)).collect::<Vec<_>>(),
                    "matches": matches,
                    "stats": stats_json(&r.stats),
                }),
            )?;
        } else {
            for m in &r.matches {
                writeln!(out, "{}", reported(m.start, p.len(), report))?;
            }
        }
        return Ok((!r.matches.is_empty()).into());
    }

    // Text from stdin: stream it through a window of pattern length.
    if Source::new(&pair.pattern) == Source::Stdin {
        bail!("pattern and text cannot both come from stdin");
    }
    let p = Source::new(&pair.pattern).read_string()?;
    let m = p.len();
    let mut searcher = StreamSearcher::new(p.into_positions(), opts)?;
    let mut found = Vec::new();
    let mut text_length = 0usize;
    for_each_line(io::stdin().lock(), |line| {
        for c in line.into_positions() {
            text_length += 1;
            if let Some(hit) = searcher.push(c)? {
                if cli.json {
                    found.push(match_json(&hit, m, report));
                } else {
                    writeln!(out, "{}", reported(hit.start, m, report))?;
                }
            }
        }
        Ok(())
    })?;
    let stats = searcher.finish()?;
    if cli.json {
        let positions: Vec<Value> = found.iter().map(|v| v["position"].clone()).collect();
        print_json(
            out,
            &json!({
                "schema": SCHEMA,
                "command": "search",
                "report": report_name(report),
                "pattern_length": m,
                "text_length": text_length,
                "positions": positions,
                "matches": found,
                "stats": stats_json(&stats),
            }),
        )?;
    }
    Ok((stats.verified_matches > 0).into())
}

fn report_name(r: Report) -> &'static str {
    match r {
        Report::Start => "start",
        Report::End => "end",
    }
}

fn encoding_name(e: Encoding) -> &'static str {
    match e {
        Encoding::Eq1 => "eq1",
        Encoding::Eq2 => "eq2",
        Encoding::Alternate => "alternate",
    }
}

/// Unsatisfiable stand-in for instances that preprocessing already refuted.
const REFUTED_DIMACS: &str = "c alternate preprocessing proved no match\np cnf 1 2\n1 0\n-1 0\n";

/// Solver name and witness (or `None` when unsatisfiable).
type Solved = (&'static str, Option<Witness>);

type Decoder = Box<dyn Fn(&CnfFormula) -> Result<Solved>>;

fn cmd_cnf(
    cli: &Cli,
    out: &mut impl Write,
    pair: &PairArgs,
    encoding: Encoding,
    path: Option<&Path>,
    solve_it: bool,
    adjacency: bool,
) -> Result<Outcome> {
    let (p, t) = read_pair(&pair.pattern, &pair.text)?;
    let (dimacs, formula, solved): (String, Option<CnfFormula>, Decoder) = match encoding {
        Encoding::Eq1 => {
            let pattern_det = is_determinate(&p);
            let (det, other) = if pattern_det {
                (&p, &t)
            } else if is_determinate(&t) {
                (&t, &p)
            } else {
                bail!("eq1 needs one determinate string");
            };
            let enc = encode_eq1(det, other)?;
            let side = if pattern_det { "text" } else { "pattern" };
            let dimacs = format!(
                "c encoding eq1 variables={side}\n{}",
                write_dimacs(&enc.formula)
            );
            let det = det.clone();
            let decode = move |f: &CnfFormula| -> Result<Solved> {
                let (r, kind) = solve(f)?;
                let witness = match r.model {
                    Some(model) => {
                        let a = decode_eq1(&det, &enc, &model)?;
                        let d = Assignment(det.iter().map(CharSet::min).collect());
                        Some(if pattern_det {
                            Witness { x: d, y: a }
                        } else {
                            Witness { x: a, y: d }
                        })
                    }
                    None => None,
                };
                Ok((kind.name(), witness))
            };
            let formula = decode_formula(&dimacs)?;
            (dimacs, Some(formula), Box::new(decode))
        }
        Encoding::Eq2 => {
            let enc = encode_eq2(&p, &t)?;
            let dimacs = format!("c encoding eq2\n{}", write_dimacs(&enc.formula));
            let decode = move |f: &CnfFormula| -> Result<Solved> {
                let witness = match solve_dpll(f)?.model {
                    Some(model) => {
                        let (x, y) = decode_eq2(&enc, &model)?;
                        Some(Witness { x, y })
                    }
                    None => None,
                };
                Ok(("dpll", witness))
            };
            let formula = decode_formula(&dimacs)?;
            (dimacs, Some(formula), Box::new(decode))
        }
        Encoding::Alternate => match preprocess_alternate(&p, &t)? {
            Preprocessed::NoMatch => (
                REFUTED_DIMACS.to_string(),
                None,
                Box::new(|_: &CnfFormula| -> Result<Solved> { Ok(("preprocessing", None)) }),
            ),
            Preprocessed::Instance(inst) => {
                let enc = encode_alternate(
                    &inst,
                    AlternateOptions {
                        adjacency,
                        ..Default::default()
                    },
                );
                let remap: Vec<String> = inst.remap.iter().map(usize::to_string).collect();
                let dimacs = format!(
                    "c encoding alternate\nc remap {}\n{}",
                    remap.join(" "),
                    write_dimacs(&enc.formula)
                );
                let decode = move |f: &CnfFormula| -> Result<Solved> {
                    let witness = match solve_2sat(f)?.model {
                        Some(model) => Some(extract_alternate(&inst, &enc, &model)?),
                        None => None,
                    };
                    Ok(("2sat", witness))
                };
                let formula = decode_formula(&dimacs)?;
                (dimacs, Some(formula), Box::new(decode))
            }
        },
    };

    match path {
        Some(path) => {
            fs::write(path, &dimacs).with_context(|| format!("writing {}", path.display()))?
        }
        None => out.write_all(dimacs.as_bytes())?,
    }
    if !solve_it {
        return Ok(Outcome::Found);
    }

    // The solve report shares stdout only when the DIMACS went to a file.
    let (solver, witness) = match &formula {
        Some(f) => solved(f)?,
        None => solved(&CnfFormula::new(0))?,
    };
    let mut report = Vec::new();
    if cli.json {
        let f = formula.as_ref();
        writeln!(
            report,
            "{}",
            serde_json::to_string_pretty(&json!({
                "schema": SCHEMA,
                "command": "cnf",
                "encoding": encoding_name(encoding),
                "solver": solver,
                "variables": f.map_or(1, |f| f.num_vars()),
                "clauses": f.map_or(2, |f| f.clauses().len()),
                "satisfiable": witness.is_some(),
                "witness": witness_json(witness.as_ref()),
            }))?
        )?;
    } else {
        writeln!(
            report,
            "{} ({solver})",
            if witness.is_some() { "sat" } else { "unsat" }
        )?;
        if let Some(w) = &witness {
            write_witness(&mut report, w)?;
        }
    }
    if path.is_some() {
        out.write_all(&report)?;
    } else {
        io::stderr().write_all(&report)?;
    }
    Ok(witness.is_some().into())
}

/// Re-reads emitted DIMACS so the solver sees exactly what was written.
fn decode_formula(dimacs: &str) -> Result<CnfFormula> {
    read_dimacs(dimacs).context("re-reading emitted DIMACS")
}

fn dimacs_valuation(v: &[bool]) -> String {
    v.iter()
        .enumerate()
        .map(|(i, &b)| {
            if b {
                format!("{}", i + 1)
            } else {
                format!("-{}", i + 1)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_reduce(
    cli: &Cli,
    out: &mut impl Write,
    input: &str,
    prefix: &Path,
    check: bool,
) -> Result<Outcome> {
    let text = match input {
        "-" => Source::Stdin.read_raw()?,
        path => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
    };
    let formula = read_dimacs(&text)?;
    let f = sanitize_formula(&formula)?;
    let r = reduce_3sat(&f)?;

    // Sanitizing drops tautologies; keep the map back to input clause numbers.
    let kept: Vec<usize> = formula
        .clauses()
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            !c.iter()
                .any(|l| c.iter().any(|k| k.to_dimacs() == -l.to_dimacs()))
        })
        .map(|(i, _)| i)
        .collect();
    if kept.len() != f.clauses.len() {
        bail!("internal: clause map does not line up with the sanitized formula");
    }
    let clauses: Vec<Value> = f
        .clauses
        .iter()
        .enumerate()
        .map(|(c, clause)| {
            let lits: Vec<i64> = clause
                .lits
                .iter()
                .map(|&(v, neg)| if neg { -(v as i64 + 1) } else { v as i64 + 1 })
                .collect();
            json!({
                "clause": c,
                "input_clause": kept[c],
                "position": r.var_offset + c,
                "literals": lits,
                "z": clause.z(),
                "l": clause.l(),
                "padded": clause.padded,
            })
        })
        .collect();
    let sidecar = json!({
        "schema": REDUCTION_SCHEMA,
        "num_vars": f.num_vars,
        "num_clauses": f.clauses.len(),
        "var_offset": r.var_offset,
        "length": r.pattern.len(),
        "clauses": clauses,
    });

    let files = [
        (
            with_suffix(prefix, ".pattern"),
            format!("{}\n", serialize_string(&r.pattern)),
        ),
        (
            with_suffix(prefix, ".text"),
            format!("{}\n", serialize_string(&r.text)),
        ),
        (
            with_suffix(prefix, ".json"),
            format!("{}\n", serde_json::to_string_pretty(&sidecar)?),
        ),
    ];
    for (path, body) in &files {
        fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    let names: Vec<String> = files.iter().map(|(p, _)| p.display().to_string()).collect();

    if !check {
        if cli.json {
            print_json(
                out,
                &json!({ "schema": SCHEMA, "command": "reduce", "files": names }),
            )?;
        } else {
            for n in &names {
                writeln!(out, "wrote {n}")?;
            }
        }
        return Ok(Outcome::Found);
    }

    let c = check_reduction(&f, cli.budget)?;
    if !c.consistent() {
        bail!(
            "reduction disagrees with the solver: formula {}, op-match {}",
            if c.satisfiable { "sat" } else { "unsat" },
            c.witness.is_some()
        );
    }
    if cli.json {
        print_json(
            out,
            &json!({
                "schema": SCHEMA,
                "command": "reduce",
                "files": names,
                "satisfiable": c.satisfiable,
                "matched": c.witness.is_some(),
                "witness": witness_json(c.witness.as_ref()),
                "valuation": c.valuation,
            }),
        )?;
    } else {
        writeln!(
            out,
            "formula: {}",
            if c.satisfiable { "sat" } else { "unsat" }
        )?;
        match (&c.witness, &c.valuation) {
            (Some(w), Some(v)) => {
                writeln!(out, "op-match")?;
                write_witness(out, w)?;
                writeln!(out, "valuation: {}", dimacs_valuation(v))?;
            }
            _ => writeln!(out, "no op-match")?,
        }
    }
    Ok(c.witness.is_some().into())
}

fn cmd_oracle(cli: &Cli, out: &mut impl Write, pair: &PairArgs, report: Report) -> Result<Outcome> {
    let (p, t) = read_pair(&pair.pattern, &pair.text)?;
    if p.len() == t.len() {
        let w = oracle_match(&p, &t, cli.budget)?;
        if cli.json {
            print_json(
                out,
                &json!({
                    "schema": SCHEMA,
                    "command": "oracle",
                    "matched": w.is_some(),
                    "witness": witness_json(w.as_ref()),
                }),
            )?;
        } else {
            writeln!(out, "{}", if w.is_some() { "match" } else { "no match" })?;
            if let Some(w) = &w {
                write_witness(out, w)?;
            }
        }
        return Ok(w.is_some().into());
    }
    let starts = oracle_search(&p, &t, cli.budget)?;
    let positions: Vec<usize> = starts
        .iter()
        .map(|&s| reported(s, p.len(), report))
        .collect();
    if cli.json {
        print_json(
            out,
            &json!({
                "schema": SCHEMA,
                "command": "oracle",
                "report": report_name(report),
                "positions": positions,
            }),
        )?;
    } else {
        for pos in &positions {
            writeln!(out, "{pos}")?;
        }
    }
    Ok((!positions.is_empty()).into())
}

fn cmd_gen(cli: &Cli, out: &mut impl Write, kind: &GenKind) -> Result<Outcome> {
    match *kind {
        GenKind::Pair {
            m,
            r_max,
            alphabet,
            mode,
        } => {
            if m == 0 || r_max == 0 || alphabet == 0 {
                bail!("--m, --r-max and --alphabet must be positive");
            }
            let (x, y): (IndetString, IndetString) = gen_instance(&InstanceGenSpec {
                m,
                r_max,
                alphabet_size: alphabet,
                seed: cli.seed,
                mode: mode.into(),
            });
            if cli.json {
                print_json(
                    out,
                    &json!({ "pattern": x.to_string(), "text": y.to_string() }),
                )?;
            } else {
                writeln!(out, "{x}\n{y}")?;
            }
        }
        GenKind::Cnf3 { vars, clauses } => {
            if vars == 0 {
                bail!("--vars must be positive");
            }
            let mut f = CnfFormula::new(vars);
            for c in random_3cnf(vars, clauses, cli.seed) {
                f.add_clause(
                    c.iter()
                        .map(|&l| Lit::from_dimacs(l as i32).expect("nonzero literal"))
                        .collect(),
                )?;
            }
            writeln!(out, "c random 3cnf seed={}", cli.seed)?;
            out.write_all(write_dimacs(&f).as_bytes())?;
        }
    }
    Ok(Outcome::Found)
}
