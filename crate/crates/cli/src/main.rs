//! `unranked`: evaluate, combine, minimize and check tree automata stored in
//! the line-oriented automaton format.
//!
//! Exit codes: 0 when every verdict passes, 1 when some verdict fails, 2 on
//! usage or parse errors.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use unranked::constructions::{sdta_concat, sdta_intersection, sdta_union, wdta_intersection, wdta_union};
use unranked::harness::oracle::{check_boolean, check_complement, check_concat, language_equal};
use unranked::harness::{
    load_automaton, save_automaton, serialize_automaton, verify_boolean_bounds, verify_concat_bound, Automaton,
    BoolOp, BoundReport, Comparison, Kind,
};
use unranked::minimize::minimize_sdta;
use unranked::sdta::Severity;
use unranked::trees::symbols;
use unranked::wdta::{sdta_to_wdta, wdta_to_sdta};
use unranked::witnesses::{derived_boolean_witnesses, make_ma, make_mb};
use unranked::{CorpusSpec, Sdta, Symbol, Tree};

/// `println!` that ignores a closed stdout, as when piping into `head`.
macro_rules! out {
    (no_newline $e:expr) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), "{}", $e);
    }};
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "unranked", version, about = "Deterministic unranked tree automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct CorpusArgs {
    /// Largest tree height in the corpus (a leaf has height 0).
    #[arg(long, default_value_t = 3)]
    max_height: usize,
    /// Largest number of children per node in the corpus.
    #[arg(long, default_value_t = 3)]
    max_width: usize,
}

#[derive(Args)]
struct ReportArg {
    /// Also write a JSON report to this file.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an automaton on trees given in term syntax, e.g. `b(a,a)`.
    Eval {
        automaton: PathBuf,
        #[arg(required = true)]
        trees: Vec<String>,
    },
    /// Build a union, intersection, concatenation or complement.
    Op {
        #[command(subcommand)]
        op: OpCommand,
    },
    /// Minimize an automaton (WDTAs are converted first).
    Minimize {
        automaton: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a witness automaton.
    Witness {
        #[arg(value_enum)]
        family: Family,
        /// Size of `MA` or of the first divisibility automaton.
        #[arg(short, default_value_t = 2)]
        m: usize,
        /// Size of `MB` or of the second divisibility automaton.
        #[arg(short, default_value_t = 2)]
        n: usize,
        /// Output file; for BOOL, a prefix producing `<prefix>_a.aut` and `<prefix>_b.aut`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Emit the weakly deterministic form.
        #[arg(long)]
        wdta: bool,
    },
    /// Run a bound experiment.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Compare two languages on the bounded corpus.
    Equal {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        report: ReportArg,
    },
    /// List the bounded corpus, optionally only the trees an automaton accepts.
    Enumerate {
        /// Comma-separated labels; defaults to the automaton's alphabet.
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
        #[arg(long)]
        accepted_by: Option<PathBuf>,
        /// Print only the number of trees.
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        corpus: CorpusArgs,
    },
}

#[derive(Subcommand)]
enum OpCommand {
    Union(BinaryOp),
    Intersect(BinaryOp),
    /// `inner` substituted for one leaf of a tree of `outer`.
    Concat {
        inner: PathBuf,
        outer: PathBuf,
        #[command(flatten)]
        common: OpCommon,
    },
    Complement {
        automaton: PathBuf,
        #[command(flatten)]
        common: OpCommon,
    },
}

#[derive(Args)]
struct BinaryOp {
    first: PathBuf,
    second: PathBuf,
    #[command(flatten)]
    common: OpCommon,
}

#[derive(Args)]
struct OpCommon {
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Check the result against the defining oracle on the corpus.
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Minimized size of `MA(m)·MB(n)` against the closed formula, plus
    /// construction bounds, oracle, census and inequivalence checks.
    ConcatBound {
        #[arg(short, default_value_t = 2)]
        m: usize,
        #[arg(short, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Size bounds and oracle checks for union or intersection. Without
    /// files, uses the divisibility witnesses for `m` and `n`.
    BooleanBounds {
        #[arg(long, value_enum)]
        op: OpArg,
        #[arg(long, value_enum, default_value = "sdta")]
        kind: KindArg,
        first: Option<PathBuf>,
        second: Option<PathBuf>,
        #[arg(short, default_value_t = 2)]
        m: usize,
        #[arg(short, default_value_t = 3)]
        n: usize,
        /// Require this minimized vertical count.
        #[arg(long)]
        expect_minimized: Option<usize>,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        report: ReportArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    #[value(name = "MA")]
    Ma,
    #[value(name = "MB")]
    Mb,
    #[value(name = "BOOL")]
    Bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Union,
    Intersection,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sdta,
    Wdta,
}

/// Failure of a command; verdicts and usage problems exit differently.
enum Failure {
    Verdict,
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn verdict(ok: bool) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn load(path: &Path) -> Result<Automaton, Failure> {
    let a = load_automaton(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let violations = match &a {
        Automaton::Sdta(s) => s.validate(),
        Automaton::Wdta(w) => w.validate(),
    };
    let errors: Vec<String> = violations
        .iter()
        .filter(|v| v.severity == Severity::Error)
        .map(ToString::to_string)
        .collect();
    if errors.is_empty() {
        Ok(a)
    } else {
        Err(Failure::Usage(format!("{}: invalid automaton\n  {}", path.display(), errors.join("\n  "))))
    }
}

fn corpus_for(alphabet: impl IntoIterator<Item = Symbol>, c: CorpusArgs) -> CorpusSpec {
    CorpusSpec::new(alphabet, c.max_height, c.max_width)
}

fn joint_alphabet(a: &Automaton, b: &Automaton) -> BTreeSet<Symbol> {
    a.alphabet().union(b.alphabet()).cloned().collect()
}

fn write_report<T: Serialize>(arg: &ReportArg, value: &T) -> Outcome {
    if let Some(path) = &arg.report {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn emit(a: &Automaton, output: Option<&Path>) -> Outcome {
    match output {
        Some(p) => save_automaton(a, p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            out!(no_newline serialize_automaton(a));
            Ok(())
        }
    }
}

fn as_sdta(a: &Automaton, what: &str) -> Result<Sdta, Failure> {
    match a {
        Automaton::Sdta(s) => Ok(s.clone()),
        Automaton::Wdta(w) => wdta_to_sdta(w).map_err(|e| Failure::Usage(format!("{what}: {e}"))),
    }
}

#[derive(Serialize)]
struct ComparisonReport {
    check: String,
    violations: usize,
    counterexample: Option<String>,
    passed: bool,
}

fn comparison_report(check: &str, cmp: &Comparison) -> ComparisonReport {
    ComparisonReport {
        check: check.to_string(),
        violations: cmp.violations,
        counterexample: cmp.counterexample.as_ref().map(ToString::to_string),
        passed: cmp.holds(),
    }
}

fn print_comparison(r: &ComparisonReport) {
    let tag = if r.passed { "PASS" } else { "FAIL" };
    out!("{tag} {}: {} disagreeing result classes", r.check, r.violations);
    if let Some(t) = &r.counterexample {
        out!("counterexample: {t}");
    }
}

fn eval(path: &Path, trees: &[String]) -> Outcome {
    let a = load(path)?;
    for text in trees {
        let t = Tree::parse(text)?;
        let line = match &a {
            Automaton::Sdta(s) => {
                let state = s.eval(&t).map_or("none".to_string(), |v| s.state_name(v));
                let verdict = if s.accepts(&t) { "accept" } else { "reject" };
                format!("{verdict} state={state}")
            }
            Automaton::Wdta(w) => match w.eval(&t) {
                Ok(v) => {
                    let state = v.map_or("none".to_string(), |v| w.state_name(v));
                    let verdict = if v.is_some_and(|v| w.is_final(v)) { "accept" } else { "reject" };
                    format!("{verdict} state={state}")
                }
                Err(e) => format!("ambiguous: {e}"),
            },
        };
        out!("{t}\t{line}");
    }
    Ok(())
}

fn op(cmd: OpCommand) -> Outcome {
    let (result, common, check): (Automaton, OpCommon, Option<ComparisonReport>) = match cmd {
        OpCommand::Union(b) => binary(b, BoolOp::Union)?,
        OpCommand::Intersect(b) => binary(b, BoolOp::Intersection)?,
        OpCommand::Concat { inner, outer, common } => {
            let (i, o) = (load(&inner)?, load(&outer)?);
            let (si, so) = (as_sdta(&i, "inner")?, as_sdta(&o, "outer")?);
            let r = sdta_concat(&si, &so)?;
            let check = common.check.then(|| {
                let c = corpus_for(joint_alphabet(&i, &o), common.corpus);
                comparison_report("concatenation oracle", &check_concat(&si, &so, &r, &c))
            });
            (Automaton::Sdta(r), common, check)
        }
        OpCommand::Complement { automaton, common } => {
            let a = load(&automaton)?;
            let s = as_sdta(&a, "operand")?;
            let r = s.complement();
            let check = common.check.then(|| {
                let c = corpus_for(a.alphabet().iter().cloned(), common.corpus);
                comparison_report("complement oracle", &check_complement(&s, &r, &c))
            });
            let r = match a {
                Automaton::Sdta(_) => Automaton::Sdta(r),
                Automaton::Wdta(_) => Automaton::Wdta(sdta_to_wdta(&r)),
            };
            (r, common, check)
        }
    };
    emit(&result, common.output.as_deref())?;
    match check {
        Some(r) => {
            if common.output.is_some() {
                print_comparison(&r);
            } else {
                // keep stdout parseable as an automaton file
                eprintln!("{} {}: {} disagreeing result classes", if r.passed { "PASS" } else { "FAIL" }, r.check, r.violations);
            }
            write_report(&common.report, &r)?;
            verdict(r.passed)
        }
        None => Ok(()),
    }
}

fn binary(b: BinaryOp, op: BoolOp) -> Result<(Automaton, OpCommon, Option<ComparisonReport>), Failure> {
    let (x, y) = (load(&b.first)?, load(&b.second)?);
    let c = corpus_for(joint_alphabet(&x, &y), b.common.corpus);
    let combine = move |p: bool, q: bool| match op {
        BoolOp::Union => p || q,
        BoolOp::Intersection => p && q,
    };
    let name = match op {
        BoolOp::Union => "union oracle",
        BoolOp::Intersection => "intersection oracle",
    };
    let (result, check) = match (&x, &y) {
        (Automaton::Wdta(w1), Automaton::Wdta(w2)) => {
            let r = match op {
                BoolOp::Union => wdta_union(w1, w2)?,
                BoolOp::Intersection => wdta_intersection(w1, w2)?,
            };
            let check = b
                .common
                .check
                .then(|| comparison_report(name, &check_boolean(w1, w2, &r, &c, combine)));
            (Automaton::Wdta(r), check)
        }
        _ => {
            let (s1, s2) = (as_sdta(&x, "first operand")?, as_sdta(&y, "second operand")?);
            let r = match op {
                BoolOp::Union => sdta_union(&s1, &s2)?,
                BoolOp::Intersection => sdta_intersection(&s1, &s2)?,
            };
            let check = b
                .common
                .check
                .then(|| comparison_report(name, &check_boolean(&s1, &s2, &r, &c, combine)));
            (Automaton::Sdta(r), check)
        }
    };
    Ok((result, b.common, check))
}

fn minimize(path: &Path, output: Option<&Path>) -> Outcome {
    let a = load(path)?;
    let m = minimize_sdta(&as_sdta(&a, "automaton")?);
    emit(&Automaton::Sdta(m), output)
}

fn witness(family: Family, m: usize, n: usize, output: Option<&Path>, wdta: bool) -> Outcome {
    let wrap = |s: Sdta| if wdta { Automaton::Wdta(sdta_to_wdta(&s)) } else { Automaton::Sdta(s) };
    match family {
        Family::Ma => emit(&wrap(make_ma(m)?), output),
        Family::Mb => emit(&wrap(make_mb(n)?), output),
        Family::Bool => {
            let (a, b) = derived_boolean_witnesses(m, n)?;
            match output {
                Some(prefix) => {
                    let name = |suffix: &str| {
                        let mut p = prefix.as_os_str().to_owned();
                        p.push(suffix);
                        PathBuf::from(p)
                    };
                    emit(&wrap(a), Some(&name("_a.aut")))?;
                    emit(&wrap(b), Some(&name("_b.aut")))
                }
                None => {
                    out!("# first automaton (m = {m})");
                    emit(&wrap(a), None)?;
                    out!("# second automaton (n = {n})");
                    emit(&wrap(b), None)
                }
            }
        }
    }
}

fn show(report: &BoundReport) {
    out!("{report}");
}

fn verify(what: VerifyCommand) -> Outcome {
    match what {
        VerifyCommand::ConcatBound { m, n, corpus, report } => {
            let r = verify_concat_bound(m, n, corpus.max_height, corpus.max_width)?;
            show(&r);
            write_report(&report, &r)?;
            verdict(r.passed())
        }
        VerifyCommand::BooleanBounds {
            op,
            kind,
            first,
            second,
            m,
            n,
            expect_minimized,
            corpus,
            report,
        } => {
            let (a, b) = match (first, second) {
                (Some(f), Some(s)) => (load(&f)?, load(&s)?),
                (None, None) => {
                    let (a, b) = derived_boolean_witnesses(m, n)?;
                    (Automaton::Sdta(a), Automaton::Sdta(b))
                }
                _ => return Err(Failure::Usage("give both automaton files or neither".into())),
            };
            let op = match op {
                OpArg::Union => BoolOp::Union,
                OpArg::Intersection => BoolOp::Intersection,
            };
            let kind = match kind {
                KindArg::Sdta => Kind::Sdta,
                KindArg::Wdta => Kind::Wdta,
            };
            let r = verify_boolean_bounds(op, kind, &a, &b, corpus.max_height, corpus.max_width, expect_minimized)?;
            show(&r);
            write_report(&report, &r)?;
            verdict(r.passed())
        }
    }
}

fn equal(first: &Path, second: &Path, corpus: CorpusArgs, report: &ReportArg) -> Outcome {
    let (x, y) = (load(first)?, load(second)?);
    let c = corpus_for(joint_alphabet(&x, &y), corpus);
    let r = comparison_report("language equality", &language_equal(&x, &y, &c));
    print_comparison(&r);
    write_report(report, &r)?;
    verdict(r.passed)
}

fn enumerate(alphabet: &[String], accepted_by: Option<&Path>, count: bool, corpus: CorpusArgs) -> Outcome {
    let a = accepted_by.map(load).transpose()?;
    let alphabet: Vec<Symbol> = if alphabet.is_empty() {
        match &a {
            Some(a) => a.alphabet().iter().cloned().collect(),
            None => return Err(Failure::Usage("give --alphabet or --accepted-by".into())),
        }
    } else {
        symbols(alphabet.iter().map(String::as_str))?
    };
    let c = corpus_for(alphabet, corpus);
    let trees = c.trees().filter(|t| a.as_ref().map_or(true, |a| a.accepts(t)));
    if count {
        out!("{}", trees.count());
    } else {
        use std::io::Write as _;
        let mut stdout = std::io::stdout().lock();
        for t in trees {
            if writeln!(stdout, "{t}").is_err() {
                break;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Eval { automaton, trees } => eval(&automaton, &trees),
        Command::Op { op: cmd } => op(cmd),
        Command::Minimize { automaton, output } => minimize(&automaton, output.as_deref()),
        Command::Witness {
            family,
            m,
            n,
            output,
            wdta,
        } => witness(family, m, n, output.as_deref(), wdta),
        Command::Verify { what } => verify(what),
        Command::Equal {
            first,
            second,
            corpus,
            report,
        } => equal(&first, &second, corpus, &report),
        Command::Enumerate {
            alphabet,
            accepted_by,
            count,
            corpus,
        } => enumerate(&alphabet, accepted_by.as_deref(), count, corpus),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
