//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines always show up in `cargo test` output.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use common::{Built, WBuilt, BOOL_PAIRS, CONCAT_PAIRS};
use unranked::harness::oracle::{
    check_boolean, check_complement, check_concat, language_equal, outcome_classes, wdta_ambiguity, Joint, PathOracle,
    Recognizer,
};
use unranked::harness::{verify_boolean_bounds, verify_concat_bound, Automaton, BoolOp, BoundReport, Kind};
use unranked::minimize::{minimize_sdta, partition_oracle_disagreements, sdta_isomorphic};
use unranked::witnesses::{derived_boolean_witnesses, make_mb, membership_tb};
use unranked::{CorpusSpec, HorizontalMachine, Letter, Sdta, Symbol, Wdta};

const H: usize = 3;
const W: usize = 3;

fn corpus(alphabet: &BTreeSet<Symbol>) -> CorpusSpec {
    CorpusSpec::new(alphabet.iter().cloned(), H, W)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn check_named(report: &BoundReport, prefix: &str) -> bool {
    let mut any = false;
    for c in report.checks.iter().filter(|c| c.name.starts_with(prefix)) {
        any = true;
        if !c.passed() {
            return false;
        }
    }
    any
}

fn criterion_1(reports: &[BoundReport]) -> Outcome {
    let counts: Vec<String> = reports.iter().map(|r| r.minimized_vertical.to_string()).collect();
    let ok = reports.iter().all(|r| check_named(r, "minimized vertical matches formula"))
        && counts == ["29", "41", "79"];
    outcome(ok, format!("minimized vertical counts {}", counts.join("/")))
}

fn criterion_2(reports: &[BoundReport]) -> Outcome {
    let ok = reports.iter().all(|r| {
        check_named(r, "reachable states match census")
            && check_named(r, "states outside the census")
            && check_named(r, "inequivalence classes")
    });
    let reach: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| c.name == "reachable states match census"))
        .map(|c| format!("{}={}", c.actual, c.expected))
        .collect();
    outcome(ok, format!("reachable=census {}; partitions discrete", reach.join(" ")))
}

fn criterion_3(concat_reports: &[BoundReport]) -> Outcome {
    let mut bad = Vec::new();
    let mut total = 0;
    for x in common::sdta_constructions() {
        let (built, r) = &x.automaton;
        let cmp = match built {
            Built::Union(a, b) => {
                let c = corpus(&a.alphabet().union(b.alphabet()).cloned().collect());
                check_boolean(a, b, r, &c, |x, y| x || y)
            }
            Built::Intersection(a, b) => {
                let c = corpus(&a.alphabet().union(b.alphabet()).cloned().collect());
                check_boolean(a, b, r, &c, |x, y| x && y)
            }
            Built::Complement(a) => check_complement(a, r, &corpus(a.alphabet())),
            Built::Concat(inner, outer) => {
                let c = corpus(&inner.alphabet().union(outer.alphabet()).cloned().collect());
                check_concat(inner, outer, r, &c)
            }
        };
        total += 1;
        if !cmp.holds() {
            bad.push(format!("{} ({:?})", x.name, cmp.counterexample.map(|t| t.to_string())));
        }
    }
    for x in common::wdta_constructions() {
        let (built, r) = &x.automaton;
        let cmp = match built {
            WBuilt::Union(a, b) => {
                let c = corpus(&a.alphabet().union(b.alphabet()).cloned().collect());
                check_boolean(a, b, r, &c, |x, y| x || y)
            }
            WBuilt::Intersection(a, b) => {
                let c = corpus(&a.alphabet().union(b.alphabet()).cloned().collect());
                check_boolean(a, b, r, &c, |x, y| x && y)
            }
        };
        total += 1;
        if !cmp.holds() {
            bad.push(format!("{} ({:?})", x.name, cmp.counterexample.map(|t| t.to_string())));
        }
    }
    for r in concat_reports {
        total += 1;
        if !check_named(r, "oracle disagreements") {
            bad.push(r.operation.clone());
        }
    }
    if bad.is_empty() {
        outcome(true, format!("{total} constructions agree with their oracles (height<={H}, width<={W})"))
    } else {
        outcome(false, format!("counterexamples: {}", bad.join("; ")))
    }
}

fn criterion_4() -> (Outcome, Vec<BoundReport>) {
    let mut reports = Vec::new();
    for (m, n) in BOOL_PAIRS {
        let (a, b) = derived_boolean_witnesses(m, n).unwrap();
        let (a, b) = (Automaton::Sdta(a), Automaton::Sdta(b));
        for op in [BoolOp::Union, BoolOp::Intersection] {
            reports.push(verify_boolean_bounds(op, Kind::Sdta, &a, &b, H, W, None).unwrap());
        }
    }
    let ok = reports
        .iter()
        .all(|r| check_named(r, "constructed vertical") && check_named(r, "horizontal for"));
    let mins: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {} <= {}", r.operation, r.minimized_vertical, r.formula_vertical))
        .collect();
    (outcome(ok, format!("bounds hold; minimized {}", mins.join(", "))), reports)
}

fn criterion_5() -> Outcome {
    let alphabet: BTreeSet<Symbol> = ["a", "b", "c", "d"].iter().map(|s| Symbol::new(s).unwrap()).collect();
    let c = corpus(&alphabet);
    let mut details = Vec::new();
    let mut ok = true;
    for n in [2, 3] {
        let mb = make_mb(n).unwrap();
        let oracle = PathOracle::tb(n).unwrap();
        let classes = outcome_classes(&Joint(&mb, &oracle), &c);
        let mismatches = classes
            .iter()
            .filter(|k| mb.accepting(&k.out.0) != oracle.accepting(&k.out.1))
            .count();
        // the evaluator must agree with the membership function itself
        let drift = classes
            .iter()
            .filter(|k| membership_tb(&k.witness, n).unwrap() != oracle.accepting(&k.out.1))
            .count();
        ok &= mismatches == 0 && drift == 0;
        details.push(format!("n={n}: {mismatches} mismatches over {} result classes", classes.len()));
    }
    outcome(ok, details.join("; "))
}

fn criterion_6() -> Outcome {
    let mut candidates: Vec<(String, Sdta)> = common::inputs().into_iter().map(|x| (x.name, x.automaton)).collect();
    candidates.extend(common::sdta_constructions().into_iter().map(|x| (x.name, x.automaton.1)));
    let mut checked = 0;
    let mut bad = Vec::new();
    for (name, a) in candidates.into_iter().filter(|(_, a)| a.num_states() <= 12) {
        checked += 1;
        let m = minimize_sdta(&a);
        if !sdta_isomorphic(&minimize_sdta(&m), &m) {
            bad.push(format!("{name}: not idempotent"));
        }
        if !language_equal(&a, &m, &corpus(a.alphabet())).holds() {
            bad.push(format!("{name}: language changed"));
        }
        let d = partition_oracle_disagreements(&a, 4, 3);
        if !d.is_empty() {
            bad.push(format!("{name}: {} partition/oracle disagreements", d.len()));
        }
    }
    if bad.is_empty() {
        outcome(true, format!("{checked} automata: idempotent, language kept, partition = context oracle"))
    } else {
        outcome(false, bad.join("; "))
    }
}

/// Exhaustive search for a word of length at most `max_len` accepted by
/// both machines. Prefixes that kill either machine are not extended.
fn common_word_upto(m1: &HorizontalMachine, m2: &HorizontalMachine, letters: &[Letter], max_len: usize) -> bool {
    fn go(
        m1: &HorizontalMachine,
        m2: &HorizontalMachine,
        letters: &[Letter],
        h1: unranked::HState,
        h2: unranked::HState,
        left: usize,
    ) -> bool {
        if m1.is_accepting(h1) && m2.is_accepting(h2) {
            return true;
        }
        left > 0
            && letters.iter().any(|l| match (m1.step(h1, l), m2.step(h2, l)) {
                (Some(a), Some(b)) => go(m1, m2, letters, a, b, left - 1),
                _ => false,
            })
    }
    go(m1, m2, letters, m1.start(), m2.start(), max_len)
}

fn disjointness_agrees(w: &Wdta) -> (usize, usize) {
    let overlapping: BTreeSet<(Symbol, unranked::VState, unranked::VState)> =
        w.overlaps().into_iter().map(|o| (o.symbol, o.first, o.second)).collect();
    let (mut pairs, mut disagreements) = (0, 0);
    for sym in w.alphabet() {
        let ms: Vec<_> = w.hlangs_for(sym).collect();
        for (i, (q1, m1)) in ms.iter().enumerate() {
            for (q2, m2) in &ms[i + 1..] {
                let letters: Vec<Letter> = m1.letters().union(&m2.letters()).cloned().collect();
                let found = common_word_upto(m1, m2, &letters, 6);
                let decided = overlapping.contains(&(sym.clone(), *q1, *q2)) || overlapping.contains(&(sym.clone(), *q2, *q1));
                pairs += 1;
                if found != decided {
                    disagreements += 1;
                }
            }
        }
    }
    (pairs, disagreements)
}

fn criterion_7() -> Outcome {
    let mut wdtas = common::all_wdtas();
    wdtas.push(common::overlapping_wdta());
    let (mut pairs, mut disagreements, mut ambiguous, mut valid) = (0, 0, 0, 0);
    let n = wdtas.len();
    for x in &wdtas {
        let (p, d) = disjointness_agrees(&x.automaton);
        pairs += p;
        disagreements += d;
        if x.automaton.is_valid() {
            valid += 1;
            ambiguous += wdta_ambiguity(&x.automaton, &corpus(x.automaton.alphabet())).0;
        }
    }
    outcome(
        disagreements == 0 && ambiguous == 0 && valid == n - 1,
        format!(
            "{pairs} acceptor pairs in {n} WDTAs: {disagreements} disagreements with enumeration; {ambiguous} ambiguous results on {valid} valid WDTAs"
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let concat: Vec<BoundReport> = CONCAT_PAIRS
        .iter()
        .map(|&(m, n)| verify_concat_bound(m, n, H, W).unwrap())
        .collect();
    let (c4, _) = criterion_4();
    let results = [
        criterion_1(&concat),
        criterion_2(&concat),
        criterion_3(&concat),
        c4,
        criterion_5(),
        criterion_6(),
        criterion_7(),
    ];
    let mut all = true;
    for (i, r) in results.iter().enumerate() {
        all &= r.passed;
        println!("criterion {}: {} - {}", i + 1, if r.passed { "PASS" } else { "FAIL" }, r.detail);
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
