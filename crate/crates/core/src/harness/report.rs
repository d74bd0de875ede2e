//! Bound-verification experiments and their reports.

use std::collections::BTreeSet;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::constructions::{
    concat_horizontal_bound, concat_vertical_bound, prepare_pair, prepare_wdta_pair, sdta_concat_detailed,
    sdta_intersection, sdta_union, wdta_intersection, wdta_intersection_horizontal_bound, wdta_union,
    wdta_union_horizontal_bound,
};
use crate::error::{ConstructionError, WitnessError};
use crate::harness::oracle::{check_boolean, check_concat, wdta_ambiguity, Automaton, Comparison};
use crate::minimize::{inequivalence_partition, minimize_sdta, reachable_vertical};
use crate::sdta::{Sdta, Severity, SizePair};
use crate::trees::{CorpusSpec, Symbol};
use crate::wdta::{sdta_to_wdta, wdta_to_sdta, Wdta};
use crate::witnesses::{concat_lower_bound, concat_state_census, make_ma, make_mb};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `actual <= expected`
    AtMost,
    /// `actual == expected`
    Exact,
}

/// One numeric check. The verdict is always recomputed from the numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub actual: u128,
    pub expected: u128,
}

impl Check {
    pub fn at_most(name: impl Into<String>, actual: impl Into<u128>, bound: impl Into<u128>) -> Check {
        Check {
            name: name.into(),
            kind: CheckKind::AtMost,
            actual: actual.into(),
            expected: bound.into(),
        }
    }

    pub fn exact(name: impl Into<String>, actual: impl Into<u128>, expected: impl Into<u128>) -> Check {
        Check {
            name: name.into(),
            kind: CheckKind::Exact,
            actual: actual.into(),
            expected: expected.into(),
        }
    }

    pub fn passed(&self) -> bool {
        match self.kind {
            CheckKind::AtMost => self.actual <= self.expected,
            CheckKind::Exact => self.actual == self.expected,
        }
    }
}

impl Serialize for Check {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Check", 5)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("kind", &self.kind)?;
        // u128 does not survive every JSON reader
        st.serialize_field("actual", &self.actual.to_string())?;
        st.serialize_field("expected", &self.expected.to_string())?;
        st.serialize_field("passed", &self.passed())?;
        st.end()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let rel = match self.kind {
            CheckKind::AtMost => "<=",
            CheckKind::Exact => "==",
        };
        write!(f, "{verdict} {}: {} {rel} {}", self.name, self.actual, self.expected)
    }
}

/// Numbers and verdicts of one experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub operation: String,
    /// Sizes of the inputs as the construction sees them.
    pub inputs: Vec<SizePair>,
    pub constructed: SizePair,
    pub formula_vertical: u128,
    /// Sum over symbols of the per-symbol horizontal bounds.
    pub formula_horizontal: u128,
    pub minimized_vertical: usize,
    pub checks: Vec<Check>,
    /// Counterexamples and other remarks, in check order.
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Plain-text rendering; identical inputs give identical text.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundReport", 9)?;
        st.serialize_field("operation", &self.operation)?;
        st.serialize_field("inputs", &self.inputs)?;
        st.serialize_field("constructed", &self.constructed)?;
        st.serialize_field("formula_vertical", &self.formula_vertical.to_string())?;
        st.serialize_field("formula_horizontal", &self.formula_horizontal.to_string())?;
        st.serialize_field("minimized_vertical", &self.minimized_vertical)?;
        st.serialize_field("checks", &self.checks)?;
        st.serialize_field("notes", &self.notes)?;
        st.serialize_field("passed", &self.passed())?;
        st.end()
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "operation: {}", self.operation)?;
        let inputs: Vec<String> = self.inputs.iter().map(ToString::to_string).collect();
        writeln!(f, "inputs: {}", inputs.join(" "))?;
        writeln!(f, "constructed: {}", self.constructed)?;
        writeln!(
            f,
            "formula: vertical {} horizontal {}",
            self.formula_vertical, self.formula_horizontal
        )?;
        writeln!(f, "minimized vertical: {}", self.minimized_vertical)?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "verdict: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("{0}")]
    Ambiguous(String),
}

fn corpus_over(alphabet: &BTreeSet<Symbol>, max_height: usize, max_width: usize) -> CorpusSpec {
    CorpusSpec::new(alphabet.iter().cloned().collect::<Vec<_>>(), max_height, max_width)
}

fn oracle_check(name: &str, cmp: Comparison, checks: &mut Vec<Check>, notes: &mut Vec<String>) {
    if let Some(t) = &cmp.counterexample {
        notes.push(format!("{name}: counterexample {t}"));
    }
    checks.push(Check::exact(name, cmp.violations as u128, 0u128));
}

/// Concatenation of `T_A` (inner, `make_ma(m)`) and `T_B` (outer,
/// `make_mb(n)`): construction bounds, exact minimized size, oracle
/// correctness on the corpus, reachable states against the census, and
/// pairwise inequivalence.
pub fn verify_concat_bound(m: usize, n: usize, max_height: usize, max_width: usize) -> Result<BoundReport, VerifyError> {
    let ma = make_ma(m)?;
    let mb = make_mb(n)?;
    let res = sdta_concat_detailed(&ma, &mb)?;
    let c = &res.automaton;
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    let vb = concat_vertical_bound(res.outer_size.vertical, res.inner_size.vertical);
    checks.push(Check::at_most("constructed vertical within bound", c.num_states() as u128, vb));
    let (po, pi) = prepare_pair(&mb, &ma);
    let mut hb_total: u128 = 0;
    for sym in c.alphabet() {
        let hsize = |a: &Sdta| a.classifier(sym).map_or(0, |d| d.num_states());
        let hb = concat_horizontal_bound(hsize(&po), hsize(&pi));
        hb_total = hb_total.saturating_add(hb);
        let actual = c.classifier(sym).map_or(0, |d| d.num_states());
        checks.push(Check::at_most(format!("horizontal for {sym} within bound"), actual as u128, hb));
    }

    let min = minimize_sdta(c);
    checks.push(Check::exact(
        "minimized vertical matches formula",
        min.num_states() as u128,
        concat_lower_bound(m, n),
    ));

    let corpus = corpus_over(c.alphabet(), max_height, max_width);
    oracle_check("oracle disagreements", check_concat(&ma, &mb, c, &corpus), &mut checks, &mut notes);

    let census = concat_state_census(m, n)?;
    let reachable: BTreeSet<_> = reachable_vertical(c)
        .into_iter()
        .map(|v| res.states[v.index()].clone())
        .collect();
    checks.push(Check::exact("reachable states match census", reachable.len() as u128, census.len() as u128));
    checks.push(Check::exact(
        "states outside the census",
        reachable.symmetric_difference(&census).count() as u128,
        0u128,
    ));
    let partition = inequivalence_partition(c);
    let useful = partition.len() - usize::from(partition.useless_block().is_some());
    checks.push(Check::exact("inequivalence classes", useful as u128, reachable.len() as u128));

    Ok(BoundReport {
        operation: format!("concat (m={m}, n={n})"),
        inputs: vec![res.inner_size, res.outer_size],
        constructed: c.size(),
        formula_vertical: vb,
        formula_horizontal: hb_total,
        minimized_vertical: min.num_states(),
        checks,
        notes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolOp {
    Union,
    Intersection,
}

impl BoolOp {
    fn name(self) -> &'static str {
        match self {
            BoolOp::Union => "union",
            BoolOp::Intersection => "intersection",
        }
    }

    fn combine(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::Union => a || b,
            BoolOp::Intersection => a && b,
        }
    }

    fn vertical_bound(self, q1: usize, q2: usize) -> u128 {
        let (q1, q2) = (q1 as u128, q2 as u128);
        match self {
            BoolOp::Union => (q1 + 1) * (q2 + 1) - 1,
            BoolOp::Intersection => q1 * q2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Sdta,
    Wdta,
}

fn as_sdta(a: &Automaton) -> Result<Sdta, VerifyError> {
    match a {
        Automaton::Sdta(s) => Ok(s.clone()),
        Automaton::Wdta(w) => wdta_to_sdta(w).map_err(|e| VerifyError::Ambiguous(e.to_string())),
    }
}

fn as_wdta(a: &Automaton) -> Wdta {
    match a {
        Automaton::Sdta(s) => sdta_to_wdta(s),
        Automaton::Wdta(w) => w.clone(),
    }
}

/// Union or intersection in the chosen model: size bounds, oracle
/// correctness on the corpus and the minimized vertical count. Inputs of
/// the other model are converted first. With `expected_minimized` the
/// minimized count must match exactly.
pub fn verify_boolean_bounds(
    op: BoolOp,
    kind: Kind,
    a1: &Automaton,
    a2: &Automaton,
    max_height: usize,
    max_width: usize,
    expected_minimized: Option<usize>,
) -> Result<BoundReport, VerifyError> {
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let alphabet: BTreeSet<Symbol> = a1.alphabet().union(a2.alphabet()).cloned().collect();
    let corpus = corpus_over(&alphabet, max_height, max_width);
    let report = match kind {
        Kind::Sdta => {
            let (s1, s2) = (as_sdta(a1)?, as_sdta(a2)?);
            let r = match op {
                BoolOp::Union => sdta_union(&s1, &s2)?,
                BoolOp::Intersection => sdta_intersection(&s1, &s2)?,
            };
            let (b1, b2) = prepare_pair(&s1, &s2);
            let vb = op.vertical_bound(b1.num_states(), b2.num_states());
            checks.push(Check::at_most("constructed vertical within bound", r.num_states() as u128, vb));
            let mut hb_total: u128 = 0;
            for sym in r.alphabet() {
                let h1 = b1.classifier(sym).map_or(0, |d| d.num_states());
                let h2 = b2.classifier(sym).map_or(0, |d| d.num_states());
                let hb = match op {
                    BoolOp::Union => op.vertical_bound(h1, h2),
                    // an empty product still needs one state
                    BoolOp::Intersection => op.vertical_bound(h1, h2).max(1),
                };
                hb_total += hb;
                let actual = r.classifier(sym).map_or(0, |d| d.num_states());
                checks.push(Check::at_most(format!("horizontal for {sym} within bound"), actual as u128, hb));
            }
            let cmp = check_boolean(&s1, &s2, &r, &corpus, |a, b| op.combine(a, b));
            oracle_check("oracle disagreements", cmp, &mut checks, &mut notes);
            let min = minimize_sdta(&r);
            BoundReport {
                operation: format!("sdta {}", op.name()),
                inputs: vec![b1.size(), b2.size()],
                constructed: r.size(),
                formula_vertical: vb,
                formula_horizontal: hb_total,
                minimized_vertical: min.num_states(),
                checks: Vec::new(),
                notes: Vec::new(),
            }
        }
        Kind::Wdta => {
            let (w1, w2) = (as_wdta(a1), as_wdta(a2));
            let r = match op {
                BoolOp::Union => wdta_union(&w1, &w2)?,
                BoolOp::Intersection => wdta_intersection(&w1, &w2)?,
            };
            let (b1, b2) = prepare_wdta_pair(&w1, &w2)?;
            let vb = op.vertical_bound(b1.num_states(), b2.num_states());
            checks.push(Check::at_most("constructed vertical within bound", r.num_states() as u128, vb));
            let hb = match op {
                BoolOp::Union => wdta_union_horizontal_bound(&b1, &b2),
                BoolOp::Intersection => wdta_intersection_horizontal_bound(&b1, &b2),
            };
            checks.push(Check::at_most("horizontal within bound", r.size().horizontal as u128, hb));
            let errors = r.validate().into_iter().filter(|v| v.severity == Severity::Error).count();
            for v in r.validate().iter().filter(|v| v.severity == Severity::Error) {
                notes.push(v.to_string());
            }
            checks.push(Check::exact("validation errors", errors as u128, 0u128));
            let (amb, witness) = wdta_ambiguity(&r, &corpus);
            if let Some(t) = witness {
                notes.push(format!("ambiguity: {t}"));
            }
            checks.push(Check::exact("ambiguous evaluations", amb as u128, 0u128));
            let cmp = check_boolean(&w1, &w2, &r, &corpus, |a, b| op.combine(a, b));
            oracle_check("oracle disagreements", cmp, &mut checks, &mut notes);
            let min = wdta_to_sdta(&r)
                .map(|s| minimize_sdta(&s).num_states())
                .map_err(|e| VerifyError::Ambiguous(e.to_string()))?;
            BoundReport {
                operation: format!("wdta {}", op.name()),
                inputs: vec![b1.size(), b2.size()],
                constructed: r.size(),
                formula_vertical: vb,
                formula_horizontal: hb,
                minimized_vertical: min,
                checks: Vec::new(),
                notes: Vec::new(),
            }
        }
    };
    if let Some(e) = expected_minimized {
        checks.push(Check::exact("minimized vertical", report.minimized_vertical as u128, e as u128));
    }
    Ok(BoundReport {
        checks,
        notes,
        ..report
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witnesses::derived_boolean_witnesses;

    #[test]
    fn verdicts_follow_the_numbers() {
        let mut c = Check::at_most("x", 3u128, 3u128);
        assert!(c.passed());
        c.actual = 4;
        assert!(!c.passed());
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"passed\":false"), "{json}");
    }

    #[test]
    fn concat_two_two() {
        let r = verify_concat_bound(2, 2, 2, 2).unwrap();
        assert_eq!(r.minimized_vertical, 29);
        assert!(r.passed(), "{r}");
        assert_eq!(r.render(), verify_concat_bound(2, 2, 2, 2).unwrap().render());
    }

    #[test]
    fn boolean_witnesses_two_three() {
        let (a, b) = derived_boolean_witnesses(2, 3).unwrap();
        let (a, b) = (Automaton::Sdta(a), Automaton::Sdta(b));
        let u = verify_boolean_bounds(BoolOp::Union, Kind::Sdta, &a, &b, 3, 3, Some(11)).unwrap();
        assert!(u.passed(), "{u}");
        assert_eq!(u.formula_vertical, 11);
        let i = verify_boolean_bounds(BoolOp::Intersection, Kind::Sdta, &a, &b, 3, 3, Some(6)).unwrap();
        assert!(i.passed(), "{i}");
        assert_eq!(i.formula_vertical, 6);
        let w = verify_boolean_bounds(BoolOp::Union, Kind::Wdta, &a, &b, 3, 3, Some(11)).unwrap();
        assert!(w.passed(), "{w}");
    }
}
