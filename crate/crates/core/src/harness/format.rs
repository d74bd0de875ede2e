//! Line-oriented automaton files.
//!
//! ```text
//! kind sdta
//! alphabet a b
//! vstates 2
//! final 1
//! hdfa a
//! hstates 1
//! start 0
//! out 0 0
//! end
//! hdfa b
//! hstates 2
//! start 0
//! t 0 state:0 1
//! out 1 1
//! end
//! ```
//!
//! WDTA files use `kind wdta`, blocks headed `hdfa <sym> <vstate>` and an
//! `accept <id> ...` line instead of `out` lines. `#` starts a comment.
//! [`save_automaton`] writes the canonical form: symbols in order, then
//! transitions sorted by source state and letter.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::FormatError;
use crate::harness::oracle::Automaton;
use crate::horizontal::{HState, HorizontalMachine, Letter, VState};
use crate::sdta::Sdta;
use crate::trees::Symbol;
use crate::wdta::Wdta;

/// Errors from reading or writing automaton files.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Format(#[from] FormatError),
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, word: &str, what: &str) -> Result<T, FormatError> {
    word.parse()
        .map_err(|_| err(line, format!("expected {what}, found {word:?}")))
}

fn symbol(line: usize, word: &str) -> Result<Symbol, FormatError> {
    Symbol::new(word).map_err(|e| err(line, e.to_string()))
}

fn letter(line: usize, word: &str) -> Result<Letter, FormatError> {
    if let Some(v) = word.strip_prefix("state:") {
        Ok(Letter::State(VState(number(line, v, "a vertical state id")?)))
    } else if let Some(s) = word.strip_prefix("sym:") {
        Ok(Letter::Leaf(symbol(line, s)?))
    } else {
        Err(err(line, format!("letter {word:?} must start with state: or sym:")))
    }
}

/// Meaningful lines with their 1-based numbers, comments removed.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let words: Vec<&str> = l.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

struct Block {
    line: usize,
    symbol: Symbol,
    vstate: Option<VState>,
    states: Option<usize>,
    start: Option<u32>,
    trans: Vec<(usize, u32, Letter, u32)>,
    outs: Vec<(usize, u32, u32)>,
    accept: Option<(usize, Vec<u32>)>,
}

impl Block {
    fn machine(self, classifier: bool) -> Result<HorizontalMachine, FormatError> {
        let n = self
            .states
            .ok_or_else(|| err(self.line, "block has no hstates line"))?;
        if n == 0 {
            return Err(err(self.line, "hstates must be at least 1"));
        }
        let mut m = if classifier {
            HorizontalMachine::classifier(n)
        } else {
            HorizontalMachine::acceptor(n)
        };
        let range = |line: usize, h: u32| -> Result<HState, FormatError> {
            if (h as usize) < n {
                Ok(HState(h))
            } else {
                Err(err(line, format!("horizontal state {h} out of range (hstates {n})")))
            }
        };
        if let Some(s) = self.start {
            m.set_start(range(self.line, s)?).expect("checked");
        }
        for (line, from, l, to) in self.trans {
            let (from, to) = (range(line, from)?, range(line, to)?);
            m.add_transition(from, l, to).map_err(|e| err(line, e.to_string()))?;
        }
        for (line, h, v) in self.outs {
            let h = range(line, h)?;
            if m.output(h).is_some() {
                return Err(err(line, format!("duplicate output for horizontal state {h}")));
            }
            m.set_output(h, Some(VState(v))).expect("classifier");
        }
        if let Some((line, ids)) = self.accept {
            for h in ids {
                m.set_accepting(range(line, h)?, true).expect("acceptor");
            }
        }
        Ok(m)
    }
}

/// Parses an automaton file. Structural problems (dangling states, overlaps)
/// are left to validation.
pub fn parse_automaton(text: &str) -> Result<Automaton, FormatError> {
    let mut it = lines(text);
    let (line, words) = it.next().ok_or_else(|| err(1, "empty file"))?;
    let wdta = match words.as_slice() {
        ["kind", "sdta"] => false,
        ["kind", "wdta"] => true,
        _ => return Err(err(line, "first line must be `kind sdta` or `kind wdta`")),
    };
    let mut alphabet: Option<Vec<Symbol>> = None;
    let mut vstates: Option<usize> = None;
    let mut finals: Option<Vec<VState>> = None;
    let mut blocks: Vec<Block> = Vec::new();
    let mut open: Option<Block> = None;
    for (line, words) in it {
        let head = words[0];
        let args = &words[1..];
        if let Some(b) = open.as_mut() {
            match head {
                "hstates" => {
                    let [n] = args else { return Err(err(line, "usage: hstates <count>")) };
                    if b.states.is_some() {
                        return Err(err(line, "duplicate hstates line"));
                    }
                    b.states = Some(number(line, n, "a count")?);
                }
                "start" => {
                    let [s] = args else { return Err(err(line, "usage: start <id>")) };
                    if b.start.is_some() {
                        return Err(err(line, "duplicate start line"));
                    }
                    b.start = Some(number(line, s, "a horizontal state id")?);
                }
                "t" => {
                    let [from, l, to] = args else {
                        return Err(err(line, "usage: t <from> <letter> <to>"));
                    };
                    let from = number(line, from, "a horizontal state id")?;
                    let l = letter(line, l)?;
                    if b.trans.iter().any(|(_, f, x, _)| *f == from && *x == l) {
                        return Err(err(line, format!("duplicate transition from {from} on {l}")));
                    }
                    b.trans.push((line, from, l, number(line, to, "a horizontal state id")?));
                }
                "out" if !wdta => {
                    let [h, v] = args else { return Err(err(line, "usage: out <hstate> <vstate>")) };
                    b.outs.push((line, number(line, h, "a horizontal state id")?, number(line, v, "a vertical state id")?));
                }
                "accept" if wdta => {
                    if b.accept.is_some() {
                        return Err(err(line, "duplicate accept line"));
                    }
                    let ids = args
                        .iter()
                        .map(|w| number(line, w, "a horizontal state id"))
                        .collect::<Result<_, _>>()?;
                    b.accept = Some((line, ids));
                }
                "end" => {
                    if !args.is_empty() {
                        return Err(err(line, "`end` takes no arguments"));
                    }
                    blocks.push(open.take().expect("open block"));
                }
                other => return Err(err(line, format!("unexpected {other:?} inside an hdfa block"))),
            }
            continue;
        }
        match head {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(err(line, "duplicate alphabet line"));
                }
                alphabet = Some(args.iter().map(|w| symbol(line, w)).collect::<Result<_, _>>()?);
            }
            "vstates" => {
                let [n] = args else { return Err(err(line, "usage: vstates <count>")) };
                if vstates.is_some() {
                    return Err(err(line, "duplicate vstates line"));
                }
                vstates = Some(number(line, n, "a count")?);
            }
            "final" => {
                if finals.is_some() {
                    return Err(err(line, "duplicate final line"));
                }
                finals = Some(
                    args.iter()
                        .map(|w| number(line, w, "a vertical state id").map(VState))
                        .collect::<Result<_, _>>()?,
                );
            }
            "hdfa" => {
                let (sym, vstate) = match (wdta, args) {
                    (false, [s]) => (symbol(line, s)?, None),
                    (true, [s, v]) => (symbol(line, s)?, Some(VState(number(line, v, "a vertical state id")?))),
                    (false, _) => return Err(err(line, "usage: hdfa <symbol>")),
                    (true, _) => return Err(err(line, "usage: hdfa <symbol> <vstate>")),
                };
                open = Some(Block {
                    line,
                    symbol: sym,
                    vstate,
                    states: None,
                    start: None,
                    trans: Vec::new(),
                    outs: Vec::new(),
                    accept: None,
                });
            }
            other => return Err(err(line, format!("unexpected {other:?}"))),
        }
    }
    if let Some(b) = open {
        return Err(err(b.line, "hdfa block is not closed with `end`"));
    }
    let last = text.lines().count().max(1);
    let alphabet = alphabet.ok_or_else(|| err(last, "missing alphabet line"))?;
    let vstates = vstates.ok_or_else(|| err(last, "missing vstates line"))?;
    let finals = finals.unwrap_or_default();
    if wdta {
        let mut hlangs = BTreeMap::new();
        for b in blocks {
            let (line, key) = (b.line, (b.symbol.clone(), b.vstate.expect("wdta header")));
            if hlangs.contains_key(&key) {
                return Err(err(line, format!("duplicate block for ({}, {})", key.0, key.1)));
            }
            hlangs.insert(key, b.machine(false)?);
        }
        Ok(Automaton::Wdta(Wdta::new(alphabet, vstates, finals, hlangs)))
    } else {
        let mut classifiers = BTreeMap::new();
        for b in blocks {
            let (line, sym) = (b.line, b.symbol.clone());
            if classifiers.contains_key(&sym) {
                return Err(err(line, format!("duplicate block for {sym}")));
            }
            classifiers.insert(sym, b.machine(true)?);
        }
        Ok(Automaton::Sdta(Sdta::new(alphabet, vstates, finals, classifiers)))
    }
}

fn write_header(out: &mut String, kind: &str, alphabet: impl Iterator<Item = String>, n: usize, finals: impl Iterator<Item = String>) {
    let alphabet: Vec<String> = alphabet.collect();
    let finals: Vec<String> = finals.collect();
    let _ = writeln!(out, "kind {kind}");
    let _ = writeln!(out, "{}", ["alphabet".to_string()].into_iter().chain(alphabet).collect::<Vec<_>>().join(" "));
    let _ = writeln!(out, "vstates {n}");
    let _ = writeln!(out, "{}", ["final".to_string()].into_iter().chain(finals).collect::<Vec<_>>().join(" "));
}

fn write_machine(out: &mut String, m: &HorizontalMachine) {
    let _ = writeln!(out, "hstates {}", m.num_states());
    let _ = writeln!(out, "start {}", m.start());
    for h in m.states() {
        for (l, t) in m.transitions(h) {
            let _ = writeln!(out, "t {h} {l} {t}");
        }
    }
    if m.is_classifier() {
        for h in m.states() {
            if let Some(v) = m.output(h) {
                let _ = writeln!(out, "out {h} {v}");
            }
        }
    } else {
        let ids: Vec<String> = m.accepting_states().iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", ["accept".to_string()].into_iter().chain(ids).collect::<Vec<_>>().join(" "));
    }
    out.push_str("end\n");
}

/// Canonical text of an automaton.
pub fn serialize_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    match a {
        Automaton::Sdta(s) => {
            write_header(
                &mut out,
                "sdta",
                s.alphabet().iter().map(ToString::to_string),
                s.num_states(),
                s.finals().iter().map(ToString::to_string),
            );
            for (sym, m) in s.classifiers() {
                let _ = writeln!(out, "hdfa {sym}");
                write_machine(&mut out, m);
            }
        }
        Automaton::Wdta(w) => {
            write_header(
                &mut out,
                "wdta",
                w.alphabet().iter().map(ToString::to_string),
                w.num_states(),
                w.finals().iter().map(ToString::to_string),
            );
            for ((sym, q), m) in w.hlangs() {
                let _ = writeln!(out, "hdfa {sym} {q}");
                write_machine(&mut out, m);
            }
        }
    }
    out
}

pub fn load_automaton(path: impl AsRef<Path>) -> Result<Automaton, LoadError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_automaton(&text)?)
}

pub fn save_automaton(a: &Automaton, path: impl AsRef<Path>) -> Result<(), LoadError> {
    std::fs::write(path, serialize_automaton(a))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wdta::sdta_to_wdta;
    use crate::witnesses::{make_ma, make_mb};

    #[test]
    fn round_trip_is_byte_identical() {
        for a in [
            Automaton::Sdta(make_mb(2).unwrap()),
            Automaton::Sdta(make_ma(3).unwrap()),
            Automaton::Wdta(sdta_to_wdta(&make_mb(3).unwrap())),
        ] {
            let text = serialize_automaton(&a);
            let back = parse_automaton(&text).unwrap();
            assert_eq!(serialize_automaton(&back), text);
        }
    }

    #[test]
    fn duplicate_transition_names_the_line() {
        let text = "kind sdta\nalphabet a\nvstates 1\nfinal 0\nhdfa a\nhstates 2\nstart 0\nt 0 state:0 1\nt 0 state:0 0\nout 0 0\nend\n";
        let e = parse_automaton(text).unwrap_err();
        assert_eq!(e.line, 9);
        assert!(e.message.contains("duplicate transition"), "{e}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("kind tree\n", 1),
            ("kind sdta\nalphabet a\nvstates x\n", 3),
            ("kind sdta\nalphabet a\nvstates 1\nhdfa a\nhstates 1\nt 0 q:0 0\nend\n", 6),
            ("kind sdta\nalphabet a\nvstates 1\nhdfa a\nhstates 1\n", 4),
            ("kind sdta\n# comment\n\nalphabet a\nvstates 1\nhdfa a\nhstates 1\nt 0 state:0 3\nend\n", 8),
        ];
        for (text, line) in cases {
            assert_eq!(parse_automaton(text).unwrap_err().line, line, "{text}");
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# M\nkind sdta  # kind\n\nalphabet a\nvstates 1\nfinal 0\nhdfa a\nhstates 1\nstart 0\nout 0 0\nend\n";
        let Automaton::Sdta(a) = parse_automaton(text).unwrap() else { panic!() };
        assert!(a.accepts(&crate::trees::Tree::parse("a").unwrap()));
    }
}
