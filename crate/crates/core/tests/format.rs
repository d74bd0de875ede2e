use std::path::PathBuf;

use unranked::harness::{load_automaton, parse_automaton, save_automaton, serialize_automaton, Automaton};
use unranked::wdta::sdta_to_wdta;
use unranked::witnesses::{make_ma, make_mb};
use unranked::Tree;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn canonical_mb2_loads_and_validates() {
    let Automaton::Sdta(a) = load_automaton(golden("mb2.aut")).unwrap() else {
        panic!("expected an sdta");
    };
    assert!(a.is_valid());
    assert_eq!(serialize_automaton(&Automaton::Sdta(make_mb(2).unwrap())), std::fs::read_to_string(golden("mb2.aut")).unwrap());
    assert!(a.accepts(&Tree::parse("b(a,a)").unwrap()));
}

#[test]
fn generators_match_golden_files() {
    let cases = [
        ("mb2.aut", Automaton::Sdta(make_mb(2).unwrap())),
        ("ma2.aut", Automaton::Sdta(make_ma(2).unwrap())),
        ("mb2_wdta.aut", Automaton::Wdta(sdta_to_wdta(&make_mb(2).unwrap()))),
    ];
    for (file, a) in cases {
        let text = std::fs::read_to_string(golden(file)).unwrap();
        assert_eq!(serialize_automaton(&a), text, "{file}");
    }
}

#[test]
fn save_of_load_is_byte_identical() {
    let dir = std::env::temp_dir().join(format!("unranked-format-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for file in ["mb2.aut", "ma2.aut", "mb2_wdta.aut"] {
        let a = load_automaton(golden(file)).unwrap();
        let out = dir.join(file);
        save_automaton(&a, &out).unwrap();
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(golden(file)).unwrap(), "{file}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn comments_and_layout_are_normalized() {
    let a = load_automaton(golden("commented.aut")).unwrap();
    assert!(a.accepts(&Tree::parse("b(b,b)").unwrap()));
    assert!(!a.accepts(&Tree::parse("b(b,b(b))").unwrap()));
    let canonical = serialize_automaton(&a);
    assert!(!canonical.contains('#'));
    assert_eq!(serialize_automaton(&parse_automaton(&canonical).unwrap()), canonical);
}

#[test]
fn overlapping_wdta_parses_but_fails_validation() {
    let text = "kind wdta\nalphabet a\nvstates 2\nfinal 0\nhdfa a 0\nhstates 1\nstart 0\naccept 0\nend\nhdfa a 1\nhstates 1\nstart 0\naccept 0\nend\n";
    let Automaton::Wdta(w) = parse_automaton(text).unwrap() else {
        panic!("expected a wdta");
    };
    assert!(!w.is_valid());
    assert!(w.validate().iter().any(|v| v.to_string().contains("not disjoint")));
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(load_automaton(golden("nope.aut")).is_err());
}
