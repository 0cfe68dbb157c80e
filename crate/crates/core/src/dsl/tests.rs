use super::*;
use crate::builtins::Registry;
use crate::machine::Statement;

fn parse_ok(src: &str) -> Parsed {
    parse(src, &Registry::standard()).unwrap_or_else(|d| panic!("{d:?}"))
}

fn parse_err(src: &str) -> Vec<Diagnostic> {
    parse(src, &Registry::standard()).expect_err("source should be rejected")
}

const COIN: &str = "
machine coin;
tapes 0:word;
labels flip, final done;
flip: 0 := coin() -> done;
";

#[test]
fn minimal_source_parses() {
    let p = parse_ok("machine m; tapes 0:word; labels l0 lf; l0: write 0 '#' -> lf");
    let m = p.machine;
    assert_eq!(m.labels, vec!["l0", "lf"]);
    assert_eq!(m.final_label, 1);
    assert_eq!(m.gamma, vec!['_', '#']);
    assert_eq!(
        m.statements[0],
        Some(Statement::Write {
            tape: 0,
            symbol: '#',
            next: 1
        })
    );
    assert!(p.warnings.is_empty());
}

#[test]
fn unknown_label_is_located() {
    let d = parse_err("machine m;\ntapes 0:word;\nlabels l0, final lf;\nl0: right 0 -> l9;\n");
    assert_eq!(d[0].code, "unknown-label");
    assert!(d[0].message.contains("unknown label"));
    assert_eq!(d[0].location, Some(Location { line: 4, col: 16 }));
}

#[test]
fn totality_is_required() {
    let d = parse_err("machine m; tapes 0:word; labels a, b, final c; a: right 0 -> c;");
    assert!(d
        .iter()
        .any(|d| d.code == "stm-total" && d.message.contains("Stm must be total")));
    assert!(d.iter().all(|d| d.location.is_some()));
}

#[test]
fn statement_on_final_label_is_rejected() {
    let d =
        parse_err("machine m; tapes 0:word; labels a, final c; a: right 0 -> c; c: right 0 -> a;");
    assert!(d.iter().any(|d| d.code == "final-statement"));
}

#[test]
fn work_alphabet_conditions() {
    let d = parse_err(
        "machine m; tapes 0:word; work '_' '0' blank '_'; labels a, final c; a: right 0 -> c;",
    );
    assert!(d.iter().any(|d| d.message.contains("Σ∩Γ must be empty")));
    let d = parse_err(
        "machine m; tapes 0:word; work '#' blank '_'; labels a, final c; a: right 0 -> c;",
    );
    assert!(d.iter().any(|d| d.code == "blank"));
}

#[test]
fn unreachable_label_warns() {
    let p =
        parse_ok("machine m; tapes 0:word; labels a, b, final c; a: right 0 -> c; b: left 0 -> c;");
    assert_eq!(p.warnings.len(), 1);
    assert_eq!(p.warnings[0].code, "unreachable");
    assert_eq!(p.warnings[0].severity, Severity::Warning);
}

#[test]
fn subroutine_errors() {
    let d = parse_err(
        "machine m; tapes 0:word, 1:word; inputs 1; labels a, final c; a: 0 := nope(1) -> c;",
    );
    assert_eq!(d[0].code, "unknown-fn");
    let d = parse_err(
        "machine m; tapes 0:word, 1:word; inputs 1; labels a, final c; a: 0 := word.id(1, 1) -> c;",
    );
    assert_eq!(d[0].code, "arity");
    let d = parse_err(
        "machine m; tapes 0:word, 1:word; inputs 1; labels a, final c; a: 0 := word.id(3) -> c;",
    );
    assert_eq!(d[0].code, "tape-range");
    let d = parse_err(
        "machine m; tapes 0:real, 1:word; inputs 1; labels a, final c; a: 0 := word.id(1) -> c;",
    );
    assert_eq!(d[0].code, "carrier");
    let d = parse_err("machine m; tapes 0:word, 1:word; inputs 1; labels a, final c; a: if word.id(1) then c else c;");
    assert_eq!(d[0].code, "fn-kind");
}

#[test]
fn syntax_errors_are_located() {
    let d = parse_err("machine m;\ntapes 0:word;\nlabels a, final c;\na: jump 0 -> c;");
    assert_eq!(d[0].code, "syntax");
    assert_eq!(d[0].location, Some(Location { line: 4, col: 4 }));
}

#[test]
fn render_round_trips_and_is_deterministic() {
    let m = parse_ok(COIN).machine;
    let text = render(&m);
    assert_eq!(text, render(&m));
    assert_eq!(parse_ok(&text).machine, m);
    assert!(text.contains("blank '_';") && !text.contains("work"));
}

#[test]
fn render_escapes_symbols() {
    let src = r"machine q; tapes 0:word; work '_' '\'' '\\' blank '_'; labels a, b, final c;
        a: write 0 '\'' -> b; b: if 0 is '\\' then c else c;";
    let m = parse_ok(src).machine;
    assert_eq!(parse_ok(&render(&m)).machine, m);
}

#[test]
fn identifiers() {
    assert!(is_identifier("word.sri_add"));
    assert!(!is_identifier("final"));
    assert!(!is_identifier("9a"));
}
