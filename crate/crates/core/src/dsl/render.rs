use std::fmt::Write;

use crate::machine::{Machine, Statement};

fn symbol(c: char) -> String {
    match c {
        '\'' => r"'\''".into(),
        '\\' => r"'\\'".into(),
        c => format!("'{c}'"),
    }
}

fn args(a: &[usize]) -> String {
    a.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical source text. Parsing it yields a machine equal to `m`.
pub fn render(m: &Machine) -> String {
    let mut out = String::new();
    let label = |l: usize| m.labels[l].as_str();
    writeln!(out, "machine {};", m.name).unwrap();
    let tapes: Vec<String> = m
        .carriers
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{i}:{c}"))
        .collect();
    writeln!(out, "tapes {};", tapes.join(", ")).unwrap();
    writeln!(out, "inputs {};", m.inputs).unwrap();
    if m.gamma == [m.blank] {
        writeln!(out, "blank {};", symbol(m.blank)).unwrap();
    } else {
        let work: Vec<String> = m.gamma.iter().map(|c| symbol(*c)).collect();
        writeln!(out, "work {} blank {};", work.join(" "), symbol(m.blank)).unwrap();
    }
    let labels: Vec<String> = (0..m.labels.len())
        .map(|l| {
            if l == m.final_label {
                format!("final {}", label(l))
            } else {
                label(l).to_string()
            }
        })
        .collect();
    writeln!(out, "labels {};", labels.join(", ")).unwrap();
    for (l, stmt) in m.statements.iter().enumerate() {
        let Some(stmt) = stmt else { continue };
        let body = match stmt {
            Statement::Right { tape, next } => format!("right {tape} -> {}", label(*next)),
            Statement::Left { tape, next } => format!("left {tape} -> {}", label(*next)),
            Statement::Write {
                tape,
                symbol: c,
                next,
            } => format!("write {tape} {} -> {}", symbol(*c), label(*next)),
            Statement::IfSymbol {
                tape,
                symbol: c,
                then,
                otherwise,
            } => {
                format!(
                    "if {tape} is {} then {} else {}",
                    symbol(*c),
                    label(*then),
                    label(*otherwise)
                )
            }
            Statement::Assign {
                tape,
                function,
                args: a,
                next,
            } => {
                format!("{tape} := {function}({}) -> {}", args(a), label(*next))
            }
            Statement::IfTest {
                function,
                args: a,
                then,
                otherwise,
            } => {
                format!(
                    "if {function}({}) then {} else {}",
                    args(a),
                    label(*then),
                    label(*otherwise)
                )
            }
        };
        writeln!(out, "{}: {body};", label(l)).unwrap();
    }
    out
}
