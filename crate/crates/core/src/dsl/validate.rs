use std::collections::{BTreeSet, VecDeque};

use super::Diagnostic;
use crate::machine::{LabelId, Machine, Statement, Subroutine};

/// Checks the side conditions of a machine definition. Unreachable labels
/// produce warnings; everything else is an error.
pub fn validate(m: &Machine) -> Vec<Diagnostic> {
    validate_located(m).into_iter().map(|(_, d)| d).collect()
}

/// Labels reachable from the initial label.
pub fn reachable(m: &Machine) -> BTreeSet<LabelId> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([Machine::INITIAL]);
    while let Some(l) = queue.pop_front() {
        if l >= m.labels.len() || !seen.insert(l) {
            continue;
        }
        if let Some(s) = m.statement(l) {
            queue.extend(s.successors());
        }
    }
    seen
}

/// Diagnostics paired with the label they concern, if any.
pub(super) fn validate_located(m: &Machine) -> Vec<(Option<LabelId>, Diagnostic)> {
    let mut out = Vec::new();
    let mut err = |label: Option<LabelId>, code: &str, msg: String| {
        out.push((label, Diagnostic::error(code, msg, None)))
    };

    if m.gamma.iter().any(|c| *c == '0' || *c == '1') {
        err(
            None,
            "sigma-gamma",
            "Σ∩Γ must be empty: the work alphabet may not contain '0' or '1'".into(),
        );
    }
    if !m.gamma.contains(&m.blank) {
        err(
            None,
            "blank",
            format!("the blank '{}' must belong to the work alphabet", m.blank),
        );
    }
    for (i, c) in m.gamma.iter().enumerate() {
        if m.gamma[..i].contains(c) {
            err(
                None,
                "work-alphabet",
                format!("symbol '{c}' listed twice in the work alphabet"),
            );
        }
    }
    if m.carriers.is_empty() {
        err(None, "tape-decl", "no tapes declared".into());
    }
    if m.inputs > m.top_tape() {
        err(
            None,
            "inputs",
            format!(
                "{} input tapes need tapes 1..{}, but the highest tape is {}",
                m.inputs,
                m.inputs,
                m.top_tape()
            ),
        );
    }
    if m.labels.is_empty()
        || m.final_label >= m.labels.len()
        || m.statements.len() != m.labels.len()
    {
        err(None, "labels", "label table is inconsistent".into());
        return out;
    }
    for (i, l) in m.labels.iter().enumerate() {
        if m.labels[..i].contains(l) {
            err(
                Some(i),
                "duplicate-label",
                format!("label `{l}` declared twice"),
            );
        }
    }

    for l in 0..m.labels.len() {
        let name = &m.labels[l];
        let Some(stmt) = m.statement(l) else {
            if l != m.final_label {
                err(
                    Some(l),
                    "stm-total",
                    format!("Stm must be total: no statement for non-final label `{name}`"),
                );
            }
            continue;
        };
        if l == m.final_label {
            err(
                Some(l),
                "final-statement",
                format!("the final label `{name}` may not have a statement"),
            );
        }
        for next in stmt.successors() {
            if next >= m.labels.len() {
                err(
                    Some(l),
                    "unknown-label",
                    format!("`{name}` continues to an unknown label"),
                );
            }
        }
        for tape in stmt.tapes() {
            if tape > m.top_tape() {
                err(
                    Some(l),
                    "tape-range",
                    format!(
                        "tape {tape} used at `{name}` but the highest tape is {}",
                        m.top_tape()
                    ),
                );
            }
        }
        if let Statement::Write { symbol, .. } | Statement::IfSymbol { symbol, .. } = stmt {
            if !m.gamma.contains(symbol) {
                err(
                    Some(l),
                    "work-alphabet",
                    format!("symbol '{symbol}' at `{name}` is not in the work alphabet"),
                );
            }
        }
        let (function, args, target) = match stmt {
            Statement::Assign {
                tape,
                function,
                args,
                ..
            } => (function, args, Some(*tape)),
            Statement::IfTest { function, args, .. } => (function, args, None),
            _ => continue,
        };
        let Some(sub) = m.subroutines.get(function) else {
            err(
                Some(l),
                "unknown-fn",
                format!("unknown fn `{function}` at `{name}`"),
            );
            continue;
        };
        match (sub, target) {
            (Subroutine::Test(_), Some(_)) => {
                err(
                    Some(l),
                    "fn-kind",
                    format!("`{function}` is a test and cannot be assigned at `{name}`"),
                );
                continue;
            }
            (Subroutine::Assign(_), None) => {
                err(
                    Some(l),
                    "fn-kind",
                    format!("`{function}` is not a test but is branched on at `{name}`"),
                );
                continue;
            }
            _ => {}
        }
        let sig = sub.signature();
        if sig.arity() != args.len() {
            err(
                Some(l),
                "arity",
                format!(
                    "`{function}` takes {} arguments, {} given at `{name}`",
                    sig.arity(),
                    args.len()
                ),
            );
            continue;
        }
        for (j, (expected, tape)) in sig.inputs.iter().zip(args).enumerate() {
            if let Some(actual) = m.carriers.get(*tape) {
                if !expected.compatible(actual) {
                    err(
                        Some(l),
                        "carrier",
                        format!("argument {} of `{function}` must be `{expected}`, tape {tape} holds `{actual}`", j + 1),
                    );
                }
            }
        }
        if let Some(actual) = target.and_then(|t| m.carriers.get(t)) {
            if !sig.output.compatible(actual) {
                err(
                    Some(l),
                    "carrier",
                    format!(
                        "`{function}` yields `{}` but tape {} holds `{actual}`",
                        sig.output,
                        target.unwrap()
                    ),
                );
            }
        }
    }

    let live = reachable(m);
    for l in 0..m.labels.len() {
        if !live.contains(&l) {
            out.push((
                Some(l),
                Diagnostic::warning(
                    "unreachable",
                    format!("label `{}` is unreachable", m.labels[l]),
                    None,
                ),
            ));
        }
    }
    out
}
