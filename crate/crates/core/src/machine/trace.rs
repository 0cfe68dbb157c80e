use serde::Serialize;

use super::{StatementKind, TapeIndex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChangedCell {
    pub tape: TapeIndex,
    pub index: i64,
    pub value: String,
}

/// One executed step. Serialized as one JSON object per line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub label: String,
    pub next: String,
    pub kind: StatementKind,
    pub tape: Option<TapeIndex>,
    pub heads: Vec<i64>,
    pub changed: Option<ChangedCell>,
    pub token: Option<u64>,
}

impl TraceRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("trace records always serialize")
    }
}
