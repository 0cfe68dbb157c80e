//! Alphabets, finite words, memoized infinite streams, and the self-delimiting
//! block encodings used to name objects by symbol sequences.

mod codec;
mod iota;
mod stream;

use std::fmt;

use thiserror::Error;

pub use codec::{
    decode_integer, decode_interval_record, decode_natural, decode_rational_record, encode_integer,
    encode_interval_record, encode_natural, encode_rational_record, interval_from_blocks,
    interval_records, interval_stream, IntervalSeq,
};
pub use iota::{
    beta_decode, beta_encode, iota_decode_partial, iota_decode_prefix, iota_decode_stream,
    iota_encode, IotaBlocks,
};
pub use stream::{LazySeq, Stream};

pub type Symbol = u8;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("alphabet lists `{}` twice", *.0 as char)]
    DuplicateSymbol(Symbol),
    #[error("alphabet must contain 0 and 1")]
    MissingBinary,
    #[error("symbol `{}` at offset {offset} is not in the alphabet", *.symbol as char)]
    AlphabetMismatch { symbol: Symbol, offset: usize },
    #[error("symbol at offset {offset} is not a binary digit")]
    NotBinary { offset: usize },
    #[error("malformed block at offset {offset}")]
    MalformedBlock { offset: usize },
    #[error("not a name: {0}")]
    NotAName(String),
    #[error("malformed record {record}: {reason}")]
    MalformedRecord { record: usize, reason: String },
}

/// An ordered finite set of distinct symbols containing `0` and `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Result<Self, NameError> {
        let symbols: Vec<Symbol> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(NameError::EmptyAlphabet);
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(NameError::DuplicateSymbol(*s));
            }
        }
        if !symbols.contains(&b'0') || !symbols.contains(&b'1') {
            return Err(NameError::MissingBinary);
        }
        Ok(Self { symbols })
    }

    /// `{0, 1}`.
    pub fn binary() -> Self {
        Self {
            symbols: vec![b'0', b'1'],
        }
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.symbols.contains(&s)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn check(&self, w: &Word) -> Result<(), NameError> {
        match w.0.iter().position(|s| !self.contains(*s)) {
            Some(offset) => Err(NameError::AlphabetMismatch {
                symbol: w.0[offset],
                offset,
            }),
            None => Ok(()),
        }
    }
}

/// A finite word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// The first `n` symbols (or the whole word if shorter).
    pub fn truncated(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `self ⊑ other` in the prefix order.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|s| *s == b'0' || *s == b'1')
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).unwrap_or("<non-utf8>")
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.as_bytes().to_vec())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Right-hand side of a prefix test.
pub enum PrefixTarget<'a> {
    Word(&'a Word),
    Stream(&'a Stream),
}

/// Whether `u` is a prefix of `v`. Probes exactly `|u|` symbols of a stream.
pub fn prefix_leq(u: &Word, v: PrefixTarget<'_>) -> Result<bool, NameError> {
    match v {
        PrefixTarget::Word(v) => Ok(u.is_prefix_of(v)),
        PrefixTarget::Stream(p) => {
            p.alphabet().check(u)?;
            Ok(p.prefix(u.len()) == *u)
        }
    }
}

/// `q^{<e}`: the length-`e` prefix of every component.
pub fn stream_prefix(q: &[Stream], e: usize) -> Vec<Word> {
    q.iter().map(|s| s.prefix(e)).collect()
}
