use std::fmt;
use std::sync::{Arc, Mutex};

use num_integer::Integer;

use super::{iota_encode, Alphabet, Symbol, Word};

const STALL_LIMIT: usize = 1 << 20;

type Producer<T> = Box<dyn FnMut() -> Vec<T> + Send>;

struct LazyInner<T> {
    cache: Vec<T>,
    producer: Producer<T>,
}

/// A demand-driven sequence that memoizes everything it has produced.
///
/// The producer is called for successive chunks; extensions of the cache are
/// serialized by the lock, so concurrent readers always observe a prefix of
/// one fixed sequence.
pub struct LazySeq<T> {
    inner: Mutex<LazyInner<T>>,
}

impl<T: Clone> LazySeq<T> {
    pub fn from_chunks(producer: impl FnMut() -> Vec<T> + Send + 'static) -> Self {
        Self {
            inner: Mutex::new(LazyInner {
                cache: Vec::new(),
                producer: Box::new(producer),
            }),
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize) -> T + Send + 'static) -> Self {
        let mut next = 0usize;
        Self::from_chunks(move || {
            let v = f(next);
            next += 1;
            vec![v]
        })
    }

    fn ensure(&self, inner: &mut LazyInner<T>, len: usize) {
        let mut stalled = 0;
        while inner.cache.len() < len {
            let chunk = (inner.producer)();
            if chunk.is_empty() {
                stalled += 1;
                assert!(stalled < STALL_LIMIT, "lazy sequence producer stalled");
            } else {
                stalled = 0;
            }
            inner.cache.extend(chunk);
        }
    }

    pub fn get(&self, i: usize) -> T {
        let mut inner = self.inner.lock().expect("lazy sequence lock poisoned");
        self.ensure(&mut inner, i + 1);
        inner.cache[i].clone()
    }

    pub fn take(&self, n: usize) -> Vec<T> {
        let mut inner = self.inner.lock().expect("lazy sequence lock poisoned");
        self.ensure(&mut inner, n);
        inner.cache[..n].to_vec()
    }

    pub fn cached_len(&self) -> usize {
        self.inner.lock().map(|i| i.cache.len()).unwrap_or(0)
    }
}

#[derive(Clone)]
enum Backing {
    Periodic { prefix: Word, cycle: Word },
    Lazy(Arc<LazySeq<Symbol>>),
}

/// An infinite sequence of symbols, memoized and cheaply cloneable.
#[derive(Clone)]
pub struct Stream {
    alphabet: Arc<Alphabet>,
    backing: Backing,
}

impl Stream {
    /// `prefix · cycle^ω`.
    pub fn periodic(prefix: Word, cycle: Word) -> Self {
        assert!(!cycle.is_empty(), "periodic stream needs a nonempty cycle");
        Self {
            alphabet: Arc::new(Alphabet::binary()),
            backing: Backing::Periodic { prefix, cycle },
        }
    }

    /// `w · 0^ω`.
    pub fn zero_padded(w: Word) -> Self {
        Self::periodic(w, Word::from("0"))
    }

    pub fn from_fn(f: impl FnMut(usize) -> Symbol + Send + 'static) -> Self {
        Self::lazy(LazySeq::from_fn(f))
    }

    /// Concatenation of the words returned by successive calls.
    pub fn from_chunks(mut f: impl FnMut() -> Word + Send + 'static) -> Self {
        Self::lazy(LazySeq::from_chunks(move || f().into_symbols()))
    }

    /// Concatenation of `ι(w)` for the binary words returned by successive calls.
    pub fn iota_blocks(mut f: impl FnMut() -> Word + Send + 'static) -> Self {
        Self::from_chunks(move || iota_encode(&f()).expect("block producer must emit binary words"))
    }

    fn lazy(seq: LazySeq<Symbol>) -> Self {
        Self {
            alphabet: Arc::new(Alphabet::binary()),
            backing: Backing::Lazy(Arc::new(seq)),
        }
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = Arc::new(alphabet);
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn symbol(&self, i: usize) -> Symbol {
        let s = match &self.backing {
            Backing::Periodic { prefix, cycle } => {
                if i < prefix.len() {
                    prefix.symbols()[i]
                } else {
                    cycle.symbols()[(i - prefix.len()) % cycle.len()]
                }
            }
            Backing::Lazy(seq) => seq.get(i),
        };
        assert!(
            self.alphabet.contains(s),
            "stream produced a symbol outside its alphabet"
        );
        s
    }

    /// The first `n` symbols.
    pub fn prefix(&self, n: usize) -> Word {
        match &self.backing {
            Backing::Periodic { .. } => Word::new((0..n).map(|i| self.symbol(i)).collect()),
            Backing::Lazy(seq) => {
                let symbols = seq.take(n);
                assert!(
                    symbols.iter().all(|s| self.alphabet.contains(*s)),
                    "stream produced a symbol outside its alphabet"
                );
                Word::new(symbols)
            }
        }
    }

    pub fn periodic_parts(&self) -> Option<(&Word, &Word)> {
        match &self.backing {
            Backing::Periodic { prefix, cycle } => Some((prefix, cycle)),
            Backing::Lazy(_) => None,
        }
    }

    /// Decidable equality: the same memo cell, or equal eventually-periodic
    /// descriptions. Returns `false` when equality cannot be decided.
    pub fn same_as(&self, other: &Stream) -> bool {
        match (&self.backing, &other.backing) {
            (Backing::Lazy(a), Backing::Lazy(b)) => Arc::ptr_eq(a, b),
            (
                Backing::Periodic {
                    prefix: p1,
                    cycle: c1,
                },
                Backing::Periodic {
                    prefix: p2,
                    cycle: c2,
                },
            ) => {
                let n = p1.len().max(p2.len()) + c1.len().lcm(&c2.len());
                self.prefix(n) == other.prefix(n)
            }
            _ => false,
        }
    }
}

impl fmt::Debug for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.backing {
            Backing::Periodic { prefix, cycle } => write!(f, "Stream({prefix}({cycle})^ω)"),
            Backing::Lazy(seq) => write!(f, "Stream({}…)", self.prefix(seq.cached_len().min(24))),
        }
    }
}
