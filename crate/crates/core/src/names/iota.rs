//! `ι(a₁…aₙ) = 110 a₁0 … aₙ0 11` and the word representation
//! `β(ι(w)0^ω) = w`.

use super::{NameError, Stream, Symbol, Word};

pub fn iota_encode(w: &Word) -> Result<Word, NameError> {
    let mut out = Vec::with_capacity(2 * w.len() + 5);
    out.extend_from_slice(b"110");
    for (offset, &a) in w.symbols().iter().enumerate() {
        if a != b'0' && a != b'1' {
            return Err(NameError::NotBinary { offset });
        }
        out.push(a);
        out.push(b'0');
    }
    out.extend_from_slice(b"11");
    Ok(Word::new(out))
}

enum Block {
    Complete { word: Word, end: usize },
    Incomplete,
}

/// Reads one block starting at `start`. `get` returns `None` past the end of
/// a finite source.
fn read_block(start: usize, get: impl Fn(usize) -> Option<Symbol>) -> Result<Block, NameError> {
    let malformed = Err(NameError::MalformedBlock { offset: start });
    for (i, expected) in b"110".iter().enumerate() {
        match get(start + i) {
            None => return Ok(Block::Incomplete),
            Some(s) if s == *expected => {}
            Some(_) => return malformed,
        }
    }
    let mut word = Word::empty();
    let mut pos = start + 3;
    loop {
        let Some(a) = get(pos) else {
            return Ok(Block::Incomplete);
        };
        let Some(b) = get(pos + 1) else {
            // a lone trailing symbol is still a valid prefix only if it could begin a pair
            return if a == b'0' || a == b'1' {
                Ok(Block::Incomplete)
            } else {
                malformed
            };
        };
        match (a, b) {
            (b'1', b'1') => return Ok(Block::Complete { word, end: pos + 2 }),
            (b'0' | b'1', b'0') => word.push(a),
            _ => return malformed,
        }
        pos += 2;
    }
}

/// Lazily decodes a stream of concatenated ι-blocks.
pub struct IotaBlocks {
    stream: Stream,
    offset: usize,
    failed: bool,
}

impl IotaBlocks {
    /// Symbols consumed so far.
    pub fn offset(&self) -> usize {
        self.offset
    }
}

impl Iterator for IotaBlocks {
    type Item = Result<Word, NameError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let stream = &self.stream;
        match read_block(self.offset, |i| Some(stream.symbol(i))) {
            Ok(Block::Complete { word, end }) => {
                self.offset = end;
                Some(Ok(word))
            }
            Ok(Block::Incomplete) => unreachable!("infinite sources never end mid-block"),
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

pub fn iota_decode_stream(p: &Stream) -> IotaBlocks {
    IotaBlocks {
        stream: p.clone(),
        offset: 0,
        failed: false,
    }
}

/// Decodes every complete block of a finite word, ignoring an incomplete
/// tail. Returns the blocks and the number of symbols they occupy.
pub fn iota_decode_prefix(w: &Word) -> Result<(Vec<Word>, usize), NameError> {
    let symbols = w.symbols();
    let mut blocks = Vec::new();
    let mut offset = 0;
    loop {
        match read_block(offset, |i| symbols.get(i).copied())? {
            Block::Complete { word, end } => {
                blocks.push(word);
                offset = end;
            }
            Block::Incomplete => return Ok((blocks, offset)),
        }
    }
}

/// Complete blocks of a finite word up to the first malformed one, together
/// with the error that stopped decoding, if any.
pub fn iota_decode_partial(w: &Word) -> (Vec<Word>, Option<NameError>) {
    let symbols = w.symbols();
    let mut blocks = Vec::new();
    let mut offset = 0;
    loop {
        match read_block(offset, |i| symbols.get(i).copied()) {
            Ok(Block::Complete { word, end }) => {
                blocks.push(word);
                offset = end;
            }
            Ok(Block::Incomplete) => return (blocks, None),
            Err(e) => return (blocks, Some(e)),
        }
    }
}

/// `ι(w)·0^ω`.
pub fn beta_encode(w: &Word) -> Result<Stream, NameError> {
    Ok(Stream::zero_padded(iota_encode(w)?))
}

/// Reads the leading ι-block of a β-name. Only the block is probed; the
/// `0^ω` tail is part of the precondition.
pub fn beta_decode(p: &Stream) -> Result<Word, NameError> {
    match read_block(0, |i| Some(p.symbol(i))) {
        Ok(Block::Complete { word, .. }) => Ok(word),
        Ok(Block::Incomplete) => unreachable!("infinite sources never end mid-block"),
        Err(NameError::MalformedBlock { offset }) => Err(NameError::NotAName(format!(
            "no ι-block at offset {offset}"
        ))),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from(s)
    }

    fn all_binary_words(max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut frontier = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for u in &frontier {
                for s in [b'0', b'1'] {
                    let mut v = u.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn iota_examples() {
        assert_eq!(iota_encode(&w("1")).unwrap(), w("1101011"));
        assert_eq!(iota_encode(&w("")).unwrap(), w("11011"));
        assert_eq!(iota_encode(&w("01")).unwrap(), w("110001011"));
        assert_eq!(
            iota_encode(&w("0a")),
            Err(NameError::NotBinary { offset: 1 })
        );
    }

    #[test]
    fn decode_stream_examples() {
        let p = Stream::zero_padded(w("110101111011"));
        let blocks: Vec<Word> = iota_decode_stream(&p).take(2).map(Result::unwrap).collect();
        assert_eq!(blocks, vec![w("1"), w("")]);

        let rep = Stream::periodic(Word::empty(), w("110001011"));
        let blocks: Vec<Word> = iota_decode_stream(&rep)
            .take(5)
            .map(Result::unwrap)
            .collect();
        assert_eq!(blocks, vec![w("01"); 5]);

        let zeros = Stream::zero_padded(Word::empty());
        assert_eq!(
            iota_decode_stream(&zeros).next(),
            Some(Err(NameError::MalformedBlock { offset: 0 }))
        );
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_decode(&beta_encode(&w("1")).unwrap()).unwrap(), w("1"));
        assert_eq!(beta_decode(&beta_encode(&w("")).unwrap()).unwrap(), w(""));
        assert!(matches!(
            beta_decode(&Stream::zero_padded(w("1"))),
            Err(NameError::NotAName(_))
        ));
    }

    #[test]
    fn beta_iota_round_trip_up_to_length_10() {
        for u in all_binary_words(10) {
            assert_eq!(beta_decode(&beta_encode(&u).unwrap()).unwrap(), u);
        }
    }

    #[test]
    fn block_lists_are_uniquely_parseable() {
        // every list of blocks whose payloads total at most 12 symbols
        fn lists(budget: usize, words: &[Word], acc: &mut Vec<Word>, out: &mut Vec<Vec<Word>>) {
            out.push(acc.clone());
            if acc.len() >= 4 {
                return;
            }
            for u in words.iter().filter(|u| u.len() <= budget) {
                acc.push(u.clone());
                lists(budget - u.len(), words, acc, out);
                acc.pop();
            }
        }
        let words = all_binary_words(4);
        let mut out = Vec::new();
        lists(12, &words, &mut Vec::new(), &mut out);
        assert!(out.len() > 10_000);
        for list in out {
            let mut encoded = Word::empty();
            for u in &list {
                encoded.extend_from(&iota_encode(u).unwrap());
            }
            let (decoded, used) = iota_decode_prefix(&encoded).unwrap();
            assert_eq!(decoded, list);
            assert_eq!(used, encoded.len());
        }
    }

    #[test]
    fn prefix_decoding_ignores_incomplete_tails() {
        let full = iota_encode(&w("101")).unwrap();
        for cut in 0..full.len() {
            let (blocks, used) = iota_decode_prefix(&full.truncated(cut)).unwrap();
            assert!(blocks.is_empty());
            assert_eq!(used, 0);
        }
        assert!(iota_decode_prefix(&w("11001")).is_err());
    }
}
