//! Bit-vector subsets of a finite group.
//!
//! A [`Subset`] stores one bit per group element (element index `i` lives in
//! word `i / 64`, bit `i % 64`) together with a cached cardinality. Bits at
//! positions `>= n` are always zero.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

#[inline]
fn low_mask(len: usize) -> u64 {
    if len >= WORD {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A subset of `{0, .., n-1}` stored as a bit-vector with cached size.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    n: usize,
    words: Vec<u64>,
    size: usize,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Subset {
            n,
            words: vec![0; words_for(n)],
            size: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; words_for(n)];
        if n % WORD != 0 {
            if let Some(last) = words.last_mut() {
                *last = low_mask(n % WORD);
            }
        }
        Subset { n, words, size: n }
    }

    /// Builds a subset from element indices; duplicates are ignored.
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Result<Self> {
        let mut s = Subset::empty(n);
        for i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, order: n });
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Builds a subset of a group with at most 64 elements from a bit mask.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= WORD, "from_mask needs n <= 64");
        let mask = mask & low_mask(n);
        let mut words = vec![0; words_for(n)];
        if let Some(w) = words.first_mut() {
            *w = mask;
        }
        Subset {
            n,
            words,
            size: mask.count_ones() as usize,
        }
    }

    pub(crate) fn from_words(n: usize, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(n));
        if n % WORD != 0 {
            if let Some(last) = words.last_mut() {
                *last &= low_mask(n % WORD);
            }
        }
        let size = words.iter().map(|w| w.count_ones() as usize).sum();
        Subset { n, words, size }
    }

    /// The low 64 bits, when the ambient group has at most 64 elements.
    pub fn to_mask(&self) -> Option<u64> {
        (self.n <= WORD).then(|| self.words.first().copied().unwrap_or(0))
    }

    /// Size of the ambient group.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    /// Inserts `i`; returns whether it was newly added.
    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.n, "index {i} out of range {}", self.n);
        let w = &mut self.words[i / WORD];
        let bit = 1u64 << (i % WORD);
        if *w & bit == 0 {
            *w |= bit;
            self.size += 1;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, i: usize) -> bool {
        if i >= self.n {
            return false;
        }
        let w = &mut self.words[i / WORD];
        let bit = 1u64 << (i % WORD);
        if *w & bit != 0 {
            *w &= !bit;
            self.size -= 1;
            true
        } else {
            false
        }
    }

    /// Iterates the members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn zip_with(&self, other: &Subset, f: impl Fn(u64, u64) -> u64) -> Subset {
        assert_eq!(self.n, other.n, "subsets of different groups");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Subset::from_words(self.n, words)
    }

    pub fn union(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Subset {
        let words = self.words.iter().map(|w| !w).collect();
        Subset::from_words(self.n, words)
    }

    pub fn union_with(&mut self, other: &Subset) {
        assert_eq!(self.n, other.n, "subsets of different groups");
        let mut size = 0;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
            size += a.count_ones() as usize;
        }
        self.size = size;
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        assert_eq!(self.n, other.n, "subsets of different groups");
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        assert_eq!(self.n, other.n, "subsets of different groups");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Reads `len <= 64` bits starting at bit `pos`.
    #[inline]
    pub(crate) fn read_bits(&self, pos: usize, len: usize) -> u64 {
        debug_assert!(len <= WORD && pos + len <= self.n);
        if len == 0 {
            return 0;
        }
        let (wi, off) = (pos / WORD, pos % WORD);
        let mut v = self.words[wi] >> off;
        if off + len > WORD {
            v |= self.words[wi + 1] << (WORD - off);
        }
        v & low_mask(len)
    }

    /// ORs the low `len <= 64` bits of `value` in at bit `pos`.
    /// Does not maintain the cached size; callers rebuild it.
    #[inline]
    fn or_bits(words: &mut [u64], pos: usize, len: usize, value: u64) {
        if len == 0 {
            return;
        }
        let value = value & low_mask(len);
        let (wi, off) = (pos / WORD, pos % WORD);
        words[wi] |= value << off;
        if off + len > WORD {
            words[wi + 1] |= value >> (WORD - off);
        }
    }

    /// ORs `len` bits of `src` starting at `src_pos` into `dst` at `dst_pos`,
    /// 64 bits at a time.
    pub(crate) fn copy_range(src: &Subset, src_pos: usize, dst: &mut [u64], dst_pos: usize, len: usize) {
        let mut done = 0;
        while done < len {
            let chunk = (len - done).min(WORD);
            let v = src.read_bits(src_pos + done, chunk);
            Self::or_bits(dst, dst_pos + done, chunk, v);
            done += chunk;
        }
    }

    /// Hex rendering, least significant word first, 16 digits per word.
    pub fn to_hex(&self) -> String {
        self.words.iter().map(|w| format!("{w:016x}")).collect()
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Subset> {
        let expected = words_for(n) * 16;
        if hex.len() != expected {
            return Err(Error::Parse(format!(
                "hex subset for n={n} needs {expected} digits, got {}",
                hex.len()
            )));
        }
        let words = (0..words_for(n))
            .map(|i| {
                u64::from_str_radix(&hex[i * 16..(i + 1) * 16], 16)
                    .map_err(|e| Error::Parse(format!("bad hex word: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Subset::from_words(n, words.clone());
        if s.words != words {
            return Err(Error::Parse("hex subset has bits beyond the group order".into()));
        }
        Ok(s)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset(n={}, ", self.n)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

/// JSON form: the sorted list of member indices.
impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}
