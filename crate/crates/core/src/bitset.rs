//! Fixed-capacity bitsets over machine words.
//!
//! The freeness search spends nearly all of its time intersecting a running
//! set with shifted copies of the support, so the shifts here operate on
//! whole words and never materialise intermediate index lists.

const WORD: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut set = Self::new(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    /// `self ∩ (other − shift)`, where `other − shift = {x − shift : x ∈ other, x ≥ shift}`.
    ///
    /// Writes into `out` and returns its cardinality.
    pub fn and_shifted_down(&self, other: &Bitset, shift: usize, out: &mut Bitset) -> usize {
        debug_assert_eq!(self.len, other.len);
        debug_assert_eq!(self.len, out.len);
        let (ws, bs) = (shift / WORD, shift % WORD);
        let n = self.words.len();
        let mut total = 0;
        for i in 0..n {
            let lo = other.words.get(i + ws).copied().unwrap_or(0);
            let shifted = if bs == 0 {
                lo
            } else {
                let hi = other.words.get(i + ws + 1).copied().unwrap_or(0);
                (lo >> bs) | (hi << (WORD - bs))
            };
            let w = self.words[i] & shifted;
            out.words[i] = w;
            total += w.count_ones() as usize;
        }
        total
    }

    /// `self ∩ rotate(other, shift)`, where the rotation maps `x` to `(x − shift) mod len`.
    pub fn and_rotated_down(&self, other: &Bitset, shift: usize, out: &mut Bitset) -> usize {
        debug_assert_eq!(self.len, other.len);
        debug_assert_eq!(self.len, out.len);
        let len = self.len;
        if len == 0 {
            return 0;
        }
        let shift = shift % len;
        let mut total = 0;
        for i in 0..self.words.len() {
            let rotated = if len < WORD {
                (0..len).fold(0u64, |acc, x| {
                    acc | (other.contains((x + shift) % len) as u64) << x
                })
            } else {
                let start = (i * WORD + shift) % len;
                let room = len - start;
                if room >= WORD {
                    other.read_bits(start, WORD)
                } else {
                    other.read_bits(start, room) | other.read_bits(0, WORD - room) << room
                }
            };
            let w = self.words[i] & rotated;
            out.words[i] = w;
            total += w.count_ones() as usize;
        }
        total
    }

    /// Up to 64 bits starting at `pos`; positions past the end read as zero.
    #[inline]
    fn read_bits(&self, pos: usize, count: usize) -> u64 {
        debug_assert!(count <= WORD);
        if count == 0 {
            return 0;
        }
        let (w, b) = (pos / WORD, pos % WORD);
        let mut v = self.words.get(w).copied().unwrap_or(0) >> b;
        if b > 0 {
            v |= self.words.get(w + 1).copied().unwrap_or(0) << (WORD - b);
        }
        if count < WORD {
            v &= (1u64 << count) - 1;
        }
        v
    }

    pub fn and_assign(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }
}
