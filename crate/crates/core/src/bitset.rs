//! Fixed-width bitset with the shift/and kernels used for difference-set
//! correlation.

const WORD: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] |= 1u64 << (i % WORD);
    }

    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] &= !(1u64 << (i % WORD));
    }

    pub fn get(&self, i: usize) -> bool {
        if i >= self.len {
            return false;
        }
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Logical shift toward index 0 by `k` positions.
    pub fn shifted_down(&self, k: usize) -> Bitset {
        let mut out = Bitset::new(self.len);
        if k >= self.len {
            return out;
        }
        let word_shift = k / WORD;
        let bit_shift = k % WORD;
        let n = self.words.len();
        for i in 0..n - word_shift {
            let mut w = self.words[i + word_shift] >> bit_shift;
            if bit_shift > 0 && i + word_shift + 1 < n {
                w |= self.words[i + word_shift + 1] << (WORD - bit_shift);
            }
            out.words[i] = w;
        }
        out.trim();
        out
    }

    /// Does `self & (self >> k)` have any set bit?
    pub fn intersects_shift(&self, k: usize) -> bool {
        if k >= self.len {
            return false;
        }
        let word_shift = k / WORD;
        let bit_shift = k % WORD;
        let n = self.words.len();
        for i in 0..n - word_shift {
            let mut w = self.words[i + word_shift] >> bit_shift;
            if bit_shift > 0 && i + word_shift + 1 < n {
                w |= self.words[i + word_shift + 1] << (WORD - bit_shift);
            }
            if w & self.words[i] != 0 {
                return true;
            }
        }
        false
    }

    /// Popcount of `self & (self >> k)`.
    pub fn count_shift_and(&self, k: usize) -> usize {
        if k >= self.len {
            return 0;
        }
        let word_shift = k / WORD;
        let bit_shift = k % WORD;
        let n = self.words.len();
        let mut total = 0usize;
        for i in 0..n - word_shift {
            let mut w = self.words[i + word_shift] >> bit_shift;
            if bit_shift > 0 && i + word_shift + 1 < n {
                w |= self.words[i + word_shift + 1] << (WORD - bit_shift);
            }
            total += (w & self.words[i]).count_ones() as usize;
        }
        total
    }

    pub fn and_assign(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Popcount restricted to indices `[from, to)`.
    pub fn count_range(&self, from: usize, to: usize) -> usize {
        let to = to.min(self.len);
        if from >= to {
            return 0;
        }
        let (fw, fb) = (from / WORD, from % WORD);
        let (tw, tb) = (to / WORD, to % WORD);
        if fw == tw {
            let mask = (u64::MAX >> (WORD - (tb - fb))) << fb;
            return (self.words[fw] & mask).count_ones() as usize;
        }
        let mut total = (self.words[fw] >> fb).count_ones() as usize;
        for w in &self.words[fw + 1..tw] {
            total += w.count_ones() as usize;
        }
        if tb > 0 {
            total += (self.words[tw] & (u64::MAX >> (WORD - tb))).count_ones() as usize;
        }
        total
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * WORD + b)
                }
            })
        })
    }

    fn trim(&mut self) {
        let extra = self.words.len() * WORD - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }
}
