//! Single-word subset kernels for groups of order at most 64.
//!
//! Exhaustive batteries and the census touch billions of subset pairs, so
//! they work on `u64` masks and apply element permutations (translations,
//! dilations) through per-byte lookup tables.

use crate::group::GroupSpec;

/// Largest group order the mask kernels handle.
pub const MASK_LIMIT: usize = 64;

/// A permutation of group elements applied to masks via byte tables.
#[derive(Clone, Debug)]
pub struct PermTable {
    nbytes: usize,
    table: Vec<u64>,
}

impl PermTable {
    /// `image[x]` is where element `x` goes.
    pub fn new(image: &[usize]) -> Self {
        let n = image.len();
        assert!(n <= MASK_LIMIT);
        let nbytes = n.div_ceil(8).max(1);
        let mut table = vec![0u64; nbytes * 256];
        for byte in 0..nbytes {
            for v in 0..256usize {
                let mut out = 0u64;
                for bit in 0..8 {
                    let x = byte * 8 + bit;
                    if v >> bit & 1 == 1 && x < n {
                        out |= 1 << image[x];
                    }
                }
                table[byte * 256 + v] = out;
            }
        }
        PermTable { nbytes, table }
    }

    #[inline]
    pub fn apply(&self, mask: u64) -> u64 {
        let mut out = 0;
        let mut m = mask;
        let mut byte = 0;
        while m != 0 && byte < self.nbytes {
            out |= self.table[byte * 256 + (m & 0xff) as usize];
            m >>= 8;
            byte += 1;
        }
        out
    }
}

/// Translation, negation and convolution on masks of one group.
#[derive(Clone, Debug)]
pub struct MaskKernel {
    n: usize,
    translations: Vec<PermTable>,
    negation: PermTable,
}

impl MaskKernel {
    pub fn new(g: &GroupSpec) -> Self {
        let n = g.order();
        assert!(n <= MASK_LIMIT, "mask kernels need |G| <= 64");
        let translations = (0..n)
            .map(|t| PermTable::new(&(0..n).map(|x| g.add_idx(x, t)).collect::<Vec<_>>()))
            .collect();
        let negation = PermTable::new(&(0..n).map(|x| g.neg_idx(x)).collect::<Vec<_>>());
        MaskKernel {
            n,
            translations,
            negation,
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    #[inline]
    pub fn translate(&self, mask: u64, t: usize) -> u64 {
        self.translations[t].apply(mask)
    }

    #[inline]
    pub fn negate(&self, mask: u64) -> u64 {
        self.negation.apply(mask)
    }

    /// All translates `A + t`, indexed by `t`.
    pub fn translates(&self, a: u64) -> Vec<u64> {
        (0..self.n).map(|t| self.translate(a, t)).collect()
    }

    /// `A + B` as the OR of `A + b` over `b in B`.
    #[inline]
    pub fn sumset(&self, a: u64, b: u64) -> u64 {
        if a == 0 {
            return 0;
        }
        let mut out = 0;
        let mut m = b;
        while m != 0 {
            let t = m.trailing_zeros() as usize;
            out |= self.translate(a, t);
            m &= m - 1;
        }
        out
    }

    /// `(A*B)(x) = |A ∩ (x - B)|` for every `x`.
    pub fn convolution(&self, a: u64, b: u64) -> Vec<u32> {
        let neg_b = self.negate(b);
        (0..self.n)
            .map(|x| (a & self.translate(neg_b, x)).count_ones())
            .collect()
    }

    /// `{x : S + x = S}` as a mask.
    pub fn stabilizer(&self, s: u64) -> u64 {
        if s == 0 {
            return self.full();
        }
        let mut out = 0;
        for t in 0..self.n {
            if self.translate(s, t) == s {
                out |= 1 << t;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_agrees_with_group_arithmetic() {
        let g = GroupSpec::new(&[2, 6]).unwrap();
        let k = MaskKernel::new(&g);
        let a = 0b1001_0110_0011u64;
        let b = 0b0000_0100_0101u64;
        let mut brute = 0u64;
        for x in 0..12 {
            for y in 0..12 {
                if a >> x & 1 == 1 && b >> y & 1 == 1 {
                    brute |= 1 << g.add_idx(x, y);
                }
            }
        }
        assert_eq!(k.sumset(a, b), brute);
        let conv = k.convolution(a, b);
        assert_eq!(conv.iter().sum::<u32>(), a.count_ones() * b.count_ones());
        for x in 0..12 {
            assert_eq!(conv[x] > 0, brute >> x & 1 == 1);
        }
    }

    #[test]
    fn full_64_element_group() {
        let g = GroupSpec::new(&[64]).unwrap();
        let k = MaskKernel::new(&g);
        assert_eq!(k.full(), u64::MAX);
        assert_eq!(k.translate(1 << 63, 1), 1);
        assert_eq!(k.stabilizer(0x5555_5555_5555_5555), 0x5555_5555_5555_5555);
    }
}
