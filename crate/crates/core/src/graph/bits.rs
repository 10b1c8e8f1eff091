/// Row-major square bit matrix; row `v` holds the adjacency of vertex `v`.
#[derive(Debug, Clone)]
pub(crate) struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitRows { words, bits: vec![0; words * n] }
    }

    #[inline]
    pub(crate) fn set(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
    }

    #[inline]
    pub(crate) fn get(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }
}

/// popcount(a & !b)
#[inline]
pub(crate) fn and_not_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & !y).count_ones()).sum()
}
