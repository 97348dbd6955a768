//! Dense bit matrix holding one coalition per row.

/// Row-major bit matrix. Bit `j` of row `i` lives in word `j / 64`, bit `j % 64`.
/// Padding bits past `cols` are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl MaskMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        MaskMatrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Self {
        let mut m = MaskMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has the wrong length");
            for (j, &b) in r.iter().enumerate() {
                if b {
                    m.set(i, j);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        bit(self.row(i), j)
    }

    pub fn set(&mut self, i: usize, j: usize) {
        debug_assert!(j < self.cols);
        self.bits[i * self.words_per_row + j / 64] |= 1 << (j % 64);
    }

    pub fn popcount(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn raw_mut(&mut self) -> &mut [u64] {
        &mut self.bits
    }

    /// Row-major dump, each row padded to whole bytes, bit `j` at bit `j % 8`
    /// of byte `j / 8`.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let bytes_per_row = self.cols.div_ceil(8);
        let mut out = Vec::with_capacity(self.rows * bytes_per_row);
        for i in 0..self.rows {
            let row = self.row(i);
            for b in 0..bytes_per_row {
                out.push((row[b / 8] >> ((b % 8) * 8)) as u8);
            }
        }
        out
    }
}

pub fn bit(row: &[u64], j: usize) -> bool {
    row[j / 64] >> (j % 64) & 1 == 1
}

/// Indices of set bits in ascending order.
pub fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let tz = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * 64 + tz)
        })
    })
}

/// Mask with bits `0..cols` set in a row of `words` words.
pub fn full_row(cols: usize) -> Vec<u64> {
    let mut row = vec![u64::MAX; cols.div_ceil(64)];
    if cols % 64 != 0 {
        if let Some(last) = row.last_mut() {
            *last = (1u64 << (cols % 64)) - 1;
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_pack() {
        let mut m = MaskMatrix::zeros(2, 70);
        m.set(0, 0);
        m.set(0, 9);
        m.set(1, 69);
        assert!(m.get(0, 9) && !m.get(0, 8));
        assert_eq!(ones(m.row(0)).collect::<Vec<_>>(), vec![0, 9]);
        assert_eq!(m.popcount(1), 1);
        let packed = m.to_packed_bytes();
        assert_eq!(packed.len(), 2 * 9);
        assert_eq!(packed[0], 0b1);
        assert_eq!(packed[1], 0b10);
        assert_eq!(packed[9 + 8], 0b10_0000);
        assert_eq!(full_row(70), vec![u64::MAX, 0b11_1111]);
        assert_eq!(full_row(64), vec![u64::MAX]);
    }
}
