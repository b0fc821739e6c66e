use super::{Block, SBox};

/// The 4x4 byte working matrix. Input byte `i` sits at row `i % 4`,
/// column `i / 4`, so the backing array is column-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AesState([u8; 16]);

/// Multiplication by `x` in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.
#[inline]
pub(crate) fn xtime(b: u8) -> u8 {
    (b << 1) ^ if b & 0x80 != 0 { 0x1b } else { 0 }
}

/// General GF(2^8) product, shift-and-add.
pub(crate) fn gf_mul(mut a: u8, mut b: u8) -> u8 {
    let mut acc = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        a = xtime(a);
        b >>= 1;
    }
    acc
}

impl AesState {
    pub fn from_block(block: &Block) -> Self {
        AesState(*block)
    }

    pub fn to_block(self) -> Block {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.0[col * 4 + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.0[col * 4 + row] = value;
    }

    pub fn row(&self, row: usize) -> [u8; 4] {
        [self.get(row, 0), self.get(row, 1), self.get(row, 2), self.get(row, 3)]
    }

    pub fn column(&self, col: usize) -> [u8; 4] {
        let mut c = [0u8; 4];
        c.copy_from_slice(&self.0[col * 4..col * 4 + 4]);
        c
    }

    fn set_column(&mut self, col: usize, c: [u8; 4]) {
        self.0[col * 4..col * 4 + 4].copy_from_slice(&c);
    }

    pub fn sub_bytes(self) -> Self {
        self.sub_bytes_with(SBox::standard())
    }

    pub fn inv_sub_bytes(self) -> Self {
        self.inv_sub_bytes_with(SBox::standard())
    }

    pub(crate) fn sub_bytes_with(mut self, sbox: &SBox) -> Self {
        for b in &mut self.0 {
            *b = sbox.sub(*b);
        }
        self
    }

    pub(crate) fn inv_sub_bytes_with(mut self, sbox: &SBox) -> Self {
        for b in &mut self.0 {
            *b = sbox.inv_sub(*b);
        }
        self
    }

    /// Row `r` rotated left by `r` positions.
    pub fn shift_rows(self) -> Self {
        let mut out = self;
        for r in 1..4 {
            for c in 0..4 {
                out.set(r, c, self.get(r, (c + r) % 4));
            }
        }
        out
    }

    /// Row `r` rotated right by `r` positions.
    pub fn inv_shift_rows(self) -> Self {
        let mut out = self;
        for r in 1..4 {
            for c in 0..4 {
                out.set(r, (c + r) % 4, self.get(r, c));
            }
        }
        out
    }

    /// Each column times {03}x^3 + {01}x^2 + {01}x + {02} modulo x^4 + 1.
    pub fn mix_columns(mut self) -> Self {
        for col in 0..4 {
            let [a0, a1, a2, a3] = self.column(col);
            let t = a0 ^ a1 ^ a2 ^ a3;
            self.set_column(
                col,
                [
                    a0 ^ t ^ xtime(a0 ^ a1),
                    a1 ^ t ^ xtime(a1 ^ a2),
                    a2 ^ t ^ xtime(a2 ^ a3),
                    a3 ^ t ^ xtime(a3 ^ a0),
                ],
            );
        }
        self
    }

    /// Each column times {0b}x^3 + {0d}x^2 + {09}x + {0e}, the inverse of the
    /// mix_columns polynomial.
    pub fn inv_mix_columns(mut self) -> Self {
        for col in 0..4 {
            let a = self.column(col);
            let mut out = [0u8; 4];
            for (i, o) in out.iter_mut().enumerate() {
                *o = gf_mul(a[i], 0x0e)
                    ^ gf_mul(a[(i + 1) % 4], 0x0b)
                    ^ gf_mul(a[(i + 2) % 4], 0x0d)
                    ^ gf_mul(a[(i + 3) % 4], 0x09);
            }
            self.set_column(col, out);
        }
        self
    }

    /// XOR with a 16-byte round key laid out in the same byte order as the
    /// state. Its own inverse.
    pub fn add_round_key(mut self, round_key: &Block) -> Self {
        for (b, k) in self.0.iter_mut().zip(round_key) {
            *b ^= k;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(bytes: [u8; 16]) -> AesState {
        AesState::from_block(&bytes)
    }

    #[test]
    fn column_major_layout() {
        let s = state(core::array::from_fn(|i| i as u8));
        assert_eq!(s.get(1, 0), 1);
        assert_eq!(s.get(0, 1), 4);
        assert_eq!(s.get(3, 3), 15);
        assert_eq!(s.row(1), [1, 5, 9, 13]);
    }

    #[test]
    fn sub_bytes_examples() {
        assert_eq!(state([0; 16]).sub_bytes(), state([0x63; 16]));
        assert_eq!(state([0x53; 16]).sub_bytes(), state([0xed; 16]));
    }

    #[test]
    fn shift_rows_examples() {
        let mut s = AesState::default();
        for r in 0..4 {
            for c in 0..4 {
                s.set(r, c, 0x10 * r as u8 + 7);
            }
        }
        assert_eq!(s.shift_rows(), s);

        let mut s = AesState::default();
        for (c, v) in [0xa, 0xb, 0xc, 0xd].into_iter().enumerate() {
            s.set(1, c, v);
        }
        assert_eq!(s.shift_rows().row(1), [0xb, 0xc, 0xd, 0xa]);
    }

    #[test]
    fn mix_columns_examples() {
        assert_eq!(state([0; 16]).mix_columns(), state([0; 16]));
        let mut b = [0u8; 16];
        b[..4].copy_from_slice(&[0xdb, 0x13, 0x53, 0x45]);
        let out = state(b).mix_columns();
        assert_eq!(out.column(0), [0x8e, 0x4d, 0xa1, 0xbc]);
    }

    #[test]
    fn mix_columns_matches_polynomial_product() {
        // straight multiplication by c(x) with gf_mul as the oracle
        let coeff = [0x02, 0x03, 0x01, 0x01];
        for seed in 0..=255u8 {
            let col = [seed, seed.wrapping_mul(7), seed ^ 0x5a, seed.wrapping_add(0x33)];
            let mut b = [0u8; 16];
            b[..4].copy_from_slice(&col);
            let got = state(b).mix_columns().column(0);
            for i in 0..4 {
                let want = (0..4).fold(0u8, |acc, j| acc ^ gf_mul(coeff[(j + 4 - i) % 4], col[j]));
                assert_eq!(got[i], want);
            }
        }
    }

    #[test]
    fn add_round_key_examples() {
        let s = state(core::array::from_fn(|i| i as u8 * 3));
        assert_eq!(s.add_round_key(&[0; 16]), s);
        assert_eq!(state([0xff; 16]).add_round_key(&[0xff; 16]), state([0; 16]));
    }

    proptest! {
        #[test]
        fn inverses(bytes in any::<[u8; 16]>(), key in any::<[u8; 16]>()) {
            let s = state(bytes);
            prop_assert_eq!(s.sub_bytes().inv_sub_bytes(), s);
            prop_assert_eq!(s.shift_rows().inv_shift_rows(), s);
            prop_assert_eq!(s.shift_rows().shift_rows().shift_rows().shift_rows(), s);
            prop_assert_eq!(s.mix_columns().inv_mix_columns(), s);
            prop_assert_eq!(s.add_round_key(&key).add_round_key(&key), s);
            prop_assert_eq!(AesState::from_block(&s.to_block()), s);
        }
    }
}
