//! MSB-first bit cursor and order-0 Exp-Golomb (`ue(v)`) coding.

use super::BitstreamError;

/// Read cursor over a byte slice. Bits are consumed most-significant first.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    /// Current bit offset from the start of the buffer.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn bits_left(&self) -> usize {
        self.data.len() * 8 - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool, BitstreamError> {
        if self.pos >= self.data.len() * 8 {
            return Err(BitstreamError::OutOfBits);
        }
        let byte = self.data[self.pos / 8];
        let bit = (byte >> (7 - (self.pos % 8))) & 1;
        self.pos += 1;
        Ok(bit == 1)
    }

    /// Reads `n` bits (n <= 32) as an unsigned big-endian integer.
    pub fn read_bits(&mut self, n: u32) -> Result<u32, BitstreamError> {
        assert!(n <= 32, "read_bits supports at most 32 bits");
        if (n as usize) > self.bits_left() {
            return Err(BitstreamError::OutOfBits);
        }
        let mut value = 0u32;
        for _ in 0..n {
            value = (value << 1) | u32::from(self.read_bit()?);
        }
        Ok(value)
    }

    /// Reads one `ue(v)` codeword.
    ///
    /// On error the cursor is left where it was, so a caller can report the
    /// offset of the truncated codeword.
    pub fn read_ue(&mut self) -> Result<u32, BitstreamError> {
        let start = self.pos;
        let result = self.read_ue_inner();
        if result.is_err() {
            self.pos = start;
        }
        result
    }

    fn read_ue_inner(&mut self) -> Result<u32, BitstreamError> {
        let mut leading_zeros = 0u32;
        while !self.read_bit()? {
            leading_zeros += 1;
            // codeNum must fit in 32 bits
            if leading_zeros > 31 {
                return Err(BitstreamError::OutOfRange {
                    what: "exp-golomb prefix",
                    value: u64::from(leading_zeros),
                });
            }
        }
        let suffix = self.read_bits(leading_zeros)?;
        Ok(((1u64 << leading_zeros) - 1 + u64::from(suffix)) as u32)
    }
}

/// Append-only bit sink, MSB first. Used to build slice headers.
#[derive(Debug, Clone, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    pub fn write_bit(&mut self, bit: bool) {
        if self.bit_len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.last_mut().expect("byte pushed above");
            *last |= 0x80 >> (self.bit_len % 8);
        }
        self.bit_len += 1;
    }

    pub fn write_bits(&mut self, value: u32, n: u32) {
        for i in (0..n).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    pub fn write_ue(&mut self, value: u32) {
        let code = u64::from(value) + 1;
        let len = 64 - code.leading_zeros();
        for _ in 0..len - 1 {
            self.write_bit(false);
        }
        for i in (0..len).rev() {
            self.write_bit((code >> i) & 1 == 1);
        }
    }

    /// Pads with zero bits up to the next byte boundary and returns the bytes.
    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        let mut w = BitWriter::new();
        for c in s.chars() {
            w.write_bit(c == '1');
        }
        w.into_bytes()
    }

    #[test]
    fn ue_examples() {
        let data = bits("1");
        let mut r = BitReader::new(&data);
        assert_eq!(r.read_ue().unwrap(), 0);
        assert_eq!(r.position(), 1);

        let data = bits("010");
        let mut r = BitReader::new(&data);
        assert_eq!(r.read_ue().unwrap(), 1);
        assert_eq!(r.position(), 3);

        let data = bits("00111");
        let mut r = BitReader::new(&data);
        assert_eq!(r.read_ue().unwrap(), 6);
        assert_eq!(r.position(), 5);
    }

    #[test]
    fn truncated_codeword() {
        // no terminating 1 bit anywhere
        let mut r = BitReader::new(&[0x00]);
        assert_eq!(r.read_ue(), Err(BitstreamError::OutOfBits));
        assert_eq!(r.position(), 0);

        let mut r = BitReader::new(&[]);
        assert_eq!(r.read_ue(), Err(BitstreamError::OutOfBits));
    }

    #[test]
    fn reader_never_passes_end() {
        let mut r = BitReader::new(&[0xff]);
        assert_eq!(r.read_bits(8).unwrap(), 0xff);
        assert_eq!(r.read_bit(), Err(BitstreamError::OutOfBits));
        assert_eq!(r.position(), 8);
        assert_eq!(r.read_bits(1), Err(BitstreamError::OutOfBits));
    }

    #[test]
    fn writer_matches_hand_encoding() {
        let mut w = BitWriter::new();
        w.write_ue(0);
        w.write_ue(7);
        assert_eq!(w.bit_len(), 8);
        assert_eq!(w.into_bytes(), vec![0x88]);
    }

    #[test]
    fn exp_golomb_exhaustive_u16() {
        for n in 0..=65535u32 {
            let mut w = BitWriter::new();
            w.write_ue(n);
            let expected_len = 2 * (32 - (n + 1).leading_zeros() - 1) as usize + 1;
            assert_eq!(w.bit_len(), expected_len, "n={n}");
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            assert_eq!(r.read_ue().unwrap(), n);
            assert_eq!(r.position(), expected_len);
        }
    }

    #[test]
    fn large_codenum() {
        let mut w = BitWriter::new();
        w.write_ue(u32::MAX - 1);
        let bytes = w.into_bytes();
        assert_eq!(BitReader::new(&bytes).read_ue().unwrap(), u32::MAX - 1);
    }
}
