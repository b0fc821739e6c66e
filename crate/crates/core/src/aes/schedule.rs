use super::{AesError, Block, SBox, ROUNDS};

/// Words in an AES-128 key.
pub const KEY_WORDS: usize = 4;
/// Total expanded words: one round key for the initial whitening plus one per round.
pub const SCHEDULE_WORDS: usize = 4 * (ROUNDS + 1);

/// High bytes of the per-round constants, x^(i-1) in GF(2^8).
pub const ROUND_CONSTANTS: [u8; ROUNDS] = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36];

/// The 44 round-key words of AES-128.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySchedule {
    words: [[u8; 4]; SCHEDULE_WORDS],
}

/// Expands a 16-byte key with the standard S-box.
pub fn key_expansion(key: &[u8]) -> Result<KeySchedule, AesError> {
    KeySchedule::expand_with(key, SBox::standard())
}

impl KeySchedule {
    pub fn expand_with(key: &[u8], sbox: &SBox) -> Result<KeySchedule, AesError> {
        if key.len() != KEY_WORDS * 4 {
            return Err(AesError::BadKeyLength(key.len()));
        }
        let mut words = [[0u8; 4]; SCHEDULE_WORDS];
        for (i, chunk) in key.chunks_exact(4).enumerate() {
            words[i].copy_from_slice(chunk);
        }
        for i in KEY_WORDS..SCHEDULE_WORDS {
            let mut temp = words[i - 1];
            if i % KEY_WORDS == 0 {
                temp = Self::transform(temp, ROUND_CONSTANTS[i / KEY_WORDS - 1], sbox);
            }
            for j in 0..4 {
                words[i][j] = words[i - KEY_WORDS][j] ^ temp[j];
            }
        }
        Ok(KeySchedule { words })
    }

    /// Rotate left one byte, substitute each byte, add the round constant.
    fn transform(w: [u8; 4], rcon: u8, sbox: &SBox) -> [u8; 4] {
        [
            sbox.sub(w[1]) ^ rcon,
            sbox.sub(w[2]),
            sbox.sub(w[3]),
            sbox.sub(w[0]),
        ]
    }

    pub fn words(&self) -> &[[u8; 4]; SCHEDULE_WORDS] {
        &self.words
    }

    pub fn word(&self, i: usize) -> [u8; 4] {
        self.words[i]
    }

    /// Round key `round` (0..=10) as a 16-byte block.
    pub fn round_key(&self, round: usize) -> Block {
        let mut rk = [0u8; 16];
        for (j, w) in self.words[round * 4..round * 4 + 4].iter().enumerate() {
            rk[j * 4..j * 4 + 4].copy_from_slice(w);
        }
        rk
    }
}
