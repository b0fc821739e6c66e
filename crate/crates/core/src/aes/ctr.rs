use std::fmt;

use super::{AesError, Block, BlockCipher, BLOCK_LEN};

/// Longest keystream one (nonce, ordinal) pair can produce: 2^32 blocks.
pub const MAX_KEYSTREAM_BYTES: u64 = (1u64 << 32) * BLOCK_LEN as u64;

/// Per-run 8-byte nonce.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Nonce(pub [u8; 8]);

impl Nonce {
    pub fn random() -> Self {
        Nonce(rand::random())
    }
}

impl fmt::Debug for Nonce {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Nonce({})", hex::encode(self.0))
    }
}

/// `nonce || nal_ordinal (BE u32) || block_index (BE u32)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterBlock {
    pub nonce: Nonce,
    pub nal_ordinal: u32,
    pub block_index: u32,
}

impl CounterBlock {
    pub fn to_bytes(self) -> Block {
        let mut b = [0u8; 16];
        b[..8].copy_from_slice(&self.nonce.0);
        b[8..12].copy_from_slice(&self.nal_ordinal.to_be_bytes());
        b[12..].copy_from_slice(&self.block_index.to_be_bytes());
        b
    }
}

fn check_len(nbytes: usize) -> Result<(), AesError> {
    if nbytes as u64 > MAX_KEYSTREAM_BYTES {
        return Err(AesError::CounterOverflow {
            requested: nbytes as u64,
        });
    }
    Ok(())
}

/// First `nbytes` of E(ctr_0) || E(ctr_1) || ... for one NAL unit.
pub fn ctr_keystream<C: BlockCipher + ?Sized>(
    cipher: &C,
    nonce: Nonce,
    nal_ordinal: u32,
    nbytes: usize,
) -> Result<Vec<u8>, AesError> {
    let mut out = vec![0u8; nbytes];
    apply_keystream(cipher, nonce, nal_ordinal, &mut out)?;
    Ok(out)
}

/// XORs the keystream for `nal_ordinal` into `data` in place. Encryption
/// and decryption are the same call.
pub fn apply_keystream<C: BlockCipher + ?Sized>(
    cipher: &C,
    nonce: Nonce,
    nal_ordinal: u32,
    data: &mut [u8],
) -> Result<(), AesError> {
    check_len(data.len())?;
    for (j, chunk) in data.chunks_mut(BLOCK_LEN).enumerate() {
        let counter = CounterBlock {
            nonce,
            nal_ordinal,
            block_index: j as u32,
        };
        let ks = cipher.encrypt_block(&counter.to_bytes());
        for (d, k) in chunk.iter_mut().zip(ks) {
            *d ^= k;
        }
    }
    Ok(())
}
