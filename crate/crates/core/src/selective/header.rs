//! Sidecar metadata written next to an encrypted stream.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SEH1"
//! 4       1     version (0x01)
//! 5       1     policy (0 = IDR only, 1 = all intra)
//! 6       4     key check: first 4 bytes of E_k(0^128)
//! 10      8     nonce
//! 18      4     count (big-endian)
//! 22      4*n   encrypted NAL ordinals, big-endian, strictly increasing
//! ```

use crate::aes::Nonce;

use super::{EncryptionPolicy, SelectiveError};

pub const MAGIC: [u8; 4] = *b"SEH1";
pub const VERSION: u8 = 0x01;
const FIXED_LEN: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherHeader {
    pub policy: EncryptionPolicy,
    pub key_check: [u8; 4],
    pub nonce: Nonce,
    pub ordinals: Vec<u32>,
}

impl CipherHeader {
    pub fn count(&self) -> u32 {
        self.ordinals.len() as u32
    }

    pub fn validate(&self) -> Result<(), SelectiveError> {
        if self.ordinals.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SelectiveError::UnorderedOrdinals);
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, SelectiveError> {
        self.validate()?;
        let mut out = Vec::with_capacity(FIXED_LEN + 4 * self.ordinals.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.policy.to_byte());
        out.extend_from_slice(&self.key_check);
        out.extend_from_slice(&self.nonce.0);
        out.extend_from_slice(&self.count().to_be_bytes());
        for ordinal in &self.ordinals {
            out.extend_from_slice(&ordinal.to_be_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, SelectiveError> {
        if data.len() < MAGIC.len() || data[..4] != MAGIC {
            return Err(SelectiveError::BadMagic);
        }
        if data.len() < FIXED_LEN {
            return Err(SelectiveError::TruncatedHeader {
                expected: FIXED_LEN,
                actual: data.len(),
            });
        }
        if data[4] != VERSION {
            return Err(SelectiveError::BadVersion(data[4]));
        }
        let policy = EncryptionPolicy::from_byte(data[5])?;
        let key_check = data[6..10].try_into().expect("4 bytes");
        let nonce = Nonce(data[10..18].try_into().expect("8 bytes"));
        let count = u32::from_be_bytes(data[18..22].try_into().expect("4 bytes")) as usize;

        let expected = FIXED_LEN + 4 * count;
        if data.len() < expected {
            return Err(SelectiveError::TruncatedHeader {
                expected,
                actual: data.len(),
            });
        }
        if data.len() > expected {
            return Err(SelectiveError::TrailingHeaderBytes(data.len() - expected));
        }
        let ordinals = data[FIXED_LEN..]
            .chunks_exact(4)
            .map(|c| u32::from_be_bytes(c.try_into().expect("4 bytes")))
            .collect();
        let header = CipherHeader {
            policy,
            key_check,
            nonce,
            ordinals,
        };
        header.validate()?;
        Ok(header)
    }
}
