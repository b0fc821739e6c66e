//! Key material: raw hex keys, or passphrases stretched by an iterated
//! AES-based compression function.
//!
//! The passphrase construction is not a standard KDF. Bytes are padded with
//! `0x80` and zeros to a multiple of 16, then starting from `H = 0^128` the
//! update `H = E_m(H) ^ H` is applied for every 16-byte block `m`, the whole
//! pass repeated `iterations` times.

use crate::aes::{Aes128, BlockCipher, Key, BLOCK_LEN, KEY_LEN};

use super::PipelineError;

pub const DEFAULT_KDF_ITERATIONS: u32 = 10_000;

#[derive(Clone, PartialEq, Eq)]
pub enum KeySource {
    /// 32 hex characters.
    RawKey(String),
    Passphrase { text: String, iterations: u32 },
}

impl std::fmt::Debug for KeySource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KeySource::RawKey(_) => f.write_str("RawKey(..)"),
            KeySource::Passphrase { iterations, .. } => {
                write!(f, "Passphrase {{ iterations: {iterations}, .. }}")
            }
        }
    }
}

pub fn derive_key(source: &KeySource) -> Result<Key, PipelineError> {
    match source {
        KeySource::RawKey(text) => parse_hex_key(text),
        KeySource::Passphrase { text, iterations } => passphrase_key(text, *iterations),
    }
}

pub fn parse_hex_key(text: &str) -> Result<Key, PipelineError> {
    let bytes = hex::decode(text.trim()).map_err(|e| PipelineError::BadHex(e.to_string()))?;
    bytes.try_into().map_err(|b: Vec<u8>| {
        PipelineError::BadHex(format!("expected {KEY_LEN} bytes, got {}", b.len()))
    })
}

pub fn passphrase_key(passphrase: &str, iterations: u32) -> Result<Key, PipelineError> {
    if passphrase.is_empty() {
        return Err(PipelineError::EmptyPassphrase);
    }
    if iterations == 0 {
        return Err(PipelineError::InvalidArgument(
            "kdf iterations must be at least 1".into(),
        ));
    }
    let mut padded = passphrase.as_bytes().to_vec();
    padded.push(0x80);
    padded.resize(padded.len().div_ceil(BLOCK_LEN) * BLOCK_LEN, 0);

    // one expanded key per message block, reused across iterations
    let ciphers = padded
        .chunks_exact(BLOCK_LEN)
        .map(Aes128::new)
        .collect::<Result<Vec<_>, _>>()?;

    let mut h = [0u8; BLOCK_LEN];
    for _ in 0..iterations {
        for cipher in &ciphers {
            let e = cipher.encrypt_block(&h);
            for (hb, eb) in h.iter_mut().zip(e) {
                *hb ^= eb;
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_hex() {
        let k = derive_key(&KeySource::RawKey("000102030405060708090a0b0c0d0e0f".into())).unwrap();
        assert_eq!(k, core::array::from_fn(|i| i as u8));
        assert!(matches!(
            derive_key(&KeySource::RawKey("0001".into())),
            Err(PipelineError::BadHex(_))
        ));
        assert!(matches!(
            derive_key(&KeySource::RawKey("zz0102030405060708090a0b0c0d0e0f".into())),
            Err(PipelineError::BadHex(_))
        ));
    }

    #[test]
    fn single_block_passphrase() {
        // one iteration over one block: E_m(0) where m = "a" 80 00..00
        let mut m = [0u8; 16];
        m[0] = b'a';
        m[1] = 0x80;
        let want = Aes128::new(&m).unwrap().encrypt_block(&[0; 16]);
        assert_eq!(passphrase_key("a", 1).unwrap(), want);
        assert_eq!(hex::encode(want), "5e032572a8bddda63df07808e7f3fbad");
    }

    #[test]
    fn iteration_sensitive() {
        assert_ne!(passphrase_key("a", 1).unwrap(), passphrase_key("a", 2).unwrap());
    }

    #[test]
    fn rejects_empty_and_zero_iterations() {
        assert!(matches!(passphrase_key("", 5), Err(PipelineError::EmptyPassphrase)));
        assert!(matches!(passphrase_key("x", 0), Err(PipelineError::InvalidArgument(_))));
    }

    #[test]
    fn debug_hides_secret() {
        let s = format!("{:?}", KeySource::Passphrase { text: "hunter2".into(), iterations: 3 });
        assert!(!s.contains("hunter2"));
    }
}
