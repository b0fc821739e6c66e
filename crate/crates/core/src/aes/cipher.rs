use std::sync::atomic::{AtomicU64, Ordering};

use super::{AesError, AesState, Block, KeySchedule, SBox, ROUNDS};

/// Anything that can encrypt a single 16-byte block.
pub trait BlockCipher {
    fn encrypt_block(&self, block: &Block) -> Block;
}

/// Forward cipher: whitening with round key 0, nine full rounds, then a
/// final round without MixColumns.
pub fn encrypt_block(block: &Block, ks: &KeySchedule) -> Block {
    encrypt_with(block, ks, SBox::standard())
}

/// Inverse cipher: the inverse transformations applied in reverse order.
pub fn decrypt_block(block: &Block, ks: &KeySchedule) -> Block {
    decrypt_with(block, ks, SBox::standard())
}

fn encrypt_with(block: &Block, ks: &KeySchedule, sbox: &SBox) -> Block {
    let mut s = AesState::from_block(block).add_round_key(&ks.round_key(0));
    for round in 1..ROUNDS {
        s = s
            .sub_bytes_with(sbox)
            .shift_rows()
            .mix_columns()
            .add_round_key(&ks.round_key(round));
    }
    s.sub_bytes_with(sbox)
        .shift_rows()
        .add_round_key(&ks.round_key(ROUNDS))
        .to_block()
}

fn decrypt_with(block: &Block, ks: &KeySchedule, sbox: &SBox) -> Block {
    let mut s = AesState::from_block(block)
        .add_round_key(&ks.round_key(ROUNDS))
        .inv_shift_rows()
        .inv_sub_bytes_with(sbox);
    for round in (1..ROUNDS).rev() {
        s = s
            .add_round_key(&ks.round_key(round))
            .inv_mix_columns()
            .inv_shift_rows()
            .inv_sub_bytes_with(sbox);
    }
    s.add_round_key(&ks.round_key(0)).to_block()
}

/// AES-128 with its expanded key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aes128 {
    schedule: KeySchedule,
    sbox: SBox,
}

impl Aes128 {
    pub fn new(key: &[u8]) -> Result<Self, AesError> {
        Self::with_sbox(key, SBox::standard().clone())
    }

    /// Cipher using a substitution table other than the standard one. Only
    /// useful for fault injection.
    pub fn with_sbox(key: &[u8], sbox: SBox) -> Result<Self, AesError> {
        Ok(Aes128 {
            schedule: KeySchedule::expand_with(key, &sbox)?,
            sbox,
        })
    }

    pub fn schedule(&self) -> &KeySchedule {
        &self.schedule
    }

    pub fn decrypt_block(&self, block: &Block) -> Block {
        decrypt_with(block, &self.schedule, &self.sbox)
    }
}

impl BlockCipher for Aes128 {
    fn encrypt_block(&self, block: &Block) -> Block {
        encrypt_with(block, &self.schedule, &self.sbox)
    }
}

impl BlockCipher for KeySchedule {
    fn encrypt_block(&self, block: &Block) -> Block {
        encrypt_block(block, self)
    }
}

/// Wraps a cipher and counts block encryptions.
#[derive(Debug)]
pub struct CountingCipher<'a, C: ?Sized> {
    inner: &'a C,
    blocks: AtomicU64,
}

impl<'a, C: BlockCipher + ?Sized> CountingCipher<'a, C> {
    pub fn new(inner: &'a C) -> Self {
        Self {
            inner,
            blocks: AtomicU64::new(0),
        }
    }

    pub fn blocks(&self) -> u64 {
        self.blocks.load(Ordering::Relaxed)
    }
}

impl<C: BlockCipher + ?Sized> BlockCipher for CountingCipher<'_, C> {
    fn encrypt_block(&self, block: &Block) -> Block {
        self.blocks.fetch_add(1, Ordering::Relaxed);
        self.inner.encrypt_block(block)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aes::key_expansion;
    use proptest::prelude::*;

    fn block(hex_str: &str) -> Block {
        hex::decode(hex_str).unwrap().try_into().unwrap()
    }

    #[test]
    fn published_cipher_examples() {
        let ks = key_expansion(&block("000102030405060708090a0b0c0d0e0f")).unwrap();
        let ct = encrypt_block(&block("00112233445566778899aabbccddeeff"), &ks);
        assert_eq!(ct, block("69c4e0d86a7b0430d8cdb78070b4c55a"));
        assert_eq!(decrypt_block(&ct, &ks), block("00112233445566778899aabbccddeeff"));

        let ks = key_expansion(&block("2b7e151628aed2a6abf7158809cf4f3c")).unwrap();
        let ct = encrypt_block(&block("3243f6a8885a308d313198a2e0370734"), &ks);
        assert_eq!(ct, block("3925841d02dc09fbdc118597196a0b32"));
    }

    #[test]
    fn zero_round_trip() {
        let ks = key_expansion(&[0; 16]).unwrap();
        assert_eq!(decrypt_block(&encrypt_block(&[0; 16], &ks), &ks), [0; 16]);
        // encrypting zeros under the zero key
        assert_eq!(encrypt_block(&[0; 16], &ks), block("66e94bd4ef8a2c3b884cfa59ca342b2e"));
    }

    #[test]
    fn counting_wrapper() {
        let aes = Aes128::new(&[7; 16]).unwrap();
        let counted = CountingCipher::new(&aes);
        for i in 0..5u8 {
            assert_eq!(counted.encrypt_block(&[i; 16]), aes.encrypt_block(&[i; 16]));
        }
        assert_eq!(counted.blocks(), 5);
    }

    #[test]
    fn faulty_sbox_changes_output_but_still_inverts() {
        let key = block("000102030405060708090a0b0c0d0e0f");
        let good = Aes128::new(&key).unwrap();
        let bad = Aes128::with_sbox(&key, SBox::with_swapped(0x0c, 0x0d)).unwrap();
        let pt = block("00112233445566778899aabbccddeeff");
        assert_ne!(bad.encrypt_block(&pt), good.encrypt_block(&pt));
        assert_eq!(bad.decrypt_block(&bad.encrypt_block(&pt)), pt);
    }

    proptest! {
        #[test]
        fn round_trip(key in any::<[u8; 16]>(), pt in any::<[u8; 16]>(), other in any::<[u8; 16]>()) {
            let aes = Aes128::new(&key).unwrap();
            let ct = aes.encrypt_block(&pt);
            prop_assert_eq!(aes.decrypt_block(&ct), pt);
            if other != pt {
                prop_assert_ne!(aes.encrypt_block(&other), ct);
            }
        }
    }
}
