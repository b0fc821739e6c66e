//! AES-128, written out from its four round transformations, and a counter
//! mode keystream for length-preserving payload encryption.
//!
//! No constant-time guarantees: the S-box is a plain table lookup.

mod cipher;
mod ctr;
mod sbox;
mod schedule;
mod state;

pub use cipher::{decrypt_block, encrypt_block, Aes128, BlockCipher, CountingCipher};
pub use ctr::{apply_keystream, ctr_keystream, CounterBlock, Nonce, MAX_KEYSTREAM_BYTES};
pub use sbox::SBox;
pub use schedule::{key_expansion, KeySchedule, ROUND_CONSTANTS};
pub use state::AesState;

use thiserror::Error;

pub const BLOCK_LEN: usize = 16;
pub const KEY_LEN: usize = 16;
pub const ROUNDS: usize = 10;

pub type Block = [u8; BLOCK_LEN];
pub type Key = [u8; KEY_LEN];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AesError {
    #[error("AES-128 key must be 16 bytes, got {0}")]
    BadKeyLength(usize),
    #[error("keystream of {requested} bytes exceeds the 2^32-block counter space")]
    CounterOverflow { requested: u64 },
    #[error("substitution table is not a permutation")]
    NotAPermutation,
}
