//! Rough passphrase strength estimate: length times log2 of the combined
//! size of the character classes that appear.

use serde::Serialize;

/// Below this many bits a passphrase is weaker than a random AES-128 key.
pub const STRONG_KEY_BITS: f64 = 128.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrengthEstimate {
    pub bits: f64,
    pub charset_size: u32,
    pub weak: bool,
}

pub fn estimate_passphrase_bits(passphrase: &str) -> StrengthEstimate {
    let (mut lower, mut upper, mut digit, mut other) = (false, false, false, false);
    let mut len = 0usize;
    for c in passphrase.chars() {
        len += 1;
        match c {
            'a'..='z' => lower = true,
            'A'..='Z' => upper = true,
            '0'..='9' => digit = true,
            _ => other = true,
        }
    }
    let charset_size = [(lower, 26), (upper, 26), (digit, 10), (other, 33)]
        .iter()
        .filter(|(present, _)| *present)
        .map(|(_, n)| n)
        .sum::<u32>();
    let bits = if charset_size == 0 {
        0.0
    } else {
        len as f64 * f64::from(charset_size).log2()
    };
    StrengthEstimate {
        bits,
        charset_size,
        weak: bits < STRONG_KEY_BITS,
    }
}
