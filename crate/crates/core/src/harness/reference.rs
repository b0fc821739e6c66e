//! A second AES-128, written independently of `crate::aes` for use as a
//! cross-check. The S-box is derived from GF(2^8) inversion and the affine
//! map at first use, the state is a row-major 4x4 array, and each round is
//! spelled out step by step. Speed is not a goal.

use std::sync::OnceLock;

type Matrix = [[u8; 4]; 4];

fn mul2(b: u8) -> u8 {
    let shifted = (b as u16) << 1;
    (if shifted & 0x100 != 0 { shifted ^ 0x11b } else { shifted }) as u8
}

fn mul(a: u8, b: u8) -> u8 {
    let mut result = 0u8;
    let mut power = a;
    for bit in 0..8 {
        if (b >> bit) & 1 == 1 {
            result ^= power;
        }
        power = mul2(power);
    }
    result
}

fn sbox() -> &'static [u8; 256] {
    static TABLE: OnceLock<[u8; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0u8; 256];
        for (x, entry) in table.iter_mut().enumerate() {
            let inv = (1..=255u8).find(|&y| mul(x as u8, y) == 1).unwrap_or(0);
            let mut out = 0x63u8;
            for shift in 0..5 {
                out ^= inv.rotate_left(shift);
            }
            *entry = out;
        }
        table
    })
}

fn expand(key: &[u8; 16]) -> [[u8; 4]; 44] {
    let s = sbox();
    let mut w = [[0u8; 4]; 44];
    for i in 0..4 {
        w[i] = [key[4 * i], key[4 * i + 1], key[4 * i + 2], key[4 * i + 3]];
    }
    let mut rcon = 1u8;
    for i in 4..44 {
        let mut t = w[i - 1];
        if i % 4 == 0 {
            t = [s[t[1] as usize] ^ rcon, s[t[2] as usize], s[t[3] as usize], s[t[0] as usize]];
            rcon = mul2(rcon);
        }
        for j in 0..4 {
            w[i][j] = w[i - 4][j] ^ t[j];
        }
    }
    w
}

fn add_key(m: &mut Matrix, w: &[[u8; 4]; 44], round: usize) {
    for c in 0..4 {
        for r in 0..4 {
            m[r][c] ^= w[round * 4 + c][r];
        }
    }
}

fn substitute(m: &mut Matrix) {
    let s = sbox();
    for row in m.iter_mut() {
        for b in row.iter_mut() {
            *b = s[*b as usize];
        }
    }
}

fn shift(m: &mut Matrix) {
    for (r, row) in m.iter_mut().enumerate() {
        row.rotate_left(r);
    }
}

fn mix(m: &mut Matrix) {
    for c in 0..4 {
        let col = [m[0][c], m[1][c], m[2][c], m[3][c]];
        m[0][c] = mul(col[0], 2) ^ mul(col[1], 3) ^ col[2] ^ col[3];
        m[1][c] = col[0] ^ mul(col[1], 2) ^ mul(col[2], 3) ^ col[3];
        m[2][c] = col[0] ^ col[1] ^ mul(col[2], 2) ^ mul(col[3], 3);
        m[3][c] = mul(col[0], 3) ^ col[1] ^ col[2] ^ mul(col[3], 2);
    }
}

/// Encrypts one block.
pub fn encrypt(key: &[u8; 16], block: &[u8; 16]) -> [u8; 16] {
    let w = expand(key);
    let mut m: Matrix = [[0; 4]; 4];
    for (i, &b) in block.iter().enumerate() {
        m[i % 4][i / 4] = b;
    }

    add_key(&mut m, &w, 0);
    for round in 1..=9 {
        substitute(&mut m);
        shift(&mut m);
        mix(&mut m);
        add_key(&mut m, &w, round);
    }
    substitute(&mut m);
    shift(&mut m);
    add_key(&mut m, &w, 10);

    let mut out = [0u8; 16];
    for (i, b) in out.iter_mut().enumerate() {
        *b = m[i % 4][i / 4];
    }
    out
}

/// The expanded key as 44 words.
pub fn key_words(key: &[u8; 16]) -> [[u8; 4]; 44] {
    expand(key)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_sbox_matches_known_entries() {
        let s = sbox();
        assert_eq!(s[0x00], 0x63);
        assert_eq!(s[0x01], 0x7c);
        assert_eq!(s[0x53], 0xed);
        assert_eq!(s[0xff], 0x16);
    }

    #[test]
    fn known_answer() {
        let key: [u8; 16] = core::array::from_fn(|i| i as u8);
        let pt: [u8; 16] = core::array::from_fn(|i| (i as u8) * 0x11);
        assert_eq!(hex::encode(encrypt(&key, &pt)), "69c4e0d86a7b0430d8cdb78070b4c55a");
    }
}
