//! Emulation prevention: the `0x03` byte stuffing that keeps a NAL payload
//! from ever containing a start-code prefix.
//!
//! Inside an escaped payload the three-byte sequences `00 00 00`, `00 00 01`
//! and `00 00 02` never occur. A raw payload containing `00 00 xx` with
//! `xx <= 03` is written as `00 00 03 xx`.

use super::BitstreamError;

/// Removes emulation-prevention bytes.
///
/// A `0x03` is dropped when it follows two zero bytes and is itself followed
/// by a byte `<= 0x03`. A `00 00 03` at the very end of the payload is kept
/// as data. `00 00` followed by `00`, `01` or `02`, or `00 00 03` followed by
/// a byte above `0x03`, is rejected.
pub fn ebsp_to_rbsp(ebsp: &[u8]) -> Result<Vec<u8>, BitstreamError> {
    let mut out = Vec::with_capacity(ebsp.len());
    let mut zeros = 0usize;
    let mut i = 0;
    while i < ebsp.len() {
        let b = ebsp[i];
        if zeros >= 2 {
            match b {
                0x00..=0x02 => return Err(BitstreamError::MalformedEscape { offset: i }),
                0x03 => match ebsp.get(i + 1) {
                    Some(&next) if next <= 0x03 => {
                        zeros = 0;
                        i += 1;
                        continue;
                    }
                    Some(_) => return Err(BitstreamError::MalformedEscape { offset: i }),
                    None => {}
                },
                _ => {}
            }
        }
        zeros = if b == 0 { zeros + 1 } else { 0 };
        out.push(b);
        i += 1;
    }
    Ok(out)
}

/// Inserts emulation-prevention bytes. Never fails.
pub fn rbsp_to_ebsp(rbsp: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(rbsp.len() + rbsp.len() / 64);
    let mut zeros = 0usize;
    for &b in rbsp {
        if zeros >= 2 && b <= 0x03 {
            out.push(0x03);
            zeros = 0;
        }
        zeros = if b == 0 { zeros + 1 } else { 0 };
        out.push(b);
    }
    out
}

/// Offset of the first byte completing a forbidden `00 00 0x` (x <= 2)
/// sequence, if any.
pub fn escaping_violation(ebsp: &[u8]) -> Option<usize> {
    ebsp.windows(3)
        .position(|w| w[0] == 0 && w[1] == 0 && w[2] <= 0x02)
        .map(|p| p + 2)
}
