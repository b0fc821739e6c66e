//! Selective versus whole-stream encryption work on the same input.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::aes::{apply_keystream, BlockCipher, CountingCipher, Nonce, BLOCK_LEN};
use crate::bitstream::{ebsp_to_rbsp, rbsp_to_ebsp, NalUnit};
use crate::selective::{encrypt_selected, select, EncryptionPolicy, SelectiveError};

/// Byte and block counts are exact; wall times are informative only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    /// Framed size of the stream (start codes, headers, payloads).
    pub total_bytes: u64,
    /// RBSP bytes of VCL units.
    pub vcl_payload_bytes: u64,
    pub selective_encrypted_bytes: u64,
    /// RBSP bytes of every unit.
    pub naive_encrypted_bytes: u64,
    /// selective_encrypted_bytes / vcl_payload_bytes
    pub selective_fraction: f64,
    pub aes_blocks_selective: u64,
    pub aes_blocks_naive: u64,
    /// Sum of ceil(len / 16) over the selected units, computed from lengths.
    pub expected_blocks_selective: u64,
    /// Same sum over every unit.
    pub expected_blocks_naive: u64,
    pub selected_units: usize,
    /// Framed size change caused by re-escaping the selective output.
    pub escape_overhead_bytes: i64,
    pub wall_time_selective: f64,
    pub wall_time_naive: f64,
}

impl BenchResult {
    /// Arithmetic invariants that must hold on every run.
    pub fn check(&self) -> Result<(), String> {
        if self.selective_encrypted_bytes > self.naive_encrypted_bytes {
            return Err("selective pass encrypted more than the naive pass".into());
        }
        if self.aes_blocks_selective != self.expected_blocks_selective {
            return Err(format!(
                "selective blocks {} != expected {}",
                self.aes_blocks_selective, self.expected_blocks_selective
            ));
        }
        if self.aes_blocks_naive != self.expected_blocks_naive {
            return Err(format!(
                "naive blocks {} != expected {}",
                self.aes_blocks_naive, self.expected_blocks_naive
            ));
        }
        if !(0.0..=1.0).contains(&self.selective_fraction) {
            return Err(format!("fraction {} outside [0, 1]", self.selective_fraction));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "total_bytes: {}", self.total_bytes);
        let _ = writeln!(out, "vcl_payload_bytes: {}", self.vcl_payload_bytes);
        let _ = writeln!(out, "selective_encrypted_bytes: {}", self.selective_encrypted_bytes);
        let _ = writeln!(out, "naive_encrypted_bytes: {}", self.naive_encrypted_bytes);
        let _ = writeln!(out, "selective_fraction: {:.6}", self.selective_fraction);
        let _ = writeln!(out, "aes_blocks_selective: {}", self.aes_blocks_selective);
        let _ = writeln!(out, "aes_blocks_naive: {}", self.aes_blocks_naive);
        let _ = writeln!(out, "selected_units: {}", self.selected_units);
        let _ = writeln!(out, "escape_overhead_bytes: {}", self.escape_overhead_bytes);
        let _ = writeln!(out, "wall_time_selective: {:.6}", self.wall_time_selective);
        let _ = writeln!(out, "wall_time_naive: {:.6}", self.wall_time_naive);
        out
    }
}

fn blocks_for(len: usize) -> u64 {
    len.div_ceil(BLOCK_LEN) as u64
}

fn payload(nal: &NalUnit) -> Vec<u8> {
    ebsp_to_rbsp(&nal.ebsp).unwrap_or_else(|_| nal.ebsp.clone())
}

/// Runs the selective pass and a naive pass (CTR over every unit's RBSP
/// with the same counter layout) over the same units, single-threaded.
pub fn bench<C: BlockCipher + ?Sized>(
    nals: &[NalUnit],
    cipher: &C,
    policy: EncryptionPolicy,
) -> Result<BenchResult, SelectiveError> {
    let nonce = Nonce([0x5e; 8]);
    let selection = select(nals, policy);
    let expected_blocks_selective = selection
        .selected_ordinals
        .iter()
        .map(|&o| blocks_for(payload(&nals[o as usize]).len()))
        .sum();

    let counted = CountingCipher::new(cipher);
    let start = Instant::now();
    let encrypted = encrypt_selected(nals, &selection.selected_ordinals, &counted, nonce)?;
    let wall_time_selective = start.elapsed().as_secs_f64();
    let aes_blocks_selective = counted.blocks();

    let naive_counted = CountingCipher::new(cipher);
    let mut naive_encrypted_bytes = 0u64;
    let mut expected_blocks_naive = 0u64;
    let start = Instant::now();
    for nal in nals {
        let mut rbsp = payload(nal);
        naive_encrypted_bytes += rbsp.len() as u64;
        expected_blocks_naive += blocks_for(rbsp.len());
        apply_keystream(&naive_counted, nonce, nal.ordinal, &mut rbsp)?;
        std::hint::black_box(rbsp_to_ebsp(&rbsp));
    }
    let wall_time_naive = start.elapsed().as_secs_f64();

    let framed = |units: &[NalUnit]| units.iter().map(NalUnit::framed_len).sum::<usize>();
    let total_bytes = framed(nals) as u64;
    Ok(BenchResult {
        total_bytes,
        vcl_payload_bytes: selection.total_payload_bytes,
        selective_encrypted_bytes: selection.selected_bytes,
        naive_encrypted_bytes,
        selective_fraction: selection.encrypted_fraction(),
        aes_blocks_selective,
        aes_blocks_naive: naive_counted.blocks(),
        expected_blocks_selective,
        expected_blocks_naive,
        selected_units: selection.selected_ordinals.len(),
        escape_overhead_bytes: framed(&encrypted) as i64 - total_bytes as i64,
        wall_time_selective,
        wall_time_naive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aes::Aes128;
    use crate::bitstream::scan_annexb;
    use crate::pipeline::{gen_test_stream, GeneratorConfig};

    fn stream(gop: u32, frames: u32) -> Vec<NalUnit> {
        let cfg = GeneratorConfig { payload_size: 200, ..GeneratorConfig::new(gop, frames) };
        scan_annexb(&gen_test_stream(&cfg)).unwrap().nals
    }

    #[test]
    fn fraction_for_gop_12() {
        let r = bench(&stream(12, 60), &Aes128::new(&[1; 16]).unwrap(), EncryptionPolicy::IdrOnly).unwrap();
        r.check().unwrap();
        assert_eq!(r.selected_units, 5);
        assert_eq!(r.selective_encrypted_bytes, 5 * 200);
        assert_eq!(r.vcl_payload_bytes, 60 * 200);
        assert!((r.selective_fraction - 5.0 / 60.0).abs() < 1e-12);
        assert_eq!(r.aes_blocks_selective, 5 * 13);
    }

    #[test]
    fn nothing_selected() {
        let nals: Vec<NalUnit> = stream(12, 12).into_iter().filter(|n| n.header.nal_unit_type != 5).collect();
        let r = bench(&nals, &Aes128::new(&[1; 16]).unwrap(), EncryptionPolicy::AllIntra).unwrap();
        r.check().unwrap();
        assert_eq!(r.selective_encrypted_bytes, 0);
        assert_eq!(r.aes_blocks_selective, 0);
        assert_eq!(r.escape_overhead_bytes, 0);
    }

    #[test]
    fn gop_one_selects_every_slice() {
        let r = bench(&stream(1, 10), &Aes128::new(&[1; 16]).unwrap(), EncryptionPolicy::IdrOnly).unwrap();
        r.check().unwrap();
        assert_eq!(r.selective_encrypted_bytes, r.vcl_payload_bytes);
        assert_eq!(r.selective_fraction, 1.0);
    }
}
