//! Selective encryption of H.264/AVC Annex B streams.
//!
//! Key-frame slice NAL units are encrypted with AES-128 in counter mode while
//! every start code, NAL header and non-selected unit stays untouched, so the
//! output still splits into the same sequence of NAL units as the input.

pub mod aes;
pub mod bitstream;
pub mod harness;
pub mod pipeline;
pub mod selective;
