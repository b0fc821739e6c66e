//! Synthetic Annex B streams standing in for real encoder output.
//!
//! The stream is SPS, PPS, then one slice NAL per frame: an IDR slice
//! (slice_type 7) at every GOP head, a P slice (slice_type 0) otherwise.
//! Slice payloads are seeded noise with planted zero runs so that emulation
//! prevention is exercised.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstream::{rbsp_to_ebsp, BitWriter, StartCode};

pub const DEFAULT_PAYLOAD: usize = 1024;

const SPS_HEADER: u8 = 0x67;
const PPS_HEADER: u8 = 0x68;
const IDR_HEADER: u8 = 0x65;
const P_HEADER: u8 = 0x41;

const SPS_RBSP: [u8; 9] = [0x42, 0xc0, 0x1e, 0xd9, 0x00, 0xa0, 0x47, 0xfe, 0xc8];
const PPS_RBSP: [u8; 3] = [0xce, 0x3c, 0x80];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub gop: u32,
    pub frames: u32,
    /// RBSP length of every slice, slice header and stop byte included.
    pub payload_size: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            gop: 12,
            frames: 60,
            payload_size: DEFAULT_PAYLOAD,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn new(gop: u32, frames: u32) -> Self {
        Self {
            gop,
            frames,
            ..Self::default()
        }
    }

    /// Number of IDR slices the stream will contain.
    pub fn idr_count(&self) -> u32 {
        self.frames.div_ceil(self.gop.max(1))
    }
}

fn slice_header(slice_type: u32) -> Vec<u8> {
    let mut w = BitWriter::new();
    w.write_ue(0); // first_mb_in_slice
    w.write_ue(slice_type);
    w.write_ue(0); // pic_parameter_set_id
    w.into_bytes()
}

fn push_nal(out: &mut Vec<u8>, start_code: StartCode, header: u8, rbsp: &[u8]) {
    out.extend_from_slice(start_code.bytes());
    out.push(header);
    out.extend_from_slice(&rbsp_to_ebsp(rbsp));
}

fn filler(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        if rng.gen_ratio(1, 24) {
            let zeros = rng.gen_range(2..=4);
            out.extend(std::iter::repeat_n(0, zeros));
            out.push(rng.gen_range(0..=3));
        } else {
            out.push(rng.gen());
        }
    }
    out.truncate(len);
    out
}

/// Builds the stream. `gop` and `frames` of zero are treated as one.
pub fn gen_test_stream(cfg: &GeneratorConfig) -> Vec<u8> {
    let gop = cfg.gop.max(1);
    let frames = cfg.frames.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(frames as usize * (cfg.payload_size + 8) + 32);

    push_nal(&mut out, StartCode::Long, SPS_HEADER, &SPS_RBSP);
    push_nal(&mut out, StartCode::Long, PPS_HEADER, &PPS_RBSP);

    for frame in 0..frames {
        let idr = frame % gop == 0;
        let mut rbsp = slice_header(if idr { 7 } else { 0 });
        let body = cfg.payload_size.saturating_sub(rbsp.len() + 1);
        rbsp.extend(filler(&mut rng, body));
        rbsp.push(0x80);
        if idr {
            push_nal(&mut out, StartCode::Long, IDR_HEADER, &rbsp);
        } else {
            push_nal(&mut out, StartCode::Short, P_HEADER, &rbsp);
        }
    }
    out
}
