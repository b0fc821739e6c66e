//! H.264/AVC Annex B parsing at the NAL-unit and slice-header level.
//!
//! Nothing here decodes picture data. The module splits a byte stream into
//! NAL units, converts payloads between their escaped (EBSP) and raw (RBSP)
//! forms, and reads just enough of a slice header to tell intra slices from
//! predicted ones.

mod annexb;
mod bits;
mod escape;
mod report;
mod slice;

pub use annexb::{scan_annexb, serialize_annexb, AnnexBStream, NalHeader, NalUnit, StartCode};
pub use bits::{BitReader, BitWriter};
pub use escape::{ebsp_to_rbsp, escaping_violation, rbsp_to_ebsp};
pub use report::{classify_stream, NalKind, NalRow};
pub use slice::{parse_slice_info, SliceInfo, SliceKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitstreamError {
    #[error("no start code found in non-empty stream")]
    NoStartCode,
    #[error("start code at byte {offset} is not followed by a NAL header byte")]
    MissingHeader { offset: usize },
    #[error("stream holds more NAL units than a 32-bit ordinal can index")]
    TooManyNals,
    #[error("NAL {ordinal}: payload byte {offset} breaks emulation prevention")]
    EscapingViolation { ordinal: u32, offset: usize },
    #[error("NAL {ordinal}: payload ends in a zero byte and cannot be framed")]
    TrailingZeroPayload { ordinal: u32 },
    #[error("malformed emulation-prevention sequence at payload byte {offset}")]
    MalformedEscape { offset: usize },
    #[error("ran out of bits")]
    OutOfBits,
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: u64 },
}
