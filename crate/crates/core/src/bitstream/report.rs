use serde::Serialize;

use super::{ebsp_to_rbsp, parse_slice_info, NalUnit, SliceInfo, StartCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NalKind {
    #[serde(rename = "non-IDR")]
    NonIdr,
    #[serde(rename = "IDR")]
    Idr,
    #[serde(rename = "SEI")]
    Sei,
    #[serde(rename = "SPS")]
    Sps,
    #[serde(rename = "PPS")]
    Pps,
    #[serde(rename = "other")]
    Other,
}

impl NalKind {
    pub fn from_type(nal_unit_type: u8) -> Self {
        match nal_unit_type {
            1 => NalKind::NonIdr,
            5 => NalKind::Idr,
            6 => NalKind::Sei,
            7 => NalKind::Sps,
            8 => NalKind::Pps,
            _ => NalKind::Other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NalKind::NonIdr => "non-IDR",
            NalKind::Idr => "IDR",
            NalKind::Sei => "SEI",
            NalKind::Sps => "SPS",
            NalKind::Pps => "PPS",
            NalKind::Other => "other",
        }
    }
}

/// Inspection record for one NAL unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NalRow {
    pub ordinal: u32,
    pub nal_unit_type: u8,
    pub kind: NalKind,
    pub nal_ref_idc: u8,
    pub start_code: StartCode,
    pub forbidden_bit_set: bool,
    pub ebsp_len: usize,
    /// `None` when the payload has a malformed escape sequence.
    pub rbsp_len: Option<usize>,
    pub slice: Option<SliceInfo>,
    /// Slice NAL whose header could not be read.
    pub unparsed: bool,
}

/// One row per NAL. Never fails; broken slice headers are flagged.
pub fn classify_stream(nals: &[NalUnit]) -> Vec<NalRow> {
    nals.iter()
        .map(|nal| {
            let rbsp = ebsp_to_rbsp(&nal.ebsp).ok();
            let slice = if nal.header.is_slice() {
                rbsp.as_deref().and_then(|r| parse_slice_info(r).ok())
            } else {
                None
            };
            NalRow {
                ordinal: nal.ordinal,
                nal_unit_type: nal.header.nal_unit_type,
                kind: NalKind::from_type(nal.header.nal_unit_type),
                nal_ref_idc: nal.header.nal_ref_idc,
                start_code: nal.start_code,
                forbidden_bit_set: nal.header.forbidden_zero_bit == 1,
                ebsp_len: nal.ebsp.len(),
                rbsp_len: rbsp.as_ref().map(Vec::len),
                slice,
                unparsed: nal.header.is_slice() && slice.is_none(),
            }
        })
        .collect()
}
