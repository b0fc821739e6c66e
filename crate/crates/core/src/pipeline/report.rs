use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::aes::BLOCK_LEN;
use crate::bitstream::{classify_stream, AnnexBStream, NalRow};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    #[serde(flatten)]
    pub nal: NalRow,
    pub selected: bool,
}

impl ReportRow {
    /// Payload bytes run through the keystream when selected.
    pub fn payload_len(&self) -> usize {
        self.nal.rbsp_len.unwrap_or(self.nal.ebsp_len)
    }
}

/// Per-NAL rows plus totals. Every aggregate is a sum over `rows` (or, for
/// `total_bytes`, the size of the input file).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamReport {
    pub rows: Vec<ReportRow>,
    pub nal_count: usize,
    pub total_bytes: u64,
    pub leading_garbage_bytes: usize,
    pub vcl_payload_bytes: u64,
    pub selected_bytes: u64,
    pub encrypted_fraction: f64,
    pub aes_blocks: u64,
    /// Output size minus input size, when a transformed stream was written.
    pub size_delta: Option<i64>,
}

impl StreamReport {
    /// `selected` lists the ordinals encrypted (or decrypted) by the run.
    pub fn build(stream: &AnnexBStream, total_bytes: u64, selected: &[u32]) -> Self {
        let selected: HashSet<u32> = selected.iter().copied().collect();
        let rows: Vec<ReportRow> = classify_stream(&stream.nals)
            .into_iter()
            .map(|nal| ReportRow {
                selected: selected.contains(&nal.ordinal),
                nal,
            })
            .collect();
        let vcl_payload_bytes = rows
            .iter()
            .filter(|r| (1..=5).contains(&r.nal.nal_unit_type))
            .map(|r| r.payload_len() as u64)
            .sum();
        let chosen = || rows.iter().filter(|r| r.selected);
        let selected_bytes = chosen().map(|r| r.payload_len() as u64).sum();
        let aes_blocks = chosen()
            .map(|r| r.payload_len().div_ceil(BLOCK_LEN) as u64)
            .sum();
        StreamReport {
            nal_count: rows.len(),
            total_bytes,
            leading_garbage_bytes: stream.leading.len(),
            vcl_payload_bytes,
            selected_bytes,
            encrypted_fraction: if vcl_payload_bytes == 0 {
                0.0
            } else {
                selected_bytes as f64 / vcl_payload_bytes as f64
            },
            aes_blocks,
            size_delta: None,
            rows,
        }
    }

    pub fn with_size_delta(mut self, delta: i64) -> Self {
        self.size_delta = Some(delta);
        self
    }

    pub fn count_kind(&self, kind: crate::bitstream::NalKind) -> usize {
        self.rows.iter().filter(|r| r.nal.kind == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable table, one line per NAL, then the totals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        if self.leading_garbage_bytes > 0 {
            let _ = writeln!(out, "warning: {} bytes before first start code", self.leading_garbage_bytes);
        }
        let _ = writeln!(
            out,
            "{:>7}  {:>4}  {:<7}  {:>3}  {:>2}  {:>8}  {:>8}  {:<10}  enc",
            "ordinal", "type", "kind", "ref", "sc", "ebsp", "rbsp", "slice"
        );
        for r in &self.rows {
            let n = &r.nal;
            let slice = match (&n.slice, n.unparsed) {
                (Some(s), _) => format!("{:?}({})", s.kind(), s.slice_type),
                (None, true) => "unparsed".to_string(),
                (None, false) => "-".to_string(),
            };
            let rbsp = n.rbsp_len.map_or("bad".to_string(), |l| l.to_string());
            let _ = writeln!(
                out,
                "{:>7}  {:>4}  {:<7}  {:>3}  {:>2}  {:>8}  {:>8}  {:<10}  {}{}",
                n.ordinal,
                n.nal_unit_type,
                n.kind.name(),
                n.nal_ref_idc,
                n.start_code.len(),
                n.ebsp_len,
                rbsp,
                slice,
                if r.selected { "*" } else { "" },
                if n.forbidden_bit_set { " forbidden_zero_bit=1" } else { "" },
            );
        }
        let _ = writeln!(out, "nal units:          {}", self.nal_count);
        let _ = writeln!(out, "total bytes:        {}", self.total_bytes);
        let _ = writeln!(out, "vcl payload bytes:  {}", self.vcl_payload_bytes);
        let _ = writeln!(out, "selected bytes:     {}", self.selected_bytes);
        let _ = writeln!(out, "encrypted fraction: {:.4}", self.encrypted_fraction);
        let _ = writeln!(out, "aes blocks:         {}", self.aes_blocks);
        if let Some(d) = self.size_delta {
            let _ = writeln!(out, "size delta:         {d:+}");
        }
        out
    }
}
