//! Start-code framing (ITU-T H.264 Annex B).

use serde::Serialize;

use super::{escaping_violation, BitstreamError};

/// Start-code prefix width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StartCode {
    /// `00 00 01`
    Short,
    /// `00 00 00 01`
    Long,
}

impl StartCode {
    pub fn len(self) -> usize {
        match self {
            StartCode::Short => 3,
            StartCode::Long => 4,
        }
    }

    pub fn bytes(self) -> &'static [u8] {
        match self {
            StartCode::Short => &[0, 0, 1],
            StartCode::Long => &[0, 0, 0, 1],
        }
    }
}

/// The one-byte NAL unit header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct NalHeader {
    pub forbidden_zero_bit: u8,
    pub nal_ref_idc: u8,
    pub nal_unit_type: u8,
}

impl NalHeader {
    pub fn parse(b: u8) -> Self {
        Self {
            forbidden_zero_bit: b >> 7,
            nal_ref_idc: (b >> 5) & 0x03,
            nal_unit_type: b & 0x1f,
        }
    }

    pub fn to_byte(self) -> u8 {
        (self.forbidden_zero_bit & 1) << 7 | (self.nal_ref_idc & 0x03) << 5 | (self.nal_unit_type & 0x1f)
    }

    /// Coded slice of a non-IDR (1) or IDR (5) picture.
    pub fn is_slice(self) -> bool {
        matches!(self.nal_unit_type, 1 | 5)
    }

    /// Video coding layer types 1..=5.
    pub fn is_vcl(self) -> bool {
        (1..=5).contains(&self.nal_unit_type)
    }
}

/// One NAL unit as it appears in an Annex B stream.
///
/// `ebsp` is the payload after the header byte with emulation-prevention
/// bytes still present. Zero bytes between the payload and the next start
/// code (`trailing_zero_8bits`) are kept as a count so the stream serializes
/// back byte for byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NalUnit {
    pub ordinal: u32,
    pub start_code: StartCode,
    pub header: NalHeader,
    pub ebsp: Vec<u8>,
    pub trailing_zeros: usize,
}

impl NalUnit {
    pub fn new(ordinal: u32, start_code: StartCode, header_byte: u8, ebsp: Vec<u8>) -> Self {
        Self {
            ordinal,
            start_code,
            header: NalHeader::parse(header_byte),
            ebsp,
            trailing_zeros: 0,
        }
    }

    pub fn start_code_len(&self) -> usize {
        self.start_code.len()
    }

    /// Bytes this unit occupies in the serialized stream.
    pub fn framed_len(&self) -> usize {
        self.start_code.len() + 1 + self.ebsp.len() + self.trailing_zeros
    }
}

/// A parsed stream: any bytes before the first start code, then the NAL units.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnexBStream {
    pub leading: Vec<u8>,
    pub nals: Vec<NalUnit>,
}

impl AnnexBStream {
    pub fn to_bytes(&self) -> Result<Vec<u8>, BitstreamError> {
        serialize_annexb(self)
    }

    pub fn has_leading_garbage(&self) -> bool {
        !self.leading.is_empty()
    }
}

/// Position of the next `00 00 01` at or after `from`.
fn find_start_code(data: &[u8], from: usize) -> Option<usize> {
    let mut i = from;
    while i + 2 < data.len() {
        match data[i + 2] {
            0x00 => i += 1,
            0x01 if data[i] == 0 && data[i + 1] == 0 => return Some(i),
            _ => i += 3,
        }
    }
    None
}

/// Splits an Annex B byte stream into NAL units.
///
/// The byte immediately after a start code is always taken as the NAL header.
/// A zero byte directly before `00 00 01` makes that a four-byte start code;
/// any further zeros are recorded as the previous unit's trailing zeros. The
/// final unit runs to the end of the input.
pub fn scan_annexb(data: &[u8]) -> Result<AnnexBStream, BitstreamError> {
    if data.is_empty() {
        return Ok(AnnexBStream::default());
    }
    let first = find_start_code(data, 0).ok_or(BitstreamError::NoStartCode)?;
    let (leading_end, mut start_code) = if first > 0 && data[first - 1] == 0 {
        (first - 1, StartCode::Long)
    } else {
        (first, StartCode::Short)
    };

    let mut stream = AnnexBStream {
        leading: data[..leading_end].to_vec(),
        nals: Vec::new(),
    };
    let mut prefix_pos = first;
    loop {
        let header_pos = prefix_pos + 3;
        if header_pos >= data.len() {
            return Err(BitstreamError::MissingHeader { offset: prefix_pos });
        }
        let body_start = header_pos + 1;
        let next = find_start_code(data, body_start);
        let body_end = next.unwrap_or(data.len());
        let zeros = data[body_start..body_end]
            .iter()
            .rev()
            .take_while(|&&b| b == 0)
            .count();

        let (trailing_zeros, next_start_code) = match next {
            Some(_) if zeros > 0 => (zeros - 1, StartCode::Long),
            Some(_) => (0, StartCode::Short),
            None => (zeros, StartCode::Short),
        };
        let ordinal = u32::try_from(stream.nals.len()).map_err(|_| BitstreamError::TooManyNals)?;
        stream.nals.push(NalUnit {
            ordinal,
            start_code,
            header: NalHeader::parse(data[header_pos]),
            ebsp: data[body_start..body_end - zeros].to_vec(),
            trailing_zeros,
        });

        match next {
            Some(p) => {
                prefix_pos = p;
                start_code = next_start_code;
            }
            None => break,
        }
    }
    Ok(stream)
}

/// Writes the stream back out, each unit with its original start-code width.
///
/// Fails if a payload contains a forbidden `00 00 0x` sequence or ends in a
/// zero byte, either of which would change how the output re-scans.
pub fn serialize_annexb(stream: &AnnexBStream) -> Result<Vec<u8>, BitstreamError> {
    let total = stream.leading.len() + stream.nals.iter().map(NalUnit::framed_len).sum::<usize>();
    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(&stream.leading);
    for nal in &stream.nals {
        if let Some(offset) = escaping_violation(&nal.ebsp) {
            return Err(BitstreamError::EscapingViolation {
                ordinal: nal.ordinal,
                offset,
            });
        }
        if nal.ebsp.last() == Some(&0) {
            return Err(BitstreamError::TrailingZeroPayload {
                ordinal: nal.ordinal,
            });
        }
        out.extend_from_slice(nal.start_code.bytes());
        out.push(nal.header.to_byte());
        out.extend_from_slice(&nal.ebsp);
        out.resize(out.len() + nal.trailing_zeros, 0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_stream() {
        assert_eq!(scan_annexb(&[]).unwrap(), AnnexBStream::default());
        assert_eq!(serialize_annexb(&AnnexBStream::default()).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn long_then_short_start_code() {
        let data = [0, 0, 0, 1, 0x67, 0xaa, 0, 0, 1, 0x65, 0xbb];
        let s = scan_annexb(&data).unwrap();
        assert!(s.leading.is_empty());
        assert_eq!(s.nals.len(), 2);
        assert_eq!(s.nals[0].start_code_len(), 4);
        assert_eq!(s.nals[0].header.nal_unit_type, 7);
        assert_eq!(s.nals[0].ebsp, vec![0xaa]);
        assert_eq!(s.nals[1].start_code_len(), 3);
        assert_eq!(s.nals[1].header.nal_unit_type, 5);
        assert_eq!(s.nals[1].ebsp, vec![0xbb]);
        assert_eq!(serialize_annexb(&s).unwrap(), data);
    }

    #[test]
    fn start_code_terminates_previous_unit() {
        let data = [0, 0, 1, 0x41, 0, 0, 1, 0x41];
        let s = scan_annexb(&data).unwrap();
        assert_eq!(s.nals.len(), 2);
        for (i, nal) in s.nals.iter().enumerate() {
            assert_eq!(nal.ordinal as usize, i);
            assert_eq!(nal.header.nal_unit_type, 1);
            assert!(nal.ebsp.is_empty());
        }
    }

    #[test]
    fn no_start_code() {
        assert_eq!(scan_annexb(&[1, 2, 3, 0, 0]), Err(BitstreamError::NoStartCode));
        assert_eq!(scan_annexb(&[0, 0]), Err(BitstreamError::NoStartCode));
    }

    #[test]
    fn dangling_start_code() {
        assert_eq!(
            scan_annexb(&[0, 0, 1, 0x65, 0x11, 0, 0, 1]),
            Err(BitstreamError::MissingHeader { offset: 5 })
        );
    }

    #[test]
    fn leading_garbage_kept() {
        let data = [0xde, 0xad, 0, 0, 0, 1, 0x09, 0xf0];
        let s = scan_annexb(&data).unwrap();
        assert_eq!(s.leading, vec![0xde, 0xad]);
        assert!(s.has_leading_garbage());
        assert_eq!(s.nals[0].start_code, StartCode::Long);
        assert_eq!(serialize_annexb(&s).unwrap(), data);
    }

    #[test]
    fn trailing_zero_bytes() {
        let data = [0, 0, 1, 0x65, 0x11, 0, 0, 0, 0, 1, 0x41, 0x22, 0, 0];
        let s = scan_annexb(&data).unwrap();
        assert_eq!(s.nals[0].ebsp, vec![0x11]);
        assert_eq!(s.nals[0].trailing_zeros, 1);
        assert_eq!(s.nals[1].start_code, StartCode::Long);
        assert_eq!(s.nals[1].ebsp, vec![0x22]);
        assert_eq!(s.nals[1].trailing_zeros, 2);
        assert_eq!(serialize_annexb(&s).unwrap(), data);
    }

    #[test]
    fn header_examples() {
        assert_eq!(
            NalHeader::parse(0x65),
            NalHeader { forbidden_zero_bit: 0, nal_ref_idc: 3, nal_unit_type: 5 }
        );
        assert_eq!(
            NalHeader::parse(0x67),
            NalHeader { forbidden_zero_bit: 0, nal_ref_idc: 3, nal_unit_type: 7 }
        );
        assert_eq!(
            NalHeader::parse(0x00),
            NalHeader { forbidden_zero_bit: 0, nal_ref_idc: 0, nal_unit_type: 0 }
        );
        assert_eq!(NalHeader::parse(0xe5).forbidden_zero_bit, 1);
        for b in 0..=255u8 {
            assert_eq!(NalHeader::parse(b).to_byte(), b);
        }
    }

    #[test]
    fn serialize_single_unit() {
        let s = AnnexBStream {
            leading: Vec::new(),
            nals: vec![NalUnit::new(0, StartCode::Long, 0x67, vec![0xaa])],
        };
        assert_eq!(serialize_annexb(&s).unwrap(), vec![0, 0, 0, 1, 0x67, 0xaa]);
    }

    #[test]
    fn serialize_rejects_broken_escaping() {
        let s = AnnexBStream {
            leading: Vec::new(),
            nals: vec![NalUnit::new(0, StartCode::Short, 0x65, vec![0x10, 0, 0, 2, 0x10])],
        };
        assert_eq!(
            serialize_annexb(&s),
            Err(BitstreamError::EscapingViolation { ordinal: 0, offset: 3 })
        );
        let s = AnnexBStream {
            leading: Vec::new(),
            nals: vec![NalUnit::new(0, StartCode::Short, 0x65, vec![0x10, 0])],
        };
        assert_eq!(serialize_annexb(&s), Err(BitstreamError::TrailingZeroPayload { ordinal: 0 }));
    }

    fn arbitrary_stream() -> impl Strategy<Value = Vec<u8>> {
        let unit = (
            any::<bool>(),
            any::<u8>(),
            prop::collection::vec(prop_oneof![3 => Just(0u8), 1 => 1u8..=3, 2 => any::<u8>()], 0..40),
        );
        prop::collection::vec(unit, 1..12).prop_map(|units| {
            let mut out = Vec::new();
            for (long, header, payload) in units {
                out.extend_from_slice(if long { &[0, 0, 0, 1][..] } else { &[0, 0, 1][..] });
                out.push(header);
                out.extend_from_slice(&crate::bitstream::rbsp_to_ebsp(&payload));
            }
            out
        })
    }

    proptest! {
        #[test]
        fn round_trip(data in arbitrary_stream()) {
            let s = scan_annexb(&data).unwrap();
            for (i, nal) in s.nals.iter().enumerate() {
                prop_assert_eq!(nal.ordinal as usize, i);
                prop_assert_eq!(escaping_violation(&nal.ebsp), None);
            }
            prop_assert_eq!(serialize_annexb(&s).unwrap(), data);
        }
    }
}
