use serde::Serialize;

use super::{BitReader, BitstreamError};

/// Prediction kind of a slice, from `slice_type mod 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SliceKind {
    P,
    B,
    I,
    SP,
    SI,
}

impl SliceKind {
    pub fn from_slice_type(slice_type: u32) -> Self {
        match slice_type % 5 {
            0 => SliceKind::P,
            1 => SliceKind::B,
            2 => SliceKind::I,
            3 => SliceKind::SP,
            _ => SliceKind::SI,
        }
    }
}

/// The two leading slice-header fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SliceInfo {
    pub first_mb_in_slice: u32,
    pub slice_type: u32,
    pub is_intra: bool,
}

impl SliceInfo {
    pub fn kind(&self) -> SliceKind {
        SliceKind::from_slice_type(self.slice_type)
    }
}

/// Reads `first_mb_in_slice` and `slice_type` from the start of a slice RBSP.
/// Parsing stops there.
pub fn parse_slice_info(rbsp: &[u8]) -> Result<SliceInfo, BitstreamError> {
    let mut r = BitReader::new(rbsp);
    let first_mb_in_slice = r.read_ue()?;
    let slice_type = r.read_ue()?;
    if slice_type > 9 {
        return Err(BitstreamError::OutOfRange {
            what: "slice_type",
            value: u64::from(slice_type),
        });
    }
    Ok(SliceInfo {
        first_mb_in_slice,
        slice_type,
        is_intra: slice_type % 5 == 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_traced_headers() {
        // 1 | 011 | 1000
        let i2 = parse_slice_info(&[0xb8]).unwrap();
        assert_eq!((i2.first_mb_in_slice, i2.slice_type, i2.is_intra), (0, 2, true));

        // 1 | 00111 | 00
        let b = parse_slice_info(&[0x9c]).unwrap();
        assert_eq!((b.first_mb_in_slice, b.slice_type, b.is_intra), (0, 6, false));
        assert_eq!(b.kind(), SliceKind::B);

        let i = parse_slice_info(&[0x88]).unwrap();
        assert_eq!((i.first_mb_in_slice, i.slice_type, i.is_intra), (0, 7, true));
        assert_eq!(i.kind(), SliceKind::I);

        let p0 = parse_slice_info(&[0xe0]).unwrap();
        assert_eq!((p0.first_mb_in_slice, p0.slice_type, p0.is_intra), (0, 0, false));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_slice_info(&[]), Err(BitstreamError::OutOfBits));
        // "1" then "0001" with the suffix cut off
        assert_eq!(parse_slice_info(&[0x88 >> 4]), Err(BitstreamError::OutOfBits));
        // first_mb=0, slice_type = 10 ("0001011")
        assert_eq!(
            parse_slice_info(&[0b1000_1011]),
            Err(BitstreamError::OutOfRange { what: "slice_type", value: 10 })
        );
    }

    #[test]
    fn intra_iff_mod5_is_2() {
        for st in 0..=9u32 {
            let mut w = crate::bitstream::BitWriter::new();
            w.write_ue(3);
            w.write_ue(st);
            let info = parse_slice_info(&w.into_bytes()).unwrap();
            assert_eq!(info.first_mb_in_slice, 3);
            assert_eq!(info.is_intra, st == 2 || st == 7);
            assert_eq!(info.is_intra, info.kind() == SliceKind::I);
        }
    }
}
