//! Serial payload format: every 16-bit value goes out as two bytes, low byte
//! first, and the receiver reassembles little-endian pairs, logging a value
//! only when it differs from the previous one.
//!
//! Pairs are always aligned `(low, high)`. There is no resynchronization, so a
//! single dropped byte corrupts every later value.

use crate::error::{Error, Result};

/// Line settings of the physical link. Informational only.
pub const BAUD_RATE: u32 = 9600;
pub const DATA_BITS: u8 = 8;
pub const STOP_BITS: u8 = 1;

/// Length of the zero prefix the original receiver script put in front of its log.
pub const RECEIVER_ZERO_PREFIX: usize = 256;

pub fn encode_value(v: u16) -> [u8; 2] {
    v.to_le_bytes()
}

pub fn encode_stream(values: &[u16]) -> Vec<u8> {
    values.iter().flat_map(|&v| encode_value(v)).collect()
}

pub fn decode_stream(bytes: &[u8]) -> Result<Vec<u16>> {
    let chunks = bytes.chunks_exact(2);
    if !chunks.remainder().is_empty() {
        return Err(Error::Framing {
            offset: bytes.len() - 1,
        });
    }
    Ok(chunks.map(|p| u16::from_le_bytes([p[0], p[1]])).collect())
}

/// Drops every value equal to its predecessor.
///
/// With `paper_compat` the predecessor of the first value is taken to be 0,
/// as in the receiver loop, so a leading 0 is dropped too.
pub fn dedupe_consecutive(values: &[u16], paper_compat: bool) -> Vec<u16> {
    let mut prev = if paper_compat { Some(0) } else { None };
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        if prev != Some(v) {
            out.push(v);
            prev = Some(v);
        }
    }
    out
}

/// Prepends the receiver script's zero block.
pub fn with_zero_prefix(values: &[u16]) -> Vec<u16> {
    let mut out = vec![0; RECEIVER_ZERO_PREFIX];
    out.extend_from_slice(values);
    out
}

/// Incremental receiver: bytes in, deduplicated values out.
#[derive(Clone, Debug)]
pub struct Receiver {
    pending: Option<u8>,
    prev: Option<u16>,
    consumed: usize,
}

impl Receiver {
    pub fn new(paper_compat: bool) -> Self {
        Receiver {
            pending: None,
            prev: if paper_compat { Some(0) } else { None },
            consumed: 0,
        }
    }

    /// Feeds one byte; returns a value once a new, non-duplicate pair completes.
    pub fn push(&mut self, byte: u8) -> Option<u16> {
        self.consumed += 1;
        match self.pending.take() {
            None => {
                self.pending = Some(byte);
                None
            }
            Some(lo) => {
                let v = u16::from_le_bytes([lo, byte]);
                if self.prev == Some(v) {
                    None
                } else {
                    self.prev = Some(v);
                    Some(v)
                }
            }
        }
    }

    /// Fails if a half frame is still buffered.
    pub fn finish(self) -> Result<()> {
        match self.pending {
            Some(_) => Err(Error::Framing {
                offset: self.consumed - 1,
            }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        assert_eq!(encode_stream(&[0xABCD]), vec![0xCD, 0xAB]);
        assert_eq!(encode_stream(&[0]), vec![0, 0]);
        assert!(encode_stream(&[]).is_empty());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_stream(&[0xCD, 0xAB]).unwrap(), vec![0xABCD]);
        assert_eq!(decode_stream(&[0, 0]).unwrap(), vec![0]);
        assert_eq!(decode_stream(&[0x01]), Err(Error::Framing { offset: 0 }));
        assert_eq!(decode_stream(&[1, 2, 3]), Err(Error::Framing { offset: 2 }));
        assert!(decode_stream(&[]).unwrap().is_empty());
    }

    #[test]
    fn dedupe_examples() {
        assert_eq!(dedupe_consecutive(&[5, 5, 7], true), vec![5, 7]);
        assert!(dedupe_consecutive(&[], true).is_empty());
        assert_eq!(dedupe_consecutive(&[3, 3, 3], true), vec![3]);
        assert_eq!(dedupe_consecutive(&[0, 4], true), vec![4]);
        assert_eq!(dedupe_consecutive(&[0, 4], false), vec![0, 4]);
        assert_eq!(dedupe_consecutive(&[0, 0, 4, 0], false), vec![0, 4, 0]);
        assert_eq!(dedupe_consecutive(&[0, 0, 4, 0], true), vec![4, 0]);
    }

    #[test]
    fn receiver_matches_batch_path() {
        let values = [0u16, 0, 9, 9, 300, 9, 65535, 65535];
        let bytes = encode_stream(&values);
        for compat in [true, false] {
            let mut rx = Receiver::new(compat);
            let got: Vec<u16> = bytes.iter().filter_map(|&b| rx.push(b)).collect();
            rx.finish().unwrap();
            assert_eq!(got, dedupe_consecutive(&values, compat));
        }
        let mut rx = Receiver::new(true);
        for b in [1, 2, 3] {
            rx.push(b);
        }
        assert_eq!(rx.finish(), Err(Error::Framing { offset: 2 }));
    }

    #[test]
    fn zero_prefix() {
        let v = with_zero_prefix(&[7]);
        assert_eq!(v.len(), 257);
        assert_eq!(v[256], 7);
        assert!(v[..256].iter().all(|&x| x == 0));
    }

    #[test]
    fn one_byte_slip_corrupts_values() {
        let bytes = encode_stream(&[0x1234, 0x5678, 0x9ABC]);
        let slipped = decode_stream(&bytes[1..bytes.len() - 1]).unwrap();
        assert_eq!(slipped, vec![0x7812, 0xBC56]);
    }
}
