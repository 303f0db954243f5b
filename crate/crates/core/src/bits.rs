//! Packed bit buffers, most-significant bit first within each byte.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitStream {
    payload: Vec<u8>,
    bit_length: u64,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            payload: Vec::with_capacity(bits.div_ceil(8)),
            bit_length: 0,
        }
    }

    /// Every bit of `bytes`, so `bit_length = 8 * bytes.len()`.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let bit_length = bytes.len() as u64 * 8;
        Self {
            payload: bytes,
            bit_length,
        }
    }

    /// The first `bit_length` bits of `bytes`; pad bits are cleared.
    pub fn from_bytes_with_len(mut bytes: Vec<u8>, bit_length: u64) -> Option<Self> {
        if bit_length > bytes.len() as u64 * 8 {
            return None;
        }
        bytes.truncate(bit_length.div_ceil(8) as usize);
        let rem = (bit_length % 8) as u32;
        if rem != 0 {
            if let Some(last) = bytes.last_mut() {
                *last &= !(0xFFu8 >> rem);
            }
        }
        Some(Self {
            payload: bytes,
            bit_length,
        })
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let offset = (self.bit_length % 8) as u32;
        if offset == 0 {
            self.payload.push(0);
        }
        if bit {
            *self.payload.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.bit_length += 1;
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        assert!(i < self.bit_length, "bit index {i} out of range");
        self.payload[(i / 8) as usize] & (0x80 >> (i % 8)) != 0
    }

    pub fn len(&self) -> u64 {
        self.bit_length
    }

    pub fn is_empty(&self) -> bool {
        self.bit_length == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.payload
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.payload
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.bit_length).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> u64 {
        // pad bits are zero, so whole-byte popcount is exact
        self.payload.iter().map(|b| b.count_ones() as u64).sum()
    }

    /// Bits `[start, start + len)` as a new stream.
    pub fn slice(&self, start: u64, len: u64) -> BitStream {
        assert!(start + len <= self.bit_length, "slice out of range");
        if start.is_multiple_of(8) {
            let from = (start / 8) as usize;
            let to = (start + len).div_ceil(8) as usize;
            return Self::from_bytes_with_len(self.payload[from..to].to_vec(), len).unwrap();
        }
        let mut out = BitStream::with_capacity(len as usize);
        for i in start..start + len {
            out.push(self.get(i));
        }
        out
    }

    pub fn append(&mut self, other: &BitStream) {
        if self.bit_length.is_multiple_of(8) {
            self.payload.extend_from_slice(&other.payload);
            self.bit_length += other.bit_length;
        } else {
            for b in other.iter() {
                self.push(b);
            }
        }
    }

    /// Keep only the first `len` bits.
    pub fn truncate(&mut self, len: u64) {
        if len < self.bit_length {
            let bytes = std::mem::take(&mut self.payload);
            *self = Self::from_bytes_with_len(bytes, len).unwrap();
        }
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = BitStream::new();
        for b in iter {
            out.push(b);
        }
        out
    }
}

/// Pack 0/1 values MSB-first. Any nonzero value counts as 1.
pub fn pack_bits(bits: &[u8]) -> BitStream {
    bits.iter().map(|&b| b != 0).collect()
}

pub fn unpack_bits(stream: &BitStream) -> Vec<u8> {
    stream.iter().map(u8::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pack_examples() {
        let s = pack_bits(&[1, 0, 1, 1, 0, 1, 0, 1]);
        assert_eq!(s.as_bytes(), &[0xB5]);
        assert_eq!(s.len(), 8);

        let s = pack_bits(&[]);
        assert!(s.as_bytes().is_empty());
        assert_eq!(s.len(), 0);

        let s = pack_bits(&[1]);
        assert_eq!(s.as_bytes(), &[0x80]);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn from_bytes_with_len_clears_padding() {
        let s = BitStream::from_bytes_with_len(vec![0xFF, 0xFF], 10).unwrap();
        assert_eq!(s.as_bytes(), &[0xFF, 0xC0]);
        assert!(BitStream::from_bytes_with_len(vec![0], 9).is_none());
    }

    #[test]
    fn slice_unaligned() {
        let s = pack_bits(&[1, 0, 1, 1, 0, 1, 0, 1, 1, 1]);
        assert_eq!(unpack_bits(&s.slice(3, 5)), vec![1, 0, 1, 0, 1]);
        assert_eq!(unpack_bits(&s.slice(8, 2)), vec![1, 1]);
    }

    proptest! {
        #[test]
        fn pack_unpack_round_trip(bits in proptest::collection::vec(0u8..2, 0..100_000)) {
            let packed = pack_bits(&bits);
            prop_assert_eq!(packed.len(), bits.len() as u64);
            prop_assert_eq!(packed.as_bytes().len(), bits.len().div_ceil(8));
            prop_assert_eq!(unpack_bits(&packed), bits.clone());
            prop_assert_eq!(packed.count_ones(), bits.iter().map(|&b| b as u64).sum::<u64>());
        }

        #[test]
        fn append_matches_concatenation(a in proptest::collection::vec(0u8..2, 0..300),
                                        b in proptest::collection::vec(0u8..2, 0..300)) {
            let mut s = pack_bits(&a);
            s.append(&pack_bits(&b));
            let mut joined = a.clone();
            joined.extend(&b);
            prop_assert_eq!(s, pack_bits(&joined));
        }
    }
}
