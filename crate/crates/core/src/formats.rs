//! Bit-file encodings.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;

use crate::bits::BitStream;
use crate::config::OutputFormat;
use crate::{Error, Result};

const ASCII_LINE: u64 = 64;

pub fn encode(bits: &BitStream, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Raw => bits.as_bytes().to_vec(),
        OutputFormat::Hex => {
            let mut s = hex_string(bits.as_bytes());
            if !s.is_empty() {
                s.push('\n');
            }
            s.into_bytes()
        }
        OutputFormat::Base64 => {
            let mut s = STANDARD.encode(bits.as_bytes());
            if !s.is_empty() {
                s.push('\n');
            }
            s.into_bytes()
        }
        OutputFormat::Ascii01 => {
            let mut out = Vec::with_capacity((bits.len() + bits.len() / ASCII_LINE + 1) as usize);
            for (i, b) in bits.iter().enumerate() {
                out.push(if b { b'1' } else { b'0' });
                if (i as u64 + 1).is_multiple_of(ASCII_LINE) {
                    out.push(b'\n');
                }
            }
            if !bits.len().is_multiple_of(ASCII_LINE) {
                out.push(b'\n');
            }
            out
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    const DIGITS: &[u8; 16] = b"0123456789abcdef";
    let mut s = String::with_capacity(bytes.len() * 2);
    for &b in bytes {
        s.push(DIGITS[(b >> 4) as usize] as char);
        s.push(DIGITS[(b & 0xF) as usize] as char);
    }
    s
}

fn strip_whitespace(data: &[u8]) -> Vec<u8> {
    data.iter()
        .copied()
        .filter(|b| !b.is_ascii_whitespace())
        .collect()
}

/// Inverse of [`encode`]. Raw, hex and base64 carry whole bytes; ascii01
/// carries the exact bit length.
pub fn decode(data: &[u8], format: OutputFormat) -> Result<BitStream> {
    match format {
        OutputFormat::Raw => Ok(BitStream::from_bytes(data.to_vec())),
        OutputFormat::Hex => {
            let digits = strip_whitespace(data);
            if !digits.len().is_multiple_of(2) {
                return Err(Error::Decode("odd number of hex digits".into()));
            }
            let nibble = |c: u8| {
                (c as char)
                    .to_digit(16)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Decode(format!("invalid hex digit `{}`", c as char)))
            };
            let bytes = digits
                .chunks_exact(2)
                .map(|p| Ok(nibble(p[0])? << 4 | nibble(p[1])?))
                .collect::<Result<Vec<u8>>>()?;
            Ok(BitStream::from_bytes(bytes))
        }
        OutputFormat::Base64 => STANDARD
            .decode(strip_whitespace(data))
            .map(BitStream::from_bytes)
            .map_err(|e| Error::Decode(e.to_string())),
        OutputFormat::Ascii01 => strip_whitespace(data)
            .into_iter()
            .map(|c| match c {
                b'0' => Ok(false),
                b'1' => Ok(true),
                other => Err(Error::Decode(format!(
                    "invalid ascii01 character `{}`",
                    other as char
                ))),
            })
            .collect(),
    }
}
