//! MSB-first bit packing over byte buffers.

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    /// Bits used in the final byte (0 means byte-aligned).
    partial: u8,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write_bits(&mut self, value: u64, count: u8) {
        debug_assert!(count <= 64);
        for shift in (0..count).rev() {
            let bit = ((value >> shift) & 1) as u8;
            if self.partial == 0 {
                self.bytes.push(0);
            }
            let last = self.bytes.last_mut().unwrap();
            *last |= bit << (7 - self.partial);
            self.partial = (self.partial + 1) % 8;
        }
    }

    pub fn bit_len(&self) -> u64 {
        if self.partial == 0 {
            self.bytes.len() as u64 * 8
        } else {
            (self.bytes.len() as u64 - 1) * 8 + u64::from(self.partial)
        }
    }

    /// Zero-pads to a byte boundary and returns the buffer.
    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    limit: u64,
}

impl<'a> BitReader<'a> {
    /// Reads up to `bit_limit` bits from `bytes`.
    pub fn new(bytes: &'a [u8], bit_limit: u64) -> Result<Self> {
        if bit_limit > bytes.len() as u64 * 8 {
            return Err(Error::corrupt(format!(
                "payload advertises {bit_limit} bits but carries {}",
                bytes.len() as u64 * 8
            )));
        }
        Ok(Self {
            bytes,
            pos: 0,
            limit: bit_limit,
        })
    }

    pub fn read_bit(&mut self) -> Result<u8> {
        if self.pos >= self.limit {
            return Err(Error::corrupt("bit underrun"));
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = (byte >> (7 - (self.pos % 8))) & 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, count: u8) -> Result<u64> {
        let mut value = 0u64;
        for _ in 0..count {
            value = (value << 1) | u64::from(self.read_bit()?);
        }
        Ok(value)
    }
}
