//! Canonical Huffman coding of unsigned symbol streams.
//!
//! Values that do not fit 15 bits are coded as an ESCAPE marker followed by
//! the raw 32-bit value, which keeps codebooks bounded on pathological
//! inputs. Code assignment is canonical (sorted by length, then symbol), so
//! identical inputs always produce identical bitstreams.

use std::collections::BTreeMap;

use crate::codec::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

/// First value that no longer gets its own codebook entry.
pub const ESCAPE_THRESHOLD: u32 = 1 << 15;
/// Alphabet symbol marking an escaped raw value.
pub const ESCAPE_SYMBOL: u32 = ESCAPE_THRESHOLD;

const MAX_CODE_LEN: u8 = 63;

/// Canonical code lengths, indexed by alphabet symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    lengths: Vec<u8>,
}

fn to_alphabet(value: u32) -> u32 {
    if value >= ESCAPE_THRESHOLD {
        ESCAPE_SYMBOL
    } else {
        value
    }
}

/// Optimal code lengths for the given symbol counts, deterministic under
/// ties (two-queue merge over count-then-symbol order).
fn code_lengths(counts: &BTreeMap<u32, u64>) -> Vec<(u32, u8)> {
    match counts.len() {
        0 => return Vec::new(),
        1 => {
            let (&sym, _) = counts.iter().next().unwrap();
            return vec![(sym, 1)];
        }
        _ => {}
    }

    #[derive(Debug)]
    struct Node {
        count: u64,
        children: Option<(usize, usize)>,
        symbol: Option<u32>,
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(counts.len() * 2);
    let mut leaves: Vec<usize> = Vec::with_capacity(counts.len());
    let mut ordered: Vec<(u64, u32)> = counts.iter().map(|(&s, &c)| (c, s)).collect();
    ordered.sort_unstable();
    for (count, symbol) in ordered {
        leaves.push(nodes.len());
        nodes.push(Node {
            count,
            children: None,
            symbol: Some(symbol),
        });
    }

    let mut internal: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut leaf_pos = 0usize;
    let take = |nodes: &Vec<Node>,
                    leaf_pos: &mut usize,
                    internal: &mut std::collections::VecDeque<usize>| {
        let leaf = leaves.get(*leaf_pos).copied();
        let inner = internal.front().copied();
        match (leaf, inner) {
            (Some(l), Some(i)) => {
                // Prefer the leaf on ties; keeps the tree shallow and stable.
                if nodes[l].count <= nodes[i].count {
                    *leaf_pos += 1;
                    l
                } else {
                    internal.pop_front();
                    i
                }
            }
            (Some(l), None) => {
                *leaf_pos += 1;
                l
            }
            (None, Some(i)) => {
                internal.pop_front();
                i
            }
            (None, None) => unreachable!("merge ran out of nodes"),
        }
    };

    let total = counts.len();
    for _ in 0..total - 1 {
        let a = take(&nodes, &mut leaf_pos, &mut internal);
        let b = take(&nodes, &mut leaf_pos, &mut internal);
        let merged = Node {
            count: nodes[a].count + nodes[b].count,
            children: Some((a, b)),
            symbol: None,
        };
        internal.push_back(nodes.len());
        nodes.push(merged);
    }

    let root = *internal.back().unwrap();
    let mut lengths: Vec<(u32, u8)> = Vec::with_capacity(total);
    let mut stack = vec![(root, 0u8)];
    while let Some((idx, depth)) = stack.pop() {
        match nodes[idx].children {
            Some((a, b)) => {
                stack.push((a, depth + 1));
                stack.push((b, depth + 1));
            }
            None => lengths.push((nodes[idx].symbol.unwrap(), depth)),
        }
    }
    lengths.sort_unstable();
    lengths
}

impl Codebook {
    /// Builds the canonical codebook for a value stream (escapes applied).
    pub fn build(values: &[u32]) -> Self {
        let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
        for &v in values {
            *counts.entry(to_alphabet(v)).or_insert(0) += 1;
        }
        let pairs = code_lengths(&counts);
        let max_symbol = pairs.iter().map(|&(s, _)| s).max();
        let mut lengths = vec![0u8; max_symbol.map_or(0, |m| m as usize + 1)];
        for (sym, len) in pairs {
            lengths[sym as usize] = len;
        }
        Self { lengths }
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.iter().all(|&l| l == 0)
    }

    /// Canonical code per symbol, `(code, length)` indexed by symbol.
    fn assignments(&self) -> Vec<(u64, u8)> {
        let mut order: Vec<(u8, u32)> = self
            .lengths
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l > 0)
            .map(|(s, &l)| (l, s as u32))
            .collect();
        order.sort_unstable();
        let mut table = vec![(0u64, 0u8); self.lengths.len()];
        let mut code = 0u64;
        let mut prev_len = order.first().map_or(0, |&(l, _)| l);
        for (len, sym) in order {
            code <<= len - prev_len;
            table[sym as usize] = (code, len);
            code += 1;
            prev_len = len;
        }
        table
    }

    /// Serialized form: alphabet size, then run-length-coded lengths.
    pub fn serialize(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.lengths.len() as u32).to_le_bytes());
        let mut i = 0usize;
        while i < self.lengths.len() {
            let len = self.lengths[i];
            let mut run = 1usize;
            while i + run < self.lengths.len()
                && self.lengths[i + run] == len
                && run < usize::from(u16::MAX)
            {
                run += 1;
            }
            out.push(len);
            out.extend_from_slice(&(run as u16).to_le_bytes());
            i += run;
        }
    }

    pub fn deserialize(bytes: &[u8], cursor: &mut usize) -> Result<Self> {
        let take = |cursor: &mut usize, n: usize| -> Result<&[u8]> {
            let start = *cursor;
            let end = start
                .checked_add(n)
                .filter(|&e| e <= bytes.len())
                .ok_or_else(|| Error::corrupt("codebook truncated"))?;
            *cursor = end;
            Ok(&bytes[start..end])
        };
        let alphabet = u32::from_le_bytes(take(cursor, 4)?.try_into().unwrap()) as usize;
        if alphabet > ESCAPE_SYMBOL as usize + 1 {
            return Err(Error::corrupt(format!(
                "codebook alphabet too large: {alphabet}"
            )));
        }
        let mut lengths = Vec::with_capacity(alphabet);
        while lengths.len() < alphabet {
            let len = take(cursor, 1)?[0];
            let run = u16::from_le_bytes(take(cursor, 2)?.try_into().unwrap()) as usize;
            if len > MAX_CODE_LEN || run == 0 || lengths.len() + run > alphabet {
                return Err(Error::corrupt("malformed codebook run"));
            }
            lengths.extend(std::iter::repeat_n(len, run));
        }
        let book = Self { lengths };
        book.check_kraft()?;
        Ok(book)
    }

    /// A decodable codebook must not over-subscribe the code space.
    fn check_kraft(&self) -> Result<()> {
        let present: Vec<u8> = self.lengths.iter().copied().filter(|&l| l > 0).collect();
        if present.is_empty() {
            return Ok(());
        }
        // Sum of 2^(63 - len) must not exceed 2^63.
        let mut budget: u128 = 1 << MAX_CODE_LEN;
        for &l in &present {
            let cost = 1u128 << (MAX_CODE_LEN - l);
            if cost > budget {
                return Err(Error::corrupt("codebook over-subscribes code space"));
            }
            budget -= cost;
        }
        Ok(())
    }

    fn decoder(&self) -> CanonicalDecoder {
        let mut order: Vec<(u8, u32)> = self
            .lengths
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l > 0)
            .map(|(s, &l)| (l, s as u32))
            .collect();
        order.sort_unstable();
        let max_len = order.last().map_or(0, |&(l, _)| l);
        let mut first_code = vec![0u64; usize::from(max_len) + 1];
        let mut first_index = vec![0usize; usize::from(max_len) + 1];
        let mut count = vec![0usize; usize::from(max_len) + 1];
        for &(l, _) in &order {
            count[usize::from(l)] += 1;
        }
        let mut code = 0u64;
        let mut index = 0usize;
        for l in 1..=usize::from(max_len) {
            code <<= 1;
            first_code[l] = code;
            first_index[l] = index;
            code += count[l] as u64;
            index += count[l];
        }
        CanonicalDecoder {
            symbols: order.into_iter().map(|(_, s)| s).collect(),
            first_code,
            first_index,
            count,
            max_len,
        }
    }
}

struct CanonicalDecoder {
    symbols: Vec<u32>,
    first_code: Vec<u64>,
    first_index: Vec<usize>,
    count: Vec<usize>,
    max_len: u8,
}

impl CanonicalDecoder {
    fn decode_symbol(&self, reader: &mut BitReader) -> Result<u32> {
        let mut code = 0u64;
        for len in 1..=usize::from(self.max_len) {
            code = (code << 1) | u64::from(reader.read_bit()?);
            if self.count[len] > 0 {
                let offset = code.wrapping_sub(self.first_code[len]);
                if code >= self.first_code[len] && (offset as usize) < self.count[len] {
                    return Ok(self.symbols[self.first_index[len] + offset as usize]);
                }
            }
        }
        Err(Error::corrupt("invalid Huffman code"))
    }
}

/// Encodes `values`; returns the codebook, the payload bytes, and the exact
/// payload bit count.
pub fn huffman_encode(values: &[u32]) -> (Codebook, Vec<u8>, u64) {
    let book = Codebook::build(values);
    let table = book.assignments();
    let mut writer = BitWriter::new();
    for &v in values {
        let sym = to_alphabet(v);
        let (code, len) = table[sym as usize];
        debug_assert!(len > 0);
        writer.write_bits(code, len);
        if sym == ESCAPE_SYMBOL {
            writer.write_bits(u64::from(v), 32);
        }
    }
    let bits = writer.bit_len();
    (book, writer.into_bytes(), bits)
}

/// Decodes exactly `count` values. Fails on bit underrun or codes absent
/// from the codebook.
pub fn huffman_decode(
    book: &Codebook,
    payload: &[u8],
    bit_len: u64,
    count: usize,
) -> Result<Vec<u32>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if book.is_empty() {
        return Err(Error::corrupt("nonzero symbol count with empty codebook"));
    }
    let decoder = book.decoder();
    let mut reader = BitReader::new(payload, bit_len)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let sym = decoder.decode_symbol(&mut reader)?;
        if sym == ESCAPE_SYMBOL {
            out.push(reader.read_bits(32)? as u32);
        } else {
            out.push(sym);
        }
    }
    Ok(out)
}
