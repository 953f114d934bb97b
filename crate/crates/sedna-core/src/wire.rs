//! Canonical, bit-exact serializations.
//!
//! These encodings are the contract for fee accounting, golden files, and
//! cross-process reproducibility, so every field is fixed-order and
//! fixed-width big-endian:
//!
//! * preimage header: five length-prefixed fields (u32 length, then bytes)
//!   in the order sender key, fee per byte, max fee, nonce, declared
//!   message length;
//! * public header: preimage bytes, then the 32-byte commitment, then the
//!   64-byte header signature;
//! * bundle: `txid (32) || lane (u16) || count (u32) ||
//!   (index u64 || value)* || bundle_sig (64) || header`;
//! * ledger: lane count, slot count, then per slot and lane the block's
//!   bundles, each length-prefixed.
//!
//! All symbols in one bundle share a value length, which is how parsing
//! recovers it from the byte count.

use crate::codec::Symbol;
use crate::crypto::{domain, Commitment, Digest, Signature};
use crate::ledger::{Block, FinalizedLedger};
use crate::protocol::{Bundle, PreimageHeader, PublicHeader};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum WireError {
    #[error("malformed {0}")]
    Malformed(&'static str),
}

/// Serialized preimage header size: five fields, each with a u32 length
/// prefix (32 + 8 + 8 + 8 + 8 payload bytes).
pub const PREIMAGE_HEADER_LEN: usize = 5 * 4 + 32 + 4 * 8;
/// Serialized public header size.
pub const PUBLIC_HEADER_LEN: usize = PREIMAGE_HEADER_LEN + 32 + 64;
/// Bundle bytes that are not symbol data: txid, lane, count, bundle
/// signature, and the embedded header.
pub const BUNDLE_FIXED_OVERHEAD: usize = 32 + 2 + 4 + 64 + PUBLIC_HEADER_LEN;
/// Per-symbol metadata: the u64 index.
pub const SYMBOL_META_LEN: usize = 8;

fn put_field(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

pub fn preimage_header_bytes(pre: &PreimageHeader) -> Vec<u8> {
    let mut out = Vec::with_capacity(PREIMAGE_HEADER_LEN);
    put_field(&mut out, &pre.sender_pubkey);
    put_field(&mut out, &pre.fee_per_byte.to_be_bytes());
    put_field(&mut out, &pre.max_fee.to_be_bytes());
    put_field(&mut out, &pre.nonce.to_be_bytes());
    put_field(&mut out, &pre.declared_message_len.to_be_bytes());
    debug_assert_eq!(out.len(), PREIMAGE_HEADER_LEN);
    out
}

pub fn public_header_bytes(header: &PublicHeader) -> Vec<u8> {
    let mut out = preimage_header_bytes(&header.pre);
    out.extend_from_slice(header.commitment.0.as_bytes());
    out.extend_from_slice(header.header_sig.as_bytes());
    out
}

/// Exact size of a serialized bundle carrying `count` symbols of
/// `value_len` bytes each.
pub fn bundle_wire_len(count: usize, value_len: usize) -> usize {
    BUNDLE_FIXED_OVERHEAD + count * (SYMBOL_META_LEN + value_len)
}

pub fn bundle_bytes(bundle: &Bundle) -> Vec<u8> {
    let value_len = bundle.symbols.first().map_or(0, |s| s.value.len());
    let mut out = Vec::with_capacity(bundle_wire_len(bundle.symbols.len(), value_len));
    out.extend_from_slice(bundle.txid.as_bytes());
    out.extend_from_slice(&bundle.lane.to_be_bytes());
    out.extend_from_slice(&(bundle.symbols.len() as u32).to_be_bytes());
    for sym in &bundle.symbols {
        out.extend_from_slice(&sym.index.to_be_bytes());
        out.extend_from_slice(&sym.value);
    }
    out.extend_from_slice(bundle.bundle_sig.as_bytes());
    out.extend_from_slice(&public_header_bytes(&bundle.header));
    out
}

/// Message signed by the bundle signature: domain tag, txid, lane, and the
/// index-value pairs in increasing index order. Each value is length-framed
/// so the pair list has exactly one serialization; a bare concatenation
/// could be re-split as a different symbol count over the same bytes and
/// keep the signature valid.
pub fn bundle_signing_message(txid: &Digest, lane: u16, symbols: &[Symbol]) -> Vec<u8> {
    debug_assert!(symbols.windows(2).all(|w| w[0].index < w[1].index));
    let value_len = symbols.first().map_or(0, |s| s.value.len());
    let mut m = Vec::with_capacity(domain::BUNDLE.len() + 34 + symbols.len() * (12 + value_len));
    m.extend_from_slice(domain::BUNDLE);
    m.extend_from_slice(txid.as_bytes());
    m.extend_from_slice(&lane.to_be_bytes());
    for sym in symbols {
        m.extend_from_slice(&sym.index.to_be_bytes());
        m.extend_from_slice(&(sym.value.len() as u32).to_be_bytes());
        m.extend_from_slice(&sym.value);
    }
    m
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], WireError> {
        if self.bytes.len() - self.pos < n {
            return Err(WireError::Malformed(what));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, WireError> {
        Ok(u16::from_be_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn field(&mut self, expect_len: usize, what: &'static str) -> Result<&'a [u8], WireError> {
        let len = self.u32(what)? as usize;
        if len != expect_len {
            return Err(WireError::Malformed(what));
        }
        self.take(len, what)
    }

    fn done(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

pub fn parse_preimage_header(bytes: &[u8]) -> Result<PreimageHeader, WireError> {
    let mut r = Reader::new(bytes);
    let pre = read_preimage(&mut r)?;
    if !r.done() {
        return Err(WireError::Malformed("preimage header trailing bytes"));
    }
    Ok(pre)
}

fn read_preimage(r: &mut Reader) -> Result<PreimageHeader, WireError> {
    let pk: [u8; 32] = r
        .field(32, "sender pubkey")?
        .try_into()
        .expect("length checked");
    let fee_per_byte = u64::from_be_bytes(r.field(8, "fee per byte")?.try_into().unwrap());
    let max_fee = u64::from_be_bytes(r.field(8, "max fee")?.try_into().unwrap());
    let nonce = u64::from_be_bytes(r.field(8, "nonce")?.try_into().unwrap());
    let declared_message_len =
        u64::from_be_bytes(r.field(8, "message length")?.try_into().unwrap());
    Ok(PreimageHeader {
        sender_pubkey: pk,
        fee_per_byte,
        max_fee,
        nonce,
        declared_message_len,
    })
}

fn read_public_header(r: &mut Reader) -> Result<PublicHeader, WireError> {
    let pre = read_preimage(r)?;
    let commitment =
        Commitment(Digest::from_slice(r.take(32, "commitment")?).expect("length checked"));
    let header_sig =
        Signature::from_slice(r.take(64, "header signature")?).expect("length checked");
    Ok(PublicHeader {
        pre,
        commitment,
        header_sig,
    })
}

pub fn parse_public_header(bytes: &[u8]) -> Result<PublicHeader, WireError> {
    let mut r = Reader::new(bytes);
    let h = read_public_header(&mut r)?;
    if !r.done() {
        return Err(WireError::Malformed("public header trailing bytes"));
    }
    Ok(h)
}

pub fn parse_bundle(bytes: &[u8]) -> Result<Bundle, WireError> {
    if bytes.len() < BUNDLE_FIXED_OVERHEAD {
        return Err(WireError::Malformed("bundle too short"));
    }
    let mut r = Reader::new(bytes);
    let txid = Digest::from_slice(r.take(32, "txid")?).expect("length checked");
    let lane = r.u16("lane")?;
    let count = r.u32("symbol count")? as usize;
    if count == 0 {
        return Err(WireError::Malformed("bundle with zero symbols"));
    }
    let symbol_region = bytes.len() - BUNDLE_FIXED_OVERHEAD;
    if !symbol_region.is_multiple_of(count) {
        return Err(WireError::Malformed("symbol region size"));
    }
    let per_symbol = symbol_region / count;
    if per_symbol < SYMBOL_META_LEN {
        return Err(WireError::Malformed("symbol region size"));
    }
    let value_len = per_symbol - SYMBOL_META_LEN;
    let mut symbols = Vec::with_capacity(count);
    for _ in 0..count {
        let index = r.u64("symbol index")?;
        let value = r.take(value_len, "symbol value")?.to_vec();
        symbols.push(Symbol { index, value });
    }
    if !symbols.windows(2).all(|w| w[0].index < w[1].index) {
        return Err(WireError::Malformed(
            "symbol indices not strictly increasing",
        ));
    }
    let bundle_sig =
        Signature::from_slice(r.take(64, "bundle signature")?).expect("length checked");
    let header = read_public_header(&mut r)?;
    if !r.done() {
        return Err(WireError::Malformed("bundle trailing bytes"));
    }
    Ok(Bundle {
        txid,
        lane,
        symbols,
        bundle_sig,
        header,
    })
}

/// Serialize a finalized ledger: `n (u16) || slots (u32)`, then for every
/// slot the n lane blocks in lane order, each as a bundle count followed by
/// length-prefixed bundle bytes.
pub fn ledger_bytes(ledger: &FinalizedLedger) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&ledger.lane_count().to_be_bytes());
    out.extend_from_slice(&(ledger.height() as u32).to_be_bytes());
    for slot in ledger.slots() {
        for block in slot {
            out.extend_from_slice(&(block.bundles.len() as u32).to_be_bytes());
            for bundle in &block.bundles {
                let b = bundle_bytes(bundle);
                out.extend_from_slice(&(b.len() as u32).to_be_bytes());
                out.extend_from_slice(&b);
            }
        }
    }
    out
}

pub fn parse_ledger(bytes: &[u8]) -> Result<FinalizedLedger, WireError> {
    let mut r = Reader::new(bytes);
    let n = r.u16("lane count")?;
    if n == 0 {
        return Err(WireError::Malformed("lane count"));
    }
    let slots = r.u32("slot count")?;
    let mut ledger = FinalizedLedger::new(n);
    for slot_idx in 0..slots {
        let mut blocks = Vec::with_capacity(n as usize);
        for lane in 1..=n {
            let count = r.u32("bundle count")? as usize;
            let mut bundles = Vec::with_capacity(count);
            for _ in 0..count {
                let len = r.u32("bundle length")? as usize;
                let bundle = parse_bundle(r.take(len, "bundle bytes")?)?;
                bundles.push(bundle);
            }
            blocks.push(Block {
                lane,
                slot: slot_idx as u64 + 1,
                bundles,
            });
        }
        ledger.append_slot_unchecked(blocks);
    }
    if !r.done() {
        return Err(WireError::Malformed("ledger trailing bytes"));
    }
    Ok(ledger)
}
