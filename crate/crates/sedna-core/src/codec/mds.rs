//! Fixed-rate (m, k) share coding with systematic Reed-Solomon semantics.
//!
//! The message is split into k zero-padded blocks of `ceil(S / k)` bytes.
//! For every byte position there is a unique polynomial of degree < k whose
//! value at field point `i` (for i = 0..k-1) is the corresponding data-block
//! byte; share `i` is the evaluation of those polynomials at point `i`.
//! Shares 0..k-1 therefore equal the data blocks themselves, and any k
//! distinct shares reconstruct exactly: a k-by-k Vandermonde system over
//! distinct points is always solvable. Decoding never fails probabilistically.

use super::{CodecError, Message, Symbol};
use crate::gf256;

/// Field-size cap on the share count.
pub const MDS_MAX_SHARES: u16 = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MdsParams {
    /// Total shares m.
    pub shares_total: u16,
    /// Shares needed for reconstruction k.
    pub shares_needed: u16,
    /// Bytes per share, `ceil(message_len / k)`.
    pub share_len: usize,
    /// Exact message length; decode truncates padding back to this.
    pub message_len: usize,
}

impl MdsParams {
    pub fn new(
        shares_total: u16,
        shares_needed: u16,
        message_len: usize,
    ) -> Result<Self, CodecError> {
        if message_len == 0 {
            return Err(CodecError::EmptyMessage);
        }
        if shares_needed == 0 || shares_needed > shares_total {
            return Err(CodecError::InvalidParams(format!(
                "need 1 <= k <= m, got k={shares_needed} m={shares_total}"
            )));
        }
        if shares_total > MDS_MAX_SHARES {
            return Err(CodecError::InvalidParams(format!(
                "at most {MDS_MAX_SHARES} shares over GF(256), got {shares_total}"
            )));
        }
        Ok(Self {
            shares_total,
            shares_needed,
            share_len: message_len.div_ceil(shares_needed as usize),
            message_len,
        })
    }
}

fn data_blocks(message: &Message, params: &MdsParams) -> Vec<Vec<u8>> {
    let k = params.shares_needed as usize;
    let mut blocks: Vec<Vec<u8>> = message
        .bytes()
        .chunks(params.share_len)
        .map(|c| {
            let mut b = c.to_vec();
            b.resize(params.share_len, 0);
            b
        })
        .collect();
    blocks.resize(k, vec![0u8; params.share_len]);
    blocks
}

/// Interpolate the per-byte polynomials through `(i, blocks[i])` and return
/// their coefficient vectors.
fn interpolate(blocks: Vec<Vec<u8>>, k: usize) -> Vec<Vec<u8>> {
    let coeffs: Vec<Vec<u8>> = (0..k)
        .map(|x| (0..k).map(|e| gf256::pow(x as u8, e as u32)).collect())
        .collect();
    gf256::solve(coeffs, blocks, k)
        .solution
        .expect("Vandermonde systems over distinct points are invertible")
}

fn evaluate(poly: &[Vec<u8>], x: u8, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for (e, coeff_block) in poly.iter().enumerate() {
        gf256::axpy(&mut out, gf256::pow(x, e as u32), coeff_block);
    }
    out
}

/// Encode into `shares_total` shares; shares 0..k-1 are the (padded) data
/// blocks themselves.
pub fn mds_encode(message: &Message, params: &MdsParams) -> Vec<Symbol> {
    assert_eq!(message.len(), params.message_len, "params/message mismatch");
    let k = params.shares_needed as usize;
    let blocks = data_blocks(message, params);
    let poly = if (params.shares_total as usize) > k {
        Some(interpolate(blocks.clone(), k))
    } else {
        None
    };
    (0..params.shares_total as u64)
        .map(|i| {
            let value = if (i as usize) < k {
                blocks[i as usize].clone()
            } else {
                evaluate(poly.as_ref().unwrap(), i as u8, params.share_len)
            };
            Symbol { index: i, value }
        })
        .collect()
}

/// Reconstruct the message from any k distinct shares.
///
/// Shares with out-of-range indices or wrong lengths are rejected; duplicate
/// indices keep their first occurrence. Extra shares beyond k are ignored
/// (the first k in index order are used).
pub fn mds_decode(shares: &[Symbol], params: &MdsParams) -> Result<Message, CodecError> {
    let k = params.shares_needed as usize;
    let mut by_index = std::collections::BTreeMap::new();
    for share in shares {
        if share.index >= params.shares_total as u64 {
            return Err(CodecError::InvalidShare(format!(
                "share index {} out of range (m = {})",
                share.index, params.shares_total
            )));
        }
        if share.value.len() != params.share_len {
            return Err(CodecError::InvalidShare(format!(
                "share {} has length {}, expected {}",
                share.index,
                share.value.len(),
                params.share_len
            )));
        }
        by_index
            .entry(share.index)
            .or_insert_with(|| share.value.clone());
    }
    if by_index.len() < k {
        return Err(CodecError::NeedMoreShares {
            needed: k,
            got: by_index.len(),
        });
    }

    let chosen: Vec<(u64, Vec<u8>)> = by_index.into_iter().take(k).collect();
    let coeffs: Vec<Vec<u8>> = chosen
        .iter()
        .map(|(x, _)| (0..k).map(|e| gf256::pow(*x as u8, e as u32)).collect())
        .collect();
    let values: Vec<Vec<u8>> = chosen.into_iter().map(|(_, v)| v).collect();
    let poly = gf256::solve(coeffs, values, k)
        .solution
        .expect("Vandermonde systems over distinct points are invertible");

    let mut bytes = Vec::with_capacity(k * params.share_len);
    for i in 0..k {
        bytes.extend_from_slice(&evaluate(&poly, i as u8, params.share_len));
    }
    bytes.truncate(params.message_len);
    Message::new(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;

    fn random_message(rng: &mut DeterministicRng, len: usize) -> Message {
        let mut bytes = vec![0u8; len];
        rng.fill_bytes(&mut bytes);
        Message::new(bytes).unwrap()
    }

    #[test]
    fn identity_code_share_is_the_message() {
        let mut rng = DeterministicRng::from_seed(40);
        let msg = random_message(&mut rng, 97);
        let params = MdsParams::new(1, 1, 97).unwrap();
        let shares = mds_encode(&msg, &params);
        assert_eq!(shares.len(), 1);
        assert_eq!(shares[0].value, msg.bytes());
        assert_eq!(mds_decode(&shares, &params).unwrap(), msg);
    }

    #[test]
    fn systematic_prefix_carries_data_blocks() {
        let mut rng = DeterministicRng::from_seed(41);
        let msg = random_message(&mut rng, 100);
        let params = MdsParams::new(6, 3, 100).unwrap();
        let shares = mds_encode(&msg, &params);
        let mut reassembled: Vec<u8> = Vec::new();
        for s in &shares[..3] {
            reassembled.extend_from_slice(&s.value);
        }
        reassembled.truncate(100);
        assert_eq!(reassembled, msg.bytes());
    }

    #[test]
    fn every_two_subset_of_a_4_2_code_decodes() {
        let mut rng = DeterministicRng::from_seed(42);
        let msg = random_message(&mut rng, 333);
        let params = MdsParams::new(4, 2, 333).unwrap();
        let shares = mds_encode(&msg, &params);
        let mut subsets = 0;
        for a in 0..4 {
            for b in a + 1..4 {
                let picked = vec![shares[a].clone(), shares[b].clone()];
                assert_eq!(
                    mds_decode(&picked, &params).unwrap(),
                    msg,
                    "subset ({a},{b})"
                );
                subsets += 1;
            }
        }
        assert_eq!(subsets, 6);
    }

    #[test]
    fn decode_from_non_systematic_shares() {
        let mut rng = DeterministicRng::from_seed(43);
        let msg = random_message(&mut rng, 1024);
        let params = MdsParams::new(8, 3, 1024).unwrap();
        let shares = mds_encode(&msg, &params);
        // Shares {2, 3, 4}: skips the systematic prefix {0, 1}.
        let picked = shares[2..5].to_vec();
        assert_eq!(mds_decode(&picked, &params).unwrap(), msg);
    }

    #[test]
    fn too_few_shares_is_reported() {
        let mut rng = DeterministicRng::from_seed(44);
        let msg = random_message(&mut rng, 64);
        let params = MdsParams::new(5, 3, 64).unwrap();
        let shares = mds_encode(&msg, &params);
        let err = mds_decode(&shares[..2], &params).unwrap_err();
        assert_eq!(err, CodecError::NeedMoreShares { needed: 3, got: 2 });
    }

    #[test]
    fn padding_survives_round_trip() {
        let mut rng = DeterministicRng::from_seed(45);
        // Lengths that do not divide evenly by k.
        for (len, m, k) in [(100usize, 7u16, 3u16), (33, 5, 4), (1025, 9, 6)] {
            let msg = random_message(&mut rng, len);
            let params = MdsParams::new(m, k, len).unwrap();
            let shares = mds_encode(&msg, &params);
            assert_eq!(
                mds_decode(&shares[(m - k) as usize..], &params).unwrap(),
                msg
            );
        }
    }

    #[test]
    fn share_count_cap_is_enforced() {
        assert!(MdsParams::new(255, 100, 1000).is_ok());
        assert!(MdsParams::new(256, 100, 1000).is_err());
    }
}
