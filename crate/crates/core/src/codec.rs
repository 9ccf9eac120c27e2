//! Key files and ciphertext containers.
//!
//! Both formats are big-endian throughout. Symbols take one byte when the
//! order is at most 256 and two bytes otherwise.
//!
//! Key file:
//!
//! ```text
//! magic   8   "LSQKEY\0\x01"
//! order   4   u32
//! seed    32  keystream generator seed
//! table   n²  transition table, row = input, column = state, row-major
//! crc     4   CRC-32 (IEEE) of every preceding byte
//! ```
//!
//! Container:
//!
//! ```text
//! magic    8  "LSQCT\0\0\x01"
//! version  1  1
//! order    4  u32
//! block    1  keystream block length m, >= 1
//! nonce    12
//! length   8  u64 payload length in symbols
//! payload     ciphertext symbols
//! crc      4  CRC-32 of the plaintext symbols (diagnostic only)
//! ```
//!
//! The container CRC is over the plaintext, encoded at the container's
//! symbol width. It lets tooling notice a wrong key. It is not an integrity
//! check: the cipher is unauthenticated and anyone can recompute a CRC.

use std::io::{Read, Write};

use thiserror::Error;

use crate::keystream::{NONCE_LEN, SEED_LEN};
use crate::latin::{LatinError, LatinSquare, Symbol, MAX_ORDER, MIN_ORDER};

pub const KEY_MAGIC: [u8; 8] = *b"LSQKEY\0\x01";
pub const CONTAINER_MAGIC: [u8; 8] = *b"LSQCT\0\0\x01";
pub const CONTAINER_VERSION: u8 = 1;

const KEY_HEADER_LEN: usize = 8 + 4 + SEED_LEN;
const CONTAINER_HEADER_LEN: usize = 8 + 1 + 4 + 1 + NONCE_LEN + 8;
const CRC_LEN: usize = 4;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("bad magic number")]
    BadMagic,
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    BadChecksum { stored: u32, computed: u32 },
    #[error("table is not a Latin square: {0}")]
    NotLatin(LatinError),
    #[error("file truncated: need {needed} bytes, have {available}")]
    TruncatedFile { needed: usize, available: usize },
    #[error("{0} unexpected bytes after the end of the file")]
    TrailingData(usize),
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("payload length field says {declared} symbols but {actual} follow")]
    LengthMismatch { declared: u64, actual: u64 },
    #[error("order {0} outside {MIN_ORDER}..={MAX_ORDER}")]
    InvalidOrder(u64),
    #[error("block length must be at least 1")]
    InvalidBlockLength,
    #[error("payload symbol {symbol} at position {index} is outside [0, {order})")]
    SymbolOutOfRange {
        index: usize,
        symbol: Symbol,
        order: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CodecError {
    /// Stable short name, used in CLI reports.
    pub fn name(&self) -> &'static str {
        match self {
            CodecError::BadMagic => "BadMagic",
            CodecError::BadChecksum { .. } => "BadChecksum",
            CodecError::NotLatin(_) => "NotLatin",
            CodecError::TruncatedFile { .. } => "TruncatedFile",
            CodecError::TrailingData(_) => "TrailingData",
            CodecError::UnsupportedVersion(_) => "UnsupportedVersion",
            CodecError::LengthMismatch { .. } => "LengthMismatch",
            CodecError::InvalidOrder(_) => "InvalidOrder",
            CodecError::InvalidBlockLength => "InvalidBlockLength",
            CodecError::SymbolOutOfRange { .. } => "SymbolOutOfRange",
            CodecError::Io(_) => "Io",
        }
    }
}

/// Bytes per serialized symbol for an alphabet of `order` symbols.
pub fn symbol_width(order: usize) -> usize {
    if order <= 256 {
        1
    } else {
        2
    }
}

pub fn encode_symbols(order: usize, symbols: &[Symbol], out: &mut Vec<u8>) {
    if symbol_width(order) == 1 {
        out.extend(symbols.iter().map(|&s| s as u8));
    } else {
        for &s in symbols {
            out.extend_from_slice(&s.to_be_bytes());
        }
    }
}

fn decode_symbols(order: usize, bytes: &[u8]) -> Vec<Symbol> {
    if symbol_width(order) == 1 {
        bytes.iter().map(|&b| Symbol::from(b)).collect()
    } else {
        bytes
            .chunks_exact(2)
            .map(|w| u16::from_be_bytes([w[0], w[1]]))
            .collect()
    }
}

/// CRC-32 of `symbols` at the width for `order`.
pub fn symbols_crc(order: usize, symbols: &[Symbol]) -> u32 {
    let mut bytes = Vec::with_capacity(symbols.len() * symbol_width(order));
    encode_symbols(order, symbols, &mut bytes);
    crc32fast::hash(&bytes)
}

fn check_order(order: u64) -> Result<usize, CodecError> {
    match usize::try_from(order) {
        Ok(n) if (MIN_ORDER..=MAX_ORDER).contains(&n) => Ok(n),
        _ => Err(CodecError::InvalidOrder(order)),
    }
}

fn need(bytes: &[u8], needed: usize) -> Result<(), CodecError> {
    if bytes.len() < needed {
        return Err(CodecError::TruncatedFile {
            needed,
            available: bytes.len(),
        });
    }
    Ok(())
}

fn be_u32(bytes: &[u8]) -> u32 {
    u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes"))
}

/// A key: the transition table of the key automaton plus the keystream seed.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyFile {
    pub table: LatinSquare,
    pub seed: [u8; SEED_LEN],
}

impl std::fmt::Debug for KeyFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyFile")
            .field("order", &self.table.order())
            .field("seed", &"<redacted>")
            .finish_non_exhaustive()
    }
}

impl KeyFile {
    pub fn order(&self) -> usize {
        self.table.order()
    }

    /// Size of the serialized key for `order`.
    pub fn encoded_len(order: usize) -> usize {
        KEY_HEADER_LEN + order * order * symbol_width(order) + CRC_LEN
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.order();
        let mut out = Vec::with_capacity(Self::encoded_len(n));
        out.extend_from_slice(&KEY_MAGIC);
        out.extend_from_slice(&(n as u32).to_be_bytes());
        out.extend_from_slice(&self.seed);
        encode_symbols(n, self.table.as_flat(), &mut out);
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    /// Parses a key. Checks, in order: magic, order, length, checksum,
    /// Latin property.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        need(bytes, KEY_MAGIC.len())?;
        if bytes[..8] != KEY_MAGIC {
            return Err(CodecError::BadMagic);
        }
        need(bytes, KEY_HEADER_LEN)?;
        let n = check_order(u64::from(be_u32(&bytes[8..12])))?;
        let total = Self::encoded_len(n);
        need(bytes, total)?;
        if bytes.len() > total {
            return Err(CodecError::TrailingData(bytes.len() - total));
        }
        let body = &bytes[..total - CRC_LEN];
        let stored = be_u32(&bytes[total - CRC_LEN..]);
        let computed = crc32fast::hash(body);
        if stored != computed {
            return Err(CodecError::BadChecksum { stored, computed });
        }
        let seed: [u8; SEED_LEN] = bytes[12..KEY_HEADER_LEN].try_into().expect("seed slice");
        let entries = decode_symbols(n, &body[KEY_HEADER_LEN..]);
        let table = LatinSquare::from_flat(n, entries).map_err(CodecError::NotLatin)?;
        Ok(Self { table, seed })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), CodecError> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, CodecError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

/// Ciphertext plus everything needed to regenerate its keystream, except the
/// key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherContainer {
    pub order: usize,
    pub block_len: u8,
    pub nonce: [u8; NONCE_LEN],
    pub payload: Vec<Symbol>,
    /// CRC-32 of the plaintext symbols. Diagnostic, not authentication.
    pub plaintext_crc: u32,
}

impl CipherContainer {
    pub fn encoded_len(&self) -> usize {
        CONTAINER_HEADER_LEN + self.payload.len() * symbol_width(self.order) + CRC_LEN
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&CONTAINER_MAGIC);
        out.push(CONTAINER_VERSION);
        out.extend_from_slice(&(self.order as u32).to_be_bytes());
        out.push(self.block_len);
        out.extend_from_slice(&self.nonce);
        out.extend_from_slice(&(self.payload.len() as u64).to_be_bytes());
        encode_symbols(self.order, &self.payload, &mut out);
        out.extend_from_slice(&self.plaintext_crc.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        need(bytes, CONTAINER_MAGIC.len())?;
        if bytes[..8] != CONTAINER_MAGIC {
            return Err(CodecError::BadMagic);
        }
        need(bytes, 9)?;
        if bytes[8] != CONTAINER_VERSION {
            return Err(CodecError::UnsupportedVersion(bytes[8]));
        }
        need(bytes, CONTAINER_HEADER_LEN)?;
        let order = check_order(u64::from(be_u32(&bytes[9..13])))?;
        let block_len = bytes[13];
        if block_len == 0 {
            return Err(CodecError::InvalidBlockLength);
        }
        let nonce: [u8; NONCE_LEN] = bytes[14..26].try_into().expect("nonce slice");
        let declared = u64::from_be_bytes(bytes[26..34].try_into().expect("length slice"));

        let width = symbol_width(order) as u64;
        let rest = (bytes.len() - CONTAINER_HEADER_LEN) as u64;
        let expected = declared
            .checked_mul(width)
            .and_then(|b| b.checked_add(CRC_LEN as u64));
        match expected {
            Some(e) if e == rest => {}
            Some(e) if e > rest => {
                return Err(CodecError::TruncatedFile {
                    needed: usize::try_from(e)
                        .unwrap_or(usize::MAX)
                        .saturating_add(CONTAINER_HEADER_LEN),
                    available: bytes.len(),
                })
            }
            None => {
                return Err(CodecError::TruncatedFile {
                    needed: usize::MAX,
                    available: bytes.len(),
                })
            }
            Some(_) => {
                return Err(CodecError::LengthMismatch {
                    declared,
                    actual: rest.saturating_sub(CRC_LEN as u64) / width,
                })
            }
        }
        let payload_end = bytes.len() - CRC_LEN;
        let payload = decode_symbols(order, &bytes[CONTAINER_HEADER_LEN..payload_end]);
        if let Some(index) = payload.iter().position(|&s| usize::from(s) >= order) {
            return Err(CodecError::SymbolOutOfRange {
                index,
                symbol: payload[index],
                order,
            });
        }
        let plaintext_crc = be_u32(&bytes[payload_end..]);
        Ok(Self {
            order,
            block_len,
            nonce,
            payload,
            plaintext_crc,
        })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), CodecError> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, CodecError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}
