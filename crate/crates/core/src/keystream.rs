//! Pseudorandom keystream blocks over the cipher alphabet.
//!
//! Bytes come from IETF ChaCha20 keyed by the long-term seed, with the
//! per-message nonce in the nonce slot. Symbols are drawn from big-endian
//! words of one byte (`order <= 256`) or two bytes (`order <= 65536`) by
//! rejection: a word `v` is accepted iff `v < order * floor(256^w / order)`
//! and maps to `v mod order`. For power-of-two orders nothing is rejected and
//! the map is plain truncation, so at `order = 256` symbols are the raw bytes.
//!
//! Blocks are a view over the flat symbol stream: block `i` of length `m` is
//! symbols `[i*m, (i+1)*m)`.

use chacha20::cipher::{KeyIvInit, StreamCipher};
use chacha20::ChaCha20;
use thiserror::Error;

use crate::latin::{Symbol, MAX_ORDER, MIN_ORDER};

pub const SEED_LEN: usize = 32;
pub const NONCE_LEN: usize = 12;
pub const MAX_BLOCK_LEN: usize = 255;
/// Symbols one nonce may produce.
pub const MAX_SYMBOLS_PER_NONCE: u64 = 1 << 38;

const RAW_BUF_LEN: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeystreamError {
    #[error("invalid keystream spec: {0}")]
    InvalidSpec(String),
    #[error("message exceeds {MAX_SYMBOLS_PER_NONCE} keystream symbols for one nonce")]
    MessageTooLong,
    #[error("generator stream exhausted for this nonce")]
    Exhausted,
}

/// Everything that determines a keystream: generator seed, per-message nonce,
/// block length and alphabet order.
///
/// A `(seed, nonce)` pair must never be used for two different messages.
#[derive(Clone, PartialEq, Eq)]
pub struct KeystreamSpec {
    seed: [u8; SEED_LEN],
    nonce: [u8; NONCE_LEN],
    block_len: usize,
    order: usize,
}

impl std::fmt::Debug for KeystreamSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeystreamSpec")
            .field("seed", &"<redacted>")
            .field("nonce", &hex::encode(self.nonce))
            .field("block_len", &self.block_len)
            .field("order", &self.order)
            .finish()
    }
}

impl KeystreamSpec {
    pub fn new(
        seed: [u8; SEED_LEN],
        nonce: [u8; NONCE_LEN],
        block_len: usize,
        order: usize,
    ) -> Result<Self, KeystreamError> {
        if !(1..=MAX_BLOCK_LEN).contains(&block_len) {
            return Err(KeystreamError::InvalidSpec(format!(
                "block length {block_len} outside 1..={MAX_BLOCK_LEN}"
            )));
        }
        if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
            return Err(KeystreamError::InvalidSpec(format!(
                "order {order} outside {MIN_ORDER}..={MAX_ORDER}"
            )));
        }
        Ok(Self {
            seed,
            nonce,
            block_len,
            order,
        })
    }

    pub fn seed(&self) -> &[u8; SEED_LEN] {
        &self.seed
    }

    pub fn nonce(&self) -> &[u8; NONCE_LEN] {
        &self.nonce
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn open(&self) -> KeystreamReader {
        KeystreamReader::new(self.clone())
    }
}

/// Anything that hands out keystream symbols in order.
pub trait SymbolSource {
    /// Fills `out` with the next `out.len()` symbols of the flat stream.
    fn fill_symbols(&mut self, out: &mut [Symbol]) -> Result<(), KeystreamError>;
}

impl<S: SymbolSource + ?Sized> SymbolSource for &mut S {
    fn fill_symbols(&mut self, out: &mut [Symbol]) -> Result<(), KeystreamError> {
        (**self).fill_symbols(out)
    }
}

/// Sequential reader over the keystream of one [`KeystreamSpec`].
pub struct KeystreamReader {
    spec: KeystreamSpec,
    generator: ChaCha20,
    raw: Box<[u8; RAW_BUF_LEN]>,
    raw_pos: usize,
    word_bytes: usize,
    accept_below: u32,
    emitted: u64,
}

/// `open_stream`: a reader positioned at symbol 0.
pub fn open_stream(spec: KeystreamSpec) -> KeystreamReader {
    KeystreamReader::new(spec)
}

impl KeystreamReader {
    pub fn new(spec: KeystreamSpec) -> Self {
        let generator = ChaCha20::new(&spec.seed.into(), &spec.nonce.into());
        let word_bytes = if spec.order <= 256 { 1 } else { 2 };
        let range = 1u32 << (8 * word_bytes);
        let order = spec.order as u32;
        let accept_below = (range / order) * order;
        Self {
            spec,
            generator,
            raw: Box::new([0; RAW_BUF_LEN]),
            raw_pos: RAW_BUF_LEN,
            word_bytes,
            accept_below,
            emitted: 0,
        }
    }

    pub fn spec(&self) -> &KeystreamSpec {
        &self.spec
    }

    /// Symbols emitted so far.
    pub fn position(&self) -> u64 {
        self.emitted
    }

    /// The next block `r_i` of `block_len` symbols.
    pub fn next_block(&mut self) -> Result<Vec<Symbol>, KeystreamError> {
        let mut block = vec![0; self.spec.block_len];
        self.fill_symbols(&mut block)?;
        Ok(block)
    }

    fn refill(&mut self) -> Result<(), KeystreamError> {
        self.raw.fill(0);
        self.generator
            .try_apply_keystream(&mut self.raw[..])
            .map_err(|_| KeystreamError::Exhausted)?;
        self.raw_pos = 0;
        Ok(())
    }

    #[inline]
    fn next_word(&mut self) -> Result<u32, KeystreamError> {
        if self.raw_pos + self.word_bytes > RAW_BUF_LEN {
            self.refill()?;
        }
        let word = if self.word_bytes == 1 {
            u32::from(self.raw[self.raw_pos])
        } else {
            u32::from(u16::from_be_bytes([
                self.raw[self.raw_pos],
                self.raw[self.raw_pos + 1],
            ]))
        };
        self.raw_pos += self.word_bytes;
        Ok(word)
    }

    fn fill_bytes_direct(&mut self, out: &mut [Symbol]) -> Result<(), KeystreamError> {
        let mut done = 0;
        while done < out.len() {
            if self.raw_pos == RAW_BUF_LEN {
                self.refill()?;
            }
            let take = (RAW_BUF_LEN - self.raw_pos).min(out.len() - done);
            let src = &self.raw[self.raw_pos..self.raw_pos + take];
            for (dst, &b) in out[done..done + take].iter_mut().zip(src) {
                *dst = Symbol::from(b);
            }
            self.raw_pos += take;
            done += take;
        }
        Ok(())
    }
}

impl SymbolSource for KeystreamReader {
    fn fill_symbols(&mut self, out: &mut [Symbol]) -> Result<(), KeystreamError> {
        let wanted = out.len() as u64;
        if self.emitted + wanted > MAX_SYMBOLS_PER_NONCE {
            return Err(KeystreamError::MessageTooLong);
        }
        if self.spec.order == 256 {
            self.fill_bytes_direct(out)?;
        } else {
            let order = self.spec.order as u32;
            for slot in out.iter_mut() {
                let word = loop {
                    let w = self.next_word()?;
                    if w < self.accept_below {
                        break w;
                    }
                };
                *slot = (word % order) as Symbol;
            }
        }
        self.emitted += wanted;
        Ok(())
    }
}

/// A fixed, pre-recorded symbol stream. Lets tests and tooling drive the
/// cipher with chosen keystream blocks.
#[derive(Debug, Clone)]
pub struct ReplaySource {
    symbols: Vec<Symbol>,
    pos: usize,
}

impl ReplaySource {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self { symbols, pos: 0 }
    }
}

impl SymbolSource for ReplaySource {
    fn fill_symbols(&mut self, out: &mut [Symbol]) -> Result<(), KeystreamError> {
        let end = self.pos + out.len();
        if end > self.symbols.len() {
            return Err(KeystreamError::Exhausted);
        }
        out.copy_from_slice(&self.symbols[self.pos..end]);
        self.pos = end;
        Ok(())
    }
}
