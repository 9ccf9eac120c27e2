//! Byte strings as symbol sequences.
//!
//! For `order >= 256` each byte is one symbol. Smaller alphabets spell each
//! byte as a fixed number of base-`order` digits, most significant first.

use thiserror::Error;

use crate::latin::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackingError {
    #[error("{len} symbols is not a multiple of {per_byte} symbols per byte")]
    RaggedLength { len: usize, per_byte: usize },
    #[error("digits at symbol {index} spell {value}, which is not a byte")]
    NotAByte { index: usize, value: u32 },
    #[error("symbol {symbol} at position {index} is outside [0, {order})")]
    SymbolOutOfRange {
        index: usize,
        symbol: Symbol,
        order: usize,
    },
}

/// Symbols used to spell one byte.
pub fn symbols_per_byte(order: usize) -> usize {
    assert!(order >= 2, "order must be at least 2");
    let mut digits = 0;
    let mut span = 1usize;
    while span < 256 {
        span = span.saturating_mul(order);
        digits += 1;
    }
    digits
}

pub fn bytes_to_symbols(order: usize, bytes: &[u8]) -> Vec<Symbol> {
    let d = symbols_per_byte(order);
    if d == 1 {
        return bytes.iter().map(|&b| Symbol::from(b)).collect();
    }
    let mut out = vec![0; bytes.len() * d];
    for (chunk, &b) in out.chunks_exact_mut(d).zip(bytes) {
        let mut v = usize::from(b);
        for slot in chunk.iter_mut().rev() {
            *slot = (v % order) as Symbol;
            v /= order;
        }
    }
    out
}

pub fn symbols_to_bytes(order: usize, symbols: &[Symbol]) -> Result<Vec<u8>, PackingError> {
    let d = symbols_per_byte(order);
    if let Some(index) = symbols.iter().position(|&s| usize::from(s) >= order) {
        return Err(PackingError::SymbolOutOfRange {
            index,
            symbol: symbols[index],
            order,
        });
    }
    if symbols.len() % d != 0 {
        return Err(PackingError::RaggedLength {
            len: symbols.len(),
            per_byte: d,
        });
    }
    symbols
        .chunks_exact(d)
        .enumerate()
        .map(|(i, digits)| {
            let value = digits
                .iter()
                .fold(0u32, |acc, &s| acc * order as u32 + u32::from(s));
            u8::try_from(value).map_err(|_| PackingError::NotAByte {
                index: i * d,
                value,
            })
        })
        .collect()
}
