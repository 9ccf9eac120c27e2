//! The keystream cipher in its two equivalent forms.
//!
//! Automaton form: `c_i` is the last state the key automaton reaches from
//! state `p_i` over the block `r_i`; decryption runs the inverse automaton
//! from `c_i` over the mirror image of `r_i`.
//!
//! Quasigroup form: `c_i = k_m * (… * (k_1 * p_i))` and
//! `p_i = k_1 \ (… \ (k_m \ c_i))` over the block `k_1 … k_m`.
//!
//! With `x * y = δ(y, x)` the two forms produce identical output.

use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automaton::KeyAutomaton;
use crate::keystream::{
    KeystreamError, KeystreamReader, KeystreamSpec, SymbolSource, MAX_BLOCK_LEN,
};
use crate::latin::Symbol;
use crate::quasigroup::Quasigroup;

pub const DEFAULT_BLOCK_LEN: usize = 4;

const CHUNK_SYMBOLS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error("symbol {symbol} at position {index} is outside [0, {order})")]
    SymbolOutOfRange {
        index: usize,
        symbol: Symbol,
        order: usize,
    },
    #[error("block length {0} outside 1..={MAX_BLOCK_LEN}")]
    InvalidBlockLength(usize),
    #[error("keystream order {stream} does not match key order {key}")]
    OrderMismatch { key: usize, stream: usize },
    #[error("session keystream already used; each message needs a fresh nonce")]
    NonceReuse,
    #[error(transparent)]
    Keystream(#[from] KeystreamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Engine {
    /// Key automaton with a last-state accumulator.
    #[default]
    Automaton,
    /// Quasigroup multiplication chain and left-division chain.
    Quasigroup,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fa" => Ok(Engine::Automaton),
            "qg" => Ok(Engine::Quasigroup),
            other => Err(format!("unknown engine {other:?} (expected fa or qg)")),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Automaton => "fa",
            Engine::Quasigroup => "qg",
        })
    }
}

/// A key automaton with everything the engines derive from it: its inverse,
/// its quasigroup and that quasigroup's left inverse. Immutable and shareable
/// across sessions.
#[derive(Debug, Clone)]
pub struct KeyMaterial {
    automaton: KeyAutomaton,
    inverse: KeyAutomaton,
    quasigroup: Quasigroup,
    quasigroup_li: Quasigroup,
}

impl KeyMaterial {
    pub fn new(automaton: KeyAutomaton) -> Self {
        let inverse = automaton.invert();
        let quasigroup = automaton.quasigroup();
        let quasigroup_li = quasigroup.left_inverse();
        Self {
            automaton,
            inverse,
            quasigroup,
            quasigroup_li,
        }
    }

    pub fn order(&self) -> usize {
        self.automaton.order()
    }

    pub fn automaton(&self) -> &KeyAutomaton {
        &self.automaton
    }

    pub fn inverse(&self) -> &KeyAutomaton {
        &self.inverse
    }

    pub fn quasigroup(&self) -> &Quasigroup {
        &self.quasigroup
    }

    pub fn left_inverse_quasigroup(&self) -> &Quasigroup {
        &self.quasigroup_li
    }

    /// `last(δ(p, block))`.
    #[inline]
    pub fn encrypt_fa(&self, block: &[Symbol], p: Symbol) -> Symbol {
        debug_assert!(!block.is_empty());
        let table = self.automaton.table().as_flat();
        let n = self.order();
        block.iter().fold(p, |state, &x| {
            table[usize::from(x) * n + usize::from(state)]
        })
    }

    /// `last(δ⁻¹(c, mirror(block)))`.
    #[inline]
    pub fn decrypt_fa(&self, block: &[Symbol], c: Symbol) -> Symbol {
        debug_assert!(!block.is_empty());
        let table = self.inverse.table().as_flat();
        let n = self.order();
        block.iter().rev().fold(c, |state, &x| {
            table[usize::from(x) * n + usize::from(state)]
        })
    }

    pub fn encrypt_qg(&self, block: &[Symbol], p: Symbol) -> Symbol {
        self.quasigroup
            .fold_mul(block, p)
            .expect("session blocks are never empty")
    }

    pub fn decrypt_qg(&self, block: &[Symbol], c: Symbol) -> Symbol {
        // Left division in Q is multiplication in its left inverse.
        debug_assert!(!block.is_empty());
        block
            .iter()
            .rev()
            .fold(c, |acc, &k| self.quasigroup_li.mul(k, acc))
    }

    fn check_symbols(&self, symbols: &[Symbol], offset: usize) -> Result<(), CipherError> {
        let order = self.order();
        match symbols.iter().position(|&s| usize::from(s) >= order) {
            Some(i) => Err(CipherError::SymbolOutOfRange {
                index: offset + i,
                symbol: symbols[i],
                order,
            }),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Encrypt,
    Decrypt,
}

/// Encrypts or decrypts one stream of symbols.
///
/// Symbol `i` of a message consumes block `i` of the keystream. A session
/// holds a stateful stream position, so it serves exactly one message;
/// [`encrypt_message`](Self::encrypt_message) on a session that already drew
/// keystream fails with [`CipherError::NonceReuse`].
pub struct CipherSession<K, S> {
    key: K,
    stream: S,
    engine: Engine,
    block_len: usize,
    used: bool,
    block: Vec<Symbol>,
}

impl<K: Borrow<KeyMaterial>> CipherSession<K, KeystreamReader> {
    /// Session over the keystream described by `spec`; the block length is
    /// taken from the spec.
    pub fn from_spec(key: K, spec: &KeystreamSpec, engine: Engine) -> Result<Self, CipherError> {
        let key_order = key.borrow().order();
        if spec.order() != key_order {
            return Err(CipherError::OrderMismatch {
                key: key_order,
                stream: spec.order(),
            });
        }
        let block_len = spec.block_len();
        Self::new(key, spec.open(), block_len, engine)
    }
}

impl<K: Borrow<KeyMaterial>, S: SymbolSource> CipherSession<K, S> {
    pub fn new(key: K, stream: S, block_len: usize, engine: Engine) -> Result<Self, CipherError> {
        if !(1..=MAX_BLOCK_LEN).contains(&block_len) {
            return Err(CipherError::InvalidBlockLength(block_len));
        }
        Ok(Self {
            key,
            stream,
            engine,
            block_len,
            used: false,
            block: vec![0; block_len],
        })
    }

    pub fn key(&self) -> &KeyMaterial {
        self.key.borrow()
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn into_stream(self) -> S {
        self.stream
    }

    fn draw_block(&mut self, symbol: Symbol) -> Result<(), CipherError> {
        self.key().check_symbols(&[symbol], 0)?;
        self.used = true;
        self.stream.fill_symbols(&mut self.block)?;
        Ok(())
    }

    pub fn encrypt_symbol_fa(&mut self, p: Symbol) -> Result<Symbol, CipherError> {
        self.draw_block(p)?;
        Ok(self.key.borrow().encrypt_fa(&self.block, p))
    }

    pub fn decrypt_symbol_fa(&mut self, c: Symbol) -> Result<Symbol, CipherError> {
        self.draw_block(c)?;
        Ok(self.key.borrow().decrypt_fa(&self.block, c))
    }

    pub fn encrypt_symbol_qg(&mut self, p: Symbol) -> Result<Symbol, CipherError> {
        self.draw_block(p)?;
        Ok(self.key.borrow().encrypt_qg(&self.block, p))
    }

    pub fn decrypt_symbol_qg(&mut self, c: Symbol) -> Result<Symbol, CipherError> {
        self.draw_block(c)?;
        Ok(self.key.borrow().decrypt_qg(&self.block, c))
    }

    /// One symbol through the session's engine.
    pub fn encrypt_symbol(&mut self, p: Symbol) -> Result<Symbol, CipherError> {
        match self.engine {
            Engine::Automaton => self.encrypt_symbol_fa(p),
            Engine::Quasigroup => self.encrypt_symbol_qg(p),
        }
    }

    pub fn decrypt_symbol(&mut self, c: Symbol) -> Result<Symbol, CipherError> {
        match self.engine {
            Engine::Automaton => self.decrypt_symbol_fa(c),
            Engine::Quasigroup => self.decrypt_symbol_qg(c),
        }
    }

    pub fn encrypt_message(&mut self, plaintext: &[Symbol]) -> Result<Vec<Symbol>, CipherError> {
        self.process(plaintext, Direction::Encrypt)
    }

    pub fn decrypt_message(&mut self, ciphertext: &[Symbol]) -> Result<Vec<Symbol>, CipherError> {
        self.process(ciphertext, Direction::Decrypt)
    }

    fn process(&mut self, input: &[Symbol], dir: Direction) -> Result<Vec<Symbol>, CipherError> {
        if self.used {
            return Err(CipherError::NonceReuse);
        }
        self.key.borrow().check_symbols(input, 0)?;
        self.used = true;

        let m = self.block_len;
        let mut out = vec![0; input.len()];
        let mut keystream = vec![0; CHUNK_SYMBOLS.min(input.len()) * m];
        for (src, dst) in input
            .chunks(CHUNK_SYMBOLS)
            .zip(out.chunks_mut(CHUNK_SYMBOLS))
        {
            let ks = &mut keystream[..src.len() * m];
            self.stream.fill_symbols(ks)?;
            let key = self.key.borrow();
            match (self.engine, dir) {
                (Engine::Automaton, Direction::Encrypt) if m == 1 => {
                    single_step(key.automaton(), ks, src, dst)
                }
                (Engine::Automaton, Direction::Decrypt) if m == 1 => {
                    single_step(key.inverse(), ks, src, dst)
                }
                (Engine::Automaton, Direction::Encrypt) => {
                    for ((d, &p), block) in dst.iter_mut().zip(src).zip(ks.chunks_exact(m)) {
                        *d = key.encrypt_fa(block, p);
                    }
                }
                (Engine::Automaton, Direction::Decrypt) => {
                    for ((d, &c), block) in dst.iter_mut().zip(src).zip(ks.chunks_exact(m)) {
                        *d = key.decrypt_fa(block, c);
                    }
                }
                (Engine::Quasigroup, Direction::Encrypt) => {
                    for ((d, &p), block) in dst.iter_mut().zip(src).zip(ks.chunks_exact(m)) {
                        *d = key.encrypt_qg(block, p);
                    }
                }
                (Engine::Quasigroup, Direction::Decrypt) => {
                    for ((d, &c), block) in dst.iter_mut().zip(src).zip(ks.chunks_exact(m)) {
                        *d = key.decrypt_qg(block, c);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Block length 1: one transition per symbol, `out_i = δ(in_i, k_i)`.
#[inline]
fn single_step(automaton: &KeyAutomaton, ks: &[Symbol], input: &[Symbol], out: &mut [Symbol]) {
    let table = automaton.table().as_flat();
    let n = automaton.order();
    for ((d, &s), &k) in out.iter_mut().zip(input).zip(ks) {
        *d = table[usize::from(k) * n + usize::from(s)];
    }
}

/// Encrypts `plaintext` under the keystream of `spec`.
pub fn encrypt(
    key: &KeyMaterial,
    spec: &KeystreamSpec,
    engine: Engine,
    plaintext: &[Symbol],
) -> Result<Vec<Symbol>, CipherError> {
    CipherSession::from_spec(key, spec, engine)?.encrypt_message(plaintext)
}

pub fn decrypt(
    key: &KeyMaterial,
    spec: &KeystreamSpec,
    engine: Engine,
    ciphertext: &[Symbol],
) -> Result<Vec<Symbol>, CipherError> {
    CipherSession::from_spec(key, spec, engine)?.decrypt_message(ciphertext)
}
