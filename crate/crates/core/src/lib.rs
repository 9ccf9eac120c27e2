//! A stream cipher keyed by a Latin square.
//!
//! The secret is a key automaton: a finite automaton whose states and inputs
//! are the same alphabet and whose transition table is a Latin square. Each
//! plaintext symbol is used as a start state; the automaton reads a block of
//! `m` keystream symbols and the state it lands in is the ciphertext symbol.
//! Decryption runs the inverse automaton over the reversed block.
//!
//! The same cipher reads as a quasigroup cipher: with `x * y = δ(y, x)` the
//! ciphertext is `k_m * (… * (k_1 * p))` and decryption is a chain of left
//! divisions. Both engines are implemented ([`cipher::Engine`]) and produce
//! identical output.
//!
//! Also included: the classical leader-based quasigroup cipher with a
//! known-plaintext attack ([`classical`]), bit-exact key and ciphertext
//! formats ([`codec`]) and a throughput harness ([`bench`]).

pub mod automaton;
pub mod bench;
pub mod cipher;
pub mod classical;
pub mod codec;
pub mod demo;
pub mod keystream;
pub mod latin;
pub mod packing;
pub mod quasigroup;

pub use automaton::{AutomatonError, KeyAutomaton, Trajectory};
pub use cipher::{decrypt, encrypt, CipherError, CipherSession, Engine, KeyMaterial};
pub use classical::{
    known_plaintext_learn, AttackError, LeaderCipher, Recovered, RecoveredKnowledge,
};
pub use codec::{CipherContainer, CodecError, KeyFile};
pub use keystream::{open_stream, KeystreamError, KeystreamReader, KeystreamSpec, SymbolSource};
pub use latin::{generate_latin, validate_latin, LatinError, LatinGenerator, LatinSquare, Symbol};
pub use quasigroup::{Quasigroup, QuasigroupError};
