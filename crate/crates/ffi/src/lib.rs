//! C ABI for `lsq`.
//!
//! Keys and sessions are opaque heap handles owned by the caller and released
//! with their `_free` function. Every entry point returns an [`LsqStatus`];
//! on failure a human-readable message is available from
//! [`lsq_last_error_message`] on the same thread until the next call.
//!
//! Byte buffers produced by the library come back as [`LsqBytes`] and must be
//! released with [`lsq_bytes_free`]. Symbol buffers are always caller-owned.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use lsq::codec::symbols_crc;
use lsq::keystream::{NONCE_LEN, SEED_LEN};
use lsq::packing::{bytes_to_symbols, symbols_to_bytes};
use lsq::{
    CipherContainer, CipherError, CipherSession, CodecError, Engine, KeyAutomaton, KeyFile,
    KeyMaterial, KeystreamError, KeystreamReader, KeystreamSpec, LatinError, LatinGenerator,
    Symbol,
};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotLatin = 3,
    BadMagic = 4,
    BadChecksum = 5,
    Truncated = 6,
    MalformedContainer = 7,
    OrderMismatch = 8,
    SymbolOutOfRange = 9,
    NonceReuse = 10,
    KeystreamExhausted = 11,
    /// Decryption finished but the plaintext checksum disagrees: wrong key,
    /// wrong engine or damaged payload.
    ChecksumMismatch = 12,
    Panic = 255,
}

/// Which of the two equivalent encryption forms a session runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqEngine {
    Automaton = 0,
    Quasigroup = 1,
}

impl From<LsqEngine> for Engine {
    fn from(e: LsqEngine) -> Self {
        match e {
            LsqEngine::Automaton => Engine::Automaton,
            LsqEngine::Quasigroup => Engine::Quasigroup,
        }
    }
}

/// A library-allocated byte buffer.
#[repr(C)]
#[derive(Debug)]
pub struct LsqBytes {
    pub data: *mut u8,
    pub len: usize,
}

impl LsqBytes {
    const EMPTY: LsqBytes = LsqBytes {
        data: ptr::null_mut(),
        len: 0,
    };

    fn from_vec(v: Vec<u8>) -> Self {
        let boxed = v.into_boxed_slice();
        let len = boxed.len();
        let data = Box::into_raw(boxed) as *mut u8;
        LsqBytes { data, len }
    }
}

/// Opaque key handle: transition table plus keystream seed.
pub struct LsqKey {
    material: Arc<KeyMaterial>,
    seed: [u8; SEED_LEN],
}

/// Opaque session handle bound to one key and one nonce.
pub struct LsqSession {
    inner: CipherSession<Arc<KeyMaterial>, KeystreamReader>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let mut s = msg.into();
    s.retain(|c| c != '\0');
    let c = CString::new(s).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(LsqStatus, String);

impl Failure {
    fn new(status: LsqStatus, msg: impl Into<String>) -> Self {
        Failure(status, msg.into())
    }
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Self {
        let status = match e {
            CodecError::BadMagic => LsqStatus::BadMagic,
            CodecError::BadChecksum { .. } => LsqStatus::BadChecksum,
            CodecError::NotLatin(_) => LsqStatus::NotLatin,
            CodecError::TruncatedFile { .. } => LsqStatus::Truncated,
            CodecError::InvalidOrder(_) | CodecError::InvalidBlockLength => {
                LsqStatus::InvalidArgument
            }
            CodecError::SymbolOutOfRange { .. } => LsqStatus::SymbolOutOfRange,
            CodecError::TrailingData(_)
            | CodecError::UnsupportedVersion(_)
            | CodecError::LengthMismatch { .. }
            | CodecError::Io(_) => LsqStatus::MalformedContainer,
        };
        Failure(status, format!("{}: {e}", e.name()))
    }
}

impl From<CipherError> for Failure {
    fn from(e: CipherError) -> Self {
        let status = match e {
            CipherError::SymbolOutOfRange { .. } => LsqStatus::SymbolOutOfRange,
            CipherError::InvalidBlockLength(_) => LsqStatus::InvalidArgument,
            CipherError::OrderMismatch { .. } => LsqStatus::OrderMismatch,
            CipherError::NonceReuse => LsqStatus::NonceReuse,
            CipherError::Keystream(KeystreamError::InvalidSpec(_)) => LsqStatus::InvalidArgument,
            CipherError::Keystream(_) => LsqStatus::KeystreamExhausted,
        };
        Failure(status, e.to_string())
    }
}

impl From<KeystreamError> for Failure {
    fn from(e: KeystreamError) -> Self {
        Failure::from(CipherError::from(e))
    }
}

impl From<LatinError> for Failure {
    fn from(e: LatinError) -> Self {
        let status = match e {
            LatinError::OrderTooSmall(_)
            | LatinError::OrderTooLarge(_)
            | LatinError::WalkUnsupported(_) => LsqStatus::InvalidArgument,
            _ => LsqStatus::NotLatin,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LsqStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsqStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LsqStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(
            LsqStatus::NullPointer,
            format!("{what} is null"),
        ));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::new(
            LsqStatus::NullPointer,
            format!("{what} is null"),
        ));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn fixed<const N: usize>(p: *const u8, what: &str) -> Result<[u8; N], Failure> {
    if p.is_null() {
        return Err(Failure::new(
            LsqStatus::NullPointer,
            format!("{what} is null"),
        ));
    }
    let mut out = [0u8; N];
    out.copy_from_slice(slice::from_raw_parts(p, N));
    Ok(out)
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(LsqStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(LsqStatus::NullPointer, format!("{what} is null")))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(
            LsqStatus::NullPointer,
            "output pointer is null",
        ));
    }
    Ok(())
}

fn checked_block_len(m: u32) -> Result<u8, Failure> {
    u8::try_from(m).ok().filter(|&m| m >= 1).ok_or_else(|| {
        Failure::new(
            LsqStatus::InvalidArgument,
            format!("block length {m} outside 1..=255"),
        )
    })
}

fn new_key(key: KeyFile) -> *mut LsqKey {
    Box::into_raw(Box::new(LsqKey {
        material: Arc::new(KeyMaterial::new(KeyAutomaton::new(key.table))),
        seed: key.seed,
    }))
}

/// Message describing the most recent failure on this thread, or NULL.
///
/// The pointer stays valid until the next `lsq_*` call on the same thread.
#[no_mangle]
pub extern "C" fn lsq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn lsq_status_name(status: LsqStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        LsqStatus::Ok => b"Ok\0",
        LsqStatus::NullPointer => b"NullPointer\0",
        LsqStatus::InvalidArgument => b"InvalidArgument\0",
        LsqStatus::NotLatin => b"NotLatin\0",
        LsqStatus::BadMagic => b"BadMagic\0",
        LsqStatus::BadChecksum => b"BadChecksum\0",
        LsqStatus::Truncated => b"Truncated\0",
        LsqStatus::MalformedContainer => b"MalformedContainer\0",
        LsqStatus::OrderMismatch => b"OrderMismatch\0",
        LsqStatus::SymbolOutOfRange => b"SymbolOutOfRange\0",
        LsqStatus::NonceReuse => b"NonceReuse\0",
        LsqStatus::KeystreamExhausted => b"KeystreamExhausted\0",
        LsqStatus::ChecksumMismatch => b"ChecksumMismatch\0",
        LsqStatus::Panic => b"Panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Generates a key of the given order.
///
/// The table is derived from `table_seed` (any length, may be empty) and
/// optionally mixed by `walk_steps` random-walk moves (order <= 256 only).
/// `stream_seed` must point at 32 bytes of secret randomness.
#[no_mangle]
pub unsafe extern "C" fn lsq_key_generate(
    order: u32,
    table_seed: *const u8,
    table_seed_len: usize,
    walk_steps: u64,
    stream_seed: *const u8,
    out: *mut *mut LsqKey,
) -> LsqStatus {
    guard(|| {
        check_out(out)?;
        let table_seed = input(table_seed, table_seed_len, "table_seed")?;
        let seed = fixed::<SEED_LEN>(stream_seed, "stream_seed")?;
        let table = LatinGenerator::new()
            .walk_steps(walk_steps)
            .generate(order as usize, table_seed)?;
        *out = new_key(KeyFile { table, seed });
        Ok(())
    })
}

/// Parses a serialized key file.
#[no_mangle]
pub unsafe extern "C" fn lsq_key_from_bytes(
    data: *const u8,
    len: usize,
    out: *mut *mut LsqKey,
) -> LsqStatus {
    guard(|| {
        check_out(out)?;
        let key = KeyFile::from_bytes(input(data, len, "data")?)?;
        *out = new_key(key);
        Ok(())
    })
}

/// Serializes a key in the key file format.
#[no_mangle]
pub unsafe extern "C" fn lsq_key_to_bytes(key: *const LsqKey, out: *mut LsqBytes) -> LsqStatus {
    guard(|| {
        check_out(out)?;
        let key = handle(key, "key")?;
        let file = KeyFile {
            table: key.material.automaton().table().clone(),
            seed: key.seed,
        };
        *out = LsqBytes::from_vec(file.to_bytes());
        Ok(())
    })
}

/// Alphabet size of the key, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lsq_key_order(key: *const LsqKey) -> u32 {
    key.as_ref().map_or(0, |k| k.material.order() as u32)
}

#[no_mangle]
pub unsafe extern "C" fn lsq_key_free(key: *mut LsqKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// Opens a session for one message under `nonce` (12 bytes).
///
/// The session keeps its own reference to the key, so the key handle may be
/// freed first. Never open two sessions with the same key and nonce for
/// different messages.
#[no_mangle]
pub unsafe extern "C" fn lsq_session_new(
    key: *const LsqKey,
    nonce: *const u8,
    block_len: u32,
    engine: LsqEngine,
    out: *mut *mut LsqSession,
) -> LsqStatus {
    guard(|| {
        check_out(out)?;
        let key = handle(key, "key")?;
        let nonce = fixed::<NONCE_LEN>(nonce, "nonce")?;
        let spec = KeystreamSpec::new(key.seed, nonce, block_len as usize, key.material.order())?;
        let inner = CipherSession::from_spec(Arc::clone(&key.material), &spec, engine.into())?;
        *out = Box::into_raw(Box::new(LsqSession { inner }));
        Ok(())
    })
}

/// Encrypts `len` symbols from `input_symbols` into `output_symbols`.
///
/// Consumes keystream; successive calls continue the same message.
#[no_mangle]
pub unsafe extern "C" fn lsq_session_encrypt(
    session: *mut LsqSession,
    input_symbols: *const u16,
    output_symbols: *mut u16,
    len: usize,
) -> LsqStatus {
    guard(|| {
        let s = handle_mut(session, "session")?;
        let src = input(input_symbols, len, "input")?;
        let dst = output(output_symbols, len, "output")?;
        for (i, (&p, c)) in src.iter().zip(dst.iter_mut()).enumerate() {
            *c = s.inner.encrypt_symbol(p).map_err(|e| reindex(e, i))?;
        }
        Ok(())
    })
}

/// Inverse of [`lsq_session_encrypt`] for a session opened with the same
/// key, nonce, block length and engine.
#[no_mangle]
pub unsafe extern "C" fn lsq_session_decrypt(
    session: *mut LsqSession,
    input_symbols: *const u16,
    output_symbols: *mut u16,
    len: usize,
) -> LsqStatus {
    guard(|| {
        let s = handle_mut(session, "session")?;
        let src = input(input_symbols, len, "input")?;
        let dst = output(output_symbols, len, "output")?;
        for (i, (&c, p)) in src.iter().zip(dst.iter_mut()).enumerate() {
            *p = s.inner.decrypt_symbol(c).map_err(|e| reindex(e, i))?;
        }
        Ok(())
    })
}

fn reindex(e: CipherError, index: usize) -> CipherError {
    match e {
        CipherError::SymbolOutOfRange { symbol, order, .. } => CipherError::SymbolOutOfRange {
            index,
            symbol,
            order,
        },
        other => other,
    }
}

#[no_mangle]
pub unsafe extern "C" fn lsq_session_free(session: *mut LsqSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Encrypts a byte string into a serialized container.
#[no_mangle]
pub unsafe extern "C" fn lsq_seal(
    key: *const LsqKey,
    nonce: *const u8,
    block_len: u32,
    engine: LsqEngine,
    plaintext: *const u8,
    plaintext_len: usize,
    out: *mut LsqBytes,
) -> LsqStatus {
    guard(|| {
        check_out(out)?;
        let key = handle(key, "key")?;
        let nonce = fixed::<NONCE_LEN>(nonce, "nonce")?;
        let m = checked_block_len(block_len)?;
        let order = key.material.order();
        let symbols = bytes_to_symbols(order, input(plaintext, plaintext_len, "plaintext")?);
        let spec = KeystreamSpec::new(key.seed, nonce, usize::from(m), order)?;
        let payload = CipherSession::from_spec(&*key.material, &spec, engine.into())?
            .encrypt_message(&symbols)?;
        let container = CipherContainer {
            order,
            block_len: m,
            nonce,
            plaintext_crc: symbols_crc(order, &symbols),
            payload,
        };
        *out = LsqBytes::from_vec(container.to_bytes());
        Ok(())
    })
}

/// Decrypts a serialized container.
///
/// Returns `ChecksumMismatch` when the recovered plaintext fails its
/// checksum; `out` is still filled if the symbols decode to bytes.
#[no_mangle]
pub unsafe extern "C" fn lsq_open(
    key: *const LsqKey,
    engine: LsqEngine,
    container: *const u8,
    container_len: usize,
    out: *mut LsqBytes,
) -> LsqStatus {
    guard(|| {
        check_out(out)?;
        *out = LsqBytes::EMPTY;
        let key = handle(key, "key")?;
        let container = CipherContainer::from_bytes(input(container, container_len, "container")?)?;
        let order = key.material.order();
        if container.order != order {
            return Err(Failure::new(
                LsqStatus::OrderMismatch,
                format!(
                    "key order {order} does not match container order {}",
                    container.order
                ),
            ));
        }
        let spec = KeystreamSpec::new(
            key.seed,
            container.nonce,
            usize::from(container.block_len),
            order,
        )?;
        let symbols = CipherSession::from_spec(&*key.material, &spec, engine.into())?
            .decrypt_message(&container.payload)?;
        let crc = symbols_crc(order, &symbols);
        let mismatch = || {
            Failure::new(
                LsqStatus::ChecksumMismatch,
                format!(
                    "plaintext checksum mismatch: stored {:08x}, computed {crc:08x}",
                    container.plaintext_crc
                ),
            )
        };
        let bytes = symbols_to_bytes(order, &symbols).map_err(|_| mismatch())?;
        *out = LsqBytes::from_vec(bytes);
        if crc != container.plaintext_crc {
            return Err(mismatch());
        }
        Ok(())
    })
}

/// Releases a buffer returned by the library. Passing an empty buffer is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn lsq_bytes_free(bytes: LsqBytes) {
    if !bytes.data.is_null() {
        let slice = ptr::slice_from_raw_parts_mut(bytes.data, bytes.len);
        drop(Box::from_raw(slice));
    }
}

// Keeps the symbol type in the header in sync with the core crate.
const _: () = assert!(std::mem::size_of::<Symbol>() == std::mem::size_of::<u16>());
