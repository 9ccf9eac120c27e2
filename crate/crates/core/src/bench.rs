//! Throughput measurement for the cipher across block lengths.

use std::fmt::Write as _;
use std::time::Instant;

use thiserror::Error;

use crate::cipher::{CipherError, CipherSession, Engine, KeyMaterial};
use crate::keystream::{KeystreamSpec, SymbolSource, SEED_LEN};
use crate::packing::bytes_to_symbols;

pub const MIN_RUNS: usize = 5;
pub const CSV_HEADER: &str = "m,bytes,seconds,mb_per_s";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("benchmark sizes must be positive")]
    ZeroSize,
    #[error("at least one size and one block length are required")]
    Empty,
    #[error("need at least {MIN_RUNS} runs per measurement, got {0}")]
    TooFewRuns(usize),
    #[error(transparent)]
    Cipher(#[from] CipherError),
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub block_lens: Vec<usize>,
    pub runs: usize,
    pub engine: Engine,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![64 << 20],
            block_lens: vec![1, 4, 16],
            runs: MIN_RUNS,
            engine: Engine::Automaton,
        }
    }
}

/// Median timing of encrypting `bytes` plaintext bytes with block length `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub block_len: usize,
    pub bytes: usize,
    pub seconds: f64,
    pub mb_per_s: f64,
}

/// A pair of rows at the same size where the longer block ran faster.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub shorter: BenchRow,
    pub longer: BenchRow,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

/// Times full-message encryption (keystream generation included) for every
/// `(size, block length)` pair. Each run uses a fresh nonce.
pub fn run_bench(
    key: &KeyMaterial,
    seed: [u8; SEED_LEN],
    config: &BenchConfig,
) -> Result<Vec<BenchRow>, BenchError> {
    if config.sizes.is_empty() || config.block_lens.is_empty() {
        return Err(BenchError::Empty);
    }
    if config.sizes.contains(&0) {
        return Err(BenchError::ZeroSize);
    }
    if config.runs < MIN_RUNS {
        return Err(BenchError::TooFewRuns(config.runs));
    }
    let order = key.order();
    let mut rows = Vec::new();
    let mut nonce_counter: u64 = 0;
    for &bytes in &config.sizes {
        let plaintext = {
            let mut filler = KeystreamSpec::new(seed, [0xFF; 12], 1, 256)
                .map_err(CipherError::from)?
                .open();
            let mut raw = vec![0; bytes];
            filler.fill_symbols(&mut raw).map_err(CipherError::from)?;
            let raw: Vec<u8> = raw.into_iter().map(|s| s as u8).collect();
            bytes_to_symbols(order, &raw)
        };
        for &m in &config.block_lens {
            let mut times = Vec::with_capacity(config.runs);
            for _ in 0..config.runs {
                nonce_counter += 1;
                let mut nonce = [0u8; 12];
                nonce[4..].copy_from_slice(&nonce_counter.to_be_bytes());
                let spec = KeystreamSpec::new(seed, nonce, m, order).map_err(CipherError::from)?;
                let mut session = CipherSession::from_spec(key, &spec, config.engine)?;
                let start = Instant::now();
                let out = session.encrypt_message(&plaintext)?;
                times.push(start.elapsed().as_secs_f64());
                std::hint::black_box(out);
            }
            let seconds = median(times);
            rows.push(BenchRow {
                block_len: m,
                bytes,
                seconds,
                mb_per_s: bytes as f64 / seconds.max(f64::MIN_POSITIVE) / 1e6,
            });
        }
    }
    Ok(rows)
}

/// Every pair of rows at one size whose throughput is not monotone
/// nonincreasing in the block length.
pub fn inversions(rows: &[BenchRow]) -> Vec<Inversion> {
    let mut found = Vec::new();
    for a in rows {
        for b in rows {
            if a.bytes == b.bytes && a.block_len < b.block_len && a.mb_per_s < b.mb_per_s {
                found.push(Inversion {
                    shorter: a.clone(),
                    longer: b.clone(),
                });
            }
        }
    }
    found
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.3}",
            r.block_len, r.bytes, r.seconds, r.mb_per_s
        );
    }
    out
}

pub fn to_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:>4} {:>12} {:>12} {:>10}\n",
        "m", "bytes", "seconds", "MB/s"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>4} {:>12} {:>12.6} {:>10.2}",
            r.block_len, r.bytes, r.seconds, r.mb_per_s
        );
    }
    out
}
