//! Latin squares: validation and seeded generation.
//!
//! A [`LatinSquare`] is stored row-major. The same table serves as the key
//! automaton's transition table (rows are inputs, columns are states) and as
//! the quasigroup's Cayley table (`x * y` sits at row `x`, column `y`).

mod walk;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// An element of the shared state/input alphabet, always in `[0, order)`.
pub type Symbol = u16;

/// Smallest supported alphabet. A one-symbol cipher is vacuous.
pub const MIN_ORDER: usize = 2;
/// Largest supported alphabet (two-byte symbols).
pub const MAX_ORDER: usize = 1 << 16;

/// Largest order for which Jacobson–Matthews walk steps are available. The
/// walk keeps an `order³` incidence cube in memory.
pub const MAX_WALK_ORDER: usize = walk::MAX_WALK_ORDER;

const GENERATOR_DOMAIN: &[u8] = b"lsq/latin-square/v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatinError {
    #[error("order {0} is too small (minimum {MIN_ORDER})")]
    OrderTooSmall(usize),
    #[error("order {0} is too large (maximum {MAX_ORDER})")]
    OrderTooLarge(usize),
    #[error("table is not square: row {row} has {found} entries, expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("symbol {symbol} at row {row}, column {col} is outside [0, {order})")]
    SymbolOutOfRange {
        row: usize,
        col: usize,
        symbol: Symbol,
        order: usize,
    },
    #[error("row {row} repeats symbol {symbol}")]
    RowViolation { row: usize, symbol: Symbol },
    #[error("column {col} repeats symbol {symbol}")]
    ColViolation { col: usize, symbol: Symbol },
    #[error("random-walk steps need order <= {MAX_WALK_ORDER}, got {0}")]
    WalkUnsupported(usize),
}

/// An `order × order` table in which every row and every column is a
/// permutation of `[0, order)`.
///
/// Values of this type are only built through [`validate_latin`],
/// [`LatinSquare::from_flat`] or the generators, so the Latin property always
/// holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    order: usize,
    entries: Vec<Symbol>,
}

fn check_order(order: usize) -> Result<(), LatinError> {
    if order < MIN_ORDER {
        return Err(LatinError::OrderTooSmall(order));
    }
    if order > MAX_ORDER {
        return Err(LatinError::OrderTooLarge(order));
    }
    Ok(())
}

/// Certifies a table of rows as a Latin square.
///
/// Every row is checked before any column; the error names the first line
/// that repeats a symbol and the symbol it repeats.
pub fn validate_latin<R: AsRef<[Symbol]>>(rows: &[R]) -> Result<LatinSquare, LatinError> {
    let order = rows.len();
    check_order(order)?;
    let mut entries = Vec::with_capacity(order * order);
    for (row, line) in rows.iter().enumerate() {
        let line = line.as_ref();
        if line.len() != order {
            return Err(LatinError::DimensionMismatch {
                row,
                expected: order,
                found: line.len(),
            });
        }
        entries.extend_from_slice(line);
    }
    LatinSquare::from_flat(order, entries)
}

impl LatinSquare {
    /// Builds a square from row-major entries, checking all `2 * order` lines.
    pub fn from_flat(order: usize, entries: Vec<Symbol>) -> Result<Self, LatinError> {
        check_order(order)?;
        if entries.len() != order * order {
            let full_rows = entries.len() / order;
            return Err(LatinError::DimensionMismatch {
                row: full_rows.min(order - 1),
                expected: order,
                found: entries.len() - full_rows.min(order - 1) * order,
            });
        }
        for (i, &s) in entries.iter().enumerate() {
            if usize::from(s) >= order {
                return Err(LatinError::SymbolOutOfRange {
                    row: i / order,
                    col: i % order,
                    symbol: s,
                    order,
                });
            }
        }

        let mut seen = vec![false; order];
        for row in 0..order {
            seen.fill(false);
            for &s in &entries[row * order..(row + 1) * order] {
                let slot = &mut seen[usize::from(s)];
                if *slot {
                    return Err(LatinError::RowViolation { row, symbol: s });
                }
                *slot = true;
            }
        }
        for col in 0..order {
            seen.fill(false);
            for row in 0..order {
                let s = entries[row * order + col];
                let slot = &mut seen[usize::from(s)];
                if *slot {
                    return Err(LatinError::ColViolation { col, symbol: s });
                }
                *slot = true;
            }
        }
        Ok(Self { order, entries })
    }

    /// The Cayley table of `Z_order`: `entry[row][col] = (row + col) mod order`.
    pub fn cyclic(order: usize) -> Result<Self, LatinError> {
        check_order(order)?;
        let entries = (0..order)
            .flat_map(|r| (0..order).map(move |c| ((r + c) % order) as Symbol))
            .collect();
        Ok(Self { order, entries })
    }

    pub(crate) fn from_flat_unchecked(order: usize, entries: Vec<Symbol>) -> Self {
        debug_assert_eq!(entries.len(), order * order);
        Self { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Symbol {
        self.entries[row * self.order + col]
    }

    pub fn row(&self, row: usize) -> &[Symbol] {
        &self.entries[row * self.order..(row + 1) * self.order]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Symbol]> {
        self.entries.chunks_exact(self.order)
    }

    /// Row-major entries.
    pub fn as_flat(&self) -> &[Symbol] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<Symbol>> {
        self.rows().map(<[Symbol]>::to_vec).collect()
    }

    pub fn transpose(&self) -> LatinSquare {
        let n = self.order();
        let mut out = vec![0; n * n];
        for r in 0..n {
            for c in 0..n {
                out[c * n + r] = self.get(r, c);
            }
        }
        LatinSquare::from_flat_unchecked(n, out)
    }

    /// Table whose row `r` is the inverse permutation of row `r` of `self`:
    /// `out[r][self[r][c]] = c`.
    pub fn row_inverse(&self) -> LatinSquare {
        let n = self.order;
        let mut out = vec![0; n * n];
        for r in 0..n {
            for c in 0..n {
                out[r * n + usize::from(self.entries[r * n + c])] = c as Symbol;
            }
        }
        // Row inverses of a Latin square are Latin: each column of the result
        // lists, for a fixed symbol, the column where it sits in every row.
        Self::from_flat_unchecked(n, out)
    }

    /// Table whose column `c` is the inverse permutation of column `c` of
    /// `self`: `out[self[r][c]][c] = r`.
    pub fn col_inverse(&self) -> LatinSquare {
        let n = self.order;
        let mut out = vec![0; n * n];
        for r in 0..n {
            for c in 0..n {
                out[usize::from(self.entries[r * n + c]) * n + c] = r as Symbol;
            }
        }
        Self::from_flat_unchecked(n, out)
    }
}

/// Seeded Latin-square generator.
///
/// The output is an isotope of the `Z_n` Cayley table under three
/// independent seeded permutations (rows, columns, symbols), optionally
/// followed by `walk_steps` Jacobson–Matthews moves. It is a pure function
/// of `(order, seed, walk_steps)`. It does not sample uniformly from all
/// Latin squares.
#[derive(Debug, Clone, Default)]
pub struct LatinGenerator {
    walk_steps: u64,
    identity_isotopy: bool,
}

impl LatinGenerator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn walk_steps(mut self, steps: u64) -> Self {
        self.walk_steps = steps;
        self
    }

    /// Skips the isotopy permutations so the output is the plain `Z_n` table
    /// (before any walk steps). Test hook.
    #[doc(hidden)]
    pub fn identity_isotopy(mut self, yes: bool) -> Self {
        self.identity_isotopy = yes;
        self
    }

    pub fn generate(&self, order: usize, seed: &[u8]) -> Result<LatinSquare, LatinError> {
        check_order(order)?;
        if self.walk_steps > 0 && order > MAX_WALK_ORDER {
            return Err(LatinError::WalkUnsupported(order));
        }
        let mut rng = seeded_rng(seed);

        let mut row_perm: Vec<usize> = (0..order).collect();
        let mut col_perm: Vec<usize> = (0..order).collect();
        let mut sym_perm: Vec<Symbol> = (0..order).map(|s| s as Symbol).collect();
        if !self.identity_isotopy {
            row_perm.shuffle(&mut rng);
            col_perm.shuffle(&mut rng);
            sym_perm.shuffle(&mut rng);
        }

        let mut entries = Vec::with_capacity(order * order);
        for &r in &row_perm {
            for &c in &col_perm {
                entries.push(sym_perm[(r + c) % order]);
            }
        }
        let square = LatinSquare::from_flat_unchecked(order, entries);
        if self.walk_steps == 0 {
            return Ok(square);
        }
        Ok(walk::jacobson_matthews(&square, self.walk_steps, &mut rng))
    }
}

/// `generate_latin(order, seed)` with no walk steps.
pub fn generate_latin(order: usize, seed: &[u8]) -> Result<LatinSquare, LatinError> {
    LatinGenerator::new().generate(order, seed)
}

fn seeded_rng(seed: &[u8]) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(GENERATOR_DOMAIN);
    hasher.update((seed.len() as u64).to_be_bytes());
    hasher.update(seed);
    let digest: [u8; 32] = hasher.finalize().into();
    ChaCha20Rng::from_seed(digest)
}
