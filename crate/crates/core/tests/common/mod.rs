//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the code under test except to build inputs; the
//! expected values come from modular arithmetic, direct loops, brute force
//! or a from-scratch CRC-32.

#![allow(dead_code)]

use lsq::{CipherContainer, KeyAutomaton, KeyMaterial, LatinSquare, Symbol};

/// Z_n Cayley table in key orientation: `table[x][a] = (a + x) mod n`.
pub fn zn(n: usize) -> LatinSquare {
    let entries = (0..n)
        .flat_map(|x| (0..n).map(move |a| ((a + x) % n) as Symbol))
        .collect();
    LatinSquare::from_flat(n, entries).unwrap()
}

pub fn zn_key(n: usize) -> KeyMaterial {
    KeyMaterial::new(KeyAutomaton::new(zn(n)))
}

pub fn mod_add(n: usize, a: Symbol, b: Symbol) -> Symbol {
    ((usize::from(a) + usize::from(b)) % n) as Symbol
}

pub fn mod_sub(n: usize, a: Symbol, b: Symbol) -> Symbol {
    ((usize::from(a) + n - usize::from(b)) % n) as Symbol
}

/// δ(a, x) read straight off a row-major key table.
pub fn delta(t: &LatinSquare, a: Symbol, x: Symbol) -> Symbol {
    t.as_flat()[usize::from(x) * t.order() + usize::from(a)]
}

/// The quasigroup product x*y = δ(y, x) by direct lookup.
pub fn star(t: &LatinSquare, x: Symbol, y: Symbol) -> Symbol {
    delta(t, y, x)
}

/// a\c by linear search over the row: the unique b with a*b = c.
pub fn ldiv_search(t: &LatinSquare, a: Symbol, c: Symbol) -> Symbol {
    let hits: Vec<Symbol> = (0..t.order() as Symbol)
        .filter(|&b| star(t, a, b) == c)
        .collect();
    assert_eq!(hits.len(), 1, "left division not unique for a={a} c={c}");
    hits[0]
}

/// Stepwise trajectory, without the start state.
pub fn trajectory(t: &LatinSquare, start: Symbol, w: &[Symbol]) -> Vec<Symbol> {
    let mut s = start;
    let mut out = Vec::with_capacity(w.len());
    for &x in w {
        s = delta(t, s, x);
        out.push(s);
    }
    out
}

/// Encrypt one symbol by the loop definition: run the key automaton from p
/// over the block and keep the last state.
pub fn encrypt_loop(t: &LatinSquare, block: &[Symbol], p: Symbol) -> Symbol {
    *trajectory(t, p, block).last().expect("nonempty block")
}

/// Decrypt one symbol by brute force: the unique p that encrypts to c.
pub fn decrypt_search(t: &LatinSquare, block: &[Symbol], c: Symbol) -> Symbol {
    let hits: Vec<Symbol> = (0..t.order() as Symbol)
        .filter(|&p| encrypt_loop(t, block, p) == c)
        .collect();
    assert_eq!(
        hits.len(),
        1,
        "encryption is not a bijection for block {block:?}"
    );
    hits[0]
}

/// Every Latin square of order `n` in row-major form, by backtracking.
/// Counts: 2, 12, 576, 161280 for n = 2..=5.
pub fn all_latin_squares(n: usize) -> Vec<Vec<Symbol>> {
    fn fill(n: usize, cell: usize, grid: &mut Vec<Symbol>, out: &mut Vec<Vec<Symbol>>) {
        if cell == n * n {
            out.push(grid.clone());
            return;
        }
        let (r, c) = (cell / n, cell % n);
        for v in 0..n as Symbol {
            let row_ok = (0..c).all(|j| grid[r * n + j] != v);
            let col_ok = (0..r).all(|i| grid[i * n + c] != v);
            if row_ok && col_ok {
                grid[cell] = v;
                fill(n, cell + 1, grid, out);
            }
        }
    }
    let mut out = Vec::new();
    fill(n, 0, &mut vec![0; n * n], &mut out);
    out
}

/// Bitwise CRC-32 (IEEE, reflected, init and xorout 0xFFFFFFFF).
pub fn crc32(bytes: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &b in bytes {
        crc ^= u32::from(b);
        for _ in 0..8 {
            crc = if crc & 1 != 0 {
                (crc >> 1) ^ 0xEDB8_8320
            } else {
                crc >> 1
            };
        }
    }
    !crc
}

/// Tiny deterministic generator for test inputs (SplitMix64).
pub struct Mix(pub u64);

impl Mix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn symbol(&mut self, n: usize) -> Symbol {
        self.below(n) as Symbol
    }

    pub fn word(&mut self, n: usize, len: usize) -> Vec<Symbol> {
        (0..len).map(|_| self.symbol(n)).collect()
    }

    pub fn bytes<const N: usize>(&mut self) -> [u8; N] {
        let mut out = [0u8; N];
        for b in &mut out {
            *b = self.next() as u8;
        }
        out
    }
}

pub fn push_symbols(out: &mut Vec<u8>, width: usize, symbols: &[Symbol]) {
    for &s in symbols {
        if width == 1 {
            out.push(u8::try_from(s).unwrap());
        } else {
            out.extend_from_slice(&s.to_be_bytes());
        }
    }
}

/// Key file bytes for the cyclic table of order `n`, field by field.
pub fn key_oracle(n: usize, seed: [u8; 32], width: usize) -> Vec<u8> {
    let mut out = b"LSQKEY\x00\x01".to_vec();
    out.extend_from_slice(&(n as u32).to_be_bytes());
    out.extend_from_slice(&seed);
    for x in 0..n {
        let row: Vec<Symbol> = (0..n).map(|a| ((a + x) % n) as Symbol).collect();
        push_symbols(&mut out, width, &row);
    }
    let crc = crc32(&out);
    out.extend_from_slice(&crc.to_be_bytes());
    out
}

pub struct ContainerCase {
    pub order: usize,
    pub width: usize,
    pub m: u8,
    pub nonce: [u8; 12],
    pub payload: Vec<Symbol>,
    pub plaintext: Vec<Symbol>,
}

impl ContainerCase {
    pub fn oracle(&self) -> Vec<u8> {
        let mut out = b"LSQCT\x00\x00\x01".to_vec();
        out.push(1);
        out.extend_from_slice(&(self.order as u32).to_be_bytes());
        out.push(self.m);
        out.extend_from_slice(&self.nonce);
        out.extend_from_slice(&(self.payload.len() as u64).to_be_bytes());
        push_symbols(&mut out, self.width, &self.payload);
        let mut pt = Vec::new();
        push_symbols(&mut pt, self.width, &self.plaintext);
        out.extend_from_slice(&crc32(&pt).to_be_bytes());
        out
    }

    pub fn container(&self) -> CipherContainer {
        CipherContainer {
            order: self.order,
            block_len: self.m,
            nonce: self.nonce,
            payload: self.payload.clone(),
            plaintext_crc: lsq::codec::symbols_crc(self.order, &self.plaintext),
        }
    }
}

pub fn narrow_container() -> ContainerCase {
    ContainerCase {
        order: 3,
        width: 1,
        m: 2,
        nonce: [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
        payload: vec![2, 0, 1, 1, 0],
        plaintext: vec![1, 2, 0, 0, 1],
    }
}

pub fn wide_container() -> ContainerCase {
    ContainerCase {
        order: 300,
        width: 2,
        m: 4,
        nonce: [0xFF; 12],
        payload: vec![0, 299, 256, 1],
        plaintext: vec![255, 298, 0, 17],
    }
}

pub fn seq_seed() -> [u8; 32] {
    std::array::from_fn(|i| i as u8)
}

pub fn golden(name: &str) -> Vec<u8> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
