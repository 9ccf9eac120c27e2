//! Finite quasigroups backed by a Latin-square Cayley table.

use thiserror::Error;

use crate::latin::{LatinSquare, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum QuasigroupError {
    #[error("keystream block is empty")]
    EmptyKeyBlock,
}

/// A quasigroup `(A, *)` with `x * y = cayley[x][y]`.
///
/// Left and right division are answered from per-row and per-column inverse
/// permutation tables computed once at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quasigroup {
    cayley: LatinSquare,
    // ldiv[a][c] = b with a * b = c
    ldiv: LatinSquare,
    // rdiv[a][c] = b with b * a = c (indexed by the right operand first)
    rdiv: LatinSquare,
}

impl Quasigroup {
    pub fn new(cayley: LatinSquare) -> Self {
        let ldiv = cayley.row_inverse();
        let rdiv = cayley.col_inverse().transpose();
        Self { cayley, ldiv, rdiv }
    }

    pub fn order(&self) -> usize {
        self.cayley.order()
    }

    pub fn cayley(&self) -> &LatinSquare {
        &self.cayley
    }

    #[inline]
    pub fn mul(&self, x: Symbol, y: Symbol) -> Symbol {
        self.cayley.get(usize::from(x), usize::from(y))
    }

    /// `a \ c`: the unique `b` with `a * b = c`.
    #[inline]
    pub fn left_div(&self, a: Symbol, c: Symbol) -> Symbol {
        self.ldiv.get(usize::from(a), usize::from(c))
    }

    /// `c / a`: the unique `b` with `b * a = c`.
    #[inline]
    pub fn right_div(&self, c: Symbol, a: Symbol) -> Symbol {
        self.rdiv.get(usize::from(a), usize::from(c))
    }

    /// The left-inverse quasigroup `(A, \)`.
    pub fn left_inverse(&self) -> Quasigroup {
        Quasigroup::new(self.ldiv.clone())
    }

    /// The right-inverse quasigroup `(A, /)`, with `c / a` at row `c`, column `a`.
    pub fn right_inverse(&self) -> Quasigroup {
        Quasigroup::new(self.rdiv.transpose())
    }

    /// `k_m * (… * (k_2 * (k_1 * p)) …)` for the block `k_1 … k_m`.
    pub fn fold_mul(&self, block: &[Symbol], p: Symbol) -> Result<Symbol, QuasigroupError> {
        if block.is_empty() {
            return Err(QuasigroupError::EmptyKeyBlock);
        }
        Ok(block.iter().fold(p, |acc, &k| self.mul(k, acc)))
    }

    /// `k_1 \ (… \ (k_{m-1} \ (k_m \ c)) …)`, the inverse of [`fold_mul`] for
    /// the same block.
    ///
    /// [`fold_mul`]: Quasigroup::fold_mul
    pub fn fold_left_div(&self, block: &[Symbol], c: Symbol) -> Result<Symbol, QuasigroupError> {
        if block.is_empty() {
            return Err(QuasigroupError::EmptyKeyBlock);
        }
        Ok(block.iter().rev().fold(c, |acc, &k| self.left_div(k, acc)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::generate_latin;

    fn z(n: usize) -> Quasigroup {
        Quasigroup::new(LatinSquare::cyclic(n).unwrap())
    }

    // Independent oracle: arithmetic mod n.
    fn add_mod(n: u16, a: u16, b: u16) -> u16 {
        (a + b) % n
    }
    fn sub_mod(n: u16, a: u16, b: u16) -> u16 {
        (a + n - b) % n
    }

    #[test]
    fn z3_worked_values() {
        let q = z(3);
        assert_eq!(q.mul(2, 1), add_mod(3, 2, 1));
        assert_eq!(q.mul(2, 1), 0);
        assert_eq!(q.left_div(2, 0), sub_mod(3, 0, 2));
        assert_eq!(q.left_div(2, 0), 1);
        assert_eq!(q.right_div(0, 2), sub_mod(3, 0, 2));
        assert_eq!(q.right_div(0, 2), 1);
        for y in 0..3 {
            assert_eq!(q.mul(0, y), y);
        }
    }

    #[test]
    fn z3_left_inverse_table() {
        let li = z(3).left_inverse();
        for a in 0..3 {
            for c in 0..3 {
                assert_eq!(li.mul(a, c), sub_mod(3, c, a));
            }
        }
    }

    #[test]
    fn z2_is_its_own_left_inverse() {
        assert_eq!(z(2).left_inverse().cayley(), z(2).cayley());
    }

    #[test]
    fn folds_match_hand_evaluation() {
        let q = z(3);
        // 2*1 = 0, 0*0 = 0, 1*0 = 1
        assert_eq!(q.fold_mul(&[2, 0, 1], 1), Ok(1));
        // 1\1 = 0, 0\0 = 0, 2\0 = 1
        assert_eq!(q.fold_left_div(&[2, 0, 1], 1), Ok(1));
        assert_eq!(q.fold_mul(&[], 1), Err(QuasigroupError::EmptyKeyBlock));
        assert_eq!(q.fold_left_div(&[], 1), Err(QuasigroupError::EmptyKeyBlock));
    }

    #[test]
    fn single_factor_fold_is_mul() {
        let q = Quasigroup::new(generate_latin(7, b"f").unwrap());
        for k in 0..7 {
            for p in 0..7 {
                assert_eq!(q.fold_mul(&[k], p).unwrap(), q.mul(k, p));
            }
        }
    }

    #[test]
    fn rows_of_mul_are_permutations() {
        let q = Quasigroup::new(generate_latin(9, b"rows").unwrap());
        for x in 0..9 {
            let mut row: Vec<_> = (0..9).map(|y| q.mul(x, y)).collect();
            row.sort_unstable();
            assert_eq!(row, (0..9).collect::<Vec<_>>());
        }
    }

    #[test]
    fn right_inverse_computes_right_division() {
        let q = Quasigroup::new(generate_latin(6, b"ri").unwrap());
        let ri = q.right_inverse();
        for c in 0..6 {
            for a in 0..6 {
                assert_eq!(ri.mul(c, a), q.right_div(c, a));
                assert_eq!(q.mul(q.right_div(c, a), a), c);
            }
        }
    }
}
