//! Key automata: finite automata without outputs whose state and input sets
//! coincide and whose transition table is a Latin square.
//!
//! The table keeps the conventional orientation: row = input, column = state,
//! so `δ(a, x) = table[x][a]`. Under `x * y = δ(y, x)` the very same table is
//! the Cayley table of the corresponding quasigroup.

use thiserror::Error;

use crate::latin::{LatinSquare, Symbol};
use crate::quasigroup::Quasigroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AutomatonError {
    /// The last state of an empty run is undefined.
    #[error("input word is empty")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyAutomaton {
    table: LatinSquare,
}

/// States visited while reading a word: `states[i] = δ(states[i-1], inputs[i])`
/// with `states[-1] = start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub start: Symbol,
    pub inputs: Vec<Symbol>,
    pub states: Vec<Symbol>,
}

impl Trajectory {
    /// The state reached after the whole word, `None` for the empty word.
    pub fn last(&self) -> Option<Symbol> {
        self.states.last().copied()
    }
}

impl KeyAutomaton {
    /// Wraps a Latin square given in row = input, column = state orientation.
    pub fn new(table: LatinSquare) -> Self {
        Self { table }
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn table(&self) -> &LatinSquare {
        &self.table
    }

    #[inline]
    pub fn step(&self, state: Symbol, input: Symbol) -> Symbol {
        self.table.get(usize::from(input), usize::from(state))
    }

    /// Full trajectory from `start` over `word`. The empty word gives an
    /// empty trajectory.
    pub fn run(&self, start: Symbol, word: &[Symbol]) -> Trajectory {
        let mut state = start;
        let states = word
            .iter()
            .map(|&x| {
                state = self.step(state, x);
                state
            })
            .collect();
        Trajectory {
            start,
            inputs: word.to_vec(),
            states,
        }
    }

    /// Last state of [`run`](Self::run) without materializing the trajectory.
    #[inline]
    pub fn last_state(&self, start: Symbol, word: &[Symbol]) -> Result<Symbol, AutomatonError> {
        if word.is_empty() {
            return Err(AutomatonError::EmptyInput);
        }
        Ok(word.iter().fold(start, |state, &x| self.step(state, x)))
    }

    /// The unique automaton `B` with `δ_B(δ(a, x), x) = a`.
    ///
    /// Each input row of the table is a permutation of the states; `B`'s row
    /// for that input is its inverse permutation.
    pub fn invert(&self) -> KeyAutomaton {
        KeyAutomaton::new(self.table.row_inverse())
    }

    /// Last state reached by this automaton from `end` over the mirror image
    /// of `word`. Called on the inverse automaton this walks a trajectory of
    /// the original automaton backwards.
    pub fn reverse_run(&self, end: Symbol, word: &[Symbol]) -> Result<Symbol, AutomatonError> {
        if word.is_empty() {
            return Err(AutomatonError::EmptyInput);
        }
        Ok(word.iter().rev().fold(end, |state, &x| self.step(state, x)))
    }

    /// The quasigroup with `x * y = δ(y, x)`.
    pub fn quasigroup(&self) -> Quasigroup {
        Quasigroup::new(self.table.clone())
    }

    /// Checks the key-automaton axioms directly on the transition function:
    /// distinct states go to distinct states under one input, and distinct
    /// inputs move one state to distinct states.
    pub fn satisfies_key_axioms(&self) -> bool {
        let n = self.order();
        let mut seen = vec![false; n];
        for x in 0..n {
            seen.fill(false);
            for a in 0..n {
                let b = usize::from(self.step(a as Symbol, x as Symbol));
                if std::mem::replace(&mut seen[b], true) {
                    return false;
                }
            }
        }
        for a in 0..n {
            seen.fill(false);
            for x in 0..n {
                let b = usize::from(self.step(a as Symbol, x as Symbol));
                if std::mem::replace(&mut seen[b], true) {
                    return false;
                }
            }
        }
        true
    }
}
