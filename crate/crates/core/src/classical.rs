//! The classical leader-based quasigroup cipher and a known-plaintext attack
//! on it.
//!
//! Encryption chains ciphertext into the next step: `c_1 = ℓ * p_1`,
//! `c_i = c_{i-1} * p_i`. Every plaintext/ciphertext pair therefore reveals
//! Cayley-table entries `c_{i-1} * p_i = c_i` directly, and once enough of
//! the table is known, fresh ciphertexts decrypt without the key.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::latin::Symbol;
use crate::quasigroup::Quasigroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("observed pairs contradict a single quasigroup and leader: {0}")]
    InconsistentPairs(String),
    #[error("pair {index}: plaintext has {plaintext} symbols, ciphertext has {ciphertext}")]
    LengthMismatch {
        index: usize,
        plaintext: usize,
        ciphertext: usize,
    },
    #[error("pair {index} holds symbol {symbol} outside [0, {order})")]
    SymbolOutOfRange {
        index: usize,
        symbol: Symbol,
        order: usize,
    },
}

#[derive(Debug, Clone)]
pub struct LeaderCipher {
    q: Quasigroup,
    q_li: Quasigroup,
    leader: Symbol,
}

impl LeaderCipher {
    /// # Panics
    /// If `leader` is not a symbol of `q`.
    pub fn new(q: Quasigroup, leader: Symbol) -> Self {
        assert!(usize::from(leader) < q.order(), "leader outside alphabet");
        let q_li = q.left_inverse();
        Self { q, q_li, leader }
    }

    pub fn leader(&self) -> Symbol {
        self.leader
    }

    pub fn quasigroup(&self) -> &Quasigroup {
        &self.q
    }

    pub fn encrypt(&self, plaintext: &[Symbol]) -> Vec<Symbol> {
        let mut prev = self.leader;
        plaintext
            .iter()
            .map(|&p| {
                prev = self.q.mul(prev, p);
                prev
            })
            .collect()
    }

    pub fn decrypt(&self, ciphertext: &[Symbol]) -> Vec<Symbol> {
        let mut prev = self.leader;
        ciphertext
            .iter()
            .map(|&c| {
                let p = self.q_li.mul(prev, c);
                prev = c;
                p
            })
            .collect()
    }
}

/// One position of an attack decryption.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recovered {
    Known(Symbol),
    /// The needed table entry was never observed.
    Unknown,
}

impl Recovered {
    pub fn symbol(self) -> Option<Symbol> {
        match self {
            Recovered::Known(s) => Some(s),
            Recovered::Unknown => None,
        }
    }
}

impl fmt::Display for Recovered {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recovered::Known(s) => write!(f, "{s}"),
            Recovered::Unknown => f.write_str("?"),
        }
    }
}

/// What an attacker knows after watching plaintext/ciphertext pairs.
///
/// `triples` holds only directly observed table entries `x * y = z`, one per
/// distinct `(x, y)`. First symbols are kept apart in `leader_steps`
/// (`ℓ * p_1 = c_1` with `ℓ` unknown) and used to narrow the leader.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredKnowledge {
    order: usize,
    triples: BTreeMap<(Symbol, Symbol), Symbol>,
    // (x, z) -> y
    by_result: BTreeMap<(Symbol, Symbol), Symbol>,
    // (y, z) -> x
    by_right: BTreeMap<(Symbol, Symbol), Symbol>,
    // p_1 -> c_1
    leader_steps: BTreeMap<Symbol, Symbol>,
    leader_candidates: BTreeSet<Symbol>,
}

impl RecoveredKnowledge {
    /// Knowledge before any observation: no table entries, every symbol a
    /// possible leader.
    pub fn new(order: usize) -> Self {
        Self {
            order,
            triples: BTreeMap::new(),
            by_result: BTreeMap::new(),
            by_right: BTreeMap::new(),
            leader_steps: BTreeMap::new(),
            leader_candidates: (0..order).map(|s| s as Symbol).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Observed `(x, y, z)` with `x * y = z`.
    pub fn triples(&self) -> impl Iterator<Item = (Symbol, Symbol, Symbol)> + '_ {
        self.triples.iter().map(|(&(x, y), &z)| (x, y, z))
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn leader_candidates(&self) -> &BTreeSet<Symbol> {
        &self.leader_candidates
    }

    pub fn leader(&self) -> Option<Symbol> {
        if self.leader_candidates.len() == 1 {
            self.leader_candidates.first().copied()
        } else {
            None
        }
    }

    /// Records one known pair. On error the knowledge may hold part of the
    /// pair and should be discarded.
    pub fn learn(
        &mut self,
        plaintext: &[Symbol],
        ciphertext: &[Symbol],
    ) -> Result<(), AttackError> {
        self.learn_indexed(0, plaintext, ciphertext)
    }

    fn learn_indexed(
        &mut self,
        index: usize,
        plaintext: &[Symbol],
        ciphertext: &[Symbol],
    ) -> Result<(), AttackError> {
        if plaintext.len() != ciphertext.len() {
            return Err(AttackError::LengthMismatch {
                index,
                plaintext: plaintext.len(),
                ciphertext: ciphertext.len(),
            });
        }
        if let Some(&symbol) = plaintext
            .iter()
            .chain(ciphertext)
            .find(|&&s| usize::from(s) >= self.order)
        {
            return Err(AttackError::SymbolOutOfRange {
                index,
                symbol,
                order: self.order,
            });
        }
        let (Some(&p1), Some(&c1)) = (plaintext.first(), ciphertext.first()) else {
            return Ok(());
        };
        self.add_leader_step(p1, c1)?;
        for i in 1..plaintext.len() {
            self.add_triple(ciphertext[i - 1], plaintext[i], ciphertext[i])?;
        }
        self.prune_leaders()
    }

    fn add_triple(&mut self, x: Symbol, y: Symbol, z: Symbol) -> Result<(), AttackError> {
        if let Some(&old) = self.triples.get(&(x, y)) {
            if old != z {
                return Err(AttackError::InconsistentPairs(format!(
                    "{x} * {y} observed as both {old} and {z}"
                )));
            }
            return Ok(());
        }
        if let Some(&other) = self.by_result.get(&(x, z)) {
            return Err(AttackError::InconsistentPairs(format!(
                "{x} * {other} = {x} * {y} = {z} breaks left cancellation"
            )));
        }
        if let Some(&other) = self.by_right.get(&(y, z)) {
            return Err(AttackError::InconsistentPairs(format!(
                "{other} * {y} = {x} * {y} = {z} breaks right cancellation"
            )));
        }
        self.triples.insert((x, y), z);
        self.by_result.insert((x, z), y);
        self.by_right.insert((y, z), x);
        Ok(())
    }

    fn add_leader_step(&mut self, p1: Symbol, c1: Symbol) -> Result<(), AttackError> {
        if let Some(&old) = self.leader_steps.get(&p1) {
            if old != c1 {
                return Err(AttackError::InconsistentPairs(format!(
                    "leader * {p1} observed as both {old} and {c1}"
                )));
            }
            return Ok(());
        }
        if let Some((&other, _)) = self.leader_steps.iter().find(|(_, &c)| c == c1) {
            return Err(AttackError::InconsistentPairs(format!(
                "leader * {other} = leader * {p1} = {c1} breaks left cancellation"
            )));
        }
        self.leader_steps.insert(p1, c1);
        Ok(())
    }

    /// Drops every leader candidate `ℓ` for which some observed first step
    /// `ℓ * p_1 = c_1` contradicts a known table entry.
    fn prune_leaders(&mut self) -> Result<(), AttackError> {
        let steps = &self.leader_steps;
        let (triples, by_result, by_right) = (&self.triples, &self.by_result, &self.by_right);
        self.leader_candidates.retain(|&l| {
            steps.iter().all(|(&p1, &c1)| {
                triples.get(&(l, p1)).is_none_or(|&z| z == c1)
                    && by_result.get(&(l, c1)).is_none_or(|&y| y == p1)
                    && by_right.get(&(p1, c1)).is_none_or(|&x| x == l)
            })
        });
        if self.leader_candidates.is_empty() {
            return Err(AttackError::InconsistentPairs(
                "no leader is consistent with the observed first symbols".into(),
            ));
        }
        Ok(())
    }

    /// Decrypts what the knowledge allows. Position `i > 1` decodes iff the
    /// entry `c_{i-1} * y = c_i` was observed; position 1 needs the leader to
    /// be pinned down and its entry known.
    pub fn attack_decrypt(&self, ciphertext: &[Symbol]) -> Vec<Recovered> {
        let mut prev = self.leader();
        ciphertext
            .iter()
            .map(|&c| {
                let found = prev.and_then(|x| self.lookup_left_div(x, c));
                prev = Some(c);
                found.map_or(Recovered::Unknown, Recovered::Known)
            })
            .collect()
    }

    fn lookup_left_div(&self, x: Symbol, z: Symbol) -> Option<Symbol> {
        self.by_result.get(&(x, z)).copied().or_else(|| {
            // First-step observations are entries of the leader's row.
            (Some(x) == self.leader())
                .then(|| {
                    self.leader_steps
                        .iter()
                        .find(|(_, &c)| c == z)
                        .map(|(&p, _)| p)
                })
                .flatten()
        })
    }
}

/// Learns from every `(plaintext, ciphertext)` pair, in order.
pub fn known_plaintext_learn<P, C>(
    order: usize,
    pairs: &[(P, C)],
) -> Result<RecoveredKnowledge, AttackError>
where
    P: AsRef<[Symbol]>,
    C: AsRef<[Symbol]>,
{
    let mut knowledge = RecoveredKnowledge::new(order);
    for (index, (p, c)) in pairs.iter().enumerate() {
        knowledge.learn_indexed(index, p.as_ref(), c.as_ref())?;
    }
    Ok(knowledge)
}

/// Fraction of positions recovered correctly; unknown positions count as
/// misses.
pub fn recovery_accuracy(recovered: &[Recovered], truth: &[Symbol]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = recovered
        .iter()
        .zip(truth)
        .filter(|(r, &t)| r.symbol() == Some(t))
        .count();
    hits as f64 / truth.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::{generate_latin, LatinSquare};

    fn z3_leader2() -> LeaderCipher {
        LeaderCipher::new(Quasigroup::new(LatinSquare::cyclic(3).unwrap()), 2)
    }

    #[test]
    fn z3_hand_example() {
        let lc = z3_leader2();
        assert_eq!(lc.encrypt(&[1, 0, 2]), vec![0, 0, 2]);
        assert_eq!(lc.decrypt(&[0, 0, 2]), vec![1, 0, 2]);
        assert!(lc.encrypt(&[]).is_empty());
        assert!(lc.decrypt(&[]).is_empty());
    }

    #[test]
    fn single_pair_learns_chained_entries() {
        let k = known_plaintext_learn(3, &[(vec![1u16, 0, 2], vec![0u16, 0, 2])]).unwrap();
        let triples: Vec<_> = k.triples().collect();
        assert_eq!(triples, vec![(0, 0, 0), (0, 2, 2)]);
        // 0 * 0 = 0 means 0 * 1 != 0, so the leader cannot be 0.
        assert!(!k.leader_candidates().contains(&0));
        assert!(k.leader_candidates().contains(&2));
    }

    #[test]
    fn zero_pairs_know_nothing() {
        let pairs: [(Vec<Symbol>, Vec<Symbol>); 0] = [];
        let k = known_plaintext_learn(5, &pairs).unwrap();
        assert_eq!(k.triple_count(), 0);
        assert_eq!(k.leader_candidates().len(), 5);
        assert!(k
            .attack_decrypt(&[1, 2, 3])
            .iter()
            .all(|r| *r == Recovered::Unknown));
    }

    #[test]
    fn leader_gets_pinned_by_right_cancellation() {
        // Leader steps `ℓ * 0 = 0` plus the entry `0 * 0 = 0` force ℓ = 0.
        let k = known_plaintext_learn(3, &[(vec![0u16, 0], vec![0u16, 0])]).unwrap();
        assert_eq!(k.leader(), Some(0));
    }

    #[test]
    fn contradictions_are_reported() {
        let err = known_plaintext_learn(
            3,
            &[
                (vec![0u16, 1], vec![0u16, 2]),
                (vec![0u16, 1], vec![0u16, 1]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, AttackError::InconsistentPairs(_)));

        let err = known_plaintext_learn(3, &[(vec![0u16], vec![1u16]), (vec![0u16], vec![2u16])])
            .unwrap_err();
        assert!(matches!(err, AttackError::InconsistentPairs(_)));

        let err = known_plaintext_learn(3, &[(vec![0u16, 1], vec![0u16])]).unwrap_err();
        assert!(matches!(err, AttackError::LengthMismatch { index: 0, .. }));

        let err = known_plaintext_learn(3, &[(vec![0u16, 1], vec![0u16, 3])]).unwrap_err();
        assert!(matches!(
            err,
            AttackError::SymbolOutOfRange { symbol: 3, .. }
        ));
    }

    #[test]
    fn exhaustive_pairs_give_full_decryption() {
        let lc = z3_leader2();
        let mut pairs = Vec::new();
        for a in 0..3u16 {
            for b in 0..3u16 {
                for c in 0..3u16 {
                    let p = vec![a, b, c];
                    let ct = lc.encrypt(&p);
                    pairs.push((p, ct));
                }
            }
        }
        let k = known_plaintext_learn(3, &pairs).unwrap();
        assert_eq!(k.triple_count(), 9);
        assert_eq!(k.leader(), Some(2));
        let msg = [2u16, 2, 0, 1, 1, 0, 2];
        let ct = lc.encrypt(&msg);
        let got: Vec<_> = k.attack_decrypt(&ct).iter().map(|r| r.symbol()).collect();
        let want: Vec<_> = lc.decrypt(&ct).into_iter().map(Some).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn partial_row_decodes_only_after_that_symbol() {
        // Leader 0 over Z_3: messages (0, y) reveal row 0 only.
        let lc = LeaderCipher::new(Quasigroup::new(LatinSquare::cyclic(3).unwrap()), 0);
        let pairs: Vec<_> = (0..3u16)
            .map(|y| {
                let p = vec![0, y];
                let c = lc.encrypt(&p);
                (p, c)
            })
            .collect();
        let k = known_plaintext_learn(3, &pairs).unwrap();
        assert!(k.triples().all(|(x, _, _)| x == 0));
        assert_eq!(k.leader(), Some(0));

        let msg = [1u16, 2, 2, 0, 1, 1, 2, 0, 0, 2];
        let ct = lc.encrypt(&msg);
        let rec = k.attack_decrypt(&ct);
        for (i, r) in rec.iter().enumerate() {
            let prev = if i == 0 { 0 } else { ct[i - 1] };
            if prev == 0 {
                assert_eq!(*r, Recovered::Known(msg[i]), "position {i}");
            } else {
                assert_eq!(*r, Recovered::Unknown, "position {i}");
            }
        }
    }

    #[test]
    fn roundtrip_random_quasigroups() {
        let q = Quasigroup::new(generate_latin(16, b"lead").unwrap());
        for leader in 0..16 {
            let lc = LeaderCipher::new(q.clone(), leader);
            let msg: Vec<Symbol> = (0..50u16).map(|i| (i * 5 + leader) % 16).collect();
            assert_eq!(lc.decrypt(&lc.encrypt(&msg)), msg);
        }
    }

    #[test]
    fn accuracy_counts_unknowns_as_misses() {
        let rec = [Recovered::Known(1), Recovered::Unknown, Recovered::Known(0)];
        assert!((recovery_accuracy(&rec, &[1, 2, 3]) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(recovery_accuracy(&[], &[]), 0.0);
        assert_eq!(Recovered::Unknown.to_string(), "?");
    }
}
