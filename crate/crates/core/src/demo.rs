//! Seeded known-plaintext attack simulations.
//!
//! The leader simulation draws a random quasigroup and leader, encrypts
//! random messages, hands the pairs to the attacker and measures how much of
//! a held-out ciphertext it can read. The keystream simulation feeds the same
//! learning rule with transcripts of the keystream cipher instead.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::automaton::KeyAutomaton;
use crate::cipher::{encrypt, CipherError, Engine, KeyMaterial};
use crate::classical::{
    recovery_accuracy, AttackError, LeaderCipher, Recovered, RecoveredKnowledge,
};
use crate::keystream::KeystreamSpec;
use crate::latin::{generate_latin, LatinError, Symbol};
use crate::quasigroup::Quasigroup;

#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub order: usize,
    pub messages: usize,
    pub length: usize,
    pub seed: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct LeaderAttackReport {
    pub leader: Symbol,
    pub learned_triples: usize,
    pub leader_candidates: Vec<Symbol>,
    pub held_out: Vec<Symbol>,
    pub recovered: Vec<Recovered>,
    pub accuracy: f64,
}

impl LeaderAttackReport {
    pub fn unknown_positions(&self) -> usize {
        self.recovered
            .iter()
            .filter(|r| **r == Recovered::Unknown)
            .count()
    }
}

#[derive(Debug, Clone)]
pub enum KeystreamAttackOutcome {
    /// The learning rule hit a contradiction at pair `pair`.
    Inconsistent { pair: usize, error: AttackError },
    /// No contradiction surfaced (tiny transcripts can look consistent).
    Consistent {
        learned_triples: usize,
        accuracy: f64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error(transparent)]
    Latin(#[from] LatinError),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Attack(#[from] AttackError),
}

fn rng_for(seed: &[u8], label: &[u8]) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"lsq/attack-demo/v1/");
    h.update(label);
    h.update(seed);
    ChaCha20Rng::from_seed(h.finalize().into())
}

fn random_message(rng: &mut ChaCha20Rng, order: usize, len: usize) -> Vec<Symbol> {
    (0..len)
        .map(|_| rng.random_range(0..order) as Symbol)
        .collect()
}

pub fn run_leader_attack(config: &AttackConfig) -> Result<LeaderAttackReport, DemoError> {
    let mut rng = rng_for(&config.seed, b"leader");
    let mut table_seed = [0u8; 32];
    rng.fill_bytes(&mut table_seed);
    let q = Quasigroup::new(generate_latin(config.order, &table_seed)?);
    let leader = rng.random_range(0..config.order) as Symbol;
    let cipher = LeaderCipher::new(q, leader);

    let mut knowledge = RecoveredKnowledge::new(config.order);
    for _ in 0..config.messages {
        let p = random_message(&mut rng, config.order, config.length);
        let c = cipher.encrypt(&p);
        knowledge.learn(&p, &c)?;
    }
    let held_out = random_message(&mut rng, config.order, config.length);
    let recovered = knowledge.attack_decrypt(&cipher.encrypt(&held_out));
    let accuracy = recovery_accuracy(&recovered, &held_out);
    Ok(LeaderAttackReport {
        leader,
        learned_triples: knowledge.triple_count(),
        leader_candidates: knowledge.leader_candidates().iter().copied().collect(),
        held_out,
        recovered,
        accuracy,
    })
}

pub fn run_keystream_attack(config: &AttackConfig) -> Result<KeystreamAttackOutcome, DemoError> {
    let mut rng = rng_for(&config.seed, b"keystream");
    let mut table_seed = [0u8; 32];
    rng.fill_bytes(&mut table_seed);
    let key = KeyMaterial::new(KeyAutomaton::new(generate_latin(
        config.order,
        &table_seed,
    )?));
    let mut stream_seed = [0u8; 32];
    rng.fill_bytes(&mut stream_seed);

    let mut knowledge = RecoveredKnowledge::new(config.order);
    for pair in 0..config.messages {
        let mut nonce = [0u8; 12];
        nonce[4..].copy_from_slice(&(pair as u64).to_be_bytes());
        let spec =
            KeystreamSpec::new(stream_seed, nonce, 1, config.order).map_err(CipherError::from)?;
        let p = random_message(&mut rng, config.order, config.length);
        let c = encrypt(&key, &spec, Engine::Automaton, &p)?;
        if let Err(error) = knowledge.learn(&p, &c) {
            return Ok(KeystreamAttackOutcome::Inconsistent { pair, error });
        }
    }
    let spec =
        KeystreamSpec::new(stream_seed, [0xEE; 12], 1, config.order).map_err(CipherError::from)?;
    let held_out = random_message(&mut rng, config.order, config.length);
    let c = encrypt(&key, &spec, Engine::Automaton, &held_out)?;
    let accuracy = recovery_accuracy(&knowledge.attack_decrypt(&c), &held_out);
    Ok(KeystreamAttackOutcome::Consistent {
        learned_triples: knowledge.triple_count(),
        accuracy,
    })
}
