//! `lsq`: command-line front end for the Latin-square stream cipher.
//!
//! Exit codes:
//!
//! | code | meaning                                           |
//! |------|---------------------------------------------------|
//! | 0    | success                                           |
//! | 1    | internal failure                                  |
//! | 2    | usage error (bad flags or values)                 |
//! | 3    | I/O failure                                       |
//! | 4    | key file rejected, or key does not fit the input  |
//! | 5    | container rejected                                |
//! | 6    | decryption done but the diagnostic checksum failed |

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use lsq::bench::{self, BenchConfig};
use lsq::codec::{symbols_crc, CipherContainer, CodecError, KeyFile, CONTAINER_MAGIC, KEY_MAGIC};
use lsq::demo::{self, AttackConfig, KeystreamAttackOutcome};
use lsq::keystream::{KeystreamSpec, NONCE_LEN, SEED_LEN};
use lsq::packing::{bytes_to_symbols, symbols_to_bytes};
use lsq::{CipherSession, Engine, KeyAutomaton, KeyMaterial, LatinGenerator};

const FORCE_NONCE_ENV: &str = "LSQ_FORCE_NONCE";

#[derive(Parser)]
#[command(
    name = "lsq",
    version,
    about = "Latin-square key automaton stream cipher"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Fa,
    Qg,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Fa => Engine::Automaton,
            EngineArg::Qg => Engine::Quasigroup,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackTarget {
    /// Classical leader cipher.
    Leader,
    /// Transcripts of the keystream cipher.
    Keystream,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key file.
    Keygen {
        #[arg(short = 'n', long = "order", value_parser = clap::value_parser!(u32).range(2..=65536))]
        order: u32,
        #[arg(long)]
        out: PathBuf,
        /// Jacobson–Matthews moves applied after the isotopy.
        #[arg(long, default_value_t = 0)]
        walk_steps: u64,
        /// Hex seed for both the table and the keystream seed.
        #[arg(long, conflicts_with = "table_seed", value_parser = parse_hex)]
        seed: Option<HexBytes>,
        /// Hex seed for the table only; the keystream seed comes from the OS.
        #[arg(long, value_parser = parse_hex)]
        table_seed: Option<HexBytes>,
    },
    /// Encrypt a file into a container.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(short = 'm', long = "block", default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..))]
        block: u8,
        #[arg(long, value_enum, default_value_t = EngineArg::Fa)]
        engine: EngineArg,
    },
    /// Decrypt a container.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Fa)]
        engine: EngineArg,
    },
    /// Describe a key file or container.
    Inspect { path: PathBuf },
    /// Measure encryption throughput per block length.
    Bench {
        #[arg(long)]
        key: PathBuf,
        /// Plaintext sizes in bytes; K/M/G suffixes are binary multiples.
        #[arg(long, value_delimiter = ',', default_value = "64M", value_parser = parse_size)]
        sizes: Vec<usize>,
        #[arg(short = 'm', long = "block", value_delimiter = ',', default_value = "1,4,16",
              value_parser = clap::value_parser!(u8).range(1..))]
        blocks: Vec<u8>,
        #[arg(long, default_value_t = bench::MIN_RUNS)]
        runs: usize,
        #[arg(long, value_enum, default_value_t = EngineArg::Fa)]
        engine: EngineArg,
        /// Emit CSV instead of a text table.
        #[arg(long)]
        csv: bool,
    },
    /// Known-plaintext attack on the leader cipher, or on keystream transcripts.
    AttackDemo {
        #[arg(short = 'n', long = "order", default_value_t = 16, value_parser = clap::value_parser!(u32).range(2..=65536))]
        order: u32,
        #[arg(long, default_value_t = 200)]
        messages: usize,
        #[arg(long, default_value_t = 64)]
        length: usize,
        #[arg(long, value_parser = parse_hex)]
        seed: Option<HexBytes>,
        #[arg(long, value_enum, default_value_t = AttackTarget::Leader)]
        against: AttackTarget,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Key(PathBuf, String),
    Container(PathBuf, String),
    Checksum { stored: u32, computed: Option<u32> },
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(..) => 3,
            Failure::Key(..) => 4,
            Failure::Container(..) => 5,
            Failure::Checksum { .. } => 6,
        }
    }

    fn report(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Io(p, e) => format!("{}: {e}", p.display()),
            Failure::Key(p, m) => format!("key {}: {m}", p.display()),
            Failure::Container(p, m) => format!("container {}: {m}", p.display()),
            Failure::Checksum { stored, computed } => match computed {
                Some(c) => format!(
                    "diagnostic checksum mismatch (stored {stored:08x}, decrypted {c:08x}); wrong key?"
                ),
                None => format!(
                    "diagnostic checksum mismatch (stored {stored:08x}); decrypted symbols are not bytes; wrong key?"
                ),
            },
            Failure::Internal(m) => format!("internal error: {m}"),
        }
    }
}

#[derive(Debug, Clone)]
struct HexBytes(Vec<u8>);

fn parse_hex(s: &str) -> Result<HexBytes, String> {
    hex::decode(s)
        .map(HexBytes)
        .map_err(|e| format!("invalid hex: {e}"))
}

fn parse_size(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let (digits, shift) = match s.chars().last() {
        Some('K' | 'k') => (&s[..s.len() - 1], 10),
        Some('M' | 'm') => (&s[..s.len() - 1], 20),
        Some('G' | 'g') => (&s[..s.len() - 1], 30),
        _ => (s, 0),
    };
    let n: usize = digits
        .parse()
        .map_err(|e| format!("invalid size {s:?}: {e}"))?;
    if n == 0 {
        return Err("size must be positive".into());
    }
    n.checked_mul(1 << shift)
        .ok_or_else(|| format!("size {s:?} overflows"))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn key_failure(path: &Path, err: CodecError) -> Failure {
    match err {
        CodecError::Io(e) => Failure::Io(path.to_owned(), e),
        other => Failure::Key(path.to_owned(), format!("{}: {other}", other.name())),
    }
}

fn load_key(path: &Path) -> Result<KeyFile, Failure> {
    KeyFile::from_bytes(&read(path)?).map_err(|e| key_failure(path, e))
}

fn os_random<const N: usize>() -> Result<[u8; N], Failure> {
    let mut buf = [0u8; N];
    getrandom::fill(&mut buf)
        .map_err(|e| Failure::Internal(format!("OS entropy unavailable: {e}")))?;
    Ok(buf)
}

fn derived_stream_seed(seed: &[u8]) -> [u8; SEED_LEN] {
    let mut h = Sha256::new();
    h.update(b"lsq/keystream-seed/v1");
    h.update(seed);
    h.finalize().into()
}

fn message_nonce() -> Result<[u8; NONCE_LEN], Failure> {
    match std::env::var(FORCE_NONCE_ENV) {
        Ok(v) => {
            let bytes = hex::decode(v.trim())
                .map_err(|e| Failure::Usage(format!("{FORCE_NONCE_ENV}: invalid hex: {e}")))?;
            bytes.try_into().map_err(|b: Vec<u8>| {
                Failure::Usage(format!(
                    "{FORCE_NONCE_ENV}: expected {NONCE_LEN} bytes, got {}",
                    b.len()
                ))
            })
        }
        Err(_) => os_random(),
    }
}

fn cmd_keygen(
    order: u32,
    out: &Path,
    walk_steps: u64,
    seed: Option<HexBytes>,
    table_seed: Option<HexBytes>,
) -> Result<(), Failure> {
    let order = order as usize;
    if walk_steps > 0 && order > lsq::latin::MAX_WALK_ORDER {
        return Err(Failure::Usage(format!(
            "--walk-steps needs order <= {}",
            lsq::latin::MAX_WALK_ORDER
        )));
    }
    let (table_seed, stream_seed) = match (seed, table_seed) {
        (Some(HexBytes(s)), _) => {
            let stream = derived_stream_seed(&s);
            (s, stream)
        }
        (None, Some(HexBytes(t))) => (t, os_random()?),
        (None, None) => (os_random::<32>()?.to_vec(), os_random()?),
    };
    let table = LatinGenerator::new()
        .walk_steps(walk_steps)
        .generate(order, &table_seed)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let key = KeyFile {
        table,
        seed: stream_seed,
    };
    let bytes = key.to_bytes();
    write(out, &bytes)?;
    println!(
        "wrote {} (order {order}, {} bytes)",
        out.display(),
        bytes.len()
    );
    Ok(())
}

fn cmd_encrypt(
    key_path: &Path,
    input: &Path,
    out: &Path,
    block: u8,
    engine: Engine,
) -> Result<(), Failure> {
    let key = load_key(key_path)?;
    let plaintext = read(input)?;
    let nonce = message_nonce()?;
    let order = key.order();
    let symbols = bytes_to_symbols(order, &plaintext);
    let spec = KeystreamSpec::new(key.seed, nonce, usize::from(block), order)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let material = KeyMaterial::new(KeyAutomaton::new(key.table));
    let payload = CipherSession::from_spec(&material, &spec, engine)
        .and_then(|mut s| s.encrypt_message(&symbols))
        .map_err(|e| Failure::Internal(e.to_string()))?;
    let container = CipherContainer {
        order,
        block_len: block,
        nonce,
        plaintext_crc: symbols_crc(order, &symbols),
        payload,
    };
    write(out, &container.to_bytes())?;
    eprintln!(
        "encrypted {} bytes as {} symbols (order {order}, m = {block}, engine {engine})",
        plaintext.len(),
        container.payload.len()
    );
    Ok(())
}

fn cmd_decrypt(key_path: &Path, input: &Path, out: &Path, engine: Engine) -> Result<(), Failure> {
    let key = load_key(key_path)?;
    let bytes = read(input)?;
    let container = CipherContainer::from_bytes(&bytes).map_err(|e| match e {
        CodecError::Io(io) => Failure::Io(input.to_owned(), io),
        other => Failure::Container(input.to_owned(), format!("{}: {other}", other.name())),
    })?;
    let order = key.order();
    if container.order != order {
        return Err(Failure::Key(
            key_path.to_owned(),
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
    )
    .map_err(|e| Failure::Container(input.to_owned(), e.to_string()))?;
    let material = KeyMaterial::new(KeyAutomaton::new(key.table));
    let symbols = CipherSession::from_spec(&material, &spec, engine)
        .and_then(|mut s| s.decrypt_message(&container.payload))
        .map_err(|e| Failure::Internal(e.to_string()))?;
    let crc = symbols_crc(order, &symbols);
    match symbols_to_bytes(order, &symbols) {
        Ok(plain) => {
            write(out, &plain)?;
            if crc != container.plaintext_crc {
                return Err(Failure::Checksum {
                    stored: container.plaintext_crc,
                    computed: Some(crc),
                });
            }
            eprintln!("decrypted {} bytes", plain.len());
            Ok(())
        }
        Err(_) => Err(Failure::Checksum {
            stored: container.plaintext_crc,
            computed: None,
        }),
    }
}

fn cmd_inspect(path: &Path) -> Result<(), Failure> {
    let bytes = read(path)?;
    if bytes.starts_with(&KEY_MAGIC) {
        let key = KeyFile::from_bytes(&bytes).map_err(|e| key_failure(path, e))?;
        println!("type: key");
        println!("order: {}", key.order());
        println!(
            "symbol width: {} byte(s)",
            lsq::codec::symbol_width(key.order())
        );
        println!("latin: ok");
        println!("checksum: ok");
        println!("size: {} bytes", bytes.len());
        return Ok(());
    }
    if bytes.starts_with(&CONTAINER_MAGIC) {
        let c = CipherContainer::from_bytes(&bytes)
            .map_err(|e| Failure::Container(path.to_owned(), format!("{}: {e}", e.name())))?;
        println!("type: container");
        println!("version: {}", lsq::codec::CONTAINER_VERSION);
        println!("order: {}", c.order);
        println!("block length: {}", c.block_len);
        println!("nonce: {}", hex::encode(c.nonce));
        println!("payload: {} symbols", c.payload.len());
        println!("plaintext crc: {:08x} (diagnostic)", c.plaintext_crc);
        return Ok(());
    }
    Err(Failure::Container(
        path.to_owned(),
        "BadMagic: neither a key file nor a container".into(),
    ))
}

fn cmd_bench(key_path: &Path, config: BenchConfig, csv: bool) -> Result<(), Failure> {
    let key = load_key(key_path)?;
    let seed = key.seed;
    let material = KeyMaterial::new(KeyAutomaton::new(key.table));
    let rows = bench::run_bench(&material, seed, &config).map_err(|e| match e {
        bench::BenchError::Cipher(c) => Failure::Internal(c.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    let inversions = bench::inversions(&rows);
    if csv {
        print!("{}", bench::to_csv(&rows));
    } else {
        println!(
            "order {}, engine {}, median of {} runs",
            material.order(),
            config.engine,
            config.runs
        );
        print!("{}", bench::to_table(&rows));
    }
    for inv in &inversions {
        let line = format!(
            "inversion: m={} ran at {:.2} MB/s, slower than m={} at {:.2} MB/s ({} bytes)",
            inv.shorter.block_len,
            inv.shorter.mb_per_s,
            inv.longer.block_len,
            inv.longer.mb_per_s,
            inv.shorter.bytes
        );
        if csv {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    if !csv && inversions.is_empty() {
        println!("throughput is nonincreasing in m");
    }
    Ok(())
}

fn cmd_attack_demo(config: AttackConfig, against: AttackTarget) -> Result<(), Failure> {
    println!(
        "order {}, {} known pairs of length {}, seed {}",
        config.order,
        config.messages,
        config.length,
        hex::encode(&config.seed)
    );
    match against {
        AttackTarget::Leader => {
            let r =
                demo::run_leader_attack(&config).map_err(|e| Failure::Internal(e.to_string()))?;
            println!("target: leader cipher (leader {})", r.leader);
            println!("learned triples: {}", r.learned_triples);
            println!("leader candidates: {:?}", r.leader_candidates);
            let shown: String = r.recovered.iter().map(|s| format!("{s} ")).collect();
            println!("held-out recovery: {}", shown.trim_end());
            println!(
                "unknown positions: {} of {}",
                r.unknown_positions(),
                r.held_out.len()
            );
            println!("accuracy: {:.2}%", 100.0 * r.accuracy);
        }
        AttackTarget::Keystream => {
            let out = demo::run_keystream_attack(&config)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            println!("target: keystream cipher (m = 1)");
            match out {
                KeystreamAttackOutcome::Inconsistent { pair, error } => {
                    println!("InconsistentPairs after {} pair(s): {error}", pair + 1);
                    println!("transcripts do not fit any single leader-cipher table");
                }
                KeystreamAttackOutcome::Consistent {
                    learned_triples,
                    accuracy,
                } => {
                    println!("no contradiction found; learned triples: {learned_triples}");
                    println!("accuracy: {:.2}%", 100.0 * accuracy);
                }
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Keygen {
            order,
            out,
            walk_steps,
            seed,
            table_seed,
        } => cmd_keygen(order, &out, walk_steps, seed, table_seed),
        Command::Encrypt {
            key,
            input,
            out,
            block,
            engine,
        } => cmd_encrypt(&key, &input, &out, block, engine.into()),
        Command::Decrypt {
            key,
            input,
            out,
            engine,
        } => cmd_decrypt(&key, &input, &out, engine.into()),
        Command::Inspect { path } => cmd_inspect(&path),
        Command::Bench {
            key,
            sizes,
            blocks,
            runs,
            engine,
            csv,
        } => {
            if runs < bench::MIN_RUNS {
                return Err(Failure::Usage(format!(
                    "--runs must be at least {}",
                    bench::MIN_RUNS
                )));
            }
            let config = BenchConfig {
                sizes,
                block_lens: blocks.into_iter().map(usize::from).collect(),
                runs,
                engine: engine.into(),
            };
            cmd_bench(&key, config, csv)
        }
        Command::AttackDemo {
            order,
            messages,
            length,
            seed,
            against,
        } => {
            let seed = match seed {
                Some(HexBytes(s)) => s,
                None => os_random::<16>()?.to_vec(),
            };
            cmd_attack_demo(
                AttackConfig {
                    order: order as usize,
                    messages,
                    length,
                    seed,
                },
                against,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lsq: {}", f.report());
            ExitCode::from(f.exit_code())
        }
    }
}
