use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lsq::{CipherContainer, KeyFile};
use tempfile::TempDir;

const NONCE: &str = "00112233445566778899aabb";

fn lsq(args: &[&str]) -> Output {
    lsq_env(args, Some(NONCE))
}

fn lsq_env(args: &[&str], nonce: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lsq"));
    cmd.args(args);
    match nonce {
        Some(n) => cmd.env("LSQ_FORCE_NONCE", n),
        None => cmd.env_remove("LSQ_FORCE_NONCE"),
    };
    cmd.output().expect("run lsq")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work {
            dir: TempDir::new().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn file(&self, name: &str, bytes: &[u8]) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, bytes).unwrap();
        p
    }

    fn key(&self, name: &str, order: u32, seed: &str) -> PathBuf {
        let p = self.path(name);
        let out = lsq(&[
            "keygen",
            "-n",
            &order.to_string(),
            "--seed",
            seed,
            "--out",
            s(&p),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        p
    }
}

#[test]
fn keygen_writes_a_valid_256_key() {
    let w = Work::new();
    let key = w.key("k", 256, "01");
    let bytes = std::fs::read(&key).unwrap();
    assert_eq!(bytes.len(), 65584);
    KeyFile::from_bytes(&bytes).unwrap();
}

#[test]
fn keygen_with_the_same_seed_is_reproducible() {
    let w = Work::new();
    let a = std::fs::read(w.key("a", 16, "c0ffee")).unwrap();
    let b = std::fs::read(w.key("b", 16, "c0ffee")).unwrap();
    let c = std::fs::read(w.key("c", 16, "c0ffef")).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);

    // --table-seed fixes the table but draws a fresh keystream seed.
    let t1 = w.path("t1");
    let t2 = w.path("t2");
    for t in [&t1, &t2] {
        let out = lsq(&[
            "keygen",
            "-n",
            "16",
            "--table-seed",
            "c0ffee",
            "--out",
            s(t),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let k1 = KeyFile::from_bytes(&std::fs::read(&t1).unwrap()).unwrap();
    let k2 = KeyFile::from_bytes(&std::fs::read(&t2).unwrap()).unwrap();
    assert_eq!(k1.table, k2.table);
    assert_eq!(k1.table, KeyFile::from_bytes(&a).unwrap().table);
    assert_ne!(k1.seed, k2.seed);
}

#[test]
fn keygen_rejects_bad_orders_and_walks() {
    let w = Work::new();
    let out = lsq(&["keygen", "-n", "1", "--out", s(&w.path("k"))]);
    assert_eq!(code(&out), 2);
    let out = lsq(&[
        "keygen",
        "-n",
        "257",
        "--walk-steps",
        "5",
        "--seed",
        "00",
        "--out",
        s(&w.path("k")),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    let out = lsq(&[
        "keygen",
        "-n",
        "8",
        "--walk-steps",
        "100",
        "--seed",
        "00",
        "--out",
        s(&w.path("k")),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn encrypt_decrypt_roundtrip_for_several_orders() {
    let w = Work::new();
    let msg: Vec<u8> = (0..5000u32).map(|i| (i * 31 % 251) as u8).collect();
    let input = w.file("msg", &msg);
    for (order, m) in [(2, 1), (3, 4), (16, 2), (256, 4), (300, 3)] {
        let key = w.key(&format!("k{order}"), order, "5eed");
        let ct = w.path(&format!("c{order}"));
        let back = w.path(&format!("p{order}"));
        let out = lsq(&[
            "encrypt",
            "--key",
            s(&key),
            "--in",
            s(&input),
            "--out",
            s(&ct),
            "-m",
            &m.to_string(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let out = lsq(&[
            "decrypt",
            "--key",
            s(&key),
            "--in",
            s(&ct),
            "--out",
            s(&back),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert_eq!(std::fs::read(&back).unwrap(), msg, "order {order}");
    }
}

#[test]
fn engines_produce_identical_containers() {
    let w = Work::new();
    let key = w.key("k", 256, "e1");
    let input = w.file("msg", b"engine equivalence through the command line");
    let fa = w.path("fa");
    let qg = w.path("qg");
    for (engine, out_path) in [("fa", &fa), ("qg", &qg)] {
        let out = lsq(&[
            "encrypt",
            "--key",
            s(&key),
            "--in",
            s(&input),
            "--out",
            s(out_path),
            "--engine",
            engine,
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&fa).unwrap(), std::fs::read(&qg).unwrap());

    let back = w.path("back");
    let out = lsq(&[
        "decrypt",
        "--key",
        s(&key),
        "--in",
        s(&fa),
        "--out",
        s(&back),
        "--engine",
        "qg",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        std::fs::read(&back).unwrap(),
        std::fs::read(&input).unwrap()
    );
}

#[test]
fn one_mebibyte_at_256_gives_one_symbol_per_byte() {
    let w = Work::new();
    let key = w.key("k", 256, "10");
    let input = w.file("msg", &vec![0x5A; 1 << 20]);
    let ct = w.path("ct");
    let out = lsq(&[
        "encrypt",
        "--key",
        s(&key),
        "--in",
        s(&input),
        "--out",
        s(&ct),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let c = CipherContainer::from_bytes(&std::fs::read(&ct).unwrap()).unwrap();
    assert_eq!(c.payload.len(), 1 << 20);
    assert_eq!(c.block_len, 4);
    assert_eq!(hex_nonce(&c), NONCE);
}

fn hex_nonce(c: &CipherContainer) -> String {
    c.nonce.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn empty_input_roundtrips() {
    let w = Work::new();
    let key = w.key("k", 5, "00");
    let input = w.file("empty", b"");
    let ct = w.path("ct");
    let back = w.path("back");
    assert_eq!(
        code(&lsq(&[
            "encrypt",
            "--key",
            s(&key),
            "--in",
            s(&input),
            "--out",
            s(&ct)
        ])),
        0
    );
    let c = CipherContainer::from_bytes(&std::fs::read(&ct).unwrap()).unwrap();
    assert!(c.payload.is_empty());
    assert_eq!(
        code(&lsq(&[
            "decrypt",
            "--key",
            s(&key),
            "--in",
            s(&ct),
            "--out",
            s(&back)
        ])),
        0
    );
    assert!(std::fs::read(&back).unwrap().is_empty());
}

#[test]
fn nonces_come_from_the_os_without_the_test_hook() {
    let w = Work::new();
    let key = w.key("k", 256, "aa");
    let input = w.file("msg", b"same message twice");
    let a = w.path("a");
    let b = w.path("b");
    for p in [&a, &b] {
        let out = lsq_env(
            &[
                "encrypt",
                "--key",
                s(&key),
                "--in",
                s(&input),
                "--out",
                s(p),
            ],
            None,
        );
        assert_eq!(code(&out), 0);
    }
    let ca = CipherContainer::from_bytes(&std::fs::read(&a).unwrap()).unwrap();
    let cb = CipherContainer::from_bytes(&std::fs::read(&b).unwrap()).unwrap();
    assert_ne!(ca.nonce, cb.nonce);
    assert_ne!(ca.payload, cb.payload);

    let out = lsq_env(
        &[
            "encrypt",
            "--key",
            s(&key),
            "--in",
            s(&input),
            "--out",
            s(&a),
        ],
        Some("abcd"),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn wrong_key_reports_a_checksum_mismatch() {
    let w = Work::new();
    let right = w.key("right", 256, "01");
    let wrong = w.key("wrong", 256, "02");
    let input = w.file("msg", b"only the right key reads this");
    let ct = w.path("ct");
    assert_eq!(
        code(&lsq(&[
            "encrypt",
            "--key",
            s(&right),
            "--in",
            s(&input),
            "--out",
            s(&ct)
        ])),
        0
    );
    let out = lsq(&[
        "decrypt",
        "--key",
        s(&wrong),
        "--in",
        s(&ct),
        "--out",
        s(&w.path("p")),
    ]);
    assert_eq!(code(&out), 6);
    assert!(
        stderr(&out).contains("checksum mismatch"),
        "{}",
        stderr(&out)
    );

    let small = w.key("small", 16, "01");
    let out = lsq(&[
        "decrypt",
        "--key",
        s(&small),
        "--in",
        s(&ct),
        "--out",
        s(&w.path("p")),
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn damaged_files_map_to_stable_exit_codes() {
    let w = Work::new();
    let key = w.key("k", 256, "01");
    let input = w.file("msg", b"some bytes to protect");
    let ct = w.path("ct");
    assert_eq!(
        code(&lsq(&[
            "encrypt",
            "--key",
            s(&key),
            "--in",
            s(&input),
            "--out",
            s(&ct)
        ])),
        0
    );
    let bytes = std::fs::read(&ct).unwrap();

    let truncated = w.file("trunc", &bytes[..bytes.len() - 3]);
    let out = lsq(&[
        "decrypt",
        "--key",
        s(&key),
        "--in",
        s(&truncated),
        "--out",
        s(&w.path("p")),
    ]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("TruncatedFile"));

    let mut flipped = bytes.clone();
    flipped[40] ^= 0x01;
    let flipped = w.file("flip", &flipped);
    let out = lsq(&[
        "decrypt",
        "--key",
        s(&key),
        "--in",
        s(&flipped),
        "--out",
        s(&w.path("p")),
    ]);
    assert_eq!(code(&out), 6);

    let mut key_bytes = std::fs::read(&key).unwrap();
    key_bytes[100] ^= 0x01;
    let bad_key = w.file("badkey", &key_bytes);
    let out = lsq(&[
        "decrypt",
        "--key",
        s(&bad_key),
        "--in",
        s(&ct),
        "--out",
        s(&w.path("p")),
    ]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("BadChecksum"));

    let out = lsq(&[
        "decrypt",
        "--key",
        s(&w.path("missing")),
        "--in",
        s(&ct),
        "--out",
        s(&w.path("p")),
    ]);
    assert_eq!(code(&out), 3);

    let out = lsq(&[
        "encrypt",
        "--key",
        s(&key),
        "--in",
        s(&input),
        "--out",
        s(&w.path("x")),
        "-m",
        "0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn inspect_describes_keys_and_containers() {
    let w = Work::new();
    let key = w.key("k", 300, "0f");
    let out = lsq(&["inspect", s(&key)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("type: key"));
    assert!(text.contains("order: 300"));
    assert!(text.contains("symbol width: 2"));

    let input = w.file("msg", b"abc");
    let ct = w.path("ct");
    assert_eq!(
        code(&lsq(&[
            "encrypt",
            "--key",
            s(&key),
            "--in",
            s(&input),
            "--out",
            s(&ct),
            "-m",
            "7"
        ])),
        0
    );
    let out = lsq(&["inspect", s(&ct)]);
    let text = stdout(&out);
    assert!(text.contains("type: container"));
    assert!(text.contains("block length: 7"));
    assert!(text.contains(&format!("nonce: {NONCE}")));
    assert!(text.contains("payload: 3 symbols"));

    let junk = w.file("junk", b"not an lsq file at all");
    let out = lsq(&["inspect", s(&junk)]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("BadMagic"));

    let mut key_bytes = std::fs::read(&key).unwrap();
    key_bytes.truncate(100);
    let out = lsq(&["inspect", s(&w.file("short", &key_bytes))]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("TruncatedFile"));
}

#[test]
fn bench_reports_each_block_length() {
    let w = Work::new();
    let key = w.key("k", 256, "be");
    let out = lsq(&[
        "bench",
        "--key",
        s(&key),
        "--sizes",
        "64K",
        "--block",
        "1,4,16",
        "--csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,bytes,seconds,mb_per_s"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for (row, m) in rows.iter().zip(["1", "4", "16"]) {
        assert_eq!(row.len(), 4);
        assert_eq!(row[0], m);
        assert_eq!(row[1], "65536");
        assert!(row[3].parse::<f64>().unwrap() > 0.0);
    }

    let out = lsq(&["bench", "--key", s(&key), "--sizes", "0"]);
    assert_eq!(code(&out), 2);
    let out = lsq(&["bench", "--key", s(&key), "--sizes", "1K", "--runs", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn attack_demo_reports_both_targets() {
    let out = lsq(&[
        "attack-demo",
        "-n",
        "16",
        "--messages",
        "200",
        "--length",
        "64",
        "--seed",
        "01",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("learned triples: 256"), "{text}");
    assert!(text.contains("accuracy: 100.00%"), "{text}");

    let out = lsq(&["attack-demo", "--messages", "0", "--seed", "01"]);
    let text = stdout(&out);
    assert!(text.contains("learned triples: 0"));
    assert!(text.contains("unknown positions: 64 of 64"));

    let out = lsq(&["attack-demo", "--against", "keystream", "--seed", "01"]);
    assert_eq!(code(&out), 0);
    assert!(
        stdout(&out).contains("InconsistentPairs"),
        "{}",
        stdout(&out)
    );
}
