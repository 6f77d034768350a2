//! End-to-end CLI tests: file round trips, scheme compatibility checks and
//! exit codes.

use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use rankforge::field::Field;
use rankforge::linalg::ExtVector;
use rankforge::serio;

const BIN: &str = env!("CARGO_BIN_EXE_rankforge");

fn rankforge(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn write_random_message(dir: &Path, m: usize, k: usize, seed: u64) -> String {
    let field = Field::new(2, m).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let msg = ExtVector::new(field.clone(), (0..k).map(|_| field.random(&mut rng)).collect());
    let p = path(dir, "msg.txt");
    std::fs::write(&p, serio::write_message(&msg, &field)).unwrap();
    p
}

#[test]
fn encrypt_decrypt_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = rankforge(&[
        "keygen", "--scheme", "gab08", "--m", "12", "--n", "12", "--k", "4", "--l", "2",
        "--tpub", "3", "--seed", "1",
        "--out-pub", &path(d, "pk.txt"), "--out-priv", &path(d, "sk.txt"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let msg_path = write_random_message(d, 12, 4, 2);
    let out = rankforge(&[
        "encrypt", "--pub", &path(d, "pk.txt"), "--msg", &msg_path,
        "--seed", "3", "--out", &path(d, "ct.txt"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = rankforge(&[
        "decrypt", "--priv", &path(d, "sk.txt"), "--ct", &path(d, "ct.txt"),
        "--out", &path(d, "dec.txt"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Byte-identical message after the round trip.
    let original = std::fs::read(&msg_path).unwrap();
    let decrypted = std::fs::read(path(d, "dec.txt")).unwrap();
    assert_eq!(original, decrypted);
}

#[test]
fn attack_then_decrypt_via_saved_result() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(rankforge(&[
        "keygen", "--scheme", "grh", "--m", "20", "--n", "20", "--k", "10",
        "--tpub", "4", "--seed", "11",
        "--out-pub", &path(d, "pk.txt"), "--out-priv", &path(d, "sk.txt"),
    ])
    .status
    .success());
    let out = rankforge(&[
        "attack", "--pub", &path(d, "pk.txt"),
        "--out", &path(d, "atk.txt"), "--transcript", &path(d, "tr.txt"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // The saved result decrypts a fresh ciphertext through the library.
    let atk = std::fs::read_to_string(path(d, "atk.txt")).unwrap();
    let (res, field) = serio::read_attack_result(&atk).unwrap();
    let pk_text = std::fs::read_to_string(path(d, "pk.txt")).unwrap();
    let (pk, _f) = serio::read_public_key(&pk_text).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(12);
    let msg = ExtVector::new(field.clone(), (0..10).map(|_| field.random(&mut rng)).collect());
    let c = rankforge::gpt::encrypt(&pk, &msg, &mut rng).unwrap();
    assert_eq!(rankforge::attack::oracle_decrypt(&res, &c).unwrap(), msg);

    let transcript = std::fs::read_to_string(path(d, "tr.txt")).unwrap();
    assert!(transcript.contains("verdict GABIDULIN_LIKE"));
    assert!(transcript.contains("t_star 4"));
}

#[test]
fn parse_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(rankforge(&[
        "keygen", "--scheme", "go", "--m", "12", "--n", "12", "--k", "4", "--l", "2",
        "--tpub", "3", "--seed", "1",
        "--out-pub", &path(d, "pk.txt"), "--out-priv", &path(d, "sk.txt"),
    ])
    .status
    .success());
    // Tamper the version header.
    let text = std::fs::read_to_string(path(d, "pk.txt")).unwrap();
    std::fs::write(path(d, "pk.txt"), text.replace("rankforge v1", "rankforge v9")).unwrap();
    let msg_path = write_random_message(d, 12, 4, 2);
    let out = rankforge(&[
        "encrypt", "--pub", &path(d, "pk.txt"), "--msg", &msg_path,
        "--seed", "3", "--out", &path(d, "ct.txt"),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn parameter_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // t_pub = t is invalid for GRH.
    let out = rankforge(&[
        "keygen", "--scheme", "grh", "--m", "20", "--n", "20", "--k", "10",
        "--tpub", "5", "--seed", "1",
        "--out-pub", &path(d, "pk.txt"), "--out-priv", &path(d, "sk.txt"),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn scheme_mismatch_between_key_and_ciphertext() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (name, tpub) in [("a", "3"), ("b", "2")] {
        assert!(rankforge(&[
            "keygen", "--scheme", "grh", "--m", "12", "--n", "12", "--k", "4",
            "--tpub", tpub, "--seed", "1",
            "--out-pub", &path(d, &format!("pk_{name}.txt")),
            "--out-priv", &path(d, &format!("sk_{name}.txt")),
        ])
        .status
        .success());
    }
    let msg_path = write_random_message(d, 12, 4, 2);
    assert!(rankforge(&[
        "encrypt", "--pub", &path(d, "pk_a.txt"), "--msg", &msg_path,
        "--seed", "3", "--out", &path(d, "ct.txt"),
    ])
    .status
    .success());
    let out = rankforge(&[
        "decrypt", "--priv", &path(d, "sk_b.txt"), "--ct", &path(d, "ct.txt"),
        "--out", &path(d, "dec.txt"),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn env_variable_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = Command::new(BIN)
        .args([
            "keygen", "--scheme", "grh", "--m", "20", "--n", "20", "--k", "10",
            "--tpub", "4",
            "--out-pub", &path(d, "pk.txt"), "--out-priv", &path(d, "sk.txt"),
        ])
        .env("RANKFORGE_SEED", "17")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let via_env = std::fs::read(path(d, "pk.txt")).unwrap();
    assert!(rankforge(&[
        "keygen", "--scheme", "grh", "--m", "20", "--n", "20", "--k", "10",
        "--tpub", "4", "--seed", "17",
        "--out-pub", &path(d, "pk2.txt"), "--out-priv", &path(d, "sk2.txt"),
    ])
    .status
    .success());
    assert_eq!(via_env, std::fs::read(path(d, "pk2.txt")).unwrap());
}

#[test]
fn bench_and_census_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = rankforge(&[
        "bench", "--table1", "--seed", "7", "--keys", "2", "--plaintexts", "3",
        "--out", &path(d, "bench.txt"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(path(d, "bench.txt")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows.len(), 7); // header + six rows, duplicate preserved
    assert!(rows[1].starts_with("20 10 5 4 1.0000"));
    assert_eq!(rows[1].split(' ').take(4).collect::<Vec<_>>(),
               rows[6].split(' ').take(4).collect::<Vec<_>>());

    let out = rankforge(&[
        "census", "--m", "10", "--n", "10", "--k", "3", "--l", "2",
        "--trials", "20", "--seed", "7",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("census n 10 k 3 l 2 trials 20"));
    assert!(text.contains("gabidulin 0 3 3 20 0"));
}
