//! Benchmark harness: structural-attack success rates, oracle accuracy and
//! timings over the published GRH parameter sets.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::attack::{attack, oracle_decrypt};
use crate::error::Result;
use crate::field::Field;
use crate::gpt::{self, SchemeParams, Variant};
use crate::linalg::ExtVector;

/// GRH parameter tuples (m = n, k, t, t_pub) at q = 2, at least 80-bit
/// claimed security. The last row repeats the first as published.
pub const TABLE1: &[(usize, usize, usize, usize)] = &[
    (20, 10, 5, 4),
    (28, 14, 7, 3),
    (28, 14, 7, 4),
    (28, 14, 7, 5),
    (28, 14, 7, 6),
    (20, 10, 5, 4),
];

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub m: usize,
    pub k: usize,
    pub t: usize,
    pub t_pub: usize,
    pub attack_success_rate: f64,
    pub median_attack_seconds: f64,
    pub oracle_accuracy: f64,
}

/// Per-trial RNG stream derived from (seed, trial index); trial order does
/// not affect any other trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Run `keys` GRH key pairs at (m = n, k, t_pub): attack each one (timed,
/// excluding keygen) and decrypt `plaintexts` random ciphertexts through the
/// recovered material.
pub fn bench_grh_row(
    m: usize,
    k: usize,
    t_pub: usize,
    keys: usize,
    plaintexts: usize,
    seed: u64,
) -> Result<BenchRow> {
    let params = SchemeParams {
        variant: Variant::Grh,
        q: 2,
        m,
        n: m,
        k,
        ell: 0,
        t_pub,
    };
    params.validate()?;
    let field = Field::new(2, m)?;
    let mut successes = 0usize;
    let mut timings = Vec::with_capacity(keys);
    let mut oracle_ok = 0usize;
    let mut oracle_total = 0usize;
    for trial in 0..keys {
        let mut rng = trial_rng(seed, trial as u64);
        let (pk, _sk) = gpt::keygen(&params, &field, &mut rng)?;
        let start = Instant::now();
        let res = match attack(&pk) {
            Ok(r) => r,
            Err(_) => continue,
        };
        timings.push(start.elapsed().as_secs_f64());
        successes += 1;
        for _ in 0..plaintexts {
            let msg = random_message(&field, k, &mut rng);
            let c = gpt::encrypt(&pk, &msg, &mut rng)?;
            oracle_total += 1;
            if oracle_decrypt(&res, &c).map(|m| m == msg).unwrap_or(false) {
                oracle_ok += 1;
            }
        }
    }
    Ok(BenchRow {
        m,
        k,
        t: params.t(),
        t_pub,
        attack_success_rate: successes as f64 / keys as f64,
        median_attack_seconds: median(timings),
        oracle_accuracy: if oracle_total == 0 {
            0.0
        } else {
            oracle_ok as f64 / oracle_total as f64
        },
    })
}

pub fn bench_table1(keys: usize, plaintexts: usize, seed: u64) -> Result<Vec<BenchRow>> {
    TABLE1
        .iter()
        .enumerate()
        .map(|(row, &(m, k, _t, t_pub))| {
            bench_grh_row(m, k, t_pub, keys, plaintexts, seed.wrapping_add(row as u64))
        })
        .collect()
}

pub fn write_bench_table(rows: &[BenchRow]) -> String {
    let mut out = String::from("m k t tpub success_rate median_attack_seconds oracle_accuracy\n");
    for r in rows {
        out.push_str(&format!(
            "{} {} {} {} {:.4} {:.4} {:.4}\n",
            r.m, r.k, r.t, r.t_pub, r.attack_success_rate, r.median_attack_seconds, r.oracle_accuracy
        ));
    }
    out
}

pub fn random_message<R: Rng + ?Sized>(field: &Field, k: usize, rng: &mut R) -> ExtVector {
    ExtVector::new(field.clone(), (0..k).map(|_| field.random(rng)).collect())
}
