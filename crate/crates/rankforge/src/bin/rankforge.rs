use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use rankforge::attack::{attack, attack_geometry, dimension_census, distinguish};
use rankforge::bench::{bench_table1, write_bench_table};
use rankforge::error::{Error, Result};
use rankforge::field::Field;
use rankforge::gpt::{self, SchemeParams, Variant};
use rankforge::serio;

#[derive(Parser)]
#[command(
    name = "rankforge",
    about = "Gabidulin codes, GPT encryption variants and the structural attack that breaks them",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a key pair and write it to disk
    Keygen(KeygenArgs),
    /// Encrypt a message file with a public key
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext file with a private key
    Decrypt(DecryptArgs),
    /// Recover an alternative column scrambler from a public key
    Attack(AttackArgs),
    /// Reproduce the published GRH attack benchmark table
    Bench(BenchArgs),
    /// Empirical distribution of the Lambda_i distinguisher dimensions
    Census(CensusArgs),
}

#[derive(Args)]
struct SchemeArgs {
    /// Scheme variant: classic, go, gab08, grh, tp
    #[arg(long, env = "RANKFORGE_SCHEME")]
    scheme: String,
    #[arg(long, default_value_t = 2, env = "RANKFORGE_Q")]
    q: u32,
    #[arg(long, env = "RANKFORGE_M")]
    m: usize,
    #[arg(long, env = "RANKFORGE_N")]
    n: usize,
    #[arg(long, env = "RANKFORGE_K")]
    k: usize,
    #[arg(long, default_value_t = 0, env = "RANKFORGE_L")]
    l: usize,
    #[arg(long, env = "RANKFORGE_TPUB")]
    tpub: usize,
}

impl SchemeArgs {
    fn params(&self) -> Result<SchemeParams> {
        let variant = Variant::from_name(&self.scheme)
            .ok_or_else(|| Error::Param(format!("unknown scheme `{}`", self.scheme)))?;
        let p = SchemeParams {
            variant,
            q: self.q,
            m: self.m,
            n: self.n,
            k: self.k,
            ell: self.l,
            t_pub: self.tpub,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct KeygenArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, env = "RANKFORGE_SEED")]
    seed: u64,
    /// Public key output path
    #[arg(long, env = "RANKFORGE_OUT_PUB")]
    out_pub: PathBuf,
    /// Private key output path
    #[arg(long, env = "RANKFORGE_OUT_PRIV")]
    out_priv: PathBuf,
}

#[derive(Args)]
struct EncryptArgs {
    /// Public key file
    #[arg(long = "pub", env = "RANKFORGE_PUB")]
    pub_path: PathBuf,
    /// Message file
    #[arg(long, env = "RANKFORGE_MSG")]
    msg: PathBuf,
    #[arg(long, env = "RANKFORGE_SEED")]
    seed: u64,
    #[arg(long, env = "RANKFORGE_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct DecryptArgs {
    /// Private key file
    #[arg(long = "priv", env = "RANKFORGE_PRIV")]
    priv_path: PathBuf,
    /// Ciphertext file
    #[arg(long, env = "RANKFORGE_CT")]
    ct: PathBuf,
    #[arg(long, env = "RANKFORGE_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct AttackArgs {
    /// Public key file
    #[arg(long = "pub", env = "RANKFORGE_PUB")]
    pub_path: PathBuf,
    /// Attack result output path
    #[arg(long, env = "RANKFORGE_OUT")]
    out: PathBuf,
    /// Transcript output path (dimension profile and chosen geometry)
    #[arg(long, env = "RANKFORGE_TRANSCRIPT")]
    transcript: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Run the published GRH parameter table
    #[arg(long, env = "RANKFORGE_TABLE1")]
    table1: bool,
    #[arg(long, default_value_t = 7, env = "RANKFORGE_SEED")]
    seed: u64,
    /// Key pairs per parameter row
    #[arg(long, default_value_t = 5, env = "RANKFORGE_KEYS")]
    keys: usize,
    /// Oracle plaintexts per key
    #[arg(long, default_value_t = 10, env = "RANKFORGE_PLAINTEXTS")]
    plaintexts: usize,
    /// Output path (stdout when omitted)
    #[arg(long, env = "RANKFORGE_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, default_value_t = 2, env = "RANKFORGE_Q")]
    q: u32,
    #[arg(long, env = "RANKFORGE_M")]
    m: usize,
    #[arg(long, env = "RANKFORGE_N")]
    n: usize,
    #[arg(long, env = "RANKFORGE_K")]
    k: usize,
    #[arg(long, default_value_t = 0, env = "RANKFORGE_L")]
    l: usize,
    #[arg(long, default_value_t = 100, env = "RANKFORGE_TRIALS")]
    trials: usize,
    #[arg(long, default_value_t = 7, env = "RANKFORGE_SEED")]
    seed: u64,
    #[arg(long, env = "RANKFORGE_OUT")]
    out: Option<PathBuf>,
}

fn read_file(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(Error::Io)
}

fn write_file(path: &PathBuf, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(Error::Io)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Keygen(a) => {
            let params = a.scheme.params()?;
            let field = Field::new(params.q, params.m)?;
            let mut rng = ChaCha12Rng::seed_from_u64(a.seed);
            let (pk, sk) = gpt::keygen(&params, &field, &mut rng)?;
            write_file(&a.out_pub, &serio::write_public_key(&pk, &field))?;
            write_file(&a.out_priv, &serio::write_private_key(&sk, &field))?;
            eprintln!(
                "wrote {} and {}",
                a.out_pub.display(),
                a.out_priv.display()
            );
        }
        Cmd::Encrypt(a) => {
            let (pk, field) = serio::read_public_key(&read_file(&a.pub_path)?)?;
            let (msg, msg_field) = serio::read_message(&read_file(&a.msg)?)?;
            if msg_field != field {
                return Err(Error::Param("message field does not match key field".into()));
            }
            let mut rng = ChaCha12Rng::seed_from_u64(a.seed);
            let c = gpt::encrypt(&pk, &msg, &mut rng)?;
            write_file(&a.out, &serio::write_ciphertext(&c, &pk.params, &field))?;
        }
        Cmd::Decrypt(a) => {
            let (sk, field) = serio::read_private_key(&read_file(&a.priv_path)?)?;
            let (c, ct_params, ct_field) = serio::read_ciphertext(&read_file(&a.ct)?)?;
            if ct_params != sk.params || ct_field != field {
                return Err(Error::Param(
                    "ciphertext scheme does not match the private key".into(),
                ));
            }
            let msg = gpt::decrypt(&sk, &c)?;
            write_file(&a.out, &serio::write_message(&msg, &field))?;
        }
        Cmd::Attack(a) => {
            let (pk, field) = serio::read_public_key(&read_file(&a.pub_path)?)?;
            let start = Instant::now();
            let res = attack(&pk)?;
            eprintln!(
                "attack succeeded in {:.3}s: n' = {}, l' = {}, t* = {}",
                start.elapsed().as_secs_f64(),
                res.degraded_code.n(),
                res.pad_width,
                res.t_star
            );
            write_file(&a.out, &serio::write_attack_result(&res, &field))?;
            if let Some(path) = a.transcript {
                let (n_prime, _) = attack_geometry(&pk);
                let report = distinguish(&pk.g_pub, n_prime - pk.params.k - 1);
                write_file(
                    &path,
                    &serio::write_transcript(&pk.params, &report, &res, &field),
                )?;
            }
        }
        Cmd::Bench(a) => {
            if !a.table1 {
                return Err(Error::Param("only --table1 benchmarks are available".into()));
            }
            let rows = bench_table1(a.keys, a.plaintexts, a.seed)?;
            let table = write_bench_table(&rows);
            match a.out {
                Some(path) => write_file(&path, &table)?,
                None => print!("{table}"),
            }
        }
        Cmd::Census(a) => {
            let field = Field::new(a.q, a.m)?;
            let mut rng = ChaCha12Rng::seed_from_u64(a.seed);
            let report = dimension_census(&field, a.n, a.k, a.l, a.trials, &mut rng)?;
            let table = serio::write_census(&report);
            match a.out {
                Some(path) => write_file(&path, &table)?,
                None => print!("{table}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rankforge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
