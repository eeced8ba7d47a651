//! `mhpga`: key handling, the two attacks, and the benchmark campaigns.
//!
//! Exit status: 0 on success, 1 when an attack exhausts its budget, 2 on a
//! usage error, 3 on an I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use mhpga::bench::{
    gen_instance, run_comparison, run_density_campaign, run_table1_campaign, verify_message, ExperimentSpec, Format,
    Instance,
};
use mhpga::crypto::files::{read_json, CiphertextFile, KeyFile};
use mhpga::crypto::{decrypt_message, encrypt_message, keygen, Ciphertext, PublicKey};
use mhpga::lattice::attack_lll_until;
use mhpga::pga::{run_attack, sensitivity_probe};
use mhpga::{rng, BitString, Error, Result};

#[derive(Parser)]
#[command(name = "mhpga", version, about = "Merkle-Hellman knapsack cipher with genetic and lattice attacks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// INI file with [ga], [attack] and [bench] sections; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Key length in bits; campaigns accept a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Vec<usize>,
    /// Number of blocks; campaigns accept a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    blocks: Vec<usize>,
    #[arg(long, global = true)]
    pop_size: Option<usize>,
    /// Crossover probability.
    #[arg(long, global = true)]
    pc: Option<f64>,
    /// Mutation probability.
    #[arg(long, global = true)]
    pm: Option<f64>,
    /// Probability of roulette rather than elitist selection.
    #[arg(long, global = true)]
    ps: Option<f64>,
    /// Hill-climbing passes per improved chromosome.
    #[arg(long, global = true)]
    heuristic_iters: Option<usize>,
    #[arg(long, global = true)]
    migration_period: Option<u64>,
    #[arg(long, global = true)]
    no_migration: bool,
    /// Seconds per attack.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// Generations per block.
    #[arg(long, global = true)]
    generations: Option<u64>,
    /// Output directory; results go to stdout when absent, except for campaigns.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Single-threaded, reproducible scheduling.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Args)]
struct Target {
    /// Key file; a fresh instance is generated when absent.
    #[arg(long, requires = "ciphertext")]
    key: Option<PathBuf>,
    #[arg(long, requires = "key")]
    ciphertext: Option<PathBuf>,
    /// Raw plaintext bytes to score the recovered message against.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen,
    /// Encrypt a message under a key file.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        message: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Decrypt with the private part of a key file.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        ciphertext: PathBuf,
    },
    /// Parallel genetic attack.
    AttackPga(Target),
    /// Lattice reduction attack.
    AttackLll {
        #[command(flatten)]
        target: Target,
        /// Lovász parameter as a fraction, e.g. 99/100.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Time and generation statistics per key length and block count.
    BenchTable1 {
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Paired success ratios per density bucket.
    BenchDensity {
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated ranges such as 0.6-0.7,0.7-0.8.
        #[arg(long)]
        densities: Option<String>,
    },
    /// Instance-by-instance comparison of both attacks.
    BenchCompare {
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        densities: Option<String>,
    },
    /// Count perturbed blocks that sit closer to another block's solution.
    SensitivityProbe {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        min_flips: usize,
        #[arg(long, default_value_t = 3)]
        max_flips: usize,
    },
}

enum Outcome {
    Done,
    AttackFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::AttackFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn build_spec(opts: &Opts) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::default();
    if let Some(path) = &opts.config {
        spec.load_config(path)?;
    }
    if !opts.n.is_empty() {
        spec.key_lengths = opts.n.clone();
    }
    if !opts.blocks.is_empty() {
        spec.block_counts = opts.blocks.clone();
    }
    if let Some(seed) = opts.seed {
        spec.master_seed = seed;
    }
    let ga = [
        ("pop_size", opts.pop_size.map(|v| v.to_string())),
        ("p_c", opts.pc.map(|v| v.to_string())),
        ("p_m", opts.pm.map(|v| v.to_string())),
        ("p_s", opts.ps.map(|v| v.to_string())),
        ("heuristic_iters", opts.heuristic_iters.map(|v| v.to_string())),
        ("max_generations", opts.generations.map(|v| v.to_string())),
    ];
    for (key, value) in ga {
        if let Some(v) = value {
            spec.attack.ga.set(key, &v)?;
        }
    }
    if let Some(p) = opts.migration_period {
        spec.attack.migration_period = p;
    }
    if opts.no_migration {
        spec.attack.migration_enabled = false;
    }
    if let Some(g) = opts.generations {
        spec.attack.generation_budget = g;
    }
    if let Some(t) = opts.time_limit {
        spec.set("time_limit", &t.to_string())?;
        spec.attack.wall_clock_budget = spec.time_limit;
    }
    if opts.sequential {
        spec.attack.sequential = true;
    }
    Ok(spec)
}

fn emit<T: Serialize>(opts: &Opts, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match &opts.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// The attacked key and ciphertext, plus the plaintext when it is known.
fn load_target(
    target: &Target,
    spec: &ExperimentSpec,
    opts: &Opts,
) -> Result<(PublicKey, Ciphertext, Option<BitString>)> {
    let truth = match &target.truth {
        Some(path) => Some(BitString::from_bytes(&std::fs::read(path).map_err(|e| io_err(path, e))?)),
        None => None,
    };
    if let (Some(key), Some(ct)) = (&target.key, &target.ciphertext) {
        let pk = read_json::<KeyFile>(key)?.public_key()?;
        let ct: Ciphertext = read_json::<CiphertextFile>(ct)?.try_into()?;
        let truth = truth.map(|mut t| {
            t.truncate(ct.bit_length);
            t
        });
        return Ok((pk, ct, truth));
    }
    let n = opts.n.first().copied().unwrap_or(24);
    let k = opts.blocks.first().copied().unwrap_or(1);
    let seed = rng::derive_seed(spec.master_seed, &[0]);
    let inst: Instance = gen_instance(n, k, None, None, &mut rng::from_seed(seed))?;
    if opts.out.is_some() {
        emit(
            opts,
            "instance.json",
            &json!({ "key": KeyFile::from_keys(&inst.private_key, &inst.public_key), "ciphertext": CiphertextFile::from(&inst.ciphertext) }),
        )?;
    }
    Ok((inst.public_key, inst.ciphertext, Some(inst.message)))
}

fn progress(line: String) {
    eprintln!("{line}");
}

fn run(cli: Cli) -> Result<Outcome> {
    let opts = &cli.opts;
    let spec = build_spec(opts)?;
    let out_dir = || opts.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let format = opts.format.unwrap_or_default();
    match cli.command {
        Command::Keygen => {
            let n = opts.n.first().copied().unwrap_or(24);
            let (sk, pk) = keygen(n, &mut rng::from_seed(spec.master_seed))?;
            emit(opts, "key.json", &KeyFile::from_keys(&sk, &pk))?;
        }
        Command::Encrypt { key, message, input } => {
            let pk = read_json::<KeyFile>(&key)?.public_key()?;
            let bytes = match (message, input) {
                (Some(m), _) => m.into_bytes(),
                (None, Some(path)) => std::fs::read(&path).map_err(|e| io_err(&path, e))?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            emit(opts, "ciphertext.json", &CiphertextFile::from(&encrypt_message(&pk, &bytes)))?;
        }
        Command::Decrypt { key, ciphertext } => {
            let sk = read_json::<KeyFile>(&key)?.private_key()?;
            let ct: Ciphertext = read_json::<CiphertextFile>(&ciphertext)?.try_into()?;
            let bytes = decrypt_message(&sk, &ct)?;
            match &opts.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
                    let path = dir.join("plaintext.bin");
                    std::fs::write(&path, &bytes).map_err(|e| io_err(&path, e))?;
                }
                None => std::io::stdout().write_all(&bytes).map_err(|e| io_err(Path::new("<stdout>"), e))?,
            }
        }
        Command::AttackPga(target) => {
            let (pk, ct, truth) = load_target(&target, &spec, opts)?;
            let mut report = run_attack(&ct, &pk, &spec.attack, spec.master_seed)?;
            if let Some(t) = &truth {
                report.score(t)?;
            }
            let solved = report.success() && verify_message(&pk, &ct, &report.plaintext);
            emit(opts, "attack_pga.json", &report)?;
            eprintln!(
                "{} after {} generations in {:.2}s",
                if solved { "recovered" } else { "not recovered" },
                report.generations(),
                report.total_elapsed.as_secs_f64()
            );
            if !solved {
                return Ok(Outcome::AttackFailed);
            }
        }
        Command::AttackLll { target, delta } => {
            let mut spec = spec;
            if let Some(d) = delta {
                spec.set("lovasz_delta", &d)?;
            }
            let (pk, ct, truth) = load_target(&target, &spec, opts)?;
            let started = Instant::now();
            let outcomes = attack_lll_until(&pk, &ct, &spec.lll, Some(started + spec.attack.wall_clock_budget))?;
            let elapsed = started.elapsed();
            let parts: Option<Vec<BitString>> = outcomes.iter().map(|o| o.candidate.clone()).collect();
            let plaintext = parts.map(|p| {
                let mut bits = BitString::concat(&p);
                bits.truncate(ct.bit_length);
                bits
            });
            let solved = !outcomes.is_empty() && plaintext.as_ref().is_some_and(|p| verify_message(&pk, &ct, p));
            let blocks: Vec<_> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "block_index": o.block_index,
                        "solved": o.solved,
                        "basis": o.basis_kind.to_string(),
                        "timed_out": o.timed_out,
                        "elapsed": o.elapsed.as_secs_f64(),
                        "candidate": o.candidate,
                    })
                })
                .collect();
            let resemblance = match (&plaintext, &truth) {
                (Some(p), Some(t)) => Some(mhpga::pga::resemblance_ratio(p, t)?),
                _ => None,
            };
            emit(
                opts,
                "attack_lll.json",
                &json!({
                    "n": pk.n(),
                    "k": ct.k(),
                    "reduction": spec.lll,
                    "solved": solved,
                    "per_block": blocks,
                    "plaintext": plaintext,
                    "resemblance": resemblance,
                    "total_elapsed": elapsed.as_secs_f64(),
                }),
            )?;
            eprintln!("{} in {:.2}s", if solved { "recovered" } else { "not recovered" }, elapsed.as_secs_f64());
            if !solved {
                return Ok(Outcome::AttackFailed);
            }
        }
        Command::BenchTable1 { trials } => {
            let mut spec = spec;
            if let Some(t) = trials {
                spec.trials_per_cell = t;
            }
            let table = run_table1_campaign(&spec, &mut |t| {
                progress(format!(
                    "n={} k={} {} trial {}: {} ({} generations)",
                    t.n,
                    t.k,
                    t.setting,
                    t.trial,
                    if t.success { "solved" } else { "failed" },
                    t.generations
                ))
            })?;
            for path in table.write(&out_dir(), format)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::BenchDensity { trials, densities } => {
            let mut spec = spec;
            if let Some(t) = trials {
                spec.trials_per_cell = t;
            }
            if let Some(d) = densities {
                spec.set("densities", &d)?;
            }
            let table = run_density_campaign(&spec, &mut |t| {
                progress(format!(
                    "n={} k={} density {:.3} trial {}: pga {} lll {}",
                    t.n, t.k, t.density, t.trial, t.pga_solved, t.lll_solved
                ))
            })?;
            for row in table.buckets.iter().filter(|r| r.instances == 0) {
                eprintln!("warning: no n={} key found in density bucket {}", row.n, row.bucket);
            }
            for path in table.write(&out_dir(), format)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::BenchCompare { instances, densities } => {
            let mut spec = spec;
            if let Some(i) = instances {
                spec.instances = Some(i);
            }
            if let Some(d) = densities {
                spec.set("densities", &d)?;
            }
            let cmp = run_comparison(&spec, &mut |r| {
                progress(format!(
                    "#{} n={} density {:.3}: pga {} lll {}",
                    r.index, r.n, r.density, r.pga_solved, r.lll_solved
                ))
            })?;
            for path in cmp.write(&out_dir(), format)? {
                eprintln!("wrote {}", path.display());
            }
            let pct = |r: Option<f64>| r.map_or("n/a".into(), |r| format!("{:.1}%", 100.0 * r));
            eprintln!("pga {} lll {}", pct(cmp.summary.pga_ratio), pct(cmp.summary.lll_ratio));
        }
        Command::SensitivityProbe { samples, min_flips, max_flips } => {
            let n = opts.n.first().copied().unwrap_or(32);
            let k = opts.blocks.first().copied().unwrap_or(3);
            let mut r = rng::from_seed(spec.master_seed);
            let inst = gen_instance(n, k, None, None, &mut r)?;
            let blocks = inst.message.chunks_padded(n);
            let report = sensitivity_probe(&inst.public_key, &blocks, samples, min_flips..=max_flips, &mut r)?;
            emit(
                opts,
                "sensitivity.json",
                &json!({
                    "n": n,
                    "k": k,
                    "samples": report.samples,
                    "witnesses": report.witnesses,
                    "witnesses_per_block": report.witnesses_per_block,
                    "holds": report.holds(),
                }),
            )?;
        }
    }
    Ok(Outcome::Done)
}
