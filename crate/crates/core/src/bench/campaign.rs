use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::instance::{gen_instance, sha256_hex, DensityRange, Instance, InstanceFile};
use super::output::{write_rows, Format};
use super::spec::ExperimentSpec;
use super::stats::stats;
use crate::crypto::{density, encrypt_bits, ones_proportion, Ciphertext, PublicKey};
use crate::ga::GAParams;
use crate::lattice::{attack_lll_until, BasisKind, LatticeAttackOutcome};
use crate::pga::{run_attack, AttackReport};
use crate::rng::{derive_seed, from_seed};
use crate::{BitString, Error, Result};

const INSTANCE_STREAM: u64 = 1;
const ATTACK_STREAM: u64 = 2;

/// True iff `bits` is a full message that encrypts to every block of `ct`.
pub fn verify_message(pk: &PublicKey, ct: &Ciphertext, bits: &BitString) -> bool {
    bits.len() == ct.bit_length && encrypt_bits(pk, bits).blocks == ct.blocks
}

/// Parses instance bytes after checking they are the ones that were hashed.
fn consume(bytes: &[u8], expected_sha256: &str) -> Result<(PublicKey, Ciphertext)> {
    let got = sha256_hex(bytes);
    if got != expected_sha256 {
        return Err(Error::Parse(format!("instance hash mismatch: {got} != {expected_sha256}")));
    }
    InstanceFile::parse(bytes)
}

fn seconds(d: Duration, sequential: bool) -> Option<f64> {
    (!sequential).then(|| d.as_secs_f64())
}

struct PgaRun {
    report: AttackReport,
    success: bool,
}

fn run_pga(
    bytes: &[u8],
    sha: &str,
    spec: &ExperimentSpec,
    ga: &GAParams,
    seed: u64,
    truth: &BitString,
) -> Result<PgaRun> {
    let (pk, ct) = consume(bytes, sha)?;
    let mut report = run_attack(&ct, &pk, &spec.attack_config(ga.clone()), seed)?;
    report.score(truth)?;
    let success = report.success() && verify_message(&pk, &ct, &report.plaintext);
    Ok(PgaRun { report, success })
}

struct LllRun {
    success: bool,
    basis: String,
    elapsed: Duration,
}

fn run_lll(bytes: &[u8], sha: &str, spec: &ExperimentSpec) -> Result<LllRun> {
    let (pk, ct) = consume(bytes, sha)?;
    let started = Instant::now();
    let outcomes = attack_lll_until(&pk, &ct, &spec.lll, Some(started + spec.time_limit))?;
    let elapsed = started.elapsed();
    let candidates: Option<Vec<BitString>> = outcomes.iter().map(|o| o.candidate.clone()).collect();
    let success = !outcomes.is_empty()
        && candidates.is_some_and(|c| {
            let mut bits = BitString::concat(&c);
            bits.truncate(ct.bit_length);
            verify_message(&pk, &ct, &bits)
        });
    Ok(LllRun { success, basis: basis_label(&outcomes, success), elapsed })
}

fn basis_label(outcomes: &[LatticeAttackOutcome], success: bool) -> String {
    if outcomes.iter().any(|o| o.timed_out) {
        return "timeout".into();
    }
    if !success {
        return "none".into();
    }
    let mut kinds: Vec<BasisKind> = Vec::new();
    for o in outcomes {
        if !kinds.contains(&o.basis_kind) {
            kinds.push(o.basis_kind);
        }
    }
    kinds.iter().map(ToString::to_string).collect::<Vec<_>>().join("+")
}

fn ratio(hits: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| hits as f64 / total as f64)
}

// ---------------------------------------------------------------------------
// Generation and time statistics per (n, k, setting)

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table1Trial {
    pub n: usize,
    pub k: usize,
    pub setting: String,
    pub trial: usize,
    pub instance_seed: u64,
    pub attack_seed: u64,
    pub instance_sha256: String,
    pub success: bool,
    pub generations: u64,
    pub time_s: Option<f64>,
    pub resemblance: Option<f64>,
    pub migrations_sent: u64,
    pub migrations_accepted: u64,
}

/// One table row; statistics cover successful attacks only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub n: usize,
    pub k: usize,
    pub setting: String,
    pub trials: usize,
    pub successes: usize,
    pub time_min: Option<f64>,
    pub time_max: Option<f64>,
    pub time_median: Option<f64>,
    pub time_avg: Option<f64>,
    pub gen_min: Option<f64>,
    pub gen_max: Option<f64>,
    pub gen_median: Option<f64>,
    pub gen_avg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1 {
    pub cells: Vec<CellStats>,
    pub trials: Vec<Table1Trial>,
}

impl Table1 {
    pub fn failures(&self) -> Vec<Table1Trial> {
        self.trials.iter().filter(|t| !t.success).cloned().collect()
    }

    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        Ok(vec![
            write_rows(dir, "table1", &self.cells, format)?,
            write_rows(dir, "table1_raw", &self.trials, format)?,
            write_rows(dir, "table1_failures", &self.failures(), format)?,
        ])
    }
}

/// Cell statistics recomputed from the raw log, cells in first-seen order.
pub fn aggregate(trials: &[Table1Trial]) -> Vec<CellStats> {
    let mut keys: Vec<(usize, usize, &str)> = Vec::new();
    for t in trials {
        let key = (t.n, t.k, t.setting.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(n, k, setting)| {
            let cell: Vec<&Table1Trial> =
                trials.iter().filter(|t| (t.n, t.k, t.setting.as_str()) == (n, k, setting)).collect();
            let ok: Vec<&&Table1Trial> = cell.iter().filter(|t| t.success).collect();
            let gens = stats(&ok.iter().map(|t| t.generations as f64).collect::<Vec<_>>()).ok();
            let times: Option<Vec<f64>> = ok.iter().map(|t| t.time_s).collect();
            let times = times.and_then(|t| stats(&t).ok());
            CellStats {
                n,
                k,
                setting: setting.to_string(),
                trials: cell.len(),
                successes: ok.len(),
                time_min: times.map(|s| s.min),
                time_max: times.map(|s| s.max),
                time_median: times.map(|s| s.median),
                time_avg: times.map(|s| s.average),
                gen_min: gens.map(|s| s.min),
                gen_max: gens.map(|s| s.max),
                gen_median: gens.map(|s| s.median),
                gen_avg: gens.map(|s| s.average),
            }
        })
        .collect()
}

/// `trials_per_cell` attacks for every key length, block count and grid
/// point. Instances depend only on (seed, n, k, trial), so grid points are
/// compared on the same instances.
pub fn run_table1_campaign(spec: &ExperimentSpec, on_trial: &mut dyn FnMut(&Table1Trial)) -> Result<Table1> {
    spec.validate()?;
    let sequential = spec.attack.sequential;
    let mut trials = Vec::new();
    for &n in &spec.key_lengths {
        for &k in &spec.block_counts {
            for (setting, ga) in spec.settings()? {
                for trial in 0..spec.trials_per_cell {
                    let path = [n as u64, k as u64, trial as u64];
                    let instance_seed = derive_seed(spec.master_seed, &[INSTANCE_STREAM, path[0], path[1], path[2]]);
                    let attack_seed = derive_seed(spec.master_seed, &[ATTACK_STREAM, path[0], path[1], path[2]]);
                    let inst = gen_instance(n, k, None, None, &mut from_seed(instance_seed))?;
                    let bytes = inst.public_bytes();
                    let sha = sha256_hex(&bytes);
                    let run = run_pga(&bytes, &sha, spec, &ga, attack_seed, &inst.message)?;
                    let row = Table1Trial {
                        n,
                        k,
                        setting: setting.clone(),
                        trial,
                        instance_seed,
                        attack_seed,
                        instance_sha256: sha,
                        success: run.success,
                        generations: run.report.generations(),
                        time_s: seconds(run.report.total_elapsed, sequential),
                        resemblance: run.report.resemblance,
                        migrations_sent: run.report.migrations_sent,
                        migrations_accepted: run.report.migrations_accepted,
                    };
                    on_trial(&row);
                    trials.push(row);
                }
            }
        }
    }
    Ok(Table1 { cells: aggregate(&trials), trials })
}

// ---------------------------------------------------------------------------
// Paired success ratios per density bucket

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DensityTrial {
    pub n: usize,
    pub k: usize,
    pub bucket: String,
    pub trial: usize,
    pub instance_sha256: String,
    pub density: f64,
    pub ones_proportion: f64,
    pub pga_solved: bool,
    pub pga_generations: u64,
    pub pga_time_s: Option<f64>,
    pub pga_resemblance: Option<f64>,
    pub lll_solved: bool,
    pub lll_basis: String,
    pub lll_time_s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DensityBucketRow {
    pub n: usize,
    pub k: usize,
    pub bucket: String,
    pub instances: usize,
    pub pga_successes: usize,
    pub pga_ratio: Option<f64>,
    pub lll_successes: usize,
    pub lll_ratio: Option<f64>,
    /// `empty` when no instance could be generated for the bucket.
    pub flag: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub buckets: Vec<DensityBucketRow>,
    pub trials: Vec<DensityTrial>,
}

impl DensityTable {
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        Ok(vec![
            write_rows(dir, "density", &self.buckets, format)?,
            write_rows(dir, "density_raw", &self.trials, format)?,
        ])
    }
}

struct Paired {
    sha: String,
    density: f64,
    ones: f64,
    pga: PgaRun,
    lll: LllRun,
}

/// Both attacks on byte-identical copies of one instance.
fn run_paired(inst: &Instance, spec: &ExperimentSpec, attack_seed: u64) -> Result<Paired> {
    let bytes = inst.public_bytes();
    let sha = sha256_hex(&bytes);
    let pga = run_pga(&bytes.clone(), &sha, spec, &spec.attack.ga, attack_seed, &inst.message)?;
    let lll = run_lll(&bytes.clone(), &sha, spec)?;
    Ok(Paired { sha, density: density(&inst.public_key)?, ones: ones_proportion(&inst.message), pga, lll })
}

pub fn run_density_campaign(spec: &ExperimentSpec, on_trial: &mut dyn FnMut(&DensityTrial)) -> Result<DensityTable> {
    spec.validate()?;
    let sequential = spec.attack.sequential;
    let (mut buckets, mut trials) = (Vec::new(), Vec::new());
    for &n in &spec.key_lengths {
        for &k in &spec.block_counts {
            for (b, range) in spec.density_buckets.iter().enumerate() {
                let mut row = DensityBucketRow { n, k, bucket: range.to_string(), ..Default::default() };
                for trial in 0..spec.trials_per_cell {
                    let path = [n as u64, k as u64, b as u64, trial as u64];
                    let instance_seed =
                        derive_seed(spec.master_seed, &[INSTANCE_STREAM, 8, path[0], path[1], path[2], path[3]]);
                    let attack_seed =
                        derive_seed(spec.master_seed, &[ATTACK_STREAM, 8, path[0], path[1], path[2], path[3]]);
                    let inst = match gen_instance(n, k, Some(range), None, &mut from_seed(instance_seed)) {
                        Ok(inst) => inst,
                        Err(Error::TargetUnreachable { .. }) => continue,
                        Err(e) => return Err(e),
                    };
                    let p = run_paired(&inst, spec, attack_seed)?;
                    row.instances += 1;
                    row.pga_successes += p.pga.success as usize;
                    row.lll_successes += p.lll.success as usize;
                    let t = DensityTrial {
                        n,
                        k,
                        bucket: range.to_string(),
                        trial,
                        instance_sha256: p.sha,
                        density: p.density,
                        ones_proportion: p.ones,
                        pga_solved: p.pga.success,
                        pga_generations: p.pga.report.generations(),
                        pga_time_s: seconds(p.pga.report.total_elapsed, sequential),
                        pga_resemblance: p.pga.report.resemblance,
                        lll_solved: p.lll.success,
                        lll_basis: p.lll.basis,
                        lll_time_s: seconds(p.lll.elapsed, sequential),
                    };
                    on_trial(&t);
                    trials.push(t);
                }
                row.pga_ratio = ratio(row.pga_successes, row.instances);
                row.lll_ratio = ratio(row.lll_successes, row.instances);
                if row.instances == 0 {
                    row.flag = "empty".into();
                }
                buckets.push(row);
            }
        }
    }
    Ok(DensityTable { buckets, trials })
}

// ---------------------------------------------------------------------------
// Instance-by-instance comparison under a shared time limit

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub index: usize,
    pub n: usize,
    pub k: usize,
    pub density: f64,
    pub ones_proportion: f64,
    pub pga_solved: bool,
    pub lll_solved: bool,
    pub pga_generations: u64,
    pub pga_time_s: Option<f64>,
    pub lll_time_s: Option<f64>,
    pub instance_sha256: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub instances: usize,
    pub pga_successes: usize,
    pub pga_ratio: Option<f64>,
    pub lll_successes: usize,
    pub lll_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub records: Vec<ComparisonRecord>,
    pub summary: ComparisonSummary,
}

impl Comparison {
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        Ok(vec![
            write_rows(dir, "compare", &self.records, format)?,
            write_rows(dir, "compare_summary", std::slice::from_ref(&self.summary), format)?,
        ])
    }
}

/// Instance `i` takes key length `i mod L` and density bucket
/// `(i div L) mod B`, cycling through the grid.
pub fn comparison_cell(spec: &ExperimentSpec, i: usize) -> (usize, DensityRange) {
    let l = spec.key_lengths.len();
    (spec.key_lengths[i % l], spec.density_buckets[(i / l) % spec.density_buckets.len()])
}

pub fn run_comparison(spec: &ExperimentSpec, on_record: &mut dyn FnMut(&ComparisonRecord)) -> Result<Comparison> {
    spec.validate()?;
    let sequential = spec.attack.sequential;
    let count = spec.instances.unwrap_or(spec.key_lengths.len() * spec.density_buckets.len() * spec.trials_per_cell);
    let k = spec.block_counts[0];
    let mut records = Vec::with_capacity(count);
    for index in 0..count {
        let (n, range) = comparison_cell(spec, index);
        let instance_seed = derive_seed(spec.master_seed, &[INSTANCE_STREAM, 9, index as u64]);
        let attack_seed = derive_seed(spec.master_seed, &[ATTACK_STREAM, 9, index as u64]);
        let inst = gen_instance(n, k, Some(&range), None, &mut from_seed(instance_seed))?;
        let p = run_paired(&inst, spec, attack_seed)?;
        let record = ComparisonRecord {
            index,
            n,
            k,
            density: p.density,
            ones_proportion: p.ones,
            pga_solved: p.pga.success,
            lll_solved: p.lll.success,
            pga_generations: p.pga.report.generations(),
            pga_time_s: seconds(p.pga.report.total_elapsed, sequential),
            lll_time_s: seconds(p.lll.elapsed, sequential),
            instance_sha256: p.sha,
        };
        on_record(&record);
        records.push(record);
    }
    let pga_successes = records.iter().filter(|r| r.pga_solved).count();
    let lll_successes = records.iter().filter(|r| r.lll_solved).count();
    let summary = ComparisonSummary {
        instances: records.len(),
        pga_successes,
        pga_ratio: ratio(pga_successes, records.len()),
        lll_successes,
        lll_ratio: ratio(lll_successes, records.len()),
    };
    Ok(Comparison { records, summary })
}
