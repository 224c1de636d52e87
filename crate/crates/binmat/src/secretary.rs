//! Secretary-style experiments with adversarial indicator weights:
//! weight sampling, sample/non-sample splits, partition mappings built
//! after seeing the sample, per-trial structural bound checks, the trivial
//! improving-element algorithm, and a reproducible Monte Carlo harness.
//!
//! Randomness discipline: every experiment derives one ChaCha8 stream per
//! trial from (root seed, trial index), so trials are reproducible and
//! independent regardless of execution order or thread count.

use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gf2::{self, Gf2Basis, Gf2Vector, VectorSet, MAX_ENUM_DIM};
use crate::matroid::{rank_of_distinct, PartitionReduction, WeightedElement};
use crate::reduction::check_reduction_randomized;
use crate::structure::extract_heavy_parts;
use crate::{Error, Result};

// ============================================================================
// Adversarial weights
// ============================================================================

/// Indicator weights 1_X for a multiset X of d vectors drawn uniformly with
/// replacement. The binary-matroid optimum under these weights is the rank
/// of the distinct draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightAssignment {
    dim: u8,
    x: Vec<Gf2Vector>,
}

impl WeightAssignment {
    /// Wraps an explicit multiset; it must contain exactly `d` vectors of
    /// dimension `d`.
    pub fn new(dim: u32, x: Vec<Gf2Vector>) -> Result<Self> {
        if dim == 0 || dim > MAX_ENUM_DIM {
            return Err(Error::DimensionOutOfRange {
                dim,
                max: MAX_ENUM_DIM,
            });
        }
        if x.len() != dim as usize {
            return Err(Error::InvalidArgument(format!(
                "weight multiset must hold exactly d={dim} draws, got {}",
                x.len()
            )));
        }
        for &v in &x {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
        }
        Ok(Self { dim: dim as u8, x })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim as u32
    }

    /// The draws, with multiplicity.
    #[inline]
    pub fn x_multiset(&self) -> &[Gf2Vector] {
        &self.x
    }

    pub fn weight(&self, v: Gf2Vector) -> f64 {
        if self.x.contains(&v) {
            1.0
        } else {
            0.0
        }
    }

    /// opt over the complete binary matroid = rank of the distinct draws.
    pub fn opt_binary(&self) -> u32 {
        rank_of_distinct(self.dim(), &self.x).expect("dims verified") as u32
    }
}

/// Draws d i.i.d. uniform vectors from GF(2)^d (the zero vector included;
/// it is a loop and never helps any optimum).
pub fn sample_adversarial_weights<R: Rng + ?Sized>(
    d: u32,
    rng: &mut R,
) -> Result<WeightAssignment> {
    if d == 0 || d > MAX_ENUM_DIM {
        return Err(Error::DimensionOutOfRange {
            dim: d,
            max: MAX_ENUM_DIM,
        });
    }
    let mask = (1u32 << d) - 1;
    let x = (0..d)
        .map(|_| Gf2Vector::new(rng.random::<u32>() & mask, d).expect("masked"))
        .collect();
    WeightAssignment::new(d, x)
}

// ============================================================================
// Expected rank of the draws
// ============================================================================

/// Exact E[rank(X)] for d uniform draws with replacement, by dynamic
/// programming over the current span dimension r: each draw increments r
/// with probability (2^d - 2^r) / 2^d. The result is checked against the
/// d/2 lower bound (each step increments with probability >= 1/2 while
/// r < d) before returning.
pub fn exact_expected_rank(d: u32) -> Result<BigRational> {
    if d == 0 || d > MAX_ENUM_DIM {
        return Err(Error::DimensionOutOfRange {
            dim: d,
            max: MAX_ENUM_DIM,
        });
    }
    let space = BigInt::from(1u64 << d);
    let n = d as usize;
    let mut probs: Vec<BigRational> = vec![BigRational::zero(); n + 1];
    probs[0] = BigRational::one();
    for _ in 0..n {
        let mut next: Vec<BigRational> = vec![BigRational::zero(); n + 1];
        for (r, p) in probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let stay = BigRational::new(BigInt::from(1u64 << r), space.clone());
            let grow = BigRational::one() - stay.clone();
            next[r] += p * stay;
            if r < n {
                next[r + 1] += p * grow;
            }
        }
        probs = next;
    }
    let expected: BigRational = probs
        .iter()
        .enumerate()
        .map(|(r, p)| p * BigRational::from(BigInt::from(r)))
        .sum();
    let half_d = BigRational::new(BigInt::from(d), BigInt::from(2));
    assert!(
        expected >= half_d,
        "expected rank fell below d/2 at d={d}: implementation bug"
    );
    Ok(expected)
}

// ============================================================================
// Sample split
// ============================================================================

/// A sample S (uniform subset of GF(2)^d of fixed size) together with the
/// split of the weight multiset: x1 = copies landing in S, x2 = copies in
/// the complement.
#[derive(Clone, Debug)]
pub struct SampleSplit {
    pub sample: VectorSet,
    pub x1: Vec<Gf2Vector>,
    pub x2: Vec<Gf2Vector>,
}

/// Uniform random subset of exactly `size` of the 2^d vectors
/// (Floyd's algorithm: `size` draws, no rejection loop).
pub fn sample_subset<R: Rng + ?Sized>(d: u32, size: u64, rng: &mut R) -> Result<VectorSet> {
    let mut set = VectorSet::empty(d)?;
    let space = 1u64 << d;
    if size > space {
        return Err(Error::InvalidArgument(format!(
            "sample size {size} exceeds 2^{d}"
        )));
    }
    for j in (space - size)..space {
        let t = rng.random_range(0..=j as u32);
        if !set.insert_bits(t) {
            set.insert_bits(j as u32);
        }
    }
    Ok(set)
}

/// Splits the weight multiset by membership of each copy in a fresh
/// uniform sample of the requested size.
pub fn split_sample<R: Rng + ?Sized>(
    x: &WeightAssignment,
    sample_size: u64,
    rng: &mut R,
) -> Result<SampleSplit> {
    let sample = sample_subset(x.dim(), sample_size, rng)?;
    let mut x1 = Vec::new();
    let mut x2 = Vec::new();
    for &v in x.x_multiset() {
        if sample.contains(v) {
            x1.push(v);
        } else {
            x2.push(v);
        }
    }
    Ok(SampleSplit { sample, x1, x2 })
}

// ============================================================================
// Partition optimum under indicator weights
// ============================================================================

/// With indicator weights, the partition-matroid optimum is the number of
/// parts hit by at least one copy of x2 (one unit of weight per part).
pub fn opt_on_partition(p: &PartitionReduction, x2: &[Gf2Vector]) -> u32 {
    let mut hit: u32 = 0;
    for &v in x2 {
        if let Some(i) = p.part_of(v) {
            hit |= 1 << i;
        }
    }
    hit.count_ones()
}

// ============================================================================
// Trivial improving-element algorithm
// ============================================================================

/// Takes every improving element as it arrives: an element is accepted iff
/// its weight is positive and it extends the independent set kept so far.
/// Under indicator weights every maximal independent subset of X has
/// rank(X) elements, so the accepted weight equals the offline optimum for
/// every arrival order.
pub fn trivial_greedy(d: u32, arrival: &[WeightedElement]) -> Result<(Vec<Gf2Vector>, f64)> {
    let mut basis = Gf2Basis::new(d)?;
    let mut accepted = Vec::new();
    let mut total = 0.0;
    for e in arrival {
        if !(e.weight >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight must be non-negative, got {}",
                e.weight
            )));
        }
        if e.weight > 0.0 && basis.insert(e.vector)? {
            accepted.push(e.vector);
            total += e.weight;
        }
    }
    Ok((accepted, total))
}

// ============================================================================
// Partition mappings
// ============================================================================

/// A procedure mapping (sample, restricted weights, trial randomness) to a
/// partition reduction whose parts lie outside the sample. Mappings must
/// be pure in their inputs so trials stay independent and reproducible.
pub trait PartitionMapping: Send + Sync {
    fn label(&self) -> &'static str;

    fn build(
        &self,
        sample: &VectorSet,
        sample_weights: &[WeightedElement],
        rng: &mut dyn RngCore,
    ) -> Result<PartitionReduction>;
}

fn restricted_leading_bit_parts(
    d: u32,
    sample: &VectorSet,
    table: Option<&gf2::Gl2ApplyTable>,
) -> Result<PartitionReduction> {
    let mut parts: Vec<Vec<Gf2Vector>> = vec![Vec::new(); d as usize];
    for (b, part) in parts.iter_mut().enumerate() {
        for bits in 1u32 << b..1u32 << (b + 1) {
            let image = match table {
                Some(t) => t.apply_bits(bits),
                None => bits,
            };
            if !sample.contains_bits(image) {
                part.push(Gf2Vector::new(image, d).expect("in range"));
            }
        }
    }
    let mut p = PartitionReduction::new(d, parts)?;
    // Restriction of a valid reduction (or of its GL image) stays valid.
    p.set_validated(true);
    Ok(p)
}

/// Leading-bit parts restricted to the non-sample.
#[derive(Clone, Copy, Debug, Default)]
pub struct LeadingBitMapping;

impl PartitionMapping for LeadingBitMapping {
    fn label(&self) -> &'static str {
        "leading-bit"
    }

    fn build(
        &self,
        sample: &VectorSet,
        _sample_weights: &[WeightedElement],
        _rng: &mut dyn RngCore,
    ) -> Result<PartitionReduction> {
        restricted_leading_bit_parts(sample.dim(), sample, None)
    }
}

/// Image of the leading-bit parts under a fresh uniformly random
/// invertible map, restricted to the non-sample.
#[derive(Clone, Copy, Debug, Default)]
pub struct GlImageMapping;

impl PartitionMapping for GlImageMapping {
    fn label(&self) -> &'static str {
        "gl-image"
    }

    fn build(
        &self,
        sample: &VectorSet,
        _sample_weights: &[WeightedElement],
        rng: &mut dyn RngCore,
    ) -> Result<PartitionReduction> {
        let d = sample.dim();
        let m = gf2::random_gl2(d, rng)?;
        restricted_leading_bit_parts(d, sample, Some(&m.apply_table()))
    }
}

/// Builds a basis from the positive-weight sample vectors (weight
/// descending, ties by encoding), completes it with unit vectors, and uses
/// the GL image of the leading-bit parts under that basis change. Sampled
/// directions become images of low unit vectors, i.e. land in the smallest
/// parts.
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedySampleWeightMapping;

impl PartitionMapping for GreedySampleWeightMapping {
    fn label(&self) -> &'static str {
        "greedy-sample-weight"
    }

    fn build(
        &self,
        sample: &VectorSet,
        sample_weights: &[WeightedElement],
        _rng: &mut dyn RngCore,
    ) -> Result<PartitionReduction> {
        let d = sample.dim();
        let mut pool: Vec<WeightedElement> = sample_weights
            .iter()
            .copied()
            .filter(|e| e.weight > 0.0 && !e.vector.is_zero())
            .collect();
        pool.sort_by(|a, b| {
            b.weight
                .total_cmp(&a.weight)
                .then(a.vector.bits().cmp(&b.vector.bits()))
        });

        let mut basis = Gf2Basis::new(d)?;
        let mut columns: Vec<u32> = Vec::with_capacity(d as usize);
        for e in &pool {
            if basis.insert(e.vector)? {
                columns.push(e.vector.bits());
            }
        }
        for i in 0..d {
            let unit = Gf2Vector::unit(i, d)?;
            if basis.insert(unit)? {
                columns.push(unit.bits());
            }
        }
        let m = gf2::Gl2Map::from_columns(d, columns)?;
        restricted_leading_bit_parts(d, sample, Some(&m.apply_table()))
    }
}

/// Named mapping selector for configs and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingSpec {
    LeadingBit,
    GlImage,
    GreedySampleWeight,
}

impl MappingSpec {
    pub fn instantiate(self) -> Box<dyn PartitionMapping> {
        match self {
            Self::LeadingBit => Box::new(LeadingBitMapping),
            Self::GlImage => Box::new(GlImageMapping),
            Self::GreedySampleWeight => Box::new(GreedySampleWeightMapping),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::LeadingBit => "leading-bit",
            Self::GlImage => "gl-image",
            Self::GreedySampleWeight => "greedy-sample-weight",
        }
    }
}

impl std::str::FromStr for MappingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leading-bit" => Ok(Self::LeadingBit),
            "gl-image" => Ok(Self::GlImage),
            "greedy-sample-weight" => Ok(Self::GreedySampleWeight),
            other => Err(Error::InvalidArgument(format!(
                "unknown mapping {other:?} (expected leading-bit, gl-image, or greedy-sample-weight)"
            ))),
        }
    }
}

// ============================================================================
// Trials
// ============================================================================

/// One Monte Carlo trial.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrialRecord {
    pub opt_m: u32,
    pub opt_p: u32,
    pub x1_size: u32,
    /// Copies of x2 landing in the union of the surviving heavy-part set.
    pub x2_in_heavy: u32,
    pub removals: u32,
    /// opt_p <= x2_in_heavy + removals, the per-trial structural bound
    /// (the actual removal count stands in for its 8*sqrt(d) cap, which is
    /// strictly sharper and still sound).
    pub bound_ok: bool,
}

/// Runs one trial: sample adversarial weights, split by a fresh sample,
/// build the partition reduction from the mapping, and record both optima
/// and the per-trial bound. With `spot_check`, the mapping output is
/// screened (parts outside the sample, randomized validity) and failures
/// surface as errors.
pub fn run_trial(
    d: u32,
    mapping: &dyn PartitionMapping,
    sample_size: u64,
    rng: &mut ChaCha8Rng,
    spot_check: bool,
) -> Result<TrialRecord> {
    let x = sample_adversarial_weights(d, rng)?;
    let split = split_sample(&x, sample_size, rng)?;
    let sample_weights: Vec<WeightedElement> = split
        .x1
        .iter()
        .map(|&v| WeightedElement {
            vector: v,
            weight: 1.0,
        })
        .collect();
    let p = mapping.build(&split.sample, &sample_weights, rng)?;
    if spot_check {
        for part in p.parts() {
            for &v in part {
                if split.sample.contains(v) {
                    return Err(Error::InvalidMapping(format!(
                        "mapping {} placed sample element {v} in a part",
                        mapping.label()
                    )));
                }
            }
        }
        let cert = check_reduction_randomized(&p, 32, rng)?;
        if !cert.valid {
            return Err(Error::InvalidMapping(format!(
                "mapping {} failed a randomized validity spot-check",
                mapping.label()
            )));
        }
    }

    let opt_p = opt_on_partition(&p, &split.x2);
    let opt_m = x.opt_binary();
    let heavy = extract_heavy_parts(&p)?;
    let t_mask: u32 = heavy.t_set.iter().fold(0u32, |m, &i| m | (1 << i));
    let x2_in_heavy = split
        .x2
        .iter()
        .filter(|&&v| p.part_of(v).is_some_and(|i| (t_mask >> i) & 1 == 1))
        .count() as u32;
    Ok(TrialRecord {
        opt_m,
        opt_p,
        x1_size: split.x1.len() as u32,
        x2_in_heavy,
        removals: heavy.removals,
        bound_ok: opt_p <= x2_in_heavy + heavy.removals,
    })
}

fn greedy_trial(d: u32, rng: &mut ChaCha8Rng) -> Result<TrialRecord> {
    use rand::seq::SliceRandom;
    let x = sample_adversarial_weights(d, rng)?;
    let mut arrival: Vec<WeightedElement> = x
        .x_multiset()
        .iter()
        .map(|&v| WeightedElement {
            vector: v,
            weight: 1.0,
        })
        .collect();
    arrival.shuffle(rng);
    let (accepted, _) = trivial_greedy(d, &arrival)?;
    Ok(TrialRecord {
        opt_m: x.opt_binary(),
        opt_p: accepted.len() as u32,
        x1_size: 0,
        x2_in_heavy: 0,
        removals: 0,
        bound_ok: true,
    })
}

// ============================================================================
// Experiments
// ============================================================================

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Offline partition optimum after the sample-based reduction; an
    /// upper bound on any one-per-part selection strategy.
    #[default]
    PartitionReduction,
    /// The improving-element baseline (ratio exactly 1 on indicators).
    TrivialGreedy,
}

/// Experiment configuration; the JSON wire format accepts either
/// `"sample_size": <int>` or `"fraction": <float in [0, 1]>`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: u32,
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    #[serde(default = "default_mapping")]
    pub mapping: MappingSpec,
    #[serde(default)]
    pub algorithm: Algorithm,
    pub seed: u64,
}

fn default_mapping() -> MappingSpec {
    MappingSpec::LeadingBit
}

impl ExperimentConfig {
    pub fn resolved_sample_size(&self) -> Result<u64> {
        let space = 1u64 << self.d;
        match (self.sample_size, self.fraction) {
            (Some(_), Some(_)) => Err(Error::InvalidArgument(
                "config sets both sample_size and fraction".into(),
            )),
            (Some(s), None) => {
                if s > space {
                    return Err(Error::InvalidArgument(format!(
                        "sample_size {s} exceeds 2^{}",
                        self.d
                    )));
                }
                Ok(s)
            }
            (None, Some(f)) => {
                if !(0.0..=1.0).contains(&f) {
                    return Err(Error::InvalidArgument(format!(
                        "fraction must be in [0, 1], got {f}"
                    )));
                }
                Ok(((f * space as f64).round() as u64).min(space))
            }
            (None, None) => Ok(0),
        }
    }
}

/// Execution knobs that do not change the statistical content of a report:
/// thread count, per-trial record retention, validity spot-checking.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExperimentOptions {
    pub jobs: Option<usize>,
    pub keep_trials: bool,
    pub spot_check: bool,
}

/// Aggregate experiment result. All means and standard errors derive from
/// exact integer sums over the per-trial records in trial order, so an
/// identical config yields a bit-identical report at any thread count.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub d: u32,
    pub trials: u64,
    pub sample_size: u64,
    pub mapping: &'static str,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub mean_opt_p: f64,
    pub mean_opt_m: f64,
    /// mean_opt_p / mean_opt_m (0 when the denominator is 0).
    pub ratio: f64,
    /// Standard error of mean_opt_p.
    pub std_error: f64,
    pub std_error_opt_m: f64,
    pub bound_checked: u64,
    pub bound_violations: u64,
    /// Analytic comparator 2 d^(3/4).
    pub two_d_three_quarters: f64,
    /// Analytic comparator 4 d^(-1/4) * mean_opt_m.
    pub four_d_neg_quarter_times_mean_opt_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial_records: Option<Vec<TrialRecord>>,
}

fn standard_error(sum: u64, sum_sq: u64, n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let var = (sum_sq as f64 - nf * mean * mean) / (nf - 1.0);
    (var.max(0.0) / nf).sqrt()
}

/// Runs `config.trials` independent trials and aggregates them in trial
/// order. Trial i uses ChaCha8 stream i+1 of the root seed.
pub fn run_experiment(
    config: &ExperimentConfig,
    options: &ExperimentOptions,
) -> Result<ExperimentReport> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if config.d == 0 || config.d > MAX_ENUM_DIM {
        return Err(Error::DimensionOutOfRange {
            dim: config.d,
            max: MAX_ENUM_DIM,
        });
    }
    let sample_size = config.resolved_sample_size()?;
    let mapping = config.mapping.instantiate();

    let run_all = || -> Result<Vec<TrialRecord>> {
        (0..config.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(i + 1);
                match config.algorithm {
                    Algorithm::PartitionReduction => run_trial(
                        config.d,
                        mapping.as_ref(),
                        sample_size,
                        &mut rng,
                        options.spot_check,
                    ),
                    Algorithm::TrivialGreedy => greedy_trial(config.d, &mut rng),
                }
            })
            .collect()
    };
    let records = match options.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("bad thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    }?;

    let n = config.trials;
    let (mut sum_p, mut sum_m, mut sq_p, mut sq_m) = (0u64, 0u64, 0u64, 0u64);
    let mut violations = 0u64;
    for r in &records {
        sum_p += u64::from(r.opt_p);
        sum_m += u64::from(r.opt_m);
        sq_p += u64::from(r.opt_p) * u64::from(r.opt_p);
        sq_m += u64::from(r.opt_m) * u64::from(r.opt_m);
        if !r.bound_ok {
            violations += 1;
        }
    }
    let mean_p = sum_p as f64 / n as f64;
    let mean_m = sum_m as f64 / n as f64;
    let df = f64::from(config.d);
    Ok(ExperimentReport {
        d: config.d,
        trials: n,
        sample_size,
        mapping: config.mapping.label(),
        algorithm: config.algorithm,
        seed: config.seed,
        mean_opt_p: mean_p,
        mean_opt_m: mean_m,
        ratio: if mean_m > 0.0 { mean_p / mean_m } else { 0.0 },
        std_error: standard_error(sum_p, sq_p, n),
        std_error_opt_m: standard_error(sum_m, sq_m, n),
        bound_checked: match config.algorithm {
            Algorithm::PartitionReduction => n,
            Algorithm::TrivialGreedy => 0,
        },
        bound_violations: violations,
        two_d_three_quarters: 2.0 * df.powf(0.75),
        four_d_neg_quarter_times_mean_opt_m: 4.0 * df.powf(-0.25) * mean_m,
        trial_records: options.keep_trials.then_some(records),
    })
}

// ============================================================================
// Tests
// ============================================================================
