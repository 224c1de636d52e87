//! Structural computations on partition reductions: cross-part pair
//! counting, the max-part lower bound, heavy-part extraction, the density
//! invariant beta, and covering numbers with explicit certified covers.
//!
//! Threshold comparisons are done in exact integer arithmetic by
//! cross-multiplying fractions and fourth powers; floating point near a
//! threshold would make the certificates unsound. Concretely,
//! `u >= 2^d / d^(1/4)` is decided as `u^4 * d >= 2^(4d)` in 128-bit
//! integers.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::gf2::{self, Gf2Basis, Gf2Vector, VectorSet, MAX_DIM, MAX_ENUM_DIM};
use crate::matroid::PartitionReduction;
use crate::reduction::PAIR_LOOP_MAX_ELEMENTS;
use crate::{Error, Result};

/// Flat enumeration for general ground sets is capped here.
pub const BETA_ENUM_MAX_DIM: u32 = 6;

/// Constructive cover search is capped here.
pub const COVER_CONSTRUCT_MAX_DIM: u32 = 10;

/// Restart budget for the randomized greedy cover construction.
pub const COVER_RESTARTS: u32 = 200;

// ============================================================================
// Pair counting
// ============================================================================

/// Exact classification of all cross-part pair sums, with the
/// `2 * max|P_i| * |R|` bound on sums landing in the residual set R.
#[derive(Clone, Debug, Serialize)]
pub struct PairCountReport {
    pub cross_pairs_total: u64,
    pub pairs_into_r: u64,
    pub pairs_into_parts: u64,
    pub bound_lemma1: u64,
    pub max_part: u64,
    pub r_size: u64,
    pub bound_holds: bool,
}

/// Counts every pair (x in part i, y in part j, i < j) and classifies
/// x + y as landing in some part or in R = GF(2)^d minus the part union.
pub fn count_pairs(p: &PartitionReduction) -> Result<PairCountReport> {
    let n = p.total_elements();
    if n > PAIR_LOOP_MAX_ELEMENTS {
        return Err(Error::GuardExceeded(format!(
            "pair loop supports at most {PAIR_LOOP_MAX_ELEMENTS} elements, got {n}"
        )));
    }
    let parts = p.parts();
    let mut into_r = 0u64;
    let mut into_parts = 0u64;
    let mut total = 0u64;
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            for &x in &parts[i] {
                for &y in &parts[j] {
                    total += 1;
                    match p.part_of(x.xor(y)) {
                        None => into_r += 1,
                        Some(_) => into_parts += 1,
                    }
                }
            }
        }
    }
    let max_part = p.max_part_size() as u64;
    let r_size = (1u64 << p.dim()) - n as u64;
    let bound = 2 * max_part * r_size;
    Ok(PairCountReport {
        cross_pairs_total: total,
        pairs_into_r: into_r,
        pairs_into_parts: into_parts,
        bound_lemma1: bound,
        max_part,
        r_size,
        bound_holds: into_r <= bound,
    })
}

// ============================================================================
// Max-part lower bound
// ============================================================================

/// The max-part bound: with n = sum of part sizes and c = n / 2^d, a valid
/// reduction must have some part larger than c * n / 8. All quantities are
/// exact rationals; `holds` is decided by integer cross-multiplication.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma3Report {
    pub n: u64,
    pub max_part: u64,
    pub c_num: u64,
    pub c_den: u64,
    pub bound_num: u64,
    pub bound_den: u64,
    pub holds: bool,
}

pub fn check_lemma3(p: &PartitionReduction) -> Lemma3Report {
    let d = p.dim();
    let n = p.total_elements() as u64;
    let max_part = p.max_part_size() as u64;
    // c = n / 2^d, bound = c * n / 8 = n^2 / 2^(d+3).
    // holds <=> max_part * 2^(d+3) > n^2; vacuous for empty reductions
    // (the bound's premise needs c > 0).
    let holds = n == 0 || max_part * (1u64 << (d + 3)) > n * n;
    Lemma3Report {
        n,
        max_part,
        c_num: n,
        c_den: 1u64 << d,
        bound_num: n * n,
        bound_den: 1u64 << (d + 3),
        holds,
    }
}

// ============================================================================
// Heavy-part extraction
// ============================================================================

/// Result of greedily removing largest parts until the union of the
/// surviving parts drops below 2^d / d^(1/4).
#[derive(Clone, Debug, Serialize)]
pub struct HeavyPartReport {
    /// Surviving part indices (0-based, ascending).
    pub t_set: Vec<usize>,
    /// Removed part indices in removal order.
    pub removed: Vec<usize>,
    pub union_size_final: u64,
    pub removals: u32,
    /// floor(2^d / d^(1/4)), informational; the loop compares exactly.
    pub threshold: u64,
    /// ceil(8 * sqrt(d)): certified-valid inputs may not exceed this.
    pub removal_cap: u32,
}

/// True iff `union >= 2^d / d^(1/4)`, exactly.
#[inline]
fn union_at_or_above_threshold(union: u64, d: u32) -> bool {
    debug_assert!(d >= 1 && d <= MAX_ENUM_DIM);
    let lhs = (union as u128).pow(4) * d as u128;
    lhs >= 1u128 << (4 * d)
}

/// floor(2^d / d^(1/4)) by binary search on u^4 * d <= 2^(4d).
fn floor_threshold(d: u32) -> u64 {
    let (mut lo, mut hi) = (0u64, 1u64 << d);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if (mid as u128).pow(4) * d as u128 <= 1u128 << (4 * d) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// ceil(8 * sqrt(d)): smallest k with k^2 >= 64 d.
fn removal_cap(d: u32) -> u32 {
    let mut k = (64.0 * f64::from(d)).sqrt().floor() as u32;
    while u64::from(k) * u64::from(k) < 64 * u64::from(d) {
        k += 1;
    }
    while k > 0 && u64::from(k - 1) * u64::from(k - 1) >= 64 * u64::from(d) {
        k -= 1;
    }
    k
}

/// Starting from all parts, repeatedly removes the largest remaining part
/// (ties: lowest index) while the remaining union is at least
/// 2^d / d^(1/4). On certified-valid input, exceeding ceil(8 sqrt d)
/// removals is reported as an integrity failure — it would contradict a
/// guaranteed bound, meaning an implementation bug.
pub fn extract_heavy_parts(p: &PartitionReduction) -> Result<HeavyPartReport> {
    let d = p.dim();
    let sizes: Vec<u64> = p.part_sizes().iter().map(|&s| s as u64).collect();
    let cap = removal_cap(d);

    let mut in_t: Vec<bool> = vec![true; sizes.len()];
    let mut union: u64 = sizes.iter().sum();
    let mut removed: Vec<usize> = Vec::new();

    while union_at_or_above_threshold(union, d) {
        let j = (0..sizes.len())
            .filter(|&i| in_t[i])
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .expect("union > 0 implies a nonempty remaining part");
        in_t[j] = false;
        union -= sizes[j];
        removed.push(j);
        if p.is_validated() && removed.len() > cap as usize {
            return Err(Error::IntegrityFailure(format!(
                "heavy-part extraction needed {} removals on a certified-valid \
                 reduction at d={d}, above the guaranteed cap {cap}",
                removed.len()
            )));
        }
    }

    let t_set: Vec<usize> = (0..sizes.len()).filter(|&i| in_t[i]).collect();
    Ok(HeavyPartReport {
        removals: removed.len() as u32,
        t_set,
        removed,
        union_size_final: union,
        threshold: floor_threshold(d),
        removal_cap: cap,
    })
}

// ============================================================================
// Beta and covering numbers
// ============================================================================

/// Density invariant and covering data. `beta_num / beta_den` is the
/// maximum of |F| / rank(F) over nonempty subsets F of the ground set,
/// reported unreduced; the covering number equals its ceiling.
#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub beta_num: u64,
    pub beta_den: u64,
    pub witness_flat_rank: u32,
    pub covering_number: u64,
    /// Explicit cover by independent sets, when constructed and certified.
    pub cover: Option<Vec<Vec<Gf2Vector>>>,
    /// Greedy restarts consumed by the construction (0 = not attempted).
    pub restarts_used: u32,
}

/// Closed form for the full ground set GF(2)^d minus zero:
/// beta = (2^d - 1) / d, attained at the whole set (a flat of rank d).
pub fn beta_full(d: u32) -> Result<(u64, u64)> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::DimensionOutOfRange { dim: d, max: MAX_DIM });
    }
    Ok(((1u64 << d) - 1, u64::from(d)))
}

/// All linear subspaces of GF(2)^d as 64-bit membership masks (bit v set
/// iff vector v is in the subspace), for d <= 6. Deterministic order.
fn enumerate_subspaces(d: u32) -> Vec<u64> {
    debug_assert!(d <= BETA_ENUM_MAX_DIM);
    let space = 1u32 << d;
    let mut found = std::collections::BTreeSet::new();
    found.insert(1u64); // the zero subspace {0}
    let mut queue = vec![1u64];
    while let Some(s) = queue.pop() {
        for v in 1..space {
            if (s >> v) & 1 == 0 {
                // span(s ∪ {v}) = s ∪ (s ^ v)
                let grown = s | gf2::xor_permute_word(s, v);
                if found.insert(grown) {
                    queue.push(grown);
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Beta of the binary matroid restricted to `ground`.
///
/// For the full nonzero ground set the closed form applies at any
/// dimension. General ground sets enumerate all subspaces (the maximum is
/// attained at flats, i.e. subspace intersections), which is feasible only
/// for d <= 6. The zero vector is a loop and is rejected.
pub fn compute_beta(ground: &[Gf2Vector], d: u32) -> Result<CoverReport> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::DimensionOutOfRange { dim: d, max: MAX_DIM });
    }
    let mut distinct: Vec<u32> = Vec::with_capacity(ground.len());
    for &v in ground {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.dim(),
            });
        }
        if v.is_zero() {
            return Err(Error::InvalidArgument(
                "ground set contains the zero vector, a loop; beta is undefined".into(),
            ));
        }
        distinct.push(v.bits());
    }
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.is_empty() {
        return Err(Error::InvalidArgument("ground set is empty".into()));
    }

    if distinct.len() as u64 == (1u64 << d) - 1 {
        let (num, den) = beta_full(d)?;
        return Ok(CoverReport {
            beta_num: num,
            beta_den: den,
            witness_flat_rank: d,
            covering_number: num.div_ceil(den),
            cover: None,
            restarts_used: 0,
        });
    }

    if d > BETA_ENUM_MAX_DIM {
        return Err(Error::GuardExceeded(format!(
            "flat enumeration supports d <= {BETA_ENUM_MAX_DIM}, got d={d}"
        )));
    }

    let mut ground_mask = 0u64;
    for &bits in &distinct {
        ground_mask |= 1 << bits;
    }
    let (size, rk) = beta_by_flat_enumeration(ground_mask, d)?;
    Ok(CoverReport {
        beta_num: size,
        beta_den: u64::from(rk),
        witness_flat_rank: rk,
        covering_number: size.div_ceil(u64::from(rk)),
        cover: None,
        restarts_used: 0,
    })
}

/// Maximizes |F ∩ ground| / rank over all subspaces F, returning the
/// unreduced (size, rank) pair. On ratio ties the larger flat wins (the
/// maximum is attained at flats; report the outermost one).
fn beta_by_flat_enumeration(ground_mask: u64, d: u32) -> Result<(u64, u32)> {
    debug_assert!(d <= BETA_ENUM_MAX_DIM);
    let mut best: Option<(u64, u32)> = None;
    for s in enumerate_subspaces(d) {
        let f = s & ground_mask;
        if f == 0 {
            continue;
        }
        let size = u64::from(f.count_ones());
        let members: Vec<Gf2Vector> = (0..1u32 << d)
            .filter(|&v| (f >> v) & 1 == 1)
            .map(|v| Gf2Vector::new(v, d).expect("in range"))
            .collect();
        let rk = gf2::rank(members)? as u32;
        let better = match best {
            None => true,
            Some((bs, br)) => {
                let lhs = size as u128 * br as u128;
                let rhs = bs as u128 * rk as u128;
                lhs > rhs || (lhs == rhs && size > bs)
            }
        };
        if better {
            best = Some((size, rk));
        }
    }
    Ok(best.expect("nonempty ground intersects the full space"))
}

/// Checks that `cover` is a partition of GF(2)^d minus zero into exactly
/// `expected_sets` independent sets.
pub fn verify_cover(d: u32, expected_sets: u64, cover: &[Vec<Gf2Vector>]) -> Result<()> {
    if cover.len() as u64 != expected_sets {
        return Err(Error::IntegrityFailure(format!(
            "cover has {} sets, expected {expected_sets}",
            cover.len()
        )));
    }
    let mut seen = VectorSet::empty(d)?;
    for set in cover {
        if set.len() > d as usize || gf2::rank(set.iter().copied())? != set.len() {
            return Err(Error::IntegrityFailure(
                "cover contains a dependent set".into(),
            ));
        }
        for &v in set {
            if v.is_zero() || !seen.insert(v) {
                return Err(Error::IntegrityFailure(
                    "cover sets overlap or contain zero".into(),
                ));
            }
        }
    }
    if seen.len() as u64 != (1u64 << d) - 1 {
        return Err(Error::IntegrityFailure(format!(
            "cover misses elements: {} of {}",
            seen.len(),
            (1u64 << d) - 1
        )));
    }
    Ok(())
}

/// Covering number of the nonzero vectors of GF(2)^d, with an explicit
/// cover constructed for d <= 10 by greedy maximal-independent extraction
/// over randomly reshuffled elements, restarting on failure. The target
/// count ceil((2^d - 1) / d) is guaranteed feasible, so restarts only
/// paper over greedy unluckiness; if the budget runs out the report
/// carries `cover: None` and the caller should surface a warning.
pub fn covering_number<R: Rng + ?Sized>(d: u32, rng: &mut R) -> Result<CoverReport> {
    let (beta_num, beta_den) = beta_full(d)?;
    let k = beta_num.div_ceil(beta_den);
    let mut report = CoverReport {
        beta_num,
        beta_den,
        witness_flat_rank: d,
        covering_number: k,
        cover: None,
        restarts_used: 0,
    };
    if d > COVER_CONSTRUCT_MAX_DIM {
        return Ok(report);
    }

    let all: Vec<Gf2Vector> = gf2::enumerate_space(d)?.skip(1).collect();
    for attempt in 1..=COVER_RESTARTS {
        report.restarts_used = attempt;
        let mut remaining = all.clone();
        let mut sets: Vec<Vec<Gf2Vector>> = Vec::new();
        let mut feasible = true;
        while !remaining.is_empty() {
            if sets.len() as u64 == k {
                feasible = false;
                break;
            }
            remaining.shuffle(rng);
            let mut basis = Gf2Basis::new(d)?;
            let mut chosen = Vec::new();
            let mut rest = Vec::new();
            for v in remaining {
                if basis.insert(v)? {
                    chosen.push(v);
                } else {
                    rest.push(v);
                }
            }
            sets.push(chosen);
            remaining = rest;
        }
        if feasible {
            verify_cover(d, k, &sets)?;
            report.cover = Some(sets);
            return Ok(report);
        }
    }
    Ok(report)
}

// ============================================================================
// Conjecture refutation
// ============================================================================

#[derive(Clone, Debug, Serialize)]
pub struct RefutationRow {
    pub max_part: u64,
    /// max_part >= (2^d - 1) / 8, by cross-multiplication.
    pub meets_floor: bool,
    /// max_part > 2k: this reduction's partition matroid is not
    /// 2k-coverable (its covering number is max_part).
    pub exceeds_two_k: bool,
}

/// Comparison of partition-matroid covering numbers against twice the
/// binary matroid's covering number over a corpus of full-support valid
/// reductions.
#[derive(Clone, Debug, Serialize)]
pub struct RefutationReport {
    pub d: u32,
    /// Covering number k = ceil((2^d - 1) / d) of the nonzero vectors.
    pub k: u64,
    pub two_k: u64,
    /// The floor (2^d - 1) / 8 as an exact rational.
    pub bound_num: u64,
    pub bound_den: u64,
    /// (2^d - 1) / 8 > 2k: every valid full-support reduction must then
    /// exceed 2k-coverability.
    pub threshold_holds: bool,
    pub rows: Vec<RefutationRow>,
}

impl RefutationReport {
    /// True when the corpus demonstrates a violation: the analytic
    /// threshold holds and every reduction's max part exceeds 2k.
    pub fn refuted(&self) -> bool {
        self.threshold_holds && !self.rows.is_empty() && self.rows.iter().all(|r| r.exceeds_two_k)
    }
}

/// For each full-support certified-valid reduction, compares the covering
/// number of its partition matroid (= max part size) against 2k.
pub fn refutation_certificate(
    d: u32,
    corpus: &[PartitionReduction],
) -> Result<RefutationReport> {
    if d == 0 || d > MAX_ENUM_DIM {
        return Err(Error::DimensionOutOfRange {
            dim: d,
            max: MAX_ENUM_DIM,
        });
    }
    let ground = (1u64 << d) - 1;
    let k = ground.div_ceil(u64::from(d));
    let mut rows = Vec::with_capacity(corpus.len());
    for p in corpus {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        if !p.full_support() {
            return Err(Error::InvalidArgument(
                "refutation corpus requires full support (all nonzero vectors assigned)".into(),
            ));
        }
        if !p.is_validated() {
            return Err(Error::InvalidArgument(
                "refutation corpus requires certified-valid reductions".into(),
            ));
        }
        let max_part = p.max_part_size() as u64;
        rows.push(RefutationRow {
            max_part,
            meets_floor: 8 * max_part >= ground,
            exceeds_two_k: max_part > 2 * k,
        });
    }
    Ok(RefutationReport {
        d,
        k,
        two_k: 2 * k,
        bound_num: ground,
        bound_den: 8,
        threshold_holds: ground > 16 * k,
        rows,
    })
}

// ============================================================================
// Tests
// ============================================================================
