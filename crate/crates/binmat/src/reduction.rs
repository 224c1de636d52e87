//! Certification, falsification, and generation of partition reductions of
//! the complete binary matroid, plus the cross-part pair-sum check.
//!
//! A reduction is *valid* when every transversal (at most one element per
//! part) is linearly independent. Equivalently, it is invalid iff some
//! nonempty selection of vectors from pairwise distinct parts XORs to zero:
//! a dependent transversal contains a minimal dependent subset, which over
//! GF(2) sums to zero and is itself a transversal. The exact checker
//! decides that formulation by a layered reachability sweep over the 2^d
//! XOR values, which stays inside the documented guards where a direct
//! search over transversals would not terminate.

use rand::Rng;
use serde::Serialize;

use crate::gf2::{self, Gf2Basis, Gf2Vector, Gl2Map};
use crate::matroid::PartitionReduction;
use crate::{Error, Result};

/// Exact-checker guards: beyond these the caller must fall back to
/// [`check_reduction_randomized`].
pub const EXACT_CHECK_MAX_DIM: u32 = 20;
pub const EXACT_CHECK_MAX_ELEMENTS: usize = 1 << 16;

/// Guard for the quadratic cross-part pair loops.
pub const PAIR_LOOP_MAX_ELEMENTS: usize = 1 << 12;

// ============================================================================
// Certificates
// ============================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMethod {
    Exact,
    Randomized,
}

/// Outcome of a validity check. When `valid` is false the witness lists
/// (part index, vector) pairs drawn from distinct parts whose rank is
/// strictly below their count — a dependent transversal.
#[derive(Clone, Debug, Serialize)]
pub struct ValidityCertificate {
    pub valid: bool,
    pub method: CheckMethod,
    pub witness: Option<Vec<(usize, Gf2Vector)>>,
    pub trials: u64,
}

impl ValidityCertificate {
    fn valid(method: CheckMethod, trials: u64) -> Self {
        Self {
            valid: true,
            method,
            witness: None,
            trials,
        }
    }

    fn invalid(method: CheckMethod, witness: Vec<(usize, Gf2Vector)>, trials: u64) -> Self {
        Self {
            valid: false,
            method,
            witness: Some(witness),
            trials,
        }
    }
}

// ============================================================================
// Exact checker
// ============================================================================

/// Exactly decides reduction validity.
///
/// Sweeps the parts in index order, maintaining the set of XOR values
/// reachable by picking at least one element from the parts seen so far
/// (at most one per part) as a bitmap over 2^d positions. Zero becomes
/// reachable iff the reduction is invalid; a witness selection is then
/// recovered by walking the per-part reachability layers backwards.
pub fn check_reduction_exact(p: &PartitionReduction) -> Result<ValidityCertificate> {
    let d = p.dim();
    let n = p.total_elements();
    if d > EXACT_CHECK_MAX_DIM {
        return Err(Error::GuardExceeded(format!(
            "exact check supports d <= {EXACT_CHECK_MAX_DIM}, got d={d}"
        )));
    }
    if n > EXACT_CHECK_MAX_ELEMENTS {
        return Err(Error::GuardExceeded(format!(
            "exact check supports at most {EXACT_CHECK_MAX_ELEMENTS} elements, got {n}"
        )));
    }

    let n_words = 1usize << d.saturating_sub(6);

    // levels[i] = XOR values reachable using parts 0..i with >= 1 pick.
    let mut levels: Vec<Vec<u64>> = Vec::with_capacity(p.parts().len() + 1);
    levels.push(vec![0u64; n_words]);

    for (part_idx, part) in p.parts().iter().enumerate() {
        let prev = levels.last().unwrap().clone();
        let mut next = prev.clone();
        for &v in part {
            let t = v.bits();
            gf2::or_xor_translate(&mut next, &prev, t);
            // A selection may also start at this part.
            next[(t >> 6) as usize] |= 1u64 << (t & 63);
        }
        let zero_reachable = next[0] & 1 == 1;
        levels.push(next);
        if zero_reachable {
            let witness = recover_witness(p, &levels, part_idx);
            return Ok(ValidityCertificate::invalid(CheckMethod::Exact, witness, 0));
        }
    }

    Ok(ValidityCertificate::valid(CheckMethod::Exact, 0))
}

#[inline]
fn level_contains(level: &[u64], bits: u32) -> bool {
    (level[(bits >> 6) as usize] >> (bits & 63)) & 1 == 1
}

/// Reconstructs a zero-XOR selection given that zero first became reachable
/// while processing `last_part`. Returns picks in increasing part order.
fn recover_witness(
    p: &PartitionReduction,
    levels: &[Vec<u64>],
    last_part: usize,
) -> Vec<(usize, Gf2Vector)> {
    let parts = p.parts();
    let mut picks: Vec<(usize, Gf2Vector)> = Vec::new();

    // The selection must use last_part: 0 = prefix_xor ^ v.
    let v = parts[last_part]
        .iter()
        .copied()
        .find(|v| level_contains(&levels[last_part], v.bits()))
        .expect("detection implies a completing element");
    picks.push((last_part, v));
    let mut x = v.bits();

    'outer: for i in (0..last_part).rev() {
        if level_contains(&levels[i], x) {
            continue; // part i unused
        }
        for &v in &parts[i] {
            if v.bits() == x {
                // Selection starts here; nothing needed from earlier parts.
                picks.push((i, v));
                break 'outer;
            }
            if level_contains(&levels[i], x ^ v.bits()) {
                picks.push((i, v));
                x ^= v.bits();
                continue 'outer;
            }
        }
        unreachable!("reachable state must decompose");
    }

    picks.reverse();
    debug_assert_eq!(
        picks.iter().fold(0u32, |acc, &(_, v)| acc ^ v.bits()),
        0,
        "witness must XOR to zero"
    );
    picks
}

/// Runs the exact checker and records certification on the reduction when
/// it proves validity.
pub fn certify_exact(p: &mut PartitionReduction) -> Result<ValidityCertificate> {
    let cert = check_reduction_exact(p)?;
    if cert.valid {
        p.set_validated(true);
    }
    Ok(cert)
}

// ============================================================================
// Randomized checker
// ============================================================================

/// Samples random transversals (a random subset of the nonempty parts, one
/// uniform element from each) and rank-checks them. One-sided: only a
/// `valid = false` answer is certain; `valid = true` means no dependence
/// was found in `trials` samples.
pub fn check_reduction_randomized<R: Rng + ?Sized>(
    p: &PartitionReduction,
    trials: u64,
    rng: &mut R,
) -> Result<ValidityCertificate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let nonempty: Vec<usize> = (0..p.parts().len())
        .filter(|&i| !p.parts()[i].is_empty())
        .collect();

    let mut include = vec![false; nonempty.len()];
    for t in 0..trials {
        for flag in include.iter_mut() {
            *flag = rng.random_bool(0.5);
        }
        let mut basis = Gf2Basis::new(p.dim())?;
        let mut chosen: Vec<(usize, Gf2Vector)> = Vec::new();
        for (k, &part_idx) in nonempty.iter().enumerate() {
            if !include[k] {
                continue;
            }
            let part = &p.parts()[part_idx];
            let v = part[rng.random_range(0..part.len())];
            if !basis.insert(v)? {
                chosen.push((part_idx, v));
                return Ok(ValidityCertificate::invalid(
                    CheckMethod::Randomized,
                    chosen,
                    t + 1,
                ));
            }
            chosen.push((part_idx, v));
        }
    }
    Ok(ValidityCertificate::valid(CheckMethod::Randomized, trials))
}

// ============================================================================
// Generators
// ============================================================================

/// The canonical valid reduction: part `b` (0-based) holds every vector
/// whose leading bit is `b`, so |part b| = 2^b and the parts cover all
/// 2^d - 1 nonzero vectors. Any transversal has pairwise distinct leading
/// bits, hence is triangular and independent; the result is therefore
/// certified valid by construction.
pub fn leading_bit_reduction(d: u32) -> Result<PartitionReduction> {
    if d == 0 || d > gf2::MAX_ENUM_DIM {
        return Err(Error::DimensionOutOfRange {
            dim: d,
            max: gf2::MAX_ENUM_DIM,
        });
    }
    let parts: Vec<Vec<Gf2Vector>> = (0..d)
        .map(|b| {
            (1u32 << b..1u32 << (b + 1))
                .map(|bits| Gf2Vector::new(bits, d).expect("in range"))
                .collect()
        })
        .collect();
    PartitionReduction::new_validated(d, parts)
}

/// Applies an invertible map to every element. Part sizes are unchanged
/// and the validated flag carries over: a GL(d,2) automorphism preserves
/// both validity and invalidity.
pub fn transform_reduction(p: &PartitionReduction, m: &Gl2Map) -> Result<PartitionReduction> {
    if m.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: m.dim(),
        });
    }
    let table = m.apply_table();
    let parts: Vec<Vec<Gf2Vector>> = p
        .parts()
        .iter()
        .map(|part| part.iter().map(|&v| table.apply(v)).collect())
        .collect();
    let mut out = PartitionReduction::new(p.dim(), parts)?;
    out.set_validated(p.is_validated());
    Ok(out)
}

/// Deletes each element independently with probability `q`. Deletion
/// preserves validity (independence is monotone under taking subsets),
/// so the validated flag carries over.
pub fn prune_reduction<R: Rng + ?Sized>(
    p: &PartitionReduction,
    q: f64,
    rng: &mut R,
) -> Result<PartitionReduction> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "deletion probability must be in [0, 1], got {q}"
        )));
    }
    let parts: Vec<Vec<Gf2Vector>> = p
        .parts()
        .iter()
        .map(|part| {
            part.iter()
                .copied()
                .filter(|_| !rng.random_bool(q))
                .collect()
        })
        .collect();
    let mut out = PartitionReduction::new(p.dim(), parts)?;
    out.set_validated(p.is_validated());
    Ok(out)
}

/// Moves one uniformly chosen element into a uniformly chosen other part.
/// The result may or may not remain valid; it is returned uncertified for
/// the exact checker to label.
pub fn displace_random_element<R: Rng + ?Sized>(
    p: &PartitionReduction,
    rng: &mut R,
) -> Result<PartitionReduction> {
    let n = p.total_elements();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "cannot displace in an empty reduction".into(),
        ));
    }
    if p.dim() < 2 {
        return Err(Error::InvalidArgument(
            "displacement needs at least two parts".into(),
        ));
    }
    let mut parts: Vec<Vec<Gf2Vector>> = p.parts().to_vec();
    let mut k = rng.random_range(0..n);
    let mut src = 0;
    while k >= parts[src].len() {
        k -= parts[src].len();
        src += 1;
    }
    let v = parts[src].remove(k);
    let mut dst = rng.random_range(0..parts.len() - 1);
    if dst >= src {
        dst += 1;
    }
    parts[dst].push(v);
    PartitionReduction::new(p.dim(), parts)
}

/// Valid reductions with full support: the leading-bit reduction plus
/// `gl_images` random GL(d,2) images of it.
pub fn full_support_corpus<R: Rng + ?Sized>(
    d: u32,
    gl_images: usize,
    rng: &mut R,
) -> Result<Vec<PartitionReduction>> {
    let base = leading_bit_reduction(d)?;
    let mut out = vec![base.clone()];
    for _ in 0..gl_images {
        let m = gf2::random_gl2(d, rng)?;
        out.push(transform_reduction(&base, &m)?);
    }
    Ok(out)
}

/// The standard valid test corpus: leading-bit, GL images, and random
/// prunings at q in {1/4, 1/2} of both. Every entry is certified valid by
/// construction.
pub fn mixed_corpus<R: Rng + ?Sized>(
    d: u32,
    gl_images: usize,
    rng: &mut R,
) -> Result<Vec<PartitionReduction>> {
    let mut out = full_support_corpus(d, gl_images, rng)?;
    let full = out.clone();
    for p in &full {
        out.push(prune_reduction(p, 0.25, rng)?);
        out.push(prune_reduction(p, 0.5, rng)?);
    }
    Ok(out)
}

// ============================================================================
// Cross-part pair sums
// ============================================================================

/// A cross-part pair whose sum lands in a third part; its existence
/// disproves validity.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Fact1Violation {
    pub part_x: usize,
    pub x: Gf2Vector,
    pub part_y: usize,
    pub y: Gf2Vector,
    pub sum: Gf2Vector,
    pub sum_part: usize,
}

/// Classification of every cross-part pair sum x + y (x in part i, y in
/// part j, i < j): into one of the two source parts, into the residual
/// set R (vectors assigned to no part), or — a violation — into a third
/// part.
#[derive(Clone, Debug, Serialize)]
pub struct Fact1Report {
    pub cross_pairs: u64,
    pub into_own_parts: u64,
    pub into_residual: u64,
    pub violations: Vec<Fact1Violation>,
}

impl Fact1Report {
    pub fn violation_count(&self) -> u64 {
        self.violations.len() as u64
    }
}

/// Checks every cross-part pair of a reduction, reporting (rather than
/// failing on) violations.
pub fn verify_fact1(p: &PartitionReduction) -> Result<Fact1Report> {
    let n = p.total_elements();
    if n > PAIR_LOOP_MAX_ELEMENTS {
        return Err(Error::GuardExceeded(format!(
            "pair loop supports at most {PAIR_LOOP_MAX_ELEMENTS} elements, got {n}"
        )));
    }
    let mut report = Fact1Report {
        cross_pairs: 0,
        into_own_parts: 0,
        into_residual: 0,
        violations: Vec::new(),
    };
    let parts = p.parts();
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            for &x in &parts[i] {
                for &y in &parts[j] {
                    report.cross_pairs += 1;
                    let sum = x.xor(y);
                    match p.part_of(sum) {
                        None => report.into_residual += 1,
                        Some(k) if k == i || k == j => report.into_own_parts += 1,
                        Some(k) => report.violations.push(Fact1Violation {
                            part_x: i,
                            x,
                            part_y: j,
                            y,
                            sum,
                            sum_part: k,
                        }),
                    }
                }
            }
        }
    }
    Ok(report)
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(bits: u32, dim: u32) -> Gf2Vector {
        Gf2Vector::new(bits, dim).unwrap()
    }

    fn reduction(d: u32, parts: &[&[u32]]) -> PartitionReduction {
        let parts = parts
            .iter()
            .map(|part| part.iter().map(|&b| v(b, d)).collect())
            .collect();
        PartitionReduction::new(d, parts).unwrap()
    }

    /// Brute-force oracle: walks every transversal with an incremental
    /// basis, backtracking via checkpoint/rollback. Exponential; test use
    /// only.
    pub(crate) fn brute_force_valid(p: &PartitionReduction) -> bool {
        fn rec(parts: &[Vec<Gf2Vector>], i: usize, basis: &mut Gf2Basis) -> bool {
            if i == parts.len() {
                return true;
            }
            if !rec(parts, i + 1, basis) {
                return false;
            }
            for &x in &parts[i] {
                let cp = basis.checkpoint();
                if !basis.insert(x).unwrap() {
                    return false;
                }
                let ok = rec(parts, i + 1, basis);
                basis.rollback(cp);
                if !ok {
                    return false;
                }
            }
            true
        }
        let mut basis = Gf2Basis::new(p.dim()).unwrap();
        rec(p.parts(), 0, &mut basis)
    }

    #[test]
    fn exact_checker_valid_example() {
        let p = reduction(2, &[&[0b01, 0b11], &[0b10]]);
        let cert = check_reduction_exact(&p).unwrap();
        assert!(cert.valid);
        assert_eq!(cert.method, CheckMethod::Exact);
        assert!(cert.witness.is_none());
    }

    #[test]
    fn exact_checker_valid_two_transversals() {
        let p = reduction(2, &[&[0b01, 0b10], &[0b11]]);
        assert!(check_reduction_exact(&p).unwrap().valid);
    }

    #[test]
    fn exact_checker_canonical_invalid() {
        // The unique full transversal {001, 010, 011} has rank 2.
        let p = reduction(3, &[&[0b001], &[0b010], &[0b011]]);
        let cert = check_reduction_exact(&p).unwrap();
        assert!(!cert.valid);
        let witness = cert.witness.unwrap();
        assert_eq!(
            witness,
            vec![(0, v(0b001, 3)), (1, v(0b010, 3)), (2, v(0b011, 3))]
        );
        // Witness has rank < size.
        let vecs: Vec<Gf2Vector> = witness.iter().map(|&(_, x)| x).collect();
        assert_eq!(gf2::rank(vecs).unwrap(), 2);
    }

    #[test]
    fn exact_checker_dependence_not_using_last_parts() {
        // Dependence among parts 0..2 even though part 3 is innocent.
        let p = reduction(4, &[&[0b0001], &[0b0010], &[0b0011], &[0b1000]]);
        let cert = check_reduction_exact(&p).unwrap();
        assert!(!cert.valid);
        let witness = cert.witness.unwrap();
        assert_eq!(witness.len(), 3);
        assert_eq!(
            witness.iter().fold(0, |acc, &(_, x)| acc ^ x.bits()),
            0
        );
    }

    #[test]
    fn exact_checker_witness_skips_middle_parts() {
        // Only parts 0 and 3 participate in the dependence 0001^0011^0010=0
        // — here: 0001 (part 0), 0111 (part 1 unused), pick from parts 0,2,3.
        let p = reduction(4, &[&[0b0001], &[0b1000], &[0b0010], &[0b0011]]);
        let cert = check_reduction_exact(&p).unwrap();
        assert!(!cert.valid);
        let witness = cert.witness.unwrap();
        let parts_used: Vec<usize> = witness.iter().map(|&(i, _)| i).collect();
        assert_eq!(parts_used, vec![0, 2, 3]);
    }

    #[test]
    fn exact_checker_guards() {
        // Dimension guard: construction allows d up to 24, checking only 20.
        let p = leading_bit_reduction(21).unwrap();
        assert!(matches!(
            check_reduction_exact(&p),
            Err(Error::GuardExceeded(_))
        ));
        // Element guard.
        let p = leading_bit_reduction(17).unwrap();
        assert!(p.total_elements() > EXACT_CHECK_MAX_ELEMENTS);
        assert!(matches!(
            check_reduction_exact(&p),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn exact_checker_accepts_leading_bit_d16() {
        // Largest leading-bit instance inside both guards.
        let p = leading_bit_reduction(16).unwrap();
        assert_eq!(p.total_elements(), (1 << 16) - 1);
        assert!(check_reduction_exact(&p).unwrap().valid);
    }

    #[test]
    fn exact_checker_matches_brute_force_on_random_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut valid_seen = 0u32;
        let mut invalid_seen = 0u32;
        for _ in 0..400 {
            let d = rng.random_range(2..=4u32);
            let mut parts: Vec<Vec<Gf2Vector>> = vec![Vec::new(); d as usize];
            for bits in 1..(1u32 << d) {
                if rng.random_bool(0.5) {
                    parts[rng.random_range(0..d as usize)].push(v(bits, d));
                }
            }
            let p = PartitionReduction::new(d, parts).unwrap();
            let expected = brute_force_valid(&p);
            let cert = check_reduction_exact(&p).unwrap();
            assert_eq!(cert.valid, expected, "{p:?}");
            if expected {
                valid_seen += 1;
            } else {
                invalid_seen += 1;
            }
            if let Some(w) = cert.witness {
                // Distinct parts, rank < size.
                let mut parts_used: Vec<usize> = w.iter().map(|&(i, _)| i).collect();
                parts_used.dedup();
                assert_eq!(parts_used.len(), w.len());
                let vecs: Vec<Gf2Vector> = w.iter().map(|&(_, x)| x).collect();
                assert!(gf2::rank(vecs).unwrap() < w.len());
            }
        }
        assert!(valid_seen > 20, "corpus should mix valid cases");
        assert!(invalid_seen > 20, "corpus should mix invalid cases");
    }

    #[test]
    fn certify_exact_sets_flag() {
        let mut p = reduction(2, &[&[0b01, 0b11], &[0b10]]);
        assert!(!p.is_validated());
        let cert = certify_exact(&mut p).unwrap();
        assert!(cert.valid);
        assert!(p.is_validated());
    }

    #[test]
    fn randomized_checker_rejects_zero_trials() {
        let p = reduction(2, &[&[0b01], &[0b10]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(check_reduction_randomized(&p, 0, &mut rng).is_err());
    }

    #[test]
    fn randomized_checker_finds_canonical_dependence() {
        // The bad transversal is sampled with probability 1/8 per trial, so
        // 1000 trials miss it with probability (7/8)^1000 ~ 1e-58.
        let p = reduction(3, &[&[0b001], &[0b010], &[0b011]]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cert = check_reduction_randomized(&p, 1000, &mut rng).unwrap();
        assert!(!cert.valid);
        assert_eq!(cert.method, CheckMethod::Randomized);
        assert!(cert.trials >= 1);
        let w = cert.witness.unwrap();
        let vecs: Vec<Gf2Vector> = w.iter().map(|&(_, x)| x).collect();
        assert!(gf2::rank(vecs).unwrap() < w.len());
    }

    #[test]
    fn randomized_checker_sound_on_valid_reductions() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in 1..=6u32 {
            let p = leading_bit_reduction(d).unwrap();
            let cert = check_reduction_randomized(&p, 500, &mut rng).unwrap();
            assert!(cert.valid, "randomized checker falsified a valid reduction");
            assert_eq!(cert.trials, 500);
        }
    }

    #[test]
    fn leading_bit_examples() {
        let p = leading_bit_reduction(3).unwrap();
        assert_eq!(p.part_sizes(), vec![1, 2, 4]);
        assert_eq!(p.parts()[0], vec![v(0b001, 3)]);
        assert_eq!(p.parts()[1], vec![v(0b010, 3), v(0b011, 3)]);
        assert_eq!(
            p.parts()[2],
            vec![v(0b100, 3), v(0b101, 3), v(0b110, 3), v(0b111, 3)]
        );
        assert!(p.is_validated());
        assert!(p.full_support());

        let p1 = leading_bit_reduction(1).unwrap();
        assert_eq!(p1.part_sizes(), vec![1]);

        for d in 1..=10 {
            let p = leading_bit_reduction(d).unwrap();
            assert_eq!(p.max_part_size(), 1 << (d - 1));
            assert_eq!(p.total_elements(), (1 << d) - 1);
        }
    }

    #[test]
    fn transform_identity_is_noop() {
        let p = leading_bit_reduction(4).unwrap();
        let id = Gl2Map::identity(4).unwrap();
        let q = transform_reduction(&p, &id).unwrap();
        assert_eq!(q.parts(), p.parts());
        assert!(q.is_validated());
    }

    #[test]
    fn transform_preserves_sizes_and_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=6u32 {
            let p = leading_bit_reduction(d).unwrap();
            let m = gf2::random_gl2(d, &mut rng).unwrap();
            let q = transform_reduction(&p, &m).unwrap();
            assert_eq!(q.part_sizes(), p.part_sizes());
            // Re-checked with the exact checker as oracle.
            assert!(check_reduction_exact(&q).unwrap().valid);
        }
    }

    #[test]
    fn transform_preserves_invalidity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = reduction(3, &[&[0b001], &[0b010], &[0b011]]);
        let m = gf2::random_gl2(3, &mut rng).unwrap();
        let q = transform_reduction(&p, &m).unwrap();
        assert!(!check_reduction_exact(&q).unwrap().valid);
    }

    #[test]
    fn pruning_preserves_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for q in [0.0, 0.25, 0.5] {
            let p = leading_bit_reduction(6).unwrap();
            let pruned = prune_reduction(&p, q, &mut rng).unwrap();
            assert!(pruned.is_validated());
            assert!(check_reduction_exact(&pruned).unwrap().valid);
            assert!(pruned.total_elements() <= p.total_elements());
        }
        assert!(prune_reduction(&leading_bit_reduction(3).unwrap(), 1.5, &mut rng).is_err());
    }

    #[test]
    fn displacement_produces_checkable_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = leading_bit_reduction(4).unwrap();
        for _ in 0..50 {
            let q = displace_random_element(&p, &mut rng).unwrap();
            assert!(!q.is_validated());
            assert_eq!(q.total_elements(), p.total_elements());
            let cert = check_reduction_exact(&q).unwrap();
            assert_eq!(cert.valid, brute_force_valid(&q));
        }
    }

    #[test]
    fn fact1_two_part_example() {
        // Pairs (01,10) -> 11 in part 0 and (11,10) -> 01 in part 0.
        let p = reduction(2, &[&[0b01, 0b11], &[0b10]]);
        let report = verify_fact1(&p).unwrap();
        assert_eq!(report.cross_pairs, 2);
        assert_eq!(report.into_own_parts, 2);
        assert_eq!(report.into_residual, 0);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn fact1_leading_bit_sums_into_higher_part() {
        let p = leading_bit_reduction(3).unwrap();
        let report = verify_fact1(&p).unwrap();
        // x != y across disjoint parts forces x+y != 0, and R = {0}.
        assert_eq!(report.into_residual, 0);
        assert!(report.violations.is_empty());
        assert_eq!(
            report.cross_pairs,
            (1 * 2 + 1 * 4 + 2 * 4) as u64
        );
    }

    #[test]
    fn fact1_flags_violations_on_invalid_reduction() {
        // Every cross pair sums into the third part here:
        // 001+010=011, 001+011=010, 010+011=001.
        let p = reduction(3, &[&[0b001], &[0b010], &[0b011]]);
        let report = verify_fact1(&p).unwrap();
        assert_eq!(report.violation_count(), 3);
        let first = report.violations[0];
        assert_eq!(first.sum, v(0b011, 3));
        assert_eq!(first.sum_part, 2);
        // And the exact checker agrees the reduction is invalid.
        assert!(!check_reduction_exact(&p).unwrap().valid);
    }

    #[test]
    fn fact1_guard() {
        let p = leading_bit_reduction(13).unwrap();
        assert!(matches!(verify_fact1(&p), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn corpora_are_valid_by_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let corpus = mixed_corpus(5, 2, &mut rng).unwrap();
        assert_eq!(corpus.len(), 3 + 6);
        for p in &corpus {
            assert!(p.is_validated());
            assert!(check_reduction_exact(p).unwrap().valid);
        }
        let full = full_support_corpus(5, 2, &mut rng).unwrap();
        for p in &full {
            assert!(p.full_support());
        }
    }

    #[test]
    fn certificate_json_shape() {
        let p = reduction(3, &[&[0b001], &[0b010], &[0b011]]);
        let cert = check_reduction_exact(&p).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["valid"], serde_json::json!(false));
        assert_eq!(json["method"], serde_json::json!("exact"));
        assert_eq!(json["witness"], serde_json::json!([[0, 1], [1, 2], [2, 3]]));
        assert_eq!(json["trials"], serde_json::json!(0));

        let p = reduction(2, &[&[0b01], &[0b10]]);
        let cert = check_reduction_exact(&p).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["witness"], serde_json::Value::Null);
    }
}
