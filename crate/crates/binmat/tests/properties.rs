//! Cross-module property tests, with brute-force oracles at small d.

use binmat::gf2::{self, Gf2Basis, Gf2Vector};
use binmat::matroid::{
    is_independent_binary, max_weight_independent, BinaryMatroid, PartitionReduction,
    WeightedElement,
};
use binmat::reduction;
use binmat::structure;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn v(bits: u32, dim: u32) -> Gf2Vector {
    Gf2Vector::new(bits, dim).unwrap()
}

fn arb_dim() -> impl Strategy<Value = u32> {
    1u32..=12
}

fn arb_vectors(d: u32, max_len: usize) -> impl Strategy<Value = Vec<Gf2Vector>> {
    let mask = (1u32 << d) - 1;
    proptest::collection::vec(0u32..=mask, 0..=max_len)
        .prop_map(move |bits| bits.into_iter().map(|b| v(b, d)).collect())
}

proptest! {
    #[test]
    fn rank_is_permutation_invariant((d, seed) in arb_dim().prop_flat_map(|d| (Just(d), any::<u64>()))) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = (1u32 << d) - 1;
        let mut set: Vec<Gf2Vector> = (0..rng.random_range(0..=24))
            .map(|_| v(rng.random::<u32>() & mask, d))
            .collect();
        let base = gf2::rank(set.iter().copied()).unwrap();
        for _ in 0..4 {
            // Fisher-Yates with the same stream: an arbitrary permutation.
            for i in (1..set.len()).rev() {
                let j = rng.random_range(0..=i);
                set.swap(i, j);
            }
            prop_assert_eq!(gf2::rank(set.iter().copied()).unwrap(), base);
        }
    }

    #[test]
    fn rank_grows_by_at_most_one(d in arb_dim(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = (1u32 << d) - 1;
        let set: Vec<Gf2Vector> = (0..rng.random_range(0..=16))
            .map(|_| v(rng.random::<u32>() & mask, d))
            .collect();
        let extra = v(rng.random::<u32>() & mask, d);
        let before = gf2::rank(set.iter().copied()).unwrap();
        let after = gf2::rank(set.iter().copied().chain([extra])).unwrap();
        prop_assert!(after == before || after == before + 1);
    }

    #[test]
    fn gl_maps_preserve_rank(d in arb_dim(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = (1u32 << d) - 1;
        let set: Vec<Gf2Vector> = (0..rng.random_range(0..=16))
            .map(|_| v(rng.random::<u32>() & mask, d))
            .collect();
        let m = gf2::random_gl2(d, &mut rng).unwrap();
        let mapped: Vec<Gf2Vector> = set.iter().map(|&x| m.apply(x)).collect();
        prop_assert_eq!(gf2::rank(set).unwrap(), gf2::rank(mapped).unwrap());
    }

    #[test]
    fn binary_independence_iff_rank_equals_size(set in (1u32..=6).prop_flat_map(|d| arb_vectors(d, 10))) {
        if let Some(first) = set.first() {
            let d = first.dim();
            let m = BinaryMatroid::new(d).unwrap();
            let indep = is_independent_binary(&m, &set).unwrap();
            prop_assert_eq!(indep, gf2::rank(set.iter().copied()).unwrap() == set.len());
        }
    }

    #[test]
    fn greedy_equals_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(1..=4u32);
        let mask = (1u32 << d) - 1;
        let elements: Vec<WeightedElement> = (0..rng.random_range(0..=12usize))
            .map(|_| WeightedElement::new(
                v(rng.random::<u32>() & mask, d),
                f64::from(rng.random_range(0..=9u8)),
            ).unwrap())
            .collect();
        let m = BinaryMatroid::new(d).unwrap();
        let (_, greedy) = max_weight_independent(&m, &elements).unwrap();

        // Oracle: exhaustive max over independent subsets of the distinct
        // elements (duplicates collapsed to their max weight).
        let mut unique: Vec<WeightedElement> = Vec::new();
        for e in &elements {
            match unique.iter_mut().find(|u| u.vector == e.vector) {
                Some(u) => u.weight = u.weight.max(e.weight),
                None => unique.push(*e),
            }
        }
        let mut best = 0.0f64;
        for m_bits in 0u32..(1 << unique.len()) {
            let subset: Vec<Gf2Vector> = (0..unique.len())
                .filter(|&i| (m_bits >> i) & 1 == 1)
                .map(|i| unique[i].vector)
                .collect();
            if is_independent_binary(&m, &subset).unwrap() {
                best = best.max(
                    (0..unique.len())
                        .filter(|&i| (m_bits >> i) & 1 == 1)
                        .map(|i| unique[i].weight)
                        .sum(),
                );
            }
        }
        prop_assert_eq!(greedy, best);
    }
}

/// Naive XOR-translate of a membership mask: bit (y ^ t) of the result is
/// bit y of the input.
fn xor_translate_naive(mask: u64, t: u32) -> u64 {
    let mut out = 0u64;
    for y in 0..64u32 {
        if (mask >> y) & 1 == 1 {
            out |= 1 << (y ^ t);
        }
    }
    out
}

#[test]
fn in_span_agrees_with_exhaustive_closure_all_sets_d_up_to_4() {
    // Every subset of GF(2)^d as a basis source, every v: in_span must
    // match the subset-XOR closure.
    for d in 1..=4u32 {
        let space = 1u32 << d;
        for set_mask in 0u32..(1 << space) {
            let mut basis = Gf2Basis::new(d).unwrap();
            // Closure of the chosen set under XOR, seeded with 0.
            let mut closure: u64 = 1;
            for bits in 0..space {
                if (set_mask >> bits) & 1 == 1 {
                    basis.insert(v(bits, d)).unwrap();
                    closure |= xor_translate_naive(closure, bits);
                }
            }
            for bits in 0..space {
                let expected = (closure >> bits) & 1 == 1;
                assert_eq!(
                    basis.in_span(v(bits, d)).unwrap(),
                    expected,
                    "d={d} set={set_mask:#b} v={bits}"
                );
            }
        }
    }
}

#[test]
fn exact_checker_brute_force_corpus_mixed() {
    // Randomized candidates, labelled by the all-transversal oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut checked = 0u32;
    while checked < 300 {
        let d = rng.random_range(2..=4u32);
        let mut parts: Vec<Vec<Gf2Vector>> = vec![Vec::new(); d as usize];
        for bits in 1..(1u32 << d) {
            if rng.random_bool(0.6) {
                parts[rng.random_range(0..d as usize)].push(v(bits, d));
            }
        }
        let p = PartitionReduction::new(d, parts).unwrap();
        let expected = brute_force_valid(&p);
        let got = reduction::check_reduction_exact(&p).unwrap().valid;
        assert_eq!(got, expected);
        checked += 1;
    }
}

/// Walks every transversal with basis checkpoint/rollback; the independent
/// oracle for the exact checker.
fn brute_force_valid(p: &PartitionReduction) -> bool {
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
fn randomized_checker_never_falsifies_exactly_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFACADE);
    for _ in 0..60 {
        let d = rng.random_range(2..=5u32);
        let base = reduction::leading_bit_reduction(d).unwrap();
        let m = gf2::random_gl2(d, &mut rng).unwrap();
        let p = reduction::prune_reduction(
            &reduction::transform_reduction(&base, &m).unwrap(),
            0.3,
            &mut rng,
        )
        .unwrap();
        assert!(reduction::check_reduction_exact(&p).unwrap().valid);
        let cert = reduction::check_reduction_randomized(&p, 200, &mut rng).unwrap();
        assert!(cert.valid);
    }
}

#[test]
fn structural_reports_hold_across_mixed_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xABCD);
    for d in [2u32, 4, 6, 8, 10, 12] {
        for p in reduction::mixed_corpus(d, 1, &mut rng).unwrap() {
            let fact1 = reduction::verify_fact1(&p).unwrap();
            assert_eq!(fact1.violation_count(), 0, "d={d}");
            let pairs = structure::count_pairs(&p).unwrap();
            assert!(pairs.bound_holds, "d={d}");
            assert_eq!(
                pairs.pairs_into_r + pairs.pairs_into_parts,
                pairs.cross_pairs_total
            );
            assert!(structure::check_lemma3(&p).holds, "d={d}");
            let heavy = structure::extract_heavy_parts(&p).unwrap();
            assert!(heavy.removals <= heavy.removal_cap);
            assert_eq!(heavy.t_set.len() + heavy.removals as usize, d as usize);
        }
    }
}

#[test]
fn fact1_violation_implies_exact_checker_invalid() {
    // Hunt for displaced reductions with pair-sum violations; each must be
    // flagged invalid by the exact checker.
    let mut rng = ChaCha8Rng::seed_from_u64(0xDEAD);
    let mut violations_seen = 0;
    for _ in 0..300 {
        let d = rng.random_range(3..=5u32);
        let base = reduction::leading_bit_reduction(d).unwrap();
        let p = reduction::displace_random_element(&base, &mut rng).unwrap();
        let report = reduction::verify_fact1(&p).unwrap();
        if report.violation_count() > 0 {
            violations_seen += 1;
            assert!(!reduction::check_reduction_exact(&p).unwrap().valid);
        }
    }
    assert!(violations_seen > 0, "perturbation should hit violations");
}
