//! Independence oracles for the complete binary matroid and for partition
//! matroids on subsets of GF(2)^d, plus the matroid greedy algorithm for
//! maximum-weight independent sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gf2::{Gf2Basis, Gf2Vector, MAX_DIM, MAX_ENUM_DIM};
use crate::{Error, Result};

/// Marks a vector position assigned to no part in the dense index.
const NO_PART: u8 = u8::MAX;

// ============================================================================
// BinaryMatroid
// ============================================================================

/// The complete binary matroid on all 2^d vectors of GF(2)^d.
/// A set is independent iff linearly independent; the zero vector is a loop.
#[derive(Clone, Copy, Debug)]
pub struct BinaryMatroid {
    dim: u8,
}

impl BinaryMatroid {
    pub fn new(dim: u32) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionOutOfRange { dim, max: MAX_DIM });
        }
        Ok(Self { dim: dim as u8 })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim as u32
    }
}

/// Set independence, with duplicates counting as dependent.
/// Errors if any vector disagrees with the matroid dimension.
pub fn is_independent_binary(m: &BinaryMatroid, set: &[Gf2Vector]) -> Result<bool> {
    let mut basis = Gf2Basis::new(m.dim())?;
    for &v in set {
        if !basis.insert(v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ============================================================================
// PartitionReduction
// ============================================================================

/// A candidate partition matroid on a subset of GF(2)^d \ {0}: exactly `d`
/// pairwise-disjoint parts (possibly empty). The `validated` flag records
/// whether every transversal has been certified linearly independent.
///
/// The zero vector is a loop of the binary matroid, so no part may contain
/// it. A dense vector -> part table gives O(1) membership.
#[derive(Clone)]
pub struct PartitionReduction {
    dim: u8,
    parts: Vec<Vec<Gf2Vector>>,
    part_index: Vec<u8>,
    validated: bool,
}

impl PartitionReduction {
    /// Builds and validates the structural invariants (not reduction
    /// validity): exactly `d` parts, vectors of matching dimension, no zero
    /// vector, no vector in two parts. Capped at d <= 24 so the dense
    /// membership table stays small.
    pub fn new(dim: u32, parts: Vec<Vec<Gf2Vector>>) -> Result<Self> {
        if dim == 0 || dim > MAX_ENUM_DIM {
            return Err(Error::DimensionOutOfRange {
                dim,
                max: MAX_ENUM_DIM,
            });
        }
        if parts.len() != dim as usize {
            return Err(Error::MalformedReduction(format!(
                "expected exactly {dim} parts, got {}",
                parts.len()
            )));
        }
        if dim as usize >= NO_PART as usize {
            return Err(Error::DimensionOutOfRange {
                dim,
                max: MAX_ENUM_DIM,
            });
        }
        let mut part_index = vec![NO_PART; 1usize << dim];
        for (i, part) in parts.iter().enumerate() {
            for &v in part {
                if v.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: v.dim(),
                    });
                }
                if v.is_zero() {
                    return Err(Error::MalformedReduction(format!(
                        "part {i} contains the zero vector (a loop)"
                    )));
                }
                let slot = &mut part_index[v.bits() as usize];
                if *slot != NO_PART {
                    return Err(Error::MalformedReduction(format!(
                        "vector {} appears in part {} and part {i}",
                        v.bits(),
                        *slot
                    )));
                }
                *slot = i as u8;
            }
        }
        Ok(Self {
            dim: dim as u8,
            parts,
            part_index,
            validated: false,
        })
    }

    pub(crate) fn new_validated(dim: u32, parts: Vec<Vec<Gf2Vector>>) -> Result<Self> {
        let mut p = Self::new(dim, parts)?;
        p.validated = true;
        Ok(p)
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim as u32
    }

    #[inline]
    pub fn parts(&self) -> &[Vec<Gf2Vector>] {
        &self.parts
    }

    /// The part containing `v`, if any.
    #[inline]
    pub fn part_of(&self, v: Gf2Vector) -> Option<usize> {
        debug_assert_eq!(v.dim(), self.dim());
        let i = self.part_index[v.bits() as usize];
        (i != NO_PART).then_some(i as usize)
    }

    /// Total number of elements n = sum of part sizes.
    pub fn total_elements(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn max_part_size(&self) -> usize {
        self.parts.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff the parts cover all of GF(2)^d \ {0}.
    pub fn full_support(&self) -> bool {
        self.total_elements() == (1usize << self.dim()) - 1
    }

    #[inline]
    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub(crate) fn set_validated(&mut self, validated: bool) {
        self.validated = validated;
    }

    /// Diagnoses why `set` fails partition independence, distinguishing
    /// elements outside the ground set from two picks in one part.
    pub fn check_set(&self, set: &[Gf2Vector]) -> std::result::Result<(), PartitionViolation> {
        let mut seen: Vec<Option<Gf2Vector>> = vec![None; self.parts.len()];
        for &v in set {
            match self.part_of(v) {
                None => return Err(PartitionViolation::OutsideGroundSet(v)),
                Some(i) => {
                    if let Some(first) = seen[i] {
                        return Err(PartitionViolation::TwoInOnePart {
                            part: i,
                            first,
                            second: v,
                        });
                    }
                    seen[i] = Some(v);
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ReductionWire::from(self)).expect("reduction serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: ReductionWire = serde_json::from_str(s)
            .map_err(|e| Error::MalformedReduction(format!("bad JSON: {e}")))?;
        wire.try_into()
    }
}

impl fmt::Debug for PartitionReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PartitionReduction(d={}, sizes={:?}, validated={})",
            self.dim,
            self.part_sizes(),
            self.validated
        )
    }
}

/// Why a set is dependent in a partition matroid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionViolation {
    /// The element is assigned to no part, so it is not in the matroid's
    /// ground set at all.
    OutsideGroundSet(Gf2Vector),
    TwoInOnePart {
        part: usize,
        first: Gf2Vector,
        second: Gf2Vector,
    },
}

/// True iff every element of `set` lies in some part and no part holds two.
pub fn is_independent_partition(p: &PartitionReduction, set: &[Gf2Vector]) -> bool {
    p.check_set(set).is_ok()
}

/// Wire form of a reduction: `{"d": int, "parts": [[int, ...], ...]}`
/// with exactly `d` part arrays and vectors as integer encodings.
#[derive(Serialize, Deserialize)]
pub struct ReductionWire {
    pub d: u32,
    pub parts: Vec<Vec<u32>>,
}

impl From<&PartitionReduction> for ReductionWire {
    fn from(p: &PartitionReduction) -> Self {
        Self {
            d: p.dim(),
            parts: p
                .parts
                .iter()
                .map(|part| part.iter().map(|v| v.bits()).collect())
                .collect(),
        }
    }
}

impl TryFrom<ReductionWire> for PartitionReduction {
    type Error = Error;

    fn try_from(wire: ReductionWire) -> Result<Self> {
        let parts = wire
            .parts
            .into_iter()
            .map(|part| {
                part.into_iter()
                    .map(|bits| Gf2Vector::new(bits, wire.d))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PartitionReduction::new(wire.d, parts)
    }
}

// ============================================================================
// Weighted elements and matroid greedy
// ============================================================================

/// An element of the ground set with a non-negative weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedElement {
    pub vector: Gf2Vector,
    pub weight: f64,
}

impl WeightedElement {
    pub fn new(vector: Gf2Vector, weight: f64) -> Result<Self> {
        if !(weight >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight must be non-negative, got {weight}"
            )));
        }
        Ok(Self { vector, weight })
    }
}

/// A matroid independence oracle over subsets of GF(2)^d.
/// Callers guarantee that all vectors match `dim()`.
pub trait IndependenceOracle {
    fn dim(&self) -> u32;
    fn is_independent(&self, set: &[Gf2Vector]) -> bool;
}

impl IndependenceOracle for BinaryMatroid {
    fn dim(&self) -> u32 {
        self.dim()
    }

    fn is_independent(&self, set: &[Gf2Vector]) -> bool {
        is_independent_binary(self, set).unwrap_or(false)
    }
}

impl IndependenceOracle for PartitionReduction {
    fn dim(&self) -> u32 {
        self.dim()
    }

    fn is_independent(&self, set: &[Gf2Vector]) -> bool {
        is_independent_partition(self, set)
    }
}

/// Matroid greedy for the maximum-weight independent set.
///
/// Elements are sorted by weight descending, ties broken by vector encoding
/// ascending, so the result is deterministic. Duplicate vectors are
/// collapsed to their largest weight before the scan. By the matroid
/// exchange property the greedy total is the optimum.
pub fn max_weight_independent<O: IndependenceOracle>(
    oracle: &O,
    elements: &[WeightedElement],
) -> Result<(Vec<Gf2Vector>, f64)> {
    for e in elements {
        if e.vector.dim() != oracle.dim() {
            return Err(Error::DimensionMismatch {
                expected: oracle.dim(),
                got: e.vector.dim(),
            });
        }
        if !(e.weight >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight must be non-negative, got {}",
                e.weight
            )));
        }
    }

    let mut pool: Vec<WeightedElement> = elements.to_vec();
    pool.sort_by(|a, b| {
        a.vector
            .bits()
            .cmp(&b.vector.bits())
            .then(b.weight.total_cmp(&a.weight))
    });
    pool.dedup_by_key(|e| e.vector.bits());
    pool.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then(a.vector.bits().cmp(&b.vector.bits()))
    });

    let mut chosen: Vec<Gf2Vector> = Vec::new();
    let mut total = 0.0;
    for e in &pool {
        chosen.push(e.vector);
        if oracle.is_independent(&chosen) {
            total += e.weight;
        } else {
            chosen.pop();
        }
    }
    Ok((chosen, total))
}

/// Rank of the distinct vectors in a multiset; with indicator weights this
/// equals the binary-matroid optimum.
pub fn rank_of_distinct(dim: u32, multiset: &[Gf2Vector]) -> Result<usize> {
    let mut basis = Gf2Basis::new(dim)?;
    for &v in multiset {
        basis.insert(v)?;
    }
    Ok(basis.rank())
}

// ============================================================================
// Tests
// ============================================================================
