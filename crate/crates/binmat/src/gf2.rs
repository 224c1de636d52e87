//! Bit-packed linear algebra over GF(2)^d.
//!
//! Vectors are encoded as unsigned integers in little-endian bit order
//! (bit 0 = first coordinate), which fixes the external JSON/CSV format:
//! a vector serializes as its plain integer encoding. Addition is XOR.
//!
//! The module provides rank computation by incremental row-echelon
//! insertion, span membership, uniformly random invertible maps,
//! full-space enumeration, and a bitmap set over the 2^d vector space.

use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Largest dimension for vector/basis/map operations.
pub const MAX_DIM: u32 = 30;

/// Largest dimension for full-space enumeration and for types whose
/// representation is proportional to 2^d (vector sets, reductions).
pub const MAX_ENUM_DIM: u32 = 24;

fn check_dim(dim: u32, max: u32) -> Result<()> {
    if dim == 0 || dim > max {
        return Err(Error::DimensionOutOfRange { dim, max });
    }
    Ok(())
}

// ============================================================================
// Gf2Vector
// ============================================================================

/// A vector in GF(2)^d, packed into a machine word.
///
/// Invariant: all bits at positions >= d are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    bits: u32,
    dim: u8,
}

impl Gf2Vector {
    /// Creates a vector from its integer encoding.
    pub fn new(bits: u32, dim: u32) -> Result<Self> {
        check_dim(dim, MAX_DIM)?;
        if dim < 32 && bits >> dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "encoding {bits} has bits above position {}",
                dim - 1
            )));
        }
        Ok(Self { bits, dim: dim as u8 })
    }

    /// The zero vector of the given dimension.
    pub fn zero(dim: u32) -> Result<Self> {
        Self::new(0, dim)
    }

    /// The unit vector with coordinate `i` set.
    pub fn unit(i: u32, dim: u32) -> Result<Self> {
        if i >= dim {
            return Err(Error::InvalidArgument(format!(
                "unit index {i} out of range for d={dim}"
            )));
        }
        Self::new(1 << i, dim)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn dim(self) -> u32 {
        self.dim as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Vector addition (bitwise XOR). Panics if dimensions differ.
    #[inline]
    pub fn xor(self, other: Self) -> Self {
        assert_eq!(self.dim, other.dim, "xor: dimension mismatch");
        Self {
            bits: self.bits ^ other.bits,
            dim: self.dim,
        }
    }

    /// Position of the highest set bit, or `None` for the zero vector.
    #[inline]
    pub fn leading_bit(self) -> Option<u32> {
        if self.bits == 0 {
            None
        } else {
            Some(31 - self.bits.leading_zeros())
        }
    }

    /// Value of coordinate `i`.
    #[inline]
    pub fn coord(self, i: u32) -> bool {
        debug_assert!(i < self.dim as u32);
        (self.bits >> i) & 1 == 1
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vector({:#0width$b}, d={})", self.bits, self.dim, width = self.dim as usize + 2)
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

/// Vectors serialize as their plain integer encoding.
impl Serialize for Gf2Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u32(self.bits)
    }
}

// ============================================================================
// Gf2Basis
// ============================================================================

/// Rollback token for [`Gf2Basis`]; records the insertion count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisCheckpoint(usize);

/// An incrementally maintained row-echelon basis of a subspace of GF(2)^d.
///
/// Rows have pairwise distinct leading-bit positions. Inserting a vector
/// already in the span leaves the basis unchanged and reports dependence.
/// Insertion never rewrites stored rows, so a checkpoint/rollback pair
/// restores the exact previous state; backtracking search relies on this.
#[derive(Clone)]
pub struct Gf2Basis {
    dim: u8,
    /// `pivot_rows[b]` is the stored row with leading bit `b`, or 0 if absent.
    pivot_rows: [u32; MAX_DIM as usize],
    /// Leading bits in insertion order; doubles as the rollback journal.
    journal: Vec<u8>,
}

impl Gf2Basis {
    pub fn new(dim: u32) -> Result<Self> {
        check_dim(dim, MAX_DIM)?;
        Ok(Self {
            dim: dim as u8,
            pivot_rows: [0; MAX_DIM as usize],
            journal: Vec::new(),
        })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim as u32
    }

    /// Dimension of the spanned subspace.
    #[inline]
    pub fn rank(&self) -> usize {
        self.journal.len()
    }

    fn check_vector(&self, v: Gf2Vector) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(())
    }

    /// Reduces `bits` against the stored rows; the result is zero iff the
    /// vector lies in the span.
    #[inline]
    fn reduce(&self, mut bits: u32) -> u32 {
        while bits != 0 {
            let lead = 31 - bits.leading_zeros();
            let row = self.pivot_rows[lead as usize];
            if row == 0 {
                break;
            }
            bits ^= row;
        }
        bits
    }

    /// True iff `v` is in the span of the inserted vectors.
    pub fn in_span(&self, v: Gf2Vector) -> Result<bool> {
        self.check_vector(v)?;
        Ok(self.reduce(v.bits()) == 0)
    }

    /// Inserts `v`; returns `Ok(true)` if the rank grew, `Ok(false)` if `v`
    /// was already in the span (basis unchanged).
    pub fn insert(&mut self, v: Gf2Vector) -> Result<bool> {
        self.check_vector(v)?;
        let reduced = self.reduce(v.bits());
        if reduced == 0 {
            return Ok(false);
        }
        let lead = 31 - reduced.leading_zeros();
        self.pivot_rows[lead as usize] = reduced;
        self.journal.push(lead as u8);
        Ok(true)
    }

    pub fn checkpoint(&self) -> BasisCheckpoint {
        BasisCheckpoint(self.journal.len())
    }

    /// Truncates back to `cp`. Panics if `cp` is from a later state.
    pub fn rollback(&mut self, cp: BasisCheckpoint) {
        assert!(cp.0 <= self.journal.len(), "rollback past current state");
        while self.journal.len() > cp.0 {
            let lead = self.journal.pop().unwrap();
            self.pivot_rows[lead as usize] = 0;
        }
    }

    /// The rows in echelon order (strictly decreasing leading bit).
    pub fn rows(&self) -> Vec<Gf2Vector> {
        let mut out = Vec::with_capacity(self.journal.len());
        for b in (0..MAX_DIM as usize).rev() {
            if self.pivot_rows[b] != 0 {
                out.push(Gf2Vector {
                    bits: self.pivot_rows[b],
                    dim: self.dim,
                });
            }
        }
        out
    }
}

impl fmt::Debug for Gf2Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gf2Basis")
            .field("dim", &self.dim)
            .field("rows", &self.rows())
            .finish()
    }
}

/// Rank of a collection of vectors, via incremental echelon insertion.
///
/// Returns 0 for empty input; errors if the vectors disagree on dimension.
pub fn rank<I>(vectors: I) -> Result<usize>
where
    I: IntoIterator<Item = Gf2Vector>,
{
    let mut basis: Option<Gf2Basis> = None;
    for v in vectors {
        let b = match basis.as_mut() {
            Some(b) => b,
            None => {
                basis = Some(Gf2Basis::new(v.dim())?);
                basis.as_mut().unwrap()
            }
        };
        b.insert(v)?;
    }
    Ok(basis.map_or(0, |b| b.rank()))
}

/// Span membership against a prepared basis.
pub fn in_span(basis: &Gf2Basis, v: Gf2Vector) -> Result<bool> {
    basis.in_span(v)
}

// ============================================================================
// Gl2Map
// ============================================================================

/// An invertible linear map on GF(2)^d, stored by columns
/// (`columns[i]` is the image of the i-th unit vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gl2Map {
    dim: u8,
    columns: Vec<u32>,
}

impl Gl2Map {
    pub fn identity(dim: u32) -> Result<Self> {
        check_dim(dim, MAX_DIM)?;
        Ok(Self {
            dim: dim as u8,
            columns: (0..dim).map(|i| 1u32 << i).collect(),
        })
    }

    /// Builds a map from column encodings, rejecting singular matrices.
    pub fn from_columns(dim: u32, columns: Vec<u32>) -> Result<Self> {
        check_dim(dim, MAX_DIM)?;
        if columns.len() != dim as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {dim} columns, got {}",
                columns.len()
            )));
        }
        let vecs: Vec<Gf2Vector> = columns
            .iter()
            .map(|&bits| Gf2Vector::new(bits, dim))
            .collect::<Result<_>>()?;
        if rank(vecs)? != dim as usize {
            return Err(Error::InvalidArgument(
                "columns are not linearly independent".into(),
            ));
        }
        Ok(Self {
            dim: dim as u8,
            columns,
        })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim as u32
    }

    pub fn columns(&self) -> Vec<Gf2Vector> {
        self.columns
            .iter()
            .map(|&bits| Gf2Vector {
                bits,
                dim: self.dim,
            })
            .collect()
    }

    /// Applies the map. Panics on dimension mismatch.
    #[inline]
    pub fn apply(&self, v: Gf2Vector) -> Gf2Vector {
        assert_eq!(v.dim(), self.dim(), "apply: dimension mismatch");
        let mut bits = v.bits();
        let mut acc = 0u32;
        while bits != 0 {
            let i = bits.trailing_zeros();
            acc ^= self.columns[i as usize];
            bits &= bits - 1;
        }
        Gf2Vector {
            bits: acc,
            dim: self.dim,
        }
    }

    /// The inverse map, by Gauss-Jordan elimination on `[M | I]`.
    pub fn inverse(&self) -> Gl2Map {
        let d = self.dim as usize;
        // Row i of the augmented system: low d bits = row i of M,
        // high d bits = row i of the accumulating inverse.
        let mut rows: Vec<u64> = (0..d)
            .map(|i| {
                let mut m_row = 0u64;
                for (j, &col) in self.columns.iter().enumerate() {
                    if (col >> i) & 1 == 1 {
                        m_row |= 1 << j;
                    }
                }
                m_row | (1u64 << (d + i))
            })
            .collect();

        for pivot in 0..d {
            let pick = (pivot..d)
                .find(|&r| (rows[r] >> pivot) & 1 == 1)
                .expect("map is invertible by construction");
            rows.swap(pivot, pick);
            let prow = rows[pivot];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot && (*row >> pivot) & 1 == 1 {
                    *row ^= prow;
                }
            }
        }

        let columns = (0..d)
            .map(|j| {
                let mut col = 0u32;
                for (i, row) in rows.iter().enumerate() {
                    if (row >> (d + j)) & 1 == 1 {
                        col |= 1 << i;
                    }
                }
                col
            })
            .collect();
        Gl2Map {
            dim: self.dim,
            columns,
        }
    }

    /// The composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Gl2Map) -> Gl2Map {
        assert_eq!(self.dim, other.dim, "compose: dimension mismatch");
        let columns = other
            .columns()
            .into_iter()
            .map(|c| self.apply(c).bits())
            .collect();
        Gl2Map {
            dim: self.dim,
            columns,
        }
    }

    /// Byte-indexed lookup tables for bulk application.
    pub fn apply_table(&self) -> Gl2ApplyTable {
        let d = self.dim as u32;
        let n_tables = d.div_ceil(8) as usize;
        let mut tables = vec![[0u32; 256]; n_tables];
        for (k, table) in tables.iter_mut().enumerate() {
            for byte in 0..256usize {
                let mut acc = 0u32;
                for j in 0..8 {
                    let bit = 8 * k + j;
                    if bit < d as usize && (byte >> j) & 1 == 1 {
                        acc ^= self.columns[bit];
                    }
                }
                table[byte] = acc;
            }
        }
        Gl2ApplyTable {
            dim: self.dim,
            tables,
        }
    }
}

/// Precomputed byte tables: applies a [`Gl2Map`] in one lookup per input byte.
pub struct Gl2ApplyTable {
    dim: u8,
    tables: Vec<[u32; 256]>,
}

impl Gl2ApplyTable {
    #[inline]
    pub fn apply_bits(&self, bits: u32) -> u32 {
        let mut acc = 0u32;
        for (k, table) in self.tables.iter().enumerate() {
            acc ^= table[((bits >> (8 * k)) & 0xFF) as usize];
        }
        acc
    }

    #[inline]
    pub fn apply(&self, v: Gf2Vector) -> Gf2Vector {
        assert_eq!(v.dim(), self.dim as u32, "apply: dimension mismatch");
        Gf2Vector {
            bits: self.apply_bits(v.bits()),
            dim: self.dim,
        }
    }
}

/// Uniformly random invertible map: samples columns uniformly and rejects
/// until they are independent (expected under 4 attempts at any d).
/// Deterministic for a given RNG state.
pub fn random_gl2<R: Rng + ?Sized>(dim: u32, rng: &mut R) -> Result<Gl2Map> {
    check_dim(dim, MAX_DIM)?;
    let mask = if dim == 32 { u32::MAX } else { (1u32 << dim) - 1 };
    loop {
        let columns: Vec<u32> = (0..dim).map(|_| rng.random::<u32>() & mask).collect();
        let vecs: Vec<Gf2Vector> = columns
            .iter()
            .map(|&bits| Gf2Vector {
                bits,
                dim: dim as u8,
            })
            .collect();
        if rank(vecs)? == dim as usize {
            return Ok(Gl2Map {
                dim: dim as u8,
                columns,
            });
        }
    }
}

// ============================================================================
// Enumeration
// ============================================================================

/// All 2^d vectors in increasing integer order, starting at 0.
pub fn enumerate_space(dim: u32) -> Result<impl Iterator<Item = Gf2Vector>> {
    check_dim(dim, MAX_ENUM_DIM)?;
    let d = dim as u8;
    Ok((0..1u32 << dim).map(move |bits| Gf2Vector { bits, dim: d }))
}

// ============================================================================
// VectorSet
// ============================================================================

/// A set of vectors in GF(2)^d, stored as a bitmap over all 2^d positions.
#[derive(Clone, PartialEq, Eq)]
pub struct VectorSet {
    dim: u8,
    words: Vec<u64>,
    len: usize,
}

impl VectorSet {
    pub fn empty(dim: u32) -> Result<Self> {
        check_dim(dim, MAX_ENUM_DIM)?;
        let n_words = 1usize << dim.saturating_sub(6);
        Ok(Self {
            dim: dim as u8,
            words: vec![0; n_words],
            len: 0,
        })
    }

    pub fn full(dim: u32) -> Result<Self> {
        let mut s = Self::empty(dim)?;
        if dim < 6 {
            s.words[0] = (1u64 << (1 << dim)) - 1;
        } else {
            s.words.fill(u64::MAX);
        }
        s.len = 1usize << dim;
        Ok(s)
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim as u32
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: Gf2Vector) -> bool {
        debug_assert_eq!(v.dim(), self.dim());
        self.contains_bits(v.bits())
    }

    #[inline]
    pub fn contains_bits(&self, bits: u32) -> bool {
        (self.words[(bits >> 6) as usize] >> (bits & 63)) & 1 == 1
    }

    /// Returns true if the vector was newly inserted.
    pub fn insert(&mut self, v: Gf2Vector) -> bool {
        debug_assert_eq!(v.dim(), self.dim());
        self.insert_bits(v.bits())
    }

    pub fn insert_bits(&mut self, bits: u32) -> bool {
        let w = &mut self.words[(bits >> 6) as usize];
        let mask = 1u64 << (bits & 63);
        if *w & mask == 0 {
            *w |= mask;
            self.len += 1;
            true
        } else {
            false
        }
    }

    /// Returns true if the vector was present.
    pub fn remove(&mut self, v: Gf2Vector) -> bool {
        debug_assert_eq!(v.dim(), self.dim());
        let bits = v.bits();
        let w = &mut self.words[(bits >> 6) as usize];
        let mask = 1u64 << (bits & 63);
        if *w & mask != 0 {
            *w &= !mask;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    /// Members in increasing integer order.
    pub fn iter(&self) -> impl Iterator<Item = Gf2Vector> + '_ {
        let dim = self.dim;
        self.words.iter().enumerate().flat_map(move |(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(Gf2Vector {
                    bits: (wi as u32) << 6 | b,
                    dim,
                })
            })
        })
    }
}

impl fmt::Debug for VectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorSet(d={}, len={})", self.dim, self.len)
    }
}

// ============================================================================
// XOR-translate on 2^d bitmaps
// ============================================================================

const BUTTERFLY_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Permutes the bits of a word by `position -> position ^ t` for `t < 64`.
#[inline]
pub(crate) fn xor_permute_word(mut w: u64, t: u32) -> u64 {
    debug_assert!(t < 64);
    for (k, &mask) in BUTTERFLY_MASKS.iter().enumerate() {
        if (t >> k) & 1 == 1 {
            let s = 1 << k;
            w = ((w & mask) << s) | ((w >> s) & mask);
        }
    }
    w
}

/// OR-accumulates the XOR-translate of a 2^d bitmap: `dst[y] |= src[y ^ t]`.
/// Both slices must have identical length covering the full space.
pub(crate) fn or_xor_translate(dst: &mut [u64], src: &[u64], t: u32) {
    debug_assert_eq!(dst.len(), src.len());
    let word_xor = (t >> 6) as usize;
    let bit_xor = t & 63;
    for (wi, &w) in src.iter().enumerate() {
        if w != 0 {
            dst[wi ^ word_xor] |= xor_permute_word(w, bit_xor);
        }
    }
}

// ============================================================================
// Tests
// ============================================================================
