//! Cubes over a finite algebra and the cube algebras they generate.
//!
//! A *cube* of dimension `k` is an element of `A^(2^k)`: an assignment of an
//! algebra element to every vertex of the k-dimensional Boolean cube.  Entries
//! are stored with coordinate 0 most significant, so for `k = 2` the vertex
//! order is `(0,0), (0,1), (1,0), (1,1)` and the text form reads
//! `[r,s,u,v]` — row by row.
//!
//! For a sequence of congruences `T = (t0, .., t(k-1))` the *cube algebra*
//! `M(T)` is the subalgebra of `A^(2^k)` generated by the one-coordinate
//! cubes: for each coordinate `i` and each pair `(a, b)` in `t_i`, the cube
//! taking value `a` where the i-th coordinate is 0 and `b` where it is 1.
//! Reflexive pairs contribute every constant cube, so this subalgebra is
//! simultaneously the closure under polynomial operations — see
//! `generators_include_all_constants` in the tests.
//!
//! Everything here is exact and exhaustive, so representation is the whole
//! game: a cube is packed into a `u64` with a power-of-two digit width, basic
//! operations act through per-byte lookup tables, and membership goes through
//! a radix-`|A|` index into a bit set.  The packing keeps numeric order equal
//! to lexicographic entry order, so sorted packed cubes enumerate cubes in
//! display order.

use std::collections::HashSet;
use std::fmt;

use crate::algebra::FiniteAlgebra;
use crate::congruence::Partition;
use crate::error::{Error, Result};

/// Default cap, in bits, on `2^k * ceil(log2 |A|)` — the packed size of a
/// cube.  Keeps accidental `k = 10` runs from allocating the universe; raise
/// it deliberately via the library call or the CLI `--cap` flag.
pub const DEFAULT_CAP_BITS: u32 = 32;

/// Widest packed cube the engine itself supports, in bits.
const WORD_BITS: u32 = 64;

/// Largest dense index domain (`|A|^(2^k)`) tracked with a bit set; beyond
/// this, membership falls back to a hash set.
const BITSET_LIMIT: u128 = 1 << 27;

/// A vertex of the k-dimensional Boolean cube, i.e. a map `k -> 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubeIndex {
    k: usize,
    bits: u32,
}

impl CubeIndex {
    pub fn new(k: usize, bits: u32) -> Result<CubeIndex> {
        if k == 0 || k >= 32 {
            return Err(Error::contract(format!("cube dimension {} out of range", k)));
        }
        if bits >> k != 0 {
            return Err(Error::CoordinateRange {
                index: bits as usize,
                k,
            });
        }
        Ok(CubeIndex { k, bits })
    }

    /// The all-ones vertex, where pivot lines end.
    pub fn all_ones(k: usize) -> CubeIndex {
        CubeIndex {
            k,
            bits: ((1u64 << k) - 1) as u32,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Position in entry order: coordinate 0 is most significant.
    pub fn position(&self) -> usize {
        self.bits as usize
    }

    /// Value of coordinate `i`.
    pub fn coord(&self, i: usize) -> bool {
        assert!(i < self.k, "coordinate {} of a {}-cube", i, self.k);
        (self.bits >> (self.k - 1 - i)) & 1 == 1
    }

    pub fn is_all_ones(&self) -> bool {
        self.bits == ((1u64 << self.k) - 1) as u32
    }
}

/// An element of `A^(2^k)` in entry order (coordinate 0 most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    k: usize,
    entries: Vec<u8>,
}

impl Cube {
    pub fn new(k: usize, entries: Vec<u8>) -> Result<Cube> {
        if k == 0 || k >= 32 {
            return Err(Error::contract(format!("cube dimension {} out of range", k)));
        }
        if entries.len() != 1 << k {
            return Err(Error::contract(format!(
                "a {}-cube has {} entries, got {}",
                k,
                1 << k,
                entries.len()
            )));
        }
        Ok(Cube { k, entries })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn entry(&self, f: CubeIndex) -> u8 {
        assert_eq!(f.k(), self.k, "vertex of a {}-cube", self.k);
        self.entries[f.position()]
    }

    /// All lines along coordinate `j`: pairs of entries at vertices differing
    /// only in coordinate `j`, ordered by context with the pivot line last.
    pub fn lines(&self, j: usize) -> Result<Vec<Line>> {
        if j >= self.k {
            return Err(Error::CoordinateRange { index: j, k: self.k });
        }
        let mut lines = Vec::with_capacity(1 << (self.k - 1));
        for context in 0..1u32 << (self.k - 1) {
            let lo = insert_coord_bit(context, j, 0, self.k);
            let hi = insert_coord_bit(context, j, 1, self.k);
            lines.push(Line {
                k: self.k,
                j,
                context,
                pair: (self.entries[lo as usize], self.entries[hi as usize]),
            });
        }
        Ok(lines)
    }

    /// All squares spanned by coordinates `j` (rows) and `l` (columns),
    /// ordered by context with the pivot square last.
    pub fn squares(&self, j: usize, l: usize) -> Result<Vec<Square>> {
        for index in [j, l] {
            if index >= self.k {
                return Err(Error::CoordinateRange {
                    index,
                    k: self.k,
                });
            }
        }
        if j == l {
            return Err(Error::CoordinateClash { j });
        }
        if self.k < 2 {
            return Err(Error::contract("squares need dimension at least 2"));
        }
        let (first, second) = (j.min(l), j.max(l));
        let mut squares = Vec::with_capacity(1 << (self.k - 2));
        for context in 0..1u32 << (self.k - 2) {
            let mut corners = [0u8; 4];
            for (slot, &(fj, fl)) in [(0u32, 0u32), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
                let (vfirst, vsecond) = if first == j { (fj, fl) } else { (fl, fj) };
                let partial = insert_coord_bit(context, second - 1, vsecond, self.k - 1);
                let full = insert_coord_bit(partial, first, vfirst, self.k);
                corners[slot] = self.entries[full as usize];
            }
            squares.push(Square {
                k: self.k,
                j,
                l,
                context,
                corners,
            });
        }
        Ok(squares)
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, "]")
    }
}

/// Inserts coordinate `coord` with the given bit value into an index over
/// `k - 1` coordinates, yielding an index over `k` coordinates.
fn insert_coord_bit(bits: u32, coord: usize, value: u32, k: usize) -> u32 {
    let low_width = k - 1 - coord;
    let high = bits >> low_width;
    let low = bits & ((1 << low_width) - 1);
    (high << (low_width + 1)) | (value << low_width) | low
}

/// Whether a line is part of the hypothesis or the conclusion of the
/// centrality condition at its coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Supporting,
    Pivot,
}

/// A pair of cube entries along coordinate `j`, at a fixed assignment
/// (`context`) of the remaining coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line {
    k: usize,
    pub j: usize,
    /// Remaining coordinates in coordinate order, most significant first.
    pub context: u32,
    /// Entries at coordinate `j` equal to 0 and 1 respectively.
    pub pair: (u8, u8),
}

impl Line {
    /// Pivot exactly when every other coordinate sits at 1.
    pub fn kind(&self) -> LineKind {
        if self.context == (1 << (self.k - 1)) - 1 {
            LineKind::Pivot
        } else {
            LineKind::Supporting
        }
    }
}

/// A 2x2 face of a cube spanned by coordinates `j` and `l` at a fixed
/// context; corners in entry order `(r, s, u, v)` with `r` at `(0,0)` and
/// `v` at `(1,1)` of `(j, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Square {
    k: usize,
    pub j: usize,
    pub l: usize,
    pub context: u32,
    pub corners: [u8; 4],
}

impl Square {
    pub fn kind(&self) -> LineKind {
        if self.context == (1 << (self.k - 2)) - 1 {
            LineKind::Pivot
        } else {
            LineKind::Supporting
        }
    }
}

/// Packing parameters and operation tables for cubes of one dimension over
/// one algebra.
///
/// A cube is a `u64` of `2^k` digits, each `digit_bits` wide, the digit for
/// vertex 0 in the topmost used position — numeric order on packed words
/// equals lexicographic order on entry vectors.  Basic operations act on
/// bytes (one to eight digits at a time) through precomputed tables.
pub struct CubeSpace {
    n: usize,
    k: usize,
    len: usize,
    digit_bits: u32,
    digit_mask: u64,
    chunks: usize,
    value_mask: u64,
    ops: Vec<SpaceOp>,
    /// Per chunk, the radix-`n` value contributed by each byte.
    dense: Vec<[u64; 256]>,
    /// `n^(2^k)` when it fits, for saturation detection and bit-set sizing.
    total: Option<u128>,
}

impl fmt::Debug for CubeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CubeSpace")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("digit_bits", &self.digit_bits)
            .field("chunks", &self.chunks)
            .finish_non_exhaustive()
    }
}

enum SpaceOp {
    Constant(u64),
    /// 256-entry bytewise table.
    Unary(Box<[u8; 256]>),
    /// 65536-entry table over byte pairs.
    Binary(Vec<u8>),
    /// Any other arity: digit-at-a-time application of the raw table.
    Wide { arity: usize, table: Vec<u8> },
}

impl CubeSpace {
    /// Lays out packing for `2^k`-entry cubes over `alg`, rejecting requests
    /// beyond `cap_bits` packed bits (measured as `2^k * ceil(log2 |A|)`,
    /// the information content, so the cap is representation-independent).
    pub fn new(alg: &FiniteAlgebra, k: usize, cap_bits: u32) -> Result<CubeSpace> {
        if k == 0 {
            return Err(Error::contract("cube dimension must be at least 1"));
        }
        let n = alg.size;
        let info_bits = usize::BITS - (n - 1).leading_zeros(); // ceil(log2 n)
        let needed = (1u128 << k).saturating_mul(info_bits as u128);
        let cap = cap_bits.min(WORD_BITS) as u128;
        if needed > cap {
            return Err(Error::Capacity {
                what: format!("packed {}-cubes over a {}-element algebra", k, n),
                needed,
                limit: cap,
            });
        }
        let digit_bits = info_bits.max(1).next_power_of_two().min(8);
        let len = 1usize << k;
        if (len as u32) * digit_bits > WORD_BITS {
            return Err(Error::Capacity {
                what: format!("packed {}-cubes over a {}-element algebra", k, n),
                needed: (len as u128) * digit_bits as u128,
                limit: WORD_BITS as u128,
            });
        }
        let digit_mask = (1u64 << digit_bits) - 1;
        let used_bits = len as u32 * digit_bits;
        let value_mask = if used_bits == 64 {
            u64::MAX
        } else {
            (1u64 << used_bits) - 1
        };
        let chunks = (used_bits as usize).div_ceil(8);
        let digits_per_byte = (8 / digit_bits) as usize;

        let ops = alg
            .operations
            .iter()
            .map(|op| match op.arity {
                0 => {
                    let mut word = 0u64;
                    for rank in 0..len {
                        word |= (op.table[0] as u64) << (digit_bits as usize * rank);
                    }
                    SpaceOp::Constant(word)
                }
                1 => {
                    let mut table = Box::new([0u8; 256]);
                    for (byte, slot) in table.iter_mut().enumerate() {
                        *slot = map_byte(byte as u8, digits_per_byte, digit_bits, |d| {
                            if (d as usize) < n {
                                op.table[d as usize]
                            } else {
                                0
                            }
                        });
                    }
                    SpaceOp::Unary(table)
                }
                2 => {
                    let mut table = vec![0u8; 1 << 16];
                    for a in 0..256usize {
                        for b in 0..256usize {
                            table[(a << 8) | b] =
                                zip_bytes(a as u8, b as u8, digits_per_byte, digit_bits, |da, db| {
                                    if (da as usize) < n && (db as usize) < n {
                                        op.table[da as usize * n + db as usize]
                                    } else {
                                        0
                                    }
                                });
                        }
                    }
                    SpaceOp::Binary(table)
                }
                _ => SpaceOp::Wide {
                    arity: op.arity,
                    table: op.table.clone(),
                },
            })
            .collect();

        let total = (n as u128).checked_pow(len as u32);

        // The dense index only backs the bit set, which only exists for small
        // domains; skipping it otherwise also avoids n^rank overflowing u64.
        let mut dense = Vec::new();
        if total.is_some_and(|t| t <= BITSET_LIMIT) {
            dense = vec![[0u64; 256]; chunks];
            for (chunk, table) in dense.iter_mut().enumerate() {
                for (byte, slot) in table.iter_mut().enumerate() {
                    let mut value = 0u64;
                    for within in 0..digits_per_byte {
                        let rank = chunk * digits_per_byte + within;
                        if rank >= len {
                            break;
                        }
                        let digit = (byte >> (within as u32 * digit_bits)) as u64 & digit_mask;
                        value += digit * (n as u64).pow(rank as u32);
                    }
                    *slot = value;
                }
            }
        }

        Ok(CubeSpace {
            n,
            k,
            len,
            digit_bits,
            digit_mask,
            chunks,
            value_mask,
            ops,
            dense,
            total,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of entries per cube, `2^k`.
    pub fn cube_len(&self) -> usize {
        self.len
    }

    /// Bit shift of the digit for the vertex at `position` in entry order.
    fn shift(&self, position: usize) -> u32 {
        self.digit_bits * (self.len - 1 - position) as u32
    }

    pub fn pack(&self, entries: &[u8]) -> u64 {
        debug_assert_eq!(entries.len(), self.len);
        let mut word = 0u64;
        for &e in entries {
            word = (word << self.digit_bits) | e as u64;
        }
        word
    }

    pub fn unpack(&self, word: u64) -> Vec<u8> {
        (0..self.len)
            .map(|p| ((word >> self.shift(p)) & self.digit_mask) as u8)
            .collect()
    }

    pub fn entry_at(&self, word: u64, position: usize) -> u8 {
        ((word >> self.shift(position)) & self.digit_mask) as u8
    }

    /// Bit shifts `(at coordinate j = 0, at coordinate j = 1)` for each line
    /// along coordinate `j`, context ascending — the pivot line comes last.
    pub fn line_shifts(&self, j: usize) -> Result<Vec<(u32, u32)>> {
        if j >= self.k {
            return Err(Error::CoordinateRange { index: j, k: self.k });
        }
        let mut shifts = Vec::with_capacity(self.len / 2);
        for context in 0..1u32 << (self.k - 1) {
            let lo = insert_coord_bit(context, j, 0, self.k) as usize;
            let hi = insert_coord_bit(context, j, 1, self.k) as usize;
            shifts.push((self.shift(lo), self.shift(hi)));
        }
        Ok(shifts)
    }

    pub fn digit_mask(&self) -> u64 {
        self.digit_mask
    }

    /// Radix-`n` rank of a packed cube among all cubes, in entry order.
    fn dense_index(&self, word: u64) -> u64 {
        let mut value = 0u64;
        for (chunk, table) in self.dense.iter().enumerate() {
            value += table[((word >> (8 * chunk)) & 0xFF) as usize];
        }
        value
    }

    fn apply_unary(&self, table: &[u8; 256], x: u64) -> u64 {
        let mut out = 0u64;
        for chunk in 0..self.chunks {
            let xb = ((x >> (8 * chunk)) & 0xFF) as usize;
            out |= (table[xb] as u64) << (8 * chunk);
        }
        out & self.value_mask
    }

    /// Bytewise table for an arbitrary digit map, for callers that transform
    /// packed cubes digit-by-digit (e.g. replacing entries by class
    /// representatives).  Digits outside the universe map to 0.
    pub(crate) fn byte_map(&self, f: impl Fn(u8) -> u8) -> Box<[u8; 256]> {
        let digits_per_byte = (8 / self.digit_bits) as usize;
        let n = self.n;
        let mut table = Box::new([0u8; 256]);
        for (byte, slot) in table.iter_mut().enumerate() {
            *slot = map_byte(byte as u8, digits_per_byte, self.digit_bits, |d| {
                if (d as usize) < n {
                    f(d)
                } else {
                    0
                }
            });
        }
        table
    }

    pub(crate) fn apply_byte_map(&self, table: &[u8; 256], x: u64) -> u64 {
        self.apply_unary(table, x)
    }

    fn apply_binary(&self, table: &[u8], x: u64, y: u64) -> u64 {
        let mut out = 0u64;
        for chunk in 0..self.chunks {
            let xb = (x >> (8 * chunk)) & 0xFF;
            let yb = (y >> (8 * chunk)) & 0xFF;
            out |= (table[((xb << 8) | yb) as usize] as u64) << (8 * chunk);
        }
        out & self.value_mask
    }

    fn apply_wide(&self, arity: usize, table: &[u8], args: &[u64]) -> u64 {
        debug_assert_eq!(args.len(), arity);
        let mut out = 0u64;
        for rank in 0..self.len {
            let shift = self.digit_bits * rank as u32;
            let mut idx = 0usize;
            for &arg in args {
                idx = idx * self.n + ((arg >> shift) & self.digit_mask) as usize;
            }
            out |= (table[idx] as u64) << shift;
        }
        out
    }
}

/// Applies `f` to each digit of a byte.
fn map_byte(byte: u8, digits_per_byte: usize, digit_bits: u32, f: impl Fn(u8) -> u8) -> u8 {
    let mask = ((1u32 << digit_bits) - 1) as u8;
    let mut out = 0u8;
    for d in 0..digits_per_byte {
        let shift = digit_bits * d as u32;
        out |= f((byte >> shift) & mask) << shift;
    }
    out
}

/// Applies `f` to parallel digits of two bytes.
fn zip_bytes(a: u8, b: u8, digits_per_byte: usize, digit_bits: u32, f: impl Fn(u8, u8) -> u8) -> u8 {
    let mask = ((1u32 << digit_bits) - 1) as u8;
    let mut out = 0u8;
    for d in 0..digits_per_byte {
        let shift = digit_bits * d as u32;
        out |= f((a >> shift) & mask, (b >> shift) & mask) << shift;
    }
    out
}

/// Membership tracking for the closure: a bit set over the dense index when
/// the domain is small enough, otherwise a hash set of packed words.
enum Seen {
    Bits { bits: Vec<u64>, count: u128 },
    Words(HashSet<u64>),
}

impl Seen {
    fn with_domain(total: Option<u128>) -> Seen {
        match total {
            Some(t) if t <= BITSET_LIMIT => Seen::Bits {
                bits: vec![0u64; (t as usize).div_ceil(64)],
                count: 0,
            },
            _ => Seen::Words(HashSet::new()),
        }
    }

    /// Returns whether the word was new.
    fn insert(&mut self, space: &CubeSpace, word: u64) -> bool {
        match self {
            Seen::Bits { bits, count } => {
                let idx = space.dense_index(word) as usize;
                let (slot, bit) = (idx / 64, 1u64 << (idx % 64));
                if bits[slot] & bit != 0 {
                    false
                } else {
                    bits[slot] |= bit;
                    *count += 1;
                    true
                }
            }
            Seen::Words(set) => set.insert(word),
        }
    }

    fn count(&self) -> u128 {
        match self {
            Seen::Bits { count, .. } => *count,
            Seen::Words(set) => set.len() as u128,
        }
    }
}

/// The cube algebra `M(T)` for a congruence sequence `T`, with its packing.
pub struct MatrixAlgebra {
    space: CubeSpace,
    /// All cubes, packed, ascending — i.e. in lexicographic entry order.
    cubes: Vec<u64>,
    generator_count: usize,
    saturated: bool,
}

impl MatrixAlgebra {
    pub fn space(&self) -> &CubeSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn k(&self) -> usize {
        self.space.k
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Packed cubes, ascending.
    pub fn packed(&self) -> &[u64] {
        &self.cubes
    }

    pub fn cube(&self, i: usize) -> Cube {
        Cube {
            k: self.space.k,
            entries: self.space.unpack(self.cubes[i]),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Cube> + '_ {
        (0..self.cubes.len()).map(|i| self.cube(i))
    }

    /// Number of one-coordinate generators that seeded the closure.
    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    /// Whether `M(T)` turned out to be all of `A^(2^k)`.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn contains(&self, cube: &Cube) -> Result<bool> {
        if cube.k() != self.space.k {
            return Err(Error::contract(format!(
                "{}-cube tested against a dimension-{} cube algebra",
                cube.k(),
                self.space.k
            )));
        }
        for &e in cube.entries() {
            if e as usize >= self.space.n {
                return Err(Error::ElementOutOfRange {
                    value: e as usize,
                    size: self.space.n,
                });
            }
        }
        Ok(self.contains_packed(self.space.pack(cube.entries())))
    }

    pub(crate) fn contains_packed(&self, word: u64) -> bool {
        self.cubes.binary_search(&word).is_ok()
    }
}

/// The one-coordinate cubes generating `M(T)`: for each coordinate `i` and
/// each (ordered, including reflexive) pair `(a, b)` of `congs[i]`, the cube
/// with `a` where coordinate `i` is 0 and `b` where it is 1.  Duplicates
/// across coordinates are dropped; order is by coordinate, then `(a, b)`.
pub fn one_coordinate_generators(
    alg: &FiniteAlgebra,
    congs: &[Partition],
) -> Result<Vec<Cube>> {
    let k = validate_congs(alg, congs)?;
    let len = 1usize << k;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, theta) in congs.iter().enumerate() {
        for a in 0..alg.size {
            for b in 0..alg.size {
                if !theta.related(a, b) {
                    continue;
                }
                let entries: Vec<u8> = (0..len)
                    .map(|bits| {
                        if (bits >> (k - 1 - i)) & 1 == 0 {
                            a as u8
                        } else {
                            b as u8
                        }
                    })
                    .collect();
                if seen.insert(entries.clone()) {
                    out.push(Cube { k, entries });
                }
            }
        }
    }
    Ok(out)
}

fn validate_congs(alg: &FiniteAlgebra, congs: &[Partition]) -> Result<usize> {
    if congs.is_empty() {
        return Err(Error::contract("at least one congruence is required"));
    }
    for theta in congs {
        if theta.size() != alg.size {
            return Err(Error::UniverseMismatch {
                expected: alg.size,
                found: theta.size(),
            });
        }
    }
    Ok(congs.len())
}

/// Generates the cube algebra `M(congs)` by closing the one-coordinate cubes
/// under the basic operations, applied vertexwise.
///
/// `cap_bits` bounds the packed cube size as in [`CubeSpace::new`]; pass
/// [`DEFAULT_CAP_BITS`] unless a caller explicitly raised the cap.
pub fn generate_matrix_algebra(
    alg: &FiniteAlgebra,
    congs: &[Partition],
    cap_bits: u32,
) -> Result<MatrixAlgebra> {
    let k = validate_congs(alg, congs)?;
    let space = CubeSpace::new(alg, k, cap_bits)?;
    let mut seen = Seen::with_domain(space.total);
    let mut cubes: Vec<u64> = Vec::new();

    for gen in one_coordinate_generators(alg, congs)? {
        let word = space.pack(gen.entries());
        if seen.insert(&space, word) {
            cubes.push(word);
        }
    }
    for op in &space.ops {
        if let SpaceOp::Constant(word) = op {
            if seen.insert(&space, *word) {
                cubes.push(*word);
            }
        }
    }
    let generator_count = cubes.len();

    let full = |seen: &Seen| space.total.is_some_and(|t| seen.count() == t);
    let mut saturated = full(&seen);

    let mut old = 0usize;
    'closure: while old < cubes.len() && !saturated {
        let snapshot = cubes.len();
        for op in &space.ops {
            match op {
                SpaceOp::Constant(_) => {}
                SpaceOp::Unary(table) => {
                    for i in old..snapshot {
                        let out = space.apply_unary(table, cubes[i]);
                        if seen.insert(&space, out) {
                            cubes.push(out);
                        }
                    }
                }
                SpaceOp::Binary(table) => {
                    // Every pair with at least one frontier element, both
                    // orders; the main cost of the whole computation.
                    for i in old..snapshot {
                        let x = cubes[i];
                        for jj in 0..=i {
                            let y = cubes[jj];
                            let out = space.apply_binary(table, x, y);
                            if seen.insert(&space, out) {
                                cubes.push(out);
                            }
                            let out = space.apply_binary(table, y, x);
                            if seen.insert(&space, out) {
                                cubes.push(out);
                            }
                        }
                        if full(&seen) {
                            saturated = true;
                            break 'closure;
                        }
                    }
                }
                SpaceOp::Wide { arity, table } => {
                    let mut args = vec![0u64; *arity];
                    crate::algebra::for_each_frontier_tuple(*arity, old, snapshot, |indices| {
                        for (slot, &i) in indices.iter().enumerate() {
                            args[slot] = cubes[i];
                        }
                        let out = space.apply_wide(*arity, table, &args);
                        if seen.insert(&space, out) {
                            cubes.push(out);
                        }
                    });
                }
            }
            if full(&seen) {
                saturated = true;
                break 'closure;
            }
        }
        old = snapshot;
    }

    if saturated {
        // The closure touched every cube; enumerate them in order instead of
        // finishing the pairwise loops.
        cubes.clear();
        enumerate_all(&space, &mut cubes);
    } else {
        cubes.sort_unstable();
    }

    Ok(MatrixAlgebra {
        space,
        cubes,
        generator_count,
        saturated,
    })
}

/// All packed cubes in ascending order, for the saturated case.
fn enumerate_all(space: &CubeSpace, out: &mut Vec<u64>) {
    let total = space
        .total
        .expect("saturation implies a countable domain") as usize;
    out.reserve(total);
    let mut entries = vec![0u8; space.len];
    loop {
        out.push(space.pack(&entries));
        let mut pos = space.len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            entries[pos] += 1;
            if (entries[pos] as usize) < space.n {
                break;
            }
            entries[pos] = 0;
        }
    }
}
