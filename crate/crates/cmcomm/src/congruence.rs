//! Partitions, congruence generation, and congruence lattices.
//!
//! A [`Partition`] is stored as a representative array in canonical form:
//! `rep[a]` is the least element of the block containing `a`.  The text form
//! lists blocks by least element, elements ascending: `|0 2|1 3|`.
//!
//! Congruence generation follows the classic scheme: a union-find structure
//! absorbs generating pairs, and whenever two classes merge, the merged pair
//! is pushed through every one-variable translation of a basic operation
//! (one argument slot free, the rest frozen).  Iterating to a fixpoint yields
//! the least congruence containing the pairs, because arbitrary unary
//! polynomials are compositions of such translations.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};

/// A partition of `0..size` in canonical least-representative form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    rep: Vec<usize>,
}

impl Partition {
    /// The identity partition (all blocks singletons), the lattice bottom.
    pub fn identity(size: usize) -> Partition {
        Partition {
            rep: (0..size).collect(),
        }
    }

    /// The one-block partition, the lattice top.
    pub fn full(size: usize) -> Partition {
        Partition {
            rep: vec![0; size],
        }
    }

    /// Smallest equivalence relating every listed pair.
    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Partition> {
        let mut uf = UnionFind::new(size);
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= size {
                    return Err(Error::ElementOutOfRange {
                        value: x,
                        size,
                    });
                }
            }
            uf.union(a, b);
        }
        Ok(uf.into_partition())
    }

    pub fn size(&self) -> usize {
        self.rep.len()
    }

    /// Least element of the block containing `a`.
    pub fn rep(&self, a: usize) -> usize {
        self.rep[a]
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.rep[a] == self.rep[b]
    }

    pub fn block_count(&self) -> usize {
        self.rep
            .iter()
            .enumerate()
            .filter(|&(a, &r)| a == r)
            .count()
    }

    /// Block representatives (least elements), ascending.
    pub fn block_reps(&self) -> Vec<usize> {
        self.rep
            .iter()
            .enumerate()
            .filter(|&(a, &r)| a == r)
            .map(|(a, _)| a)
            .collect()
    }

    /// Blocks ordered by least element, elements ascending inside each.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let reps = self.block_reps();
        let mut blocks = vec![Vec::new(); reps.len()];
        let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        for (a, &r) in self.rep.iter().enumerate() {
            blocks[pos[&r]].push(a);
        }
        blocks
    }

    /// All related pairs `(a, b)` with `a < b`.
    pub fn nontrivial_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for a in 0..self.size() {
            for b in (a + 1)..self.size() {
                if self.related(a, b) {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    /// Least upper bound: the transitive closure of the union.
    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(self.size(), other.size(), "join over one universe");
        let mut uf = UnionFind::new(self.size());
        for a in 0..self.size() {
            uf.union(a, self.rep[a]);
            uf.union(a, other.rep[a]);
        }
        uf.into_partition()
    }

    /// Greatest lower bound: blockwise intersection.
    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(self.size(), other.size(), "meet over one universe");
        let mut first: HashMap<(usize, usize), usize> = HashMap::new();
        let mut rep = vec![0usize; self.size()];
        for (a, slot) in rep.iter_mut().enumerate() {
            let key = (self.rep[a], other.rep[a]);
            *slot = *first.entry(key).or_insert(a);
        }
        Partition { rep }
    }

    /// Refinement order: `self <= other` when every block of `self` lies
    /// inside a block of `other`.
    pub fn leq(&self, other: &Partition) -> bool {
        assert_eq!(self.size(), other.size(), "compare over one universe");
        (0..self.size()).all(|a| other.rep[a] == other.rep[self.rep[a]])
    }

    /// Image under the surjection `a -> map[a]` onto `0..target`: the least
    /// partition relating `map[a]` and `map[b]` for every related `(a, b)`.
    pub fn push_forward(&self, map: &[usize], target: usize) -> Result<Partition> {
        if map.len() != self.size() {
            return Err(Error::UniverseMismatch {
                expected: self.size(),
                found: map.len(),
            });
        }
        let pairs: Vec<(usize, usize)> = (0..self.size())
            .map(|a| (map[a], map[self.rep[a]]))
            .collect();
        for &(a, b) in &pairs {
            if a >= target || b >= target {
                return Err(Error::ElementOutOfRange {
                    value: a.max(b),
                    size: target,
                });
            }
        }
        Partition::from_pairs(target, &pairs)
    }

    /// Preimage under the map `a -> map[a]` into `self`'s universe: relates
    /// `a` and `b` exactly when `map[a]` and `map[b]` are related.
    pub fn pull_back(&self, map: &[usize]) -> Result<Partition> {
        let mut first: HashMap<usize, usize> = HashMap::new();
        let mut rep = vec![0usize; map.len()];
        for (a, slot) in rep.iter_mut().enumerate() {
            if map[a] >= self.size() {
                return Err(Error::ElementOutOfRange {
                    value: map[a],
                    size: self.size(),
                });
            }
            *slot = *first.entry(self.rep[map[a]]).or_insert(a);
        }
        Ok(Partition { rep })
    }

    /// Parses the block text form, e.g. `|0 2|1 3|` over a 4-element universe.
    /// Every element must occur exactly once.
    pub fn parse(text: &str, size: usize) -> Result<Partition> {
        let err = |position: usize, message: String| Error::Parse {
            what: "partition",
            position,
            message,
        };
        let trimmed = text.trim();
        let offset = text.len() - text.trim_start().len();
        if !trimmed.starts_with('|') || !trimmed.ends_with('|') || trimmed.len() < 2 {
            return Err(err(offset, "expected |block|block| syntax".into()));
        }
        let mut rep = vec![usize::MAX; size];
        let inner = &trimmed[1..trimmed.len() - 1];
        let mut block_start = offset + 1;
        for block in inner.split('|') {
            let mut least = usize::MAX;
            let mut members = Vec::new();
            for token in block.split_whitespace() {
                let value: usize = token.parse().map_err(|_| {
                    err(block_start, format!("`{}` is not an element", token))
                })?;
                if value >= size {
                    return Err(err(
                        block_start,
                        format!("element {} outside universe 0..{}", value, size),
                    ));
                }
                if rep[value] != usize::MAX {
                    return Err(err(
                        block_start,
                        format!("element {} listed twice", value),
                    ));
                }
                rep[value] = 0; // mark seen; fixed below
                members.push(value);
                least = least.min(value);
            }
            if members.is_empty() {
                return Err(err(block_start, "empty block".into()));
            }
            for &m in &members {
                rep[m] = least;
            }
            block_start += block.len() + 1;
        }
        if let Some(missing) = rep.iter().position(|&r| r == usize::MAX) {
            return Err(err(offset, format!("element {} is missing", missing)));
        }
        Ok(Partition { rep })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for block in self.blocks() {
            let mut first = true;
            for element in block {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", element)?;
                first = false;
            }
            write!(f, "|")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = String;

    fn try_from(rep: Vec<usize>) -> std::result::Result<Self, String> {
        for (a, &r) in rep.iter().enumerate() {
            if r > a || rep[r] != r {
                return Err(format!("not a canonical representative array at {}", a));
            }
        }
        Ok(Partition { rep })
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.rep
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(size: usize) -> UnionFind {
        UnionFind {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Keep the lesser root so canonicalization stays cheap.
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }

    fn into_partition(mut self) -> Partition {
        let rep = (0..self.parent.len()).map(|a| self.find(a)).collect();
        Partition { rep }
    }
}

/// Checks that `pi` is compatible with every operation of `alg`.
pub fn is_congruence(alg: &FiniteAlgebra, pi: &Partition) -> Result<()> {
    alg.quotient(pi).map(|_| ())
}

/// Congruence generated by a set of pairs: the least congruence of `alg`
/// relating each pair.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<Partition> {
    cg_from(alg, &Partition::identity(alg.size), pairs)
}

/// Congruence generated over a known congruence `base`: the least congruence
/// containing `base` and the pairs.  `base` must itself be a congruence of
/// `alg`; its pairs need no translation processing, which is what makes the
/// commutator fixpoint rounds cheap.
pub fn cg_from(alg: &FiniteAlgebra, base: &Partition, pairs: &[(usize, usize)]) -> Result<Partition> {
    let n = alg.size;
    if base.size() != n {
        return Err(Error::UniverseMismatch {
            expected: n,
            found: base.size(),
        });
    }
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        uf.union(a, base.rep(a));
    }
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        for x in [a, b] {
            if x >= n {
                return Err(Error::ElementOutOfRange { value: x, size: n });
            }
        }
        queue.push((a, b));
    }
    let mut args: Vec<u8> = Vec::new();
    while let Some((a, b)) = queue.pop() {
        if !uf.union(a, b) {
            continue;
        }
        // Push the merged pair through every one-variable translation.
        for (oi, op) in alg.operations.iter().enumerate() {
            let r = op.arity;
            if r == 0 {
                continue;
            }
            let contexts = crate::algebra::pow(n, r - 1);
            for slot in 0..r {
                for ctx in 0..contexts {
                    args.clear();
                    let mut rest = ctx;
                    for _ in 0..r - 1 {
                        args.push((rest % n) as u8);
                        rest /= n;
                    }
                    args.reverse();
                    args.insert(slot, a as u8);
                    let x = alg.apply(oi, &args);
                    args[slot] = b as u8;
                    let y = alg.apply(oi, &args);
                    if uf.find(x as usize) != uf.find(y as usize) {
                        queue.push((x as usize, y as usize));
                    }
                }
            }
        }
    }
    Ok(uf.into_partition())
}

/// The full congruence lattice of an algebra with order and operation tables.
#[derive(Debug, Clone)]
pub struct CongruenceLattice {
    size: usize,
    elements: Vec<Partition>,
    leq: Vec<Vec<bool>>,
    join_idx: Vec<Vec<usize>>,
    meet_idx: Vec<Vec<usize>>,
}

impl CongruenceLattice {
    /// Builds the lattice from an explicit, join/meet-closed partition set
    /// (used for hand-built order fixtures as well as real congruence sets).
    pub fn from_partitions(size: usize, parts: Vec<Partition>) -> Result<CongruenceLattice> {
        let mut elements: Vec<Partition> = Vec::new();
        for p in parts {
            if p.size() != size {
                return Err(Error::UniverseMismatch {
                    expected: size,
                    found: p.size(),
                });
            }
            if !elements.contains(&p) {
                elements.push(p);
            }
        }
        elements.sort_by(|p, q| {
            q.block_count()
                .cmp(&p.block_count())
                .then_with(|| p.rep.cmp(&q.rep))
        });
        let index: HashMap<&Partition, usize> =
            elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let m = elements.len();
        let mut leq = vec![vec![false; m]; m];
        let mut join_idx = vec![vec![0usize; m]; m];
        let mut meet_idx = vec![vec![0usize; m]; m];
        for i in 0..m {
            for j in 0..m {
                leq[i][j] = elements[i].leq(&elements[j]);
                let join = elements[i].join(&elements[j]);
                let meet = elements[i].meet(&elements[j]);
                join_idx[i][j] = *index.get(&join).ok_or_else(|| {
                    Error::contract(format!("set not closed under join: {} v {}", elements[i], elements[j]))
                })?;
                meet_idx[i][j] = *index.get(&meet).ok_or_else(|| {
                    Error::contract(format!("set not closed under meet: {} ^ {}", elements[i], elements[j]))
                })?;
            }
        }
        Ok(CongruenceLattice {
            size,
            elements,
            leq,
            join_idx,
            meet_idx,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Partition] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.elements.iter().position(|q| q == p)
    }

    /// Bottom element; the identity partition for a congruence lattice.
    pub fn bottom(&self) -> &Partition {
        &self.elements[0]
    }

    pub fn top(&self) -> &Partition {
        &self.elements[self.elements.len() - 1]
    }

    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn join_of(&self, i: usize, j: usize) -> usize {
        self.join_idx[i][j]
    }

    pub fn meet_of(&self, i: usize, j: usize) -> usize {
        self.meet_idx[i][j]
    }

    /// First triple `(x, y, z)` with `x <= z` violating the modular law
    /// `x v (y ^ z) = (x v y) ^ z`, if any.
    pub fn modularity_violation(&self) -> Option<(usize, usize, usize)> {
        let m = self.elements.len();
        for x in 0..m {
            for z in 0..m {
                if !self.leq[x][z] {
                    continue;
                }
                for y in 0..m {
                    if self.join_idx[x][self.meet_idx[y][z]] != self.meet_idx[self.join_idx[x][y]][z]
                    {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }
}

/// Computes `Con(alg)`: principal congruences closed under join.
///
/// Elements come out sorted with the identity partition first and the full
/// partition last, so lattice indices are stable for a fixed algebra.
pub fn congruence_lattice(alg: &FiniteAlgebra) -> Result<CongruenceLattice> {
    let n = alg.size;
    let mut set: Vec<Partition> = vec![Partition::identity(n)];
    for a in 0..n {
        for b in (a + 1)..n {
            let principal = cg(alg, &[(a, b)])?;
            if !set.contains(&principal) {
                set.push(principal);
            }
        }
    }
    let mut frontier = 0usize;
    while frontier < set.len() {
        let snapshot = set.len();
        for i in frontier..snapshot {
            for j in 0..snapshot {
                let join = set[i].join(&set[j]);
                if !set.contains(&join) {
                    set.push(join);
                }
            }
        }
        frontier = snapshot;
    }
    CongruenceLattice::from_partitions(n, set)
}
