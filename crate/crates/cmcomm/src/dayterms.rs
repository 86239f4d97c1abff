//! Day-term chains and the cube rotations they make possible.
//!
//! A *Day chain* for an algebra is a sequence of 4-ary terms `m_0, ..., m_n`
//! satisfying five identity families:
//!
//! 1. `m_e(x, y, y, x) = x` for every link `e`,
//! 2. `m_0(x, y, z, u) = x`,
//! 3. `m_n(x, y, z, u) = u`,
//! 4. `m_e(x, x, u, u) = m_{e+1}(x, x, u, u)` for even `e < n`,
//! 5. `m_e(x, y, y, u) = m_{e+1}(x, y, y, u)` for odd `e < n`.
//!
//! A finite algebra generates a congruence modular variety exactly when it
//! has such a chain, so [`find_day_chain`] doubles as a modularity decision
//! procedure: it either produces a chain or, by exhausting the 4-ary term
//! clone, certifies that none exists.
//!
//! A [`PreparedChain`] powers the shifting constructions used to analyse cube
//! algebras.  [`shift_rotation`] recombines a cube's entries through one chain
//! term so that information carried across coordinate `j` is re-expressed
//! along coordinate `l`; on every `(j, l)`-square `(r, s / u, v)` of the cube
//! it acts by
//!
//! ```text
//! (r, s / u, v)  ->  (s, s / m_e(s, r, u, v), m_e(s, s, v, v))
//! ```
//!
//! which is the same as applying `m_e` vertexwise to four cubes obtained from
//! the input by freezing the `j` and `l` coordinates.  Since coordinate
//! freezing maps one-coordinate generators to one-coordinate generators or
//! constants, rotations never leave the cube algebra.  [`rotate_along_tree`]
//! composes one rotation per adjacent coordinate pair, and [`generator_set`]
//! collects the pivot pairs of all fully rotated cubes; over a modular
//! algebra the congruence generated by those pairs is exactly the commutator
//! of the congruence sequence the cube algebra was built from.

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;

use crate::algebra::{CloneExplorer, FiniteAlgebra, Term};
use crate::congruence::Partition;
use crate::cubes::{Cube, MatrixAlgebra};
use crate::error::{Error, Result};

/// Default bound on the number of distinct term tables [`find_day_chain`]
/// materializes before giving up on an unexhausted clone.
pub const DEFAULT_CHAIN_TABLES: usize = 30_000;

/// A candidate Day chain: 4-ary terms over the variables `x, y, z, u`
/// (indices 0-3), not yet checked against any algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DayChain {
    terms: Vec<Term>,
}

impl DayChain {
    /// Wraps a term sequence after checking the shape constraints: at least
    /// two terms (`m_0` and `m_n`), each using only the variables 0-3.
    pub fn new(terms: Vec<Term>) -> Result<DayChain> {
        if terms.len() < 2 {
            return Err(Error::contract("a Day chain needs at least two terms"));
        }
        for term in &terms {
            require_four_variables(term)?;
        }
        Ok(DayChain { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of links `n` in the chain `m_0, ..., m_n`.
    pub fn links(&self) -> usize {
        self.terms.len() - 1
    }

    /// Parses the JSON chain format: an array of s-expression strings, one
    /// per term, e.g. `["x", "(+ u (+ (- z) y))", "u"]`.
    pub fn from_json(text: &str) -> Result<DayChain> {
        let specs: Vec<String> = serde_json::from_str(text)?;
        let terms = specs
            .iter()
            .map(|s| Term::parse_sexpr(s))
            .collect::<Result<Vec<_>>>()?;
        DayChain::new(terms)
    }

    /// Serializes to the JSON chain format accepted by [`DayChain::from_json`].
    pub fn to_json(&self) -> String {
        let specs: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        serde_json::to_string_pretty(&specs).expect("string arrays serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<DayChain> {
        DayChain::from_json(&std::fs::read_to_string(path)?)
    }

    /// Tabulates every term over `alg` and checks the five identity families,
    /// in family order, links ascending, argument tuples in lexicographic
    /// order.  The first violation is reported as [`Error::ChainIdentity`].
    pub fn prepare(&self, alg: &FiniteAlgebra) -> Result<PreparedChain> {
        let n = alg.size;
        let mut tables = Vec::with_capacity(self.terms.len());
        let mut env = [0u8; 4];
        for term in &self.terms {
            let mut table = vec![0u8; n * n * n * n];
            for (p, slot) in table.iter_mut().enumerate() {
                env[0] = (p / (n * n * n)) as u8;
                env[1] = (p / (n * n) % n) as u8;
                env[2] = (p / n % n) as u8;
                env[3] = (p % n) as u8;
                *slot = alg.eval(term, &env)?;
            }
            tables.push(table);
        }
        let prepared = PreparedChain { size: n, tables };
        prepared.check_identities()?;
        Ok(prepared)
    }
}

/// A Day chain tabulated over a fixed algebra, with the identities already
/// checked.  Evaluation is a single table lookup, so the rotation loops never
/// re-interpret terms.
#[derive(Debug, Clone)]
pub struct PreparedChain {
    size: usize,
    tables: Vec<Vec<u8>>,
}

impl PreparedChain {
    /// Universe size of the algebra the chain was tabulated over.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of links `n` in the chain `m_0, ..., m_n`.
    pub fn links(&self) -> usize {
        self.tables.len() - 1
    }

    /// `m_e(x, y, z, u)`.
    pub fn eval(&self, e: usize, x: u8, y: u8, z: u8, u: u8) -> u8 {
        let n = self.size;
        self.tables[e][((x as usize * n + y as usize) * n + z as usize) * n + u as usize]
    }

    fn check_identities(&self) -> Result<()> {
        let n = self.size;
        let last = self.links();
        for e in 0..=last {
            for x in 0..n {
                for y in 0..n {
                    if self.eval(e, x as u8, y as u8, y as u8, x as u8) != x as u8 {
                        return Err(Error::ChainIdentity {
                            family: 1,
                            link: e,
                            tuple: vec![x, y, y, x],
                        });
                    }
                }
            }
        }
        for p in 0..n * n * n * n {
            let (x, y, z, u) = (p / (n * n * n), p / (n * n) % n, p / n % n, p % n);
            if self.eval(0, x as u8, y as u8, z as u8, u as u8) != x as u8 {
                return Err(Error::ChainIdentity {
                    family: 2,
                    link: 0,
                    tuple: vec![x, y, z, u],
                });
            }
        }
        for p in 0..n * n * n * n {
            let (x, y, z, u) = (p / (n * n * n), p / (n * n) % n, p / n % n, p % n);
            if self.eval(last, x as u8, y as u8, z as u8, u as u8) != u as u8 {
                return Err(Error::ChainIdentity {
                    family: 3,
                    link: last,
                    tuple: vec![x, y, z, u],
                });
            }
        }
        for e in (0..last).step_by(2) {
            for x in 0..n {
                for u in 0..n {
                    let (xu, uu) = (x as u8, u as u8);
                    if self.eval(e, xu, xu, uu, uu) != self.eval(e + 1, xu, xu, uu, uu) {
                        return Err(Error::ChainIdentity {
                            family: 4,
                            link: e,
                            tuple: vec![x, x, u, u],
                        });
                    }
                }
            }
        }
        for e in (1..last).step_by(2) {
            for x in 0..n {
                for y in 0..n {
                    for u in 0..n {
                        let (xu, yu, uu) = (x as u8, y as u8, u as u8);
                        if self.eval(e, xu, yu, yu, uu) != self.eval(e + 1, xu, yu, yu, uu) {
                            return Err(Error::ChainIdentity {
                                family: 5,
                                link: e,
                                tuple: vec![x, y, y, u],
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Checks `chain` against `alg`, returning the tabulated chain on success and
/// the first identity violation otherwise.  Alias for [`DayChain::prepare`].
pub fn verify_day_chain(alg: &FiniteAlgebra, chain: &DayChain) -> Result<PreparedChain> {
    chain.prepare(alg)
}

fn require_four_variables(term: &Term) -> Result<()> {
    match term {
        Term::Var(i) => {
            if *i < 4 {
                Ok(())
            } else {
                Err(Error::UnboundVariable { index: *i, bound: 4 })
            }
        }
        Term::App(_, children) => children.iter().try_for_each(require_four_variables),
    }
}

/// Outcome of a chain search.
#[derive(Debug, Clone)]
pub struct ChainSearch {
    pub chain: Option<DayChain>,
    /// The 4-ary term clone was provably exhausted.  Together with
    /// `chain: None` this certifies that no chain exists, i.e. that the
    /// algebra does not generate a congruence modular variety.
    pub complete: bool,
    /// Distinct 4-ary term tables materialized before stopping.
    pub explored: usize,
}

/// Searches for a shortest Day chain by interleaving term-clone closure with
/// a breadth-first search.
///
/// Tables satisfying identity family 1 are the chain's possible links; two of
/// them can sit at positions `e, e+1` exactly when they agree on `(x, x, u, u)`
/// (even `e`) or `(x, y, y, u)` (odd `e`).  Bucketing candidates by those two
/// restriction tables turns chain-finding into a shortest-path problem from
/// the projection `x` to the projection `u`, alternating even and odd edges.
/// The clone is enumerated breadth-first a round at a time and the path
/// search re-runs whenever new candidates appear, so a found chain is as
/// short as any chain whose links all lie in the explored fragment.
///
/// `cap` bounds the number of tables kept; when it is hit the search can
/// still succeed but can no longer certify absence.
pub fn find_day_chain(alg: &FiniteAlgebra, cap: usize) -> Result<ChainSearch> {
    let mut explorer = CloneExplorer::new(alg, 4)?;
    let mut state = SearchState::new(alg.size);
    let mut scanned = 0usize;
    loop {
        let mut grew = false;
        for i in scanned..explorer.len() {
            grew |= state.admit(i, explorer.table(i));
        }
        scanned = explorer.len();
        if grew {
            if let Some(path) = state.chain_path() {
                let chain = chain_from_path(&explorer, &path)?;
                debug_assert!(chain.prepare(alg).is_ok());
                return Ok(ChainSearch {
                    chain: Some(chain),
                    complete: explorer.is_exhausted(),
                    explored: explorer.len(),
                });
            }
        }
        if !explorer.round(cap) {
            return Ok(ChainSearch {
                chain: None,
                complete: explorer.is_exhausted(),
                explored: explorer.len(),
            });
        }
    }
}

fn chain_from_path(explorer: &CloneExplorer, path: &[usize]) -> Result<DayChain> {
    if path.len() == 1 {
        // The projections x and u share a table only over a one-element
        // universe, where the two-term chain x, u holds vacuously.
        return DayChain::new(vec![Term::Var(0), Term::Var(3)]);
    }
    DayChain::new(path.iter().map(|&i| explorer.term_of(i)).collect())
}

/// Candidate links found so far, indexed by their two restriction tables.
struct SearchState {
    n: usize,
    /// Explorer table indices of candidates, in discovery order.
    cands: Vec<usize>,
    /// Candidate positions of the projections x and u.
    start: Option<usize>,
    goal: Option<usize>,
    even_ids: HashMap<Vec<u8>, usize>,
    even_members: Vec<Vec<usize>>,
    cand_even: Vec<usize>,
    odd_ids: HashMap<Vec<u8>, usize>,
    odd_members: Vec<Vec<usize>>,
    cand_odd: Vec<usize>,
}

impl SearchState {
    fn new(n: usize) -> SearchState {
        SearchState {
            n,
            cands: Vec::new(),
            start: None,
            goal: None,
            even_ids: HashMap::new(),
            even_members: Vec::new(),
            cand_even: Vec::new(),
            odd_ids: HashMap::new(),
            odd_members: Vec::new(),
            cand_odd: Vec::new(),
        }
    }

    /// Registers table `idx` if it satisfies identity family 1; returns
    /// whether it became a candidate.
    fn admit(&mut self, idx: usize, table: &[u8]) -> bool {
        let n = self.n;
        for x in 0..n {
            for y in 0..n {
                if table[((x * n + y) * n + y) * n + x] != x as u8 {
                    return false;
                }
            }
        }
        let pos = self.cands.len();
        self.cands.push(idx);
        if self.start.is_none() && table.iter().enumerate().all(|(p, &v)| v == (p / (n * n * n)) as u8)
        {
            self.start = Some(pos);
        }
        if self.goal.is_none() && table.iter().enumerate().all(|(p, &v)| v == (p % n) as u8) {
            self.goal = Some(pos);
        }
        let mut even = Vec::with_capacity(n * n);
        for x in 0..n {
            for u in 0..n {
                even.push(table[((x * n + x) * n + u) * n + u]);
            }
        }
        let next_even = self.even_members.len();
        let bucket = *self.even_ids.entry(even).or_insert(next_even);
        if bucket == next_even {
            self.even_members.push(Vec::new());
        }
        self.even_members[bucket].push(pos);
        self.cand_even.push(bucket);
        let mut odd = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for u in 0..n {
                    odd.push(table[((x * n + y) * n + y) * n + u]);
                }
            }
        }
        let next_odd = self.odd_members.len();
        let bucket = *self.odd_ids.entry(odd).or_insert(next_odd);
        if bucket == next_odd {
            self.odd_members.push(Vec::new());
        }
        self.odd_members[bucket].push(pos);
        self.cand_odd.push(bucket);
        true
    }

    /// Shortest even/odd-alternating path from the x projection to the u
    /// projection, as explorer table indices.  States are (candidate, number
    /// of links taken mod 2); a bucket only needs expanding once per parity
    /// because its members form a clique.
    fn chain_path(&self) -> Option<Vec<usize>> {
        let (start, goal) = (self.start?, self.goal?);
        if start == goal {
            return Some(vec![self.cands[start]]);
        }
        let mut prev = vec![usize::MAX; self.cands.len() * 2];
        let mut seen = vec![false; self.cands.len() * 2];
        let mut drained_even = vec![false; self.even_members.len()];
        let mut drained_odd = vec![false; self.odd_members.len()];
        let mut queue = VecDeque::new();
        seen[start * 2] = true;
        queue.push_back(start * 2);
        while let Some(cur) = queue.pop_front() {
            let (pos, parity) = (cur / 2, cur % 2);
            let (bucket, members, drained) = if parity == 0 {
                (self.cand_even[pos], &self.even_members, &mut drained_even)
            } else {
                (self.cand_odd[pos], &self.odd_members, &mut drained_odd)
            };
            if drained[bucket] {
                continue;
            }
            drained[bucket] = true;
            for &q in &members[bucket] {
                let next = q * 2 + (1 - parity);
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                prev[next] = cur;
                if q == goal {
                    let mut path = Vec::new();
                    let mut s = next;
                    while s != usize::MAX {
                        path.push(self.cands[s / 2]);
                        s = prev[s];
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(next);
            }
        }
        None
    }
}

/// Whether the chain connects `a` to `c` across the `delta`-related pair
/// `(b, d)`: every link must satisfy `m_e(a, a, c, c) delta m_e(a, b, d, c)`.
/// Requires `(b, d)` to lie in `delta`.
pub fn shift_pair_test(
    prepared: &PreparedChain,
    delta: &Partition,
    a: u8,
    b: u8,
    c: u8,
    d: u8,
) -> Result<bool> {
    if delta.size() != prepared.size {
        return Err(Error::UniverseMismatch {
            expected: prepared.size,
            found: delta.size(),
        });
    }
    for v in [a, b, c, d] {
        if v as usize >= prepared.size {
            return Err(Error::ElementOutOfRange {
                value: v as usize,
                size: prepared.size,
            });
        }
    }
    if !delta.related(b as usize, d as usize) {
        return Err(Error::contract(
            "the shift pair test needs its second pair (b, d) inside the congruence",
        ));
    }
    Ok((0..=prepared.links()).all(|e| {
        delta.related(
            prepared.eval(e, a, a, c, c) as usize,
            prepared.eval(e, a, b, d, c) as usize,
        )
    }))
}

/// Applies chain link `e` across the coordinate pair `(j, l)` of a cube:
/// entry `f` of the result is
/// `m_e(h(f[j:=0][l:=1]), h(f[j:=0]), h(f), h(f[l:=1]))`.
pub fn shift_rotation(
    prepared: &PreparedChain,
    cube: &Cube,
    j: usize,
    l: usize,
    e: usize,
) -> Result<Cube> {
    let k = cube.k();
    if j >= k {
        return Err(Error::CoordinateRange { index: j, k });
    }
    if l >= k {
        return Err(Error::CoordinateRange { index: l, k });
    }
    if j == l {
        return Err(Error::CoordinateClash { j });
    }
    if e > prepared.links() {
        return Err(Error::TreeAddress {
            position: 0,
            value: e,
            bound: prepared.links(),
        });
    }
    for &v in cube.entries() {
        if v as usize >= prepared.size {
            return Err(Error::ElementOutOfRange {
                value: v as usize,
                size: prepared.size,
            });
        }
    }
    let mut out = vec![0u8; cube.entries().len()];
    rotate_entries(prepared, k, cube.entries(), j, l, e, &mut out);
    Cube::new(k, out)
}

fn rotate_entries(
    prepared: &PreparedChain,
    k: usize,
    src: &[u8],
    j: usize,
    l: usize,
    e: usize,
    dst: &mut [u8],
) {
    let bj = 1usize << (k - 1 - j);
    let bl = 1usize << (k - 1 - l);
    for (f, slot) in dst.iter_mut().enumerate() {
        let xj0 = f & !bj;
        *slot = prepared.eval(e, src[xj0 | bl], src[xj0], src[f], src[f | bl]);
    }
}

/// Composes one rotation per adjacent coordinate pair: stage `i` applies
/// chain link `address[i]` across coordinates `(i, i + 1)`.  The address must
/// have `k - 1` entries, each at most the number of links.
pub fn rotate_along_tree(
    prepared: &PreparedChain,
    cube: &Cube,
    address: &[usize],
) -> Result<Cube> {
    let k = cube.k();
    if address.len() + 1 != k {
        return Err(Error::contract(format!(
            "rotating a {}-dimensional cube takes a {}-entry address, got {}",
            k,
            k - 1,
            address.len()
        )));
    }
    for (position, &value) in address.iter().enumerate() {
        if value > prepared.links() {
            return Err(Error::TreeAddress {
                position,
                value,
                bound: prepared.links(),
            });
        }
    }
    let mut current = cube.clone();
    for (i, &e) in address.iter().enumerate() {
        current = shift_rotation(prepared, &current, i, i + 1, e)?;
    }
    Ok(current)
}

/// Pivot pairs of every cube of `m` under every full rotation address,
/// sorted and deduplicated.  Over a modular algebra these pairs generate the
/// commutator of the congruence sequence `m` was built from, which gives an
/// independent route to it.
pub fn generator_set(m: &MatrixAlgebra, prepared: &PreparedChain) -> Result<Vec<(u8, u8)>> {
    if prepared.size != m.n() {
        return Err(Error::UniverseMismatch {
            expected: prepared.size,
            found: m.n(),
        });
    }
    let k = m.k();
    let len = 1usize << k;
    let space = m.space();
    let mut pairs: HashSet<(u8, u8)> = HashSet::new();
    let mut buf = vec![0u8; len];
    for &word in m.packed() {
        for (p, slot) in buf.iter_mut().enumerate() {
            *slot = space.entry_at(word, p);
        }
        descend(prepared, k, 0, &buf, &mut pairs);
    }
    let mut out: Vec<(u8, u8)> = pairs.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// Depth-first enumeration of rotation addresses, sharing the common-prefix
/// rotations; at full depth the pivot pair is the last two entries.
fn descend(
    prepared: &PreparedChain,
    k: usize,
    depth: usize,
    buf: &[u8],
    out: &mut HashSet<(u8, u8)>,
) {
    if depth + 1 == k {
        out.insert((buf[buf.len() - 2], buf[buf.len() - 1]));
        return;
    }
    let mut next = vec![0u8; buf.len()];
    for e in 0..=prepared.links() {
        rotate_entries(prepared, k, buf, depth, depth + 1, e, &mut next);
        descend(prepared, k, depth + 1, &next, out);
    }
}
