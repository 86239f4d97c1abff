//! Finite algebras as explicit operation tables.
//!
//! An algebra is a universe `0..size` (at most 256 elements, so elements are
//! `u8`) together with finitely many named operations.  Tables are row-major:
//! the entry for arguments `(a_0, .., a_{r-1})` sits at index
//! `a_0*n^(r-1) + a_1*n^(r-2) + .. + a_{r-1}`.  The same convention is used
//! for elements of direct powers, which are packed radix-`n` integers with the
//! first coordinate most significant.
//!
//! Everything downstream (congruence generation, the cube engine, the Day
//! chain search) reduces to evaluating these tables, so this module keeps the
//! representations plain and the validation strict.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::congruence::Partition;
use crate::error::{Error, Result};

/// Largest number of table entries a single materialized operation may have.
/// Powers and quotients that would exceed it report a capacity error instead
/// of allocating; the packed-cube engine evaluates large powers componentwise
/// without ever materializing their tables.
pub const TABLE_ENTRY_LIMIT: usize = 1 << 24;

/// Default cap on the number of tables explored by [`FiniteAlgebra::term_operations_closure`].
pub const DEFAULT_CLONE_CAP: usize = 1_000_000;

/// A single named operation given by its full table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub symbol: String,
    pub arity: usize,
    /// Row-major table of length `size^arity`.
    pub table: Vec<u8>,
}

/// A finite algebra: a named universe `0..size` with operation tables.
///
/// The JSON form mirrors the struct exactly:
///
/// ```json
/// { "name": "z2", "size": 2,
///   "operations": [ { "symbol": "+", "arity": 2, "table": [0,1,1,0] } ] }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub operations: Vec<Operation>,
}

impl FiniteAlgebra {
    /// Builds and validates an algebra.
    pub fn new(name: impl Into<String>, size: usize, operations: Vec<Operation>) -> Result<Self> {
        let alg = FiniteAlgebra {
            name: name.into(),
            size,
            operations,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// Checks the structural invariants: size in range, table lengths equal to
    /// `size^arity`, entries inside the universe, symbols distinct.
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 || self.size > 256 {
            return Err(Error::SizeOutOfRange { size: self.size });
        }
        let mut seen = HashMap::new();
        for op in &self.operations {
            if seen.insert(op.symbol.clone(), ()).is_some() {
                return Err(Error::DuplicateSymbol {
                    symbol: op.symbol.clone(),
                });
            }
            let expected = checked_pow(self.size, op.arity).filter(|&e| e <= TABLE_ENTRY_LIMIT);
            match expected {
                Some(e) if e == op.table.len() => {}
                Some(e) => {
                    return Err(Error::TableLength {
                        symbol: op.symbol.clone(),
                        arity: op.arity,
                        size: self.size,
                        expected: e,
                        found: op.table.len(),
                    })
                }
                None => {
                    return Err(Error::Capacity {
                        what: format!("table for operation `{}`", op.symbol),
                        needed: (self.size as u128).pow(op.arity as u32),
                        limit: TABLE_ENTRY_LIMIT as u128,
                    })
                }
            }
            for (index, &value) in op.table.iter().enumerate() {
                if value as usize >= self.size {
                    return Err(Error::TableEntry {
                        symbol: op.symbol.clone(),
                        index,
                        value: value as usize,
                        size: self.size,
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses and validates an algebra from its JSON form.
    pub fn from_json(text: &str) -> Result<Self> {
        let alg: FiniteAlgebra = serde_json::from_str(text)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Reads an algebra from a JSON file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Canonical JSON form; parsing it back yields an equal algebra.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("algebra serializes");
        text.push('\n');
        text
    }

    /// Index of the operation with the given symbol.
    pub fn op_index(&self, symbol: &str) -> Result<usize> {
        self.operations
            .iter()
            .position(|op| op.symbol == symbol)
            .ok_or_else(|| Error::UnknownOperation {
                symbol: symbol.to_string(),
            })
    }

    /// Applies operation `op` to arguments already known to be elements.
    pub fn apply(&self, op: usize, args: &[u8]) -> u8 {
        let table = &self.operations[op];
        debug_assert_eq!(table.arity, args.len());
        let mut idx = 0usize;
        for &a in args {
            debug_assert!((a as usize) < self.size);
            idx = idx * self.size + a as usize;
        }
        table.table[idx]
    }

    /// Evaluates a term under an environment binding variable `i` to `env[i]`.
    pub fn eval(&self, term: &Term, env: &[u8]) -> Result<u8> {
        match term {
            Term::Var(i) => {
                let &value = env.get(*i).ok_or(Error::UnboundVariable {
                    index: *i,
                    bound: env.len(),
                })?;
                if (value as usize) >= self.size {
                    return Err(Error::ElementOutOfRange {
                        value: value as usize,
                        size: self.size,
                    });
                }
                Ok(value)
            }
            Term::App(symbol, children) => {
                let op = self.op_index(symbol)?;
                let arity = self.operations[op].arity;
                if arity != children.len() {
                    return Err(Error::ArityMismatch {
                        symbol: symbol.clone(),
                        expected: arity,
                        found: children.len(),
                    });
                }
                let mut args = Vec::with_capacity(children.len());
                for child in children {
                    args.push(self.eval(child, env)?);
                }
                Ok(self.apply(op, &args))
            }
        }
    }

    /// The direct power `A^m` with componentwise operations.  Elements are
    /// packed radix-`size` integers, first coordinate most significant, so the
    /// tuple `(1,1,0,0)` over a 2-element algebra is element `12`.
    pub fn power(&self, m: usize) -> Result<FiniteAlgebra> {
        let psize = checked_pow(self.size, m)
            .filter(|&s| s <= 256)
            .ok_or_else(|| Error::Capacity {
                what: format!("universe of {}^{}", self.name, m),
                needed: (self.size as u128).pow(m as u32),
                limit: 256,
            })?;
        let mut operations = Vec::with_capacity(self.operations.len());
        for op in &self.operations {
            let entries =
                checked_pow(psize, op.arity)
                    .filter(|&e| e <= TABLE_ENTRY_LIMIT)
                    .ok_or_else(|| Error::Capacity {
                        what: format!("table for `{}` on {}^{}", op.symbol, self.name, m),
                        needed: (psize as u128).pow(op.arity as u32),
                        limit: TABLE_ENTRY_LIMIT as u128,
                    })?;
            let mut table = Vec::with_capacity(entries);
            let mut args = vec![0u8; op.arity];
            let mut digits = vec![0u8; op.arity];
            for packed_args in 0..entries {
                // Unpack each argument, apply the base operation per
                // coordinate, repack the result.
                let mut rest = packed_args;
                for slot in (0..op.arity).rev() {
                    args[slot] = (rest % psize) as u8;
                    rest /= psize;
                }
                let mut out = 0usize;
                for pos in 0..m {
                    let shift = m - 1 - pos;
                    for (slot, &arg) in args.iter().enumerate() {
                        digits[slot] = ((arg as usize / pow(self.size, shift)) % self.size) as u8;
                    }
                    out = out * self.size + self.apply_raw(op, &digits) as usize;
                }
                table.push(out as u8);
            }
            operations.push(Operation {
                symbol: op.symbol.clone(),
                arity: op.arity,
                table,
            });
        }
        FiniteAlgebra::new(format!("{}^{}", self.name, m), psize, operations)
    }

    fn apply_raw(&self, op: &Operation, args: &[u8]) -> u8 {
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.size + a as usize;
        }
        op.table[idx]
    }

    /// Least subuniverse containing `generators`, as a sorted element list.
    pub fn subuniverse_closure(&self, generators: &[u8]) -> Result<Vec<u8>> {
        for &g in generators {
            if (g as usize) >= self.size {
                return Err(Error::ElementOutOfRange {
                    value: g as usize,
                    size: self.size,
                });
            }
        }
        let mut member = vec![false; self.size];
        let mut elems: Vec<u8> = Vec::new();
        for &g in generators {
            if !member[g as usize] {
                member[g as usize] = true;
                elems.push(g);
            }
        }
        for op in &self.operations {
            if op.arity == 0 {
                let value = op.table[0];
                if !member[value as usize] {
                    member[value as usize] = true;
                    elems.push(value);
                }
            }
        }
        let mut old = 0usize;
        let mut args = Vec::new();
        while old < elems.len() {
            let snapshot = elems.len();
            for op in &self.operations {
                if op.arity == 0 {
                    continue;
                }
                // Iterate argument tuples drawn from the current set that use
                // at least one element discovered in the previous round.
                for_each_frontier_tuple(op.arity, old, snapshot, |indices| {
                    args.clear();
                    args.extend(indices.iter().map(|&i| elems[i]));
                    let value = self.apply_raw(op, &args);
                    if !member[value as usize] {
                        member[value as usize] = true;
                        elems.push(value);
                    }
                });
            }
            old = snapshot;
        }
        elems.sort_unstable();
        Ok(elems)
    }

    /// Quotient by a congruence, plus the element-to-block map.  Blocks are
    /// numbered by their least elements in ascending order.
    ///
    /// Fails with [`Error::NotACongruence`] naming an operation and a witness
    /// tuple when `pi` is not compatible with some operation.
    pub fn quotient(&self, pi: &Partition) -> Result<(FiniteAlgebra, Vec<usize>)> {
        if pi.size() != self.size {
            return Err(Error::UniverseMismatch {
                expected: self.size,
                found: pi.size(),
            });
        }
        let reps = pi.block_reps();
        let qsize = reps.len();
        let mut block_of = vec![0usize; self.size];
        for (block, &rep) in reps.iter().enumerate() {
            for (a, slot) in block_of.iter_mut().enumerate() {
                if pi.rep(a) == rep {
                    *slot = block;
                }
            }
        }
        let mut operations = Vec::with_capacity(self.operations.len());
        for op in &self.operations {
            let entries = pow(qsize, op.arity);
            let mut table = vec![0u8; entries];
            let mut args = vec![0u8; op.arity];
            for (packed, entry) in table.iter_mut().enumerate() {
                let mut rest = packed;
                for slot in (0..op.arity).rev() {
                    args[slot] = reps[rest % qsize] as u8;
                    rest /= qsize;
                }
                *entry = block_of[self.apply_raw(op, &args) as usize] as u8;
            }
            operations.push(Operation {
                symbol: op.symbol.clone(),
                arity: op.arity,
                table,
            });
        }
        // Compatibility check: the blockwise table must agree with the
        // original operation on every tuple, not only on representatives.
        let mut args = vec![0u8; 0];
        for (oi, op) in self.operations.iter().enumerate() {
            let entries = pow(self.size, op.arity);
            args.resize(op.arity, 0);
            for packed in 0..entries {
                let mut rest = packed;
                let mut qidx = 0usize;
                for slot in (0..op.arity).rev() {
                    args[slot] = (rest % self.size) as u8;
                    rest /= self.size;
                }
                for &a in args.iter() {
                    qidx = qidx * qsize + block_of[a as usize];
                }
                if operations[oi].table[qidx] as usize != block_of[self.apply_raw(op, &args) as usize]
                {
                    return Err(Error::NotACongruence {
                        operation: op.symbol.clone(),
                        witness: args.iter().map(|&a| a as usize).collect(),
                    });
                }
            }
        }
        let quotient = FiniteAlgebra::new(format!("{}/{}", self.name, pi), qsize, operations)?;
        Ok((quotient, block_of))
    }

    /// Closure of the `m`-ary projections under pointwise application of the
    /// basic operations: the clone of `m`-ary term operations, explored
    /// breadth-first so each table keeps a witnessing term of least discovered
    /// depth.  Exploration stops at `cap` tables; `complete` reports whether
    /// the clone was exhausted.
    pub fn term_operations_closure(&self, m: usize, cap: usize) -> Result<TermClone> {
        let mut explorer = CloneExplorer::new(self, m)?;
        while explorer.round(cap) {}
        let complete = explorer.is_exhausted();
        let mut terms: Vec<Option<Term>> = vec![None; explorer.tables.len()];
        for i in 0..explorer.tables.len() {
            build_term(i, &explorer.provenance, &self.operations, &mut terms);
        }
        Ok(TermClone {
            arity: m,
            tables: explorer
                .tables
                .into_iter()
                .map(|values| FunctionTable { arity: m, values })
                .collect(),
            terms: terms.into_iter().map(|t| t.expect("term built")).collect(),
            complete,
        })
    }
}

/// Round-by-round exploration of the `arity`-ary term clone, for callers that
/// interleave searching with closure (term tables arrive breadth-first, so
/// witnesses come out depth-minimal).
pub(crate) struct CloneExplorer<'a> {
    alg: &'a FiniteAlgebra,
    points: usize,
    /// Distinct tables in discovery order; projections and constants first.
    tables: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    provenance: Vec<Provenance>,
    /// Everything below this index has been combined with everything below it.
    processed: usize,
    /// A push was refused because of the cap; exhaustion can no longer be
    /// certified.
    truncated: bool,
    exhausted: bool,
}

impl<'a> CloneExplorer<'a> {
    pub(crate) fn new(alg: &'a FiniteAlgebra, m: usize) -> Result<CloneExplorer<'a>> {
        let points = checked_pow(alg.size, m)
            .filter(|&p| p <= TABLE_ENTRY_LIMIT)
            .ok_or_else(|| Error::Capacity {
                what: format!("{}-ary function tables over {}", m, alg.name),
                needed: (alg.size as u128).pow(m as u32),
                limit: TABLE_ENTRY_LIMIT as u128,
            })?;
        let mut explorer = CloneExplorer {
            alg,
            points,
            tables: Vec::new(),
            index: HashMap::new(),
            provenance: Vec::new(),
            processed: 0,
            truncated: false,
            exhausted: false,
        };
        for v in 0..m {
            let mut table = vec![0u8; points];
            for (p, slot) in table.iter_mut().enumerate() {
                *slot = ((p / pow(alg.size, m - 1 - v)) % alg.size) as u8;
            }
            explorer.push(table, Provenance::Projection(v), usize::MAX);
        }
        for (oi, op) in alg.operations.iter().enumerate() {
            if op.arity == 0 {
                explorer.push(
                    vec![op.table[0]; points],
                    Provenance::Composite(oi, Vec::new()),
                    usize::MAX,
                );
            }
        }
        Ok(explorer)
    }

    pub(crate) fn len(&self) -> usize {
        self.tables.len()
    }

    pub(crate) fn table(&self, i: usize) -> &[u8] {
        &self.tables[i]
    }

    /// Whether the whole clone has provably been enumerated.
    pub(crate) fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// A least-depth term evaluating to table `i`.
    pub(crate) fn term_of(&self, i: usize) -> Term {
        let mut memo: Vec<Option<Term>> = vec![None; self.tables.len()];
        build_term(i, &self.provenance, &self.alg.operations, &mut memo);
        memo[i].take().expect("term built")
    }

    fn push(&mut self, table: Vec<u8>, from: Provenance, cap: usize) {
        if self.index.contains_key(&table) {
            return;
        }
        if self.tables.len() >= cap {
            self.truncated = true;
            return;
        }
        self.index.insert(table.clone(), self.tables.len());
        self.tables.push(table);
        self.provenance.push(from);
    }

    /// Combines the latest additions with everything known, growing the table
    /// set but refusing to pass `cap`.  Returns whether anything new appeared;
    /// a quiet round (without truncation) certifies exhaustion.
    pub(crate) fn round(&mut self, cap: usize) -> bool {
        let old = self.processed;
        let snapshot = self.tables.len();
        if old == snapshot || self.exhausted {
            if !self.truncated {
                self.exhausted = true;
            }
            return false;
        }
        for oi in 0..self.alg.operations.len() {
            let arity = self.alg.operations[oi].arity;
            if arity == 0 {
                continue;
            }
            for_each_frontier_tuple(arity, old, snapshot, |indices| {
                if self.tables.len() >= cap {
                    self.truncated = true;
                    return;
                }
                let mut table = vec![0u8; self.points];
                for (p, slot) in table.iter_mut().enumerate() {
                    let mut idx = 0usize;
                    for &child in indices.iter() {
                        idx = idx * self.alg.size + self.tables[child][p] as usize;
                    }
                    *slot = self.alg.operations[oi].table[idx];
                }
                self.push(table, Provenance::Composite(oi, indices.to_vec()), cap);
            });
        }
        self.processed = snapshot;
        if self.tables.len() == snapshot && !self.truncated {
            self.exhausted = true;
        }
        self.tables.len() > snapshot
    }
}

/// Result of [`FiniteAlgebra::term_operations_closure`]: tables in discovery
/// order (projections first) with parallel witnessing terms.
#[derive(Debug, Clone)]
pub struct TermClone {
    pub arity: usize,
    pub tables: Vec<FunctionTable>,
    pub terms: Vec<Term>,
    pub complete: bool,
}

/// An explicit `arity`-ary operation table, not attached to an algebra's
/// signature; used for term operations discovered by closure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionTable {
    pub arity: usize,
    pub values: Vec<u8>,
}

#[derive(Debug, Clone)]
enum Provenance {
    Projection(usize),
    Composite(usize, Vec<usize>),
}

fn build_term(
    i: usize,
    provenance: &[Provenance],
    operations: &[Operation],
    terms: &mut Vec<Option<Term>>,
) {
    if terms[i].is_some() {
        return;
    }
    let term = match &provenance[i] {
        Provenance::Projection(v) => Term::Var(*v),
        Provenance::Composite(oi, children) => {
            let mut parts = Vec::with_capacity(children.len());
            for &child in children {
                build_term(child, provenance, operations, terms);
                parts.push(terms[child].clone().expect("child term built"));
            }
            Term::App(operations[*oi].symbol.clone(), parts)
        }
    };
    terms[i] = Some(term);
}

/// A term over variables `x0, x1, ..` and the operation symbols of some
/// algebra.  The first four variables print as `x y z u`, matching the text
/// form used for stored chains: `(+ x (- y))` is `x0 + (-x1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    /// Parses the s-expression text form.  Bare atoms are variables
    /// (`x y z u` or `xN`); every operation application is parenthesized with
    /// the symbol first, including nullary ones: `(0)`.
    pub fn parse_sexpr(text: &str) -> Result<Term> {
        let tokens = tokenize(text)?;
        let mut pos = 0usize;
        let term = parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse {
                what: "term",
                position: tokens[pos].1,
                message: "trailing input after term".into(),
            });
        }
        Ok(term)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "{}", var_name(*i)),
            Term::App(symbol, children) => {
                write!(f, "({}", symbol)?;
                for child in children {
                    write!(f, " {}", child)?;
                }
                write!(f, ")")
            }
        }
    }
}

fn var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "u".into(),
        n => format!("x{}", n),
    }
}

fn parse_var(token: &str) -> Option<usize> {
    match token {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        "u" => Some(3),
        _ => token.strip_prefix('x').and_then(|d| d.parse().ok()),
    }
}

enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                tokens.push((Token::Open, i));
                i += 1;
            }
            b')' => {
                tokens.push((Token::Close, i));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                tokens.push((Token::Atom(text[start..i].to_string()), start));
            }
        }
    }
    Ok(tokens)
}

fn parse_tokens(tokens: &[(Token, usize)], pos: &mut usize) -> Result<Term> {
    match tokens.get(*pos) {
        None => Err(Error::Parse {
            what: "term",
            position: 0,
            message: "empty input".into(),
        }),
        Some((Token::Atom(atom), at)) => {
            *pos += 1;
            parse_var(atom).map(Term::Var).ok_or(Error::Parse {
                what: "term",
                position: *at,
                message: format!("`{}` is not a variable; operations are written (symbol ..)", atom),
            })
        }
        Some((Token::Close, at)) => Err(Error::Parse {
            what: "term",
            position: *at,
            message: "unexpected `)`".into(),
        }),
        Some((Token::Open, at)) => {
            let open_at = *at;
            *pos += 1;
            let symbol = match tokens.get(*pos) {
                Some((Token::Atom(symbol), _)) => symbol.clone(),
                _ => {
                    return Err(Error::Parse {
                        what: "term",
                        position: open_at,
                        message: "expected an operation symbol after `(`".into(),
                    })
                }
            };
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some((Token::Close, _)) => {
                        *pos += 1;
                        return Ok(Term::App(symbol, children));
                    }
                    Some(_) => children.push(parse_tokens(tokens, pos)?),
                    None => {
                        return Err(Error::Parse {
                            what: "term",
                            position: open_at,
                            message: "unclosed `(`".into(),
                        })
                    }
                }
            }
        }
    }
}

/// `base^exp` without overflow checks; callers guarantee smallness.
pub(crate) fn pow(base: usize, exp: usize) -> usize {
    base.pow(exp as u32)
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// Calls `f` on every `arity`-tuple of indices below `len` containing at
/// least one index at or beyond `old` (the frontier), without repetition.
///
/// Tuples are grouped by the first position holding a frontier index: earlier
/// positions range over the old elements, later ones over everything.  Groups
/// with a *later* split point run first, so tuples built mostly from old
/// elements appear early — incremental searches that scan results as they
/// arrive benefit from seeing those shallow combinations first.
pub(crate) fn for_each_frontier_tuple(arity: usize, old: usize, len: usize, mut f: impl FnMut(&[usize])) {
    if old >= len {
        return;
    }
    let mut indices = vec![0usize; arity];
    for first in (0..arity).rev() {
        if first > 0 && old == 0 {
            // Positions before the split range over the old elements; with an
            // empty old set only the split-at-0 group exists.
            continue;
        }
        let mut done = false;
        for slot in indices.iter_mut() {
            *slot = 0;
        }
        indices[first] = old;
        while !done {
            f(&indices);
            // Odometer step honoring the per-position ranges.
            done = true;
            for pos in (0..arity).rev() {
                let (lo, hi) = if pos < first {
                    (0, old)
                } else if pos == first {
                    (old, len)
                } else {
                    (0, len)
                };
                indices[pos] += 1;
                if indices[pos] < hi {
                    done = false;
                    break;
                }
                indices[pos] = lo;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::corpus;

    fn z2() -> FiniteAlgebra {
        corpus().algebra("z2").clone()
    }

    fn z4() -> FiniteAlgebra {
        corpus().algebra("z4").clone()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let alg = z4();
        let text = alg.to_json();
        let back = FiniteAlgebra::from_json(&text).unwrap();
        assert_eq!(alg, back);
        assert_eq!(text, back.to_json());
    }

    #[test]
    fn validation_rejects_bad_tables() {
        let err = FiniteAlgebra::new(
            "bad",
            2,
            vec![Operation {
                symbol: "f".into(),
                arity: 1,
                table: vec![0, 1, 1],
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::TableLength { expected: 2, found: 3, .. }));

        let err = FiniteAlgebra::new(
            "bad",
            2,
            vec![Operation {
                symbol: "f".into(),
                arity: 1,
                table: vec![0, 2],
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::TableEntry { value: 2, .. }));

        assert!(matches!(
            FiniteAlgebra::new("empty", 0, vec![]),
            Err(Error::SizeOutOfRange { size: 0 })
        ));
    }

    #[test]
    fn eval_matches_tables() {
        let alg = z4();
        // x - y + z, the familiar Mal'cev operation on a cyclic group.
        let term = Term::App(
            "+".into(),
            vec![
                Term::App("-".into(), vec![Term::Var(1)]),
                Term::App("+".into(), vec![Term::Var(0), Term::Var(2)]),
            ],
        );
        for x in 0..4u8 {
            for y in 0..4u8 {
                for z in 0..4u8 {
                    let value = alg.eval(&term, &[x, y, z]).unwrap();
                    assert_eq!(value as usize, (4 + x as usize + z as usize - y as usize) % 4);
                }
            }
        }
        assert!(matches!(
            alg.eval(&Term::Var(3), &[0, 1, 2]),
            Err(Error::UnboundVariable { index: 3, bound: 3 })
        ));
        assert!(matches!(
            alg.eval(&Term::App("*".into(), vec![]), &[]),
            Err(Error::UnknownOperation { .. })
        ));
    }

    #[test]
    fn term_text_round_trip() {
        let term = Term::App(
            "+".into(),
            vec![
                Term::Var(3),
                Term::App("-".into(), vec![Term::Var(2)]),
                Term::App("0".into(), vec![]),
            ],
        );
        let text = term.to_string();
        assert_eq!(text, "(+ u (- z) (0))");
        assert_eq!(Term::parse_sexpr(&text).unwrap(), term);
        assert!(Term::parse_sexpr("(+ x").is_err());
        assert!(Term::parse_sexpr("q").is_err());
    }

    #[test]
    fn power_packs_row_major() {
        let alg = z4().power(2).unwrap();
        assert_eq!(alg.size, 16);
        // (1,2) + (3,1) = (0,3): packed 6 + packed 13 = packed 3.
        let plus = alg.op_index("+").unwrap();
        assert_eq!(alg.apply(plus, &[6, 13]), 3);
    }

    #[test]
    fn power_reports_capacity() {
        let err = z4().power(8).unwrap_err();
        match err {
            Error::Capacity { needed, limit, .. } => {
                assert_eq!(needed, 65536);
                assert_eq!(limit, 256);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn closure_finds_even_weight_subgroup() {
        // In Z2^4 the four packed vectors (1,1,0,0), (0,0,1,1), (1,0,1,0),
        // (0,1,0,1) generate exactly the even-weight vectors.
        let alg = z2().power(4).unwrap();
        let closed = alg.subuniverse_closure(&[12, 3, 10, 5]).unwrap();
        let expected: Vec<u8> = (0u8..16).filter(|v| v.count_ones() % 2 == 0).collect();
        assert_eq!(closed, expected);
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let alg = corpus().algebra("s3").clone();
        let once = alg.subuniverse_closure(&[1]).unwrap();
        let twice = alg.subuniverse_closure(&once).unwrap();
        assert_eq!(once, twice);
        let bigger = alg.subuniverse_closure(&[1, 3]).unwrap();
        assert!(once.iter().all(|e| bigger.contains(e)));
    }

    #[test]
    fn quotient_of_z4_is_z2() {
        let alg = z4();
        let pi = Partition::parse("|0 2|1 3|", 4).unwrap();
        let (q, map) = alg.quotient(&pi).unwrap();
        assert_eq!(q.size, 2);
        assert_eq!(map, vec![0, 1, 0, 1]);
        for op in &z2().operations {
            let qop = &q.operations[q.op_index(&op.symbol).unwrap()];
            assert_eq!(qop.table, op.table, "operation {}", op.symbol);
        }
    }

    #[test]
    fn quotient_rejects_non_congruences() {
        let alg = z4();
        let pi = Partition::parse("|0 1|2|3|", 4).unwrap();
        let err = alg.quotient(&pi).unwrap_err();
        match err {
            Error::NotACongruence { operation, witness } => {
                assert_eq!(operation, "+");
                assert_eq!(witness.len(), 2);
            }
            other => panic!("expected congruence failure, got {other:?}"),
        }
    }

    #[test]
    fn z2_clone_is_the_zero_preserving_affine_maps() {
        // Oracle: enumerate all affine maps c + e0*x0 + .. + e3*x3 over the
        // two-element field and keep the zero-preserving ones (c = 0).
        let alg = z2();
        let clone = alg.term_operations_closure(4, DEFAULT_CLONE_CAP).unwrap();
        assert!(clone.complete);
        let mut expected: Vec<Vec<u8>> = Vec::new();
        for mask in 0u32..32 {
            let c = (mask >> 4) & 1;
            if c != 0 {
                continue;
            }
            let table: Vec<u8> = (0..16u32)
                .map(|p| {
                    let mut acc = c;
                    for v in 0..4 {
                        // Point p packs (x0..x3) row-major: x0 is bit 3.
                        let bit = (p >> (3 - v)) & 1;
                        acc ^= ((mask >> v) & 1) * bit;
                    }
                    acc as u8
                })
                .collect();
            if !expected.contains(&table) {
                expected.push(table);
            }
        }
        let mut got: Vec<Vec<u8>> = clone.tables.iter().map(|t| t.values.clone()).collect();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 16);
    }

    #[test]
    fn semilattice_clone_is_the_subset_meets() {
        // Oracle: the 4-ary term operations of a meet-semilattice are exactly
        // the meets over nonempty variable subsets.
        let alg = corpus().algebra("semilattice2").clone();
        let clone = alg.term_operations_closure(4, DEFAULT_CLONE_CAP).unwrap();
        assert!(clone.complete);
        let mut expected: Vec<Vec<u8>> = Vec::new();
        for subset in 1u32..16 {
            let table: Vec<u8> = (0..16u32)
                .map(|p| {
                    let mut acc = 1u8;
                    for v in 0..4 {
                        if (subset >> v) & 1 == 1 {
                            acc &= ((p >> (3 - v)) & 1) as u8;
                        }
                    }
                    acc
                })
                .collect();
            if !expected.contains(&table) {
                expected.push(table);
            }
        }
        let mut got: Vec<Vec<u8>> = clone.tables.iter().map(|t| t.values.clone()).collect();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 15);

        // Witness terms evaluate to their tables.
        for (table, term) in clone.tables.iter().zip(&clone.terms) {
            for p in 0..16u32 {
                let env: Vec<u8> = (0..4).map(|v| ((p >> (3 - v)) & 1) as u8).collect();
                assert_eq!(alg.eval(term, &env).unwrap(), table.values[p as usize]);
            }
        }
    }

    #[test]
    fn clone_cap_truncates_and_reports() {
        let alg = corpus().algebra("semilattice2").clone();
        let clone = alg.term_operations_closure(4, 7).unwrap();
        assert!(!clone.complete);
        assert_eq!(clone.tables.len(), 7);
    }

    #[test]
    fn one_element_clone_is_trivial() {
        let alg = corpus().algebra("trivial").clone();
        let clone = alg.term_operations_closure(4, DEFAULT_CLONE_CAP).unwrap();
        assert!(clone.complete);
        assert_eq!(clone.tables.len(), 1);
    }
}
