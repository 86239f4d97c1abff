//! The built-in algebra corpus and the theorem-checking harness.
//!
//! The corpus is a fixed family of small algebras — cyclic groups, the Klein
//! four-group, the symmetric and dihedral groups on small degree, the ring
//! Z4, a two-element semilattice, and a one-element control — used by the
//! test suite and by the sweep checks in this module.  Group entries carry
//! their signature symbols so group-theoretic oracles can find multiplication
//! and inverse without guessing.
//!
//! The [`Harness`] sweeps the structural laws of the higher commutator over
//! one algebra's whole congruence lattice: order bounds, symmetry under
//! permutation of the arguments, additivity over joins, compatibility with
//! quotient maps, and agreement between the line-based and two-term
//! definitions.  Laws that hold only in congruence modular varieties are
//! gated on the existence of a chain of modularity witness terms, so the
//! harness reports them as inapplicable rather than failed for algebras like
//! the semilattice.  Cube algebras, commutators, and two-term commutators
//! are cached per congruence tuple, so overlapping sweeps pay for each
//! computation once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use serde::Serialize;

use crate::algebra::{FiniteAlgebra, Operation};
use crate::commutator::{higher_commutator, higher_commutator_with, two_term_commutator_with};
use crate::congruence::{congruence_lattice, CongruenceLattice, Partition};
use crate::cubes::{generate_matrix_algebra, MatrixAlgebra, DEFAULT_CAP_BITS};
use crate::dayterms::{find_day_chain, DayChain, PreparedChain, DEFAULT_CHAIN_TABLES};
use crate::error::Result;

/// Signature roles for corpus entries that are groups, so oracles can
/// compute products and inverses without symbol guessing.
#[derive(Debug, Clone, Copy)]
pub struct GroupSpec {
    pub mul: &'static str,
    pub inv: &'static str,
    pub identity: u8,
}

/// One corpus algebra plus the metadata the checks need.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub algebra: FiniteAlgebra,
    /// Whether the algebra generates a congruence-modular variety; decides
    /// which sweeps expect a chain of modularity witness terms.
    pub modular: bool,
    pub group: Option<GroupSpec>,
}

/// The fixed corpus, built once per process.
#[derive(Debug)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn entry(&self, name: &str) -> &CorpusEntry {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .unwrap_or_else(|| panic!("no corpus algebra named `{}`", name))
    }

    pub fn algebra(&self, name: &str) -> &FiniteAlgebra {
        &self.entry(name).algebra
    }
}

/// The shared corpus instance.
pub fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(build_corpus)
}

fn binary(symbol: &str, n: usize, f: impl Fn(usize, usize) -> usize) -> Operation {
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            table.push(f(a, b) as u8);
        }
    }
    Operation {
        symbol: symbol.into(),
        arity: 2,
        table,
    }
}

fn unary(symbol: &str, n: usize, f: impl Fn(usize) -> usize) -> Operation {
    Operation {
        symbol: symbol.into(),
        arity: 1,
        table: (0..n).map(|a| f(a) as u8).collect(),
    }
}

fn constant(symbol: &str, value: usize) -> Operation {
    Operation {
        symbol: symbol.into(),
        arity: 0,
        table: vec![value as u8],
    }
}

fn cyclic_group(name: &'static str, n: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(
        name,
        n,
        vec![
            binary("+", n, |a, b| (a + b) % n),
            unary("-", n, |a| (n - a) % n),
            constant("0", 0),
        ],
    )
    .expect("corpus algebra is valid")
}

/// Z2 x Z2 on bit vectors 0..4 with componentwise addition.
fn klein_group() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "z2z2",
        4,
        vec![
            binary("+", 4, |a, b| a ^ b),
            unary("-", 4, |a| a),
            constant("0", 0),
        ],
    )
    .expect("corpus algebra is valid")
}

/// Dihedral-style multiplication on `r^a` (indices `0..deg`) and `s r^a`
/// (indices `deg..2 deg`), using `r^a s = s r^{-a}`.
fn dihedral_mul(deg: usize, a: usize, b: usize) -> usize {
    let (flip_a, rot_a) = (a >= deg, a % deg);
    let (flip_b, rot_b) = (b >= deg, b % deg);
    let rot = if flip_b {
        (deg + rot_b - rot_a) % deg
    } else {
        (rot_a + rot_b) % deg
    };
    if flip_a ^ flip_b {
        deg + rot
    } else {
        rot
    }
}

fn dihedral_group(name: &'static str, deg: usize) -> FiniteAlgebra {
    let n = 2 * deg;
    FiniteAlgebra::new(
        name,
        n,
        vec![
            binary("*", n, |a, b| dihedral_mul(deg, a, b)),
            unary("inv", n, |a| {
                if a >= deg {
                    a // reflections are involutions
                } else {
                    (deg - a) % deg
                }
            }),
            constant("e", 0),
        ],
    )
    .expect("corpus algebra is valid")
}

fn z4_ring() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "z4ring",
        4,
        vec![
            binary("+", 4, |a, b| (a + b) % 4),
            unary("-", 4, |a| (4 - a) % 4),
            constant("0", 0),
            binary("*", 4, |a, b| (a * b) % 4),
        ],
    )
    .expect("corpus algebra is valid")
}

fn two_element_semilattice() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "semilattice2",
        2,
        vec![binary("meet", 2, |a, b| a.min(b))],
    )
    .expect("corpus algebra is valid")
}

fn one_element_control() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "trivial",
        1,
        vec![
            binary("+", 1, |_, _| 0),
            unary("-", 1, |_| 0),
            constant("0", 0),
        ],
    )
    .expect("corpus algebra is valid")
}

/// Outcome of sweeping one structural law over one algebra.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    /// Which law was swept, e.g. `symmetry` or `homomorphism-image`.
    pub theorem: String,
    pub algebra: String,
    /// False when the law's hypotheses (a chain of modularity witness terms)
    /// are not met, in which case nothing was checked.
    pub applicable: bool,
    /// Individual instances checked.
    pub instances: usize,
    pub failures: Vec<Failure>,
}

/// One failing instance of a swept law.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub instance: String,
    pub detail: String,
}

impl TheoremReport {
    fn new(theorem: &str, algebra: &str, applicable: bool) -> TheoremReport {
        TheoremReport {
            theorem: theorem.into(),
            algebra: algebra.into(),
            applicable,
            instances: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, instance: impl FnOnce() -> String, detail: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(Failure {
                instance: instance(),
                detail: detail(),
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Sweep driver for one algebra: holds its congruence lattice, a chain of
/// modularity witness terms when one exists, and caches keyed by tuples of
/// lattice indices.  Shared references can be used from several threads; the
/// caches are internally locked.
pub struct Harness {
    name: String,
    alg: FiniteAlgebra,
    lattice: CongruenceLattice,
    chain: Option<PreparedChain>,
    kmax: usize,
    matrices: Mutex<HashMap<Vec<usize>, Arc<MatrixAlgebra>>>,
    commutators: Mutex<HashMap<Vec<usize>, Partition>>,
    two_terms: Mutex<HashMap<Vec<usize>, Partition>>,
}

impl Harness {
    /// Builds the lattice and searches for a witness chain.  Sweeps go up to
    /// arity 3 on lattices of at most five congruences and stop at arity 2
    /// on larger ones to keep tuple spaces small.
    pub fn new(alg: &FiniteAlgebra) -> Result<Harness> {
        let search = find_day_chain(alg, DEFAULT_CHAIN_TABLES)?;
        Harness::with_chain(alg, search.chain.as_ref())
    }

    /// Like [`Harness::new`] but with a known chain (or known absence),
    /// skipping the search.  The chain is still verified against `alg`.
    pub fn with_chain(alg: &FiniteAlgebra, chain: Option<&DayChain>) -> Result<Harness> {
        let lattice = congruence_lattice(alg)?;
        let chain = chain.map(|c| c.prepare(alg)).transpose()?;
        let kmax = if lattice.len() <= 5 { 3 } else { 2 };
        Ok(Harness {
            name: alg.name.clone(),
            alg: alg.clone(),
            lattice,
            chain,
            kmax,
            matrices: Mutex::new(HashMap::new()),
            commutators: Mutex::new(HashMap::new()),
            two_terms: Mutex::new(HashMap::new()),
        })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.alg
    }

    pub fn lattice(&self) -> &CongruenceLattice {
        &self.lattice
    }

    pub fn chain(&self) -> Option<&PreparedChain> {
        self.chain.as_ref()
    }

    /// Largest commutator arity the sweeps cover.
    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Lowers the sweep arity bound (it never goes below 1 or above the
    /// default for this lattice).
    pub fn clamp_kmax(&mut self, k: usize) {
        self.kmax = self.kmax.min(k.max(1));
    }

    /// The cube algebra for a tuple of lattice indices, cached.
    pub fn matrix(&self, idx: &[usize]) -> Result<Arc<MatrixAlgebra>> {
        if let Some(hit) = self.matrices.lock().unwrap().get(idx) {
            return Ok(Arc::clone(hit));
        }
        let congs: Vec<Partition> = idx.iter().map(|&i| self.lattice.get(i).clone()).collect();
        let m = Arc::new(generate_matrix_algebra(&self.alg, &congs, DEFAULT_CAP_BITS)?);
        let mut cache = self.matrices.lock().unwrap();
        Ok(Arc::clone(cache.entry(idx.to_vec()).or_insert(m)))
    }

    /// The commutator of a tuple of lattice indices, cached.
    pub fn commutator(&self, idx: &[usize]) -> Result<Partition> {
        if let Some(hit) = self.commutators.lock().unwrap().get(idx) {
            return Ok(hit.clone());
        }
        let m = self.matrix(idx)?;
        let result = higher_commutator_with(&self.alg, &m, idx.len() - 1)?;
        self.commutators
            .lock()
            .unwrap()
            .insert(idx.to_vec(), result.clone());
        Ok(result)
    }

    /// The two-term commutator of a tuple of lattice indices, cached.
    pub fn two_term(&self, idx: &[usize]) -> Result<Partition> {
        if let Some(hit) = self.two_terms.lock().unwrap().get(idx) {
            return Ok(hit.clone());
        }
        let m = self.matrix(idx)?;
        let result = two_term_commutator_with(&self.alg, &m)?;
        self.two_terms
            .lock()
            .unwrap()
            .insert(idx.to_vec(), result.clone());
        Ok(result)
    }

    /// All arity-`k` tuples of lattice indices.
    fn tuples(&self, k: usize) -> Vec<Vec<usize>> {
        (0..k)
            .map(|_| 0..self.lattice.len())
            .multi_cartesian_product()
            .collect()
    }

    fn tuple_name(&self, idx: &[usize]) -> String {
        format!(
            "({})",
            idx.iter().map(|&i| self.lattice.get(i).to_string()).join(", ")
        )
    }

    /// Order laws that hold for every algebra: the commutator lies below the
    /// meet of its arguments, is monotone in them, and lies below the
    /// commutator of any tail of the tuple.
    pub fn check_basic_bounds(&self) -> Result<TheoremReport> {
        let mut report = TheoremReport::new("basic-bounds", &self.name, true);
        for k in 1..=self.kmax {
            let tuples = self.tuples(k);
            for t in &tuples {
                let c = self.commutator(t)?;
                let meet_idx = t.iter().skip(1).fold(t[0], |acc, &i| self.lattice.meet_of(acc, i));
                let meet = self.lattice.get(meet_idx);
                report.record(
                    c.leq(meet),
                    || format!("k={} T={}", k, self.tuple_name(t)),
                    || format!("commutator {} is not below the meet {}", c, meet),
                );
                if k >= 2 {
                    let tail = self.commutator(&t[1..])?;
                    report.record(
                        c.leq(&tail),
                        || format!("k={} T={}", k, self.tuple_name(t)),
                        || {
                            format!(
                                "commutator {} is not below the tail commutator {}",
                                c, tail
                            )
                        },
                    );
                }
            }
            for (a, b) in tuples.iter().tuple_combinations() {
                let (lo, hi) = if a.iter().zip(b).all(|(&x, &y)| self.lattice.leq_idx(x, y)) {
                    (a, b)
                } else if b.iter().zip(a).all(|(&x, &y)| self.lattice.leq_idx(x, y)) {
                    (b, a)
                } else {
                    continue;
                };
                report.record(
                    self.commutator(lo)?.leq(&self.commutator(hi)?),
                    || format!("k={} {} <= {}", k, self.tuple_name(lo), self.tuple_name(hi)),
                    || "commutator is not monotone between these tuples".into(),
                );
            }
        }
        Ok(report)
    }

    /// Invariance under permutations of the congruence tuple; needs
    /// modularity, so it is gated on the witness chain.
    pub fn check_symmetry(&self) -> Result<TheoremReport> {
        let mut report = TheoremReport::new("symmetry", &self.name, self.chain.is_some());
        if !report.applicable {
            return Ok(report);
        }
        for k in 2..=self.kmax {
            for multiset in (0..self.lattice.len()).combinations_with_replacement(k) {
                let base = self.commutator(&multiset)?;
                let mut ok = true;
                let mut culprit = None;
                for perm in multiset
                    .iter()
                    .copied()
                    .permutations(k)
                    .unique()
                {
                    let c = self.commutator(&perm)?;
                    if c != base {
                        ok = false;
                        culprit = Some((perm, c));
                        break;
                    }
                }
                report.record(
                    ok,
                    || format!("k={} T={}", k, self.tuple_name(&multiset)),
                    || {
                        let (perm, c) = culprit.as_ref().expect("failure has a witness");
                        format!(
                            "permutation {} gives {} instead of {}",
                            self.tuple_name(perm),
                            c,
                            base
                        )
                    },
                );
            }
        }
        Ok(report)
    }

    /// Distributivity over joins in the first slot (the other slots follow
    /// from symmetry); needs modularity.
    pub fn check_additivity(&self) -> Result<TheoremReport> {
        let mut report = TheoremReport::new("additivity", &self.name, self.chain.is_some());
        if !report.applicable {
            return Ok(report);
        }
        for k in 2..=self.kmax {
            for rest in self.tuples(k - 1) {
                for a in 0..self.lattice.len() {
                    for b in a + 1..self.lattice.len() {
                        let joined = self.lattice.join_of(a, b);
                        let mut t = vec![joined];
                        t.extend_from_slice(&rest);
                        let lhs = self.commutator(&t)?;
                        t[0] = a;
                        let left = self.commutator(&t)?;
                        t[0] = b;
                        let right = self.commutator(&t)?;
                        let rhs = left.join(&right);
                        report.record(
                            lhs == rhs,
                            || {
                                format!(
                                    "k={} [{} v {}, {}]",
                                    k,
                                    self.lattice.get(a),
                                    self.lattice.get(b),
                                    self.tuple_name(&rest)
                                )
                            },
                            || format!("join of parts {} differs from {}", rhs, lhs),
                        );
                    }
                }
            }
        }
        Ok(report)
    }

    /// Compatibility with quotient maps `A -> A/pi` for congruences `pi`
    /// below every argument, in the image direction: pushing `[T] v pi`
    /// through the map gives the commutator of the pushed tuple.
    pub fn check_homomorphism_image(&self) -> Result<TheoremReport> {
        self.check_homomorphism(true)
    }

    /// The same compatibility read backwards: pulling the quotient
    /// commutator back along the map gives `[T] v pi`.
    pub fn check_homomorphism_pullback(&self) -> Result<TheoremReport> {
        self.check_homomorphism(false)
    }

    fn check_homomorphism(&self, image: bool) -> Result<TheoremReport> {
        let theorem = if image {
            "homomorphism-image"
        } else {
            "homomorphism-pullback"
        };
        let mut report = TheoremReport::new(theorem, &self.name, self.chain.is_some());
        if !report.applicable {
            return Ok(report);
        }
        // pi = identity is the trivial relabeling; start above it.
        for pi_idx in 1..self.lattice.len() {
            let pi = self.lattice.get(pi_idx).clone();
            let (quot, map) = self.alg.quotient(&pi)?;
            let above: Vec<usize> = (0..self.lattice.len())
                .filter(|&i| self.lattice.leq_idx(pi_idx, i))
                .collect();
            for k in 2..=self.kmax {
                for t in (0..k).map(|_| above.iter().copied()).multi_cartesian_product() {
                    let joined = self.commutator(&t)?.join(&pi);
                    let pushed: Vec<Partition> = t
                        .iter()
                        .map(|&i| self.lattice.get(i).push_forward(&map, quot.size))
                        .collect::<Result<_>>()?;
                    let qcom = higher_commutator(&quot, &pushed)?;
                    let (ok, lhs, rhs) = if image {
                        let im = joined.push_forward(&map, quot.size)?;
                        (im == qcom, im, qcom)
                    } else {
                        let back = qcom.pull_back(&map)?;
                        (back == joined, back, joined)
                    };
                    report.record(
                        ok,
                        || format!("pi={} k={} T={}", pi, k, self.tuple_name(&t)),
                        || format!("{} differs from {}", lhs, rhs),
                    );
                }
            }
        }
        Ok(report)
    }

    /// Agreement between the line-based commutator and the two-term variant
    /// on every tuple.  Checked unconditionally: the corpus algebras satisfy
    /// it even off the modular case.
    pub fn check_two_term_agreement(&self) -> Result<TheoremReport> {
        let mut report = TheoremReport::new("two-term-agreement", &self.name, true);
        for k in 1..=self.kmax {
            for t in self.tuples(k) {
                let line = self.commutator(&t)?;
                let two = self.two_term(&t)?;
                report.record(
                    line == two,
                    || format!("k={} T={}", k, self.tuple_name(&t)),
                    || format!("line-based {} vs two-term {}", line, two),
                );
            }
        }
        Ok(report)
    }

    /// Runs every sweep, basic bounds first so later checks hit warm caches.
    pub fn run_all(&self) -> Result<Vec<TheoremReport>> {
        Ok(vec![
            self.check_basic_bounds()?,
            self.check_two_term_agreement()?,
            self.check_symmetry()?,
            self.check_additivity()?,
            self.check_homomorphism_image()?,
            self.check_homomorphism_pullback()?,
        ])
    }
}

fn build_corpus() -> Corpus {
    let abelian = GroupSpec {
        mul: "+",
        inv: "-",
        identity: 0,
    };
    let nonabelian = GroupSpec {
        mul: "*",
        inv: "inv",
        identity: 0,
    };
    let entries = vec![
        CorpusEntry {
            name: "trivial",
            algebra: one_element_control(),
            modular: true,
            group: Some(abelian),
        },
        CorpusEntry {
            name: "z2",
            algebra: cyclic_group("z2", 2),
            modular: true,
            group: Some(abelian),
        },
        CorpusEntry {
            name: "z3",
            algebra: cyclic_group("z3", 3),
            modular: true,
            group: Some(abelian),
        },
        CorpusEntry {
            name: "z4",
            algebra: cyclic_group("z4", 4),
            modular: true,
            group: Some(abelian),
        },
        CorpusEntry {
            name: "z2z2",
            algebra: klein_group(),
            modular: true,
            group: Some(abelian),
        },
        CorpusEntry {
            name: "s3",
            algebra: dihedral_group("s3", 3),
            modular: true,
            group: Some(nonabelian),
        },
        CorpusEntry {
            name: "d4",
            algebra: dihedral_group("d4", 4),
            modular: true,
            group: Some(nonabelian),
        },
        CorpusEntry {
            name: "z4ring",
            algebra: z4_ring(),
            modular: true,
            group: None,
        },
        CorpusEntry {
            name: "semilattice2",
            algebra: two_element_semilattice(),
            modular: false,
            group: None,
        },
    ];
    Corpus { entries }
}
