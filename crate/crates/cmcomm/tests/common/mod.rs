//! Helpers shared by the integration suites: a brute-force partition
//! enumerator, the classical group-commutator oracle, and a process-wide
//! harness registry so the suites reuse cube algebras and commutator caches.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use cmcomm::theorems::{corpus, GroupSpec, Harness};
use cmcomm::{FiniteAlgebra, Partition};

/// All partitions of `0..n`, one per restricted growth string.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn descend(labels: &mut [usize], i: usize, next: usize, out: &mut Vec<Partition>) {
        if i == labels.len() {
            let pairs: Vec<(usize, usize)> = labels
                .iter()
                .enumerate()
                .map(|(a, &label)| (labels.iter().position(|&l| l == label).unwrap(), a))
                .collect();
            out.push(Partition::from_pairs(labels.len(), &pairs).unwrap());
            return;
        }
        for value in 0..=next {
            labels[i] = value;
            let widened = if value == next { next + 1 } else { next };
            descend(labels, i + 1, widened, out);
        }
    }
    let mut out = Vec::new();
    descend(&mut vec![0; n], 0, 0, &mut out);
    out
}

/// All `k`-tuples over `0..len`, in odometer order.
pub fn index_tuples(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..len).map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    out
}

/// The classical commutator of the normal subgroups behind two congruences:
/// the coset congruence of the subgroup generated by all
/// `[m, n] = m^-1 n^-1 m n` with `m`, `n` drawn from the identity blocks.
pub fn group_commutator_oracle(
    alg: &FiniteAlgebra,
    spec: &GroupSpec,
    theta_m: &Partition,
    theta_n: &Partition,
) -> Partition {
    let mul = alg.op_index(spec.mul).unwrap();
    let inv = alg.op_index(spec.inv).unwrap();
    let e = spec.identity as usize;
    let block = |theta: &Partition| -> Vec<u8> {
        (0..alg.size as u8)
            .filter(|&a| theta.related(a as usize, e))
            .collect()
    };
    let mut commutators = Vec::new();
    for &m in &block(theta_m) {
        for &n in &block(theta_n) {
            let mi = alg.apply(inv, &[m]);
            let ni = alg.apply(inv, &[n]);
            let left = alg.apply(mul, &[mi, ni]);
            let right = alg.apply(mul, &[m, n]);
            commutators.push(alg.apply(mul, &[left, right]));
        }
    }
    let subgroup = alg.subuniverse_closure(&commutators).unwrap();
    let mut pairs = Vec::new();
    for &s in &subgroup {
        for a in 0..alg.size as u8 {
            pairs.push((a as usize, alg.apply(mul, &[s, a]) as usize));
        }
    }
    Partition::from_pairs(alg.size, &pairs).unwrap()
}

/// One harness per corpus algebra for the whole test process, so every suite
/// shares the same cube-algebra and commutator caches.
pub fn harness(name: &str) -> Arc<Harness> {
    static REGISTRY: OnceLock<Mutex<HashMap<&'static str, Arc<Harness>>>> = OnceLock::new();
    let registry = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = registry.lock().unwrap();
    if let Some(found) = map.get(name) {
        return Arc::clone(found);
    }
    let entry = corpus().entry(name);
    let built = Arc::new(Harness::new(&entry.algebra).unwrap());
    map.insert(entry.name, Arc::clone(&built));
    built
}
