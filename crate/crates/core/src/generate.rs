//! Seeded random structures for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitset::BitSet;
use crate::caps::Caps;
use crate::constructions::restrict_to_ax;
use crate::error::Result;
use crate::realisations::{is_realisation, Realisation};
use crate::structures::{
    fam, Consistency, Enabling, EquivFamily, Equivalence, Ese, GeneralES, PrimeES,
};
use crate::unfolding::{check_structural_axioms, er};

fn names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect()
}

fn random_subset(rng: &mut impl Rng, from: BitSet, p: f64) -> BitSet {
    from.iter().filter(|_| rng.gen_bool(p)).collect()
}

/// A random partition; each event joins an earlier class with probability `p`.
pub fn random_equivalence(rng: &mut impl Rng, n: usize, p: f64) -> Equivalence {
    let mut keys: Vec<usize> = (0..n).collect();
    for e in 1..n {
        if rng.gen_bool(p) {
            keys[e] = keys[rng.gen_range(0..e)];
        }
    }
    Equivalence::from_keys(&keys)
}

/// Maximal sets free of the given symmetric conflicts.
fn conflict_free_generators(n: usize, conflicts: &[BitSet]) -> Vec<BitSet> {
    let free: Vec<BitSet> = (0..1u128 << n)
        .map(BitSet::from_bits)
        .filter(|x| !conflicts.iter().any(|c| c.is_subset(*x)))
        .collect();
    free.iter()
        .copied()
        .filter(|x| !free.iter().any(|y| y != x && x.is_subset(*y)))
        .collect()
}

/// A random general event structure on `n` events with one or two minimal
/// enablings per event and occasional binary conflict.
pub fn random_ges(rng: &mut impl Rng, n: usize) -> GeneralES {
    let all = BitSet::full(n);
    let mut conflicts = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.15) {
                conflicts.push(BitSet::from_iter([a, b]));
            }
        }
    }
    let con = Consistency::from_generators(conflict_free_generators(n, &conflicts));
    let mut enabling = Vec::new();
    for e in 0..n {
        let count = rng.gen_range(1..=3);
        for k in 0..count {
            // earlier events only, bar the occasional later premise, so most events occur
            let pool = if k == 0 || rng.gen_bool(0.7) {
                BitSet::full(e)
            } else {
                all.without(e)
            };
            let set = random_subset(rng, pool, 0.4);
            let set = if con.contains(set) {
                set
            } else {
                BitSet::EMPTY
            };
            enabling.push(Enabling { set, event: e });
        }
    }
    let generators = if conflicts.is_empty() {
        None
    } else {
        Some(con.generators().to_vec())
    };
    GeneralES::new(names(n), generators, enabling).expect("generated names are distinct")
}

/// A random family of configurations on at most `max_events` events: the
/// family of a random general event structure, trimmed to its support, with
/// the identity equivalence.
pub fn random_family(rng: &mut impl Rng, max_events: usize, caps: &Caps) -> Result<EquivFamily> {
    let n = rng.gen_range(max_events.min(2)..=max_events);
    Ok(fam(&random_ges(rng, n), caps)?.restrict_to_support())
}

/// As [`random_family`], with each event joining an earlier class with probability `p`.
pub fn random_equiv_family(
    rng: &mut impl Rng,
    max_events: usize,
    p: f64,
    caps: &Caps,
) -> Result<EquivFamily> {
    let f = random_family(rng, max_events, caps)?;
    let equiv = random_equivalence(rng, f.len(), p);
    Ok(f.with_equiv(equiv))
}

/// A random prime event structure with inherited binary conflict between
/// events without a common successor.
pub fn random_prime(rng: &mut impl Rng, n: usize) -> PrimeES {
    let mut lt = Vec::new();
    for b in 0..n {
        for a in 0..b {
            if rng.gen_bool(0.3) {
                lt.push((a, b));
            }
        }
    }
    let p = PrimeES::new(names(n), &lt, None).expect("edges follow index order");
    let mut conflicts = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let joint = (0..n).any(|x| p.le(a, x) && p.le(b, x));
            if !joint && rng.gen_bool(0.15) {
                conflicts.push((a, b));
            }
        }
    }
    if conflicts.is_empty() {
        return p;
    }
    let inherited: Vec<BitSet> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .filter(|&(x, y)| {
            conflicts
                .iter()
                .any(|&(a, b)| (p.le(a, x) && p.le(b, y)) || (p.le(b, x) && p.le(a, y)))
        })
        .map(|(x, y)| BitSet::from_iter([x, y]))
        .collect();
    PrimeES::new(names(n), &lt, Some(conflict_free_generators(n, &inherited)))
        .expect("edges follow index order")
}

/// Every ese on at most `max_events` events, one per isomorphism class,
/// with events named `a`, `b`, ... in a canonical order.
pub fn all_eses(max_events: usize) -> Vec<Ese> {
    let mut seen: std::collections::BTreeMap<EseKey, Ese> = std::collections::BTreeMap::new();
    for n in 0..=max_events {
        let perms = permutations(n);
        let partitions = set_partitions(n);
        for down in strict_orders(n) {
            let downsets: Vec<BitSet> = (0..1u128 << n)
                .map(BitSet::from_bits)
                .filter(|x| !x.is_empty() && x.iter().all(|e| down[e].is_subset(*x)))
                .collect();
            for gens in covering_antichains(n, &downsets) {
                for keys in &partitions {
                    let key = perms
                        .iter()
                        .map(|perm| ese_key(perm, &down, &gens, keys))
                        .min()
                        .expect("at least one permutation");
                    seen.entry(key).or_insert_with_key(|k| ese_from_key(n, k));
                }
            }
        }
    }
    seen.into_values().collect()
}

type EseKey = (usize, Vec<u128>, Vec<u128>, Vec<usize>);

fn ese_key(perm: &[usize], down: &[BitSet], gens: &[BitSet], keys: &[usize]) -> EseKey {
    let n = perm.len();
    let map = |x: BitSet| x.map(|i| Some(perm[i])).bits();
    let mut new_down = vec![0; n];
    let mut new_keys = vec![0; n];
    for old in 0..n {
        new_down[perm[old]] = map(down[old]);
        new_keys[perm[old]] = keys[old];
    }
    let mut new_gens: Vec<u128> = gens.iter().map(|&g| map(g)).collect();
    new_gens.sort_unstable();
    // relabel classes by first occurrence
    let mut first: Vec<usize> = Vec::new();
    let classes = new_keys
        .iter()
        .map(|k| match first.iter().position(|f| f == k) {
            Some(i) => i,
            None => {
                first.push(*k);
                first.len() - 1
            }
        })
        .collect();
    (n, new_down, new_gens, classes)
}

fn ese_from_key(n: usize, (_, down, gens, classes): &EseKey) -> Ese {
    let lt: Vec<(usize, usize)> = (0..n)
        .flat_map(|b| {
            BitSet::from_bits(down[b])
                .without(b)
                .iter()
                .map(move |a| (a, b))
                .collect::<Vec<_>>()
        })
        .collect();
    let con = gens.iter().map(|&g| BitSet::from_bits(g)).collect();
    let prime = PrimeES::new(names(n), &lt, Some(con)).expect("generated names are distinct");
    Ese::new(prime, Equivalence::from_keys(classes))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Restricted growth strings: class of each element, classes opened in order.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let open = p.iter().max().map_or(0, |m| m + 1);
                (0..=open).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// Reflexive down-sets of every strict partial order on `n` events.
fn strict_orders(n: usize) -> Vec<Vec<BitSet>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    for mask in 0..1u64 << pairs.len() {
        let lt = |a: usize, b: usize| {
            pairs
                .iter()
                .position(|&p| p == (a, b))
                .is_some_and(|i| mask >> i & 1 == 1)
        };
        let antisymmetric = pairs.iter().all(|&(a, b)| !(lt(a, b) && lt(b, a)));
        let transitive = pairs
            .iter()
            .all(|&(a, b)| !lt(a, b) || (0..n).all(|c| c == b || c == a || !lt(b, c) || lt(a, c)));
        if antisymmetric && transitive {
            out.push(
                (0..n)
                    .map(|b| (0..n).filter(|&a| a == b || lt(a, b)).collect())
                    .collect(),
            );
        }
    }
    out
}

/// Antichains of the given nonempty sets whose union is every event.
fn covering_antichains(n: usize, sets: &[BitSet]) -> Vec<Vec<BitSet>> {
    fn go(
        i: usize,
        sets: &[BitSet],
        chosen: &mut Vec<BitSet>,
        all: BitSet,
        out: &mut Vec<Vec<BitSet>>,
    ) {
        if i == sets.len() {
            let union = chosen.iter().fold(BitSet::EMPTY, |acc, x| acc.union(*x));
            if union == all {
                out.push(chosen.clone());
            }
            return;
        }
        go(i + 1, sets, chosen, all, out);
        let x = sets[i];
        if chosen.iter().all(|y| !x.is_subset(*y) && !y.is_subset(x)) {
            chosen.push(x);
            go(i + 1, sets, chosen, all, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    go(0, sets, &mut Vec::new(), BitSet::full(n), &mut out);
    if n == 0 {
        out = vec![Vec::new()];
    }
    out
}

/// A random ese on `n` events.
pub fn random_ese(rng: &mut impl Rng, n: usize) -> Ese {
    let p = random_prime(rng, n);
    let equiv = random_equivalence(rng, n, 0.3);
    Ese::new(p, equiv)
}

/// A random edc: the Ax1 part of a random ese, retried until nonempty.
pub fn random_edc(rng: &mut impl Rng, n: usize, caps: &Caps) -> Result<Ese> {
    loop {
        let p = restrict_to_ax(&random_ese(rng, n), 1, caps)?;
        if !p.is_empty() {
            return Ok(p);
        }
    }
}

/// A random ese satisfying (A)–(D): an unfolding of a random family, perturbed
/// by restriction to a down-closed ≡-closed part or by splitting a class,
/// kept only when the axioms still hold.
pub fn random_abcd_ese(rng: &mut impl Rng, max_events: usize, caps: &Caps) -> Result<Ese> {
    loop {
        let u = er(&random_family(rng, max_events, caps)?, caps)?.ese;
        let candidate = match rng.gen_range(0..3) {
            0 => u,
            1 => {
                let seed = random_subset(rng, BitSet::full(u.len()), 0.5);
                let mut keep = u.equiv().class_set(u.prime().down_closure(seed));
                while !u.prime().is_down_closed(keep) {
                    keep = u.equiv().class_set(u.prime().down_closure(keep));
                }
                u.restrict(keep)
            }
            _ => match u.equiv().nontrivial_classes().choose(rng) {
                Some(&class) => {
                    let moved = class.iter().next().expect("nontrivial");
                    let keys: Vec<usize> = (0..u.len())
                        .map(|e| {
                            if e == moved {
                                u.len()
                            } else {
                                u.equiv().rep(e)
                            }
                        })
                        .collect();
                    Ese::new(u.prime().clone(), Equivalence::from_keys(&keys))
                }
                None => u,
            },
        };
        if check_structural_axioms(&candidate, caps)?.all_abcd() {
            return Ok(candidate);
        }
    }
}

/// A random realisation over `f`: a securing chain of a random configuration,
/// with covering pairs dropped at random while it stays a realisation.
pub fn random_realisation(rng: &mut impl Rng, f: &EquivFamily, max_nodes: usize) -> Realisation {
    let mut chain: Vec<usize> = Vec::new();
    let mut x = BitSet::EMPTY;
    while chain.len() < max_nodes {
        let next: Vec<usize> = (0..f.len())
            .filter(|&e| {
                let y = x.with(e);
                f.contains(y) && (y != x || rng.gen_bool(0.2))
            })
            .collect();
        match next.choose(rng) {
            Some(&e) if chain.is_empty() || rng.gen_bool(0.85) => {
                chain.push(e);
                x.insert(e);
            }
            _ => break,
        }
    }
    let mut r = Realisation::chain(&chain);
    for _ in 0..chain.len() * 2 {
        let n = rng.gen_range(0..r.len().max(1));
        if r.is_empty() {
            break;
        }
        let covers: Vec<usize> = r.covers(n).iter().collect();
        if let Some(&a) = covers.choose(rng) {
            let weaker = r.without_cover(a, n);
            if is_realisation(&weaker, f) {
                r = weaker;
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::validate_structure;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_structures_are_valid() {
        let caps = Caps::default();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(0..=6);
            assert!(validate_structure(&random_ges(&mut rng, n)).is_empty());
            assert!(validate_structure(&random_ese(&mut rng, n)).is_empty());
            let f = random_equiv_family(&mut rng, 6, 0.3, &caps).unwrap();
            assert!(validate_structure(&f).is_empty());
            let r = random_realisation(&mut rng, &f, 7);
            assert!(is_realisation(&r, &f));
            let edc = random_edc(&mut rng, 5, &caps).unwrap();
            assert!(crate::constructions::check_ax(&edc).ax1);
        }
    }

    #[test]
    fn abcd_generator_terminates() {
        let caps = Caps::default();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let p = random_abcd_ese(&mut rng, 5, &caps).unwrap();
            assert!(check_structural_axioms(&p, &caps).unwrap().all_abcd());
        }
    }

    #[test]
    fn small_eses_up_to_iso() {
        let counts: Vec<usize> = (0..=2).map(|n| all_eses(n).len()).collect();
        // n = 1: one; n = 2: order or not, consistent or not, equivalent or not, minus a < b in conflict
        assert_eq!(counts, vec![1, 2, 2 + 6]);
        for p in all_eses(3) {
            assert!(crate::structures::validate_structure(&p).is_empty());
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = random_ese(&mut StdRng::seed_from_u64(3), 5);
        let b = random_ese(&mut StdRng::seed_from_u64(3), 5);
        assert_eq!(a, b);
    }
}
