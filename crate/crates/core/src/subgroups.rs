//! Two-generated subgroup enumeration, maximal subgroup identification and
//! the "solutions trapped in a maximal subgroup" bound.
//!
//! Every subgroup of `PSL(2,p)` is two-generated, so pair closures exhaust
//! the proper subgroups of the target groups. For other inputs the
//! enumeration honestly returns only the two-generated subgroups. The
//! fingerprints group copies by their element-order census; they are never
//! used to claim an isomorphism type.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::classes::ConjugacyClassTable;
use crate::group::FiniteGroup;
use crate::Count;

/// Guard for the pair-closure enumeration.
pub const MAX_LATTICE_ORDER: usize = 1000;

#[derive(Debug, Error)]
pub enum SubgroupError {
    #[error("subgroup enumeration is limited to groups of order <= {limit}, got {order}")]
    GroupTooLarge { order: usize, limit: usize },
}

/// A proper subgroup found by pair closure: sorted member indices, order,
/// element-order fingerprint, and whether it is maximal among the proper
/// subgroups found.
#[derive(Clone, Debug)]
pub struct SubgroupRecord {
    pub members: Vec<usize>,
    pub order: usize,
    pub fingerprint: Vec<(u32, usize)>,
    pub is_maximal: bool,
}

/// Maximal subgroups grouped by (order, fingerprint) with copy counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalFamily {
    pub order: usize,
    pub copies: usize,
    pub fingerprint: Vec<(u32, usize)>,
}

/// The deduplicated set of two-generated proper subgroups.
#[derive(Debug)]
pub struct SubgroupLattice {
    records: Vec<SubgroupRecord>,
}

impl SubgroupLattice {
    /// Enumerate closures of all pairs `<x, y>`, excluding the full group.
    /// Pairs with `y = identity` contribute the cyclic subgroups. The trivial
    /// subgroup is included (as `<e, e>`), the full group never is.
    pub fn enumerate(g: &FiniteGroup) -> Result<SubgroupLattice, SubgroupError> {
        let n = g.order();
        if n > MAX_LATTICE_ORDER {
            return Err(SubgroupError::GroupTooLarge {
                order: n,
                limit: MAX_LATTICE_ORDER,
            });
        }
        // unordered pairs suffice: <x,y> = <y,x>
        let sets: BTreeSet<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut local: BTreeSet<Vec<u32>> = BTreeSet::new();
                let mut scratch = ClosureScratch::new(n);
                for y in x..n {
                    let members = scratch.closure(g, x, y);
                    if members.len() < n {
                        local.insert(members);
                    }
                }
                local
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            });

        let mut records: Vec<SubgroupRecord> = sets
            .into_iter()
            .map(|members| {
                let mut census: BTreeMap<u32, usize> = BTreeMap::new();
                for &m in &members {
                    *census.entry(g.element_order(m as usize)).or_insert(0) += 1;
                }
                SubgroupRecord {
                    order: members.len(),
                    members: members.into_iter().map(|m| m as usize).collect(),
                    fingerprint: census.into_iter().collect(),
                    is_maximal: false,
                }
            })
            .collect();

        // maximal = not strictly contained in another proper subgroup
        records.sort_by_key(|r| (r.order, r.members.clone()));
        let flags: Vec<bool> = records
            .iter()
            .map(|r| {
                !records.iter().any(|s| {
                    s.order > r.order && s.order % r.order == 0 && is_subset(&r.members, &s.members)
                })
            })
            .collect();
        for (r, f) in records.iter_mut().zip(flags) {
            r.is_maximal = f;
        }
        Ok(SubgroupLattice { records })
    }

    pub fn records(&self) -> &[SubgroupRecord] {
        &self.records
    }

    pub fn maximal_records(&self) -> impl Iterator<Item = &SubgroupRecord> {
        self.records.iter().filter(|r| r.is_maximal)
    }

    /// Copy counts of the maximal subgroups, grouped by (order, fingerprint),
    /// largest order first.
    pub fn maximal_families(&self) -> Vec<MaximalFamily> {
        let mut fams: BTreeMap<(usize, Vec<(u32, usize)>), usize> = BTreeMap::new();
        for r in self.maximal_records() {
            *fams.entry((r.order, r.fingerprint.clone())).or_insert(0) += 1;
        }
        let mut out: Vec<MaximalFamily> = fams
            .into_iter()
            .map(|((order, fingerprint), copies)| MaximalFamily {
                order,
                copies,
                fingerprint,
            })
            .collect();
        out.sort_by(|a, b| {
            b.order
                .cmp(&a.order)
                .then_with(|| a.fingerprint.cmp(&b.fingerprint))
        });
        out
    }

    /// Sum over all maximal subgroup copies `H` of the number of tuples
    /// `(x_1,...,x_r)` with `x_t` in `K_{cs[t]} ∩ H` and product identity.
    ///
    /// Solutions lying in several copies are counted once per copy, so this
    /// is an upper bound on the non-generating solutions that lie inside a
    /// single maximal subgroup, which is all the comparison argument needs.
    pub fn solution_bound(&self, g: &FiniteGroup, t: &ConjugacyClassTable, cs: &[usize]) -> Count {
        let mut total = Count::zero();
        for r in self.maximal_records() {
            total += solutions_in_subgroup(g, t, &r.members, cs);
        }
        total
    }
}

/// Number of tuples with prescribed classes and product identity inside one
/// subgroup, by dynamic programming over the subgroup's elements.
pub fn solutions_in_subgroup(
    g: &FiniteGroup,
    t: &ConjugacyClassTable,
    members: &[usize],
    cs: &[usize],
) -> Count {
    let pos: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut counts = vec![Count::zero(); members.len()];
    counts[pos[&g.identity()]] = Count::one();
    for &class in cs {
        let in_class: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&m| t.class_of(m) == class)
            .collect();
        let mut next = vec![Count::zero(); members.len()];
        for (i, cnt) in counts.iter().enumerate() {
            if cnt.is_zero() {
                continue;
            }
            for &x in &in_class {
                let w = g.mul(members[i], x);
                next[pos[&w]] += cnt;
            }
        }
        counts = next;
    }
    counts[pos[&g.identity()]].clone()
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    // both sorted
    let mut it = big.iter();
    'outer: for &x in small {
        for &y in it.by_ref() {
            match y.cmp(&x) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

struct ClosureScratch {
    seen: Vec<u32>,
    epoch: u32,
    queue: Vec<usize>,
}

impl ClosureScratch {
    fn new(n: usize) -> ClosureScratch {
        ClosureScratch {
            seen: vec![0; n],
            epoch: 0,
            queue: Vec::with_capacity(n),
        }
    }

    /// Sorted members of `<x, y>`.
    fn closure(&mut self, g: &FiniteGroup, x: usize, y: usize) -> Vec<u32> {
        self.epoch += 1;
        let e = self.epoch;
        self.queue.clear();
        let mut members = Vec::new();
        let id = g.identity();
        self.seen[id] = e;
        members.push(id as u32);
        self.queue.push(id);
        let mut head = 0;
        while head < self.queue.len() {
            let w = self.queue[head];
            head += 1;
            for &gen in &[x, y] {
                let z = g.mul(w, gen);
                if self.seen[z] != e {
                    self.seen[z] = e;
                    members.push(z as u32);
                    self.queue.push(z);
                }
            }
        }
        members.sort_unstable();
        members
    }
}
