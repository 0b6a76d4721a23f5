//! Conjugacy classes and exact product-solution counting.
//!
//! `lambda_coefficient` is the class multiplication coefficient: the number
//! of ways a fixed element of a target class factors as an ordered product
//! over two prescribed classes. Everything here is computed by direct
//! enumeration over group elements; no character sums are evaluated, so all
//! values are exact nonnegative integers by construction.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::group::FiniteGroup;
use crate::Count;

/// One conjugacy class: ATLAS-style label, representative (least member
/// index), sorted member list, size and centralizer order.
#[derive(Clone, Debug)]
pub struct ClassInfo {
    pub label: String,
    pub rep: usize,
    pub members: Vec<usize>,
    pub size: usize,
    pub centralizer_order: usize,
}

/// The complete class table of a materialized group.
///
/// Classes are sorted by (element order, representative index) and labeled
/// `<order><letter>` with letters assigned by ascending representative
/// index within each order. Read-only after construction; the lambda memo
/// uses idempotent writes and is safe under concurrent queries.
pub struct ConjugacyClassTable {
    classes: Vec<ClassInfo>,
    class_of: Vec<u32>,
    inverse_class: Vec<u32>,
    rep_order: Vec<u32>,
    lambda_memo: Mutex<HashMap<(u32, u32, u32), u64>>,
}

impl std::fmt::Debug for ConjugacyClassTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConjugacyClassTable")
            .field("classes", &self.classes.len())
            .finish()
    }
}

fn letter(i: usize) -> String {
    // A, B, ..., Z, AA, AB, ... (spreadsheet-style)
    let mut i = i;
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

/// Compute the conjugacy classes of `g`.
pub fn conjugacy_classes(g: &FiniteGroup) -> ConjugacyClassTable {
    let n = g.order();
    let mut class_of = vec![u32::MAX; n];
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        if class_of[x] != u32::MAX {
            continue;
        }
        let cid = raw.len() as u32;
        let mut members = Vec::new();
        for c in 0..n {
            let y = g.conjugate(c, x);
            if class_of[y] != cid {
                class_of[y] = cid;
                members.push(y);
            }
        }
        members.sort_unstable();
        raw.push(members);
    }
    // order classes by (element order, least member), then label
    let mut perm: Vec<usize> = (0..raw.len()).collect();
    perm.sort_by_key(|&c| (g.element_order(raw[c][0]), raw[c][0]));
    let mut relabel = vec![0u32; raw.len()];
    for (new, &old) in perm.iter().enumerate() {
        relabel[old] = new as u32;
    }
    for c in class_of.iter_mut() {
        *c = relabel[*c as usize];
    }
    let mut per_order: BTreeMap<u32, usize> = BTreeMap::new();
    let classes: Vec<ClassInfo> = perm
        .iter()
        .map(|&old| {
            let members = std::mem::take(&mut raw[old]);
            let rep = members[0];
            let o = g.element_order(rep);
            let slot = per_order.entry(o).or_insert(0);
            let label = format!("{}{}", o, letter(*slot));
            *slot += 1;
            let size = members.len();
            ClassInfo {
                label,
                rep,
                members,
                size,
                centralizer_order: g.order() / size,
            }
        })
        .collect();
    let inverse_class = classes.iter().map(|ci| class_of[g.inv(ci.rep)]).collect();
    let rep_order = classes.iter().map(|ci| g.element_order(ci.rep)).collect();
    ConjugacyClassTable {
        classes,
        class_of,
        inverse_class,
        rep_order,
        lambda_memo: Mutex::new(HashMap::new()),
    }
}

impl ConjugacyClassTable {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, c: usize) -> &ClassInfo {
        &self.classes[c]
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }

    pub fn inverse_class(&self, c: usize) -> usize {
        self.inverse_class[c] as usize
    }

    pub fn id_by_label(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|ci| ci.label == label)
    }

    /// Class of `rep(c)^k`; independent of the representative choice.
    pub fn power_class(&self, g: &FiniteGroup, c: usize, k: u64) -> usize {
        self.class_of(g.power(self.classes[c].rep, k))
    }

    /// Order shared by every element of class `c`.
    pub fn class_order(&self, c: usize) -> u32 {
        self.rep_order[c]
    }

    /// Class ids whose elements have the given order, ascending.
    pub fn classes_of_order(&self, order: u32) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| self.rep_order[c] == order)
            .collect()
    }
}

/// Class multiplication coefficient: the number of ordered pairs
/// `(x, y), x in K_i, y in K_j` with `x * y = rep(K_k)`. Computed by direct
/// enumeration (for each `x` the cofactor `y = x^-1 rep` is forced, so one
/// membership test per `x` enumerates the pairs). Memoized; concurrent
/// queries may race on the memo but writes are idempotent.
pub fn lambda_coefficient(
    g: &FiniteGroup,
    t: &ConjugacyClassTable,
    i: usize,
    j: usize,
    k: usize,
) -> u64 {
    let key = (i as u32, j as u32, k as u32);
    if let Some(&v) = t.lambda_memo.lock().unwrap().get(&key) {
        return v;
    }
    let rep = t.class(k).rep;
    let mut count = 0u64;
    for &x in &t.class(i).members {
        let y = g.mul(g.inv(x), rep);
        if t.class_of(y) == j {
            count += 1;
        }
    }
    t.lambda_memo.lock().unwrap().insert(key, count);
    count
}

/// Coefficient vector in the class algebra: entry `c` counts tuples whose
/// running product equals a fixed element of class `c`. All entries are
/// arbitrary-precision (convolutions for ten periods overflow `u64`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassVector {
    counts: Vec<Count>,
}

impl ClassVector {
    /// The vector of a single factor confined to class `c`: one way to hit
    /// a fixed element of `c`, zero ways anywhere else.
    pub fn unit(t: &ConjugacyClassTable, c: usize) -> ClassVector {
        let mut counts = vec![Count::zero(); t.len()];
        counts[c] = Count::one();
        ClassVector { counts }
    }

    pub fn at(&self, c: usize) -> &Count {
        &self.counts[c]
    }

    pub fn counts(&self) -> &[Count] {
        &self.counts
    }

    /// Append one factor from class `j`: the new entry at `k` sums
    /// `old[c] * lambda(c, j, k)` over all classes `c`.
    pub fn convolve_class(
        &self,
        g: &FiniteGroup,
        t: &ConjugacyClassTable,
        j: usize,
    ) -> ClassVector {
        let mut counts = vec![Count::zero(); t.len()];
        for (c, old) in self.counts.iter().enumerate() {
            if old.is_zero() {
                continue;
            }
            for (k, slot) in counts.iter_mut().enumerate() {
                let lam = lambda_coefficient(g, t, c, j, k);
                if lam != 0 {
                    *slot += old * Count::from(lam);
                }
            }
        }
        ClassVector { counts }
    }
}

/// Number of `r`-tuples `(x_1,...,x_r)` with `x_t` in class `cs[t]` and
/// `x_1 * ... * x_r = identity`. Exact integers throughout.
///
/// Requires `r >= 2`. For `r = 3` this is a literal double loop over
/// `K_i x K_j`; longer products go through iterated class-vector
/// convolution, which the property suite checks against the loop.
pub fn count_product_solutions(g: &FiniteGroup, t: &ConjugacyClassTable, cs: &[usize]) -> Count {
    assert!(cs.len() >= 2, "need at least two classes, got {}", cs.len());
    match cs {
        [i, j] => {
            if t.inverse_class(*i) == *j {
                Count::from(t.class(*i).size)
            } else {
                Count::zero()
            }
        }
        [i, j, k] => {
            let mut total = 0u64;
            for &x in &t.class(*i).members {
                for &y in &t.class(*j).members {
                    let z = g.inv(g.mul(x, y));
                    if t.class_of(z) == *k {
                        total += 1;
                    }
                }
            }
            Count::from(total)
        }
        _ => {
            let mut v = ClassVector::unit(t, cs[0]);
            for &c in &cs[1..] {
                v = v.convolve_class(g, t, c);
            }
            let identity_class = t.class_of(g.identity());
            v.at(identity_class).clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_psl2, parse_permutation_group};

    fn ids(t: &ConjugacyClassTable, labels: &[&str]) -> Vec<usize> {
        labels.iter().map(|l| t.id_by_label(l).unwrap()).collect()
    }

    #[test]
    fn psl2_7_classes() {
        let g = build_psl2(7).unwrap();
        let t = conjugacy_classes(&g);
        let sizes: Vec<usize> = t.classes().iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![1, 21, 56, 42, 24, 24]);
        let labels: Vec<&str> = t.classes().iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, vec!["1A", "2A", "3A", "4A", "7A", "7B"]);
        // the two order-7 classes swap under inversion
        assert_eq!(
            t.inverse_class(t.id_by_label("7A").unwrap()),
            t.id_by_label("7B").unwrap()
        );
    }

    #[test]
    fn psl2_11_classes() {
        let g = build_psl2(11).unwrap();
        let t = conjugacy_classes(&g);
        let sizes: Vec<usize> = t.classes().iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![1, 55, 110, 132, 132, 110, 60, 60]);
        let labels: Vec<&str> = t.classes().iter().map(|c| c.label.as_str()).collect();
        assert_eq!(
            labels,
            vec!["1A", "2A", "3A", "5A", "5B", "6A", "11A", "11B"]
        );
    }

    #[test]
    fn trivial_group_classes() {
        let g = parse_permutation_group("degree 1\n").unwrap();
        let t = conjugacy_classes(&g);
        assert_eq!(t.len(), 1);
        assert_eq!(t.class(0).size, 1);
        assert_eq!(t.class(0).label, "1A");
    }

    #[test]
    fn class_equation() {
        for p in [7u64, 11] {
            let g = build_psl2(p).unwrap();
            let t = conjugacy_classes(&g);
            let total: usize = t.classes().iter().map(|c| c.size).sum();
            assert_eq!(total, g.order());
            for c in t.classes() {
                assert_eq!(c.size * c.centralizer_order, g.order());
            }
        }
    }

    #[test]
    fn power_map_representative_independent() {
        let g = build_psl2(7).unwrap();
        let t = conjugacy_classes(&g);
        for c in 0..t.len() {
            for k in 0..=7u64 {
                let expect = t.power_class(&g, c, k);
                for &x in &t.class(c).members {
                    assert_eq!(t.class_of(g.power(x, k)), expect);
                }
            }
        }
    }

    #[test]
    fn lambda_identity_rules() {
        let g = build_psl2(7).unwrap();
        let t = conjugacy_classes(&g);
        let one = t.class_of(g.identity());
        for c in 0..t.len() {
            // identity * y = rep forces y = rep
            assert_eq!(lambda_coefficient(&g, &t, one, c, c), 1);
            // y = x^-1
            assert_eq!(
                lambda_coefficient(&g, &t, c, t.inverse_class(c), one),
                t.class(c).size as u64
            );
        }
    }

    #[test]
    fn lambda_seven_classes() {
        let g = build_psl2(7).unwrap();
        let t = conjugacy_classes(&g);
        let (a7, b7) = (t.id_by_label("7A").unwrap(), t.id_by_label("7B").unwrap());
        assert_eq!(lambda_coefficient(&g, &t, a7, a7, b7), 9);
        assert_eq!(lambda_coefficient(&g, &t, b7, b7, a7), 9);
        assert_eq!(lambda_coefficient(&g, &t, a7, a7, a7), 1);
    }

    #[test]
    fn product_counts_psl2_7() {
        let g = build_psl2(7).unwrap();
        let t = conjugacy_classes(&g);
        let c = |ls: &[&str]| count_product_solutions(&g, &t, &ids(&t, ls));
        assert_eq!(c(&["1A", "1A", "1A"]), Count::from(1u32));
        // mixed 7-classes with an involution admit no solutions
        assert_eq!(c(&["2A", "7A", "7B"]), Count::zero());
        assert_eq!(c(&["2A", "4A", "7A"]), Count::from(168u32));
        assert_eq!(c(&["7A", "7A", "7A"]), Count::from(216u32));
        assert_eq!(c(&["7A", "7A", "7B"]), Count::from(24u32));
    }

    #[test]
    fn product_counts_psl2_11() {
        let g = build_psl2(11).unwrap();
        let t = conjugacy_classes(&g);
        let c = |ls: &[&str]| count_product_solutions(&g, &t, &ids(&t, ls));
        assert_eq!(c(&["11A", "11A", "11A"]), Count::from(840u32));
        assert_eq!(c(&["5A", "5B", "11A"]), Count::from(1320u32));
    }

    #[test]
    fn bridge_identity() {
        let g = build_psl2(7).unwrap();
        let t = conjugacy_classes(&g);
        for i in 0..t.len() {
            for j in 0..t.len() {
                for k in 0..t.len() {
                    let direct = count_product_solutions(&g, &t, &[i, j, k]);
                    let via_lambda = Count::from(
                        lambda_coefficient(&g, &t, i, j, t.inverse_class(k))
                            * t.class(k).size as u64,
                    );
                    assert_eq!(direct, via_lambda, "classes ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn length_two_products() {
        let g = build_psl2(7).unwrap();
        let t = conjugacy_classes(&g);
        let a7 = t.id_by_label("7A").unwrap();
        let b7 = t.id_by_label("7B").unwrap();
        assert_eq!(
            count_product_solutions(&g, &t, &[a7, b7]),
            Count::from(24u32)
        );
        assert_eq!(count_product_solutions(&g, &t, &[a7, a7]), Count::zero());
    }
}
