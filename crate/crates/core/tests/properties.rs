//! Property suites over the class algebra, the signature calculus and the
//! search reductions. Runnable standalone:
//! `cargo test -p sigsurf-core --test properties`.

use num_traits::Zero;
use proptest::prelude::*;

use sigsurf_core::classes::{conjugacy_classes, count_product_solutions, lambda_coefficient};
use sigsurf_core::epi::{exists_epimorphism, SearchOptions, Verdict};
use sigsurf_core::group::{build_psl2, parse_permutation_group, FiniteGroup};
use sigsurf_core::signature::{
    classify, extend_signature, monoid_combine, riemann_hurwitz_genus, theorem_genus,
    to_exponent_vector, Classification, GroupId, Signature,
};
use sigsurf_core::subgroups::SubgroupLattice;
use sigsurf_core::{Count, Rat};

#[test]
fn class_equation_both_groups() {
    for p in [7u64, 11] {
        let g = build_psl2(p).unwrap();
        let t = conjugacy_classes(&g);
        assert_eq!(t.classes().iter().map(|c| c.size).sum::<usize>(), g.order());
        for c in t.classes() {
            assert_eq!(c.size * c.centralizer_order, g.order());
        }
    }
}

#[test]
fn lambda_total_count_identity() {
    // summing lambda(i,j,k) * |K_k| over k counts all of K_i x K_j
    for p in [7u64, 11] {
        let g = build_psl2(p).unwrap();
        let t = conjugacy_classes(&g);
        for i in 0..t.len() {
            for j in 0..t.len() {
                let total: u64 = (0..t.len())
                    .map(|k| lambda_coefficient(&g, &t, i, j, k) * t.class(k).size as u64)
                    .sum();
                assert_eq!(
                    total,
                    (t.class(i).size * t.class(j).size) as u64,
                    "p={p}, classes ({i},{j})"
                );
            }
        }
    }
}

/// Direct tensor of length-3 counts by looping over all element pairs once.
fn direct_triple_tensor(g: &FiniteGroup, t: &sigsurf_core::ConjugacyClassTable) -> Vec<u64> {
    let ncl = t.len();
    let mut tensor = vec![0u64; ncl * ncl * ncl];
    for x in 0..g.order() {
        let i = t.class_of(x);
        for y in 0..g.order() {
            let j = t.class_of(y);
            let k = t.class_of(g.inv(g.mul(x, y)));
            tensor[(i * ncl + j) * ncl + k] += 1;
        }
    }
    tensor
}

#[test]
fn convolution_matches_direct_loop_psl2_7_exhaustive() {
    let g = build_psl2(7).unwrap();
    let t = conjugacy_classes(&g);
    let ncl = t.len();
    let tensor = direct_triple_tensor(&g, &t);
    // every length-3 query
    for i in 0..ncl {
        for j in 0..ncl {
            for k in 0..ncl {
                let direct = tensor[(i * ncl + j) * ncl + k];
                assert_eq!(
                    count_product_solutions(&g, &t, &[i, j, k]),
                    Count::from(direct),
                    "triple ({i},{j},{k})"
                );
            }
        }
    }
    // every length-4 query: direct by element loops with the last factor fixed
    for l in 0..ncl {
        let mut by_ijk = vec![0u64; ncl * ncl * ncl];
        for &z in &t.class(l).members {
            // count (x,y,w): x y w z = e, i.e. w = (xy)^-1 z^-1... loop pairs
            for x in 0..g.order() {
                let i = t.class_of(x);
                for y in 0..g.order() {
                    let j = t.class_of(y);
                    let w = g.mul(g.inv(g.mul(x, y)), g.inv(z));
                    by_ijk[(i * ncl + j) * ncl + t.class_of(w)] += 1;
                }
            }
        }
        for i in 0..ncl {
            for j in 0..ncl {
                for k in 0..ncl {
                    let direct = by_ijk[(i * ncl + j) * ncl + k];
                    assert_eq!(
                        count_product_solutions(&g, &t, &[i, j, k, l]),
                        Count::from(direct),
                        "quadruple ({i},{j},{k},{l})"
                    );
                }
            }
        }
    }
}

#[test]
fn convolution_matches_direct_loop_psl2_11_sampled() {
    let g = build_psl2(11).unwrap();
    let t = conjugacy_classes(&g);
    let ncl = t.len();
    // deterministic linear congruential stream
    let mut state = 0x2545f4914f6cdd1du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for q in 0..50 {
        let i = (next() % ncl as u64) as usize;
        let j = (next() % ncl as u64) as usize;
        let k = (next() % ncl as u64) as usize;
        let mut direct = 0u64;
        for &x in &t.class(i).members {
            for &y in &t.class(j).members {
                if t.class_of(g.inv(g.mul(x, y))) == k {
                    direct += 1;
                }
            }
        }
        assert_eq!(
            count_product_solutions(&g, &t, &[i, j, k]),
            Count::from(direct),
            "query {q}: ({i},{j},{k})"
        );
    }
}

#[test]
fn lambda_small_group_oracle() {
    // from-scratch triple loop over raw elements, groups of order <= 24
    let inputs = [
        "degree 4\n(0 1)\n(0 1 2 3)\n",                // S4
        "degree 4\n(0 1 2)\n(0 1)(2 3)\n",             // A4
        "degree 6\n(0 1 2 3 4 5)\n(0 5)(1 4)(2 3)\n",  // D12
        "degree 12\n(0 1 2 3 4 5 6 7 8 9 10 11)\n",    // Z12
        "degree 7\n(0 1 2 3 4 5 6)\n(1 2 4)(3 6 5)\n", // Z7:Z3
    ];
    for text in inputs {
        let g = parse_permutation_group(text).unwrap();
        assert!(g.order() <= 24, "oracle restricted to order <= 24");
        let t = conjugacy_classes(&g);
        let ncl = t.len();
        let mut oracle = vec![0u64; ncl * ncl * ncl];
        for x in 0..g.order() {
            for y in 0..g.order() {
                let prod = g.mul(x, y);
                // count only products landing on class representatives
                let k = t.class_of(prod);
                if prod == t.class(k).rep {
                    oracle[(t.class_of(x) * ncl + t.class_of(y)) * ncl + k] += 1;
                }
            }
        }
        for i in 0..ncl {
            for j in 0..ncl {
                for k in 0..ncl {
                    assert_eq!(
                        lambda_coefficient(&g, &t, i, j, k),
                        oracle[(i * ncl + j) * ncl + k],
                        "group order {}, ({i},{j},{k})",
                        g.order()
                    );
                }
            }
        }
    }
}

#[test]
fn rotation_invariance_of_product_counts() {
    let g = build_psl2(7).unwrap();
    let t = conjugacy_classes(&g);
    let ncl = t.len();
    for i in 0..ncl {
        for j in 0..ncl {
            for k in 0..ncl {
                let a = count_product_solutions(&g, &t, &[i, j, k]);
                let b = count_product_solutions(&g, &t, &[j, k, i]);
                let c = count_product_solutions(&g, &t, &[k, i, j]);
                assert_eq!(a, b);
                assert_eq!(b, c);
            }
        }
    }
}

#[test]
fn generating_excess_certifies_epimorphism() {
    // whenever the full-group solution count exceeds the bound over maximal
    // subgroup copies, a generating tuple exists; cross-validated against
    // the backtracking search on all genus-0 length-3 period multisets
    let g = build_psl2(7).unwrap();
    let t = conjugacy_classes(&g);
    let lat = SubgroupLattice::enumerate(&g).unwrap();
    let periods = [2u32, 3, 4, 7];
    for (ai, &m1) in periods.iter().enumerate() {
        for (bi, &m2) in periods.iter().enumerate().skip(ai) {
            for &m3 in periods.iter().skip(bi) {
                let mut total = Count::zero();
                let mut bound = Count::zero();
                let combos = class_combos(&t, &[m1, m2, m3]);
                for combo in &combos {
                    total += count_product_solutions(&g, &t, combo);
                    bound += lat.solution_bound(&g, &t, combo);
                }
                let sig = Signature::new(0, vec![m1, m2, m3]).unwrap();
                let out = exists_epimorphism(&g, &t, &sig, &SearchOptions::default()).unwrap();
                if total > bound {
                    assert!(
                        out.verdict.is_found(),
                        "({m1},{m2},{m3}): excess {total} > {bound} but search failed"
                    );
                }
            }
        }
    }
}

fn class_combos(t: &sigsurf_core::ConjugacyClassTable, orders: &[u32]) -> Vec<Vec<usize>> {
    let per_pos: Vec<Vec<usize>> = orders.iter().map(|&m| t.classes_of_order(m)).collect();
    let mut out = vec![Vec::new()];
    for options in per_pos {
        let mut next = Vec::new();
        for prefix in out {
            for &c in &options {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[test]
fn conjugacy_reduction_is_lossless() {
    // reduced and unreduced searches agree on small genus-0 signatures
    let g = build_psl2(7).unwrap();
    let t = conjugacy_classes(&g);
    for s in [
        "(0;2,2,2)",
        "(0;2,3,3)",
        "(0;2,3,7)",
        "(0;3,3,4)",
        "(0;4,4,4)",
        "(0;7,7,7)",
        "(0;2,2,2,2)",
        "(0;2,2,2,3)",
    ] {
        let sig: Signature = s.parse().unwrap();
        let reduced = exists_epimorphism(&g, &t, &sig, &SearchOptions::default()).unwrap();
        let unreduced = exists_epimorphism(
            &g,
            &t,
            &sig,
            &SearchOptions {
                conjugacy_reduction: false,
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert_eq!(
            reduced.verdict.is_found(),
            unreduced.verdict.is_found(),
            "{s}"
        );
        assert!(
            !matches!(reduced.verdict, Verdict::Undetermined)
                && !matches!(unreduced.verdict, Verdict::Undetermined),
            "{s}: both searches must exhaust"
        );
    }
}

fn arb_signature(gid: GroupId, max_h: u32, max_r: usize) -> impl Strategy<Value = Signature> {
    let periods = gid.allowed_periods().to_vec();
    (
        0..=max_h,
        proptest::collection::vec(proptest::sample::select(periods), 0..=max_r),
    )
        .prop_map(|(h, ps)| Signature::new(h, ps).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn rh_genus_equals_weighted_form_psl2_7(sig in arb_signature(GroupId::Psl27, 6, 12)) {
        let ev = to_exponent_vector(GroupId::Psl27, &sig).unwrap();
        let weighted = 1 + 168 * (i64::from(ev.h) - 1)
            + 42 * i64::from(ev.a[&2])
            + 56 * i64::from(ev.a[&3])
            + 63 * i64::from(ev.a[&4])
            + 72 * i64::from(ev.a[&7]);
        prop_assert_eq!(riemann_hurwitz_genus::<i64>(168, &sig), Rat::from_integer(weighted));
        prop_assert_eq!(theorem_genus(GroupId::Psl27, &ev), weighted);
    }

    #[test]
    fn rh_genus_equals_weighted_form_psl2_11(sig in arb_signature(GroupId::Psl211, 6, 12)) {
        let ev = to_exponent_vector(GroupId::Psl211, &sig).unwrap();
        let weighted = 1 + 660 * (i64::from(ev.h) - 1)
            + 165 * i64::from(ev.a[&2])
            + 220 * i64::from(ev.a[&3])
            + 264 * i64::from(ev.a[&5])
            + 275 * i64::from(ev.a[&6])
            + 300 * i64::from(ev.a[&11]);
        prop_assert_eq!(riemann_hurwitz_genus::<i64>(660, &sig), Rat::from_integer(weighted));
    }

    #[test]
    fn extension_monotonicity(sig in arb_signature(GroupId::Psl27, 3, 8), pick in 0usize..8) {
        if let Classification::Admissible(_) = classify(GroupId::Psl27, &sig) {
            let periods = sig.periods();
            if !periods.is_empty() {
                let m = periods[pick % periods.len()];
                if let Ok(extended) = extend_signature(&sig, m) {
                    // extending an admissible signature never drops below the
                    // minimum genus
                    let c = classify(GroupId::Psl27, &extended);
                    prop_assert!(
                        !matches!(c, Classification::Rejected(sigsurf_core::RejectReason::BelowMinGenus)),
                        "{sig} extended by {m} -> {extended}"
                    );
                }
            }
        }
    }

    #[test]
    fn monoid_genus_additivity(
        a in arb_signature(GroupId::Psl27, 3, 6),
        b in arb_signature(GroupId::Psl27, 3, 6),
    ) {
        let combined = monoid_combine(&a, &b);
        let g = |s: &Signature| riemann_hurwitz_genus::<i64>(168, s);
        prop_assert_eq!(g(&combined), g(&a) + g(&b) + Rat::from_integer(167));
    }
}

#[test]
fn monoid_genus_additivity_exhaustive_small() {
    // exhaustive over all signatures with h <= 1 and r <= 2
    let gid = GroupId::Psl27;
    let mut sigs = Vec::new();
    for h in 0..=1u32 {
        sigs.push(Signature::new(h, vec![]).unwrap());
        for &m in gid.allowed_periods() {
            sigs.push(Signature::new(h, vec![m]).unwrap());
            for &m2 in gid.allowed_periods() {
                sigs.push(Signature::new(h, vec![m, m2]).unwrap());
            }
        }
    }
    for a in &sigs {
        for b in &sigs {
            let combined = monoid_combine(a, b);
            let g = |s: &Signature| riemann_hurwitz_genus::<i64>(168, s);
            assert_eq!(g(&combined), g(a) + g(b) + Rat::from_integer(167));
        }
    }
}
