//! Exhaustive check of the tree enumeration against labelled trees.

mod common;

use std::collections::BTreeMap;

use common::{brute_aut, brute_force, c, factorial};
use cyclic_ainf::ainf::ClassKey;
use cyclic_ainf::trees::{enum_gr_minus, Tok};

#[test]
fn enumeration_matches_labelled_trees() {
    let labels = [1, 2];
    let max_n = 6;
    for (k, e) in [(0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (2, 1), (2, 2), (3, 0), (3, 1), (4, 0)] {
        let brute = brute_force(k, e, &labels, max_n);
        let keys: Vec<ClassKey> = labels.iter().map(|&l| c(l)).collect();
        let listed: BTreeMap<Vec<Tok>, usize> = enum_gr_minus(k, &c(e), &keys)
            .into_iter()
            .filter(|x| x.tree.len() <= max_n)
            .map(|x| (x.tree.canonical(), x.aut))
            .collect();
        assert_eq!(
            listed.keys().collect::<Vec<_>>(),
            brute.keys().collect::<Vec<_>>(),
            "class sets differ for k={k}, E={e}"
        );
        for (canon, aut) in &listed {
            let (count, n) = brute[canon];
            // a labelled structure is an isomorphism class together with a
            // vertex numbering modulo automorphisms
            assert_eq!(count * aut, factorial(n), "orbit count for k={k}, E={e}");
        }
    }
}

#[test]
fn automorphisms_match_self_map_counts() {
    let labels: Vec<ClassKey> = [1, 2].iter().map(|&l| c(l)).collect();
    for (k, e) in [(0, 2), (0, 3), (3, 0), (3, 1), (4, 0)] {
        for x in enum_gr_minus(k, &c(e), &labels).into_iter().filter(|x| x.tree.len() <= 6) {
            assert_eq!(brute_aut(&x.tree), x.aut, "{}", x.tree);
        }
    }
}
