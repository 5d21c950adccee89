use std::collections::BTreeSet;

use snumber_core::dessin::dessin_sign;
use snumber_core::insertion::enumerate_dessins;
use snumber_core::oracle::{brute_force_dessin_codes, brute_force_tree_codes};
use snumber_core::partition::all_type_lists;
use snumber_core::snumber::{dessin_count, s_number, Mode};
use snumber_core::trees::enumerate_real_trees;

#[test]
fn insertion_matches_exhaustive_search_up_to_degree_5() {
    for n in 2..=5 {
        for t in all_type_lists(n, n as usize - 1) {
            let engine: Vec<Vec<u8>> = enumerate_dessins(&t)
                .unwrap()
                .iter()
                .map(|d| d.canonical_code())
                .collect();
            let oracle = brute_force_dessin_codes(&t, 5).unwrap();
            assert_eq!(engine.len(), oracle.len(), "count mismatch for {t}");
            let a: BTreeSet<_> = engine.into_iter().collect();
            let b: BTreeSet<_> = oracle.into_iter().collect();
            assert_eq!(a, b, "code sets differ for {t}");
            assert_eq!(
                dessin_count(&t).unwrap(),
                a.len() as i128,
                "profile count for {t}"
            );
        }
    }
}

#[test]
fn signs_of_oracle_dessins_sum_to_s_number() {
    for t in all_type_lists(4, 3) {
        let sum: i128 = enumerate_dessins(&t)
            .unwrap()
            .iter()
            .map(|d| dessin_sign(d).unwrap() as i128)
            .sum();
        assert_eq!(sum, s_number(&t, Mode::Multiplicative).unwrap(), "{t}");
    }
}

#[test]
fn tree_enumerator_matches_dyck_words_up_to_8_edges() {
    for e in 1..=8 {
        for ((lb, lw), codes) in brute_force_tree_codes(e).unwrap() {
            let got: BTreeSet<String> = enumerate_real_trees(&lb, &lw)
                .unwrap()
                .iter()
                .map(|t| t.canonical())
                .collect();
            assert_eq!(got, codes, "({lb}), ({lw})");
        }
    }
}
