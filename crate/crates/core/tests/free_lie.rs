mod common;

use nabcoh::lie::{free_lie_basis, is_lyndon, lyndon_words, validate_lie};
use proptest::prelude::*;

#[test]
fn lyndon_dims_match_bracket_oracle() {
    for k in 1..=3usize {
        for depth in 1..=6i64 {
            for mask in 0..(1u32 << k) {
                let weights: Vec<i64> = (0..k)
                    .map(|g| if mask >> g & 1 == 1 { -2 } else { -1 })
                    .collect();
                let gens: Vec<(String, i64)> = weights
                    .iter()
                    .enumerate()
                    .map(|(g, &w)| (format!("g{g}"), w))
                    .collect();
                let free = free_lie_basis(&gens, depth).unwrap();
                assert_eq!(
                    free.dims_by_weight(),
                    common::brute_force_free_lie_dims(&weights, depth),
                    "{weights:?} depth {depth}"
                );
            }
        }
    }
}

#[test]
fn two_generators_depth_three() {
    let gens = vec![("x".to_string(), -1), ("y".to_string(), -1)];
    let free = free_lie_basis(&gens, 3).unwrap();
    let names: Vec<&str> = (0..free.algebra().dim())
        .map(|i| free.algebra().name(i))
        .collect();
    assert_eq!(names, ["x", "y", "[x,y]", "[x,[x,y]]", "[[x,y],y]"]);
}

proptest! {
    #[test]
    fn lyndon_enumeration_is_exactly_the_lyndon_words(k in 1usize..4, n in 1usize..6) {
        let words = lyndon_words(k, n);
        prop_assert!(words.iter().all(|w| is_lyndon(w)));
        prop_assert!(words.windows(2).all(|p| p[0] < p[1]));
        let mut count = 0;
        let mut w = vec![0usize; 0];
        fn all(k: usize, n: usize, w: &mut Vec<usize>, count: &mut usize) {
            if !w.is_empty() && is_lyndon(w) {
                *count += 1;
            }
            if w.len() == n {
                return;
            }
            for a in 0..k {
                w.push(a);
                all(k, n, w, count);
                w.pop();
            }
        }
        all(k, n, &mut w, &mut count);
        prop_assert_eq!(words.len(), count);
    }

    #[test]
    fn truncations_are_lie_algebras(k in 1usize..4, depth in 1i64..5, heavy in 0u32..8) {
        let gens: Vec<(String, i64)> =
            (0..k).map(|g| (format!("g{g}"), if heavy >> g & 1 == 1 { -2 } else { -1 })).collect();
        let free = free_lie_basis(&gens, depth).unwrap();
        prop_assert!(validate_lie(free.algebra()).passed());
    }
}
