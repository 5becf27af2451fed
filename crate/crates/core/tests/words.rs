mod common;

use cofinitary::words::Letter;
use cofinitary::{apply_word, mpath, BaseGroup, PathStatus, ReducedWord};
use common::oracle::Naive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64) -> (ChaCha8Rng, BaseGroup) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = common::builtin_groups();
    let group = groups[rng.gen_range(0..groups.len())].clone();
    (rng, group)
}

/// Letters that need not be reduced.
fn raw(rng: &mut ChaCha8Rng, group: &BaseGroup, len: usize) -> Vec<Letter> {
    (0..len).map(|_| common::random_letter(rng, group)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reduction_is_idempotent_and_acts_the_same(seed in any::<u64>(), len in 0usize..10) {
        let (mut rng, group) = setup(seed);
        let letters = raw(&mut rng, &group, len);
        let w = ReducedWord::reduce(&group, letters.iter().copied());
        prop_assert!(w.is_reduced(&group));
        prop_assert_eq!(ReducedWord::reduce(&group, w.letters().iter().copied()), w.clone());
        // cancelling x x^-1 can only make the word defined at more points
        let s = common::random_injection(&mut rng, 12, 16);
        let naive = Naive::new(&s);
        for n in 0..20 {
            if let Some(v) = naive.apply(&group, &letters, n) {
                prop_assert_eq!(apply_word(&group, &w, &s, n), Some(v));
            }
        }
    }

    #[test]
    fn inverse_and_concatenation(seed in any::<u64>()) {
        let (mut rng, group) = setup(seed);
        let u = common::random_word(&mut rng, &group, 5);
        let v = common::random_word(&mut rng, &group, 5);
        let t = common::random_word(&mut rng, &group, 5);
        prop_assert!(u.concat(&group, &u.invert(&group)).is_empty());
        prop_assert_eq!(u.invert(&group).invert(&group), u.clone());
        prop_assert_eq!(
            u.concat(&group, &v).concat(&group, &t),
            u.concat(&group, &v.concat(&group, &t))
        );
        prop_assert_eq!(u.concat(&group, &v).invert(&group), v.invert(&group).concat(&group, &u.invert(&group)));
    }

    #[test]
    fn text_round_trips(seed in any::<u64>()) {
        let (mut rng, group) = setup(seed);
        let w = common::random_word(&mut rng, &group, 6);
        let text = w.to_text(&group);
        prop_assert_eq!(ReducedWord::parse_exact(&group, &text).unwrap(), w);
    }

    #[test]
    fn evaluation_respects_products_and_inverses(seed in any::<u64>()) {
        let (mut rng, group) = setup(seed);
        let u = common::random_word(&mut rng, &group, 4);
        let v = common::random_word(&mut rng, &group, 4);
        let s = common::random_injection(&mut rng, 14, 18);
        let uv = u.concat(&group, &v);
        for n in 0..24 {
            let stepwise = apply_word(&group, &v, &s, n).and_then(|m| apply_word(&group, &u, &s, m));
            if let Some(value) = stepwise {
                prop_assert_eq!(apply_word(&group, &uv, &s, n), Some(value));
                prop_assert_eq!(apply_word(&group, &uv.invert(&group), &s, value), Some(n));
            }
        }
    }

    #[test]
    fn paths_follow_the_letters(seed in any::<u64>()) {
        let (mut rng, group) = setup(seed);
        let w = common::random_word(&mut rng, &group, 5);
        let s = common::random_injection(&mut rng, 12, 16);
        let m = rng.gen_range(0..20);
        let path = mpath(&group, &w, &s, m).unwrap();
        let naive = Naive::new(&s);
        let applied: Vec<Letter> = w.letters().iter().rev().copied().collect();
        for (i, pair) in path.values.windows(2).enumerate() {
            let letter = applied[i % applied.len()];
            prop_assert_eq!(naive.letter(&group, letter, pair[0]), Some(pair[1]));
        }
        prop_assert_eq!(path.value_set(), naive.path_set(&group, &w, m));
        match path.status {
            PathStatus::Terminated { before } => {
                let next = applied[path.steps() % applied.len()];
                prop_assert_eq!(w.letter(before), next);
                prop_assert_eq!(naive.letter(&group, next, path.last_value()), None);
            }
            PathStatus::Periodic { period, .. } => prop_assert_eq!(period % applied.len(), 0),
        }
    }

    #[test]
    fn cyclic_cores_are_cyclically_reduced(seed in any::<u64>()) {
        let (mut rng, group) = setup(seed);
        let w = common::random_word(&mut rng, &group, 6);
        let core = w.cyclic_core(&group);
        prop_assert!(core.len() <= w.len());
        prop_assert_eq!(core.x_count() % 2, w.x_count() % 2);
        prop_assert!(core.is_group_word() || core.is_cyclically_reduced(&group));
    }

    #[test]
    fn group_elements_compose(seed in any::<u64>(), a in -4i64..5, b in -4i64..5) {
        let (_, group) = setup(seed);
        let (g, h) = (group.power(a), group.power(b));
        let gh = group.multiply(g, h).unwrap();
        for n in 0..40 {
            prop_assert_eq!(group.eval(gh, n), group.eval(g, group.eval(h, n)));
            prop_assert_eq!(group.eval(group.invert(g), group.eval(g, n)), n);
        }
    }
}
