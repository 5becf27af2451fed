//! Slow reference implementations, written from the definitions and sharing
//! no evaluation code with the library.

use std::collections::{BTreeSet, HashMap, HashSet};

use cofinitary::words::Letter;
use cofinitary::{BaseGroup, Condition, PartialInjection, ReducedWord};

pub struct Naive {
    forward: HashMap<u64, u64>,
    backward: HashMap<u64, u64>,
}

impl Naive {
    pub fn new(s: &PartialInjection) -> Self {
        let forward: HashMap<u64, u64> = s.pairs().collect();
        let backward = forward.iter().map(|(&a, &b)| (b, a)).collect();
        Self { forward, backward }
    }

    pub fn letter(&self, group: &BaseGroup, letter: Letter, n: u64) -> Option<u64> {
        match letter {
            Letter::X => self.forward.get(&n).copied(),
            Letter::XInv => self.backward.get(&n).copied(),
            Letter::Group(g) => Some(group.eval(g, n)),
        }
    }

    /// `letters` as written, rightmost applied first.
    pub fn apply(&self, group: &BaseGroup, letters: &[Letter], n: u64) -> Option<u64> {
        letters.iter().rev().try_fold(n, |v, &l| self.letter(group, l, v))
    }

    /// Every value the cyclic letter-by-letter evaluation visits from `m`.
    pub fn path_set(&self, group: &BaseGroup, w: &ReducedWord, m: u64) -> BTreeSet<u64> {
        let applied: Vec<Letter> = w.letters().iter().rev().copied().collect();
        let mut states = HashSet::new();
        let mut values = BTreeSet::from([m]);
        let (mut i, mut v) = (0, m);
        while states.insert((i, v)) {
            match self.letter(group, applied[i], v) {
                Some(next) => {
                    values.insert(next);
                    v = next;
                    i = (i + 1) % applied.len();
                }
                None => break,
            }
        }
        values
    }
}

/// A bound past every point a fixed point of a short word can reach.
pub fn window(s: &PartialInjection) -> u64 {
    s.pairs().map(|(a, b)| a.max(b)).max().map_or(0, |m| m + 1) + 24
}

pub fn fixed_points(group: &BaseGroup, w: &ReducedWord, s: &PartialInjection, window: u64) -> BTreeSet<u64> {
    let naive = Naive::new(s);
    (0..window)
        .filter(|&m| naive.apply(group, w.letters(), m) == Some(m))
        .collect()
}

/// `q ≤ p`, straight from the definition; fixed points are searched below `window`.
pub fn leq(q: &Condition, p: &Condition, window: u64) -> bool {
    let group = p.group();
    let extends = p.s().pairs().all(|(n, v)| q.s().get(n) == Some(v));
    let words = p.words().is_subset(q.words());
    let params = p.params().iter().all(|(w, m)| q.params().get(w) == Some(m));
    if !(extends && words && params) {
        return false;
    }
    let old = Naive::new(p.s());
    let new = Naive::new(q.s());
    p.words().iter().all(|w| {
        let letters = w.letters();
        fixed_points(group, w, q.s(), window).into_iter().all(|m| {
            let set = new.path_set(group, w, m);
            (0..letters.len()).any(|i| {
                (i + 1..=letters.len()).any(|j| {
                    let sub = &letters[i..j];
                    set.iter().any(|&v| old.apply(group, sub, v) == Some(v))
                })
            })
        })
    })
}
