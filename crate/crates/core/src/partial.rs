//! Finite partial injections `s`, word evaluation `w[s]`, evaluation paths and
//! fixed points of `w[s]`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::group::BaseGroup;
use crate::words::{Letter, ReducedWord};

/// Read access to a finite partial injection.
pub trait Injection {
    fn image(&self, n: u64) -> Option<u64>;
    fn preimage(&self, n: u64) -> Option<u64>;
}

/// A finite injective partial map on the naturals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialInjection {
    forward: BTreeMap<u64, u64>,
    backward: BTreeMap<u64, u64>,
}

impl PartialInjection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut s = Self::new();
        for (n, v) in pairs {
            s.insert(n, v)?;
        }
        Ok(s)
    }

    /// Adds `n -> v`. Re-adding an existing pair is a no-op.
    pub fn insert(&mut self, n: u64, v: u64) -> Result<()> {
        match (self.forward.get(&n), self.backward.get(&v)) {
            (Some(&old), _) if old == v => Ok(()),
            (None, None) => {
                self.forward.insert(n, v);
                self.backward.insert(v, n);
                Ok(())
            }
            _ => Err(Error::NotInjective(n, v)),
        }
    }

    pub fn remove(&mut self, n: u64) -> Option<u64> {
        let v = self.forward.remove(&n)?;
        self.backward.remove(&v);
        Some(v)
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        self.forward.get(&n).copied()
    }

    pub fn in_domain(&self, n: u64) -> bool {
        self.forward.contains_key(&n)
    }

    pub fn in_range(&self, n: u64) -> bool {
        self.backward.contains_key(&n)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Pairs sorted by the domain point.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.forward.iter().map(|(&n, &v)| (n, v))
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.forward.keys().copied()
    }

    pub fn range(&self) -> impl Iterator<Item = u64> + '_ {
        self.backward.keys().copied()
    }

    pub fn extends(&self, other: &PartialInjection) -> bool {
        other.pairs().all(|(n, v)| self.get(n) == Some(v))
    }

    /// Pairs of `self` that are not in `other`.
    pub fn difference(&self, other: &PartialInjection) -> Vec<(u64, u64)> {
        self.pairs().filter(|&(n, v)| other.get(n) != Some(v)).collect()
    }

    /// Largest `B` with `[0, B)` inside both domain and range.
    pub fn coverage(&self) -> u64 {
        let domain = first_gap(self.forward.keys().copied());
        let range = first_gap(self.backward.keys().copied());
        domain.min(range)
    }

    /// Least natural in neither the domain nor the range.
    pub fn least_unused(&self) -> u64 {
        let mut d = self.forward.keys().copied().peekable();
        let mut r = self.backward.keys().copied().peekable();
        let mut c = 0;
        loop {
            while d.next_if(|&x| x < c).is_some() {}
            while r.next_if(|&x| x < c).is_some() {}
            if d.peek() == Some(&c) || r.peek() == Some(&c) {
                c += 1;
            } else {
                return c;
            }
        }
    }

    /// Naturals `>= from` in neither the domain nor the range, ascending.
    pub fn unused_from(&self, from: u64) -> impl Iterator<Item = u64> + '_ {
        let mut d = self.forward.range(from..).map(|(&n, _)| n).peekable();
        let mut r = self.backward.range(from..).map(|(&n, _)| n).peekable();
        let mut c = from;
        std::iter::from_fn(move || loop {
            while d.next_if(|&x| x < c).is_some() {}
            while r.next_if(|&x| x < c).is_some() {}
            if d.peek() == Some(&c) || r.peek() == Some(&c) {
                c += 1;
                continue;
            }
            let found = c;
            c = c.checked_add(1)?;
            return Some(found);
        })
    }

    pub fn to_text(&self) -> String {
        self.pairs().map(|(n, v)| format!("{n} {v}\n")).collect()
    }
}

fn first_gap(sorted: impl Iterator<Item = u64>) -> u64 {
    let mut expected = 0;
    for n in sorted {
        if n != expected {
            break;
        }
        expected += 1;
    }
    expected
}

impl Injection for PartialInjection {
    fn image(&self, n: u64) -> Option<u64> {
        self.forward.get(&n).copied()
    }

    fn preimage(&self, n: u64) -> Option<u64> {
        self.backward.get(&n).copied()
    }
}

/// `base` with some of its pairs removed.
pub struct Without<'a> {
    pub base: &'a PartialInjection,
    pub removed: &'a BTreeMap<u64, u64>,
}

impl Injection for Without<'_> {
    fn image(&self, n: u64) -> Option<u64> {
        if self.removed.contains_key(&n) {
            None
        } else {
            self.base.image(n)
        }
    }

    fn preimage(&self, n: u64) -> Option<u64> {
        let m = self.base.preimage(n)?;
        if self.removed.contains_key(&m) {
            None
        } else {
            Some(m)
        }
    }
}

/// Parses `n n'` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(u64, u64)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [a, b] => a.parse::<u64>().ok().zip(b.parse::<u64>().ok()),
            _ => None,
        };
        match parsed {
            Some(pair) => pairs.push(pair),
            None => {
                return Err(Error::BadTable(format!(
                    "line {}: expected `n n'`, got `{line}`",
                    lineno + 1
                )))
            }
        }
    }
    Ok(pairs)
}

pub fn apply_letter<S: Injection + ?Sized>(group: &BaseGroup, s: &S, letter: Letter, n: u64) -> Option<u64> {
    match letter {
        Letter::Group(g) => Some(group.eval(g, n)),
        Letter::X => s.image(n),
        Letter::XInv => s.preimage(n),
    }
}

/// `w[s](n)`; the empty word acts as the identity.
pub fn apply_word<S: Injection + ?Sized>(group: &BaseGroup, w: &ReducedWord, s: &S, n: u64) -> Option<u64> {
    w.applied()
        .try_fold(n, |v, &letter| apply_letter(group, s, letter, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStatus {
    /// The path stops with its last value awaiting `a_before`, which is
    /// undefined there.
    Terminated { before: usize },
    /// The `(letter, value)` states repeat; `values` holds one period after
    /// the preperiod.
    Periodic { period: usize, preperiod: usize },
}

/// The `(w, s)`-path of `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub start: u64,
    pub values: Vec<u64>,
    pub status: PathStatus,
    pub x_applications: usize,
    pub x_inv_applications: usize,
}

impl Path {
    pub fn last_value(&self) -> u64 {
        *self.values.last().expect("paths are never empty")
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value_set(&self) -> BTreeSet<u64> {
        self.values.iter().copied().collect()
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self.status, PathStatus::Terminated { .. })
    }
}

/// Applies the letters of `w` cyclically (`a_1` first) starting from `m`,
/// until a letter is undefined or a `(letter, value)` state repeats.
///
/// Words without an `X` letter are rejected, since their paths need not be
/// eventually periodic on a finite window.
pub fn mpath<S: Injection + ?Sized>(group: &BaseGroup, w: &ReducedWord, s: &S, m: u64) -> Result<Path> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if w.is_group_word() {
        return Err(Error::GroupWord(w.to_text(group)));
    }
    let letters: Vec<Letter> = w.applied().copied().collect();
    let n = letters.len();
    let mut seen: HashMap<(usize, u64), usize> = HashMap::new();
    let mut values = vec![m];
    let (mut xs, mut xinvs) = (0, 0);
    let mut index = 0;
    let mut current = m;
    loop {
        let state = (index, current);
        if let Some(&preperiod) = seen.get(&state) {
            values.pop();
            let period = values.len() - preperiod;
            return Ok(Path {
                start: m,
                values,
                status: PathStatus::Periodic { period, preperiod },
                x_applications: xs,
                x_inv_applications: xinvs,
            });
        }
        seen.insert(state, values.len() - 1);
        let letter = letters[index];
        match apply_letter(group, s, letter, current) {
            None => {
                return Ok(Path {
                    start: m,
                    values,
                    status: PathStatus::Terminated { before: index + 1 },
                    x_applications: xs,
                    x_inv_applications: xinvs,
                })
            }
            Some(next) => {
                match letter {
                    Letter::X => xs += 1,
                    Letter::XInv => xinvs += 1,
                    Letter::Group(_) => {}
                }
                values.push(next);
                current = next;
                index = (index + 1) % n;
            }
        }
    }
}

/// `set(w, s, m)`.
pub fn path_set<S: Injection + ?Sized>(
    group: &BaseGroup,
    w: &ReducedWord,
    s: &S,
    m: u64,
) -> Result<BTreeSet<u64>> {
    Ok(mpath(group, w, s, m)?.value_set())
}

/// The complete fixed-point set of `w[s]`.
///
/// For a word with an `X` letter, a fixed point must survive the first `X`
/// letter it meets, so candidates come from the domain or range of `s`,
/// pulled back through a leading group letter.
pub fn fixed_points(group: &BaseGroup, w: &ReducedWord, s: &PartialInjection) -> Result<BTreeSet<u64>> {
    if w.is_empty() {
        return Err(Error::IdentityFixSet);
    }
    if let Some(g) = w.group_element(group) {
        return group.fix_set(g);
    }
    let mut applied = w.applied();
    let first = *applied.next().expect("non-empty");
    let candidates: Vec<u64> = match first {
        Letter::X => s.domain().collect(),
        Letter::XInv => s.range().collect(),
        Letter::Group(g) => {
            let inv = group.invert(g);
            let pool: Vec<u64> = match applied.next() {
                Some(Letter::X) => s.domain().collect(),
                Some(Letter::XInv) => s.range().collect(),
                _ => unreachable!("reduced words do not repeat group letters"),
            };
            pool.into_iter().map(|v| group.eval(inv, v)).collect()
        }
    };
    Ok(candidates
        .into_iter()
        .filter(|&m| apply_word(group, w, s, m) == Some(m))
        .collect())
}

/// Fixed points of `w[s]` whose single-cycle path uses at least one of
/// `pairs` (each a pair of `s`).
///
/// Since `s` is injective, such a point is determined by the letter position
/// where the pair is used: pull the pair's point back through the letters
/// applied before it.
pub fn fixed_points_through<S: Injection + ?Sized>(
    group: &BaseGroup,
    w: &ReducedWord,
    s: &S,
    pairs: &[(u64, u64)],
) -> BTreeSet<u64> {
    let letters: Vec<Letter> = w.applied().copied().collect();
    let mut out = BTreeSet::new();
    for (j, letter) in letters.iter().enumerate() {
        let entry = |(a, b): (u64, u64)| match letter {
            Letter::X => Some(a),
            Letter::XInv => Some(b),
            Letter::Group(_) => None,
        };
        for &pair in pairs {
            let Some(mut v) = entry(pair) else { break };
            let pulled = letters[..j].iter().rev().try_for_each(|l| {
                v = apply_letter(group, s, l.inverse(group), v)?;
                Some(())
            });
            if pulled.is_some() && apply_word(group, w, s, v) == Some(v) {
                out.insert(v);
            }
        }
    }
    out
}
