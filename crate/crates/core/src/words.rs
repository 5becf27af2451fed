//! Reduced words over `(G \ {1}) ∪ {X, X^-1}`, i.e. elements of the free
//! product of a base group with the free group on one generator `X`.
//!
//! Words are written `a_n ... a_1`: the leftmost letter is applied last. The
//! letters of a [`ReducedWord`] are stored in that written order, and
//! [`ReducedWord::letter`] indexes them the same way (`a_1` is the rightmost).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::group::{BaseGroup, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Group(GroupElement),
    X,
    XInv,
}

impl Letter {
    pub fn is_x(&self) -> bool {
        matches!(self, Letter::X | Letter::XInv)
    }

    pub fn inverse(&self, group: &BaseGroup) -> Letter {
        match *self {
            Letter::Group(g) => Letter::Group(group.invert(g)),
            Letter::X => Letter::XInv,
            Letter::XInv => Letter::X,
        }
    }
}

/// An element of the free product in normal form. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn x() -> Self {
        Self {
            letters: vec![Letter::X],
        }
    }

    pub fn x_inv() -> Self {
        Self {
            letters: vec![Letter::XInv],
        }
    }

    /// The one-letter word `g`, or the empty word for the identity.
    pub fn element(group: &BaseGroup, g: GroupElement) -> Self {
        Self::reduce(group, [Letter::Group(g)])
    }

    /// Concatenate-and-reduce. `letters` are given in written order.
    pub fn reduce(group: &BaseGroup, letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for letter in letters {
            match (stack.last().copied(), letter) {
                (_, Letter::Group(g)) if group.is_identity(g) => {}
                (Some(Letter::Group(top)), Letter::Group(g)) => {
                    stack.pop();
                    let merged = group.product(top, g);
                    if !group.is_identity(merged) {
                        stack.push(Letter::Group(merged));
                    }
                }
                (Some(Letter::X), Letter::XInv) | (Some(Letter::XInv), Letter::X) => {
                    stack.pop();
                }
                _ => stack.push(letter),
            }
        }
        Self { letters: stack }
    }

    /// Letters in written order, `a_n` first.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `a_i` for `1 <= i <= len`.
    pub fn letter(&self, i: usize) -> Letter {
        self.letters[self.letters.len() - i]
    }

    /// Letters in the order they are applied, `a_1` first.
    pub fn applied(&self) -> impl DoubleEndedIterator<Item = &Letter> + ExactSizeIterator {
        self.letters.iter().rev()
    }

    /// `self · other`: `other` is applied first.
    pub fn concat(&self, group: &BaseGroup, other: &ReducedWord) -> Self {
        Self::reduce(group, self.letters.iter().chain(&other.letters).copied())
    }

    pub fn invert(&self, group: &BaseGroup) -> Self {
        Self {
            letters: self.applied().map(|l| l.inverse(group)).collect(),
        }
    }

    /// Reduced rotations of the letter sequence; `{∅}` for the empty word.
    pub fn cyclic_permutations(&self, group: &BaseGroup) -> BTreeSet<ReducedWord> {
        if self.is_empty() {
            return BTreeSet::from([Self::empty()]);
        }
        let n = self.len();
        (0..n)
            .map(|shift| {
                Self::reduce(
                    group,
                    self.letters[shift..]
                        .iter()
                        .chain(&self.letters[..shift])
                        .copied(),
                )
            })
            .collect()
    }

    /// All contiguous subwords, including `∅` and the word itself.
    pub fn subwords(&self) -> BTreeSet<ReducedWord> {
        let n = self.len();
        let mut out = BTreeSet::from([Self::empty()]);
        for i in 0..n {
            for j in i + 1..=n {
                out.insert(Self {
                    letters: self.letters[i..j].to_vec(),
                });
            }
        }
        out
    }

    /// True iff the word has no `X` letter (the identity counts).
    pub fn is_group_word(&self) -> bool {
        !self.letters.iter().any(Letter::is_x)
    }

    /// The element of a group word (at most one letter once reduced).
    pub fn group_element(&self, group: &BaseGroup) -> Option<GroupElement> {
        match self.letters.as_slice() {
            [] => Some(group.identity()),
            [Letter::Group(g)] => Some(*g),
            _ => None,
        }
    }

    pub fn x_count(&self) -> usize {
        self.letters.iter().filter(|l| l.is_x()).count()
    }

    /// Index `j` (1-based, `a_j`) of the leftmost `X`-letter: the critical
    /// occurrence.
    pub fn critical_index(&self) -> Option<usize> {
        let pos = self.letters.iter().position(Letter::is_x)?;
        Some(self.letters.len() - pos)
    }

    /// Index of the rightmost `X`-letter.
    pub fn first_x_index(&self) -> Option<usize> {
        let pos = self.letters.iter().rposition(Letter::is_x)?;
        Some(self.letters.len() - pos)
    }

    /// True when no `X`-letters cancel as `w` is composed with itself, i.e.
    /// the cyclic letter sequence never puts `X` next to `X^-1`.
    pub fn is_cyclically_reduced(&self, group: &BaseGroup) -> bool {
        self.concat(group, self).x_count() == 2 * self.x_count()
    }

    /// A shortest word among repeated cyclic permutations: `w` is conjugate
    /// to it.
    pub fn cyclic_core(&self, group: &BaseGroup) -> ReducedWord {
        let mut core = self.clone();
        loop {
            let shortest = core
                .cyclic_permutations(group)
                .into_iter()
                .min_by_key(ReducedWord::len)
                .expect("at least one rotation");
            if shortest.len() >= core.len() {
                return core;
            }
            core = shortest;
        }
    }

    /// Parses whitespace-separated tokens `X`, `X^-1`, `name`, `name^k`,
    /// written `a_n ... a_1`, and reduces the result.
    pub fn parse(group: &BaseGroup, text: &str) -> Result<Self> {
        let letters = text
            .split_whitespace()
            .map(|token| match token {
                "X" | "X^1" => Ok(Letter::X),
                "X^-1" => Ok(Letter::XInv),
                _ if token.starts_with('X') => Err(Error::WordSyntax {
                    text: text.to_string(),
                    reason: format!("bad token `{token}`"),
                }),
                _ => group
                    .parse_element(token)
                    .map(Letter::Group)
                    .map_err(|_| Error::WordSyntax {
                        text: text.to_string(),
                        reason: format!("unknown letter `{token}`"),
                    }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::reduce(group, letters))
    }

    /// Like [`ReducedWord::parse`], but rejects text that is not already the
    /// canonical form of a reduced word.
    pub fn parse_exact(group: &BaseGroup, text: &str) -> Result<Self> {
        let word = Self::parse(group, text)?;
        if word.to_text(group) != text {
            return Err(Error::NotReduced(text.to_string()));
        }
        Ok(word)
    }

    pub fn to_text(&self, group: &BaseGroup) -> String {
        self.letters
            .iter()
            .map(|l| match *l {
                Letter::X => "X".to_string(),
                Letter::XInv => "X^-1".to_string(),
                Letter::Group(g) => group.format_element(g),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Checks the normal-form invariants. Always true for values built
    /// through this module.
    pub fn is_reduced(&self, group: &BaseGroup) -> bool {
        self.letters.windows(2).all(|pair| {
            !matches!(
                (pair[0], pair[1]),
                (Letter::Group(_), Letter::Group(_)) | (Letter::X, Letter::XInv) | (Letter::XInv, Letter::X)
            )
        }) && self.letters.iter().all(|l| match l {
            Letter::Group(g) => group.contains(*g) && !group.is_identity(*g),
            _ => true,
        })
    }
}

/// Reduced non-group words obtained from token sequences of length `1..=depth`
/// over `X, X^-1` and the group's alphabet, in order of first appearance
/// (by sequence length, then lexicographically).
pub fn enumerate_words(group: &BaseGroup, depth: usize) -> Vec<ReducedWord> {
    let mut tokens = vec![Letter::X, Letter::XInv];
    tokens.extend(group.alphabet().into_iter().map(Letter::Group));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut sequences: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..depth {
        sequences = sequences
            .iter()
            .flat_map(|seq| {
                tokens.iter().map(move |&t| {
                    let mut next = seq.clone();
                    next.push(t);
                    next
                })
            })
            .collect();
        for seq in &sequences {
            let word = ReducedWord::reduce(group, seq.iter().copied());
            if !word.is_group_word() && seen.insert(word.clone()) {
                out.push(word);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(group: &BaseGroup, text: &str) -> ReducedWord {
        ReducedWord::parse(group, text).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let swap = BaseGroup::swap();
        let tau = Letter::Group(swap.generator().unwrap());
        assert!(ReducedWord::reduce(&swap, [Letter::X, Letter::XInv]).is_empty());
        assert!(ReducedWord::reduce(&swap, [tau, Letter::X, Letter::XInv, tau]).is_empty());
        let word = ReducedWord::reduce(&swap, [Letter::X, tau, Letter::XInv]);
        assert_eq!(word.letters(), &[Letter::X, tau, Letter::XInv]);
    }

    #[test]
    fn invert_examples() {
        let tail = BaseGroup::swap_tail();
        assert_eq!(ReducedWord::empty().invert(&tail), ReducedWord::empty());
        assert_eq!(ReducedWord::x().invert(&tail), ReducedWord::x_inv());
        let conj = w(&tail, "X^-1 gamma X");
        assert_eq!(conj.invert(&tail), conj);
    }

    #[test]
    fn cyclic_reduction() {
        let swap = BaseGroup::swap();
        assert!(w(&swap, "X X").is_cyclically_reduced(&swap));
        assert!(w(&swap, "tau X").is_cyclically_reduced(&swap));
        assert!(w(&swap, "X tau X^-1 tau").is_cyclically_reduced(&swap));
        assert!(!w(&swap, "X^-1 tau X").is_cyclically_reduced(&swap));
        assert_eq!(w(&swap, "X^-1 tau X").cyclic_core(&swap), w(&swap, "tau"));
        assert_eq!(w(&swap, "X tau X tau X^-1").cyclic_core(&swap), ReducedWord::x());
        assert_eq!(w(&swap, "X X").cyclic_core(&swap), w(&swap, "X X"));
    }

    #[test]
    fn cyclic_permutation_examples() {
        let swap = BaseGroup::swap();
        assert_eq!(
            ReducedWord::empty().cyclic_permutations(&swap),
            BTreeSet::from([ReducedWord::empty()])
        );
        let expected = BTreeSet::from([w(&swap, "tau X"), w(&swap, "X tau")]);
        assert_eq!(w(&swap, "tau X").cyclic_permutations(&swap), expected);
        let tail = BaseGroup::swap_tail();
        let expected = BTreeSet::from([w(&tail, "X^-1 gamma X"), w(&tail, "gamma")]);
        assert_eq!(w(&tail, "X^-1 gamma X").cyclic_permutations(&tail), expected);
    }

    #[test]
    fn subword_examples() {
        let tail = BaseGroup::swap_tail();
        assert_eq!(
            ReducedWord::empty().subwords(),
            BTreeSet::from([ReducedWord::empty()])
        );
        assert_eq!(
            ReducedWord::x().subwords(),
            BTreeSet::from([ReducedWord::empty(), ReducedWord::x()])
        );
        let expected: BTreeSet<_> = ["", "X^-1", "gamma", "X", "X^-1 gamma", "gamma X", "X^-1 gamma X"]
            .iter()
            .map(|t| w(&tail, t))
            .collect();
        assert_eq!(w(&tail, "X^-1 gamma X").subwords(), expected);
    }

    #[test]
    fn group_words() {
        let tail = BaseGroup::swap_tail();
        assert!(w(&tail, "gamma").is_group_word());
        assert!(ReducedWord::empty().is_group_word());
        assert!(!w(&tail, "X^-1 gamma X").is_group_word());
    }

    #[test]
    fn text_round_trip() {
        let shift = BaseGroup::shift();
        for text in ["X", "X^-1 zeta^2 X", "zeta^-1 X X", "", "zeta"] {
            assert_eq!(w(&shift, text).to_text(&shift), text);
        }
        assert_eq!(w(&shift, "zeta zeta X").to_text(&shift), "zeta^2 X");
        assert!(ReducedWord::parse(&shift, "X^2").is_err());
        assert!(ReducedWord::parse(&shift, "tau X").is_err());
        assert!(ReducedWord::parse_exact(&shift, "X X^-1 X").is_err());
    }

    #[test]
    fn critical_positions() {
        let swap = BaseGroup::swap();
        let word = w(&swap, "tau X^-1 tau X");
        assert_eq!(word.critical_index(), Some(3));
        assert_eq!(word.first_x_index(), Some(1));
        assert_eq!(word.letter(4), word.letters()[0]);
    }

    #[test]
    fn enumeration_over_swap() {
        let swap = BaseGroup::swap();
        let words = enumerate_words(&swap, 3);
        assert_eq!(words[0], ReducedWord::x());
        assert_eq!(words[1], ReducedWord::x_inv());
        assert!(words.iter().all(|w| w.len() <= 3 && !w.is_group_word()));
        // alphabet {X, X^-1, tau}: all reduced non-group words of length <= 3
        let brute: BTreeSet<_> = (1..=3)
            .flat_map(|len| all_sequences(&swap, len))
            .filter(|seq| {
                let word = ReducedWord::reduce(&swap, seq.iter().copied());
                word.len() == seq.len() && !word.is_group_word()
            })
            .map(|seq| ReducedWord::reduce(&swap, seq))
            .collect();
        assert_eq!(words.iter().cloned().collect::<BTreeSet<_>>(), brute);
        assert_eq!(words.len(), 2 + 6 + 12);
    }

    fn all_sequences(group: &BaseGroup, len: usize) -> Vec<Vec<Letter>> {
        let mut tokens = vec![Letter::X, Letter::XInv];
        tokens.extend(group.alphabet().into_iter().map(Letter::Group));
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|s: Vec<Letter>| {
                    tokens.iter().map(move |&t| {
                        let mut s = s.clone();
                        s.push(t);
                        s
                    })
                })
                .collect();
        }
        out
    }
}
