//! Base groups: countable cofinitary groups given by an evaluation oracle.
//!
//! Every built-in group is cyclic, so an element's normal form is an exponent
//! of the single generator, reduced modulo the generator's order. The groups
//! are
//!
//! * `trivial`: only the identity,
//! * `swap`: generated by `tau`, which swaps `2k <-> 2k+1` for every `k`,
//! * `swap-tail`: generated by `gamma`, which fixes `0` and `1` and swaps
//!   `2k <-> 2k+1` for `k >= 1`,
//! * `shift`: generated by `zeta`, the successor map on the integers pulled
//!   back to the naturals along `2k -> k`, `2k+1 -> -k-1`.
//!
//! A group can also be read from a permutation table (`table:<path>`). The
//! table must permute `[0, M)` for an even `M`; beyond `M` the generator swaps
//! `2k <-> 2k+1`. Cofinitariness of such a group is only window-checked.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path as FsPath;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::partial::parse_pairs;

/// Normal form of an element of a [`BaseGroup`]: an exponent of the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    group: u64,
    exp: i64,
}

impl GroupElement {
    pub fn exponent(&self) -> i64 {
        self.exp
    }
}

#[derive(Debug)]
enum Action {
    Swap,
    SwapTail,
    Shift,
    Table(CycleTable),
}

/// A permutation of `[0, size)` stored by its cycles.
#[derive(Debug)]
struct CycleTable {
    size: u64,
    position: Vec<(usize, usize)>,
    cycles: Vec<Vec<u64>>,
}

impl CycleTable {
    fn new(image: &[u64]) -> Result<Self> {
        let size = image.len() as u64;
        if size == 0 || !size.is_multiple_of(2) {
            return Err(Error::BadTable(format!(
                "table must cover [0, M) for a positive even M, got M = {size}"
            )));
        }
        let mut seen = vec![false; image.len()];
        for (n, &v) in image.iter().enumerate() {
            if v >= size {
                return Err(Error::BadTable(format!("{n} maps outside the table to {v}")));
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::BadTable(format!("{v} is hit twice")));
            }
        }
        let mut position = vec![(usize::MAX, 0); image.len()];
        let mut cycles = Vec::new();
        for start in 0..image.len() {
            if position[start].0 != usize::MAX {
                continue;
            }
            let id = cycles.len();
            let mut cycle = Vec::new();
            let mut n = start;
            while position[n].0 == usize::MAX {
                position[n] = (id, cycle.len());
                cycle.push(n as u64);
                n = image[n] as usize;
            }
            cycles.push(cycle);
        }
        Ok(Self {
            size,
            position,
            cycles,
        })
    }

    fn order(&self) -> i64 {
        self.cycles
            .iter()
            .map(|c| c.len() as i64)
            .fold(2, |acc, len| acc / gcd(acc, len) * len)
    }

    fn eval(&self, exp: i64, n: u64) -> u64 {
        if n >= self.size {
            return if exp % 2 != 0 { n ^ 1 } else { n };
        }
        let (cycle, pos) = self.position[n as usize];
        let cycle = &self.cycles[cycle];
        let len = cycle.len() as i64;
        cycle[(pos as i64 + exp).rem_euclid(len) as usize]
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug)]
struct Generator {
    name: String,
    order: Option<i64>,
    action: Action,
}

#[derive(Debug)]
struct Inner {
    name: String,
    id: u64,
    generator: Option<Generator>,
}

/// A cyclic base group acting on the naturals.
///
/// Cloning is cheap; the group data is shared.
#[derive(Clone)]
pub struct BaseGroup {
    inner: Arc<Inner>,
}

impl fmt::Debug for BaseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("BaseGroup").field(&self.inner.name).finish()
    }
}

impl PartialEq for BaseGroup {
    fn eq(&self, other: &Self) -> bool {
        self.inner.name == other.inner.name
    }
}

impl Eq for BaseGroup {}

pub const BUILTIN_GROUPS: [&str; 4] = ["trivial", "swap", "swap-tail", "shift"];

fn group_id(name: &str) -> u64 {
    let mut hasher = DefaultHasher::new();
    name.hash(&mut hasher);
    hasher.finish()
}

impl BaseGroup {
    fn build(name: &str, generator: Option<Generator>) -> Self {
        Self {
            inner: Arc::new(Inner {
                name: name.to_string(),
                id: group_id(name),
                generator,
            }),
        }
    }

    pub fn trivial() -> Self {
        Self::build("trivial", None)
    }

    /// `<tau>`, with `tau(n) = n + 1` for even `n` and `n - 1` for odd `n`.
    pub fn swap() -> Self {
        Self::build(
            "swap",
            Some(Generator {
                name: "tau".into(),
                order: Some(2),
                action: Action::Swap,
            }),
        )
    }

    /// `<gamma>`, where `gamma` fixes `{0, 1}` and swaps `2k <-> 2k+1` for `k >= 1`.
    pub fn swap_tail() -> Self {
        Self::build(
            "swap-tail",
            Some(Generator {
                name: "gamma".into(),
                order: Some(2),
                action: Action::SwapTail,
            }),
        )
    }

    /// `<zeta>`, an infinite cyclic group acting with a single bi-infinite orbit.
    pub fn shift() -> Self {
        Self::build(
            "shift",
            Some(Generator {
                name: "zeta".into(),
                order: None,
                action: Action::Shift,
            }),
        )
    }

    /// The cyclic group generated by the permutation `image` of `[0, M)`,
    /// extended by the swap pattern beyond `M`.
    pub fn from_table(name: &str, generator: &str, image: &[u64]) -> Result<Self> {
        check_identifier(generator)?;
        let table = CycleTable::new(image)?;
        let order = table.order();
        Ok(Self::build(
            name,
            Some(Generator {
                name: generator.to_string(),
                order: Some(order),
                action: Action::Table(table),
            }),
        ))
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "trivial" => Ok(Self::trivial()),
            "swap" => Ok(Self::swap()),
            "swap-tail" => Ok(Self::swap_tail()),
            "shift" => Ok(Self::shift()),
            _ => Err(Error::UnknownGroup(name.to_string())),
        }
    }

    /// Resolves a built-in name or a `table:<path>` spec.
    ///
    /// Table files hold `n n'` lines, `#` comments, and an optional
    /// `generator <name>` line (default name `g`).
    pub fn resolve(spec: &str) -> Result<Self> {
        match spec.strip_prefix("table:") {
            Some(path) => {
                let text = std::fs::read_to_string(FsPath::new(path))?;
                Self::parse_table(spec, &text)
            }
            None => Self::builtin(spec),
        }
    }

    pub fn parse_table(name: &str, text: &str) -> Result<Self> {
        let mut generator = "g".to_string();
        let mut body = String::new();
        for line in text.lines() {
            match line.trim().strip_prefix("generator") {
                Some(rest) if rest.starts_with(char::is_whitespace) => {
                    generator = rest.trim().to_string();
                }
                _ => {
                    body.push_str(line);
                    body.push('\n');
                }
            }
        }
        let pairs: BTreeMap<u64, u64> = parse_pairs(&body)?.into_iter().collect();
        let image: Vec<u64> = pairs.values().copied().collect();
        if pairs.keys().copied().ne(0..image.len() as u64) {
            return Err(Error::BadTable("table domain is not an initial segment".into()));
        }
        Self::from_table(name, &generator, &image)
    }

    /// The spec string this group was resolved from.
    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn generator_name(&self) -> Option<&str> {
        self.inner.generator.as_ref().map(|g| g.name.as_str())
    }

    /// `None` for infinite order.
    pub fn order(&self) -> Option<i64> {
        match &self.inner.generator {
            None => Some(1),
            Some(g) => g.order,
        }
    }

    fn normalize(&self, exp: i64) -> i64 {
        match self.order() {
            Some(k) => exp.rem_euclid(k),
            None => exp,
        }
    }

    pub fn identity(&self) -> GroupElement {
        self.power(0)
    }

    /// `generator^exp`.
    pub fn power(&self, exp: i64) -> GroupElement {
        GroupElement {
            group: self.inner.id,
            exp: self.normalize(exp),
        }
    }

    pub fn generator(&self) -> Option<GroupElement> {
        self.inner.generator.as_ref().map(|_| self.power(1))
    }

    /// Letters used when enumerating words: the generator, then its inverse
    /// when that is a different element.
    pub fn alphabet(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        if let Some(g) = self.generator() {
            out.push(g);
            let inv = self.invert(g);
            if inv != g {
                out.push(inv);
            }
        }
        out
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        g.group == self.inner.id
    }

    pub fn is_identity(&self, g: GroupElement) -> bool {
        g.exp == 0
    }

    /// `g * h`, i.e. apply `h` first.
    pub fn multiply(&self, g: GroupElement, h: GroupElement) -> Result<GroupElement> {
        if !self.contains(g) || !self.contains(h) {
            return Err(Error::MixedGroups);
        }
        Ok(self.power(g.exp + h.exp))
    }

    pub(crate) fn product(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        debug_assert!(self.contains(g) && self.contains(h));
        self.power(g.exp + h.exp)
    }

    pub fn invert(&self, g: GroupElement) -> GroupElement {
        self.power(-g.exp)
    }

    pub fn eval(&self, g: GroupElement, n: u64) -> u64 {
        let Some(generator) = &self.inner.generator else {
            return n;
        };
        let exp = g.exp;
        if exp == 0 {
            return n;
        }
        match &generator.action {
            Action::Swap => {
                if exp % 2 != 0 {
                    n ^ 1
                } else {
                    n
                }
            }
            Action::SwapTail => {
                if exp % 2 != 0 && n >= 2 {
                    n ^ 1
                } else {
                    n
                }
            }
            Action::Shift => shift_unfold(shift_fold(n) + exp),
            Action::Table(table) => table.eval(exp, n),
        }
    }

    /// The complete fixed-point set of a non-identity element.
    pub fn fix_set(&self, g: GroupElement) -> Result<BTreeSet<u64>> {
        if !self.contains(g) {
            return Err(Error::MixedGroups);
        }
        if self.is_identity(g) {
            return Err(Error::IdentityFixSet);
        }
        let generator = self.inner.generator.as_ref().expect("non-identity element");
        match &generator.action {
            Action::Swap | Action::Shift => Ok(BTreeSet::new()),
            Action::SwapTail => Ok([0, 1].into()),
            Action::Table(table) => {
                if g.exp % 2 == 0 {
                    return Err(Error::NotCofinitary(format!(
                        "{} fixes every point beyond {}",
                        self.format_element(g),
                        table.size
                    )));
                }
                Ok((0..table.size).filter(|&n| table.eval(g.exp, n) == n).collect())
            }
        }
    }

    /// Window check of the cofinitary contract: bijectivity on `[0, window)`
    /// and agreement of `fix_set` with the fixed points seen there.
    pub fn check_contract(&self, window: u64) -> Vec<String> {
        let exps: Vec<i64> = match self.order() {
            Some(k) => (1..k).collect(),
            None => (1..=8).flat_map(|e| [e, -e]).collect(),
        };
        let mut problems = Vec::new();
        for exp in exps {
            let g = self.power(exp);
            let inv = self.invert(g);
            let label = self.format_element(g);
            if let Some(n) = (0..window)
                .find(|&n| self.eval(inv, self.eval(g, n)) != n || self.eval(g, self.eval(inv, n)) != n)
            {
                problems.push(format!("{label} is not invertible at {n}"));
            }
            match self.fix_set(g) {
                Err(e) => problems.push(e.to_string()),
                Ok(fix) => {
                    let seen: BTreeSet<u64> = (0..window).filter(|&n| self.eval(g, n) == n).collect();
                    let declared: BTreeSet<u64> = fix.iter().copied().filter(|&n| n < window).collect();
                    if seen != declared {
                        problems.push(format!(
                            "{label}: fixed points on the window {seen:?} differ from fix set {declared:?}"
                        ));
                    }
                }
            }
        }
        problems
    }

    /// Text form of a non-identity element: `name`, `name^k`.
    pub fn format_element(&self, g: GroupElement) -> String {
        let name = self.generator_name().unwrap_or("1");
        match g.exp {
            0 => "1".to_string(),
            1 => name.to_string(),
            e => format!("{name}^{e}"),
        }
    }

    /// Parses `name`, `name^k` or `1`.
    pub fn parse_element(&self, token: &str) -> Result<GroupElement> {
        let bad = |reason: &str| Error::WordSyntax {
            text: token.to_string(),
            reason: reason.to_string(),
        };
        if token == "1" {
            return Ok(self.identity());
        }
        let (name, exp) = match token.split_once('^') {
            Some((name, exp)) => (name, exp.parse::<i64>().map_err(|_| bad("bad exponent"))?),
            None => (token, 1),
        };
        match self.generator_name() {
            Some(gen) if gen == name => Ok(self.power(exp)),
            _ => Err(bad(&format!("no generator `{name}` in group `{}`", self.name()))),
        }
    }
}

fn check_identifier(name: &str) -> Result<()> {
    let ok = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && name
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && name != "x";
    if ok {
        Ok(())
    } else {
        Err(Error::BadTable(format!("`{name}` is not a lowercase identifier")))
    }
}

// b(2k) = k, b(2k+1) = -k-1
fn shift_fold(n: u64) -> i64 {
    let k = (n / 2) as i64;
    if n.is_multiple_of(2) {
        k
    } else {
        -k - 1
    }
}

fn shift_unfold(k: i64) -> u64 {
    if k >= 0 {
        2 * k as u64
    } else {
        2 * (-k - 1) as u64 + 1
    }
}

/// A permutation oracle used as a hitting target.
#[derive(Clone, Debug)]
pub struct Permutation {
    name: String,
    kind: PermutationKind,
}

#[derive(Clone, Debug)]
enum PermutationKind {
    Element(BaseGroup, GroupElement),
    Table(BTreeMap<u64, u64>),
}

impl Permutation {
    pub fn from_element(name: &str, group: &BaseGroup, g: GroupElement) -> Self {
        Self {
            name: name.to_string(),
            kind: PermutationKind::Element(group.clone(), g),
        }
    }

    /// A finite table; the permutation is undefined off the table.
    pub fn from_table(name: &str, pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        Self {
            name: name.to_string(),
            kind: PermutationKind::Table(pairs.into_iter().collect()),
        }
    }

    /// `tau`, `gamma`, `zeta` (the built-in generators, optionally `^k`) or
    /// `table:<path>`.
    pub fn resolve(spec: &str) -> Result<Self> {
        if let Some(path) = spec.strip_prefix("table:") {
            let text = std::fs::read_to_string(path)?;
            return Ok(Self::from_table(spec, parse_pairs(&text)?));
        }
        let base = spec.split('^').next().unwrap_or_default();
        let group = match base {
            "tau" => BaseGroup::swap(),
            "gamma" => BaseGroup::swap_tail(),
            "zeta" => BaseGroup::shift(),
            _ => return Err(Error::UnknownPermutation(spec.to_string())),
        };
        let g = group.parse_element(spec)?;
        if group.is_identity(g) {
            return Err(Error::UnknownPermutation(spec.to_string()));
        }
        Ok(Self::from_element(spec, &group, g))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Name of the group the permutation was taken from, if any.
    pub fn group_name(&self) -> Option<&str> {
        match &self.kind {
            PermutationKind::Element(group, _) => Some(group.name()),
            PermutationKind::Table(_) => None,
        }
    }

    pub fn eval(&self, n: u64) -> Option<u64> {
        match &self.kind {
            PermutationKind::Element(group, g) => Some(group.eval(*g, n)),
            PermutationKind::Table(map) => map.get(&n).copied(),
        }
    }

    /// Two points of `[from, to)` with the same image, if any. Group
    /// elements are bijections, so only tables are scanned.
    pub fn collision(&self, from: u64, to: u64) -> Option<(u64, u64, u64)> {
        let PermutationKind::Table(map) = &self.kind else {
            return None;
        };
        let mut seen = std::collections::HashMap::new();
        for (&n, &v) in map.range(from..to) {
            if let Some(a) = seen.insert(v, n) {
                return Some((a, n, v));
            }
        }
        None
    }
}
