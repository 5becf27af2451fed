//! Constructive extensions of conditions: one new pair at a time, always the
//! least admissible value.
//!
//! A value `c` is admissible for a new pair when it avoids the finite set
//!
//! ```text
//! ⋃ { fix(u[s]) : u ∈ F* ∖ {∅} }  ∪  ⋃ { g·u^i[s][E] : g ∈ F* ∩ G, u ∈ F*, i = ±1 }
//! ```
//!
//! where `F*` collects the subwords of cyclic permutations of the words in
//! `F` (plus any tracked words) and `E` holds `dom(s)`, `ran(s)`, the point
//! being extended, the coding parameters and any tracked path starts. When the
//! new pair completes one more application of a coded word, the value reached
//! must also have the parity of the next bit of `z`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::group::{BaseGroup, GroupElement, Permutation};
use crate::partial::{apply_letter, apply_word, fixed_points, mpath, PathStatus};
use crate::words::{Letter, ReducedWord};

/// How far above the least unused natural a value is searched for.
pub const SCAN_LIMIT: u64 = 1 << 20;
/// Default probe window for [`hit`].
pub const HIT_PROBE: u64 = 10_000;
const DISTINGUISH_STEPS: usize = 10_000;

static GUARD_REJECTIONS: AtomicUsize = AtomicUsize::new(0);

/// Candidates that avoided the forbidden set but failed the validity or
/// order re-check done before a result is returned. Any nonzero value means
/// the closure above misses a case.
pub fn guard_rejections() -> usize {
    GUARD_REJECTIONS.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Add `(n, c)`.
    Domain,
    /// Add `(c, n)`.
    Range,
}

/// Extra words and path starts to protect, beyond those of the condition.
#[derive(Clone, Debug, Default)]
pub struct Tracking {
    pub words: Vec<ReducedWord>,
    pub starts: Vec<u64>,
}

impl Tracking {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn path(word: ReducedWord, start: u64) -> Self {
        Self {
            words: vec![word],
            starts: vec![start],
        }
    }
}

/// Why a value is forbidden.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    /// Fixed by `word[s]`.
    FixedPoint { word: String },
    /// Equals `via · word^exponent[s](from)` with `from ∈ E`.
    Closure {
        via: String,
        word: String,
        exponent: i8,
        from: u64,
    },
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::FixedPoint { word } => write!(f, "fixed point of {word}"),
            Reason::Closure {
                via,
                word,
                exponent,
                from,
            } => {
                let word = if word.is_empty() { "1" } else { word };
                write!(f, "{via} · ({word})^{exponent} of {from} ∈ E")
            }
        }
    }
}

/// `via(c)` must have parity `bit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityRule {
    pub word: String,
    pub via: GroupElement,
    pub bit: u8,
}

impl ParityRule {
    pub fn admits(&self, group: &BaseGroup, c: u64) -> bool {
        group.eval(self.via, c) % 2 == u64::from(self.bit)
    }
}

/// The explicit constraint on the new value at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionConstraint {
    pub forbidden: BTreeSet<u64>,
    pub provenance: BTreeMap<u64, Reason>,
    pub parity: Option<ParityRule>,
}

impl ExtensionConstraint {
    pub fn admits(&self, group: &BaseGroup, c: u64) -> bool {
        !self.forbidden.contains(&c) && self.parity.as_ref().is_none_or(|r| r.admits(group, c))
    }

    pub fn describe(&self, group: &BaseGroup) -> String {
        let mut out = String::new();
        for (c, reason) in &self.provenance {
            out.push_str(&format!("{c}: {reason}\n"));
        }
        if let Some(rule) = &self.parity {
            out.push_str(&format!(
                "parity: {}(n') ≡ {} (coding `{}`)\n",
                group.format_element(rule.via),
                rule.bit,
                rule.word
            ));
        }
        out
    }
}

/// `F*`, its group elements and `E`, prepared once per condition.
struct Closure<'a> {
    p: &'a Condition,
    words: Vec<(ReducedWord, ReducedWord)>,
    elements: Vec<GroupElement>,
    inverses: Vec<GroupElement>,
    points: BTreeSet<u64>,
    point: Option<u64>,
}

impl<'a> Closure<'a> {
    fn new(p: &'a Condition, tracking: &Tracking, point: Option<u64>) -> Self {
        let group = p.group();
        let mut star = BTreeSet::new();
        for w in p.words().iter().chain(&tracking.words) {
            for rotation in w.cyclic_permutations(group) {
                star.extend(rotation.subwords());
            }
        }
        star.insert(ReducedWord::empty());
        let elements: Vec<GroupElement> = star.iter().filter_map(|u| u.group_element(group)).collect();
        let inverses = elements.iter().map(|&g| group.invert(g)).collect();
        let words = star
            .into_iter()
            .filter(|u| !u.is_empty())
            .map(|u| {
                let inv = u.invert(group);
                (u, inv)
            })
            .collect();
        let mut points: BTreeSet<u64> = p.params().values().copied().collect();
        points.extend(&tracking.starts);
        Self {
            p,
            words,
            elements,
            inverses,
            points,
            point,
        }
    }

    fn in_e(&self, v: u64) -> bool {
        let s = self.p.s();
        s.in_domain(v) || s.in_range(v) || self.point == Some(v) || self.points.contains(&v)
    }

    fn closure_reason(&self, g: GroupElement, word: &ReducedWord, exponent: i8, from: u64) -> Reason {
        let group = self.p.group();
        Reason::Closure {
            via: group.format_element(g),
            word: word.to_text(group),
            exponent,
            from,
        }
    }

    /// Same answer as `reason(c).is_some()`, trying the cheap `g(E)` test first.
    fn excludes(&self, c: u64) -> bool {
        let group = self.p.group();
        self.inverses.iter().any(|&h| self.in_e(group.eval(h, c))) || self.reason(c).is_some()
    }

    fn reason(&self, c: u64) -> Option<Reason> {
        let group = self.p.group();
        let s = self.p.s();
        for (u, _) in &self.words {
            if apply_word(group, u, s, c) == Some(c) {
                return Some(Reason::FixedPoint {
                    word: u.to_text(group),
                });
            }
        }
        for (&g, &h) in self.elements.iter().zip(&self.inverses) {
            // c = g(u^i(e)) iff e = u^-i(g^-1(c))
            let d = group.eval(h, c);
            if self.in_e(d) {
                return Some(self.closure_reason(g, &ReducedWord::empty(), 1, d));
            }
            for (u, inv) in &self.words {
                for (word, exponent) in [(inv, 1), (u, -1)] {
                    if let Some(e) = apply_word(group, word, s, d) {
                        if self.in_e(e) {
                            return Some(self.closure_reason(g, u, exponent, e));
                        }
                    }
                }
            }
        }
        None
    }

    /// The whole forbidden set, listed point by point.
    fn enumerate(&self) -> Result<BTreeMap<u64, Reason>> {
        let group = self.p.group();
        let s = self.p.s();
        let mut out = BTreeMap::new();
        for (u, _) in &self.words {
            for m in fixed_points(group, u, s)? {
                out.entry(m).or_insert_with(|| Reason::FixedPoint {
                    word: u.to_text(group),
                });
            }
        }
        let mut e: BTreeSet<u64> = s.domain().chain(s.range()).collect();
        e.extend(&self.points);
        e.extend(self.point);
        for &g in &self.elements {
            for &from in &e {
                out.entry(group.eval(g, from))
                    .or_insert_with(|| self.closure_reason(g, &ReducedWord::empty(), 1, from));
                for (u, inv) in &self.words {
                    for (word, exponent) in [(u, 1), (inv, -1)] {
                        if let Some(v) = apply_word(group, word, s, from) {
                            out.entry(group.eval(g, v))
                                .or_insert_with(|| self.closure_reason(g, u, exponent, from));
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// The parity demanded of the new value when `n` is where a coded word's
/// path waits at its critical letter.
fn parity_rule(p: &Condition, n: u64, mode: Mode) -> Result<Option<ParityRule>> {
    let Some(z) = p.context().stream() else {
        return Ok(None);
    };
    let group = p.group();
    let wanted = match mode {
        Mode::Domain => Letter::X,
        Mode::Range => Letter::XInv,
    };
    for (w, &m) in p.params() {
        let Some(critical) = w.critical_index() else {
            continue;
        };
        if w.letter(critical) != wanted {
            continue;
        }
        let path = mpath(group, w, p.s(), m)?;
        if path.status != (PathStatus::Terminated { before: critical }) || path.last_value() != n {
            continue;
        }
        let length = p
            .code_length(w)?
            .ok_or_else(|| Error::Precondition(format!("`{}` does not code z", p.text(w))))?;
        let via = match critical < w.len() {
            true => match w.letter(critical + 1) {
                Letter::Group(g) => g,
                _ => unreachable!("the critical letter is the leftmost X-letter"),
            },
            false => group.identity(),
        };
        return Ok(Some(ParityRule {
            word: p.text(w),
            via,
            bit: z.bit(length)?,
        }));
    }
    Ok(None)
}

fn check_point(p: &Condition, n: u64, mode: Mode) -> Result<()> {
    let taken = match mode {
        Mode::Domain => p.s().in_domain(n),
        Mode::Range => p.s().in_range(n),
    };
    if taken {
        let side = if mode == Mode::Domain { "domain" } else { "range" };
        return Err(Error::Precondition(format!("{n} is already in the {side} of s")));
    }
    Ok(())
}

/// The constraint on `c` for a new pair `(n, c)` (domain mode) or `(c, n)`
/// (range mode).
pub fn forbidden_set(p: &Condition, n: u64, tracking: &Tracking, mode: Mode) -> Result<ExtensionConstraint> {
    check_point(p, n, mode)?;
    let provenance = Closure::new(p, tracking, Some(n)).enumerate()?;
    Ok(ExtensionConstraint {
        forbidden: provenance.keys().copied().collect(),
        provenance,
        parity: parity_rule(p, n, mode)?,
    })
}

fn guarded(p: &Condition, q: Condition, pair: Option<(u64, u64)>) -> Option<Condition> {
    let sound = q.check().is_empty()
        && pair.is_none_or(|(n, v)| {
            q.fixed_point_violations_since(p.words(), &BTreeMap::from([(n, v)]))
                .is_empty()
        });
    if sound {
        Some(q)
    } else {
        GUARD_REJECTIONS.fetch_add(1, Ordering::Relaxed);
        None
    }
}

fn scan(
    p: &Condition,
    closure: &Closure<'_>,
    parity: Option<&ParityRule>,
    avoid: Option<u64>,
    mut build: impl FnMut(u64) -> Result<Option<Condition>>,
) -> Result<(Condition, u64)> {
    let group = p.group();
    // dom(s) ∪ ran(s) ⊆ E, so only unused points can be admissible
    let end = p.s().least_unused().saturating_add(SCAN_LIMIT);
    for c in p.s().unused_from(0).take_while(|&c| c < end) {
        if avoid == Some(c) || parity.is_some_and(|r| !r.admits(group, c)) || closure.excludes(c) {
            continue;
        }
        if let Some(q) = build(c)? {
            return Ok((q, c));
        }
    }
    Err(Error::NoAdmissibleValue(end))
}

fn extend_avoiding(
    p: &Condition,
    n: u64,
    mode: Mode,
    tracking: &Tracking,
    avoid: Option<u64>,
) -> Result<(Condition, u64)> {
    check_point(p, n, mode)?;
    let closure = Closure::new(p, tracking, Some(n));
    let parity = parity_rule(p, n, mode)?;
    scan(p, &closure, parity.as_ref(), avoid, |c| {
        let pair = match mode {
            Mode::Domain => (n, c),
            Mode::Range => (c, n),
        };
        let mut q = p.clone();
        q.s_mut().insert(pair.0, pair.1)?;
        Ok(guarded(p, q, Some(pair)))
    })
}

/// Adds one pair at `n` with the least admissible value, protecting the
/// tracked words and starts as well. Returns the new condition and the value.
pub fn extend(p: &Condition, n: u64, mode: Mode, tracking: &Tracking) -> Result<(Condition, u64)> {
    extend_avoiding(p, n, mode, tracking, None)
}

/// `s ∪ {(n, n')}` for the least admissible `n'`.
pub fn domain_extend(p: &Condition, n: u64) -> Result<Condition> {
    Ok(extend(p, n, Mode::Domain, &Tracking::none())?.0)
}

/// `s ∪ {(n', n)}` for the least admissible `n'`.
pub fn range_extend(p: &Condition, n: u64) -> Result<Condition> {
    Ok(extend(p, n, Mode::Range, &Tracking::none())?.0)
}

pub fn add_word(p: &Condition, w: &ReducedWord) -> Result<Condition> {
    if w.is_group_word() {
        return Err(Error::GroupWord(p.text(w)));
    }
    let mut q = p.clone();
    q.words_mut().insert(w.clone());
    Ok(q)
}

/// False for words conjugate to an element `g` of the base group.
///
/// The orbits of `w[s] = u[s]^-1 g u[s]` follow the orbits of `g`, which no
/// extension can steer: for finite-order `g` they are finite, and otherwise
/// they can run into points already claimed by other coded paths.
pub fn codable(group: &BaseGroup, w: &ReducedWord) -> bool {
    !w.cyclic_core(group).is_group_word()
}

/// Puts `w` into `F` and gives it the least admissible parameter of parity
/// `z(0)` whose path stops before the rightmost `X`-letter of `w`.
pub fn start_coding(p: &Condition, w: &ReducedWord) -> Result<Condition> {
    if w.is_group_word() {
        return Err(Error::GroupWord(p.text(w)));
    }
    if p.params().contains_key(w) {
        return Err(Error::Precondition(format!(
            "`{}` already has a parameter",
            p.text(w)
        )));
    }
    if !codable(p.group(), w) {
        return Err(Error::Precondition(format!(
            "`{}` is conjugate to a group element, so its orbits are not generic",
            p.text(w)
        )));
    }
    let z = p
        .context()
        .stream()
        .ok_or_else(|| Error::Precondition("coding needs a stream".into()))?;
    let group = p.group();
    let parity = ParityRule {
        word: p.text(w),
        via: group.identity(),
        bit: z.bit(0)?,
    };
    let rightmost = w.first_x_index().expect("not a group word");
    let tracking = Tracking {
        words: vec![w.clone()],
        starts: Vec::new(),
    };
    let closure = Closure::new(p, &tracking, None);
    let (q, _) = scan(p, &closure, Some(&parity), None, |c| {
        let path = mpath(group, w, p.s(), c)?;
        if path.status != (PathStatus::Terminated { before: rightmost }) {
            return Ok(None);
        }
        let mut q = p.clone();
        q.words_mut().insert(w.clone());
        q.params_mut().insert(w.clone(), c);
        Ok(guarded(p, q, None))
    })?;
    Ok(q)
}

/// One extension along the coding path of `w` (or [`start_coding`] when `w`
/// has no parameter yet).
pub fn coding_step(p: &Condition, w: &ReducedWord) -> Result<Condition> {
    let Some(m) = p.parameter(w) else {
        return start_coding(p, w);
    };
    let path = mpath(p.group(), w, p.s(), m)?;
    let PathStatus::Terminated { before } = path.status else {
        return Err(Error::Precondition(format!(
            "the coding path of `{}` is periodic",
            p.text(w)
        )));
    };
    let mode = match w.letter(before) {
        Letter::X => Mode::Domain,
        Letter::XInv => Mode::Range,
        Letter::Group(_) => unreachable!("group letters are total"),
    };
    Ok(extend(p, path.last_value(), mode, &Tracking::none())?.0)
}

/// Extends until `w` exactly codes at least `l` bits of `z`.
pub fn extend_coding(p: &Condition, w: &ReducedWord, l: usize) -> Result<Condition> {
    let mut q = match p.parameter(w) {
        Some(_) => p.clone(),
        None => start_coding(p, w)?,
    };
    loop {
        match q.code_length(w)? {
            Some(length) if length >= l => return Ok(q),
            Some(_) => q = coding_step(&q, w)?,
            None => {
                return Err(Error::Precondition(format!(
                    "`{}` does not code z in the input",
                    q.text(w)
                )))
            }
        }
    }
}

/// Agreement with `target` at the least usable `n >= k`, probing
/// `[k, k + 10^4)`.
pub fn hit(p: &Condition, target: &Permutation, k: u64) -> Result<(Condition, u64)> {
    hit_within(p, target, k, HIT_PROBE)
}

pub fn hit_within(p: &Condition, target: &Permutation, k: u64, probe: u64) -> Result<(Condition, u64)> {
    let end = k.saturating_add(probe);
    if target.group_name() == Some(p.group().name()) {
        return Err(Error::Precondition(format!(
            "`{}` belongs to the base group and cannot be hit",
            target.name()
        )));
    }
    if let Some((a, b, value)) = target.collision(k, end) {
        return Err(Error::TargetNotInjective {
            name: target.name().to_string(),
            a,
            b,
            value,
        });
    }
    let group = p.group();
    let s = p.s();
    let mut closure = Closure::new(p, &Tracking::none(), None);
    for n in k..end {
        if s.in_domain(n) {
            continue;
        }
        let Some(c) = target.eval(n) else { continue };
        if s.in_range(c) {
            continue;
        }
        closure.point = Some(n);
        if closure.excludes(c) {
            continue;
        }
        if let Some(rule) = parity_rule(p, n, Mode::Domain)? {
            if !rule.admits(group, c) {
                continue;
            }
        }
        let mut q = p.clone();
        q.s_mut().insert(n, c)?;
        if let Some(q) = guarded(p, q, Some((n, c))) {
            return Ok((q, n));
        }
    }
    Err(Error::HitExhausted {
        target: target.name().to_string(),
        from: k,
        to: end,
    })
}

#[derive(Clone, Debug)]
pub enum DistinguishStep {
    /// One more pair along the path of `start`.
    Extended { condition: Condition, start: u64 },
    /// `w[s](n) = value ≠ g(n)`.
    Witnessed { n: u64, value: u64 },
}

/// `w = h v` with `h` the leading group letter (or `1`).
fn split_leading(group: &BaseGroup, w: &ReducedWord) -> (GroupElement, ReducedWord) {
    match w.letters().first() {
        Some(Letter::Group(h)) => (*h, ReducedWord::reduce(group, w.letters()[1..].iter().copied())),
        _ => (group.identity(), w.clone()),
    }
}

/// One step towards a point where `w[s]` is defined and differs from `g`.
///
/// `start` is the point being steered, from a previous step. A fresh point is
/// the least `n` with `w[s](n)` undefined; its path is pushed forward one
/// pair at a time, and the last pair avoids the value that would make
/// `w[s](n) = g(n)`.
pub fn distinguish_step(
    p: &Condition,
    w: &ReducedWord,
    g: GroupElement,
    start: Option<u64>,
) -> Result<DistinguishStep> {
    let group = p.group();
    if w.is_group_word() {
        return Err(Error::GroupWord(p.text(w)));
    }
    if !group.contains(g) {
        return Err(Error::MixedGroups);
    }
    let s = p.s();
    let start = start.and_then(|n| match apply_word(group, w, s, n) {
        Some(value) if value != group.eval(g, n) => Some(Err(DistinguishStep::Witnessed { n, value })),
        Some(_) => None,
        None => Some(Ok(n)),
    });
    let n = match start {
        Some(Err(done)) => return Ok(done),
        Some(Ok(n)) => n,
        None => (0..)
            .find(|&n| apply_word(group, w, s, n).is_none())
            .expect("s is finite"),
    };
    let (h, v) = split_leading(group, w);
    let letters: Vec<Letter> = v.applied().copied().collect();
    let mut current = n;
    for (j, &letter) in letters.iter().enumerate() {
        if let Some(next) = apply_letter(group, s, letter, current) {
            current = next;
            continue;
        }
        let mode = match letter {
            Letter::X => Mode::Domain,
            Letter::XInv => Mode::Range,
            Letter::Group(_) => unreachable!("group letters are total"),
        };
        let avoid = (j + 1 == letters.len()).then(|| group.eval(group.invert(h), group.eval(g, n)));
        let tracking = Tracking::path(w.clone(), n);
        let (q, _) = extend_avoiding(p, current, mode, &tracking, avoid)?;
        return Ok(DistinguishStep::Extended {
            condition: q,
            start: n,
        });
    }
    unreachable!("w[s](n) is undefined")
}

/// Finds `q ≤ p` and `n` with `w[s^q](n)` defined and different from `g(n)`.
pub fn distinguish(p: &Condition, w: &ReducedWord, g: GroupElement) -> Result<(Condition, u64)> {
    let mut q = p.clone();
    let mut start = None;
    for _ in 0..DISTINGUISH_STEPS {
        match distinguish_step(&q, w, g, start)? {
            DistinguishStep::Witnessed { n, .. } => return Ok((q, n)),
            DistinguishStep::Extended { condition, start: n } => {
                q = condition;
                start = Some(n);
            }
        }
    }
    Err(Error::Precondition(format!(
        "no witness for `{}` after {DISTINGUISH_STEPS} steps",
        p.text(w)
    )))
}
