//! Conditions `(s, F, m̄)` of the coding poset, their validity, the extension
//! order and the fixed-point bound.
//!
//! The plain poset (pairs `(s, F)`) is the same structure with no stream in
//! the [`Context`] and `m̄` empty.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coding::{exact_code_length, BitStream};
use crate::error::{Error, Result};
use crate::group::BaseGroup;
use crate::partial::{
    apply_word, fixed_points, fixed_points_through, mpath, Injection, PartialInjection, Without,
};
use crate::words::ReducedWord;

/// The base group and, for the coding poset, the stream being coded.
#[derive(Clone, Debug)]
pub struct Context {
    group: BaseGroup,
    stream: Option<Arc<BitStream>>,
}

impl Context {
    pub fn plain(group: BaseGroup) -> Self {
        Self { group, stream: None }
    }

    pub fn coding(group: BaseGroup, stream: BitStream) -> Self {
        Self {
            group,
            stream: Some(Arc::new(stream)),
        }
    }

    /// Resolves a group spec and an optional stream spec.
    pub fn resolve(group: &str, stream: Option<&str>) -> Result<Self> {
        let group = BaseGroup::resolve(group)?;
        Ok(match stream {
            Some(spec) => Self::coding(group, BitStream::resolve(spec)?),
            None => Self::plain(group),
        })
    }

    pub fn group(&self) -> &BaseGroup {
        &self.group
    }

    pub fn stream(&self) -> Option<&BitStream> {
        self.stream.as_deref()
    }

    pub fn is_coding(&self) -> bool {
        self.stream.is_some()
    }

    pub fn label(&self) -> String {
        format!(
            "{}/{}",
            self.group.name(),
            self.stream().map_or("plain", |z| z.name())
        )
    }

    pub fn same_as(&self, other: &Context) -> bool {
        self.group == other.group && self.stream().map(BitStream::name) == other.stream().map(BitStream::name)
    }
}

/// A finite condition `(s, F, m̄)`.
#[derive(Clone, Debug)]
pub struct Condition {
    ctx: Context,
    s: PartialInjection,
    words: BTreeSet<ReducedWord>,
    params: BTreeMap<ReducedWord, u64>,
}

impl PartialEq for Condition {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_as(&other.ctx)
            && self.s == other.s
            && self.words == other.words
            && self.params == other.params
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionViolation {
    /// `F` holds a word without `X` letters.
    GroupWordInF { word: String },
    /// `m̄` assigns a parameter to a word outside `F`.
    ParameterOutsideF { word: String },
    /// The plain poset carries no parameters.
    ParameterWithoutStream { word: String },
    /// `w[s]` does not exactly code a prefix of `z` with the parameter.
    NotCoding { word: String, parameter: u64 },
    /// Paths of two coded words share a value.
    PathsMeet {
        first: String,
        second: String,
        point: u64,
    },
}

impl fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GroupWordInF { word } => write!(f, "group word `{word}` in F"),
            Self::ParameterOutsideF { word } => write!(f, "parameter for `{word}`, which is not in F"),
            Self::ParameterWithoutStream { word } => {
                write!(f, "parameter for `{word}` in a condition without a stream")
            }
            Self::NotCoding { word, parameter } => {
                write!(f, "`{word}` does not exactly code a prefix of z from {parameter}")
            }
            Self::PathsMeet { first, second, point } => {
                write!(f, "coding paths of `{first}` and `{second}` share {point}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderViolation {
    NotSupersetS { n: u64, value: u64 },
    NotSupersetF { word: String },
    NotSupersetParams { word: String },
    NewFixedPointUnwitnessed { word: String, point: u64 },
}

impl fmt::Display for OrderViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSupersetS { n, value } => write!(f, "NotSuperset-s({n} -> {value})"),
            Self::NotSupersetF { word } => write!(f, "NotSuperset-F({word})"),
            Self::NotSupersetParams { word } => write!(f, "NotSuperset-m({word})"),
            Self::NewFixedPointUnwitnessed { word, point } => {
                write!(f, "NewFixedPointUnwitnessed({word}, {point})")
            }
        }
    }
}

/// JSON shape of a condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub group: String,
    pub z: Option<String>,
    pub s: Vec<[u64; 2]>,
    #[serde(rename = "F")]
    pub words: Vec<String>,
    pub m: BTreeMap<String, u64>,
}

impl Condition {
    pub fn empty(ctx: Context) -> Self {
        Self {
            ctx,
            s: PartialInjection::new(),
            words: BTreeSet::new(),
            params: BTreeMap::new(),
        }
    }

    /// Assembles a condition without validating it; see [`Condition::check`].
    pub fn from_parts(
        ctx: Context,
        s: PartialInjection,
        words: impl IntoIterator<Item = ReducedWord>,
        params: impl IntoIterator<Item = (ReducedWord, u64)>,
    ) -> Self {
        Self {
            ctx,
            s,
            words: words.into_iter().collect(),
            params: params.into_iter().collect(),
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn group(&self) -> &BaseGroup {
        &self.ctx.group
    }

    pub fn s(&self) -> &PartialInjection {
        &self.s
    }

    pub fn words(&self) -> &BTreeSet<ReducedWord> {
        &self.words
    }

    pub fn params(&self) -> &BTreeMap<ReducedWord, u64> {
        &self.params
    }

    pub fn parameter(&self, w: &ReducedWord) -> Option<u64> {
        self.params.get(w).copied()
    }

    pub(crate) fn s_mut(&mut self) -> &mut PartialInjection {
        &mut self.s
    }

    pub(crate) fn words_mut(&mut self) -> &mut BTreeSet<ReducedWord> {
        &mut self.words
    }

    pub(crate) fn params_mut(&mut self) -> &mut BTreeMap<ReducedWord, u64> {
        &mut self.params
    }

    pub fn text(&self, w: &ReducedWord) -> String {
        w.to_text(self.group())
    }

    /// Current exact coding length of a coded word.
    pub fn code_length(&self, w: &ReducedWord) -> Result<Option<usize>> {
        match (self.parameter(w), self.ctx.stream()) {
            (Some(m), Some(z)) => exact_code_length(self.group(), w, &self.s, m, z),
            _ => Ok(None),
        }
    }

    /// Validity: group words stay out of `F`, `dom(m̄) ⊆ F`, every parameter
    /// exactly codes a prefix of `z`, and coding paths are pairwise disjoint.
    pub fn check(&self) -> Vec<ConditionViolation> {
        let group = self.group();
        let mut out = Vec::new();
        for w in &self.words {
            if w.is_group_word() {
                out.push(ConditionViolation::GroupWordInF { word: self.text(w) });
            }
        }
        for (w, &m) in &self.params {
            if !self.words.contains(w) {
                out.push(ConditionViolation::ParameterOutsideF { word: self.text(w) });
            }
            let Some(z) = self.ctx.stream() else {
                out.push(ConditionViolation::ParameterWithoutStream { word: self.text(w) });
                continue;
            };
            let coding =
                !w.is_group_word() && matches!(exact_code_length(group, w, &self.s, m, z), Ok(Some(_)));
            if !coding {
                out.push(ConditionViolation::NotCoding {
                    word: self.text(w),
                    parameter: m,
                });
            }
        }
        let mut owner: HashMap<u64, &ReducedWord> = HashMap::new();
        for (w, &m) in &self.params {
            if w.is_group_word() {
                continue;
            }
            let Ok(path) = mpath(group, w, &self.s, m) else {
                continue;
            };
            for v in path.value_set() {
                if let Some(other) = owner.insert(v, w) {
                    if other != w {
                        out.push(ConditionViolation::PathsMeet {
                            first: self.text(other),
                            second: self.text(w),
                            point: v,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.check().is_empty()
    }

    fn ensure_same_context(&self, other: &Condition) -> Result<()> {
        if self.ctx.same_as(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.ctx.label(), other.ctx.label()))
        }
    }

    /// Why `self ≤ p` fails; empty when it holds.
    pub fn order_violations(&self, p: &Condition) -> Result<Vec<OrderViolation>> {
        self.ensure_same_context(p)?;
        let mut out: Vec<OrderViolation> =
            p.s.pairs()
                .filter(|&(n, v)| self.s.get(n) != Some(v))
                .map(|(n, value)| OrderViolation::NotSupersetS { n, value })
                .collect();
        out.extend(
            p.words
                .difference(&self.words)
                .map(|w| OrderViolation::NotSupersetF { word: p.text(w) }),
        );
        out.extend(
            p.params
                .iter()
                .filter(|(w, m)| self.params.get(*w) != Some(*m))
                .map(|(w, _)| OrderViolation::NotSupersetParams { word: p.text(w) }),
        );
        if out.is_empty() {
            let added = self.s.difference(&p.s);
            out.extend(unwitnessed_fixed_points(
                self.group(),
                &p.words,
                &self.s,
                &p.s,
                &added,
            ));
        }
        Ok(out)
    }

    pub fn leq(&self, p: &Condition) -> Result<bool> {
        Ok(self.order_violations(p)?.is_empty())
    }

    /// Fixed-point part of `self ≤ p` where `p` is `self` minus the pairs in
    /// `added`, with word set `p_words`. Used when replaying chains without
    /// keeping every intermediate condition.
    pub fn fixed_point_violations_since(
        &self,
        p_words: &BTreeSet<ReducedWord>,
        added: &BTreeMap<u64, u64>,
    ) -> Vec<OrderViolation> {
        let view = Without {
            base: &self.s,
            removed: added,
        };
        let pairs: Vec<(u64, u64)> = added.iter().map(|(&n, &v)| (n, v)).collect();
        unwitnessed_fixed_points(self.group(), p_words, &self.s, &view, &pairs)
    }

    /// Number of triples `(l, u, m)` with `l < |w|`, `u` a non-empty subword
    /// of `w` and `m ∈ fix(u[s])`. No extension of `self` gives `w` more new
    /// fixed points than this.
    pub fn fixed_point_bound(&self, w: &ReducedWord) -> Result<usize> {
        if !self.words.contains(w) {
            return Err(Error::Precondition(format!("`{}` is not in F", self.text(w))));
        }
        let mut per_level = 0;
        for u in w.subwords() {
            if !u.is_empty() {
                per_level += fixed_points(self.group(), &u, &self.s)?.len();
            }
        }
        Ok(w.len() * per_level)
    }

    pub fn to_record(&self) -> ConditionRecord {
        let mut words: Vec<String> = self.words.iter().map(|w| self.text(w)).collect();
        words.sort();
        ConditionRecord {
            group: self.group().name().to_string(),
            z: self.ctx.stream().map(|z| z.name().to_string()),
            s: self.s.pairs().map(|(n, v)| [n, v]).collect(),
            words,
            m: self.params.iter().map(|(w, &m)| (self.text(w), m)).collect(),
        }
    }

    /// Rebuilds a condition in `ctx`, which must match the record's names.
    pub fn from_record_in(ctx: &Context, record: &ConditionRecord) -> Result<Self> {
        let names_match =
            record.group == ctx.group().name() && record.z.as_deref() == ctx.stream().map(BitStream::name);
        if !names_match {
            let theirs = format!("{}/{}", record.group, record.z.as_deref().unwrap_or("plain"));
            return Err(Error::ContextMismatch(ctx.label(), theirs));
        }
        let group = ctx.group();
        let s = PartialInjection::from_pairs(record.s.iter().map(|&[n, v]| (n, v)))?;
        let words = record
            .words
            .iter()
            .map(|t| ReducedWord::parse_exact(group, t))
            .collect::<Result<BTreeSet<_>>>()?;
        let params = record
            .m
            .iter()
            .map(|(t, &m)| Ok((ReducedWord::parse_exact(group, t)?, m)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self {
            ctx: ctx.clone(),
            s,
            words,
            params,
        })
    }

    pub fn from_record(record: &ConditionRecord) -> Result<Self> {
        let ctx = Context::resolve(&record.group, record.z.as_deref())?;
        Self::from_record_in(&ctx, record)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(text)?)
    }
}

/// New fixed points of words in `words` under `s_new` that go through one of
/// `added`, and that no non-empty subword fixes a point of under `s_old`.
fn unwitnessed_fixed_points<Old: Injection + ?Sized>(
    group: &BaseGroup,
    words: &BTreeSet<ReducedWord>,
    s_new: &PartialInjection,
    s_old: &Old,
    added: &[(u64, u64)],
) -> Vec<OrderViolation> {
    let mut out = Vec::new();
    if added.is_empty() {
        return out;
    }
    for w in words {
        if w.is_group_word() {
            continue;
        }
        let new_points = fixed_points_through(group, w, s_new, added);
        if new_points.is_empty() {
            continue;
        }
        let subwords: Vec<ReducedWord> = w.subwords().into_iter().filter(|u| !u.is_empty()).collect();
        for m in new_points {
            let Ok(path) = mpath(group, w, s_new, m) else {
                continue;
            };
            let witnessed = path
                .value_set()
                .into_iter()
                .any(|v| subwords.iter().any(|u| apply_word(group, u, s_old, v) == Some(v)));
            if !witnessed {
                out.push(OrderViolation::NewFixedPointUnwitnessed {
                    word: w.to_text(group),
                    point: m,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tail_ctx() -> Context {
        Context::coding(BaseGroup::swap_tail(), BitStream::thue_morse())
    }

    fn cond(ctx: &Context, pairs: &[(u64, u64)], words: &[&str], params: &[(&str, u64)]) -> Condition {
        let g = ctx.group();
        Condition::from_parts(
            ctx.clone(),
            PartialInjection::from_pairs(pairs.iter().copied()).unwrap(),
            words.iter().map(|t| ReducedWord::parse(g, t).unwrap()),
            params
                .iter()
                .map(|(t, m)| (ReducedWord::parse(g, t).unwrap(), *m)),
        )
    }

    #[test]
    fn check_examples() {
        let ctx = tail_ctx();
        assert!(cond(&ctx, &[], &[], &[]).is_valid());
        assert_eq!(
            cond(&ctx, &[], &["gamma"], &[]).check(),
            vec![ConditionViolation::GroupWordInF { word: "gamma".into() }]
        );
        let bad_parity = cond(&ctx, &[], &["X"], &[("X", 1)]);
        assert_eq!(
            bad_parity.check(),
            vec![ConditionViolation::NotCoding {
                word: "X".into(),
                parameter: 1
            }]
        );
        assert!(cond(&ctx, &[], &["X"], &[("X", 0)]).is_valid());
        assert_eq!(
            cond(&ctx, &[], &[], &[("X", 0)]).check(),
            vec![ConditionViolation::ParameterOutsideF { word: "X".into() }]
        );
    }

    #[test]
    fn disjoint_paths_required() {
        let ctx = Context::coding(BaseGroup::swap(), BitStream::thue_morse());
        // X from 0: 0 -> 1 ; tau X from 4: 4 -> s(4) undefined. Shares nothing.
        let ok = cond(&ctx, &[(0, 1)], &["X", "tau X"], &[("X", 0), ("tau X", 4)]);
        assert!(ok.is_valid(), "{:?}", ok.check());
        // both paths start 0 -> 1
        let clash = cond(&ctx, &[(0, 1)], &["X", "X X"], &[("X", 0), ("X X", 0)]);
        assert!(clash
            .check()
            .iter()
            .any(|v| matches!(v, ConditionViolation::PathsMeet { point: 0, .. })));
    }

    #[test]
    fn order_examples() {
        let ctx = Context::plain(BaseGroup::swap_tail());
        let p = cond(&ctx, &[], &["X^-1 gamma X"], &[]);
        let q = cond(&ctx, &[(5, 0)], &["X^-1 gamma X"], &[]);
        assert!(p.leq(&p).unwrap());
        assert!(q.leq(&p).unwrap());

        let p = cond(&ctx, &[], &["X X"], &[]);
        let q = cond(&ctx, &[(0, 1), (1, 0)], &["X X"], &[]);
        let violations = q.order_violations(&p).unwrap();
        assert_eq!(
            violations,
            vec![
                OrderViolation::NewFixedPointUnwitnessed {
                    word: "X X".into(),
                    point: 0
                },
                OrderViolation::NewFixedPointUnwitnessed {
                    word: "X X".into(),
                    point: 1
                },
            ]
        );
        assert!(!p.leq(&q).unwrap());
    }

    #[test]
    fn order_rejects_other_contexts() {
        let a = Condition::empty(Context::plain(BaseGroup::swap()));
        let b = Condition::empty(Context::plain(BaseGroup::swap_tail()));
        assert!(matches!(a.leq(&b), Err(Error::ContextMismatch(..))));
    }

    #[test]
    fn fixed_point_bound_examples() {
        let ctx = Context::plain(BaseGroup::swap_tail());
        let g = ctx.group().clone();
        let xx = ReducedWord::parse(&g, "X X").unwrap();
        assert_eq!(cond(&ctx, &[], &["X X"], &[]).fixed_point_bound(&xx).unwrap(), 0);
        assert_eq!(
            cond(&ctx, &[(0, 1), (1, 0)], &["X X"], &[])
                .fixed_point_bound(&xx)
                .unwrap(),
            4
        );
        let conj = ReducedWord::parse(&g, "X^-1 gamma X").unwrap();
        assert_eq!(
            cond(&ctx, &[], &["X^-1 gamma X"], &[])
                .fixed_point_bound(&conj)
                .unwrap(),
            6
        );
        assert!(cond(&ctx, &[], &[], &[]).fixed_point_bound(&xx).is_err());
    }

    #[test]
    fn json_round_trip() {
        let ctx = tail_ctx();
        let c = cond(&ctx, &[(3, 0), (0, 1)], &["X^-1 gamma X", "X"], &[("X", 0)]);
        let text = c.to_json();
        let back = Condition::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        let record: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(record["s"], serde_json::json!([[0, 1], [3, 0]]));
        assert_eq!(record["F"], serde_json::json!(["X", "X^-1 gamma X"]));
    }

    #[test]
    fn json_rejects_unreduced_words() {
        let text = r#"{"group":"swap","z":null,"s":[],"F":["X X^-1 X"],"m":{}}"#;
        assert!(matches!(Condition::from_json(text), Err(Error::NotReduced(_))));
        let text = r#"{"group":"swap","z":null,"s":[[0,1],[2,1]],"F":[],"m":{}}"#;
        assert!(matches!(
            Condition::from_json(text),
            Err(Error::NotInjective(2, 1))
        ));
    }
}
