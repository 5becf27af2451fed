//! A deterministic scheduler that applies extension steps round-robin under
//! a budget, and the transcript checker.
//!
//! Queues are visited in a fixed order: domain, range, add-word, code, hit,
//! distinguish. Each visit costs one unit of budget if it applies an
//! extension; tasks that are already met are dropped for free.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coding::CodingCertificate;
use crate::condition::{Condition, ConditionRecord, Context};
use crate::error::{Error, Result};
use crate::extension::{self, DistinguishStep};
use crate::group::{BaseGroup, GroupElement, Permutation};
use crate::partial::{apply_word, fixed_points};
use crate::words::{enumerate_words, ReducedWord};

/// Points of `[0, CONTRACT_WINDOW)` on which base groups are checked before a run.
pub const CONTRACT_WINDOW: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordSource {
    /// Every reduced non-group word from token sequences up to this length.
    Depth(usize),
    List(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub group: String,
    /// `None` runs the plain poset, without coding.
    pub z: Option<String>,
    pub words: WordSource,
    pub code_length: usize,
    pub targets: Vec<String>,
    pub hit_stride: u64,
    pub hits_per_target: usize,
    /// Group elements to separate every word from; `None` means the
    /// identity and the generator.
    pub distinguish: Option<Vec<String>>,
    /// Words put into `F` of the initial condition.
    pub preload: Vec<String>,
    pub budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            group: "trivial".into(),
            z: Some("thue-morse".into()),
            words: WordSource::Depth(1),
            code_length: 16,
            targets: Vec::new(),
            hit_stride: 5,
            hits_per_target: 10,
            distinguish: None,
            preload: Vec::new(),
            budget: 1000,
        }
    }
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configs always serialize")
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    DomainAt { n: u64 },
    RangeAt { n: u64 },
    AddWord { word: String },
    CodeTo { word: String, length: usize },
    HitTarget { target: String, k: u64 },
    Distinguish { word: String, element: String },
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::DomainAt { n } => write!(f, "domain {n}"),
            Task::RangeAt { n } => write!(f, "range {n}"),
            Task::AddWord { word } => write!(f, "add `{word}`"),
            Task::CodeTo { word, length } => write!(f, "code `{word}` to {length}"),
            Task::HitTarget { target, k } => write!(f, "hit {target} from {k}"),
            Task::Distinguish { word, element } => write!(f, "separate `{word}` from {element}"),
        }
    }
}

/// What one step added.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<[u64; 2]>,
    #[serde(rename = "F", default, skip_serializing_if = "Vec::is_empty")]
    pub words: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub m: BTreeMap<String, u64>,
}

impl Delta {
    fn between(p: &Condition, q: &Condition) -> Self {
        let mut s = Vec::new();
        let mut old = p.s().pairs().peekable();
        for (n, v) in q.s().pairs() {
            while old.next_if(|&(a, _)| a < n).is_some() {}
            if old.peek() != Some(&(n, v)) {
                s.push([n, v]);
            }
        }
        Self {
            s,
            words: q.words().difference(p.words()).map(|w| q.text(w)).collect(),
            m: q.params()
                .iter()
                .filter(|(w, _)| !p.params().contains_key(*w))
                .map(|(w, &m)| (q.text(w), m))
                .collect(),
        }
    }

    /// Applies the delta in place; returns the pairs added.
    fn apply(&self, c: &mut Condition) -> Result<BTreeMap<u64, u64>> {
        let group = c.group().clone();
        let mut added = BTreeMap::new();
        for &[n, v] in &self.s {
            if c.s().get(n) == Some(v) {
                return Err(Error::Malformed(format!("pair ({n}, {v}) is already present")));
            }
            c.s_mut().insert(n, v)?;
            added.insert(n, v);
        }
        for text in &self.words {
            c.words_mut().insert(ReducedWord::parse_exact(&group, text)?);
        }
        for (text, &m) in &self.m {
            let w = ReducedWord::parse_exact(&group, text)?;
            if c.params_mut().insert(w, m).is_some() {
                return Err(Error::Malformed(format!("parameter of `{text}` changed")));
            }
        }
        Ok(added)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub task: Task,
    pub delta: Delta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptContext {
    pub group: String,
    pub z: Option<String>,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitWitness {
    pub target: String,
    pub k: u64,
    pub n: u64,
    pub value: u64,
}

/// `w[s](n) = value ≠ element(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinctionWitness {
    pub word: String,
    pub element: String,
    pub n: u64,
    pub value: u64,
}

/// Fixed-point data of a word at the condition where it entered `F`
/// (`step` counts the steps applied before it), and at the end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordEntry {
    pub word: String,
    pub step: usize,
    pub fixed_points: usize,
    pub bound: usize,
    pub final_fixed_points: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub context: TranscriptContext,
    pub config: RunConfig,
    pub initial: ConditionRecord,
    pub steps: Vec<Step>,
    #[serde(rename = "final")]
    pub final_condition: ConditionRecord,
    /// Largest `B` with `[0, B)` inside both the domain and range of the final `s`.
    pub coverage: u64,
    pub certificates: Vec<CodingCertificate>,
    /// Scheduled words left uncoded because they are conjugate to a group
    /// element.
    pub uncodable: Vec<String>,
    pub hits: Vec<HitWitness>,
    pub distinctions: Vec<DistinctionWitness>,
    pub entries: Vec<WordEntry>,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("transcripts always serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn context(&self) -> Result<Context> {
        Context::resolve(&self.context.group, self.context.z.as_deref())
    }

    /// Rebuilds every condition of the chain, calling `visit` with the
    /// number of steps applied so far. Returns the last condition.
    pub fn replay(&self, mut visit: impl FnMut(usize, &Condition)) -> Result<Condition> {
        let ctx = self.context()?;
        let mut c = Condition::from_record_in(&ctx, &self.initial)?;
        visit(0, &c);
        for (i, step) in self.steps.iter().enumerate() {
            step.delta
                .apply(&mut c)
                .map_err(|e| task_error(i, &step.task, e))?;
            visit(i + 1, &c);
        }
        Ok(c)
    }

    /// The final condition as recorded.
    pub fn final_condition(&self) -> Result<Condition> {
        Condition::from_record_in(&self.context()?, &self.final_condition)
    }
}

fn task_error(index: usize, task: &Task, source: Error) -> Error {
    Error::Task {
        index,
        task: task.to_string(),
        source: Box::new(source),
    }
}

struct Setup {
    ctx: Context,
    words: Vec<ReducedWord>,
    targets: Vec<Permutation>,
    elements: Vec<GroupElement>,
    preload: Vec<ReducedWord>,
}

fn parse_word(group: &BaseGroup, text: &str) -> Result<ReducedWord> {
    let w = ReducedWord::parse(group, text)?;
    if w.is_group_word() {
        return Err(Error::Config(format!("`{text}` has no X letter")));
    }
    Ok(w)
}

fn setup(config: &RunConfig) -> Result<Setup> {
    let ctx = Context::resolve(&config.group, config.z.as_deref())?;
    let group = ctx.group().clone();
    let problems = group.check_contract(CONTRACT_WINDOW);
    if !problems.is_empty() {
        return Err(Error::Config(format!(
            "group `{}`: {}",
            group.name(),
            problems.join("; ")
        )));
    }
    if let Some(z) = ctx.stream() {
        z.check_non_periodic()?;
    }
    let words = match &config.words {
        WordSource::Depth(d) => enumerate_words(&group, *d),
        WordSource::List(list) => {
            let mut out: Vec<ReducedWord> = Vec::new();
            for text in list {
                let w = parse_word(&group, text)?;
                if !out.contains(&w) {
                    out.push(w);
                }
            }
            out
        }
    };
    let targets = config
        .targets
        .iter()
        .map(|t| Permutation::resolve(t))
        .collect::<Result<Vec<_>>>()?;
    if config.hit_stride == 0 && config.hits_per_target > 1 {
        return Err(Error::Config("hit stride must be positive".into()));
    }
    let elements = match &config.distinguish {
        Some(list) => list
            .iter()
            .map(|t| group.parse_element(t))
            .collect::<Result<Vec<_>>>()?,
        None => std::iter::once(group.identity())
            .chain(group.generator())
            .collect(),
    };
    let preload = config
        .preload
        .iter()
        .map(|t| parse_word(&group, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Setup {
        ctx,
        words,
        targets,
        elements,
        preload,
    })
}

fn entry(c: &Condition, w: &ReducedWord, step: usize) -> Result<WordEntry> {
    Ok(WordEntry {
        word: c.text(w),
        step,
        fixed_points: fixed_points(c.group(), w, c.s())?.len(),
        bound: c.fixed_point_bound(w)?,
        final_fixed_points: 0,
    })
}

fn certificates(c: &Condition) -> Result<Vec<CodingCertificate>> {
    let mut out = Vec::new();
    for (w, &m) in c.params() {
        if let Some(length) = c.code_length(w)? {
            out.push(CodingCertificate {
                word: c.text(w),
                parameter: m,
                length,
                exact: true,
            });
        }
    }
    Ok(out)
}

struct Run {
    current: Condition,
    steps: Vec<Step>,
    entries: Vec<WordEntry>,
    remaining: usize,
}

impl Run {
    fn record(&mut self, task: Task, q: Condition) -> Result<()> {
        let index = self.steps.len();
        let delta = Delta::between(&self.current, &q);
        for text in &delta.words {
            let w = ReducedWord::parse_exact(q.group(), text)?;
            self.entries.push(entry(&q, &w, index + 1)?);
        }
        self.steps.push(Step { task, delta });
        self.current = q;
        self.remaining -= 1;
        Ok(())
    }

    fn fail(&self, task: &Task, e: Error) -> Error {
        task_error(self.steps.len(), task, e)
    }
}

/// Runs the schedule until the budget is spent.
pub fn run(config: &RunConfig) -> Result<Transcript> {
    let Setup {
        ctx,
        words,
        targets,
        elements,
        preload,
    } = setup(config)?;
    let group = ctx.group().clone();
    let initial = Condition::from_parts(ctx.clone(), Default::default(), preload.iter().cloned(), []);
    let mut state = Run {
        current: initial.clone(),
        steps: Vec::new(),
        entries: Vec::new(),
        remaining: config.budget,
    };
    for w in initial.words() {
        state.entries.push(entry(&initial, w, 0)?);
    }

    let mut next_domain = 0u64;
    let mut next_range = 0u64;
    let mut add_queue: VecDeque<ReducedWord> = words.iter().cloned().collect();
    let (codable, uncodable): (Vec<ReducedWord>, Vec<ReducedWord>) =
        words.iter().cloned().partition(|w| extension::codable(&group, w));
    let mut code_queue: VecDeque<ReducedWord> = match ctx.is_coding() {
        true => codable.into_iter().collect(),
        false => VecDeque::new(),
    };
    let mut hit_queue: VecDeque<(usize, u64)> = (0..config.hits_per_target as u64)
        .flat_map(|i| (0..targets.len()).map(move |t| (t, i * config.hit_stride)))
        .collect();
    let mut separate_queue: VecDeque<(ReducedWord, GroupElement)> = words
        .iter()
        .flat_map(|w| elements.iter().map(move |&g| (w.clone(), g)))
        .collect();
    let mut separate_start: Option<u64> = None;
    let mut hits = Vec::new();
    let mut distinctions = Vec::new();

    while state.remaining > 0 {
        // domain
        while state.current.s().in_domain(next_domain) {
            next_domain += 1;
        }
        let task = Task::DomainAt { n: next_domain };
        let q = extension::domain_extend(&state.current, next_domain).map_err(|e| state.fail(&task, e))?;
        state.record(task, q)?;

        // range
        if state.remaining == 0 {
            break;
        }
        while state.current.s().in_range(next_range) {
            next_range += 1;
        }
        let task = Task::RangeAt { n: next_range };
        let q = extension::range_extend(&state.current, next_range).map_err(|e| state.fail(&task, e))?;
        state.record(task, q)?;

        // add-word
        while let Some(w) = add_queue.front() {
            if state.current.words().contains(w) {
                add_queue.pop_front();
                continue;
            }
            if state.remaining == 0 {
                break;
            }
            let task = Task::AddWord {
                word: group_text(&group, w),
            };
            let q = extension::add_word(&state.current, w).map_err(|e| state.fail(&task, e))?;
            state.record(task, q)?;
            add_queue.pop_front();
            break;
        }

        // code
        while let Some(w) = code_queue.front() {
            let done = match state.current.code_length(w) {
                Ok(Some(l)) => l >= config.code_length,
                _ => false,
            };
            if done {
                code_queue.pop_front();
                continue;
            }
            if state.remaining == 0 {
                break;
            }
            let task = Task::CodeTo {
                word: group_text(&group, w),
                length: config.code_length,
            };
            let q = extension::coding_step(&state.current, w).map_err(|e| state.fail(&task, e))?;
            state.record(task, q)?;
            break;
        }

        // hit
        if state.remaining > 0 {
            if let Some((t, k)) = hit_queue.pop_front() {
                let target = &targets[t];
                let task = Task::HitTarget {
                    target: target.name().to_string(),
                    k,
                };
                let (q, n) = extension::hit(&state.current, target, k).map_err(|e| state.fail(&task, e))?;
                let value = q.s().get(n).expect("hit adds n");
                state.record(task, q)?;
                hits.push(HitWitness {
                    target: target.name().to_string(),
                    k,
                    n,
                    value,
                });
            }
        }

        // distinguish
        while let Some((w, g)) = separate_queue.front() {
            if state.remaining == 0 {
                break;
            }
            let task = Task::Distinguish {
                word: group_text(&group, w),
                element: group.format_element(*g),
            };
            let step = extension::distinguish_step(&state.current, w, *g, separate_start)
                .map_err(|e| state.fail(&task, e))?;
            match step {
                DistinguishStep::Witnessed { n, value } => {
                    distinctions.push(DistinctionWitness {
                        word: group_text(&group, w),
                        element: group.format_element(*g),
                        n,
                        value,
                    });
                    separate_queue.pop_front();
                    separate_start = None;
                }
                DistinguishStep::Extended { condition, start } => {
                    separate_start = Some(start);
                    state.record(task, condition)?;
                    break;
                }
            }
        }
    }

    let Run {
        current,
        steps,
        mut entries,
        ..
    } = state;
    for e in &mut entries {
        let w = ReducedWord::parse_exact(&group, &e.word)?;
        e.final_fixed_points = fixed_points(&group, &w, current.s())?.len();
    }
    Ok(Transcript {
        context: TranscriptContext {
            group: group.name().to_string(),
            z: ctx.stream().map(|z| z.name().to_string()),
            config_hash: config.hash(),
        },
        config: config.clone(),
        initial: initial.to_record(),
        steps,
        final_condition: current.to_record(),
        coverage: current.s().coverage(),
        certificates: certificates(&current)?,
        uncodable: match ctx.is_coding() {
            true => uncodable.iter().map(|w| group_text(&group, w)).collect(),
            false => Vec::new(),
        },
        hits,
        distinctions,
        entries,
    })
}

fn group_text(group: &BaseGroup, w: &ReducedWord) -> String {
    w.to_text(group)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`verify_transcript`], one line per check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{mark}] {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn joined<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// What a step must have achieved, judged on the condition after it.
fn task_met(
    group: &BaseGroup,
    task: &Task,
    delta: &Delta,
    q: &Condition,
    targets: &BTreeMap<String, Permutation>,
) -> Result<(), String> {
    let single_pair = || match delta.s.as_slice() {
        [[n, v]] => Ok((*n, *v)),
        other => Err(format!("expected one new pair, found {}", other.len())),
    };
    match task {
        Task::DomainAt { n } => match q.s().in_domain(*n) {
            true => Ok(()),
            false => Err(format!("{n} is not in the domain")),
        },
        Task::RangeAt { n } => match q.s().in_range(*n) {
            true => Ok(()),
            false => Err(format!("{n} is not in the range")),
        },
        Task::AddWord { word } => {
            let w = ReducedWord::parse_exact(group, word).map_err(|e| e.to_string())?;
            match q.words().contains(&w) {
                true => Ok(()),
                false => Err(format!("`{word}` is not in F")),
            }
        }
        Task::CodeTo { word, .. } => {
            let w = ReducedWord::parse_exact(group, word).map_err(|e| e.to_string())?;
            match q.parameter(&w).is_some() && delta != &Delta::default() {
                true => Ok(()),
                false => Err(format!("no coding progress for `{word}`")),
            }
        }
        Task::HitTarget { target, k } => {
            let (n, v) = single_pair()?;
            let perm = targets
                .get(target)
                .ok_or_else(|| format!("unknown target {target}"))?;
            match n >= *k && perm.eval(n) == Some(v) {
                true => Ok(()),
                false => Err(format!("({n}, {v}) does not hit {target} from {k}")),
            }
        }
        Task::Distinguish { .. } => single_pair().map(|_| ()),
    }
}

/// Re-checks a transcript from scratch. Never fails; problems become
/// failed checks in the report.
pub fn verify_transcript(t: &Transcript) -> Report {
    let mut report = Report::default();
    let hash = t.config.hash();
    let same_context = t.context.group == t.config.group && t.context.z == t.config.z;
    report.push(
        "config",
        hash == t.context.config_hash && same_context,
        match (hash == t.context.config_hash, same_context) {
            (true, true) => "hash and context match the embedded config".to_string(),
            (false, _) => format!(
                "config hash {hash} differs from recorded {}",
                t.context.config_hash
            ),
            (true, false) => "context names differ from the config".to_string(),
        },
    );
    let ctx = match t.context() {
        Ok(ctx) => ctx,
        Err(e) => {
            report.push("context", false, e.to_string());
            return report;
        }
    };
    let group = ctx.group().clone();
    if let Some(z) = ctx.stream() {
        match z.check_non_periodic() {
            Ok(()) => report.push(
                "stream",
                true,
                format!("{} passes the periodicity heuristic", z.name()),
            ),
            Err(e) => report.push("stream", false, e.to_string()),
        }
    }
    let mut targets = BTreeMap::new();
    for name in &t.config.targets {
        match Permutation::resolve(name) {
            Ok(p) => {
                targets.insert(name.clone(), p);
            }
            Err(e) => report.push(format!("target {name}"), false, e.to_string()),
        }
    }

    let mut c = match Condition::from_record_in(&ctx, &t.initial) {
        Ok(c) => c,
        Err(e) => {
            report.push("initial", false, e.to_string());
            return report;
        }
    };
    let initial = c.clone();
    let violations = c.check();
    report.push(
        "initial",
        violations.is_empty(),
        match violations.is_empty() {
            true => "valid".to_string(),
            false => joined(&violations),
        },
    );

    let mut entries: Vec<(ReducedWord, WordEntry)> = Vec::new();
    let mut record_entry =
        |c: &Condition, w: &ReducedWord, step: usize, report: &mut Report| match entry(c, w, step) {
            Ok(e) => entries.push((w.clone(), e)),
            Err(e) => report.push(format!("entry {}", c.text(w)), false, e.to_string()),
        };
    for w in c.words().clone() {
        record_entry(&c, &w, 0, &mut report);
    }
    let mut step_failures = 0;
    for (i, step) in t.steps.iter().enumerate() {
        let before_words = c.words().clone();
        let name = format!("step {i} ({})", step.task);
        let added = match step.delta.apply(&mut c) {
            Ok(added) => added,
            Err(e) => {
                report.push(name, false, e.to_string());
                return report;
            }
        };
        let mut problems: Vec<String> = c.check().iter().map(ToString::to_string).collect();
        problems.extend(
            c.fixed_point_violations_since(&before_words, &added)
                .iter()
                .map(ToString::to_string),
        );
        if let Err(e) = task_met(&group, &step.task, &step.delta, &c, &targets) {
            problems.push(e);
        }
        if !problems.is_empty() {
            step_failures += 1;
            report.push(name, false, problems.join("; "));
        }
        for w in c.words().difference(&before_words).cloned().collect::<Vec<_>>() {
            record_entry(&c, &w, i + 1, &mut report);
        }
    }
    if step_failures == 0 {
        report.push(
            "steps",
            true,
            format!(
                "{} steps replayed; each is valid and extends its predecessor",
                t.steps.len()
            ),
        );
    }

    match Condition::from_record_in(&ctx, &t.final_condition) {
        Ok(recorded) => report.push(
            "final",
            recorded == c,
            match recorded == c {
                true => "replayed chain ends at the recorded final condition".to_string(),
                false => "replayed chain differs from the recorded final condition".to_string(),
            },
        ),
        Err(e) => report.push("final", false, e.to_string()),
    }
    match c.order_violations(&initial) {
        Ok(v) if v.is_empty() => report.push("order", true, "final condition extends the initial one"),
        Ok(v) => report.push("order", false, joined(&v)),
        Err(e) => report.push("order", false, e.to_string()),
    }

    let coded: BTreeSet<String> = c.params().keys().map(|w| c.text(w)).collect();
    let certified: BTreeSet<String> = t.certificates.iter().map(|cert| cert.word.clone()).collect();
    report.push(
        "certificate coverage",
        coded == certified,
        format!("{} coded words, {} certificates", coded.len(), certified.len()),
    );
    for cert in &t.certificates {
        let name = format!("certificate `{}`", cert.word);
        let Some(z) = ctx.stream() else {
            report.push(name, false, "no stream in this context");
            continue;
        };
        let parameter_matches = ReducedWord::parse_exact(&group, &cert.word)
            .map(|w| c.parameter(&w) == Some(cert.parameter))
            .unwrap_or(false);
        match cert.check(&group, c.s(), z) {
            Ok(true) if parameter_matches => report.push(
                name,
                true,
                format!("parameter {} codes {} bits exactly", cert.parameter, cert.length),
            ),
            Ok(true) => report.push(
                name,
                false,
                format!("parameter {} is not the one in m", cert.parameter),
            ),
            Ok(false) => report.push(
                name,
                false,
                format!("parameter {} does not code {} bits", cert.parameter, cert.length),
            ),
            Err(e) => report.push(name, false, e.to_string()),
        }
    }

    for text in &t.uncodable {
        let name = format!("uncodable `{text}`");
        match ReducedWord::parse_exact(&group, text) {
            Ok(w) if !extension::codable(&group, &w) => {
                report.push(name, true, "conjugate to a group element")
            }
            Ok(_) => report.push(name, false, "the word can code z"),
            Err(e) => report.push(name, false, e.to_string()),
        }
    }

    for hit in &t.hits {
        let name = format!("hit {} from {}", hit.target, hit.k);
        let agrees = targets.get(&hit.target).and_then(|p| p.eval(hit.n)) == Some(hit.value);
        let ok = hit.n >= hit.k && agrees && c.s().get(hit.n) == Some(hit.value);
        report.push(name, ok, format!("s({}) = {}", hit.n, hit.value));
    }
    for d in &t.distinctions {
        let name = format!("distinguish `{}` from {}", d.word, d.element);
        let outcome = ReducedWord::parse_exact(&group, &d.word).and_then(|w| {
            let g = group.parse_element(&d.element)?;
            Ok((apply_word(&group, &w, c.s(), d.n), group.eval(g, d.n)))
        });
        match outcome {
            Ok((Some(v), gv)) if v == d.value && v != gv => {
                report.push(name, true, format!("w[s]({}) = {v} ≠ {gv}", d.n))
            }
            Ok((v, gv)) => report.push(name, false, format!("w[s]({}) = {v:?}, g({}) = {gv}", d.n, d.n)),
            Err(e) => report.push(name, false, e.to_string()),
        }
    }

    let mut recomputed = Vec::new();
    for (w, mut e) in entries {
        match fixed_points(&group, &w, c.s()) {
            Ok(fix) => e.final_fixed_points = fix.len(),
            Err(err) => report.push(format!("fixed points `{}`", e.word), false, err.to_string()),
        }
        let within = e.final_fixed_points <= e.fixed_points + e.bound;
        report.push(
            format!("fixed points `{}`", e.word),
            within,
            format!(
                "{} at the end, {} at entry (step {}), bound {}",
                e.final_fixed_points, e.fixed_points, e.step, e.bound
            ),
        );
        recomputed.push(e);
    }
    report.push(
        "entries",
        recomputed == t.entries,
        match recomputed == t.entries {
            true => "recorded word entries match the replay".to_string(),
            false => "recorded word entries differ from the replay".to_string(),
        },
    );

    let b = t.coverage;
    let window_ok = (0..b).all(|n| c.s().in_domain(n) && c.s().in_range(n));
    report.push("window", window_ok, format!("[0, {b}) lies in dom(s) and ran(s)"));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(group: &str, words: &[&str], budget: usize) -> RunConfig {
        RunConfig {
            group: group.into(),
            words: WordSource::List(words.iter().map(|w| w.to_string()).collect()),
            budget,
            ..RunConfig::default()
        }
    }

    #[test]
    fn zero_budget_keeps_the_initial_condition() {
        let t = run(&config("trivial", &["X"], 0)).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.initial, t.final_condition);
        assert!(t.final_condition.s.is_empty());
        assert!(verify_transcript(&t).passed());
    }

    #[test]
    fn schedule_order() {
        let t = run(&config("trivial", &["X"], 6)).unwrap();
        let kinds: Vec<&str> = t
            .steps
            .iter()
            .map(|s| match s.task {
                Task::DomainAt { .. } => "domain",
                Task::RangeAt { .. } => "range",
                Task::AddWord { .. } => "add",
                Task::CodeTo { .. } => "code",
                Task::HitTarget { .. } => "hit",
                Task::Distinguish { .. } => "distinguish",
            })
            .collect();
        assert_eq!(kinds, ["domain", "range", "add", "code", "distinguish", "domain"]);
    }

    #[test]
    fn delta_round_trip() {
        let t = run(&config("swap", &["X", "tau X"], 40)).unwrap();
        let last = t.replay(|_, _| {}).unwrap();
        assert_eq!(last.to_record(), t.final_condition);
        let back = Transcript::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn config_errors() {
        let mut bad = config("trivial", &["1"], 5);
        assert!(matches!(run(&bad), Err(Error::Config(_))));
        bad.words = WordSource::Depth(1);
        bad.group = "nope".into();
        assert!(matches!(run(&bad), Err(Error::UnknownGroup(_))));
        let periodic = RunConfig {
            z: Some("file:/definitely/missing".into()),
            ..RunConfig::default()
        };
        assert!(run(&periodic).is_err());
    }
}
