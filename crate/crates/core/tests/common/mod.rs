#![allow(dead_code)]

use cofinitary::coding::BitStream;
use cofinitary::extension::{self, Mode, Tracking};
use cofinitary::group::{Permutation, BUILTIN_GROUPS};
use cofinitary::words::Letter;
use cofinitary::{BaseGroup, Condition, Context, PartialInjection, ReducedWord};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn builtin_groups() -> Vec<BaseGroup> {
    BUILTIN_GROUPS
        .iter()
        .map(|n| BaseGroup::builtin(n).unwrap())
        .collect()
}

/// Every built-in group, plain and with each built-in stream.
pub fn contexts() -> Vec<Context> {
    let mut out = Vec::new();
    for g in builtin_groups() {
        out.push(Context::plain(g.clone()));
        out.push(Context::coding(g.clone(), BitStream::thue_morse()));
        out.push(Context::coding(g, BitStream::champernowne()));
    }
    out
}

pub fn random_letter(rng: &mut impl Rng, group: &BaseGroup) -> Letter {
    let mut pool = vec![Letter::X, Letter::XInv];
    pool.extend(group.alphabet().into_iter().map(Letter::Group));
    if let Some(g) = group.generator() {
        pool.push(Letter::Group(group.power(2 * g.exponent())));
    }
    *pool.choose(rng).unwrap()
}

/// A reduced word with at least one `X` letter, from up to `max_tokens` tokens.
pub fn random_word(rng: &mut impl Rng, group: &BaseGroup, max_tokens: usize) -> ReducedWord {
    loop {
        let len = rng.gen_range(1..=max_tokens);
        let w = ReducedWord::reduce(group, (0..len).map(|_| random_letter(rng, group)));
        if !w.is_group_word() {
            return w;
        }
    }
}

pub fn random_injection(rng: &mut impl Rng, size: usize, window: u64) -> PartialInjection {
    let mut s = PartialInjection::new();
    let mut targets: Vec<u64> = (0..window).collect();
    targets.shuffle(rng);
    let mut sources: Vec<u64> = (0..window).collect();
    sources.shuffle(rng);
    for (n, v) in sources.into_iter().zip(targets).take(size) {
        s.insert(n, v).unwrap();
    }
    s
}

/// A built-in permutation that agrees with each element of `group` at only
/// finitely many points. `tau` and `gamma` differ only on `{0, 1}`, so each
/// is excluded along with the other's group.
pub fn random_target(rng: &mut impl Rng, group: &BaseGroup) -> Permutation {
    loop {
        let name = *["tau", "gamma", "zeta", "zeta^-1", "zeta^2"].choose(rng).unwrap();
        let excluded = match group.name() {
            "swap" | "swap-tail" => name == "tau" || name == "gamma",
            "shift" => name.starts_with("zeta"),
            _ => false,
        };
        if !excluded {
            return Permutation::resolve(name).unwrap();
        }
    }
}

/// Like [`random_word`], restricted to words whose `X`-letters never cancel
/// cyclically.
pub fn random_cyclic_word(rng: &mut impl Rng, group: &BaseGroup, max_tokens: usize) -> ReducedWord {
    loop {
        let w = random_word(rng, group, max_tokens);
        if w.is_cyclically_reduced(group) {
            return w;
        }
    }
}

fn fresh_point(rng: &mut impl Rng, limit: u64, taken: impl Fn(u64) -> bool) -> u64 {
    loop {
        let n = rng.gen_range(0..limit);
        if !taken(n) {
            return n;
        }
    }
}

/// Applies one randomly chosen extension operation; returns its label and
/// the result.
pub fn random_op(rng: &mut impl Rng, p: &Condition) -> (String, Condition) {
    let group = p.group().clone();
    let limit = p.s().least_unused() + 8;
    loop {
        match rng.gen_range(0..6) {
            0 => {
                let n = fresh_point(rng, limit, |n| p.s().in_domain(n));
                return (format!("domain {n}"), extension::domain_extend(p, n).unwrap());
            }
            1 => {
                let n = fresh_point(rng, limit, |n| p.s().in_range(n));
                return (format!("range {n}"), extension::range_extend(p, n).unwrap());
            }
            2 => {
                let w = random_word(rng, &group, 4);
                return (format!("add {}", p.text(&w)), extension::add_word(p, &w).unwrap());
            }
            3 if p.context().is_coding() => {
                let existing: Vec<ReducedWord> = p.params().keys().cloned().collect();
                let w = match existing.choose(rng) {
                    Some(w) if rng.gen_bool(0.5) => w.clone(),
                    _ => random_word(rng, &group, 4),
                };
                if !extension::codable(&group, &w) {
                    continue;
                }
                let current = p.code_length(&w).unwrap().unwrap_or(0);
                let l = current + rng.gen_range(1..4);
                return (
                    format!("code {} to {l}", p.text(&w)),
                    extension::extend_coding(p, &w, l).unwrap(),
                );
            }
            4 => {
                let target = random_target(rng, &group);
                let k = rng.gen_range(0..20);
                let (q, _) = extension::hit(p, &target, k).unwrap();
                return (format!("hit {} from {k}", target.name()), q);
            }
            5 => {
                let w = random_word(rng, &group, 4);
                let g = match group.generator() {
                    Some(g) if rng.gen_bool(0.5) => g,
                    _ => group.identity(),
                };
                let (q, _) = extension::distinguish(p, &w, g).unwrap();
                return (
                    format!("distinguish {} from {}", p.text(&w), group.format_element(g)),
                    q,
                );
            }
            _ => continue,
        }
    }
}

/// A chain `p_0 ≥ p_1 ≥ ...` of `len` random extensions of the empty condition.
pub fn random_chain(rng: &mut impl Rng, ctx: &Context, len: usize) -> Vec<Condition> {
    let mut chain = vec![Condition::empty(ctx.clone())];
    for _ in 0..len {
        let (_, q) = random_op(rng, chain.last().unwrap());
        chain.push(q);
    }
    chain
}

/// One extension at `n` that also protects the path of `start` under `w`.
pub fn tracked_extend(p: &Condition, n: u64, mode: Mode, w: &ReducedWord, start: u64) -> Condition {
    extension::extend(p, n, mode, &Tracking::path(w.clone(), start))
        .unwrap()
        .0
}
pub mod oracle;
