//! Random instance generators and reference oracles for the integration
//! tests. The oracles work on explicit graphs and share no code with the
//! library's products, SCC search or projection.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ccsynth::automata::{BuchiAutomaton, Builder, MixedBuchiAutomaton};
use ccsynth::closure::{AgentId, Distribution};
use ccsynth::localize::TransitionSystem;
use ccsynth::{LassoWord, Ltl, Property, Symbol, Word};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn props(names: &[&str]) -> BTreeSet<Property> {
    names.iter().map(|n| Property::new(*n)).collect()
}

pub fn word(u: &[&str], v: &[&str]) -> Word {
    let f = |s: &[&str]| s.iter().map(|x| Property::new(*x)).collect();
    LassoWord::new(f(u), f(v))
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn distribution(parts: &[&[&str]]) -> Distribution {
    Distribution::new(
        parts
            .iter()
            .enumerate()
            .map(|(i, s)| (AgentId::new((i + 1).to_string()), props(s))),
    )
    .unwrap()
}

// ---------------------------------------------------------------- generators

/// A random Büchi automaton with `n` states and one initial state.
pub fn random_buchi(rng: &mut impl Rng, n: usize, sigma: &BTreeSet<Property>, density: f64) -> BuchiAutomaton<Property> {
    let mut b = Builder::new(sigma.iter().cloned());
    for _ in 0..n {
        b.add_state(rng.gen_bool(0.35));
    }
    b.set_initial(0);
    for q in 0..n {
        for l in sigma {
            for t in 0..n {
                if rng.gen_bool(density) {
                    b.add_edge(q, l, t).unwrap();
                }
            }
        }
    }
    b.build()
}

/// A random mixed automaton: some states become terminal finitary states.
pub fn random_mixed(rng: &mut impl Rng, n: usize, sigma: &BTreeSet<Property>, density: f64) -> MixedBuchiAutomaton<Property> {
    let fin: Vec<bool> = (0..n).map(|q| q > 0 && rng.gen_bool(0.25)).collect();
    let mut b = Builder::new(sigma.iter().cloned());
    for _ in 0..n {
        b.add_state(rng.gen_bool(0.35));
    }
    b.set_initial(0);
    if n > 1 && rng.gen_bool(0.3) {
        b.set_initial(1);
    }
    for q in (0..n).filter(|&q| !fin[q]) {
        for l in sigma {
            for t in 0..n {
                if rng.gen_bool(density) {
                    b.add_edge(q, l, t).unwrap();
                }
            }
        }
    }
    let finitary: Vec<usize> = (0..n).filter(|&q| fin[q]).collect();
    MixedBuchiAutomaton::new(b.build(), finitary).unwrap()
}

/// A random transition system whose labels cover `sigma` where possible.
pub fn random_ts(rng: &mut impl Rng, n: usize, sigma: &BTreeSet<Property>) -> TransitionSystem {
    let letters: Vec<&Property> = sigma.iter().collect();
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let labels: BTreeMap<String, Property> = names
        .iter()
        .map(|s| (s.clone(), (*letters.choose(rng).unwrap()).clone()))
        .collect();
    let mut edges = Vec::new();
    for a in &names {
        for b in &names {
            if rng.gen_bool(0.4) {
                edges.push((a.clone(), b.clone()));
            }
        }
    }
    TransitionSystem::new(names.clone(), &names[0], edges, sigma.clone(), &labels).unwrap()
}

/// A random formula of depth at most `depth` over `atoms`.
pub fn random_formula(rng: &mut impl Rng, depth: usize, atoms: &[&str]) -> Ltl {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Ltl::True,
            1 => Ltl::False,
            _ => Ltl::atom(*atoms.choose(rng).unwrap()),
        };
    }
    let sub = |rng: &mut _| random_formula(rng, depth - 1, atoms);
    match rng.gen_range(0..11) {
        0 => sub(rng).not(),
        1 => sub(rng).and(sub(rng)),
        2 => sub(rng).or(sub(rng)),
        3 => sub(rng).implies(sub(rng)),
        4 => sub(rng).next(),
        5 | 6 => sub(rng).until(sub(rng)),
        7 => sub(rng).release(sub(rng)),
        8 => sub(rng).eventually(),
        9 => sub(rng).always(),
        _ => sub(rng).not().until(sub(rng)),
    }
}

/// Every word `u` of length `0..=max_u` over `sigma`.
pub fn all_words(sigma: &BTreeSet<Property>, max_len: usize) -> Vec<Vec<Property>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in sigma {
                let mut x: Vec<Property> = w.clone();
                x.push(l.clone());
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every lasso `u v^ω` with `|u| ≤ max_u` and `1 ≤ |v| ≤ max_v`, plus every
/// finite word of length at most `max_u + max_v` when `finite` is set.
pub fn all_lassos(sigma: &BTreeSet<Property>, max_u: usize, max_v: usize, finite: bool) -> Vec<Word> {
    let us = all_words(sigma, max_u);
    let vs: Vec<_> = all_words(sigma, max_v).into_iter().filter(|v| !v.is_empty()).collect();
    let mut out = Vec::new();
    for u in &us {
        for v in &vs {
            out.push(LassoWord::new(u.clone(), v.clone()));
        }
    }
    if finite {
        for w in all_words(sigma, max_u + max_v) {
            out.push(LassoWord::finite(w));
        }
    }
    out
}

/// Accepted lasso obtained by a random walk, if the walk closes a cycle
/// through an accepting state.
pub fn random_accepted_lasso<L: Symbol>(rng: &mut impl Rng, b: &BuchiAutomaton<L>, len: usize) -> Option<LassoWord<L>> {
    let mut q = *b.initial().choose(rng)?;
    let mut states = vec![q];
    let mut letters = Vec::new();
    for _ in 0..len {
        let &(l, t) = b.edges(q).choose(rng)?;
        letters.push(b.letter(l).clone());
        states.push(t);
        q = t;
    }
    // close at the last earlier occurrence of the final state
    let last = *states.last().unwrap();
    let j = (0..len).rev().find(|&j| states[j] == last)?;
    if !states[j..len].iter().any(|&s| b.is_accepting(s)) {
        return None;
    }
    Some(LassoWord::new(letters[..j].to_vec(), letters[j..len].to_vec()))
}

// ------------------------------------------------------------------- oracles

fn position_successor<L>(w: &LassoWord<L>, k: usize) -> Option<usize> {
    let n = w.prefix.len() + w.period.len();
    if k + 1 < n {
        Some(k + 1)
    } else if w.period.is_empty() {
        None
    } else {
        Some(w.prefix.len())
    }
}

fn letter_at<L>(w: &LassoWord<L>, k: usize) -> &L {
    if k < w.prefix.len() {
        &w.prefix[k]
    } else {
        &w.period[k - w.prefix.len()]
    }
}

fn reach(start: &[usize], succ: &dyn Fn(usize) -> Vec<usize>, n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        for y in succ(x) {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Membership of `w` by a run search over (state, position) pairs; finite
/// words are accepted when a run ends in a state `finitary` approves.
pub fn accepts_oracle<L: Symbol>(b: &BuchiAutomaton<L>, finitary: &dyn Fn(usize) -> bool, w: &LassoWord<L>) -> bool {
    let span = w.prefix.len() + w.period.len();
    if w.period.is_empty() {
        let mut current: BTreeSet<usize> = b.initial().iter().copied().collect();
        for l in &w.prefix {
            current = current
                .iter()
                .flat_map(|&q| b.edges(q).iter().filter(|(li, _)| b.letter(*li) == l).map(|&(_, t)| t))
                .collect();
        }
        return current.into_iter().any(finitary);
    }
    let n = b.num_states() * span;
    let node = |q: usize, k: usize| q * span + k;
    let succ = |x: usize| -> Vec<usize> {
        let (q, k) = (x / span, x % span);
        let next = position_successor(w, k).unwrap();
        b.edges(q)
            .iter()
            .filter(|(li, _)| b.letter(*li) == letter_at(w, k))
            .map(|&(_, t)| node(t, next))
            .collect()
    };
    let starts: Vec<usize> = b.initial().iter().map(|&q| node(q, 0)).collect();
    let reachable = reach(&starts, &succ, n);
    (0..n).any(|x| {
        reachable[x] && b.is_accepting(x / span) && {
            let back = reach(&succ(x), &succ, n);
            back[x]
        }
    })
}

pub fn buchi_accepts<L: Symbol>(b: &BuchiAutomaton<L>, w: &LassoWord<L>) -> bool {
    accepts_oracle(b, &|_| false, w)
}

pub fn mixed_accepts(m: &MixedBuchiAutomaton<Property>, w: &Word) -> bool {
    accepts_oracle(m.buchi(), &|q| m.is_finitary(q), w)
}

/// Whether some trajectory of `ts` from its initial state generates `w`.
/// The empty word is generated by staying before the initial state.
pub fn generable(ts: &TransitionSystem, w: &Word) -> bool {
    let span = w.span();
    if span == 0 {
        return true;
    }
    let s0 = ts.initial();
    if ts.label(s0) != letter_at(w, 0) {
        return false;
    }
    let n = ts.num_states() * span;
    let succ = |x: usize| -> Vec<usize> {
        let (s, k) = (x / span, x % span);
        let Some(next) = position_successor(w, k) else { return vec![] };
        ts.successors(s)
            .iter()
            .filter(|&&t| ts.label(t) == letter_at(w, next))
            .map(|&t| t * span + next)
            .collect()
    };
    let start = s0 * span;
    let reachable = reach(&[start], &succ, n);
    if w.is_finite() {
        (0..ts.num_states()).any(|s| reachable[s * span + span - 1])
    } else {
        // an infinite path exists iff a reachable node lies on a cycle
        (0..n).any(|x| reachable[x] && reach(&succ(x), &succ, n)[x])
    }
}

/// Whether `b` accepts some `w` with `w↾sigma_i = v`, by an exact search in
/// the graph of (automaton state, position in `v`) pairs where letters outside
/// `sigma_i` leave the position unchanged.
pub fn has_preimage(b: &BuchiAutomaton<Property>, sigma_i: &BTreeSet<Property>, v: &Word) -> bool {
    // positions 0..span; for a finite v, position span means "consumed"
    let span = v.span();
    let positions = if v.is_finite() { span + 1 } else { span.max(1) };
    let n = b.num_states() * positions;
    let split = |x: usize| (x / positions, x % positions);
    let advance = |k: usize| -> Option<usize> {
        if v.is_finite() {
            (k < span).then_some(k + 1)
        } else {
            position_successor(v, k)
        }
    };
    // edges tagged with whether they consume a letter of v
    let moves = |x: usize| -> Vec<(usize, bool)> {
        let (q, k) = split(x);
        let mut out = Vec::new();
        for &(li, t) in b.edges(q) {
            let l = b.letter(li);
            if !sigma_i.contains(l) {
                out.push((t * positions + k, false));
            } else if (v.is_infinite() || k < span) && l == letter_at(v, k) {
                if let Some(k2) = advance(k) {
                    out.push((t * positions + k2, true));
                }
            }
        }
        out
    };
    let succ = |x: usize| moves(x).into_iter().map(|(y, _)| y).collect::<Vec<_>>();
    let starts: Vec<usize> = b.initial().iter().map(|&q| q * positions).collect();
    let reachable = reach(&starts, &succ, n);
    // r[x][y]: y reachable from x in zero or more steps
    let r: Vec<Vec<bool>> = (0..n).map(|x| reach(&[x], &succ, n)).collect();
    let on_cycle = |x: usize| succ(x).into_iter().any(|y| r[y][x]);
    let same_scc = |x: usize, y: usize| r[x][y] && r[y][x];
    if v.is_finite() {
        // consume all of v, then loop on silent letters through F
        (0..n).any(|x| {
            let (q, k) = split(x);
            reachable[x] && k == span && b.is_accepting(q) && on_cycle(x)
        })
    } else {
        // an accepting state and a consuming edge inside one cycle
        (0..n).any(|x| {
            reachable[x]
                && b.is_accepting(split(x).0)
                && on_cycle(x)
                && (0..n).any(|y| {
                    same_scc(x, y)
                        && moves(y)
                            .into_iter()
                            .any(|(z, consumes)| consumes && same_scc(x, z))
                })
        })
    }
}

/// Projection of a finite word.
pub fn project_finite(w: &[Property], sigma: &BTreeSet<Property>) -> Vec<Property> {
    w.iter().filter(|p| sigma.contains(*p)).cloned().collect()
}

/// The trace class of a finite word: closure under swaps of adjacent letters
/// that no agent owns together.
pub fn trace_class(w: &[Property], d: &Distribution) -> BTreeSet<Vec<Property>> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(w.to_vec());
    queue.push_back(w.to_vec());
    while let Some(x) = queue.pop_front() {
        for k in 0..x.len().saturating_sub(1) {
            if x[k] != x[k + 1] && !d.alphabets().iter().any(|s| s.contains(&x[k]) && s.contains(&x[k + 1])) {
                let mut y = x.clone();
                y.swap(k, k + 1);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    seen
}

/// Words of the same length as `w` whose projections onto every agent
/// alphabet equal those of `w`.
pub fn projection_product(w: &[Property], d: &Distribution) -> BTreeSet<Vec<Property>> {
    let target: Vec<Vec<Property>> = d.alphabets().iter().map(|s| project_finite(w, s)).collect();
    let sigma = d.global();
    all_words(sigma, w.len())
        .into_iter()
        .filter(|x| x.len() == w.len())
        .filter(|x| {
            d.alphabets()
                .iter()
                .zip(&target)
                .all(|(s, t)| &project_finite(x, s) == t)
        })
        .collect()
}

/// A uniformly random word of length `n` over `alphabet`.
pub fn random_word(rng: &mut impl Rng, alphabet: &[Property], n: usize) -> Vec<Property> {
    (0..n).map(|_| alphabet.choose(rng).unwrap().clone()).collect()
}
