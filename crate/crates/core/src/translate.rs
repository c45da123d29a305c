//! LTL to Büchi translation by tableau expansion.
//!
//! Nodes are split on `∨`, `U` and `R` obligations until each carries a set
//! of formulas that hold now (`old`) and a set that must hold next (`next`).
//! Every `U` subformula yields one fairness set; the resulting generalized
//! automaton is degeneralized with a round-robin counter. A letter is a single
//! property, so a node guard is satisfied by at most the one letter named by
//! its positive atoms.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::automata::{BuchiAutomaton, Builder};
use crate::formula::{Ltl, Property};

type Fid = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    /// Index into the sorted alphabet.
    Atom(usize),
    NegAtom(usize),
    And(Fid, Fid),
    Or(Fid, Fid),
    Next(Fid),
    Until(Fid, Fid),
    Release(Fid, Fid),
}

#[derive(Default)]
struct Table {
    nodes: Vec<Node>,
    index: HashMap<Node, Fid>,
}

impl Table {
    fn intern(&mut self, n: Node) -> Fid {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        self.nodes.push(n);
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// Interns an NNF formula, children before parents.
    fn add(&mut self, f: &Ltl, props: &[Property]) -> Fid {
        let atom = |p: &Property| props.binary_search(p).ok();
        let n = match f {
            Ltl::True => Node::True,
            Ltl::False => Node::False,
            // properties outside the alphabet never occur
            Ltl::Atom(p) => atom(p).map_or(Node::False, Node::Atom),
            Ltl::Not(a) => match &**a {
                Ltl::Atom(p) => atom(p).map_or(Node::True, Node::NegAtom),
                _ => unreachable!("formula not in negation normal form"),
            },
            Ltl::And(a, b) => Node::And(self.add(a, props), self.add(b, props)),
            Ltl::Or(a, b) => Node::Or(self.add(a, props), self.add(b, props)),
            Ltl::Next(a) => Node::Next(self.add(a, props)),
            Ltl::Until(a, b) => Node::Until(self.add(a, props), self.add(b, props)),
            Ltl::Release(a, b) => Node::Release(self.add(a, props), self.add(b, props)),
            Ltl::Implies(..) | Ltl::Eventually(_) | Ltl::Always(_) => {
                unreachable!("formula not in negation normal form")
            }
        };
        self.intern(n)
    }
}

#[derive(Clone)]
struct Pending {
    incoming: BTreeSet<usize>,
    new: BTreeSet<Fid>,
    old: BTreeSet<Fid>,
    next: BTreeSet<Fid>,
}

struct TableauNode {
    incoming: BTreeSet<usize>,
    old: BTreeSet<Fid>,
}

/// Id of the pseudo-node preceding the first letter.
const INIT: usize = 0;

fn consistent(table: &Table, old: &BTreeSet<Fid>, lit: Node) -> bool {
    old.iter().all(|&g| match (table.nodes[g], lit) {
        (Node::Atom(a), Node::Atom(b)) => a == b,
        (Node::Atom(a), Node::NegAtom(b)) | (Node::NegAtom(b), Node::Atom(a)) => a != b,
        _ => true,
    })
}

fn expand(table: &Table, root: Fid) -> Vec<TableauNode> {
    // index 0 is INIT, which never carries formulas
    let mut nodes: Vec<TableauNode> = vec![TableauNode {
        incoming: BTreeSet::new(),
        old: BTreeSet::new(),
    }];
    let mut by_key: HashMap<(BTreeSet<Fid>, BTreeSet<Fid>), usize> = HashMap::new();
    let mut stack = vec![Pending {
        incoming: BTreeSet::from([INIT]),
        new: BTreeSet::from([root]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];

    while let Some(mut p) = stack.pop() {
        let Some(eta) = p.new.pop_first() else {
            let key = (p.old.clone(), p.next.clone());
            if let Some(&id) = by_key.get(&key) {
                nodes[id].incoming.extend(p.incoming);
            } else {
                let id = nodes.len();
                nodes.push(TableauNode {
                    incoming: p.incoming,
                    old: p.old,
                });
                by_key.insert(key, id);
                stack.push(Pending {
                    incoming: BTreeSet::from([id]),
                    new: p.next,
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                });
            }
            continue;
        };
        if p.old.contains(&eta) {
            stack.push(p);
            continue;
        }
        match table.nodes[eta] {
            Node::False => {}
            Node::True => {
                p.old.insert(eta);
                stack.push(p);
            }
            lit @ (Node::Atom(_) | Node::NegAtom(_)) => {
                if consistent(table, &p.old, lit) {
                    p.old.insert(eta);
                    stack.push(p);
                }
            }
            Node::And(a, b) => {
                p.new.insert(a);
                p.new.insert(b);
                p.old.insert(eta);
                stack.push(p);
            }
            Node::Next(a) => {
                p.next.insert(a);
                p.old.insert(eta);
                stack.push(p);
            }
            Node::Or(a, b) => {
                p.old.insert(eta);
                let mut left = p.clone();
                left.new.insert(a);
                p.new.insert(b);
                stack.push(p);
                stack.push(left);
            }
            Node::Until(a, b) => {
                p.old.insert(eta);
                let mut wait = p.clone();
                wait.new.insert(a);
                wait.next.insert(eta);
                p.new.insert(b);
                stack.push(wait);
                stack.push(p);
            }
            Node::Release(a, b) => {
                p.old.insert(eta);
                let mut wait = p.clone();
                wait.new.insert(b);
                wait.next.insert(eta);
                p.new.insert(a);
                p.new.insert(b);
                stack.push(wait);
                stack.push(p);
            }
        }
    }
    nodes
}

/// Letters (alphabet indices) satisfying the literals in `old`.
fn guard_letters(table: &Table, old: &BTreeSet<Fid>, n_letters: usize) -> Vec<usize> {
    let mut pos = None;
    let mut neg = BTreeSet::new();
    for &g in old {
        match table.nodes[g] {
            Node::Atom(a) => pos = Some(a),
            Node::NegAtom(a) => {
                neg.insert(a);
            }
            _ => {}
        }
    }
    match pos {
        Some(a) if neg.contains(&a) => vec![],
        Some(a) => vec![a],
        None => (0..n_letters).filter(|l| !neg.contains(l)).collect(),
    }
}

/// Büchi automaton accepting exactly the infinite words over `alphabet` that
/// satisfy `f`. The formula is brought into negation normal form first.
pub fn ltl_to_buchi(f: &Ltl, alphabet: &BTreeSet<Property>) -> BuchiAutomaton<Property> {
    let props: Vec<Property> = alphabet.iter().cloned().collect();
    let nnf = f.to_nnf();
    let mut table = Table::default();
    let root = table.add(&nnf, &props);
    let nodes = expand(&table, root);

    // fairness sets, one per until subformula, in interning order
    let fairness: Vec<Vec<bool>> = table
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(g, n)| match *n {
            Node::Until(_, b) => Some(
                nodes
                    .iter()
                    .enumerate()
                    .map(|(id, node)| id != INIT && (!node.old.contains(&g) || node.old.contains(&b)))
                    .collect(),
            ),
            _ => None,
        })
        .collect();

    // edges of the generalized automaton: q -σ-> r when q ∈ incoming(r)
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes.len()];
    for (r, node) in nodes.iter().enumerate().skip(1) {
        let letters = guard_letters(&table, &node.old, props.len());
        for &q in &node.incoming {
            for &l in &letters {
                succ[q].push((l, r));
            }
        }
    }
    for s in &mut succ {
        s.sort_unstable();
    }

    // degeneralize: state (node, counter)
    let k = fairness.len().max(1);
    let in_set = |c: usize, q: usize| fairness.get(c).is_none_or(|f| f[q]);
    let mut b = Builder::new(props.iter().cloned());
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let start = b.add_state(false);
    b.set_initial(start);
    ids.insert((INIT, 0), start);
    queue.push_back((INIT, 0));
    while let Some((q, c)) = queue.pop_front() {
        let from = ids[&(q, c)];
        let c2 = if q != INIT && in_set(c, q) { (c + 1) % k } else { c };
        for &(l, r) in &succ[q] {
            let to = *ids.entry((r, c2)).or_insert_with(|| {
                queue.push_back((r, c2));
                b.add_state(c2 == 0 && in_set(0, r))
            });
            b.add_edge_index(from, l, to);
        }
    }
    b.build().trim().0
}

/// Büchi automaton for the complement language, obtained by translating `¬f`.
pub fn ltl_to_buchi_negated(f: &Ltl, alphabet: &BTreeSet<Property>) -> BuchiAutomaton<Property> {
    ltl_to_buchi(&f.clone().not(), alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{alphabet, eval_on_lasso};
    use crate::word::LassoWord;

    fn w(u: &[&str], v: &[&str]) -> LassoWord<Property> {
        LassoWord::new(
            u.iter().map(|s| Property::new(*s)).collect(),
            v.iter().map(|s| Property::new(*s)).collect(),
        )
    }

    #[test]
    fn eventually() {
        let sigma = alphabet(["a", "b"]);
        let b = ltl_to_buchi(&Ltl::atom("a").eventually(), &sigma);
        assert!(b.accepts(&w(&["b", "b", "a"], &["b"])));
        assert!(!b.accepts(&w(&[], &["b"])));
        let nb = ltl_to_buchi_negated(&Ltl::atom("a").eventually(), &sigma);
        assert!(nb.accepts(&w(&[], &["b"])));
        assert!(!nb.accepts(&w(&["a"], &["b"])));
    }

    #[test]
    fn infinitely_often() {
        let sigma = alphabet(["H2", "varpi_1"]);
        let f = Ltl::atom("H2").eventually().always();
        let b = ltl_to_buchi(&f, &sigma);
        assert!(b.accepts(&w(&[], &["H2", "varpi_1"])));
        assert!(!b.accepts(&w(&["H2"], &["varpi_1"])));
        let nb = ltl_to_buchi_negated(&f, &sigma);
        assert!(nb.accepts(&w(&["H2"], &["varpi_1"])));
    }

    #[test]
    fn conjunction_of_two_letters_is_unsatisfiable() {
        let sigma = alphabet(["a", "b"]);
        let f = Ltl::atom("a").and(Ltl::atom("b")).eventually();
        assert!(ltl_to_buchi(&f, &sigma).is_empty());
    }

    #[test]
    fn constants() {
        let sigma = alphabet(["a"]);
        assert!(ltl_to_buchi(&Ltl::False, &sigma).is_empty());
        assert!(ltl_to_buchi(&Ltl::True, &sigma).accepts(&w(&[], &["a"])));
    }

    #[test]
    fn agrees_with_evaluator_on_small_cases() {
        let sigma = alphabet(["a", "b"]);
        let (a, b) = (Ltl::atom("a"), Ltl::atom("b"));
        let formulas = [
            a.clone().and(b.clone().next()),
            a.clone().until(b.clone()),
            a.clone().release(b.clone()).not(),
            a.clone().eventually().always().implies(b.clone().always().eventually()),
            a.clone().next().next().or(b.clone().until(a.clone().always())),
        ];
        let letters = ["a", "b"];
        let mut words = Vec::new();
        for u in 0..3usize {
            for v in 1..3usize {
                for bits in 0..(1usize << (u + v)) {
                    let pick = |i: usize| letters[(bits >> i) & 1];
                    let pu: Vec<&str> = (0..u).map(pick).collect();
                    let pv: Vec<&str> = (u..u + v).map(pick).collect();
                    words.push(w(&pu, &pv));
                }
            }
        }
        for f in &formulas {
            let aut = ltl_to_buchi(f, &sigma);
            for word in &words {
                assert_eq!(aut.accepts(word), eval_on_lasso(f, word).unwrap(), "{f} on {word}");
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let sigma = alphabet(["a", "b", "c"]);
        let f = Ltl::atom("a")
            .until(Ltl::atom("b"))
            .and(Ltl::atom("c").eventually().always());
        assert_eq!(ltl_to_buchi(&f, &sigma), ltl_to_buchi(&f, &sigma));
    }
}
