//! Graph search shared by the automaton and product code: Tarjan SCCs and
//! breadth-first paths over letter-labelled edges.

use std::collections::VecDeque;

/// A finite graph with dense node ids and letter-labelled out-edges.
pub(crate) trait LabeledGraph {
    fn node_count(&self) -> usize;
    /// Out-edges as `(letter, target)` pairs, in a fixed order.
    fn out_edges(&self, node: usize) -> &[(usize, usize)];
}

/// Strongly connected components reachable from `roots`, in the order Tarjan's
/// algorithm completes them (reverse topological).
pub(crate) fn tarjan<G: LabeledGraph + ?Sized>(g: &G, roots: &[usize]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = g.node_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut sccs = Vec::new();
    let mut counter = 0usize;
    // (node, next edge to inspect)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for &root in roots {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, 0));

        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            let edges = g.out_edges(v);
            if *ei < edges.len() {
                let w = edges[*ei].1;
                *ei += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    sccs.push(comp);
                }
            }
        }
    }
    sccs
}

/// Whether an SCC contains a cycle (more than one node or a self-loop).
pub(crate) fn is_nontrivial<G: LabeledGraph + ?Sized>(g: &G, scc: &[usize]) -> bool {
    scc.len() > 1 || g.out_edges(scc[0]).iter().any(|&(_, t)| t == scc[0])
}

/// Nodes reachable from `roots`, as a membership mask.
pub(crate) fn reachable<G: LabeledGraph + ?Sized>(g: &G, roots: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; g.node_count()];
    let mut stack: Vec<usize> = Vec::new();
    for &r in roots {
        if !seen[r] {
            seen[r] = true;
            stack.push(r);
        }
    }
    while let Some(v) = stack.pop() {
        for &(_, w) in g.out_edges(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// One step of a path: the letter read and the node entered.
pub(crate) type Step = (usize, usize);

/// Shortest path from any of `sources` to a node satisfying `target`, moving
/// only through nodes accepted by `allowed`. With `nonempty`, a source only
/// counts as a target after at least one step. Ties are broken by source
/// order, then edge order.
pub(crate) fn bfs_path<G: LabeledGraph + ?Sized>(
    g: &G,
    sources: &[usize],
    nonempty: bool,
    target: impl Fn(usize) -> bool,
    allowed: impl Fn(usize) -> bool,
) -> Option<(usize, Vec<Step>)> {
    const NONE: usize = usize::MAX;
    let n = g.node_count();
    // parent[v] = (previous node, letter); sources have previous == NONE
    let mut parent: Vec<(usize, usize)> = vec![(NONE, NONE); n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();

    let rebuild = |parent: &Vec<(usize, usize)>, mut v: usize, last: Option<Step>| {
        let mut steps = Vec::new();
        if let Some(s) = last {
            steps.push(s);
        }
        while parent[v].0 != NONE {
            steps.push((parent[v].1, v));
            v = parent[v].0;
        }
        steps.reverse();
        (v, steps)
    };

    for &s in sources {
        if !seen[s] {
            if !nonempty && target(s) {
                return Some((s, Vec::new()));
            }
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(letter, w) in g.out_edges(v) {
            if !allowed(w) {
                continue;
            }
            if target(w) {
                let (origin, steps) = rebuild(&parent, v, Some((letter, w)));
                return Some((origin, steps));
            }
            if !seen[w] {
                seen[w] = true;
                parent[w] = (v, letter);
                queue.push_back(w);
            }
        }
    }
    None
}
