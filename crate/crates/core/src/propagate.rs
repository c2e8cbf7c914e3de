//! Steady-state propagation of the one-directional implication operator.
//!
//! Cubes of a [`ClausalState`] that share variables are linked in both
//! directions. Applying an edge imposes the source cube's projection onto the
//! shared variables on the target cube ([`bc_uni`]). A worklist keeps
//! applying edges until none changes anything. Each change only clears GREEN
//! cells, so the run stops after at most `8 × cubes` changing applications,
//! and the fixpoint reached does not depend on the scheduling order.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitspace::{bc, bc_uni, impose, Partition};
use crate::clausal::{cube_mask, Assignment, ClausalState, Instance, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropagateError {
    #[error("cannot extract an assignment: cube {0} is empty")]
    EmptyCubeVerdict(Triple),
}

/// Directed link between two cubes sharing one or two variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: Triple,
    pub target: Triple,
    pub shared: u8,
}

#[derive(Debug, Clone)]
pub struct AdjacencyGraph {
    nodes: Vec<Triple>,
    edges: Vec<Edge>,
    ends: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
}

impl AdjacencyGraph {
    pub fn nodes(&self) -> &[Triple] {
        &self.nodes
    }

    /// Edges sorted by `(source, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index pairs of the cubes `a < b` joined by an edge, ascending.
    pub fn undirected_pairs(&self) -> Vec<(usize, usize)> {
        self.ends.iter().copied().filter(|(s, t)| s < t).collect()
    }
}

pub fn build_adjacency(state: &ClausalState) -> AdjacencyGraph {
    let nodes: Vec<Triple> = state.triples().collect();
    let mut by_var: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, t) in nodes.iter().enumerate() {
        for &v in t.vars() {
            by_var.entry(v).or_default().push(i);
        }
    }
    let mut ends = Vec::new();
    for (i, t) in nodes.iter().enumerate() {
        let mut neighbours: Vec<usize> = t
            .vars()
            .iter()
            .flat_map(|v| by_var[v].iter().copied())
            .filter(|&j| j != i)
            .collect();
        neighbours.sort_unstable();
        neighbours.dedup();
        ends.extend(neighbours.into_iter().map(|j| (i, j)));
    }
    let edges = ends
        .iter()
        .map(|&(s, t)| Edge {
            source: nodes[s],
            target: nodes[t],
            shared: nodes[s].shared_with(&nodes[t]) as u8,
        })
        .collect();
    let mut outgoing = vec![Vec::new(); nodes.len()];
    for (e, &(s, _)) in ends.iter().enumerate() {
        outgoing[s].push(e);
    }
    AdjacencyGraph {
        nodes,
        edges,
        ends,
        outgoing,
    }
}

/// Imposes the source cube of `edge` on its target. Returns whether any
/// target cell turned RED.
pub fn apply_edge(state: &mut ClausalState, edge: &Edge) -> bool {
    let source = state.cube(&edge.source).expect("edge source in state");
    let target = state.cube(&edge.target).expect("edge target in state");
    let next = bc_uni(target, source).expect("adjacent cubes overlap");
    if &next == target {
        return false;
    }
    state.replace(edge.target, next);
    true
}

/// Order in which queued edges are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    Fifo,
    /// Uniformly random queued edge, from a seeded ChaCha8 stream.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub order: Order,
    /// Stop at the first all-RED cube instead of closing the whole state.
    pub early_exit: bool,
    pub record_trace: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            order: Order::Fifo,
            early_exit: true,
            record_trace: false,
        }
    }
}

impl Options {
    pub fn full_closure(order: Order) -> Self {
        Options {
            order,
            early_exit: false,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoEmptyCube,
    EmptyCube(Triple),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Deepest worklist generation processed; the initial sweep is pass 1.
    pub passes: usize,
    pub edge_applications: usize,
    pub changing_applications: usize,
    pub cells_removed: usize,
}

/// One edge application. Masks are the target cube before and after.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub source: Triple,
    pub target: Triple,
    pub removed: u32,
    pub before: u8,
    pub after: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedAssignment {
    pub assignment: Assignment,
    /// Checked by evaluating every clause.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationResult {
    pub fixpoint: ClausalState,
    pub verdict: Verdict,
    pub stats: Stats,
    pub trace: Vec<TraceRecord>,
    pub extracted: Option<ExtractedAssignment>,
}

enum Worklist {
    Fifo(VecDeque<(usize, usize)>),
    Random(Vec<(usize, usize)>, Box<ChaCha8Rng>),
}

impl Worklist {
    fn new(order: Order, items: impl Iterator<Item = usize>) -> Self {
        let items = items.map(|i| (i, 1));
        match order {
            Order::Fifo => Worklist::Fifo(items.collect()),
            Order::Random(seed) => Worklist::Random(items.collect(), Box::new(ChaCha8Rng::seed_from_u64(seed))),
        }
    }

    fn push(&mut self, item: usize, generation: usize) {
        match self {
            Worklist::Fifo(q) => q.push_back((item, generation)),
            Worklist::Random(v, _) => v.push((item, generation)),
        }
    }

    fn pop(&mut self) -> Option<(usize, usize)> {
        match self {
            Worklist::Fifo(q) => q.pop_front(),
            Worklist::Random(v, rng) => {
                if v.is_empty() {
                    None
                } else {
                    let i = rng.gen_range(0..v.len());
                    Some(v.swap_remove(i))
                }
            }
        }
    }
}

fn finish(graph: &AdjacencyGraph, cubes: Vec<Partition>, phantoms: Vec<u32>, stats: Stats, trace: Vec<TraceRecord>) -> PropagationResult {
    let fixpoint = ClausalState::from_cubes(graph.nodes.iter().copied().zip(cubes).collect(), phantoms);
    let verdict = match fixpoint.empty_cube() {
        Some(t) => Verdict::EmptyCube(t),
        None => Verdict::NoEmptyCube,
    };
    PropagationResult {
        fixpoint,
        verdict,
        stats,
        trace,
        extracted: None,
    }
}

/// Applies edges until no application changes any cube.
pub fn fixpoint(state: &ClausalState, opts: &Options) -> PropagationResult {
    let graph = build_adjacency(state);
    let mut cubes: Vec<Partition> = graph.nodes.iter().map(|t| state.cube(t).unwrap().clone()).collect();
    let mut stats = Stats::default();
    let mut trace = Vec::new();

    if opts.early_exit && cubes.iter().any(Partition::is_all_red) {
        return finish(&graph, cubes, state.phantoms().to_vec(), stats, trace);
    }

    let mut queued = vec![true; graph.ends.len()];
    let mut work = Worklist::new(opts.order, 0..graph.ends.len());
    while let Some((e, generation)) = work.pop() {
        queued[e] = false;
        stats.passes = stats.passes.max(generation);
        stats.edge_applications += 1;
        let (s, t) = graph.ends[e];
        let next = bc_uni(&cubes[t], &cubes[s]).expect("adjacent cubes overlap");
        let removed = cubes[t].green_count() - next.green_count();
        if opts.record_trace {
            trace.push(TraceRecord {
                source: graph.nodes[s],
                target: graph.nodes[t],
                removed: removed as u32,
                before: cube_mask(&cubes[t]),
                after: cube_mask(&next),
            });
        }
        if removed == 0 {
            continue;
        }
        stats.changing_applications += 1;
        stats.cells_removed += removed;
        cubes[t] = next;
        if opts.early_exit && cubes[t].is_all_red() {
            break;
        }
        for &out in &graph.outgoing[t] {
            if !queued[out] {
                queued[out] = true;
                work.push(out, generation + 1);
            }
        }
    }
    finish(&graph, cubes, state.phantoms().to_vec(), stats, trace)
}

/// Like [`fixpoint`] but applies the symmetric [`bc`] to both cubes of each
/// adjacent pair. Exists to compare against the one-directional operator.
pub fn bidirectional_fixpoint(state: &ClausalState, opts: &Options) -> PropagationResult {
    let graph = build_adjacency(state);
    let mut cubes: Vec<Partition> = graph.nodes.iter().map(|t| state.cube(t).unwrap().clone()).collect();
    let mut stats = Stats::default();
    let trace = Vec::new();

    if opts.early_exit && cubes.iter().any(Partition::is_all_red) {
        return finish(&graph, cubes, state.phantoms().to_vec(), stats, trace);
    }

    let pairs = graph.undirected_pairs();
    let mut incident = vec![Vec::new(); graph.nodes.len()];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        incident[a].push(i);
        incident[b].push(i);
    }
    let mut queued = vec![true; pairs.len()];
    let mut work = Worklist::new(opts.order, 0..pairs.len());
    'outer: while let Some((i, generation)) = work.pop() {
        queued[i] = false;
        stats.passes = stats.passes.max(generation);
        stats.edge_applications += 1;
        let (a, b) = pairs[i];
        let (na, nb) = bc(&cubes[a], &cubes[b]).expect("adjacent cubes overlap");
        let removed = cubes[a].green_count() + cubes[b].green_count() - na.green_count() - nb.green_count();
        if removed == 0 {
            continue;
        }
        stats.changing_applications += 1;
        stats.cells_removed += removed;
        for (node, next) in [(a, na), (b, nb)] {
            if cubes[node] == next {
                continue;
            }
            cubes[node] = next;
            if opts.early_exit && cubes[node].is_all_red() {
                break 'outer;
            }
            for &p in &incident[node] {
                if !queued[p] {
                    queued[p] = true;
                    work.push(p, generation + 1);
                }
            }
        }
    }
    finish(&graph, cubes, state.phantoms().to_vec(), stats, trace)
}

fn restrict(state: &ClausalState, var: u32, value: bool) -> ClausalState {
    let unit = Partition::from_mask(&[var], if value { 0b10 } else { 0b01 }).unwrap();
    let mut next = state.clone();
    for t in state.triples().filter(|t| t.contains(var)) {
        let cube = impose(state.cube(&t).unwrap(), &unit).unwrap();
        next.replace(t, cube);
    }
    next
}

/// Greedy assignment read-out from a non-empty fixpoint.
///
/// Variables are fixed in ascending order, false first. Each choice is
/// followed by a fresh fixpoint; if that empties a cube the other value is
/// tried once, and if both fail the read-out gives up with `None`. There is no
/// deeper backtracking. Unconstrained variables are false.
pub fn extract_assignment(result: &PropagationResult, instance: &Instance) -> Result<Option<ExtractedAssignment>, PropagateError> {
    if let Verdict::EmptyCube(t) = result.verdict {
        return Err(PropagateError::EmptyCubeVerdict(t));
    }
    let mut state = result.fixpoint.clone();
    let mut assignment = Assignment::all_false(instance.num_vars());
    for var in result.fixpoint.covered_vars() {
        let mut chosen = None;
        for value in [false, true] {
            let r = fixpoint(&restrict(&state, var, value), &Options::default());
            if r.verdict == Verdict::NoEmptyCube {
                state = r.fixpoint;
                chosen = Some(value);
                break;
            }
        }
        let Some(value) = chosen else {
            return Ok(None);
        };
        if var <= instance.num_vars() {
            assignment.set(var, value);
        }
    }
    let verified = instance.is_satisfied_by(&assignment);
    Ok(Some(ExtractedAssignment { assignment, verified }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clausal::build_clausal_partition;

    fn t(a: u32, b: u32, c: u32) -> Triple {
        Triple::new([a, b, c]).unwrap()
    }

    fn state_of(cubes: &[(Triple, u64)]) -> ClausalState {
        ClausalState::from_cubes(
            cubes
                .iter()
                .map(|&(t, m)| (t, Partition::from_mask(t.vars(), m).unwrap()))
                .collect(),
            vec![],
        )
    }

    fn build(num_vars: u32, clauses: &[Vec<i64>]) -> (Instance, ClausalState) {
        let inst = Instance::from_dimacs_clauses(num_vars, clauses).unwrap();
        let state = build_clausal_partition(&inst).state().unwrap();
        (inst, state)
    }

    #[test]
    fn adjacency_examples() {
        let g = build_adjacency(&state_of(&[(t(1, 2, 3), 0xFF), (t(2, 3, 4), 0xFF)]));
        assert_eq!(
            g.edges(),
            &[
                Edge { source: t(1, 2, 3), target: t(2, 3, 4), shared: 2 },
                Edge { source: t(2, 3, 4), target: t(1, 2, 3), shared: 2 },
            ]
        );
        let g = build_adjacency(&state_of(&[(t(1, 2, 3), 0xFF), (t(4, 5, 6), 0xFF)]));
        assert!(g.edges().is_empty());
        let g = build_adjacency(&state_of(&[(t(1, 2, 3), 0xFF), (t(3, 4, 5), 0xFF), (t(1, 4, 6), 0xFF)]));
        assert_eq!(g.edges().len(), 6);
        assert!(g.edges().iter().all(|e| e.shared == 1));
        assert_eq!(g.undirected_pairs().len(), 3);
    }

    #[test]
    fn apply_edge_examples() {
        let mut s = state_of(&[(t(1, 2, 3), 0xFF), (t(2, 3, 4), 0xA5)]);
        let e = Edge { source: t(1, 2, 3), target: t(2, 3, 4), shared: 2 };
        assert!(!apply_edge(&mut s, &e));
        assert_eq!(s.cube(&t(2, 3, 4)).unwrap().mask(), Some(0xA5));

        let mut s = state_of(&[(t(1, 2, 3), 0xFC), (t(2, 3, 4), 0xFF)]);
        assert!(apply_edge(&mut s, &e));
        assert_eq!(s.cube(&t(2, 3, 4)).unwrap().mask(), Some(0xEE));
        assert_eq!(s.cube(&t(1, 2, 3)).unwrap().mask(), Some(0xFC));
        assert!(!apply_edge(&mut s, &e));
    }

    #[test]
    fn single_cube_is_already_fixed() {
        let (_, s) = build(3, &[vec![1, 2, 3]]);
        let r = fixpoint(&s, &Options::default());
        assert_eq!(r.fixpoint, s);
        assert_eq!(r.stats, Stats::default());
        assert_eq!(r.verdict, Verdict::NoEmptyCube);
    }

    #[test]
    fn empty_cube_spreads() {
        let mut clauses: Vec<Vec<i64>> = (0..8)
            .map(|m| (1..=3).map(|v| if (m >> (v - 1)) & 1 == 1 { -v } else { v }).collect())
            .collect();
        clauses.push(vec![3, 4, 5]);
        let (_, s) = build(5, &clauses);
        let r = fixpoint(&s, &Options::default());
        assert_eq!(r.verdict, Verdict::EmptyCube(t(1, 2, 3)));
        let full = fixpoint(&s, &Options::full_closure(Order::Fifo));
        assert_eq!(full.verdict, Verdict::EmptyCube(t(1, 2, 3)));
        assert!(full.fixpoint.cube(&t(3, 4, 5)).unwrap().is_all_red());
    }

    #[test]
    fn units_cross_cubes() {
        // ¬u1 forces u2 through (u1∨u2∨u3)+(u1∨u2∨¬u3), which then forces u4
        // through (¬u2∨u4∨u5)+(¬u2∨u4∨¬u5).
        let (_, s) = build(5, &[vec![-1], vec![1, 2, 3], vec![1, 2, -3], vec![-2, 4, 5], vec![-2, 4, -5]]);
        let r = fixpoint(&s, &Options::default());
        assert_eq!(r.verdict, Verdict::NoEmptyCube);
        let c = r.fixpoint.cube(&t(2, 4, 5)).unwrap();
        // Every surviving cell has u2 = T and u4 = T.
        assert!(c.green_cells().all(|cell| cell & 0b011 == 0b011));
        assert!(c.green_count() > 0);
        assert!(r.stats.changing_applications <= 8 * r.fixpoint.len());
        let removed: usize = s.green_total() - r.fixpoint.green_total();
        assert_eq!(removed, r.stats.cells_removed);
    }

    #[test]
    fn trace_replays_to_fixpoint() {
        let (_, s) = build(6, &[vec![-1], vec![1, 2, 3], vec![1, 2, -3], vec![-2, 4, 5], vec![-2, 4, -5], vec![-4, -5, 6]]);
        let opts = Options { record_trace: true, ..Options::default() };
        let r = fixpoint(&s, &opts);
        assert_eq!(r.trace.len(), r.stats.edge_applications);
        let mut masks: BTreeMap<Triple, u8> = s.cubes().iter().map(|(t, p)| (*t, cube_mask(p))).collect();
        for rec in &r.trace {
            assert_eq!(masks[&rec.target], rec.before);
            assert_eq!(rec.before.count_ones() - rec.after.count_ones(), rec.removed);
            masks.insert(rec.target, rec.after);
        }
        for (t, p) in r.fixpoint.cubes() {
            assert_eq!(masks[t], cube_mask(p));
        }
    }

    #[test]
    fn orders_agree() {
        let (_, s) = build(6, &[vec![1, 2, 3], vec![-1, 2, -3], vec![-2, 3, 4], vec![2, -4, 5], vec![-5, 6, 1], vec![-6, -1, -2]]);
        let base = fixpoint(&s, &Options::full_closure(Order::Fifo));
        for seed in 0..8 {
            let r = fixpoint(&s, &Options::full_closure(Order::Random(seed)));
            assert_eq!(r.fixpoint, base.fixpoint);
        }
        assert_eq!(bidirectional_fixpoint(&s, &Options::full_closure(Order::Fifo)).fixpoint, base.fixpoint);
    }

    #[test]
    fn bidirectional_no_edges() {
        let s = state_of(&[(t(1, 2, 3), 0x7F)]);
        let r = bidirectional_fixpoint(&s, &Options::default());
        assert_eq!(r.fixpoint, s);
        assert_eq!(r.verdict, Verdict::NoEmptyCube);
    }

    #[test]
    fn extraction_examples() {
        let (inst, s) = build(3, &[vec![1, 2, 3]]);
        let r = fixpoint(&s, &Options::default());
        let got = extract_assignment(&r, &inst).unwrap().unwrap();
        assert!(got.verified);
        assert_eq!(got.assignment.values(), &[false, false, true]);

        let (inst, s) = build(4, &[vec![1, 3, 4], vec![1, 3, -4], vec![2, 3, 4]]);
        let r = fixpoint(&s, &Options::default());
        let got = extract_assignment(&r, &inst).unwrap().unwrap();
        assert!(got.verified);

        let (inst, s) = build(3, &[vec![-1]]);
        let r = fixpoint(&s, &Options::default());
        let got = extract_assignment(&r, &inst).unwrap().unwrap();
        assert!(!got.assignment.value(1));
        assert_eq!(got.assignment.len(), 3);
    }

    #[test]
    fn extraction_refuses_empty_verdict() {
        let s = state_of(&[(t(1, 2, 3), 0)]);
        let inst = Instance::from_dimacs_clauses(3, &[]).unwrap();
        let r = fixpoint(&s, &Options::default());
        assert_eq!(extract_assignment(&r, &inst), Err(PropagateError::EmptyCubeVerdict(t(1, 2, 3))));
    }

    #[test]
    fn phantoms_do_not_leak_into_assignment() {
        let (inst, s) = build(2, &[vec![1, -2], vec![2]]);
        let r = fixpoint(&s, &Options::default());
        let got = extract_assignment(&r, &inst).unwrap().unwrap();
        assert_eq!(got.assignment.values(), &[true, true]);
        assert!(got.verified);
    }
}
