//! Bipartite transportation feasibility by exact maximum flow.
//!
//! Source → supply `i` (capacity `supplies[i]`), supply `i` → demand `j` for
//! every admissible edge (capacity `Σ supplies`), demand `j` → sink (capacity
//! `demands[j]`). The instance is feasible iff the max flow saturates every
//! supply; otherwise the source side of a minimum cut yields a Hall violator.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportInstance {
    pub supplies: Vec<Rational>,
    pub demands: Vec<Rational>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransportOutcome {
    /// Flow on each used edge; conserves every supply and demand exactly.
    Plan(BTreeMap<(usize, usize), Rational>),
    /// Supply indices `A` with `Σ_{A} supply > Σ_{N(A)} demand`.
    Cut(Vec<usize>),
}

impl TransportInstance {
    fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::MalformedInstance(msg));
        if let Some(q) = self.supplies.iter().chain(&self.demands).find(|q| q.is_negative()) {
            return bad(format!("negative quantity {q}"));
        }
        let s: Rational = self.supplies.iter().sum();
        let d: Rational = self.demands.iter().sum();
        if s != d {
            return bad(format!("total supply {s} differs from total demand {d}"));
        }
        for &(i, j) in &self.edges {
            if i >= self.supplies.len() || j >= self.demands.len() {
                return bad(format!("edge ({i}, {j}) out of range"));
            }
        }
        Ok(())
    }
}

struct FlowGraph {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<Rational>,
}

impl FlowGraph {
    fn new(nodes: usize) -> Self {
        FlowGraph { head: (0..nodes).map(|_| Vec::new()).collect(), to: Vec::new(), cap: Vec::new() }
    }

    fn add_edge(&mut self, a: usize, b: usize, cap: Rational) -> usize {
        let id = self.to.len();
        self.head[a].push(id);
        self.to.push(b);
        self.cap.push(cap);
        self.head[b].push(id + 1);
        self.to.push(a);
        self.cap.push(Rational::zero());
        id
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = alloc::vec![None; self.head.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let lv = level[v].unwrap_or(0);
            for &e in &self.head[v] {
                let w = self.to[e];
                if level[w].is_none() && self.cap[e].is_positive() {
                    level[w] = Some(lv + 1);
                    queue.push_back(w);
                }
            }
        }
        level
    }

    fn augment(
        &mut self,
        v: usize,
        t: usize,
        limit: Rational,
        level: &[Option<usize>],
        next: &mut [usize],
    ) -> Rational {
        if v == t {
            return limit;
        }
        while next[v] < self.head[v].len() {
            let e = self.head[v][next[v]];
            let w = self.to[e];
            let forward = matches!((level[v], level[w]), (Some(a), Some(b)) if b == a + 1);
            if forward && self.cap[e].is_positive() {
                let push = if self.cap[e] < limit { self.cap[e].clone() } else { limit.clone() };
                let got = self.augment(w, t, push, level, next);
                if got.is_positive() {
                    self.cap[e] -= &got;
                    self.cap[e ^ 1] += &got;
                    return got;
                }
            }
            next[v] += 1;
        }
        Rational::zero()
    }

    /// Dinic's algorithm: blocking flows along shortest residual paths.
    fn max_flow(&mut self, s: usize, t: usize, bound: &Rational) -> Rational {
        let mut total = Rational::zero();
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut next = alloc::vec![0usize; self.head.len()];
            loop {
                let got = self.augment(s, t, bound.clone(), &level, &mut next);
                if got.is_zero() {
                    break;
                }
                total += got;
            }
        }
    }
}

/// Decides feasibility exactly, returning a plan or a Hall-violating supply set.
pub fn transport_feasible(inst: &TransportInstance) -> Result<TransportOutcome> {
    inst.validate()?;
    let (m, k) = (inst.supplies.len(), inst.demands.len());
    let (source, sink) = (0, m + k + 1);
    let total: Rational = inst.supplies.iter().sum();
    let mut g = FlowGraph::new(m + k + 2);
    for (i, s) in inst.supplies.iter().enumerate() {
        g.add_edge(source, 1 + i, s.clone());
    }
    let mut edge_ids = Vec::with_capacity(inst.edges.len());
    for &(i, j) in &inst.edges {
        edge_ids.push((g.add_edge(1 + i, 1 + m + j, total.clone()), i, j));
    }
    for (j, d) in inst.demands.iter().enumerate() {
        g.add_edge(1 + m + j, sink, d.clone());
    }
    let flow = g.max_flow(source, sink, &total);
    if flow == total {
        let mut plan = BTreeMap::new();
        for (id, i, j) in edge_ids {
            let f = g.cap[id ^ 1].clone();
            if f.is_positive() {
                *plan.entry((i, j)).or_insert_with(Rational::zero) += f;
            }
        }
        return Ok(TransportOutcome::Plan(plan));
    }
    let reach = g.levels(source);
    let cut: Vec<usize> = (0..m).filter(|&i| reach[1 + i].is_some()).collect();
    Ok(TransportOutcome::Cut(cut))
}
