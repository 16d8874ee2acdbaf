//! Left-right planarity test (de Fraysseix–Rosenstiehl criterion, in the
//! formulation of Brandes' "The Left-Right Planarity Test").
//!
//! Runs in linear time. Only the test is implemented; no embedding is built.

/// Tests whether the simple undirected graph on `n` nodes with `edges` is
/// planar. Self-loops and repeated pairs are ignored.
pub fn is_planar(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut seen = std::collections::HashSet::new();
    let mut ends = Vec::new();
    for &(a, b) in edges {
        assert!(a < n && b < n, "edge ({a}, {b}) outside 0..{n}");
        if a == b || !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        let id = ends.len();
        ends.push((a, b));
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    if n > 2 && ends.len() > 3 * n - 6 {
        return false;
    }
    LrState::new(n, ends.len()).run(&adj)
}

/// `true` iff the graph stays planar once `candidate` is added.
pub fn planarity_check(n: usize, edges: &[(usize, usize)], candidate: (usize, usize)) -> bool {
    let mut all = Vec::with_capacity(edges.len() + 1);
    all.extend_from_slice(edges);
    all.push(candidate);
    is_planar(n, &all)
}

type EdgeId = usize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Interval {
    low: Option<EdgeId>,
    high: Option<EdgeId>,
}

impl Interval {
    fn single(e: EdgeId) -> Self {
        Self {
            low: Some(e),
            high: Some(e),
        }
    }

    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState {
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<EdgeId>>,
    /// `(source, target)` once the DFS has oriented the edge.
    oriented: Vec<Option<(usize, usize)>>,
    out: Vec<Vec<EdgeId>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<usize>,
    reference: Vec<Option<EdgeId>>,
    lowpt_edge: Vec<Option<EdgeId>>,
    stack_bottom: Vec<usize>,
    stack: Vec<ConflictPair>,
}

impl LrState {
    fn new(n: usize, m: usize) -> Self {
        Self {
            height: vec![None; n],
            parent_edge: vec![None; n],
            oriented: vec![None; m],
            out: vec![Vec::new(); n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            reference: vec![None; m],
            lowpt_edge: vec![None; m],
            stack_bottom: vec![0; m],
            stack: Vec::new(),
        }
    }

    fn run(mut self, adj: &[Vec<(usize, EdgeId)>]) -> bool {
        let n = adj.len();
        let mut roots = Vec::new();
        for v in 0..n {
            if self.height[v].is_none() {
                self.height[v] = Some(0);
                roots.push(v);
                self.orient(v, adj);
            }
        }
        for v in 0..n {
            let depth = &self.nesting_depth;
            self.out[v].sort_by_key(|&e| depth[e]);
        }
        roots.into_iter().all(|r| self.test(r))
    }

    fn h(&self, v: usize) -> usize {
        self.height[v].expect("visited node")
    }

    fn target(&self, e: EdgeId) -> usize {
        self.oriented[e].expect("oriented edge").1
    }

    fn source(&self, e: EdgeId) -> usize {
        self.oriented[e].expect("oriented edge").0
    }

    fn orient(&mut self, v: usize, adj: &[Vec<(usize, EdgeId)>]) {
        let parent = self.parent_edge[v];
        let hv = self.h(v);
        for &(w, e) in &adj[v] {
            if self.oriented[e].is_some() {
                continue;
            }
            self.oriented[e] = Some((v, w));
            self.out[v].push(e);
            self.lowpt[e] = hv;
            self.lowpt2[e] = hv;
            match self.height[w] {
                None => {
                    self.parent_edge[w] = Some(e);
                    self.height[w] = Some(hv + 1);
                    self.orient(w, adj);
                }
                Some(hw) => self.lowpt[e] = hw,
            }
            self.nesting_depth[e] = 2 * self.lowpt[e] + usize::from(self.lowpt2[e] < hv);
            if let Some(p) = parent {
                let (lo, lo2) = (self.lowpt[e], self.lowpt2[e]);
                if lo < self.lowpt[p] {
                    self.lowpt2[p] = self.lowpt[p].min(lo2);
                    self.lowpt[p] = lo;
                } else if lo > self.lowpt[p] {
                    self.lowpt2[p] = self.lowpt2[p].min(lo);
                } else {
                    self.lowpt2[p] = self.lowpt2[p].min(lo2);
                }
            }
        }
    }

    fn conflicting(&self, interval: &Interval, e: EdgeId) -> bool {
        match interval.high {
            Some(h) if !interval.is_empty() => self.lowpt[h] > self.lowpt[e],
            _ => false,
        }
    }

    fn lowest(&self, pair: &ConflictPair) -> usize {
        let low = |i: &Interval| self.lowpt[i.low.expect("non-empty interval")];
        if pair.left.is_empty() {
            low(&pair.right)
        } else if pair.right.is_empty() {
            low(&pair.left)
        } else {
            low(&pair.left).min(low(&pair.right))
        }
    }

    fn set_ref(&mut self, key: Option<EdgeId>, value: Option<EdgeId>) {
        if let Some(k) = key {
            self.reference[k] = value;
        }
    }

    fn test(&mut self, v: usize) -> bool {
        let parent = self.parent_edge[v];
        let hv = self.h(v);
        let edges = self.out[v].clone();
        for (k, &ei) in edges.iter().enumerate() {
            let w = self.target(ei);
            self.stack_bottom[ei] = self.stack.len();
            if self.parent_edge[w] == Some(ei) {
                if !self.test(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = Some(ei);
                self.stack.push(ConflictPair {
                    left: Interval::default(),
                    right: Interval::single(ei),
                });
            }
            if self.lowpt[ei] < hv {
                let e = parent.expect("return edge below the root");
                if k == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if let Some(e) = parent {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: EdgeId, e: EdgeId) -> bool {
        let mut p = ConflictPair::default();
        loop {
            let mut q = self.stack.pop().expect("conflict pair above stack bottom");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let q_low = q.right.low.expect("non-empty right interval");
            if self.lowpt[q_low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.set_ref(p.right.low, q.right.high);
                }
                p.right.low = q.right.low;
            } else {
                self.reference[q_low] = self.lowpt_edge[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last().copied() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("peeked");
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            self.set_ref(p.right.low, q.right.high);
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else {
                self.set_ref(p.left.low, q.left.high);
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: EdgeId) {
        let u = self.source(e);
        let hu = self.h(u);
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != hu {
                break;
            }
            self.stack.pop();
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.target(h) != u {
                    break;
                }
                p.left.high = self.reference[h];
            }
            if p.left.high.is_none() && p.left.low.is_some() {
                self.set_ref(p.left.low, p.right.low);
                p.left.low = None;
            }
            while let Some(h) = p.right.high {
                if self.target(h) != u {
                    break;
                }
                p.right.high = self.reference[h];
            }
            if p.right.high.is_none() && p.right.low.is_some() {
                self.set_ref(p.right.low, p.left.low);
                p.right.low = None;
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < hu {
            let top = self.stack.last().copied().expect("pending return edges");
            let (hl, hr) = (top.left.high, top.right.high);
            self.reference[e] = match (hl, hr) {
                (Some(l), None) => Some(l),
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                _ => hr,
            };
        }
    }
}
