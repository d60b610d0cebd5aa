//! Exact max-flow (shortest augmenting paths) and Gomory–Hu cut trees on
//! small undirected capacitated graphs.

use std::collections::VecDeque;

use crate::rational::Rat;

/// Undirected network with symmetric rational capacities, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    cap: Vec<Vec<Rat>>,
}

impl FlowNetwork {
    pub fn new(num_nodes: usize) -> FlowNetwork {
        FlowNetwork { cap: vec![vec![Rat::zero(); num_nodes]; num_nodes] }
    }

    pub fn num_nodes(&self) -> usize {
        self.cap.len()
    }

    /// Adds `c` to the capacity between `u` and `v` (both directions).
    pub fn add_capacity(&mut self, u: usize, v: usize, c: &Rat) {
        assert!(u != v, "self loop in flow network");
        assert!(!c.is_negative(), "negative capacity");
        self.cap[u][v] += c;
        self.cap[v][u] += c;
    }

    pub fn capacity(&self, u: usize, v: usize) -> &Rat {
        &self.cap[u][v]
    }

    /// Total capacity crossing between `side` and its complement.
    pub fn cut_value(&self, side: &[bool]) -> Rat {
        let n = self.num_nodes();
        let mut total = Rat::zero();
        for u in (0..n).filter(|&u| side[u]) {
            for v in (0..n).filter(|&v| !side[v]) {
                if !self.cap[u][v].is_zero() {
                    total += &self.cap[u][v];
                }
            }
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCut {
    pub value: Rat,
    /// Nodes reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
}

/// Edmonds–Karp: BFS augmenting paths, so the number of augmentations is
/// bounded independently of the capacity values.
pub fn max_flow_min_cut(net: &FlowNetwork, s: usize, t: usize) -> MinCut {
    assert!(s != t, "source equals sink");
    let n = net.num_nodes();
    let mut residual = net.cap.clone();
    let mut value = Rat::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for v in 0..n {
                if prev[v] == usize::MAX && residual[u][v].is_positive() {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            let source_side = prev.iter().map(|&p| p != usize::MAX).collect();
            return MinCut { value, source_side };
        }
        let mut bottleneck: Option<Rat> = None;
        let mut v = t;
        while v != s {
            let u = prev[v];
            if bottleneck.as_ref().is_none_or(|b| residual[u][v] < *b) {
                bottleneck = Some(residual[u][v].clone());
            }
            v = u;
        }
        let delta = bottleneck.expect("path has at least one arc");
        let mut v = t;
        while v != s {
            let u = prev[v];
            residual[u][v] -= &delta;
            residual[v][u] += &delta;
            v = u;
        }
        value += &delta;
    }
}

/// Cut tree rooted at node 0: `parent[v]` for `v ≠ 0`, with the weight of
/// the tree edge `(v, parent[v])` stored at `weight[v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GomoryHuTree {
    parent: Vec<usize>,
    weight: Vec<Rat>,
}

impl GomoryHuTree {
    pub fn num_nodes(&self) -> usize {
        self.parent.len()
    }

    /// Tree edges as `(child, parent, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rat)> + '_ {
        (1..self.parent.len()).map(move |v| (v, self.parent[v], &self.weight[v]))
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.parent.len()];
        for v in 1..self.parent.len() {
            adj[v].push(self.parent[v]);
            adj[self.parent[v]].push(v);
        }
        adj
    }

    /// Side of the tree containing `child` once the edge `(child, parent[child])` is removed.
    pub fn fundamental_side(&self, child: usize) -> Vec<bool> {
        assert!(child != 0 && child < self.parent.len());
        let adj = self.adjacency();
        let blocked = self.parent[child];
        let mut side = vec![false; self.parent.len()];
        side[child] = true;
        let mut stack = vec![child];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if side[w] || (u == child && w == blocked) {
                    continue;
                }
                side[w] = true;
                stack.push(w);
            }
        }
        side
    }

    /// Minimum edge weight on the tree path between `u` and `v`.
    pub fn min_cut_value(&self, u: usize, v: usize) -> Rat {
        assert!(u != v);
        let adj = self.adjacency();
        let n = self.parent.len();
        // DFS from u recording the smallest weight seen so far.
        let mut best: Vec<Option<Rat>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[u] = true;
        let mut stack = vec![u];
        while let Some(a) = stack.pop() {
            for &b in &adj[a] {
                if seen[b] {
                    continue;
                }
                seen[b] = true;
                let w = if self.parent[b] == a && b != 0 { &self.weight[b] } else { &self.weight[a] };
                best[b] = Some(match &best[a] {
                    Some(m) if m <= w => m.clone(),
                    _ => w.clone(),
                });
                stack.push(b);
            }
        }
        best[v].clone().expect("tree is connected")
    }
}

/// Gusfield's construction: `n − 1` max-flow calls on the original network,
/// producing a tree whose fundamental cuts are minimum cuts.
pub fn gomory_hu_tree(net: &FlowNetwork) -> GomoryHuTree {
    let n = net.num_nodes();
    let mut parent = vec![0usize; n];
    let mut weight = vec![Rat::zero(); n];
    for s in 1..n {
        let t = parent[s];
        let cut = max_flow_min_cut(net, s, t);
        weight[s] = cut.value.clone();
        for i in 0..n {
            if i != s && cut.source_side[i] && parent[i] == t {
                parent[i] = s;
            }
        }
        if t != 0 && cut.source_side[parent[t]] {
            parent[s] = parent[t];
            parent[t] = s;
            weight[s] = std::mem::replace(&mut weight[t], cut.value);
        }
    }
    GomoryHuTree { parent, weight }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn two_nodes() {
        let mut net = FlowNetwork::new(2);
        net.add_capacity(0, 1, &r(3, 2));
        let cut = max_flow_min_cut(&net, 0, 1);
        assert_eq!(cut.value, r(3, 2));
        assert_eq!(cut.source_side, vec![true, false]);
        let tree = gomory_hu_tree(&net);
        let edges: Vec<_> = tree.edges().map(|(a, b, w)| (a, b, w.clone())).collect();
        assert_eq!(edges, vec![(1, 0, r(3, 2))]);
    }

    #[test]
    fn path_bottleneck() {
        let mut net = FlowNetwork::new(3);
        net.add_capacity(0, 1, &Rat::one());
        net.add_capacity(1, 2, &r(1, 2));
        assert_eq!(max_flow_min_cut(&net, 0, 2).value, r(1, 2));
        let tree = gomory_hu_tree(&net);
        assert_eq!(tree.min_cut_value(0, 2), r(1, 2));
        assert_eq!(tree.min_cut_value(0, 1), Rat::one());
        assert_eq!(tree.min_cut_value(1, 2), r(1, 2));
    }

    #[test]
    fn diamond_has_two_disjoint_paths() {
        let mut net = FlowNetwork::new(4);
        for (u, v) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            net.add_capacity(u, v, &Rat::one());
        }
        assert_eq!(max_flow_min_cut(&net, 0, 3).value, r(2, 1));
    }

    #[test]
    fn disconnected_pairs_get_zero() {
        let mut net = FlowNetwork::new(4);
        net.add_capacity(0, 1, &Rat::one());
        net.add_capacity(2, 3, &Rat::one());
        let tree = gomory_hu_tree(&net);
        assert_eq!(tree.min_cut_value(0, 3), Rat::zero());
        assert_eq!(tree.min_cut_value(2, 3), Rat::one());
    }
}
