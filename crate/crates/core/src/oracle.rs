//! Brute-force ground truth: enumerate every matching and test each one with
//! the definitional checker in [`crate::verify`].

use std::ops::ControlFlow;

use thiserror::Error;

use crate::instance::{EdgeId, Instance, Matching};
use crate::verify::{classically_stable, strongly_stable};

pub const DEFAULT_MAX_EDGES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{got} exceeds the enumeration cap of {cap}")]
    TooLarge { got: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest edge count the matching enumeration accepts.
    pub max_edges: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_edges: DEFAULT_MAX_EDGES }
    }
}

/// Calls `visit` on every matching exactly once, starting with `∅`. The order
/// is a depth-first search over edge ids, skipping an edge before taking it.
pub fn for_each_matching<B>(
    inst: &Instance,
    config: &OracleConfig,
    mut visit: impl FnMut(&Matching) -> ControlFlow<B>,
) -> Result<Option<B>, OracleError> {
    if inst.num_edges() > config.max_edges {
        return Err(OracleError::TooLarge { got: inst.num_edges(), cap: config.max_edges });
    }
    let mut used = vec![false; inst.num_vertices()];
    let mut chosen = Vec::new();
    Ok(match search(inst, 0, &mut used, &mut chosen, &mut visit) {
        ControlFlow::Break(b) => Some(b),
        ControlFlow::Continue(()) => None,
    })
}

fn search<B>(
    inst: &Instance,
    next: usize,
    used: &mut [bool],
    chosen: &mut Vec<EdgeId>,
    visit: &mut impl FnMut(&Matching) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if next == inst.num_edges() {
        return visit(&Matching::new(chosen.iter().copied()));
    }
    search(inst, next + 1, used, chosen, visit)?;
    let e = EdgeId(next);
    let [u, v] = inst.endpoints(e);
    if !used[u.0] && !used[v.0] {
        used[u.0] = true;
        used[v.0] = true;
        chosen.push(e);
        let flow = search(inst, next + 1, used, chosen, visit);
        chosen.pop();
        used[u.0] = false;
        used[v.0] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

pub fn enumerate_matchings(inst: &Instance) -> Result<Vec<Matching>, OracleError> {
    enumerate_matchings_with(inst, &OracleConfig::default())
}

pub fn enumerate_matchings_with(inst: &Instance, config: &OracleConfig) -> Result<Vec<Matching>, OracleError> {
    let mut all = Vec::new();
    for_each_matching::<()>(inst, config, |m| {
        all.push(m.clone());
        ControlFlow::Continue(())
    })?;
    Ok(all)
}

/// First strongly stable matching in enumeration order.
pub fn brute_force_exists(inst: &Instance) -> Result<Option<Matching>, OracleError> {
    brute_force_exists_with(inst, &OracleConfig::default())
}

pub fn brute_force_exists_with(inst: &Instance, config: &OracleConfig) -> Result<Option<Matching>, OracleError> {
    for_each_matching(inst, config, |m| match strongly_stable(inst, m).expect("enumerated sets are matchings") {
        None => ControlFlow::Break(m.clone()),
        Some(_) => ControlFlow::Continue(()),
    })
}

/// Every strongly stable matching, in enumeration order.
pub fn all_strongly_stable(inst: &Instance, config: &OracleConfig) -> Result<Vec<Matching>, OracleError> {
    let mut found = Vec::new();
    for_each_matching::<()>(inst, config, |m| {
        if strongly_stable(inst, m).expect("enumerated sets are matchings").is_none() {
            found.push(m.clone());
        }
        ControlFlow::Continue(())
    })?;
    Ok(found)
}

/// First classically stable matching (no edge strictly preferred at both ends).
pub fn brute_force_classical_exists(inst: &Instance, config: &OracleConfig) -> Result<Option<Matching>, OracleError> {
    for_each_matching(inst, config, |m| match classically_stable(inst, m).expect("enumerated sets are matchings") {
        None => ControlFlow::Break(m.clone()),
        Some(_) => ControlFlow::Continue(()),
    })
}

/// All weak orders on `k` items, as rank vectors whose image is `{0..=max}`.
pub fn weak_orders(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut ranks = vec![0usize; k];
    loop {
        let max = ranks.iter().copied().max();
        if max.is_none_or(|m| (0..=m).all(|r| ranks.contains(&r))) {
            out.push(ranks.clone());
        }
        // Odometer over {0..k-1}^k.
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            ranks[i] += 1;
            if ranks[i] < k {
                break;
            }
            ranks[i] = 0;
            i += 1;
        }
    }
}

/// Largest `n` for which complete enumeration is offered.
pub const MAX_ENUMERATION_AGENTS: usize = 4;

/// Every preference profile with ties on the complete graph `K_n`.
#[derive(Debug, Clone)]
pub struct CompleteInstances {
    n: usize,
    orders: Vec<Vec<usize>>,
    next: usize,
    total: usize,
}

impl CompleteInstances {
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// The `index`-th instance; agent 0's weak order is the fastest-moving digit.
    pub fn instance_at(&self, index: usize) -> Instance {
        let n = self.n;
        let names: Vec<String> = (0..n).map(agent_name).collect();
        let mut rest = index;
        let mut prefs = Vec::with_capacity(n);
        for v in 0..n {
            let order = &self.orders[rest % self.orders.len()];
            rest /= self.orders.len();
            let partners: Vec<usize> = (0..n).filter(|&w| w != v).collect();
            let levels = order.iter().copied().max().map_or(0, |m| m + 1);
            let mut groups = vec![Vec::new(); levels];
            for (slot, &w) in partners.iter().enumerate() {
                groups[order[slot]].push(w);
            }
            prefs.push(groups);
        }
        Instance::from_preferences(names, prefs).expect("complete profiles are valid")
    }
}

impl Iterator for CompleteInstances {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        if self.next >= self.total {
            return None;
        }
        let inst = self.instance_at(self.next);
        self.next += 1;
        Some(inst)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.total - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for CompleteInstances {}

/// `a`, `b`, … for small indices, `v26`, `v27`, … beyond.
pub fn agent_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("v{}", i)
    }
}

/// All instances on `K_n` with every weak order at every agent.
pub fn enumerate_instances(n: usize) -> Result<CompleteInstances, OracleError> {
    if n > MAX_ENUMERATION_AGENTS {
        return Err(OracleError::TooLarge { got: n, cap: MAX_ENUMERATION_AGENTS });
    }
    let orders = weak_orders(n.saturating_sub(1));
    let total = orders.len().pow(n as u32);
    Ok(CompleteInstances { n, orders, next: 0, total })
}
