//! The rounding loop that decides existence of a strongly stable matching.
//!
//! Starting from a point `z` of the polytope, each round picks a fractional
//! support edge, looks at the worst support edges of one endpoint, and tries
//! to push one of them to 1 (or to 0) over `P(T_z)`. The tier set `T_z`
//! shrinks strictly every round, so the loop ends after at most `|E|` rounds
//! with either an integral point or a certificate edge that stays strictly
//! fractional over all of `P(T_z)`.

use std::collections::BTreeSet;
use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::instance::{EdgeId, Instance, Matching, VertexId};
use crate::lp::Sense;
use crate::polytope::{EdgeVector, PolytopeConfig, PolytopeError, RestrictedPolytope};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolated(String),
}

/// How `f`, `v` and `g` are picked when several choices are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lowest-id fractional edge, its lower-id endpoint, lowest-id worst edge.
    #[default]
    Lowest,
    /// Uniform choices drawn from ChaCha8 seeded with the given value.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverConfig {
    pub polytope: PolytopeConfig,
    pub tie_break: TieBreak,
}

/// `E_x`.
pub fn support(x: &EdgeVector) -> Vec<EdgeId> {
    x.support()
}

/// `V₁ = {v : x(E(v)) > 0}`. Every point of the polytope gives the same set.
pub fn active_vertices(inst: &Instance, x: &EdgeVector) -> Vec<VertexId> {
    inst.vertices().filter(|&v| x.degree(inst, v).is_positive()).collect()
}

/// Best and worst support edges at each active vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwSets {
    best: Vec<Vec<EdgeId>>,
    worst: Vec<Vec<EdgeId>>,
}

impl BwSets {
    pub fn new(inst: &Instance, x: &EdgeVector) -> BwSets {
        let mut best = vec![Vec::new(); inst.num_vertices()];
        let mut worst = vec![Vec::new(); inst.num_vertices()];
        for v in inst.vertices() {
            let held: Vec<EdgeId> =
                inst.incident_edges(v).iter().copied().filter(|&e| x.get(e).is_positive()).collect();
            let Some(top) = held.iter().map(|&e| inst.rank_at(v, e)).min() else {
                continue;
            };
            let bottom = held.iter().map(|&e| inst.rank_at(v, e)).max().unwrap_or(top);
            best[v.0] = held.iter().copied().filter(|&e| inst.rank_at(v, e) == top).collect();
            worst[v.0] = held.iter().copied().filter(|&e| inst.rank_at(v, e) == bottom).collect();
        }
        BwSets { best, worst }
    }

    /// `B_x(v)`, sorted by id; empty for `v ∉ V₁`.
    pub fn best(&self, v: VertexId) -> &[EdgeId] {
        &self.best[v.0]
    }

    /// `W_x(v)`, sorted by id; empty for `v ∉ V₁`.
    pub fn worst(&self, v: VertexId) -> &[EdgeId] {
        &self.worst[v.0]
    }

    pub fn is_active(&self, v: VertexId) -> bool {
        !self.best[v.0].is_empty()
    }

    /// Whether `e` is in `B_x(v) ∪ W_x(v)` or strictly between them at `v`.
    fn admits(&self, inst: &Instance, v: VertexId, e: EdgeId) -> bool {
        let (Some(&b), Some(&w)) = (self.best[v.0].first(), self.worst[v.0].first()) else {
            return false;
        };
        let (top, bottom, here) = (inst.rank_at(v, b), inst.rank_at(v, w), inst.rank_at(v, e));
        self.best[v.0].contains(&e) || self.worst[v.0].contains(&e) || (top < here && here < bottom)
    }
}

pub fn bw_sets(inst: &Instance, x: &EdgeVector) -> BwSets {
    BwSets::new(inst, x)
}

/// `T_x`: edges between active vertices that sit, at both ends, in the best
/// or worst support tier or strictly between the two.
pub fn tier_set(inst: &Instance, x: &EdgeVector) -> BTreeSet<EdgeId> {
    let bw = BwSets::new(inst, x);
    inst.edges().filter(|&e| inst.endpoints(e).into_iter().all(|v| bw.admits(inst, v, e))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `max x(g) = 1`; the maximizer becomes the next point.
    Max,
    /// `min x(g) = 0`; the minimizer becomes the next point.
    Min,
    /// `x(g)` is strictly fractional on all of `P(T_z)`.
    No,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Max => "max",
            Branch::Min => "min",
            Branch::No => "no",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iteration {
    /// 1-based round number.
    pub t: usize,
    pub support: Vec<EdgeId>,
    pub f: EdgeId,
    pub v: VertexId,
    pub g: EdgeId,
    pub branch: Branch,
    /// `|T_z|` for the round's starting point.
    pub tier_size: usize,
    /// Optimum of `max x(g)` over `P(T_z)`.
    pub max_value: Rat,
    /// Optimum of `min x(g)`, when that LP was needed.
    pub min_value: Option<Rat>,
}

impl Iteration {
    /// `t=<k> f=<edge> v=<name> g=<edge> branch=<max|min|no> |T|=<m>`
    pub fn line(&self, inst: &Instance) -> String {
        format!(
            "t={} f={} v={} g={} branch={} |T|={}",
            self.t,
            inst.edge_name(self.f),
            inst.name(self.v),
            inst.edge_name(self.g),
            self.branch,
            self.tier_size
        )
    }
}

/// Every point visited (`z₁, z₂, …`) and one record per round. Round `t`
/// starts from `points[t-1]` and, unless it answers No, produces `points[t]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub points: Vec<EdgeVector>,
    pub iterations: Vec<Iteration>,
}

impl Trace {
    pub fn lines(&self, inst: &Instance) -> Vec<String> {
        self.iterations.iter().map(|it| it.line(inst)).collect()
    }

    pub fn tier_sizes(&self, inst: &Instance) -> Vec<usize> {
        self.points.iter().map(|z| tier_set(inst, z).len()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Yes(Matching),
    /// `witness` is the edge that no point of `P(T_z)` sets to 0 or 1.
    No {
        witness: EdgeId,
    },
    /// The polytope itself is empty, so no strongly stable matching exists.
    PolytopeEmpty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: Status,
    pub trace: Trace,
    /// `V₁`, empty when the polytope is empty.
    pub active: Vec<VertexId>,
    /// `cut: …` lines for every odd-set cut added during the run.
    pub cut_log: Vec<String>,
}

impl SolveOutcome {
    pub fn exists(&self) -> bool {
        matches!(self.status, Status::Yes(_))
    }

    pub fn matching(&self) -> Option<&Matching> {
        match &self.status {
            Status::Yes(m) => Some(m),
            _ => None,
        }
    }

    /// The last point visited.
    pub fn final_point(&self) -> Option<&EdgeVector> {
        self.trace.points.last()
    }

    pub fn iterations(&self) -> usize {
        self.trace.iterations.len()
    }
}

enum Chooser {
    Lowest,
    Seeded(Box<ChaCha8Rng>),
}

impl Chooser {
    fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        match self {
            Chooser::Lowest => items[0],
            Chooser::Seeded(rng) => items[(rng.next_u64() % items.len() as u64) as usize],
        }
    }
}

pub fn run(inst: &Instance) -> Result<SolveOutcome, SolveError> {
    run_with(inst, &SolverConfig::default())
}

pub fn run_with(inst: &Instance, config: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    let invariant = |msg: String| Err(SolveError::InternalInvariantViolated(msg));
    let mut chooser = match config.tie_break {
        TieBreak::Lowest => Chooser::Lowest,
        TieBreak::Seeded(seed) => Chooser::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed))),
    };
    let mut poly = RestrictedPolytope::new(inst, config.polytope);
    let everything: Vec<(EdgeId, Rat)> = inst.edges().map(|e| (e, Rat::one())).collect();
    let Some((z1, _)) = poly.optimize(&everything, Sense::Maximize)? else {
        return Ok(SolveOutcome {
            status: Status::PolytopeEmpty,
            trace: Trace::default(),
            active: Vec::new(),
            cut_log: poly.cut_log(),
        });
    };
    let active = active_vertices(inst, &z1);
    let mut trace = Trace { points: vec![z1], iterations: Vec::new() };

    loop {
        let z = trace.points.last().expect("trace starts with z1");
        let fractional: Vec<EdgeId> = z.support().into_iter().filter(|&e| !z.get(e).is_one()).collect();
        if fractional.is_empty() {
            break;
        }
        let t = trace.iterations.len() + 1;
        if t > inst.num_edges() {
            return invariant(format!("round {} exceeds the edge count", t));
        }
        if active_vertices(inst, z) != active {
            return invariant(format!("active vertex set changed at round {}", t));
        }
        let f = chooser.pick(&fractional);
        let v = chooser.pick(&inst.endpoints(f));
        let g = chooser.pick(BwSets::new(inst, z).worst(v));
        let tier = tier_set(inst, z);
        if z.support().iter().any(|e| !tier.contains(e)) {
            return invariant(format!("support of z_{} is not inside its tier set", t));
        }
        let tier_size = tier.len();
        poly.restrict_to(tier);

        let target = [(g, Rat::one())];
        let Some((a, max_value)) = poly.optimize(&target, Sense::Maximize)? else {
            return invariant(format!("P(T) is empty at round {}", t));
        };
        let mut record = Iteration {
            t,
            support: z.support(),
            f,
            v,
            g,
            branch: Branch::Max,
            tier_size,
            max_value: max_value.clone(),
            min_value: None,
        };
        log::debug!("round {}: f={} g={} max={}", t, inst.edge_name(f), inst.edge_name(g), max_value);
        if max_value.is_one() {
            trace.iterations.push(record);
            trace.points.push(a);
            continue;
        }
        let Some((b, min_value)) = poly.optimize(&target, Sense::Minimize)? else {
            return invariant(format!("P(T) is empty at round {}", t));
        };
        record.min_value = Some(min_value.clone());
        if min_value.is_zero() {
            record.branch = Branch::Min;
            trace.iterations.push(record);
            trace.points.push(b);
            continue;
        }
        record.branch = Branch::No;
        trace.iterations.push(record);
        return Ok(SolveOutcome { status: Status::No { witness: g }, trace, active, cut_log: poly.cut_log() });
    }

    let z = trace.points.last().expect("trace starts with z1");
    let Some(matching) = z.to_matching() else {
        return invariant("final point is not 0/1".to_string());
    };
    if matching.edges().len() * 2 != active.len() {
        return invariant("final matching does not cover the active vertices".to_string());
    }
    Ok(SolveOutcome { status: Status::Yes(matching), trace, active, cut_log: poly.cut_log() })
}
