//! The polytope of fractional strongly stable matchings and LPs over it.
//!
//! A point `x ≥ 0` on the edges belongs to the polytope when
//!
//! * every vertex has fractional degree `x(E(v)) ≤ 1`,
//! * for every edge `e = {v, w}` and endpoint `v`,
//!   `x(E[∼_v e]) + x(E[≻_v e]) + x(E[≻_w e]) ≥ 1`,
//! * every odd vertex set `X` spans at most `⌊|X|/2⌋` of fractional edge mass.
//!
//! The odd-set family is exponential, so LPs over the polytope run a
//! cutting-plane loop: solve with the cuts found so far, separate, repeat.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::instance::{EdgeId, Instance, Matching, RelationMode, VertexId};
use crate::lp::{solve_lp_with, LinearProgram, LpError, LpOutcome, Relation, Row, Sense, SimplexOptions};
use crate::rational::Rat;

pub mod flow;
mod separation;

pub use separation::{
    separate_exhaustive, separate_exhaustive_with_cap, separate_padberg_rao, SeparationError, DEFAULT_EXHAUSTIVE_CAP,
};

/// Rational value per edge, indexed by [`EdgeId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeVector {
    values: Vec<Rat>,
}

impl EdgeVector {
    pub fn zeros(num_edges: usize) -> EdgeVector {
        EdgeVector { values: vec![Rat::zero(); num_edges] }
    }

    pub fn from_values(values: Vec<Rat>) -> EdgeVector {
        EdgeVector { values }
    }

    /// Characteristic vector `χ_μ`.
    pub fn from_matching(inst: &Instance, matching: &Matching) -> EdgeVector {
        let mut x = EdgeVector::zeros(inst.num_edges());
        for &e in matching.edges() {
            x.values[e.0] = Rat::one();
        }
        x
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> &Rat {
        &self.values[e.0]
    }

    pub fn set(&mut self, e: EdgeId, value: Rat) {
        self.values[e.0] = value;
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// `x(F)`.
    pub fn sum<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Rat {
        edges.into_iter().map(|e| &self.values[e.0]).sum()
    }

    /// `x(E)`.
    pub fn total(&self) -> Rat {
        self.values.iter().sum()
    }

    /// `x(E(v))`.
    pub fn degree(&self, inst: &Instance, v: VertexId) -> Rat {
        self.sum(inst.incident_edges(v))
    }

    /// `E_x`: edges with strictly positive value, by id.
    pub fn support(&self) -> Vec<EdgeId> {
        (0..self.values.len()).filter(|&i| self.values[i].is_positive()).map(EdgeId).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|x| x.is_zero() || x.is_one())
    }

    /// Edges at value exactly one, if every entry is 0 or 1.
    pub fn to_matching(&self) -> Option<Matching> {
        self.is_integral()
            .then(|| Matching::new((0..self.values.len()).filter(|&i| self.values[i].is_one()).map(EdgeId)))
    }
}

/// An odd vertex set `X` with `|X| ≥ 3`, giving the cut `x(E⟨X⟩) ≤ ⌊|X|/2⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddSetCut {
    vertices: Vec<VertexId>,
}

impl OddSetCut {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Result<OddSetCut, PolytopeError> {
        let set: BTreeSet<VertexId> = vertices.into_iter().collect();
        if set.len() < 3 || set.len().is_multiple_of(2) {
            return Err(PolytopeError::InvalidOddSet(set.len()));
        }
        Ok(OddSetCut { vertices: set.into_iter().collect() })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// `⌊|X|/2⌋`.
    pub fn rhs(&self) -> usize {
        self.vertices.len() / 2
    }

    /// `E⟨X⟩`.
    pub fn inner_edges(&self, inst: &Instance) -> Vec<EdgeId> {
        inst.edges().filter(|&e| inst.endpoints(e).iter().all(|&v| self.contains(v))).collect()
    }

    /// `x(E⟨X⟩)`.
    pub fn lhs(&self, inst: &Instance, x: &EdgeVector) -> Rat {
        x.sum(&self.inner_edges(inst))
    }

    pub fn is_violated_by(&self, inst: &Instance, x: &EdgeVector) -> bool {
        self.lhs(inst, x) > Rat::from_integer(self.rhs() as i64)
    }

    /// `{a,b,c}`.
    pub fn display(&self, inst: &Instance) -> String {
        let names: Vec<&str> = self.vertices.iter().map(|&v| inst.name(v)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Which family of the polytope a row comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowKind {
    /// `x(E(v)) ≤ 1`.
    Degree(VertexId),
    /// The stability row of `edge` at endpoint `vertex`.
    Stability { edge: EdgeId, vertex: VertexId },
    /// `x(e) = 0` for an edge outside the allowed set.
    Excluded(EdgeId),
    /// An odd-set cut.
    OddSet(OddSetCut),
}

/// An LP row over edge variables (variable `i` is `EdgeId(i)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeRow {
    pub kind: RowKind,
    pub row: Row,
}

/// Edges appearing with coefficient one in the stability row of `e` at `v`:
/// `E[∼_v e] ∪ E[≻_v e] ∪ E[≻_w e]` where `w` is the other endpoint.
pub fn stability_edges(inst: &Instance, e: EdgeId, v: VertexId) -> Vec<EdgeId> {
    let w = inst.other_endpoint(e, v);
    let mut edges = inst.relation_set(v, e, RelationMode::WeakAbove).expect("v ∈ e");
    edges.extend(inst.relation_set(w, e, RelationMode::StrictAbove).expect("w ∈ e"));
    edges.sort_unstable();
    edges
}

fn unit_row(edges: &[EdgeId], relation: Relation, rhs: Rat) -> Row {
    Row::new(edges.iter().map(|e| (e.0, Rat::one())).collect(), relation, rhs)
}

/// Degree rows, stability rows, and `x(e) = 0` for every edge outside `allowed`.
pub fn base_rows(inst: &Instance, allowed: &BTreeSet<EdgeId>) -> Vec<PolytopeRow> {
    let mut rows = Vec::new();
    for v in inst.vertices() {
        rows.push(PolytopeRow {
            kind: RowKind::Degree(v),
            row: unit_row(inst.incident_edges(v), Relation::Le, Rat::one()),
        });
    }
    for e in inst.edges() {
        for v in inst.endpoints(e) {
            rows.push(PolytopeRow {
                kind: RowKind::Stability { edge: e, vertex: v },
                row: unit_row(&stability_edges(inst, e, v), Relation::Ge, Rat::one()),
            });
        }
    }
    for e in inst.edges().filter(|e| !allowed.contains(e)) {
        rows.push(PolytopeRow { kind: RowKind::Excluded(e), row: unit_row(&[e], Relation::Eq, Rat::zero()) });
    }
    rows
}

/// The row for an odd-set cut.
pub fn odd_set_row(inst: &Instance, cut: &OddSetCut) -> PolytopeRow {
    PolytopeRow {
        kind: RowKind::OddSet(cut.clone()),
        row: unit_row(&cut.inner_edges(inst), Relation::Le, Rat::from_integer(cut.rhs() as i64)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeparationMode {
    #[default]
    PadbergRao,
    Exhaustive,
    /// Runs both oracles and fails on any violated-vs-clean disagreement.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolytopeConfig {
    pub separation: SeparationMode,
    /// Vertex cap for exhaustive separation.
    pub exhaustive_cap: usize,
    /// Cap on accumulated cuts; `None` means `10·|V|²`.
    pub max_cuts: Option<usize>,
    pub simplex: SimplexOptions,
}

impl Default for PolytopeConfig {
    fn default() -> Self {
        PolytopeConfig {
            separation: SeparationMode::default(),
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            max_cuts: None,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error("cut limit of {0} exceeded")]
    CutLimitExceeded(usize),
    #[error("odd-set cut needs an odd number of at least 3 vertices, got {0}")]
    InvalidOddSet(usize),
    #[error("separation oracles disagree: padberg-rao {padberg_rao}, exhaustive {exhaustive}")]
    OracleDisagreement { padberg_rao: bool, exhaustive: bool },
    #[error("separation returned a cut that is already in the LP")]
    RepeatedCut,
}

/// A cut together with the left-hand side that the separated point had.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutRecord {
    pub cut: OddSetCut,
    pub lhs: Rat,
}

/// `P(F)`: the polytope with every edge outside `F` forced to zero, plus the
/// odd-set cuts discovered so far. Cuts are valid for the whole polytope, so
/// they are kept when the allowed set changes.
#[derive(Debug, Clone)]
pub struct RestrictedPolytope<'a> {
    inst: &'a Instance,
    allowed: BTreeSet<EdgeId>,
    cuts: Vec<CutRecord>,
    config: PolytopeConfig,
}

impl<'a> RestrictedPolytope<'a> {
    /// The unrestricted polytope.
    pub fn new(inst: &'a Instance, config: PolytopeConfig) -> RestrictedPolytope<'a> {
        RestrictedPolytope { inst, allowed: inst.edges().collect(), cuts: Vec::new(), config }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn allowed(&self) -> &BTreeSet<EdgeId> {
        &self.allowed
    }

    pub fn restrict_to(&mut self, allowed: BTreeSet<EdgeId>) {
        self.allowed = allowed;
    }

    pub fn allow_all(&mut self) {
        self.allowed = self.inst.edges().collect();
    }

    pub fn cuts(&self) -> &[CutRecord] {
        &self.cuts
    }

    pub fn config(&self) -> &PolytopeConfig {
        &self.config
    }

    fn cut_limit(&self) -> usize {
        let n = self.inst.num_vertices();
        self.config.max_cuts.unwrap_or(10 * n * n)
    }

    /// One line per cut: `cut: {a,b,c} lhs=3/2 rhs=1`.
    pub fn cut_log(&self) -> Vec<String> {
        self.cuts
            .iter()
            .map(|c| format!("cut: {} lhs={} rhs={}", c.cut.display(self.inst), c.lhs, c.cut.rhs()))
            .collect()
    }

    /// Builds the LP over the allowed edges only; excluded variables are
    /// substituted by zero. Returns `None` when a row is trivially infeasible.
    fn build_lp(&self, objective: &[(EdgeId, Rat)], sense: Sense) -> Option<(LinearProgram, Vec<EdgeId>)> {
        let inst = self.inst;
        let vars: Vec<EdgeId> = self.allowed.iter().copied().collect();
        let mut var_of = vec![usize::MAX; inst.num_edges()];
        for (i, e) in vars.iter().enumerate() {
            var_of[e.0] = i;
        }
        let mut lp = LinearProgram::new(vars.len(), sense);
        let mut seen: HashSet<(Vec<usize>, bool, usize)> = HashSet::new();
        let mut push = |lp: &mut LinearProgram, edges: &[EdgeId], relation: Relation, rhs: usize| {
            let mut idx: Vec<usize> = edges.iter().filter(|e| var_of[e.0] != usize::MAX).map(|e| var_of[e.0]).collect();
            idx.sort_unstable();
            let ge = relation == Relation::Ge;
            if idx.is_empty() {
                // 0 ≤ k always holds; 0 ≥ 1 never does.
                return !ge;
            }
            if seen.insert((idx.clone(), ge, rhs)) {
                lp.add_row(idx.into_iter().map(|j| (j, Rat::one())).collect(), relation, Rat::from_integer(rhs as i64));
            }
            true
        };
        for v in inst.vertices() {
            push(&mut lp, inst.incident_edges(v), Relation::Le, 1);
        }
        for e in inst.edges() {
            for v in inst.endpoints(e) {
                if !push(&mut lp, &stability_edges(inst, e, v), Relation::Ge, 1) {
                    return None;
                }
            }
        }
        for c in &self.cuts {
            push(&mut lp, &c.cut.inner_edges(inst), Relation::Le, c.cut.rhs());
        }
        lp.objective = objective
            .iter()
            .filter(|(e, _)| var_of[e.0] != usize::MAX)
            .map(|(e, c)| (var_of[e.0], c.clone()))
            .collect();
        Some((lp, vars))
    }

    fn separate(&self, x: &EdgeVector) -> Result<Option<OddSetCut>, PolytopeError> {
        let inst = self.inst;
        Ok(match self.config.separation {
            SeparationMode::PadbergRao => separate_padberg_rao(inst, x)?,
            SeparationMode::Exhaustive => separate_exhaustive_with_cap(inst, x, self.config.exhaustive_cap)?,
            SeparationMode::Both => {
                let pr = separate_padberg_rao(inst, x)?;
                let ex = separate_exhaustive_with_cap(inst, x, self.config.exhaustive_cap)?;
                if pr.is_some() != ex.is_some() {
                    return Err(PolytopeError::OracleDisagreement {
                        padberg_rao: pr.is_some(),
                        exhaustive: ex.is_some(),
                    });
                }
                pr
            }
        })
    }

    /// Optimizes a linear objective over the restricted polytope.
    ///
    /// Returns `None` iff the restricted polytope is empty. A returned point
    /// satisfies every odd-set constraint, certified by a final separation call.
    pub fn optimize(
        &mut self,
        objective: &[(EdgeId, Rat)],
        sense: Sense,
    ) -> Result<Option<(EdgeVector, Rat)>, PolytopeError> {
        loop {
            let Some((lp, vars)) = self.build_lp(objective, sense) else {
                return Ok(None);
            };
            let (point, value) = match solve_lp_with(&lp, &self.config.simplex)? {
                LpOutcome::Optimal { point, value } => (point, value),
                LpOutcome::Infeasible => return Ok(None),
                LpOutcome::Unbounded => unreachable!("degree rows bound every variable"),
            };
            let mut x = EdgeVector::zeros(self.inst.num_edges());
            for (i, e) in vars.iter().enumerate() {
                x.values[e.0] = point[i].clone();
            }
            match self.separate(&x)? {
                None => return Ok(Some((x, value))),
                Some(cut) => {
                    if self.cuts.iter().any(|c| c.cut == cut) {
                        return Err(PolytopeError::RepeatedCut);
                    }
                    if self.cuts.len() >= self.cut_limit() {
                        return Err(PolytopeError::CutLimitExceeded(self.cut_limit()));
                    }
                    let lhs = cut.lhs(self.inst, &x);
                    log::debug!("cut: {} lhs={} rhs={}", cut.display(self.inst), lhs, cut.rhs());
                    self.cuts.push(CutRecord { cut, lhs });
                }
            }
        }
    }
}

/// Free-function form of [`RestrictedPolytope::optimize`].
pub fn optimize_over(
    restricted: &mut RestrictedPolytope<'_>,
    objective: &[(EdgeId, Rat)],
    sense: Sense,
) -> Result<Option<(EdgeVector, Rat)>, PolytopeError> {
    restricted.optimize(objective, sense)
}

/// The first polytope constraint a point fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WrongLength { expected: usize, got: usize },
    Negative { edge: EdgeId, value: Rat },
    Degree { vertex: VertexId, lhs: Rat },
    Stability { edge: EdgeId, vertex: VertexId, lhs: Rat },
    OddSet { cut: OddSetCut, lhs: Rat },
}

/// Checks `x` against every constraint of the (unrestricted) polytope.
/// Odd sets are enumerated up to [`DEFAULT_EXHAUSTIVE_CAP`] vertices and
/// separated with Padberg–Rao above that.
pub fn check_membership(inst: &Instance, x: &EdgeVector) -> Option<Violation> {
    if x.len() != inst.num_edges() {
        return Some(Violation::WrongLength { expected: inst.num_edges(), got: x.len() });
    }
    if let Some(e) = inst.edges().find(|&e| x.get(e).is_negative()) {
        return Some(Violation::Negative { edge: e, value: x.get(e).clone() });
    }
    for v in inst.vertices() {
        let lhs = x.degree(inst, v);
        if lhs > Rat::one() {
            return Some(Violation::Degree { vertex: v, lhs });
        }
    }
    for e in inst.edges() {
        for v in inst.endpoints(e) {
            let lhs = x.sum(&stability_edges(inst, e, v));
            if lhs < Rat::one() {
                return Some(Violation::Stability { edge: e, vertex: v, lhs });
            }
        }
    }
    let cut = if inst.num_vertices() <= DEFAULT_EXHAUSTIVE_CAP {
        separate_exhaustive(inst, x)
    } else {
        separate_padberg_rao(inst, x)
    }
    .expect("preconditions checked above");
    cut.map(|cut| {
        let lhs = cut.lhs(inst, x);
        Violation::OddSet { cut, lhs }
    })
}
