//! Roommates instances with ties.
//!
//! Every agent ranks its incident edges with non-negative integers: a smaller
//! rank is preferred and equal ranks are ties. Being unmatched is ranked below
//! every incident edge. The graph is defined by mutual listing.
//!
//! Text format (`#` starts a comment):
//!
//! ```text
//! agents: a b c
//! prefs a: b
//! prefs b: (a c)
//! prefs c: b
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Outcome of comparing two incident edges from one endpoint's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    Better,
    Equal,
    Worse,
}

/// Which slice of `E(v)` [`Instance::relation_set`] returns, relative to a pivot edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationMode {
    /// Edges strictly preferred to the pivot.
    StrictAbove,
    /// Edges tied with the pivot (always contains the pivot).
    Equal,
    /// Union of `StrictAbove` and `Equal`.
    WeakAbove,
    /// Edges the pivot is strictly preferred to.
    StrictBelow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("agent name {0:?} is empty or contains characters outside [A-Za-z0-9_]")]
    InvalidName(String),
    #[error("agent {0:?} declared twice")]
    DuplicateAgent(String),
    #[error("agent {agent:?} lists unknown partner index {partner}")]
    PartnerOutOfRange { agent: String, partner: usize },
    #[error("agent {0:?} lists itself")]
    SelfLoop(String),
    #[error("agent {agent:?} lists {partner:?} more than once")]
    DuplicatePartner { agent: String, partner: String },
    #[error("agent {agent:?} lists {partner:?}, but {partner:?} does not list {agent:?}")]
    AsymmetricListing { agent: String, partner: String },
    #[error("agent {0:?} has an empty tie group")]
    EmptyTieGroup(String),
    #[error("preference list count {got} does not match agent count {expected}")]
    AgentCountMismatch { expected: usize, got: usize },
    #[error("edge {edge} is not incident to {vertex}")]
    NotIncident { vertex: String, edge: String },
}

/// Parse failure, with the 1-based line it refers to.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("duplicate agent {0:?}")]
    DuplicateAgent(String),
    #[error("unknown partner {0:?}")]
    UnknownPartner(String),
    #[error("unknown agent {0:?} in prefs line")]
    UnknownAgent(String),
    #[error("{agent:?} lists {partner:?} but {partner:?} does not list {agent:?}")]
    AsymmetricListing { agent: String, partner: String },
    #[error("agent {0:?} lists itself")]
    SelfLoop(String),
    #[error("partner {0:?} listed twice")]
    DuplicatePartner(String),
    #[error("agent {0:?} has no prefs line")]
    MissingPrefs(String),
    #[error("syntax error: {0}")]
    Syntax(String),
}

/// A simple undirected graph with per-vertex weak orders over incident edges.
///
/// Immutable after construction. Edge ids are assigned in lexicographic order
/// of their (lower, higher) endpoint ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    names: Vec<String>,
    endpoints: Vec<[VertexId; 2]>,
    ranks: Vec<[usize; 2]>,
    incident: Vec<Vec<EdgeId>>,
    edge_index: HashMap<(usize, usize), EdgeId>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Instance {
    /// Builds an instance from agent names and, per agent, its tie groups of
    /// partner indices listed best to worst.
    pub fn from_preferences(names: Vec<String>, prefs: Vec<Vec<Vec<usize>>>) -> Result<Instance, InstanceError> {
        let n = names.len();
        if prefs.len() != n {
            return Err(InstanceError::AgentCountMismatch { expected: n, got: prefs.len() });
        }
        let mut seen = HashMap::new();
        for name in &names {
            if !valid_name(name) {
                return Err(InstanceError::InvalidName(name.clone()));
            }
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(InstanceError::DuplicateAgent(name.clone()));
            }
        }

        // rank_of[v][w] = rank v gives to partner w.
        let mut rank_of: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n];
        for (v, groups) in prefs.iter().enumerate() {
            for (rank, group) in groups.iter().enumerate() {
                if group.is_empty() {
                    return Err(InstanceError::EmptyTieGroup(names[v].clone()));
                }
                for &w in group {
                    if w >= n {
                        return Err(InstanceError::PartnerOutOfRange { agent: names[v].clone(), partner: w });
                    }
                    if w == v {
                        return Err(InstanceError::SelfLoop(names[v].clone()));
                    }
                    if rank_of[v].insert(w, rank).is_some() {
                        return Err(InstanceError::DuplicatePartner {
                            agent: names[v].clone(),
                            partner: names[w].clone(),
                        });
                    }
                }
            }
        }
        for v in 0..n {
            let mut partners: Vec<usize> = rank_of[v].keys().copied().collect();
            partners.sort_unstable();
            for w in partners {
                if !rank_of[w].contains_key(&v) {
                    return Err(InstanceError::AsymmetricListing {
                        agent: names[v].clone(),
                        partner: names[w].clone(),
                    });
                }
            }
        }

        let mut endpoints = Vec::new();
        let mut ranks = Vec::new();
        let mut incident = vec![Vec::new(); n];
        let mut edge_index = HashMap::new();
        for u in 0..n {
            let mut partners: Vec<usize> = rank_of[u].keys().copied().filter(|&w| w > u).collect();
            partners.sort_unstable();
            for w in partners {
                let id = EdgeId(endpoints.len());
                endpoints.push([VertexId(u), VertexId(w)]);
                ranks.push([rank_of[u][&w], rank_of[w][&u]]);
                incident[u].push(id);
                incident[w].push(id);
                edge_index.insert((u, w), id);
            }
        }
        for list in &mut incident {
            list.sort_unstable();
        }
        Ok(Instance { names, endpoints, ranks, incident, edge_index })
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.endpoints.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.endpoints.len()).map(EdgeId)
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name).map(VertexId)
    }

    /// Endpoints of `e`, lower id first.
    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.endpoints[e.0]
    }

    pub fn is_incident(&self, v: VertexId, e: EdgeId) -> bool {
        self.endpoints[e.0].contains(&v)
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_endpoint(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.endpoints[e.0];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let key = if u.0 < v.0 { (u.0, v.0) } else { (v.0, u.0) };
        self.edge_index.get(&key).copied()
    }

    /// `u-v` label with the lower-id endpoint first.
    pub fn edge_name(&self, e: EdgeId) -> String {
        let [a, b] = self.endpoints[e.0];
        format!("{}-{}", self.names[a.0], self.names[b.0])
    }

    /// `E(v)`, sorted by edge id.
    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v.0]
    }

    fn not_incident(&self, v: VertexId, e: EdgeId) -> InstanceError {
        InstanceError::NotIncident { vertex: self.name(v).to_string(), edge: self.edge_name(e) }
    }

    pub fn rank(&self, v: VertexId, e: EdgeId) -> Result<usize, InstanceError> {
        let [a, b] = self.endpoints[e.0];
        if a == v {
            Ok(self.ranks[e.0][0])
        } else if b == v {
            Ok(self.ranks[e.0][1])
        } else {
            Err(self.not_incident(v, e))
        }
    }

    /// Rank lookup for callers that already know `v ∈ e`.
    pub(crate) fn rank_at(&self, v: VertexId, e: EdgeId) -> usize {
        if self.endpoints[e.0][0] == v {
            self.ranks[e.0][0]
        } else {
            debug_assert_eq!(self.endpoints[e.0][1], v);
            self.ranks[e.0][1]
        }
    }

    pub fn compare(&self, v: VertexId, e: EdgeId, f: EdgeId) -> Result<Preference, InstanceError> {
        let (re, rf) = (self.rank(v, e)?, self.rank(v, f)?);
        Ok(match re.cmp(&rf) {
            std::cmp::Ordering::Less => Preference::Better,
            std::cmp::Ordering::Equal => Preference::Equal,
            std::cmp::Ordering::Greater => Preference::Worse,
        })
    }

    /// Edges of `E(v)` standing in relation `mode` to the pivot `e`, sorted by id.
    pub fn relation_set(&self, v: VertexId, e: EdgeId, mode: RelationMode) -> Result<Vec<EdgeId>, InstanceError> {
        let pivot = self.rank(v, e)?;
        let keep = |r: usize| match mode {
            RelationMode::StrictAbove => r < pivot,
            RelationMode::Equal => r == pivot,
            RelationMode::WeakAbove => r <= pivot,
            RelationMode::StrictBelow => r > pivot,
        };
        Ok(self.incident[v.0].iter().copied().filter(|&f| keep(self.rank_at(v, f))).collect())
    }

    /// Per-agent tie groups of partner indices, best first, with ranks compacted.
    pub fn preference_groups(&self, v: VertexId) -> Vec<Vec<VertexId>> {
        let levels: BTreeSet<usize> = self.incident[v.0].iter().map(|&e| self.rank_at(v, e)).collect();
        levels
            .into_iter()
            .map(|level| {
                self.incident[v.0]
                    .iter()
                    .filter(|&&e| self.rank_at(v, e) == level)
                    .map(|&e| self.other_endpoint(e, v))
                    .collect()
            })
            .collect()
    }

    /// Serializes to the text format accepted by [`parse_instance`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "agents: {}", self.names.join(" "))?;
        for v in self.vertices() {
            write!(f, "prefs {}:", self.name(v))?;
            for group in self.preference_groups(v) {
                if group.len() == 1 {
                    write!(f, " {}", self.name(group[0]))?;
                } else {
                    let names: Vec<&str> = group.iter().map(|&w| self.name(w)).collect();
                    write!(f, " ({})", names.join(" "))?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingParseError {
    #[error("expected u-v, got {0:?}")]
    Malformed(String),
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("{0} is not an edge of the instance")]
    NotAnEdge(String),
}

/// A set of edges, sorted by id. Disjointness is checked by
/// [`crate::verify::is_matching`], not on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Matching {
    edges: Vec<EdgeId>,
}

impl Matching {
    pub fn new(edges: impl IntoIterator<Item = EdgeId>) -> Matching {
        let mut edges: Vec<EdgeId> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        Matching { edges }
    }

    pub fn empty() -> Matching {
        Matching::default()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// `μ(v)` for every vertex; assumes the edges are disjoint.
    pub fn mates(&self, inst: &Instance) -> Vec<Option<EdgeId>> {
        let mut mate = vec![None; inst.num_vertices()];
        for &e in &self.edges {
            for v in inst.endpoints(e) {
                mate[v.0] = Some(e);
            }
        }
        mate
    }

    /// Reads whitespace-separated `u-v` labels. Overlapping pairs are accepted
    /// here and rejected by [`crate::verify`].
    pub fn parse(inst: &Instance, text: &str) -> Result<Matching, MatchingParseError> {
        let mut edges = Vec::new();
        for token in text.split_whitespace() {
            let Some((u, v)) = token.split_once('-') else {
                return Err(MatchingParseError::Malformed(token.to_string()));
            };
            let lookup = |name: &str| {
                inst.vertex_by_name(name).ok_or_else(|| MatchingParseError::UnknownAgent(name.to_string()))
            };
            let (u, v) = (lookup(u)?, lookup(v)?);
            let e = inst.edge_between(u, v).ok_or_else(|| MatchingParseError::NotAnEdge(token.to_string()))?;
            edges.push(e);
        }
        Ok(Matching::new(edges))
    }

    /// Space-separated `u-v` labels.
    pub fn display(&self, inst: &Instance) -> String {
        self.edges.iter().map(|&e| inst.edge_name(e)).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug)]
enum Token {
    Name(String),
    Group(Vec<String>),
}

fn tokenize_groups(text: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut open: Option<Vec<String>> = None;
    let mut word = String::new();

    fn flush(word: &mut String, open: &mut Option<Vec<String>>, out: &mut Vec<Token>) {
        if word.is_empty() {
            return;
        }
        let w = std::mem::take(word);
        match open {
            Some(group) => group.push(w),
            None => out.push(Token::Name(w)),
        }
    }

    for c in text.chars() {
        match c {
            '(' => {
                flush(&mut word, &mut open, &mut out);
                if open.is_some() {
                    return Err("nested tie group".into());
                }
                open = Some(Vec::new());
            }
            ')' => {
                flush(&mut word, &mut open, &mut out);
                match open.take() {
                    Some(group) if group.is_empty() => return Err("empty tie group".into()),
                    Some(group) => out.push(Token::Group(group)),
                    None => return Err("unmatched ')'".into()),
                }
            }
            c if c.is_whitespace() => flush(&mut word, &mut open, &mut out),
            c if c.is_ascii_alphanumeric() || c == '_' => word.push(c),
            c => return Err(format!("unexpected character {:?}", c)),
        }
    }
    flush(&mut word, &mut open, &mut out);
    if open.is_some() {
        return Err("unclosed '('".into());
    }
    Ok(out)
}

/// Parses the line-oriented instance format.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let err = |line: usize, kind: ParseErrorKind| ParseError { line, kind };

    let mut agents: Option<(usize, Vec<String>)> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    // Per agent: (line, groups of partner indices).
    let mut prefs: Vec<Option<(usize, Vec<Vec<usize>>)>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("agents:") {
            if agents.is_some() {
                return Err(err(line_no, ParseErrorKind::Syntax("second 'agents:' line".into())));
            }
            let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            for name in &names {
                if !valid_name(name) {
                    return Err(err(line_no, ParseErrorKind::Syntax(format!("invalid agent name {:?}", name))));
                }
                if index.insert(name.clone(), index.len()).is_some() {
                    return Err(err(line_no, ParseErrorKind::DuplicateAgent(name.clone())));
                }
            }
            prefs = vec![None; names.len()];
            agents = Some((line_no, names));
        } else if let Some(rest) = line.strip_prefix("prefs") {
            if agents.is_none() {
                return Err(err(line_no, ParseErrorKind::Syntax("prefs line before 'agents:'".into())));
            }
            let (head, body) = rest
                .split_once(':')
                .ok_or_else(|| err(line_no, ParseErrorKind::Syntax("missing ':' in prefs line".into())))?;
            let head = head.trim();
            if rest.len() == rest.trim_start().len() {
                return Err(err(line_no, ParseErrorKind::Syntax("expected 'prefs <name>:'".into())));
            }
            let v = *index.get(head).ok_or_else(|| err(line_no, ParseErrorKind::UnknownAgent(head.to_string())))?;
            if prefs[v].is_some() {
                return Err(err(line_no, ParseErrorKind::Syntax(format!("second prefs line for {:?}", head))));
            }
            let tokens = tokenize_groups(body).map_err(|m| err(line_no, ParseErrorKind::Syntax(m)))?;
            let mut groups = Vec::with_capacity(tokens.len());
            let mut listed = BTreeSet::new();
            for token in tokens {
                let names = match token {
                    Token::Name(n) => vec![n],
                    Token::Group(g) => g,
                };
                let mut group = Vec::with_capacity(names.len());
                for name in names {
                    let w =
                        *index.get(&name).ok_or_else(|| err(line_no, ParseErrorKind::UnknownPartner(name.clone())))?;
                    if w == v {
                        return Err(err(line_no, ParseErrorKind::SelfLoop(name)));
                    }
                    if !listed.insert(w) {
                        return Err(err(line_no, ParseErrorKind::DuplicatePartner(name)));
                    }
                    group.push(w);
                }
                groups.push(group);
            }
            prefs[v] = Some((line_no, groups));
        } else {
            return Err(err(line_no, ParseErrorKind::Syntax("expected 'agents:' or 'prefs <name>:'".into())));
        }
    }

    let (agents_line, names) = agents.ok_or_else(|| err(1, ParseErrorKind::Syntax("missing 'agents:' line".into())))?;
    let mut lines = Vec::with_capacity(names.len());
    let mut groups = Vec::with_capacity(names.len());
    for (v, entry) in prefs.into_iter().enumerate() {
        match entry {
            Some((line, g)) => {
                lines.push(line);
                groups.push(g);
            }
            None => return Err(err(agents_line, ParseErrorKind::MissingPrefs(names[v].clone()))),
        }
    }

    // Report asymmetric listings at the earliest offending line.
    let listed: Vec<BTreeSet<usize>> = groups.iter().map(|g| g.iter().flatten().copied().collect()).collect();
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by_key(|&v| lines[v]);
    for v in order {
        for &w in &listed[v] {
            if !listed[w].contains(&v) {
                return Err(err(
                    lines[v],
                    ParseErrorKind::AsymmetricListing { agent: names[v].clone(), partner: names[w].clone() },
                ));
            }
        }
    }

    Instance::from_preferences(names, groups).map_err(|e| err(agents_line, ParseErrorKind::Syntax(e.to_string())))
}
