//! Seeded random instances.
//!
//! The random stream is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`),
//! a counter-based generator whose output is fixed by its seed on every
//! platform. Draws are consumed in this order:
//!
//! 1. one Bernoulli(`edge_prob`) per vertex pair `(i, j)`, `i < j`, in
//!    lexicographic order;
//! 2. for each agent in id order, a Fisher–Yates shuffle of its partners
//!    (ascending ids, swapping position `k` with a uniform index in `0..=k`
//!    for `k` from the back), then one Bernoulli(`tie_prob`) per adjacent pair
//!    of the shuffled list deciding whether the two share a tie group.
//!
//! A uniform integer below `m` takes 64-bit words until one falls under the
//! largest multiple of `m`, then reduces it modulo `m`. Bernoulli(`p/q`) is
//! "uniform below `q` is less than `p`".

use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::instance::Instance;
use crate::oracle::agent_name;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(Rat),
    #[error("probability {0} has a denominator wider than 64 bits")]
    DenominatorTooLarge(Rat),
    #[error("an instance needs at least one agent")]
    NoAgents,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorParams {
    pub n: usize,
    pub edge_prob: Rat,
    pub tie_prob: Rat,
    pub seed: u64,
}

struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    fn below(&mut self, m: u64) -> u64 {
        debug_assert!(m > 0);
        let zone = u64::MAX - (u64::MAX % m);
        loop {
            let word = self.rng.next_u64();
            if word < zone {
                return word % m;
            }
        }
    }

    fn bernoulli(&mut self, (p, q): (u64, u64)) -> bool {
        self.below(q) < p
    }
}

fn probability(p: &Rat) -> Result<(u64, u64), GeneratorError> {
    if p.is_negative() || *p > Rat::one() {
        return Err(GeneratorError::ProbabilityOutOfRange(p.clone()));
    }
    match (p.numer().to_u64(), p.denom().to_u64()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(GeneratorError::DenominatorTooLarge(p.clone())),
    }
}

/// Erdős–Rényi graph with shuffled, randomly tied preference lists. Agents
/// are named `a`, `b`, … as in [`agent_name`].
pub fn random_instance(n: usize, edge_prob: &Rat, tie_prob: &Rat, seed: u64) -> Result<Instance, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::NoAgents);
    }
    let edge_p = probability(edge_prob)?;
    let tie_p = probability(tie_prob)?;
    let mut stream = Stream { rng: ChaCha8Rng::seed_from_u64(seed) };

    let mut partners = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if stream.bernoulli(edge_p) {
                partners[i].push(j);
                partners[j].push(i);
            }
        }
    }
    let mut prefs = Vec::with_capacity(n);
    for list in &mut partners {
        for k in (1..list.len()).rev() {
            let swap = stream.below(k as u64 + 1) as usize;
            list.swap(k, swap);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, &w) in list.iter().enumerate() {
            if k > 0 && stream.bernoulli(tie_p) {
                groups.last_mut().expect("k > 0").push(w);
            } else {
                groups.push(vec![w]);
            }
        }
        prefs.push(groups);
    }
    let names = (0..n).map(agent_name).collect();
    Ok(Instance::from_preferences(names, prefs).expect("generated lists are symmetric"))
}

pub fn generate(params: &GeneratorParams) -> Result<Instance, GeneratorError> {
    random_instance(params.n, &params.edge_prob, &params.tie_prob, params.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::VertexId;

    #[test]
    fn one_agent() {
        let inst = random_instance(1, &Rat::new(1, 2), &Rat::new(1, 3), 7).unwrap();
        assert_eq!(inst.num_vertices(), 1);
        assert_eq!(inst.num_edges(), 0);
    }

    #[test]
    fn strict_when_ties_are_off() {
        for seed in 0..20 {
            let inst = random_instance(8, &Rat::new(1, 2), &Rat::zero(), seed).unwrap();
            for v in inst.vertices() {
                assert!(inst.preference_groups(v).iter().all(|g| g.len() == 1));
            }
        }
    }

    #[test]
    fn same_seed_same_text() {
        let a = random_instance(9, &Rat::new(1, 2), &Rat::new(1, 3), 42).unwrap();
        let b = random_instance(9, &Rat::new(1, 2), &Rat::new(1, 3), 42).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let c = random_instance(9, &Rat::new(1, 2), &Rat::new(1, 3), 43).unwrap();
        assert_ne!(a.to_text(), c.to_text());
    }

    #[test]
    fn extreme_probabilities() {
        let full = random_instance(5, &Rat::one(), &Rat::one(), 3).unwrap();
        assert_eq!(full.num_edges(), 10);
        for v in full.vertices() {
            assert_eq!(full.preference_groups(v).len(), 1);
        }
        let empty = random_instance(5, &Rat::zero(), &Rat::zero(), 3).unwrap();
        assert_eq!(empty.num_edges(), 0);
        assert!(empty.incident_edges(VertexId(4)).is_empty());
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(
            random_instance(3, &Rat::new(3, 2), &Rat::zero(), 0).unwrap_err(),
            GeneratorError::ProbabilityOutOfRange(Rat::new(3, 2))
        );
        assert_eq!(random_instance(0, &Rat::zero(), &Rat::zero(), 0).unwrap_err(), GeneratorError::NoAgents);
    }
}
