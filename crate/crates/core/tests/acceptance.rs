//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Every random family uses seeds `0..count`.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use common::*;
use strong_roommates::algorithm::{run, tier_set, SolveOutcome, Status};
use strong_roommates::cli;
use strong_roommates::generator::random_instance;
use strong_roommates::instance::{EdgeId, Instance, Matching, VertexId};
use strong_roommates::lp::{solve_lp, LinearProgram, LpOutcome, Sense};
use strong_roommates::oracle::{
    all_strongly_stable, brute_force_classical_exists, brute_force_exists_with, enumerate_instances, OracleConfig,
};
use strong_roommates::polytope::{
    base_rows, check_membership, separate_exhaustive, separate_padberg_rao, EdgeVector, OddSetCut, PolytopeConfig,
    RestrictedPolytope,
};
use strong_roommates::rational::Rat;
use strong_roommates::verify::strongly_stable;

const RANDOM_COUNT: u64 = 500;

/// One solved instance together with everything the oracle said about it.
struct Solved {
    label: String,
    inst: Instance,
    outcome: SolveOutcome,
    stable: Vec<Matching>,
}

type Verdict = Result<String, String>;

fn oracle_cap(inst: &Instance) -> OracleConfig {
    OracleConfig { max_edges: inst.num_edges() }
}

/// Solves, compares with brute force, and verifies any matching returned.
fn solve_and_compare(label: String, inst: Instance, keep_all: bool) -> Result<Solved, String> {
    let outcome = run(&inst).map_err(|e| format!("{}: solver error {}", label, e))?;
    let cap = oracle_cap(&inst);
    let first = brute_force_exists_with(&inst, &cap).map_err(|e| e.to_string())?;
    if outcome.exists() != first.is_some() {
        return Err(format!("{}: solver says {:?}, oracle says {:?}\n{}", label, outcome.status, first, inst));
    }
    if let Some(m) = outcome.matching() {
        if strongly_stable(&inst, m).unwrap().is_some() {
            return Err(format!("{}: returned matching is not strongly stable", label));
        }
    }
    let stable = if keep_all && first.is_some() {
        all_strongly_stable(&inst, &cap).map_err(|e| e.to_string())?
    } else {
        first.into_iter().collect()
    };
    Ok(Solved { label, inst, outcome, stable })
}

fn criterion_1(store: &mut Vec<Solved>) -> Verdict {
    let start = Instant::now();
    let family = enumerate_instances(4).map_err(|e| e.to_string())?;
    let total = family.len();
    let mut yes = 0;
    for (i, inst) in family.enumerate() {
        let solved = solve_and_compare(format!("four-agent #{}", i), inst, true)?;
        yes += solved.outcome.exists() as usize;
        store.push(solved);
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 600.0 {
        return Err(format!("{} instances agree but took {:.1}s", total, secs));
    }
    Ok(format!("{}/{} agree ({} with a strongly stable matching) in {:.1}s", total, total, yes, secs))
}

fn criterion_2(store: &mut Vec<Solved>) -> Verdict {
    let mut parts = Vec::new();
    for n in [6, 8, 10] {
        let mut yes = 0;
        for seed in 0..RANDOM_COUNT {
            let inst = random_instance(n, &Rat::new(1, 2), &Rat::new(1, 3), seed).map_err(|e| e.to_string())?;
            let solved = solve_and_compare(format!("n={} seed={}", n, seed), inst, true)?;
            yes += solved.outcome.exists() as usize;
            store.push(solved);
        }
        parts.push(format!("n={}: {}/{} agree ({} yes)", n, RANDOM_COUNT, RANDOM_COUNT, yes));
    }
    Ok(parts.join(", "))
}

fn criterion_3(store: &mut Vec<Solved>) -> Verdict {
    let mut yes = 0;
    for seed in 0..RANDOM_COUNT {
        let inst = random_instance(8, &Rat::new(1, 2), &Rat::zero(), seed).map_err(|e| e.to_string())?;
        let classical = brute_force_classical_exists(&inst, &oracle_cap(&inst)).map_err(|e| e.to_string())?;
        let solved = solve_and_compare(format!("strict seed={}", seed), inst, false)?;
        if solved.outcome.exists() != classical.is_some() {
            return Err(format!("{}: solver and classical stability disagree", solved.label));
        }
        yes += solved.outcome.exists() as usize;
        store.push(solved);
    }
    Ok(format!("{}/{} match classical stability ({} yes)", RANDOM_COUNT, RANDOM_COUNT, yes))
}

fn criterion_4(runs: &[Solved]) -> Verdict {
    let mut most = 0;
    let mut looped = 0;
    for s in runs {
        let rounds = s.outcome.iterations();
        if rounds > s.inst.num_edges() {
            return Err(format!("{}: {} rounds on {} edges", s.label, rounds, s.inst.num_edges()));
        }
        let tiers: Vec<BTreeSet<EdgeId>> = s.outcome.trace.points.iter().map(|z| tier_set(&s.inst, z)).collect();
        for (t, pair) in tiers.windows(2).enumerate() {
            if !(pair[1].is_subset(&pair[0]) && pair[1].len() < pair[0].len()) {
                return Err(format!("{}: tier set not strictly smaller after round {}", s.label, t + 1));
            }
        }
        for (it, size) in s.outcome.trace.iterations.iter().zip(tiers.iter().map(BTreeSet::len)) {
            if it.tier_size != size {
                return Err(format!(
                    "{}: trace reports |T|={} but recomputation gives {}",
                    s.label, it.tier_size, size
                ));
            }
        }
        most = most.max(rounds);
        looped += (rounds > 0) as usize;
    }
    Ok(format!("{} runs, {} entered the loop, at most {} rounds, tier sets strictly shrink", runs.len(), looped, most))
}

fn ones(inst: &Instance) -> Vec<(EdgeId, Rat)> {
    inst.edges().map(|e| (e, Rat::one())).collect()
}

fn criteria_5_and_6() -> (Verdict, Verdict) {
    let mut checked = 0;
    let mut distinct = 0;
    let mut constant = 0;
    for n in [6, 8, 10] {
        for seed in 0..RANDOM_COUNT {
            let inst = random_instance(n, &Rat::new(1, 2), &Rat::new(1, 3), seed).unwrap();
            let label = format!("n={} seed={}", n, seed);
            let mut poly = RestrictedPolytope::new(&inst, PolytopeConfig::default());
            let Some((x, high)) = poly.optimize(&ones(&inst), Sense::Maximize).unwrap() else {
                continue;
            };
            checked += 1;

            let (_, low) = poly.optimize(&ones(&inst), Sense::Minimize).unwrap().expect("nonempty");
            let active = inst.vertices().filter(|&v| x.degree(&inst, v).is_positive()).count();
            if high != low || high != Rat::new(active as i64, 2) {
                let msg =
                    format!("{}: max x(E)={} min x(E)={} |V1|/2={}", label, high, low, Rat::new(active as i64, 2));
                return (Err(String::new()), Err(msg));
            }
            constant += 1;

            // Minimize one coordinate, trying edges in a seeded order until the
            // minimizer differs from the first point. If none does, P = {x}:
            // x(E) is constant, so any other point is lower somewhere.
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
            let mut order: Vec<EdgeId> = inst.edges().collect();
            for k in (1..order.len()).rev() {
                order.swap(k, (rng.next_u64() % (k as u64 + 1)) as usize);
            }
            let mut z = x.clone();
            for &g in &order {
                let (candidate, _) = poly.optimize(&[(g, Rat::one())], Sense::Minimize).unwrap().expect("nonempty");
                z = candidate;
                if z != x {
                    break;
                }
            }
            distinct += (z != x) as usize;
            for (p, q) in [(&x, &z), (&z, &x)] {
                for e in q.support() {
                    if let Some(f) = self_dual_failure(&inst, p, e) {
                        return (Err(format!("{}: {}", label, f)), Ok(String::new()));
                    }
                }
            }
        }
    }
    (
        Ok(format!(
            "{} nonempty polytopes, {} with two distinct points (the rest are single points), all support edges tight",
            checked, distinct
        )),
        Ok(format!("max x(E) = min x(E) = |V1|/2 on all {} nonempty polytopes", constant)),
    )
}

fn inner_mass(inst: &Instance, x: &EdgeVector, cut: &OddSetCut) -> Rat {
    inst.edges()
        .filter(|&e| inst.endpoints(e).iter().all(|v| cut.vertices().contains(v)))
        .map(|e| x.get(e).clone())
        .sum()
}

fn directly_violated(inst: &Instance, x: &EdgeVector, cut: &OddSetCut) -> bool {
    let k = cut.vertices().len();
    k >= 3 && k % 2 == 1 && inner_mass(inst, x, cut) > Rat::from((k / 2) as i64)
}

/// A random point obeying the degree bounds: a scaled random vector mixed
/// with one half on an odd cycle when the graph has one among a few tries.
fn random_degree_feasible(inst: &Instance, rng: &mut ChaCha8Rng) -> EdgeVector {
    let mut below = |m: u64| rng.next_u64() % m;
    let mut y = EdgeVector::from_values(inst.edges().map(|_| Rat::new(below(5) as i64, 4)).collect());
    let load: Vec<Rat> = inst.vertices().map(|v| y.degree(inst, v)).collect();
    for e in inst.edges() {
        let [u, v] = inst.endpoints(e);
        let worst = std::cmp::max(&load[u.0], &load[v.0]).clone();
        if worst > Rat::one() {
            let scaled = y.get(e) / &worst;
            y.set(e, scaled);
        }
    }
    let n = inst.num_vertices() as u64;
    let mut cycle = EdgeVector::zeros(inst.num_edges());
    for _ in 0..20 {
        let len = if below(2) == 0 { 3 } else { 5 };
        if n < len {
            break;
        }
        let mut verts: Vec<usize> = Vec::new();
        while verts.len() < len as usize {
            let v = below(n) as usize;
            if !verts.contains(&v) {
                verts.push(v);
            }
        }
        let edges: Option<Vec<EdgeId>> = (0..verts.len())
            .map(|i| {
                let (a, b) = (verts[i], verts[(i + 1) % verts.len()]);
                inst.edge_between(VertexId(a), VertexId(b))
            })
            .collect();
        if let Some(edges) = edges {
            for e in edges {
                cycle.set(e, half());
            }
            break;
        }
    }
    let lambda = Rat::new(below(5) as i64, 4);
    let keep = Rat::one() - &lambda;
    EdgeVector::from_values(inst.edges().map(|e| &keep * y.get(e) + &lambda * cycle.get(e)).collect())
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut violated, mut clean) = (0, 0);
    for case in 0..200u64 {
        let n = 3 + (case % 10) as usize;
        let inst = random_instance(n, &Rat::new(3, 4), &Rat::zero(), case).unwrap();
        let x = random_degree_feasible(&inst, &mut rng);
        if inst.vertices().any(|v| x.degree(&inst, v) > Rat::one()) {
            return Err(format!("case {}: generated point breaks a degree bound", case));
        }
        let pr = separate_padberg_rao(&inst, &x).map_err(|e| e.to_string())?;
        let ex = separate_exhaustive(&inst, &x).map_err(|e| e.to_string())?;
        if pr.is_some() != ex.is_some() {
            return Err(format!("case {}: padberg-rao {:?} vs exhaustive {:?}", case, pr, ex));
        }
        for cut in pr.iter().chain(ex.iter()) {
            if !directly_violated(&inst, &x, cut) {
                return Err(format!("case {}: returned cut {} is not violated", case, cut.display(&inst)));
            }
        }
        if pr.is_some() {
            violated += 1;
        } else {
            clean += 1;
        }
    }
    Ok(format!("200/200 agree ({} violated, {} clean), every cut verified", violated, clean))
}

fn cli_result(path_text: &str) -> Result<String, String> {
    let dir = std::env::temp_dir().join(format!("sr-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let file = dir.join("instance.txt");
    std::fs::write(&file, path_text).map_err(|e| e.to_string())?;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(["sr", "solve", file.to_str().unwrap()], &mut out, &mut err);
    let _ = std::fs::remove_dir_all(&dir);
    if code != cli::EXIT_DECIDED {
        return Err(String::from_utf8_lossy(&err).into_owned());
    }
    Ok(String::from_utf8_lossy(&out).lines().next().unwrap_or_default().to_string())
}

fn criterion_8() -> Verdict {
    let triangle = inst(CYCLIC_TRIANGLE);
    if cli_result(CYCLIC_TRIANGLE)? != "result: no" {
        return Err("cyclic triangle is not answered no".into());
    }
    let halves = EdgeVector::from_values(vec![half(); 3]);
    let all: BTreeSet<EdgeId> = triangle.edges().collect();
    if let Some(r) = base_rows(&triangle, &all).iter().find(|r| !r.row.is_satisfied(halves.values())) {
        return Err(format!("(1/2,1/2,1/2) fails base row {:?}", r.kind));
    }
    let whole = OddSetCut::new(triangle.vertices()).unwrap();
    if separate_exhaustive(&triangle, &halves).unwrap() != Some(whole.clone())
        || separate_padberg_rao(&triangle, &halves).unwrap() != Some(whole.clone())
        || inner_mass(&triangle, &halves, &whole) != Rat::new(3, 2)
    {
        return Err("{a,b,c} does not cut off (1/2,1/2,1/2)".into());
    }
    if brute_force_exists_with(&triangle, &OracleConfig::default()).unwrap().is_some() {
        return Err("oracle finds a matching for the triangle".into());
    }

    let tie = inst(PATH_TIE);
    if cli_result(PATH_TIE)? != "result: no" {
        return Err("path with a tie is not answered no".into());
    }
    if run(&tie).unwrap().status != Status::PolytopeEmpty {
        return Err("path with a tie is not reported as an empty polytope".into());
    }
    let mut lp = LinearProgram::new(tie.num_edges(), Sense::Maximize);
    lp.rows = base_rows(&tie, &tie.edges().collect()).into_iter().map(|r| r.row).collect();
    if solve_lp(&lp).unwrap() != LpOutcome::Infeasible {
        return Err("base rows of the path with a tie are feasible".into());
    }
    if brute_force_exists_with(&tie, &OracleConfig::default()).unwrap().is_some() {
        return Err("oracle finds a matching for the path with a tie".into());
    }
    Ok("triangle cut off by {a,b,c}; path-with-tie base rows infeasible; oracle agrees on both".into())
}

fn criterion_9(runs: &[&Solved]) -> Verdict {
    let mut matchings = 0;
    let mut integral = 0;
    for s in runs {
        for m in &s.stable {
            let chi = EdgeVector::from_matching(&s.inst, m);
            if let Some(v) = check_membership(&s.inst, &chi) {
                return Err(format!("{}: stable {} fails membership: {:?}", s.label, m.display(&s.inst), v));
            }
            matchings += 1;
        }
        for z in &s.outcome.trace.points {
            if let Some(m) = z.to_matching() {
                if strongly_stable(&s.inst, &m).unwrap().is_some() {
                    return Err(format!("{}: integral point decodes to unstable {}", s.label, m.display(&s.inst)));
                }
                integral += 1;
            }
        }
    }
    Ok(format!(
        "{} oracle matchings inside the polytope, {} integral points decode to stable matchings",
        matchings, integral
    ))
}

fn main() -> ExitCode {
    let mut report: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut exhaustive = Vec::new();
    let mut random = Vec::new();
    let mut strict = Vec::new();
    report.push((1, "exhaustive four-agent agreement", criterion_1(&mut exhaustive)));
    report.push((2, "random agreement at n = 6, 8, 10", criterion_2(&mut random)));
    report.push((3, "strict preferences match classical stability", criterion_3(&mut strict)));
    let all_runs: Vec<Solved> = exhaustive.into_iter().chain(random).chain(strict).collect();
    report.push((4, "iteration bound and shrinking tier sets", criterion_4(&all_runs)));
    let (five, six) = criteria_5_and_6();
    report.push((5, "support edges of one point are tight for another", five));
    report.push((6, "x(E) constant over the polytope", six));
    report.push((7, "separation oracles agree", criterion_7()));
    report.push((8, "canonical hard cases", criterion_8()));
    let oracle_runs: Vec<&Solved> = all_runs.iter().filter(|s| !s.label.starts_with("strict")).collect();
    report.push((9, "membership round trip", criterion_9(&oracle_runs)));

    let mut failed = false;
    for (id, name, verdict) in &report {
        match verdict {
            Ok(detail) => println!("PASS criterion {} ({}): {}", id, name, detail),
            Err(why) => {
                failed = true;
                println!("FAIL criterion {} ({}): {}", id, name, why);
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
