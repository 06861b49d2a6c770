//! The Cosolver2B coordination loop plus baselines and a brute-force oracle.
//!
//! The solver alternates two hill climbers over the shared exact objective:
//! a 2-OPT tour phase (travel cost shrinks at fixed plan) and a bit-flip
//! packing phase (gain grows at fixed tour). A round is one tour phase
//! followed by one packing phase; the loop stops at the first round that
//! improves nothing, or at the deadline. Every accepted move strictly
//! increases the exact gain, so the whole run is monotone and, with a
//! deterministic scan order, fully reproducible.

use std::error::Error;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construction::{
    best_initial_plan, elimination_pass, initial_tour, insertion_pass, ConstructionError,
    ScoreVariant,
};
use crate::eval::{
    commit, delta_bitflip, delta_two_opt, evaluate_full, evaluate_full_into, EvalState,
    PickingPlan, Tour,
};
use crate::instance::Instance;
use crate::neighborhoods::{
    delaunay_candidates, enumerate_bitflips, enumerate_two_opt, knn_candidates, CandidateGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fit {
    /// Commit the first strictly improving move of each scan.
    FirstFit,
    /// Scan the whole neighborhood, commit the single best improving move
    /// (ties: first encountered).
    BestFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSource {
    Delaunay,
    Knn(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionPolicy {
    /// Try all three score variants, keep the best plan.
    BestOfThree,
    Single(ScoreVariant),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub fit: Fit,
    pub time_budget: Duration,
    /// Seed for the randomized baselines (the cosolver itself is
    /// deterministic and ignores it).
    pub seed: u64,
    pub construction: ConstructionPolicy,
    pub candidates: CandidateSource,
    /// Optional step cap for the baselines; `None` runs them to the budget.
    pub step_cap: Option<u64>,
    /// Externally supplied tour (0-based, any rotation); replaces the
    /// nearest-neighbour + 2-OPT construction.
    pub external_tour: Option<Vec<usize>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            fit: Fit::BestFit,
            time_budget: Duration::from_secs(600),
            seed: 0,
            construction: ConstructionPolicy::BestOfThree,
            candidates: CandidateSource::Delaunay,
            step_cap: None,
            external_tour: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Construction,
    Tskp,
    Krp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub round: u32,
    pub phase: Phase,
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitReason {
    Converged,
    Timeout,
}

impl fmt::Display for ExitReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExitReason::Converged => write!(f, "converged"),
            ExitReason::Timeout => write!(f, "timeout"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub tour: Tour,
    pub plan: PickingPlan,
    /// Exactly `evaluate_full(tour, plan).gain()`.
    pub gain: f64,
    pub runtime: Duration,
    /// Completed TSKP+KRP rounds (0 for baselines and the oracle).
    pub rounds: u32,
    /// Committed-gain trace: construction, then one entry per phase (per
    /// accepted step for the baselines). Non-decreasing.
    pub trace: Vec<TraceEntry>,
    /// Objective evaluations performed by the search itself (previews plus
    /// full evaluations; construction scoring not included).
    pub evals: u64,
    pub exit: ExitReason,
}

/// What one optimizer phase did.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseOutcome {
    pub commits: u64,
    pub evals: u64,
    pub timed_out: bool,
}

pub fn build_candidates(inst: &Instance, source: CandidateSource) -> CandidateGraph {
    match source {
        CandidateSource::Delaunay => delaunay_candidates(&inst.cities),
        CandidateSource::Knn(k) => knn_candidates(&inst.cities, k),
    }
}

// Deadline polls are amortized over scans; a mask keeps the Instant::now()
// traffic out of tight preview loops.
const DEADLINE_POLL_MASK: u64 = 0xFF;

/// 2-OPT hill climbing over candidate-filtered reversals at fixed plan.
/// Repeats scans until one finds no strictly improving move or the deadline
/// passes; the gain never decreases.
pub fn tskp_optimize(
    inst: &Instance,
    st: &mut EvalState,
    tour: &mut Tour,
    plan: &mut PickingPlan,
    cand: &CandidateGraph,
    fit: Fit,
    deadline: Instant,
) -> PhaseOutcome {
    let mut out = PhaseOutcome::default();
    loop {
        if Instant::now() >= deadline {
            out.timed_out = true;
            return out;
        }
        let mut chosen = None;
        for (i, j) in enumerate_two_opt(tour, cand) {
            out.evals += 1;
            if out.evals & DEADLINE_POLL_MASK == 0 && Instant::now() >= deadline {
                out.timed_out = true;
                return out;
            }
            let pv = delta_two_opt(inst, st, tour, i, j);
            if pv.gain > st.gain() {
                match fit {
                    Fit::FirstFit => {
                        chosen = Some(pv);
                        break;
                    }
                    Fit::BestFit => {
                        // strict > keeps the first-encountered among equals
                        if chosen.map_or(true, |best: crate::eval::DeltaPreview| pv.gain > best.gain) {
                            chosen = Some(pv);
                        }
                    }
                }
            }
        }
        match chosen {
            Some(pv) => {
                commit(inst, st, tour, plan, pv).expect("preview taken against current state");
                out.commits += 1;
            }
            None => return out,
        }
    }
}

/// Bit-flip hill climbing over feasible single flips at fixed tour, same
/// FirstFit/BestFit semantics as [`tskp_optimize`].
pub fn krp_optimize(
    inst: &Instance,
    st: &mut EvalState,
    tour: &mut Tour,
    plan: &mut PickingPlan,
    fit: Fit,
    deadline: Instant,
) -> PhaseOutcome {
    let mut out = PhaseOutcome::default();
    loop {
        if Instant::now() >= deadline {
            out.timed_out = true;
            return out;
        }
        let mut chosen = None;
        for k in enumerate_bitflips(inst, st, plan) {
            out.evals += 1;
            if out.evals & DEADLINE_POLL_MASK == 0 && Instant::now() >= deadline {
                out.timed_out = true;
                return out;
            }
            let Ok(pv) = delta_bitflip(inst, st, tour, plan, k) else {
                continue;
            };
            if pv.gain > st.gain() {
                match fit {
                    Fit::FirstFit => {
                        chosen = Some(pv);
                        break;
                    }
                    Fit::BestFit => {
                        if chosen.map_or(true, |best: crate::eval::DeltaPreview| pv.gain > best.gain) {
                            chosen = Some(pv);
                        }
                    }
                }
            }
        }
        match chosen {
            Some(pv) => {
                commit(inst, st, tour, plan, pv).expect("preview taken against current state");
                out.commits += 1;
            }
            None => return out,
        }
    }
}

/// The full solver: construct, then alternate TSKP and KRP rounds until a
/// round improves nothing or the budget expires. Deterministic for a fixed
/// config.
pub fn cosolver2b(inst: &Instance, config: &SolverConfig) -> Result<SolveResult, ConstructionError> {
    let start = Instant::now();
    let deadline = start + config.time_budget;

    let cand = build_candidates(inst, config.candidates);
    let mut tour = initial_tour(inst, &cand, config.external_tour.as_deref())?;
    let mut plan = match config.construction {
        ConstructionPolicy::BestOfThree => best_initial_plan(inst, &tour),
        ConstructionPolicy::Single(v) => elimination_pass(inst, &tour, insertion_pass(inst, &tour, v)),
    };
    let mut st = evaluate_full(inst, &tour, &plan).expect("constructed plan is feasible");
    let mut evals = 1u64;
    let mut trace = vec![TraceEntry { round: 0, phase: Phase::Construction, gain: st.gain() }];

    let mut rounds = 0u32;
    let mut exit = ExitReason::Converged;
    loop {
        let gain_before = st.gain();
        rounds += 1;

        let t_out = tskp_optimize(inst, &mut st, &mut tour, &mut plan, &cand, config.fit, deadline);
        evals += t_out.evals;
        trace.push(TraceEntry { round: rounds, phase: Phase::Tskp, gain: st.gain() });

        let k_out = krp_optimize(inst, &mut st, &mut tour, &mut plan, config.fit, deadline);
        evals += k_out.evals;
        trace.push(TraceEntry { round: rounds, phase: Phase::Krp, gain: st.gain() });

        if t_out.timed_out || k_out.timed_out {
            exit = ExitReason::Timeout;
            break;
        }
        if !(st.gain() > gain_before) {
            break; // improvement-free round: local optimum for both phases
        }
    }

    Ok(SolveResult {
        gain: st.gain(),
        tour,
        plan,
        runtime: start.elapsed(),
        rounds,
        trace,
        evals,
        exit,
    })
}

/// Random local search baseline: fixed constructed tour, empty plan, one
/// uniformly random bit flip per step, accepted iff feasible and strictly
/// improving. Runs to the step cap or the budget.
pub fn rls_baseline(inst: &Instance, config: &SolverConfig) -> Result<SolveResult, ConstructionError> {
    let start = Instant::now();
    let deadline = start + config.time_budget;
    let cand = build_candidates(inst, config.candidates);
    let mut tour = initial_tour(inst, &cand, config.external_tour.as_deref())?;
    let m = inst.m();
    let mut plan = PickingPlan::empty(m);
    let mut st = evaluate_full(inst, &tour, &plan).expect("empty plan is feasible");
    let mut evals = 1u64;
    let mut trace = vec![TraceEntry { round: 0, phase: Phase::Construction, gain: st.gain() }];
    let mut exit = ExitReason::Converged;

    if m > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut step = 0u64;
        loop {
            if config.step_cap.map_or(false, |cap| step >= cap) {
                break;
            }
            if step & DEADLINE_POLL_MASK == 0 && Instant::now() >= deadline {
                exit = ExitReason::Timeout;
                break;
            }
            step += 1;
            let k = rng.gen_range(0..m);
            let Ok(pv) = delta_bitflip(inst, &st, &tour, &plan, k) else {
                continue; // would overflow: rejected, still consumes the step
            };
            evals += 1;
            if pv.gain > st.gain() {
                commit(inst, &mut st, &mut tour, &mut plan, pv).unwrap();
                trace.push(TraceEntry { round: 0, phase: Phase::Krp, gain: st.gain() });
            }
        }
    }

    Ok(SolveResult {
        gain: st.gain(),
        tour,
        plan,
        runtime: start.elapsed(),
        rounds: 0,
        trace,
        evals,
        exit,
    })
}

/// (1+1)-EA baseline: offspring flips each bit independently with
/// probability 1/m; infeasible offspring are rejected, otherwise it replaces
/// the parent iff its gain is at least the parent's.
pub fn ea_baseline(inst: &Instance, config: &SolverConfig) -> Result<SolveResult, ConstructionError> {
    let start = Instant::now();
    let deadline = start + config.time_budget;
    let cand = build_candidates(inst, config.candidates);
    let tour = initial_tour(inst, &cand, config.external_tour.as_deref())?;
    let m = inst.m();
    let mut plan = PickingPlan::empty(m);
    let mut st = evaluate_full(inst, &tour, &plan).expect("empty plan is feasible");
    let mut evals = 1u64;
    let mut trace = vec![TraceEntry { round: 0, phase: Phase::Construction, gain: st.gain() }];
    let mut exit = ExitReason::Converged;

    if m > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let flip_p = 1.0 / m as f64;
        let mut scratch = EvalState::new();
        let mut bits = vec![false; m];
        let mut step = 0u64;
        loop {
            if config.step_cap.map_or(false, |cap| step >= cap) {
                break;
            }
            if step & DEADLINE_POLL_MASK == 0 && Instant::now() >= deadline {
                exit = ExitReason::Timeout;
                break;
            }
            step += 1;
            bits.copy_from_slice(plan.bits());
            for b in bits.iter_mut() {
                if rng.gen::<f64>() < flip_p {
                    *b = !*b;
                }
            }
            let offspring = PickingPlan::from_bits(bits.clone());
            evals += 1;
            if evaluate_full_into(inst, &tour, &offspring, &mut scratch).is_err() {
                continue; // infeasible offspring rejected
            }
            if scratch.gain() >= st.gain() {
                if scratch.gain() > st.gain() {
                    trace.push(TraceEntry { round: 0, phase: Phase::Krp, gain: scratch.gain() });
                }
                plan = offspring;
                std::mem::swap(&mut st, &mut scratch);
            }
        }
    }

    Ok(SolveResult {
        gain: st.gain(),
        tour,
        plan,
        runtime: start.elapsed(),
        rounds: 0,
        trace,
        evals,
        exit,
    })
}

pub const ORACLE_MAX_N: usize = 9;
pub const ORACLE_MAX_M: usize = 16;

/// The instance is beyond the brute-force guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceTooLarge {
    pub n: usize,
    pub m: usize,
}

impl fmt::Display for InstanceTooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instance too large for exhaustive search: n={} m={} (limits n<={ORACLE_MAX_N}, m<={ORACLE_MAX_M})",
            self.n, self.m
        )
    }
}

impl Error for InstanceTooLarge {}

/// Advances `perm` to its lexicographic successor; false once exhausted.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Exhaustive optimum: every tour starting at home times every feasible
/// plan, scored with the exact evaluator. Ties resolve to the
/// lexicographically smallest tour, then plan. Guarded to desk sizes.
pub fn brute_force_oracle(inst: &Instance) -> Result<SolveResult, InstanceTooLarge> {
    let n = inst.n();
    let m = inst.m();
    if n > ORACLE_MAX_N || m > ORACLE_MAX_M {
        return Err(InstanceTooLarge { n, m });
    }
    let start = Instant::now();

    // feasible plans in lexicographic (z1..zm) order: item k sits at bit m-1-k
    let mut feasible_masks = Vec::new();
    for mask in 0u32..(1u32 << m) {
        let mut w = 0.0;
        for k in 0..m {
            if (mask >> (m - 1 - k)) & 1 == 1 {
                w += inst.items[k].weight;
            }
        }
        if w <= inst.capacity {
            feasible_masks.push(mask);
        }
    }

    let mut rest: Vec<usize> = (1..n).collect();
    let mut plan = PickingPlan::empty(m);
    let mut st = EvalState::new();
    let mut evals = 0u64;
    let mut best: Option<(f64, Vec<usize>, u32)> = None;

    loop {
        let mut order = Vec::with_capacity(n);
        order.push(0);
        order.extend_from_slice(&rest);
        let tour = Tour::new(order).unwrap();
        for &mask in &feasible_masks {
            for k in 0..m {
                plan.set(k, (mask >> (m - 1 - k)) & 1 == 1);
            }
            evaluate_full_into(inst, &tour, &plan, &mut st)
                .expect("mask was weight-checked already");
            evals += 1;
            // strict > keeps the earlier (lexicographically smaller) pair
            if best.as_ref().map_or(true, |(g, _, _)| st.gain() > *g) {
                best = Some((st.gain(), tour.order().to_vec(), mask));
            }
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }

    let (gain, order, mask) = best.expect("n >= 1 guarantees at least one pair");
    let mut plan_bits = vec![false; m];
    for (k, bit) in plan_bits.iter_mut().enumerate() {
        *bit = (mask >> (m - 1 - k)) & 1 == 1;
    }
    Ok(SolveResult {
        gain,
        tour: Tour::new(order).unwrap(),
        plan: PickingPlan::from_bits(plan_bits),
        runtime: start.elapsed(),
        rounds: 0,
        trace: vec![TraceEntry { round: 0, phase: Phase::Construction, gain }],
        evals,
        exit: ExitReason::Converged,
    })
}
