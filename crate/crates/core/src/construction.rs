//! Initial solution construction: a decent tour first, then a greedy
//! insertion & elimination pass over the items.
//!
//! The tour comes from nearest-neighbour plus candidate-list 2-OPT descent
//! on pure length (or from an external tour file, e.g. one produced by a
//! dedicated TSP solver). Items are then ranked by one of three scores and
//! greedily inserted under the exact objective, and a bit-flip elimination
//! sweep drops picks that turned out to be dead weight once the knapsack
//! filled up.

use std::error::Error;
use std::fmt;

use crate::eval::{
    commit, delta_bitflip, evaluate_full, PickingPlan, Tour,
};
use crate::instance::Instance;
use crate::neighborhoods::{enumerate_two_opt, CandidateGraph};

/// Ranking used by [`insertion_pass`]. `ProfitPerWeightDistance` divides by
/// the remaining tour distance from the item's city back home, favouring
/// items that are carried for a short stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreVariant {
    ProfitOnly,
    ProfitPerWeight,
    ProfitPerWeightDistance,
}

/// The variants in selection-preference order (ties in
/// [`best_initial_plan`] resolve to the earlier one).
pub const SCORE_VARIANTS: [ScoreVariant; 3] =
    [ScoreVariant::ProfitOnly, ScoreVariant::ProfitPerWeight, ScoreVariant::ProfitPerWeightDistance];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    /// External tour is not a permutation of all cities (or unreadable).
    ExternalTourInvalid(String),
}

impl fmt::Display for ConstructionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionError::ExternalTourInvalid(msg) => write!(f, "invalid external tour: {msg}"),
        }
    }
}

impl Error for ConstructionError {}

/// Parses a tour file into a 0-based city sequence (not yet rotated or
/// validated against an instance). Two layouts are auto-detected: plain
/// whitespace-separated 1-based ids, or TSPLIB `TOUR_SECTION` (one id per
/// line, `-1` terminator).
pub fn parse_tour_file(text: &str) -> Result<Vec<usize>, ConstructionError> {
    let is_tsplib = text
        .lines()
        .any(|l| l.trim().eq_ignore_ascii_case("TOUR_SECTION"));

    let mut ids = Vec::new();
    if is_tsplib {
        let mut in_section = false;
        'outer: for line in text.lines() {
            let line = line.trim();
            if line.eq_ignore_ascii_case("TOUR_SECTION") {
                in_section = true;
                continue;
            }
            if !in_section || line.is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                if tok == "-1" || tok.eq_ignore_ascii_case("EOF") {
                    break 'outer;
                }
                ids.push(parse_city_id(tok)?);
            }
        }
        if !in_section {
            return Err(ConstructionError::ExternalTourInvalid("no TOUR_SECTION found".into()));
        }
    } else {
        for tok in text.split_whitespace() {
            ids.push(parse_city_id(tok)?);
        }
    }
    if ids.is_empty() {
        return Err(ConstructionError::ExternalTourInvalid("tour file lists no cities".into()));
    }
    Ok(ids)
}

fn parse_city_id(tok: &str) -> Result<usize, ConstructionError> {
    let id: usize = tok.parse().map_err(|_| {
        ConstructionError::ExternalTourInvalid(format!("cannot parse city id {tok:?}"))
    })?;
    if id == 0 {
        return Err(ConstructionError::ExternalTourInvalid("city ids are 1-based".into()));
    }
    Ok(id - 1)
}

/// Builds the starting tour. An external sequence is validated and rotated
/// to start at home; otherwise nearest-neighbour from home followed by
/// candidate-list 2-OPT descent on pure tour length. Fully deterministic
/// (nearest-neighbour ties go to the lower city index).
pub fn initial_tour(
    inst: &Instance,
    cand: &CandidateGraph,
    external: Option<&[usize]>,
) -> Result<Tour, ConstructionError> {
    let n = inst.n();
    if let Some(ids) = external {
        if ids.len() != n {
            return Err(ConstructionError::ExternalTourInvalid(format!(
                "expected {n} cities, got {}",
                ids.len()
            )));
        }
        let mut seen = vec![false; n];
        for &c in ids {
            if c >= n || seen[c] {
                return Err(ConstructionError::ExternalTourInvalid(
                    "not a permutation of all cities".into(),
                ));
            }
            seen[c] = true;
        }
        let start = ids.iter().position(|&c| c == 0).unwrap();
        let mut order = Vec::with_capacity(n);
        order.extend_from_slice(&ids[start..]);
        order.extend_from_slice(&ids[..start]);
        return Ok(Tour::new(order).expect("validated permutation starting at home"));
    }

    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    order.push(0);
    visited[0] = true;
    let mut cur = 0;
    for _ in 1..n {
        let mut best: Option<(u64, usize)> = None;
        for c in 0..n {
            if visited[c] {
                continue;
            }
            let d = inst.distance(cur, c);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, c));
            }
        }
        let (_, c) = best.unwrap();
        visited[c] = true;
        order.push(c);
        cur = c;
    }

    let mut tour = Tour::new(order).unwrap();
    descend_on_length(inst, cand, &mut tour);
    Ok(tour)
}

/// Integer length change of reversing `i..=j` (only the two boundary edges
/// move; CEIL_2D distances make this exact).
fn length_delta(inst: &Instance, tour: &Tour, i: usize, j: usize) -> i64 {
    let order = tour.order();
    let n = order.len();
    let a = order[i - 1];
    let b = order[i];
    let c = order[j];
    let d = order[(j + 1) % n];
    (inst.distance(a, c) + inst.distance(b, d)) as i64
        - (inst.distance(a, b) + inst.distance(c, d)) as i64
}

/// First-improvement 2-OPT descent on pure tour length over candidate
/// moves. Terminates because the integer length strictly decreases.
fn descend_on_length(inst: &Instance, cand: &CandidateGraph, tour: &mut Tour) {
    loop {
        let improving =
            enumerate_two_opt(tour, cand).find(|&(i, j)| length_delta(inst, tour, i, j) < 0);
        match improving {
            Some((i, j)) => tour.reverse_segment(i, j),
            None => break,
        }
    }
}

/// Remaining tour distance from each city back to home (the full cycle
/// length at home itself, just the closing leg at the last stop).
fn remaining_distance_by_city(inst: &Instance, tour: &Tour) -> Vec<f64> {
    let order = tour.order();
    let n = order.len();
    let mut by_city = vec![0.0; n];
    let mut acc = 0u64;
    for p in (0..n).rev() {
        acc += inst.distance(order[p], order[(p + 1) % n]);
        by_city[order[p]] = acc as f64;
    }
    by_city
}

fn score(inst: &Instance, item: usize, variant: ScoreVariant, d_rem: &[f64]) -> f64 {
    let it = &inst.items[item];
    match variant {
        ScoreVariant::ProfitOnly => it.profit,
        ScoreVariant::ProfitPerWeight => it.profit / it.weight,
        ScoreVariant::ProfitPerWeightDistance => {
            if it.profit == 0.0 {
                // avoids 0/0 when the remaining distance is also zero
                0.0
            } else {
                // a zero remaining distance yields +inf: carrying the item
                // is free, so it deserves the front of the queue
                it.profit / (it.weight * d_rem[it.city])
            }
        }
    }
}

/// Greedy insertion: rank items by `variant` (descending, ties to the lower
/// id) and pick each one that still fits and strictly improves the exact
/// gain. Items failing either check are skipped, not a stopping point.
pub fn insertion_pass(inst: &Instance, tour: &Tour, variant: ScoreVariant) -> PickingPlan {
    let m = inst.m();
    let mut plan = PickingPlan::empty(m);
    if m == 0 {
        return plan;
    }

    let d_rem = remaining_distance_by_city(inst, tour);
    let scores: Vec<f64> = (0..m).map(|k| score(inst, k, variant, &d_rem)).collect();
    let mut ranked: Vec<usize> = (0..m).collect();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut work_tour = tour.clone();
    let mut st = evaluate_full(inst, tour, &plan).expect("empty plan is feasible");
    for &k in &ranked {
        if st.total_weight() + inst.items[k].weight > inst.capacity {
            continue;
        }
        let pv = delta_bitflip(inst, &st, &work_tour, &plan, k)
            .expect("capacity was checked before previewing");
        if pv.gain > st.gain() {
            commit(inst, &mut st, &mut work_tour, &mut plan, pv).unwrap();
        }
    }
    plan
}

/// Bit-flip elimination: repeatedly sweep the picked items in ascending id
/// order, dropping any whose removal strictly improves the exact gain, until
/// a full sweep drops nothing. Gain-monotone and idempotent.
pub fn elimination_pass(inst: &Instance, tour: &Tour, plan: PickingPlan) -> PickingPlan {
    let mut plan = plan;
    let mut work_tour = tour.clone();
    let mut st = evaluate_full(inst, tour, &plan).expect("elimination needs a feasible plan");
    loop {
        let mut dropped = false;
        for k in 0..inst.m() {
            if !plan.is_picked(k) {
                continue;
            }
            let pv = delta_bitflip(inst, &st, &work_tour, &plan, k)
                .expect("dropping an item is always feasible");
            if pv.gain > st.gain() {
                commit(inst, &mut st, &mut work_tour, &mut plan, pv).unwrap();
                dropped = true;
            }
        }
        if !dropped {
            return plan;
        }
    }
}

/// Runs insertion + elimination for all three score variants and keeps the
/// plan with the highest exact gain (ties: earlier variant in
/// [`SCORE_VARIANTS`]).
pub fn best_initial_plan(inst: &Instance, tour: &Tour) -> PickingPlan {
    let mut best: Option<(f64, PickingPlan)> = None;
    for variant in SCORE_VARIANTS {
        let plan = elimination_pass(inst, tour, insertion_pass(inst, tour, variant));
        let gain = evaluate_full(inst, tour, &plan).unwrap().gain();
        if best.as_ref().map_or(true, |(g, _)| gain > *g) {
            best = Some((gain, plan));
        }
    }
    best.expect("at least one variant ran").1
}
