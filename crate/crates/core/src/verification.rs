//! Cross-checking machinery: reference fixtures, random problem generators,
//! an independent slow evaluator, and the property suites the `verify`
//! command and the acceptance tests run.
//!
//! Everything here is deliberately naive. The point is to catch the fast
//! paths lying, so the checks recompute from first principles (full scans,
//! exhaustive witnesses) instead of reusing the solver's shortcuts.

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cosolver::{brute_force_oracle, cosolver2b, SolverConfig};
use crate::eval::{
    commit, delta_bitflip, delta_two_opt, evaluate_full, DeltaPreview, EvalError, PickingPlan,
    Tour,
};
use crate::instance::{City, Instance, Item};
use crate::neighborhoods::{bounding_diagonal, bowyer_watson, delaunay_candidates, in_circumcircle};

/// The 3-city reference instance: cities at (0,0), (3,0), (0,4); an item of
/// profit 20 / weight 2 at the second city and one of profit 30 / weight 3
/// at the third; capacity 3, speeds 0.1..1.0, renting ratio 1. Its global
/// optimum (gain 3.5) is small enough to confirm by hand.
pub fn tiny3() -> Instance {
    Instance::new(
        "tiny3",
        "uncorr",
        3.0,
        0.1,
        1.0,
        1.0,
        vec![
            City { x: 0.0, y: 0.0 },
            City { x: 3.0, y: 0.0 },
            City { x: 0.0, y: 4.0 },
        ],
        vec![
            Item { profit: 20.0, weight: 2.0, city: 1 },
            Item { profit: 30.0, weight: 3.0, city: 2 },
        ],
    )
    .expect("fixture is well formed")
}

/// Exhaustive Delaunay membership test: the segment `a-b` is a Delaunay edge
/// iff some third point forms a triangle whose circumcircle holds no other
/// point strictly inside. Quadratic per witness, cubic overall; fine for the
/// point-set sizes the suites use.
pub fn is_delaunay_edge_brute(pts: &[(f64, f64)], a: usize, b: usize) -> bool {
    let n = pts.len();
    if n == 2 {
        return true; // a lone segment has nothing to certify against
    }
    let eps = 1e-10 * bounding_diagonal(pts);
    'witness: for c in 0..n {
        if c == a || c == b {
            continue;
        }
        // degenerate witness triangles certify nothing
        let area = (pts[b].0 - pts[a].0) * (pts[c].1 - pts[a].1)
            - (pts[b].1 - pts[a].1) * (pts[c].0 - pts[a].0);
        if area.abs() <= eps {
            continue;
        }
        for d in 0..n {
            if d == a || d == b || d == c {
                continue;
            }
            if in_circumcircle(pts[a], pts[b], pts[c], pts[d], eps) {
                continue 'witness;
            }
        }
        return true;
    }
    false
}

/// Size/value ranges for random instance generation. Coordinates, profits
/// and weights are integers (stored as floats), which keeps the arithmetic
/// of small test instances exactly representable.
#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    /// Inclusive city-count range.
    pub n: (usize, usize),
    /// Inclusive item-count range.
    pub m: (usize, usize),
    pub coord_max: u64,
    pub profit_max: u64,
    pub weight_max: u64,
    /// Knapsack capacity as a fraction of the total item weight.
    pub capacity_fraction: f64,
}

impl InstanceShape {
    /// Oracle-checkable sizes.
    pub fn tiny() -> Self {
        InstanceShape {
            n: (4, 7),
            m: (2, 8),
            coord_max: 100,
            profit_max: 100,
            weight_max: 50,
            capacity_fraction: 0.5,
        }
    }

    /// Sizes for stress-testing the evaluators.
    pub fn medium() -> Self {
        InstanceShape {
            n: (2, 100),
            m: (1, 500),
            coord_max: 1000,
            profit_max: 1000,
            weight_max: 100,
            capacity_fraction: 0.5,
        }
    }
}

/// A reproducible batch: same `(count, seed, shape, prefix)` always yields
/// the same instances, so independent checks can share a corpus.
pub fn random_instances(
    count: usize,
    seed: u64,
    shape: &InstanceShape,
    prefix: &str,
) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_instance(&mut rng, shape, &format!("{prefix}-{i:03}"))).collect()
}

pub fn random_instance(rng: &mut ChaCha8Rng, shape: &InstanceShape, name: &str) -> Instance {
    let n = rng.gen_range(shape.n.0..=shape.n.1);
    let m = rng.gen_range(shape.m.0..=shape.m.1);
    let cities: Vec<City> = (0..n)
        .map(|_| City {
            x: rng.gen_range(0..=shape.coord_max) as f64,
            y: rng.gen_range(0..=shape.coord_max) as f64,
        })
        .collect();
    let items: Vec<Item> = (0..m)
        .map(|_| Item {
            profit: rng.gen_range(1..=shape.profit_max) as f64,
            weight: rng.gen_range(1..=shape.weight_max) as f64,
            // items never sit at the home city, matching the file format
            city: if n > 1 { rng.gen_range(1..n) } else { 0 },
        })
        .collect();
    let total_weight: f64 = items.iter().map(|it| it.weight).sum();
    let capacity = shape.capacity_fraction * total_weight;
    let renting_ratio = rng.gen_range(1..=8) as f64;
    Instance::new(name, "uniform-random", capacity, 0.1, 1.0, renting_ratio, cities, items)
        .expect("generated parameters are valid")
}

/// Uniformly random tour fixed at the home city.
pub fn random_tour(rng: &mut ChaCha8Rng, n: usize) -> Tour {
    let mut rest: Vec<usize> = (1..n).collect();
    rest.shuffle(rng);
    let mut order = Vec::with_capacity(n);
    order.push(0);
    order.extend(rest);
    Tour::new(order).expect("shuffled permutation is valid")
}

/// Random plan built by greedy coin-flips over a shuffled item order,
/// skipping anything that would overflow; always feasible.
pub fn random_feasible_plan(rng: &mut ChaCha8Rng, inst: &Instance) -> PickingPlan {
    let m = inst.m();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut bits = vec![false; m];
    let mut weight = 0.0;
    for k in order {
        if rng.gen_bool(0.5) && weight + inst.items[k].weight <= inst.capacity {
            weight += inst.items[k].weight;
            bits[k] = true;
        }
    }
    PickingPlan::from_bits(bits)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, span: f64) -> Vec<(f64, f64)> {
    (0..n).map(|_| (rng.gen::<f64>() * span, rng.gen::<f64>() * span)).collect()
}

/// Totals from the reference evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveTotals {
    pub total_time: f64,
    pub total_profit: f64,
    pub total_weight: f64,
    pub gain: f64,
}

/// Slow reference evaluation: a full item scan at every city, no index, no
/// registers. Within each city the item order (ascending id) and the
/// accumulation order match the fast path, so agreement is expected to be
/// bit-for-bit, not approximate.
pub fn naive_evaluate(
    inst: &Instance,
    tour: &Tour,
    plan: &PickingPlan,
) -> Result<NaiveTotals, EvalError> {
    let n = inst.n();
    let m = inst.m();
    assert_eq!(tour.len(), n);
    assert_eq!(plan.len(), m);

    let mut picked_weight = 0.0;
    for k in 0..m {
        if plan.is_picked(k) {
            picked_weight += inst.items[k].weight;
        }
    }
    if picked_weight > inst.capacity {
        return Err(EvalError::InfeasiblePlan { overflow: picked_weight - inst.capacity });
    }

    let order = tour.order();
    let mut t = 0.0;
    let mut w = 0.0;
    let mut g = 0.0;
    for p in 0..n {
        let city = order[p];
        let mut wr = 0.0;
        let mut gr = 0.0;
        for k in 0..m {
            if inst.items[k].city == city && plan.is_picked(k) {
                wr += inst.items[k].weight;
                gr += inst.items[k].profit;
            }
        }
        w += wr;
        g += gr;
        let next = order[if p + 1 == n { 0 } else { p + 1 }];
        t += inst.distance(city, next) as f64 / crate::eval::velocity(inst, w);
    }
    Ok(NaiveTotals {
        total_time: t,
        total_profit: g,
        total_weight: w,
        gain: g - inst.renting_ratio * t,
    })
}

fn bits_string(plan: &PickingPlan) -> String {
    plan.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Solver-vs-oracle outcome over a batch of tiny random instances.
#[derive(Debug, Clone)]
pub struct OracleSandwichReport {
    pub instances: usize,
    /// How many runs matched the exhaustive optimum exactly.
    pub exact_optima: usize,
    pub failures: Vec<String>,
}

impl OracleSandwichReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn exact_fraction(&self) -> f64 {
        if self.instances == 0 {
            return 1.0;
        }
        self.exact_optima as f64 / self.instances as f64
    }
}

/// Runs the solver and the brute-force oracle on `count` seeded random tiny
/// instances. A failure is an infeasible result, a gain above the proven
/// optimum, or a result gain that disagrees with a fresh evaluation of the
/// returned solution.
pub fn oracle_sandwich_suite(count: usize, seed: u64) -> OracleSandwichReport {
    let config = SolverConfig {
        time_budget: Duration::from_secs(60),
        ..SolverConfig::default()
    };
    let mut report =
        OracleSandwichReport { instances: count, exact_optima: 0, failures: Vec::new() };

    for inst in random_instances(count, seed, &InstanceShape::tiny(), "rand-tiny") {
        let name = inst.name.clone();
        let res = match cosolver2b(&inst, &config) {
            Ok(r) => r,
            Err(e) => {
                report.failures.push(format!("{name}: solver failed: {e:?}"));
                continue;
            }
        };
        let fresh = match evaluate_full(&inst, &res.tour, &res.plan) {
            Ok(st) => st,
            Err(e) => {
                report.failures.push(format!("{name}: infeasible result: {e:?}"));
                continue;
            }
        };
        if fresh.gain().to_bits() != res.gain.to_bits() {
            report.failures.push(format!(
                "{name}: reported gain {} but re-evaluation says {}",
                res.gain,
                fresh.gain()
            ));
            continue;
        }
        let oracle = brute_force_oracle(&inst).expect("tiny shape is within oracle limits");
        if res.gain > oracle.gain {
            report.failures.push(format!(
                "{name}: solver gain {} exceeds exhaustive optimum {}",
                res.gain, oracle.gain
            ));
            continue;
        }
        if res.gain == oracle.gain {
            report.exact_optima += 1;
        }
    }
    report
}

/// Delta-vs-full agreement over random probes.
#[derive(Debug, Clone)]
pub struct DeltaReport {
    pub probes: usize,
    pub failures: Vec<String>,
}

impl DeltaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn describe_probe(name: &str, tour: &Tour, plan: &PickingPlan, pv: &DeltaPreview) -> String {
    format!("{name} tour={:?} plan={} move={:?}", tour.order(), bits_string(plan), pv.kind)
}

/// The probe loop, parameterized over a preview filter so the self-test can
/// corrupt previews and prove the comparison actually bites.
fn delta_suite_with(
    probes: usize,
    seed: u64,
    tamper: impl Fn(DeltaPreview) -> DeltaPreview,
) -> DeltaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = InstanceShape {
        n: (3, 20),
        m: (1, 30),
        coord_max: 500,
        profit_max: 200,
        weight_max: 60,
        capacity_fraction: 0.5,
    };
    let mut report = DeltaReport { probes, failures: Vec::new() };

    let mut probe = 0usize;
    while probe < probes {
        let name = format!("probe-{probe:04}");
        let inst = random_instance(&mut rng, &shape, &name);
        let n = inst.n();
        let m = inst.m();
        // several probes per instance to also exercise committed states
        let mut tour = random_tour(&mut rng, n);
        let mut plan = random_feasible_plan(&mut rng, &inst);
        let mut st = evaluate_full(&inst, &tour, &plan).expect("plan generated feasible");

        for _ in 0..4 {
            if probe >= probes {
                break;
            }
            probe += 1;

            let flip = rng.gen_bool(0.5) && m > 0;
            if flip {
                let k = rng.gen_range(0..m);
                let mut bits = plan.bits().to_vec();
                bits[k] = !bits[k];
                let mutated = PickingPlan::from_bits(bits);
                match delta_bitflip(&inst, &st, &tour, &plan, k) {
                    Ok(pv) => {
                        let seen = tamper(pv);
                        match evaluate_full(&inst, &tour, &mutated) {
                            Ok(full) => {
                                if full.gain().to_bits() != seen.gain.to_bits()
                                    || full.total_time().to_bits() != seen.total_time.to_bits()
                                    || full.total_profit().to_bits() != seen.total_profit.to_bits()
                                    || full.total_weight().to_bits() != seen.total_weight.to_bits()
                                {
                                    report.failures.push(format!(
                                        "{}: preview gain {} vs full {}",
                                        describe_probe(&name, &tour, &plan, &seen),
                                        seen.gain,
                                        full.gain()
                                    ));
                                    continue;
                                }
                                // committing must land exactly on the fresh state
                                commit(&inst, &mut st, &mut tour, &mut plan, pv)
                                    .expect("preview version is current");
                                if !st.bitwise_eq(&full) {
                                    report.failures.push(format!(
                                        "{name}: committed state diverges from fresh evaluation"
                                    ));
                                }
                            }
                            Err(_) => report.failures.push(format!(
                                "{name}: preview accepted a flip the full evaluation rejects"
                            )),
                        }
                    }
                    Err(_) => {
                        // preview says overflow: the full evaluation must agree
                        if evaluate_full(&inst, &tour, &mutated).is_ok() {
                            report.failures.push(format!(
                                "{name}: preview rejected item {k} but the flip is feasible"
                            ));
                        }
                    }
                }
            } else {
                let i = rng.gen_range(1..n - 1);
                let j = rng.gen_range(i + 1..n);
                let pv = delta_two_opt(&inst, &st, &tour, i, j);
                let seen = tamper(pv);
                let mut order = tour.order().to_vec();
                order[i..=j].reverse();
                let mutated = Tour::new(order).expect("reversal keeps a permutation");
                let full = evaluate_full(&inst, &mutated, &plan)
                    .expect("plan feasibility does not depend on the tour");
                if full.gain().to_bits() != seen.gain.to_bits()
                    || full.total_time().to_bits() != seen.total_time.to_bits()
                    || full.total_profit().to_bits() != seen.total_profit.to_bits()
                    || full.total_weight().to_bits() != seen.total_weight.to_bits()
                {
                    report.failures.push(format!(
                        "{}: preview gain {} vs full {}",
                        describe_probe(&name, &tour, &plan, &seen),
                        seen.gain,
                        full.gain()
                    ));
                    continue;
                }
                commit(&inst, &mut st, &mut tour, &mut plan, pv)
                    .expect("preview version is current");
                if !st.bitwise_eq(&full) {
                    report.failures.push(format!(
                        "{name}: committed state diverges from fresh evaluation"
                    ));
                }
            }
        }
    }
    report
}

/// Bit-identity of every delta preview (and the committed state it leads to)
/// against a from-scratch evaluation of the mutated solution.
pub fn delta_exactness_suite(probes: usize, seed: u64) -> DeltaReport {
    delta_suite_with(probes, seed, |pv| pv)
}

/// Harness self-test: corrupt previews by one ulp-scale nudge and confirm
/// the suite reports counterexamples. True means the net has no holes.
pub fn delta_suite_detects_faults() -> bool {
    let report = delta_suite_with(64, 12345, |mut pv| {
        pv.gain += 1e-9;
        pv
    });
    !report.passed()
}

/// Fast-vs-naive evaluator agreement.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub instances: usize,
    pub probes: usize,
    pub failures: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the register evaluator against [`naive_evaluate`] on random
/// solutions over medium-sized instances. Expected agreement is exact.
pub fn evaluator_equivalence_suite(instances: usize, seed: u64) -> EquivalenceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = InstanceShape::medium();
    let probes_per_instance = 3usize;
    let mut report = EquivalenceReport {
        instances,
        probes: instances * probes_per_instance,
        failures: Vec::new(),
    };

    for i in 0..instances {
        let name = format!("rand-med-{i:03}");
        let inst = random_instance(&mut rng, &shape, &name);
        for p in 0..probes_per_instance {
            let tour = random_tour(&mut rng, inst.n());
            let plan = random_feasible_plan(&mut rng, &inst);
            let fast = evaluate_full(&inst, &tour, &plan).expect("plan generated feasible");
            let slow = naive_evaluate(&inst, &tour, &plan).expect("plan generated feasible");
            if fast.gain().to_bits() != slow.gain.to_bits()
                || fast.total_time().to_bits() != slow.total_time.to_bits()
                || fast.total_profit().to_bits() != slow.total_profit.to_bits()
                || fast.total_weight().to_bits() != slow.total_weight.to_bits()
            {
                report.failures.push(format!(
                    "{name} probe {p}: fast gain {} vs naive {}",
                    fast.gain(),
                    slow.gain
                ));
            }
        }
    }
    report
}

/// Triangulation validity over random point sets.
#[derive(Debug, Clone)]
pub struct DelaunayReport {
    pub point_sets: usize,
    pub edges_checked: usize,
    pub failures: Vec<String>,
}

impl DelaunayReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every candidate edge of random general-position point sets against
/// the exhaustive circumcircle test, plus the planar edge bound and
/// connectivity.
pub fn delaunay_suite(point_sets: usize, seed: u64) -> DelaunayReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report =
        DelaunayReport { point_sets, edges_checked: 0, failures: Vec::new() };

    for i in 0..point_sets {
        let n = rng.gen_range(3..=50);
        let pts = random_points(&mut rng, n, 1000.0);
        if bowyer_watson(&pts).is_none() {
            report.failures.push(format!("set {i}: triangulation refused {n} random points"));
            continue;
        }
        let cities: Vec<City> = pts.iter().map(|&(x, y)| City { x, y }).collect();
        let graph = delaunay_candidates(&cities);
        if graph.edge_count() > 3 * n - 6 {
            report.failures.push(format!(
                "set {i}: {} edges exceeds the planar bound {}",
                graph.edge_count(),
                3 * n - 6
            ));
        }
        for c in 0..n {
            if graph.neighbors(c).is_empty() {
                report.failures.push(format!("set {i}: point {c} has no candidate neighbours"));
            }
        }
        for (a, b) in graph.edges() {
            report.edges_checked += 1;
            if !is_delaunay_edge_brute(&pts, a, b) {
                report.failures.push(format!(
                    "set {i}: edge ({a}, {b}) fails the empty-circumcircle test"
                ));
            }
        }
    }
    report
}
