//! Exact TTP objective and register-based delta evaluation.
//!
//! The objective couples the two subproblems: picked weight slows the tour
//! down, so `gain = profit - renting_ratio * time` can only be scored on the
//! pair (tour, plan). The thief picks items on arrival, so the leg leaving a
//! city is already slowed by everything picked there.
//!
//! [`EvalState`] keeps per-position registers (weight, profit and leg time
//! added at each tour position) and their running prefix sums. A single bit
//! flip or 2-OPT reversal leaves every position before the first affected
//! one untouched, so previews and commits only replay the suffix. The replay
//! performs the same floating point operations in the same order as
//! [`evaluate_full`], which makes previews bit-identical to a fresh
//! evaluation of the mutated solution, not merely close.

use std::error::Error;
use std::fmt;

use crate::instance::Instance;

/// A cyclic tour: a permutation of all cities that starts at city 0 (the
/// thief's home, city 1 in file terms). The closing leg back home is implied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    order: Vec<usize>,
    pos: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TourError {
    Empty,
    NotAPermutation,
    DoesNotStartAtHome,
}

impl fmt::Display for TourError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TourError::Empty => write!(f, "tour is empty"),
            TourError::NotAPermutation => write!(f, "tour is not a permutation of all cities"),
            TourError::DoesNotStartAtHome => write!(f, "tour must start at city 1"),
        }
    }
}

impl Error for TourError {}

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self, TourError> {
        if order.is_empty() {
            return Err(TourError::Empty);
        }
        if order[0] != 0 {
            return Err(TourError::DoesNotStartAtHome);
        }
        let n = order.len();
        let mut pos = vec![usize::MAX; n];
        for (p, &c) in order.iter().enumerate() {
            if c >= n || pos[c] != usize::MAX {
                return Err(TourError::NotAPermutation);
            }
            pos[c] = p;
        }
        Ok(Tour { order, pos })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Tour position currently holding `city`.
    pub fn position_of(&self, city: usize) -> usize {
        self.pos[city]
    }

    /// Reverses positions `i..=j`. Kept crate-private so that callers holding
    /// an [`EvalState`] can only mutate through [`commit`].
    pub(crate) fn reverse_segment(&mut self, i: usize, j: usize) {
        self.order[i..=j].reverse();
        for q in i..=j {
            self.pos[self.order[q]] = q;
        }
    }
}

/// One picked/skipped flag per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PickingPlan {
    picked: Vec<bool>,
}

impl PickingPlan {
    pub fn empty(m: usize) -> Self {
        PickingPlan { picked: vec![false; m] }
    }

    pub fn from_bits(picked: Vec<bool>) -> Self {
        PickingPlan { picked }
    }

    pub fn len(&self) -> usize {
        self.picked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.picked.is_empty()
    }

    pub fn is_picked(&self, item: usize) -> bool {
        self.picked[item]
    }

    pub fn bits(&self) -> &[bool] {
        &self.picked
    }

    pub fn picked_count(&self) -> usize {
        self.picked.iter().filter(|&&b| b).count()
    }

    pub(crate) fn toggle(&mut self, item: usize) {
        self.picked[item] = !self.picked[item];
    }

    pub(crate) fn set(&mut self, item: usize, picked: bool) {
        self.picked[item] = picked;
    }
}

/// Velocity at carried weight `w`: `v_max - speed_coeff * w`, clamped to
/// `v_min` so a full knapsack can never round below the minimum speed.
#[inline]
pub fn velocity(inst: &Instance, w: f64) -> f64 {
    debug_assert!(w >= 0.0 && w <= inst.capacity, "velocity queried on infeasible weight {w}");
    (inst.v_max - inst.speed_coeff * w).max(inst.v_min)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// Picked weight exceeds capacity by `overflow`.
    InfeasiblePlan { overflow: f64 },
    /// The preview was taken against an older state version.
    StalePreview { preview: u64, state: u64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::InfeasiblePlan { overflow } => {
                write!(f, "picking plan exceeds capacity by {overflow}")
            }
            EvalError::StalePreview { preview, state } => {
                write!(f, "preview of state version {preview} committed against version {state}")
            }
        }
    }
}

impl Error for EvalError {}

/// Full bookkeeping for one (tour, plan) pair.
///
/// For tour position `p`, `w_reg[p]` / `g_reg[p]` hold the weight / profit
/// picked at that position and `t_reg[p]` the time of the leg leaving it
/// (the last position's leg returns home). The `*_acc` arrays are running
/// prefix sums, so `t_acc[n-1]` is the total travel time. `version` counts
/// commits; previews remember it and go stale once it moves.
#[derive(Debug, Clone)]
pub struct EvalState {
    t_reg: Vec<f64>,
    t_acc: Vec<f64>,
    w_reg: Vec<f64>,
    w_acc: Vec<f64>,
    g_reg: Vec<f64>,
    g_acc: Vec<f64>,
    total_time: f64,
    total_profit: f64,
    total_weight: f64,
    gain: f64,
    version: u64,
}

impl EvalState {
    pub fn new() -> Self {
        EvalState {
            t_reg: Vec::new(),
            t_acc: Vec::new(),
            w_reg: Vec::new(),
            w_acc: Vec::new(),
            g_reg: Vec::new(),
            g_acc: Vec::new(),
            total_time: 0.0,
            total_profit: 0.0,
            total_weight: 0.0,
            gain: 0.0,
            version: 0,
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn total_profit(&self) -> f64 {
        self.total_profit
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn t_reg(&self) -> &[f64] {
        &self.t_reg
    }

    pub fn t_acc(&self) -> &[f64] {
        &self.t_acc
    }

    pub fn w_reg(&self) -> &[f64] {
        &self.w_reg
    }

    pub fn w_acc(&self) -> &[f64] {
        &self.w_acc
    }

    pub fn g_reg(&self) -> &[f64] {
        &self.g_reg
    }

    pub fn g_acc(&self) -> &[f64] {
        &self.g_acc
    }

    /// Bit-for-bit equality of every register, accumulator and total.
    /// Ignores `version`, which only tracks commit counts.
    pub fn bitwise_eq(&self, other: &EvalState) -> bool {
        fn slices(a: &[f64], b: &[f64]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
        }
        slices(&self.t_reg, &other.t_reg)
            && slices(&self.t_acc, &other.t_acc)
            && slices(&self.w_reg, &other.w_reg)
            && slices(&self.w_acc, &other.w_acc)
            && slices(&self.g_reg, &other.g_reg)
            && slices(&self.g_acc, &other.g_acc)
            && self.total_time.to_bits() == other.total_time.to_bits()
            && self.total_profit.to_bits() == other.total_profit.to_bits()
            && self.total_weight.to_bits() == other.total_weight.to_bits()
            && self.gain.to_bits() == other.gain.to_bits()
    }

    fn resize(&mut self, n: usize) {
        self.t_reg.resize(n, 0.0);
        self.t_acc.resize(n, 0.0);
        self.w_reg.resize(n, 0.0);
        self.w_acc.resize(n, 0.0);
        self.g_reg.resize(n, 0.0);
        self.g_acc.resize(n, 0.0);
        self.t_reg.truncate(n);
        self.t_acc.truncate(n);
        self.w_reg.truncate(n);
        self.w_acc.truncate(n);
        self.g_reg.truncate(n);
        self.g_acc.truncate(n);
    }

    /// Accumulator values just before position `p` (zeros at the start).
    fn prefix_before(&self, p: usize) -> (f64, f64, f64) {
        if p == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (self.t_acc[p - 1], self.w_acc[p - 1], self.g_acc[p - 1])
        }
    }
}

impl Default for EvalState {
    fn default() -> Self {
        EvalState::new()
    }
}

/// Which move a preview describes. Positions / item ids are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// Reverse tour positions `i..=j` (position 0 never moves).
    TwoOpt { i: usize, j: usize },
    /// Toggle one item in the picking plan.
    BitFlip { item: usize },
}

/// The exact post-move totals of a candidate move, plus the state version it
/// was computed against. Committing replays the same suffix, so the realized
/// state reproduces these numbers bit for bit.
#[derive(Debug, Clone, Copy)]
pub struct DeltaPreview {
    pub kind: MoveKind,
    /// First tour position whose bookkeeping the move touches.
    pub first_pos: usize,
    pub gain: f64,
    pub total_time: f64,
    pub total_profit: f64,
    pub total_weight: f64,
    version: u64,
}

/// Weight and profit picked at `city`, scanning that city's items in
/// ascending item order (the order every evaluation path must share).
#[inline]
fn regs_at_city(inst: &Instance, plan: &PickingPlan, city: usize) -> (f64, f64) {
    let mut w = 0.0;
    let mut g = 0.0;
    for &k in &inst.items_by_city[city] {
        if plan.is_picked(k) {
            w += inst.items[k].weight;
            g += inst.items[k].profit;
        }
    }
    (w, g)
}

#[inline]
fn regs_at_city_flipped(inst: &Instance, plan: &PickingPlan, city: usize, flip: usize) -> (f64, f64) {
    let mut w = 0.0;
    let mut g = 0.0;
    for &k in &inst.items_by_city[city] {
        if plan.is_picked(k) != (k == flip) {
            w += inst.items[k].weight;
            g += inst.items[k].profit;
        }
    }
    (w, g)
}

/// The one walk every evaluation path funnels through: accumulate weight and
/// profit at each position, then pay the leg leaving it at the velocity of
/// the weight carried after pickup. `city_at`, `wreg_at` and `greg_at`
/// describe the (possibly virtually mutated) solution; `sink` observes each
/// position for paths that persist the registers.
#[inline]
fn walk_suffix<C, W, G, S>(
    inst: &Instance,
    n: usize,
    from: usize,
    prefix: (f64, f64, f64),
    city_at: C,
    wreg_at: W,
    greg_at: G,
    mut sink: S,
) -> (f64, f64, f64)
where
    C: Fn(usize) -> usize,
    W: Fn(usize) -> f64,
    G: Fn(usize) -> f64,
    S: FnMut(usize, f64, f64, f64, f64),
{
    let (mut t, mut w, mut g) = prefix;
    for p in from..n {
        w += wreg_at(p);
        g += greg_at(p);
        let city = city_at(p);
        let next = city_at(if p + 1 == n { 0 } else { p + 1 });
        let t_reg = inst.distance(city, next) as f64 / velocity(inst, w);
        t += t_reg;
        sink(p, t_reg, t, w, g);
    }
    (t, w, g)
}

/// Evaluates `(tour, plan)` from scratch into a fresh state.
pub fn evaluate_full(inst: &Instance, tour: &Tour, plan: &PickingPlan) -> Result<EvalState, EvalError> {
    let mut st = EvalState::new();
    evaluate_full_into(inst, tour, plan, &mut st)?;
    Ok(st)
}

/// Evaluates into a reused state buffer. Bumps the version, so previews taken
/// against the previous contents can no longer be committed.
pub fn evaluate_full_into(
    inst: &Instance,
    tour: &Tour,
    plan: &PickingPlan,
    st: &mut EvalState,
) -> Result<(), EvalError> {
    let n = inst.n();
    assert_eq!(tour.len(), n, "tour length does not match instance");
    assert_eq!(plan.len(), inst.m(), "plan length does not match instance");

    let mut picked_weight = 0.0;
    for (k, it) in inst.items.iter().enumerate() {
        if plan.is_picked(k) {
            picked_weight += it.weight;
        }
    }
    if picked_weight > inst.capacity {
        return Err(EvalError::InfeasiblePlan { overflow: picked_weight - inst.capacity });
    }

    st.resize(n);
    let order = tour.order();
    for p in 0..n {
        let (wr, gr) = regs_at_city(inst, plan, order[p]);
        st.w_reg[p] = wr;
        st.g_reg[p] = gr;
    }

    let EvalState { t_reg, t_acc, w_reg, w_acc, g_reg, g_acc, .. } = st;
    let (t, w, g) = walk_suffix(
        inst,
        n,
        0,
        (0.0, 0.0, 0.0),
        |p| order[p],
        |p| w_reg[p],
        |p| g_reg[p],
        |p, treg, tac, wac, gac| {
            t_reg[p] = treg;
            t_acc[p] = tac;
            w_acc[p] = wac;
            g_acc[p] = gac;
        },
    );

    st.total_time = t;
    st.total_weight = w;
    st.total_profit = g;
    st.gain = g - inst.renting_ratio * t;
    st.version += 1;
    Ok(())
}

/// Knapsack rent paid over the whole tour: `renting_ratio * total_time`.
pub fn travel_cost(inst: &Instance, st: &EvalState) -> f64 {
    inst.renting_ratio * st.total_time
}

/// Previews toggling `item` without touching the state. Toggling on is
/// rejected if it would overflow the knapsack.
pub fn delta_bitflip(
    inst: &Instance,
    st: &EvalState,
    tour: &Tour,
    plan: &PickingPlan,
    item: usize,
) -> Result<DeltaPreview, EvalError> {
    let it = &inst.items[item];
    if !plan.is_picked(item) {
        let new_weight = st.total_weight + it.weight;
        if new_weight > inst.capacity {
            return Err(EvalError::InfeasiblePlan { overflow: new_weight - inst.capacity });
        }
    }

    let p0 = tour.position_of(it.city);
    let (wr0, gr0) = regs_at_city_flipped(inst, plan, it.city, item);
    let order = tour.order();
    let w_reg = &st.w_reg;
    let g_reg = &st.g_reg;
    let (t, w, g) = walk_suffix(
        inst,
        tour.len(),
        p0,
        st.prefix_before(p0),
        |p| order[p],
        |p| if p == p0 { wr0 } else { w_reg[p] },
        |p| if p == p0 { gr0 } else { g_reg[p] },
        |_, _, _, _, _| {},
    );

    Ok(DeltaPreview {
        kind: MoveKind::BitFlip { item },
        first_pos: p0,
        gain: g - inst.renting_ratio * t,
        total_time: t,
        total_profit: g,
        total_weight: w,
        version: st.version,
    })
}

/// Previews reversing tour positions `i..=j`. Position 0 is the fixed home
/// city, so `1 <= i <= j <= n-1`; `i == j` is a no-op reversal. Feasibility
/// is untouched (the plan does not change), only travel times move. The walk
/// restarts at `i - 1`: that position keeps its pickups but its outgoing leg
/// now ends at a different city.
pub fn delta_two_opt(
    inst: &Instance,
    st: &EvalState,
    tour: &Tour,
    i: usize,
    j: usize,
) -> DeltaPreview {
    let n = tour.len();
    assert!(1 <= i && i <= j && j < n, "2-OPT positions out of range: ({i}, {j}) with n={n}");

    let from = i - 1;
    let map = move |p: usize| if p >= i && p <= j { j - (p - i) } else { p };
    let order = tour.order();
    let w_reg = &st.w_reg;
    let g_reg = &st.g_reg;
    let (t, w, g) = walk_suffix(
        inst,
        n,
        from,
        st.prefix_before(from),
        |p| order[map(p)],
        |p| w_reg[map(p)],
        |p| g_reg[map(p)],
        |_, _, _, _, _| {},
    );

    DeltaPreview {
        kind: MoveKind::TwoOpt { i, j },
        first_pos: from,
        gain: g - inst.renting_ratio * t,
        total_time: t,
        total_profit: g,
        total_weight: w,
        version: st.version,
    }
}

/// Applies a previewed move to `(tour, plan, state)` by replaying the suffix
/// the preview computed. Fails with [`EvalError::StalePreview`] if anything
/// was committed (or re-evaluated) since the preview was taken.
pub fn commit(
    inst: &Instance,
    st: &mut EvalState,
    tour: &mut Tour,
    plan: &mut PickingPlan,
    preview: DeltaPreview,
) -> Result<(), EvalError> {
    if preview.version != st.version {
        return Err(EvalError::StalePreview { preview: preview.version, state: st.version });
    }

    let from = match preview.kind {
        MoveKind::BitFlip { item } => {
            plan.toggle(item);
            let city = inst.items[item].city;
            let p0 = tour.position_of(city);
            let (wr, gr) = regs_at_city(inst, plan, city);
            st.w_reg[p0] = wr;
            st.g_reg[p0] = gr;
            p0
        }
        MoveKind::TwoOpt { i, j } => {
            tour.reverse_segment(i, j);
            st.w_reg[i..=j].reverse();
            st.g_reg[i..=j].reverse();
            i - 1
        }
    };
    debug_assert_eq!(from, preview.first_pos);

    let n = tour.len();
    let prefix = st.prefix_before(from);
    let order = tour.order();
    let EvalState { t_reg, t_acc, w_reg, w_acc, g_reg, g_acc, .. } = st;
    let (t, w, g) = walk_suffix(
        inst,
        n,
        from,
        prefix,
        |p| order[p],
        |p| w_reg[p],
        |p| g_reg[p],
        |p, treg, tac, wac, gac| {
            t_reg[p] = treg;
            t_acc[p] = tac;
            w_acc[p] = wac;
            g_acc[p] = gac;
        },
    );

    st.total_time = t;
    st.total_weight = w;
    st.total_profit = g;
    st.gain = g - inst.renting_ratio * t;
    st.version += 1;
    debug_assert_eq!(st.gain.to_bits(), preview.gain.to_bits());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verification::tiny3;

    fn tour(order: &[usize]) -> Tour {
        Tour::new(order.to_vec()).unwrap()
    }

    fn plan(bits: &[bool]) -> PickingPlan {
        PickingPlan::from_bits(bits.to_vec())
    }

    #[test]
    fn tour_validation() {
        assert_eq!(Tour::new(vec![]).unwrap_err(), TourError::Empty);
        assert_eq!(Tour::new(vec![1, 0, 2]).unwrap_err(), TourError::DoesNotStartAtHome);
        assert_eq!(Tour::new(vec![0, 1, 1]).unwrap_err(), TourError::NotAPermutation);
        assert_eq!(Tour::new(vec![0, 1, 3]).unwrap_err(), TourError::NotAPermutation);
        let t = tour(&[0, 2, 1]);
        assert_eq!(t.position_of(0), 0);
        assert_eq!(t.position_of(2), 1);
        assert_eq!(t.position_of(1), 2);
    }

    #[test]
    fn velocity_endpoints() {
        let inst = tiny3();
        assert_eq!(velocity(&inst, 0.0), 1.0);
        assert_eq!(velocity(&inst, 2.0), 0.4);
        let v_full = velocity(&inst, inst.capacity);
        assert!(v_full >= inst.v_min);
        assert!((v_full - inst.v_min).abs() < 1e-12);
    }

    #[test]
    fn full_evaluation_matches_hand_computation() {
        let inst = tiny3();

        // home -> item city -> far city, picking only item 1 (w=2, p=20):
        // legs 3/1.0, 5/0.4, 4/0.4
        let st = evaluate_full(&inst, &tour(&[0, 1, 2]), &plan(&[true, false])).unwrap();
        assert_eq!(st.total_time(), 25.5);
        assert_eq!(st.total_profit(), 20.0);
        assert_eq!(st.total_weight(), 2.0);
        assert_eq!(st.gain(), -5.5);
        assert_eq!(st.t_reg(), &[3.0, 12.5, 10.0]);
        assert_eq!(st.t_acc(), &[3.0, 15.5, 25.5]);
        assert_eq!(st.w_reg(), &[0.0, 2.0, 0.0]);
        assert_eq!(st.w_acc(), &[0.0, 2.0, 2.0]);
        assert_eq!(st.g_acc(), &[0.0, 20.0, 20.0]);

        // visiting the far city first postpones the pickup: 4/1.0, 5/1.0, 3/0.4
        let st = evaluate_full(&inst, &tour(&[0, 2, 1]), &plan(&[true, false])).unwrap();
        assert_eq!(st.total_time(), 16.5);
        assert_eq!(st.gain(), 3.5);
        assert_eq!(st.w_acc(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn empty_plan_rides_at_full_speed() {
        let inst = tiny3();
        let st = evaluate_full(&inst, &tour(&[0, 1, 2]), &plan(&[false, false])).unwrap();
        let expected = -(3.0 / 1.0 + 5.0 / 1.0 + 4.0 / 1.0);
        assert_eq!(st.gain(), expected);
        assert_eq!(st.total_profit(), 0.0);
        assert_eq!(travel_cost(&inst, &st), 12.0);
    }

    #[test]
    fn overweight_plan_is_infeasible() {
        let inst = tiny3();
        let err = evaluate_full(&inst, &tour(&[0, 1, 2]), &plan(&[true, true])).unwrap_err();
        assert_eq!(err, EvalError::InfeasiblePlan { overflow: 2.0 });
    }

    #[test]
    fn travel_cost_scales_with_renting_ratio() {
        let mut inst = tiny3();
        let st = evaluate_full(&inst, &tour(&[0, 1, 2]), &plan(&[true, false])).unwrap();
        assert_eq!(travel_cost(&inst, &st), 25.5);
        inst.renting_ratio = 0.0;
        assert_eq!(travel_cost(&inst, &st), 0.0);
    }

    #[test]
    fn bitflip_preview_matches_full_reevaluation() {
        let inst = tiny3();
        let t = tour(&[0, 2, 1]);
        let p = plan(&[false, false]);
        let st = evaluate_full(&inst, &t, &p).unwrap();

        let pv = delta_bitflip(&inst, &st, &t, &p, 0).unwrap();
        let full = evaluate_full(&inst, &t, &plan(&[true, false])).unwrap();
        assert_eq!(pv.gain.to_bits(), full.gain().to_bits());
        assert_eq!(pv.gain, 3.5);
        assert_eq!(pv.total_weight, 2.0);
        assert_eq!(pv.first_pos, 2);
    }

    #[test]
    fn bitflip_is_an_involution() {
        let inst = tiny3();
        let mut t = tour(&[0, 2, 1]);
        let mut p = plan(&[false, false]);
        let mut st = evaluate_full(&inst, &t, &p).unwrap();
        let g0 = st.gain();

        let on = delta_bitflip(&inst, &st, &t, &p, 0).unwrap();
        commit(&inst, &mut st, &mut t, &mut p, on).unwrap();
        let off = delta_bitflip(&inst, &st, &t, &p, 0).unwrap();
        assert_eq!(off.gain.to_bits(), g0.to_bits());
    }

    #[test]
    fn bitflip_on_overweight_is_rejected() {
        let inst = tiny3();
        let t = tour(&[0, 2, 1]);
        let p = plan(&[true, false]);
        let st = evaluate_full(&inst, &t, &p).unwrap();
        assert_eq!(
            delta_bitflip(&inst, &st, &t, &p, 1).unwrap_err(),
            EvalError::InfeasiblePlan { overflow: 2.0 }
        );
    }

    #[test]
    fn two_opt_preview_matches_full_reevaluation() {
        let inst = tiny3();
        let t = tour(&[0, 1, 2]);
        let p = plan(&[true, false]);
        let st = evaluate_full(&inst, &t, &p).unwrap();

        // reversing positions 1..=2 turns (1,2,3) into (1,3,2)
        let pv = delta_two_opt(&inst, &st, &t, 1, 2);
        let full = evaluate_full(&inst, &tour(&[0, 2, 1]), &p).unwrap();
        assert_eq!(pv.gain.to_bits(), full.gain().to_bits());
        assert_eq!(pv.gain, 3.5);
    }

    #[test]
    fn single_position_reversal_changes_nothing() {
        let inst = tiny3();
        let t = tour(&[0, 1, 2]);
        let p = plan(&[true, false]);
        let st = evaluate_full(&inst, &t, &p).unwrap();
        let pv = delta_two_opt(&inst, &st, &t, 1, 1);
        assert_eq!(pv.gain.to_bits(), st.gain().to_bits());
        assert_eq!(pv.total_time.to_bits(), st.total_time().to_bits());
    }

    #[test]
    fn commit_reproduces_fresh_evaluation() {
        let inst = tiny3();
        let mut t = tour(&[0, 1, 2]);
        let mut p = plan(&[true, false]);
        let mut st = evaluate_full(&inst, &t, &p).unwrap();

        let pv = delta_two_opt(&inst, &st, &t, 1, 2);
        commit(&inst, &mut st, &mut t, &mut p, pv).unwrap();

        assert_eq!(t.order(), &[0, 2, 1]);
        assert_eq!(st.gain(), 3.5);
        assert_eq!(st.w_acc(), &[0.0, 0.0, 2.0]);
        let fresh = evaluate_full(&inst, &t, &p).unwrap();
        assert!(st.bitwise_eq(&fresh));

        let pv = delta_bitflip(&inst, &st, &t, &p, 0).unwrap();
        commit(&inst, &mut st, &mut t, &mut p, pv).unwrap();
        assert_eq!(p.bits(), &[false, false]);
        let fresh = evaluate_full(&inst, &t, &p).unwrap();
        assert!(st.bitwise_eq(&fresh));
    }

    #[test]
    fn stale_preview_is_rejected() {
        let inst = tiny3();
        let mut t = tour(&[0, 1, 2]);
        let mut p = plan(&[false, false]);
        let mut st = evaluate_full(&inst, &t, &p).unwrap();

        let stale = delta_bitflip(&inst, &st, &t, &p, 0).unwrap();
        let newer = delta_two_opt(&inst, &st, &t, 1, 2);
        commit(&inst, &mut st, &mut t, &mut p, newer).unwrap();
        assert!(matches!(
            commit(&inst, &mut st, &mut t, &mut p, stale),
            Err(EvalError::StalePreview { .. })
        ));
    }

    #[test]
    fn gain_identity_holds_as_computed() {
        let inst = tiny3();
        for (order, bits) in [
            (vec![0, 1, 2], vec![false, false]),
            (vec![0, 1, 2], vec![true, false]),
            (vec![0, 2, 1], vec![false, true]),
        ] {
            let st = evaluate_full(&inst, &tour(&order), &plan(&bits)).unwrap();
            let expected = st.total_profit() - inst.renting_ratio * st.total_time();
            assert_eq!(st.gain().to_bits(), expected.to_bits());
        }
    }

    #[test]
    fn prefix_sums_stay_consistent_after_commits() {
        let inst = tiny3();
        let mut t = tour(&[0, 1, 2]);
        let mut p = plan(&[false, false]);
        let mut st = evaluate_full(&inst, &t, &p).unwrap();

        let pv = delta_bitflip(&inst, &st, &t, &p, 0).unwrap();
        commit(&inst, &mut st, &mut t, &mut p, pv).unwrap();
        let pv = delta_two_opt(&inst, &st, &t, 1, 2);
        commit(&inst, &mut st, &mut t, &mut p, pv).unwrap();

        for p in 0..inst.n() {
            let (t0, w0, g0) = if p == 0 { (0.0, 0.0, 0.0) } else {
                (st.t_acc()[p - 1], st.w_acc()[p - 1], st.g_acc()[p - 1])
            };
            assert_eq!((t0 + st.t_reg()[p]).to_bits(), st.t_acc()[p].to_bits());
            assert_eq!((w0 + st.w_reg()[p]).to_bits(), st.w_acc()[p].to_bits());
            assert_eq!((g0 + st.g_reg()[p]).to_bits(), st.g_acc()[p].to_bits());
        }
    }

    #[test]
    fn single_city_instance_evaluates() {
        let inst = crate::instance::Instance::new(
            "solo",
            "",
            10.0,
            0.1,
            1.0,
            2.0,
            vec![crate::instance::City { x: 5.0, y: 5.0 }],
            vec![crate::instance::Item { profit: 7.0, weight: 3.0, city: 0 }],
        )
        .unwrap();
        let st = evaluate_full(&inst, &tour(&[0]), &plan(&[true])).unwrap();
        assert_eq!(st.total_time(), 0.0);
        assert_eq!(st.gain(), 7.0);
    }
}
