//! Candidate edges and move enumeration.
//!
//! Scanning all O(n^2) reversals per 2-OPT pass drowns medium instances, so
//! moves are filtered through a sparse candidate graph: an edge qualifies a
//! reversal only if it would become one of the tour's new edges. The default
//! graph is the Delaunay triangulation (planar, so at most `3n - 6` edges);
//! inputs that defeat the triangulation (duplicate or collinear points)
//! fall back to a symmetric k-nearest-neighbour graph. Candidate quality
//! only affects which moves are offered, never how they are scored.

use std::collections::{BTreeSet, HashMap};

use crate::eval::{EvalState, PickingPlan, Tour};
use crate::instance::{City, Instance};

/// Symmetric candidate adjacency over cities, neighbour lists sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateGraph {
    neighbors: Vec<Vec<usize>>,
}

impl CandidateGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        CandidateGraph { neighbors }
    }

    /// Every pair of distinct cities (useful for tests and tiny instances).
    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, city: usize) -> &[usize] {
        &self.neighbors[city]
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }
}

/// Strict in-circumcircle predicate. For triangle `(a, b, c)` (any
/// orientation) and query point `d`: positive determinant after normalizing
/// to counter-clockwise means `d` lies strictly inside; `eps` buffers the
/// decision so near-cocircular points count as outside.
pub(crate) fn in_circumcircle(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64), eps: f64) -> bool {
    let orient = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    let (b, c) = if orient < 0.0 { (c, b) } else { (b, c) };

    let adx = a.0 - d.0;
    let ady = a.1 - d.1;
    let bdx = b.0 - d.0;
    let bdy = b.1 - d.1;
    let cdx = c.0 - d.0;
    let cdy = c.1 - d.1;
    let det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
    det > eps
}

pub(crate) fn bounding_diagonal(pts: &[(f64, f64)]) -> f64 {
    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        min.0 = min.0.min(x);
        min.1 = min.1.min(y);
        max.0 = max.0.max(x);
        max.1 = max.1.max(y);
    }
    ((max.0 - min.0).powi(2) + (max.1 - min.1).powi(2)).sqrt()
}

/// Bowyer-Watson over the real points plus a huge enclosing triangle.
/// Returns the real-to-real edges, or `None` if anything looked inconsistent
/// (the caller then falls back to k-NN).
pub(crate) fn bowyer_watson(pts: &[(f64, f64)]) -> Option<Vec<(usize, usize)>> {
    let n = pts.len();
    let diag = bounding_diagonal(pts);
    if diag == 0.0 {
        return None; // all points coincide
    }
    let eps = 1e-10 * diag;

    // insertion in lexicographic coordinate order keeps the result
    // independent of input order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        pts[i].partial_cmp(&pts[j]).unwrap().then(i.cmp(&j))
    });
    for w in order.windows(2) {
        if pts[w[0]] == pts[w[1]] {
            return None; // duplicate coordinates
        }
    }

    let cx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let big = 1000.0 * diag;
    let mut all = pts.to_vec();
    all.push((cx - 3.0 * big, cy - big));
    all.push((cx + 3.0 * big, cy - big));
    all.push((cx, cy + 3.0 * big));

    let mut triangles: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];
    let mut bad = Vec::new();
    let mut boundary: HashMap<(usize, usize), usize> = HashMap::new();

    for &p in &order {
        bad.clear();
        for (t, tri) in triangles.iter().enumerate() {
            if in_circumcircle(all[tri[0]], all[tri[1]], all[tri[2]], all[p], eps) {
                bad.push(t);
            }
        }
        if bad.is_empty() {
            // the point escaped every circumcircle including the enclosing
            // triangle's: numerically inconsistent
            return None;
        }

        // edges of the cavity are those belonging to exactly one bad triangle
        boundary.clear();
        for &t in &bad {
            let tri = triangles[t];
            for (u, v) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                *boundary.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }

        for &t in bad.iter().rev() {
            triangles.swap_remove(t);
        }
        for (&(u, v), &count) in boundary.iter() {
            if count == 1 {
                triangles.push([u, v, p]);
            }
        }
    }

    let mut edges = Vec::new();
    for tri in &triangles {
        if tri.iter().all(|&v| v < n) {
            edges.push((tri[0], tri[1]));
            edges.push((tri[1], tri[2]));
            edges.push((tri[2], tri[0]));
        }
    }
    Some(edges)
}

fn city_points(cities: &[City]) -> Vec<(f64, f64)> {
    cities.iter().map(|c| (c.x, c.y)).collect()
}

/// Delaunay candidate edges with k-NN fallback.
///
/// Degenerate inputs (duplicates, all collinear, numeric breakdown) and any
/// triangulation that fails validation (an isolated city, or more than
/// `3n - 6` edges) swap the whole graph for [`knn_candidates`] with k = 8.
pub fn delaunay_candidates(cities: &[City]) -> CandidateGraph {
    let n = cities.len();
    if n <= 1 {
        return CandidateGraph::from_edges(n, std::iter::empty());
    }
    if n == 2 {
        return CandidateGraph::from_edges(2, [(0, 1)]);
    }

    let pts = city_points(cities);
    if let Some(edges) = bowyer_watson(&pts) {
        let graph = CandidateGraph::from_edges(n, edges);
        let connected = (0..n).all(|c| !graph.neighbors(c).is_empty());
        if connected && graph.edge_count() <= 3 * n - 6 {
            return graph;
        }
    }
    log::debug!("triangulation degenerate for n={n}, falling back to k-NN");
    knn_candidates(cities, 8)
}

/// Symmetric k-nearest-neighbour graph. Distance ties break towards the
/// lower city index; `k` is clamped to `n - 1`.
pub fn knn_candidates(cities: &[City], k: usize) -> CandidateGraph {
    let n = cities.len();
    let k = k.min(n.saturating_sub(1));
    let mut edges = Vec::new();
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n.saturating_sub(1));
    for a in 0..n {
        dists.clear();
        for b in 0..n {
            if a == b {
                continue;
            }
            let dx = cities[a].x - cities[b].x;
            let dy = cities[a].y - cities[b].y;
            dists.push((dx * dx + dy * dy, b));
        }
        dists.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
        edges.extend(dists.iter().take(k).map(|&(_, b)| (a, b)));
    }
    CandidateGraph::from_edges(n, edges)
}

/// All candidate-filtered 2-OPT reversals `(i, j)` in ascending order.
///
/// Reversing `i..=j` creates the edge `(tour[i-1], tour[j])`; the reversal
/// qualifies iff that edge is in the candidate graph. Position 0 (the home
/// city) never moves, so `1 <= i < j <= n-1`.
pub fn enumerate_two_opt<'a>(
    tour: &'a Tour,
    cand: &'a CandidateGraph,
) -> impl Iterator<Item = (usize, usize)> + 'a {
    let n = tour.len();
    let last = n.saturating_sub(1);
    (1..last).flat_map(move |i| {
        let prev = tour.order()[i - 1];
        let mut js: Vec<usize> = cand
            .neighbors(prev)
            .iter()
            .map(|&c| tour.position_of(c))
            .filter(|&j| j > i && j <= last)
            .collect();
        js.sort_unstable();
        js.into_iter().map(move |j| (i, j))
    })
}

/// All currently legal bit flips in ascending item order: every pick can be
/// dropped, and an unpicked item qualifies only if it still fits.
pub fn enumerate_bitflips<'a>(
    inst: &'a Instance,
    st: &'a EvalState,
    plan: &'a PickingPlan,
) -> impl Iterator<Item = usize> + 'a {
    (0..inst.m()).filter(move |&k| {
        plan.is_picked(k) || st.total_weight() + inst.items[k].weight <= inst.capacity
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate_full;
    use crate::verification::{is_delaunay_edge_brute, tiny3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(cities: &[(f64, f64)]) -> Vec<City> {
        cities.iter().map(|&(x, y)| City { x, y }).collect()
    }

    #[test]
    fn triangle_connects_everything() {
        let g = delaunay_candidates(&pts(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]));
        assert_eq!(g.edge_count(), 3);
        for c in 0..3 {
            assert_eq!(g.neighbors(c).len(), 2);
        }
    }

    #[test]
    fn square_gets_one_diagonal() {
        let g = delaunay_candidates(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]));
        // four sides plus exactly one diagonal (the corners are cocircular,
        // either diagonal is a valid triangulation)
        assert_eq!(g.edge_count(), 5);
        let diagonals =
            [g.contains_edge(0, 2), g.contains_edge(1, 3)].iter().filter(|&&d| d).count();
        assert_eq!(diagonals, 1);
    }

    #[test]
    fn collinear_points_fall_back_to_knn() {
        let cities = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]);
        let g = delaunay_candidates(&cities);
        // k = min(8, 4) = 4 makes the fallback complete here
        assert_eq!(g, CandidateGraph::complete(5));
    }

    #[test]
    fn duplicate_points_fall_back_to_knn() {
        let cities = pts(&[(0.0, 0.0), (1.0, 1.0), (1.0, 1.0), (2.0, 0.0)]);
        let g = delaunay_candidates(&cities);
        for c in 0..4 {
            assert!(!g.neighbors(c).is_empty());
        }
    }

    #[test]
    fn two_cities_share_an_edge() {
        let g = delaunay_candidates(&pts(&[(0.0, 0.0), (5.0, 5.0)]));
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn random_triangulations_verify_against_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..30 {
            let n = rng.gen_range(3..=40);
            let coords: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0))).collect();
            let g = delaunay_candidates(&pts(&coords));
            assert!(g.edge_count() <= 3 * n - 6, "round {round}: too many edges");
            for (a, b) in g.edges() {
                assert!(
                    is_delaunay_edge_brute(&coords, a, b),
                    "round {round}: edge ({a},{b}) has no empty circumcircle witness"
                );
            }
            for c in 0..n {
                assert!(!g.neighbors(c).is_empty(), "round {round}: city {c} isolated");
            }
        }
    }

    #[test]
    fn delaunay_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let coords: Vec<(f64, f64)> =
            (0..25).map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0))).collect();
        let a = delaunay_candidates(&pts(&coords));
        let b = delaunay_candidates(&pts(&coords));
        assert_eq!(a, b);
    }

    #[test]
    fn knn_closure_is_symmetric() {
        let inst = tiny3();
        let g = knn_candidates(&inst.cities, 1);
        // city 0 is the 1-NN of both others, so closure gives it degree 2
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.neighbors(1), &[0]);
        assert_eq!(g.neighbors(2), &[0]);
    }

    #[test]
    fn knn_with_max_k_is_complete() {
        let inst = tiny3();
        let g = knn_candidates(&inst.cities, 2);
        assert_eq!(g, CandidateGraph::complete(3));
        // oversized k clamps
        assert_eq!(knn_candidates(&inst.cities, 50), CandidateGraph::complete(3));
    }

    #[test]
    fn knn_connects_coincident_points() {
        let g = knn_candidates(&pts(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)]), 1);
        for c in 0..3 {
            assert!(!g.neighbors(c).is_empty());
        }
    }

    #[test]
    fn complete_graph_enumerates_the_full_two_opt_neighborhood() {
        let tour = Tour::new(vec![0, 1, 2, 3, 4]).unwrap();
        let moves: Vec<_> = enumerate_two_opt(&tour, &CandidateGraph::complete(5)).collect();
        assert_eq!(moves, vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
    }

    #[test]
    fn enumeration_respects_the_candidate_filter() {
        // only the edge (0, 3) is a candidate: the sole admitted reversal
        // from tour 0,1,2,3 is i=1, j=3 (new edge tour[0]-tour[3])
        let tour = Tour::new(vec![0, 1, 2, 3]).unwrap();
        let cand = CandidateGraph::from_edges(4, [(0, 3)]);
        let moves: Vec<_> = enumerate_two_opt(&tour, &cand).collect();
        assert_eq!(moves, vec![(1, 3)]);
    }

    #[test]
    fn tiny_tours_have_no_reversals() {
        let cand = CandidateGraph::complete(2);
        let tour = Tour::new(vec![0, 1]).unwrap();
        assert_eq!(enumerate_two_opt(&tour, &cand).count(), 0);
        let tour = Tour::new(vec![0]).unwrap();
        assert_eq!(enumerate_two_opt(&tour, &CandidateGraph::complete(1)).count(), 0);
    }

    #[test]
    fn full_enumeration_matches_naive_set_on_random_tours() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(3..=20);
            let mut order: Vec<usize> = (1..n).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            order.insert(0, 0);
            let tour = Tour::new(order).unwrap();
            let got: Vec<_> = enumerate_two_opt(&tour, &CandidateGraph::complete(n)).collect();
            let want: Vec<_> =
                (1..n - 1).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn bitflip_enumeration_skips_overflowing_picks() {
        let inst = tiny3();
        let tour = Tour::new(vec![0, 2, 1]).unwrap();
        let plan = PickingPlan::from_bits(vec![true, false]);
        let st = evaluate_full(&inst, &tour, &plan).unwrap();
        // item 0 can always be dropped; item 1 (w=3) would overflow 2+3 > 3
        let flips: Vec<_> = enumerate_bitflips(&inst, &st, &plan).collect();
        assert_eq!(flips, vec![0]);

        let plan = PickingPlan::empty(2);
        let st = evaluate_full(&inst, &tour, &plan).unwrap();
        let flips: Vec<_> = enumerate_bitflips(&inst, &st, &plan).collect();
        assert_eq!(flips, vec![0, 1]);
    }
}
