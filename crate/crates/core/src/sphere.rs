//! Antipodally closed samples of the sphere and the Borsuk graphs they induce.
//!
//! A sample stores every base point next to its exact negation, so vertex
//! `2i + 1` is the antipode of vertex `2i`. Two sample points are adjacent when
//! one lies within `epsilon` of the other's antipode, i.e. when their inner
//! product is below `-cos(epsilon)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::closure::GraphHom;
use crate::graph::Graph;
use crate::walk::{apply_move, inverse_move, Move, Walk};

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_PROBES: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SphereError {
    #[error("out of range: {0}")]
    Domain(String),
    #[error("sample is empty")]
    EmptySample,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("vertex {vertex} out of range for a sample of {n} points")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("points at index {index} and {} are {distance} apart, not below {epsilon}", index + 1)]
    TooFar { index: usize, distance: f64, epsilon: f64 },
    #[error("{count} edges map to non-edges, first {first:?}")]
    NotHomomorphism {
        count: usize,
        /// (u, v, image of u, image of v)
        first: Vec<(usize, usize, usize, usize)>,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(
        "no colliding pair at distance in [{:.4}, {:.4}]: {colliding_pairs} colliding pairs, closest {closest:?}, largest fiber {largest_fiber}",
        window.0, window.1
    )]
    SearchFailure {
        window: (f64, f64),
        colliding_pairs: usize,
        closest: Option<f64>,
        farthest: Option<f64>,
        largest_fiber: usize,
    },
    #[error("{tried} candidate pairs failed cycle validation: {reason}")]
    Geometry { tried: usize, reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Geodesic distance between unit vectors.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

fn normalize(mut x: Vec<f64>) -> Vec<f64> {
    let norm = dot(&x, &x).sqrt();
    for c in &mut x {
        *c /= norm;
    }
    x
}

/// Standard normal pair by the Marsaglia polar method.
fn gaussian_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let u = 2.0 * rng.gen::<f64>() - 1.0;
        let v = 2.0 * rng.gen::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let m = (-2.0 * s.ln() / s).sqrt();
            return (u * m, v * m);
        }
    }
}

/// Uniform point on the sphere of dimension `n` (a unit vector in R^{n+1}).
pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut x = Vec::with_capacity(n + 2);
        while x.len() < n + 1 {
            let (a, b) = gaussian_pair(rng);
            x.push(a);
            x.push(b);
        }
        x.truncate(n + 1);
        if dot(&x, &x) > 1e-200 {
            return normalize(x);
        }
    }
}

/// Point at parameter `t` along the great circle from `a` towards `b`, where
/// `t = 0` is `a` and `t = 1` is `b`. Requires `a != -b`.
pub fn slerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    let theta = distance(a, b);
    if theta < 1e-15 {
        return a.to_vec();
    }
    let (sa, sb) = (((1.0 - t) * theta).sin() / theta.sin(), (t * theta).sin() / theta.sin());
    normalize(a.iter().zip(b).map(|(x, y)| sa * x + sb * y).collect())
}

/// Antipodally closed point set on the sphere of dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereSample {
    n: usize,
    seed: u64,
    points: Vec<Vec<f64>>,
}

impl SphereSample {
    /// `count` uniform points and their antipodes, from a seeded ChaCha8 stream.
    pub fn random(n: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = (0..count).map(|_| random_unit_vector(&mut rng, n)).collect();
        Self::from_base(n, base, seed)
    }

    /// Normalizes each base point and appends its negation right after it.
    pub fn from_base(n: usize, base: Vec<Vec<f64>>, seed: u64) -> Self {
        let mut points = Vec::with_capacity(2 * base.len());
        for x in base {
            assert_eq!(x.len(), n + 1, "point has wrong dimension");
            let x = normalize(x);
            let neg = x.iter().map(|c| -c).collect();
            points.push(x);
            points.push(neg);
        }
        SphereSample { n, seed, points }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn antipode(&self, i: usize) -> usize {
        i ^ 1
    }

    /// Closest sample point to `x`, ties to the lowest index. Returns the
    /// index and the inner product.
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d = dot(p, x);
            if d > best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Dump: header `n epsilon N seed`, then every point (antipodes included)
    /// one per line.
    pub fn to_dump(&self, epsilon: f64) -> String {
        let mut out = format!("{} {} {} {}\n", self.n, epsilon, self.points.len() / 2, self.seed);
        for p in &self.points {
            let line: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Inverse of [`SphereSample::to_dump`]; returns the sample and epsilon.
    pub fn parse_dump(text: &str) -> Result<(Self, f64), SphereError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| SphereError::Parse { line: line + 1, message };
        let (hline, header) = lines.next().ok_or_else(|| err(0, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(err(hline, "header must be `n epsilon N seed`".into()));
        }
        let n: usize = fields[0].parse().map_err(|e| err(hline, format!("n: {e}")))?;
        let epsilon: f64 = fields[1].parse().map_err(|e| err(hline, format!("epsilon: {e}")))?;
        let count: usize = fields[2].parse().map_err(|e| err(hline, format!("N: {e}")))?;
        let seed: u64 = fields[3].parse().map_err(|e| err(hline, format!("seed: {e}")))?;
        let mut points = Vec::with_capacity(2 * count);
        for (ln, line) in lines {
            let p = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(ln, e.to_string()))?;
            if p.len() != n + 1 {
                return Err(err(ln, format!("expected {} coordinates, got {}", n + 1, p.len())));
            }
            if (dot(&p, &p).sqrt() - 1.0).abs() > NORM_TOLERANCE {
                return Err(err(ln, "point is not a unit vector".into()));
            }
            if points.len() % 2 == 1 {
                let prev: &Vec<f64> = points.last().expect("odd length");
                if prev.iter().zip(&p).any(|(a, b)| *a != -*b) {
                    return Err(err(ln, "point is not the exact antipode of the previous one".into()));
                }
            }
            points.push(p);
        }
        if points.len() != 2 * count {
            return Err(err(0, format!("header promises {} points, found {}", 2 * count, points.len())));
        }
        Ok((SphereSample { n, seed, points }, epsilon))
    }
}

/// The subgraph of the Borsuk graph induced by a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxGraph {
    sample: SphereSample,
    epsilon: f64,
    graph: Graph,
}

impl ApproxGraph {
    pub fn new(sample: SphereSample, epsilon: f64) -> Self {
        let threshold = -epsilon.cos();
        let pts = sample.points();
        let base = pts.len() / 2;
        let mut edges = Vec::new();
        // negated copies make dot(p, -q) == -dot(p, q) bit for bit, so one
        // product per base pair decides all four vertex pairs
        for a in 0..base {
            let x = &pts[2 * a];
            if -dot(x, x) < threshold {
                edges.push((2 * a, 2 * a + 1));
            }
            for b in a + 1..base {
                let d = dot(x, &pts[2 * b]);
                if d < threshold {
                    edges.push((2 * a, 2 * b));
                    edges.push((2 * a + 1, 2 * b + 1));
                }
                if -d < threshold {
                    edges.push((2 * a, 2 * b + 1));
                    edges.push((2 * a + 1, 2 * b));
                }
            }
        }
        let graph = Graph::from_edges(pts.len(), edges).expect("edges are in range and loop-free");
        ApproxGraph { sample, epsilon, graph }
    }

    pub fn sample(&self) -> &SphereSample {
        &self.sample
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Vertex id to point index cross reference (the identity, one pair per line).
    pub fn xref_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.graph.n() {
            let _ = writeln!(out, "{i} {i}");
        }
        out
    }

    /// Walk vertex at position `j` of the bracket walk visiting `id` there.
    fn walk_vertex(&self, j: usize, id: usize) -> usize {
        if j.is_multiple_of(2) {
            id
        } else {
            self.sample.antipode(id)
        }
    }

    /// Sample points of a walk with every odd position replaced by its antipode.
    pub fn bracket_ids(&self, w: &Walk) -> Vec<usize> {
        w.vertices()
            .iter()
            .enumerate()
            .map(|(j, &v)| self.walk_vertex(j, v))
            .collect()
    }
}

/// `N` uniform points and their antipodes, with the induced Borsuk graph.
pub fn sample_approximation(n: usize, epsilon: f64, count: usize, seed: u64) -> ApproxGraph {
    ApproxGraph::new(SphereSample::random(n, count, seed), epsilon)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    // split first so a sharply peaked integrand cannot fool the first estimate
    const PIECES: usize = 32;
    let h = (b - a) / PIECES as f64;
    (0..PIECES)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, if i + 1 == PIECES { b } else { a + (i + 1) as f64 * h });
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            adaptive_simpson(&f, x0, x1, f0, fm, f1, whole, tol / PIECES as f64, 40)
        })
        .sum()
}

/// Normalized measure of a spherical cap of angular radius `epsilon` on the
/// sphere of dimension `n`.
pub fn cap_measure(n: usize, epsilon: f64) -> Result<f64, SphereError> {
    if n < 1 {
        return Err(SphereError::Domain(format!("dimension {n} < 1")));
    }
    if !(0.0..=PI).contains(&epsilon) {
        return Err(SphereError::Domain(format!("radius {epsilon} outside [0, pi]")));
    }
    let f = |t: f64| t.sin().powi(n as i32 - 1);
    let total = integrate(f, 0.0, PI, 1e-14);
    let part = integrate(f, 0.0, epsilon, 1e-14 * total.max(1e-300));
    Ok((part / total).clamp(0.0, 1.0))
}

/// Largest distance from `probes` random points to the sample: a lower
/// estimate of the covering radius. Probes come from one seeded stream, so a
/// larger probe count only adds points.
pub fn covering_radius_estimate(s: &SphereSample, probes: usize, seed: u64) -> Result<f64, SphereError> {
    if s.is_empty() {
        return Err(SphereError::EmptySample);
    }
    if probes == 0 {
        return Err(SphereError::Domain("probe count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let x = random_unit_vector(&mut rng, s.dimension());
        let (_, best) = s.nearest(&x);
        worst = worst.max(best.clamp(-1.0, 1.0).acos());
    }
    Ok(worst)
}

/// Sends each fine vertex to its nearest coarse vertex and checks that
/// edges survive.
pub fn nearest_vertex_hom(fine: &ApproxGraph, coarse: &ApproxGraph) -> Result<GraphHom, SphereError> {
    let (df, dc) = (fine.sample.dimension(), coarse.sample.dimension());
    if df != dc {
        return Err(SphereError::DimensionMismatch { left: df, right: dc });
    }
    if coarse.sample.is_empty() {
        return Err(SphereError::EmptySample);
    }
    let map: Vec<usize> = fine.sample.points().iter().map(|p| coarse.sample.nearest(p).0).collect();
    let bad: Vec<_> = fine
        .graph
        .edges()
        .iter()
        .filter(|e| !coarse.graph.has_edge(map[e.u()], map[e.v()]))
        .map(|e| (e.u(), e.v(), map[e.u()], map[e.v()]))
        .collect();
    if !bad.is_empty() {
        return Err(SphereError::NotHomomorphism {
            count: bad.len(),
            first: bad.into_iter().take(10).collect(),
        });
    }
    Ok(GraphHom::new(fine.graph.clone(), coarse.graph.clone(), map).expect("edges checked above"))
}

/// The walk `v0, -v1, v2, -v3, ...` for sample points each closer than
/// epsilon to the next.
pub fn bracket_walk(g: &ApproxGraph, ids: &[usize]) -> Result<Walk, SphereError> {
    let n = g.sample.len();
    if ids.is_empty() {
        return Err(SphereError::Precondition("empty point sequence".into()));
    }
    if let Some(&vertex) = ids.iter().find(|&&v| v >= n) {
        return Err(SphereError::VertexOutOfRange { vertex, n });
    }
    let c = g.epsilon.cos();
    for (index, pair) in ids.windows(2).enumerate() {
        let d = dot(g.sample.point(pair[0]), g.sample.point(pair[1]));
        if d <= c {
            return Err(SphereError::TooFar {
                index,
                distance: d.clamp(-1.0, 1.0).acos(),
                epsilon: g.epsilon,
            });
        }
    }
    let vertices = ids.iter().enumerate().map(|(j, &v)| g.walk_vertex(j, v)).collect();
    Ok(Walk::new(&g.graph, vertices).expect("close consecutive points give edges"))
}

#[derive(Clone, Copy, Debug)]
pub struct NoninjectiveOptions {
    pub probes: usize,
    pub seed: u64,
    /// Candidate pairs tried before giving up.
    pub max_candidates: usize,
}

impl Default for NoninjectiveOptions {
    fn default() -> Self {
        NoninjectiveOptions {
            probes: DEFAULT_PROBES,
            seed: 0,
            max_candidates: 10_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NoninjectiveCycle {
    /// Closed walk of length 2r+3 with distinct vertices.
    pub cycle: Walk,
    pub pair: (usize, usize),
    pub pair_distance: f64,
    pub covering_radius: f64,
    pub window: (f64, f64),
    pub image_size: usize,
    pub candidates_tried: usize,
}

/// Finds two vertices with the same image at moderate distance and threads a
/// (2r+3)-cycle through both along a great circle.
pub fn find_noninjective_c2r3(
    g: &ApproxGraph,
    phi: &GraphHom,
    r: usize,
    opts: NoninjectiveOptions,
) -> Result<NoninjectiveCycle, SphereError> {
    if r < 1 {
        return Err(SphereError::Precondition(format!("r = {r} must be at least 1")));
    }
    let want = PI / (2 * r + 1) as f64;
    if (g.epsilon - want).abs() > 1e-9 {
        return Err(SphereError::Precondition(format!(
            "epsilon {} differs from pi/{} = {want}",
            g.epsilon,
            2 * r + 1
        )));
    }
    if phi.source() != &g.graph {
        return Err(SphereError::Precondition("homomorphism source is not the sample graph".into()));
    }
    let s = &g.sample;
    let delta = covering_radius_estimate(s, opts.probes, opts.seed)?;
    let lo = (4 * r + 2) as f64 * delta;
    let hi = 2.0 * (g.epsilon - 2.0 * delta);

    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); phi.target().n()];
    for v in 0..s.len() {
        fibers[phi.apply(v)].push(v);
    }
    let largest_fiber = fibers.iter().map(Vec::len).max().unwrap_or(0);
    let mut colliding = 0usize;
    let mut closest: Option<f64> = None;
    let mut farthest: Option<f64> = None;
    let mut candidates = Vec::new();
    for fiber in &fibers {
        for (i, &a) in fiber.iter().enumerate() {
            for &b in &fiber[i + 1..] {
                let d = distance(s.point(a), s.point(b));
                colliding += 1;
                closest = Some(closest.map_or(d, |c: f64| c.min(d)));
                farthest = Some(farthest.map_or(d, |c: f64| c.max(d)));
                if lo <= d && d <= hi {
                    candidates.push((a, b, d));
                }
            }
        }
    }
    if candidates.is_empty() {
        return Err(SphereError::SearchFailure {
            window: (lo, hi),
            colliding_pairs: colliding,
            closest,
            farthest,
            largest_fiber,
        });
    }
    // the arc steps have slack theta/(2r+1) and the two closing steps have
    // slack eps - theta/2; prefer pairs balancing the two
    let target = g.epsilon * 2.0 * (2 * r + 1) as f64 / (2 * r + 3) as f64;
    candidates.sort_by(|x, y| {
        (x.2 - target)
            .abs()
            .total_cmp(&(y.2 - target).abs())
            .then((x.0, x.1).cmp(&(y.0, y.1)))
    });
    let mut last_reason = String::new();
    let mut tried = 0;
    for &(v, w, theta) in candidates.iter().take(opts.max_candidates) {
        tried += 1;
        match thread_cycle(g, v, w, theta, r) {
            Ok(cycle) => {
                let image_size = phi.image_size(cycle.vertices());
                return Ok(NoninjectiveCycle {
                    cycle,
                    pair: (v, w),
                    pair_distance: theta,
                    covering_radius: delta,
                    window: (lo, hi),
                    image_size,
                    candidates_tried: tried,
                });
            }
            Err(reason) => last_reason = reason,
        }
    }
    Err(SphereError::Geometry {
        tried,
        reason: last_reason,
    })
}

fn thread_cycle(g: &ApproxGraph, v: usize, w: usize, theta: f64, r: usize) -> Result<Walk, String> {
    let s = &g.sample;
    let (pv, pw) = (s.point(v), s.point(w));
    // unit tangent at v such that the circle reaches w at angle -theta
    let (c, sn) = (theta.cos(), theta.sin());
    let tangent: Vec<f64> = pv.iter().zip(pw).map(|(a, b)| (c * a - b) / sn).collect();
    let at = |t: f64| -> Vec<f64> {
        normalize(pv.iter().zip(&tangent).map(|(a, b)| t.cos() * a + t.sin() * b).collect())
    };
    let odd = 2 * r + 1;
    let mut ids = Vec::with_capacity(odd + 3);
    ids.push(v);
    for i in 1..odd {
        ids.push(s.nearest(&at(i as f64 * (PI - theta) / odd as f64)).0);
    }
    ids.push(s.antipode(w));
    ids.push(s.nearest(&at(PI - theta / 2.0)).0);
    ids.push(s.antipode(v));
    let walk = bracket_walk(g, &ids).map_err(|e| e.to_string())?;
    if walk.len() != odd + 2 || !walk.is_closed() {
        return Err(format!("bracket walk {walk} is not closed of length {}", odd + 2));
    }
    if !walk.is_cycle() {
        return Err(format!("bracket walk {walk} repeats a vertex"));
    }
    debug_assert!(walk.vertices().contains(&v) && walk.vertices().contains(&w));
    Ok(walk)
}

/// Minimum degree over vertex count.
pub fn min_degree_ratio(g: &Graph) -> f64 {
    g.min_degree() as f64 / g.n() as f64
}

#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    /// Largest geodesic step of the continuous homotopy between grid neighbors.
    pub max_step: f64,
    pub max_rows: usize,
    pub seed: u64,
}

impl GridOptions {
    pub fn for_epsilon(epsilon: f64) -> Self {
        GridOptions {
            max_step: epsilon / 8.0,
            max_rows: 4096,
            seed: 0,
        }
    }
}

/// Builds homotopy moves between two walks of a sample graph by
/// discretizing a continuous homotopy of the underlying sphere paths. Every
/// move is checked as it is produced. Fails when snapping to the sample is
/// too coarse for the grid.
pub fn geometric_homotopy(g: &ApproxGraph, p: &Walk, q: &Walk, opts: GridOptions) -> Result<Vec<Move>, SphereError> {
    if !p.is_valid_in(&g.graph) || !q.is_valid_in(&g.graph) {
        return Err(SphereError::Precondition("walks must lie in the sample graph".into()));
    }
    if p.first() != q.first() || p.last() != q.last() || p.parity() != q.parity() {
        return Err(SphereError::Precondition("walks differ in endpoints or parity".into()));
    }
    let s = &g.sample;
    let (bp, bq) = (g.bracket_ids(p), g.bracket_ids(q));
    let pole = choose_pole(s, &bp, &bq, opts.seed)?;
    let mut step = opts.max_step;
    let mut last_err = None;
    for _ in 0..4 {
        match grid_attempt(g, p, q, &bp, &bq, &pole, step, opts.max_rows) {
            Ok(moves) => return Ok(moves),
            Err(e) => last_err = Some(e),
        }
        step /= 2.0;
    }
    Err(last_err.expect("at least one attempt"))
}

/// A point far from both bracket paths; the stereographic projection from it
/// carries the homotopy.
fn choose_pole(s: &SphereSample, bp: &[usize], bq: &[usize], seed: u64) -> Result<Vec<f64>, SphereError> {
    let mut trace = Vec::new();
    for ids in [bp, bq] {
        trace.push(s.point(ids[0]).to_vec());
        for pair in ids.windows(2) {
            for k in 1..=16 {
                trace.push(slerp(s.point(pair[0]), s.point(pair[1]), k as f64 / 16.0));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..512 {
        let x = random_unit_vector(&mut rng, s.dimension());
        let gap = trace.iter().map(|t| distance(t, &x)).fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|(b, _)| gap > *b) {
            best = Some((gap, x));
        }
    }
    let (gap, pole) = best.expect("512 candidates");
    if gap < 0.05 {
        return Err(SphereError::Geometry {
            tried: 512,
            reason: "paths pass near every candidate pole".into(),
        });
    }
    Ok(pole)
}

fn to_plane(x: &[f64], pole: &[f64]) -> Vec<f64> {
    let h = dot(x, pole);
    x.iter().zip(pole).map(|(a, b)| (a - h * b) / (1.0 - h)).collect()
}

fn from_plane(y: &[f64], pole: &[f64]) -> Vec<f64> {
    let s = dot(y, y);
    normalize(y.iter().zip(pole).map(|(a, b)| (2.0 * a + (s - 1.0) * b) / (s + 1.0)).collect())
}

/// Points along a bracket path, each segment split into an odd number of
/// pieces, `total` pieces overall. An edgeless path stays put.
fn refine_path(s: &SphereSample, ids: &[usize], total: usize, step: f64) -> (Vec<usize>, Vec<Vec<f64>>) {
    let k = ids.len() - 1;
    if k == 0 {
        return (Vec::new(), vec![s.point(ids[0]).to_vec(); total + 1]);
    }
    let lens: Vec<f64> = ids.windows(2).map(|w| distance(s.point(w[0]), s.point(w[1]))).collect();
    let mut pieces: Vec<usize> = lens
        .iter()
        .map(|l| {
            let m = (l / step).ceil() as usize;
            m.max(1) | 1
        })
        .collect();
    let mut sum: usize = pieces.iter().sum();
    while sum < total {
        // longest pieces first, round robin
        let j = (0..k)
            .max_by(|&a, &b| {
                (lens[a] / pieces[a] as f64)
                    .total_cmp(&(lens[b] / pieces[b] as f64))
                    .then(b.cmp(&a))
            })
            .expect("at least one segment");
        pieces[j] += 2;
        sum += 2;
    }
    let mut pts = Vec::with_capacity(total + 1);
    for (seg, &m) in pieces.iter().enumerate() {
        let (a, b) = (s.point(ids[seg]), s.point(ids[seg + 1]));
        for h in 0..m {
            pts.push(slerp(a, b, h as f64 / m as f64));
        }
    }
    pts.push(s.point(ids[k]).to_vec());
    (pieces, pts)
}

fn natural_length(s: &SphereSample, ids: &[usize], step: f64) -> usize {
    ids.windows(2)
        .map(|w| ((distance(s.point(w[0]), s.point(w[1])) / step).ceil() as usize).max(1) | 1)
        .sum()
}

/// Moves turning walk `w` into the walk whose bracket points are `target`,
/// by splitting each edge into the prescribed odd number of pieces.
fn refinement_moves(g: &ApproxGraph, w: &Walk, pieces: &[usize], target: &[usize]) -> Result<(Vec<Move>, Walk), String> {
    let s = &g.sample;
    let mut cur = w.clone();
    let mut moves = Vec::new();
    let mut push = |cur: &mut Walk, mv: Move| -> Result<(), String> {
        *cur = apply_move(&g.graph, cur, mv).map_err(|e| e.to_string())?;
        moves.push(mv);
        Ok(())
    };
    if w.is_empty() {
        let v = w.first();
        for h in (0..target.len() - 1).step_by(2) {
            push(&mut cur, Move::Ins { index: h, vertex: s.antipode(v) })?;
        }
    } else {
        let mut pos = 0;
        for &m in pieces {
            for h in (1..m.saturating_sub(1)).step_by(2) {
                let j = pos + h;
                push(&mut cur, Move::Ins { index: j - 1, vertex: g.walk_vertex(j, target[j]) })?;
                if target[j + 1] != target[j - 1] {
                    push(&mut cur, Move::Sub { index: j + 1, vertex: g.walk_vertex(j + 1, target[j + 1]) })?;
                }
            }
            pos += m;
        }
    }
    if g.bracket_ids(&cur) != target {
        return Err("refinement did not reach the snapped path".into());
    }
    Ok((moves, cur))
}

#[allow(clippy::too_many_arguments)]
fn grid_attempt(
    g: &ApproxGraph,
    p: &Walk,
    q: &Walk,
    bp: &[usize],
    bq: &[usize],
    pole: &[f64],
    step: f64,
    max_rows: usize,
) -> Result<Vec<Move>, SphereError> {
    let s = &g.sample;
    let geometry = |reason: String| SphereError::Geometry { tried: 1, reason };
    let total = natural_length(s, bp, step)
        .max(natural_length(s, bq, step))
        .max(2);
    // both counts share the parity of the walks
    let total = if total % 2 == p.parity() { total } else { total + 1 };
    let (pieces_p, fp) = refine_path(s, bp, total, step);
    let (pieces_q, fq) = refine_path(s, bq, total, step);
    let (yp, yq): (Vec<_>, Vec<_>) = fp.iter().zip(&fq).map(|(a, b)| (to_plane(a, pole), to_plane(b, pole))).unzip();
    let row_at = |t: f64| -> Vec<Vec<f64>> {
        yp.iter()
            .zip(&yq)
            .map(|(a, b)| from_plane(&a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect::<Vec<_>>(), pole))
            .collect()
    };
    let mut rows_count = 2;
    let rows = loop {
        let rows: Vec<Vec<Vec<f64>>> = (0..=rows_count).map(|i| row_at(i as f64 / rows_count as f64)).collect();
        let vertical = rows
            .windows(2)
            .flat_map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| distance(a, b)))
            .fold(0.0, f64::max);
        if vertical <= step {
            break rows;
        }
        if rows_count >= max_rows {
            return Err(geometry(format!("{rows_count} rows leave a vertical step of {vertical:.4}")));
        }
        rows_count *= 2;
    };
    let snap_row = |row: &Vec<Vec<f64>>, ends: (usize, usize)| -> Vec<usize> {
        let mut ids: Vec<usize> = row.iter().map(|x| s.nearest(x).0).collect();
        ids[0] = ends.0;
        *ids.last_mut().expect("nonempty") = ends.1;
        ids
    };
    let ends = (bp[0], *bp.last().expect("nonempty"));
    let snapped: Vec<Vec<usize>> = rows.iter().map(|r| snap_row(r, ends)).collect();
    let (mut moves, start) = refinement_moves(g, p, &pieces_p, &snapped[0]).map_err(geometry)?;
    let (q_moves, q_star) = refinement_moves(g, q, &pieces_q, &snapped[rows_count]).map_err(geometry)?;
    let mut cur = start;
    for next in &snapped[1..] {
        for (j, &id) in next.iter().enumerate().take(total).skip(1) {
            let vertex = g.walk_vertex(j, id);
            if cur.vertices()[j] != vertex {
                let mv = Move::Sub { index: j, vertex };
                cur = apply_move(&g.graph, &cur, mv).map_err(|e| geometry(e.to_string()))?;
                moves.push(mv);
            }
        }
    }
    if cur != q_star {
        return Err(geometry("grid rows did not end at the refined second walk".into()));
    }
    // undo the refinement of q
    let mut states = vec![q.clone()];
    for &mv in &q_moves {
        let next = apply_move(&g.graph, states.last().expect("nonempty"), mv).expect("replayed above");
        states.push(next);
    }
    for (i, &mv) in q_moves.iter().enumerate().rev() {
        moves.push(inverse_move(&states[i], mv));
    }
    Ok(moves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::replay_moves;

    #[test]
    fn cap_measure_closed_forms() {
        for n in 1..=10 {
            assert!((cap_measure(n, PI / 2.0).unwrap() - 0.5).abs() < 1e-10);
        }
        let e = PI / 5.0;
        assert!((cap_measure(1, e).unwrap() - e / PI).abs() < 1e-12);
        assert!((cap_measure(2, e).unwrap() - (1.0 - e.cos()) / 2.0).abs() < 1e-10);
        assert!(cap_measure(0, 1.0).is_err());
        assert!(cap_measure(2, 4.0).is_err());
    }

    #[test]
    fn single_pair_is_an_edge() {
        let g = sample_approximation(2, PI / 5.0, 1, 3);
        assert_eq!(g.graph().n(), 2);
        assert_eq!(g.graph().num_edges(), 1);
    }

    #[test]
    fn bracket_walk_alternates_antipodes() {
        let s = SphereSample::from_base(1, vec![vec![1.0, 0.0], vec![0.9, 0.1], vec![0.0, 1.0]], 0);
        let g = ApproxGraph::new(s, PI / 5.0);
        let w = bracket_walk(&g, &[0, 2, 0]).unwrap();
        assert_eq!(w.vertices(), &[0, 3, 0]);
        assert_eq!(bracket_walk(&g, &[2]).unwrap().vertices(), &[2]);
        assert!(matches!(
            bracket_walk(&g, &[0, 2, 4]),
            Err(SphereError::TooFar { index: 1, .. })
        ));
    }

    #[test]
    fn dump_round_trip() {
        let g = sample_approximation(2, PI / 5.0, 20, 11);
        let text = g.sample().to_dump(g.epsilon());
        let (s, eps) = SphereSample::parse_dump(&text).unwrap();
        assert_eq!(&s, g.sample());
        assert_eq!(eps, g.epsilon());
    }

    #[test]
    fn grid_homotopy_on_a_dense_sample() {
        let g = sample_approximation(2, PI / 5.0, 300, 5);
        let v = 0;
        let u = g.graph().neighbors(v)[0];
        let x = g.graph().neighbors(u)[1];
        let p = Walk::new(g.graph(), vec![v, u, x, u, v]).unwrap();
        let q = Walk::trivial(v);
        let moves = geometric_homotopy(&g, &p, &q, GridOptions::for_epsilon(g.epsilon())).unwrap();
        assert_eq!(replay_moves(g.graph(), &p, &moves).unwrap(), q);
    }
}
