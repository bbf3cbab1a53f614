//! Proximity graphs, equitable colourings, and the colouring step of the volume argument.

use std::collections::{BTreeSet, VecDeque};

use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{check_k_collapsing, ScanOptions, VectorFamily};
use crate::scalar::Scalar;
use crate::vector::sub;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    pub n: usize,
    adj: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph { n, adj: vec![BTreeSet::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b || a >= self.n || b >= self.n {
            return Err(Error::InvalidParameter(format!("bad edge ({a}, {b}) for n={}", self.n)));
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(())
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|a| self.adj[a].range(a + 1..).map(move |&b| (a, b))).collect()
    }
}

impl Serialize for SimpleGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SimpleGraph", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("edges", &self.edges())?;
        st.end()
    }
}

/// Joins `i` and `j` when `||x_i - x_j|| < threshold` (strict, exact in rational mode).
pub fn proximity_graph<S: Scalar>(fam: &VectorFamily<S>, threshold: &S) -> Result<SimpleGraph> {
    let mut g = SimpleGraph::empty(fam.len());
    for i in 0..fam.len() {
        for j in 0..i {
            let dist = fam.space.gauge(&sub(&fam.vectors[i], &fam.vectors[j]))?;
            if dist.approx_lt(threshold) {
                g.add_edge(j, i)?;
            }
        }
    }
    Ok(g)
}

pub fn max_degree(g: &SimpleGraph) -> usize {
    (0..g.n).map(|v| g.degree(v)).max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquitableColoring {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub class_sizes: Vec<usize>,
}

/// Independent check: proper, `k` colours, every class of size `floor(n/k)` or `ceil(n/k)`.
pub fn is_equitable_coloring(g: &SimpleGraph, k: usize, assignment: &[usize]) -> bool {
    if k == 0 || assignment.len() != g.n || assignment.iter().any(|&c| c >= k) {
        return false;
    }
    if g.edges().iter().any(|&(a, b)| assignment[a] == assignment[b]) {
        return false;
    }
    let mut sizes = vec![0usize; k];
    for &c in assignment {
        sizes[c] += 1;
    }
    let (lo, hi) = (g.n / k, g.n.div_ceil(k));
    sizes.iter().all(|&s| s == lo || s == hi)
}

struct Classes<'a> {
    g: &'a SimpleGraph,
    color: Vec<usize>,
    members: Vec<BTreeSet<usize>>,
}

impl Classes<'_> {
    fn can_move(&self, v: usize, to: usize) -> bool {
        self.g.neighbors(v).all(|u| self.color[u] != to)
    }

    fn move_vertex(&mut self, v: usize, to: usize) {
        let from = self.color[v];
        self.members[from].remove(&v);
        self.members[to].insert(v);
        self.color[v] = to;
    }

    /// Moves one vertex along a path of classes from a largest class to one at least two
    /// smaller. Returns false when no such path exists.
    fn balance_step(&mut self) -> bool {
        let k = self.members.len();
        let max = self.members.iter().map(BTreeSet::len).max().unwrap_or(0);
        // prev[c] = (previous class, vertex moved from it into c)
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; k];
        let mut seen = vec![false; k];
        let mut queue = VecDeque::new();
        for c in 0..k {
            if self.members[c].len() == max {
                seen[c] = true;
                queue.push_back(c);
            }
        }
        while let Some(a) = queue.pop_front() {
            for b in 0..k {
                if seen[b] {
                    continue;
                }
                let Some(&v) = self.members[a].iter().find(|&&v| self.can_move(v, b)) else { continue };
                seen[b] = true;
                prev[b] = Some((a, v));
                if self.members[b].len() + 2 <= max {
                    let mut path = Vec::new();
                    let mut c = b;
                    while let Some((p, v)) = prev[c] {
                        path.push((v, c));
                        c = p;
                    }
                    // each moved vertex was chosen against the classes as they were
                    for (v, to) in path {
                        self.move_vertex(v, to);
                    }
                    return true;
                }
                queue.push_back(b);
            }
        }
        false
    }
}

const SEARCH_LIMIT: u64 = 20_000_000;

/// Backtracking search for an equitable colouring, used when path moves get stuck.
fn exhaustive(g: &SimpleGraph, k: usize) -> Option<Vec<usize>> {
    let (lo, r) = (g.n / k, g.n % k);
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut color = vec![usize::MAX; g.n];
    let mut sizes = vec![0usize; k];
    let mut nodes = 0u64;

    fn rec(
        g: &SimpleGraph,
        order: &[usize],
        idx: usize,
        color: &mut [usize],
        sizes: &mut [usize],
        lo: usize,
        r: usize,
        nodes: &mut u64,
    ) -> bool {
        if idx == order.len() {
            return true;
        }
        *nodes += 1;
        if *nodes > SEARCH_LIMIT {
            return false;
        }
        let v = order[idx];
        let big = sizes.iter().filter(|&&s| s > lo).count();
        let mut tried_empty = false;
        for c in 0..sizes.len() {
            let cap = if sizes[c] > lo || big < r { lo + 1 } else { lo };
            if sizes[c] >= cap || g.neighbors(v).any(|u| color[u] == c) {
                continue;
            }
            // empty classes are interchangeable
            if sizes[c] == 0 {
                if tried_empty {
                    continue;
                }
                tried_empty = true;
            }
            color[v] = c;
            sizes[c] += 1;
            if rec(g, order, idx + 1, color, sizes, lo, r, nodes) {
                return true;
            }
            sizes[c] -= 1;
            color[v] = usize::MAX;
        }
        false
    }

    rec(g, &order, 0, &mut color, &mut sizes, lo, r, &mut nodes).then_some(color)
}

/// Equitable `k`-colouring for `k > max_degree(g)`.
///
/// Greedy start (each vertex joins the smallest admissible class), then path moves from
/// the largest classes towards classes at least two smaller, each strictly lowering
/// `sum_c (size_c - n/k)^2`. A backtracking search takes over if no path exists.
pub fn equitable_coloring(g: &SimpleGraph, k: usize) -> Result<EquitableColoring> {
    let delta = max_degree(g);
    if k == 0 || k <= delta {
        return Err(Error::Coloring { k, reason: format!("need k > max degree {delta}") });
    }
    let mut cl = Classes { g, color: vec![usize::MAX; g.n], members: vec![BTreeSet::new(); k] };
    for v in 0..g.n {
        let c = (0..k)
            .filter(|&c| cl.g.neighbors(v).all(|u| cl.color[u] != c))
            .min_by_key(|&c| (cl.members[c].len(), c))
            .expect("k > degree leaves a free class");
        cl.color[v] = c;
        cl.members[c].insert(v);
    }
    loop {
        let max = cl.members.iter().map(BTreeSet::len).max().unwrap_or(0);
        let min = cl.members.iter().map(BTreeSet::len).min().unwrap_or(0);
        if max <= min + 1 {
            break;
        }
        if !cl.balance_step() {
            let color = exhaustive(g, k).ok_or_else(|| Error::Coloring { k, reason: "search limit reached".into() })?;
            cl.color = color;
            break;
        }
    }
    let mut class_sizes = vec![0; k];
    for &c in &cl.color {
        class_sizes[c] += 1;
    }
    Ok(EquitableColoring { k, assignment: cl.color, class_sizes })
}

/// Seeded random graph with maximum degree at most `max_deg`: `attempts` random pairs,
/// each kept unless it would exceed the degree cap.
pub fn random_bounded_degree(n: usize, max_deg: usize, attempts: usize, seed: u64) -> SimpleGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SimpleGraph::empty(n);
    if n < 2 {
        return g;
    }
    for _ in 0..attempts {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && g.degree(a) < max_deg && g.degree(b) < max_deg {
            g.add_edge(a, b).expect("valid edge");
        }
    }
    g
}

/// The partition inequality `((q+1)^r q^(k-r))^(1/k) <= (1+2/k)^d` with `q = floor(m/k)`,
/// `r = m - kq`, compared in integers as `k^(dk) (q+1)^r q^(k-r) <= (k+2)^(dk)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BmInequality {
    pub m: usize,
    pub k: usize,
    pub d: usize,
    pub q: usize,
    pub r: usize,
    /// `((q+1)^r q^(k-r))^(1/k)`.
    pub lhs: f64,
    /// `(1+2/k)^d`.
    pub rhs: f64,
    pub holds: bool,
    /// `m <= k(1+2/k)^d`, checked exactly.
    pub simple_bound_holds: bool,
}

pub fn bm_inequality(m: usize, k: usize, d: usize) -> Result<BmInequality> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let (q, r) = (m / k, m % k);
    let dk = d * k;
    let kb = BigInt::from(k);
    let left = num::pow(kb.clone(), dk) * num::pow(BigInt::from(q + 1), r) * num::pow(BigInt::from(q), k - r);
    let right = num::pow(BigInt::from(k + 2), dk);
    // m k^(d-1) <= (k+2)^d
    let simple = BigInt::from(m) * num::pow(kb, d.saturating_sub(1)) <= num::pow(BigInt::from(k + 2), d);
    let lhs = (((q + 1) as f64).powi(r as i32) * (q as f64).powi((k - r) as i32)).powf(1.0 / k as f64);
    let rhs = (1.0 + 2.0 / k as f64).powi(d as i32);
    Ok(BmInequality { m, k, d, q, r, lhs, rhs, holds: left <= right, simple_bound_holds: simple })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Precondition,
    DegreeBound,
    Coloring,
    Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: Stage,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub m: usize,
    pub k: usize,
    pub d: usize,
    pub stages: Vec<StageReport>,
    pub max_degree: usize,
    pub class_sizes: Option<Vec<usize>>,
    pub inequality: BmInequality,
}

impl PipelineReport {
    pub fn ok(&self) -> bool {
        self.stages.iter().all(|s| s.ok)
    }

    pub fn first_failure(&self) -> Option<Stage> {
        self.stages.iter().find(|s| !s.ok).map(|s| s.stage)
    }
}

/// Runs the colouring argument on a concrete family: proximity graph at distance 1, the
/// degree bound `k - 2`, an equitable `k`-colouring, and the resulting partition inequality.
pub fn bm_pipeline_check<S: Scalar>(fam: &VectorFamily<S>, k: usize, opts: &ScanOptions) -> Result<PipelineReport> {
    let m = fam.len();
    let d = fam.space.dim;
    if k < 2 || k > m {
        return Err(Error::InvalidParameter(format!("need 2 <= k <= m, got k={k}, m={m}")));
    }
    let mut stages = Vec::new();
    let norms = fam.norms()?;
    let short = norms.iter().position(|n| !S::one().approx_le(n));
    let coll = check_k_collapsing(fam, k, opts)?;
    let detail = match (&short, &coll.witness) {
        (None, None) => format!("norms >= 1 and {k}-collapsing"),
        (Some(i), _) => format!("vector {i} has norm below 1"),
        (None, Some(w)) => format!("subset {w:?} sums to norm above 1"),
    };
    stages.push(StageReport { stage: Stage::Precondition, ok: short.is_none() && coll.holds, detail });

    let g = proximity_graph(fam, &S::one())?;
    let delta = max_degree(&g);
    stages.push(StageReport {
        stage: Stage::DegreeBound,
        ok: delta + 2 <= k,
        detail: format!("max degree {delta}, allowed {}", k - 2),
    });

    let class_sizes = match equitable_coloring(&g, k) {
        Ok(c) => {
            let ok = is_equitable_coloring(&g, k, &c.assignment);
            stages.push(StageReport { stage: Stage::Coloring, ok, detail: format!("class sizes {:?}", c.class_sizes) });
            Some(c.class_sizes)
        }
        Err(e) => {
            stages.push(StageReport { stage: Stage::Coloring, ok: false, detail: e.to_string() });
            None
        }
    };

    let inequality = bm_inequality(m, k, d)?;
    stages.push(StageReport {
        stage: Stage::Inequality,
        ok: inequality.holds,
        detail: format!("{:.6} <= {:.6}", inequality.lhs, inequality.rhs),
    });
    Ok(PipelineReport { m, k, d, stages, max_degree: delta, class_sizes, inequality })
}
