//! Union-find percolation analysis of the infinite-bias constraint graphs:
//! cluster-size statistics per sublattice, boundary-to-boundary spanning
//! and minimum spanning-path lengths.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::rbim::{infinite_bias_constraints, ConstraintGraph, SpinNode};
use super::StatMechError;
use crate::code::{sample_pattern, FamilyParams};
use crate::harness::mix_seed;

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    near: Vec<bool>,
    far: Vec<bool>,
    touched: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            near: vec![false; n],
            far: vec![false; n],
            touched: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.near[ra] |= self.near[rb];
        self.far[ra] |= self.far[rb];
    }

    fn add_edge(&mut self, u: SpinNode, v: SpinNode) {
        match (u, v) {
            (SpinNode::Spin(a), SpinNode::Spin(b)) => {
                self.touched[a] = true;
                self.touched[b] = true;
                self.union(a, b);
            }
            (SpinNode::Spin(a), boundary) | (boundary, SpinNode::Spin(a)) => {
                self.touched[a] = true;
                let root = self.find(a);
                match boundary {
                    SpinNode::NearBoundary => self.near[root] = true,
                    SpinNode::FarBoundary => self.far[root] = true,
                    SpinNode::Spin(_) => unreachable!(),
                }
            }
            // A direct boundary-to-boundary edge cannot occur for L >= 3.
            _ => {}
        }
    }
}

/// Cluster statistics of one sublattice.
#[derive(Debug, Clone)]
pub struct SublatticeStats {
    /// Number of constrained spins in each connected cluster.
    pub cluster_sizes: Vec<usize>,
    pub largest_cluster: usize,
    pub spanning: bool,
    /// Shortest boundary-to-boundary path, counted in constraints.
    pub min_spanning_path: Option<usize>,
}

/// Per-realization constraint-percolation statistics.
#[derive(Debug, Clone)]
pub struct ClusterStats {
    pub sx: SublatticeStats,
    pub sz: SublatticeStats,
}

impl ClusterStats {
    pub fn spanning(&self) -> bool {
        self.sx.spanning || self.sz.spanning
    }

    pub fn min_spanning_path(&self) -> Option<usize> {
        match (self.sx.min_spanning_path, self.sz.min_spanning_path) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

fn sublattice_stats(
    spin_count: usize,
    edges: impl Iterator<Item = (SpinNode, SpinNode)> + Clone,
) -> SublatticeStats {
    let mut uf = UnionFind::new(spin_count);
    for (u, v) in edges.clone() {
        uf.add_edge(u, v);
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for s in 0..spin_count {
        if uf.touched[s] {
            let root = uf.find(s);
            *sizes.entry(root).or_insert(0) += 1;
        }
    }
    let mut spanning = false;
    for (&root, _) in sizes.iter() {
        if uf.near[root] && uf.far[root] {
            spanning = true;
        }
    }
    let cluster_sizes: Vec<usize> = sizes.values().copied().collect();
    let largest_cluster = cluster_sizes.iter().copied().max().unwrap_or(0);
    let min_spanning_path = if spanning {
        shortest_path(spin_count, edges)
    } else {
        None
    };
    SublatticeStats {
        cluster_sizes,
        largest_cluster,
        spanning,
        min_spanning_path,
    }
}

/// Breadth-first shortest near-to-far path counted in edges (constraints).
fn shortest_path(
    spin_count: usize,
    edges: impl Iterator<Item = (SpinNode, SpinNode)>,
) -> Option<usize> {
    use std::collections::VecDeque;
    let near = spin_count;
    let far = spin_count + 1;
    let id = |node: SpinNode| match node {
        SpinNode::Spin(s) => s,
        SpinNode::NearBoundary => near,
        SpinNode::FarBoundary => far,
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); spin_count + 2];
    for (u, v) in edges {
        let (u, v) = (id(u), id(v));
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![usize::MAX; spin_count + 2];
    let mut queue = VecDeque::new();
    dist[near] = 0;
    queue.push_back(near);
    while let Some(u) = queue.pop_front() {
        if u == far {
            return Some(dist[far]);
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    None
}

/// Full cluster statistics of one constraint graph. Four-spin constraints
/// enter both sublattices.
pub fn constraint_cluster_stats(graph: &ConstraintGraph) -> ClusterStats {
    let sx_edges = graph.constraints.iter().filter_map(|c| c.sx_edge);
    let sz_edges = graph.constraints.iter().filter_map(|c| c.sz_edge);
    ClusterStats {
        sx: sublattice_stats(graph.sx_count, sx_edges),
        sz: sublattice_stats(graph.sz_count, sz_edges),
    }
}

/// Aggregated percolation observables over IID pattern realizations.
#[derive(Debug, Clone)]
pub struct PercolationRun {
    pub l: usize,
    pub params: FamilyParams,
    pub realizations: usize,
    pub spanning_probability: f64,
    pub mean_largest_cluster: f64,
    /// Mean of the per-realization minimum spanning path, over the
    /// realizations that span.
    pub mean_spanning_path: Option<f64>,
    /// Pooled cluster-size counts over both sublattices.
    pub size_histogram: BTreeMap<usize, u64>,
}

/// Runs `realizations` independent constraint-percolation instances with
/// counter-derived seeds.
pub fn percolation_stats(
    params: FamilyParams,
    l: usize,
    realizations: usize,
    seed: u64,
) -> Result<PercolationRun, StatMechError> {
    let per: Vec<ClusterStats> = (0..realizations)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, i as u64));
            let pattern = sample_pattern(params, l * l, &mut rng);
            let graph = infinite_bias_constraints(&pattern, l)?;
            Ok(constraint_cluster_stats(&graph))
        })
        .collect::<Result<_, StatMechError>>()?;
    let spanning = per.iter().filter(|s| s.spanning()).count();
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    let mut largest_sum = 0usize;
    let mut path_sum = 0usize;
    let mut path_count = 0usize;
    for stats in &per {
        largest_sum += stats.sx.largest_cluster.max(stats.sz.largest_cluster);
        for &s in stats.sx.cluster_sizes.iter().chain(&stats.sz.cluster_sizes) {
            *histogram.entry(s).or_insert(0) += 1;
        }
        if let Some(p) = stats.min_spanning_path() {
            path_sum += p;
            path_count += 1;
        }
    }
    Ok(PercolationRun {
        l,
        params,
        realizations,
        spanning_probability: spanning as f64 / realizations.max(1) as f64,
        mean_largest_cluster: largest_sum as f64 / realizations.max(1) as f64,
        mean_spanning_path: (path_count > 0).then(|| path_sum as f64 / path_count as f64),
        size_histogram: histogram,
    })
}

/// Maximum-likelihood estimate of the cluster-size distribution exponent:
/// the density of clusters of size s falls as s^(-tau) at criticality.
/// The fit window [8, L^1.2] stays well below the spanning-cluster hump,
/// where the pure power law holds. Returns None when fewer than 100
/// clusters land in the window.
pub fn fisher_exponent_fit(run: &PercolationRun) -> Option<f64> {
    let s_min = 8usize;
    let s_cut = (run.l as f64).powf(1.2) as usize;
    let mut count = 0u64;
    let mut log_sum = 0.0f64;
    for (&size, &c) in run.size_histogram.range(s_min..=s_cut) {
        count += c;
        log_sum += c as f64 * (size as f64 / (s_min as f64 - 0.5)).ln();
    }
    if count < 100 {
        return None;
    }
    Some(1.0 + count as f64 / log_sum)
}

/// Log-log slope of mean spanning-path length against L.
pub fn path_length_exponent(lengths: &[(usize, f64)]) -> Option<f64> {
    if lengths.len() < 2 {
        return None;
    }
    let points: Vec<(f64, f64)> = lengths
        .iter()
        .map(|&(l, len)| ((l as f64).ln(), len.ln()))
        .collect();
    Some(least_squares_slope(&points))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
