//! Weighted graphs over `F_d`, the M and L moves, and enumeration of
//! local-Clifford classes of graph states as orbits of adjacency matrices.
//!
//! Two graph states on equal prime dimensions are local-Clifford equivalent
//! iff their adjacency matrices are connected by a sequence of M moves
//! (scale one vertex by a unit) and L moves (weighted local complementation).
//! Vertex permutations are not moves; orbits are over labeled vertices.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::algebra::{FieldElement, PrimeModulus};
use crate::{Error, Result, DEFAULT_ENUMERATION_BUDGET};

/// Symmetric, zero-diagonal matrix over `F_d`.
///
/// Ordering is lexicographic over the row-major entries, which is the order
/// used to pick canonical orbit representatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjacencyMatrix {
    n: usize,
    d: PrimeModulus,
    entries: Vec<u32>,
}

impl AdjacencyMatrix {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize, d: PrimeModulus) -> Self {
        AdjacencyMatrix { n, d, entries: vec![0; n * n] }
    }

    /// Builds from a row-major `n × n` table; entries are reduced mod `d`.
    pub fn from_rows(d: PrimeModulus, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut a = Self::empty(n, d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                a.entries[i * n + j] = d.element(v).value();
            }
        }
        for i in 0..n {
            if a.entries[i * n + i] != 0 {
                return Err(Error::invalid(format!("diagonal entry ({i},{i}) is nonzero")));
            }
            for j in 0..i {
                if a.entries[i * n + j] != a.entries[j * n + i] {
                    return Err(Error::invalid(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(a)
    }

    /// Builds from weighted edges `(i, j, w)`.
    pub fn from_edges(n: usize, d: PrimeModulus, edges: &[(usize, usize, i64)]) -> Result<Self> {
        let mut a = Self::empty(n, d);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("edge ({i},{j}) out of range for {n} vertices")));
            }
            if i == j {
                return Err(Error::invalid(format!("self loop at vertex {i}")));
            }
            let w = d.element(w).value();
            a.entries[i * n + j] = w;
            a.entries[j * n + i] = w;
        }
        Ok(a)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.d.element(self.entries[i * self.n + j] as i64)
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    /// Nonzero edges `(i, j, w)` with `i < j`, row-major.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let w = self.weight(i, j);
                if w != 0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        (0..self.n).all(|i| {
            self.weight(i, i) == 0 && (0..i).all(|j| self.weight(i, j) == self.weight(j, i))
        })
    }

    fn set(&mut self, i: usize, j: usize, w: u32) {
        self.entries[i * self.n + j] = w;
        self.entries[j * self.n + i] = w;
    }

    /// Upper-triangle entries packed base `d`, first pair most significant.
    /// Numeric order of codes equals the lexicographic matrix order.
    pub fn code(&self) -> u64 {
        let d = self.d.get() as u64;
        let mut code = 0u64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                code = code * d + self.weight(i, j) as u64;
            }
        }
        code
    }

    pub fn from_code(n: usize, d: PrimeModulus, mut code: u64) -> Self {
        let dv = d.get() as u64;
        let mut a = Self::empty(n, d);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for &(i, j) in pairs.iter().rev() {
            a.set(i, j, (code % dv) as u32);
            code /= dv;
        }
        a
    }
}

impl fmt::Display for AdjacencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        if edges.is_empty() {
            return write!(f, "(no edges)");
        }
        let parts: Vec<String> = edges.iter().map(|(i, j, w)| format!("{i}-{j}:{w}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// M move: scales row and column `v` by the unit `b`.
pub fn m_move(a: &AdjacencyMatrix, v: usize, b: FieldElement) -> Result<AdjacencyMatrix> {
    if b.modulus() != a.d {
        return Err(Error::invalid("scale factor lives in a different field"));
    }
    if b.is_zero() {
        return Err(Error::invalid("M move with b = 0 is not invertible"));
    }
    if v >= a.n {
        return Err(Error::invalid(format!("vertex {v} out of range")));
    }
    let mut out = a.clone();
    for j in 0..a.n {
        if j != v {
            out.set(v, j, (a.get(v, j) * b).value());
        }
    }
    Ok(out)
}

/// L move: `A_ij ← A_ij + a·A_vi·A_vj` off the diagonal; diagonal stays zero.
pub fn l_move(adj: &AdjacencyMatrix, v: usize, a: FieldElement) -> Result<AdjacencyMatrix> {
    if a.modulus() != adj.d {
        return Err(Error::invalid("L move parameter lives in a different field"));
    }
    if v >= adj.n {
        return Err(Error::invalid(format!("vertex {v} out of range")));
    }
    let mut out = adj.clone();
    if a.is_zero() {
        return Ok(out);
    }
    for i in 0..adj.n {
        for j in i + 1..adj.n {
            let w = adj.get(i, j) + a * adj.get(v, i) * adj.get(v, j);
            out.set(i, j, w.value());
        }
    }
    Ok(out)
}

/// Every matrix reachable by one M or L move.
fn neighbours(a: &AdjacencyMatrix) -> impl Iterator<Item = AdjacencyMatrix> + '_ {
    let d = a.d;
    (0..a.n).flat_map(move |v| {
        let ms = d.units().skip(1).map(move |b| m_move(a, v, b).expect("valid M move"));
        let ls = d.units().map(move |s| l_move(a, v, s).expect("valid L move"));
        ms.chain(ls)
    })
}

/// BFS closure of `{a}` under all M and L moves.
pub fn lc_orbit(a: &AdjacencyMatrix) -> BTreeSet<AdjacencyMatrix> {
    let mut seen: HashSet<u64> = HashSet::new();
    let mut orbit = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(a.code());
    queue.push_back(a.clone());
    while let Some(cur) = queue.pop_front() {
        for next in neighbours(&cur) {
            if seen.insert(next.code()) {
                queue.push_back(next);
            }
        }
        orbit.insert(cur);
    }
    orbit
}

/// The M/L orbits of all adjacency matrices on `n` labeled vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCatalog {
    pub n: usize,
    pub d: PrimeModulus,
    /// Lexicographically smallest member of each orbit, in increasing order.
    pub representatives: Vec<AdjacencyMatrix>,
    pub orbit_sizes: Vec<u64>,
}

impl OrbitCatalog {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.orbit_sizes.iter().sum()
    }
}

/// Number of zero-diagonal symmetric matrices, `d^{n(n-1)/2}`, saturating.
pub fn matrix_count(n: usize, d: PrimeModulus) -> u128 {
    let pairs = (n * n.saturating_sub(1) / 2) as u32;
    (d.get() as u128).checked_pow(pairs).unwrap_or(u128::MAX)
}

pub fn enumerate_classes(n: usize, d: PrimeModulus) -> Result<OrbitCatalog> {
    enumerate_classes_with_budget(n, d, DEFAULT_ENUMERATION_BUDGET)
}

/// Partitions every adjacency matrix on `n` vertices into M/L orbits.
pub fn enumerate_classes_with_budget(n: usize, d: PrimeModulus, budget: u64) -> Result<OrbitCatalog> {
    if n == 0 {
        return Err(Error::invalid("need at least one vertex"));
    }
    let total = matrix_count(n, d);
    if total > budget as u128 {
        return Err(Error::ResourceLimit {
            what: "adjacency matrix enumeration",
            required: total,
            budget: budget as u128,
        });
    }
    let total = total as usize;
    let mut visited = vec![false; total];
    let mut representatives = Vec::new();
    let mut orbit_sizes = Vec::new();
    let mut queue = VecDeque::new();
    // Scanning codes upward makes the first unvisited code its orbit's minimum.
    for start in 0..total {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start as u64);
        let mut size = 0u64;
        while let Some(code) = queue.pop_front() {
            size += 1;
            let cur = AdjacencyMatrix::from_code(n, d, code);
            for next in neighbours(&cur) {
                let c = next.code() as usize;
                if !visited[c] {
                    visited[c] = true;
                    queue.push_back(c as u64);
                }
            }
        }
        representatives.push(AdjacencyMatrix::from_code(n, d, start as u64));
        orbit_sizes.push(size);
    }
    Ok(OrbitCatalog { n, d, representatives, orbit_sizes })
}

/// A graph on a subset of the parties, all sharing one prime dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClusterGraph {
    /// Party indices (ascending) the graph's vertices map to.
    pub sites: Vec<usize>,
    pub adjacency: AdjacencyMatrix,
}

/// A direct sum of per-cluster orbit representatives: one candidate
/// stabilizer class for a heterogeneous dimension list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassRepresentative {
    pub dims: Vec<PrimeModulus>,
    pub parts: Vec<ClusterGraph>,
}

impl ClassRepresentative {
    /// A single homogeneous graph on all parties.
    pub fn single(adjacency: AdjacencyMatrix) -> Self {
        let n = adjacency.n();
        ClassRepresentative {
            dims: vec![adjacency.modulus(); n],
            parts: vec![ClusterGraph { sites: (0..n).collect(), adjacency }],
        }
    }

    /// Edges in party indices: `(site_i, site_j, weight)`.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out: Vec<_> = self
            .parts
            .iter()
            .flat_map(|p| p.adjacency.edges().into_iter().map(|(i, j, w)| (p.sites[i], p.sites[j], w)))
            .collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for ClassRepresentative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        if edges.is_empty() {
            return write!(f, "(no edges)");
        }
        let parts: Vec<String> = edges.iter().map(|(i, j, w)| format!("{i}-{j}:{w}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub d: PrimeModulus,
    pub sites: Vec<usize>,
    pub catalog: OrbitCatalog,
}

/// Parties grouped by equal prime dimension, each group with its orbit catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterFamily {
    pub dims: Vec<PrimeModulus>,
    /// Clusters in order of first appearance in `dims`.
    pub clusters: Vec<Cluster>,
}

impl ClusterFamily {
    /// Number of direct sums, i.e. the product of the per-cluster class counts.
    pub fn count(&self) -> usize {
        self.clusters.iter().map(|c| c.catalog.len()).product()
    }

    /// Every direct sum of per-cluster representatives; the last cluster
    /// varies fastest.
    pub fn representatives(&self) -> impl Iterator<Item = ClassRepresentative> + '_ {
        let radices: Vec<usize> = self.clusters.iter().map(|c| c.catalog.len()).collect();
        (0..self.count()).map(move |idx| {
            let choice = crate::algebra::digits(idx, &radices);
            let parts = self
                .clusters
                .iter()
                .zip(choice)
                .map(|(c, k)| ClusterGraph {
                    sites: c.sites.clone(),
                    adjacency: c.catalog.representatives[k].clone(),
                })
                .collect();
            ClassRepresentative { dims: self.dims.clone(), parts }
        })
    }
}

pub fn cluster_representatives(dims: &[PrimeModulus]) -> Result<ClusterFamily> {
    cluster_representatives_with_budget(dims, DEFAULT_ENUMERATION_BUDGET)
}

pub fn cluster_representatives_with_budget(dims: &[PrimeModulus], budget: u64) -> Result<ClusterFamily> {
    if dims.is_empty() {
        return Err(Error::invalid("empty dimension list"));
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut groups: Vec<(PrimeModulus, Vec<usize>)> = Vec::new();
    for (site, &d) in dims.iter().enumerate() {
        match groups.iter_mut().find(|(g, _)| *g == d) {
            Some((_, sites)) => sites.push(site),
            None => groups.push((d, vec![site])),
        }
    }
    for (d, sites) in groups {
        let catalog = enumerate_classes_with_budget(sites.len(), d, budget)?;
        clusters.push(Cluster { d, sites, catalog });
    }
    Ok(ClusterFamily { dims: dims.to_vec(), clusters })
}
