//! Colored pointed directed graphs.
//!
//! A [`ColoredGraph`] has dense vertex ids `0..n`, sorted duplicate-free
//! successor lists, a color per vertex (the set of predicates true there,
//! stored as a bitmask over the declared predicate list) and a distinguished
//! point. Graphs are immutable once built; every operation here returns a
//! fresh graph.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scc::tarjan;

pub type Vertex = usize;

/// Upper bound on the number of declared predicates of a graph.
pub const MAX_PREDICATES: usize = 16;

/// Unfoldings larger than this are refused.
pub const MAX_UNFOLDING: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("point {0} is not a vertex")]
    PointOutOfRange(Vertex),
    #[error("edge #{index} ({from}, {to}) references a missing vertex")]
    EdgeOutOfRange { index: usize, from: Vertex, to: Vertex },
    #[error("sat entry #{index} references missing vertex {vertex}")]
    SatVertexOutOfRange { index: usize, vertex: Vertex },
    #[error("predicate `{0}` is not declared")]
    UnknownPredicate(String),
    #[error("predicate `{0}` declared twice")]
    DuplicatePredicate(String),
    #[error("at most {MAX_PREDICATES} predicates are supported, got {0}")]
    TooManyPredicates(usize),
    #[error("vertex ids must be exactly 0..{expected} (offending id {found})")]
    NonDenseVertices { expected: usize, found: Vertex },
    #[error("predicate sets differ: {left:?} vs {right:?}")]
    PredicateMismatch { left: Vec<String>, right: Vec<String> },
    #[error("graph has a strongly connected component of size {0}; expected at most 1")]
    NotScc1(usize),
    #[error("host graph is not a pseudotree")]
    NotPseudotree,
    #[error("vertex {0} is not reachable from the point")]
    NotReachable(Vertex),
    #[error("unfolding exceeds {MAX_UNFOLDING} vertices")]
    UnfoldingTooLarge,
    #[error("G_k requires 1 <= k <= 20, got {0}")]
    InvalidK(usize),
    #[error("invalid graph JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Set of predicates holding at a vertex, as a bitmask over the predicate
/// list of the owning graph (bit `i` is predicate `i`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color(pub u32);

impl Color {
    pub const EMPTY: Color = Color(0);

    pub fn contains(self, predicate: usize) -> bool {
        self.0 & (1 << predicate) != 0
    }

    pub fn with(self, predicate: usize) -> Color {
        Color(self.0 | (1 << predicate))
    }

    pub fn bits(self) -> u32 {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    predicates: Vec<String>,
    succ: Vec<Vec<Vertex>>,
    colors: Vec<Color>,
    point: Vertex,
}

/// Mutable staging area for a [`ColoredGraph`].
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    predicates: Vec<String>,
    succ: Vec<Vec<Vertex>>,
    colors: Vec<Color>,
    point: Vertex,
}

impl GraphBuilder {
    pub fn new<S: AsRef<str>>(predicates: &[S]) -> Self {
        GraphBuilder {
            predicates: predicates.iter().map(|p| p.as_ref().to_string()).collect(),
            succ: Vec::new(),
            colors: Vec::new(),
            point: 0,
        }
    }

    pub fn add_vertex(&mut self, color: Color) -> Vertex {
        self.succ.push(Vec::new());
        self.colors.push(color);
        self.succ.len() - 1
    }

    pub fn add_edge(&mut self, from: Vertex, to: Vertex) -> &mut Self {
        self.succ[from].push(to);
        self
    }

    pub fn set_point(&mut self, point: Vertex) -> &mut Self {
        self.point = point;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn build(self) -> Result<ColoredGraph, GraphError> {
        ColoredGraph::from_parts(self.predicates, self.succ, self.colors, self.point)
    }
}

fn check_predicates(predicates: &[String]) -> Result<(), GraphError> {
    if predicates.len() > MAX_PREDICATES {
        return Err(GraphError::TooManyPredicates(predicates.len()));
    }
    let mut seen = BTreeSet::new();
    for p in predicates {
        if !seen.insert(p.as_str()) {
            return Err(GraphError::DuplicatePredicate(p.clone()));
        }
    }
    Ok(())
}

impl ColoredGraph {
    pub fn from_parts(
        predicates: Vec<String>,
        mut succ: Vec<Vec<Vertex>>,
        colors: Vec<Color>,
        point: Vertex,
    ) -> Result<Self, GraphError> {
        check_predicates(&predicates)?;
        let n = succ.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        assert_eq!(colors.len(), n, "one color per vertex");
        if point >= n {
            return Err(GraphError::PointOutOfRange(point));
        }
        let mut index = 0;
        for (v, list) in succ.iter_mut().enumerate() {
            for &w in list.iter() {
                if w >= n {
                    return Err(GraphError::EdgeOutOfRange { index, from: v, to: w });
                }
                index += 1;
            }
            list.sort_unstable();
            list.dedup();
        }
        let mask = if predicates.len() == 32 { u32::MAX } else { (1u32 << predicates.len()) - 1 };
        let colors = colors.into_iter().map(|c| Color(c.0 & mask)).collect();
        Ok(ColoredGraph { predicates, succ, colors, point })
    }

    pub fn predicates(&self) -> &[String] {
        &self.predicates
    }

    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p == name)
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.succ.len()
    }

    pub fn point(&self) -> Vertex {
        self.point
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v]
    }

    pub fn color(&self, v: Vertex) -> Color {
        self.colors[v]
    }

    pub fn has_loop(&self, v: Vertex) -> bool {
        self.succ[v].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(v, list)| list.iter().map(move |&w| (v, w)))
    }

    /// Same graph, different distinguished vertex.
    pub fn with_point(&self, point: Vertex) -> Result<Self, GraphError> {
        if point >= self.vertex_count() {
            return Err(GraphError::PointOutOfRange(point));
        }
        let mut g = self.clone();
        g.point = point;
        Ok(g)
    }

    /// Reachability (by paths of length >= 0) from `from`.
    pub fn reachable_from(&self, from: Vertex) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn reachable(&self) -> Vec<bool> {
        self.reachable_from(self.point)
    }

    fn same_predicates(&self, other: &ColoredGraph) -> Result<(), GraphError> {
        if self.predicates != other.predicates {
            return Err(GraphError::PredicateMismatch {
                left: self.predicates.clone(),
                right: other.predicates.clone(),
            });
        }
        Ok(())
    }

    /// Renumbers the part reachable from the point in BFS order (successors
    /// visited in id order). Two graphs built the same way compare equal
    /// after canonicalization even if their raw ids differ.
    pub fn canonical(&self) -> ColoredGraph {
        let mut order = Vec::new();
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::from([self.point]);
        new_id[self.point] = 0;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.succ[v] {
                if new_id[w] == usize::MAX {
                    new_id[w] = order.len() + queue.len();
                    queue.push_back(w);
                }
            }
        }
        let succ = order
            .iter()
            .map(|&v| self.succ[v].iter().map(|&w| new_id[w]).collect())
            .collect();
        let colors = order.iter().map(|&v| self.colors[v]).collect();
        ColoredGraph::from_parts(self.predicates.clone(), succ, colors, 0)
            .expect("canonical renumbering preserves well-formedness")
    }
}

// ---------------------------------------------------------------------------
// Strongly connected components

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Blocks in topological order: edges between distinct blocks only go
    /// from an earlier block to a later one.
    pub components: Vec<Vec<Vertex>>,
    /// Index into `components` for every vertex.
    pub component_of: Vec<usize>,
}

impl SccDecomposition {
    pub fn max_size(&self) -> usize {
        self.components.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// A vertex always belongs to its own block, so a vertex with a loop and no
/// other cycle through it forms a block of size one.
pub fn scc_decompose(g: &ColoredGraph) -> SccDecomposition {
    let mut components = tarjan(g.vertex_count(), |v| g.successors(v));
    components.reverse();
    let mut component_of = vec![0; g.vertex_count()];
    for (i, block) in components.iter().enumerate() {
        for &v in block {
            component_of[v] = i;
        }
    }
    SccDecomposition { components, component_of }
}

pub fn max_scc_size(g: &ColoredGraph) -> usize {
    scc_decompose(g).max_size()
}

pub fn in_scck(g: &ColoredGraph, k: usize) -> bool {
    max_scc_size(g) <= k
}

// ---------------------------------------------------------------------------
// Pseudotrees

/// True iff removing all loops leaves a tree rooted at the point.
pub fn is_pseudotree(g: &ColoredGraph) -> bool {
    let n = g.vertex_count();
    let mut indegree = vec![0usize; n];
    for (v, w) in g.edges() {
        if v != w {
            indegree[w] += 1;
        }
    }
    if indegree[g.point()] != 0 {
        return false;
    }
    if g.vertices().any(|v| v != g.point() && indegree[v] != 1) {
        return false;
    }
    g.reachable().into_iter().all(|r| r)
}

/// Unfolds an SCC1 graph into a bisimilar finite pseudotree: loops are
/// removed, the acyclic rest is unfolded from the point, and every copy of a
/// looped vertex gets its loop back.
pub fn pseudotree_of(g: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
    let largest = max_scc_size(g);
    if largest > 1 {
        return Err(GraphError::NotScc1(largest));
    }
    let mut builder = GraphBuilder::new(g.predicates());
    let root = builder.add_vertex(g.color(g.point()));
    if g.has_loop(g.point()) {
        builder.add_edge(root, root);
    }
    // (copy, original)
    let mut stack = vec![(root, g.point())];
    while let Some((copy, orig)) = stack.pop() {
        for &w in g.successors(orig) {
            if w == orig {
                continue;
            }
            if builder.vertex_count() >= MAX_UNFOLDING {
                return Err(GraphError::UnfoldingTooLarge);
            }
            let child = builder.add_vertex(g.color(w));
            builder.add_edge(copy, child);
            if g.has_loop(w) {
                builder.add_edge(child, child);
            }
            stack.push((child, w));
        }
    }
    builder.set_point(root);
    builder.build()
}

// ---------------------------------------------------------------------------
// Bisimulation

/// The largest bisimulation between two graphs, restricted to `G x H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisimulation {
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl Bisimulation {
    pub fn contains(&self, v: Vertex, w: Vertex) -> bool {
        self.pairs.binary_search(&(v, w)).is_ok()
    }
}

/// Coarsest stable partition of a single graph under signature refinement:
/// two vertices share a block iff they are bisimilar.
pub fn bisimulation_classes(g: &ColoredGraph) -> Vec<usize> {
    refine(g.vertex_count(), |v| g.successors(v), |v| g.color(v))
}

fn refine<'a, S, C>(n: usize, succ: S, color: C) -> Vec<usize>
where
    S: Fn(usize) -> &'a [usize],
    C: Fn(usize) -> Color,
{
    use std::collections::BTreeMap;

    let mut block: Vec<usize> = {
        let mut ids = BTreeMap::new();
        (0..n)
            .map(|v| {
                let next = ids.len();
                *ids.entry(color(v)).or_insert(next)
            })
            .collect()
    };
    let mut count = block.iter().copied().max().map_or(0, |m| m + 1);
    loop {
        let mut ids: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let next_block: Vec<usize> = (0..n)
            .map(|v| {
                let mut sig: Vec<usize> = succ(v).iter().map(|&w| block[w]).collect();
                sig.sort_unstable();
                sig.dedup();
                let next = ids.len();
                *ids.entry((block[v], sig)).or_insert(next)
            })
            .collect();
        let next_count = ids.len();
        block = next_block;
        if next_count == count {
            return block;
        }
        count = next_count;
    }
}

/// Computes the largest bisimulation on the disjoint union of `g` and `h`
/// and reports it if it relates the two points.
pub fn bisimulation(g: &ColoredGraph, h: &ColoredGraph) -> Result<Option<Bisimulation>, GraphError> {
    g.same_predicates(h)?;
    let offset = g.vertex_count();
    let n = offset + h.vertex_count();
    let shifted: Vec<Vec<usize>> = h
        .vertices()
        .map(|v| h.successors(v).iter().map(|&w| w + offset).collect())
        .collect();
    let succ = |v: usize| -> &[usize] {
        if v < offset {
            g.successors(v)
        } else {
            &shifted[v - offset]
        }
    };
    let color = |v: usize| if v < offset { g.color(v) } else { h.color(v - offset) };
    let block = refine(n, succ, color);
    if block[g.point()] != block[offset + h.point()] {
        return Ok(None);
    }
    let mut pairs = Vec::new();
    for v in g.vertices() {
        for w in h.vertices() {
            if block[v] == block[offset + w] {
                pairs.push((v, w));
            }
        }
    }
    Ok(Some(Bisimulation { pairs }))
}

pub fn bisimilar(g: &ColoredGraph, h: &ColoredGraph) -> Result<bool, GraphError> {
    Ok(bisimulation(g, h)?.is_some())
}

// ---------------------------------------------------------------------------
// Witness graphs

/// Vertex numbering of `G_k`: `v_i` is followed by its chain
/// `v_{i,1} .. v_{i,n}`, then `v_{i+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GkLayout {
    pub k: usize,
    /// Number of N vertices on each chain, `2^k + 1`.
    pub n: usize,
}

impl GkLayout {
    pub fn new(k: usize) -> Result<Self, GraphError> {
        if !(1..=20).contains(&k) {
            return Err(GraphError::InvalidK(k));
        }
        Ok(GkLayout { k, n: (1 << k) + 1 })
    }

    /// `v_i`, for `0 <= i <= k`.
    pub fn main(&self, i: usize) -> Vertex {
        debug_assert!(i <= self.k);
        i * (self.n + 1)
    }

    /// `v_{i,j}`, for `0 <= i < k` and `1 <= j <= n`.
    pub fn chain(&self, i: usize, j: usize) -> Vertex {
        debug_assert!(i < self.k && (1..=self.n).contains(&j));
        i * (self.n + 1) + j
    }

    pub fn vertex_count(&self) -> usize {
        (self.k + 1) + self.k * self.n
    }

    /// Inverse of [`main`](Self::main)/[`chain`](Self::chain): `(i, 0)` for
    /// `v_i`, `(i, j)` for `v_{i,j}`.
    pub fn locate(&self, v: Vertex) -> (usize, usize) {
        (v / (self.n + 1), v % (self.n + 1))
    }
}

pub const F: &str = "F";

/// `G_k`: reflexive F vertices `v_0 .. v_k` joined by chains of `2^k + 1`
/// irreflexive N vertices, pointed at `v_0`.
pub fn make_gk(k: usize) -> Result<ColoredGraph, GraphError> {
    let layout = GkLayout::new(k)?;
    let f = Color::EMPTY.with(0);
    let mut b = GraphBuilder::new(&[F]);
    for i in 0..=k {
        let vi = b.add_vertex(f);
        debug_assert_eq!(vi, layout.main(i));
        b.add_edge(vi, vi);
        if i == k {
            break;
        }
        for j in 1..=layout.n {
            let v = b.add_vertex(Color::EMPTY);
            debug_assert_eq!(v, layout.chain(i, j));
            b.add_edge(v - 1, v);
        }
        b.add_edge(layout.chain(i, layout.n), layout.main(i + 1));
    }
    b.set_point(0);
    b.build()
}

/// One reflexive N vertex.
pub fn make_nloop() -> ColoredGraph {
    let mut b = GraphBuilder::new(&[F]);
    let v = b.add_vertex(Color::EMPTY);
    b.add_edge(v, v);
    b.build().expect("N_loop is well formed")
}

/// Random graph in SCCk: a DAG of blocks, each block strongly connected with
/// at most `k` vertices. Every vertex is reachable from the point, which lies
/// in the unique source block.
pub fn random_scck(seed: u64, k: usize, max_vertices: usize, predicates: &[&str]) -> ColoredGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_scck_with(&mut rng, k, max_vertices, predicates)
}

pub fn random_scck_with<R: Rng>(rng: &mut R, k: usize, max_vertices: usize, predicates: &[&str]) -> ColoredGraph {
    assert!(k >= 1 && max_vertices >= 1, "bounds must be positive");
    let n = rng.gen_range(1..=max_vertices);
    let mut blocks: Vec<std::ops::Range<usize>> = Vec::new();
    let mut start = 0;
    while start < n {
        let size = rng.gen_range(1..=k.min(n - start));
        blocks.push(start..start + size);
        start += size;
    }
    let mut b = GraphBuilder::new(predicates);
    for _ in 0..n {
        let color = random_color(rng, predicates.len());
        b.add_vertex(color);
    }
    for (bi, block) in blocks.iter().enumerate() {
        let size = block.len();
        if size == 1 {
            if rng.gen_bool(0.4) {
                b.add_edge(block.start, block.start);
            }
        } else {
            // a Hamiltonian cycle keeps the block strongly connected
            for offset in 0..size {
                b.add_edge(block.start + offset, block.start + (offset + 1) % size);
            }
            for u in block.clone() {
                for v in block.clone() {
                    if rng.gen_bool(0.25) {
                        b.add_edge(u, v);
                    }
                }
            }
        }
        if bi > 0 {
            let earlier = rng.gen_range(0..block.start);
            let target = rng.gen_range(block.clone());
            b.add_edge(earlier, target);
            for u in 0..block.start {
                if rng.gen_bool(0.15) {
                    b.add_edge(u, rng.gen_range(block.clone()));
                }
            }
        }
    }
    b.set_point(0);
    b.build().expect("generated graph is well formed")
}

/// Random graph with no bound on component size; every vertex reachable
/// from the point.
pub fn random_graph_with<R: Rng>(rng: &mut R, max_vertices: usize, predicates: &[&str]) -> ColoredGraph {
    assert!(max_vertices >= 1, "bounds must be positive");
    let n = rng.gen_range(1..=max_vertices);
    let density = rng.gen_range(0.1..0.45);
    let mut b = GraphBuilder::new(predicates);
    for _ in 0..n {
        let color = random_color(rng, predicates.len());
        b.add_vertex(color);
    }
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        b.add_edge(parent, v);
    }
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(density) {
                b.add_edge(u, v);
            }
        }
    }
    b.set_point(0);
    b.build().expect("generated graph is well formed")
}

fn random_color<R: Rng>(rng: &mut R, predicates: usize) -> Color {
    let mut c = Color::EMPTY;
    for p in 0..predicates {
        if rng.gen_bool(0.5) {
            c = c.with(p);
        }
    }
    c
}

// ---------------------------------------------------------------------------
// Graft

/// Replaces the subtree of the pseudotree `host` rooted at `at` by a copy of
/// `donor`; edges into `at` now enter the donor's point. Host vertices keep
/// their relative order and come first, donor vertices follow in their own
/// order.
pub fn graft(host: &ColoredGraph, at: Vertex, donor: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
    host.same_predicates(donor)?;
    if at >= host.vertex_count() {
        return Err(GraphError::PointOutOfRange(at));
    }
    if !host.reachable()[at] {
        return Err(GraphError::NotReachable(at));
    }
    if !is_pseudotree(host) {
        return Err(GraphError::NotPseudotree);
    }
    let removed = host.reachable_from(at);
    let mut new_id = vec![usize::MAX; host.vertex_count()];
    let mut b = GraphBuilder::new(host.predicates());
    for v in host.vertices().filter(|&v| !removed[v]) {
        new_id[v] = b.add_vertex(host.color(v));
    }
    let donor_offset = b.vertex_count();
    for v in donor.vertices() {
        b.add_vertex(donor.color(v));
    }
    let donor_point = donor_offset + donor.point();
    for (v, w) in host.edges() {
        if removed[v] {
            continue;
        }
        let target = if w == at { donor_point } else { new_id[w] };
        b.add_edge(new_id[v], target);
    }
    for (v, w) in donor.edges() {
        b.add_edge(donor_offset + v, donor_offset + w);
    }
    b.set_point(if removed[host.point()] { donor_point } else { new_id[host.point()] });
    b.build()
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
struct GraphFile {
    predicates: Vec<String>,
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
    sat: Vec<(String, Vertex)>,
    point: Vertex,
}

impl ColoredGraph {
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            predicates: self.predicates.clone(),
            vertices: self.vertices().collect(),
            edges: self.edges().collect(),
            sat: self
                .vertices()
                .flat_map(|v| {
                    self.predicates
                        .iter()
                        .enumerate()
                        .filter(move |&(i, _)| self.colors[v].contains(i))
                        .map(move |(_, p)| (p.clone(), v))
                })
                .collect(),
            point: self.point,
        };
        serde_json::to_string_pretty(&file).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile = serde_json::from_str(text)?;
        check_predicates(&file.predicates)?;
        let n = file.vertices.len();
        let mut seen = vec![false; n];
        for &v in &file.vertices {
            if v >= n || seen[v] {
                return Err(GraphError::NonDenseVertices { expected: n, found: v });
            }
            seen[v] = true;
        }
        let mut succ = vec![Vec::new(); n];
        for (index, &(u, v)) in file.edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::EdgeOutOfRange { index, from: u, to: v });
            }
            succ[u].push(v);
        }
        let mut colors = vec![Color::EMPTY; n];
        for (index, (p, v)) in file.sat.iter().enumerate() {
            let pi = file
                .predicates
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| GraphError::UnknownPredicate(p.clone()))?;
            if *v >= n {
                return Err(GraphError::SatVertexOutOfRange { index, vertex: *v });
            }
            colors[*v] = colors[*v].with(pi);
        }
        ColoredGraph::from_parts(file.predicates, succ, colors, file.point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> ColoredGraph {
        let mut b = GraphBuilder::new(&[F]);
        let a = b.add_vertex(Color::EMPTY);
        let c = b.add_vertex(Color::EMPTY);
        b.add_edge(a, c).add_edge(c, a);
        b.build().unwrap()
    }

    #[test]
    fn singleton_blocks() {
        let mut b = GraphBuilder::new(&[F]);
        b.add_vertex(Color::EMPTY);
        let g = b.build().unwrap();
        assert_eq!(scc_decompose(&g).components, vec![vec![0]]);

        let g = make_nloop();
        assert_eq!(scc_decompose(&g).components, vec![vec![0]]);
        assert!(in_scck(&g, 1));
    }

    #[test]
    fn two_cycle_is_one_block() {
        let g = two_cycle();
        assert_eq!(scc_decompose(&g).components, vec![vec![0, 1]]);
        assert!(!in_scck(&g, 1));
        assert!(in_scck(&g, 2));
        assert!(!is_pseudotree(&g));
    }

    #[test]
    fn topo_order_follows_edges() {
        let mut b = GraphBuilder::new::<&str>(&[]);
        for _ in 0..4 {
            b.add_vertex(Color::EMPTY);
        }
        b.add_edge(3, 1).add_edge(1, 2).add_edge(2, 1).add_edge(2, 0);
        let g = b.build().unwrap();
        let d = scc_decompose(&g);
        for (u, v) in g.edges() {
            assert!(d.component_of[u] <= d.component_of[v]);
        }
    }

    #[test]
    fn g1_matches_figure() {
        let g = make_gk(1).unwrap();
        assert_eq!(g.vertex_count(), 5);
        let f: Vec<bool> = g.vertices().map(|v| g.color(v).contains(0)).collect();
        assert_eq!(f, vec![true, false, false, false, true]);
        assert!(g.has_loop(0) && g.has_loop(4));
        assert_eq!(g.edge_count(), 6);
        assert_eq!(max_scc_size(&g), 1);
        assert!(is_pseudotree(&g));
    }

    #[test]
    fn gk_vertex_counts() {
        for k in 1..=5 {
            let g = make_gk(k).unwrap();
            assert_eq!(g.vertex_count(), (k + 1) + k * ((1 << k) + 1));
            assert!(is_pseudotree(&g));
            assert!(in_scck(&g, 1));
        }
        assert_eq!(make_gk(2).unwrap().vertex_count(), 13);
        assert!(matches!(make_gk(0), Err(GraphError::InvalidK(0))));
    }

    #[test]
    fn diamond_dag_unfolds_to_tree() {
        let mut b = GraphBuilder::new(&[F]);
        let r = b.add_vertex(Color::EMPTY);
        let l = b.add_vertex(Color::EMPTY.with(0));
        let m = b.add_vertex(Color::EMPTY);
        let s = b.add_vertex(Color::EMPTY.with(0));
        b.add_edge(r, l).add_edge(r, m).add_edge(l, s).add_edge(m, s);
        let g = b.build().unwrap();
        let t = pseudotree_of(&g).unwrap();
        assert_eq!(t.vertex_count(), 5);
        assert!(is_pseudotree(&t));
        assert!(bisimilar(&g, &t).unwrap());
    }

    #[test]
    fn loop_is_reattached() {
        let mut b = GraphBuilder::new(&[F]);
        let r = b.add_vertex(Color::EMPTY.with(0));
        let c = b.add_vertex(Color::EMPTY);
        b.add_edge(r, r).add_edge(r, c);
        let g = b.build().unwrap();
        let t = pseudotree_of(&g).unwrap();
        assert_eq!(t.canonical(), g.canonical());
    }

    #[test]
    fn pseudotree_of_rejects_cycles() {
        assert!(matches!(pseudotree_of(&two_cycle()), Err(GraphError::NotScc1(2))));
    }

    #[test]
    fn loop_colors_distinguish() {
        let f_loop = make_gk(1).unwrap().with_point(4).unwrap();
        assert!(!bisimilar(&f_loop, &make_nloop()).unwrap());
        let g = make_gk(2).unwrap();
        assert!(bisimilar(&g, &g).unwrap());
    }

    #[test]
    fn bisimilar_rejects_predicate_mismatch() {
        let mut b = GraphBuilder::new(&["P"]);
        b.add_vertex(Color::EMPTY);
        let g = b.build().unwrap();
        assert!(matches!(bisimilar(&g, &make_nloop()), Err(GraphError::PredicateMismatch { .. })));
    }

    #[test]
    fn graft_into_g1() {
        let g1 = make_gk(1).unwrap();
        let layout = GkLayout::new(1).unwrap();
        let out = graft(&g1, layout.chain(0, 2), &make_nloop()).unwrap();
        assert_eq!(out.vertex_count(), 3);
        assert!(in_scck(&out, 1));
        assert!(out.reachable()[2] && out.has_loop(2));

        let whole = graft(&g1, g1.point(), &make_nloop()).unwrap();
        assert_eq!(whole.canonical(), make_nloop().canonical());
    }

    #[test]
    fn graft_errors() {
        let g1 = make_gk(1).unwrap();
        assert!(matches!(graft(&two_cycle(), 0, &make_nloop()), Err(GraphError::NotPseudotree)));
        let mut b = GraphBuilder::new(&[F]);
        b.add_vertex(Color::EMPTY);
        b.add_vertex(Color::EMPTY);
        let disconnected = b.build().unwrap();
        assert!(matches!(graft(&disconnected, 1, &make_nloop()), Err(GraphError::NotReachable(1))));
        assert!(graft(&g1, 1, &g1).is_ok());
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let g = make_gk(1).unwrap();
        let text = g.to_json();
        let back = ColoredGraph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn malformed_json_rejected() {
        let bad_edge = r#"{"predicates":["F"],"vertices":[0,1],"edges":[[0,2]],"sat":[],"point":0}"#;
        assert!(matches!(ColoredGraph::from_json(bad_edge), Err(GraphError::EdgeOutOfRange { index: 0, .. })));
        let bad_pred = r#"{"predicates":["F"],"vertices":[0],"edges":[],"sat":[["G",0]],"point":0}"#;
        assert!(matches!(ColoredGraph::from_json(bad_pred), Err(GraphError::UnknownPredicate(_))));
        let sparse = r#"{"predicates":[],"vertices":[0,5],"edges":[],"sat":[],"point":0}"#;
        assert!(matches!(ColoredGraph::from_json(sparse), Err(GraphError::NonDenseVertices { .. })));
        let arity = r#"{"predicates":[],"vertices":[0],"edges":[[0]],"sat":[],"point":0}"#;
        assert!(matches!(ColoredGraph::from_json(arity), Err(GraphError::Json(_))));
    }

    #[test]
    fn random_scck_is_deterministic() {
        let a = random_scck(7, 2, 10, &[F]);
        let b = random_scck(7, 2, 10, &[F]);
        assert_eq!(a.to_json(), b.to_json());
        assert!(in_scck(&a, 2));
    }
}
