//! Weighted graphs given as finite truncations with an explicit frontier.

mod format;

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

pub use format::{parse_graph, write_graph};

/// Dense vertex index. Names map to indices in order of first appearance.
pub type Vertex = usize;

const DUPLICATE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge list is empty")]
    EmptyEdgeList,
    #[error("edge {u}-{v} has non-positive weight {weight}")]
    NonPositiveWeight { u: String, v: String, weight: f64 },
    #[error("vertex {vertex} has non-positive measure {measure}")]
    NonPositiveMeasure { vertex: String, measure: f64 },
    #[error("self loop at {0}")]
    SelfLoop(String),
    #[error("edge {u}-{v} listed with conflicting weights {first} and {second}")]
    ConflictingDuplicateEdge {
        u: String,
        v: String,
        first: f64,
        second: f64,
    },
    #[error("vertex {vertex} has conflicting measures {first} and {second}")]
    ConflictingMeasure { vertex: String, first: f64, second: f64 },
    #[error("vertex {0} has no measure")]
    MissingMeasure(String),
    #[error("graph is disconnected ({0} unreachable from the first vertex)")]
    Disconnected(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("radii must be strictly increasing")]
    RadiiNotIncreasing,
    #[error("ball of radius {radius} reaches the truncation frontier")]
    RadiusExceedsTruncation { radius: usize },
    #[error("region {index} of the exhaustion is not contained in region {next}")]
    NotNested { index: usize, next: usize },
    #[error("region {index} touches the truncation frontier")]
    RegionTouchesFrontier { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Finite weighted graph `(X, b, m)` with frontier flags marking cut points.
///
/// Adjacency lists are sorted by neighbor index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    adjacency: Vec<Vec<(Vertex, f64)>>,
    measure: Vec<f64>,
    frontier: Vec<bool>,
}

impl WeightedGraph {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: Vertex) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<Vertex, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn check(&self, x: Vertex) -> Result<Vertex, GraphError> {
        if x < self.len() {
            Ok(x)
        } else {
            Err(GraphError::UnknownVertex(format!("#{x}")))
        }
    }

    pub fn neighbors(&self, x: Vertex) -> &[(Vertex, f64)] {
        &self.adjacency[x]
    }

    pub fn weight(&self, x: Vertex, y: Vertex) -> Option<f64> {
        let row = &self.adjacency[x];
        row.binary_search_by_key(&y, |&(v, _)| v).ok().map(|i| row[i].1)
    }

    pub fn measure(&self, x: Vertex) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    pub fn is_frontier(&self, x: Vertex) -> bool {
        self.frontier[x]
    }

    pub fn frontier(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len()).filter(|&x| self.frontier[x])
    }

    /// Sum of `b(x, y)` over all neighbors.
    pub fn total_weight(&self, x: Vertex) -> f64 {
        self.adjacency[x].iter().map(|&(_, b)| b).sum()
    }

    /// Undirected edges `(x, y, b)` with `x < y`, ordered by `x` then `y`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().filter(move |&&(y, _)| y > x).map(move |&(y, b)| (x, y, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Whether `x` is a frontier vertex or adjacent to one.
    pub fn near_frontier(&self, x: Vertex) -> bool {
        self.frontier[x] || self.adjacency[x].iter().any(|&(y, _)| self.frontier[y])
    }
}

/// Incremental construction with names registered in order of first appearance.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    measure: Vec<Option<f64>>,
    edges: HashMap<(Vertex, Vertex), f64>,
    edge_order: Vec<(Vertex, Vertex)>,
    frontier: Vec<bool>,
    error: Option<GraphError>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, name: &str) -> Vertex {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.measure.push(None);
        self.frontier.push(false);
        i
    }

    fn fail(&mut self, e: GraphError) {
        if self.error.is_none() {
            self.error = Some(e);
        }
    }

    pub fn measure(&mut self, name: &str, m: f64) -> &mut Self {
        let i = self.intern(name);
        if !(m > 0.0) || !m.is_finite() {
            self.fail(GraphError::NonPositiveMeasure {
                vertex: name.to_string(),
                measure: m,
            });
            return self;
        }
        match self.measure[i] {
            Some(prev) if !approx_equal(prev, m) => self.fail(GraphError::ConflictingMeasure {
                vertex: name.to_string(),
                first: prev,
                second: m,
            }),
            Some(_) => {}
            None => self.measure[i] = Some(m),
        }
        self
    }

    pub fn edge(&mut self, u: &str, v: &str, b: f64) -> &mut Self {
        let (x, y) = (self.intern(u), self.intern(v));
        if x == y {
            self.fail(GraphError::SelfLoop(u.to_string()));
            return self;
        }
        if !(b > 0.0) || !b.is_finite() {
            self.fail(GraphError::NonPositiveWeight {
                u: u.into(),
                v: v.into(),
                weight: b,
            });
            return self;
        }
        let key = (x.min(y), x.max(y));
        match self.edges.get(&key) {
            Some(&prev) if !approx_equal(prev, b) => {
                self.fail(GraphError::ConflictingDuplicateEdge {
                    u: u.into(),
                    v: v.into(),
                    first: prev,
                    second: b,
                });
            }
            Some(_) => {}
            None => {
                self.edges.insert(key, b);
                self.edge_order.push(key);
            }
        }
        self
    }

    pub fn frontier(&mut self, name: &str) -> &mut Self {
        let i = self.intern(name);
        self.frontier[i] = true;
        self
    }

    pub fn build(&self) -> Result<WeightedGraph, GraphError> {
        if let Some(e) = &self.error {
            return Err(e.clone());
        }
        if self.edges.is_empty() {
            return Err(GraphError::EmptyEdgeList);
        }
        let mut measure = Vec::with_capacity(self.names.len());
        for (i, m) in self.measure.iter().enumerate() {
            measure.push(m.ok_or_else(|| GraphError::MissingMeasure(self.names[i].clone()))?);
        }
        let mut adjacency = vec![Vec::new(); self.names.len()];
        for &(x, y) in &self.edge_order {
            let b = self.edges[&(x, y)];
            adjacency[x].push((y, b));
            adjacency[y].push((x, b));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(v, _)| v);
        }
        let g = WeightedGraph {
            names: self.names.clone(),
            index: self.index.clone(),
            adjacency,
            measure,
            frontier: self.frontier.clone(),
        };
        check_connected(&g)?;
        Ok(g)
    }
}

fn approx_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= DUPLICATE_REL_TOL * a.abs().max(b.abs())
}

fn check_connected(g: &WeightedGraph) -> Result<(), GraphError> {
    let reach = |allowed: &dyn Fn(Vertex) -> bool| -> Option<Vertex> {
        let start = (0..g.len()).find(|&x| allowed(x))?;
        let mut seen = vec![false; g.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in g.neighbors(x) {
                if allowed(y) && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..g.len()).find(|&x| allowed(x) && !seen[x])
    };
    if let Some(x) = reach(&|_| true) {
        return Err(GraphError::Disconnected(g.name(x).to_string()));
    }
    if let Some(x) = reach(&|x| !g.is_frontier(x)) {
        return Err(GraphError::Disconnected(g.name(x).to_string()));
    }
    Ok(())
}

/// Builds a graph from an edge list, a measure table and a frontier set.
pub fn build_graph<S: AsRef<str>>(
    edges: &[(S, S, f64)],
    measures: &[(S, f64)],
    frontier: &[S],
) -> Result<WeightedGraph, GraphError> {
    let mut builder = GraphBuilder::new();
    for (u, v, b) in edges {
        builder.edge(u.as_ref(), v.as_ref(), *b);
    }
    for (v, m) in measures {
        builder.measure(v.as_ref(), *m);
    }
    for v in frontier {
        if !builder.index.contains_key(v.as_ref()) {
            return Err(GraphError::UnknownVertex(v.as_ref().to_string()));
        }
        builder.frontier(v.as_ref());
    }
    builder.build()
}

/// `(1/m(x)) Σ_y b(x, y)`.
pub fn weighted_degree(g: &WeightedGraph, x: Vertex) -> Result<f64, GraphError> {
    g.check(x)?;
    Ok(g.total_weight(x) / g.measure(x))
}

/// Returns a copy of `g` with a pendant `new_name` hanging from `host`.
/// The pendant inherits the frontier flag of its host.
pub fn glue_pendant(
    g: &WeightedGraph,
    host: Vertex,
    new_name: &str,
    weight: f64,
    new_measure: f64,
) -> Result<WeightedGraph, GraphError> {
    g.check(host)?;
    if g.index.contains_key(new_name) {
        return Err(GraphError::DuplicateVertex(new_name.to_string()));
    }
    if !(weight > 0.0) || !weight.is_finite() {
        return Err(GraphError::NonPositiveWeight {
            u: g.name(host).into(),
            v: new_name.into(),
            weight,
        });
    }
    if !(new_measure > 0.0) || !new_measure.is_finite() {
        return Err(GraphError::NonPositiveMeasure {
            vertex: new_name.into(),
            measure: new_measure,
        });
    }
    let mut out = g.clone();
    let z = out.len();
    out.names.push(new_name.to_string());
    out.index.insert(new_name.to_string(), z);
    out.measure.push(new_measure);
    out.frontier.push(g.is_frontier(host));
    out.adjacency.push(vec![(host, weight)]);
    out.adjacency[host].push((z, weight));
    Ok(out)
}

/// Breadth-first distances and spheres around a root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricView {
    pub root: Vertex,
    pub distance: Vec<usize>,
    pub spheres: Vec<Vec<Vertex>>,
}

impl MetricView {
    pub fn radius(&self) -> usize {
        self.spheres.len() - 1
    }

    pub fn sphere(&self, r: usize) -> &[Vertex] {
        self.spheres.get(r).map_or(&[], Vec::as_slice)
    }

    pub fn ball(&self, r: usize) -> Vec<Vertex> {
        self.spheres.iter().take(r + 1).flatten().copied().collect()
    }

    /// First radius at which a sphere contains a frontier vertex.
    pub fn frontier_radius(&self, g: &WeightedGraph) -> Option<usize> {
        self.spheres.iter().position(|s| s.iter().any(|&x| g.is_frontier(x)))
    }
}

pub fn metric_view(g: &WeightedGraph, root: Vertex) -> Result<MetricView, GraphError> {
    g.check(root)?;
    let mut distance = vec![usize::MAX; g.len()];
    distance[root] = 0;
    let mut order = vec![root];
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for &(y, _) in g.neighbors(x) {
            if distance[y] == usize::MAX {
                distance[y] = distance[x] + 1;
                order.push(y);
            }
        }
    }
    let radius = distance[*order.last().unwrap()];
    let mut spheres = vec![Vec::new(); radius + 1];
    for x in 0..g.len() {
        spheres[distance[x]].push(x);
    }
    Ok(MetricView {
        root,
        distance,
        spheres,
    })
}

/// Total weight crossing from `S_r` to `S_{r+1}`, summed from the inner side
/// and from the outer side. Each side is summed in edge order, so the two
/// agree bit for bit.
pub fn boundary_area_two_ways(g: &WeightedGraph, mv: &MetricView, r: usize) -> (f64, f64) {
    let crossing = |from: usize, to: usize| -> f64 {
        let mut edges: Vec<(Vertex, Vertex, f64)> = mv
            .sphere(from)
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().map(move |&(y, b)| (x, y, b)))
            .filter(|&(_, y, _)| mv.distance[y] == to)
            .map(|(x, y, b)| (x.min(y), x.max(y), b))
            .collect();
        edges.sort_unstable_by_key(|&(u, v, _)| (u, v));
        edges.iter().map(|e| e.2).sum()
    };
    (crossing(r, r + 1), crossing(r + 1, r))
}

/// A finite vertex set with its vertex boundary and interior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgraphRegion {
    pub members: Vec<Vertex>,
    pub boundary: Vec<Vertex>,
    pub interior: Vec<Vertex>,
    #[serde(skip)]
    mask: Vec<bool>,
}

impl SubgraphRegion {
    pub fn contains(&self, x: Vertex) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn is_subset_of(&self, other: &SubgraphRegion) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn in_interior(&self, x: Vertex) -> bool {
        self.contains(x) && self.interior.binary_search(&x).is_ok()
    }
}

/// Boundary: members with a neighbor outside, plus members on the frontier
/// (their outside neighbors were cut away).
pub fn region(g: &WeightedGraph, members: impl IntoIterator<Item = Vertex>) -> Result<SubgraphRegion, GraphError> {
    let mut mask = vec![false; g.len()];
    for x in members {
        g.check(x)?;
        mask[x] = true;
    }
    let members: Vec<Vertex> = (0..g.len()).filter(|&x| mask[x]).collect();
    let (boundary, interior) = members
        .iter()
        .partition(|&&x| g.is_frontier(x) || g.neighbors(x).iter().any(|&(y, _)| !mask[y]));
    Ok(SubgraphRegion {
        members,
        boundary,
        interior,
        mask,
    })
}

impl SubgraphRegion {
    fn touches_frontier(&self, g: &WeightedGraph) -> bool {
        self.boundary.iter().any(|&x| g.near_frontier(x))
    }
}

/// Nested finite regions around a root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustionSequence {
    pub root: Vertex,
    pub regions: Vec<SubgraphRegion>,
    /// Radius of each region: the largest distance from the root among its members.
    pub radii: Vec<usize>,
    /// Set when the final region was allowed to touch the frontier.
    pub final_touches_frontier: bool,
}

impl ExhaustionSequence {
    /// Validates nesting and the frontier rule. Only the final region may touch
    /// the frontier, and only if `allow_final_frontier`.
    pub fn new(
        g: &WeightedGraph,
        root: Vertex,
        regions: Vec<SubgraphRegion>,
        allow_final_frontier: bool,
    ) -> Result<Self, GraphError> {
        let mv = metric_view(g, root)?;
        let mut final_touches_frontier = false;
        for (i, r) in regions.iter().enumerate() {
            if let Some(next) = regions.get(i + 1) {
                if !r.is_subset_of(next) {
                    return Err(GraphError::NotNested { index: i, next: i + 1 });
                }
            }
            if r.touches_frontier(g) {
                if allow_final_frontier && i + 1 == regions.len() {
                    final_touches_frontier = true;
                } else {
                    return Err(GraphError::RegionTouchesFrontier { index: i });
                }
            }
        }
        let radii = regions
            .iter()
            .map(|r| r.members.iter().map(|&x| mv.distance[x]).max().unwrap_or(0))
            .collect();
        Ok(Self {
            root,
            regions,
            radii,
            final_touches_frontier,
        })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn last(&self) -> &SubgraphRegion {
        self.regions.last().expect("exhaustion has at least one region")
    }
}

/// Balls `B_r` for each radius.
pub fn ball_exhaustion(
    g: &WeightedGraph,
    root: Vertex,
    radii: &[usize],
    allow_final_frontier: bool,
) -> Result<ExhaustionSequence, GraphError> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GraphError::RadiiNotIncreasing);
    }
    let mv = metric_view(g, root)?;
    let mut regions = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let reg = region(g, mv.ball(r))?;
        let last = i + 1 == radii.len();
        if reg.touches_frontier(g) && !(last && allow_final_frontier) {
            return Err(GraphError::RadiusExceedsTruncation { radius: r });
        }
        regions.push(reg);
    }
    ExhaustionSequence::new(g, root, regions, allow_final_frontier)
}

/// Outer and inner curvature at every vertex with respect to a root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureField {
    pub root: Vertex,
    pub outer: Vec<f64>,
    pub inner: Vec<f64>,
    /// False on frontier vertices, whose outward edges are missing.
    pub reliable: Vec<bool>,
}

pub fn curvature_field(g: &WeightedGraph, root: Vertex) -> Result<CurvatureField, GraphError> {
    let mv = metric_view(g, root)?;
    Ok(curvature_from_metric(g, &mv))
}

pub fn curvature_from_metric(g: &WeightedGraph, mv: &MetricView) -> CurvatureField {
    let n = g.len();
    let mut outer = vec![0.0; n];
    let mut inner = vec![0.0; n];
    for x in 0..n {
        let r = mv.distance[x];
        let (mut up, mut down) = (0.0, 0.0);
        for &(y, b) in g.neighbors(x) {
            let s = mv.distance[y];
            if s == r + 1 {
                up += b;
            } else if s + 1 == r {
                down += b;
            }
        }
        outer[x] = up / g.measure(x);
        inner[x] = down / g.measure(x);
    }
    let reliable = (0..n).map(|x| !g.is_frontier(x)).collect();
    CurvatureField {
        root: mv.root,
        outer,
        inner,
        reliable,
    }
}
