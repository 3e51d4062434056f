//! Core domain types: networks embedded in Euclidean space, mass-action
//! systems, and structural queries (sources, components, reversibility,
//! deficiency, single-target shape).

use std::collections::BTreeSet;

use num::BigRational;
use num::ToPrimitive;
use thiserror::Error;

use crate::numlin::{self, Mat, Tolerances};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("vertex dimension {found} does not match network dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate is not finite")]
    NonFiniteCoordinate,
    #[error("vertices {0} and {1} have identical coordinates")]
    DuplicateVertex(usize, usize),
    #[error("edge references unknown vertex index {0}")]
    UnknownVertex(usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("network has no edges")]
    NoEdges,
    #[error("rate count {rates} does not match edge count {edges}")]
    RateCountMismatch { rates: usize, edges: usize },
    #[error("rate constant {0} is not strictly positive")]
    NonPositiveRate(usize),
}

/// Index of a vertex within one network. Stable for the lifetime of the
/// network it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// A point of the embedded graph: its coordinates are the stoichiometric
/// coefficients of the complex it represents. Coordinates parsed from exact
/// literals keep a rational shadow so integer quantities derived from them
/// (rank, deficiency) never wobble with floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    coords: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

// Integer coordinates up to this magnitude are promoted to exact rationals.
const EXACT_INT_LIMIT: f64 = 1e12;

impl Vertex {
    /// Vertex from floating-point coordinates. All-integer coordinate
    /// vectors are promoted to exact form.
    pub fn new(coords: Vec<f64>) -> Self {
        let all_int = coords
            .iter()
            .all(|c| c.fract() == 0.0 && c.abs() <= EXACT_INT_LIMIT);
        let exact = all_int.then(|| {
            coords
                .iter()
                .map(|&c| BigRational::from_integer((c as i64).into()))
                .collect()
        });
        Vertex { coords, exact }
    }

    /// Vertex from exact rational coordinates.
    pub fn from_exact(exact: Vec<BigRational>) -> Self {
        let coords = exact.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        Vertex { coords, exact: Some(exact) }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// True when some coordinate is negative or non-integral, i.e. the
    /// monomial it encodes is a power law rather than classical mass action.
    pub fn is_power_law(&self) -> bool {
        self.coords.iter().any(|&c| c < 0.0 || c.fract() != 0.0)
    }
}

/// Directed reaction between two vertices (stored by index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
}

/// A reaction network: a finite directed graph whose vertices are points of
/// R^n, without self-loops or duplicate edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedNetwork {
    dimension: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl EmbeddedNetwork {
    pub fn new(
        dimension: usize,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Result<Self, ModelError> {
        for v in &vertices {
            if v.coords().len() != dimension {
                return Err(ModelError::DimensionMismatch {
                    expected: dimension,
                    found: v.coords().len(),
                });
            }
            if v.coords().iter().any(|c| !c.is_finite()) {
                return Err(ModelError::NonFiniteCoordinate);
            }
        }
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if vertices[i].coords() == vertices[j].coords() {
                    return Err(ModelError::DuplicateVertex(i, j));
                }
            }
        }
        if edges.is_empty() {
            return Err(ModelError::NoEdges);
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.source.0 >= vertices.len() {
                return Err(ModelError::UnknownVertex(e.source.0));
            }
            if e.target.0 >= vertices.len() {
                return Err(ModelError::UnknownVertex(e.target.0));
            }
            if e.source == e.target {
                return Err(ModelError::SelfLoop(e.source.0));
            }
            if !seen.insert((e.source.0, e.target.0)) {
                return Err(ModelError::DuplicateEdge(e.source.0, e.target.0));
            }
        }
        Ok(EmbeddedNetwork { dimension, vertices, edges })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, id: VertexId) -> &Vertex {
        &self.vertices[id.0]
    }

    /// Reaction vector (target minus source) of edge `i`.
    pub fn reaction_vector(&self, i: usize) -> Vec<f64> {
        let e = &self.edges[i];
        let s = self.vertex(e.source).coords();
        let t = self.vertex(e.target).coords();
        t.iter().zip(s).map(|(a, b)| a - b).collect()
    }

    /// Matrix whose i-th column is the reaction vector of edge i.
    pub fn stoichiometric_matrix(&self) -> Mat {
        let cols: Vec<Vec<f64>> = (0..self.edges.len()).map(|i| self.reaction_vector(i)).collect();
        let mut m = Mat::zeros(self.dimension, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for i in 0..self.dimension {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// Ids of vertices with at least one outgoing edge, ascending.
    pub fn source_ids(&self) -> Vec<VertexId> {
        let set: BTreeSet<VertexId> = self.edges.iter().map(|e| e.source).collect();
        set.into_iter().collect()
    }

    /// Ids of vertices touching at least one edge, ascending. Isolated
    /// vertices are not part of the graph for structural purposes.
    pub fn active_ids(&self) -> Vec<VertexId> {
        let mut set = BTreeSet::new();
        for e in &self.edges {
            set.insert(e.source);
            set.insert(e.target);
        }
        set.into_iter().collect()
    }

    /// True when the reversed edge is also present, for every edge.
    pub fn is_reversible(&self) -> bool {
        let set: BTreeSet<(usize, usize)> =
            self.edges.iter().map(|e| (e.source.0, e.target.0)).collect();
        self.edges.iter().all(|e| set.contains(&(e.target.0, e.source.0)))
    }

    /// Index of the edge `source -> target`, if present.
    pub fn edge_index(&self, source: VertexId, target: VertexId) -> Option<usize> {
        self.edges.iter().position(|e| e.source == source && e.target == target)
    }

    /// True when any vertex encodes a power-law monomial.
    pub fn is_power_law(&self) -> bool {
        self.vertices.iter().any(|v| v.is_power_law())
    }

    /// All vertices carry exact rational coordinates.
    pub fn has_exact_coords(&self) -> bool {
        self.vertices.iter().all(|v| v.exact().is_some())
    }
}

/// A network together with one positive rate constant per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct MassActionSystem {
    network: EmbeddedNetwork,
    rates: Vec<f64>,
}

impl MassActionSystem {
    pub fn new(network: EmbeddedNetwork, rates: Vec<f64>) -> Result<Self, ModelError> {
        if rates.len() != network.edges().len() {
            return Err(ModelError::RateCountMismatch {
                rates: rates.len(),
                edges: network.edges().len(),
            });
        }
        for (i, &r) in rates.iter().enumerate() {
            if !(r > 0.0 && r.is_finite()) {
                return Err(ModelError::NonPositiveRate(i));
            }
        }
        Ok(MassActionSystem { network, rates })
    }

    pub fn network(&self) -> &EmbeddedNetwork {
        &self.network
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn rate(&self, edge: usize) -> f64 {
        self.rates[edge]
    }

    pub fn dimension(&self) -> usize {
        self.network.dimension()
    }

    pub fn stoichiometric_matrix(&self) -> Mat {
        self.network.stoichiometric_matrix()
    }

    /// Same network, all rates multiplied by `c > 0`.
    pub fn scaled_rates(&self, c: f64) -> MassActionSystem {
        MassActionSystem {
            network: self.network.clone(),
            rates: self.rates.iter().map(|r| r * c).collect(),
        }
    }
}

/// Strictly positive flux values indexed by the edges of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxAssignment(pub Vec<f64>);

/// Structural facts about a network.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub source_ids: Vec<VertexId>,
    pub num_components: usize,
    pub stoich_dim: usize,
    pub deficiency: usize,
    pub is_reversible: bool,
    pub is_weakly_reversible: bool,
    pub is_single_target: bool,
    pub target_id: Option<VertexId>,
    pub is_power_law: bool,
}

/// Dimension of the stoichiometric subspace. Uses exact rational elimination
/// whenever every vertex carries exact coordinates, so the result (and with
/// it the deficiency) cannot wobble with floating-point noise; otherwise
/// falls back to floating elimination with the configured pivot tolerance.
pub fn stoichiometric_dimension(net: &EmbeddedNetwork, tol: &Tolerances) -> usize {
    if net.has_exact_coords() {
        let rows: Vec<Vec<BigRational>> = (0..net.dimension())
            .map(|coord| {
                net.edges()
                    .iter()
                    .map(|e| {
                        let s = &net.vertex(e.source).exact().unwrap()[coord];
                        let t = &net.vertex(e.target).exact().unwrap()[coord];
                        t - s
                    })
                    .collect()
            })
            .collect();
        numlin::rank_exact(&rows)
    } else {
        numlin::rank_f64(&net.stoichiometric_matrix(), tol.rank_pivot_rel)
    }
}

/// Classify the structure of a network: sources, connected components,
/// reversibility class, deficiency and single-target shape.
pub fn classify_structure(net: &EmbeddedNetwork, tol: &Tolerances) -> StructureReport {
    let active = net.active_ids();
    let index_of = |id: VertexId| active.binary_search(&id).expect("active vertex");

    // Weakly connected components over the active vertices.
    let mut parent: Vec<usize> = (0..active.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for e in net.edges() {
        let a = find(&mut parent, index_of(e.source));
        let b = find(&mut parent, index_of(e.target));
        if a != b {
            parent[a] = b;
        }
    }
    let mut roots = BTreeSet::new();
    for i in 0..active.len() {
        let r = find(&mut parent, i);
        roots.insert(r);
    }
    let num_components = roots.len();

    let stoich_dim = stoichiometric_dimension(net, tol);
    let m = active.len();
    let deficiency = m - num_components - stoich_dim;

    let is_reversible = net.is_reversible();
    let is_weakly_reversible = weakly_reversible(net, &active, index_of);

    // Single target: all edges share one target, which itself has no
    // outgoing edge.
    let targets: BTreeSet<VertexId> = net.edges().iter().map(|e| e.target).collect();
    let source_ids = net.source_ids();
    let (is_single_target, target_id) = if targets.len() == 1 {
        let t = *targets.iter().next().unwrap();
        if source_ids.contains(&t) {
            (false, None)
        } else {
            (true, Some(t))
        }
    } else {
        (false, None)
    };

    StructureReport {
        source_ids,
        num_components,
        stoich_dim,
        deficiency,
        is_reversible,
        is_weakly_reversible,
        is_single_target,
        target_id,
        is_power_law: net.is_power_law(),
    }
}

/// Every edge lies inside a strongly connected component (Tarjan, iterative).
fn weakly_reversible(
    net: &EmbeddedNetwork,
    active: &[VertexId],
    index_of: impl Fn(VertexId) -> usize,
) -> bool {
    let n = active.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in net.edges() {
        adj[index_of(e.source)].push(index_of(e.target));
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        // Explicit DFS stack of (node, next child position).
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            if *ci < adj[v].len() {
                let w = adj[v][*ci];
                *ci += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                if let Some(&mut (u, _)) = call.last_mut() {
                    low[u] = low[u].min(low[v]);
                }
            }
        }
    }
    net.edges()
        .iter()
        .all(|e| comp[index_of(e.source)] == comp[index_of(e.target)])
}
