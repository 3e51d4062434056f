//! Dynamical and flux equivalence between mass-action systems, realization
//! searches (single-target by ray geometry, complex-balanced by linear
//! feasibility over the complete source digraph), positive steady states,
//! and feasibility sweeps over rate-constant regions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics;
use crate::model::{Edge, EmbeddedNetwork, MassActionSystem, Vertex, VertexId};
use crate::numlin::{self, LpProblem, Mat, Tolerances};

#[derive(Debug, Error, PartialEq)]
pub enum EquivalenceError {
    #[error("systems have different ambient dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("state dimension does not match the system")]
    BadState,
}

/// Net vector per source vertex: the rate-weighted sum of reaction vectors
/// leaving it. Vertices without outgoing edges do not appear.
#[derive(Debug, Clone)]
pub struct NetVectorField {
    /// (vertex coordinates, net vector), ordered by coordinate key.
    pub entries: Vec<(Vec<f64>, Vec<f64>)>,
}

// Vertices of different systems are matched by exact coordinates: distinct
// exponent vectors are genuinely different monomials, so approximate
// matching would change the question being asked.
fn coord_key(coords: &[f64]) -> Vec<u64> {
    coords.iter().map(|&c| (c + 0.0).to_bits()).collect()
}

impl NetVectorField {
    pub fn of(sys: &MassActionSystem) -> NetVectorField {
        let net = sys.network();
        let mut entries: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for &id in &net.source_ids() {
            let coords = net.vertex(id).coords().to_vec();
            let mut v = vec![0.0; net.dimension()];
            for (i, e) in net.edges().iter().enumerate() {
                if e.source == id {
                    let gamma = net.reaction_vector(i);
                    for (vi, gi) in v.iter_mut().zip(&gamma) {
                        *vi += sys.rate(i) * gi;
                    }
                }
            }
            entries.push((coords, v));
        }
        entries.sort_by_key(|(c, _)| coord_key(c));
        NetVectorField { entries }
    }

    pub fn get(&self, coords: &[f64]) -> Option<&[f64]> {
        let key = coord_key(coords);
        self.entries
            .binary_search_by(|(c, _)| coord_key(c).cmp(&key))
            .ok()
            .map(|i| self.entries[i].1.as_slice())
    }
}

/// Per-vertex comparison of two systems' net vector fields.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub max_residual: f64,
    /// (vertex coordinates, |net_a - net_b| in max norm) over the union of
    /// the two vertex sets.
    pub residuals: Vec<(Vec<f64>, f64)>,
}

/// Two systems are dynamically equivalent exactly when the net vectors agree
/// at every vertex of the union of the vertex sets; linear independence of
/// distinct monomials reduces equality of the vector fields to these
/// per-vertex identities.
pub fn dynamically_equivalent(
    a: &MassActionSystem,
    b: &MassActionSystem,
    tol: &Tolerances,
) -> Result<EquivalenceReport, EquivalenceError> {
    if a.dimension() != b.dimension() {
        return Err(EquivalenceError::DimensionMismatch(a.dimension(), b.dimension()));
    }
    let fa = NetVectorField::of(a);
    let fb = NetVectorField::of(b);
    let zero = vec![0.0; a.dimension()];

    let mut keys: Vec<Vec<f64>> = Vec::new();
    for sys in [a, b] {
        for v in sys.network().vertices() {
            if !keys.iter().any(|k| coord_key(k) == coord_key(v.coords())) {
                keys.push(v.coords().to_vec());
            }
        }
    }
    keys.sort_by_key(|c| coord_key(c));

    let mut residuals = Vec::new();
    let mut max_residual: f64 = 0.0;
    for coords in keys {
        let va = fa.get(&coords).unwrap_or(&zero);
        let vb = fb.get(&coords).unwrap_or(&zero);
        let r = numlin::norm_inf(&numlin::sub(va, vb));
        max_residual = max_residual.max(r);
        residuals.push((coords, r));
    }
    Ok(EquivalenceReport {
        equivalent: max_residual <= tol.equivalence_abs,
        max_residual,
        residuals,
    })
}

/// Search for a single-target system with the same vector field: a common
/// point `y*` and rates `k_i > 0` with `v(y_i) = k_i (y* - y_i)` for every
/// source with a nonzero net vector.
///
/// Sources with zero net vectors need no outgoing edge and are omitted. When
/// the rays are in general position the target is the unique least-squares
/// solution; when all net vectors are parallel the valid targets form a
/// segment of the common line and its midpoint is returned.
pub fn single_target_realize(
    sys: &MassActionSystem,
    tol: &Tolerances,
) -> Option<MassActionSystem> {
    let net = sys.network();
    let n = net.dimension();
    let field = NetVectorField::of(sys);

    let mut scale: f64 = 0.0;
    for (_, v) in &field.entries {
        scale = scale.max(numlin::norm2(v));
    }
    // Sources whose outgoing edges exactly cancel are dropped, not kept as
    // noise constraints.
    let sources: Vec<(Vec<f64>, Vec<f64>)> = field
        .entries
        .iter()
        .filter(|(_, v)| numlin::norm2(v) > 1e-12 * scale)
        .cloned()
        .collect();
    let k = sources.len();
    if k == 0 {
        return None; // the zero field admits no network with an edge
    }

    let (target, rays) = if all_parallel(&sources) {
        collinear_target(&sources, tol)?
    } else {
        general_target(&sources, n, tol)?
    };

    // Assemble the realization: sources plus the target vertex.
    let mut vertices: Vec<Vertex> = Vec::with_capacity(k + 1);
    let mut edges = Vec::with_capacity(k);
    let mut rates = Vec::with_capacity(k);
    for (i, ((coords, _), t)) in sources.iter().zip(&rays).enumerate() {
        vertices.push(Vertex::new(coords.clone()));
        edges.push(Edge { source: VertexId(i), target: VertexId(k) });
        rates.push(1.0 / t);
    }
    vertices.push(Vertex::new(target));
    let network = EmbeddedNetwork::new(n, vertices, edges).ok()?;
    MassActionSystem::new(network, rates).ok()
}

fn all_parallel(sources: &[(Vec<f64>, Vec<f64>)]) -> bool {
    if sources.len() <= 1 {
        return true;
    }
    let u = &sources[0].1;
    let un = numlin::norm2(u);
    sources.iter().all(|(_, v)| {
        let cross = numlin::dot(u, v).abs();
        let vn = numlin::norm2(v);
        (cross - un * vn).abs() <= 1e-10 * un * vn
    })
}

/// All rays point along one line. Positions along the unit direction bound
/// the target from below (rays pointing forward) and above (rays pointing
/// backward); any point of the open interval works and the midpoint is the
/// canonical choice. Unbounded intervals place the target one unit past the
/// binding side.
fn collinear_target(
    sources: &[(Vec<f64>, Vec<f64>)],
    tol: &Tolerances,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let u0 = &sources[0].1;
    let u: Vec<f64> = u0.iter().map(|c| c / numlin::norm2(u0)).collect();
    let base = &sources[0].0;
    let n = base.len();

    // All sources must lie on the base line for an exact realization.
    for (y, _) in sources {
        let d = numlin::sub(y, base);
        let along = numlin::dot(&d, &u);
        let mut off = 0.0f64;
        for i in 0..n {
            off = off.max((d[i] - along * u[i]).abs());
        }
        if off > tol.realization_residual * (1.0 + numlin::norm_inf(y)) {
            return None;
        }
    }

    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut positions = Vec::with_capacity(sources.len());
    let mut speeds = Vec::with_capacity(sources.len());
    for (y, v) in sources {
        let pos = numlin::dot(&numlin::sub(y, base), &u);
        let speed = numlin::dot(v, &u);
        positions.push(pos);
        speeds.push(speed);
        if speed > 0.0 {
            lower = lower.max(pos);
        } else {
            upper = upper.min(pos);
        }
    }
    let sigma = if lower.is_finite() && upper.is_finite() {
        if lower >= upper {
            return None; // rays point away from each other
        }
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower + 1.0
    } else {
        upper - 1.0
    };

    let mut rays = Vec::with_capacity(sources.len());
    for (pos, speed) in positions.iter().zip(&speeds) {
        let t = (sigma - pos) / speed;
        if t <= tol.ray_positivity {
            return None;
        }
        rays.push(t);
    }
    let target: Vec<f64> = (0..n).map(|i| base[i] + sigma * u[i]).collect();
    Some((target, rays))
}

/// General position: solve the stacked system `y* - t_i v_i = y_i` in the
/// unknowns (y*, t) by least squares and accept only a near-exact fit with
/// strictly positive ray parameters.
fn general_target(
    sources: &[(Vec<f64>, Vec<f64>)],
    n: usize,
    tol: &Tolerances,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let k = sources.len();
    let mut a = Mat::zeros(n * k, n + k);
    let mut b = vec![0.0; n * k];
    let mut scale: f64 = 0.0;
    for (i, (y, v)) in sources.iter().enumerate() {
        for r in 0..n {
            a[(n * i + r, r)] = 1.0;
            a[(n * i + r, n + i)] = -v[r];
            b[n * i + r] = y[r];
        }
        scale = scale.max(numlin::norm_inf(y)).max(numlin::norm_inf(v));
    }
    let (x, residual) = numlin::least_squares(&a, &b)?;
    if residual > tol.realization_residual * scale.max(1.0) {
        return None;
    }
    let target = x[..n].to_vec();
    let rays = x[n..].to_vec();
    if rays.iter().any(|&t| t <= tol.ray_positivity) {
        return None;
    }
    Some((target, rays))
}

/// A positive steady state in the compatibility class of `x0`: Newton on the
/// reduced residual with a long-time integration fallback, or `None` when
/// both stall or leave the positive orthant.
pub fn find_positive_steady_state(
    sys: &MassActionSystem,
    x0: &[f64],
    tol: &Tolerances,
) -> Option<Vec<f64>> {
    if x0.len() != sys.dimension() || x0.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let mut start = x0.to_vec();
    for _ in 0..4 {
        if let Some(x) = dynamics::steady_state_newton(sys, &start, tol) {
            return Some(x);
        }
        // Follow the flow for a while and retry from a better basin.
        let traj = dynamics::integrate(
            sys,
            &start,
            100.0,
            &dynamics::IntegrateOptions { max_samples: Some(8), ..Default::default() },
            tol,
        )
        .ok()?;
        match traj.verdict {
            dynamics::Verdict::ConvergedInterior => return traj.limit,
            dynamics::Verdict::Inconclusive => start = traj.final_state().to_vec(),
            _ => return None,
        }
    }
    None
}

/// Steady states reached from several random seed points in the positive
/// orthant (coordinates log-uniform in [0.1, 10]), deduplicated.
pub fn positive_steady_states(
    sys: &MassActionSystem,
    attempts: usize,
    seed: u64,
    tol: &Tolerances,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.dimension();
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut seeds = vec![vec![1.0; n]];
    for _ in 0..attempts.saturating_sub(1) {
        seeds.push((0..n).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect());
    }
    for x0 in seeds {
        if let Some(x) = find_positive_steady_state(sys, &x0, tol) {
            let duplicate = found.iter().any(|y| {
                numlin::norm_inf(&numlin::sub(y, &x)) < 1e-6 * (1.0 + numlin::norm_inf(y))
            });
            if !duplicate {
                found.push(x);
            }
        }
    }
    found
}

/// Outcome of the complex-balanced realization search at a fixed state.
#[derive(Debug, Clone)]
pub struct CbFeasibility {
    pub feasible: bool,
    /// Source coordinates indexing the complete digraph, in vertex order.
    pub sources: Vec<Vec<f64>>,
    /// Flux on edge (i, j) of the complete source digraph; zero diagonal.
    /// Present only when feasible.
    pub flux_witness: Option<Mat>,
    pub steady_state_used: Vec<f64>,
    /// Steady-state residual of the state that was used; complex balance at
    /// a non-steady state is impossible, so a large value here explains an
    /// infeasible answer.
    pub steady_residual: f64,
    pub realized_system: Option<MassActionSystem>,
}

/// Decide whether the system is dynamically equivalent to a complex-balanced
/// system at the state `x`, by linear feasibility over nonnegative fluxes
/// `Q_ij` on the complete digraph of the source vertices: per-source flux
/// equivalence against `J_i = k_i x^{y_i}` plus per-vertex flow balance.
/// On success the witness fluxes convert back to rate constants
/// `k'_ij = Q_ij / x^{y_i}`.
pub fn cb_realize(
    sys: &MassActionSystem,
    x: &[f64],
    tol: &Tolerances,
) -> Result<CbFeasibility, EquivalenceError> {
    if x.len() != sys.dimension() || x.iter().any(|&v| !(v > 0.0)) {
        return Err(EquivalenceError::BadState);
    }
    let net = sys.network();
    let n = net.dimension();
    let source_ids = net.source_ids();
    let k = source_ids.len();
    let sources: Vec<Vec<f64>> =
        source_ids.iter().map(|&id| net.vertex(id).coords().to_vec()).collect();
    let steady_residual = dynamics::steady_state_residual(sys, x).unwrap_or(f64::INFINITY);

    // Net flux vector required at each source: x^{y_i} times the net
    // direction of the input.
    let field = NetVectorField::of(sys);
    let mut required: Vec<Vec<f64>> = Vec::with_capacity(k);
    for coords in &sources {
        let v = field.get(coords).expect("source has outgoing edges");
        let m = dynamics::monomial(x, coords);
        required.push(v.iter().map(|c| c * m).collect());
    }

    // Fluxes scale linearly, so the feasibility question is solved at unit
    // magnitude and the witness is scaled back; this keeps the absolute LP
    // tolerance meaningful at extreme rate ratios.
    let flux_scale = required
        .iter()
        .map(|v| numlin::norm_inf(v))
        .fold(0.0f64, f64::max)
        .max(1e-300);

    // Variables Q_ij for ordered pairs i != j.
    let var = |i: usize, j: usize| -> usize {
        debug_assert!(i != j);
        i * (k - 1) + if j > i { j - 1 } else { j }
    };
    let num_vars = k * (k - 1);
    let rows = k * n + k;
    let mut a = Mat::zeros(rows, num_vars);
    let mut b = vec![0.0; rows];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let q = var(i, j);
            for r in 0..n {
                // sum_j Q_ij (y_j - y_i) = required_i
                a[(i * n + r, q)] = sources[j][r] - sources[i][r];
            }
            // Flow balance: out(i) - in(i) = 0.
            a[(k * n + i, q)] += 1.0;
            a[(k * n + j, q)] -= 1.0;
        }
        for r in 0..n {
            b[i * n + r] = required[i][r] / flux_scale;
        }
    }
    let lp = LpProblem { a, b, nonneg: vec![true; num_vars], maximize: None };
    let solution = numlin::lp_feasible(&lp, tol)
        .map(|q| q.into_iter().map(|v| v * flux_scale).collect::<Vec<f64>>());

    let Some(q) = solution else {
        return Ok(CbFeasibility {
            feasible: false,
            sources,
            flux_witness: None,
            steady_state_used: x.to_vec(),
            steady_residual,
            realized_system: None,
        });
    };

    let mut witness = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if i != j {
                witness[(i, j)] = q[var(i, j)];
            }
        }
    }

    // Realized system: edges with positive flux, rates Q_ij / x^{y_i}.
    let vertices: Vec<Vertex> = sources.iter().cloned().map(Vertex::new).collect();
    let mut edges = Vec::new();
    let mut rates = Vec::new();
    for i in 0..k {
        let m = dynamics::monomial(x, &sources[i]);
        for j in 0..k {
            if i != j && witness[(i, j)] > 0.0 {
                edges.push(Edge { source: VertexId(i), target: VertexId(j) });
                rates.push(witness[(i, j)] / m);
            }
        }
    }
    let realized_system = if edges.is_empty() {
        None
    } else {
        EmbeddedNetwork::new(n, vertices, edges)
            .ok()
            .and_then(|net| MassActionSystem::new(net, rates).ok())
    };

    Ok(CbFeasibility {
        feasible: true,
        sources,
        flux_witness: Some(witness),
        steady_state_used: x.to_vec(),
        steady_residual,
        realized_system,
    })
}

/// What a sweep evaluates at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuery {
    /// Complex-balanced realizability at the steady states found from
    /// seeded starting points (feasible when any state admits one).
    ComplexBalanced { state_attempts: usize, seed: u64 },
    /// Existence of a single-target realization.
    SingleTarget,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub parameter: f64,
    pub feasible: Option<bool>,
    pub witness_summary: String,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Parameter values bracketing each feasibility change, refined by
    /// bisection to a relative width of 1e-3.
    pub boundaries: Vec<f64>,
}

fn sweep_point<F>(family: &F, parameter: f64, query: SweepQuery, tol: &Tolerances) -> SweepRow
where
    F: Fn(f64) -> Result<MassActionSystem, String>,
{
    let sys = match family(parameter) {
        Ok(sys) => sys,
        Err(err) => {
            return SweepRow {
                parameter,
                feasible: None,
                witness_summary: String::new(),
                error: Some(err),
            }
        }
    };
    match query {
        SweepQuery::SingleTarget => {
            let realized = single_target_realize(&sys, tol);
            let summary = realized
                .as_ref()
                .map(|r| {
                    let target = r.network().vertices().last().unwrap().coords();
                    format!("target {:?}", target)
                })
                .unwrap_or_default();
            SweepRow {
                parameter,
                feasible: Some(realized.is_some()),
                witness_summary: summary,
                error: None,
            }
        }
        SweepQuery::ComplexBalanced { state_attempts, seed } => {
            let states = positive_steady_states(&sys, state_attempts, seed, tol);
            if states.is_empty() {
                return SweepRow {
                    parameter,
                    feasible: None,
                    witness_summary: String::new(),
                    error: Some("no positive steady state found".to_string()),
                };
            }
            let mut feasible = false;
            let mut summary = String::new();
            for x in &states {
                if let Ok(out) = cb_realize(&sys, x, tol) {
                    if out.feasible {
                        feasible = true;
                        let positive = out
                            .flux_witness
                            .as_ref()
                            .map(|w| {
                                let mut c = 0;
                                for i in 0..w.rows() {
                                    for j in 0..w.cols() {
                                        if w[(i, j)] > 0.0 {
                                            c += 1;
                                        }
                                    }
                                }
                                c
                            })
                            .unwrap_or(0);
                        summary = format!("{positive} flux edges");
                        break;
                    }
                }
            }
            SweepRow { parameter, feasible: Some(feasible), witness_summary: summary, error: None }
        }
    }
}

/// Evaluate a parametrized family over a grid and bracket every feasibility
/// boundary by bisection. Grid points are evaluated in parallel but reported
/// in grid order; per-point failures are recorded and do not stop the sweep.
pub fn region_sweep<F>(
    family: F,
    grid: &[f64],
    query: SweepQuery,
    tol: &Tolerances,
) -> SweepResult
where
    F: Fn(f64) -> Result<MassActionSystem, String> + Sync,
{
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&p| sweep_point(&family, p, query, tol))
        .collect();

    let mut boundaries = Vec::new();
    for w in rows.windows(2) {
        let (Some(fa), Some(fb)) = (w[0].feasible, w[1].feasible) else {
            continue;
        };
        if fa == fb {
            continue;
        }
        let mut lo = w[0].parameter;
        let mut hi = w[1].parameter;
        let lo_feasible = fa;
        // Bisect to relative width 1e-3.
        while (hi - lo).abs() > 1e-3 * 0.5 * (hi.abs() + lo.abs()) {
            let mid = 0.5 * (lo + hi);
            let row = sweep_point(&family, mid, query, tol);
            match row.feasible {
                Some(f) if f == lo_feasible => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        boundaries.push(0.5 * (lo + hi));
    }
    SweepResult { rows, boundaries }
}
