//! Newton polytope queries: relative-interior membership with barycentric
//! witnesses, steady-state flux existence, single-target classification, and
//! the separating direction that serves as a linear Lyapunov functional when
//! the target is not interior.

use thiserror::Error;

use crate::model::{
    classify_structure, EmbeddedNetwork, FluxAssignment, MassActionSystem, VertexId,
};
use crate::numlin::{self, LpProblem, Mat, Tolerances};

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("network has no source vertices")]
    NoSources,
    #[error("query point dimension {found} does not match network dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("network is not single-target")]
    NotSingleTarget,
}

/// Where a point sits relative to the Newton polytope of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipStatus {
    RelativeInterior,
    Boundary,
    Outside,
}

/// Membership verdict with its certificate: a strictly positive barycentric
/// representation for interior points, or a direction `w` with
/// `<w, q - y> <= 0` for every source `y` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeMembership {
    pub status: MembershipStatus,
    /// Coefficients per source id, all positive, summing to one.
    pub barycentric_witness: Option<Vec<(VertexId, f64)>>,
    /// Supporting/separating direction, unit infinity norm.
    pub separating_direction: Option<Vec<f64>>,
}

/// Which side of the dichotomy a single-target system falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleTargetCase {
    GloballyStable,
    NoPositiveSteadyState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleTargetVerdict {
    pub case: SingleTargetCase,
    pub membership: PolytopeMembership,
    pub steady_state_flux: Option<FluxAssignment>,
}

/// Decide whether `point` lies in the relative interior, on the boundary, or
/// outside the convex hull of the source vertices. Interior status is decided
/// by strict feasibility of the barycentric coordinates; the two remaining
/// cases are split by plain feasibility.
pub fn newton_membership(
    net: &EmbeddedNetwork,
    point: &[f64],
    tol: &Tolerances,
) -> Result<PolytopeMembership, GeometryError> {
    if point.len() != net.dimension() {
        return Err(GeometryError::DimensionMismatch {
            expected: net.dimension(),
            found: point.len(),
        });
    }
    let sources = net.source_ids();
    if sources.is_empty() {
        return Err(GeometryError::NoSources);
    }
    let n = net.dimension();
    let k = sources.len();

    // Barycentric program: sum_i alpha_i y_i = point, sum_i alpha_i = 1.
    let mut a = Mat::zeros(n + 1, k);
    let mut b = vec![0.0; n + 1];
    for (j, &id) in sources.iter().enumerate() {
        let y = net.vertex(id).coords();
        for i in 0..n {
            a[(i, j)] = y[i];
        }
        a[(n, j)] = 1.0;
    }
    b[..n].copy_from_slice(point);
    b[n] = 1.0;
    let problem = LpProblem { a, b, nonneg: vec![true; k], maximize: None };
    let strict: Vec<usize> = (0..k).collect();

    if let Some((alpha, _)) = numlin::strict_interior_point(&problem, &strict, tol) {
        let witness = sources.iter().copied().zip(alpha).collect();
        return Ok(PolytopeMembership {
            status: MembershipStatus::RelativeInterior,
            barycentric_witness: Some(witness),
            separating_direction: None,
        });
    }

    let status = if numlin::lp_feasible(&problem, tol).is_some() {
        MembershipStatus::Boundary
    } else {
        MembershipStatus::Outside
    };
    let w = separating_direction(net, &sources, point, tol);
    Ok(PolytopeMembership { status, barycentric_witness: None, separating_direction: w })
}

/// Direction `w` with `<w, y - q> >= 0` for every source `y`, strict for at
/// least one when the point is outside. Found by maximizing the minimum
/// slack under a unit box on `w`; if the best minimum slack is zero (the
/// point sits on the boundary), a second program maximizes the total slack
/// to pick out a genuine supporting direction.
fn separating_direction(
    net: &EmbeddedNetwork,
    sources: &[VertexId],
    point: &[f64],
    tol: &Tolerances,
) -> Option<Vec<f64>> {
    let n = net.dimension();
    let k = sources.len();

    // Variables: w (n, free), slack s_i (k), box slacks u_j, v_j (2n).
    // Rows: s_i = <w, y_i - q>;  w_j + u_j = 1;  -w_j + v_j = 1.
    let build = |with_total: bool| -> LpProblem {
        let extra = if with_total { 1 } else { 0 };
        let total_vars = n + k + 2 * n + extra;
        let mut a = Mat::zeros(k + 2 * n + extra, total_vars);
        let mut b = vec![0.0; k + 2 * n + extra];
        for (i, &id) in sources.iter().enumerate() {
            let y = net.vertex(id).coords();
            for j in 0..n {
                a[(i, j)] = y[j] - point[j];
            }
            a[(i, n + i)] = -1.0;
        }
        for j in 0..n {
            a[(k + 2 * j, j)] = 1.0;
            a[(k + 2 * j, n + k + 2 * j)] = 1.0;
            b[k + 2 * j] = 1.0;
            a[(k + 2 * j + 1, j)] = -1.0;
            a[(k + 2 * j + 1, n + k + 2 * j + 1)] = 1.0;
            b[k + 2 * j + 1] = 1.0;
        }
        let mut nonneg = vec![true; total_vars];
        for j in 0..n {
            nonneg[j] = false;
        }
        if with_total {
            // z = sum_i s_i, maximized.
            let z = total_vars - 1;
            nonneg[z] = false;
            let row = k + 2 * n;
            for i in 0..k {
                a[(row, n + i)] = 1.0;
            }
            a[(row, z)] = -1.0;
        }
        LpProblem { a, b, nonneg, maximize: None }
    };

    // First try strict separation on all sources.
    let p = build(false);
    let slack_vars: Vec<usize> = (n..n + k).collect();
    if let Some((x, _)) = numlin::strict_interior_point(&p, &slack_vars, tol) {
        return normalize_inf(x[..n].to_vec());
    }

    // Supporting direction: maximize total slack subject to slacks >= 0.
    let mut p = build(true);
    p.maximize = Some(p.num_vars() - 1);
    match numlin::lp_solve(&p, tol) {
        numlin::LpOutcome::Solved { point: x, objective } if objective > tol.strict_slack => {
            normalize_inf(x[..n].to_vec())
        }
        _ => None,
    }
}

fn normalize_inf(mut w: Vec<f64>) -> Option<Vec<f64>> {
    let m = numlin::norm_inf(&w);
    if m <= 0.0 {
        return None;
    }
    for v in w.iter_mut() {
        *v /= m;
    }
    Some(w)
}

/// A strictly positive flux in the kernel of the stoichiometric matrix, or
/// `None` when no such flux exists. The flux is normalized to total one.
pub fn steady_state_flux(net: &EmbeddedNetwork, tol: &Tolerances) -> Option<FluxAssignment> {
    let gamma = net.stoichiometric_matrix();
    let m = gamma.cols();
    let n = gamma.rows();
    let mut a = Mat::zeros(n + 1, m);
    let mut b = vec![0.0; n + 1];
    for i in 0..n {
        for j in 0..m {
            a[(i, j)] = gamma[(i, j)];
        }
    }
    for j in 0..m {
        a[(n, j)] = 1.0;
    }
    b[n] = 1.0;
    let p = LpProblem { a, b, nonneg: vec![true; m], maximize: None };
    let strict: Vec<usize> = (0..m).collect();
    numlin::strict_interior_point(&p, &strict, tol).map(|(j, _)| FluxAssignment(j))
}

/// Classify a single-target system: globally stable exactly when the target
/// lies in the relative interior of the Newton polytope, in which case a
/// steady-state flux certificate is attached; otherwise no positive steady
/// state exists and the separating direction provides a linear Lyapunov
/// functional.
pub fn classify_single_target(
    sys: &MassActionSystem,
    tol: &Tolerances,
) -> Result<SingleTargetVerdict, GeometryError> {
    let net = sys.network();
    let report = classify_structure(net, tol);
    let Some(target) = report.target_id else {
        return Err(GeometryError::NotSingleTarget);
    };
    let target_coords = net.vertex(target).coords().to_vec();
    let membership = newton_membership(net, &target_coords, tol)?;
    let flux = steady_state_flux(net, tol);

    let case = match membership.status {
        MembershipStatus::RelativeInterior => SingleTargetCase::GloballyStable,
        _ => SingleTargetCase::NoPositiveSteadyState,
    };
    Ok(SingleTargetVerdict { case, membership, steady_state_flux: flux })
}
