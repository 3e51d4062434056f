//! Reverse-rate construction for single-target systems and the balance
//! condition checks.
//!
//! The central primitive intersects an affine flux set with an exponential
//! family by minimizing the strictly convex potential
//! `phi(mu) = sum_j k_j exp(<gamma_j, mu>)` over the span of the reaction
//! vectors. Its unique minimizer yields reverse rate constants that make the
//! doubled network detailed balanced while leaving the vector field
//! untouched.

use thiserror::Error;

use crate::model::{EmbeddedNetwork, MassActionSystem, VertexId};
use crate::numlin::{self, LpProblem, Mat, Tolerances};

#[derive(Debug, Error, PartialEq)]
pub enum BalanceError {
    #[error("zero is not in the relative interior of the reaction vectors' hull; the potential has no minimizer")]
    NotInterior,
    #[error("potential minimization did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("network is not reversible")]
    NotReversible,
    #[error("network is not single-target with an interior target")]
    NotSingleTarget,
    #[error("cycle edge {0:?} -> {1:?} is missing")]
    MissingEdge(VertexId, VertexId),
    #[error("input dimensions are inconsistent")]
    BadInput,
}

/// Result of the potential minimization: reverse rates, the dual variable,
/// and the detailed-balanced steady state they certify.
#[derive(Debug, Clone)]
pub struct BirchSolution {
    /// Reverse rate constants, one per column of the input matrix.
    pub kappa_prime: Vec<f64>,
    /// Minimizer of the potential, an element of the column span.
    pub mu: Vec<f64>,
    /// The certified steady state exp(-mu).
    pub steady_state: Vec<f64>,
    /// max |Gamma kappa_prime|: how exactly the reverse rates balance.
    pub residual: f64,
}

/// Value, gradient and Hessian of the potential at `mu`.
#[derive(Debug, Clone)]
pub struct PotentialEvaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Mat,
}

/// Evaluate `phi(mu) = sum_j kappa_j exp(<gamma_j, mu>)` together with its
/// derivatives. The gradient is `Gamma kappa'(mu)` where
/// `kappa'_j = kappa_j exp(<gamma_j, mu>)`.
pub fn birch_potential(gamma: &Mat, kappa: &[f64], mu: &[f64]) -> PotentialEvaluation {
    let n = gamma.rows();
    let m = gamma.cols();
    assert_eq!(kappa.len(), m);
    assert_eq!(mu.len(), n);
    let mut value = 0.0;
    let mut gradient = vec![0.0; n];
    let mut hessian = Mat::zeros(n, n);
    for j in 0..m {
        let col = gamma.column(j);
        let w = kappa[j] * numlin::dot(&col, mu).exp();
        value += w;
        for i in 0..n {
            gradient[i] += w * col[i];
            for l in 0..n {
                hessian[(i, l)] += w * col[i] * col[l];
            }
        }
    }
    PotentialEvaluation { value, gradient, hessian }
}

const MAX_NEWTON_STEPS: usize = 200;

/// Reverse rates from the convex potential: minimizes `phi` over the span of
/// the columns of `gamma` by damped Newton from `mu = 0` and returns
/// `kappa' = kappa o exp(Gamma^T mu)` at the minimizer.
///
/// Fails with [`BalanceError::NotInterior`] when zero is not in the relative
/// interior of the convex hull of the columns, which is exactly when the
/// potential is unbounded below along some direction of the span.
pub fn birch_point(
    gamma: &Mat,
    kappa: &[f64],
    tol: &Tolerances,
) -> Result<BirchSolution, BalanceError> {
    birch_point_from(gamma, kappa, None, tol)
}

/// Same as [`birch_point`] but starting the Newton iteration from `mu0`
/// (projected onto the span). The minimizer is unique, so any start reaches
/// the same answer; this entry point exists to let callers verify that.
pub fn birch_point_from(
    gamma: &Mat,
    kappa: &[f64],
    mu0: Option<&[f64]>,
    tol: &Tolerances,
) -> Result<BirchSolution, BalanceError> {
    let n = gamma.rows();
    let m = gamma.cols();
    if kappa.len() != m || m == 0 {
        return Err(BalanceError::BadInput);
    }

    // Minimizers exist iff 0 lies in the relative interior of the hull of
    // the columns: certified by strict feasibility of the barycentric
    // program before any iteration is attempted.
    let mut a = Mat::zeros(n + 1, m);
    let mut b = vec![0.0; n + 1];
    for j in 0..m {
        let col = gamma.column(j);
        for i in 0..n {
            a[(i, j)] = col[i];
        }
        a[(n, j)] = 1.0;
    }
    b[n] = 1.0;
    let lp = LpProblem { a, b, nonneg: vec![true; m], maximize: None };
    let strict: Vec<usize> = (0..m).collect();
    if numlin::strict_interior_point(&lp, &strict, tol).is_none() {
        return Err(BalanceError::NotInterior);
    }

    // Reduce to the span: mu = B nu with B an orthonormal basis.
    let basis = numlin::column_space_basis(gamma, tol);
    let s = basis.cols();
    let mut nu = vec![0.0; s];
    if let Some(mu0) = mu0 {
        if mu0.len() != n {
            return Err(BalanceError::BadInput);
        }
        for (r, item) in nu.iter_mut().enumerate() {
            *item = numlin::dot(&basis.column(r), mu0);
        }
    }

    let expand = |nu: &[f64]| -> Vec<f64> {
        let mut mu = vec![0.0; n];
        for r in 0..s {
            let col = basis.column(r);
            for i in 0..n {
                mu[i] += nu[r] * col[i];
            }
        }
        mu
    };

    let mut converged = false;
    for _ in 0..MAX_NEWTON_STEPS {
        let mu = expand(&nu);
        let eval = birch_potential(gamma, kappa, &mu);
        // The gradient lies in the span automatically: each term is a
        // multiple of a column of gamma.
        if numlin::norm2(&eval.gradient) < tol.birch_gradient_rel * eval.value {
            converged = true;
            break;
        }
        let mut gred = vec![0.0; s];
        let mut hred = Mat::zeros(s, s);
        for r in 0..s {
            gred[r] = numlin::dot(&basis.column(r), &eval.gradient);
            let hcol = eval.hessian.matvec(&basis.column(r));
            for q in 0..s {
                hred[(q, r)] = numlin::dot(&basis.column(q), &hcol);
            }
        }
        let neg: Vec<f64> = gred.iter().map(|v| -v).collect();
        let direction = match numlin::solve_spd(&hred, &neg) {
            Some(d) => d,
            // Ill-conditioned Hessian: fall back to steepest descent.
            None => neg.clone(),
        };
        // Armijo backtracking, beta = 0.5, c = 1e-4. The required decrease
        // is relaxed by one rounding unit of phi: near the minimizer the
        // true decrease of a full Newton step falls below machine noise,
        // and rejecting it there would stall the iteration above the
        // gradient target.
        let slope = numlin::dot(&gred, &direction);
        let noise = 2.0 * f64::EPSILON * eval.value.abs();
        let mut alpha = 1.0;
        let mut stepped = false;
        for _ in 0..80 {
            let trial: Vec<f64> =
                nu.iter().zip(&direction).map(|(v, d)| v + alpha * d).collect();
            let trial_value = birch_potential(gamma, kappa, &expand(&trial)).value;
            if trial_value.is_finite()
                && trial_value <= eval.value + 1e-4 * alpha * slope + noise
            {
                nu = trial;
                stepped = true;
                break;
            }
            alpha *= 0.5;
        }
        if !stepped {
            return Err(BalanceError::NoConvergence(MAX_NEWTON_STEPS));
        }
    }
    if !converged {
        let mu = expand(&nu);
        let eval = birch_potential(gamma, kappa, &mu);
        if numlin::norm2(&eval.gradient) >= tol.birch_gradient_rel * eval.value {
            return Err(BalanceError::NoConvergence(MAX_NEWTON_STEPS));
        }
    }

    let mu = expand(&nu);
    let kappa_prime: Vec<f64> = (0..m)
        .map(|j| kappa[j] * numlin::dot(&gamma.column(j), &mu).exp())
        .collect();
    let residual = numlin::norm_inf(&gamma.matvec(&kappa_prime));
    let steady_state = mu.iter().map(|v| (-v).exp()).collect();
    Ok(BirchSolution { kappa_prime, mu, steady_state, residual })
}

/// Unique intersection point of the affine set `x0 + S` with the exponential
/// family `{xstar o exp(c) : c in S_perp}`, where `S` is spanned by the
/// columns of `s_basis`. Found by minimizing the strictly convex
/// `h(c) = sum_i xstar_i exp(c_i) - <x0, c>` over `S_perp`.
pub fn birch_intersection(
    x0: &[f64],
    xstar: &[f64],
    s_basis: &Mat,
    tol: &Tolerances,
) -> Result<Vec<f64>, BalanceError> {
    let n = x0.len();
    if xstar.len() != n || s_basis.rows() != n {
        return Err(BalanceError::BadInput);
    }
    if x0.iter().any(|&v| !(v > 0.0)) || xstar.iter().any(|&v| !(v > 0.0)) {
        return Err(BalanceError::BadInput);
    }
    let sperp = numlin::kernel_basis(&s_basis.transpose(), tol);
    let p = sperp.cols();
    if p == 0 {
        // S is all of R^n: the intersection is xstar itself.
        return Ok(xstar.to_vec());
    }
    let mut u = vec![0.0; p];
    let point = |u: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        for r in 0..p {
            let col = sperp.column(r);
            for i in 0..n {
                c[i] += u[r] * col[i];
            }
        }
        (0..n).map(|i| xstar[i] * c[i].exp()).collect()
    };
    let scale = numlin::norm_inf(x0).max(numlin::norm_inf(xstar));
    for _ in 0..MAX_NEWTON_STEPS {
        let x = point(&u);
        let diff = numlin::sub(&x, x0);
        let mut grad = vec![0.0; p];
        for r in 0..p {
            grad[r] = numlin::dot(&sperp.column(r), &diff);
        }
        if numlin::norm2(&grad) < 1e-13 * scale {
            return Ok(x);
        }
        let mut hess = Mat::zeros(p, p);
        for r in 0..p {
            let cr = sperp.column(r);
            for q in 0..p {
                let cq = sperp.column(q);
                let mut s = 0.0;
                for i in 0..n {
                    s += cr[i] * cq[i] * x[i];
                }
                hess[(r, q)] = s;
            }
        }
        let neg: Vec<f64> = grad.iter().map(|v| -v).collect();
        let direction = numlin::solve_spd(&hess, &neg).unwrap_or(neg);
        let value = |u: &[f64]| -> f64 {
            let x = point(u);
            let mut h = x.iter().sum::<f64>();
            for r in 0..p {
                h -= u[r] * numlin::dot(&sperp.column(r), x0);
            }
            h
        };
        let base = value(&u);
        let slope = numlin::dot(&grad, &direction);
        let noise = 2.0 * f64::EPSILON * base.abs();
        let mut alpha = 1.0;
        let mut stepped = false;
        for _ in 0..80 {
            let trial: Vec<f64> = u.iter().zip(&direction).map(|(v, d)| v + alpha * d).collect();
            let tv = value(&trial);
            if tv.is_finite() && tv <= base + 1e-4 * alpha * slope + noise {
                u = trial;
                stepped = true;
                break;
            }
            alpha *= 0.5;
        }
        if !stepped {
            return Err(BalanceError::NoConvergence(MAX_NEWTON_STEPS));
        }
    }
    Err(BalanceError::NoConvergence(MAX_NEWTON_STEPS))
}

/// A reversible single-component system dynamically equivalent to the
/// single-target input, together with the state at which it is detailed
/// balanced.
#[derive(Debug, Clone)]
pub struct DBRealization {
    pub system: MassActionSystem,
    pub steady_state: Vec<f64>,
    /// Largest per-vertex mismatch between the input and output net vector
    /// fields. Only the target vertex can contribute: the original edges
    /// keep their rates.
    pub equivalence_residual: f64,
}

/// Double every edge of a single-target system with an interior target: the
/// original edges keep their rate constants and each reverse edge gets the
/// rate from the potential minimizer, making the result detailed balanced at
/// `exp(-mu)` and dynamically equivalent to the input.
pub fn db_realize_single_target(
    sys: &MassActionSystem,
    tol: &Tolerances,
) -> Result<DBRealization, BalanceError> {
    let net = sys.network();
    let report = crate::model::classify_structure(net, tol);
    let Some(target) = report.target_id else {
        return Err(BalanceError::NotSingleTarget);
    };

    let solution = birch_point(&net.stoichiometric_matrix(), sys.rates(), tol)?;

    let mut edges = net.edges().to_vec();
    let mut rates = sys.rates().to_vec();
    for e in net.edges() {
        edges.push(crate::model::Edge { source: target, target: e.source });
    }
    rates.extend_from_slice(&solution.kappa_prime);
    let network = EmbeddedNetwork::new(net.dimension(), net.vertices().to_vec(), edges)
        .expect("reversing a single-target network preserves validity");
    let system = MassActionSystem::new(network, rates).expect("positive rates");

    Ok(DBRealization {
        system,
        steady_state: solution.steady_state,
        equivalence_residual: solution.residual,
    })
}

/// Residual of one reversible pair at a state.
#[derive(Debug, Clone, PartialEq)]
pub struct PairResidual {
    /// Forward orientation: the lexicographically smaller (source, target).
    pub forward: (VertexId, VertexId),
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    pub balanced: bool,
    pub max_residual: f64,
}

/// Detailed-balance check at `x`: for every reversible pair the forward and
/// reverse fluxes must agree within the relative tolerance.
pub fn check_detailed_balance(
    sys: &MassActionSystem,
    x: &[f64],
    tol: &Tolerances,
) -> Result<(BalanceReport, Vec<PairResidual>), BalanceError> {
    let net = sys.network();
    if !net.is_reversible() {
        return Err(BalanceError::NotReversible);
    }
    let mut residuals = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (i, e) in net.edges().iter().enumerate() {
        if (e.source.0, e.target.0) > (e.target.0, e.source.0) {
            continue; // handled from the forward side
        }
        let rev = net.edge_index(e.target, e.source).expect("reversible");
        let fwd_flux =
            sys.rate(i) * crate::dynamics::monomial(x, net.vertex(e.source).coords());
        let rev_flux =
            sys.rate(rev) * crate::dynamics::monomial(x, net.vertex(e.target).coords());
        let denom = fwd_flux.max(rev_flux).max(1e-300);
        let residual = (fwd_flux - rev_flux).abs() / denom;
        max_residual = max_residual.max(residual);
        residuals.push(PairResidual { forward: (e.source, e.target), residual });
    }
    let balanced = max_residual < tol.balance_residual;
    Ok((BalanceReport { balanced, max_residual }, residuals))
}

/// Complex-balance check at `x`: at every vertex the total inflow must match
/// the total outflow within the relative tolerance.
pub fn check_complex_balance(
    sys: &MassActionSystem,
    x: &[f64],
    tol: &Tolerances,
) -> (BalanceReport, Vec<(VertexId, f64)>) {
    let net = sys.network();
    let mut inflow = vec![0.0; net.vertices().len()];
    let mut outflow = vec![0.0; net.vertices().len()];
    for (i, e) in net.edges().iter().enumerate() {
        let flux = sys.rate(i) * crate::dynamics::monomial(x, net.vertex(e.source).coords());
        outflow[e.source.0] += flux;
        inflow[e.target.0] += flux;
    }
    let mut residuals = Vec::new();
    let mut max_residual: f64 = 0.0;
    for id in net.active_ids() {
        let i = id.0;
        let denom = inflow[i].max(outflow[i]);
        let residual =
            if denom > 0.0 { (inflow[i] - outflow[i]).abs() / denom } else { 0.0 };
        max_residual = max_residual.max(residual);
        residuals.push((id, residual));
    }
    let balanced = max_residual < tol.balance_residual;
    (BalanceReport { balanced, max_residual }, residuals)
}

/// Outcome of the kernel-based rate-constant condition for a reversible
/// system to admit a detailed-balanced state.
#[derive(Debug, Clone)]
pub enum WegscheiderOutcome {
    Pass,
    /// First kernel vector of the forward stoichiometric matrix violating
    /// the product condition, with the violation in log scale.
    Fail { kernel_vector: Vec<f64>, log_violation: f64 },
}

/// Reversible pairs in forward orientation (lexicographically smaller
/// (source, target) first), with edge indices (forward, reverse).
fn reversible_pairs(net: &EmbeddedNetwork) -> Result<Vec<(usize, usize)>, BalanceError> {
    if !net.is_reversible() {
        return Err(BalanceError::NotReversible);
    }
    let mut pairs = Vec::new();
    for (i, e) in net.edges().iter().enumerate() {
        if (e.source.0, e.target.0) < (e.target.0, e.source.0) {
            let rev = net.edge_index(e.target, e.source).expect("reversible");
            pairs.push((i, rev));
        }
    }
    Ok(pairs)
}

/// Check the product condition `prod (k_i+)^{J_i} = prod (k_i-)^{J_i}` for
/// every kernel vector `J` of the forward stoichiometric matrix, evaluated
/// in log scale to avoid overflow.
pub fn wegscheider_check(
    sys: &MassActionSystem,
    tol: &Tolerances,
) -> Result<WegscheiderOutcome, BalanceError> {
    let net = sys.network();
    let pairs = reversible_pairs(net)?;
    let p = pairs.len();
    let mut gamma_fwd = Mat::zeros(net.dimension(), p);
    let mut log_ratio = vec![0.0; p];
    for (col, &(fwd, rev)) in pairs.iter().enumerate() {
        let v = net.reaction_vector(fwd);
        for i in 0..net.dimension() {
            gamma_fwd[(i, col)] = v[i];
        }
        log_ratio[col] = sys.rate(fwd).ln() - sys.rate(rev).ln();
    }
    let kernel = numlin::kernel_basis(&gamma_fwd, tol);
    for j in 0..kernel.cols() {
        let vec = kernel.column(j);
        let violation = numlin::dot(&vec, &log_ratio);
        if violation.abs() >= tol.balance_residual {
            return Ok(WegscheiderOutcome::Fail {
                kernel_vector: vec,
                log_violation: violation,
            });
        }
    }
    Ok(WegscheiderOutcome::Pass)
}

/// Compare the product of rate constants along a cycle with the product in
/// the reverse direction, in log scale.
pub fn circuit_check(
    sys: &MassActionSystem,
    cycle: &[VertexId],
    tol: &Tolerances,
) -> Result<bool, BalanceError> {
    let net = sys.network();
    if cycle.len() < 2 {
        return Err(BalanceError::BadInput);
    }
    let mut log_forward = 0.0;
    let mut log_reverse = 0.0;
    for w in 0..cycle.len() {
        let a = cycle[w];
        let b = cycle[(w + 1) % cycle.len()];
        let fwd = net.edge_index(a, b).ok_or(BalanceError::MissingEdge(a, b))?;
        let rev = net.edge_index(b, a).ok_or(BalanceError::MissingEdge(b, a))?;
        log_forward += sys.rate(fwd).ln();
        log_reverse += sys.rate(rev).ln();
    }
    Ok((log_forward - log_reverse).abs() < tol.balance_residual)
}
