//! Mass-action vector field evaluation, trajectory integration with an
//! embedded Runge-Kutta 4(5) pair, Lyapunov function evaluation, and
//! classification of limit behaviour.

use thiserror::Error;

use crate::model::MassActionSystem;
use crate::numlin::{self, Mat, Tolerances};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("state has a non-positive coordinate")]
    NonPositiveState,
    #[error("state dimension {found} does not match system dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// How a finite-horizon integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConvergedInterior,
    ApproachedBoundary,
    Diverged,
    Inconclusive,
}

/// Sampled solution of the mass-action ODE together with its classification.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub verdict: Verdict,
    /// Final state when the integration converged in the interior.
    pub limit: Option<Vec<f64>>,
    /// Coordinates that hit the boundary threshold, when applicable.
    pub exit_face: Vec<usize>,
    /// Largest observed drift of the conserved components.
    pub conservation_drift: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// CSV export: a `time` column followed by one column per coordinate.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, |s| s.len());
        let mut out = String::from("time");
        for i in 0..n {
            out.push_str(&format!(",x{}", i + 1));
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{:.16e}", t));
            for v in s {
                out.push_str(&format!(",{:.16e}", v));
            }
            out.push('\n');
        }
        out
    }
}

/// Monomial x^y with strictly positive base vector.
pub fn monomial(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(&xi, &yi)| xi.powf(yi)).product()
}

/// Right-hand side of the associated differential equation at `x`.
pub fn rhs(sys: &MassActionSystem, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    check_state(sys, x)?;
    Ok(rhs_unchecked(sys, x))
}

fn check_state(sys: &MassActionSystem, x: &[f64]) -> Result<(), DynamicsError> {
    if x.len() != sys.dimension() {
        return Err(DynamicsError::DimensionMismatch {
            expected: sys.dimension(),
            found: x.len(),
        });
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(DynamicsError::NonPositiveState);
    }
    Ok(())
}

fn rhs_unchecked(sys: &MassActionSystem, x: &[f64]) -> Vec<f64> {
    let net = sys.network();
    let mut out = vec![0.0; net.dimension()];
    for (i, e) in net.edges().iter().enumerate() {
        let y = net.vertex(e.source).coords();
        let flux = sys.rate(i) * monomial(x, y);
        let yp = net.vertex(e.target).coords();
        for ((o, &s), &t) in out.iter_mut().zip(y).zip(yp) {
            *o += flux * (t - s);
        }
    }
    out
}

/// Jacobian of the right-hand side at `x > 0`.
pub fn rhs_jacobian(sys: &MassActionSystem, x: &[f64]) -> Result<Mat, DynamicsError> {
    check_state(sys, x)?;
    let net = sys.network();
    let n = net.dimension();
    let mut jac = Mat::zeros(n, n);
    for (i, e) in net.edges().iter().enumerate() {
        let y = net.vertex(e.source).coords();
        let flux = sys.rate(i) * monomial(x, y);
        let gamma = net.reaction_vector(i);
        for r in 0..n {
            for c in 0..n {
                jac[(r, c)] += flux * gamma[r] * y[c] / x[c];
            }
        }
    }
    Ok(jac)
}

/// Total gross flux sum_i k_i x^{y_i} |gamma_i|: the natural magnitude scale
/// against which a residual at `x` is judged.
pub fn gross_flux_scale(sys: &MassActionSystem, x: &[f64]) -> f64 {
    let net = sys.network();
    let mut scale = 0.0;
    for (i, e) in net.edges().iter().enumerate() {
        let y = net.vertex(e.source).coords();
        scale += sys.rate(i) * monomial(x, y) * numlin::norm2(&net.reaction_vector(i));
    }
    scale
}

/// True when `x` is a steady state at the configured relative tolerance.
pub fn is_steady_state(sys: &MassActionSystem, x: &[f64], tol: &Tolerances) -> bool {
    steady_state_residual(sys, x)
        .map(|r| r <= tol.steady_state_rel)
        .unwrap_or(false)
}

/// Residual of the steady-state condition, relative to the gross flux scale.
pub fn steady_state_residual(sys: &MassActionSystem, x: &[f64]) -> Result<f64, DynamicsError> {
    let f = rhs(sys, x)?;
    Ok(numlin::norm_inf(&f) / gross_flux_scale(sys, x).max(1e-300))
}

/// Damped Newton for a steady state inside the stoichiometric compatibility
/// class of `x0`: the iteration moves only along the stoichiometric subspace
/// and backtracks to stay in the positive orthant. Returns a state whose
/// residual is below the steady-state tolerance, or `None` on stall.
pub fn steady_state_newton(
    sys: &MassActionSystem,
    x0: &[f64],
    tol: &Tolerances,
) -> Option<Vec<f64>> {
    check_state(sys, x0).ok()?;
    let gamma = sys.stoichiometric_matrix();
    let basis = numlin::column_space_basis(&gamma, tol);
    let s = basis.cols();
    if s == 0 {
        return None;
    }
    let mut x = x0.to_vec();
    let n = x.len();
    for _ in 0..100 {
        let f = rhs_unchecked(sys, &x);
        if numlin::norm_inf(&f) < tol.steady_state_rel * gross_flux_scale(sys, &x) {
            return Some(x);
        }
        // Reduced system g(z) = B^T f(x + B z), Jacobian B^T J B.
        let jac = rhs_jacobian(sys, &x).ok()?;
        let mut jred = Mat::zeros(s, s);
        let mut gred = vec![0.0; s];
        for a in 0..s {
            let ba = basis.column(a);
            gred[a] = numlin::dot(&ba, &f);
            let jba = jac.matvec(&ba);
            // J B gives column a of J*B; project rows onto the basis.
            for r in 0..s {
                jred[(r, a)] = numlin::dot(&basis.column(r), &jba);
            }
        }
        // Solve J_red dz = -g by Gaussian elimination with partial pivoting.
        let dz = solve_dense(&jred, &gred.iter().map(|v| -v).collect::<Vec<_>>())?;
        let mut step = vec![0.0; n];
        for a in 0..s {
            let ba = basis.column(a);
            for i in 0..n {
                step[i] += dz[a] * ba[i];
            }
        }
        let g0 = numlin::norm2(&f);
        let mut alpha = 1.0;
        let mut advanced = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + alpha * si).collect();
            if trial.iter().all(|&v| v > 0.0) {
                let ft = rhs_unchecked(sys, &trial);
                if numlin::norm2(&ft) <= (1.0 - 1e-4 * alpha) * g0 {
                    x = trial;
                    advanced = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !advanced {
            return None;
        }
    }
    None
}

/// Gaussian elimination with partial pivoting for small dense systems.
fn solve_dense(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return None;
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pr, pv) = (col..n)
            .map(|i| (i, m[(i, col)].abs()))
            .fold((col, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pv < 1e-300 {
            return None;
        }
        if pr != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(pr, j)];
                m[(pr, j)] = t;
            }
            rhs.swap(col, pr);
        }
        for i in col + 1..n {
            let f = m[(i, col)] / m[(col, col)];
            if f != 0.0 {
                for j in col..n {
                    m[(i, j)] -= f * m[(col, j)];
                }
                rhs[i] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Options for [`integrate`].
#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub max_steps: usize,
    /// Initial step size; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    /// Record at most this many points (thinned uniformly); all points are
    /// kept when `None`.
    pub max_samples: Option<usize>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { max_steps: 200_000, initial_step: None, max_samples: None }
    }
}

// Dormand-Prince 4(5) coefficients.
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate the mass-action system from `x0 > 0` up to `horizon`, stopping
/// early when the state reaches the boundary of the positive orthant, leaves
/// a large ball, or settles at an interior steady state. The positive orthant
/// is never clamped: reaching it is reported, not hidden.
pub fn integrate(
    sys: &MassActionSystem,
    x0: &[f64],
    horizon: f64,
    opts: &IntegrateOptions,
    tol: &Tolerances,
) -> Result<Trajectory, DynamicsError> {
    check_state(sys, x0)?;
    let n = x0.len();

    // Conserved components: orthonormal basis of the left null space of the
    // stoichiometric matrix.
    let gamma = sys.stoichiometric_matrix();
    let sperp = numlin::kernel_basis(&gamma.transpose(), tol);

    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut times = vec![t];
    let mut states = vec![x.clone()];
    let mut drift: f64 = 0.0;
    let mut exit_face = Vec::new();

    let eval = |x: &[f64]| -> Option<Vec<f64>> {
        if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return None;
        }
        Some(rhs_unchecked(sys, x))
    };

    let mut verdict = Verdict::Inconclusive;
    let mut limit = None;

    let classify = |x: &[f64], exit_face: &mut Vec<usize>| -> Option<Verdict> {
        let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < tol.boundary_min {
            *exit_face = (0..x.len()).filter(|&i| x[i] < tol.boundary_min).collect();
            return Some(Verdict::ApproachedBoundary);
        }
        if numlin::norm_inf(x) > tol.divergence_norm {
            return Some(Verdict::Diverged);
        }
        let f = rhs_unchecked(sys, x);
        if numlin::norm_inf(&f) < tol.steady_state_rel * gross_flux_scale(sys, x) {
            return Some(Verdict::ConvergedInterior);
        }
        None
    };

    // Terminal conditions may already hold at the initial point.
    if let Some(v) = classify(&x, &mut exit_face) {
        if v == Verdict::ConvergedInterior {
            limit = Some(x.clone());
        }
        return Ok(Trajectory {
            times,
            states,
            verdict: v,
            limit,
            exit_face,
            conservation_drift: 0.0,
        });
    }

    let f0 = rhs_unchecked(sys, &x);
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let scale = numlin::norm2(&f0).max(1e-12);
        (0.01 * numlin::norm2(&x).max(1.0) / scale).min(horizon / 10.0).max(1e-12)
    });

    let mut k = vec![vec![0.0; n]; 7];
    for _ in 0..opts.max_steps {
        if t >= horizon {
            break;
        }
        h = h.min(horizon - t);
        if h < 1e-14 * t.max(1.0) {
            // Step size underflow: a field that blows up in finite time
            // starves the clock before the norm threshold is reachable.
            // Follow the same orbit in arc-length parametrization, where
            // the escape is a finite march, and certify divergence only by
            // actually crossing the norm threshold.
            let outward = numlin::dot(&x, &rhs_unchecked(sys, &x)) > 0.0;
            verdict = if outward && orbit_escapes(sys, &x, tol.divergence_norm) {
                Verdict::Diverged
            } else {
                Verdict::Inconclusive
            };
            break;
        }

        // Seven stages of the embedded pair; the field is autonomous, so
        // stage times are not needed.
        let mut stage_failed = false;
        match eval(&x) {
            Some(f) => k[0] = f,
            None => stage_failed = true,
        }
        if !stage_failed {
            for s in 1..7 {
                let mut xs = x.clone();
                for j in 0..s {
                    let a = DP_A[s][j];
                    if a != 0.0 {
                        for i in 0..n {
                            xs[i] += h * a * k[j][i];
                        }
                    }
                }
                match eval(&xs) {
                    Some(f) => k[s] = f,
                    None => {
                        stage_failed = true;
                        break;
                    }
                }
            }
        }
        if stage_failed {
            h *= 0.5;
            continue;
        }

        let mut x5 = x.clone();
        let mut x4 = x.clone();
        for s in 0..7 {
            for i in 0..n {
                x5[i] += h * DP_B5[s] * k[s][i];
                x4[i] += h * DP_B4[s] * k[s][i];
            }
        }
        // Mixed absolute/relative error norm.
        let mut err: f64 = 0.0;
        for i in 0..n {
            let sc = tol.ode_atol + tol.ode_rtol * x[i].abs().max(x5[i].abs());
            err += ((x5[i] - x4[i]) / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if err <= 1.0 && x5.iter().all(|&v| v.is_finite()) {
            t += h;
            x = x5;
            times.push(t);
            states.push(x.clone());
            let diff = numlin::sub(&x, x0);
            for j in 0..sperp.cols() {
                drift = drift.max(numlin::dot(&sperp.column(j), &diff).abs());
            }
            if let Some(v) = classify(&x, &mut exit_face) {
                verdict = v;
                if v == Verdict::ConvergedInterior {
                    limit = Some(x.clone());
                }
                break;
            }
            // Near an equilibrium the local-error controller hovers at the
            // integration tolerance and cannot push the residual to the much
            // tighter steady-state level. Once the residual is small, refine
            // by Newton within the current compatibility class and accept
            // the refined point if it stayed nearby.
            let f = rhs_unchecked(sys, &x);
            if numlin::norm_inf(&f) < 1e-6 * gross_flux_scale(sys, &x) {
                if let Some(polished) = steady_state_newton(sys, &x, tol) {
                    let dist = numlin::norm_inf(&numlin::sub(&polished, &x));
                    if dist <= 1e-3 * (1.0 + numlin::norm_inf(&x)) {
                        // The refinement supersedes the hovering sample at
                        // the same time, keeping the times strictly
                        // increasing.
                        *states.last_mut().unwrap() = polished.clone();
                        limit = Some(polished);
                        verdict = Verdict::ConvergedInterior;
                        break;
                    }
                }
            }
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }

    if let Some(cap) = opts.max_samples {
        if times.len() > cap && cap >= 2 {
            let stride = (times.len() as f64 / cap as f64).ceil() as usize;
            let last = times.len() - 1;
            let keep: Vec<usize> =
                (0..last).step_by(stride).chain(std::iter::once(last)).collect();
            times = keep.iter().map(|&i| times[i]).collect();
            states = keep.iter().map(|&i| states[i].clone()).collect();
        }
    }

    Ok(Trajectory { times, states, verdict, limit, exit_face, conservation_drift: drift })
}

/// Trace the orbit through `start` at unit speed (classic fourth-order
/// steps on the normalized field) and report whether it leaves the ball of
/// the given radius. Time is not tracked: this certifies the curve's escape
/// when the physical clock cannot advance any further.
fn orbit_escapes(sys: &MassActionSystem, start: &[f64], radius: f64) -> bool {
    let unit = |x: &[f64]| -> Option<Vec<f64>> {
        if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return None;
        }
        let f = rhs_unchecked(sys, x);
        let n = numlin::norm2(&f);
        if !n.is_finite() || n <= 0.0 {
            return None;
        }
        Some(f.iter().map(|v| v / n).collect())
    };
    let mut x = start.to_vec();
    for _ in 0..20_000 {
        let h = 0.02 * (1.0 + numlin::norm2(&x));
        let Some(k1) = unit(&x) else { return false };
        let s2: Vec<f64> = x.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
        let Some(k2) = unit(&s2) else { return false };
        let s3: Vec<f64> = x.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
        let Some(k3) = unit(&s3) else { return false };
        let s4: Vec<f64> = x.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
        let Some(k4) = unit(&s4) else { return false };
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return false;
        }
        if numlin::norm_inf(&x) > radius {
            return true;
        }
    }
    false
}

/// The globally defined Lyapunov function sum_i x_i (ln x_i - ln x*_i - 1).
pub fn lyapunov_entropy(x: &[f64], xstar: &[f64]) -> Result<f64, DynamicsError> {
    if x.iter().any(|&v| !(v > 0.0)) || xstar.iter().any(|&v| !(v > 0.0)) {
        return Err(DynamicsError::NonPositiveState);
    }
    Ok(x.iter()
        .zip(xstar)
        .map(|(&xi, &si)| xi * (xi.ln() - si.ln() - 1.0))
        .sum())
}

/// The linear Lyapunov function <x, w>.
pub fn lyapunov_linear(x: &[f64], w: &[f64]) -> f64 {
    numlin::dot(x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Edge, EmbeddedNetwork, MassActionSystem, Vertex, VertexId};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn v(coords: &[f64]) -> Vertex {
        Vertex::new(coords.to_vec())
    }

    fn e(s: usize, t: usize) -> Edge {
        Edge { source: VertexId(s), target: VertexId(t) }
    }

    fn triangle_system(rates: Vec<f64>) -> MassActionSystem {
        let net = EmbeddedNetwork::new(
            2,
            vec![v(&[0.0, 2.0]), v(&[1.0, 1.0]), v(&[2.0, 0.0])],
            vec![e(0, 1), e(1, 0), e(1, 2), e(2, 1), e(0, 2), e(2, 0)],
        )
        .unwrap();
        MassActionSystem::new(net, rates).unwrap()
    }

    #[test]
    fn triangle_rhs_cancels_at_ones() {
        let sys = triangle_system(vec![1.0; 6]);
        let f = rhs(&sys, &[1.0, 1.0]).unwrap();
        assert!(numlin::norm_inf(&f) < 1e-12);
    }

    #[test]
    fn decay_edge_rhs() {
        let net =
            EmbeddedNetwork::new(2, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])], vec![e(0, 1)]).unwrap();
        let sys = MassActionSystem::new(net, vec![1.0]).unwrap();
        let f = rhs(&sys, &[2.0, 5.0]).unwrap();
        assert_eq!(f, vec![-2.0, 2.0]);
    }

    #[test]
    fn rhs_rejects_nonpositive_state() {
        let sys = triangle_system(vec![1.0; 6]);
        assert_eq!(rhs(&sys, &[1.0, 0.0]).unwrap_err(), DynamicsError::NonPositiveState);
    }

    #[test]
    fn rhs_lies_in_stoichiometric_subspace() {
        let sys = triangle_system(vec![0.3, 1.7, 0.9, 2.2, 0.4, 1.1]);
        let f = rhs(&sys, &[0.7, 1.9]).unwrap();
        let gamma = sys.stoichiometric_matrix();
        let sperp = numlin::kernel_basis(&gamma.transpose(), &tol());
        for j in 0..sperp.cols() {
            let proj = numlin::dot(&sperp.column(j), &f);
            assert!(proj.abs() < 1e-12 * numlin::norm2(&f).max(1.0));
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let sys = triangle_system(vec![0.3, 1.7, 0.9, 2.2, 0.4, 1.1]);
        let x = [0.8, 1.3];
        let jac = rhs_jacobian(&sys, &x).unwrap();
        let f0 = rhs(&sys, &x).unwrap();
        let h = 1e-7;
        for c in 0..2 {
            let mut xp = x;
            xp[c] += h;
            let fp = rhs(&sys, &xp).unwrap();
            for r in 0..2 {
                let fd = (fp[r] - f0[r]) / h;
                assert!((jac[(r, c)] - fd).abs() < 1e-4 * fd.abs().max(1.0));
            }
        }
    }

    #[test]
    fn linear_decay_reaches_boundary() {
        let net =
            EmbeddedNetwork::new(2, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])], vec![e(0, 1)]).unwrap();
        let sys = MassActionSystem::new(net, vec![1.0]).unwrap();
        let traj = integrate(&sys, &[1.0, 1.0], 100.0, &IntegrateOptions::default(), &tol())
            .unwrap();
        assert_eq!(traj.verdict, Verdict::ApproachedBoundary);
        assert_eq!(traj.exit_face, vec![0]);
        // x1 + x2 is conserved.
        assert!(traj.conservation_drift < 1e-6);
    }

    #[test]
    fn outward_target_diverges() {
        let net = EmbeddedNetwork::new(
            2,
            vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[3.0, 3.0])],
            vec![e(0, 3), e(1, 3), e(2, 3)],
        )
        .unwrap();
        let sys = MassActionSystem::new(net, vec![1.0, 1.0, 1.0]).unwrap();
        let traj = integrate(&sys, &[1.0, 1.0], 1e6, &IntegrateOptions::default(), &tol())
            .unwrap();
        assert_eq!(traj.verdict, Verdict::Diverged);
        // <w, x> with w = -(1,1) is nonincreasing along the trajectory.
        let w = [-1.0, -1.0];
        let mut prev = f64::INFINITY;
        for s in &traj.states {
            let val = lyapunov_linear(s, &w);
            assert!(val <= prev + 1e-9);
            prev = val;
        }
    }

    #[test]
    fn reversible_pair_converges_interior() {
        let net =
            EmbeddedNetwork::new(1, vec![v(&[0.0]), v(&[1.0])], vec![e(0, 1), e(1, 0)]).unwrap();
        let sys = MassActionSystem::new(net, vec![2.0, 1.0]).unwrap();
        let traj = integrate(&sys, &[5.0], 1e4, &IntegrateOptions::default(), &tol()).unwrap();
        assert_eq!(traj.verdict, Verdict::ConvergedInterior);
        // Fixed point of 0 <-> A with rates (2,1): 2 = 1*x.
        let limit = traj.limit.unwrap();
        assert!((limit[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn trajectory_times_strictly_increasing() {
        let net =
            EmbeddedNetwork::new(1, vec![v(&[0.0]), v(&[1.0])], vec![e(0, 1), e(1, 0)]).unwrap();
        let sys = MassActionSystem::new(net, vec![2.0, 1.0]).unwrap();
        let traj = integrate(&sys, &[5.0], 1e4, &IntegrateOptions::default(), &tol()).unwrap();
        assert_eq!(traj.verdict, Verdict::ConvergedInterior);
        for w in traj.times.windows(2) {
            assert!(w[0] < w[1], "times {} and {}", w[0], w[1]);
        }
        assert_eq!(traj.times.len(), traj.states.len());
    }

    #[test]
    fn entropy_at_fixed_point() {
        assert_eq!(lyapunov_entropy(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), -2.0);
        let e = std::f64::consts::E;
        let val = lyapunov_entropy(&[e, 1.0], &[1.0, 1.0]).unwrap();
        assert!((val - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn linear_lyapunov_values() {
        assert_eq!(lyapunov_linear(&[2.0, 3.0], &[1.0, 1.0]), 5.0);
        assert_eq!(lyapunov_linear(&[2.0, 3.0], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn entropy_minimized_at_fixed_point() {
        let xstar = [0.7, 1.9];
        let base = lyapunov_entropy(&xstar, &xstar).unwrap();
        for dx in [-0.3, -0.1, 0.1, 0.4] {
            let val = lyapunov_entropy(&[0.7 + dx, 1.9 - dx], &xstar).unwrap();
            assert!(val >= base);
        }
    }

    #[test]
    fn csv_export_shape() {
        let net =
            EmbeddedNetwork::new(1, vec![v(&[0.0]), v(&[1.0])], vec![e(0, 1), e(1, 0)]).unwrap();
        let sys = MassActionSystem::new(net, vec![2.0, 1.0]).unwrap();
        let traj = integrate(&sys, &[5.0], 1.0, &IntegrateOptions::default(), &tol()).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("time,x1"));
        assert_eq!(csv.lines().count(), traj.times.len() + 1);
    }
}
