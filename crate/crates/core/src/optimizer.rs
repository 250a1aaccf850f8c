//! Dense BFGS with Armijo backtracking over the 8M-real weight
//! parameterization. Dimension is 24 at M = 3, so a full inverse-Hessian
//! approximation is cheaper and simpler than L-BFGS.

use alloc::vec;
use alloc::vec::Vec;

use crate::beamformer::{gradient, mwf_closed_form, total_cost, BinProblem, FilterPair};

/// Anything the solver can minimize.
pub trait Objective {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitPolicy {
    /// Start at the closed-form MWF solution (the alpha = 0 optimum).
    ClosedFormWarmStart,
    /// Start at the reference-selector passthrough filters.
    Selectors,
    Zeros,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Gradient tolerance, scaled by (1 + |cost|).
    pub grad_tol: f64,
    pub max_iters: usize,
    pub armijo_c1: f64,
    pub backtrack_ratio: f64,
    pub max_backtracks: usize,
    pub init_policy: InitPolicy,
    /// Also try selector and zero inits and keep the best local minimum.
    pub multi_start: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            grad_tol: 1e-8,
            max_iters: 500,
            armijo_c1: 1e-4,
            backtrack_ratio: 0.5,
            max_backtracks: 40,
            init_policy: InitPolicy::ClosedFormWarmStart,
            multi_start: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub filters: FilterPair,
    pub cost: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Cost after each accepted step, starting at the initial point.
    pub cost_trace: Vec<f64>,
}

/// Gradient norm below this (scaled by 1 + |J|) counts as converged when
/// the cost itself has hit the f64 progress floor; near a minimum the
/// achievable gradient is limited to ~sqrt(eps) times the curvature scale.
const NUMERICAL_GRAD_FLOOR: f64 = 1e-6;

fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

struct BfgsOutcome {
    x: Vec<f64>,
    cost: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
    cost_trace: Vec<f64>,
}

/// BFGS iteration on a generic objective. Returns the best accepted point.
fn bfgs<O: Objective>(objective: &O, x0: Vec<f64>, config: &SolveConfig) -> BfgsOutcome {
    let n = x0.len();
    let mut x = x0;
    let mut f = objective.value(&x);
    let mut g = objective.gradient(&x);
    let mut h = identity(n);
    let mut cost_trace = vec![f];
    let mut iterations = 0;
    let mut converged = norm2(&g) <= config.grad_tol * (1.0 + f.abs());

    let mut fresh_hessian = true;
    let mut stalled_steps = 0usize;
    while !converged && iterations < config.max_iters {
        iterations += 1;
        let mut d = neg_matvec(&h, &g);
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            // Not a descent direction: reset to steepest descent.
            h = identity(n);
            fresh_hessian = true;
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        if slope == 0.0 {
            converged = true;
            break;
        }

        // Armijo backtracking from unit step.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=config.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(d.iter()).map(|(xi, di)| xi + step * di).collect();
            let f_trial = objective.value(&trial);
            if f_trial <= f + config.armijo_c1 * step * slope {
                accepted = Some((trial, f_trial));
                break;
            }
            step *= config.backtrack_ratio;
        }
        let Some((x_new, f_new)) = accepted else {
            if !fresh_hessian {
                // Stale quasi-Newton model; retry from steepest descent.
                h = identity(n);
                fresh_hessian = true;
                continue;
            }
            // Even steepest descent cannot improve: numerically stationary.
            let grad_norm = norm2(&g);
            let converged = grad_norm <= NUMERICAL_GRAD_FLOOR * (1.0 + f.abs());
            return BfgsOutcome { x, cost: f, grad_norm, iterations, converged, cost_trace };
        };

        let g_new = objective.gradient(&x_new);
        let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm2(&s) * norm2(&y) {
            bfgs_update(&mut h, &s, &y, sy);
            fresh_hessian = false;
        }
        // else: curvature condition violated; skip the update, keep H.

        let progress = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;
        cost_trace.push(f);
        converged = norm2(&g) <= config.grad_tol * (1.0 + f.abs());

        if progress <= f64::EPSILON * (1.0 + f.abs()) {
            stalled_steps += 1;
            if stalled_steps >= 3 {
                // The cost can no longer improve in f64; accept the point if
                // the gradient is at the numerical floor.
                converged = converged
                    || norm2(&g) <= NUMERICAL_GRAD_FLOOR * (1.0 + f.abs());
                break;
            }
        } else {
            stalled_steps = 0;
        }
    }

    BfgsOutcome { x, cost: f, grad_norm: norm2(&g), iterations, converged, cost_trace }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn neg_matvec(h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    (0..n)
        .map(|i| -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>())
        .collect()
}

/// Inverse-Hessian BFGS update:
/// H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T, rho = 1/(s^T y).
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum())
        .collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                + rho * rho * yhy * s[i] * s[j]
                + rho * s[i] * s[j];
        }
    }
}

/// Minimize an arbitrary objective from a given start (exposed for test
/// functions such as Rosenbrock).
pub fn minimize<O: Objective>(
    objective: &O,
    x0: Vec<f64>,
    config: &SolveConfig,
) -> (Vec<f64>, f64, usize, bool) {
    let out = bfgs(objective, x0, config);
    (out.x, out.cost, out.iterations, out.converged)
}

struct BinObjective<'a> {
    problem: &'a BinProblem,
}

impl Objective for BinObjective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        total_cost(&FilterPair::from_reals(x), self.problem)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        gradient(&FilterPair::from_reals(x), self.problem)
    }
}

fn initial_filters(problem: &BinProblem, policy: InitPolicy) -> FilterPair {
    let n = problem.num_channels();
    match policy {
        InitPolicy::Zeros => FilterPair::zeros(n),
        InitPolicy::Selectors => problem.selectors.filters(),
        InitPolicy::ClosedFormWarmStart => {
            let left = mwf_closed_form(problem.speech_psd_left, &problem.rtf_left, &problem.phi_u);
            let right =
                mwf_closed_form(problem.speech_psd_right, &problem.rtf_right, &problem.phi_u);
            match (left, right) {
                (Ok(left), Ok(right)) => FilterPair { left, right },
                // Singular Phi_u even after loading: fall back to passthrough.
                _ => problem.selectors.filters(),
            }
        }
    }
}

/// Quasi-Newton solve of one bin's cost function.
pub fn solve_bin(problem: &BinProblem, config: &SolveConfig) -> SolveReport {
    let objective = BinObjective { problem };
    let starts: Vec<InitPolicy> = if config.multi_start {
        vec![InitPolicy::ClosedFormWarmStart, InitPolicy::Selectors, InitPolicy::Zeros]
    } else {
        vec![config.init_policy]
    };
    let mut best: Option<BfgsOutcome> = None;
    for policy in starts {
        let x0 = initial_filters(problem, policy).to_reals();
        let out = bfgs(&objective, x0, config);
        let better = match &best {
            None => true,
            Some(b) => out.cost < b.cost,
        };
        if better {
            best = Some(out);
        }
    }
    let out = best.expect("at least one start");
    SolveReport {
        filters: FilterPair::from_reals(&out.x),
        cost: out.cost,
        grad_norm: out.grad_norm,
        iterations: out.iterations,
        converged: out.converged,
        cost_trace: out.cost_trace,
    }
}

/// Solve every active bin; inactive bins (None) get selector passthrough
/// filters and no report.
pub fn solve_all_bins(
    problems: &[Option<BinProblem>],
    num_channels: usize,
    config: &SolveConfig,
) -> (Vec<FilterPair>, Vec<Option<SolveReport>>) {
    let passthrough = crate::beamformer::SelectorPair::new(num_channels).filters();
    let mut filters = Vec::with_capacity(problems.len());
    let mut reports = Vec::with_capacity(problems.len());
    for problem in problems {
        match problem {
            None => {
                filters.push(passthrough.clone());
                reports.push(None);
            }
            Some(p) => {
                let report = solve_bin(p, config);
                filters.push(report.filters.clone());
                reports.push(Some(report));
            }
        }
    }
    (filters, reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{CMat, Complex64};
    use crate::beamformer::Variant;
    use alloc::vec;

    struct Rosenbrock;

    impl Objective for Rosenbrock {
        fn value(&self, x: &[f64]) -> f64 {
            let (a, b) = (x[0], x[1]);
            (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            let (a, b) = (x[0], x[1]);
            vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ]
        }
    }

    #[test]
    fn rosenbrock_converges() {
        let config = SolveConfig { max_iters: 2000, ..Default::default() };
        let (x, _, _, converged) = minimize(&Rosenbrock, vec![-1.2, 1.0], &config);
        assert!(converged);
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6);
    }

    fn toy_problem(alpha: f64, variant: Variant) -> BinProblem {
        let a = vec![Complex64::ONE; 2];
        let phi_x = CMat::scaled_outer(&a, 1.0);
        let phi_u = CMat::identity(2);
        let phi_y = phi_x.add(&phi_u);
        BinProblem::new(phi_x, phi_y, phi_u.clone(), phi_u, a.clone(), a, 1.0, 1.0, alpha, variant)
            .unwrap()
    }

    #[test]
    fn warm_start_converges_immediately() {
        let p = toy_problem(0.0, Variant::Mwf);
        let report = solve_bin(&p, &SolveConfig::default());
        assert!(report.converged);
        assert!(report.iterations <= 2);
        let expected = mwf_closed_form(1.0, &p.rtf_left, &p.phi_u).unwrap();
        for (got, want) in report.filters.left.iter().zip(expected.iter()) {
            assert!((got - want).norm() < 1e-6);
        }
    }

    #[test]
    fn zeros_init_reaches_closed_form() {
        let p = toy_problem(0.0, Variant::Mwf);
        let config = SolveConfig { init_policy: InitPolicy::Zeros, ..Default::default() };
        let report = solve_bin(&p, &config);
        assert!(report.converged);
        let expected = mwf_closed_form(1.0, &p.rtf_left, &p.phi_u).unwrap();
        let err: f64 = report
            .filters
            .left
            .iter()
            .zip(expected.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
        let err = libm::sqrt(err);
        let scale = libm::sqrt(expected.iter().map(|z| z.norm_sqr()).sum::<f64>());
        assert!(err <= 1e-4 * scale, "err = {err}");
    }

    #[test]
    fn cost_trace_non_increasing() {
        let p = toy_problem(10.0, Variant::IcV);
        let config = SolveConfig { init_policy: InitPolicy::Selectors, ..Default::default() };
        let report = solve_bin(&p, &config);
        for pair in report.cost_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
    }

    #[test]
    fn inactive_bins_get_selectors() {
        let problems: Vec<Option<BinProblem>> = vec![None, Some(toy_problem(0.0, Variant::Mwf))];
        let (filters, reports) = solve_all_bins(&problems, 2, &SolveConfig::default());
        assert_eq!(filters[0].left[0], Complex64::ONE);
        assert_eq!(filters[0].right[1], Complex64::ONE);
        assert!(reports[0].is_none());
        assert!(reports[1].is_some());
    }

    #[test]
    fn deterministic_repeat() {
        let p = toy_problem(5.0, Variant::IcU);
        let c = SolveConfig { init_policy: InitPolicy::Zeros, ..Default::default() };
        let a = solve_bin(&p, &c);
        let b = solve_bin(&p, &c);
        assert_eq!(a.filters, b.filters);
        assert_eq!(a.iterations, b.iterations);
    }
}
