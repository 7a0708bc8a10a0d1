//! SMO for the soft-margin SVM dual
//!
//! ```text
//! min  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j K_ij
//! ```
//!
//! Each step picks the maximal violating pair with second-order working set
//! selection and solves the two-variable subproblem in closed form. The loop
//! stops once the largest KKT violation `m(a) - M(a)` drops below `tol`.

const TAU: f64 = 1e-12;

/// Solver output, indexed like the training data.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// Intercept `b` of `f(x) = sum_i alpha_i y_i K(x_i, x) + b`.
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl DualSolution {
    /// Dual objective `sum a - 1/2 a'Qa` (the maximisation form).
    pub fn objective(&self, gram: &[f64], y: &[f64]) -> f64 {
        dual_objective(&self.alpha, gram, y)
    }
}

pub fn dual_objective(alpha: &[f64], gram: &[f64], y: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[i * n + j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Solves the dual over a precomputed row-major Gram matrix.
///
/// `order` is the scan order used during working set selection; ties between
/// equally violating indices go to the one scanned last.
pub fn solve(gram: &[f64], y: &[f64], c: f64, tol: f64, max_iter: usize, order: &[usize]) -> DualSolution {
    let n = y.len();
    debug_assert_eq!(gram.len(), n * n);
    debug_assert_eq!(order.len(), n);

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let diag: Vec<f64> = (0..n).map(|i| gram[i * n + i]).collect();
    let q = |i: usize, j: usize| y[i] * y[j] * gram[i * n + j];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let Some((i, j)) = select_working_set(gram, y, &alpha, &grad, &diag, c, tol, order) else {
            converged = true;
            break;
        };
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q(i, j);
        if y[i] != y[j] {
            let quad = positive_or_tau(diag[i] + diag[j] + 2.0 * qij);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = positive_or_tau(diag[i] + diag[j] - 2.0 * qij);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (k, g) in grad.iter_mut().enumerate() {
            *g += q(i, k) * di + q(j, k) * dj;
        }
    }

    let bias = -rho(y, &alpha, &grad, c);
    DualSolution {
        alpha,
        bias,
        iterations,
        converged,
    }
}

fn positive_or_tau(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        TAU
    }
}

fn in_up(y: f64, a: f64, c: f64) -> bool {
    if y > 0.0 {
        a < c
    } else {
        a > 0.0
    }
}

fn in_low(y: f64, a: f64, c: f64) -> bool {
    if y > 0.0 {
        a > 0.0
    } else {
        a < c
    }
}

#[allow(clippy::too_many_arguments)]
fn select_working_set(
    gram: &[f64],
    y: &[f64],
    alpha: &[f64],
    grad: &[f64],
    diag: &[f64],
    c: f64,
    tol: f64,
    order: &[usize],
) -> Option<(usize, usize)> {
    let n = y.len();
    let mut gmax = f64::NEG_INFINITY;
    let mut gmax_idx = None;
    for &t in order {
        if in_up(y[t], alpha[t], c) && -y[t] * grad[t] >= gmax {
            gmax = -y[t] * grad[t];
            gmax_idx = Some(t);
        }
    }
    let i = gmax_idx?;

    let mut gmax2 = f64::NEG_INFINITY;
    let mut best = None;
    let mut best_obj = f64::INFINITY;
    for &t in order {
        if !in_low(y[t], alpha[t], c) {
            continue;
        }
        let yg = y[t] * grad[t];
        if yg >= gmax2 {
            gmax2 = yg;
        }
        let grad_diff = gmax + yg;
        if grad_diff > 0.0 {
            let quad = diag[i] + diag[t] - 2.0 * gram[i * n + t];
            let obj = -(grad_diff * grad_diff) / positive_or_tau(quad);
            if obj <= best_obj {
                best_obj = obj;
                best = Some(t);
            }
        }
    }
    if gmax + gmax2 < tol {
        return None;
    }
    best.map(|j| (i, j))
}

/// Offset with the convention `f(x) = sum - rho`: the mean of `y_i G_i`
/// over free variables, or the midpoint of the feasible interval when
/// every variable sits at a bound.
fn rho(y: &[f64], alpha: &[f64], grad: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (upper + lower) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pair() {
        // x = -1 (y = -1), x = +1 (y = +1), linear kernel
        let gram = [1.0, -1.0, -1.0, 1.0];
        let y = [-1.0, 1.0];
        let sol = solve(&gram, &y, 1e7, 1e-3, 1000, &[0, 1]);
        assert!(sol.converged);
        assert!((sol.alpha[0] - 0.5).abs() < 1e-12);
        assert!((sol.alpha[1] - 0.5).abs() < 1e-12);
        assert!(sol.bias.abs() < 1e-12);
        assert!((sol.objective(&gram, &y) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn box_constraint_binds() {
        // coincident points with opposite labels can only be pushed to C
        let gram = [1.0, 1.0, 1.0, 1.0];
        let y = [1.0, -1.0];
        let sol = solve(&gram, &y, 2.0, 1e-3, 1000, &[0, 1]);
        assert_eq!(sol.alpha, vec![2.0, 2.0]);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let gram = [1.0, -1.0, -1.0, 1.0];
        let sol = solve(&gram, &[-1.0, 1.0], 1e7, 1e-3, 0, &[0, 1]);
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 0);
    }
}
