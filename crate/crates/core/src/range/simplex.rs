//! Nelder-Mead simplex minimization with dimension-adaptive coefficients.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions {
    /// Stop once the spread of function values over the simplex drops below this.
    pub f_tol: f64,
    /// ...and every vertex lies within this distance (max-norm) of the best one.
    pub x_tol: f64,
    pub max_iter: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-8,
            x_tol: 1e-6,
            max_iter: 5000,
            initial_step: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimizes `f` from `x0`. Coefficients follow the adaptive scheme
/// (reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n), shrink 1 - 1/n),
/// which keeps the method effective in a few dozen dimensions.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &SimplexOptions) -> Minimum {
    let n = x0.len();
    if n == 0 {
        return Minimum {
            x: Vec::new(),
            value: f(x0),
            iterations: 0,
            converged: true,
        };
    }
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut order: Vec<usize> = (0..=n).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let f_spread = values[worst] - values[best];
        let x_spread = simplex
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= opts.f_tol && x_spread <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x / nf;
            }
        }

        let reflected = axpy(&centroid, -alpha, &simplex[worst]);
        let f_r = f(&reflected);
        if f_r < values[best] {
            let expanded = axpy(&centroid, -alpha * beta, &simplex[worst]);
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }
        let (candidate, f_c) = if f_r < values[worst] {
            let outside = axpy(&centroid, -alpha * gamma, &simplex[worst]);
            let f_o = f(&outside);
            (outside, f_o)
        } else {
            let inside = axpy(&centroid, gamma, &simplex[worst]);
            let f_i = f(&inside);
            (inside, f_i)
        };
        if f_c < values[worst].min(f_r) {
            simplex[worst] = candidate;
            values[worst] = f_c;
            continue;
        }
        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            simplex[idx] = axpy(&anchor, delta, &simplex[idx]);
            values[idx] = f(&simplex[idx]);
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty simplex");
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

/// Runs [`nelder_mead`] and restarts it from its own optimum until the
/// value stops improving, which repairs collapsed simplices.
pub fn nelder_mead_polished(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &SimplexOptions,
    polishes: usize,
) -> Minimum {
    let mut result = nelder_mead(&mut f, x0, opts);
    for _ in 0..polishes {
        let step = SimplexOptions {
            initial_step: opts.initial_step * 0.1,
            ..*opts
        };
        let next = nelder_mead(&mut f, &result.x, &step);
        let improved = next.value < result.value - opts.f_tol;
        let iterations = result.iterations + next.iterations;
        if next.value <= result.value {
            result = Minimum { iterations, ..next };
        } else {
            result.iterations = iterations;
        }
        if !improved {
            break;
        }
    }
    result
}
