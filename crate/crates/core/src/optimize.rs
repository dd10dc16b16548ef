//! Derivative-free and projected-gradient minimisers used by the numerical
//! oracles. Both are multi-start with a seeded ChaCha stream, so results are
//! reproducible for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the simplex spread in `f` falls below this.
    pub f_tol: f64,
    /// and the simplex diameter falls below this.
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 40_000,
            f_tol: 1e-15,
            x_tol: 1e-10,
            initial_step: 0.5,
        }
    }
}

/// Adaptive Nelder–Mead (dimension-dependent coefficients), restarted from the
/// best vertex until a restart no longer improves the value.
pub fn nelder_mead<F>(f: &F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0);
    let mut step = opts.initial_step;

    loop {
        let mut simplex: Vec<Vec<f64>> = vec![best_x.clone()];
        for i in 0..n {
            let mut v = best_x.clone();
            v[i] += if v[i].abs() > 1e-12 { step * v[i].abs().max(1e-3) } else { step };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

        while evals.get() < opts.max_evals {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[n] - values[0];
            let diameter = simplex[1..]
                .iter()
                .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= opts.f_tol * values[0].abs().max(1.0) && diameter <= opts.x_tol {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / nf)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(alpha);
            let fr = eval(&xr);
            if fr < values[0] {
                let xe = along(beta);
                let fe = eval(&xe);
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
            } else if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
            } else {
                let (xc, fc) = if fr < values[n] {
                    let xc = along(gamma);
                    let fc = eval(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-gamma);
                    let fc = eval(&xc);
                    (xc, fc)
                };
                if fc < values[n].min(fr) {
                    simplex[n] = xc;
                    values[n] = fc;
                } else {
                    for i in 1..=n {
                        let shrunk: Vec<f64> = simplex[i]
                            .iter()
                            .zip(&simplex[0])
                            .map(|(x, b)| b + delta * (x - b))
                            .collect();
                        values[i] = eval(&shrunk);
                        simplex[i] = shrunk;
                    }
                }
            }
        }

        let (i_min, f_min) = values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let improved = f_min < best_f - opts.f_tol * best_f.abs().max(1.0);
        if f_min <= best_f {
            best_f = f_min;
            best_x = simplex[i_min].clone();
        }
        if !improved || evals.get() >= opts.max_evals {
            break;
        }
        step = (step * 0.5).max(1e-4);
    }

    Minimum {
        x: best_x,
        value: best_f,
        evaluations: evals.get(),
    }
}

/// Runs [`nelder_mead`] from `starts` uniformly drawn points in the box
/// `[lo, hi]^n` and returns every local result, best first.
pub fn multistart_nelder_mead<F>(
    f: &F,
    n: usize,
    bounds: (f64, f64),
    starts: usize,
    seed: u64,
    opts: &NelderMeadOptions,
) -> Vec<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results: Vec<Minimum> = (0..starts)
        .map(|_| {
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(bounds.0..bounds.1)).collect();
            nelder_mead(f, &x0, opts)
        })
        .collect();
    results.sort_by(|a, b| a.value.total_cmp(&b.value));
    results
}

#[derive(Debug, Clone, Copy)]
pub struct GradientOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
}

impl Default for GradientOptions {
    fn default() -> Self {
        Self {
            max_iters: 200_000,
            grad_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GradientResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Norm of the projected gradient step at exit.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Projected gradient descent with Barzilai–Borwein steps and an Armijo
/// backtracking safeguard. `project` maps any point back onto the feasible set.
pub fn projected_gradient<F, G, P>(
    f: &F,
    grad: &G,
    project: &P,
    x0: &[f64],
    opts: &GradientOptions,
) -> GradientResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&mut [f64]),
{
    let mut x = x0.to_vec();
    project(&mut x);
    let mut fx = f(&x);
    let mut gx = grad(&x);
    let mut step = 0.1;
    let mut pg_norm = f64::INFINITY;

    for it in 0..opts.max_iters {
        // projected-gradient stationarity measure with unit step
        let mut probe: Vec<f64> = x.iter().zip(&gx).map(|(xi, gi)| xi - gi).collect();
        project(&mut probe);
        pg_norm = norm(&probe.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
        if pg_norm <= opts.grad_tol {
            return GradientResult {
                x,
                value: fx,
                grad_norm: pg_norm,
                iterations: it,
                converged: true,
            };
        }

        let mut t = step;
        let (x_new, f_new) = loop {
            let mut cand: Vec<f64> = x.iter().zip(&gx).map(|(xi, gi)| xi - t * gi).collect();
            project(&mut cand);
            let fc = f(&cand);
            let decrease: f64 = gx.iter().zip(cand.iter().zip(&x)).map(|(g, (c, xo))| g * (xo - c)).sum();
            // below the rounding of f the Armijo test is noise: take the BB step
            let resolvable = decrease > 8.0 * f64::EPSILON * fx.abs().max(1.0);
            if !resolvable || fc <= fx - 1e-4 * decrease || t < 1e-16 {
                break (cand, fc);
            }
            t *= 0.5;
        };

        let g_new = grad(&x_new);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|a| a * a).sum();
        step = if sy > 0.0 { (ss / sy).clamp(1e-10, 1e3) } else { (2.0 * t).min(1.0) };

        if ss == 0.0 && f_new >= fx {
            break;
        }
        x = x_new;
        fx = f_new;
        gx = g_new;
    }

    GradientResult {
        x,
        value: fx,
        grad_norm: pg_norm,
        iterations: opts.max_iters,
        converged: pg_norm <= opts.grad_tol,
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn nelder_mead_finds_rosenbrock_minimum() {
        let m = nelder_mead(&rosenbrock, &[-1.2, 1.0], &NelderMeadOptions::default());
        assert!(m.value < 1e-14, "{}", m.value);
        assert!((m.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn multistart_is_deterministic() {
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2) + x[1] * x[1];
        let a = multistart_nelder_mead(&f, 2, (-2.0, 2.0), 4, 7, &NelderMeadOptions::default());
        let b = multistart_nelder_mead(&f, 2, (-2.0, 2.0), 4, 7, &NelderMeadOptions::default());
        assert_eq!(a[0].x, b[0].x);
        assert!(a[0].value < 1e-14);
    }

    #[test]
    fn projected_gradient_respects_box() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 0.5).powi(2);
        let g = |x: &[f64]| vec![2.0 * (x[0] - 3.0), 2.0 * (x[1] + 0.5)];
        let proj = |x: &mut [f64]| x.iter_mut().for_each(|v| *v = v.clamp(-1.0, 1.0));
        let r = projected_gradient(&f, &g, &proj, &[0.0, 0.0], &GradientOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-12);
        assert!((r.x[1] + 0.5).abs() < 1e-12);
    }
}
