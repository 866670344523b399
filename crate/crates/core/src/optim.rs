//! Deterministic Nelder-Mead simplex descent on real parameter vectors.
//!
//! Used for every optimization in this crate: gradients of eigen-derived
//! objectives are unreliable near spectral degeneracies, so the searches
//! are derivative-free. No randomness lives here — restarts and their
//! seeding are the caller's business.

/// Standard coefficients: reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2.
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const BETA: f64 = 0.5;
const SIGMA: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evals: usize,
}

/// Nelder-Mead with periodic simplex resets: the simplex is prone to
/// collapsing along a subspace and stalling far from the optimum in
/// 10+ dimensions, so the search is re-launched from its own best point
/// with a fresh, smaller simplex a few times. The iteration budget is
/// split evenly across rounds.
pub fn nelder_mead_rounds<F>(
    mut f: F,
    x0: &[f64],
    step: f64,
    rounds: usize,
    max_iters: usize,
    f_tol: f64,
) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let rounds = rounds.max(1);
    let per_round = max_iters.div_ceil(rounds);
    let mut current = x0.to_vec();
    let mut out = nelder_mead(&mut f, &current, step, per_round, f_tol);
    let mut evals = out.evals;
    for r in 1..rounds {
        current = out.point.clone();
        let shrunk = step * 0.25_f64.powi(r as i32);
        let next = nelder_mead(&mut f, &current, shrunk, per_round, f_tol);
        evals += next.evals;
        if next.value <= out.value {
            out = next;
        }
    }
    out.evals = evals;
    out
}

/// Minimize `f` starting from `x0`, with the initial simplex spanned by
/// `x0 + step * e_i`. Stops when the simplex value spread drops below
/// `f_tol` (converged) or after `max_iters` iterations.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iters: usize,
    f_tol: f64,
) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    if n == 0 {
        let value = eval(x0, &mut evals);
        return SimplexOutcome {
            point: x0.to_vec(),
            value,
            converged: true,
            evals,
        };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let mut converged = false;
    for _ in 0..max_iters {
        // stable sort keeps insertion order on ties -> deterministic
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("no NaN after clamp"));
        let spread = simplex[n].1 - simplex[0].1;
        if spread <= f_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in simplex.iter().take(n) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let at = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = at(ALPHA);
        let vr = eval(&xr, &mut evals);
        if vr < simplex[0].1 {
            let xe = at(ALPHA * GAMMA);
            let ve = eval(&xe, &mut evals);
            simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
        } else if vr < simplex[n - 1].1 {
            simplex[n] = (xr, vr);
        } else {
            let (xc, vc) = if vr < worst.1 {
                let x = at(ALPHA * BETA);
                let v = eval(&x, &mut evals);
                (x, v)
            } else {
                let x = at(-BETA);
                let v = eval(&x, &mut evals);
                (x, v)
            };
            if vc < worst.1.min(vr) {
                simplex[n] = (xc, vc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (xi, bi) in entry.0.iter_mut().zip(&best) {
                        *xi = bi + SIGMA * (*xi - bi);
                    }
                    entry.1 = eval(&entry.0.clone(), &mut evals);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("no NaN after clamp"));
    let (point, value) = simplex.swap_remove(0);
    SimplexOutcome {
        point,
        value,
        converged,
        evals,
    }
}
