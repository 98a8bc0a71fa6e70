//! Gradient-free local minimizer (Nelder–Mead) for the restricted-likelihood
//! search. Deterministic: ties are broken by vertex index and the whole path
//! depends only on the inputs.

pub(crate) struct NmResult {
    pub x: Vec<f64>,
    pub f: f64,
}

/// Minimize `f` starting from `x0` with an axis-aligned initial simplex of
/// per-dimension steps `init_step`. Stops after `max_evals` objective
/// evaluations or when both the function spread drops below
/// `tol * max(1, |f_best|)` and the simplex diameter below
/// `√tol * max(1, |x|)` — the diameter check prevents a premature stop when
/// the simplex straddles a symmetric minimum with near-equal values.
/// Non-finite objective values are treated as +inf.
pub(crate) fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    init_step: &[f64],
    max_evals: usize,
    tol: f64,
) -> NmResult
where
    F: FnMut(&[f64]) -> f64,
{
    let d = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus one perturbed vertex per axis.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for j in 0..d {
        let mut v = x0.to_vec();
        v[j] += init_step[j];
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    while evals < max_evals {
        // Order vertices best..worst (stable: ties keep index order).
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        let reorder_s: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let reorder_f: Vec<f64> = idx.iter().map(|&i| fv[i]).collect();
        simplex = reorder_s;
        fv = reorder_f;

        let spread = fv[d] - fv[0];
        let mut diameter = 0.0f64;
        let mut xscale = 1.0f64;
        for v in simplex.iter().skip(1) {
            for j in 0..d {
                diameter = diameter.max((v[j] - simplex[0][j]).abs());
                xscale = xscale.max(v[j].abs());
            }
        }
        if spread.is_finite()
            && spread <= tol * fv[0].abs().max(1.0)
            && diameter <= tol.sqrt() * xscale
        {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; d];
        for v in simplex.iter().take(d) {
            for j in 0..d {
                centroid[j] += v[j];
            }
        }
        for c in centroid.iter_mut() {
            *c /= d as f64;
        }

        let worst = simplex[d].clone();
        let mut reflected = vec![0.0; d];
        for j in 0..d {
            reflected[j] = centroid[j] + alpha * (centroid[j] - worst[j]);
        }
        let fr = eval(&reflected, &mut evals);

        if fr < fv[0] {
            // Try expanding.
            let mut expanded = vec![0.0; d];
            for j in 0..d {
                expanded[j] = centroid[j] + gamma * (reflected[j] - centroid[j]);
            }
            let fe = eval(&expanded, &mut evals);
            if fe < fr {
                simplex[d] = expanded;
                fv[d] = fe;
            } else {
                simplex[d] = reflected;
                fv[d] = fr;
            }
        } else if fr < fv[d - 1] {
            simplex[d] = reflected;
            fv[d] = fr;
        } else {
            // Contract towards the better of worst/reflected.
            let (towards, f_towards) = if fr < fv[d] {
                (&reflected, fr)
            } else {
                (&worst, fv[d])
            };
            let mut contracted = vec![0.0; d];
            for j in 0..d {
                contracted[j] = centroid[j] + rho * (towards[j] - centroid[j]);
            }
            let fc = eval(&contracted, &mut evals);
            if fc < f_towards {
                simplex[d] = contracted;
                fv[d] = fc;
            } else {
                // Shrink everything towards the best vertex.
                for i in 1..=d {
                    let best = simplex[0].clone();
                    for j in 0..d {
                        simplex[i][j] = best[j] + sigma * (simplex[i][j] - best[j]);
                    }
                    fv[i] = eval(&simplex[i].clone(), &mut evals);
                    if evals >= max_evals {
                        break;
                    }
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=d {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    NmResult {
        x: simplex[best].clone(),
        f: fv[best],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 1.5).powi(2) + 2.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            400,
            1e-12,
        );
        assert!((r.x[0] - 1.5).abs() < 1e-4, "x0 = {}", r.x[0]);
        assert!((r.x[1] + 0.5).abs() < 1e-4, "x1 = {}", r.x[1]);
        assert!(r.f < 1e-7);
    }

    #[test]
    fn survives_infinite_regions() {
        // Objective undefined (inf) left of x = 0; minimum at x = 2.
        let r = nelder_mead(
            |x| {
                if x[0] <= 0.0 {
                    f64::INFINITY
                } else {
                    (x[0] - 2.0).powi(2)
                }
            },
            &[0.5],
            &[0.4],
            200,
            1e-12,
        );
        assert!((r.x[0] - 2.0).abs() < 1e-3);
    }

    #[test]
    fn deterministic() {
        let run = || {
            nelder_mead(
                |x| x[0].powi(4) + (x[1] - 1.0).powi(2) + 0.3 * (x[0] * x[1]).sin(),
                &[1.0, -1.0],
                &[0.7, 0.7],
                300,
                1e-10,
            )
        };
        let a = run();
        let b = run();
        assert_eq!(a.x, b.x);
        assert_eq!(a.f, b.f);
    }
}
