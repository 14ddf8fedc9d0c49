//! Nelder–Mead downhill simplex for small, smooth, unconstrained objectives.

/// Result of a simplex minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `f` starting from `start` with initial edge lengths `step`.
///
/// Terminates when the spread of objective values across the simplex drops
/// below `ftol` (absolute) or after `max_iter` iterations.
pub fn nelder_mead<F>(mut f: F, start: &[f64], step: &[f64], ftol: f64, max_iter: usize) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    assert_eq!(dim, step.len(), "step must match dimension");

    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    vertices.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += step[i];
        vertices.push(v);
    }
    let mut values: Vec<f64> = vertices.iter().map(|v| f(v)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        vertices = order.iter().map(|&i| vertices[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if (values[dim] - values[0]).abs() <= ftol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for v in &vertices[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&vertices[dim])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-alpha);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-gamma);
            let fe = f(&expanded);
            if fe < fr {
                vertices[dim] = expanded;
                values[dim] = fe;
            } else {
                vertices[dim] = reflected;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            vertices[dim] = reflected;
            values[dim] = fr;
            continue;
        }

        let (contracted, fc) = if fr < values[dim] {
            let c = along(-rho);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(rho);
            let fc = f(&c);
            (c, fc)
        };
        if fc < values[dim].min(fr) {
            vertices[dim] = contracted;
            values[dim] = fc;
            continue;
        }

        // Shrink toward the best vertex.
        let best = vertices[0].clone();
        for i in 1..=dim {
            for (x, b) in vertices[i].iter_mut().zip(&best) {
                *x = b + sigma * (*x - b);
            }
            values[i] = f(&vertices[i]);
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    SimplexResult {
        point: vertices[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead(
            |p| (p[0] - 1.0).powi(2) + 3.0 * (p[1] + 2.0).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            1e-20,
            2000,
        );
        assert!(r.converged);
        assert!((r.point[0] - 1.0).abs() < 1e-8);
        assert!((r.point[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            &[-1.2, 1.0],
            &[0.1, 0.1],
            1e-24,
            10_000,
        );
        assert!((r.point[0] - 1.0).abs() < 1e-6, "{r:?}");
        assert!((r.point[1] - 1.0).abs() < 1e-6, "{r:?}");
    }
}
