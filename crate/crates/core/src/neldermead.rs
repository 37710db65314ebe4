//! Nelder-Mead simplex minimization inside a box.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadSettings {
    /// Edge length of the initial simplex.
    pub edge: f64,
    /// Stop once every vertex is within this distance of the best one.
    pub diameter_tol: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        Self {
            edge: 0.05,
            diameter_tol: 1e-9,
            max_evaluations: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Minimizes `f` over the box `[lower, upper]`. Trial points are clamped to
/// the box, so `f` is never evaluated outside it.
pub fn minimize<F>(f: F, start: &[f64], lower: &[f64], upper: &[f64], settings: &NelderMeadSettings) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let clamp = |p: &mut Vec<f64>| {
        for ((v, lo), hi) in p.iter_mut().zip(lower).zip(upper) {
            *v = v.clamp(*lo, *hi);
        }
    };
    let evaluations = std::cell::Cell::new(0usize);
    let eval = |p: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        f(p)
    };

    let mut first = start.to_vec();
    clamp(&mut first);
    let mut simplex = vec![first.clone()];
    for i in 0..dim {
        let mut p = first.clone();
        // step away from the nearer wall so the simplex is not flattened
        if p[i] + settings.edge <= upper[i] {
            p[i] += settings.edge;
        } else {
            p[i] -= settings.edge;
        }
        clamp(&mut p);
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter <= settings.diameter_tol || evaluations.get() >= settings.max_evaluations {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|p| p[k]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (c - w))
                .collect();
            clamp(&mut p);
            p
        };

        let reflected = along(alpha);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = along(gamma);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[dim] {
            let c = along(rho);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = along(-rho);
            let fc = eval(&c);
            (c, fc)
        };
        if fc < values[dim].min(fr) {
            simplex[dim] = contracted;
            values[dim] = fc;
            continue;
        }
        for i in 1..=dim {
            let shrunk: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, p)| b + sigma * (p - b))
                .collect();
            values[i] = eval(&shrunk);
            simplex[i] = shrunk;
        }
    }
    Minimum {
        point: simplex[0].clone(),
        value: values[0],
        evaluations: evaluations.get(),
    }
}
