//! Derivative-free maximization over a two-parameter box: a uniform grid
//! followed by Nelder–Mead refinement from the best grid point.

use crate::reach::gates::ParamRange;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Grid intervals per axis; closed axes get `grid + 1` points.
    pub grid: usize,
    /// Nelder–Mead iterations (0 disables refinement).
    pub iterations: usize,
    /// Initial simplex edge as a fraction of each axis width.
    pub simplex_fraction: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid: 64,
            iterations: 200,
            simplex_fraction: 1.0 / 64.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult<T> {
    pub params: (T, T),
    pub value: T,
    /// Best value seen on the grid alone.
    pub grid_value: T,
}

/// Maximizes `f` over the box. Deterministic: ties on the grid resolve to
/// the first point in row-major order, and refinement only replaces the grid
/// optimum on strict improvement.
pub fn maximize<T: Real, F: Fn(T, T) -> T>(f: F, ranges: [ParamRange<T>; 2], cfg: &SearchConfig) -> SearchResult<T> {
    let xs = ranges[0].grid(cfg.grid);
    let ys = ranges[1].grid(cfg.grid);
    let mut best = (xs[0], ys[0]);
    let mut best_val = T::neg_infinity();
    for &x in &xs {
        for &y in &ys {
            let v = f(x, y);
            if v > best_val {
                best_val = v;
                best = (x, y);
            }
        }
    }
    let grid_value = best_val;
    if cfg.iterations > 0 {
        let (p, v) = nelder_mead(&f, ranges, best, cfg);
        if v > best_val {
            best = p;
            best_val = v;
        }
    }
    SearchResult {
        params: best,
        value: best_val,
        grid_value,
    }
}

fn nelder_mead<T: Real, F: Fn(T, T) -> T>(
    f: &F,
    ranges: [ParamRange<T>; 2],
    start: (T, T),
    cfg: &SearchConfig,
) -> ((T, T), T) {
    let clamp = |p: [T; 2]| [ranges[0].clamp(p[0]), ranges[1].clamp(p[1])];
    // minimize the negated objective
    let cost = |p: [T; 2]| -f(p[0], p[1]);
    let frac = T::lit(cfg.simplex_fraction);

    let x0 = [start.0, start.1];
    let mut simplex: Vec<([T; 2], T)> = vec![(x0, cost(x0))];
    for axis in 0..2 {
        let h = ranges[axis].width() * frac;
        let mut p = x0;
        p[axis] = p[axis] + h;
        if ranges[axis].clamp(p[axis]) == x0[axis] {
            p[axis] = x0[axis] - h;
        }
        let p = clamp(p);
        simplex.push((p, cost(p)));
    }

    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    let lerp = |a: [T; 2], b: [T; 2], t: T| clamp([a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]);

    for _ in 0..cfg.iterations {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[2].1 - simplex[0].1;
        let size = simplex
            .iter()
            .skip(1)
            .map(|(p, _)| (p[0] - simplex[0].0[0]).abs().max((p[1] - simplex[0].0[1]).abs()))
            .fold(T::zero(), T::max);
        if spread <= T::epsilon() && size <= T::epsilon() {
            break;
        }
        let centroid = [
            (simplex[0].0[0] + simplex[1].0[0]) * T::lit(0.5),
            (simplex[0].0[1] + simplex[1].0[1]) * T::lit(0.5),
        ];
        let worst = simplex[2];
        let reflected = lerp(centroid, worst.0, -alpha);
        let fr = cost(reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(centroid, worst.0, -gamma);
            let fe = cost(expanded);
            simplex[2] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < worst.1 {
                let p = lerp(centroid, reflected, rho);
                (p, cost(p))
            } else {
                let p = lerp(centroid, worst.0, rho);
                (p, cost(p))
            };
            if fc < worst.1.min(fr) {
                simplex[2] = (contracted, fc);
            } else {
                let b = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let p = lerp(b, v.0, sigma);
                    *v = (p, cost(p));
                }
            }
        }
    }
    let (p, c) = simplex
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("non-empty simplex");
    ((p[0], p[1]), -c)
}
