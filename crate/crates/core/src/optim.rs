//! Unconstrained minimizers: Nelder–Mead with restarts and L-BFGS.

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct OptimResult<T> {
    pub x: Vec<T>,
    pub f: T,
    pub evals: usize,
    pub converged: bool,
    /// Best value after each iteration.
    pub trace: Vec<T>,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadConfig {
    pub max_evals: usize,
    pub restarts: usize,
    pub initial_step: f64,
    /// Stop when the simplex value spread falls below this.
    pub f_tol: f64,
    pub x_tol: f64,
    /// Stop as soon as the best value reaches this.
    pub target: Option<f64>,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self { max_evals: 1000, restarts: 3, initial_step: 0.5, f_tol: 1e-14, x_tol: 1e-10, target: None }
    }
}

/// Nelder–Mead simplex search; each restart rebuilds the simplex around the
/// incumbent with a halved step while budget remains.
pub fn nelder_mead<T: Real>(f: impl Fn(&[T]) -> T, x0: &[T], cfg: &NelderMeadConfig) -> OptimResult<T> {
    let dim = x0.len();
    let mut evals = 0usize;
    let eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };
    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x, &mut evals);
    let mut trace = vec![best_f];
    let mut converged = false;
    if dim == 0 {
        return OptimResult { x: best_x, f: best_f, evals, converged: true, trace };
    }
    let hit = |v: T| cfg.target.is_some_and(|t| v.as_f64() <= t);
    let (alpha, gamma, rho, sigma) = (T::one(), T::of(2.0), T::of(0.5), T::of(0.5));
    let mut step = T::of(cfg.initial_step);
    for round in 0..=cfg.restarts {
        if evals >= cfg.max_evals || hit(best_f) {
            break;
        }
        let mut simplex: Vec<(Vec<T>, T)> = vec![(best_x.clone(), best_f)];
        for i in 0..dim {
            let mut x = best_x.clone();
            x[i] += step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        let start_f = best_f;
        loop {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let (lo, hi) = (simplex[0].1, simplex[dim].1);
            if lo < best_f {
                best_f = lo;
                best_x = simplex[0].0.clone();
            }
            trace.push(best_f);
            let spread_x = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (*a - *b).abs()))
                .fold(T::zero(), T::max);
            if (hi - lo).abs() <= T::of(cfg.f_tol) && spread_x <= T::of(cfg.x_tol) {
                converged = true;
                break;
            }
            if evals >= cfg.max_evals || hit(best_f) {
                break;
            }
            let mut centroid = vec![T::zero(); dim];
            for (x, _) in &simplex[..dim] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += *v;
                }
            }
            let inv = T::one() / T::of(dim as f64);
            centroid.iter_mut().for_each(|c| *c *= inv);
            let worst = simplex[dim].0.clone();
            let toward = |t: T| -> Vec<T> { centroid.iter().zip(&worst).map(|(c, w)| *c + t * (*c - *w)).collect() };
            let xr = toward(alpha);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = toward(gamma);
                let fe = eval(&xe, &mut evals);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
            } else {
                let (xc, fc) = if fr < hi {
                    let x = toward(rho);
                    let v = eval(&x, &mut evals);
                    (x, v)
                } else {
                    let x = toward(-rho);
                    let v = eval(&x, &mut evals);
                    (x, v)
                };
                if fc < hi.min(fr) {
                    simplex[dim] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for item in simplex.iter_mut().skip(1) {
                        let x: Vec<T> = x0.iter().zip(&item.0).map(|(a, b)| *a + sigma * (*b - *a)).collect();
                        let v = eval(&x, &mut evals);
                        *item = (x, v);
                    }
                }
            }
        }
        for (x, v) in &simplex {
            if *v < best_f {
                best_f = *v;
                best_x = x.clone();
            }
        }
        // A restart that found nothing new means the incumbent is a genuine minimum.
        if converged && best_f >= start_f && round > 0 {
            break;
        }
        converged = false;
        step = step * T::of(0.5);
    }
    let converged = converged || hit(best_f);
    OptimResult { x: best_x, f: best_f, evals, converged, trace }
}

#[derive(Debug, Clone, Copy)]
pub struct LbfgsConfig {
    pub max_iters: usize,
    pub memory: usize,
    /// Stop when `‖∇f‖∞` falls below this.
    pub g_tol: f64,
    /// Stop when the relative decrease over one iteration falls below this.
    pub f_tol: f64,
    pub target: Option<f64>,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        Self { max_iters: 2000, memory: 12, g_tol: 1e-9, f_tol: 1e-15, target: None }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// L-BFGS with a backtracking Armijo line search. `fg` returns value and gradient.
pub fn lbfgs<T: Real>(fg: impl Fn(&[T]) -> (T, Vec<T>), x0: &[T], cfg: &LbfgsConfig) -> OptimResult<T> {
    let mut x = x0.to_vec();
    let (mut fx, mut g) = fg(&x);
    let mut evals = 1;
    let mut trace = vec![fx];
    let mut hist: std::collections::VecDeque<(Vec<T>, Vec<T>, T)> = std::collections::VecDeque::new();
    let mut converged = false;
    let hit = |v: T| cfg.target.is_some_and(|t| v.as_f64() <= t);
    for _ in 0..cfg.max_iters {
        let gmax = g.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        if gmax <= T::of(cfg.g_tol) || hit(fx) {
            converged = true;
            break;
        }
        // Two-loop recursion.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = *rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * *yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        } else {
            let scale = T::one() / gmax.max(T::one());
            q.iter_mut().for_each(|v| *v *= scale);
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = *rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (*a - b) * *si);
        }
        let mut dir: Vec<T> = q.iter().map(|v| -*v).collect();
        let mut slope = dot(&g, &dir);
        if slope >= T::zero() {
            hist.clear();
            dir = g.iter().map(|v| -*v).collect();
            slope = dot(&g, &dir);
        }
        let mut t = T::one();
        let c1 = T::of(1e-4);
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<T> = x.iter().zip(&dir).map(|(a, d)| *a + t * *d).collect();
            let (fn_, gn) = fg(&xn);
            evals += 1;
            if fn_.is_finite() && fn_ <= fx + c1 * t * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            t = t * T::of(0.5);
        }
        let Some((xn, fn_, gn)) = accepted else {
            // No descent along the search direction: numerically stationary.
            converged = hist.is_empty();
            if hist.is_empty() {
                break;
            }
            hist.clear();
            continue;
        };
        let s: Vec<T> = xn.iter().zip(&x).map(|(a, b)| *a - *b).collect();
        let y: Vec<T> = gn.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy = dot(&s, &y);
        if sy > T::epsilon() * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            hist.push_back((s, y, T::one() / sy));
            if hist.len() > cfg.memory {
                hist.pop_front();
            }
        }
        let decrease = fx - fn_;
        x = xn;
        fx = fn_;
        g = gn;
        trace.push(fx);
        if decrease <= T::of(cfg.f_tol) * fx.abs().max(T::one()) {
            converged = true;
            break;
        }
    }
    OptimResult { x, f: fx, evals, converged, trace }
}
