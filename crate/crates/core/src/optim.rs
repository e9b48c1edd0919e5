//! Dense BFGS quasi-Newton minimizer with a strong-Wolfe line search.
//!
//! The objective may return a non-finite value to mark a point as outside the
//! admissible region; the line search then treats the trial step as too long.

use crate::scalar::Scalar;

pub trait Objective<S> {
    /// Writes the gradient at `x` into `grad` and returns the function value.
    fn evaluate(&mut self, x: &[S], grad: &mut [S]) -> S;
}

impl<S, F> Objective<S> for F
where
    F: FnMut(&[S], &mut [S]) -> S,
{
    fn evaluate(&mut self, x: &[S], grad: &mut [S]) -> S {
        self(x, grad)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions<S> {
    /// Converged once the Euclidean gradient norm drops to this value.
    pub grad_tol: S,
    pub max_iter: usize,
    /// Sufficient-decrease constant.
    pub c1: S,
    /// Curvature constant.
    pub c2: S,
    pub max_line_search: usize,
}

impl<S: Scalar> Default for BfgsOptions<S> {
    fn default() -> Self {
        Self { grad_tol: S::lit(1e-6), max_iter: 500, c1: S::lit(1e-4), c2: S::lit(0.9), max_line_search: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    LineSearchFailed,
    InvalidStart,
}

#[derive(Debug, Clone)]
pub struct Minimum<S> {
    pub x: Vec<S>,
    pub value: S,
    pub gradient: Vec<S>,
    pub gradient_norm: S,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

impl<S> Minimum<S> {
    pub fn converged(&self) -> bool {
        self.termination == Termination::GradientTolerance
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

struct Trial<S> {
    alpha: S,
    value: S,
    slope: S,
    grad: Vec<S>,
}

struct LineSearch<'a, S, O> {
    objective: &'a mut O,
    x: &'a [S],
    dir: &'a [S],
    f0: S,
    slope0: S,
    // Slack that absorbs rounding noise in the sufficient-decrease test.
    noise: S,
    opts: &'a BfgsOptions<S>,
    evaluations: usize,
    point: Vec<S>,
}

impl<'a, S: Scalar, O: Objective<S>> LineSearch<'a, S, O> {
    fn eval(&mut self, alpha: S) -> Trial<S> {
        for ((p, &x), &d) in self.point.iter_mut().zip(self.x).zip(self.dir) {
            *p = x + alpha * d;
        }
        let mut grad = vec![S::zero(); self.x.len()];
        let value = self.objective.evaluate(&self.point, &mut grad);
        self.evaluations += 1;
        let ok = value.is_finite() && grad.iter().all(|g| g.is_finite());
        let value = if ok { value } else { S::infinity() };
        let slope = if ok { dot(&grad, self.dir) } else { S::nan() };
        Trial { alpha, value, slope, grad }
    }

    fn armijo_fails(&self, t: &Trial<S>) -> bool {
        !(t.value <= self.f0 + self.opts.c1 * t.alpha * self.slope0 + self.noise)
    }

    fn curvature_holds(&self, t: &Trial<S>) -> bool {
        t.slope.abs() <= -self.opts.c2 * self.slope0
    }

    fn run(&mut self, alpha0: S) -> Option<Trial<S>> {
        let mut prev = Trial { alpha: S::zero(), value: self.f0, slope: self.slope0, grad: Vec::new() };
        let mut alpha = alpha0;
        for i in 0..self.opts.max_line_search {
            let t = self.eval(alpha);
            if self.armijo_fails(&t) || (i > 0 && t.value >= prev.value) {
                return self.zoom(prev, t);
            }
            if self.curvature_holds(&t) {
                return Some(t);
            }
            if t.slope >= S::zero() {
                return self.zoom(t, prev);
            }
            alpha *= S::lit(2.0);
            prev = t;
        }
        None
    }

    fn zoom(&mut self, mut lo: Trial<S>, mut hi: Trial<S>) -> Option<Trial<S>> {
        for _ in 0..self.opts.max_line_search {
            let (a, b) = if lo.alpha < hi.alpha { (lo.alpha, hi.alpha) } else { (hi.alpha, lo.alpha) };
            let width = b - a;
            if width <= S::epsilon() * b.max(S::one()) {
                break;
            }
            let guess = cubic_minimizer(&lo, &hi).unwrap_or((lo.alpha + hi.alpha) * S::lit(0.5));
            let margin = S::lit(0.1) * width;
            let alpha = if guess.is_finite() { guess.max(a + margin).min(b - margin) } else { (a + b) * S::lit(0.5) };
            let t = self.eval(alpha);
            if self.armijo_fails(&t) || t.value >= lo.value {
                hi = t;
            } else {
                if self.curvature_holds(&t) {
                    return Some(t);
                }
                if t.slope * (hi.alpha - lo.alpha) >= S::zero() {
                    hi = lo;
                }
                lo = t;
            }
        }
        // Fall back to the best point with sufficient decrease, if any.
        (lo.alpha > S::zero() && !lo.grad.is_empty()).then_some(lo)
    }
}

// Minimizer of the cubic matching both endpoint values and slopes.
fn cubic_minimizer<S: Scalar>(a: &Trial<S>, b: &Trial<S>) -> Option<S> {
    if !(a.value.is_finite() && b.value.is_finite() && a.slope.is_finite() && b.slope.is_finite()) {
        return None;
    }
    let d1 = a.slope + b.slope - S::lit(3.0) * (a.value - b.value) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.slope * b.slope;
    if disc < S::zero() {
        return None;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let denom = b.slope - a.slope + S::lit(2.0) * d2;
    if denom == S::zero() {
        return None;
    }
    Some(b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom)
}

/// Minimizes `objective` from `x0`.
pub fn minimize<S: Scalar, O: Objective<S>>(objective: &mut O, x0: &[S], opts: &BfgsOptions<S>) -> Minimum<S> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut grad = vec![S::zero(); n];
    let mut value = objective.evaluate(&x, &mut grad);
    let mut evaluations = 1;
    if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Minimum {
            gradient_norm: S::infinity(),
            x,
            value,
            gradient: grad,
            iterations: 0,
            evaluations,
            termination: Termination::InvalidStart,
        };
    }
    let mut inv_hessian = identity::<S>(n);
    let mut fresh = true;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;
    let mut dir = vec![S::zero(); n];

    while iterations < opts.max_iter {
        let gnorm = norm(&grad);
        if gnorm <= opts.grad_tol {
            termination = Termination::GradientTolerance;
            break;
        }
        mat_vec_neg(&inv_hessian, &grad, &mut dir);
        let mut slope = dot(&grad, &dir);
        if !(slope < S::zero()) {
            inv_hessian = identity(n);
            fresh = true;
            dir.iter_mut().zip(&grad).for_each(|(d, &g)| *d = -g);
            slope = -gnorm * gnorm;
        }
        let alpha0 = if fresh { S::one().min(S::one() / gnorm) } else { S::one() };
        let noise = S::epsilon() * S::lit(64.0) * (S::one() + value.abs());
        let mut ls = LineSearch {
            objective,
            x: &x,
            dir: &dir,
            f0: value,
            slope0: slope,
            noise,
            opts,
            evaluations: 0,
            point: vec![S::zero(); n],
        };
        let found = ls.run(alpha0);
        evaluations += ls.evaluations;
        let Some(step) = found else {
            if fresh {
                termination = Termination::LineSearchFailed;
                break;
            }
            inv_hessian = identity(n);
            fresh = true;
            continue;
        };
        iterations += 1;
        let s: Vec<S> = dir.iter().map(|&d| step.alpha * d).collect();
        let y: Vec<S> = step.grad.iter().zip(&grad).map(|(&a, &b)| a - b).collect();
        x.iter_mut().zip(&s).for_each(|(xi, &si)| *xi += si);
        value = step.value;
        grad = step.grad;
        let sy = dot(&s, &y);
        if sy > S::epsilon() * norm(&s) * norm(&y) {
            if fresh {
                let scale = sy / dot(&y, &y);
                inv_hessian = identity(n);
                for i in 0..n {
                    inv_hessian[i * n + i] = scale;
                }
            }
            bfgs_update(&mut inv_hessian, &s, &y, sy);
            fresh = false;
        }
    }
    let gradient_norm = norm(&grad);
    if termination == Termination::MaxIterations && gradient_norm <= opts.grad_tol {
        termination = Termination::GradientTolerance;
    }
    Minimum { x, value, gradient: grad, gradient_norm, iterations, evaluations, termination }
}

fn identity<S: Scalar>(n: usize) -> Vec<S> {
    let mut m = vec![S::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = S::one();
    }
    m
}

fn mat_vec_neg<S: Scalar>(m: &[S], v: &[S], out: &mut [S]) {
    let n = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = -dot(&m[i * n..(i + 1) * n], v);
    }
}

// H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ, expanded to avoid forming the products.
fn bfgs_update<S: Scalar>(h: &mut [S], s: &[S], y: &[S], sy: S) {
    let n = s.len();
    let rho = S::one() / sy;
    let hy: Vec<S> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    let coef = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}
