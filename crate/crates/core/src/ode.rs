//! Fixed-step classical Runge–Kutta integration, used by the numeric oracles.

use num_complex::Complex64 as C64;

use crate::algebra::Operator2;

/// State types the integrator can advance.
pub trait OdeState: Copy {
    /// `self + a·x`
    fn axpy(&self, a: f64, x: &Self) -> Self;
}

impl OdeState for Operator2 {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        *self + x.scale_re(a)
    }
}

impl OdeState for [C64; 4] {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        let mut out = *self;
        for (o, xi) in out.iter_mut().zip(x) {
            *o += xi * a;
        }
        out
    }
}

/// One RK4 step of `dy/dt = f(t, y)`.
pub fn rk4_step<S: OdeState>(f: &impl Fn(f64, &S) -> S, t: f64, y: &S, h: f64) -> S {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k2));
    let k4 = f(t + h, &y.axpy(h, &k3));
    y.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4)
}

/// Integrates from `t0` to `t1` with `steps` equal RK4 steps.
pub fn rk4_integrate<S: OdeState>(f: impl Fn(f64, &S) -> S, y0: S, t0: f64, t1: f64, steps: usize) -> S {
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for k in 0..steps {
        y = rk4_step(&f, t0 + k as f64 * h, &y, h);
    }
    y
}
