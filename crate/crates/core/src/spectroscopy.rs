//! Resonance fluorescence spectrum of the driven atom in the vacuum.
//!
//! The closed form is a Mollow triplet of normalized Lorentzians
//! `(1/π)·w/(w² + x²)` centered at `Ω − Ω_R`, `Ω`, `Ω + Ω_R` plus an elastic
//! delta line at `Ω`. The regression oracle computes the same spectrum from
//! the two-time correlation `tr{σ⁺ 𝓤(t)e^{t𝓛}(σ⁻ρ̃)}`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::algebra::{Basis, Operator2};
use crate::dissipator::{fluorescence_rates, stationary_state, Generator};
use crate::error::{Error, Result};
use crate::floquet::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Elastic,
    Central,
    SideMinus,
    SidePlus,
}

impl LineKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LineKind::Elastic => "elastic",
            LineKind::Central => "central",
            LineKind::SideMinus => "side_minus",
            LineKind::SidePlus => "side_plus",
        }
    }
}

impl fmt::Display for LineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One Lorentzian line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub kind: LineKind,
    pub center: f64,
    pub width: f64,
    pub weight: f64,
}

impl Line {
    pub fn eval(&self, omega: f64) -> f64 {
        self.weight * lorentzian(omega - self.center, self.width)
    }
}

/// `(1/π)·w/(w² + x²)`.
pub fn lorentzian(x: f64, w: f64) -> f64 {
    w / (PI * (w * w + x * x))
}

/// Mollow triplet plus elastic line. The grid never contains the delta.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub drive: f64,
    pub elastic_weight: f64,
    /// Central, lower and upper side line, in that order.
    pub lines: [Line; 3],
    pub grid: Option<Vec<(f64, f64)>>,
}

impl Spectrum {
    /// Inelastic intensity at `omega`.
    pub fn intensity(&self, omega: f64) -> f64 {
        self.lines.iter().map(|l| l.eval(omega)).sum()
    }

    pub fn line(&self, kind: LineKind) -> Option<&Line> {
        self.lines.iter().find(|l| l.kind == kind)
    }

    pub fn total_weight(&self) -> f64 {
        self.elastic_weight + self.lines.iter().map(|l| l.weight).sum::<f64>()
    }

    /// Samples the inelastic part on `points` equally spaced frequencies in
    /// `[omega_min, omega_max]`; `points = 0` removes the grid.
    pub fn with_grid(mut self, omega_min: f64, omega_max: f64, points: usize) -> Result<Self> {
        if points == 0 {
            self.grid = None;
            return Ok(self);
        }
        self.grid = Some(sample_grid(omega_min, omega_max, points)?.into_iter().map(|w| (w, self.intensity(w))).collect());
        Ok(self)
    }

    /// Rescales all weights so that elastic plus Lorentzian weights sum to one.
    pub fn normalized(mut self) -> Self {
        let total = self.total_weight();
        if total > 0.0 {
            self.elastic_weight /= total;
            for l in self.lines.iter_mut() {
                l.weight /= total;
            }
            if let Some(grid) = self.grid.as_mut() {
                for pt in grid.iter_mut() {
                    pt.1 /= total;
                }
            }
        }
        self
    }

    /// Elastic record followed by the three Lorentzians.
    pub fn line_table(&self) -> Vec<Line> {
        let mut out = vec![Line {
            kind: LineKind::Elastic,
            center: self.drive,
            width: 0.0,
            weight: self.elastic_weight,
        }];
        out.extend(self.lines);
        out
    }
}

/// `points` equally spaced values from `lo` to `hi` inclusive.
pub fn sample_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams(format!("empty frequency range [{lo}, {hi}]")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| lo + step * i as f64).collect())
}

/// The frequency window `[Ω − 4Ω_R, Ω + 4Ω_R]`.
pub fn default_window(p: &SystemParams) -> (f64, f64) {
    (p.drive() - 4.0 * p.rabi(), p.drive() + 4.0 * p.rabi())
}

/// Indices of strict interior local maxima.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

/// Closed-form fluorescence spectrum for `G(ω) = Aω³`.
pub fn mollow_spectrum(p: &SystemParams, a: f64) -> Result<Spectrum> {
    if p.g() == 0.0 {
        return Err(Error::InvalidParams("no fluorescence without driving (g = 0)".into()));
    }
    let r = fluorescence_rates(p, a)?;
    let (d, g, rabi, w) = (p.detuning(), p.g(), p.rabi(), p.drive());
    let g4 = 4.0 * g * g;
    let upper = g4 * r.delta_plus / ((rabi - d).powi(2) * r.gamma1);
    let lower = g4 * r.delta_minus / ((rabi + d).powi(2) * r.gamma1);
    let side_minus = g4 * r.delta_plus / ((rabi + d).powi(2) * r.gamma1);
    let side_plus = g4 * r.delta_minus / ((rabi - d).powi(2) * r.gamma1);
    Ok(Spectrum {
        drive: w,
        elastic_weight: ((r.delta_minus - r.delta_plus) / r.gamma1).powi(2),
        lines: [
            Line { kind: LineKind::Central, center: w, width: r.gamma1, weight: 4.0 * upper * lower },
            Line { kind: LineKind::SideMinus, center: w - rabi, width: r.gamma2, weight: side_minus },
            Line { kind: LineKind::SidePlus, center: w + rabi, width: r.gamma2, weight: side_plus },
        ],
        grid: None,
    })
}

/// Decay rate of the dressed coherence under `𝓛`, i.e. `−Re(𝓛E₁₂)₁₂`.
pub fn coherence_decay_rate(gen: &Generator) -> f64 {
    -gen.superop.apply(&Operator2::unit(0, 1, Basis::Dressed)).get(0, 1).re
}

/// Time grid and acceptance threshold for the regression oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionOptions {
    pub dt: f64,
    pub t_max: f64,
    /// Largest allowed `|c(t) − c_∞|/|c(0) − c_∞|` over the last drive period.
    pub remainder_tol: f64,
}

impl RegressionOptions {
    /// Horizon long enough for the slowest rate of `gen` to decay by `e^{−22}`.
    pub fn for_generator(gen: &Generator) -> Self {
        let p = gen.params();
        let slowest = slowest_decay_rate(gen).max(1e-12);
        let dt = (0.1 / (p.drive() + p.rabi())).min(0.01);
        Self { dt, t_max: 22.0 / slowest, remainder_tol: 1e-8 }
    }
}

fn slowest_decay_rate(gen: &Generator) -> f64 {
    let m = nalgebra::Matrix4::from_fn(|i, j| gen.superop.entries()[i][j]);
    nalgebra::Schur::new(m)
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .map(|z| -z.re)
        .filter(|&r| r > 1e-12)
        .fold(f64::INFINITY, f64::min)
}

/// Spectrum obtained from the quantum regression formula.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpectrum {
    pub omega: Vec<f64>,
    /// Decaying part, `Re ∫₀^∞ e^{−iωt}(C(t) − C_∞(t)) dt`.
    pub intensity: Vec<f64>,
    /// `π·Re c_∞`, the weight of the delta line at `Ω`.
    pub elastic_weight: f64,
    /// Relative size of the decaying correlation at the end of the horizon.
    pub remainder: f64,
}

/// Numeric fluorescence spectrum from
/// `C(t) = tr{σ⁺ 𝓤(t)[e^{t𝓛}(σ⁻ρ̃)]}`, with `σ±` built from the lab Pauli
/// matrices and carried into the dressed basis.
///
/// The correlation has the form `e^{iΩt}c(t)`; the asymptote of `c` is the
/// elastic line, and the decaying remainder is transformed by trapezoidal
/// quadrature with an Euler–Maclaurin endpoint term and an exponential tail.
pub fn regression_spectrum_oracle(gen: &Generator, omegas: &[f64], opts: RegressionOptions) -> Result<RegressionSpectrum> {
    let basis = gen.dressed_basis();
    let p = *gen.params();
    if !(opts.dt > 0.0) || !(opts.t_max > opts.dt) {
        return Err(Error::InvalidParams(format!("bad time grid dt = {}, t_max = {}", opts.dt, opts.t_max)));
    }
    if (p.drive() + p.rabi()) * opts.dt >= PI {
        return Err(Error::InvalidParams(format!("dt = {} does not resolve Ω + Ω_R", opts.dt)));
    }
    let half = C64::new(0.5, 0.0);
    let s1 = Operator2::pauli(1, Basis::Lab);
    let s2 = Operator2::pauli(2, Basis::Lab);
    let sp = basis.to_dressed(&(s1 + s2.scale(C64::i())).scale(half))?;
    let sm = basis.to_dressed(&(s1 - s2.scale(C64::i())).scale(half))?;
    let rho = stationary_state(gen)?;
    let x0 = sm * *rho.matrix();

    let n = (opts.t_max / opts.dt).round() as usize;
    let step = gen.superop.expm(opts.dt);
    let mut x = x0;
    let mut c = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let t = j as f64 * opts.dt;
        let u = basis.propagator(t);
        let moved = x.conjugate_by(&u)?;
        let corr = (sp * moved).trace();
        c.push(corr * C64::from_polar(1.0, -p.drive() * t));
        x = step.apply(&x);
    }

    let per_period = ((p.period() / opts.dt).round() as usize).clamp(1, n);
    let tail = &c[n + 1 - per_period..];
    let c_inf = tail.iter().sum::<C64>() / tail.len() as f64;
    let f: Vec<C64> = c.iter().map(|z| z - c_inf).collect();
    let scale0 = f[0].norm().max(1e-300);
    let remainder = f[n + 1 - per_period..].iter().map(|z| z.norm()).fold(0.0, f64::max) / scale0;
    if remainder > opts.remainder_tol {
        return Err(Error::HorizonTooShort { remainder });
    }

    let h = opts.dt;
    let t_end = n as f64 * h;
    let deriv = |a: C64, b: C64, c2: C64| (-3.0 * a + 4.0 * b - c2) / (2.0 * h);
    let d0 = deriv(f[0], f[1], f[2]);
    let d_end = -deriv(f[n], f[n - 1], f[n - 2]);
    let lag = per_period.min(n / 2).max(1);
    let decay = {
        let (a, b) = (f[n - lag].norm(), f[n].norm());
        if a > 0.0 && b > 0.0 && a > b {
            (a / b).ln() / (lag as f64 * h)
        } else {
            0.0
        }
    };

    let intensity = omegas
        .iter()
        .map(|&w| {
            let x = w - p.drive();
            let rot = C64::from_polar(1.0, -x * h);
            let mut phase = C64::new(1.0, 0.0);
            let mut sum = C64::new(0.0, 0.0);
            for (j, fj) in f.iter().enumerate() {
                let wgt = if j == 0 || j == n { 0.5 } else { 1.0 };
                sum += fj * phase * wgt;
                phase *= rot;
            }
            sum *= h;
            let e_end = C64::from_polar(1.0, -x * t_end);
            let i = C64::i();
            let g0 = d0 - i * x * f[0];
            let g_end = (d_end - i * x * f[n]) * e_end;
            sum -= h * h / 12.0 * (g_end - g0);
            if decay > 0.0 {
                sum += f[n] * e_end / C64::new(decay, x);
            }
            sum.re
        })
        .collect();

    Ok(RegressionSpectrum {
        omega: omegas.to_vec(),
        intensity,
        elastic_weight: PI * c_inf.re,
        remainder,
    })
}

/// Outcome of matching the oracle to the closed form with one scale factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFit {
    pub scale: f64,
    /// `‖s·I_oracle − I_closed‖₂ / ‖I_closed‖₂` over the grid.
    pub relative_l2: f64,
    /// `|s·w_oracle − w_closed| / w_closed` for the elastic line.
    pub elastic_relative_error: f64,
}

/// Least-squares scale `s` minimizing `‖s·I_oracle − I_closed‖₂`.
pub fn fit_scale(closed: &Spectrum, oracle: &RegressionSpectrum) -> ScaleFit {
    let target: Vec<f64> = oracle.omega.iter().map(|&w| closed.intensity(w)).collect();
    let num: f64 = target.iter().zip(&oracle.intensity).map(|(a, b)| a * b).sum();
    let den: f64 = oracle.intensity.iter().map(|b| b * b).sum();
    let scale = num / den;
    let err: f64 = target
        .iter()
        .zip(&oracle.intensity)
        .map(|(a, b)| (scale * b - a).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = target.iter().map(|a| a * a).sum::<f64>().sqrt();
    ScaleFit {
        scale,
        relative_l2: err / norm,
        elastic_relative_error: (scale * oracle.elastic_weight - closed.elastic_weight).abs() / closed.elastic_weight,
    }
}
