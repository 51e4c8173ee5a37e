//! Randomized invariant suites comparing every closed form with its oracle.
//!
//! Each suite draws from its own seeded stream, so results depend only on the
//! seed and the case counts. A failing check keeps the parameters of its worst
//! case for replay.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::algebra::{devectorize, expm_hermitian, lindblad_superop, vectorize, Basis, Operator2};
use crate::dissipator::{
    evolve_interaction, evolve_schrodinger, fluorescence_rates, integrate_interaction, integrate_schrodinger,
    stationary_state, total_generator, BathSpec, Channel, DensityMatrix, Generator, SpectralDensity,
};
use crate::error::Result;
use crate::floquet::{floquet_hamiltonian, propagator, propagator_oracle, DressedBasis, SystemParams};
use crate::ode::rk4_integrate;
use crate::random::{
    random_bloch, random_heatpump_baths, random_hermitian, random_operator, random_params, random_state, rng,
    TestRng,
};
use crate::spectroscopy::{
    coherence_decay_rate, default_window, fit_scale, mollow_spectrum, regression_spectrum_oracle, sample_grid,
    RegressionOptions,
};
use crate::thermo::{
    detuning_sweep, entropy_production, heatpump_currents, heatpump_steady_ratio, local_heat_current,
    local_heat_current_entropic, limit_cycle_energy, spohn_with_stationary, stationary_currents, HeatPumpRates,
    Regime,
};
use crate::transitions::{
    heisenberg_coupling, numeric_decomposition_oracle, oracle_periods_needed, transition_ops, TransitionOperator,
};

pub const DEFAULT_SEED: u64 = 20_130_521;
pub const DEFAULT_CASES: usize = 100;

/// Whether a check bounds its measured value from above or below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub value: f64,
    pub bound: Bound,
    pub tolerance: f64,
    /// Parameters of the worst case.
    pub replay: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.tolerance,
            Bound::AtLeast => self.value >= self.tolerance,
        }
    }
}

/// Running worst value of a check.
struct Tracker {
    name: &'static str,
    bound: Bound,
    tolerance: f64,
    cases: usize,
    value: f64,
    replay: Option<String>,
}

impl Tracker {
    fn at_most(name: &'static str, tolerance: f64) -> Self {
        Self { name, bound: Bound::AtMost, tolerance, cases: 0, value: f64::NEG_INFINITY, replay: None }
    }

    fn at_least(name: &'static str, tolerance: f64) -> Self {
        Self { name, bound: Bound::AtLeast, tolerance, cases: 0, value: f64::INFINITY, replay: None }
    }

    fn record(&mut self, value: f64, replay: impl FnOnce() -> String) {
        self.cases += 1;
        let worse = match self.bound {
            Bound::AtMost => value.is_nan() || value > self.value,
            Bound::AtLeast => value.is_nan() || value < self.value,
        };
        if worse && !self.value.is_nan() {
            self.value = value;
            self.replay = Some(replay());
        }
    }

    fn record_result(&mut self, value: Result<f64>, replay: impl FnOnce() -> String) {
        match value {
            Ok(v) => self.record(v, replay),
            Err(e) => {
                let bad = match self.bound {
                    Bound::AtMost => f64::INFINITY,
                    Bound::AtLeast => f64::NEG_INFINITY,
                };
                self.record(bad, || format!("{}; error: {e}", replay()));
            }
        }
    }

    fn finish(self, overrides: &BTreeMap<String, f64>) -> Check {
        let tolerance = overrides.get(self.name).copied().unwrap_or(self.tolerance);
        let value = if self.cases == 0 { f64::NAN } else { self.value };
        Check { name: self.name.to_string(), cases: self.cases, value, bound: self.bound, tolerance, replay: self.replay }
    }
}

fn describe(p: &SystemParams) -> String {
    format!("omega0={:e} Omega={:e} g={:e}", p.omega0(), p.drive(), p.g())
}

fn describe_baths(baths: &[BathSpec]) -> String {
    baths
        .iter()
        .map(|b| format!("{}:{}:T={:e}:{:?}", b.label, b.channel, b.temperature, b.density))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Seed, case count and tolerance overrides keyed by check name.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub cases: usize,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, cases: DEFAULT_CASES, tolerances: BTreeMap::new() }
    }
}

impl VerifyOptions {
    fn stream(&self, suite: u64) -> TestRng {
        rng(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(suite))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Fixed-width pass/fail table followed by replay lines of failures.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "{:<38} {:>6} {:>12} {:>4} {:>10}  result", "check", "cases", "value", "", "tolerance");
        for c in &self.checks {
            let op = match c.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            let _ = writeln!(
                out,
                "{:<38} {:>6} {:>12.4e} {:>4} {:>10.1e}  {}",
                c.name,
                c.cases,
                c.value,
                op,
                c.tolerance,
                if c.passed() { "PASS" } else { "FAIL" }
            );
        }
        for c in self.failures() {
            let _ = writeln!(out, "replay {}: {}", c.name, c.replay.as_deref().unwrap_or("-"));
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

/// Runs every suite.
pub fn run_all(opts: &VerifyOptions) -> VerifyReport {
    let mut checks = Vec::new();
    checks.extend(algebra_suite(&mut opts.stream(1), opts.cases, &opts.tolerances));
    checks.extend(floquet_suite(&mut opts.stream(2), opts.cases, &opts.tolerances));
    checks.extend(transitions_suite(&mut opts.stream(3), opts.cases, (opts.cases / 2).max(1), &opts.tolerances));
    checks.extend(dissipator_suite(&mut opts.stream(4), opts.cases, &opts.tolerances));
    checks.extend(spectroscopy_suite(&mut opts.stream(5), opts.cases, 2000, &opts.tolerances));
    checks.extend(thermo_suite(&mut opts.stream(6), ThermoCounts::from_cases(opts.cases), &opts.tolerances));
    checks.push(regime_switch_check(&opts.tolerances));
    checks.push(small_detuning_check(&opts.tolerances));
    VerifyReport { seed: opts.seed, checks }
}

fn random_lindblad(rng: &mut TestRng) -> crate::algebra::SuperOp {
    let mut l = lindblad_superop(&random_operator(rng, Basis::Lab), rng.gen_range(0.0..1.0)).expect("valid rate");
    for _ in 0..2 {
        l = l + lindblad_superop(&random_operator(rng, Basis::Lab), rng.gen_range(0.0..1.0)).expect("valid rate");
    }
    l
}

pub fn algebra_suite(rng: &mut TestRng, n: usize, tol: &BTreeMap<String, f64>) -> Vec<Check> {
    let mut pauli = Tracker::at_most("algebra.pauli_roundtrip", 1e-14);
    let mut vec_rt = Tracker::at_most("algebra.vectorize_roundtrip", 0.0);
    let mut trace = Tracker::at_most("algebra.lgks_trace", 1e-12);
    let mut herm = Tracker::at_most("algebra.lgks_hermiticity", 1e-12);
    let mut expm = Tracker::at_most("algebra.superop_expm_vs_ode", 1e-10);
    for i in 0..n {
        let a = random_operator(rng, Basis::Lab);
        let replay = || format!("case {i}: {:?}", a.entries());
        pauli.record(Operator2::from_pauli(a.pauli_decompose(), Basis::Lab).max_abs_diff(&a), replay);
        vec_rt.record(devectorize(&vectorize(&a), Basis::Lab).max_abs_diff(&a), replay);
        let l = random_lindblad(rng);
        let rho = random_hermitian(rng, Basis::Lab);
        let out = l.apply(&rho);
        trace.record(out.trace().norm(), || format!("case {i}: rho={:?}", rho.entries()));
        herm.record(out.max_abs_diff(&out.dagger()), || format!("case {i}: rho={:?}", rho.entries()));
        if i % 10 == 0 {
            let exact = l.expm(1.0).apply(&rho);
            let ode = rk4_integrate(|_, r: &Operator2| l.apply(r), rho, 0.0, 1.0, 2000);
            expm.record(exact.max_abs_diff(&ode), || format!("case {i}"));
        }
    }
    [pauli, vec_rt, trace, herm, expm].into_iter().map(|t| t.finish(tol)).collect()
}

/// Empirical convergence order of the RK4 propagator oracle at `t = τ`.
pub fn propagator_oracle_order(p: &SystemParams) -> f64 {
    let t = p.period();
    let exact = propagator(p, t);
    let e1 = propagator_oracle(p, t, 100).max_abs_diff(&exact);
    let e2 = propagator_oracle(p, t, 200).max_abs_diff(&exact);
    (e1 / e2).log2()
}

/// `max ‖U(t) − U_oracle(t)‖` over `t ∈ {τ/7, τ/3, τ, 3τ}`.
pub fn propagator_oracle_error(p: &SystemParams, steps: usize) -> f64 {
    let tau = p.period();
    [tau / 7.0, tau / 3.0, tau, 3.0 * tau]
        .iter()
        .map(|&t| propagator(p, t).max_abs_diff(&propagator_oracle(p, t, steps)))
        .fold(0.0, f64::max)
}

pub fn reference_fluorescence_params() -> SystemParams {
    SystemParams::from_detuning(0.85, 0.01, 0.075).expect("valid parameters")
}

pub fn floquet_suite(rng: &mut TestRng, n: usize, tol: &BTreeMap<String, f64>) -> Vec<Check> {
    let mut oracle = Tracker::at_most("floquet.propagator_oracle", 1e-8);
    let mut order = Tracker::at_least("floquet.oracle_order", 3.8);
    let mut floq = Tracker::at_most("floquet.period_propagator", 1e-12);
    let mut ortho = Tracker::at_most("floquet.dressed_orthonormality", 1e-13);
    let mut unitary = Tracker::at_most("floquet.unitarity", 1e-13);
    let reference = reference_fluorescence_params();
    oracle.record(propagator_oracle_error(&reference, 100_000), || describe(&reference));
    order.record(propagator_oracle_order(&reference), || describe(&reference));
    for i in 0..n {
        let p = random_params(rng);
        if i % 20 == 0 {
            oracle.record(propagator_oracle_error(&p, 100_000), || describe(&p));
            order.record(propagator_oracle_order(&p), || describe(&p));
        }
        let tau = p.period();
        floq.record_result(
            expm_hermitian(&floquet_hamiltonian(&p), tau).map(|u| u.max_abs_diff(&propagator(&p, tau))),
            || describe(&p),
        );
        unitary.record(propagator(&p, rng.gen_range(0.0..10.0 * tau)).unitarity_defect(), || describe(&p));
        match DressedBasis::new(&p) {
            Ok(b) => {
                let dot = b.phi1[0] * b.phi2[0] + b.phi1[1] * b.phi2[1];
                let n1 = (b.phi1[0].hypot(b.phi1[1]) - 1.0).abs();
                let n2 = (b.phi2[0].hypot(b.phi2[1]) - 1.0).abs();
                ortho.record(dot.abs().max(n1).max(n2), || describe(&p));
            }
            Err(e) => ortho.record(f64::INFINITY, || format!("{}; error: {e}", describe(&p))),
        }
    }
    [oracle, order, floq, ortho, unitary].into_iter().map(|t| t.finish(tol)).collect()
}

/// Entrywise distance between the closed-form operators and the numeric
/// decomposition, counting components missing on either side.
pub fn decomposition_error(basis: &DressedBasis, channel: Channel) -> Result<f64> {
    let closed = transition_ops(basis, channel)?;
    let s = basis.to_dressed(&channel.operator())?;
    let numeric = numeric_decomposition_oracle(basis, &s, oracle_periods_needed(basis), 24)?;
    let mut err: f64 = 0.0;
    for op in &numeric {
        err = err.max(match closed.get(op.harmonic, op.rabi_index) {
            Some(c) => c.matrix.max_abs_diff(&op.matrix),
            None => op.matrix.max_abs(),
        });
    }
    for op in closed.ops() {
        if !numeric.iter().any(|o| o.key() == op.key()) {
            err = err.max(op.matrix.max_abs());
        }
    }
    Ok(err)
}

/// Largest `‖S(t) − Σ S_q(ω̄)e^{−i(ω̄+qΩ)t}‖` over `samples` points.
pub fn reconstruction_error(basis: &DressedBasis, channel: Channel, samples: usize) -> Result<f64> {
    let set = transition_ops(basis, channel)?;
    let s = basis.to_dressed(&channel.operator())?;
    let span = 10.0 * basis.params().period();
    let mut err: f64 = 0.0;
    for j in 0..samples {
        let t = span * (j as f64 + 0.5) / samples as f64;
        err = err.max(heisenberg_coupling(basis, &s, t)?.max_abs_diff(&set.reconstruct(t)));
    }
    Ok(err)
}

fn symmetry_defect(ops: &[TransitionOperator], set: &crate::transitions::TransitionSet) -> f64 {
    ops.iter()
        .map(|op| match set.get(-op.harmonic, -op.rabi_index) {
            Some(c) => c.matrix.max_abs_diff(&op.matrix.dagger()),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

pub fn transitions_suite(rng: &mut TestRng, n: usize, n_oracle: usize, tol: &BTreeMap<String, f64>) -> Vec<Check> {
    let mut decomp = Tracker::at_most("transitions.decomposition_oracle", 1e-7);
    let mut recon = Tracker::at_most("transitions.reconstruction", 1e-10);
    let mut comm = Tracker::at_most("transitions.commutation", 1e-12);
    let mut sym = Tracker::at_most("transitions.conjugate_symmetry", 1e-15);
    for i in 0..n {
        let p = random_params(rng);
        let basis = match DressedBasis::new(&p) {
            Ok(b) => b,
            Err(e) => {
                comm.record(f64::INFINITY, || format!("{}; error: {e}", describe(&p)));
                continue;
            }
        };
        for channel in [Channel::Sigma1, Channel::Sigma3] {
            let replay = || format!("{} channel={channel}", describe(&p));
            if i < n_oracle {
                decomp.record_result(decomposition_error(&basis, channel), replay);
                recon.record_result(reconstruction_error(&basis, channel, 200), replay);
            }
            match transition_ops(&basis, channel) {
                Ok(set) => {
                    let c = set.ops().iter().map(|o| o.commutation_defect(&basis)).fold(0.0, f64::max);
                    comm.record(c, replay);
                    sym.record(symmetry_defect(set.ops(), &set), replay);
                }
                Err(e) => comm.record(f64::INFINITY, || format!("{}; error: {e}", replay())),
            }
        }
    }
    [decomp, recon, comm, sym].into_iter().map(|t| t.finish(tol)).collect()
}

fn random_baths(rng: &mut TestRng) -> Vec<BathSpec> {
    if rng.gen_bool(0.5) {
        vec![BathSpec::vacuum("e", rng.gen_range(0.05..1.0)).expect("valid bath")]
    } else {
        random_heatpump_baths(rng).to_vec()
    }
}

/// Trace, Hermiticity and positivity defects along one Schrödinger-picture
/// trajectory sampled at `times`.
pub fn trajectory_defects(gen: &Generator, rho0: &DensityMatrix, times: &[f64]) -> Result<(f64, f64, f64)> {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for &t in times {
        let (h, tr, neg) = evolve_schrodinger(gen, rho0, t)?.defects();
        worst = (worst.0.max(tr), worst.1.max(h), worst.2.max(neg));
    }
    Ok(worst)
}

/// Interaction-picture fluorescence solution in closed form against the
/// superoperator exponential.
pub fn fluorescence_closed_form_error(p: &SystemParams, a: f64, rho0: &DensityMatrix, times: &[f64]) -> Result<f64> {
    let basis = DressedBasis::new(p)?;
    let gen = total_generator(&basis, &[BathSpec::vacuum("e", a)?])?;
    let r = fluorescence_rates(p, a)?;
    let m = rho0.matrix();
    let mut err: f64 = 0.0;
    for &t in times {
        let rho = evolve_interaction(&gen, rho0, t)?;
        let e1 = (-r.gamma1 * t).exp();
        let p11 = e1 * m.get(0, 0).re + r.delta_minus / r.gamma1 * (1.0 - e1);
        let c = m.get(0, 1) * (-r.gamma2 * t).exp();
        let closed = Operator2::new(
            [[C64::new(p11, 0.0), c], [c.conj(), C64::new(1.0 - p11, 0.0)]],
            Basis::Dressed,
        );
        err = err.max(rho.matrix().max_abs_diff(&closed));
    }
    Ok(err)
}

pub fn dissipator_suite(rng: &mut TestRng, n: usize, tol: &BTreeMap<String, f64>) -> Vec<Check> {
    let mut trace = Tracker::at_most("dissipator.trace_preservation", 1e-12);
    let mut herm = Tracker::at_most("dissipator.hermiticity", 1e-12);
    let mut pos = Tracker::at_most("dissipator.positivity", 1e-10);
    let mut closed = Tracker::at_most("dissipator.fluorescence_closed_form", 1e-10);
    let mut ode = Tracker::at_most("dissipator.ode_oracle", 1e-8);
    let mut kernel = Tracker::at_most("dissipator.stationary_kernel", 1e-12);
    for i in 0..n {
        let p = random_params(rng);
        let baths = random_baths(rng);
        let rho0 = random_state(rng, Basis::Dressed);
        let replay = || format!("{} baths=[{}] rho0={:?}", describe(&p), describe_baths(&baths), rho0.matrix().entries());
        let gen = match DressedBasis::new(&p).and_then(|b| total_generator(&b, &baths)) {
            Ok(g) => g,
            Err(e) => {
                trace.record(f64::INFINITY, || format!("{}; error: {e}", replay()));
                continue;
            }
        };
        let times: Vec<f64> = (0..12).map(|k| 0.25 * 2f64.powi(k)).collect();
        match trajectory_defects(&gen, &rho0, &times) {
            Ok((t, h, ng)) => {
                trace.record(t, replay);
                herm.record(h, replay);
                pos.record(ng, replay);
            }
            Err(e) => trace.record(f64::INFINITY, || format!("{}; error: {e}", replay())),
        }
        kernel.record_result(stationary_state(&gen).map(|s| gen.superop.apply(s.matrix()).max_abs()), replay);
        let a = rng.gen_range(0.05..1.0);
        closed.record_result(fluorescence_closed_form_error(&p, a, &rho0, &[0.0, 0.3, 2.0, 15.0, 80.0]), || {
            format!("{} A={a:e}", describe(&p))
        });
        if i % 10 == 0 {
            let t = 3.0 * p.period();
            let steps = 400 * ((t * (p.drive() + p.rabi())).ceil() as usize).max(1);
            let err = evolve_interaction(&gen, &rho0, t).and_then(|exact| {
                let a = exact.matrix().max_abs_diff(&integrate_interaction(&gen, &rho0, t, steps));
                let s = evolve_schrodinger(&gen, &rho0, t)?;
                Ok(a.max(s.matrix().max_abs_diff(&integrate_schrodinger(&gen, &rho0, t, steps))))
            });
            ode.record_result(err, replay);
        }
    }
    [trace, herm, pos, closed, ode, kernel].into_iter().map(|t| t.finish(tol)).collect()
}

/// Regression-oracle agreement at the given parameters:
/// `(relative L2 error, elastic relative error)` on `points` frequencies.
pub fn spectrum_oracle_agreement(p: &SystemParams, a: f64, points: usize) -> Result<(f64, f64)> {
    let basis = DressedBasis::new(p)?;
    let gen = total_generator(&basis, &[BathSpec::vacuum("e", a)?])?;
    let (lo, hi) = default_window(p);
    let grid = sample_grid(lo, hi, points)?;
    let oracle = regression_spectrum_oracle(&gen, &grid, RegressionOptions::for_generator(&gen))?;
    let fit = fit_scale(&mollow_spectrum(p, a)?, &oracle);
    Ok((fit.relative_l2, fit.elastic_relative_error))
}

pub fn spectroscopy_suite(rng: &mut TestRng, n: usize, points: usize, tol: &BTreeMap<String, f64>) -> Vec<Check> {
    let mut l2 = Tracker::at_most("spectroscopy.regression_l2", 1e-3);
    let mut elastic = Tracker::at_most("spectroscopy.regression_elastic", 1e-3);
    let mut width = Tracker::at_most("spectroscopy.width_identity", 1e-12);
    let reference = reference_fluorescence_params();
    match spectrum_oracle_agreement(&reference, 1.0, points) {
        Ok((a, b)) => {
            l2.record(a, || describe(&reference));
            elastic.record(b, || describe(&reference));
        }
        Err(e) => l2.record(f64::INFINITY, || format!("{}; error: {e}", describe(&reference))),
    }
    for _ in 0..n {
        let p = random_params(rng);
        let a = rng.gen_range(0.05..1.0);
        let err = DressedBasis::new(&p)
            .and_then(|b| total_generator(&b, &[BathSpec::vacuum("e", a)?]))
            .and_then(|gen| Ok((coherence_decay_rate(&gen) - mollow_spectrum(&p, a)?.lines[1].width).abs()));
        width.record_result(err, || format!("{} A={a:e}", describe(&p)));
    }
    [l2, elastic, width].into_iter().map(|t| t.finish(tol)).collect()
}

/// Case counts of the thermodynamics suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThermoCounts {
    pub configs: usize,
    pub spohn_generators: usize,
    pub spohn_states: usize,
    pub trajectories: usize,
}

impl ThermoCounts {
    pub fn from_cases(cases: usize) -> Self {
        Self {
            configs: 2 * cases,
            spohn_generators: (cases / 5).max(1),
            spohn_states: 10 * cases,
            trajectories: (cases / 5).max(1),
        }
    }
}

fn heatpump_generator(p: &SystemParams, baths: &[BathSpec; 2]) -> Result<Generator> {
    total_generator(&DressedBasis::new(p)?, baths)
}

/// `(|ΔJ̃ᵈ|, |ΔJ̃ᵉ|)` between closed forms and the generator, each relative
/// to `max(1, |J̃|)`, plus the closed-form `Σ J̃ʲ/Tʲ` and the population-ratio
/// error.
pub fn heatpump_consistency(p: &SystemParams, baths: &[BathSpec; 2]) -> Result<(f64, f64, f64, f64)> {
    let gen = heatpump_generator(p, baths)?;
    let (te, td) = (baths[0].temperature, baths[1].temperature);
    let r = HeatPumpRates::new(p, &baths[0], &baths[1])?;
    let (j_d, j_e, _) = heatpump_currents(&r, te, td)?;
    let currents = stationary_currents(&gen)?;
    let g_e = currents[0].1;
    let g_d = currents[1].1;
    let st = stationary_state(&gen)?;
    let ratio = heatpump_steady_ratio(&r, te, td)?;
    let ratio_err = (st.population(0) / st.population(1) - ratio).abs() / ratio.max(1.0);
    Ok((
        (g_d - j_d).abs() / j_d.abs().max(1.0),
        (g_e - j_e).abs() / j_e.abs().max(1.0),
        j_d / td + j_e / te,
        ratio_err,
    ))
}

pub fn thermo_suite(rng: &mut TestRng, counts: ThermoCounts, tol: &BTreeMap<String, f64>) -> Vec<Check> {
    let mut cf_d = Tracker::at_most("thermo.closed_form_dephasing", 1e-12);
    let mut cf_e = Tracker::at_most("thermo.closed_form_electromagnetic", 1e-12);
    let mut ratio = Tracker::at_most("thermo.steady_ratio", 1e-12);
    let mut second = Tracker::at_most("thermo.second_law", 1e-10);
    let mut spohn = Tracker::at_most("thermo.spohn", 1e-10);
    let mut sigma = Tracker::at_most("thermo.entropy_production", 1e-10);
    let mut forms = Tracker::at_most("thermo.local_current_forms", 1e-10);
    let mut cycle = Tracker::at_most("thermo.limit_cycle_energy", 1e-8);
    for _ in 0..counts.configs {
        let p = random_params(rng);
        let baths = random_heatpump_baths(rng);
        let replay = || format!("{} baths=[{}]", describe(&p), describe_baths(&baths));
        match heatpump_consistency(&p, &baths) {
            Ok((d, e, s, r)) => {
                cf_d.record(d, replay);
                cf_e.record(e, replay);
                second.record(s, replay);
                ratio.record(r, replay);
            }
            Err(e) => cf_d.record(f64::INFINITY, || format!("{}; error: {e}", replay())),
        }
    }
    for _ in 0..counts.spohn_generators {
        let p = random_params(rng);
        let baths = random_heatpump_baths(rng);
        let replay = || format!("{} baths=[{}]", describe(&p), describe_baths(&baths));
        let gen = match heatpump_generator(&p, &baths) {
            Ok(g) => g,
            Err(e) => {
                spohn.record(f64::INFINITY, || format!("{}; error: {e}", replay()));
                continue;
            }
        };
        let st = match stationary_state(&gen) {
            Ok(s) => s,
            Err(e) => {
                spohn.record(f64::INFINITY, || format!("{}; error: {e}", replay()));
                continue;
            }
        };
        let mut worst = f64::NEG_INFINITY;
        let mut worst_state = None;
        for _ in 0..counts.spohn_states {
            let rho = random_state(rng, Basis::Dressed);
            let v = spohn_with_stationary(&gen.superop, &rho, &st).unwrap_or(f64::INFINITY);
            if v > worst {
                worst = v;
                worst_state = Some(rho);
            }
        }
        spohn.record(worst, || format!("{} rho={:?}", replay(), worst_state.map(|s| *s.matrix().entries())));
        let energy: Result<f64> = (0..8)
            .map(|k| limit_cycle_energy(&gen, k as f64 * p.period() / 8.0))
            .collect::<Result<Vec<_>>>()
            .map(|v| v.iter().map(|e| (e - v[0]).abs()).fold(0.0, f64::max));
        cycle.record_result(energy, replay);
    }
    for _ in 0..counts.trajectories {
        let p = random_params(rng);
        let baths = random_heatpump_baths(rng);
        let rho0 = DensityMatrix::from_bloch(random_bloch(rng, 0.99), Basis::Dressed)
            .expect("inside the ball");
        let replay = || format!("{} baths=[{}] rho0={:?}", describe(&p), describe_baths(&baths), rho0.matrix().entries());
        let gen = match heatpump_generator(&p, &baths) {
            Ok(g) => g,
            Err(e) => {
                sigma.record(f64::INFINITY, || format!("{}; error: {e}", replay()));
                continue;
            }
        };
        let times: Vec<f64> = (0..40).map(|k| 0.37 * k as f64).collect();
        sigma.record_result(entropy_production(&gen, &rho0, &times).map(|tr| -tr.min()), replay);
        let t = 0.7 * p.period();
        let err = evolve_schrodinger(&gen, &rho0, t).and_then(|rho_t| {
            let mut err: f64 = 0.0;
            for local in &gen.locals {
                let a = local_heat_current(&gen, local, &rho_t, t)?;
                let b = local_heat_current_entropic(&gen, local, &rho_t, t)?;
                err = err.max((a - b).abs());
            }
            Ok(err)
        });
        forms.record_result(err, replay);
    }
    [cf_d, cf_e, ratio, second, spohn, sigma, forms, cycle].into_iter().map(|t| t.finish(tol)).collect()
}

/// Heat-pump setting used for the detuning sweep: `Ω = 10`, `g = 0.005`,
/// `Gᵉ(ω) = ω³` at `T_e = 0.5`, flat `Gᵈ = 0.5` at `T_d = 1`.
pub fn sweep_setting() -> (f64, f64, BathSpec, BathSpec) {
    let e = BathSpec::new("e", Channel::Sigma1, 0.5, SpectralDensity::Cubic { a: 1.0 }).expect("valid bath");
    let d = BathSpec::new("d", Channel::Sigma3, 1.0, SpectralDensity::Flat { value: 0.5 }).expect("valid bath");
    (10.0, 0.005, e, d)
}

/// `Δ ∈ [−0.05, 0.05]` in steps of 0.005.
pub fn sweep_detunings() -> Vec<f64> {
    (-10..=10).map(|i| i as f64 * 0.005).collect()
}

/// Number of sweep points whose regime or `J̃ᵉ` sign contradicts the expected
/// pattern, or where the small-detuning conditions fail.
pub fn regime_switch_check(tol: &BTreeMap<String, f64>) -> Check {
    let mut t = Tracker::at_most("thermo.regime_switch", 0.0);
    let (w, g, e, d) = sweep_setting();
    match detuning_sweep(w, g, &e, &d, &sweep_detunings(), 10.0) {
        Ok(sweep) => {
            let bad = sweep
                .iter()
                .filter(|pt| {
                    let expected = if pt.detuning > 0.0 {
                        Some(Regime::Cooling)
                    } else if pt.detuning < 0.0 {
                        Some(Regime::Heating)
                    } else {
                        None
                    };
                    pt.j_e >= 0.0 || pt.approx.is_none() || expected.is_some_and(|r| r != pt.regime)
                })
                .count();
            t.record(bad as f64, || format!("Omega={w:e} g={g:e} baths=[{}]", describe_baths(&[e.clone(), d.clone()])));
        }
        Err(err) => t.record(f64::INFINITY, || format!("error: {err}")),
    }
    t.finish(tol)
}

/// Largest `|J̃ᵈ − 𝒟Δ|/|𝒟Δ|` over the nonzero sweep detunings.
pub fn small_detuning_check(tol: &BTreeMap<String, f64>) -> Check {
    let mut t = Tracker::at_most("thermo.small_detuning", 0.05);
    let (w, g, e, d) = sweep_setting();
    match detuning_sweep(w, g, &e, &d, &sweep_detunings(), 10.0) {
        Ok(sweep) => {
            for pt in sweep.iter().filter(|pt| pt.detuning != 0.0) {
                let v = match pt.approx {
                    Some(a) => (pt.j_d - a.j_d).abs() / a.j_d.abs(),
                    None => f64::INFINITY,
                };
                t.record(v, || format!("Omega={w:e} g={g:e} Delta={:e}", pt.detuning));
            }
        }
        Err(err) => t.record(f64::INFINITY, || format!("error: {err}")),
    }
    t.finish(tol)
}
