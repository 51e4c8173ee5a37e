//! Heat currents, power and entropy production of the driven atom.
//!
//! The current delivered by bath `j` through the channel `(q, ω̄)` is
//! `((ω̄+qΩ)/ω̄)·Tr[(𝓛ʲ_{qω̄}(t)ρ(t))·H̄(t)]` with `H̄(t) = U(t)H̄U†(t)`.
//! Channels with `ω̄ = 0` carry no current: their generators are dressed
//! dephasing and the trace factor vanishes identically.

use std::fmt;

use crate::algebra::{Operator2, SuperOp};
use crate::dissipator::{
    evolve_schrodinger, schrodinger_superop, stationary_state, stationary_state_of, BathSpec, Channel, DensityMatrix,
    Generator, LocalGenerator,
};
use crate::error::{Error, Result};
use crate::floquet::SystemParams;

/// Eigenvalue floor applied before taking logarithms of states.
pub const LOG_CLIP: f64 = 1e-14;

/// Weight `(ω̄+qΩ)/ω̄` of a channel, or `None` for `ω̄ = 0`.
pub fn channel_weight(local: &LocalGenerator) -> Option<f64> {
    let wb = local.op.omega_bar;
    (wb > 0.0).then(|| local.op.combined_frequency() / wb)
}

/// `ln ρ` with eigenvalues clipped at [`LOG_CLIP`].
pub fn log_state(rho: &Operator2) -> Result<Operator2> {
    rho.map_hermitian(|x| x.max(LOG_CLIP).ln())
}

/// von Neumann entropy `−Tr ρ ln ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let l = log_state(rho.matrix())?;
    Ok(-(*rho.matrix() * l).trace().re)
}

/// Local current of one channel at time `t` for a Schrödinger-picture state.
pub fn local_heat_current(gen: &Generator, local: &LocalGenerator, rho_t: &DensityMatrix, t: f64) -> Result<f64> {
    let Some(weight) = channel_weight(local) else {
        return Ok(0.0);
    };
    let basis = gen.dressed_basis();
    let l_t = schrodinger_superop(basis, &local.superop, t);
    let h_t = basis.mean_hamiltonian().conjugate_by(&basis.propagator(t))?;
    Ok(weight * (l_t.try_apply(rho_t.matrix())? * h_t).trace().re)
}

/// Gibbs-like stationary state of one channel at time `t`,
/// `U(t)·exp(−((ω̄+qΩ)/ω̄)·H̄/T)/Z·U†(t)`.
pub fn local_gibbs_state(gen: &Generator, local: &LocalGenerator, t: f64) -> Result<DensityMatrix> {
    let Some(weight) = channel_weight(local) else {
        return Err(Error::InvalidParams("channel with zero Bohr quasifrequency has no Gibbs-like state".into()));
    };
    if local.temperature <= 0.0 {
        return Err(Error::InvalidParams(format!("bath '{}' is at zero temperature", local.bath)));
    }
    let basis = gen.dressed_basis();
    let beta = weight / local.temperature;
    let h = basis.mean_hamiltonian();
    let w = h.map_hermitian(|e| (-beta * e).exp())?;
    let z = w.trace().re;
    let rho = w.scale_re(1.0 / z).conjugate_by(&basis.propagator(t))?;
    DensityMatrix::new(rho)
}

/// The same current written as `−T·Tr[(𝓛ρ)·ln ρ̃_{qω̄}(t)]`; finite-temperature
/// baths only.
pub fn local_heat_current_entropic(gen: &Generator, local: &LocalGenerator, rho_t: &DensityMatrix, t: f64) -> Result<f64> {
    if channel_weight(local).is_none() {
        return Ok(0.0);
    }
    let gibbs = local_gibbs_state(gen, local, t)?;
    let l_t = schrodinger_superop(gen.dressed_basis(), &local.superop, t);
    let log = log_state(gibbs.matrix())?;
    Ok(-local.temperature * (l_t.try_apply(rho_t.matrix())? * log).trace().re)
}

/// Current of bath `label` in an interaction-picture state, summing every
/// channel with `ω̄ > 0`.
pub fn interaction_current(gen: &Generator, label: &str, rho: &DensityMatrix) -> Result<f64> {
    if gen.bath(label).is_none() {
        return Err(Error::BathConfig(format!("unknown bath '{label}'")));
    }
    let h = gen.dressed_basis().mean_hamiltonian();
    let mut total = 0.0;
    for local in gen.locals_for(label) {
        if let Some(weight) = channel_weight(local) {
            total += weight * (local.superop.try_apply(rho.matrix())? * h).trace().re;
        }
    }
    Ok(total)
}

/// Stationary current `J̃ʲ` evaluated on the kernel of the generator.
pub fn stationary_current(gen: &Generator, label: &str) -> Result<f64> {
    let rho = stationary_state(gen)?;
    interaction_current(gen, label, &rho)
}

/// Stationary currents of all baths, in configuration order.
pub fn stationary_currents(gen: &Generator) -> Result<Vec<(String, f64)>> {
    let rho = stationary_state(gen)?;
    gen.baths
        .iter()
        .map(|b| Ok((b.label.clone(), interaction_current(gen, &b.label, &rho)?)))
        .collect()
}

/// `P̃ = −Σ_j J̃ʲ`.
pub fn stationary_power(currents: &[(String, f64)]) -> f64 {
    -currents.iter().map(|c| c.1).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Cooling,
    Heating,
    Other,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Cooling => "Cooling",
            Regime::Heating => "Heating",
            Regime::Other => "Other",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cooling iff `J̃ᵈ > 0` and `J̃ᵉ < 0`; Heating iff both are negative.
pub fn classify_regime(j_d: f64, j_e: f64) -> Regime {
    if j_d > 0.0 && j_e < 0.0 {
        Regime::Cooling
    } else if j_d < 0.0 && j_e < 0.0 {
        Regime::Heating
    } else {
        Regime::Other
    }
}

/// Stationary thermodynamic summary of one generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoReport {
    pub state: DensityMatrix,
    pub currents: Vec<(String, f64)>,
    pub power: f64,
    /// `−Σ_j J̃ʲ/Tʲ` over finite-temperature baths.
    pub entropy_rate: f64,
    /// Set when a zero-temperature bath was left out of `entropy_rate`.
    pub vacuum_excluded: bool,
}

impl ThermoReport {
    pub fn current(&self, label: &str) -> Option<f64> {
        self.currents.iter().find(|c| c.0 == label).map(|c| c.1)
    }
}

pub fn thermo_report(gen: &Generator) -> Result<ThermoReport> {
    let state = stationary_state(gen)?;
    let currents: Vec<(String, f64)> = gen
        .baths
        .iter()
        .map(|b| Ok((b.label.clone(), interaction_current(gen, &b.label, &state)?)))
        .collect::<Result<_>>()?;
    let (entropy_rate, vacuum_excluded) = entropy_flux(&gen.baths, &currents);
    Ok(ThermoReport {
        state,
        power: stationary_power(&currents),
        currents,
        entropy_rate,
        vacuum_excluded,
    })
}

fn entropy_flux(baths: &[BathSpec], currents: &[(String, f64)]) -> (f64, bool) {
    let mut rate = 0.0;
    let mut excluded = false;
    for (b, (_, j)) in baths.iter().zip(currents) {
        if b.temperature > 0.0 {
            rate -= j / b.temperature;
        } else {
            excluded = true;
        }
    }
    (rate, excluded)
}

/// Entropy production along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTrace {
    pub points: Vec<(f64, f64)>,
    pub vacuum_excluded: bool,
}

impl EntropyTrace {
    pub fn min(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }
}

/// `σ(t) = −Tr[ρ̇ ln ρ] − Σ_j Jʲ(t)/Tʲ` along the Schrödinger-picture
/// trajectory from the dressed-basis state `rho0`. Zero-temperature baths are
/// left out of the sum and flagged.
pub fn entropy_production(gen: &Generator, rho0: &DensityMatrix, times: &[f64]) -> Result<EntropyTrace> {
    let mut points = Vec::with_capacity(times.len());
    let mut excluded = false;
    for &t in times {
        let rho = evolve_schrodinger(gen, rho0, t)?;
        let rho_dot = gen.schrodinger_rhs(t, rho.matrix());
        let log = log_state(rho.matrix())?;
        let mut sigma = -(rho_dot * log).trace().re;
        for local in &gen.locals {
            if local.temperature > 0.0 {
                sigma -= local_heat_current(gen, local, &rho, t)? / local.temperature;
            } else {
                excluded = true;
            }
        }
        points.push((t, sigma));
    }
    Ok(EntropyTrace { points, vacuum_excluded: excluded })
}

/// `Tr[(𝓛ρ)(ln ρ − ln ρ̃)]`, non-positive for every LGKS generator with a
/// unique stationary state `ρ̃`.
pub fn spohn_functional(l: &SuperOp, rho: &DensityMatrix) -> Result<f64> {
    let st = stationary_state_of(l)?;
    spohn_with_stationary(l, rho, &st)
}

pub fn spohn_with_stationary(l: &SuperOp, rho: &DensityMatrix, st: &DensityMatrix) -> Result<f64> {
    let diff = log_state(rho.matrix())? - log_state(st.matrix())?;
    Ok((l.try_apply(rho.matrix())? * diff).trace().re)
}

/// Heat-pump rates with `δ₀ = (2g/Ω_R)²Gᵈ(Ω_R)` and
/// `δ± = ((Ω_R±Δ)/(2Ω_R))²Gᵉ(Ω±)`, `Ω± = Ω ± Ω_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatPumpRates {
    pub delta0: f64,
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub rabi: f64,
    pub drive: f64,
}

impl HeatPumpRates {
    pub fn new(p: &SystemParams, electromagnetic: &BathSpec, dephasing: &BathSpec) -> Result<Self> {
        check_heatpump_baths(electromagnetic, dephasing)?;
        let (d, g, r, w) = (p.detuning(), p.g(), p.rabi(), p.drive());
        if r == 0.0 {
            return Err(Error::DegenerateHamiltonian);
        }
        let (om, op) = (w - r, w + r);
        Ok(Self {
            delta0: (2.0 * g / r).powi(2) * dephasing.density.eval(r),
            delta_minus: ((r - d) / (2.0 * r)).powi(2) * electromagnetic.density.eval(om),
            delta_plus: ((r + d) / (2.0 * r)).powi(2) * electromagnetic.density.eval(op),
            omega_minus: om,
            omega_plus: op,
            rabi: r,
            drive: w,
        })
    }
}

fn check_heatpump_baths(e: &BathSpec, d: &BathSpec) -> Result<()> {
    if e.channel != Channel::Sigma1 {
        return Err(Error::ChannelMismatch { label: e.label.clone(), expected: Channel::Sigma1, found: e.channel });
    }
    if d.channel != Channel::Sigma3 {
        return Err(Error::ChannelMismatch { label: d.label.clone(), expected: Channel::Sigma3, found: d.channel });
    }
    for b in [e, d] {
        if !(b.temperature > 0.0) {
            return Err(Error::BathConfig(format!("heat-pump bath '{}' needs a positive temperature", b.label)));
        }
    }
    Ok(())
}

fn check_temperatures(te: f64, td: f64) -> Result<()> {
    if !(te > 0.0 && td > 0.0) {
        return Err(Error::BathConfig(format!("temperatures must be positive, got T_e = {te}, T_d = {td}")));
    }
    Ok(())
}

/// Stationary population ratio `ρ̃₁₁/ρ̃₂₂`.
pub fn heatpump_steady_ratio(r: &HeatPumpRates, te: f64, td: f64) -> Result<f64> {
    check_temperatures(te, td)?;
    let num = (-r.rabi / td).exp() * r.delta0 + r.delta_minus + (-r.omega_plus / te).exp() * r.delta_plus;
    let den = r.delta0 + (-r.omega_minus / te).exp() * r.delta_minus + r.delta_plus;
    Ok(num / den)
}

/// Closed-form stationary currents `(J̃ᵈ, J̃ᵉ, 𝒦)`.
pub fn heatpump_currents(r: &HeatPumpRates, te: f64, td: f64) -> Result<(f64, f64, f64)> {
    check_temperatures(te, td)?;
    let (d0, dm, dp) = (r.delta0, r.delta_minus, r.delta_plus);
    let (om, op, rabi, w) = (r.omega_minus, r.omega_plus, r.rabi, r.drive);
    let xm = (-om / te).exp();
    let xp = (-op / te).exp();
    let xd = (-rabi / td).exp();
    let k = ((1.0 + xm) * dm + (1.0 + xp) * dp + (1.0 + xd) * d0) / rabi;
    let j_d = -d0 / k * (dm * (1.0 - (-(rabi / td + om / te)).exp()) + dp * (xp - xd));
    let j_e = (2.0 * ((-2.0 * w / te).exp() - 1.0) * w * dm * dp
        + ((-(om / te + rabi / td)).exp() - 1.0) * om * d0 * dm
        + (xp - xd) * op * d0 * dp)
        / (rabi * k);
    Ok((j_d, j_e, k))
}

/// Small-detuning approximation `(J̃ᵈ ≈ 𝒟Δ, J̃ᵉ, 𝒟)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallDetuning {
    pub j_d: f64,
    pub j_e: f64,
    pub d: f64,
}

/// Checks `Ω ≫ T_e, T_d`, `Ω_R ≪ Ω`, `Ω_R ≪ T_d` with "≫" read as a ratio of
/// at least `margin`, then evaluates the small-detuning currents.
pub fn small_detuning_currents(
    p: &SystemParams,
    electromagnetic: &BathSpec,
    dephasing: &BathSpec,
    margin: f64,
) -> Result<SmallDetuning> {
    let r = HeatPumpRates::new(p, electromagnetic, dephasing)?;
    let (te, td) = (electromagnetic.temperature, dephasing.temperature);
    let (w, rabi) = (p.drive(), p.rabi());
    let mut failed = Vec::new();
    if w < margin * te {
        failed.push(format!("Omega >> T_e: {w} < {margin} * {te}"));
    }
    if w < margin * td {
        failed.push(format!("Omega >> T_d: {w} < {margin} * {td}"));
    }
    if w < margin * rabi {
        failed.push(format!("Omega_R << Omega: {w} < {margin} * {rabi}"));
    }
    if td < margin * rabi {
        failed.push(format!("Omega_R << T_d: {td} < {margin} * {rabi}"));
    }
    if !failed.is_empty() {
        return Err(Error::ConditionsViolated(failed));
    }
    let sum = 2.0 * r.delta0 + r.delta_minus + r.delta_plus;
    let d = r.delta0 * electromagnetic.density.eval(w) / sum;
    let j_e = -w * (2.0 * r.delta_minus * r.delta_plus + r.delta0 * (r.delta_minus + r.delta_plus)) / sum;
    Ok(SmallDetuning { j_d: d * p.detuning(), j_e, d })
}


/// One point of a detuning sweep at fixed drive frequency and coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub detuning: f64,
    pub j_d: f64,
    pub j_e: f64,
    pub power: f64,
    pub regime: Regime,
    /// Small-detuning approximation, when its conditions hold.
    pub approx: Option<SmallDetuning>,
}

/// Closed-form heat-pump currents over `ω₀ = Ω + Δ` for each `Δ`.
pub fn detuning_sweep(
    drive: f64,
    g: f64,
    electromagnetic: &BathSpec,
    dephasing: &BathSpec,
    detunings: &[f64],
    margin: f64,
) -> Result<Vec<SweepPoint>> {
    detunings
        .iter()
        .map(|&delta| {
            let p = SystemParams::from_detuning(drive, delta, g)?;
            let r = HeatPumpRates::new(&p, electromagnetic, dephasing)?;
            let (j_d, j_e, _) = heatpump_currents(&r, electromagnetic.temperature, dephasing.temperature)?;
            let approx = match small_detuning_currents(&p, electromagnetic, dephasing, margin) {
                Ok(a) => Some(a),
                Err(Error::ConditionsViolated(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(SweepPoint {
                detuning: delta,
                j_d,
                j_e,
                power: -(j_d + j_e),
                regime: classify_regime(j_d, j_e),
                approx,
            })
        })
        .collect()
}

/// `Tr[ρ(t)H̄(t)]` on the limit cycle `ρ(t) = U(t)ρ̃U†(t)`.
pub fn limit_cycle_energy(gen: &Generator, t: f64) -> Result<f64> {
    let basis = gen.dressed_basis();
    let st = stationary_state(gen)?;
    let u = basis.propagator(t);
    let rho = st.matrix().conjugate_by(&u)?;
    let h = basis.mean_hamiltonian().conjugate_by(&u)?;
    Ok((rho * h).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Basis;
    use crate::dissipator::{total_generator, SpectralDensity};
    use crate::floquet::DressedBasis;
    use crate::random::{random_state, rng};
    use approx::assert_relative_eq;

    fn pump(delta: f64, te: f64, td: f64) -> (Generator, [BathSpec; 2]) {
        let p = SystemParams::from_detuning(10.0, delta, 0.5).unwrap();
        let b = DressedBasis::new(&p).unwrap();
        let baths = [
            BathSpec::new("e", Channel::Sigma1, te, SpectralDensity::Flat { value: 1.0 }).unwrap(),
            BathSpec::new("d", Channel::Sigma3, td, SpectralDensity::Flat { value: 0.5 }).unwrap(),
        ];
        (total_generator(&b, &baths).unwrap(), baths)
    }

    #[test]
    fn closed_forms_match_generator() {
        let (gen, baths) = pump(0.1, 0.5, 2.0);
        let r = HeatPumpRates::new(gen.params(), &baths[0], &baths[1]).unwrap();
        let (j_d, j_e, k) = heatpump_currents(&r, 0.5, 2.0).unwrap();
        assert!(k > 0.0);
        let scale = j_d.abs().max(j_e.abs());
        assert!((stationary_current(&gen, "d").unwrap() - j_d).abs() < 1e-12 * scale.max(1.0));
        assert!((stationary_current(&gen, "e").unwrap() - j_e).abs() < 1e-12 * scale.max(1.0));
        assert!(j_d / 2.0 + j_e / 0.5 <= 1e-10);
        let st = stationary_state(&gen).unwrap();
        let ratio = heatpump_steady_ratio(&r, 0.5, 2.0).unwrap();
        assert_relative_eq!(st.population(0) / st.population(1), ratio, epsilon = 1e-12);
    }

    #[test]
    fn zero_dephasing_rate_gives_no_dephasing_current() {
        let p = SystemParams::from_detuning(10.0, 0.1, 0.5).unwrap();
        let e = BathSpec::new("e", Channel::Sigma1, 0.5, SpectralDensity::Flat { value: 1.0 }).unwrap();
        let d = BathSpec::new("d", Channel::Sigma3, 2.0, SpectralDensity::Flat { value: 0.0 }).unwrap();
        let r = HeatPumpRates::new(&p, &e, &d).unwrap();
        assert_eq!(heatpump_currents(&r, 0.5, 2.0).unwrap().0, 0.0);
    }

    #[test]
    fn ratio_limit_at_cold_bath() {
        let p = SystemParams::from_detuning(10.0, 0.1, 0.5).unwrap();
        let e = BathSpec::new("e", Channel::Sigma1, 1e-3, SpectralDensity::Flat { value: 1.0 }).unwrap();
        let d = BathSpec::new("d", Channel::Sigma3, 2.0, SpectralDensity::Flat { value: 0.0 }).unwrap();
        let r = HeatPumpRates::new(&p, &e, &d).unwrap();
        assert_relative_eq!(
            heatpump_steady_ratio(&r, 1e-3, 2.0).unwrap(),
            r.delta_minus / r.delta_plus,
            epsilon = 1e-14
        );
    }

    #[test]
    fn equal_temperatures_consume_power() {
        let (gen, _) = pump(-0.2, 1.0, 1.0);
        let rep = thermo_report(&gen).unwrap();
        assert!(rep.power >= 0.0);
        assert_relative_eq!(rep.entropy_rate, rep.power / 1.0, epsilon = 1e-12);
        let total: f64 = rep.currents.iter().map(|c| c.1).sum();
        assert_eq!(rep.power, -total);
    }

    #[test]
    fn vacuum_bath_absorbs_energy() {
        let p = SystemParams::new(0.86, 0.85, 0.075).unwrap();
        let gen = total_generator(&DressedBasis::new(&p).unwrap(), &[BathSpec::vacuum("e", 1.0).unwrap()]).unwrap();
        let rep = thermo_report(&gen).unwrap();
        assert!(rep.current("e").unwrap() < 0.0);
        assert!(rep.vacuum_excluded);
    }

    #[test]
    fn local_current_forms_agree() {
        let (gen, _) = pump(0.3, 0.8, 1.5);
        let mut r = rng(11);
        for _ in 0..20 {
            let rho = random_state(&mut r, Basis::Dressed);
            let t = 0.37;
            for local in &gen.locals {
                let a = local_heat_current(&gen, local, &rho, t).unwrap();
                let b = local_heat_current_entropic(&gen, local, &rho, t).unwrap();
                assert!((a - b).abs() < 1e-10, "{a} {b}");
                if let Ok(gibbs) = local_gibbs_state(&gen, local, t) {
                    assert!(local_heat_current(&gen, local, &gibbs, t).unwrap().abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn schrodinger_currents_match_interaction_picture() {
        let (gen, _) = pump(0.3, 0.8, 1.5);
        let rho0 = random_state(&mut rng(2), Basis::Dressed);
        let t = 0.9;
        let rho_t = evolve_schrodinger(&gen, &rho0, t).unwrap();
        let rho_i = crate::dissipator::evolve_interaction(&gen, &rho0, t).unwrap();
        for label in ["e", "d"] {
            let sch: f64 = gen.locals_for(label).map(|l| local_heat_current(&gen, l, &rho_t, t).unwrap()).sum();
            let int = interaction_current(&gen, label, &rho_i).unwrap();
            assert!((sch - int).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_frequency_channels_carry_nothing() {
        let (gen, _) = pump(0.3, 0.8, 1.5);
        let rho = random_state(&mut rng(5), Basis::Dressed);
        let h = gen.dressed_basis().mean_hamiltonian();
        for local in gen.locals.iter().filter(|l| l.op.omega_bar == 0.0) {
            assert!((local.superop.apply(rho.matrix()) * h).trace().norm() < 1e-15);
        }
    }

    #[test]
    fn entropy_production_on_limit_cycle_is_constant() {
        let (gen, _) = pump(0.3, 0.8, 1.5);
        let st = stationary_state(&gen).unwrap();
        let rep = thermo_report(&gen).unwrap();
        let times: Vec<f64> = (0..8).map(|i| i as f64 * 0.17).collect();
        let tr = entropy_production(&gen, &st, &times).unwrap();
        for (_, s) in &tr.points {
            assert!((s - rep.entropy_rate).abs() < 1e-10);
        }
        assert!(rep.entropy_rate >= 0.0);
    }

    #[test]
    fn spohn_holds() {
        let (gen, _) = pump(-0.3, 0.8, 1.5);
        let mut r = rng(9);
        for _ in 0..100 {
            let rho = random_state(&mut r, Basis::Dressed);
            assert!(spohn_functional(&gen.superop, &rho).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(1.0, -1.0), Regime::Cooling);
        assert_eq!(classify_regime(-1.0, -1.0), Regime::Heating);
        assert_eq!(classify_regime(0.0, -1.0), Regime::Other);
        assert_eq!(classify_regime(1.0, 1.0), Regime::Other);
    }

    #[test]
    fn small_detuning_conditions() {
        let p = SystemParams::from_detuning(10.0, 0.02, 0.005).unwrap();
        let e = BathSpec::new("e", Channel::Sigma1, 0.5, SpectralDensity::Cubic { a: 1.0 }).unwrap();
        let d = BathSpec::new("d", Channel::Sigma3, 1.0, SpectralDensity::Flat { value: 0.5 }).unwrap();
        let s = small_detuning_currents(&p, &e, &d, 10.0).unwrap();
        assert!(s.d > 0.0 && s.j_d > 0.0 && s.j_e < 0.0);
        let r = HeatPumpRates::new(&p, &e, &d).unwrap();
        let (j_d, _, _) = heatpump_currents(&r, 0.5, 1.0).unwrap();
        assert!(((j_d - s.j_d) / s.j_d).abs() < 0.05);
        let hot = BathSpec::new("d", Channel::Sigma3, 5.0, SpectralDensity::Flat { value: 0.5 }).unwrap();
        match small_detuning_currents(&p, &e, &hot, 10.0) {
            Err(Error::ConditionsViolated(v)) => assert_eq!(v.len(), 1),
            other => panic!("{other:?}"),
        }
        let zero = SystemParams::from_detuning(10.0, 0.0, 0.005).unwrap();
        assert_eq!(small_detuning_currents(&zero, &e, &d, 10.0).unwrap().j_d, 0.0);
    }

    #[test]
    fn sweep_switches_regime_at_resonance() {
        let e = BathSpec::new("e", Channel::Sigma1, 0.5, SpectralDensity::Cubic { a: 1.0 }).unwrap();
        let d = BathSpec::new("d", Channel::Sigma3, 1.0, SpectralDensity::Flat { value: 0.5 }).unwrap();
        let deltas: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.005).collect();
        let sweep = detuning_sweep(10.0, 0.005, &e, &d, &deltas, 10.0).unwrap();
        for pt in &sweep {
            assert!(pt.j_e < 0.0);
            if pt.detuning > 0.0 {
                assert_eq!(pt.regime, Regime::Cooling);
            } else if pt.detuning < 0.0 {
                assert_eq!(pt.regime, Regime::Heating);
            }
            assert!(pt.approx.is_some());
        }
    }

    #[test]
    fn heatpump_bath_checks() {
        let p = SystemParams::from_detuning(10.0, 0.1, 0.5).unwrap();
        let e = BathSpec::new("e", Channel::Sigma1, 0.5, SpectralDensity::Flat { value: 1.0 }).unwrap();
        let d = BathSpec::new("d", Channel::Sigma3, 2.0, SpectralDensity::Flat { value: 0.5 }).unwrap();
        assert!(HeatPumpRates::new(&p, &d, &e).is_err());
        let cold = BathSpec::vacuum("e", 1.0).unwrap();
        assert!(HeatPumpRates::new(&p, &cold, &d).is_err());
        assert!(heatpump_currents(&HeatPumpRates::new(&p, &e, &d).unwrap(), 0.0, 1.0).is_err());
    }

    #[test]
    fn limit_cycle_energy_is_constant() {
        let (gen, _) = pump(0.3, 0.8, 1.5);
        let e0 = limit_cycle_energy(&gen, 0.0).unwrap();
        for t in [0.1, 0.3, 0.62] {
            assert!((limit_cycle_energy(&gen, t).unwrap() - e0).abs() < 1e-12);
        }
    }
}
