//! Baths, local LGKS generators and master-equation evolution.
//!
//! Each Fourier component `S_q(ω̄)` of a bath's coupling contributes the local
//! generator
//! `𝓛_{qω̄} = G(ω̄+qΩ)·D[S_q(ω̄)] + G(−ω̄−qΩ)·D[S_q(ω̄)†]`,
//! with `D[S]ρ = SρS† − ½{S†S, ρ}`. The interaction-picture generator is the
//! sum over baths and over the representatives of [`TransitionSet`]; the
//! Schrödinger-picture solution is `ρ(t) = U(t)(e^{t𝓛}ρ(0))U†(t)`.

use std::fmt;

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64 as C64;

use crate::algebra::{lindblad_superop, Basis, Operator2, SuperOp, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::floquet::{DressedBasis, SystemParams};
use crate::ode::rk4_integrate;
use crate::transitions::{transition_ops, TransitionOperator, TransitionSet};

/// Which system operator couples to the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// `σ¹ ⊗ F`, the dipole coupling to the electromagnetic field.
    Sigma1,
    /// `σ³ ⊗ F`, pure dephasing in the absence of driving.
    Sigma3,
}

impl Channel {
    /// The coupling operator in the lab basis.
    pub fn operator(&self) -> Operator2 {
        match self {
            Channel::Sigma1 => Operator2::pauli(1, Basis::Lab),
            Channel::Sigma3 => Operator2::pauli(3, Basis::Lab),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Sigma1 => write!(f, "sigma1"),
            Channel::Sigma3 => write!(f, "sigma3"),
        }
    }
}

/// Spectral density `G(ω)` for `ω > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity {
    /// `G(ω) = A·ω³`, the electromagnetic vacuum.
    Cubic { a: f64 },
    /// `G(ω) = value`.
    Flat { value: f64 },
    /// Piecewise-linear interpolation through `(ω, G)` points sorted by `ω`,
    /// held constant beyond the first and last point.
    Tabulated { points: Vec<(f64, f64)> },
}

impl SpectralDensity {
    /// Evaluates the density at `ω ≥ 0`; at `ω = 0` this is the limit `G(0⁺)`.
    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            SpectralDensity::Cubic { a } => a * omega.powi(3),
            SpectralDensity::Flat { value } => *value,
            SpectralDensity::Tabulated { points } => {
                let first = points[0];
                let last = points[points.len() - 1];
                if omega <= first.0 {
                    return first.1;
                }
                if omega >= last.0 {
                    return last.1;
                }
                let i = points.partition_point(|p| p.0 <= omega);
                let (x0, y0) = points[i - 1];
                let (x1, y1) = points[i];
                y0 + (y1 - y0) * (omega - x0) / (x1 - x0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BathConfig(msg));
        match self {
            SpectralDensity::Cubic { a } if !(*a >= 0.0) || !a.is_finite() => {
                bad(format!("cubic amplitude must be non-negative, got {a}"))
            }
            SpectralDensity::Flat { value } if !(*value >= 0.0) || !value.is_finite() => {
                bad(format!("flat density must be non-negative, got {value}"))
            }
            SpectralDensity::Tabulated { points } => {
                if points.is_empty() {
                    return bad("tabulated density needs at least one point".into());
                }
                for w in points.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return bad("tabulated frequencies must be strictly increasing".into());
                    }
                }
                if let Some(p) = points.iter().find(|p| !(p.1 >= 0.0) || !p.0.is_finite() || !p.1.is_finite()) {
                    return bad(format!("tabulated density has invalid point {p:?}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A heat bath: coupling channel, temperature (0 = vacuum) and spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub label: String,
    pub channel: Channel,
    pub temperature: f64,
    pub density: SpectralDensity,
}

impl BathSpec {
    pub fn new(label: impl Into<String>, channel: Channel, temperature: f64, density: SpectralDensity) -> Result<Self> {
        let bath = Self {
            label: label.into(),
            channel,
            temperature,
            density,
        };
        bath.validate()?;
        Ok(bath)
    }

    /// Zero-temperature electromagnetic bath with `G(ω) = Aω³`.
    pub fn vacuum(label: impl Into<String>, a: f64) -> Result<Self> {
        Self::new(label, Channel::Sigma1, 0.0, SpectralDensity::Cubic { a })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::BathConfig(format!(
                "bath '{}' temperature must be non-negative, got {}",
                self.label, self.temperature
            )));
        }
        self.density.validate()
    }

    pub fn is_vacuum(&self) -> bool {
        self.temperature == 0.0
    }

    /// KMS-extended density: `G(ω)` for `ω > 0`, `e^{−|ω|/T}G(|ω|)` for
    /// `ω < 0` (zero at `T = 0`), and `G(0⁺)` at `ω = 0`.
    pub fn kms_density(&self, omega: f64) -> f64 {
        kms_density(self, omega)
    }
}

/// See [`BathSpec::kms_density`].
pub fn kms_density(bath: &BathSpec, omega: f64) -> f64 {
    if omega >= 0.0 {
        bath.density.eval(omega)
    } else if bath.temperature == 0.0 {
        0.0
    } else {
        (omega / bath.temperature).exp() * bath.density.eval(-omega)
    }
}

/// One local generator `𝓛^j_{qω̄}` together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGenerator {
    pub bath: String,
    pub channel: Channel,
    pub temperature: f64,
    pub op: TransitionOperator,
    /// `G(ω̄ + qΩ)`, multiplying `D[S]`.
    pub rate_forward: f64,
    /// `G(−ω̄ − qΩ)`, multiplying `D[S†]`.
    pub rate_backward: f64,
    pub superop: SuperOp,
}

/// Builds `𝓛_{qω̄}` for one representative transition operator of `bath`.
///
/// The self-conjugate component `q = 0, ω̄ = 0` is a single Fourier term and
/// enters once, as `G(0)·D[S]`.
pub fn local_generator(op: &TransitionOperator, channel: Channel, bath: &BathSpec) -> Result<LocalGenerator> {
    if channel != bath.channel {
        return Err(Error::ChannelMismatch {
            label: bath.label.clone(),
            expected: bath.channel,
            found: channel,
        });
    }
    let nu = op.combined_frequency();
    let forward = bath.kms_density(nu);
    let self_conjugate = op.key() == (0, 0);
    let backward = if self_conjugate { 0.0 } else { bath.kms_density(-nu) };
    for (w, v) in [(nu, forward), (-nu, backward)] {
        if !(v >= 0.0) {
            return Err(Error::NegativeDensity { omega: w, value: v });
        }
    }
    let mut superop = lindblad_superop(&op.matrix, forward)?;
    if !self_conjugate {
        superop = superop + lindblad_superop(&op.matrix.dagger(), backward)?;
    }
    Ok(LocalGenerator {
        bath: bath.label.clone(),
        channel,
        temperature: bath.temperature,
        op: *op,
        rate_forward: forward,
        rate_backward: backward,
        superop,
    })
}

/// Interaction-picture generator with per-term provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub superop: SuperOp,
    pub locals: Vec<LocalGenerator>,
    pub baths: Vec<BathSpec>,
    basis: DressedBasis,
}

impl Generator {
    pub fn dressed_basis(&self) -> &DressedBasis {
        &self.basis
    }

    pub fn params(&self) -> &SystemParams {
        self.basis.params()
    }

    /// Local generators belonging to one bath.
    pub fn locals_for<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a LocalGenerator> + 'a {
        self.locals.iter().filter(move |l| l.bath == label)
    }

    pub fn bath(&self, label: &str) -> Option<&BathSpec> {
        self.baths.iter().find(|b| b.label == label)
    }

    /// Schrödinger-picture generator `𝓛(t)ρ = U(t)𝓛(U†(t)ρU(t))U†(t)`.
    pub fn at_time(&self, t: f64) -> SuperOp {
        schrodinger_superop(&self.basis, &self.superop, t)
    }

    /// `dρ/dt = −i[H(t), ρ] + 𝓛(t)ρ` in the dressed basis.
    pub fn schrodinger_rhs(&self, t: f64, rho: &Operator2) -> Operator2 {
        let h = self.basis.hamiltonian(t);
        let comm = h.commutator(rho).expect("dressed operators");
        comm.scale(C64::new(0.0, -1.0)) + self.at_time(t).apply(rho)
    }
}

/// `X ↦ U(t) L(U†(t) X U(t)) U†(t)` for an interaction-picture superoperator.
pub fn schrodinger_superop(basis: &DressedBasis, l: &SuperOp, t: f64) -> SuperOp {
    let u = basis.propagator(t);
    let into = SuperOp::unitary_conjugation(&u.dagger());
    let out = SuperOp::unitary_conjugation(&u);
    out.try_compose(l).and_then(|x| x.try_compose(&into)).expect("dressed superoperators")
}

/// Sums the local generators of all baths.
pub fn total_generator(basis: &DressedBasis, baths: &[BathSpec]) -> Result<Generator> {
    let mut superop = SuperOp::zero(Basis::Dressed);
    let mut locals = Vec::new();
    let mut sets: Vec<(Channel, TransitionSet)> = Vec::new();
    for bath in baths {
        bath.validate()?;
        if baths.iter().filter(|b| b.label == bath.label).count() > 1 {
            return Err(Error::BathConfig(format!("duplicate bath label '{}'", bath.label)));
        }
        if !sets.iter().any(|(c, _)| *c == bath.channel) {
            sets.push((bath.channel, transition_ops(basis, bath.channel)?));
        }
        let set = &sets.iter().find(|(c, _)| *c == bath.channel).expect("inserted above").1;
        for op in set.representatives() {
            let local = local_generator(op, bath.channel, bath)?;
            superop = superop + local.superop;
            locals.push(local);
        }
    }
    Ok(Generator {
        superop,
        locals,
        baths: baths.to_vec(),
        basis: *basis,
    })
}

/// A validated density matrix: Hermitian, unit trace, non-negative spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Operator2);

impl DensityMatrix {
    pub fn new(m: Operator2) -> Result<Self> {
        if !m.is_hermitian(DEFAULT_TOL) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {:e})",
                m.max_abs_diff(&m.dagger())
            )));
        }
        let tr = m.trace();
        if (tr - 1.0).norm() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let low = m.eigh()?.values[1];
        if low < -1e-10 {
            return Err(Error::InvalidState(format!("negative eigenvalue {low:e}")));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by trace- and Hermiticity-preserving dynamics.
    pub(crate) fn from_dynamics(m: Operator2) -> Self {
        Self(m)
    }

    pub fn maximally_mixed(basis: Basis) -> Self {
        Self(Operator2::identity(basis).scale_re(0.5))
    }

    /// `½(I + xσ¹ + yσ² + zσ³)`; requires `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3], basis: Basis) -> Result<Self> {
        let c = [
            C64::new(0.5, 0.0),
            C64::new(0.5 * r[0], 0.0),
            C64::new(0.5 * r[1], 0.0),
            C64::new(0.5 * r[2], 0.0),
        ];
        Self::new(Operator2::from_pauli(c, basis))
    }

    /// Diagonal state `diag(p, 1 − p)`.
    pub fn diagonal(p: f64, basis: Basis) -> Result<Self> {
        Self::new(Operator2::real([[p, 0.0], [0.0, 1.0 - p]], basis))
    }

    pub fn matrix(&self) -> &Operator2 {
        &self.0
    }

    pub fn population(&self, k: usize) -> f64 {
        self.0.get(k, k).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.eigh().map(|e| e.values[1]).unwrap_or(f64::NEG_INFINITY)
    }

    /// Deviation from the density-matrix contract: Hermiticity defect, trace
    /// error and negative part of the spectrum.
    pub fn defects(&self) -> (f64, f64, f64) {
        let herm = self.0.max_abs_diff(&self.0.dagger());
        let tr = (self.0.trace() - 1.0).norm();
        let neg = (-self.min_eigenvalue()).max(0.0);
        (herm, tr, neg)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParams(format!("evolution time must be non-negative, got {t}")));
    }
    Ok(())
}

fn check_dressed(rho: &DensityMatrix) -> Result<()> {
    if rho.matrix().basis() != Basis::Dressed {
        return Err(Error::BasisMismatch { left: Basis::Dressed, right: rho.matrix().basis() });
    }
    Ok(())
}

/// `e^{t𝓛}ρ(0)` in the interaction picture.
///
/// The exponential acts on the Bloch vector through the affine map
/// `ṙ = Mr + b`, so unit trace and Hermiticity hold exactly for all `t`.
pub fn evolve_interaction(gen: &Generator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    check_dressed(rho0)?;
    let (m, b) = bloch_affine(&gen.superop);
    let mut aug = Matrix4::zeros();
    aug.fixed_view_mut::<3, 3>(0, 0).copy_from(&(m * t));
    aug.fixed_view_mut::<3, 1>(0, 3).copy_from(&(b * t));
    let prop = aug.exp();
    let r0 = bloch_vector(rho0.matrix());
    let r = prop.fixed_view::<3, 3>(0, 0) * r0 + prop.fixed_view::<3, 1>(0, 3);
    Ok(DensityMatrix::from_dynamics(from_bloch_vector(&r, Basis::Dressed)))
}

fn bloch_vector(m: &Operator2) -> Vector3<f64> {
    let basis = m.basis();
    Vector3::from_fn(|k, _| (Operator2::pauli(k + 1, basis) * *m).trace().re)
}

fn from_bloch_vector(r: &Vector3<f64>, basis: Basis) -> Operator2 {
    let c = [
        C64::new(0.5, 0.0),
        C64::new(0.5 * r[0], 0.0),
        C64::new(0.5 * r[1], 0.0),
        C64::new(0.5 * r[2], 0.0),
    ];
    Operator2::from_pauli(c, basis)
}

/// `ρ(t) = U(t)(e^{t𝓛}ρ(0))U†(t)` in the dressed basis.
pub fn evolve_schrodinger(gen: &Generator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let rho_i = evolve_interaction(gen, rho0, t)?;
    let u = gen.dressed_basis().propagator(t);
    Ok(DensityMatrix::from_dynamics(rho_i.matrix().conjugate_by(&u)?))
}

/// RK4 integration of `dρ/dt = 𝓛ρ`; numeric oracle for [`evolve_interaction`].
pub fn integrate_interaction(gen: &Generator, rho0: &DensityMatrix, t: f64, steps: usize) -> Operator2 {
    let l = gen.superop;
    rk4_integrate(|_, r: &Operator2| l.apply(r), *rho0.matrix(), 0.0, t, steps)
}

/// RK4 integration of the time-inhomogeneous Schrödinger-picture master
/// equation; numeric oracle for [`evolve_schrodinger`].
pub fn integrate_schrodinger(gen: &Generator, rho0: &DensityMatrix, t: f64, steps: usize) -> Operator2 {
    rk4_integrate(|s, r: &Operator2| gen.schrodinger_rhs(s, r), *rho0.matrix(), 0.0, t, steps)
}

/// Real matrix of `L` restricted to traceless Hermitian directions, in the
/// Pauli coordinates `ρ = ½(I + r·σ)`: returns `(M, b)` with
/// `Bloch(Lρ) = M r + b`.
fn bloch_affine(l: &SuperOp) -> (Matrix3<f64>, Vector3<f64>) {
    let basis = l.basis();
    let paulis = [1, 2, 3].map(|k| Operator2::pauli(k, basis));
    let half = |m: Operator2| m.scale_re(0.5);
    let b = bloch_vector(&l.apply(&half(Operator2::identity(basis))));
    let mut m = Matrix3::zeros();
    for (i, s) in paulis.iter().enumerate() {
        m.set_column(i, &bloch_vector(&l.apply(&half(*s))));
    }
    (m, b)
}

/// Unique stationary state `𝓛ρ̃ = 0` among trace-one Hermitian matrices.
pub fn stationary_state(gen: &Generator) -> Result<DensityMatrix> {
    stationary_state_of(&gen.superop)
}

/// [`stationary_state`] for a bare superoperator.
pub fn stationary_state_of(l: &SuperOp) -> Result<DensityMatrix> {
    let (m, b) = bloch_affine(l);
    let svd = m.svd(true, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if largest == 0.0 || smallest <= 1e-10 * largest {
        return Err(Error::DegenerateStationary(sv));
    }
    let r = svd.solve(&(-b), 0.0).map_err(|e| Error::InvalidState(e.to_string()))?;
    Ok(DensityMatrix::from_dynamics(from_bloch_vector(&r, l.basis())))
}

/// Rates of the single zero-temperature electromagnetic bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub delta0: f64,
    pub delta_minus: f64,
    pub delta_plus: f64,
    /// Population relaxation rate `δ₋ + δ₊`.
    pub gamma1: f64,
    /// Coherence decay rate `½(δ₋ + δ₊ + δ₀)`.
    pub gamma2: f64,
}

/// Fluorescence rates for `G(ω) = Aω³`:
/// `δ₀ = (2g/Ω_R)²G(Ω)`, `δ± = ((Ω_R ± Δ)/(2Ω_R))²G(Ω ± Ω_R)`.
pub fn fluorescence_rates(p: &SystemParams, a: f64) -> Result<RateSet> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParams(format!("density amplitude A must be positive, got {a}")));
    }
    let (d, g, r, w) = (p.detuning(), p.g(), p.rabi(), p.drive());
    if r == 0.0 {
        return Err(Error::DegenerateHamiltonian);
    }
    let dens = |x: f64| a * x.powi(3);
    let delta0 = (2.0 * g / r).powi(2) * dens(w);
    let delta_plus = ((r + d) / (2.0 * r)).powi(2) * dens(w + r);
    let delta_minus = ((r - d) / (2.0 * r)).powi(2) * dens(w - r);
    Ok(RateSet {
        delta0,
        delta_minus,
        delta_plus,
        gamma1: delta_minus + delta_plus,
        gamma2: 0.5 * (delta_minus + delta_plus + delta0),
    })
}

/// Phenomenological generator with damping `γ↓`, pumping `γ↑` and dephasing
/// `δ`, in the lab basis:
/// `γ↓D[σ⁻] + γ↑D[σ⁺] − (δ/2)[σ³,[σ³,·]]`.
pub fn phenomenological_generator(gamma_down: f64, gamma_up: f64, dephasing: f64) -> Result<SuperOp> {
    let down = lindblad_superop(&Operator2::sigma_minus(Basis::Lab), gamma_down)?;
    let up = lindblad_superop(&Operator2::sigma_plus(Basis::Lab), gamma_up)?;
    // −½[σ³,[σ³,ρ]] = σ³ρσ³ − ρ = D[σ³]ρ
    let deph = lindblad_superop(&Operator2::pauli(3, Basis::Lab), dephasing)?;
    Ok(down + up + deph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_basis() -> DressedBasis {
        DressedBasis::new(&SystemParams::new(0.86, 0.85, 0.075).unwrap()).unwrap()
    }

    fn thermal(label: &str, channel: Channel, t: f64, density: SpectralDensity) -> BathSpec {
        BathSpec::new(label, channel, t, density).unwrap()
    }

    #[test]
    fn kms_values() {
        let vac = BathSpec::vacuum("e", 1.0).unwrap();
        assert_eq!(vac.kms_density(-0.85), 0.0);
        assert_relative_eq!(vac.kms_density(0.85), 0.614_125, epsilon = 1e-15);
        assert_eq!(vac.kms_density(0.0), 0.0);
        let hot = thermal("e", Channel::Sigma1, 0.7, SpectralDensity::Cubic { a: 2.0 });
        for w in [0.1, 0.5, 3.0] {
            assert_relative_eq!(hot.kms_density(-w) / hot.kms_density(w), (-w / 0.7f64).exp(), epsilon = 1e-14);
        }
        let flat = thermal("d", Channel::Sigma3, 1.0, SpectralDensity::Flat { value: 0.5 });
        assert_eq!(flat.kms_density(0.0), 0.5);
    }

    #[test]
    fn tabulated_density_interpolates() {
        let d = SpectralDensity::Tabulated { points: vec![(0.0, 0.0), (1.0, 2.0), (3.0, 2.0)] };
        assert_eq!(d.eval(0.5), 1.0);
        assert_eq!(d.eval(2.0), 2.0);
        assert_eq!(d.eval(10.0), 2.0);
        assert!(BathSpec::new("x", Channel::Sigma1, 1.0, SpectralDensity::Tabulated { points: vec![] }).is_err());
        assert!(BathSpec::new("x", Channel::Sigma1, 1.0, SpectralDensity::Tabulated { points: vec![(1.0, 1.0), (0.5, 1.0)] }).is_err());
        assert!(BathSpec::new("x", Channel::Sigma1, -1.0, SpectralDensity::Flat { value: 1.0 }).is_err());
        assert!(BathSpec::new("x", Channel::Sigma1, 1.0, SpectralDensity::Flat { value: -1.0 }).is_err());
    }

    #[test]
    fn vacuum_local_generators_have_no_upward_term() {
        let b = reference_basis();
        let gen = total_generator(&b, &[BathSpec::vacuum("e", 1.0).unwrap()]).unwrap();
        assert_eq!(gen.locals.len(), 3);
        for l in &gen.locals {
            if l.op.combined_frequency() > 0.0 {
                assert_eq!(l.rate_backward, 0.0);
            } else {
                assert_eq!(l.rate_forward, 0.0);
            }
        }
    }

    #[test]
    fn channel_mismatch_rejected() {
        let b = reference_basis();
        let set = transition_ops(&b, Channel::Sigma3).unwrap();
        let bath = BathSpec::vacuum("e", 1.0).unwrap();
        let op = set.representatives().next().unwrap();
        assert!(matches!(local_generator(op, Channel::Sigma3, &bath), Err(Error::ChannelMismatch { .. })));
    }

    #[test]
    fn resonant_center_channel_is_pure_dephasing() {
        let b = DressedBasis::new(&SystemParams::new(1.0, 1.0, 0.2).unwrap()).unwrap();
        let set = transition_ops(&b, Channel::Sigma1).unwrap();
        let bath = BathSpec::vacuum("e", 1.0).unwrap();
        let l = local_generator(set.get(1, 0).unwrap(), Channel::Sigma1, &bath).unwrap();
        let rho = Operator2::real([[0.3, 0.2], [0.2, 0.7]], Basis::Dressed);
        let out = l.superop.apply(&rho);
        assert!(out.get(0, 0).norm() < 1e-16 && out.get(1, 1).norm() < 1e-16);
        assert!(out.get(0, 1).re < 0.0);
    }

    #[test]
    fn no_baths_gives_zero_generator() {
        let gen = total_generator(&reference_basis(), &[]).unwrap();
        assert_eq!(gen.superop, SuperOp::zero(Basis::Dressed));
        assert!(gen.locals.is_empty());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let bath = BathSpec::vacuum("e", 1.0).unwrap();
        assert!(matches!(total_generator(&reference_basis(), &[bath.clone(), bath]), Err(Error::BathConfig(_))));
    }

    #[test]
    fn fluorescence_population_block() {
        let b = reference_basis();
        let gen = total_generator(&b, &[BathSpec::vacuum("e", 1.0).unwrap()]).unwrap();
        let r = fluorescence_rates(b.params(), 1.0).unwrap();
        let p1 = Operator2::unit(0, 0, Basis::Dressed);
        let p2 = Operator2::unit(1, 1, Basis::Dressed);
        let coh = Operator2::unit(0, 1, Basis::Dressed);
        let l = gen.superop;
        assert_relative_eq!(l.apply(&p1).get(0, 0).re, -r.delta_plus, epsilon = 1e-15);
        assert_relative_eq!(l.apply(&p2).get(0, 0).re, r.delta_minus, epsilon = 1e-15);
        assert_relative_eq!(l.apply(&coh).get(0, 1).re, -r.gamma2, epsilon = 1e-15);
        assert!(l.apply(&coh).get(0, 1).im.abs() < 1e-16);
    }

    #[test]
    fn fluorescence_rate_values() {
        let p = SystemParams::new(0.86, 0.85, 0.075).unwrap();
        let r = fluorescence_rates(&p, 1.0).unwrap();
        assert_relative_eq!(r.delta_plus, 0.28465, epsilon = 1e-5);
        assert_relative_eq!(r.delta_minus, 0.074615, epsilon = 1e-6);
        assert_eq!(r.gamma1, r.delta_minus + r.delta_plus);
        assert!(fluorescence_rates(&p, 0.0).is_err());
        let res = SystemParams::new(1.0, 1.0, 0.1).unwrap();
        let r = fluorescence_rates(&res, 2.0).unwrap();
        assert_relative_eq!(r.delta_plus, 0.25 * 2.0 * 1.2f64.powi(3), epsilon = 1e-15);
        assert_relative_eq!(r.delta_minus, 0.25 * 2.0 * 0.8f64.powi(3), epsilon = 1e-15);
        assert_relative_eq!(r.delta0, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn fluorescence_closed_form_solution() {
        let b = reference_basis();
        let gen = total_generator(&b, &[BathSpec::vacuum("e", 1.0).unwrap()]).unwrap();
        let r = fluorescence_rates(b.params(), 1.0).unwrap();
        let rho0 = DensityMatrix::new(Operator2::new(
            [[C64::new(0.9, 0.0), C64::new(0.1, 0.2)], [C64::new(0.1, -0.2), C64::new(0.1, 0.0)]],
            Basis::Dressed,
        ))
        .unwrap();
        for t in [0.0, 0.5, 3.0, 20.0] {
            let rho = evolve_interaction(&gen, &rho0, t).unwrap();
            let e1 = (-r.gamma1 * t).exp();
            let p11 = e1 * 0.9 + r.delta_minus / r.gamma1 * (1.0 - e1);
            assert_relative_eq!(rho.population(0), p11, epsilon = 1e-13);
            let c = rho0.matrix().get(0, 1) * (-r.gamma2 * t).exp();
            assert!((rho.matrix().get(0, 1) - c).norm() < 1e-13);
        }
    }

    #[test]
    fn evolution_matches_ode_oracles() {
        let b = reference_basis();
        let gen = total_generator(&b, &[BathSpec::vacuum("e", 1.0).unwrap()]).unwrap();
        let rho0 = DensityMatrix::from_bloch([0.3, -0.4, 0.5], Basis::Dressed).unwrap();
        let r = fluorescence_rates(b.params(), 1.0).unwrap();
        let t = 5.0 / r.gamma1;
        let exact = evolve_interaction(&gen, &rho0, t).unwrap();
        let ode = integrate_interaction(&gen, &rho0, t, 4000);
        assert!(exact.matrix().max_abs_diff(&ode) < 1e-9);
        let t = 6.0;
        let exact = evolve_schrodinger(&gen, &rho0, t).unwrap();
        let ode = integrate_schrodinger(&gen, &rho0, t, 6000);
        assert!(exact.matrix().max_abs_diff(&ode) < 1e-8);
    }

    #[test]
    fn evolution_rejects_negative_time() {
        let gen = total_generator(&reference_basis(), &[BathSpec::vacuum("e", 1.0).unwrap()]).unwrap();
        let rho = DensityMatrix::maximally_mixed(Basis::Dressed);
        assert!(evolve_interaction(&gen, &rho, -1.0).is_err());
        assert_eq!(evolve_interaction(&gen, &rho, 0.0).unwrap(), rho);
        let lab = DensityMatrix::maximally_mixed(Basis::Lab);
        assert!(evolve_interaction(&gen, &lab, 1.0).is_err());
    }

    #[test]
    fn fluorescence_stationary_state() {
        let b = reference_basis();
        let gen = total_generator(&b, &[BathSpec::vacuum("e", 1.0).unwrap()]).unwrap();
        let r = fluorescence_rates(b.params(), 1.0).unwrap();
        let st = stationary_state(&gen).unwrap();
        assert_relative_eq!(st.population(0), r.delta_minus / r.gamma1, epsilon = 1e-14);
        assert!(st.matrix().get(0, 1).norm() < 1e-15);
        assert!(gen.superop.apply(st.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn degenerate_kernel_reported() {
        assert!(matches!(
            stationary_state(&total_generator(&reference_basis(), &[]).unwrap()),
            Err(Error::DegenerateStationary(_))
        ));
        // pure dephasing keeps every diagonal state
        let deph = phenomenological_generator(0.0, 0.0, 0.3).unwrap();
        assert!(matches!(stationary_state_of(&deph), Err(Error::DegenerateStationary(_))));
    }

    #[test]
    fn phenomenological_limits() {
        assert_eq!(phenomenological_generator(0.0, 0.0, 0.0).unwrap(), SuperOp::zero(Basis::Lab));
        let l = phenomenological_generator(0.4, 0.0, 0.0).unwrap();
        let st = stationary_state_of(&l).unwrap();
        assert!(st.matrix().max_abs_diff(&Operator2::unit(1, 1, Basis::Lab)) < 1e-15);
        assert!(phenomenological_generator(-0.1, 0.0, 0.0).is_err());
        // the dephasing term equals −(δ/2)[σ³,[σ³,ρ]]
        let d = phenomenological_generator(0.0, 0.0, 0.6).unwrap();
        let rho = Operator2::real([[0.4, 0.3], [0.3, 0.6]], Basis::Lab);
        let s3 = Operator2::pauli(3, Basis::Lab);
        let expect = s3.commutator(&s3.commutator(&rho).unwrap()).unwrap().scale_re(-0.3);
        assert!(d.apply(&rho).max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn heat_pump_population_block() {
        let p = SystemParams::from_detuning(10.0, 0.1, 0.5).unwrap();
        let b = DressedBasis::new(&p).unwrap();
        let (te, td) = (0.5, 2.0);
        let ge = 1.0;
        let gd = 0.5;
        let baths = [
            thermal("e", Channel::Sigma1, te, SpectralDensity::Flat { value: ge }),
            thermal("d", Channel::Sigma3, td, SpectralDensity::Flat { value: gd }),
        ];
        let gen = total_generator(&b, &baths).unwrap();
        let (d, g, r, w) = (p.detuning(), p.g(), p.rabi(), p.drive());
        let d0 = (2.0 * g / r).powi(2) * gd;
        let dp = ((r + d) / (2.0 * r)).powi(2) * ge;
        let dm = ((r - d) / (2.0 * r)).powi(2) * ge;
        let out = (-(w - r) / te).exp();
        let up = (-(w + r) / te).exp();
        let xd = (-r / td).exp();
        let l = gen.superop;
        let from1 = l.apply(&Operator2::unit(0, 0, Basis::Dressed)).get(0, 0).re;
        let from2 = l.apply(&Operator2::unit(1, 1, Basis::Dressed)).get(0, 0).re;
        assert_relative_eq!(from1, -(d0 + out * dm + dp), epsilon = 1e-14);
        assert_relative_eq!(from2, xd * d0 + dm + up * dp, epsilon = 1e-14);
    }
}
