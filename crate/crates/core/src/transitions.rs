//! Floquet–Fourier decomposition of the coupling operators.
//!
//! In the interaction picture a coupling operator evolves as
//! `S(t) = U†(t) S U(t) = Σ S_q(ω̄) e^{−i(ω̄ + qΩ)t}`, where the Bohr
//! quasifrequencies are `ω̄ ∈ {0, ±Ω_R}`. Components are keyed by the pair
//! `(q, k)` with `ω̄ = k·Ω_R`, so the heat-current weight `(ω̄ + qΩ)/ω̄` can be
//! formed without losing which harmonic carried the energy.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::algebra::{Basis, Operator2};
use crate::dissipator::Channel;
use crate::error::{Error, Result};
use crate::floquet::DressedBasis;

/// Combined frequencies closer than this are treated as coincident.
pub const COLLISION_TOL: f64 = 1e-9;

/// One Fourier component `S_q(ω̄)` of a coupling operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionOperator {
    /// Matrix in the dressed basis.
    pub matrix: Operator2,
    /// Bohr quasifrequency `ω̄ = k·Ω_R`.
    pub omega_bar: f64,
    /// Harmonic `q` of the drive.
    pub harmonic: i32,
    /// `k` in `ω̄ = k·Ω_R`.
    pub rabi_index: i32,
    drive: f64,
}

impl TransitionOperator {
    fn new(matrix: Operator2, harmonic: i32, rabi_index: i32, basis: &DressedBasis) -> Self {
        let p = basis.params();
        Self {
            matrix,
            omega_bar: rabi_index as f64 * p.rabi(),
            harmonic,
            rabi_index,
            drive: p.drive(),
        }
    }

    /// `ω̄ + qΩ`, the frequency at which the bath is probed.
    pub fn combined_frequency(&self) -> f64 {
        self.omega_bar + self.harmonic as f64 * self.drive
    }

    /// The partner `S_{−q}(−ω̄) = S_q(ω̄)†`.
    pub fn conjugate(&self) -> Self {
        Self {
            matrix: self.matrix.dagger(),
            omega_bar: -self.omega_bar,
            harmonic: -self.harmonic,
            rabi_index: -self.rabi_index,
            drive: self.drive,
        }
    }

    pub fn key(&self) -> (i32, i32) {
        (self.harmonic, self.rabi_index)
    }

    /// `‖[H̄, S] + ω̄S‖`, zero for a genuine transition operator.
    pub fn commutation_defect(&self, basis: &DressedBasis) -> f64 {
        let c = basis
            .mean_hamiltonian()
            .commutator(&self.matrix)
            .expect("dressed operators");
        (c + self.matrix.scale_re(self.omega_bar)).norm()
    }
}

/// All Fourier components of one coupling operator, conjugates included.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSet {
    pub channel: Channel,
    ops: Vec<TransitionOperator>,
}

impl TransitionSet {
    fn from_positive(basis: &DressedBasis, channel: Channel, positive: Vec<TransitionOperator>) -> Result<Self> {
        check_frequency_collisions(basis)?;
        let mut ops = Vec::with_capacity(2 * positive.len());
        for op in positive {
            let conj = op.conjugate();
            ops.push(op);
            if conj.key() != op.key() {
                ops.push(conj);
            }
        }
        let set = Self { channel, ops };
        set.check_collisions()?;
        Ok(set)
    }

    pub fn ops(&self) -> &[TransitionOperator] {
        &self.ops
    }

    pub fn get(&self, harmonic: i32, rabi_index: i32) -> Option<&TransitionOperator> {
        self.ops.iter().find(|o| o.key() == (harmonic, rabi_index))
    }

    /// Components that label local generators: `ω̄ > 0`, plus `ω̄ = 0` with
    /// `q ≥ 0`. Every other component is the conjugate of one of these.
    pub fn representatives(&self) -> impl Iterator<Item = &TransitionOperator> {
        self.ops
            .iter()
            .filter(|o| o.rabi_index > 0 || (o.rabi_index == 0 && o.harmonic >= 0))
    }

    /// `Σ S_q(ω̄) e^{−i(ω̄+qΩ)t}`.
    pub fn reconstruct(&self, t: f64) -> Operator2 {
        self.ops.iter().fold(Operator2::zero(Basis::Dressed), |acc, o| {
            acc + o.matrix.scale(C64::from_polar(1.0, -o.combined_frequency() * t))
        })
    }

    /// Fails when two components that are not conjugate partners probe the
    /// bath at the same frequency.
    pub fn check_collisions(&self) -> Result<()> {
        for (i, a) in self.ops.iter().enumerate() {
            for b in &self.ops[i + 1..] {
                if (a.combined_frequency() - b.combined_frequency()).abs() < COLLISION_TOL {
                    return Err(Error::FrequencyCollision(format!(
                        "{:?} components (q={}, k={}) and (q={}, k={}) share combined frequency {}",
                        self.channel,
                        a.harmonic,
                        a.rabi_index,
                        b.harmonic,
                        b.rabi_index,
                        a.combined_frequency()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Fails when two model frequencies `|qΩ + kΩ_R|`, `|q|, |k| ≤ 1`, that are
/// not conjugate partners coincide. Checked across both channels, so
/// `Ω_R = Ω/2` and `Ω_R = Ω` are rejected.
pub fn check_frequency_collisions(basis: &DressedBasis) -> Result<()> {
    let p = basis.params();
    let keys: Vec<(i32, i32)> = (-1..=1).flat_map(|q| (-1..=1).map(move |k| (q, k))).collect();
    let freq = |(q, k): (i32, i32)| (q as f64 * p.drive() + k as f64 * p.rabi()).abs();
    for (i, &a) in keys.iter().enumerate() {
        for &b in &keys[i + 1..] {
            if b != (-a.0, -a.1) && (freq(a) - freq(b)).abs() < COLLISION_TOL {
                return Err(Error::FrequencyCollision(format!(
                    "components (q={}, k={}) and (q={}, k={}) share |combined frequency| {} \
                     (Omega_R/Omega = {})",
                    a.0,
                    a.1,
                    b.0,
                    b.1,
                    freq(a),
                    p.rabi() / p.drive()
                )));
            }
        }
    }
    Ok(())
}

fn dressed(entries: [[f64; 2]; 2]) -> Operator2 {
    Operator2::real(entries, Basis::Dressed)
}

/// Transition operators of the `σ¹` coupling: `q = 1` with `ω̄ ∈ {−Ω_R, 0, Ω_R}`
/// and their `q = −1` conjugates.
pub fn sigma1_transition_ops(basis: &DressedBasis) -> Result<TransitionSet> {
    let p = basis.params();
    let (d, g, r) = (p.detuning(), p.g(), p.rabi());
    let below = dressed([[0.0, (d - r) / (2.0 * r)], [0.0, 0.0]]);
    let center = dressed([[g / r, 0.0], [0.0, -g / r]]);
    let above = dressed([[0.0, 0.0], [(d + r) / (2.0 * r), 0.0]]);
    TransitionSet::from_positive(
        basis,
        Channel::Sigma1,
        vec![
            TransitionOperator::new(below, 1, -1, basis),
            TransitionOperator::new(center, 1, 0, basis),
            TransitionOperator::new(above, 1, 1, basis),
        ],
    )
}

/// Transition operators of the `σ³` coupling: `S³(0)`, `S³(Ω_R)` and `S³(−Ω_R)`.
pub fn sigma3_transition_ops(basis: &DressedBasis) -> Result<TransitionSet> {
    let p = basis.params();
    let (d, g, r) = (p.detuning(), p.g(), p.rabi());
    let zero = dressed([[d / r, 0.0], [0.0, -d / r]]);
    let rabi = dressed([[0.0, 0.0], [-2.0 * g / r, 0.0]]);
    TransitionSet::from_positive(
        basis,
        Channel::Sigma3,
        vec![
            TransitionOperator::new(zero, 0, 0, basis),
            TransitionOperator::new(rabi, 0, 1, basis),
        ],
    )
}

/// Transition operators for a coupling channel.
pub fn transition_ops(basis: &DressedBasis, channel: Channel) -> Result<TransitionSet> {
    match channel {
        Channel::Sigma1 => sigma1_transition_ops(basis),
        Channel::Sigma3 => sigma3_transition_ops(basis),
    }
}

/// `U†(t) S U(t)` for a dressed-basis operator, using the closed-form propagator.
pub fn heisenberg_coupling(basis: &DressedBasis, s: &Operator2, t: f64) -> Result<Operator2> {
    if s.basis() != Basis::Dressed {
        return Err(Error::BasisMismatch { left: Basis::Dressed, right: s.basis() });
    }
    s.conjugate_by(&basis.propagator(t).dagger())
}

/// Smallest separation between the oracle's candidate frequencies
/// `qΩ + kΩ_R`, `|q|, |k| ≤ 2`.
pub fn oracle_min_separation(basis: &DressedBasis) -> f64 {
    let freqs = candidate_frequencies(basis);
    let mut sep = f64::INFINITY;
    for (i, a) in freqs.iter().enumerate() {
        for b in &freqs[i + 1..] {
            sep = sep.min((a.2 - b.2).abs());
        }
    }
    sep
}

/// Number of drive periods the oracle needs to separate its candidate
/// frequencies by at least four beat cycles.
pub fn oracle_periods_needed(basis: &DressedBasis) -> usize {
    let sep = oracle_min_separation(basis);
    let tau = basis.params().period();
    ((8.0 * std::f64::consts::PI / (sep * tau)).ceil() as usize).max(8)
}

fn candidate_frequencies(basis: &DressedBasis) -> Vec<(i32, i32, f64)> {
    let p = basis.params();
    let mut out = Vec::with_capacity(25);
    for q in -2..=2 {
        for k in -2..=2 {
            out.push((q, k, q as f64 * p.drive() + k as f64 * p.rabi()));
        }
    }
    out
}

/// Recovers the Fourier components of `U†(t) S U(t)` numerically, by
/// least-squares projection of time samples onto `e^{−iνt}` for the candidate
/// frequencies `ν = qΩ + kΩ_R`, `|q|, |k| ≤ 2`. Components whose largest entry
/// exceeds `1e-8` are returned.
///
/// Samples cover `n_periods` drive periods. When the candidates are too close
/// to be resolved over that window (near-rational `Ω_R/Ω`) the projection is
/// refused with [`Error::FrequencyCollision`].
pub fn numeric_decomposition_oracle(
    basis: &DressedBasis,
    s: &Operator2,
    n_periods: usize,
    samples_per_period: usize,
) -> Result<Vec<TransitionOperator>> {
    if s.basis() != Basis::Dressed {
        return Err(Error::BasisMismatch { left: Basis::Dressed, right: s.basis() });
    }
    let p = basis.params();
    let tau = p.period();
    let freqs = candidate_frequencies(basis);
    let max_freq = freqs.iter().map(|f| f.2.abs()).fold(0.0, f64::max);
    let dt = tau / samples_per_period as f64;
    if samples_per_period == 0 || max_freq * dt >= std::f64::consts::PI {
        return Err(Error::InvalidParams(format!(
            "{samples_per_period} samples per period do not resolve frequency {max_freq}"
        )));
    }
    let window = n_periods as f64 * tau;
    let sep = oracle_min_separation(basis);
    if sep < COLLISION_TOL || sep * window < 2.0 * std::f64::consts::PI {
        return Err(Error::FrequencyCollision(format!(
            "candidate frequencies separated by {sep:e} cannot be resolved over {n_periods} periods \
             (aliasing: Omega_R/Omega = {} is close to a small-denominator rational)",
            p.rabi() / p.drive()
        )));
    }

    let n = n_periods * samples_per_period;
    let m = freqs.len();
    let mut gram = DMatrix::<C64>::zeros(m, m);
    let mut rhs = DMatrix::<C64>::zeros(m, 4);
    let mut row = vec![C64::new(0.0, 0.0); m];
    for j in 0..n {
        let t = j as f64 * dt;
        for (r, f) in row.iter_mut().zip(&freqs) {
            *r = C64::from_polar(1.0, -f.2 * t);
        }
        let st = heisenberg_coupling(basis, s, t)?;
        let y = [st.get(0, 0), st.get(0, 1), st.get(1, 0), st.get(1, 1)];
        for a in 0..m {
            let ca = row[a].conj();
            for b in 0..m {
                gram[(a, b)] += ca * row[b];
            }
            for (c, yc) in y.iter().enumerate() {
                rhs[(a, c)] += ca * yc;
            }
        }
    }
    let coeffs = gram
        .svd(true, true)
        .solve(&rhs, 1e-13)
        .map_err(|e| Error::FrequencyCollision(e.to_string()))?;

    let mut out = Vec::new();
    for (a, &(q, k, _)) in freqs.iter().enumerate() {
        let matrix = Operator2::new(
            [[coeffs[(a, 0)], coeffs[(a, 1)]], [coeffs[(a, 2)], coeffs[(a, 3)]]],
            Basis::Dressed,
        );
        if matrix.max_abs() > 1e-8 {
            out.push(TransitionOperator::new(matrix, q, k, basis));
        }
    }
    Ok(out)
}
