//! Drive parameters, the closed-form propagator and the dressed basis.
//!
//! The lab-frame Hamiltonian is
//! `H(t) = ½ω₀σ³ + g(σ⁻e^{iΩt} + σ⁺e^{−iΩt})`, whose propagator factorizes as
//! `U(t) = exp(−½itΩσ³)·exp(−it(½Δσ³ + gσ¹))` with `Δ = ω₀ − Ω`.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::algebra::{expm_hermitian, Basis, Operator2};
use crate::error::{Error, Result};
use crate::ode::rk4_integrate;

/// Parameters of the driven two-level system (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    omega0: f64,
    drive: f64,
    g: f64,
    detuning: f64,
    rabi: f64,
    period: f64,
}

impl SystemParams {
    /// Builds parameters from the atomic frequency `ω₀`, the drive frequency
    /// `Ω` and the coupling amplitude `g`.
    pub fn new(omega0: f64, drive: f64, g: f64) -> Result<Self> {
        if !omega0.is_finite() {
            return Err(Error::InvalidParams(format!("omega0 must be finite, got {omega0}")));
        }
        Self::build(omega0, drive, g, omega0 - drive)
    }

    /// Builds parameters from the drive frequency and the detuning `Δ = ω₀ − Ω`.
    pub fn from_detuning(drive: f64, detuning: f64, g: f64) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::InvalidParams(format!("detuning must be finite, got {detuning}")));
        }
        Self::build(drive + detuning, drive, g, detuning)
    }

    fn build(omega0: f64, drive: f64, g: f64, detuning: f64) -> Result<Self> {
        if !(drive > 0.0) || !drive.is_finite() {
            return Err(Error::InvalidParams(format!("drive frequency must be positive, got {drive}")));
        }
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::InvalidParams(format!("coupling g must be non-negative, got {g}")));
        }
        let rabi = (2.0 * g).hypot(detuning);
        if rabi > drive {
            return Err(Error::RabiExceedsDrive { rabi, drive });
        }
        Ok(Self {
            omega0,
            drive,
            g,
            detuning,
            rabi,
            period: TAU / drive,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Drive frequency `Ω`.
    pub fn drive(&self) -> f64 {
        self.drive
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// `Δ = ω₀ − Ω`.
    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// `Ω_R = √(4g² + Δ²)`.
    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    /// `τ = 2π/Ω`.
    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Lab-frame Hamiltonian `H(t)`.
pub fn lab_hamiltonian(p: &SystemParams, t: f64) -> Operator2 {
    let phase = C64::from_polar(p.g, -p.drive * t);
    let half = 0.5 * p.omega0;
    Operator2::new(
        [[C64::new(half, 0.0), phase], [phase.conj(), C64::new(-half, 0.0)]],
        Basis::Lab,
    )
}

/// Averaged Hamiltonian `H̄ = ½Δσ³ + gσ¹` in the lab basis.
pub fn mean_hamiltonian(p: &SystemParams) -> Operator2 {
    Operator2::pauli(3, Basis::Lab).scale_re(0.5 * p.detuning) + Operator2::pauli(1, Basis::Lab).scale_re(p.g)
}

/// `H̄ − ½Ω·I`, the generator of the one-period propagator:
/// `U(τ) = exp(−iτ(H̄ − ½Ω))`. Its eigenvalues are the quasienergies ε₁, ε₂.
pub fn floquet_hamiltonian(p: &SystemParams) -> Operator2 {
    mean_hamiltonian(p) - Operator2::identity(Basis::Lab).scale_re(0.5 * p.drive)
}

/// Closed-form propagator `U(t)` in the lab basis.
pub fn propagator(p: &SystemParams, t: f64) -> Operator2 {
    let half = 0.5 * p.drive * t;
    let u1 = Operator2::diag(C64::from_polar(1.0, -half), C64::from_polar(1.0, half), Basis::Lab);
    let u2 = expm_hermitian(&mean_hamiltonian(p), t).expect("mean Hamiltonian is Hermitian");
    u1 * u2
}

/// Time-ordered propagator obtained by integrating `dU/ds = −iH(s)U` with
/// `steps` fixed RK4 steps. Independent of the factorized closed form.
pub fn propagator_oracle(p: &SystemParams, t: f64, steps: usize) -> Operator2 {
    let minus_i = C64::new(0.0, -1.0);
    let rhs = |s: f64, u: &Operator2| (lab_hamiltonian(p, s) * *u).scale(minus_i);
    rk4_integrate(rhs, Operator2::identity(Basis::Lab), 0.0, t, steps)
}

/// Eigenbasis of the averaged Hamiltonian.
///
/// `φ₁` belongs to the quasienergy `ε₁ = −½(Ω − Ω_R)` and `φ₂` to
/// `ε₂ = −½(Ω + Ω_R)`, with `φ₁ ∝ (Δ + Ω_R, 2g)` and `φ₂ ∝ (Δ − Ω_R, 2g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedBasis {
    params: SystemParams,
    pub eps1: f64,
    pub eps2: f64,
    /// Lab-basis components of `φ₁`.
    pub phi1: [f64; 2],
    /// Lab-basis components of `φ₂`.
    pub phi2: [f64; 2],
}

/// Diagonalizes the averaged Hamiltonian.
pub fn dressed_basis(p: &SystemParams) -> Result<DressedBasis> {
    DressedBasis::new(p)
}

impl DressedBasis {
    pub fn new(p: &SystemParams) -> Result<Self> {
        let (d, g, r) = (p.detuning, p.g, p.rabi);
        if r == 0.0 {
            return Err(Error::DegenerateHamiltonian);
        }
        // Use whichever closed-form eigenvector has the larger norm and obtain
        // the other as its orthogonal complement; the sign choice reproduces
        // both closed forms whenever g > 0.
        let (phi1, phi2) = if d >= 0.0 {
            let n = (4.0 * g * g + (d + r) * (d + r)).sqrt();
            let a = [(d + r) / n, 2.0 * g / n];
            (a, [-a[1], a[0]])
        } else {
            let n = (4.0 * g * g + (d - r) * (d - r)).sqrt();
            let b = [(d - r) / n, 2.0 * g / n];
            ([b[1], -b[0]], b)
        };
        Ok(Self {
            params: *p,
            eps1: -0.5 * (p.drive - r),
            eps2: -0.5 * (p.drive + r),
            phi1,
            phi2,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// Unitary `V = [φ₁ φ₂]` mapping dressed coordinates to lab coordinates.
    pub fn transform(&self) -> Operator2 {
        Operator2::real(
            [[self.phi1[0], self.phi2[0]], [self.phi1[1], self.phi2[1]]],
            Basis::Lab,
        )
    }

    /// `V† A V` for a lab-basis operator.
    pub fn to_dressed(&self, a: &Operator2) -> Result<Operator2> {
        let v = self.transform();
        Ok(v.dagger().try_mul(a)?.try_mul(&v)?.relabel(Basis::Dressed))
    }

    /// `V A V†` for a dressed-basis operator.
    pub fn to_lab(&self, a: &Operator2) -> Result<Operator2> {
        if a.basis() != Basis::Dressed {
            return Err(Error::BasisMismatch { left: Basis::Dressed, right: a.basis() });
        }
        let v = self.transform();
        Ok(v * a.relabel(Basis::Lab) * v.dagger())
    }

    /// `H̄` in the dressed basis, `diag(Ω_R/2, −Ω_R/2)`.
    pub fn mean_hamiltonian(&self) -> Operator2 {
        let h = 0.5 * self.params.rabi;
        Operator2::real([[h, 0.0], [0.0, -h]], Basis::Dressed)
    }

    /// Quasienergy matrix `diag(ε₁, ε₂)` in the dressed basis.
    pub fn floquet_hamiltonian(&self) -> Operator2 {
        Operator2::real([[self.eps1, 0.0], [0.0, self.eps2]], Basis::Dressed)
    }

    /// Closed-form propagator `V† U(t) V`.
    pub fn propagator(&self, t: f64) -> Operator2 {
        self.to_dressed(&propagator(&self.params, t)).expect("lab operator")
    }

    /// Lab Hamiltonian `H(t)` expressed in the dressed basis.
    pub fn hamiltonian(&self, t: f64) -> Operator2 {
        self.to_dressed(&lab_hamiltonian(&self.params, t)).expect("lab operator")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> SystemParams {
        SystemParams::new(0.86, 0.85, 0.075).unwrap()
    }

    #[test]
    fn reference_derived_quantities() {
        let p = reference();
        assert_relative_eq!(p.detuning(), 0.01, epsilon = 1e-15);
        assert_relative_eq!(p.rabi(), (4.0f64 * 0.075 * 0.075 + 0.01 * 0.01).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(p.rabi(), 0.150_332_963_783_729_1, epsilon = 1e-12);
        assert_relative_eq!(p.period(), TAU / 0.85);
    }

    #[test]
    fn resonance_rabi_is_twice_g() {
        let p = SystemParams::new(0.9, 0.9, 0.1).unwrap();
        assert_eq!(p.detuning(), 0.0);
        assert_relative_eq!(p.rabi(), 0.2, epsilon = 1e-16);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(matches!(SystemParams::new(1.0, 0.0, 0.1), Err(Error::InvalidParams(_))));
        assert!(matches!(SystemParams::new(1.0, -1.0, 0.1), Err(Error::InvalidParams(_))));
        assert!(matches!(SystemParams::new(1.0, 1.0, -0.1), Err(Error::InvalidParams(_))));
        assert!(matches!(SystemParams::new(1.0, 1.0, 0.6), Err(Error::RabiExceedsDrive { .. })));
        assert!(matches!(SystemParams::new(f64::NAN, 1.0, 0.1), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn propagator_identity_at_zero_and_free_rotation() {
        let p = reference();
        assert!(propagator(&p, 0.0).max_abs_diff(&Operator2::identity(Basis::Lab)) < 1e-16);
        let free = SystemParams::new(0.7, 0.7, 0.0).unwrap();
        for t in [0.3, 2.0, 11.0] {
            let expect = expm_hermitian(&Operator2::pauli(3, Basis::Lab).scale_re(0.35), t).unwrap();
            assert!(propagator(&free, t).max_abs_diff(&expect) < 1e-15);
        }
    }

    #[test]
    fn one_period_propagator_is_floquet_exponential() {
        let p = reference();
        let u = propagator(&p, p.period());
        let hf = floquet_hamiltonian(&p);
        let e = expm_hermitian(&hf, p.period()).unwrap();
        assert!(u.max_abs_diff(&e) < 1e-13);
        // without the −Ω/2 shift the averaged Hamiltonian reproduces U(τ) up to −1
        let e0 = expm_hermitian(&mean_hamiltonian(&p), p.period()).unwrap();
        assert!(u.max_abs_diff(&-e0) < 1e-13);
    }

    #[test]
    fn mean_hamiltonian_reference() {
        let h = mean_hamiltonian(&reference());
        let c = h.pauli_decompose();
        assert_relative_eq!(c[1].re, 0.075, epsilon = 1e-16);
        assert_relative_eq!(c[3].re, 0.005, epsilon = 1e-15);
        assert_eq!(c[0].norm(), 0.0);
        let res = mean_hamiltonian(&SystemParams::new(1.0, 1.0, 0.2).unwrap());
        assert!(res.max_abs_diff(&Operator2::pauli(1, Basis::Lab).scale_re(0.2)) < 1e-16);
    }

    #[test]
    fn dressed_basis_resonance_vectors() {
        let b = dressed_basis(&SystemParams::new(1.0, 1.0, 0.2).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(b.phi1[0], s, epsilon = 1e-15);
        assert_relative_eq!(b.phi1[1], s, epsilon = 1e-15);
        assert_relative_eq!(b.phi2[0], -s, epsilon = 1e-15);
        assert_relative_eq!(b.phi2[1], s, epsilon = 1e-15);
    }

    #[test]
    fn dressed_basis_reference_quasienergies() {
        let b = dressed_basis(&reference()).unwrap();
        assert_relative_eq!(b.eps1, -0.349_833_518_108_135_45, epsilon = 1e-12);
        assert_relative_eq!(b.eps2, -0.500_166_481_891_864_5, epsilon = 1e-12);
        assert_relative_eq!(b.eps1 - b.eps2, reference().rabi(), epsilon = 1e-15);
        let h = mean_hamiltonian(&reference());
        let hf = floquet_hamiltonian(&reference());
        for (phi, eps) in [(b.phi1, b.eps1), (b.phi2, b.eps2)] {
            let v = [C64::new(phi[0], 0.0), C64::new(phi[1], 0.0)];
            for r in 0..2 {
                let hv: C64 = (0..2).map(|c| hf.get(r, c) * v[c]).sum();
                assert!((hv - v[r] * eps).norm() < 1e-15);
            }
        }
        assert!(b.to_dressed(&h).unwrap().max_abs_diff(&b.mean_hamiltonian()) < 1e-16);
    }

    #[test]
    fn dressed_basis_matches_closed_form_vectors() {
        let p = SystemParams::from_detuning(1.0, -0.13, 0.21).unwrap();
        let b = dressed_basis(&p).unwrap();
        let (d, g, r) = (p.detuning(), p.g(), p.rabi());
        let n1 = (4.0 * g * g + (d + r) * (d + r)).sqrt();
        let n2 = (4.0 * g * g + (d - r) * (d - r)).sqrt();
        assert_relative_eq!(b.phi1[0], (d + r) / n1, epsilon = 1e-14);
        assert_relative_eq!(b.phi1[1], 2.0 * g / n1, epsilon = 1e-14);
        assert_relative_eq!(b.phi2[0], (d - r) / n2, epsilon = 1e-14);
        assert_relative_eq!(b.phi2[1], 2.0 * g / n2, epsilon = 1e-14);
    }

    #[test]
    fn dressed_basis_rejects_vanishing_hamiltonian() {
        let p = SystemParams::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(dressed_basis(&p), Err(Error::DegenerateHamiltonian));
    }

    #[test]
    fn oracle_trivial_cases() {
        let p = reference();
        assert_eq!(propagator_oracle(&p, 0.0, 10), Operator2::identity(Basis::Lab));
        let free = SystemParams::new(0.9, 0.8, 0.0).unwrap();
        let t = 3.7;
        let expect = expm_hermitian(&Operator2::pauli(3, Basis::Lab).scale_re(0.45), t).unwrap();
        assert!(propagator_oracle(&free, t, 2000).max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn expm_of_mean_hamiltonian_matches_oracle_over_one_period() {
        let p = reference();
        let u = propagator_oracle(&p, p.period(), 20_000);
        let e = expm_hermitian(&floquet_hamiltonian(&p), p.period()).unwrap();
        assert!(u.max_abs_diff(&e) < 1e-10);
    }
}
