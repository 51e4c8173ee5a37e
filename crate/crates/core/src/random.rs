//! Seeded samplers for parameters, states and baths used by the randomized
//! suites.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Basis, Operator2};
use crate::dissipator::{BathSpec, Channel, DensityMatrix, SpectralDensity};
use crate::floquet::{DressedBasis, SystemParams};
use crate::transitions::oracle_min_separation;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Drive parameters with `Ω_R/Ω ∈ [0.05, 0.9]`, `g > 0`, and all candidate
/// combined frequencies `kΩ_R + qΩ` (`|k|, |q| ≤ 2`) separated by at least
/// `0.03·Ω`, so that every oracle can resolve them.
pub fn random_params(rng: &mut TestRng) -> SystemParams {
    loop {
        let drive = rng.gen_range(0.5..2.0);
        let rabi = drive * rng.gen_range(0.05..0.9);
        let theta = rng.gen_range(0.1..std::f64::consts::PI - 0.1);
        let detuning = rabi * theta.cos();
        let g = 0.5 * rabi * theta.sin();
        let Ok(p) = SystemParams::from_detuning(drive, detuning, g) else { continue };
        let Ok(b) = DressedBasis::new(&p) else { continue };
        if oracle_min_separation(&b) >= 0.03 * drive {
            return p;
        }
    }
}

/// Bloch vector uniform in the ball of radius `r_max`.
pub fn random_bloch(rng: &mut TestRng, r_max: f64) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 <= 1.0 {
            return v.map(|x| x * r_max);
        }
    }
}

/// Random state with eigenvalues in `[(1−r)/2, (1+r)/2]`, `r ≤ 0.999`.
pub fn random_state(rng: &mut TestRng, basis: Basis) -> DensityMatrix {
    DensityMatrix::from_bloch(random_bloch(rng, 0.999), basis).expect("Bloch vector inside the ball")
}

/// Hermitian matrix with entries of magnitude at most one.
pub fn random_hermitian(rng: &mut TestRng, basis: Basis) -> Operator2 {
    let a = rng.gen_range(-1.0..1.0);
    let d = rng.gen_range(-1.0..1.0);
    let b = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    Operator2::new([[C64::new(a, 0.0), b], [b.conj(), C64::new(d, 0.0)]], basis)
}

/// General complex matrix with entries of magnitude at most √2.
pub fn random_operator(rng: &mut TestRng, basis: Basis) -> Operator2 {
    let mut e = [[C64::new(0.0, 0.0); 2]; 2];
    for row in e.iter_mut() {
        for x in row.iter_mut() {
            *x = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    Operator2::new(e, basis)
}

/// Cubic or flat density with amplitude in `[0.05, 1]`.
pub fn random_density(rng: &mut TestRng) -> SpectralDensity {
    let amp = rng.gen_range(0.05..1.0);
    if rng.gen_bool(0.5) {
        SpectralDensity::Cubic { a: amp }
    } else {
        SpectralDensity::Flat { value: amp }
    }
}

/// Electromagnetic (σ¹) and dephasing (σ³) baths at temperatures in `[0.1, 3]`.
pub fn random_heatpump_baths(rng: &mut TestRng) -> [BathSpec; 2] {
    let te = rng.gen_range(0.1..3.0);
    let td = rng.gen_range(0.1..3.0);
    let e = BathSpec::new("e", Channel::Sigma1, te, random_density(rng)).expect("valid bath");
    let d = BathSpec::new("d", Channel::Sigma3, td, random_density(rng)).expect("valid bath");
    [e, d]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let mut a = rng(7);
        let mut b = rng(7);
        for _ in 0..5 {
            assert_eq!(random_params(&mut a), random_params(&mut b));
        }
    }

    #[test]
    fn params_stay_in_range() {
        let mut r = rng(1);
        for _ in 0..200 {
            let p = random_params(&mut r);
            assert!(p.rabi() <= 0.9 * p.drive() + 1e-12);
            assert!(p.g() > 0.0);
            let b = DressedBasis::new(&p).unwrap();
            assert!(oracle_min_separation(&b) >= 0.03 * p.drive());
        }
    }

    #[test]
    fn states_are_full_rank() {
        let mut r = rng(3);
        for _ in 0..200 {
            let s = random_state(&mut r, Basis::Dressed);
            assert!(s.min_eigenvalue() > 4e-4);
        }
    }
}
