//! Dense complex algebra for 2×2 operators and 4×4 superoperators.
//!
//! Superoperators act on column-stacked matrices: a 2×2 matrix `m` is stored
//! as the 4-vector `[m00, m10, m01, m11]`, so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//!
//! Every operator carries a [`Basis`] tag. Arithmetic between operators in
//! different bases is a programming error; the operator traits panic on it and
//! the `try_*` methods report it as [`Error::BasisMismatch`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default tolerance for algebraic identities on 2×2 closed forms.
pub const DEFAULT_TOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which orthonormal basis the matrix entries refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Bare atomic basis: index 0 is the excited state, index 1 the ground state.
    Lab,
    /// Eigenbasis `{φ₁, φ₂}` of the averaged Hamiltonian.
    Dressed,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Lab => write!(f, "lab"),
            Basis::Dressed => write!(f, "dressed"),
        }
    }
}

fn check_basis(a: Basis, b: Basis) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::BasisMismatch { left: a, right: b })
    }
}

/// A 2×2 complex matrix tagged with its basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    entries: [[C64; 2]; 2],
    basis: Basis,
}

impl Operator2 {
    pub fn new(entries: [[C64; 2]; 2], basis: Basis) -> Self {
        Self { entries, basis }
    }

    /// Builds an operator from real entries.
    pub fn real(entries: [[f64; 2]; 2], basis: Basis) -> Self {
        let e = entries.map(|row| row.map(|x| C64::new(x, 0.0)));
        Self::new(e, basis)
    }

    pub fn zero(basis: Basis) -> Self {
        Self::new([[ZERO; 2]; 2], basis)
    }

    pub fn identity(basis: Basis) -> Self {
        Self::new([[ONE, ZERO], [ZERO, ONE]], basis)
    }

    /// Matrix unit `|row⟩⟨col|`.
    pub fn unit(row: usize, col: usize, basis: Basis) -> Self {
        let mut m = Self::zero(basis);
        m.entries[row][col] = ONE;
        m
    }

    /// Pauli matrix `σᵏ` (k = 1, 2, 3) written in `basis`; `k = 0` is the identity.
    pub fn pauli(k: usize, basis: Basis) -> Self {
        let e = match k {
            0 => [[ONE, ZERO], [ZERO, ONE]],
            1 => [[ZERO, ONE], [ONE, ZERO]],
            2 => [[ZERO, -I], [I, ZERO]],
            3 => [[ONE, ZERO], [ZERO, -ONE]],
            _ => panic!("Pauli index must be 0..=3, got {k}"),
        };
        Self::new(e, basis)
    }

    /// `c0·I + c1·σ¹ + c2·σ² + c3·σ³`.
    pub fn from_pauli(c: [C64; 4], basis: Basis) -> Self {
        let e = [
            [c[0] + c[3], c[1] - I * c[2]],
            [c[1] + I * c[2], c[0] - c[3]],
        ];
        Self::new(e, basis)
    }

    /// Raising operator `σ⁺ = ½(σ¹ + iσ²)`.
    pub fn sigma_plus(basis: Basis) -> Self {
        Self::unit(0, 1, basis)
    }

    /// Lowering operator `σ⁻ = ½(σ¹ − iσ²)`.
    pub fn sigma_minus(basis: Basis) -> Self {
        Self::unit(1, 0, basis)
    }

    /// Diagonal operator.
    pub fn diag(a: C64, b: C64, basis: Basis) -> Self {
        Self::new([[a, ZERO], [ZERO, b]], basis)
    }

    /// Projector `|v⟩⟨v|` for a (not necessarily normalized) vector.
    pub fn projector(v: [C64; 2], basis: Basis) -> Self {
        let mut e = [[ZERO; 2]; 2];
        for (r, row) in e.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = v[r] * v[c].conj();
            }
        }
        Self::new(e, basis)
    }

    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Same entries, reinterpreted in another basis. Only for constructing
    /// operators whose matrix is known in that basis.
    pub fn relabel(self, basis: Basis) -> Self {
        Self { basis, ..self }
    }

    pub fn dagger(&self) -> Self {
        let e = &self.entries;
        Self::new(
            [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]],
            self.basis,
        )
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.entries.map(|r| r.map(|x| x * s)), self.basis)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        check_basis(self.basis, rhs.basis)?;
        let mut e = self.entries;
        for (r, row) in e.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x += rhs.entries[r][c];
            }
        }
        Ok(Self::new(e, self.basis))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&-*rhs)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        check_basis(self.basis, rhs.basis)?;
        let a = &self.entries;
        let b = &rhs.entries;
        let mut e = [[ZERO; 2]; 2];
        for (r, row) in e.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Ok(Self::new(e, self.basis))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        Ok(self.try_mul(rhs)? - rhs.try_mul(self)?)
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.try_mul(self)?.try_mul(&u.dagger())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise maximum of `|self − other|`; ignores basis tags.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    /// Distance from unitarity, `max |U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.dagger() * *self;
        p.max_abs_diff(&Self::identity(self.basis))
    }

    /// Coefficients `(c0, c1, c2, c3)` with `M = c0·I + Σ cₖσᵏ`.
    pub fn pauli_decompose(&self) -> [C64; 4] {
        let e = &self.entries;
        [
            (e[0][0] + e[1][1]) * 0.5,
            (e[0][1] + e[1][0]) * 0.5,
            (e[1][0] - e[0][1]) * (-I * 0.5),
            (e[0][0] - e[1][1]) * 0.5,
        ]
    }

    /// Eigen-decomposition of a Hermitian operator: eigenvalues in
    /// descending order and the matching spectral projectors.
    pub fn eigh(&self) -> Result<HermitianEigen> {
        if !self.is_hermitian(DEFAULT_TOL * (1.0 + self.max_abs())) {
            return Err(Error::NotHermitian(self.max_abs_diff(&self.dagger())));
        }
        let c = self.pauli_decompose();
        let mean = c[0].re;
        let r = [c[1].re, c[2].re, c[3].re];
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        let id = Self::identity(self.basis);
        let (p_hi, p_lo) = if len == 0.0 {
            (id.scale_re(0.5), id.scale_re(0.5))
        } else {
            let n = Self::from_pauli(
                [ZERO, C64::new(r[0] / len, 0.0), C64::new(r[1] / len, 0.0), C64::new(r[2] / len, 0.0)],
                self.basis,
            );
            ((id + n).scale_re(0.5), (id - n).scale_re(0.5))
        };
        Ok(HermitianEigen {
            values: [mean + len, mean - len],
            projectors: [p_hi, p_lo],
        })
    }

    /// Applies a real function to a Hermitian operator through its spectrum.
    pub fn map_hermitian(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let eig = self.eigh()?;
        Ok(eig.projectors[0].scale_re(f(eig.values[0])) + eig.projectors[1].scale_re(f(eig.values[1])))
    }
}

impl Add for Operator2 {
    type Output = Operator2;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("operator addition across bases")
    }
}

impl Sub for Operator2 {
    type Output = Operator2;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("operator subtraction across bases")
    }
}

impl Mul for Operator2 {
    type Output = Operator2;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("operator product across bases")
    }
}

impl Neg for Operator2 {
    type Output = Operator2;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

/// Spectrum of a Hermitian 2×2 operator.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen {
    /// Eigenvalues, largest first.
    pub values: [f64; 2],
    pub projectors: [Operator2; 2],
}

/// Closed-form `exp(−iHt)` for Hermitian `H = c0·I + c·σ`.
pub fn expm_hermitian(h: &Operator2, t: f64) -> Result<Operator2> {
    if !h.is_hermitian(DEFAULT_TOL * (1.0 + h.max_abs())) {
        return Err(Error::NotHermitian(h.max_abs_diff(&h.dagger())));
    }
    let c = h.pauli_decompose();
    let r = [c[1].re, c[2].re, c[3].re];
    let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let phase = C64::from_polar(1.0, -c[0].re * t);
    let (cos, sinc) = if len == 0.0 {
        (1.0, t)
    } else {
        ((len * t).cos(), (len * t).sin() / len)
    };
    // cos(|c|t) I − i sin(|c|t) (c·σ)/|c|
    let m = Operator2::from_pauli(
        [
            C64::new(cos, 0.0),
            -I * (sinc * r[0]),
            -I * (sinc * r[1]),
            -I * (sinc * r[2]),
        ],
        h.basis,
    );
    Ok(m.scale(phase))
}

/// Column-stacking vectorization `[m00, m10, m01, m11]`.
pub fn vectorize(m: &Operator2) -> [C64; 4] {
    let e = m.entries();
    [e[0][0], e[1][0], e[0][1], e[1][1]]
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &[C64; 4], basis: Basis) -> Operator2 {
    Operator2::new([[v[0], v[2]], [v[1], v[3]]], basis)
}

/// A 4×4 complex matrix acting on vectorized 2×2 operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperOp {
    entries: [[C64; 4]; 4],
    basis: Basis,
}

impl SuperOp {
    pub fn new(entries: [[C64; 4]; 4], basis: Basis) -> Self {
        Self { entries, basis }
    }

    pub fn zero(basis: Basis) -> Self {
        Self::new([[ZERO; 4]; 4], basis)
    }

    pub fn identity(basis: Basis) -> Self {
        let mut s = Self::zero(basis);
        for k in 0..4 {
            s.entries[k][k] = ONE;
        }
        s
    }

    /// `X ↦ A X B`, i.e. the matrix `Bᵀ ⊗ A`.
    pub fn sandwich(a: &Operator2, b: &Operator2) -> Result<Self> {
        check_basis(a.basis, b.basis)?;
        let mut e = [[ZERO; 4]; 4];
        // (Bᵀ ⊗ A)[2j + i][2l + k] = B[l][j] · A[i][k]
        for j in 0..2 {
            for l in 0..2 {
                for i in 0..2 {
                    for k in 0..2 {
                        e[2 * j + i][2 * l + k] = b.get(l, j) * a.get(i, k);
                    }
                }
            }
        }
        Ok(Self::new(e, a.basis))
    }

    /// `X ↦ U X U†`.
    pub fn unitary_conjugation(u: &Operator2) -> Self {
        Self::sandwich(u, &u.dagger()).expect("same basis by construction")
    }

    pub fn entries(&self) -> &[[C64; 4]; 4] {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn apply_vec(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|c| self.entries[r][c] * v[c]).sum();
        }
        out
    }

    pub fn try_apply(&self, m: &Operator2) -> Result<Operator2> {
        check_basis(self.basis, m.basis())?;
        Ok(devectorize(&self.apply_vec(&vectorize(m)), self.basis))
    }

    /// Applies to an operator; panics across bases.
    pub fn apply(&self, m: &Operator2) -> Operator2 {
        self.try_apply(m).expect("superoperator applied across bases")
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        check_basis(self.basis, rhs.basis)?;
        let mut e = self.entries;
        for (r, row) in e.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x += rhs.entries[r][c];
            }
        }
        Ok(Self::new(e, self.basis))
    }

    /// Composition `self ∘ rhs`.
    pub fn try_compose(&self, rhs: &Self) -> Result<Self> {
        check_basis(self.basis, rhs.basis)?;
        let mut e = [[ZERO; 4]; 4];
        for (r, row) in e.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.entries[r][k] * rhs.entries[k][c]).sum();
            }
        }
        Ok(Self::new(e, self.basis))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.entries.map(|r| r.map(|x| x * s)), self.basis)
    }

    /// Induced 1-norm (max column sum).
    pub fn norm1(&self) -> f64 {
        (0..4)
            .map(|c| (0..4).map(|r| self.entries[r][c].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                m = m.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        m
    }

    /// Rewrites the superoperator in another basis. `v` maps target-basis
    /// coordinates to current-basis coordinates (columns are the new basis
    /// vectors expressed in the current basis).
    pub fn change_basis(&self, v: &Operator2, target: Basis) -> Result<Self> {
        check_basis(self.basis, v.basis())?;
        // L' = (X ↦ V† X V) ∘ L ∘ (X ↦ V X V†)
        let into = Self::sandwich(v, &v.dagger())?;
        let out = Self::sandwich(&v.dagger(), v)?;
        let l = out.try_compose(self)?.try_compose(&into)?;
        Ok(Self { basis: target, ..l })
    }

    /// `exp(t·L)` by scaling and squaring of a truncated Taylor series.
    pub fn expm(&self, t: f64) -> Self {
        let a = self.scale(t);
        let norm = a.norm1();
        let mut squarings = 0u32;
        if norm > 0.25 {
            squarings = (norm / 0.25).log2().ceil() as u32;
        }
        let a = a.scale(0.5f64.powi(squarings as i32));
        let mut result = Self::identity(self.basis);
        let mut term = Self::identity(self.basis);
        for k in 1..=30 {
            term = term.try_compose(&a).expect("same basis").scale(1.0 / k as f64);
            result = result.try_add(&term).expect("same basis");
            if term.norm1() < 1e-18 * result.norm1() {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.try_compose(&result).expect("same basis");
        }
        result
    }
}

impl Add for SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("superoperator addition across bases")
    }
}

/// LGKS dissipator `ρ ↦ rate·(SρS† − ½{S†S, ρ})`.
pub fn lindblad_superop(s: &Operator2, rate: f64) -> Result<SuperOp> {
    if !(rate >= 0.0) {
        return Err(Error::NegativeRate(rate));
    }
    let basis = s.basis();
    let id = Operator2::identity(basis);
    let sds = s.dagger() * *s;
    let jump = SuperOp::sandwich(s, &s.dagger())?;
    let left = SuperOp::sandwich(&sds, &id)?;
    let right = SuperOp::sandwich(&id, &sds)?;
    let l = jump + left.scale(-0.5) + right.scale(-0.5);
    Ok(l.scale(rate))
}
