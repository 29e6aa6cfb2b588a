//! Single-qubit polarization states.
//!
//! Basis order is (|H>, |V>). Circular states follow
//! `|L> = (|H> + i|V>)/sqrt 2`, `|R> = (|H> - i|V>)/sqrt 2`.
//!
//! Bloch (Stokes) axes: `s1 = +1` is |H>, `s2 = +1` is the diagonal
//! `(|H> + |V>)/sqrt 2`, and `s3 = +1` is |R>. With this embedding the
//! density matrix reads
//!
//! ```text
//! rho = 1/2 [[1 + s1,      s2 + i s3],
//!            [s2 - i s3,   1 - s1   ]]
//! ```

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C;

use crate::{Error, Result};

/// Absolute tolerance for Hermiticity and trace validation.
pub const STATE_TOL: f64 = 1e-12;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// A two-component complex column vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket(pub [C; 2]);

impl Ket {
    pub const fn new(h: C, v: C) -> Self {
        Ket([h, v])
    }

    pub const fn h() -> Self {
        Ket([ONE, ZERO])
    }

    pub const fn v() -> Self {
        Ket([ZERO, ONE])
    }

    /// Diagonal linear polarization `(|H> + |V>)/sqrt 2`.
    pub const fn d() -> Self {
        Ket([C::new(FRAC_1_SQRT_2, 0.0), C::new(FRAC_1_SQRT_2, 0.0)])
    }

    /// Anti-diagonal linear polarization `(|H> - |V>)/sqrt 2`.
    pub const fn a() -> Self {
        Ket([C::new(FRAC_1_SQRT_2, 0.0), C::new(-FRAC_1_SQRT_2, 0.0)])
    }

    pub const fn r() -> Self {
        Ket([C::new(FRAC_1_SQRT_2, 0.0), C::new(0.0, -FRAC_1_SQRT_2)])
    }

    pub const fn l() -> Self {
        Ket([C::new(FRAC_1_SQRT_2, 0.0), C::new(0.0, FRAC_1_SQRT_2)])
    }

    /// Linear polarization at angle `theta` from horizontal.
    pub fn linear(theta: f64) -> Self {
        Ket([C::new(theta.cos(), 0.0), C::new(theta.sin(), 0.0)])
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Ket) -> C {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn normalized(&self) -> Ket {
        let n = self.norm();
        Ket([self.0[0] / n, self.0[1] / n])
    }

    pub fn scale(&self, s: C) -> Ket {
        Ket([self.0[0] * s, self.0[1] * s])
    }

    /// `|self><self|`
    pub fn projector(&self) -> Mat2 {
        let [a, b] = self.0;
        Mat2([[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]])
    }

    /// Bloch vector of the (normalized) pure state.
    pub fn bloch(&self) -> BlochVector {
        let k = self.normalized();
        bloch_of_matrix(&k.projector())
    }

    /// Rephases so the first component with modulus above `1e-12` is real
    /// and positive.
    fn canonical_phase(self) -> Ket {
        let lead = if self.0[0].norm() > 1e-12 {
            self.0[0]
        } else {
            self.0[1]
        };
        let n = lead.norm();
        if n == 0.0 {
            return self;
        }
        self.scale(lead.conj() / n)
    }
}

/// A 2x2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C; 2]; 2]);

impl Mat2 {
    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    /// Real matrix `[[a, b], [c, d]]`.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([
            [C::new(a, 0.0), C::new(b, 0.0)],
            [C::new(c, 0.0), C::new(d, 0.0)],
        ])
    }

    pub fn diag(a: C, d: C) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: C) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn apply(&self, k: &Ket) -> Ket {
        let m = &self.0;
        Ket([
            m[0][0] * k.0[0] + m[0][1] * k.0[1],
            m[1][0] * k.0[0] + m[1][1] * k.0[1],
        ])
    }

    /// Largest absolute element-wise difference.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(C::new(-1.0, 0.0))
    }
}

/// Stokes-convention Pauli triple `(sigma_1, sigma_2, sigma_3)`.
pub fn stokes_paulis() -> [Mat2; 3] {
    [
        Mat2::real(1.0, 0.0, 0.0, -1.0),
        Mat2::real(0.0, 1.0, 1.0, 0.0),
        Mat2([[ZERO, C::new(0.0, 1.0)], [C::new(0.0, -1.0), ZERO]]),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl BlochVector {
    pub const fn new(s1: f64, s2: f64, s3: f64) -> Self {
        BlochVector { s1, s2, s3 }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.s1 * o.s1 + self.s2 * o.s2 + self.s3 * o.s3
    }

    pub fn cross(&self, o: &BlochVector) -> BlochVector {
        BlochVector::new(
            self.s2 * o.s3 - self.s3 * o.s2,
            self.s3 * o.s1 - self.s1 * o.s3,
            self.s1 * o.s2 - self.s2 * o.s1,
        )
    }

    pub fn scaled(&self, k: f64) -> BlochVector {
        BlochVector::new(self.s1 * k, self.s2 * k, self.s3 * k)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }
}

/// Length of the Bloch vector: 0 for the maximally mixed state, 1 for pure.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Purity(f64);

impl Purity {
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) || r.is_nan() {
            return Err(Error::InvalidArgument(format!("purity {r} outside [0, 1]")));
        }
        Ok(Purity(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Polarization density matrix: Hermitian, unit trace, positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    /// Validates `m` against the density-matrix invariants at [`STATE_TOL`].
    pub fn new(m: Mat2) -> Result<Self> {
        if m.max_abs_diff(&m.adjoint()) > STATE_TOL {
            return Err(Error::InvalidDensity("not Hermitian"));
        }
        if (m.trace() - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidDensity("trace is not 1"));
        }
        let b = bloch_of_matrix(&m);
        // smallest eigenvalue is (1 - |b|)/2 once trace and Hermiticity hold
        if 0.5 * (1.0 - b.norm()) < -STATE_TOL {
            return Err(Error::InvalidDensity("negative eigenvalue"));
        }
        Ok(DensityMatrix(m))
    }

    /// Skips validation; callers guarantee the invariants hold.
    pub(crate) fn from_raw(m: Mat2) -> Self {
        DensityMatrix(m)
    }

    pub fn pure(k: &Ket) -> Self {
        DensityMatrix(k.normalized().projector())
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat2::identity().scale(C::new(0.5, 0.0)))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// `<k| rho |k>`
    pub fn expectation(&self, k: &Ket) -> f64 {
        k.inner(&self.0.apply(k)).re
    }
}

fn bloch_of_matrix(m: &Mat2) -> BlochVector {
    let [p1, p2, p3] = stokes_paulis();
    BlochVector::new(
        (*m * p1).trace().re,
        (*m * p2).trace().re,
        (*m * p3).trace().re,
    )
}

/// `rho = (1 + b.sigma)/2`.
pub fn density_from_bloch(b: BlochVector) -> Result<DensityMatrix> {
    let n = b.norm();
    if !n.is_finite() || n > 1.0 + 1e-9 {
        return Err(Error::InvalidBloch(n));
    }
    let b = if n > 1.0 { b.scaled(1.0 / n) } else { b };
    let half = 0.5;
    Ok(DensityMatrix(Mat2([
        [
            C::new(half * (1.0 + b.s1), 0.0),
            C::new(half * b.s2, half * b.s3),
        ],
        [
            C::new(half * b.s2, -half * b.s3),
            C::new(half * (1.0 - b.s1), 0.0),
        ],
    ])))
}

/// `s_i = Tr(rho sigma_i)`.
pub fn bloch_from_density(rho: &DensityMatrix) -> BlochVector {
    bloch_of_matrix(rho.matrix())
}

pub fn purity(rho: &DensityMatrix) -> Purity {
    Purity(bloch_from_density(rho).norm().min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition {
    /// Descending.
    pub eigenvalues: [f64; 2],
    pub eigenvectors: [Ket; 2],
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> Mat2 {
        self.eigenvectors[0]
            .projector()
            .scale(C::new(self.eigenvalues[0], 0.0))
            + self.eigenvectors[1]
                .projector()
                .scale(C::new(self.eigenvalues[1], 0.0))
    }
}

/// Eigenvalues `(1 +- r)/2` with eigenvectors along `+-b/|b|`.
///
/// Each eigenvector is rephased so its first non-negligible component is
/// real and positive. The degenerate case `r = 0` returns `{|H>, |V>}`.
pub fn eigendecompose(rho: &DensityMatrix) -> EigenDecomposition {
    let b = bloch_from_density(rho);
    let r = b.norm().min(1.0);
    if r < 1e-12 {
        return EigenDecomposition {
            eigenvalues: [0.5, 0.5],
            eigenvectors: [Ket::h(), Ket::v()],
        };
    }
    let n = b.scaled(1.0 / b.norm());
    // +1 eigenvector of n.sigma; pick the better-conditioned of two forms
    let up = if n.s1 >= 0.0 {
        Ket::new(C::new(1.0 + n.s1, 0.0), C::new(n.s2, -n.s3))
    } else {
        Ket::new(C::new(n.s2, n.s3), C::new(1.0 - n.s1, 0.0))
    }
    .normalized();
    let down = Ket::new(-up.0[1].conj(), up.0[0].conj());
    EigenDecomposition {
        eigenvalues: [0.5 * (1.0 + r), 0.5 * (1.0 - r)],
        eigenvectors: [up.canonical_phase(), down.canonical_phase()],
    }
}

/// Two-photon pure polarization state; the first qubit is the trigger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitPureState {
    /// Basis order HH, HV, VH, VV.
    amplitudes: [C; 4],
}

impl TwoQubitPureState {
    pub fn new(amplitudes: [C; 4]) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidArgument(format!(
                "two-qubit state norm {n} is not 1"
            )));
        }
        Ok(TwoQubitPureState { amplitudes })
    }

    /// `cos(theta_p)|HH> + sin(theta_p)|VV>`.
    pub fn variable_entanglement(theta_p: f64) -> Self {
        let (s, c) = theta_p.sin_cos();
        TwoQubitPureState {
            amplitudes: [C::new(c, 0.0), ZERO, ZERO, C::new(s, 0.0)],
        }
    }

    pub fn product(trigger: &Ket, partner: &Ket) -> Self {
        let (a, b) = (trigger.normalized(), partner.normalized());
        TwoQubitPureState {
            amplitudes: [
                a.0[0] * b.0[0],
                a.0[0] * b.0[1],
                a.0[1] * b.0[0],
                a.0[1] * b.0[1],
            ],
        }
    }

    pub fn amplitudes(&self) -> &[C; 4] {
        &self.amplitudes
    }
}

/// Reduced state of the partner photon after tracing out the trigger.
pub fn partial_trace_over_trigger(psi: &TwoQubitPureState) -> DensityMatrix {
    let a = &psi.amplitudes;
    let mut m = [[ZERO; 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..2).map(|t| a[2 * t + i] * a[2 * t + j].conj()).sum();
        }
    }
    DensityMatrix(Mat2(m))
}
