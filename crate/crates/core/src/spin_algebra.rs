//! Spin-j angular-momentum matrices, unitary exponentials of skew-Hermitian
//! generators, and the SU(2) -> SO(3) map.
//!
//! The basis is ordered by descending magnetic number, `m = j, j-1, ..., -j`,
//! so `J3` is diagonal with descending entries and `|m>` is the unit vector at
//! index `j - m`. Units have `hbar = 1`.

use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FiberError, Result};
use crate::tolerances;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Representations beyond this dimension are out of scope.
pub const MAX_DIM: usize = 64;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// A half-integer `n/2`, stored as the integer `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_doubled(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = FiberError;

    fn try_from(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        let rounded = twice.round();
        if !x.is_finite() || (twice - rounded).abs() > 1e-9 || rounded.abs() > f64::from(i32::MAX) {
            return Err(FiberError::Parse(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt(rounded as i32))
    }
}

impl From<HalfInt> for f64 {
    fn from(h: HalfInt) -> f64 {
        h.value()
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Levi-Civita symbol over indices `0, 1, 2`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinRepresentation {
    j: HalfInt,
    pub j1: CMatrix,
    pub j2: CMatrix,
    pub j3: CMatrix,
    pub jplus: CMatrix,
    pub jminus: CMatrix,
}

impl SpinRepresentation {
    pub fn new(j: f64) -> Result<Self> {
        let label = HalfInt::try_from(j).map_err(|_| FiberError::InvalidSpin(j))?;
        Self::from_label(label)
    }

    pub fn from_label(j: HalfInt) -> Result<Self> {
        if j.doubled() <= 0 {
            return Err(FiberError::InvalidSpin(j.value()));
        }
        let dim = j.doubled() as usize + 1;
        if dim > MAX_DIM {
            return Err(FiberError::validation(
                "j",
                format!("dimension {dim} exceeds the supported maximum {MAX_DIM}"),
            ));
        }
        let jv = j.value();
        let m_of = |idx: usize| jv - idx as f64;

        let mut jplus = CMatrix::zeros(dim, dim);
        for col in 1..dim {
            // <m+1|J+|m> = sqrt(j(j+1) - m(m+1)); m+1 sits one row above m.
            let m = m_of(col);
            jplus[(col - 1, col)] = Complex64::new((jv * (jv + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
        let jminus = jplus.adjoint();
        let j1 = (&jplus + &jminus).map(|z| z * 0.5);
        let j2 = (&jplus - &jminus).map(|z| z / (2.0 * I));
        let j3 = CMatrix::from_diagonal(&CVector::from_fn(dim, |idx, _| Complex64::new(m_of(idx), 0.0)));

        Ok(SpinRepresentation {
            j,
            j1,
            j2,
            j3,
            jplus,
            jminus,
        })
    }

    pub fn label(&self) -> HalfInt {
        self.j
    }

    pub fn j(&self) -> f64 {
        self.j.value()
    }

    pub fn dim(&self) -> usize {
        self.j.doubled() as usize + 1
    }

    /// `J1`, `J2`, `J3` for `i = 0, 1, 2`.
    pub fn component(&self, i: usize) -> &CMatrix {
        match i {
            0 => &self.j1,
            1 => &self.j2,
            2 => &self.j3,
            _ => panic!("spin component index {i} out of range"),
        }
    }

    /// Magnetic numbers in basis order.
    pub fn m_values(&self) -> Vec<f64> {
        (0..self.dim()).map(|idx| self.j() - idx as f64).collect()
    }

    pub fn index_of(&self, m: f64) -> Result<usize> {
        let err = || FiberError::InvalidMagneticNumber { m, j: self.j() };
        let label = HalfInt::try_from(m).map_err(|_| err())?;
        let offset = self.j.doubled() - label.doubled();
        if label.doubled().abs() > self.j.doubled() || offset % 2 != 0 {
            return Err(err());
        }
        Ok((offset / 2) as usize)
    }

    /// The `J3` eigenvector `|m>`.
    pub fn basis_state(&self, m: f64) -> Result<CVector> {
        let idx = self.index_of(m)?;
        let mut v = CVector::zeros(self.dim());
        v[idx] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// `v . J` for a real 3-vector.
    pub fn dot(&self, v: &Vector3<f64>) -> CMatrix {
        self.j1.map(|z| z * v.x) + self.j2.map(|z| z * v.y) + self.j3.map(|z| z * v.z)
    }

    pub fn casimir(&self) -> CMatrix {
        &self.j1 * &self.j1 + &self.j2 * &self.j2 + &self.j3 * &self.j3
    }

    /// Largest violation of `[J_a, J_b] = i eps_abc J_c` over all pairs.
    pub fn commutator_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let mut expected = CMatrix::zeros(self.dim(), self.dim());
                for c in 0..3 {
                    let eps = levi_civita(a, b, c);
                    if eps != 0.0 {
                        expected += self.component(c).map(|z| z * I * eps);
                    }
                }
                let lhs = commutator(self.component(a), self.component(b));
                worst = worst.max(max_abs(&(lhs - expected)));
            }
        }
        worst
    }

    pub fn casimir_defect(&self) -> f64 {
        let jv = self.j();
        let target = CMatrix::identity(self.dim(), self.dim()).map(|z| z * (jv * (jv + 1.0)));
        max_abs(&(self.casimir() - target))
    }

    /// Largest violation of Hermiticity of `J1..J3` and of `J+ = (J-)^H`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in 0..3 {
            let m = self.component(c);
            worst = worst.max(max_abs(&(m - m.adjoint())));
        }
        worst.max(max_abs(&(&self.jplus - self.jminus.adjoint())))
    }
}

pub fn make_spin_rep(j: f64) -> Result<SpinRepresentation> {
    SpinRepresentation::new(j)
}

/// A square matrix produced by exponentiating a skew-Hermitian generator.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix(CMatrix::identity(dim, dim))
    }

    /// Wraps `m` after checking `m m^H = I` within `tol`.
    pub fn try_from_matrix(m: CMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(FiberError::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let u = UnitaryMatrix(m);
        let defect = u.unitarity_defect();
        if defect > tol {
            return Err(FiberError::InvalidTrack(format!(
                "matrix is not unitary (defect {defect:e})"
            )));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.0 * v
    }

    /// `max |U U^H - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs(&(&self.0 * self.0.adjoint() - CMatrix::identity(n, n)))
    }
}

impl Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(&self.0 * &rhs.0)
    }
}

/// `exp(A)` for skew-Hermitian `A`.
///
/// Diagonalises the Hermitian matrix `H = iA = W diag(l) W^H` and returns
/// `W diag(exp(-i l)) W^H`, which is unitary to rounding.
pub fn expm_skew(a: &CMatrix) -> Result<UnitaryMatrix> {
    if !a.is_square() {
        return Err(FiberError::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let scale = max_abs(a).max(1.0);
    let deviation = max_abs(&(a + a.adjoint()));
    if deviation > tolerances::SKEW_HERMITIAN * scale {
        return Err(FiberError::NotSkewHermitian { deviation });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(UnitaryMatrix(CMatrix::zeros(0, 0)));
    }

    let h = a.map(|z| z * I);
    let h = (&h + h.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(h);
    let w = eig.eigenvectors;
    let phases = CVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l)));
    let mut scaled = w.clone();
    for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *p;
    }
    Ok(UnitaryMatrix(scaled * w.adjoint()))
}

/// `exp(-i angle axis.J)` in the representation `rep`.
pub fn rotation_unitary(rep: &SpinRepresentation, axis: &Vector3<f64>, angle: f64) -> Result<UnitaryMatrix> {
    expm_skew(&rep.dot(&(axis * angle)).map(|z| -I * z))
}

/// Skew matrix `[v]x` with `[v]x w = v x w`.
pub fn cross_matrix(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rodrigues rotation `I + sin(a)[n]x + (1 - cos(a))[n]x^2` for a unit axis.
///
/// This is the SO(3) image of `exp(-i a n.J)`: conjugation by that unitary
/// acts on the vector operator `J` as `U^H J_i U = sum_j R_ij J_j`.
pub fn su2_to_so3(axis: &Vector3<f64>, angle: f64) -> Result<Matrix3<f64>> {
    let norm = axis.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(FiberError::ZeroVector { what: "rotation axis" });
    }
    if (norm - 1.0).abs() > tolerances::ALGEBRA {
        return Err(FiberError::NonUnitVector {
            what: "rotation axis",
            norm,
        });
    }
    let k = cross_matrix(axis);
    let (s, c) = angle.sin_cos();
    // 1 - cos via the half-angle form keeps small angles accurate.
    let one_minus_c = 2.0 * (0.5 * angle).sin().powi(2);
    debug_assert!((one_minus_c - (1.0 - c)).abs() < 1e-12);
    Ok(Matrix3::identity() + k * s + k * k * one_minus_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Truncated Taylor series; only reliable for small generators.
    fn taylor_exp(a: &CMatrix, terms: usize) -> CMatrix {
        let n = a.nrows();
        let mut sum = CMatrix::identity(n, n);
        let mut term = CMatrix::identity(n, n);
        for k in 1..terms {
            term = &term * a / c(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn spin_half_j3_is_diag_half() {
        let rep = make_spin_rep(0.5).unwrap();
        assert_eq!(rep.j3[(0, 0)], c(0.5, 0.0));
        assert_eq!(rep.j3[(1, 1)], c(-0.5, 0.0));
        assert_eq!(rep.j3[(0, 1)], c(0.0, 0.0));
        assert_eq!(rep.j3.trace(), c(0.0, 0.0));
    }

    #[test]
    fn spin_one_raising_operator() {
        let rep = make_spin_rep(1.0).unwrap();
        for r in 0..3 {
            for col in 0..3 {
                let expected = if col == r + 1 { 2f64.sqrt() } else { 0.0 };
                assert!((rep.jplus[(r, col)] - c(expected, 0.0)).norm() < 1e-15, "({r},{col})");
            }
        }
        assert!(rep.commutator_defect() < 1e-12);
    }

    #[test]
    fn rejects_bad_labels() {
        assert_eq!(make_spin_rep(0.0), Err(FiberError::InvalidSpin(0.0)));
        assert_eq!(make_spin_rep(-1.0), Err(FiberError::InvalidSpin(-1.0)));
        assert_eq!(make_spin_rep(0.3), Err(FiberError::InvalidSpin(0.3)));
        assert!(make_spin_rep(f64::NAN).is_err());
        assert!(make_spin_rep(40.0).is_err());
    }

    #[test]
    fn algebra_identities_through_j3() {
        for twice in 1..=6 {
            let rep = SpinRepresentation::from_label(HalfInt::from_doubled(twice)).unwrap();
            assert!(rep.commutator_defect() < 1e-12, "j={}", rep.j());
            assert!(rep.casimir_defect() < 1e-12, "j={}", rep.j());
            assert!(rep.hermiticity_defect() < 1e-12, "j={}", rep.j());
        }
    }

    #[test]
    fn basis_indexing() {
        let rep = make_spin_rep(1.5).unwrap();
        assert_eq!(rep.index_of(1.5).unwrap(), 0);
        assert_eq!(rep.index_of(-0.5).unwrap(), 2);
        assert!(rep.index_of(1.0).is_err());
        assert!(rep.index_of(2.5).is_err());
        assert_eq!(rep.m_values(), vec![1.5, 0.5, -0.5, -1.5]);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let u = expm_skew(&CMatrix::zeros(3, 3)).unwrap();
        assert!(max_abs(&(u.matrix() - CMatrix::identity(3, 3))) < 1e-15);
    }

    #[test]
    fn expm_pi_rotation_about_y_for_spin_half() {
        let rep = make_spin_rep(0.5).unwrap();
        let a = rep.j2.map(|z| z * c(0.0, -PI));
        let u = expm_skew(&a).unwrap();
        // cos(pi/2) I - i sin(pi/2) sigma_y
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs(&(u.matrix() - expected)) < 1e-12);
    }

    #[test]
    fn expm_matches_taylor_for_small_generators() {
        let rep = make_spin_rep(1.5).unwrap();
        let axis = Vector3::new(0.3, -0.5, 0.8).normalize();
        let a = rep.dot(&(axis * 0.05)).map(|z| -I * z);
        let u = expm_skew(&a).unwrap();
        assert!(max_abs(&(u.matrix() - taylor_exp(&a, 20))) < 1e-14);
    }

    #[test]
    fn expm_rejects_bad_input() {
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(expm_skew(&rect), Err(FiberError::NonSquare { .. })));
        let herm = CMatrix::identity(2, 2);
        assert!(matches!(expm_skew(&herm), Err(FiberError::NotSkewHermitian { .. })));
    }

    #[test]
    fn so3_examples() {
        let z = Vector3::z();
        assert!((su2_to_so3(&z, 0.0).unwrap() - Matrix3::identity()).abs().max() < 1e-15);
        let phi = 0.7;
        let rz = su2_to_so3(&z, phi).unwrap();
        let expected = Matrix3::new(phi.cos(), -phi.sin(), 0.0, phi.sin(), phi.cos(), 0.0, 0.0, 0.0, 1.0);
        assert!((rz - expected).abs().max() < 1e-15);
        assert!(matches!(
            su2_to_so3(&Vector3::zeros(), 1.0),
            Err(FiberError::ZeroVector { .. })
        ));
        assert!(matches!(
            su2_to_so3(&Vector3::new(1.0, 1.0, 0.0), 1.0),
            Err(FiberError::NonUnitVector { .. })
        ));
    }

    #[test]
    fn full_turn_double_cover() {
        let axis = Vector3::new(1.0, 2.0, -2.0) / 3.0;
        let r = su2_to_so3(&axis, 2.0 * PI).unwrap();
        assert!((r - Matrix3::identity()).abs().max() < 1e-14);
        let half = make_spin_rep(0.5).unwrap();
        let u = rotation_unitary(&half, &axis, 2.0 * PI).unwrap();
        assert!(max_abs(&(u.matrix() + CMatrix::identity(2, 2))) < 1e-12);
        let one = make_spin_rep(1.0).unwrap();
        let u = rotation_unitary(&one, &axis, 2.0 * PI).unwrap();
        assert!(max_abs(&(u.matrix() - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn halfint_display_and_parse() {
        assert_eq!(HalfInt::try_from(1.5).unwrap().to_string(), "3/2");
        assert_eq!(HalfInt::try_from(-2.0).unwrap().to_string(), "-2");
        assert!(HalfInt::try_from(0.25).is_err());
    }
}
