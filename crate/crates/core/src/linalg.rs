//! Dense matrix helpers and the validated [`UnitaryMatrix`] type.
//!
//! Basis convention used throughout the crate: for an `n`-qubit register,
//! qubit 1 is the most significant bit of a basis-state index. Qubit `k`
//! therefore corresponds to bit `n - k` of the (0-based) index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default tolerance for input unitarity checks (max-entry deviation of `U U^H - I`).
pub const UNITARY_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A square complex matrix that has been checked to be unitary.
///
/// `is_real` is set iff every imaginary part is exactly zero; it selects the
/// orthogonal decomposition branch when the branch is left on automatic.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: DMatrix<C64>,
    is_real: bool,
}

impl UnitaryMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerance(entries, UNITARY_TOL)
    }

    pub fn with_tolerance(entries: DMatrix<C64>, tol: f64) -> Result<Self> {
        let deviation = unitarity_deviation(&entries)?;
        if entries.nrows() == 0 {
            return Err(Error::Shape("matrix must have at least one row".into()));
        }
        if !(deviation <= tol) {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: tol,
            });
        }
        Ok(Self::from_checked(entries))
    }

    pub fn from_real(entries: DMatrix<f64>) -> Result<Self> {
        Self::new(entries.map(|x| C64::new(x, 0.0)))
    }

    pub fn from_real_with_tolerance(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        Self::with_tolerance(entries.map(|x| C64::new(x, 0.0)), tol)
    }

    /// Wraps a matrix already known to be unitary (products, permutations,
    /// circuit evaluations).
    pub(crate) fn from_checked(entries: DMatrix<C64>) -> Self {
        let is_real = entries.iter().all(|z| z.im == 0.0);
        Self { entries, is_real }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
            is_real: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        let m = self.dim();
        m.is_power_of_two().then(|| m.trailing_zeros() as usize)
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    /// Real parts, if the matrix is real.
    pub fn to_real(&self) -> Option<DMatrix<f64>> {
        self.is_real.then(|| self.entries.map(|z| z.re))
    }

    pub fn max_imag(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
    }

    pub fn transpose(&self) -> Self {
        Self {
            entries: self.entries.transpose(),
            is_real: self.is_real,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            is_real: self.is_real,
        }
    }

    /// Max absolute entrywise difference to another matrix of the same shape.
    pub fn max_deviation(&self, other: &DMatrix<C64>) -> f64 {
        max_abs_diff(&self.entries, other)
    }
}

/// `max |A - B|` over entries; infinite when shapes differ.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |U U^H - I|` for a square matrix.
pub fn unitarity_deviation(u: &DMatrix<C64>) -> Result<f64> {
    if u.nrows() != u.ncols() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let prod = u * u.adjoint();
    let mut dev = 0.0f64;
    for ((i, j), z) in prod.iter().enumerate().map(|(k, z)| ((k % u.nrows(), k / u.nrows()), z)) {
        let target = if i == j { ONE } else { ZERO };
        dev = dev.max((z - target).norm());
    }
    Ok(dev)
}

/// True iff `max |U U^H - I| <= tol`.
pub fn is_unitary(u: &DMatrix<C64>, tol: f64) -> Result<bool> {
    Ok(unitarity_deviation(u)? <= tol)
}

/// Pads `U` to the next power-of-two dimension with an identity block.
///
/// Entries with both indices inside the original `m x m` block are copied;
/// everything else is the Kronecker delta. Power-of-two inputs are returned
/// unchanged.
pub fn expand_to_power_of_two(u: &UnitaryMatrix) -> UnitaryMatrix {
    let m = u.dim();
    let target = m.next_power_of_two();
    if target == m {
        return u.clone();
    }
    let mut out = DMatrix::<C64>::identity(target, target);
    out.view_mut((0, 0), (m, m)).copy_from(u.matrix());
    UnitaryMatrix {
        entries: out,
        is_real: u.is_real,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unitary() {
        let id = DMatrix::<C64>::identity(4, 4);
        assert!(is_unitary(&id, 1e-10).unwrap());
    }

    #[test]
    fn broken_identity_is_not_unitary() {
        let mut id = DMatrix::<C64>::identity(4, 4);
        id[(2, 2)] = C64::new(2.0, 0.0);
        assert!(!is_unitary(&id, 1e-10).unwrap());
        assert!(matches!(
            UnitaryMatrix::new(id),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn non_square_is_shape_error() {
        let m = DMatrix::<C64>::zeros(2, 3);
        assert!(matches!(is_unitary(&m, 1e-10), Err(Error::Shape(_))));
    }

    #[test]
    fn expand_identity_three_to_four() {
        let u = UnitaryMatrix::identity(3);
        let e = expand_to_power_of_two(&u);
        assert_eq!(e.dim(), 4);
        assert_eq!(e.matrix(), &DMatrix::<C64>::identity(4, 4));
    }

    #[test]
    fn expand_keeps_power_of_two() {
        let u = UnitaryMatrix::identity(8);
        assert_eq!(expand_to_power_of_two(&u), u);
    }

    #[test]
    fn expand_fixes_padding_basis_vectors() {
        // 3x3 cyclic shift padded to 4x4
        let mut m = DMatrix::<C64>::zeros(3, 3);
        m[(0, 2)] = ONE;
        m[(1, 0)] = ONE;
        m[(2, 1)] = ONE;
        let u = UnitaryMatrix::new(m.clone()).unwrap();
        let e = expand_to_power_of_two(&u);
        assert_eq!(e.matrix()[(3, 3)], ONE);
        for k in 0..3 {
            assert_eq!(e.matrix()[(3, k)], ZERO);
            assert_eq!(e.matrix()[(k, 3)], ZERO);
        }
        assert!(is_unitary(e.matrix(), 1e-12).unwrap());
        assert_eq!(e.matrix().view((0, 0), (3, 3)), m);
    }

    #[test]
    fn realness_flag() {
        let mut m = DMatrix::<C64>::identity(2, 2);
        assert!(UnitaryMatrix::new(m.clone()).unwrap().is_real());
        m[(1, 1)] = C64::new(0.0, 1.0);
        assert!(!UnitaryMatrix::new(m).unwrap().is_real());
    }
}
