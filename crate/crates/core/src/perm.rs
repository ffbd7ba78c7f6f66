//! Permutation calculus: lists, dense matrices and qubit-level permutations.
//!
//! A permutation list `p` and its matrix `P` are related by
//! `P[i][j] = 1` iff `p[i] = j`. Lists are written 1-based in text and in
//! the public constructors, and stored 0-based.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{UnitaryMatrix, C64, ONE};

fn check_bijection(entries: &[usize], what: &str) -> Result<()> {
    let m = entries.len();
    let mut seen = vec![false; m];
    for (i, &e) in entries.iter().enumerate() {
        if e >= m {
            return Err(Error::InvalidPermutation(format!(
                "{what} entry {} at position {} is out of range 1..={m}",
                e + 1,
                i + 1
            )));
        }
        if std::mem::replace(&mut seen[e], true) {
            return Err(Error::InvalidPermutation(format!(
                "{what} entry {} appears more than once",
                e + 1
            )));
        }
    }
    Ok(())
}

fn to_zero_based(one_based: &[usize], what: &str) -> Result<Vec<usize>> {
    one_based
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            e.checked_sub(1).ok_or_else(|| {
                Error::InvalidPermutation(format!("{what} entry 0 at position {} (lists are 1-based)", i + 1))
            })
        })
        .collect()
}

fn fmt_list(f: &mut fmt::Formatter<'_>, entries: &[usize]) -> fmt::Result {
    write!(f, "{{")?;
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}", e + 1)?;
    }
    write!(f, "}}")
}

/// A bijection on `{1..m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationList {
    entries: Vec<usize>,
}

impl PermutationList {
    /// Builds from 1-based entries, e.g. `[2, 1, 4, 3]`.
    pub fn new(one_based: &[usize]) -> Result<Self> {
        Self::from_zero_based(to_zero_based(one_based, "permutation")?)
    }

    pub fn from_zero_based(entries: Vec<usize>) -> Result<Self> {
        check_bijection(&entries, "permutation")?;
        Ok(Self { entries })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            entries: (0..m).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, &e)| i == e)
    }

    pub fn as_zero_based(&self) -> &[usize] {
        &self.entries
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e + 1).collect()
    }

    /// List of `P^T` (= `P^-1`).
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &e) in self.entries.iter().enumerate() {
            inv[e] = i;
        }
        Self { entries: inv }
    }

    /// List of the matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "cannot compose permutations of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            entries: self.entries.iter().map(|&e| other.entries[e]).collect(),
        })
    }

    /// Interchanges two (0-based) positions.
    pub fn swap_positions(&mut self, a: usize, b: usize) {
        self.entries.swap(a, b);
    }

    pub fn to_matrix(&self) -> PermutationMatrix {
        perm_list_to_matrix(self)
    }

    /// `P A P^T`, i.e. entry `(i, j)` is `A[p[i], p[j]]`.
    pub fn conjugate<T: nalgebra::Scalar + Copy>(&self, a: &DMatrix<T>) -> DMatrix<T> {
        let m = self.len();
        DMatrix::from_fn(m, m, |i, j| a[(self.entries[i], self.entries[j])])
    }
}

impl fmt::Display for PermutationList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_list(f, &self.entries)
    }
}

/// A permutation matrix kept in list form; the dense form is built on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMatrix {
    list: PermutationList,
}

impl PermutationMatrix {
    pub fn dim(&self) -> usize {
        self.list.len()
    }

    pub fn list(&self) -> &PermutationList {
        &self.list
    }

    pub fn transpose(&self) -> Self {
        Self {
            list: self.list.inverse(),
        }
    }

    pub fn dense_real(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        for (i, &j) in self.list.entries.iter().enumerate() {
            out[(i, j)] = 1.0;
        }
        out
    }

    pub fn dense(&self) -> DMatrix<C64> {
        let m = self.dim();
        let mut out = DMatrix::from_element(m, m, C64::new(0.0, 0.0));
        for (i, &j) in self.list.entries.iter().enumerate() {
            out[(i, j)] = ONE;
        }
        out
    }

    pub fn to_unitary(&self) -> UnitaryMatrix {
        UnitaryMatrix::from_checked(self.dense())
    }
}

/// Dense permutation matrix of `p`.
pub fn perm_list_to_matrix(p: &PermutationList) -> PermutationMatrix {
    PermutationMatrix { list: p.clone() }
}

/// Recovers the list from a dense 0/1 matrix.
pub fn matrix_to_perm_list(m: &DMatrix<C64>) -> Result<PermutationList> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape("permutation matrix must be square".into()));
    }
    let mut entries = Vec::with_capacity(m.nrows());
    for i in 0..m.nrows() {
        let mut col = None;
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if z == ONE {
                if col.replace(j).is_some() {
                    return Err(Error::InvalidPermutation(format!("row {} has several ones", i + 1)));
                }
            } else if z != C64::new(0.0, 0.0) {
                return Err(Error::InvalidPermutation(format!("row {} has a non 0/1 entry", i + 1)));
            }
        }
        entries.push(col.ok_or_else(|| Error::InvalidPermutation(format!("row {} has no one", i + 1)))?);
    }
    PermutationList::from_zero_based(entries)
}

/// A reordering of `n` qubit wires: output wire `k` carries input qubit `q[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitPermutation {
    entries: Vec<usize>,
}

impl QubitPermutation {
    pub fn new(one_based: &[usize]) -> Result<Self> {
        Self::from_zero_based(to_zero_based(one_based, "qubit permutation")?)
    }

    pub fn from_zero_based(entries: Vec<usize>) -> Result<Self> {
        check_bijection(&entries, "qubit permutation")?;
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: (0..n).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.entries.len()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, &e)| i == e)
    }

    pub fn as_zero_based(&self) -> &[usize] {
        &self.entries
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.entries.len()];
        for (i, &e) in self.entries.iter().enumerate() {
            inv[e] = i;
        }
        Self { entries: inv }
    }

    /// Qubit permutation whose full matrix is `Q_self * Q_other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::Shape("qubit permutations differ in length".into()));
        }
        Ok(Self {
            entries: self.entries.iter().map(|&e| other.entries[e]).collect(),
        })
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.entries.len()];
        let mut cycles = 0;
        for start in 0..self.entries.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.entries[k];
            }
        }
        cycles
    }

    pub fn swap_gate_count(&self) -> usize {
        swap_gate_count(self)
    }

    /// Wire swaps (0-based, applied first to last) realising this permutation.
    ///
    /// Selection order over output wires; uses exactly `n - cycles` swaps.
    pub fn swap_sequence(&self) -> Vec<(usize, usize)> {
        let n = self.entries.len();
        let mut content: Vec<usize> = (0..n).collect();
        let mut swaps = Vec::new();
        for k in 0..n {
            if content[k] != self.entries[k] {
                let j = (k + 1..n)
                    .find(|&j| content[j] == self.entries[k])
                    .expect("bijection guarantees the qubit is on a later wire");
                content.swap(k, j);
                swaps.push((k, j));
            }
        }
        swaps
    }

    /// The induced permutation on the `2^n` basis states.
    pub fn full_permutation(&self) -> PermutationList {
        qubit_perm_to_full_perm(self)
    }
}

impl fmt::Display for QubitPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_list(f, &self.entries)
    }
}

/// Builds the length-`2^n` list of a qubit permutation.
///
/// With qubit 1 as the most significant bit, entry `y` of the list is the
/// basis index `x` whose bit at qubit `q[k]` equals bit `k` of `y`; the
/// resulting matrix maps `|x>` to `|y>`.
pub fn qubit_perm_to_full_perm(q: &QubitPermutation) -> PermutationList {
    let n = q.n_qubits();
    let m = 1usize << n;
    let entries = (0..m)
        .map(|y| {
            let mut x = 0usize;
            for (k, &src) in q.entries.iter().enumerate() {
                let bit = (y >> (n - 1 - k)) & 1;
                x |= bit << (n - 1 - src);
            }
            x
        })
        .collect();
    PermutationList { entries }
}

/// Minimal number of SWAP gates: `n - cycles(q)`.
pub fn swap_gate_count(q: &QubitPermutation) -> usize {
    q.n_qubits() - q.cycle_count()
}
