//! Recursive cosine-sine decomposition into controlled single-qubit rotations.
//!
//! One CS step splits a `2k x 2k` unitary as
//! `blockdiag(L0, L1) [C -S; S C] blockdiag(R0, R1)`. The top-left block is
//! diagonalised with a one-sided Jacobi SVD whose columns are kept in their
//! original order, which leaves block-sparse and permutation structure
//! intact; the remaining factors follow from orthonormal completion.
//!
//! Two branches exist. The real branch works in real arithmetic and emits
//! only `RY` and `Z` gates. The complex branch pushes the leftover diagonal
//! of every left factor through the CS middle (any `diag(D, D)` commutes
//! with it), so each right factor only hands a diagonal back to its parent.
//! The top-level diagonal and those of the `L1` children are emitted as
//! cascades of controlled `RZ` gates plus one `PHASE`.

use nalgebra::{ComplexField, DMatrix};

use crate::circuit::{reduce, Circuit, Gate, Op};
use crate::error::{Error, Result};
use crate::linalg::{UnitaryMatrix, C64};

/// Gates whose angle is smaller than this are dropped at emission.
pub const ZERO_ANGLE_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 60;
const JACOBI_REL_TOL: f64 = 1e-15;
/// A pair of small-sine columns of `u21 V` is re-orthogonalised only when
/// its overlap divided by the smaller sine (roughly the reconstruction error
/// it would cause) exceeds this.
const SMALL_SINE_TOL: f64 = 1e-10;
/// A column this much lighter (in squared norm) than its partner is noise;
/// rotations between such a pair may never settle and do not block
/// convergence.
const JACOBI_NEGLIGIBLE: f64 = 1e-30;
/// Columns lighter than this are replaced during orthonormal completion.
const COMPLETION_TOL: f64 = 1e-13;

const PI: f64 = std::f64::consts::PI;
const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Real,
    Complex,
}

impl Branch {
    /// Real iff the matrix has no imaginary parts at all.
    pub fn detect(u: &UnitaryMatrix) -> Self {
        if u.is_real() {
            Branch::Real
        } else {
            Branch::Complex
        }
    }
}

/// Scalars the decomposition runs on (`f64` and `Complex64`).
pub trait Field: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Field for T {}

/// Factors of one CS step.
#[derive(Debug, Clone, PartialEq)]
pub struct CsdBlocks<T: Field = C64> {
    pub left_top: DMatrix<T>,
    pub left_bottom: DMatrix<T>,
    /// `theta_j` in `[0, pi/2]`.
    pub angles: Vec<f64>,
    pub right_top: DMatrix<T>,
    pub right_bottom: DMatrix<T>,
}

impl<T: Field> CsdBlocks<T> {
    /// `blockdiag(L0, L1) [C -S; S C] blockdiag(R0, R1)`.
    pub fn reassemble(&self) -> DMatrix<T> {
        let h = self.angles.len();
        let mut out = DMatrix::<T>::zeros(2 * h, 2 * h);
        let (cos, sin): (Vec<f64>, Vec<f64>) = self.angles.iter().map(|t| (t.cos(), t.sin())).unzip();
        let scale_rows = |m: &DMatrix<T>, f: &[f64]| {
            let mut m = m.clone();
            for (i, &x) in f.iter().enumerate() {
                m.row_mut(i).scale_mut(x);
            }
            m
        };
        let neg_sin: Vec<f64> = sin.iter().map(|s| -s).collect();
        let tl = &self.left_top * scale_rows(&self.right_top, &cos);
        let tr = &self.left_top * scale_rows(&self.right_bottom, &neg_sin);
        let bl = &self.left_bottom * scale_rows(&self.right_top, &sin);
        let br = &self.left_bottom * scale_rows(&self.right_bottom, &cos);
        out.view_mut((0, 0), (h, h)).copy_from(&tl);
        out.view_mut((0, h), (h, h)).copy_from(&tr);
        out.view_mut((h, 0), (h, h)).copy_from(&bl);
        out.view_mut((h, h), (h, h)).copy_from(&br);
        out
    }
}

/// 2x2 factorisation at the bottom of the recursion.
///
/// Complex: `M = e^{i phase} Rz(alpha) Ry(theta) Rz(beta)`.
/// Real: `M = Ry(theta)`, or `M = Ry(theta) Z` when `reflect` is set (the
/// `Z` acts first); `alpha`, `beta` and `phase` are then zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafDecomposition {
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
    pub phase: f64,
    pub reflect: bool,
}

impl LeafDecomposition {
    pub fn matrix(&self) -> DMatrix<C64> {
        let rz = |a: f64| DMatrix::from_row_slice(2, 2, &[C64::from_polar(1.0, -a / 2.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, a / 2.0)]);
        let (s, c) = (self.theta / 2.0).sin_cos();
        let ry = DMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)]);
        let mut m = rz(self.alpha) * ry * rz(self.beta) * C64::from_polar(1.0, self.phase);
        if self.reflect {
            m.column_mut(1).neg_mut();
        }
        m
    }
}

/// Wraps into `[-pi, pi)`, returning the number of `2 pi` shifts applied.
fn wrap_counted(mut x: f64) -> (f64, u32) {
    let mut k = 0;
    while x >= PI {
        x -= TAU;
        k += 1;
    }
    while x < -PI {
        x += TAU;
        k += 1;
    }
    (x, k)
}

fn wrap(x: f64) -> f64 {
    wrap_counted(x).0
}

fn leaf_complex(m: &DMatrix<C64>) -> LeafDecomposition {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let mut phase = det.arg() / 2.0;
    let unphase = C64::from_polar(1.0, -phase);
    let a = m[(0, 0)] * unphase;
    let b = m[(1, 0)] * unphase;
    let theta = 2.0 * b.norm().atan2(a.norm());
    let (alpha, beta) = if b.norm() < 1e-14 {
        (-2.0 * a.arg(), 0.0)
    } else if a.norm() < 1e-14 {
        (2.0 * b.arg(), 0.0)
    } else {
        (b.arg() - a.arg(), -a.arg() - b.arg())
    };
    // Rz(x + 2 pi) = -Rz(x): every shift moves pi into the phase
    let (alpha, k1) = wrap_counted(alpha);
    let (beta, k2) = wrap_counted(beta);
    if (k1 + k2) % 2 == 1 {
        phase += PI;
    }
    LeafDecomposition {
        alpha,
        theta,
        beta,
        phase: wrap(phase),
        reflect: false,
    }
}

fn leaf_real(m: &DMatrix<f64>) -> LeafDecomposition {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let reflect = det < 0.0;
    // for M = Ry(theta) Z the first column is unchanged
    let theta = 2.0 * m[(1, 0)].atan2(m[(0, 0)]);
    LeafDecomposition {
        alpha: 0.0,
        theta,
        beta: 0.0,
        phase: 0.0,
        reflect,
    }
}

/// ZYZ (complex) or RY/Z (real) factorisation of a 2x2 unitary.
pub fn leaf_decomposition(m: &UnitaryMatrix, branch: Branch) -> Result<LeafDecomposition> {
    if m.dim() != 2 {
        return Err(Error::Shape(format!("leaf decomposition needs a 2x2 matrix, got {0}x{0}", m.dim())));
    }
    match branch {
        Branch::Complex => Ok(leaf_complex(m.matrix())),
        Branch::Real => Ok(leaf_real(&real_entries(m)?)),
    }
}

fn real_entries(u: &UnitaryMatrix) -> Result<DMatrix<f64>> {
    u.to_real().ok_or(Error::RealBranchComplexInput {
        max_imag: u.max_imag(),
    })
}

/// One-sided Jacobi on the columns `cols` of `a`: rotates column pairs
/// until each overlap is below `rel_tol` times the geometric mean of the
/// squared norms or `abs_tol` times the smaller norm. Every rotation is
/// applied to the same columns of each companion as well.
fn jacobi_columns<T: Field>(
    a: &mut DMatrix<T>,
    companions: &mut [&mut DMatrix<T>],
    cols: &[usize],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<()> {
    let rows = a.nrows();
    let rotate = |m: &mut DMatrix<T>, p: usize, q: usize, c: f64, sp: T, sq: T| {
        let r = m.nrows();
        let data = m.as_mut_slice();
        let (lo, hi) = data.split_at_mut(p.max(q) * r);
        let (cp, cq) = if p < q {
            (&mut lo[p * r..(p + 1) * r], &mut hi[..r])
        } else {
            (&mut hi[..r], &mut lo[q * r..(q + 1) * r])
        };
        for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
            let (xv, yv) = (*x, *y);
            *x = xv.scale(c) - sq * yv;
            *y = sp * xv + yv.scale(c);
        }
    };
    fn column<T: Field>(m: &DMatrix<T>, p: usize) -> &[T] {
        let r = m.nrows();
        &m.as_slice()[p * r..(p + 1) * r]
    }
    let sq_norm = |m: &DMatrix<T>, p: usize| column(m, p).iter().map(|x| x.modulus_squared()).sum::<f64>();
    let mut norms: Vec<f64> = (0..a.ncols()).map(|p| sq_norm(a, p)).collect();
    // a zero column never takes part in a rotation, so it can be left out
    let live: Vec<usize> = cols.iter().copied().filter(|&p| norms[p] > 0.0).collect();
    let mut significant = true;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        significant = false;
        for (k, &p) in live.iter().enumerate() {
            for &q in &live[k + 1..] {
                let (aa, bb) = (norms[p], norms[q]);
                let mut g = T::zero();
                for (x, y) in column(a, p).iter().zip(column(a, q)) {
                    g += x.conjugate() * *y;
                }
                let ag = g.modulus();
                if ag <= rel_tol * (aa * bb).sqrt() || ag <= abs_tol * aa.min(bb).sqrt() || ag < 1e-300 {
                    continue;
                }
                rotated = true;
                significant |= aa.min(bb) > JACOBI_NEGLIGIBLE * aa.max(bb);
                let ph = g.unscale(ag);
                let zeta = (bb - aa) / (2.0 * ag);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + zeta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                let sp = ph.scale(s);
                let sq = ph.conjugate().scale(s);
                rotate(a, p, q, c, sp, sq);
                for m in companions.iter_mut() {
                    rotate(m, p, q, c, sp, sq);
                }
                norms[p] = sq_norm(a, p);
                norms[q] = sq_norm(a, q);
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    if !significant {
        return Ok(());
    }
    Err(Error::NumericalBreakdown(format!(
        "Jacobi SVD of a {rows}x{} block did not converge in {JACOBI_MAX_SWEEPS} sweeps",
        cols.len()
    )))
}

/// Unit vectors of a growing orthonormal set, each with the indices of its
/// nonzero entries (the matrices met here are often very sparse).
struct Basis<T> {
    vectors: Vec<Vec<T>>,
    supports: Vec<Vec<usize>>,
}

impl<T: Field> Basis<T> {
    fn new() -> Self {
        Self {
            vectors: Vec::new(),
            supports: Vec::new(),
        }
    }

    fn push(&mut self, v: &[T]) {
        self.supports
            .push((0..v.len()).filter(|&i| v[i] != T::zero()).collect());
        self.vectors.push(v.to_vec());
    }

    /// Two passes of modified Gram-Schmidt; the second restores
    /// orthogonality when the first cancelled most of `v`.
    fn project_out(&self, v: &mut [T]) {
        for _ in 0..2 {
            for (u, support) in self.vectors.iter().zip(&self.supports) {
                let mut d = T::zero();
                for &i in support {
                    d += u[i].conjugate() * v[i];
                }
                if d == T::zero() {
                    continue;
                }
                for &i in support {
                    v[i] -= d * u[i];
                }
            }
        }
    }
}

fn norm<T: Field>(v: &[T]) -> f64 {
    v.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

/// Unitary whose column `j` is `x_j / |x_j|` for the heavy columns
/// (processed by decreasing weight with modified Gram-Schmidt); light
/// columns are completed from the standard basis, preferring `e_j`.
fn orthonormalize<T: Field>(x: &DMatrix<T>, weights: &[f64]) -> DMatrix<T> {
    let n = x.nrows();
    let mut out = DMatrix::<T>::zeros(n, n);
    let mut done = vec![false; n];
    let mut basis = Basis::new();
    let mut v = vec![T::zero(); n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]));
    for &j in &order {
        if weights[j] > COMPLETION_TOL {
            v.copy_from_slice(&x.as_slice()[j * n..(j + 1) * n]);
            basis.project_out(&mut v);
            let nv = norm(&v);
            if nv <= COMPLETION_TOL {
                continue;
            }
            v.iter_mut().for_each(|e| *e = e.unscale(nv));
            out.as_mut_slice()[j * n..(j + 1) * n].copy_from_slice(&v);
            basis.push(&v);
            done[j] = true;
        }
    }
    // squared length of e_k's projection onto the current basis
    let mut covered = vec![0.0; n];
    for u in &basis.vectors {
        for (c, e) in covered.iter_mut().zip(u) {
            *c += e.modulus_squared();
        }
    }
    for j in 0..n {
        if done[j] {
            continue;
        }
        let residual = |k: usize| (1.0 - covered[k]).max(0.0).sqrt();
        let mut pick = None;
        let mut best = (f64::NEG_INFINITY, j);
        for k in std::iter::once(j).chain((0..n).filter(|&k| k != j)) {
            let r = residual(k);
            if r > 0.5 {
                pick = Some(k);
                break;
            }
            if r > best.0 {
                best = (r, k);
            }
        }
        let k = pick.unwrap_or(best.1);
        v.iter_mut().for_each(|e| *e = T::zero());
        v[k] = T::one();
        basis.project_out(&mut v);
        let nv = norm(&v);
        v.iter_mut().for_each(|e| *e = e.unscale(nv));
        for (c, e) in covered.iter_mut().zip(&v) {
            *c += e.modulus_squared();
        }
        out.as_mut_slice()[j * n..(j + 1) * n].copy_from_slice(&v);
        basis.push(&v);
    }
    out
}

fn csd_blocks<T: Field>(u: &DMatrix<T>) -> Result<CsdBlocks<T>> {
    let m = u.nrows();
    let h = m / 2;
    let u11 = u.view((0, 0), (h, h));
    let u12 = u.view((0, h), (h, h));
    let u21 = u.view((h, 0), (h, h));
    let u22 = u.view((h, h), (h, h));
    let mut w = u11.into_owned();
    let mut v = DMatrix::<T>::identity(h, h);
    let all: Vec<usize> = (0..h).collect();
    jacobi_columns(&mut w, &mut [&mut v], &all, JACOBI_REL_TOL, 0.0)?;
    let mut x = u21 * &v;
    // where the sine is small, u21 V only fixes its columns to about half
    // precision; orthogonalising them directly restores the lost digits
    let small: Vec<usize> = (0..h)
        .filter(|&j| 4.0 * x.column(j).norm_squared() < w.column(j).norm_squared())
        .collect();
    if small.len() > 1 {
        jacobi_columns(&mut x, &mut [&mut w, &mut v], &small, 0.0, SMALL_SINE_TOL)?;
    }
    let c: Vec<f64> = w.column_iter().map(|col| col.norm()).collect();
    let s: Vec<f64> = x.column_iter().map(|col| col.norm()).collect();
    let l0 = orthonormalize(&w, &c);
    let l1 = orthonormalize(&x, &s);
    let angles: Vec<f64> = s.iter().zip(&c).map(|(s, c)| s.atan2(*c)).collect();
    let r0 = v.adjoint();
    let a = l0.adjoint() * u12;
    let b = l1.adjoint() * u22;
    let mut r1 = DMatrix::<T>::zeros(h, h);
    for (i, t) in angles.iter().enumerate() {
        let (sn, cs) = t.sin_cos();
        for j in 0..h {
            r1[(i, j)] = b[(i, j)].scale(cs) - a[(i, j)].scale(sn);
        }
    }
    Ok(CsdBlocks {
        left_top: l0,
        left_bottom: l1,
        angles,
        right_top: r0,
        right_bottom: r1,
    })
}

fn check_dim(dim: usize, min: usize) -> Result<usize> {
    if !dim.is_power_of_two() || dim < min {
        return Err(Error::Shape(format!(
            "dimension {dim} must be a power of two and at least {min}"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// One CS step of a unitary of dimension `2^k`, `k >= 2`.
pub fn csd_step(u: &UnitaryMatrix) -> Result<CsdBlocks<C64>> {
    check_dim(u.dim(), 4)?;
    csd_blocks(u.matrix())
}

/// Real-arithmetic CS step of an orthogonal matrix.
pub fn csd_step_real(u: &DMatrix<f64>) -> Result<CsdBlocks<f64>> {
    check_dim(u.nrows(), 4)?;
    csd_blocks(u)
}

#[derive(Debug)]
enum Tree {
    Leaf(LeafDecomposition),
    Node {
        angles: Vec<f64>,
        left_top: Box<Tree>,
        left_bottom: Box<Tree>,
        /// diagonal applied before `left_bottom` (complex branch only)
        left_bottom_diag: Option<Vec<C64>>,
        right_top: Box<Tree>,
        right_bottom: Box<Tree>,
    },
}

fn build_real(m: &DMatrix<f64>) -> Result<Tree> {
    if m.nrows() == 2 {
        return Ok(Tree::Leaf(leaf_real(m)));
    }
    let b = csd_blocks(m)?;
    Ok(Tree::Node {
        angles: b.angles,
        left_top: Box::new(build_real(&b.left_top)?),
        left_bottom: Box::new(build_real(&b.left_bottom)?),
        left_bottom_diag: None,
        right_top: Box::new(build_real(&b.right_top)?),
        right_bottom: Box::new(build_real(&b.right_bottom)?),
    })
}

/// Factors `m = T diag(d)` where `T` is the returned tree.
fn build_complex(m: &DMatrix<C64>) -> Result<(Tree, Vec<C64>)> {
    if m.nrows() == 2 {
        let leaf = leaf_complex(m);
        let e = C64::from_polar(1.0, leaf.phase);
        let d = vec![e * C64::from_polar(1.0, -leaf.beta / 2.0), e * C64::from_polar(1.0, leaf.beta / 2.0)];
        let tree_leaf = LeafDecomposition {
            beta: 0.0,
            phase: 0.0,
            ..leaf
        };
        return Ok((Tree::Leaf(tree_leaf), d));
    }
    let CsdBlocks {
        left_top,
        mut left_bottom,
        angles,
        mut right_top,
        mut right_bottom,
    } = csd_blocks(m)?;
    let (t0, d0) = build_complex(&left_top)?;
    for (j, d) in d0.iter().enumerate() {
        let dc = d.conj();
        for x in left_bottom.column_mut(j).iter_mut() {
            *x *= dc;
        }
        for x in right_top.row_mut(j).iter_mut() {
            *x *= d;
        }
        for x in right_bottom.row_mut(j).iter_mut() {
            *x *= d;
        }
    }
    let (t1, d1) = build_complex(&left_bottom)?;
    let (r0, mut e) = build_complex(&right_top)?;
    let (r1, e1) = build_complex(&right_bottom)?;
    e.extend(e1);
    Ok((
        Tree::Node {
            angles,
            left_top: Box::new(t0),
            left_bottom: Box::new(t1),
            left_bottom_diag: Some(d1),
            right_top: Box::new(r0),
            right_bottom: Box::new(r1),
        },
        e,
    ))
}

/// One block of a recursion level: the controls selecting it, its tree and
/// an optional diagonal applied before it.
struct Item<'a> {
    prefix: u64,
    tree: &'a Tree,
    diag: Option<&'a [C64]>,
}

struct Emitter {
    n: usize,
    gates: Vec<Gate>,
}

impl Emitter {
    fn push(&mut self, op: Op, target: usize, mask: u64, value: u64) {
        let angle = op.angle().unwrap_or(1.0);
        if angle.abs() >= ZERO_ANGLE_TOL {
            self.gates.push(Gate::raw(op, target, mask, value));
        }
    }

    /// Gates for a level of the recursion; all items sit at depth `q`.
    fn level(&mut self, forest: &[Item<'_>], q: usize) {
        let prefix_mask = (1u64 << q) - 1;
        self.diagonals(forest, q, prefix_mask);
        let Tree::Node { .. } = forest[0].tree else {
            let leaves = || {
                forest.iter().map(|it| match it.tree {
                    Tree::Leaf(l) => (it.prefix, l),
                    Tree::Node { .. } => unreachable!("levels are uniform"),
                })
            };
            for (p, l) in leaves() {
                if l.reflect {
                    self.push(Op::Z, q, prefix_mask, p);
                }
            }
            for (p, l) in leaves() {
                self.push(Op::Ry(l.theta), q, prefix_mask, p);
            }
            for (p, l) in leaves() {
                self.push(Op::Rz(l.alpha), q, prefix_mask, p);
            }
            return;
        };
        let mut right = Vec::with_capacity(2 * forest.len());
        let mut left = Vec::with_capacity(2 * forest.len());
        for it in forest {
            let Tree::Node {
                left_top,
                left_bottom,
                left_bottom_diag,
                right_top,
                right_bottom,
                ..
            } = it.tree
            else {
                unreachable!("levels are uniform")
            };
            let one = it.prefix | (1 << q);
            right.push(Item { prefix: it.prefix, tree: right_top, diag: None });
            right.push(Item { prefix: one, tree: right_bottom, diag: None });
            left.push(Item { prefix: it.prefix, tree: left_top, diag: None });
            left.push(Item { prefix: one, tree: left_bottom, diag: left_bottom_diag.as_deref() });
        }
        self.level(&right, q + 1);
        let k = self.n - q - 1;
        let lower_mask = ((1u64 << k) - 1) << (q + 1);
        for it in forest {
            let Tree::Node { angles, .. } = it.tree else { unreachable!() };
            for (j, t) in angles.iter().enumerate() {
                self.push(Op::Ry(2.0 * t), q, prefix_mask | lower_mask, it.prefix | spread_bits(j, k, q + 1));
            }
        }
        self.level(&left, q + 1);
    }

    /// Cascades of controlled `RZ` gates (one level per qubit, deepest
    /// first) followed by a `PHASE` on the top qubit of each block.
    fn diagonals(&mut self, forest: &[Item<'_>], q: usize, prefix_mask: u64) {
        let mut cur: Vec<(u64, Vec<C64>)> = forest
            .iter()
            .filter_map(|it| it.diag.map(|d| (it.prefix, d.to_vec())))
            .collect();
        if cur.is_empty() {
            return;
        }
        let k = self.n - q;
        for lvl in (1..=k).rev() {
            let target = q + lvl - 1;
            let mask = prefix_mask | (((1u64 << (lvl - 1)) - 1) << q);
            for (prefix, d) in cur.iter_mut() {
                let mut common = Vec::with_capacity(d.len() / 2);
                for (idx, pair) in d.chunks_exact(2).enumerate() {
                    let (pa, pb) = (pair[0].arg(), pair[1].arg());
                    let mut angle = pb - pa;
                    let mut c = (pa + pb) / 2.0;
                    if angle >= PI {
                        angle -= TAU;
                        c += PI;
                    }
                    if angle < -PI {
                        angle += TAU;
                        c += PI;
                    }
                    self.push(Op::Rz(angle), target, mask, *prefix | spread_bits(idx, lvl - 1, q));
                    common.push(C64::from_polar(1.0, c));
                }
                *d = common;
            }
        }
        for (prefix, d) in &cur {
            self.push(Op::Phase(wrap(d[0].arg())), q, prefix_mask, *prefix);
        }
    }
}

/// Places the `k` bits of `j` (most significant first) on wires `first..first+k`.
fn spread_bits(j: usize, k: usize, first: usize) -> u64 {
    let mut out = 0u64;
    for i in 0..k {
        if (j >> (k - 1 - i)) & 1 == 1 {
            out |= 1 << (first + i);
        }
    }
    out
}

/// Real-branch decomposition of an orthogonal `2^n x 2^n` matrix.
pub fn decompose_real(u: &DMatrix<f64>) -> Result<Circuit> {
    let n = check_dim(u.nrows(), 2)?;
    let tree = build_real(u)?;
    let mut em = Emitter { n, gates: Vec::new() };
    em.level(&[Item { prefix: 0, tree: &tree, diag: None }], 0);
    Ok(Circuit::from_raw(n, em.gates))
}

/// Complex-branch decomposition of a unitary `2^n x 2^n` matrix.
pub fn decompose_complex(u: &DMatrix<C64>) -> Result<Circuit> {
    let n = check_dim(u.nrows(), 2)?;
    let (tree, diag) = build_complex(u)?;
    let mut em = Emitter { n, gates: Vec::new() };
    em.level(&[Item { prefix: 0, tree: &tree, diag: Some(&diag) }], 0);
    Ok(Circuit::from_raw(n, em.gates))
}

/// Circuit reproducing `u` exactly (global phase included).
pub fn decompose(u: &UnitaryMatrix, branch: Branch) -> Result<Circuit> {
    match branch {
        Branch::Real => decompose_real(&real_entries(u)?),
        Branch::Complex => decompose_complex(u.matrix()),
    }
}

/// Gate count of the reduced decomposition.
pub fn csd_gate_count(u: &UnitaryMatrix, branch: Branch) -> Result<usize> {
    Ok(reduce(&decompose(u, branch)?).gate_count())
}

pub(crate) fn count_real(u: &DMatrix<f64>) -> Result<usize> {
    Ok(reduce(&decompose_real(u)?).gate_count())
}

pub(crate) fn count_complex(u: &DMatrix<C64>) -> Result<usize> {
    Ok(reduce(&decompose_complex(u)?).gate_count())
}
