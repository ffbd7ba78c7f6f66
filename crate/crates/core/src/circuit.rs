//! Gate and circuit model, the merge-based reduction pass and the dense
//! evaluator used to verify every decomposition.
//!
//! Qubits are numbered from 1 in the public API. Gates in a [`Circuit`] are
//! listed in time order: the first gate acts first on the state.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{UnitaryMatrix, C64, ONE, ZERO};
use crate::perm::QubitPermutation;

/// Largest register [`evaluate`] simulates by default.
pub const DEFAULT_SIMULATION_CAP: usize = 12;

/// Two angles closer than this are considered equal by [`reduce`].
pub const MERGE_ANGLE_TOL: f64 = 1e-12;

/// Maximum register size representable by the bitmask control patterns.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Ry,
    Rz,
    Phase,
    Z,
    Swap,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Ry => "RY",
            Kind::Rz => "RZ",
            Kind::Phase => "PHASE",
            Kind::Z => "Z",
            Kind::Swap => "SWAP",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "RY" => Kind::Ry,
            "RZ" => Kind::Rz,
            "PHASE" => Kind::Phase,
            "Z" => Kind::Z,
            "SWAP" => Kind::Swap,
            _ => return None,
        })
    }
}

/// The single-qubit operation of a gate.
///
/// `Rz(a) = diag(e^{-ia/2}, e^{ia/2})`, `Ry(a)` is the real rotation by
/// `a/2`, `Phase(a) = e^{ia} I`. `Swap` carries its second (0-based) wire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Ry(f64),
    Rz(f64),
    Phase(f64),
    Z,
    Swap(usize),
}

impl Op {
    pub fn kind(&self) -> Kind {
        match self {
            Op::Ry(_) => Kind::Ry,
            Op::Rz(_) => Kind::Rz,
            Op::Phase(_) => Kind::Phase,
            Op::Z => Kind::Z,
            Op::Swap(_) => Kind::Swap,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Op::Ry(a) | Op::Rz(a) | Op::Phase(a) => Some(a),
            Op::Z | Op::Swap(_) => None,
        }
    }

    fn matrix(&self) -> [[C64; 2]; 2] {
        match *self {
            Op::Ry(a) => {
                let (s, c) = (a / 2.0).sin_cos();
                [
                    [C64::new(c, 0.0), C64::new(-s, 0.0)],
                    [C64::new(s, 0.0), C64::new(c, 0.0)],
                ]
            }
            Op::Rz(a) => [
                [C64::from_polar(1.0, -a / 2.0), ZERO],
                [ZERO, C64::from_polar(1.0, a / 2.0)],
            ],
            Op::Phase(a) => {
                let e = C64::from_polar(1.0, a);
                [[e, ZERO], [ZERO, e]]
            }
            Op::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Op::Swap(_) => unreachable!("swap has no 2x2 matrix"),
        }
    }
}

/// Condition a gate places on one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Control {
    /// Gate fires when the qubit is |1>.
    One,
    /// Gate fires when the qubit is |0>.
    Zero,
    Free,
}

/// A single-qubit operation conditioned on a pattern over the other qubits.
///
/// Control patterns are bitmasks indexed by 0-based wire (qubit 1 is bit 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    op: Op,
    target: usize,
    mask: u64,
    value: u64,
}

impl Gate {
    pub(crate) fn raw(op: Op, target: usize, mask: u64, value: u64) -> Self {
        debug_assert_eq!(mask & (1 << target), 0);
        debug_assert_eq!(value & !mask, 0);
        Self {
            op,
            target,
            mask,
            value,
        }
    }

    /// An uncontrolled gate on `target` (1-based).
    pub fn new(op: Op, target: usize) -> Result<Self> {
        if target == 0 || target > MAX_QUBITS {
            return Err(Error::Shape(format!("qubit index {target} out of range")));
        }
        if let Op::Swap(_) = op {
            return Err(Error::Shape("use Gate::swap for SWAP gates".into()));
        }
        Ok(Self::raw(op, target - 1, 0, 0))
    }

    pub fn ry(target: usize, angle: f64) -> Result<Self> {
        Self::new(Op::Ry(angle), target)
    }

    pub fn rz(target: usize, angle: f64) -> Result<Self> {
        Self::new(Op::Rz(angle), target)
    }

    pub fn phase(target: usize, angle: f64) -> Result<Self> {
        Self::new(Op::Phase(angle), target)
    }

    pub fn z(target: usize) -> Result<Self> {
        Self::new(Op::Z, target)
    }

    /// SWAP of two distinct 1-based qubits.
    pub fn swap(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a > MAX_QUBITS || b > MAX_QUBITS || a == b {
            return Err(Error::Shape(format!("invalid swap pair ({a}, {b})")));
        }
        let (lo, hi) = (a.min(b) - 1, a.max(b) - 1);
        Ok(Self::raw(Op::Swap(hi), lo, 0, 0))
    }

    /// Adds or replaces the condition on `qubit` (1-based).
    pub fn with_control(mut self, qubit: usize, control: Control) -> Result<Self> {
        if qubit == 0 || qubit > MAX_QUBITS {
            return Err(Error::Shape(format!("qubit index {qubit} out of range")));
        }
        let w = qubit - 1;
        if w == self.target {
            return Err(Error::Shape(format!("qubit {qubit} is the target")));
        }
        if let Op::Swap(_) = self.op {
            return Err(Error::Shape("SWAP gates carry no controls".into()));
        }
        let bit = 1u64 << w;
        match control {
            Control::Free => {
                self.mask &= !bit;
                self.value &= !bit;
            }
            Control::One => {
                self.mask |= bit;
                self.value |= bit;
            }
            Control::Zero => {
                self.mask |= bit;
                self.value &= !bit;
            }
        }
        Ok(self)
    }

    pub fn op(&self) -> Op {
        self.op
    }

    pub fn kind(&self) -> Kind {
        self.op.kind()
    }

    pub fn angle(&self) -> Option<f64> {
        self.op.angle()
    }

    /// 1-based target qubit (the lower qubit for SWAP).
    pub fn target(&self) -> usize {
        self.target + 1
    }

    /// Both 1-based qubits of a SWAP.
    pub fn swap_pair(&self) -> Option<(usize, usize)> {
        match self.op {
            Op::Swap(b) => Some((self.target + 1, b + 1)),
            _ => None,
        }
    }

    pub fn control(&self, qubit: usize) -> Control {
        if qubit == 0 || qubit > MAX_QUBITS {
            return Control::Free;
        }
        let bit = 1u64 << (qubit - 1);
        if self.mask & bit == 0 {
            Control::Free
        } else if self.value & bit != 0 {
            Control::One
        } else {
            Control::Zero
        }
    }

    pub fn n_controls(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_global_phase(&self) -> bool {
        matches!(self.op, Op::Phase(_)) && self.mask == 0
    }

    /// Highest 1-based qubit index the gate touches.
    pub fn max_qubit(&self) -> usize {
        let mut top = self.target + 1;
        if let Op::Swap(b) = self.op {
            top = top.max(b + 1);
        }
        if self.mask != 0 {
            top = top.max(64 - self.mask.leading_zeros() as usize);
        }
        top
    }

    /// Pattern string over `{0,1,.}` of length `n`, qubit 1 first.
    pub fn pattern(&self, n: usize) -> String {
        (1..=n)
            .map(|q| match self.control(q) {
                Control::One => '1',
                Control::Zero => '0',
                Control::Free => '.',
            })
            .collect()
    }

    /// Merge partner test of the reduction rule; returns the merged gate.
    fn merge_with(&self, other: &Gate) -> Option<Gate> {
        if self.target != other.target || self.mask != other.mask {
            return None;
        }
        let same_op = match (self.op, other.op) {
            (Op::Ry(a), Op::Ry(b)) | (Op::Rz(a), Op::Rz(b)) | (Op::Phase(a), Op::Phase(b)) => {
                (a - b).abs() <= MERGE_ANGLE_TOL
            }
            (Op::Z, Op::Z) => true,
            _ => false,
        };
        if !same_op {
            return None;
        }
        let diff = self.value ^ other.value;
        if diff.count_ones() != 1 {
            return None;
        }
        Some(Gate {
            op: self.op,
            target: self.target,
            mask: self.mask & !diff,
            value: self.value & !diff,
        })
    }
}

/// An ordered gate sequence on `n_qubits` wires.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn empty(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::empty(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub(crate) fn from_raw(n_qubits: usize, gates: Vec<Gate>) -> Self {
        Self { n_qubits, gates }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if gate.max_qubit() > self.n_qubits {
            return Err(Error::Shape(format!(
                "gate touches qubit {} but the circuit has {} qubits",
                gate.max_qubit(),
                self.n_qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of gates, not counting uncontrolled PHASE gates (which only
    /// contribute a global phase).
    pub fn gate_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_global_phase()).count()
    }

    /// Appends the gates of `other` (acting after `self`).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Shape("circuits differ in qubit count".into()));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// The circuit with gates in reverse order; the inverse for SWAP-only circuits.
    pub fn reversed(&self) -> Circuit {
        let mut gates = self.gates.clone();
        gates.reverse();
        Circuit::from_raw(self.n_qubits, gates)
    }
}

/// A circuit split into named consecutive parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedCircuit {
    n_qubits: usize,
    segments: Vec<(String, Circuit)>,
}

pub const SEGMENT_NAMES: [&str; 5] = ["Q", "P", "Uprime", "PT", "QT"];

impl SegmentedCircuit {
    pub fn new(n_qubits: usize, segments: Vec<(String, Circuit)>) -> Result<Self> {
        for (name, c) in &segments {
            if c.n_qubits() != n_qubits {
                return Err(Error::Shape(format!(
                    "segment {name} has {} qubits, expected {n_qubits}",
                    c.n_qubits()
                )));
            }
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Shape(format!("invalid segment name {name:?}")));
            }
        }
        Ok(Self { n_qubits, segments })
    }

    /// The five parts `Q, P, U', P^T, Q^T` in time order.
    pub fn five_part(q: Circuit, p: Circuit, u_prime: Circuit, p_t: Circuit, q_t: Circuit) -> Result<Self> {
        let n = q.n_qubits();
        let parts = [q, p, u_prime, p_t, q_t];
        Self::new(
            n,
            SEGMENT_NAMES
                .iter()
                .zip(parts)
                .map(|(name, c)| (name.to_string(), c))
                .collect(),
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn segments(&self) -> &[(String, Circuit)] {
        &self.segments
    }

    pub fn segment(&self, name: &str) -> Option<&Circuit> {
        self.segments.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn gate_count(&self) -> usize {
        self.segments.iter().map(|(_, c)| c.gate_count()).sum()
    }

    pub fn segment_counts(&self) -> Vec<usize> {
        self.segments.iter().map(|(_, c)| c.gate_count()).collect()
    }

    /// All segments concatenated in time order.
    pub fn flatten(&self) -> Circuit {
        let gates = self
            .segments
            .iter()
            .flat_map(|(_, c)| c.gates().iter().copied())
            .collect();
        Circuit::from_raw(self.n_qubits, gates)
    }
}

/// Merges gate pairs that differ in exactly one control value.
///
/// The circuit is split into maximal runs of consecutive gates sharing kind
/// and target. Gates in such a run commute, so any two of them may merge.
/// Within each run the first mergeable pair (scanning left to right) is
/// replaced by the merged gate at the earlier position, until no pair is
/// left. SWAP gates are never merged.
pub fn reduce(c: &Circuit) -> Circuit {
    let mut out = Vec::with_capacity(c.gates.len());
    let gates = &c.gates;
    let mut start = 0;
    while start < gates.len() {
        let g0 = gates[start];
        let mut end = start + 1;
        if g0.kind() != Kind::Swap {
            while end < gates.len() && gates[end].kind() == g0.kind() && gates[end].target == g0.target {
                end += 1;
            }
        }
        if end - start == 1 {
            out.push(g0);
        } else {
            let mut run = gates[start..end].to_vec();
            reduce_run(&mut run);
            out.extend(run);
        }
        start = end;
    }
    Circuit::from_raw(c.n_qubits, out)
}

fn reduce_run(run: &mut Vec<Gate>) {
    'outer: loop {
        for i in 0..run.len() {
            for j in i + 1..run.len() {
                if let Some(m) = run[i].merge_with(&run[j]) {
                    run[i] = m;
                    run.remove(j);
                    continue 'outer;
                }
            }
        }
        return;
    }
}

/// Dense unitary of a circuit, simulating at most [`DEFAULT_SIMULATION_CAP`] qubits.
pub fn evaluate(c: &Circuit) -> Result<UnitaryMatrix> {
    evaluate_with_cap(c, DEFAULT_SIMULATION_CAP)
}

pub fn evaluate_with_cap(c: &Circuit, cap: usize) -> Result<UnitaryMatrix> {
    if c.n_qubits > cap {
        return Err(Error::TooLarge {
            n_qubits: c.n_qubits,
            cap,
        });
    }
    let m = 1usize << c.n_qubits;
    let mut u = DMatrix::<C64>::identity(m, m);
    for g in &c.gates {
        apply_gate(&mut u, g, c.n_qubits);
    }
    Ok(UnitaryMatrix::from_checked(u))
}

/// Left-multiplies `u` by the full matrix of `g`.
pub(crate) fn apply_gate(u: &mut DMatrix<C64>, g: &Gate, n: usize) {
    let m = 1usize << n;
    let to_index = |wires: u64| -> usize {
        let mut idx = 0usize;
        for w in 0..n {
            if wires & (1 << w) != 0 {
                idx |= 1 << (n - 1 - w);
            }
        }
        idx
    };
    let cmask = to_index(g.mask);
    let cval = to_index(g.value);
    let tbit = 1usize << (n - 1 - g.target);
    match g.op {
        Op::Swap(b) => {
            let bbit = 1usize << (n - 1 - b);
            for i in 0..m {
                if i & tbit != 0 && i & bbit == 0 {
                    u.swap_rows(i, i ^ tbit ^ bbit);
                }
            }
        }
        op => {
            let mat = op.matrix();
            let cols = u.ncols();
            for i in 0..m {
                if i & tbit != 0 || i & cmask != cval {
                    continue;
                }
                let j = i | tbit;
                for k in 0..cols {
                    let (a, b) = (u[(i, k)], u[(j, k)]);
                    u[(i, k)] = mat[0][0] * a + mat[0][1] * b;
                    u[(j, k)] = mat[1][0] * a + mat[1][1] * b;
                }
            }
        }
    }
}

/// SWAP circuit realising the qubit permutation `q` with `n - cycles` gates.
pub fn qubit_perm_to_swap_circuit(q: &QubitPermutation) -> Circuit {
    let gates = q
        .swap_sequence()
        .into_iter()
        .map(|(a, b)| Gate::raw(Op::Swap(b.max(a)), a.min(b), 0, 0))
        .collect();
    Circuit::from_raw(q.n_qubits(), gates)
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op {
            Op::Swap(b) => write!(f, "SWAP({},{})", self.target + 1, b + 1),
            op => {
                write!(f, "{}", op.kind().name())?;
                if let Some(a) = op.angle() {
                    write!(f, "({a})")?;
                }
                write!(f, " on {}", self.target + 1)?;
                if self.mask != 0 {
                    let top = self.max_qubit();
                    write!(f, " if {}", self.pattern(top))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::perm::PermutationList;

    fn ry_ctrl(t: usize, a: f64, ctrls: &[(usize, Control)]) -> Gate {
        let mut g = Gate::ry(t, a).unwrap();
        for &(q, c) in ctrls {
            g = g.with_control(q, c).unwrap();
        }
        g
    }

    #[test]
    fn definitional_merge() {
        let c = Circuit::new(
            2,
            vec![
                ry_ctrl(1, 0.3, &[(2, Control::One)]),
                ry_ctrl(1, 0.3, &[(2, Control::Zero)]),
            ],
        )
        .unwrap();
        let r = reduce(&c);
        assert_eq!(r.gates(), &[Gate::ry(1, 0.3).unwrap()]);
        let diff = max_abs_diff(evaluate(&c).unwrap().matrix(), evaluate(&r).unwrap().matrix());
        assert!(diff < 1e-12);
    }

    #[test]
    fn four_gate_block_collapses_to_two() {
        use Control::*;
        let c = Circuit::new(
            3,
            vec![
                ry_ctrl(1, 0.4, &[(2, Zero), (3, Zero)]),
                ry_ctrl(1, 0.4, &[(2, Zero), (3, One)]),
                ry_ctrl(1, -1.1, &[(2, One), (3, Zero)]),
                ry_ctrl(1, -1.1, &[(2, One), (3, One)]),
            ],
        )
        .unwrap();
        let r = reduce(&c);
        assert_eq!(r.len(), 2);
        assert_eq!(r.gates()[0], ry_ctrl(1, 0.4, &[(2, Zero)]));
        assert_eq!(r.gates()[1], ry_ctrl(1, -1.1, &[(2, One)]));
        let diff = max_abs_diff(evaluate(&c).unwrap().matrix(), evaluate(&r).unwrap().matrix());
        assert!(diff < 1e-12);
    }

    #[test]
    fn no_equal_angles_unchanged() {
        use Control::*;
        let c = Circuit::new(
            2,
            vec![
                ry_ctrl(1, 0.1, &[(2, Zero)]),
                ry_ctrl(1, 0.2, &[(2, One)]),
                Gate::rz(2, 0.3).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(reduce(&c), c);
    }

    #[test]
    fn gates_split_by_other_target_do_not_merge() {
        use Control::*;
        let c = Circuit::new(
            2,
            vec![
                ry_ctrl(1, 0.5, &[(2, Zero)]),
                Gate::ry(2, 0.9).unwrap(),
                ry_ctrl(1, 0.5, &[(2, One)]),
            ],
        )
        .unwrap();
        assert_eq!(reduce(&c).len(), 3);
    }

    #[test]
    fn empty_circuit_evaluates_to_identity() {
        let u = evaluate(&Circuit::empty(3)).unwrap();
        assert_eq!(u.matrix(), &DMatrix::<C64>::identity(8, 8));
    }

    #[test]
    fn single_swap_matches_qubit_permutation() {
        let c = Circuit::new(2, vec![Gate::swap(1, 2).unwrap()]).unwrap();
        let u = evaluate(&c).unwrap();
        let p = PermutationList::new(&[1, 3, 2, 4]).unwrap();
        assert_eq!(u.matrix(), &p.to_matrix().dense());
    }

    #[test]
    fn ry_on_most_significant_qubit() {
        // qubit 1 is the high bit: Ry on qubit 1 of 2 mixes indices 0 and 2
        let a = 0.8f64;
        let u = evaluate(&Circuit::new(2, vec![Gate::ry(1, a).unwrap()]).unwrap()).unwrap();
        let m = u.matrix();
        assert!((m[(2, 0)].re - (a / 2.0).sin()).abs() < 1e-15);
        assert!((m[(0, 2)].re + (a / 2.0).sin()).abs() < 1e-15);
        assert_eq!(m[(1, 0)], ZERO);
    }

    #[test]
    fn application_order_is_left_first() {
        let g1 = Gate::ry(1, 0.7).unwrap();
        let g2 = Gate::rz(1, 0.4).unwrap();
        let c = Circuit::new(1, vec![g1, g2]).unwrap();
        let u1 = evaluate(&Circuit::new(1, vec![g1]).unwrap()).unwrap();
        let u2 = evaluate(&Circuit::new(1, vec![g2]).unwrap()).unwrap();
        let prod = u2.matrix() * u1.matrix();
        assert!(max_abs_diff(evaluate(&c).unwrap().matrix(), &prod) < 1e-15);
    }

    #[test]
    fn three_cycle_swap_circuit() {
        let q = QubitPermutation::new(&[3, 1, 2]).unwrap();
        let c = qubit_perm_to_swap_circuit(&q);
        assert_eq!(c.len(), 2);
        let u = evaluate(&c).unwrap();
        assert_eq!(u.matrix(), &q.full_permutation().to_matrix().dense());
        let ut = evaluate(&c.reversed()).unwrap();
        assert_eq!(ut.matrix(), &q.full_permutation().to_matrix().dense().transpose());
    }

    #[test]
    fn too_large_is_rejected() {
        assert!(matches!(
            evaluate_with_cap(&Circuit::empty(5), 4),
            Err(Error::TooLarge { n_qubits: 5, cap: 4 })
        ));
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::ry(0, 1.0).is_err());
        assert!(Gate::ry(1, 1.0).unwrap().with_control(1, Control::One).is_err());
        assert!(Gate::swap(1, 2).unwrap().with_control(3, Control::One).is_err());
        assert!(Gate::swap(2, 2).is_err());
        assert!(Circuit::new(2, vec![Gate::ry(3, 1.0).unwrap()]).is_err());
    }

    #[test]
    fn global_phase_not_counted() {
        let c = Circuit::new(
            2,
            vec![
                Gate::phase(1, 0.5).unwrap(),
                Gate::phase(1, 0.5).unwrap().with_control(2, Control::One).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.gate_count(), 1);
    }

    #[test]
    fn pattern_string() {
        let g = ry_ctrl(2, 0.1, &[(1, Control::Zero), (4, Control::One)]);
        assert_eq!(g.pattern(4), "0..1");
    }
}
