//! Permutation search: the gate-count cost of `U = Q^T P^T U' P Q`, random
//! qubit-permutation selection, threshold-acceptance annealing over `P` and
//! a pool of independently seeded workers.
//!
//! Every worker draws from a `ChaCha8Rng` seeded with `seed_from_u64(seed)`
//! and switched to stream `worker_id`, so runs are reproducible for a fixed
//! `(seed, workers)` whatever the thread scheduling.

use std::fmt;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{qubit_perm_to_swap_circuit, reduce, SegmentedCircuit};
use crate::csd::{count_complex, count_real, decompose_complex, decompose_real, Branch};
use crate::error::{Error, Result};
use crate::linalg::{UnitaryMatrix, C64};
use crate::perm::{swap_gate_count, PermutationList, QubitPermutation};

pub type SearchRng = ChaCha8Rng;

/// Generator for `worker` under the pool's stream-splitting rule.
pub fn worker_rng(seed: u64, worker: usize) -> SearchRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// The terms of `CSD(U') + CSD(P) + CSD(P^T) + 2 s(Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CostBreakdown {
    pub csd_u_prime: usize,
    pub csd_p: usize,
    pub csd_p_t: usize,
    /// `2 s(Q)`: the swaps of `Q` and of `Q^T`.
    pub swap_cost: usize,
    pub total: usize,
}

impl CostBreakdown {
    pub fn new(csd_u_prime: usize, csd_p: usize, csd_p_t: usize, swap_cost: usize) -> Self {
        Self {
            csd_u_prime,
            csd_p,
            csd_p_t,
            swap_cost,
            total: csd_u_prime + csd_p + csd_p_t + swap_cost,
        }
    }
}

impl fmt::Display for CostBreakdown {
    /// Circuit order: swaps, `P`, `U'`, `P^T`, swaps.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.swap_cost / 2;
        write!(
            f,
            "{s} + {} + {} + {} + {s} = {}",
            self.csd_p, self.csd_u_prime, self.csd_p_t, self.total
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealConfig {
    pub i_max: usize,
    pub j_max: usize,
    /// Threshold fraction in `[0, 1)`.
    pub alpha: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            i_max: 40_000,
            j_max: 1_000,
            alpha: 0.01,
            seed: 1,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must lie in [0, 1), got {}", self.alpha)));
        }
        if self.workers == 0 {
            return Err(Error::Config("at least one worker is required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    QubitSel,
    Anneal,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::QubitSel => "qubitsel",
            Phase::Anneal => "anneal",
        }
    }
}

/// Cost after iteration `iteration` of a phase (0 is the starting point).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub phase: Phase,
    pub cost: usize,
}

/// The matrix being compiled, prepared for repeated cost evaluation.
#[derive(Debug, Clone)]
pub struct CostModel {
    matrix: Target,
    n_qubits: usize,
}

#[derive(Debug, Clone)]
enum Target {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

impl CostModel {
    pub fn new(u: &UnitaryMatrix, branch: Branch) -> Result<Self> {
        let n_qubits = u
            .n_qubits()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::Shape(format!("dimension {} is not a power of two >= 2", u.dim())))?;
        let matrix = match branch {
            Branch::Real => Target::Real(u.to_real().ok_or(Error::RealBranchComplexInput {
                max_imag: u.max_imag(),
            })?),
            Branch::Complex => Target::Complex(u.matrix().clone()),
        };
        Ok(Self { matrix, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn branch(&self) -> Branch {
        match self.matrix {
            Target::Real(_) => Branch::Real,
            Target::Complex(_) => Branch::Complex,
        }
    }

    fn check(&self, p: &PermutationList, q: &QubitPermutation) -> Result<()> {
        if p.len() != self.dim() || q.n_qubits() != self.n_qubits {
            return Err(Error::Shape(format!(
                "permutations of sizes {} and {} do not fit a {}-qubit matrix",
                p.len(),
                q.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// `U' = P Q U Q^T P^T`, as the list `r` with `U'[i][j] = U[r[i]][r[j]]`.
    fn conjugation(p: &PermutationList, q: &QubitPermutation) -> PermutationList {
        p.compose(&q.full_permutation()).expect("sizes checked")
    }

    /// `U' = P Q U Q^T P^T`.
    pub fn u_prime(&self, p: &PermutationList, q: &QubitPermutation) -> Result<UnitaryMatrix> {
        self.check(p, q)?;
        let r = Self::conjugation(p, q);
        Ok(match &self.matrix {
            Target::Real(u) => UnitaryMatrix::from_checked(r.conjugate(u).map(|x| C64::new(x, 0.0))),
            Target::Complex(u) => UnitaryMatrix::from_checked(r.conjugate(u)),
        })
    }

    pub fn cost(&self, p: &PermutationList, q: &QubitPermutation) -> Result<CostBreakdown> {
        self.check(p, q)?;
        let r = Self::conjugation(p, q);
        let csd_u_prime = match &self.matrix {
            Target::Real(u) => count_real(&r.conjugate(u))?,
            Target::Complex(u) => count_complex(&r.conjugate(u))?,
        };
        let (csd_p, csd_p_t) = if p.is_identity() {
            (0, 0)
        } else {
            let dense = p.to_matrix().dense_real();
            (count_real(&dense)?, count_real(&dense.transpose())?)
        };
        Ok(CostBreakdown::new(csd_u_prime, csd_p, csd_p_t, 2 * swap_gate_count(q)))
    }

    /// Reduced circuits for `Q, P, U', P^T, Q^T`, in time order.
    pub fn segmented_circuit(&self, p: &PermutationList, q: &QubitPermutation) -> Result<SegmentedCircuit> {
        self.check(p, q)?;
        let r = Self::conjugation(p, q);
        let u_prime = match &self.matrix {
            Target::Real(u) => decompose_real(&r.conjugate(u))?,
            Target::Complex(u) => decompose_complex(&r.conjugate(u))?,
        };
        let dense = p.to_matrix().dense_real();
        let swaps = qubit_perm_to_swap_circuit(q);
        SegmentedCircuit::five_part(
            swaps.clone(),
            reduce(&decompose_real(&dense)?),
            reduce(&u_prime),
            reduce(&decompose_real(&dense.transpose())?),
            swaps.reversed(),
        )
    }
}

/// `c(U, P, Q)` for a single evaluation.
pub fn cost(u: &UnitaryMatrix, p: &PermutationList, q: &QubitPermutation, branch: Branch) -> Result<CostBreakdown> {
    CostModel::new(u, branch)?.cost(p, q)
}

fn random_qubit_permutation<R: Rng>(n: usize, rng: &mut R) -> QubitPermutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    QubitPermutation::from_zero_based(v).expect("shuffle is a bijection")
}

/// Outcome of the qubit-permutation phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub q: QubitPermutation,
    pub cost: CostBreakdown,
    /// Best cost after each probe, starting with the identity's cost.
    pub history: Vec<usize>,
}

/// Draws `j_max` uniform qubit permutations and keeps the first strictly
/// cheaper one each time (`P` stays the identity).
pub fn select_qubit_permutation<R: Rng>(model: &CostModel, j_max: usize, rng: &mut R) -> Result<Selection> {
    let n = model.n_qubits();
    let identity_p = PermutationList::identity(model.dim());
    let mut q = QubitPermutation::identity(n);
    let mut best = model.cost(&identity_p, &q)?;
    let mut history = Vec::with_capacity(j_max + 1);
    history.push(best.total);
    for _ in 0..j_max {
        let candidate = random_qubit_permutation(n, rng);
        let c = model.cost(&identity_p, &candidate)?;
        if c.total < best.total {
            q = candidate;
            best = c;
        }
        history.push(best.total);
    }
    Ok(Selection { q, cost: best, history })
}

/// Bookkeeping of one annealing run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub q: QubitPermutation,
    pub p_current: PermutationList,
    pub p_min: PermutationList,
    pub cost_initial: CostBreakdown,
    pub cost_current: CostBreakdown,
    pub cost_min: CostBreakdown,
    /// Current cost after each iteration, starting with `cost_initial`.
    pub history: Vec<usize>,
}

/// Threshold `min(ceil(alpha c), ceil(alpha c0))` for a move away from cost `c`.
pub fn threshold(alpha: f64, current: usize, initial: usize) -> usize {
    // the small offset keeps products like 0.01 * 300 = 3.0000000000000004 at 3
    let ceil = |c: usize| (alpha * c as f64 - 1e-9).ceil().max(0.0) as usize;
    ceil(current).min(ceil(initial))
}

/// Threshold-acceptance annealing over `P` with `Q` fixed.
///
/// Starts at `P = I`. Each iteration swaps two distinct random positions of
/// the current list and accepts the move iff the cost change is `<= 0` or
/// strictly below [`threshold`].
pub fn anneal<R: Rng>(model: &CostModel, q: &QubitPermutation, cfg: &AnnealConfig, rng: &mut R) -> Result<SearchState> {
    cfg.validate()?;
    let m = model.dim();
    let mut p = PermutationList::identity(m);
    let initial = model.cost(&p, q)?;
    let mut state = SearchState {
        q: q.clone(),
        p_current: p.clone(),
        p_min: p.clone(),
        cost_initial: initial,
        cost_current: initial,
        cost_min: initial,
        history: Vec::with_capacity(cfg.i_max + 1),
    };
    state.history.push(initial.total);
    for _ in 0..cfg.i_max {
        let a = rng.random_range(0..m);
        let mut b = rng.random_range(0..m - 1);
        if b >= a {
            b += 1;
        }
        p.swap_positions(a, b);
        let c = model.cost(&p, q)?;
        let delta = c.total as i64 - state.cost_current.total as i64;
        let beta = threshold(cfg.alpha, state.cost_current.total, initial.total) as i64;
        if delta <= 0 || delta < beta {
            state.cost_current = c;
            state.p_current.swap_positions(a, b);
            if c.total < state.cost_min.total {
                state.cost_min = c;
                state.p_min = p.clone();
            }
        } else {
            p.swap_positions(a, b);
        }
        state.history.push(state.cost_current.total);
    }
    Ok(state)
}

/// Everything one worker produced.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerResult {
    pub worker: usize,
    /// `None` for worker 0, which keeps `Q = I`.
    pub selection: Option<Selection>,
    pub state: SearchState,
}

impl WorkerResult {
    /// Cost after qubit selection (identity `Q` for worker 0).
    pub fn selected_cost(&self) -> CostBreakdown {
        self.state.cost_initial
    }

    /// Full time series: selection probes then annealing iterations.
    pub fn history(&self) -> Vec<HistoryEntry> {
        let sel = self.selection.iter().flat_map(|s| {
            s.history.iter().enumerate().map(|(i, &cost)| HistoryEntry {
                iteration: i,
                phase: Phase::QubitSel,
                cost,
            })
        });
        let ann = self.state.history.iter().enumerate().map(|(i, &cost)| HistoryEntry {
            iteration: i,
            phase: Phase::Anneal,
            cost,
        });
        sel.chain(ann).collect()
    }

    /// CSV with header `iteration,phase,cost`.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,phase,cost\n");
        for e in self.history() {
            out.push_str(&format!("{},{},{}\n", e.iteration, e.phase.name(), e.cost));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_worker: usize,
    pub p: PermutationList,
    pub q: QubitPermutation,
    pub breakdown: CostBreakdown,
    /// `c(U, I, I)`.
    pub unoptimised: CostBreakdown,
    pub circuit: SegmentedCircuit,
    pub workers: Vec<WorkerResult>,
}

impl SearchResult {
    /// Worker with the cheapest post-selection cost (lowest id on ties).
    pub fn best_selection(&self) -> &WorkerResult {
        self.workers
            .iter()
            .min_by_key(|w| (w.selected_cost().total, w.worker))
            .expect("at least one worker")
    }
}

fn run_worker(model: &CostModel, cfg: &AnnealConfig, worker: usize) -> Result<WorkerResult> {
    let mut rng = worker_rng(cfg.seed, worker);
    let selection = if worker == 0 {
        None
    } else {
        Some(select_qubit_permutation(model, cfg.j_max, &mut rng)?)
    };
    let q = selection
        .as_ref()
        .map_or_else(|| QubitPermutation::identity(model.n_qubits()), |s| s.q.clone());
    let state = anneal(model, &q, cfg, &mut rng)?;
    Ok(WorkerResult { worker, selection, state })
}

/// Runs `cfg.workers` independent searches and keeps the cheapest.
///
/// Worker 0 skips qubit selection. Ties go to the lowest worker id.
pub fn parallel_search(model: &CostModel, cfg: &AnnealConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let outcomes: Vec<Result<WorkerResult>> = (0..cfg.workers)
        .into_par_iter()
        .map(|w| {
            run_worker(model, cfg, w).map_err(|e| Error::Worker {
                worker: w,
                source: Box::new(e),
            })
        })
        .collect();
    let workers = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let best = workers
        .iter()
        .min_by_key(|w| (w.state.cost_min.total, w.worker))
        .expect("at least one worker");
    let (p, q) = (best.state.p_min.clone(), best.state.q.clone());
    let circuit = model.segmented_circuit(&p, &q)?;
    let identity_p = PermutationList::identity(model.dim());
    let unoptimised = model.cost(&identity_p, &QubitPermutation::identity(model.n_qubits()))?;
    Ok(SearchResult {
        best_worker: best.worker,
        breakdown: best.state.cost_min,
        p,
        q,
        unoptimised,
        circuit,
        workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_formula() {
        assert_eq!(threshold(0.0, 100, 100), 0);
        assert_eq!(threshold(0.01, 300, 300), 3);
        assert_eq!(threshold(0.01, 301, 300), 3);
        assert_eq!(threshold(0.01, 250, 996), 3);
        assert_eq!(threshold(0.01, 50, 30), 1);
        assert_eq!(threshold(0.01, 0, 30), 0);
    }

    #[test]
    fn breakdown_display_order() {
        let b = CostBreakdown::new(19, 2, 3, 0);
        assert_eq!(b.to_string(), "0 + 2 + 19 + 3 + 0 = 24");
    }

    #[test]
    fn config_validation() {
        let mut cfg = AnnealConfig {
            alpha: 1.0,
            ..AnnealConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.alpha = 0.5;
        cfg.workers = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn identity_costs_nothing() {
        let model = CostModel::new(&UnitaryMatrix::identity(8), Branch::Real).unwrap();
        let c = model.cost(&PermutationList::identity(8), &QubitPermutation::identity(3)).unwrap();
        assert_eq!(c, CostBreakdown::default());
    }

    #[test]
    fn streams_differ_per_worker() {
        let a: u64 = worker_rng(1, 0).random();
        let b: u64 = worker_rng(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, worker_rng(1, 0).random::<u64>());
    }
}
