use csdperm::benchgen::{random_orthogonal, random_orthogonal_sparse, random_unitary};
use csdperm::cli::{parse_matrix, write_matrix};
use csdperm::export::{parse_gatelist, to_gatelist};
use csdperm::optimizer::{anneal, threshold, worker_rng, AnnealConfig, CostModel};
use csdperm::{
    decompose, evaluate, reduce, swap_gate_count, Branch, Circuit, Control, Gate, PermutationList, QubitPermutation,
    SegmentedCircuit, UnitaryMatrix,
};
use proptest::prelude::*;

fn perm(len: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..len).collect::<Vec<_>>()).prop_shuffle()
}

fn perm_pair() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1usize..10).prop_flat_map(|n| (perm(n), perm(n)))
}

fn qubit_perm_pair() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1usize..6).prop_flat_map(|n| (perm(n), perm(n)))
}

/// Random controlled rotations drawn from a few angles so that mergeable
/// neighbours are common.
fn gate_soup() -> impl Strategy<Value = (usize, Vec<(u8, usize, Vec<u8>, usize)>)> {
    (1usize..5).prop_flat_map(|n| {
        let gate = (0u8..3, 0..n, proptest::collection::vec(0u8..3, n), 0usize..3);
        (Just(n), proptest::collection::vec(gate, 0..24))
    })
}

fn build(n: usize, spec: &[(u8, usize, Vec<u8>, usize)]) -> Circuit {
    let angles = [0.3, -1.1, 2.5];
    let mut c = Circuit::empty(n);
    for (kind, target, controls, angle) in spec {
        let a = angles[*angle];
        let mut g = match kind {
            0 => Gate::ry(target + 1, a),
            1 => Gate::rz(target + 1, a),
            _ => Gate::phase(target + 1, a),
        }
        .unwrap();
        for (q, ctl) in controls.iter().enumerate() {
            if q == *target {
                continue;
            }
            let ctl = match ctl {
                0 => Control::Zero,
                1 => Control::One,
                _ => Control::Free,
            };
            g = g.with_control(q + 1, ctl).unwrap();
        }
        c.push(g).unwrap();
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn list_matrix_round_trip(p in (1usize..12).prop_flat_map(perm)) {
        let list = PermutationList::from_zero_based(p).unwrap();
        let back = csdperm::perm::matrix_to_perm_list(&list.to_matrix().dense()).unwrap();
        prop_assert_eq!(back, list);
    }

    #[test]
    fn composition_is_matrix_product((a, b) in perm_pair()) {
        let a = PermutationList::from_zero_based(a).unwrap();
        let b = PermutationList::from_zero_based(b).unwrap();
        let product = a.to_matrix().dense_real() * b.to_matrix().dense_real();
        prop_assert_eq!(a.compose(&b).unwrap().to_matrix().dense_real(), product);
        prop_assert_eq!(a.inverse().to_matrix().dense_real(), a.to_matrix().dense_real().transpose());
    }

    #[test]
    fn qubit_composition_lifts((a, b) in qubit_perm_pair()) {
        let a = QubitPermutation::from_zero_based(a).unwrap();
        let b = QubitPermutation::from_zero_based(b).unwrap();
        let lifted = a.full_permutation().compose(&b.full_permutation()).unwrap();
        prop_assert_eq!(a.compose(&b).unwrap().full_permutation(), lifted);
    }

    #[test]
    fn swap_count_bounds(q in (1usize..8).prop_flat_map(perm)) {
        let n = q.len();
        let q = QubitPermutation::from_zero_based(q).unwrap();
        let s = swap_gate_count(&q);
        prop_assert!(s < n);
        prop_assert_eq!(s == 0, q.is_identity());
        prop_assert_eq!(swap_gate_count(&q.inverse()), s);
        prop_assert_eq!(q.swap_sequence().len(), s);
    }

    #[test]
    fn reduce_is_sound_and_idempotent((n, spec) in gate_soup()) {
        let c = build(n, &spec);
        let r = reduce(&c);
        prop_assert!(r.len() <= c.len());
        prop_assert_eq!(reduce(&r), r.clone());
        let dev = evaluate(&r).unwrap().max_deviation(evaluate(&c).unwrap().matrix());
        prop_assert!(dev <= 1e-10, "deviation {}", dev);
    }

    #[test]
    fn gatelist_round_trip((n, spec) in gate_soup(), q in (1usize..5).prop_flat_map(perm)) {
        let c = build(n, &spec);
        let swaps = csdperm::qubit_perm_to_swap_circuit(&QubitPermutation::from_zero_based(q.clone()).unwrap());
        let m = n.max(q.len());
        let widen = |c: &Circuit| {
            let mut w = Circuit::empty(m);
            for g in c.gates() {
                w.push(*g).unwrap();
            }
            w
        };
        let seg = SegmentedCircuit::new(m, vec![("A".into(), widen(&c)), ("B".into(), widen(&swaps))]).unwrap();
        prop_assert_eq!(parse_gatelist(&to_gatelist(&seg)).unwrap(), seg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decomposition_reconstructs(n in 1usize..5, seed in any::<u64>(), real in any::<bool>()) {
        let (u, branch) = if real {
            (random_orthogonal(1 << n, seed).unwrap(), Branch::Real)
        } else {
            (random_unitary(1 << n, seed).unwrap(), Branch::Complex)
        };
        let c = reduce(&decompose(&u, branch).unwrap());
        prop_assert!(evaluate(&c).unwrap().max_deviation(u.matrix()) <= 1e-8);
    }

    #[test]
    fn scrambled_block_matrices_reconstruct(
        (n, stride, p) in (2usize..5).prop_flat_map(|n| (Just(n), 1usize..n, perm(1 << n))),
        seed in any::<u64>(),
    ) {
        let m = 1 << n;
        let k = 1 << stride;
        let pattern: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| i % k == j % k).collect()).collect();
        let blocks = random_orthogonal_sparse(m, &pattern, seed).unwrap();
        let p = PermutationList::from_zero_based(p).unwrap();
        let u = UnitaryMatrix::new(p.conjugate(blocks.matrix())).unwrap();
        let c = reduce(&decompose(&u, Branch::Real).unwrap());
        prop_assert!(evaluate(&c).unwrap().max_deviation(u.matrix()) <= 1e-8);
    }

    #[test]
    fn matrix_file_round_trip(n in 1usize..9, seed in any::<u64>(), real in any::<bool>()) {
        let u = if real { random_orthogonal(n, seed) } else { random_unitary(n, seed) }.unwrap();
        let back = parse_matrix(&write_matrix(&u), 1e-10).unwrap();
        prop_assert_eq!(back, u);
    }

    #[test]
    fn search_state_invariants(seed in any::<u64>(), q in perm(3), alpha in 0.0f64..0.5) {
        let u = random_orthogonal(8, seed).unwrap();
        let model = CostModel::new(&u, Branch::Real).unwrap();
        let q = QubitPermutation::from_zero_based(q).unwrap();
        let cfg = AnnealConfig { i_max: 150, j_max: 0, alpha, seed, workers: 1 };
        let s = anneal(&model, &q, &cfg, &mut worker_rng(seed, 0)).unwrap();
        prop_assert_eq!(s.history.len(), 151);
        prop_assert_eq!(s.history[0], s.cost_initial.total);
        prop_assert!(s.cost_min.total <= s.cost_current.total);
        prop_assert!(s.history.iter().all(|&c| c >= s.cost_min.total));
        prop_assert_eq!(model.cost(&s.p_min, &q).unwrap(), s.cost_min);
        prop_assert_eq!(model.cost(&s.p_current, &q).unwrap(), s.cost_current);
        let limit = threshold(alpha, s.cost_initial.total, s.cost_initial.total);
        for w in s.history.windows(2) {
            prop_assert!(w[1] <= w[0] || w[1] - w[0] < limit);
        }
        let again = anneal(&model, &q, &cfg, &mut worker_rng(seed, 0)).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn threshold_never_exceeds_initial_share(alpha in 0.0f64..1.0, cur in 0usize..5000, init in 0usize..5000) {
        let b = threshold(alpha, cur, init);
        prop_assert!(b as f64 <= (alpha * init as f64).ceil());
        prop_assert!(b as f64 <= (alpha * cur as f64).ceil());
    }

    #[test]
    fn u_prime_is_a_conjugation(seed in any::<u64>(), p in perm(8), q in perm(3)) {
        let u = random_unitary(8, seed).unwrap();
        let model = CostModel::new(&u, Branch::Complex).unwrap();
        let p = PermutationList::from_zero_based(p).unwrap();
        let q = QubitPermutation::from_zero_based(q).unwrap();
        let pm = p.to_matrix().dense();
        let qm = q.full_permutation().to_matrix().dense();
        let expected = &pm * &qm * u.matrix() * qm.transpose() * pm.transpose();
        let got: UnitaryMatrix = model.u_prime(&p, &q).unwrap();
        prop_assert!(got.max_deviation(&expected) == 0.0);
    }
}
