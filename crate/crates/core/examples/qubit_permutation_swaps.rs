use csdperm::{evaluate, qubit_perm_to_swap_circuit, swap_gate_count, QubitPermutation};

fn main() -> csdperm::Result<()> {
    for q in [vec![1, 2, 3], vec![2, 1, 3], vec![3, 1, 2], vec![4, 3, 2, 1]] {
        let qp = QubitPermutation::new(&q)?;
        let swaps = qubit_perm_to_swap_circuit(&qp);
        let full = qp.full_permutation();
        let same = evaluate(&swaps)?.max_deviation(&full.to_matrix().dense()) == 0.0;
        println!(
            "q = {q:?}: {} swaps {:?}, full permutation {:?}, matches: {same}",
            swap_gate_count(&qp),
            qp.swap_sequence(),
            full.to_one_based()
        );
    }
    Ok(())
}
