use csdperm::benchgen::{cayley_tree, dtqw_step};
use csdperm::optimizer::{select_qubit_permutation, worker_rng};
use csdperm::{expand_to_power_of_two, Branch, CostModel, PermutationList, QubitPermutation};

fn main() -> csdperm::Result<()> {
    let tree = cayley_tree(3, 3)?;
    println!("{} vertices, {} arcs", tree.n_vertices(), tree.arcs().len());
    let u = expand_to_power_of_two(&dtqw_step(&tree)?);
    let model = CostModel::new(&u, Branch::Real)?;
    let id = model.cost(&PermutationList::identity(u.dim()), &QubitPermutation::identity(model.n_qubits()))?;
    println!("identity:        {id}");
    let sel = select_qubit_permutation(&model, 30, &mut worker_rng(1, 1))?;
    println!("qubit selection: {} with q = {:?}", sel.cost, sel.q.to_one_based());
    Ok(())
}
