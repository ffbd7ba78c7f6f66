use csdperm::benchgen::random_orthogonal_sparse;
use csdperm::optimizer::worker_rng;
use csdperm::{anneal, AnnealConfig, Branch, CostModel, PermutationList, QubitPermutation, UnitaryMatrix};

fn main() -> csdperm::Result<()> {
    let pattern: Vec<Vec<bool>> = (0..16).map(|i| (0..16).map(|j| i % 4 == j % 4).collect()).collect();
    let blocks = random_orthogonal_sparse(16, &pattern, 4)?;
    let scramble = PermutationList::new(&[5, 2, 8, 1, 7, 3, 6, 4, 9, 10, 11, 12, 13, 14, 15, 16])?;
    let u = UnitaryMatrix::new(scramble.conjugate(blocks.matrix()))?;

    let model = CostModel::new(&u, Branch::Real)?;
    let cfg = AnnealConfig {
        i_max: 3_000,
        j_max: 0,
        alpha: 0.1,
        seed: 5,
        workers: 1,
    };
    let q = QubitPermutation::identity(model.n_qubits());
    let s = anneal(&model, &q, &cfg, &mut worker_rng(cfg.seed, 0))?;
    println!("initial {}", s.cost_initial);
    println!("final   {}", s.cost_current);
    println!("best    {}", s.cost_min);
    println!("p_min = {:?}", s.p_min.to_one_based());
    for (i, c) in s.history.iter().enumerate().step_by(300) {
        println!("{i:>5} {c}");
    }
    Ok(())
}
