use csdperm::benchgen::{dtqw_step, star_graph};
use csdperm::{expand_to_power_of_two, parallel_search, AnnealConfig, Branch, CostModel};

fn main() -> csdperm::Result<()> {
    let walk = dtqw_step(&star_graph(8)?)?;
    println!("walk operator is {0}x{0}", walk.dim());
    let u = expand_to_power_of_two(&walk);
    let model = CostModel::new(&u, Branch::Real)?;
    let cfg = AnnealConfig {
        i_max: 2_000,
        j_max: 100,
        alpha: 0.01,
        seed: 1,
        workers: 4,
    };
    let r = parallel_search(&model, &cfg)?;
    println!("no optimisation:  {}", r.unoptimised);
    println!("after selection:  {}", r.best_selection().selected_cost());
    println!("after annealing:  {}", r.breakdown);
    println!("best worker {}, q = {:?}", r.best_worker, r.q.to_one_based());
    Ok(())
}
