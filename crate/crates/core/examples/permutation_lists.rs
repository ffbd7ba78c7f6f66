use csdperm::benchgen::random_orthogonal;
use csdperm::{csd_gate_count, Branch, PermutationList};

fn main() -> csdperm::Result<()> {
    let p = PermutationList::new(&[3, 1, 4, 2])?;
    let q = PermutationList::new(&[2, 1, 4, 3])?;
    println!("p      = {:?}", p.to_one_based());
    println!("p^-1   = {:?}", p.inverse().to_one_based());
    println!("p . q  = {:?}", p.compose(&q)?.to_one_based());
    println!("P =\n{}", p.to_matrix().dense_real());

    let m = p.to_matrix();
    println!("gates for P:   {}", csd_gate_count(&m.to_unitary(), Branch::Real)?);
    println!("gates for P^T: {}", csd_gate_count(&m.transpose().to_unitary(), Branch::Real)?);

    let u = random_orthogonal(4, 3)?;
    let conj = p.conjugate(u.matrix());
    let dense = m.dense();
    let dev = (&dense * u.matrix() * dense.transpose() - &conj).camax();
    println!("P U P^T via index shuffle, deviation {dev:.1e}");
    Ok(())
}
