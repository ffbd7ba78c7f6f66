use csdperm::benchgen::random_orthogonal;
use csdperm::export::{export, parse_gatelist, Format};
use csdperm::{evaluate, Branch, CostModel, PermutationList, QubitPermutation};

fn main() -> csdperm::Result<()> {
    let u = random_orthogonal(4, 2)?;
    let model = CostModel::new(&u, Branch::Real)?;
    let p = PermutationList::new(&[2, 4, 1, 3])?;
    let q = QubitPermutation::new(&[2, 1])?;
    let circuit = model.segmented_circuit(&p, &q)?;
    println!("segments: {:?}", circuit.segment_counts());

    let text = export(&circuit, Format::Gatelist);
    print!("{text}");
    println!();
    print!("{}", export(&circuit, Format::QasmLike));

    let back = parse_gatelist(&text)?;
    let dev = evaluate(&back.flatten())?.max_deviation(u.matrix());
    println!("reparsed circuit deviation {dev:.1e}");
    Ok(())
}
