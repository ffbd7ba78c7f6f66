use csdperm::benchgen::{qft_matrix, star_graph, dtqw_step};
use csdperm::cli::{parse_matrix, write_matrix};

fn main() -> csdperm::Result<()> {
    let real = dtqw_step(&star_graph(2)?)?;
    let text = write_matrix(&real);
    print!("{text}");
    let back = parse_matrix(&text, 1e-10)?;
    println!("round trip equal: {}", back == real);

    print!("{}", write_matrix(&qft_matrix(2)?));

    match parse_matrix("dim 2 real\n1 0\n0\n", 1e-10) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("error: {e}"),
    }
    Ok(())
}
