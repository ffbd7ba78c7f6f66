use csdperm::benchgen::qft_matrix;
use csdperm::{csd_gate_count, Branch};

fn main() -> csdperm::Result<()> {
    println!("{:>3} {:>8} {:>8}", "n", "gates", "4^n-1");
    for n in 1..=6 {
        let u = qft_matrix(1 << n)?;
        let count = csd_gate_count(&u, Branch::Complex)?;
        println!("{n:>3} {count:>8} {:>8}", (1usize << (2 * n)) - 1);
    }
    Ok(())
}
