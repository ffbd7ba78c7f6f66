use csdperm::benchgen::random_unitary;
use csdperm::{csd_gate_count, decompose, evaluate, reduce, Branch};

fn main() -> csdperm::Result<()> {
    let u = random_unitary(16, 11)?;
    let raw = decompose(&u, Branch::Complex)?;
    let reduced = reduce(&raw);
    let dev = evaluate(&reduced)?.max_deviation(u.matrix());
    println!("raw gates:     {}", raw.gate_count());
    println!("reduced gates: {}", reduced.gate_count());
    println!("counted:       {}", csd_gate_count(&u, Branch::Complex)?);
    println!("max deviation: {dev:.3e}");
    for g in reduced.gates().iter().take(6) {
        println!("  {} {:?} {}", g.pattern(reduced.n_qubits()), g.kind(), g.angle().unwrap_or(0.0));
    }
    Ok(())
}
