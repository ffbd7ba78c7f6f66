use csdperm::{evaluate, reduce, Circuit, Control, Gate};

fn main() -> csdperm::Result<()> {
    let mut c = Circuit::empty(3);
    c.push(Gate::ry(3, 0.4)?.with_control(1, Control::Zero)?.with_control(2, Control::One)?)?;
    c.push(Gate::ry(3, 0.4)?.with_control(1, Control::One)?.with_control(2, Control::One)?)?;
    c.push(Gate::ry(3, 0.4)?.with_control(2, Control::Zero)?)?;
    c.push(Gate::rz(2, 0.7)?)?;
    c.push(Gate::rz(2, -0.2)?)?;

    let r = reduce(&c);
    println!("before: {} gates", c.len());
    for g in c.gates() {
        println!("  {} {:?} {:?}", g.pattern(3), g.kind(), g.angle());
    }
    println!("after: {} gates", r.len());
    for g in r.gates() {
        println!("  {} {:?} {:?}", g.pattern(3), g.kind(), g.angle());
    }
    let dev = evaluate(&r)?.max_deviation(evaluate(&c)?.matrix());
    println!("max deviation {dev:.1e}");
    Ok(())
}
