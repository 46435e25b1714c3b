//! Construct 3-e.c. witnesses algebraically, for an independent triple and
//! for a collinear one with C - A = -(B - A).

use qec::witness::count_quadratic_solutions;
use qec::{find_witness, quadrance, Modulus, Pattern3, Point};

fn show(a: &Point, b: &Point, c: &Point, pattern: Pattern3) -> qec::Result<()> {
    let r = find_witness(a, b, c, pattern)?;
    println!("A={a} B={b} C={c} pattern {pattern}");
    println!(
        "  (u,v,w) = ({},{},{})  case {:?}  attempts {}",
        r.plan.u, r.plan.v, r.plan.w, r.plan.case, r.attempts
    );
    println!(
        "  X = {}  quadrances {} {} {}",
        r.x,
        quadrance(&r.x, a)?,
        quadrance(&r.x, b)?,
        quadrance(&r.x, c)?
    );
    println!(
        "  solutions on the affine space: {}",
        count_quadratic_solutions(&r.plan, a)?
    );
    assert!(r.verify(a, b, c, pattern));
    Ok(())
}

fn main() -> qec::Result<()> {
    let p = Modulus::new(7)?;
    let o = Point::origin(p, 5);
    let e1 = Point::unit(p, 5, 0);
    let e2 = Point::unit(p, 5, 1);
    show(&o, &e1, &e2, "111".parse()?)?;
    show(&o, &e1, &e1.scale(6), "222".parse()?)?;
    Ok(())
}
