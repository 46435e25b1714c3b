//! Quadrance, norm and inner product on Z_7^2, and the identity that turns
//! a difference of quadrances into a linear form.

use qec::{inner_product, norm, quadrance, Modulus, Point};

fn main() -> qec::Result<()> {
    let p = Modulus::new(7)?;
    let x = Point::new(p, vec![1, 2]);
    let y = Point::new(p, vec![4, 6]);
    println!("Q({x}, {y}) = {}", quadrance(&x, &y)?);
    println!("||{x}|| = {}", norm(&x));
    println!("<{x}, {y}> = {}", inner_product(&x, &y)?);

    // Q(X,B) - Q(X,A) = ||B|| - ||A|| - 2<X, B - A>
    let a = Point::new(p, vec![3, 5]);
    let b = Point::new(p, vec![6, 0]);
    let lhs = p.sub(quadrance(&x, &b)?, quadrance(&x, &a)?);
    let two_dot = p.mul(p.residue(2), inner_product(&x, &b.sub(&a))?);
    let rhs = p.sub(p.sub(norm(&b), norm(&a)), two_dot);
    println!("polarization: {lhs} == {rhs}");
    assert_eq!(lhs, rhs);
    Ok(())
}
