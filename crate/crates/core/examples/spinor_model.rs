//! Hermitian 2x2 matrices as Minkowski space, and SL(2,C) acting on them.
use nalgebra::{Matrix2, Vector4};
use willmore_lab::spinor::{det, mat_to_vec, sl2_to_so13, vec_to_mat};
use willmore_lab::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = |re| C64::new(re, 0.0);
    let x = Vector4::new(c(2.0), c(1.0), c(-0.5), c(0.25));
    let m = vec_to_mat(&x);
    let re = |v: Vector4<C64>| v.map(|e| e.re).as_slice().to_vec();
    println!("x = {:?}\nm = {m}det m = {} (minus the Minkowski square)", re(x), det(&m).re);

    let g = Matrix2::new(c(1.0), C64::new(0.5, 0.5), c(0.0), c(1.0));
    let a = sl2_to_so13(&g)?;
    let image = g * m * g.adjoint();
    println!("g x = {:?}", re(mat_to_vec(&image)));
    println!("A x = {:?}", (a * x.map(|e| e.re)).as_slice());
    println!("A in SO+(1,3): A00 = {:.4}", a[(0, 0)]);
    Ok(())
}
