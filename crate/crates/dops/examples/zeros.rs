//! Zeros of a recurrence whose Jacobi matrix is a product of positive
//! bidiagonal factors: real, positive, simple and interlacing.

use dops::darboux::JacobiView;
use dops::zeros::{interlacing_check, oscillation_check, oscillation_instance, tn_check, zeros_of, TnMode, Tolerances};
use rand::SeedableRng;

fn main() -> dops::error::Result<()> {
    let c = oscillation_instance(2, 16, &mut rand_chacha::ChaCha8Rng::seed_from_u64(8))?;
    let tol = Tolerances::default();
    let z = zeros_of(&c, 8, tol)?;
    println!("zeros of P_8: {:?}", z.reals()?);
    println!("real {}, positive {}, simple {}", z.is_real(), z.all_positive(), z.is_simple());
    let j = JacobiView::new(c.clone()).leading(8)?;
    println!("J_8 totally nonnegative: {}", tn_check(&j, TnMode::Constructive)?.tn);
    println!("J_8 oscillatory: {}", oscillation_check(&j)?);
    println!("interlaces P_7: {}", interlacing_check(&z, &zeros_of(&c, 7, tol)?)?);
    Ok(())
}
