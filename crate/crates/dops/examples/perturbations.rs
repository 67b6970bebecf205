//! Co-recursive, co-dilated and co-modified perturbations with their
//! closed-form residuals.

use dops::copoly::{co_dilated_closed_form, co_modified, co_recursive_closed_form, Perturbation};
use dops::rational::q;
use dops::verify::random_instance;
use rand::SeedableRng;

fn main() -> dops::error::Result<()> {
    let c = random_instance(2, 8, 5, false);
    let p = Perturbation::random(2, 1, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3));
    let rec = co_recursive_closed_form(&c, &p, 8)?;
    println!("co-recursive closed form exact: {}", rec.is_exact());
    let dil = co_dilated_closed_form(&c, 2, &q(-3, 2), 8)?;
    println!("co-dilated closed form exact: {}", dil.iter().all(|r| r.is_zero()));
    let m = co_modified(&c, &p, 8)?;
    println!("co-modified = co-recursive + co-dilated - original: {}", m.is_exact());
    Ok(())
}
