//! Exact checks of the Casorati determinant and a few expansion identities on
//! a seeded random instance.

use dops::verify::{check_identity, random_instance, Identity};

fn main() -> dops::error::Result<()> {
    let c = random_instance(3, 5, 11, false);
    for id in [Identity::Delta, Identity::BRecurrence, Identity::Dual, Identity::CdMultipoint] {
        let reps = check_identity(&c, id, 5, 1)?;
        let zero = reps.iter().filter(|r| r.residual_is_zero).count();
        println!("{id:<16} {zero}/{} residuals vanish", reps.len());
    }
    Ok(())
}
