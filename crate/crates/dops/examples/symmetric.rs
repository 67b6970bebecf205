//! A 2-symmetric sequence split into its three components, with the
//! component recurrences and the Hahn property of the family.

use dops::dsym::{component_coeffs, decompose, dsym_generate, hahn_check, SymData};
use dops::rational::q;

fn main() -> dops::error::Result<()> {
    let s = SymData::constant(2, &q(3, 2), 200);
    let b = dsym_generate(&s, 30)?;
    println!("B_6 = {}", b[6]);
    let comps = decompose(&b, 2)?;
    for (i, comp) in comps.iter().enumerate() {
        let c = component_coeffs(&s, i, 4)?;
        println!("component {i}: P_2 = {}, beta_0 = {}", comp[2], c.beta[0]);
    }
    println!("Hahn through order 3: {}", hahn_check(&b[..24], 2, 3)?.hahn_positive());
    Ok(())
}
