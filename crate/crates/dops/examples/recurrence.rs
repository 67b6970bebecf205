//! Generate a 2-orthogonal sequence, shift it to its first associated
//! sequence, and recover the recurrence from the polynomials alone.

use dops::rational::{int, q};
use dops::seq::{associated, extract_recurrence, generate, RecCoeffs};

fn main() -> dops::error::Result<()> {
    let c = RecCoeffs::from_fn(2, 16, |n| int(n as i64 + 1), |nu, j| if nu == 0 { q(j as i64, 2) } else { int(1) });
    let p = generate(&c, 5)?;
    for (n, pn) in p.iter().enumerate() {
        println!("P_{n} = {}", pn);
    }
    let a = generate(&associated(&c, 1)?, 3)?;
    println!("P^(1)_3 = {}", a[3]);
    let back = extract_recurrence(&generate(&c, 12)?, 2)?.rec().expect("a 2-OPS is banded");
    println!("recovered beta_0..beta_4: {:?}", back.beta[..5].iter().map(|b| b.to_string()).collect::<Vec<_>>());
    Ok(())
}
