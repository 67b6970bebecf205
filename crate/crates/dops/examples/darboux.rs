//! LU factorization of a banded Hessenberg matrix, the kernel polynomials of
//! the swapped product U·L, and the quasi-orthogonality that links them.

use dops::darboux::{check_lu, kernel, lu};
use dops::forms::quasi_detect;
use dops::rational::int;
use dops::seq::{generate, RecCoeffs};

fn main() -> dops::error::Result<()> {
    let c = RecCoeffs::from_fn(2, 40, |n| int(2 * n as i64 + 3), |nu, j| int(j as i64 + 1 + nu as i64));
    let f = lu(&c, 12)?;
    let chk = check_lu(&c, &f, 12)?;
    println!("L·U reproduces J: {} (m_n from P_n(0): {})", chk.mismatches == 0, chk.origin_ratio);
    let k = kernel(&c, 8)?;
    println!("K_2 = {}", k.k[2]);
    let p = generate(&c, 8)?;
    let qo = quasi_detect(&p, &k.k, 2)?;
    println!("P is quasi-orthogonal of order {} with respect to K", qo.l);
    Ok(())
}
