//! Moments of the dual forms, truncated Stieltjes series relations and a
//! Uvarov point-mass transform.

use dops::forms::{moments, stieltjes_relations, uvarov, StieltjesRelation};
use dops::rational::{int, q};
use dops::verify::random_instance;

fn main() -> dops::error::Result<()> {
    let c = random_instance(2, 12, 21, false);
    let m = moments(&c, 6)?;
    println!("u_0 moments: {:?}", (0..=6).map(|n| m.get(0, n).to_string()).collect::<Vec<_>>());
    let markov = stieltjes_relations(&c, &StieltjesRelation::Markov { n: 2, r: 1 }, 20)?;
    println!("Markov relation through w^20: {}", markov.is_zero());
    let u = uvarov(&c, &q(1, 2), &int(3), 8)?;
    println!("Uvarov point residuals vanish: {}", u.point_residuals.iter().all(|r| *r == int(0)));
    println!("Q_3 = {}", u.q[3]);
    Ok(())
}
