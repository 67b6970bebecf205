//! Classical example families expanded into recurrence data.

use dops::fixtures::{fixture, Fixture};
use dops::rational::{int, q};
use dops::seq::generate;

fn main() -> dops::error::Result<()> {
    let families = [
        Fixture::QAppell { d: 2, q: q(1, 2), beta0: int(0), gamma1: vec![int(1), int(0)] },
        Fixture::DCharlier { d: 2, w: int(1), b: vec![int(-1), int(2)] },
        Fixture::Humbert { d: 2, alpha: q(3, 2) },
        Fixture::LaguerreType,
    ];
    for f in &families {
        let c = fixture(f, 12)?.coeffs();
        println!("{}: P_3 = {}", serde_json::to_value(f).unwrap()["family"], generate(&c, 3)?[3]);
    }
    Ok(())
}
