//! Identity sweeps: run a named identity over a grid of parameters on one
//! instance and report each residual.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::casorati::{self, CdKind, CdParams, NablaParams, Selector};
use crate::copoly::{self, Perturbation};
use crate::darboux;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::seq::{association_expansion_check, Expansion, RecCoeffs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    Delta,
    BRecurrence,
    F,
    ShiftedColumn,
    Independence,
    Nabla,
    NablaTilde,
    NablaCheck,
    R,
    RTilde,
    RCheck,
    G,
    Transfer,
    CdProduct,
    CdSum,
    CdMultipoint,
    CdConfluent,
    CdConfluentAssoc,
    Split,
    Swapped,
    Dual,
    Iterated,
    CoRecursive,
    CoDilated,
    CoModified,
    Lu,
    Ul,
    Kernel,
    KernelDual,
}

impl Identity {
    pub const ALL: [Identity; 29] = [
        Identity::Delta,
        Identity::BRecurrence,
        Identity::F,
        Identity::ShiftedColumn,
        Identity::Independence,
        Identity::Nabla,
        Identity::NablaTilde,
        Identity::NablaCheck,
        Identity::R,
        Identity::RTilde,
        Identity::RCheck,
        Identity::G,
        Identity::Transfer,
        Identity::CdProduct,
        Identity::CdSum,
        Identity::CdMultipoint,
        Identity::CdConfluent,
        Identity::CdConfluentAssoc,
        Identity::Split,
        Identity::Swapped,
        Identity::Dual,
        Identity::Iterated,
        Identity::CoRecursive,
        Identity::CoDilated,
        Identity::CoModified,
        Identity::Lu,
        Identity::Ul,
        Identity::Kernel,
        Identity::KernelDual,
    ];

    pub fn name(self) -> String {
        match serde_json::to_value(self) {
            Ok(Value::String(s)) => s,
            _ => unreachable!(),
        }
    }
}

impl std::str::FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string())).map_err(|_| Error::BadSelector(s.to_string()))
    }
}

impl std::fmt::Display for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: Identity,
    pub params: Value,
    pub residual_is_zero: bool,
    /// Coefficients of the first nonzero residual, low degree first.
    pub residual_coeffs: Vec<String>,
}

struct Sink {
    id: Identity,
    out: Vec<IdentityReport>,
}

impl Sink {
    fn push_polys<'a>(&mut self, params: Value, polys: impl IntoIterator<Item = &'a Poly>) {
        let bad = polys.into_iter().find(|p| !p.is_zero());
        self.out.push(IdentityReport {
            identity: self.id,
            params,
            residual_is_zero: bad.is_none(),
            residual_coeffs: bad.map(Poly::to_strings).unwrap_or_default(),
        });
    }

    fn push_flag(&mut self, params: Value, ok: bool, detail: Vec<String>) {
        self.out.push(IdentityReport { identity: self.id, params, residual_is_zero: ok, residual_coeffs: if ok { Vec::new() } else { detail } });
    }

    /// Record the result, skipping parameter points outside an identity's range.
    fn take<T>(&mut self, r: Result<T>, f: impl FnOnce(&mut Self, T)) -> Result<()> {
        match r {
            Ok(v) => {
                f(self, v);
                Ok(())
            }
            Err(Error::IndexOutOfRange(_) | Error::BadOffsets(_) | Error::UnsupportedD(_)) => Ok(()),
            Err(Error::ZeroAtOrigin(_) | Error::Breakdown(_)) => Ok(()),
            Err(e) => Err(e),
        }
    }
}

fn nonzero_lambda(rng: &mut ChaCha8Rng) -> Rational {
    rational::random(rng, true, false)
}

/// Run `id` over its parameter grid up to `n_max`. Perturbations and λ values are drawn from `seed`.
/// Grid points where the identity has no closed value are skipped.
pub fn check_identity(c: &RecCoeffs, id: Identity, n_max: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    let d = c.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Sink { id, out: Vec::new() };
    match id {
        Identity::Delta => {
            for r in 0..=3 {
                for n in 0..=n_max {
                    let chk = casorati::verify_delta(c, n, r);
                    s.take(chk, |s, chk| {
                        let cross = &chk.direct - &chk.companion;
                        s.push_polys(json!({"n": n, "r": r}), [&chk.residual, &cross]);
                    })?;
                }
            }
        }
        Identity::BRecurrence => {
            for r in 0..=3 {
                for n in d + 1..=n_max.max(d + 1) {
                    s.take(casorati::verify_b_recurrence(c, n, r), |s, v| s.push_polys(json!({"n": n, "r": r}), [&v.residual]))?;
                }
            }
        }
        Identity::F => {
            for r in 0..=2 {
                for n in 0..=n_max {
                    for step in 1..=2 {
                        let ms: Vec<usize> = (0..d).map(|j| n + 1 + step * j).collect();
                        let res = casorati::verify_f(c, n, r, &ms);
                        s.take(res, |s, v| s.push_polys(json!({"n": n, "r": r, "ms": ms}), [&v.residual]))?;
                    }
                }
            }
        }
        Identity::ShiftedColumn => {
            for r in 1..=3 {
                for i in 0..r {
                    for n in r - 1..=n_max {
                        let res = casorati::verify_shifted_column(c, n, r, i);
                        s.take(res, |s, v| s.push_polys(json!({"n": n, "r": r, "i": i}), [&v.residual]))?;
                    }
                }
            }
        }
        Identity::Independence => {
            for r in 0..=2 {
                for m in 1..=n_max {
                    s.take(casorati::extended_casorati(c, m, r), |s, v| s.push_polys(json!({"m": m, "r": r}), [&v]))?;
                }
            }
        }
        Identity::Nabla | Identity::NablaTilde | Identity::NablaCheck => {
            let which = match id {
                Identity::Nabla => Selector::Nabla,
                Identity::NablaTilde => Selector::NablaTilde,
                _ => Selector::NablaCheck,
            };
            for k in 0..=2 {
                let p = Perturbation::random(d, k, &mut rng);
                for r in 0..=k + 3 {
                    for n in r..=n_max {
                        let prm = NablaParams { n, r, ..Default::default() };
                        let res = casorati::verify_nabla(c, &p, which, &prm);
                        s.take(res, |s, v| s.push_polys(json!({"n": n, "r": r, "perturbation": p}), [&v.residual]))?;
                    }
                }
            }
        }
        Identity::R | Identity::RTilde | Identity::RCheck => {
            let which = match id {
                Identity::R => Selector::R,
                Identity::RTilde => Selector::RTilde,
                _ => Selector::RCheck,
            };
            for k in 0..=1 {
                let p = Perturbation::random(d, k, &mut rng);
                for r in 1..=k + 3 {
                    for n in r..=n_max {
                        let ms: Vec<usize> = (0..d).map(|j| n + 1 + 2 * j).collect();
                        let prm = NablaParams { n, r, ms: ms.clone(), shifts: Vec::new() };
                        let res = casorati::verify_nabla(c, &p, which, &prm);
                        s.take(res, |s, v| {
                            s.push_polys(json!({"n": n, "r": r, "ms": ms, "perturbation": p}), [&v.residual])
                        })?;
                    }
                }
            }
        }
        Identity::G => {
            let p = Perturbation::trivial(d, 0);
            for step in 1..=2 {
                let shifts: Vec<usize> = (0..=d).map(|j| step * j).collect();
                for n in 1..=n_max {
                    let prm = NablaParams { n, r: 0, ms: Vec::new(), shifts: shifts.clone() };
                    let res = casorati::verify_nabla(c, &p, Selector::G, &prm);
                    s.take(res, |s, v| s.push_polys(json!({"n": n, "shifts": shifts}), [&v.residual]))?;
                }
            }
        }
        Identity::Transfer => {
            for n in d..=n_max.max(d) {
                for p in 0..=3 {
                    s.take(casorati::transfer_tp(c, n, p), |s, v| {
                        s.push_polys(json!({"n": n, "p": p}), std::iter::once(&v.det_residual).chain(&v.expansion_residuals))
                    })?;
                }
            }
        }
        Identity::CdProduct | Identity::CdSum => {
            let kind = if id == Identity::CdProduct { CdKind::Product } else { CdKind::Sum };
            for n in 0..=n_max {
                for m in n + 1..=n_max {
                    for k in m + 1..=n_max {
                        let prm = CdParams { n, m, k, r: 0 };
                        s.take(casorati::verify_cd(c, kind, &prm), |s, v| {
                            let ok = v.is_exact();
                            s.push_polys(json!({"n": n, "m": m, "k": k}), [&v.check.residual]);
                            s.out.last_mut().unwrap().residual_is_zero = ok;
                        })?;
                    }
                }
            }
        }
        Identity::CdMultipoint | Identity::CdConfluent | Identity::CdConfluentAssoc => {
            let kind = match id {
                Identity::CdMultipoint => CdKind::Multipoint,
                Identity::CdConfluent => CdKind::Confluent,
                _ => CdKind::ConfluentAssoc,
            };
            for r in 0..=2 {
                for n in 0..=n_max {
                    let prm = CdParams { n, r, ..Default::default() };
                    s.take(casorati::verify_cd(c, kind, &prm), |s, v| {
                        let ok = v.is_exact();
                        s.push_polys(json!({"n": n, "r": r}), [&v.check.residual]);
                        let last = s.out.last_mut().unwrap();
                        last.residual_is_zero = ok;
                        if !ok && last.residual_coeffs.is_empty() {
                            last.residual_coeffs = vec!["pointwise residual is nonzero".into()];
                        }
                    })?;
                }
            }
        }
        Identity::Split | Identity::Swapped | Identity::Dual | Identity::Iterated => {
            let which = match id {
                Identity::Split => Expansion::Split,
                Identity::Swapped => Expansion::Swapped,
                Identity::Dual => Expansion::Dual,
                _ => Expansion::Iterated,
            };
            let half = n_max / 2;
            for r in 0..=2 {
                for n in 0..=half {
                    for m in 0..=half {
                        let res = association_expansion_check(c, which, n, m, r);
                        s.take(res, |s, v| s.push_polys(json!({"n": n, "m": m, "r": r}), [&v]))?;
                    }
                }
            }
        }
        Identity::CoRecursive => {
            for k in 0..=2 {
                let p = Perturbation::random(d, k, &mut rng);
                let res = copoly::co_recursive_closed_form(c, &p, n_max);
                s.take(res, |s, v| s.push_polys(json!({"n_max": n_max, "perturbation": p}), &v.residuals))?;
            }
        }
        Identity::CoDilated => {
            for k in 1..=3 {
                let lambda = nonzero_lambda(&mut rng);
                let res = copoly::co_dilated_closed_form(c, k, &lambda, n_max);
                s.take(res, |s, v| {
                    s.push_polys(json!({"n_max": n_max, "k": k, "lambda": rational::fmt(&lambda)}), &v)
                })?;
            }
        }
        Identity::CoModified => {
            for k in 0..=2 {
                let p = Perturbation::random(d, k, &mut rng);
                let res = copoly::co_modified(c, &p, n_max);
                s.take(res, |s, v| {
                    s.push_polys(json!({"n_max": n_max, "perturbation": p}), v.residuals.iter().chain(&v.sum_residuals))
                })?;
            }
        }
        Identity::Lu => {
            let res = darboux::lu(c, n_max).and_then(|f| darboux::check_lu(c, &f, n_max));
            s.take(res, |s, v| {
                let detail = vec![format!("mismatches={}", v.mismatches), format!("origin_ratio={}", v.origin_ratio)];
                s.push_flag(json!({"n": n_max}), v.is_exact(), detail)
            })?;
        }
        Identity::Ul => {
            let free: Vec<Rational> = (0..d).map(|_| nonzero_lambda(&mut rng)).collect();
            let res = darboux::ul(c, Some(&free), n_max + 1).and_then(|f| darboux::check_ul(c, &f, n_max + 1));
            let prm = json!({"n": n_max, "free": free.iter().map(rational::fmt).collect::<Vec<_>>()});
            s.take(res, |s, v| s.push_flag(prm, v.is_exact(), vec![format!("mismatches={}", v.mismatches)]))?;
        }
        Identity::Kernel => {
            s.take(darboux::kernel(c, n_max), |s, v| {
                s.push_polys(json!({"n": n_max}), v.expansion_residuals.iter().chain(&v.shift_residuals))
            })?;
        }
        Identity::KernelDual => {
            s.take(darboux::kernel_dual_matrix(c, n_max), |s, v| {
                let bad: Vec<String> = v.residuals.iter().flatten().filter(|r| !num_traits::Zero::is_zero(*r)).map(rational::fmt).collect();
                s.push_flag(json!({"n": n_max}), v.is_exact(), bad)
            })?;
        }
    }
    Ok(s.out)
}

/// Random instance long enough for every identity up to `n_max`.
pub fn random_instance(d: usize, n_max: usize, seed: u64, positive: bool) -> RecCoeffs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RecCoeffs::random(d, 4 * n_max + 4 * d + 24, &mut rng, positive)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for id in Identity::ALL {
            assert_eq!(id.name().parse::<Identity>().unwrap(), id);
        }
        assert!("nope".parse::<Identity>().is_err());
        assert_eq!(Identity::CdConfluentAssoc.to_string(), "cd_confluent_assoc");
    }

    #[test]
    fn every_identity_holds_on_small_instances() {
        for d in 1..=2 {
            let c = random_instance(d, 5, 40 + d as u64, false);
            for id in Identity::ALL {
                let reports = check_identity(&c, id, 5, 9).unwrap();
                if !matches!(id, Identity::CdSum | Identity::CdProduct) || d == 2 {
                    assert!(!reports.is_empty(), "{id} d={d}");
                }
                for r in &reports {
                    assert!(r.residual_is_zero, "{id} d={d} {}", r.params);
                }
            }
        }
    }
}
