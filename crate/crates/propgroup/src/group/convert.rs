//! The log/exp bridge between uniform presentations and bracket tables.
//!
//! to_lie realizes (x, y)_n = [x^{p^n}, y^{p^n}]^{p^{-2n}}: each approximant
//! is computed by collection at precision k + 2n (so the division by p^{2n}
//! is exact), reduced to precision k, and the sequence is accepted once two
//! successive approximants agree. from_lie inverts it by defect correction:
//! the relation table is the fixed point of lambda -> lambda + (target -
//! to_lie(lambda)), whose defect gains valuation every round on a table
//! coming from an honest powerful algebra.

use super::collect::Collector;
use super::UniformPresentation;
use crate::error::{Error, Result};
use crate::lie::BracketTable;
use crate::padic::PadicRing;

fn pair_list(d: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in (i + 1)..d {
            v.push((i, j));
        }
    }
    v
}

/// Raw limit computation: stabilized (x_i, x_j) coefficient vectors mod p^k.
fn to_lie_raw(pres: &UniformPresentation) -> Result<Vec<((usize, usize), Vec<u64>)>> {
    let base = pres.ring();
    let d = pres.rank();
    let k = base.precision();
    let p = base.prime();
    let pairs = pair_list(d);
    if pairs.is_empty() {
        return Ok(Vec::new());
    }

    // Largest usable stage: the working modulus p^(k+2n) must stay in range.
    let mut n_limit = 0u32;
    while n_limit < k + 2 && base.elevate(2 * (n_limit + 1)).is_ok() {
        n_limit += 1;
    }
    if n_limit < 2 {
        return Err(Error::PrecisionExhausted(
            "cannot elevate precision far enough for the limit formula".into(),
        ));
    }

    let mut prev: Vec<Option<Vec<u64>>> = vec![None; pairs.len()];
    let mut done: Vec<Option<Vec<u64>>> = vec![None; pairs.len()];
    for n in 1..=n_limit {
        if done.iter().all(Option::is_some) {
            break;
        }
        let ring_n = base.elevate(2 * n)?;
        let mut col = Collector::new(pres, ring_n)?;
        let pn = p.pow(n);
        let q = p.pow(2 * n);
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            if done[idx].is_some() {
                continue;
            }
            let mut a = vec![0u64; d];
            a[i] = pn;
            let mut b = vec![0u64; d];
            b[j] = pn;
            let c = col.commutator(&a, &b)?;
            let mut approx = Vec::with_capacity(d);
            for &e in &c {
                if e % q != 0 {
                    return Err(Error::NonConvergence(format!(
                        "[x_{}^{pn}, x_{}^{pn}] is not a p^{}-th power at stage n = {n}",
                        i + 1,
                        j + 1,
                        2 * n
                    )));
                }
                approx.push((e / q) % base.modulus());
            }
            if prev[idx].as_ref() == Some(&approx) {
                done[idx] = Some(approx);
            } else {
                prev[idx] = Some(approx);
            }
        }
    }
    let mut entries = Vec::with_capacity(pairs.len());
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        let coeffs = done[idx].take().ok_or_else(|| {
            Error::NonConvergence(format!(
                "bracket limit for (x_{}, x_{}) did not stabilize within {n_limit} stages",
                i + 1,
                j + 1
            ))
        })?;
        entries.push(((i, j), coeffs));
    }
    Ok(entries)
}

/// The bracket table of log(G). The result is validated: it must be powerful
/// with no Jacobi defect, otherwise the presentation was not uniform.
pub fn to_lie(pres: &UniformPresentation) -> Result<BracketTable> {
    pres.check_uniform_valuations()?;
    let entries = to_lie_raw(pres)?;
    BracketTable::new(pres.ring(), pres.rank(), entries)
}

fn min_valuation(ring: PadicRing, tables: &[Vec<u64>]) -> crate::padic::Valuation {
    tables
        .iter()
        .flat_map(|v| v.iter().map(|&e| ring.raw_val(e)))
        .min()
        .unwrap_or(crate::padic::Valuation::Infinite)
}

/// A uniform presentation whose bracket table is `t`, found by defect
/// correction; the post-condition to_lie(from_lie(t)) = t is verified
/// before returning.
pub fn from_lie(t: &BracketTable) -> Result<UniformPresentation> {
    let ring = t.ring();
    let d = t.rank();
    let rep = t.is_powerful();
    if let Some((i, j, n, val)) = rep.offender {
        return Err(Error::NotPowerful {
            i,
            j,
            n,
            val: val.finite().unwrap_or(ring.precision()),
            needed: ring.powerful_threshold(),
        });
    }
    if let Some(defect) = t.jacobi_defect() {
        let (i, j, l) = defect.triple;
        return Err(Error::InvalidLie(i, j, l));
    }
    let pairs = pair_list(d);
    let target: Vec<Vec<u64>> = pairs
        .iter()
        .map(|&(i, j)| t.basis_bracket(i, j).raw().to_vec())
        .collect();
    let mut lambda = target.clone();
    let mut last_defect_val: Option<crate::padic::Valuation> = None;
    for _ in 0..=(ring.precision() + 2) {
        let entries: Vec<_> = pairs
            .iter()
            .cloned()
            .zip(lambda.iter().cloned())
            .collect();
        let pres = UniformPresentation::new_unvalidated(ring, d, entries)?;
        let computed = to_lie_raw(&pres)?;
        let defects: Vec<Vec<u64>> = computed
            .iter()
            .zip(&target)
            .map(|(( _, got), want)| {
                got.iter()
                    .zip(want)
                    .map(|(&g, &w)| ring.raw_sub(w, g))
                    .collect()
            })
            .collect();
        if defects.iter().all(|v| v.iter().all(|&e| e == 0)) {
            return Ok(pres);
        }
        let val = min_valuation(ring, &defects);
        if let Some(prev) = last_defect_val {
            if val <= prev {
                return Err(Error::NonConvergence(format!(
                    "from_lie defect stalled at valuation {val}"
                )));
            }
        }
        last_defect_val = Some(val);
        for (lam, def) in lambda.iter_mut().zip(&defects) {
            for (l, &e) in lam.iter_mut().zip(def) {
                *l = ring.raw_add(*l, e);
            }
        }
    }
    Err(Error::NonConvergence(
        "from_lie defect correction did not terminate".into(),
    ))
}
