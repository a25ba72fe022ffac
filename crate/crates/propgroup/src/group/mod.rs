//! Uniform pro-p groups given by powerful presentations, with normal-form
//! arithmetic by collection, theta-centers, lower p-series data, and the
//! log/exp bridge to bracket tables.
//!
//! A presentation holds relation exponents lambda_n(i,j) for i < j, meaning
//! [x_i, x_j] = x_1^{lambda_1(i,j)} ... x_d^{lambda_d(i,j)}, every exponent
//! of valuation >= 1 (>= 2 for p = 2). Elements are the unique normal forms
//! x_1^{e_1} ... x_d^{e_d} with exponents mod p^k.

mod collect;
mod convert;
#[cfg(test)]
mod tests;

use crate::error::{Error, Result};
use crate::lie::BracketTable;
use crate::padic::{PadicRing, PadicScalar, PadicUnit};
use crate::zlin::SpanEchelon;
use collect::Collector;

pub use convert::{from_lie, to_lie};

/// Normal-form group element: the exponent vector of x_1^{e_1}...x_d^{e_d}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    ring: PadicRing,
    exponents: Vec<u64>,
}

impl GroupElement {
    pub fn new(ring: PadicRing, exponents: Vec<u64>) -> Self {
        let m = ring.modulus();
        GroupElement {
            ring,
            exponents: exponents.into_iter().map(|e| e % m).collect(),
        }
    }

    pub fn identity(ring: PadicRing, d: usize) -> Self {
        GroupElement {
            ring,
            exponents: vec![0; d],
        }
    }

    pub fn generator(ring: PadicRing, d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        GroupElement { ring, exponents: e }
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> Vec<PadicScalar> {
        self.exponents.iter().map(|&e| self.ring.scalar(e)).collect()
    }

    pub fn raw(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

/// Group-side orientation: images theta(x_i) in 1 + p.Zp (1 + 4.Z2 for p=2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupOrientation {
    ring: PadicRing,
    images: Vec<u64>,
}

impl GroupOrientation {
    pub fn new(ring: PadicRing, images: Vec<u64>) -> Result<Self> {
        let tau = ring.powerful_threshold();
        for &im in &images {
            let s = ring.scalar(im);
            let u = s.try_unit()?;
            if !(s - ring.one()).valuation().at_least(tau) {
                return Err(Error::DomainViolation(format!(
                    "orientation image {} lies outside 1 + {}.Z_{}",
                    u.scalar(),
                    ring.prime().pow(tau),
                    ring.prime()
                )));
            }
        }
        let m = ring.modulus();
        Ok(GroupOrientation {
            ring,
            images: images.into_iter().map(|i| i % m).collect(),
        })
    }

    pub fn trivial(ring: PadicRing, d: usize) -> Self {
        GroupOrientation {
            ring,
            images: vec![1; d],
        }
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn images(&self) -> Vec<PadicUnit> {
        self.images
            .iter()
            .map(|&i| self.ring.scalar(i).try_unit().expect("validated unit"))
            .collect()
    }

    pub fn raw_images(&self) -> &[u64] {
        &self.images
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(|&i| i == 1)
    }

    /// theta(g) for a normal form g, by multiplicativity.
    pub fn apply(&self, g: &GroupElement) -> PadicScalar {
        let mut acc = self.ring.one();
        for (&im, &e) in self.images.iter().zip(g.raw()) {
            acc = acc * self.ring.scalar(im).pow_u64(e);
        }
        acc
    }
}

/// A uniform presentation: rank d and the relation exponent table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformPresentation {
    ring: PadicRing,
    d: usize,
    relations: Vec<Vec<u64>>,
}

impl UniformPresentation {
    /// Build without consistency validation (used by document inspection and
    /// by iterative constructions that verify afterwards).
    pub fn new_unvalidated(
        ring: PadicRing,
        d: usize,
        entries: Vec<((usize, usize), Vec<u64>)>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::DomainViolation("rank must be at least 1".into()));
        }
        let mut relations = vec![vec![0u64; d]; d * (d - 1) / 2];
        let m = ring.modulus();
        for ((i, j), exps) in entries {
            if i >= j || j >= d {
                return Err(Error::DomainViolation(format!(
                    "relation pair ({i}, {j}) out of range for rank {d}"
                )));
            }
            if exps.len() != d {
                return Err(Error::RankMismatch {
                    expected: d,
                    got: exps.len(),
                });
            }
            let idx = i * d - i * (i + 1) / 2 + (j - i - 1);
            relations[idx] = exps.into_iter().map(|e| e % m).collect();
        }
        Ok(UniformPresentation { ring, d, relations })
    }

    /// Validated constructor: relation exponents must meet the uniform
    /// valuation bound and the induced bracket table must be an honest
    /// powerful Lie algebra (checked through the limit formulas).
    pub fn new(ring: PadicRing, d: usize, entries: Vec<((usize, usize), Vec<u64>)>) -> Result<Self> {
        let p = Self::new_unvalidated(ring, d, entries)?;
        p.check_uniform_valuations()?;
        to_lie(&p)?;
        Ok(p)
    }

    pub fn check_uniform_valuations(&self) -> Result<()> {
        let tau = self.ring.powerful_threshold();
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                for (n, &e) in self.relation_raw(i, j).iter().enumerate() {
                    let val = self.ring.raw_val(e);
                    if !val.at_least(tau) {
                        return Err(Error::NotPowerful {
                            i,
                            j,
                            n,
                            val: val.finite().unwrap_or(self.ring.precision()),
                            needed: tau,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn relation_raw(&self, i: usize, j: usize) -> &[u64] {
        debug_assert!(i < j && j < self.d);
        &self.relations[i * self.d - i * (i + 1) / 2 + (j - i - 1)]
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.ring, self.d)
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        GroupElement::generator(self.ring, self.d, i)
    }

    fn check_element(&self, g: &GroupElement) -> Result<()> {
        if g.rank() != self.d {
            return Err(Error::RankMismatch {
                expected: self.d,
                got: g.rank(),
            });
        }
        if g.ring() != self.ring {
            return Err(Error::RingMismatch {
                p_lhs: self.ring.prime(),
                k_lhs: self.ring.precision(),
                p_rhs: g.ring().prime(),
                k_rhs: g.ring().precision(),
            });
        }
        Ok(())
    }

    /// Normal form of g.h by collection.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        self.check_element(h)?;
        let mut col = Collector::new(self, self.ring)?;
        Ok(GroupElement::new(self.ring, col.mul(g.raw(), h.raw())?))
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        let mut col = Collector::new(self, self.ring)?;
        Ok(GroupElement::new(self.ring, col.inverse(g.raw())?))
    }

    /// [g, h] = g h g^{-1} h^{-1}.
    pub fn commutator(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        self.check_element(h)?;
        let mut col = Collector::new(self, self.ring)?;
        Ok(GroupElement::new(self.ring, col.commutator(g.raw(), h.raw())?))
    }

    /// g^e for a residue exponent; g^(p^k) is the identity at precision k,
    /// so powering by the canonical representative is exact.
    pub fn power_residue(&self, g: &GroupElement, e: u64) -> Result<GroupElement> {
        self.check_element(g)?;
        let mut col = Collector::new(self, self.ring)?;
        Ok(GroupElement::new(self.ring, col.pow(g.raw(), e % self.ring.modulus())?))
    }

    pub fn power(&self, g: &GroupElement, e: i64) -> Result<GroupElement> {
        let r = self.ring.scalar_from_i64(e);
        self.power_residue(g, r.value())
    }

    pub fn power_scalar(&self, g: &GroupElement, e: PadicScalar) -> Result<GroupElement> {
        if e.ring() != self.ring {
            return Err(Error::RingMismatch {
                p_lhs: self.ring.prime(),
                k_lhs: self.ring.precision(),
                p_rhs: e.ring().prime(),
                k_rhs: e.ring().precision(),
            });
        }
        self.power_residue(g, e.value())
    }

    /// True iff h lies in the theta-center: h in ker(theta) and conjugation
    /// by every generator raises h to theta(x_i). The conjugation condition
    /// is multiplicative in the conjugating element, so generators suffice.
    pub fn theta_center_contains(
        &self,
        theta: &GroupOrientation,
        h: &GroupElement,
    ) -> Result<bool> {
        self.check_element(h)?;
        if theta.apply(h).value() != 1 {
            return Ok(false);
        }
        let mut col = Collector::new(self, self.ring)?;
        for i in 0..self.d {
            let xi = self.generator(i);
            let xh = col.mul(xi.raw(), h.raw())?;
            let xi_inv = col.inverse(xi.raw())?;
            let lhs = col.mul(&xh, &xi_inv)?;
            let rhs = col.pow(h.raw(), theta.raw_images()[i])?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// F_p-dimensions dim lambda_i/lambda_{i+1} for i = 1..upto, computed by
    /// building each lambda_{i+1} = lambda_i^p [lambda_i, G] as a saturated
    /// exponent lattice and comparing indices.
    pub fn lower_series_dims(&self, upto: u32) -> Result<Vec<u64>> {
        if upto >= self.ring.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "lower series depth {upto} requires precision > {}",
                self.ring.precision()
            )));
        }
        let mut col = Collector::new(self, self.ring)?;
        let mut gens: Vec<Vec<u64>> = (0..self.d).map(|i| self.generator(i).raw().to_vec()).collect();
        let mut covol_prev = 0u64;
        let mut dims = Vec::new();
        for _ in 0..upto {
            let mut seeds: Vec<Vec<u64>> = Vec::new();
            for w in &gens {
                seeds.push(col.pow(w, self.ring.prime())?);
                for j in 0..self.d {
                    let xj = self.generator(j);
                    seeds.push(col.commutator(w, xj.raw())?);
                }
            }
            let lat = self.saturate_subgroup(&mut col, seeds)?;
            let covol = lat.covolume_exponent();
            dims.push(covol - covol_prev);
            covol_prev = covol;
            gens = lat.basis_columns();
            if gens.is_empty() {
                // subgroup trivial mod p^k; deeper terms carry no information
                for _ in dims.len()..upto as usize {
                    dims.push(0);
                }
                break;
            }
        }
        Ok(dims)
    }

    /// Exponent lattice of the subgroup generated by the seed elements:
    /// the span is saturated under products and inverses of its basis.
    fn saturate_subgroup(&self, col: &mut Collector, seeds: Vec<Vec<u64>>) -> Result<SpanEchelon> {
        let mut current = seeds;
        loop {
            let ech = SpanEchelon::new(self.ring, self.d, &current);
            let basis = ech.basis_columns();
            let mut missing: Vec<Vec<u64>> = Vec::new();
            for (a, g) in basis.iter().enumerate() {
                let inv = col.inverse(g)?;
                if !ech.contains(&inv) {
                    missing.push(inv);
                }
                for h in basis.iter().skip(a) {
                    let prod = col.mul(g, h)?;
                    if !ech.contains(&prod) {
                        missing.push(prod);
                    }
                }
            }
            if missing.is_empty() {
                return Ok(ech);
            }
            current = basis;
            current.extend(missing);
        }
    }

    /// The induced bracket table via the limit formulas.
    pub fn to_lie(&self) -> Result<BracketTable> {
        to_lie(self)
    }
}

/// The canonical theta-abelian pair: relations [x_1, x_i] = x_i^lambda and
/// [x_i, x_j] = 1, orientation theta(x_1) = 1 + lambda, theta(x_i) = 1.
pub fn present_theta_abelian(
    ring: PadicRing,
    d: usize,
    lambda: PadicScalar,
) -> Result<(UniformPresentation, GroupOrientation)> {
    if lambda.ring() != ring {
        return Err(Error::RingMismatch {
            p_lhs: ring.prime(),
            k_lhs: ring.precision(),
            p_rhs: lambda.ring().prime(),
            k_rhs: lambda.ring().precision(),
        });
    }
    let tau = ring.powerful_threshold();
    if !lambda.valuation().at_least(tau) {
        return Err(Error::DomainViolation(format!(
            "lambda = {} must lie in {}.Z_{}",
            lambda,
            ring.prime().pow(tau),
            ring.prime()
        )));
    }
    let mut entries = Vec::new();
    for i in 1..d {
        let mut exps = vec![0u64; d];
        exps[i] = lambda.value();
        entries.push(((0, i), exps));
    }
    let pres = UniformPresentation::new_unvalidated(ring, d, entries)?;
    let mut images = vec![1u64; d];
    images[0] = (ring.one() + lambda).value();
    let theta = GroupOrientation::new(ring, images)?;
    Ok((pres, theta))
}
