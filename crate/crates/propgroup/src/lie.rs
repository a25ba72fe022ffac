//! Powerful Zp-Lie algebras presented by structure-constant tables at finite
//! precision: bracket evaluation, Jacobi checking, adjoint matrices, the
//! powerfulness test, and the span-closure test behind local powerfulness.

use crate::error::{Error, Result};
use crate::padic::{PadicRing, PadicScalar, Valuation};
use crate::zlin::{SpanEchelon, ZpkMatrix};

/// Element of a rank-d algebra in basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    ring: PadicRing,
    coords: Vec<u64>,
}

impl LieElement {
    pub fn new(ring: PadicRing, coords: Vec<u64>) -> Self {
        let m = ring.modulus();
        LieElement {
            ring,
            coords: coords.into_iter().map(|c| c % m).collect(),
        }
    }

    pub fn from_scalars(coords: &[PadicScalar]) -> Result<Self> {
        let ring = coords
            .first()
            .map(PadicScalar::ring)
            .ok_or_else(|| Error::DomainViolation("empty coordinate vector".into()))?;
        for c in coords {
            if c.ring() != ring {
                return Err(Error::RingMismatch {
                    p_lhs: ring.prime(),
                    k_lhs: ring.precision(),
                    p_rhs: c.ring().prime(),
                    k_rhs: c.ring().precision(),
                });
            }
        }
        Ok(LieElement {
            ring,
            coords: coords.iter().map(|c| c.value()).collect(),
        })
    }

    pub fn zero(ring: PadicRing, d: usize) -> Self {
        LieElement {
            ring,
            coords: vec![0; d],
        }
    }

    pub fn basis(ring: PadicRing, d: usize, i: usize) -> Self {
        let mut coords = vec![0; d];
        coords[i] = 1;
        LieElement { ring, coords }
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> Vec<PadicScalar> {
        self.coords.iter().map(|&c| self.ring.scalar(c)).collect()
    }

    pub fn raw(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, rhs: &LieElement) -> LieElement {
        assert_eq!(self.ring, rhs.ring);
        LieElement {
            ring: self.ring,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(&a, &b)| self.ring.raw_add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &LieElement) -> LieElement {
        assert_eq!(self.ring, rhs.ring);
        LieElement {
            ring: self.ring,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(&a, &b)| self.ring.raw_sub(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> LieElement {
        LieElement {
            ring: self.ring,
            coords: self.coords.iter().map(|&a| self.ring.raw_neg(a)).collect(),
        }
    }

    pub fn scale(&self, s: u64) -> LieElement {
        LieElement {
            ring: self.ring,
            coords: self.coords.iter().map(|&a| self.ring.raw_mul(a, s)).collect(),
        }
    }
}

/// Lie-side orientation: images theta_L(x_i) in p.Zp (4.Z2 for p = 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieOrientation {
    ring: PadicRing,
    images: Vec<u64>,
}

impl LieOrientation {
    pub fn new(ring: PadicRing, images: Vec<u64>) -> Result<Self> {
        let tau = ring.powerful_threshold();
        for &im in &images {
            if !ring.raw_val(im % ring.modulus()).at_least(tau) {
                return Err(Error::DomainViolation(format!(
                    "orientation image {im} has valuation < {tau}"
                )));
            }
        }
        let m = ring.modulus();
        Ok(LieOrientation {
            ring,
            images: images.into_iter().map(|i| i % m).collect(),
        })
    }

    pub fn trivial(ring: PadicRing, d: usize) -> Self {
        LieOrientation {
            ring,
            images: vec![0; d],
        }
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn images(&self) -> Vec<PadicScalar> {
        self.images.iter().map(|&i| self.ring.scalar(i)).collect()
    }

    pub fn raw_images(&self) -> &[u64] {
        &self.images
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(|&i| i == 0)
    }

    /// Value on an arbitrary element, by linearity.
    pub fn apply(&self, v: &LieElement) -> PadicScalar {
        let mut acc = 0u64;
        for (&im, &c) in self.images.iter().zip(v.raw()) {
            acc = self.ring.raw_add(acc, self.ring.raw_mul(im, c));
        }
        self.ring.scalar(acc)
    }
}

/// First Jacobi violation, in lexicographic triple order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiDefect {
    /// 0-based basis indices i < j < l.
    pub triple: (usize, usize, usize),
    pub defect: LieElement,
}

/// Outcome of the powerfulness test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerfulReport {
    pub powerful: bool,
    /// First offending entry (i, j, n), 0-based, with its valuation.
    pub offender: Option<(usize, usize, usize, Valuation)>,
}

/// A rank-d Zp-Lie algebra at precision k given by structure constants.
/// Entries are stored for i < j only; the rest follow by antisymmetry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTable {
    ring: PadicRing,
    d: usize,
    upper: Vec<Vec<u64>>,
}

impl BracketTable {
    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.d);
        i * self.d - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Build without validation; used for tables under inspection and for
    /// classifier-internal basis changes that are valid by construction.
    pub fn new_unvalidated(ring: PadicRing, d: usize, entries: Vec<((usize, usize), Vec<u64>)>) -> Result<Self> {
        let mut upper = vec![vec![0u64; d]; d * (d - 1) / 2];
        let m = ring.modulus();
        for ((i, j), coeffs) in entries {
            if i >= j || j >= d {
                return Err(Error::DomainViolation(format!(
                    "bracket pair ({i}, {j}) out of range for rank {d}"
                )));
            }
            if coeffs.len() != d {
                return Err(Error::RankMismatch {
                    expected: d,
                    got: coeffs.len(),
                });
            }
            let idx = i * d - i * (i + 1) / 2 + (j - i - 1);
            upper[idx] = coeffs.into_iter().map(|c| c % m).collect();
        }
        Ok(BracketTable { ring, d, upper })
    }

    /// Validated constructor: powerfulness and the Jacobi identity are
    /// checked, not assumed.
    pub fn new(ring: PadicRing, d: usize, entries: Vec<((usize, usize), Vec<u64>)>) -> Result<Self> {
        let t = Self::new_unvalidated(ring, d, entries)?;
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
        Ok(t)
    }

    /// The canonical theta-abelian table: (v_1, v_i) = lambda.v_i, all other
    /// brackets zero.
    pub fn theta_abelian(ring: PadicRing, d: usize, lambda: PadicScalar) -> Result<Self> {
        let tau = ring.powerful_threshold();
        if !lambda.valuation().at_least(tau) {
            return Err(Error::DomainViolation(format!(
                "lambda must have valuation >= {tau}, got {}",
                lambda.valuation()
            )));
        }
        let mut entries = Vec::new();
        for i in 1..d {
            let mut coeffs = vec![0u64; d];
            coeffs[i] = lambda.value();
            entries.push(((0, i), coeffs));
        }
        Self::new_unvalidated(ring, d, entries)
    }

    pub fn zero(ring: PadicRing, d: usize) -> Self {
        BracketTable {
            ring,
            d,
            upper: vec![vec![0; d]; d * (d - 1) / 2],
        }
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|c| c.iter().all(|&x| x == 0))
    }

    /// Coefficient vector of (x_i, x_j), any i, j.
    pub fn basis_bracket(&self, i: usize, j: usize) -> LieElement {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => LieElement::zero(self.ring, self.d),
            Ordering::Less => LieElement::new(self.ring, self.upper[self.pair_index(i, j)].clone()),
            Ordering::Greater => {
                LieElement::new(self.ring, self.upper[self.pair_index(j, i)].clone()).neg()
            }
        }
    }

    pub(crate) fn upper_raw(&self, i: usize, j: usize) -> &[u64] {
        &self.upper[i * self.d - i * (i + 1) / 2 + (j - i - 1)]
    }

    fn check_rank(&self, v: &LieElement) -> Result<()> {
        if v.rank() != self.d {
            return Err(Error::RankMismatch {
                expected: self.d,
                got: v.rank(),
            });
        }
        if v.ring() != self.ring {
            return Err(Error::RingMismatch {
                p_lhs: self.ring.prime(),
                k_lhs: self.ring.precision(),
                p_rhs: v.ring().prime(),
                k_rhs: v.ring().precision(),
            });
        }
        Ok(())
    }

    /// Bilinear antisymmetric extension of the table.
    pub fn bracket(&self, v: &LieElement, w: &LieElement) -> Result<LieElement> {
        self.check_rank(v)?;
        self.check_rank(w)?;
        let ring = self.ring;
        let mut out = vec![0u64; self.d];
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                // minor v_i w_j - v_j w_i
                let m = ring.raw_sub(
                    ring.raw_mul(v.raw()[i], w.raw()[j]),
                    ring.raw_mul(v.raw()[j], w.raw()[i]),
                );
                if m == 0 {
                    continue;
                }
                for (o, &c) in out.iter_mut().zip(self.upper_raw(i, j)) {
                    *o = ring.raw_add(*o, ring.raw_mul(m, c));
                }
            }
        }
        Ok(LieElement::new(ring, out))
    }

    /// First basis triple whose Jacobi sum is nonzero mod p^k, with the sum.
    pub fn jacobi_defect(&self) -> Option<JacobiDefect> {
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                for l in (j + 1)..self.d {
                    let xi = LieElement::basis(self.ring, self.d, i);
                    let xj = LieElement::basis(self.ring, self.d, j);
                    let xl = LieElement::basis(self.ring, self.d, l);
                    let s1 = self.bracket(&self.basis_bracket(i, j), &xl).unwrap();
                    let s2 = self.bracket(&self.basis_bracket(j, l), &xi).unwrap();
                    let s3 = self.bracket(&self.basis_bracket(l, i), &xj).unwrap();
                    let sum = s1.add(&s2).add(&s3);
                    if !sum.is_zero() {
                        return Some(JacobiDefect {
                            triple: (i, j, l),
                            defect: sum,
                        });
                    }
                }
            }
        }
        None
    }

    /// True iff all structure constants meet the valuation bound
    /// (>= 1 for p odd, >= 2 for p = 2).
    pub fn is_powerful(&self) -> PowerfulReport {
        let tau = self.ring.powerful_threshold();
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                for (n, &c) in self.upper_raw(i, j).iter().enumerate() {
                    let val = self.ring.raw_val(c);
                    if !val.at_least(tau) {
                        return PowerfulReport {
                            powerful: false,
                            offender: Some((i, j, n, val)),
                        };
                    }
                }
            }
        }
        PowerfulReport {
            powerful: true,
            offender: None,
        }
    }

    /// Matrix of ad(v): column n holds the coordinates of (v, x_n).
    /// Returns the matrix together with its trace.
    pub fn adjoint_matrix(&self, v: &LieElement) -> Result<(ZpkMatrix, PadicScalar)> {
        self.check_rank(v)?;
        let mut m = ZpkMatrix::zero(self.ring, self.d, self.d);
        let mut trace = self.ring.zero();
        for n in 0..self.d {
            let img = self.bracket(v, &LieElement::basis(self.ring, self.d, n))?;
            for (r, &c) in img.raw().iter().enumerate() {
                m.set(r, n, c);
            }
            trace = trace + self.ring.scalar(img.raw()[n]);
        }
        Ok((m, trace))
    }

    /// First pair (v, w) from S whose bracket escapes the Z/p^k-span of S,
    /// or None when the span is closed under the bracket.
    pub fn span_closure_witness(&self, set: &[LieElement]) -> Result<Option<(LieElement, LieElement)>> {
        for v in set {
            self.check_rank(v)?;
        }
        let gens: Vec<Vec<u64>> = set.iter().map(|v| v.raw().to_vec()).collect();
        let ech = SpanEchelon::new(self.ring, self.d, &gens);
        for (a, v) in set.iter().enumerate() {
            for w in set.iter().skip(a + 1) {
                let b = self.bracket(v, w)?;
                if !ech.contains(b.raw()) {
                    return Ok(Some((v.clone(), w.clone())));
                }
            }
        }
        Ok(None)
    }

    /// Structure constants in the basis given by the columns of `basis`
    /// (which must be unimodular over Z/p^k).
    pub fn transport(&self, basis: &ZpkMatrix) -> Result<BracketTable> {
        assert_eq!(basis.rows(), self.d);
        assert_eq!(basis.cols(), self.d);
        let inv = basis.inverse()?;
        let mut entries = Vec::new();
        for a in 0..self.d {
            for b in (a + 1)..self.d {
                let va = LieElement::new(self.ring, basis.column(a));
                let vb = LieElement::new(self.ring, basis.column(b));
                let br = self.bracket(&va, &vb)?;
                entries.push(((a, b), inv.mul_vec(br.raw())));
            }
        }
        BracketTable::new_unvalidated(self.ring, self.d, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, k: u32) -> PadicRing {
        PadicRing::new(p, k).unwrap()
    }

    #[test]
    fn theta_abelian_bracket_is_scaling() {
        let r = ring(3, 2);
        let t = BracketTable::theta_abelian(r, 2, r.scalar(3)).unwrap();
        let x1 = LieElement::basis(r, 2, 0);
        let x2 = LieElement::basis(r, 2, 1);
        let b = t.bracket(&x1, &x2).unwrap();
        assert_eq!(b, x2.scale(3));
    }

    #[test]
    fn bracket_of_equal_arguments_vanishes() {
        let r = ring(5, 3);
        let t = BracketTable::theta_abelian(r, 4, r.scalar(5)).unwrap();
        let v = LieElement::new(r, vec![7, 11, 2, 99]);
        assert!(t.bracket(&v, &v).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_bilinear_expansion() {
        let r = ring(3, 3);
        // (x_1, x_2) = 3.x_3
        let t = BracketTable::new(r, 3, vec![((0, 1), vec![0, 0, 3])]).unwrap();
        let v = LieElement::new(r, vec![1, 1, 0]); // x_1 + x_2
        let x2 = LieElement::basis(r, 3, 1);
        let b = t.bracket(&v, &x2).unwrap();
        assert_eq!(b, LieElement::new(r, vec![0, 0, 3]));
    }

    #[test]
    fn jacobi_defect_step2_shape() {
        // alpha = beta_2 = gamma_3 = 0, beta_3 = gamma_1 = p at k = 3:
        // the sum has x_1-coefficient -beta_3.gamma_1 = -p^2.
        let r = ring(3, 3);
        let t = BracketTable::new_unvalidated(
            r,
            3,
            vec![((1, 2), vec![0, 0, 3]), ((0, 2), vec![3, 0, 0])],
        )
        .unwrap();
        let defect = t.jacobi_defect().unwrap();
        assert_eq!(defect.triple, (0, 1, 2));
        assert_eq!(defect.defect.raw()[0], r.scalar_from_i64(-9).value());
    }

    #[test]
    fn jacobi_none_below_rank_3() {
        let r = ring(3, 2);
        let t = BracketTable::new_unvalidated(r, 2, vec![((0, 1), vec![3, 6])]).unwrap();
        assert!(t.jacobi_defect().is_none());
    }

    #[test]
    fn theta_abelian_tables_are_lie_algebras() {
        for d in 2..=5 {
            let r = ring(5, 3);
            let t = BracketTable::theta_abelian(r, d, r.scalar(10)).unwrap();
            assert!(t.jacobi_defect().is_none());
            assert!(t.is_powerful().powerful);
        }
    }

    #[test]
    fn powerfulness_examples() {
        let r3 = ring(3, 2);
        assert!(BracketTable::zero(r3, 3).is_powerful().powerful);
        let t = BracketTable::new_unvalidated(r3, 2, vec![((0, 1), vec![0, 3])]).unwrap();
        assert!(t.is_powerful().powerful);
        // p = 2 requires valuation >= 2
        let r2 = ring(2, 3);
        let t = BracketTable::new_unvalidated(r2, 2, vec![((0, 1), vec![0, 2])]).unwrap();
        let rep = t.is_powerful();
        assert!(!rep.powerful);
        assert_eq!(rep.offender.unwrap().0..=rep.offender.unwrap().2, 0..=1);
    }

    #[test]
    fn adjoint_of_step2_reduced_shape() {
        // (x_1,x_2) = a'.x_2, (x_2,x_3) = b'.x_2, (x_1,x_3) = c'.x_3 at k = 2:
        // trace(ad(c'.x_3)) = b'.c' (both vanish mod p^2, computed not assumed).
        let r = ring(3, 2);
        for bp in [0u64, 3, 6] {
            for cp in [0u64, 3, 6] {
                let t = BracketTable::new_unvalidated(
                    r,
                    3,
                    vec![((0, 1), vec![0, 3, 0]), ((1, 2), vec![0, bp, 0]), ((0, 2), vec![0, 0, cp])],
                )
                .unwrap();
                let v = LieElement::basis(r, 3, 2).scale(cp);
                let (_, trace) = t.adjoint_matrix(&v).unwrap();
                assert_eq!(trace, r.scalar(bp) * r.scalar(cp));
            }
        }
    }

    #[test]
    fn adjoint_of_zero_and_diagonal_form() {
        let r = ring(3, 3);
        let t = BracketTable::theta_abelian(r, 3, r.scalar(3)).unwrap();
        let (m, tr) = t.adjoint_matrix(&LieElement::zero(r, 3)).unwrap();
        assert_eq!(m, ZpkMatrix::zero(r, 3, 3));
        assert!(tr.is_zero());
        // ad(x_1) = diag(0, lambda, lambda)
        let (m, tr) = t.adjoint_matrix(&LieElement::basis(r, 3, 0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j && i > 0 { 3 } else { 0 };
                assert_eq!(m.get(i, j), expected);
            }
        }
        assert_eq!(tr.value(), 6);
    }

    #[test]
    fn trace_of_adjoint_commutator_vanishes() {
        let r = ring(3, 3);
        let t = BracketTable::theta_abelian(r, 3, r.scalar(6)).unwrap();
        let v = LieElement::new(r, vec![2, 5, 1]);
        let w = LieElement::new(r, vec![8, 1, 26]);
        let (a, _) = t.adjoint_matrix(&v).unwrap();
        let (b, _) = t.adjoint_matrix(&w).unwrap();
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        let mut trace = r.zero();
        for i in 0..3 {
            trace = trace + (r.scalar(ab.get(i, i)) - r.scalar(ba.get(i, i)));
        }
        assert!(trace.is_zero());
    }

    #[test]
    fn span_closure_witness_heisenberg() {
        let r = ring(3, 3);
        let t = BracketTable::new(r, 3, vec![((0, 1), vec![0, 0, 3])]).unwrap();
        let s = vec![LieElement::basis(r, 3, 0), LieElement::basis(r, 3, 1)];
        let w = t.span_closure_witness(&s).unwrap().unwrap();
        assert_eq!(w.0, s[0]);
        assert_eq!(w.1, s[1]);
        // the whole basis always spans
        let full: Vec<_> = (0..3).map(|i| LieElement::basis(r, 3, i)).collect();
        assert!(t.span_closure_witness(&full).unwrap().is_none());
    }

    #[test]
    fn theta_abelian_spans_are_closed() {
        let r = ring(3, 2);
        let t = BracketTable::theta_abelian(r, 3, r.scalar(3)).unwrap();
        for subset in [vec![0], vec![1, 2], vec![0, 2], vec![0, 1, 2]] {
            let s: Vec<_> = subset
                .iter()
                .map(|&i| LieElement::basis(r, 3, i))
                .collect();
            assert!(t.span_closure_witness(&s).unwrap().is_none());
        }
    }
}
