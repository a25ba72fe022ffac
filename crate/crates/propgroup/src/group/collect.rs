//! Collect-to-the-left arithmetic on normal forms.
//!
//! Elements are normal forms x_1^{e_1} ... x_d^{e_d} held as exponent
//! vectors mod p^t for a working precision t <= K. Moving a syllable x_j^b
//! left past a tail syllable x_l^a rewrites
//! x_l^a x_j^b = x_j^b (x_j^{-b} x_l x_j^b)^a. In a powerful presentation
//! the corrections of conjugation by a p^beta-th power live at valuation
//! >= beta + tau (tau = 1 for p odd, 2 for p = 2), which gives two descent
//! mechanisms that make the rewriting well-founded:
//!
//! - an image that is only ever raised to an exponent of valuation v is
//!   computed at working precision t - v, and
//! - corrections spawned inside the conjugation by x_j^(p^beta . u) have
//!   valuation >= beta + tau, so nested conjugations strictly increase beta.
//!
//! Conjugation by x_j^b is decomposed as b = p^beta . u and then halved in
//! u down to u = 1, a lookup into the tower table
//! tower[j][beta][l] = x_j^(-p^beta) x_l x_j^(p^beta). The tower is built
//! up front by refinement rounds against a frozen copy of itself: level 0
//! is corrected through the directly expressible forward conjugations
//! x_j w x_j^(-1), level beta+1 is recomputed as the p-th iterate of level
//! beta, and every entry's error gains valuation each round. The table is
//! accepted only when a full round leaves every entry unchanged.

use super::UniformPresentation;
use crate::error::{Error, Result};
use crate::padic::{PadicRing, Valuation};
use std::collections::HashMap;

const DEPTH_LIMIT: u32 = 300;

pub(crate) struct Collector<'a> {
    pres: &'a UniformPresentation,
    /// rings[t - 1] = Z/p^t for t = 1..=K.
    rings: Vec<PadicRing>,
    d: usize,
    /// Relation words lifted canonically into the working ring, pair-indexed.
    rels: Vec<Vec<u64>>,
    /// tower[j][beta][l] = x_j^(-p^beta) x_l x_j^(p^beta), frozen after
    /// construction.
    tower: Vec<Vec<Vec<Vec<u64>>>>,
    /// fwd[j][l] = x_j x_l x_j^{-1} = C_{jl} . x_l (used during construction).
    fwd: Vec<Vec<Vec<u64>>>,
    /// Memoized conj results keyed by (j, beta, u, l, t).
    conj_cache: HashMap<(usize, u32, u64, usize, u32), Vec<u64>>,
    /// Memoized products and powers; collection revisits the same normal
    /// forms heavily, so these caches bound the rewriting tree.
    mul_cache: HashMap<(Vec<u64>, Vec<u64>, u32), Vec<u64>>,
    pow_cache: HashMap<(Vec<u64>, u64, u32), Vec<u64>>,
}

impl<'a> Collector<'a> {
    /// A collector computing at `ring` precision (the presentation's own
    /// ring or an elevation of it). Fails when the relation table violates
    /// the powerful valuation bound or does not define a consistent
    /// conjugation action at this precision.
    pub(crate) fn new(pres: &'a UniformPresentation, ring: PadicRing) -> Result<Collector<'a>> {
        debug_assert_eq!(ring.prime(), pres.ring().prime());
        debug_assert!(ring.precision() >= pres.ring().precision());
        pres.check_uniform_valuations()?;
        let d = pres.rank();
        let mut rels = Vec::with_capacity(d * (d - 1) / 2);
        for i in 0..d {
            for j in (i + 1)..d {
                rels.push(pres.relation_raw(i, j).to_vec());
            }
        }
        let k = ring.precision();
        let rings: Vec<PadicRing> = (1..=k)
            .map(|t| PadicRing::new(ring.prime(), t))
            .collect::<Result<_>>()?;
        let mut col = Collector {
            pres,
            rings,
            d,
            rels,
            tower: (0..d)
                .map(|_| {
                    (0..k)
                        .map(|_| (0..d).map(|l| Self::gen_vec(d, l)).collect())
                        .collect()
                })
                .collect(),
            fwd: vec![Vec::new(); d],
            conj_cache: HashMap::new(),
            mul_cache: HashMap::new(),
            pow_cache: HashMap::new(),
        };
        col.build_tower()?;
        Ok(col)
    }

    fn top(&self) -> u32 {
        self.rings.len() as u32
    }

    fn ring_at(&self, t: u32) -> PadicRing {
        self.rings[(t - 1) as usize]
    }

    fn gen_vec(d: usize, l: usize) -> Vec<u64> {
        let mut v = vec![0; d];
        v[l] = 1;
        v
    }

    fn reduce(&self, w: &[u64], t: u32) -> Vec<u64> {
        let m = self.ring_at(t).modulus();
        w.iter().map(|&e| e % m).collect()
    }

    fn rel(&self, i: usize, j: usize) -> Vec<u64> {
        debug_assert!(i < j);
        self.rels[i * self.d - i * (i + 1) / 2 + (j - i - 1)].clone()
    }

    pub(crate) fn identity(&self) -> Vec<u64> {
        vec![0; self.d]
    }

    fn is_identity(w: &[u64]) -> bool {
        w.iter().all(|&e| e == 0)
    }

    fn min_valuation(&self, w: &[u64], t: u32) -> Valuation {
        let r = self.ring_at(t);
        w.iter()
            .map(|&e| r.raw_val(e % r.modulus()))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Refinement rounds for the conjugation tower.
    fn build_tower(&mut self) -> Result<()> {
        if self.d <= 1 {
            return Ok(());
        }
        let t = self.top();
        let tau = self.ring_at(t).powerful_threshold();
        let max_rounds = 2 * t + 6;
        for round_no in 0..max_rounds {
            if std::env::var("COLLECT_TRACE").is_ok() {
                eprintln!("round {round_no} start, caches {} {} {}", self.conj_cache.len(), self.mul_cache.len(), self.pow_cache.len());
            }
            self.conj_cache.clear();
            self.mul_cache.clear();
            self.pow_cache.clear();
            // forward images against the frozen tower
            let mut fwd: Vec<Vec<Vec<u64>>> = Vec::with_capacity(self.d);
            for j in 0..self.d {
                let mut row = Vec::with_capacity(self.d);
                for l in 0..self.d {
                    let img = if j == l {
                        Self::gen_vec(self.d, l)
                    } else {
                        let c = if j < l {
                            self.rel(j, l)
                        } else {
                            let r = self.rel(l, j);
                            self.inverse_at(&r, t, 0)?
                        };
                        let xl = Self::gen_vec(self.d, l);
                        self.mul_at(&c, &xl, t, 0)?
                    };
                    row.push(img);
                }
                fwd.push(row);
            }
            self.fwd = fwd;

            let mut new_tower = self.tower.clone();
            let mut all_fixed = true;
            // level 0: one correction step per entry
            for j in 0..self.d {
                for l in 0..self.d {
                    if j == l {
                        continue;
                    }
                    let z = self.tower[j][0][l].clone();
                    let f = self.forward_conj(j, &z, t)?;
                    let fi = self.inverse_at(&f, t, 0)?;
                    let eps = self.mul_at(&fi, &Self::gen_vec(self.d, l), t, 0)?;
                    if Self::is_identity(&eps) {
                        continue;
                    }
                    all_fixed = false;
                    if !self.min_valuation(&eps, t).at_least(tau) {
                        return Err(Error::NonConvergence(format!(
                            "conjugation table correction at ({j}, {l}) has valuation {} < {tau}",
                            self.min_valuation(&eps, t)
                        )));
                    }
                    new_tower[j][0][l] = self.mul_at(&z, &eps, t, 0)?;
                }
            }
            if std::env::var("COLLECT_TRACE").is_ok() {
                eprintln!("  level-0 refined");
            }
            // level beta + 1: p-th iterate of level beta, against the frozen
            // tower
            for j in 0..self.d {
                for beta in 0..(t - 1) {
                    for l in 0..self.d {
                        if j == l {
                            continue;
                        }
                        let mut w = Self::gen_vec(self.d, l);
                        for _ in 0..self.ring_at(t).prime() {
                            w = self.apply_tower_conj(j, beta, 1, &w, t, 0)?;
                        }
                        // the corrections of a p^beta-power conjugation must
                        // sit at valuation >= beta + tau
                        let mut corr = w.clone();
                        corr[l] = self.ring_at(t).raw_sub(corr[l], 1);
                        if !self
                            .min_valuation(&corr, t)
                            .at_least((beta + 1 + tau).min(t))
                        {
                            return Err(Error::NonConvergence(format!(
                                "tower level {} at ({j}, {l}) has shallow corrections",
                                beta + 1
                            )));
                        }
                        if new_tower[j][(beta + 1) as usize][l] != w {
                            all_fixed = false;
                            new_tower[j][(beta + 1) as usize][l] = w;
                        }
                    }
                }
            }
            if all_fixed {
                self.conj_cache.clear();
                self.mul_cache.clear();
                self.pow_cache.clear();
                return Ok(());
            }
            self.tower = new_tower;
        }
        Err(Error::NonConvergence(
            "generator conjugation tower did not stabilize (inconsistent relation table?)".into(),
        ))
    }

    /// x_j w x_j^{-1} assembled from the forward images.
    fn forward_conj(&mut self, j: usize, w: &[u64], t: u32) -> Result<Vec<u64>> {
        let mut acc = self.identity();
        for l in 0..self.d {
            if w[l] != 0 {
                let img = self.fwd[j][l].clone();
                let powed = self.pow_at(&img, w[l], t, 0)?;
                acc = self.mul_at(&acc, &powed, t, 0)?;
            }
        }
        Ok(acc)
    }

    fn guard(&self, depth: u32) -> Result<()> {
        if depth > DEPTH_LIMIT {
            return Err(Error::NonConvergence(
                "collection recursion exceeded the filtration depth bound".into(),
            ));
        }
        Ok(())
    }

    /// Normal form of g . h at full precision.
    pub(crate) fn mul(&mut self, g: &[u64], h: &[u64]) -> Result<Vec<u64>> {
        self.mul_at(g, h, self.top(), 0)
    }

    fn mul_at(&mut self, g: &[u64], h: &[u64], t: u32, depth: u32) -> Result<Vec<u64>> {
        self.guard(depth)?;
        let r = self.ring_at(t);
        let mut acc = self.reduce(g, t);
        let h = self.reduce(h, t);
        // sorted-concatenation fast path
        let max_g = acc.iter().rposition(|&e| e != 0);
        let min_h = h.iter().position(|&e| e != 0);
        match (max_g, min_h) {
            (None, _) => return Ok(h),
            (_, None) => return Ok(acc),
            (Some(mg), Some(mh)) if mg <= mh => {
                for (a, &b) in acc.iter_mut().zip(&h) {
                    *a = r.raw_add(*a, b);
                }
                return Ok(acc);
            }
            _ => {}
        }
        let key = (acc.clone(), h.clone(), t);
        if let Some(v) = self.mul_cache.get(&key) {
            return Ok(v.clone());
        }
        for j in 0..self.d {
            if h[j] != 0 {
                acc = self.mul_syllable(&acc, j, h[j], t, depth + 1)?;
            }
        }
        self.mul_cache.insert(key, acc.clone());
        Ok(acc)
    }

    /// Normal form of g . x_j^b at precision t.
    fn mul_syllable(&mut self, g: &[u64], j: usize, b: u64, t: u32, depth: u32) -> Result<Vec<u64>> {
        self.guard(depth)?;
        let r = self.ring_at(t);
        let mut head: Vec<u64> = g.to_vec();
        let mut tail: Vec<(usize, u64)> = Vec::new();
        for l in (j + 1)..self.d {
            if g[l] != 0 {
                tail.push((l, g[l]));
                head[l] = 0;
            }
        }
        head[j] = r.raw_add(head[j], b);
        if tail.is_empty() {
            return Ok(head);
        }
        let mut acc = head;
        for (l, e) in tail {
            // the image's corrections only matter below valuation t - v(e)
            let v = match r.raw_val(e) {
                Valuation::Finite(v) => v,
                Valuation::Infinite => continue,
            };
            let img = self.conj_pow(j, b, l, t - v, depth + 1)?;
            let powed = self.pow_at(&img, e, t, depth + 1)?;
            acc = self.mul_at(&acc, &powed, t, depth + 1)?;
        }
        Ok(acc)
    }

    pub(crate) fn pow(&mut self, w: &[u64], e: u64) -> Result<Vec<u64>> {
        self.pow_at(w, e, self.top(), 0)
    }

    /// w^e by binary powering; single syllables commute with themselves.
    fn pow_at(&mut self, w: &[u64], e: u64, t: u32, depth: u32) -> Result<Vec<u64>> {
        self.guard(depth)?;
        let r = self.ring_at(t);
        let w = self.reduce(w, t);
        let e = e % r.modulus();
        if e == 0 || Self::is_identity(&w) {
            return Ok(self.identity());
        }
        if w.iter().filter(|&&x| x != 0).count() == 1 {
            let l = w.iter().position(|&x| x != 0).unwrap();
            let mut out = self.identity();
            out[l] = r.raw_mul(w[l], e);
            return Ok(out);
        }
        let key = (w.clone(), e, t);
        if let Some(v) = self.pow_cache.get(&key) {
            return Ok(v.clone());
        }
        let mut base = w;
        let mut acc = self.identity();
        let mut e_left = e;
        while e_left > 0 {
            if e_left & 1 == 1 {
                acc = self.mul_at(&acc, &base, t, depth + 1)?;
            }
            e_left >>= 1;
            if e_left > 0 {
                base = self.mul_at(&base, &base, t, depth + 1)?;
            }
        }
        self.pow_cache.insert(key, acc.clone());
        Ok(acc)
    }

    pub(crate) fn inverse(&mut self, g: &[u64]) -> Result<Vec<u64>> {
        self.inverse_at(g, self.top(), 0)
    }

    /// Normal form of g^{-1}: fold the reversed negated word.
    fn inverse_at(&mut self, g: &[u64], t: u32, depth: u32) -> Result<Vec<u64>> {
        self.guard(depth)?;
        let r = self.ring_at(t);
        let g = self.reduce(g, t);
        let mut acc = self.identity();
        for l in (0..self.d).rev() {
            if g[l] != 0 {
                acc = self.mul_syllable(&acc, l, r.raw_neg(g[l]), t, depth + 1)?;
            }
        }
        Ok(acc)
    }

    pub(crate) fn commutator(&mut self, g: &[u64], h: &[u64]) -> Result<Vec<u64>> {
        let t = self.top();
        let gh = self.mul_at(g, h, t, 0)?;
        let gi = self.inverse_at(g, t, 0)?;
        let hi = self.inverse_at(h, t, 0)?;
        let a = self.mul_at(&gh, &gi, t, 0)?;
        self.mul_at(&a, &hi, t, 0)
    }

    /// x_j^{-b} x_l x_j^{b} mod p^t.
    fn conj_pow(&mut self, j: usize, b: u64, l: usize, t: u32, depth: u32) -> Result<Vec<u64>> {
        let r = self.ring_at(t);
        let b = b % r.modulus();
        if b == 0 || j == l {
            return Ok(Self::gen_vec(self.d, l));
        }
        let beta = r.raw_val(b).finite().expect("b nonzero");
        let u = b / r.prime().pow(beta);
        self.conj_tower_pow(j, beta, u, l, t, depth)
    }

    /// Conjugation of x_l by (x_j^(p^beta))^u mod p^t, halving u down to the
    /// tower lookups at u = 1.
    fn conj_tower_pow(
        &mut self,
        j: usize,
        beta: u32,
        u: u64,
        l: usize,
        t: u32,
        depth: u32,
    ) -> Result<Vec<u64>> {
        if u == 0 || j == l {
            return Ok(Self::gen_vec(self.d, l));
        }
        if u == 1 {
            let w = self.tower[j][beta as usize][l].clone();
            return Ok(self.reduce(&w, t));
        }
        let key = (j, beta, u, l, t);
        if let Some(v) = self.conj_cache.get(&key) {
            return Ok(v.clone());
        }
        self.guard(depth)?;
        let uh = u / 2;
        let ur = u - uh;
        let inner = self.conj_tower_pow(j, beta, uh, l, t, depth + 1)?;
        let acc = self.apply_tower_conj(j, beta, ur, &inner, t, depth + 1)?;
        self.conj_cache.insert(key, acc.clone());
        Ok(acc)
    }

    /// Apply conjugation by (x_j^(p^beta))^u to a normal form.
    fn apply_tower_conj(
        &mut self,
        j: usize,
        beta: u32,
        u: u64,
        w: &[u64],
        t: u32,
        depth: u32,
    ) -> Result<Vec<u64>> {
        self.guard(depth)?;
        let r = self.ring_at(t);
        let w = self.reduce(w, t);
        let mut acc = self.identity();
        for m in 0..self.d {
            let e = w[m];
            if e == 0 {
                continue;
            }
            let v = match r.raw_val(e) {
                Valuation::Finite(v) => v,
                Valuation::Infinite => continue,
            };
            let img = self.conj_tower_pow(j, beta, u, m, t - v, depth + 1)?;
            let powed = self.pow_at(&img, e, t, depth + 1)?;
            acc = self.mul_at(&acc, &powed, t, depth + 1)?;
        }
        Ok(acc)
    }
}
