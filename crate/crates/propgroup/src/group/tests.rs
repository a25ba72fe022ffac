use super::*;
use crate::lie::{BracketTable, LieElement};
use crate::padic::{exp_p, log_p};

fn ring(p: u64, k: u32) -> PadicRing {
    PadicRing::new(p, k).unwrap()
}

/// Closed-form oracle for the canonical theta-abelian group: the semidirect
/// product law (a, v).(b, w) = (a + b, (1+lambda)^{-b} v + w) acting
/// coordinatewise on the kernel part.
fn semidirect_mul(
    r: PadicRing,
    lambda: u64,
    g: &[u64],
    h: &[u64],
) -> Vec<u64> {
    let d = g.len();
    let one_plus = r.scalar(1) + r.scalar(lambda);
    let conj = one_plus
        .try_unit()
        .unwrap()
        .inverse()
        .scalar()
        .pow_u64(h[0]);
    let mut out = vec![0u64; d];
    out[0] = (r.scalar(g[0]) + r.scalar(h[0])).value();
    for i in 1..d {
        out[i] = (r.scalar(g[i]) * conj + r.scalar(h[i])).value();
    }
    out
}

#[test]
fn theta_abelian_multiply_matches_semidirect_form() {
    let r = ring(3, 3);
    let (pres, _) = present_theta_abelian(r, 2, r.scalar(3)).unwrap();
    for (a, v, b, w) in [(1, 2, 1, 5), (4, 13, 22, 7), (26, 26, 26, 26), (0, 9, 3, 0)] {
        let g = GroupElement::new(r, vec![a, v]);
        let h = GroupElement::new(r, vec![b, w]);
        let got = pres.multiply(&g, &h).unwrap();
        assert_eq!(got.raw(), semidirect_mul(r, 3, g.raw(), h.raw()));
    }
}

#[test]
fn multiply_identity_and_abelian() {
    let r = ring(5, 2);
    let (pres, _) = present_theta_abelian(r, 3, r.scalar(5)).unwrap();
    let g = GroupElement::new(r, vec![3, 17, 24]);
    assert_eq!(pres.multiply(&g, &pres.identity()).unwrap(), g);
    assert_eq!(pres.multiply(&pres.identity(), &g).unwrap(), g);

    let (ab, _) = present_theta_abelian(r, 3, r.zero()).unwrap();
    let h = GroupElement::new(r, vec![24, 1, 9]);
    let prod = ab.multiply(&g, &h).unwrap();
    let sum: Vec<u64> = g
        .exponents()
        .iter()
        .zip(h.exponents())
        .map(|(a, b)| (*a + b).value())
        .collect();
    assert_eq!(prod.raw(), &sum[..]);
}

#[test]
fn multiplication_is_associative() {
    let r = ring(3, 3);
    let (pres, _) = present_theta_abelian(r, 3, r.scalar(6)).unwrap();
    let g = GroupElement::new(r, vec![2, 5, 7]);
    let h = GroupElement::new(r, vec![25, 1, 13]);
    let f = GroupElement::new(r, vec![9, 22, 4]);
    let lhs = pres
        .multiply(&pres.multiply(&g, &h).unwrap(), &f)
        .unwrap();
    let rhs = pres
        .multiply(&g, &pres.multiply(&h, &f).unwrap())
        .unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn inverse_round_trip() {
    let r = ring(3, 3);
    let (pres, _) = present_theta_abelian(r, 2, r.scalar(3)).unwrap();
    let g = GroupElement::new(r, vec![5, 11]);
    let gi = pres.inverse(&g).unwrap();
    assert!(pres.multiply(&g, &gi).unwrap().is_identity());
    assert!(pres.multiply(&gi, &g).unwrap().is_identity());
}

#[test]
fn commutator_relations() {
    let r = ring(3, 3);
    let (pres, _) = present_theta_abelian(r, 3, r.scalar(3)).unwrap();
    let x1 = pres.generator(0);
    let x2 = pres.generator(1);
    // [x_1, x_i] = x_i^lambda
    let c = pres.commutator(&x1, &x2).unwrap();
    assert_eq!(c, GroupElement::new(r, vec![0, 3, 0]));
    // [g, g] = 1
    let g = GroupElement::new(r, vec![7, 8, 9]);
    assert!(pres.commutator(&g, &g).unwrap().is_identity());
    // [x_2, x_3] = 1
    let x3 = pres.generator(2);
    assert!(pres.commutator(&x2, &x3).unwrap().is_identity());
}

#[test]
fn power_in_kernel_is_plain() {
    let r = ring(3, 2);
    let (pres, _) = present_theta_abelian(r, 2, r.scalar(3)).unwrap();
    let x2 = pres.generator(1);
    let p3 = pres.power(&x2, 3).unwrap();
    assert_eq!(p3, GroupElement::new(r, vec![0, 3]));
    // and powers agree with iterated multiplication on a mixed element
    let g = GroupElement::new(r, vec![2, 5]);
    let mut acc = pres.identity();
    for _ in 0..7 {
        acc = pres.multiply(&acc, &g).unwrap();
    }
    assert_eq!(pres.power(&g, 7).unwrap(), acc);
}

#[test]
fn negative_power_is_inverse() {
    let r = ring(5, 2);
    let (pres, _) = present_theta_abelian(r, 2, r.scalar(10)).unwrap();
    let g = GroupElement::new(r, vec![3, 4]);
    let gi = pres.inverse(&g).unwrap();
    assert_eq!(pres.power(&g, -1).unwrap(), gi);
}

#[test]
fn to_lie_theta_abelian_is_log() {
    let r = ring(3, 2);
    let (pres, _) = present_theta_abelian(r, 2, r.scalar(3)).unwrap();
    let t = pres.to_lie().unwrap();
    // lambda_L = log(1 + lambda) = log(4) = 3 mod 9
    let lam = log_p(&(r.scalar(4)).try_unit().unwrap()).unwrap();
    assert_eq!(lam.value(), 3);
    let expected = BracketTable::theta_abelian(r, 2, lam).unwrap();
    assert_eq!(t, expected);
}

#[test]
fn to_lie_abelian_is_zero() {
    let r = ring(5, 3);
    let (pres, _) = present_theta_abelian(r, 3, r.zero()).unwrap();
    assert_eq!(pres.to_lie().unwrap(), BracketTable::zero(r, 3));
}

#[test]
fn to_lie_higher_precision_theta_abelian() {
    let r = ring(3, 4);
    let lam_grp = r.scalar(3);
    let (pres, _) = present_theta_abelian(r, 3, lam_grp).unwrap();
    let t = pres.to_lie().unwrap();
    let lam_lie = log_p(&(r.one() + lam_grp).try_unit().unwrap()).unwrap();
    let expected = BracketTable::theta_abelian(r, 3, lam_lie).unwrap();
    assert_eq!(t, expected);
}

#[test]
fn from_lie_inverts_to_lie() {
    let r = ring(3, 3);
    // zero table -> abelian presentation
    let zero = BracketTable::zero(r, 2);
    let pres = from_lie(&zero).unwrap();
    for i in 0..1 {
        assert!(pres.relation_raw(i, 1).iter().all(|&e| e == 0));
    }
    // theta-abelian table: lambda_grp = exp(lambda_L) - 1
    let lam_lie = r.scalar(3);
    let t = BracketTable::theta_abelian(r, 2, lam_lie).unwrap();
    let pres = from_lie(&t).unwrap();
    let lam_grp = exp_p(lam_lie).unwrap().scalar() - r.one();
    assert_eq!(pres.relation_raw(0, 1)[1], lam_grp.value());
    assert_eq!(pres.to_lie().unwrap(), t);
}

#[test]
fn heisenberg_round_trip() {
    let r = ring(3, 3);
    let t = BracketTable::new(r, 3, vec![((0, 1), vec![0, 0, 3])]).unwrap();
    let pres = from_lie(&t).unwrap();
    assert_eq!(pres.to_lie().unwrap(), t);
}

#[test]
fn theta_center_membership() {
    let r = ring(3, 2);
    let (pres, theta) = present_theta_abelian(r, 3, r.scalar(3)).unwrap();
    // kernel generators lie in the theta-center
    assert!(pres
        .theta_center_contains(&theta, &pres.generator(1))
        .unwrap());
    assert!(pres
        .theta_center_contains(&theta, &pres.generator(2))
        .unwrap());
    // x_1 has theta(x_1) != 1, so it is not in ker(theta)
    assert!(!pres
        .theta_center_contains(&theta, &pres.generator(0))
        .unwrap());
    // abelian with trivial theta: everything qualifies
    let (ab, triv) = present_theta_abelian(r, 3, r.zero()).unwrap();
    let g = GroupElement::new(r, vec![5, 2, 8]);
    assert!(ab.theta_center_contains(&triv, &g).unwrap());
}

#[test]
fn theta_center_characterizes_kernel_on_grid() {
    let r = ring(3, 2);
    let (pres, theta) = present_theta_abelian(r, 2, r.scalar(3)).unwrap();
    for a in 0..9 {
        for v in 0..9 {
            let g = GroupElement::new(r, vec![a, v]);
            let in_kernel = theta.apply(&g).value() == 1;
            assert_eq!(
                pres.theta_center_contains(&theta, &g).unwrap(),
                in_kernel,
                "at ({a}, {v})"
            );
        }
    }
}

#[test]
fn lower_series_dims_examples() {
    let r = ring(3, 3);
    let (pres, _) = present_theta_abelian(r, 3, r.scalar(3)).unwrap();
    assert_eq!(pres.lower_series_dims(2).unwrap(), vec![3, 3]);

    let (ab, _) = present_theta_abelian(r, 4, r.zero()).unwrap();
    assert_eq!(ab.lower_series_dims(2).unwrap(), vec![4, 4]);

    // d = 2, [x, y] = y^3 at k = 4
    let r4 = ring(3, 4);
    let (p2, _) = present_theta_abelian(r4, 2, r4.scalar(3)).unwrap();
    assert_eq!(p2.lower_series_dims(2).unwrap(), vec![2, 2]);

    assert!(matches!(
        p2.lower_series_dims(4),
        Err(crate::error::Error::PrecisionExhausted(_))
    ));
}

#[test]
fn present_theta_abelian_guards() {
    let r2 = ring(2, 4);
    // p = 2 requires lambda in 4.Z2
    assert!(matches!(
        present_theta_abelian(r2, 2, r2.scalar(2)),
        Err(crate::error::Error::DomainViolation(_))
    ));
    assert!(present_theta_abelian(r2, 2, r2.scalar(4)).is_ok());
    // lambda = 0 gives the abelian presentation with trivial orientation
    let r = ring(5, 2);
    let (pres, theta) = present_theta_abelian(r, 3, r.zero()).unwrap();
    assert!(theta.is_trivial());
    assert!(pres.relation_raw(0, 1).iter().all(|&e| e == 0));
}

#[test]
fn example_5_1_presentation() {
    // q = p^n with p = 3, n = 2, d = n + 1: relations rho_i^sigma = rho_i^(q+1)
    let r = ring(3, 3);
    let q = 9u64;
    let (pres, theta) = present_theta_abelian(r, 3, r.scalar(q)).unwrap();
    let sigma = pres.generator(0);
    let rho = pres.generator(1);
    // sigma rho sigma^{-1} = rho^{q+1}
    let lhs = pres
        .multiply(&pres.multiply(&sigma, &rho).unwrap(), &pres.inverse(&sigma).unwrap())
        .unwrap();
    assert_eq!(lhs, pres.power(&rho, (q + 1) as i64).unwrap());
    assert_eq!(theta.apply(&sigma).value(), q + 1);
}

#[test]
fn p2_collection_works_at_threshold() {
    let r = ring(2, 5);
    let (pres, _) = present_theta_abelian(r, 2, r.scalar(4)).unwrap();
    let g = GroupElement::new(r, vec![3, 7]);
    let h = GroupElement::new(r, vec![9, 31]);
    let got = pres.multiply(&g, &h).unwrap();
    assert_eq!(got.raw(), semidirect_mul(r, 4, g.raw(), h.raw()));
    let t = pres.to_lie().unwrap();
    let lam = log_p(&r.scalar(5).try_unit().unwrap()).unwrap();
    assert_eq!(t, BracketTable::theta_abelian(r, 2, lam).unwrap());
}

#[test]
fn dense_transported_presentation_collects_correctly() {
    // Transport a theta-abelian table by a unimodular basis change, move to
    // the group side, and check collection against the transported oracle.
    use crate::zlin::ZpkMatrix;
    let r = ring(3, 3);
    let t = BracketTable::theta_abelian(r, 3, r.scalar(3)).unwrap();
    let b = ZpkMatrix::from_columns(r, 3, &[vec![1, 1, 0], vec![2, 1, 1], vec![0, 1, 1]]);
    let tt = t.transport(&b).unwrap();
    assert!(tt.jacobi_defect().is_none());
    let pres = from_lie(&tt).unwrap();
    assert_eq!(pres.to_lie().unwrap(), tt);
    // associativity spot-check on the dense presentation
    let g = GroupElement::new(r, vec![4, 7, 2]);
    let h = GroupElement::new(r, vec![1, 25, 3]);
    let f = GroupElement::new(r, vec![13, 0, 20]);
    let lhs = pres.multiply(&pres.multiply(&g, &h).unwrap(), &f).unwrap();
    let rhs = pres.multiply(&g, &pres.multiply(&h, &f).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn lie_element_and_group_element_reject_rank_mismatch() {
    let r = ring(3, 2);
    let (pres, _) = present_theta_abelian(r, 3, r.scalar(3)).unwrap();
    let bad = GroupElement::new(r, vec![1, 2]);
    assert!(matches!(
        pres.multiply(&bad, &bad),
        Err(crate::error::Error::RankMismatch { .. })
    ));
    let t = BracketTable::theta_abelian(r, 3, r.scalar(3)).unwrap();
    let v = LieElement::new(r, vec![1, 2]);
    assert!(matches!(
        t.bracket(&v, &v),
        Err(crate::error::Error::RankMismatch { .. })
    ));
}
