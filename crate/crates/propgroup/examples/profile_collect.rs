use propgroup::group::{GroupElement, UniformPresentation};
use propgroup::lie::BracketTable;
use propgroup::padic::PadicRing;
use propgroup::zlin::ZpkMatrix;
use std::time::Instant;

fn dense_pres(ring: PadicRing) -> UniformPresentation {
    let base = PadicRing::new(3, 3).unwrap();
    let t = BracketTable::theta_abelian(base, 3, base.scalar(3)).unwrap();
    let b = ZpkMatrix::from_columns(base, 3, &[vec![1, 1, 0], vec![2, 1, 1], vec![0, 1, 1]]);
    let tt = t.transport(&b).unwrap();
    let mut entries = Vec::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            entries.push(((i, j), tt.basis_bracket(i, j).raw().to_vec()));
        }
    }
    UniformPresentation::new_unvalidated(ring, 3, entries).unwrap()
}

fn main() {
    // consistent canonical theta-abelian, dense after verification
    for extra in [0u32, 2, 4, 6, 8] {
        let ring_k = PadicRing::new(3, 3 + extra).unwrap();
        let pres_k = dense_pres(ring_k);
        let t0 = Instant::now();
        let g = GroupElement::new(ring_k, vec![1, 1, 1]);
        let first = pres_k.multiply(&g, &g);
        let t_first = t0.elapsed();
        let t1 = Instant::now();
        let mut res = Ok(g.clone());
        for _ in 0..20 {
            res = pres_k.multiply(&g, &g);
        }
        println!(
            "K = {}: first(mul+tower) {:?}, 20 more muls {:?}, ok={} {}",
            3 + extra,
            t_first,
            t1.elapsed(),
            first.is_ok(),
            res.is_ok()
        );
    }
}
