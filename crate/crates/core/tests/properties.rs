use proptest::prelude::*;

use fk_picard::field::Field;
use fk_picard::ledger::{ih11_dim, mw_rank, RankLedger};
use fk_picard::pairing::{is_anti_isometry, LevelMatrix};

proptest! {
    #[test]
    fn field_inverse_and_sqrt(p in prop::sample::select(vec![5u64, 13, 31, 421]), a in 1u64..10_000, k in prop::sample::select(vec![1u32, 2, 3])) {
        let f = Field::extension(p, k).unwrap();
        let x = f.element(a as u128 % f.order()).unwrap();
        prop_assume!(!x.is_zero());
        prop_assert!((&x * &x.inv().unwrap()).is_one());
        let sq = x.square();
        let r = sq.sqrt().unwrap();
        prop_assert_eq!(r.square(), sq);
        prop_assert!(x.pow(f.order() - 1).is_one());
    }

    #[test]
    fn anti_isometries_are_closed_under_sl2(n in prop::sample::select(vec![2u64, 3, 5, 7]), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let antis: Vec<LevelMatrix> = LevelMatrix::all(n).filter(|m| is_anti_isometry(m, n)).collect();
        let sl2: Vec<LevelMatrix> = LevelMatrix::all(n).filter(|m| m.det() == 1 % n).collect();
        let (m, sigma) = (*i.get(&antis), *j.get(&sl2));
        prop_assert!(is_anti_isometry(&m.mul(&sigma), n));
        prop_assert!(is_anti_isometry(&m.neg(), n));
        prop_assert_eq!(m.mul(&m.inverse().unwrap()), LevelMatrix::identity(n));
    }

    #[test]
    fn ledger_difference(fibers in prop::collection::vec(1u64..8, 0..5), extra in 0u64..5, gap in 0u64..5) {
        let rho = 2 + fibers.iter().map(|m| m - 1).sum::<u64>() + extra;
        let l = RankLedger::new(rho + gap, rho, fibers, false).unwrap();
        prop_assert_eq!(ih11_dim(&l).unwrap() - mw_rank(&l).unwrap(), gap);
    }
}
