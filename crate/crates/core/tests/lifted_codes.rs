use isodual_core::codes::{dual_code, min_distance, scale_code, Distance, DEFAULT_BUDGET};
use isodual_core::lifting::{designed_distance, lift_code, LiftPlan};
use isodual_core::places::{Divisor, Place};
use isodual_core::tower::{make_tower, Tower, TowerName};
use isodual_core::gf::Fe;
use isodual_core::linalg::dot;

fn weight(w: &[Fe]) -> usize {
    w.iter().filter(|v| !v.is_zero()).count()
}

#[test]
fn bgs_level_one_lift() {
    let t = Tower::analyze(make_tower(TowerName::Bgs, 2).unwrap(), 1).unwrap();
    let d = t.evaluation_places(1).unwrap();
    let plan = LiftPlan::from_base(&t, &d, &Divisor::single(0, Place::Infinity, 2), 1).unwrap();
    let lc = lift_code(&plan, 7).unwrap();
    assert_eq!((lc.code.len(), lc.code.dim()), (12, 6));
    assert_eq!(lc.genus, 1);
    let x = lc.isoduality.witness().unwrap();
    let scaled = scale_code(&x, &lc.code).unwrap();
    assert!(scaled.same_space(&dual_code(&lc.code)));
    let ctx = lc.code.field();
    for a in lc.code.generator().row_vecs() {
        for b in scaled.generator().row_vecs() {
            assert!(dot(ctx, &a, &b).is_zero());
        }
    }
    let dist = min_distance(&lc.code, DEFAULT_BUDGET, designed_distance(12, 1), 0);
    let Distance::Exact { d } = dist else { panic!("{dist:?}") };
    assert!(d >= 6, "d = {d}");
    // every generator row has weight at least d
    assert!(lc.code.generator().row_vecs().iter().all(|r| weight(r) >= d));
}

#[test]
fn gs4_level_one_lift() {
    let t = Tower::analyze(make_tower(TowerName::Gs, 4).unwrap(), 1).unwrap();
    let d = t.evaluation_places(1).unwrap();
    assert_eq!(d.len(), 12);
    let plan = LiftPlan::from_base(&t, &d, &Divisor::single(0, Place::Infinity, 5), 1).unwrap();
    let lc = lift_code(&plan, 7).unwrap();
    assert_eq!((lc.code.len(), lc.code.dim()), (48, 24));
    assert_eq!(t.degree(&lc.g).unwrap(), 32);
    assert!(lc.isoduality.witness().is_some());
    let dist = min_distance(&lc.code, DEFAULT_BUDGET, designed_distance(48, lc.genus), 0);
    assert!(matches!(dist, Distance::BoundOnly { designed: 16, .. }), "{dist:?}");
}
