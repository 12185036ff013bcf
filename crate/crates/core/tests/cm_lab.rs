use ellfermat::arith::{sieve, sqrt_mod_prime};
use ellfermat::cm::{
    brute_force_order, cm_curve, cm_point, congruence_audit, reduced_curve, trace, TableRow, TraceBranch,
};
use ellfermat::curve::{ModCurve, ModPoint};
use ellfermat::fermat::{generate_direct, GenerateOptions};
use ellfermat::{FactorBudget, Integer};
use rug::ops::RemRounding;

#[test]
fn trace_matches_point_count_below_500() {
    for p in sieve(500).into_iter().filter(|&p| p > 2) {
        let q = Integer::from(p);
        let t = trace(&q).unwrap();
        assert_eq!(t.group_order, brute_force_order(&q).unwrap(), "p = {p}");
        // Hasse: a_p^2 <= 4p
        assert!(Integer::from(t.a_p.square_ref()) <= 4 * p);
        if p % 4 == 3 {
            assert_eq!(t.a_p, 0);
            assert_eq!(t.branch, TraceBranch::ThreeModFour);
        }
    }
}

#[test]
fn all_four_branches_occur() {
    let mut seen = std::collections::BTreeSet::new();
    for p in sieve(2000).into_iter().filter(|p| p % 4 == 1) {
        seen.insert(format!("{:?}", trace(&Integer::from(p)).unwrap().branch));
    }
    assert_eq!(seen.len(), 4, "{seen:?}");
}

/// (x, y) -> (-x, i y) on E(F_p), p = 1 mod 8.
fn act_i(mc: &ModCurve, i: &Integer, q: &ModPoint) -> ModPoint {
    if q.is_identity() {
        return q.clone();
    }
    let p = mc.p();
    ModPoint::affine(Integer::from(-&q.x).rem_euc(p), Integer::from(i * &q.y).rem_euc(p))
}

#[test]
fn gaussian_action_preserves_the_curve_and_commutes_with_doubling() {
    for p in [17u32, 41, 73, 89, 97, 113, 257] {
        let q = Integer::from(p);
        let mc = reduced_curve(&q).unwrap();
        let i = sqrt_mod_prime(&Integer::from(p - 1), &q).unwrap();
        let mut pts = Vec::new();
        for x in 0..p {
            let v = mc.cubic_at(&Integer::from(x));
            if let Some(y) = sqrt_mod_prime(&v, &q) {
                pts.push(ModPoint::affine(Integer::from(x), y));
            }
        }
        for s in &pts {
            let is = act_i(&mc, &i, s);
            assert!(mc.contains(&is));
            assert_eq!(act_i(&mc, &i, &is), mc.neg(s));
            assert_eq!(act_i(&mc, &i, &mc.double(s)), mc.double(&is));
        }
        for w in pts.windows(2) {
            let lhs = act_i(&mc, &i, &mc.add(&w[0], &w[1]));
            let rhs = mc.add(&act_i(&mc, &i, &w[0]), &act_i(&mc, &i, &w[1]));
            assert_eq!(lhs, rhs, "p = {p}");
        }
    }
}

#[test]
fn congruences_through_row_four() {
    let states = generate_direct(&cm_curve(), &cm_point(), 4, &GenerateOptions::default()).unwrap();
    let rows = ellfermat::cm::table_from_states(&states, &FactorBudget::default()).unwrap();
    let audits = congruence_audit(&rows, true).unwrap();
    for a in &audits {
        assert!(a.passed(), "n = {}", a.n);
        assert!(a.unaudited.is_empty());
    }
    let row2: Vec<_> = audits[2]
        .factors
        .iter()
        .map(|f| (f.p.to_u32().unwrap(), f.mod4))
        .collect();
    assert_eq!(row2, [(3, 3), (7, 3)]);
    let f46271 = audits[4].factors.iter().find(|f| f.p == 46271).unwrap();
    assert_eq!((f46271.mod4, f46271.mod_2n.to_u32()), (3, Some(15)));
}

#[test]
fn audit_flags_a_planted_bad_factor() {
    let mut rows = ellfermat::cm::table_from_states(
        &generate_direct(&cm_curve(), &cm_point(), 3, &GenerateOptions::default()).unwrap(),
        &FactorBudget::default(),
    )
    .unwrap();
    // 13 = 5 mod 8 cannot divide F_3
    let fake: TableRow = TableRow {
        n: 3,
        f: Integer::from(26),
        factorization: ellfermat::factorize(&Integer::from(26), &FactorBudget::default()).unwrap(),
    };
    rows.push(fake);
    let audits = congruence_audit(&rows, false).unwrap();
    assert!(!audits.last().unwrap().passed());
}
