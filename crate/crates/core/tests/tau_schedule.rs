use ellfermat::arith::valuation;
use ellfermat::curve::{Curve, QPoint};
use ellfermat::fermat::{generate_direct, tau_magnitudes, GenerateOptions};
use ellfermat::tau::{
    analyze_prime, build_schedule, singular_reduction_audit, tau_for_all_k, translation_periodicity_check, PrimeCase,
    TauOptions,
};
use ellfermat::Integer;
use proptest::prelude::*;

fn curve(a: i64, b: i64, c: i64, m: i64, n: i64, e: i64) -> (Curve, QPoint) {
    let cv = Curve::new(a, b, c).unwrap();
    let p = cv.point(m, n, e).unwrap();
    (cv, p)
}

fn capped_ord_n(c: &Curve, p: &QPoint, t: i64, prime: &Integer, s: u32) -> u32 {
    let q = c.mul(t, p);
    valuation(q.n().unwrap(), prime).unwrap().min(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // For t prime to l, ord_p(n(tP)) capped at s repeats with period r.
    #[test]
    fn periodic_case_repeats_with_period_r(t in 1i64..40) {
        let (c, p) = curve(0, 0, 17, -2, 3, 1);
        for prime in [3u32, 17] {
            let q = Integer::from(prime);
            let sched = analyze_prime(&c, &p, &q, 200).unwrap();
            prop_assert_eq!(sched.case, PrimeCase::Periodic);
            let (l, r) = (sched.l.unwrap() as i64, sched.r.unwrap() as i64);
            if t % l == 0 {
                continue;
            }
            prop_assert_eq!(capped_ord_n(&c, &p, t, &q, sched.s), capped_ord_n(&c, &p, t + r, &q, sched.s));
        }
    }
}

#[test]
fn periodic_table_predicts_the_definition_far_out() {
    let (c, p) = curve(0, -36, 0, -3, 9, 1);
    let sched = analyze_prime(&c, &p, &Integer::from(3), 200).unwrap();
    assert_eq!((sched.case, sched.r, sched.s), (PrimeCase::Periodic, Some(54), 3));
    let states = generate_direct(&c, &p, 8, &GenerateOptions::default()).unwrap();
    for k in 1..=8u32 {
        let tau = states[k as usize].tau.as_ref().unwrap();
        assert_eq!(sched.ord_at(k), valuation(tau, &Integer::from(3)), "k = {k}");
    }
}

#[test]
fn schedule_matches_definition_on_the_battery() {
    let battery = [
        curve(0, -2, 0, 2, 2, 1),
        curve(-199, -1, 0, 2809, 89623, 3),
        curve(0, 0, 17, -2, 3, 1),
        curve(0, 0, -2, 3, 5, 1),
        curve(0, -25, 0, -4, 6, 1),
        curve(0, -36, 0, -3, 9, 1),
        curve(0, -16, 16, 0, 4, 1),
        curve(0, -4, 4, 0, 2, 1),
    ];
    for (c, p) in battery {
        let t = tau_for_all_k(&c, &p, 8, &TauOptions::default()).unwrap();
        let states = generate_direct(&c, &p, 8, &GenerateOptions::default()).unwrap();
        assert_eq!(t.values(), tau_magnitudes(&states), "{c}");
        let quarter = Integer::from(c.disc() / 4u32);
        assert!(t
            .values()
            .iter()
            .all(|v| quarter.is_divisible(&Integer::from(v.square_ref()))));
    }
}

#[test]
fn example_curve_schedule() {
    let (c, p) = curve(-199, -1, 0, 2809, 89623, 3);
    let sched = build_schedule(&c, &p, &TauOptions::default()).unwrap();
    assert_eq!(sched.primes.len(), 1);
    let s89 = &sched.primes[0];
    assert_eq!(s89.p, 89);
    assert_eq!(s89.case, PrimeCase::PowerOfTwo);
    assert_eq!(s89.l, Some(8));
    assert_eq!(s89.head, [(1, 1), (2, 0), (3, 0)]);
    let t = tau_for_all_k(&c, &p, 6, &TauOptions::default()).unwrap();
    assert!(t.fully_scheduled());
    assert_eq!(t.values(), [178, 2, 2, 2, 2, 2]);
}

#[test]
fn singular_reduction_links_to_tau() {
    let (c, p) = curve(-199, -1, 0, 2809, 89623, 3);
    let states = generate_direct(&c, &p, 6, &GenerateOptions::default()).unwrap();
    let audit = singular_reduction_audit(&c, &states, &Integer::from(89)).unwrap();
    assert!(audit.passed(), "{:?}", audit.failures);
    assert!(audit.rows[0].p_divides_tau && audit.rows[0].previous_singular && audit.rows[0].previous_y_zero);
    assert!(audit.rows[1..].iter().all(|r| !r.p_divides_tau));

    let (c, p) = curve(0, -36, 0, -3, 9, 1);
    let states = generate_direct(&c, &p, 6, &GenerateOptions::default()).unwrap();
    let audit = singular_reduction_audit(&c, &states, &Integer::from(3)).unwrap();
    assert!(audit.passed(), "{:?}", audit.failures);
    assert!(audit.rows[0].p_divides_tau);
    assert!(singular_reduction_audit(&c, &states, &Integer::from(2)).is_err());
}

#[test]
fn translation_by_a_multiple_with_p_power_denominator() {
    let (c, p) = curve(0, -2, 0, 2, 2, 1);
    let four = c.mul(4, &p);
    let r = translation_periodicity_check(&c, &p, &four, &Integer::from(3), 1).unwrap();
    assert!(r.passed());

    // 5 | e(5P) on x^3 - 25x with ord_5 = 1; check several Q
    let (c, p) = curve(0, -25, 0, -4, 6, 1);
    let r5 = c.mul(5, &p);
    let v = valuation(r5.e().unwrap(), &Integer::from(5)).unwrap();
    for j in [1, 2, 3, 4, 6, 7] {
        let q = c.mul(j, &p);
        let rep = translation_periodicity_check(&c, &q, &r5, &Integer::from(5), v).unwrap();
        assert!(rep.passed(), "j = {j}");
    }
}
