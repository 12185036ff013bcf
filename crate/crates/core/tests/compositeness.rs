use ellfermat::compositeness::{
    composite_witness, integral_point_scan, m_b_coprime, shift_to_origin, theorem18_conditions, ConditionBounds,
};
use ellfermat::curve::{Curve, QPoint};
use ellfermat::fermat::{generate_direct, GenerateOptions};
use ellfermat::Integer;

fn example() -> (Curve, QPoint, QPoint) {
    let c = Curve::new(-199, -1, 0).unwrap();
    let p = c.point(2809, 89623, 3).unwrap();
    let t = c.point(0, 0, 1).unwrap();
    (c, p, t)
}

#[test]
fn example_conditions() {
    let (c, p, t) = example();
    let r = theorem18_conditions(&c, &p, &t, &ConditionBounds::default()).unwrap();
    for id in ["ii", "iii", "iv", "v", "vi", "viii", "ix"] {
        assert!(
            r.condition(id).unwrap().passed,
            "({id}) {}",
            r.condition(id).unwrap().evidence
        );
    }
    assert!(r.condition("i").unwrap().asserted);
    // |tau_1| = 178 since 89 | n_0
    let vii = r.condition("vii").unwrap();
    assert!(!vii.passed);
    assert!(vii.evidence.contains("178"));
    assert!(!r.verdict);
    assert_eq!(r.witnesses.len(), 5);
    assert!(r.witness_failures.is_empty());
    assert_eq!(r.witnesses[0].divisor, 53);
}

#[test]
fn witnesses_and_gcd_with_b() {
    let (c, p, _) = example();
    let states = generate_direct(&c, &p, 5, &GenerateOptions::default()).unwrap();
    for k in 1..=5 {
        let w = composite_witness(&states, k).unwrap();
        assert!(w.divisor > 1 && w.cofactor > 1);
        assert_eq!(Integer::from(&w.divisor * &w.cofactor), states[k as usize].f);
        // n_{k-1} != +-sqrt|m_{k-1}|
        assert_ne!(Integer::from(states[k as usize - 1].n.abs_ref()), w.divisor);
    }
    assert!(m_b_coprime(&c, &states).iter().all(|(_, g)| *g == 1));
}

#[test]
fn only_integral_point_is_t() {
    let (c, _, t) = example();
    assert_eq!(integral_point_scan(&c, 100_000), [t]);
}

#[test]
fn shifting_keeps_the_sequence() {
    // move T = (0, 0) to x = 7 and back
    let (c, p, _) = example();
    let moved = c.shift_x(&Integer::from(-7));
    let mp = c.shift_point(&Integer::from(-7), &p);
    let mt = moved.point(7, 0, 1).unwrap();
    assert!(moved.contains(&mp));
    let (s, back, bp) = shift_to_origin(&moved, &mp, &mt).unwrap();
    assert_eq!(s, 7);
    assert_eq!((back.a(), back.b(), back.c()), (c.a(), c.b(), c.c()));
    assert_eq!(bp, p);
    let a = generate_direct(&c, &p, 4, &GenerateOptions::default()).unwrap();
    let b = generate_direct(&moved, &mp, 4, &GenerateOptions::default()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.f, y.f);
        assert_eq!(x.tau, y.tau);
    }
}
