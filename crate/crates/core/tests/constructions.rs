use noncross_core::constructions::*;
use noncross_core::exactnum::{sqrt_interval, Rat};
use noncross_core::geometry::{is_noncrossing, is_y_monotone, PointSet, Structure, StructureKind};
use noncross_core::line1d::{is_longest_cycle_1d, is_longest_path_1d, is_longest_path_1d_odd, LineSet};
use noncross_core::maxsolvers::{max_structure, Method, SolveOptions, SolveResult, Uniqueness};

fn solve(ps: &PointSet, kind: StructureKind) -> SolveResult {
    max_structure(ps, kind, &SolveOptions::default().with_method(Method::Auto)).unwrap()
}

fn labels(ps: &PointSet, s: &Structure) -> Vec<String> {
    ps.labels_of(s)
}

fn assert_certified(ps: &PointSet, cert: &Certificate, kind: StructureKind) {
    let r = solve(ps, kind);
    assert_eq!(r.unique, Uniqueness::Proven, "{}: verdict {:?}", cert.kind, r.unique);
    assert_eq!(r.best, cert.claimed_optimum.canonical(), "{}: optimum {:?}", cert.kind, labels(ps, &r.best));
    assert!(is_noncrossing(&r.best, ps));
}

fn assert_steps_sound(ps: &PointSet, cert: &Certificate) {
    for s in &cert.steps {
        assert!(s.delta.is_positive(), "{}", s.label);
        assert!(s.y <= s.delta, "{} above its threshold", s.label);
        assert_eq!(ps.point(ps.require(&s.label).unwrap()).y, s.y);
    }
    let replayed = replay_deltas(ps, cert).unwrap();
    for (s, r) in cert.steps.iter().zip(&replayed) {
        assert!(*r >= s.delta, "{}: replay {} below recorded {}", s.provenance, r, s.delta);
    }
}

fn projection(ps: &PointSet) -> LineSet {
    LineSet::new(ps.points().iter().map(|p| p.x.clone()).collect()).unwrap()
}

/// Map a structure on `ps` to indices of the sorted projection.
fn projected(ps: &PointSet, s: &Structure) -> Structure {
    let ls = projection(ps);
    let map = |i: usize| ls.index_of(&ps.point(i).x).unwrap();
    match s {
        Structure::Path(o) => Structure::Path(o.iter().map(|&i| map(i)).collect()),
        Structure::Cycle(o) => Structure::Cycle(o.iter().map(|&i| map(i)).collect()),
        Structure::Matching(p) => Structure::Matching(p.iter().map(|&(a, b)| (map(a), map(b))).collect()),
    }
}

#[test]
fn threshold_for_the_first_even_path_step() {
    let (ps, cert) = construct_path_even(3).unwrap();
    assert_eq!(ps.point(ps.require("p1").unwrap()).y, Rat::frac(1, 24));
    let d = &cert.steps[0].delta;
    // ((sqrt(4 + 1/576) - 2) - (sqrt(9 + 1/576) - 3)) / 5, evaluated at 200 bits
    let h = Rat::frac(1, 576);
    let a = sqrt_interval(&(Rat::from_int(4) + &h), 200).unwrap();
    let b = sqrt_interval(&(Rat::from_int(9) + &h), 200).unwrap();
    let upper = ((&a.hi - &Rat::from_int(2)) - (&b.lo - &Rat::from_int(3))) / Rat::from_int(5);
    let lower = ((&a.lo - &Rat::from_int(2)) - (&b.hi - &Rat::from_int(3))) / Rat::from_int(5);
    assert!(*d <= upper);
    assert!(*d >= &lower * &Rat::frac(99, 100), "rounding lost more than one percent: {d}");
    assert!((d.to_f64() - 2.9e-5).abs() < 0.1e-5, "{}", d.to_f64());
}

#[test]
fn compute_delta_path_rejects_flat_anchor_and_empty_candidates() {
    use noncross_core::geometry::Point;
    let a = Point::new("a", Rat::zero(), Rat::zero());
    let c = [Point::new("b", Rat::one(), Rat::zero()), Point::new("c", Rat::from_int(2), Rat::zero())];
    assert!(matches!(compute_delta_path(&a, &c, 4), Err(ConstructionError::NonPositiveThreshold { .. })));
    assert!(compute_delta_path(&a, &[], 4).is_err());
    let high = Point::new("a", Rat::zero(), Rat::frac(1, 8));
    assert!(compute_delta_path(&high, &c, 4).unwrap().is_positive());
}

#[test]
fn even_path_k3() {
    let (ps, cert) = construct_path_even(3).unwrap();
    assert_eq!(ps.len(), 6);
    assert_eq!(labels(&ps, &cert.claimed_optimum), ["p1", "p-2", "p2", "p-3", "p3", "p-1"]);
    assert_eq!(cert.steps.len(), 4);
    assert_certified(&ps, &cert, StructureKind::Path);
    assert!(is_y_monotone(&cert.claimed_optimum, &ps).unwrap());
    assert_steps_sound(&ps, &cert);
    assert!(is_longest_path_1d(&projected(&ps, &cert.claimed_optimum), &projection(&ps)).unwrap());
}

#[test]
fn even_paths_up_to_k5() {
    for k in 3..=5 {
        let (ps, cert) = construct_path_even(k).unwrap();
        assert_eq!(cert.steps.len(), 2 * k as usize - 2);
        assert!(is_y_monotone(&cert.claimed_optimum, &ps).unwrap());
        // The final edge pk p-1 lies right of x = -1 while every leftward
        // edge extends beyond x = -2, so those pairs can never meet. Every
        // other pair does.
        let last = 2 * k as usize - 2;
        let fails = extension_failures(&ps, &cert.claimed_optimum);
        let expected: Vec<(usize, usize)> = (0..last).step_by(2).map(|i| (i, last)).collect();
        assert_eq!(fails, expected, "k = {k}");
        assert_steps_sound(&ps, &cert);
        if k <= 4 {
            assert_certified(&ps, &cert, StructureKind::Path);
        }
    }
}

#[test]
fn odd_path_k3() {
    let (ps, cert) = construct_path_odd(3).unwrap();
    assert_eq!(ps.len(), 5);
    assert_eq!(labels(&ps, &cert.claimed_optimum), ["p-2", "p2", "p-3", "p3", "p-1"]);
    assert_certified(&ps, &cert, StructureKind::Path);
    assert!(is_longest_path_1d_odd(&projected(&ps, &cert.claimed_optimum), &projection(&ps)).unwrap());
}

#[test]
fn odd_path_k4() {
    let (ps, cert) = construct_path_odd(4).unwrap();
    assert_certified(&ps, &cert, StructureKind::Path);
}

#[test]
fn even_cycle_n6() {
    let (ps, cert) = construct_cycle_even(6).unwrap();
    assert_eq!(cert.kind, CertificateKind::CycleEven4kMinus2);
    assert_eq!(ps.point(ps.require("p1").unwrap()).y, Rat::frac(1, 32));
    assert_eq!(labels(&ps, &cert.claimed_optimum), ["p1", "p-1", "p2", "p-2", "p'2", "p'-1"]);
    let eps = cert.epsilon.clone().unwrap();
    assert!(eps <= *cert.steps.last().map(|s| &s.delta).unwrap());
    assert_certified(&ps, &cert, StructureKind::Cycle);
    assert_steps_sound(&ps, &cert);
    assert!(is_longest_cycle_1d(&projected(&ps, &cert.claimed_optimum), &projection(&ps)).unwrap());
}

#[test]
fn even_cycles_n8_and_n10() {
    for n in [8, 10] {
        let (ps, cert) = construct_cycle_even(n).unwrap();
        assert_eq!(ps.len(), n);
        assert_certified(&ps, &cert, StructureKind::Cycle);
        assert_steps_sound(&ps, &cert);
    }
}

#[test]
fn even_cycle_n8_order() {
    let (ps, cert) = construct_cycle_even(8).unwrap();
    assert_eq!(cert.kind, CertificateKind::CycleEven4k);
    assert_eq!(labels(&ps, &cert.claimed_optimum), ["p1", "p-1", "p2", "p-2", "p3", "p'-2", "p'2", "p'-1"]);
}

#[test]
fn odd_cycle_k2() {
    let (ps, cert) = construct_cycle_odd(2).unwrap();
    assert_eq!(ps.len(), 5);
    assert_eq!(ps.point(ps.require("p-2").unwrap()).y, Rat::frac(-1, 32));
    assert_eq!(labels(&ps, &cert.claimed_optimum), ["p-2", "p0", "p2", "p-1e", "p1"]);
    assert_certified(&ps, &cert, StructureKind::Cycle);
    assert_steps_sound(&ps, &cert);
}

#[test]
fn odd_cycles_k3_k4() {
    for k in [3, 4] {
        let (ps, cert) = construct_cycle_odd(k).unwrap();
        assert_certified(&ps, &cert, StructureKind::Cycle);
        assert_steps_sound(&ps, &cert);
    }
}

#[test]
fn matchings() {
    let (ps, cert) = construct_matching(1).unwrap();
    assert_eq!(ps.len(), 2);
    assert_eq!(cert.claimed_optimum.edges().len(), 1);
    for k in 2..=4 {
        let (ps, cert) = construct_matching(k).unwrap();
        assert_certified(&ps, &cert, StructureKind::Matching);
        assert_steps_sound(&ps, &cert);
    }
}

#[test]
fn general_path_examples() {
    let xs = LineSet::from_ints(&[-3, -2, -1, 1, 2, 3]).unwrap();
    let (ps, cert) = construct_path_general(&xs, &Rat::frac(1, 48)).unwrap();
    assert_certified(&ps, &cert, StructureKind::Path);
    assert!(is_y_monotone(&cert.claimed_optimum, &ps).unwrap());
    assert!(ps.points().iter().all(|p| !p.y.is_negative() && p.y <= Rat::frac(1, 48)));
    assert!(is_longest_path_1d(&projected(&ps, &cert.claimed_optimum), &projection(&ps)).unwrap());

    let (ps, cert) = construct_path_general(&LineSet::from_ints(&[-1, 1]).unwrap(), &Rat::frac(1, 4)).unwrap();
    assert_eq!(ps.len(), 2);
    assert_eq!(cert.claimed_optimum, Structure::Path(vec![0, 1]));

    let bad = LineSet::from_ints(&[-1, 0, 1]).unwrap();
    assert!(construct_path_general(&bad, &Rat::frac(1, 4)).is_err());
}

#[test]
fn general_path_on_the_odd_cycle_inner_set() {
    let (ps, cert) = construct_cycle_odd(2).unwrap();
    let eps = cert.epsilon.unwrap();
    let xs = LineSet::new(vec![-eps, Rat::zero(), Rat::one(), Rat::from_int(2)]).unwrap();
    let d = cert.steps[0].y.clone();
    let (inner, icert) = construct_path_general(&xs, &d).unwrap();
    let Structure::Path(order) = &icert.claimed_optimum else { panic!() };
    let ends = [inner.point(order[0]), inner.point(*order.last().unwrap())];
    assert_eq!((ends[0].x.clone(), ends[0].y.clone()), (Rat::zero(), d));
    assert_eq!((ends[1].x.clone(), ends[1].y.clone()), (Rat::one(), Rat::zero()));
    assert_certified(&inner, &icert, StructureKind::Path);
    drop(ps);
}

#[test]
fn small_cases() {
    for (kind, n) in [
        (StructureKind::Path, 1),
        (StructureKind::Path, 2),
        (StructureKind::Path, 3),
        (StructureKind::Path, 4),
        (StructureKind::Path, 5),
        (StructureKind::Cycle, 3),
        (StructureKind::Cycle, 4),
    ] {
        let (ps, cert) = construct_small(kind, n).unwrap();
        assert_eq!(ps.len(), n);
        assert!(is_noncrossing(&cert.claimed_optimum, &ps), "{kind} {n}");
    }
    assert!(construct_small(StructureKind::Cycle, 5).is_err());
}

#[test]
fn every_structure_on_the_small_sets_is_noncrossing() {
    use noncross_core::maxsolvers::enumerate_optima;
    // with a huge slack every structure is within range of the optimum
    for kind in [StructureKind::Path, StructureKind::Cycle] {
        let (ps, _) = construct_small(kind, 4).unwrap();
        let all = enumerate_optima(&ps, kind, &Rat::from_int(100), &SolveOptions::default()).unwrap();
        let expected = if kind == StructureKind::Path { 12 } else { 3 };
        assert_eq!(all.structures.len(), expected);
        assert!(all.structures.iter().all(|s| is_noncrossing(s, &ps)));
    }
}

#[test]
fn invalid_parameters() {
    assert!(construct_path_even(2).is_err());
    assert!(construct_cycle_even(7).is_err());
    assert!(construct_cycle_even(4).is_err());
    assert!(construct_cycle_odd(1).is_err());
    assert!(construct_matching(0).is_err());
    assert!(construct(StructureKind::Matching, 5).is_err());
}

#[test]
fn dispatcher_sizes() {
    for n in 2..=9 {
        let (ps, _) = construct(StructureKind::Path, n).unwrap();
        assert_eq!(ps.len(), n);
    }
    for n in 3..=9 {
        let (ps, _) = construct(StructureKind::Cycle, n).unwrap();
        assert_eq!(ps.len(), n);
    }
}
