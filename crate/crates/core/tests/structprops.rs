use noncross_core::exactnum::{compare_radical_sums, PrecisionPolicy, RadicalOrdering, Rat};
use noncross_core::geometry::{crossing_pairs, structure_length, Point, PointSet, Structure};
use noncross_core::maxsolvers::{max_cycle, ExactLengths, SolveOptions};
use noncross_core::structprops::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(l: &str, x: i64, y: i64) -> Point {
    Point::new(l, Rat::from_int(x), Rat::from_int(y))
}

fn square() -> PointSet {
    PointSet::new(vec![pt("1", 0, 0), pt("2", 1, 0), pt("3", 1, 1), pt("4", 0, 1)]).unwrap()
}

fn random_set(n: usize, rng: &mut ChaCha8Rng) -> PointSet {
    loop {
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                Point::new(
                    format!("r{i}"),
                    Rat::frac(rng.gen_range(0..1000), 100),
                    Rat::frac(rng.gen_range(0..1000), 100),
                )
            })
            .collect();
        if let Ok(ps) = PointSet::new(pts) {
            return ps;
        }
    }
}

#[test]
fn square_in_hull_order_has_two_flippable_pairs() {
    let ps = square();
    let cycle = Structure::Cycle(vec![0, 1, 2, 3]);
    let pairs = find_flippable_pairs(&cycle, &ps).unwrap();
    assert_eq!(pairs.len(), 2);
    assert!(pairs.iter().all(|p| p.gain.lo.is_positive()));
    // gain is 2 sqrt 2 - 2
    let g = &pairs[0].gain;
    assert!(g.lo.to_f64() <= 2.0 * 2f64.sqrt() - 2.0 + 1e-12 && g.hi.to_f64() >= 2.0 * 2f64.sqrt() - 2.0 - 1e-12);
}

#[test]
fn bowtie_has_no_flippable_pair() {
    let ps = square();
    let bowtie = Structure::Cycle(vec![0, 2, 1, 3]);
    assert!(find_flippable_pairs(&bowtie, &ps).unwrap().is_empty());
    assert!(find_flippable_pairs(&bowtie.reversed(), &ps).unwrap().is_empty());
}

#[test]
fn flipping_the_square_gives_the_bowtie() {
    let ps = square();
    let cycle = Structure::Cycle(vec![0, 1, 2, 3]);
    let pair = find_flippable_pairs(&cycle, &ps).unwrap().remove(0);
    let flipped = flip(&cycle, &pair, &ps).unwrap();
    flipped.validate(4).unwrap();
    assert_eq!(crossing_pairs(&flipped, &ps).len(), 1);
    // length 2 + 2 sqrt 2, exactly
    let lens: Vec<(Rat, Rat)> = flipped.edges().iter().map(|&(a, b)| (Rat::one(), ps.squared_distance(a, b))).collect();
    let expected = [(Rat::from_int(2), Rat::one()), (Rat::from_int(2), Rat::from_int(2))];
    let ord = compare_radical_sums(&lens, &expected, &PrecisionPolicy::default()).unwrap();
    assert_eq!(ord, RadicalOrdering::Equal);
}

#[test]
fn flip_rejects_other_edge_pairs() {
    let ps = square();
    let cycle = Structure::Cycle(vec![0, 1, 2, 3]);
    let mut pair = find_flippable_pairs(&cycle, &ps).unwrap().remove(0);
    pair.e2 = (1, 2);
    assert!(matches!(flip(&cycle, &pair, &ps), Err(StructPropsError::NotAFlipPair(..))));
    pair.e2 = (5, 6);
    assert!(flip(&cycle, &pair, &ps).is_err());
}

#[test]
fn repeated_flips_increase_length_and_terminate() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let ps = random_set(8, &mut rng);
        let lengths = ExactLengths::new(&ps, PrecisionPolicy::default());
        let mut cycle = Structure::Cycle((0..8).collect());
        // 2520 distinct cycles on 8 points bound the number of strict increases
        let mut steps = 0;
        while let Some(pair) = find_flippable_pairs(&cycle, &ps).unwrap().into_iter().next() {
            let next = flip(&cycle, &pair, &ps).unwrap();
            assert_eq!(lengths.compare(&next, &cycle), RadicalOrdering::Greater);
            let before = structure_length(&cycle, &ps, 128);
            let after = structure_length(&next, &ps, 128);
            assert!(after.lo > before.hi);
            cycle = next;
            steps += 1;
            assert!(steps <= 2520);
        }
    }
}

#[test]
fn longest_cycles_have_no_flippable_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let n = rng.gen_range(4..=8);
        let ps = random_set(n, &mut rng);
        let best = max_cycle(&ps, &SolveOptions::default()).unwrap().best;
        assert!(find_flippable_pairs(&best, &ps).unwrap().is_empty());
        assert!(find_flippable_pairs(&best.reversed(), &ps).unwrap().is_empty());
    }
}

#[test]
fn diametric_pair_is_avoided() {
    for n in [4, 6] {
        let (ps, (a, c)) = diametric_counterexample(n).unwrap();
        assert_eq!(ps.len(), n);
        let diam = ps.squared_distance(a, c);
        assert_eq!(diam, Rat::from_int(2));
        for i in 0..n {
            for j in i + 1..n {
                if (i, j) != (a, c) {
                    assert!(ps.squared_distance(i, j) < diam);
                }
            }
        }
        for p in &ps.points()[2..] {
            assert!(p.x.square() + p.y.square() <= Rat::frac(1, 10000));
        }
        let r = max_cycle(&ps, &SolveOptions::default()).unwrap();
        assert!(!r.best.contains_edge(a, c), "n = {n}");
    }
    let (ps, _) = diametric_counterexample(4).unwrap();
    let r = max_cycle(&ps, &SolveOptions::default()).unwrap();
    assert_eq!(ps.labels_of(&r.best), ["a", "b1", "c", "b2"]);
    assert!(diametric_counterexample(3).is_err());
}

#[test]
fn edge_rank_examples() {
    let ps = square();
    let r = min_edge_rank(&Structure::Cycle(vec![0, 1, 2, 3]), &ps).unwrap();
    assert_eq!(r.rank, 1);
    assert_eq!(r.bound, Rat::frac(13, 2));
    assert!(r.holds());

    let hex = PointSet::new(vec![
        pt("h1", 2, 0),
        pt("h2", 1, 2),
        pt("h3", -1, 2),
        pt("h4", -2, 0),
        pt("h5", -1, -2),
        pt("h6", 1, -2),
    ])
    .unwrap();
    let r = min_edge_rank(&Structure::Cycle((0..6).collect()), &hex).unwrap();
    assert_eq!(r.rank, 1);
    assert_eq!(r.bound, Rat::frac(57, 4));

    assert_eq!(min_edge_rank(&Structure::Cycle(vec![0, 2, 1, 3]), &ps), Err(StructPropsError::Crossing));
}

#[test]
fn edge_rank_on_generated_polygons() {
    for seed in 0..150u64 {
        let n = 6 + (seed % 9) as usize;
        let (ps, poly) = random_simple_polygon(n, seed).unwrap();
        let r = min_edge_rank(&poly, &ps).unwrap();
        assert!(r.holds(), "seed {seed}: rank {} > {}", r.rank, r.bound);
    }
}

#[test]
fn generated_polygons_are_simple_and_deterministic() {
    for seed in 0..50u64 {
        let (ps, poly) = random_simple_polygon(3 + (seed % 10) as usize, seed).unwrap();
        assert!(crossing_pairs(&poly, &ps).is_empty());
        assert_eq!(random_simple_polygon(ps.len(), seed).unwrap(), (ps, poly));
    }
    let (ps, poly) = random_simple_polygon(3, 9).unwrap();
    assert_eq!(ps.len(), 3);
    assert_eq!(poly, Structure::Cycle(vec![0, 1, 2]));
    assert!(random_simple_polygon(2, 0).is_err());
}

#[test]
fn spiral_has_no_flippable_pair_in_either_direction() {
    let (ps, poly) = spiral_fixture();
    assert!(ps.len() >= 8);
    assert!(crossing_pairs(&poly, &ps).is_empty());
    assert!(find_flippable_pairs(&poly, &ps).unwrap().is_empty());
    assert!(find_flippable_pairs(&poly.reversed(), &ps).unwrap().is_empty());
}

#[test]
fn non_cycles_are_rejected() {
    let ps = square();
    assert_eq!(find_flippable_pairs(&Structure::Path(vec![0, 1, 2, 3]), &ps), Err(StructPropsError::NotACycle));
    let tri = PointSet::new(vec![pt("a", 0, 0), pt("b", 1, 0), pt("c", 0, 1)]).unwrap();
    assert!(find_flippable_pairs(&Structure::Cycle(vec![0, 1, 2]), &tri).is_err());
}
