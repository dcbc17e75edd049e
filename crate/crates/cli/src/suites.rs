//! Property batteries and the acceptance criteria, each reported as a
//! named check with the list of failing instances.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use noncross_core::constructions::{
    construct_cycle_even, construct_cycle_odd, construct_matching, construct_path_even, construct_path_odd,
    construct_small, exchange_checks,
};
use noncross_core::exactnum::{compare_radical_sums, sqrt_interval, PrecisionPolicy, RadicalOrdering, Rat};
use noncross_core::geometry::{
    is_noncrossing, is_y_monotone, orientation, structure_length, Orientation, Point, PointSet, Structure,
    StructureKind,
};
use noncross_core::line1d::{
    cycle_deficit_lemma_check, edges_over_gap, endpoints_straddle_median, is_longest_cycle_1d, is_longest_path_1d,
    longest_cycle_length_1d, longest_path_length_1d, LineSet,
};
use noncross_core::maxsolvers::{
    enumerate_optima, max_structure, ExactLengths, Method, SolveOptions, SolveResult, Uniqueness,
};
use noncross_core::structprops::{
    diametric_counterexample, find_flippable_pairs, min_edge_rank, random_simple_polygon,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::oracle;

pub const SUITES: [&str; 5] = ["all", "line1d", "constructions", "properties", "acceptance"];

/// Instance counts and the base seed for the randomized checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub seed: u64,
    pub line_sets: usize,
    pub deficit_sets: usize,
    pub perturbations: usize,
    pub cycle_sets: usize,
    pub polygons: usize,
    pub solver_instances: usize,
    pub dp_n: usize,
    pub dp_budget: Duration,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            seed: 0,
            line_sets: 100,
            deficit_sets: 50,
            perturbations: 50,
            cycle_sets: 200,
            polygons: 500,
            solver_instances: 200,
            dp_n: 18,
            dp_budget: Duration::from_secs(120),
        }
    }
}

impl Params {
    /// Use `n` random instances in every randomized battery.
    pub fn with_seeds(mut self, n: usize) -> Self {
        self.line_sets = n;
        self.deficit_sets = n;
        self.perturbations = n;
        self.cycle_sets = n;
        self.polygons = n;
        self.solver_instances = n;
        self
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    pub detail: String,
    pub failures: Vec<String>,
}

impl Check {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {}: {}", self.name, self.detail)
    }
}

#[derive(Default)]
struct Recorder {
    instances: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Recorder {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, name: &str) -> Check {
        let mut detail = format!("{} instances", self.instances);
        for n in &self.notes {
            detail.push_str("; ");
            detail.push_str(n);
        }
        if !self.failures.is_empty() {
            detail.push_str(&format!("; {} failures, first: {}", self.failures.len(), self.failures[0]));
        }
        Check {
            name: name.into(),
            passed: self.failures.is_empty(),
            instances: self.instances,
            detail,
            failures: self.failures,
        }
    }
}

fn brute() -> SolveOptions {
    SolveOptions::default().with_method(Method::BruteForce)
}

fn rng_for(params: &Params, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream))
}

/// Checks that the solver certified `claimed` as the single optimum and
/// that it is noncrossing.
fn certified_unique(
    r: &mut Recorder,
    what: &str,
    ps: &PointSet,
    res: &Result<SolveResult, impl std::fmt::Display>,
    claimed: &Structure,
) {
    let res = match res {
        Ok(res) => res,
        Err(e) => return r.expect(false, || format!("{what}: solver error {e}")),
    };
    r.expect(res.unique == Uniqueness::Proven, || format!("{what}: uniqueness {:?}", res.unique));
    r.expect(res.best == claimed.canonical(), || {
        format!("{what}: optimum {:?}, claimed {:?}", ps.labels_of(&res.best), ps.labels_of(claimed))
    });
    r.expect(is_noncrossing(&res.best, ps), || format!("{what}: optimum crosses"));
}

fn labels(ps: &PointSet, s: &Structure) -> Vec<String> {
    ps.labels_of(s)
}

fn index(ps: &PointSet, label: &str) -> usize {
    ps.require(label).expect("construction label")
}

pub fn criterion_1(_: &Params) -> Check {
    let mut r = Recorder::default();
    for k in 3..=5u32 {
        let what = format!("k={k}");
        let (ps, cert) = match construct_path_even(k) {
            Ok(v) => v,
            Err(e) => {
                r.expect(false, || format!("{what}: {e}"));
                continue;
            }
        };
        r.instances += 1;
        let mut want = vec!["p1".to_string()];
        for i in 2..=k {
            want.push(format!("p-{i}"));
            want.push(format!("p{i}"));
        }
        want.push("p-1".into());
        r.expect(labels(&ps, &cert.claimed_optimum) == want, || {
            format!("{what}: claimed order {:?}", labels(&ps, &cert.claimed_optimum))
        });
        let res = max_structure(&ps, StructureKind::Path, &brute());
        certified_unique(&mut r, &what, &ps, &res, &cert.claimed_optimum);
        r.expect(is_y_monotone(&cert.claimed_optimum, &ps).unwrap_or(false), || format!("{what}: not y-monotone"));
    }
    r.finish("1 even paths")
}

pub fn criterion_2(_: &Params) -> Check {
    let mut r = Recorder::default();
    for k in 3..=5u32 {
        let what = format!("k={k}");
        let (Ok((odd, cert)), Ok((even, even_cert))) = (construct_path_odd(k), construct_path_even(k)) else {
            r.expect(false, || format!("{what}: construction failed"));
            continue;
        };
        r.instances += 1;
        let mut want = Vec::new();
        for i in 2..=k {
            want.push(format!("p-{i}"));
            want.push(format!("p{i}"));
        }
        want.push("p-1".into());
        r.expect(labels(&odd, &cert.claimed_optimum) == want, || {
            format!("{what}: claimed order {:?}", labels(&odd, &cert.claimed_optimum))
        });
        let p1 = index(&even, "p1");
        let same_points = odd.points() == even.without(p1).points();
        r.expect(same_points, || format!("{what}: odd set is not the even set without p1"));
        let res = max_structure(&odd, StructureKind::Path, &brute());
        certified_unique(&mut r, &what, &odd, &res, &cert.claimed_optimum);

        // |H'| = |H''| + |p1 p-2|, both as certified intervals and exactly
        let bits = 256;
        let h1 = structure_length(&even_cert.claimed_optimum, &even, bits);
        let h2 = structure_length(&cert.claimed_optimum, &odd, bits);
        let e = sqrt_interval(&even.squared_distance(p1, index(&even, "p-2")), bits).expect("square");
        let rhs = &h2 + &e;
        r.expect(h1.lo <= rhs.hi && rhs.lo <= h1.hi, || format!("{what}: intervals {h1:?} and {rhs:?} are disjoint"));
        if let Ok(res) = &res {
            r.expect(res.best_length.lo <= h2.hi && h2.lo <= res.best_length.hi, || {
                format!("{what}: solver length disagrees")
            });
        }
        let terms = |ps: &PointSet, s: &Structure| {
            s.edges().into_iter().map(|(a, b)| (Rat::one(), ps.squared_distance(a, b))).collect::<Vec<_>>()
        };
        let lhs = terms(&even, &even_cert.claimed_optimum);
        let mut rhs_terms = terms(&odd, &cert.claimed_optimum);
        rhs_terms.push((Rat::one(), even.squared_distance(p1, index(&even, "p-2"))));
        let ord = compare_radical_sums(&lhs, &rhs_terms, &PrecisionPolicy::default());
        r.expect(ord == Ok(RadicalOrdering::Equal), || format!("{what}: identity gives {ord:?}"));
    }
    r.finish("2 odd paths")
}

pub fn criterion_3(_: &Params) -> Check {
    let mut r = Recorder::default();
    for n in [6usize, 8, 10] {
        let what = format!("n={n}");
        let (ps, cert) = match construct_cycle_even(n) {
            Ok(v) => v,
            Err(e) => {
                r.expect(false, || format!("{what}: {e}"));
                continue;
            }
        };
        r.instances += 1;
        let res = max_structure(&ps, StructureKind::Cycle, &brute());
        certified_unique(&mut r, &what, &ps, &res, &cert.claimed_optimum);

        // two y-monotone paths from p1 to the final point
        let order = cert.claimed_optimum.order().expect("cycle").to_vec();
        let end = if n % 4 == 2 { format!("p-{}", (n + 2) / 4) } else { format!("p{}", n / 4 + 1) };
        let top_ok = ps.label(order[0]) == "p1";
        r.expect(top_ok, || format!("{what}: cycle does not start at p1"));
        match order.iter().position(|&i| ps.label(i) == end) {
            Some(j) => {
                let first = Structure::Path(order[..=j].to_vec());
                let mut rest = order[j..].to_vec();
                rest.push(order[0]);
                let second = Structure::Path(rest);
                for (side, path) in [("first", first), ("second", second)] {
                    r.expect(is_y_monotone(&path, &ps).unwrap_or(false), || {
                        format!("{what}: {side} path to {end} is not y-monotone")
                    });
                }
            }
            None => r.expect(false, || format!("{what}: no point {end}")),
        }
        match exchange_checks(&ps, &cert) {
            Ok(checks) => {
                r.expect(!checks.is_empty(), || format!("{what}: no exchange inequality recorded"));
                for (stage, ord) in checks {
                    r.expect(ord == RadicalOrdering::Greater, || format!("{what}: {stage} gives {ord:?}"));
                }
            }
            Err(e) => r.expect(false, || format!("{what}: {e}")),
        }
    }
    r.finish("3 even cycles")
}

pub fn criterion_4(_: &Params) -> Check {
    let mut r = Recorder::default();
    for k in 2..=4u32 {
        let what = format!("k={k}");
        let (ps, cert) = match construct_cycle_odd(k) {
            Ok(v) => v,
            Err(e) => {
                r.expect(false, || format!("{what}: {e}"));
                continue;
            }
        };
        r.instances += 1;
        let res = max_structure(&ps, StructureKind::Cycle, &brute());
        certified_unique(&mut r, &what, &ps, &res, &cert.claimed_optimum);
        let (pk, p0, p1) = (index(&ps, &format!("p-{k}")), index(&ps, "p0"), index(&ps, "p1"));
        if let Ok(res) = &res {
            r.expect(res.best.contains_edge(pk, p0) && res.best.contains_edge(pk, p1), || {
                format!("{what}: p-{k} is not adjacent to both p0 and p1")
            });
        }
        let (a, b) = (ps.point(pk), ps.point(p0));
        let (left, right) = if a.x < b.x { (a, b) } else { (b, a) };
        let cluster: Vec<&Point> = ps.points().iter().filter(|p| p.label.ends_with('e')).collect();
        r.expect(!cluster.is_empty(), || format!("{what}: no cluster points"));
        for c in cluster {
            r.expect(orientation(left, right, c) == Orientation::Clockwise, || {
                format!("{what}: {} is not strictly below p-{k} p0", c.label)
            });
        }
    }
    r.finish("4 odd cycles")
}

pub fn criterion_5(_: &Params) -> Check {
    let mut r = Recorder::default();
    for k in 2..=6u32 {
        let what = format!("k={k}");
        let (ps, cert) = match construct_matching(k) {
            Ok(v) => v,
            Err(e) => {
                r.expect(false, || format!("{what}: {e}"));
                continue;
            }
        };
        r.instances += 1;
        for i in 1..=k {
            let (a, b) = (index(&ps, &format!("p-{i}")), index(&ps, &format!("p{i}")));
            r.expect(cert.claimed_optimum.contains_edge(a, b), || format!("{what}: p-{i} p{i} missing"));
        }
        let res = max_structure(&ps, StructureKind::Matching, &brute());
        certified_unique(&mut r, &what, &ps, &res, &cert.claimed_optimum);
    }
    r.finish("5 matchings")
}

fn random_line_set(rng: &mut ChaCha8Rng, n: usize) -> LineSet {
    let mut vals = BTreeSet::new();
    while vals.len() < n {
        vals.insert(Rat::frac(rng.gen_range(-60..=60), rng.gen_range(1..=3)));
    }
    LineSet::new(vals.into_iter().collect()).expect("distinct values")
}

fn optima_1d(ls: &LineSet, all: &[Structure]) -> (Rat, BTreeSet<Structure>) {
    let lens: Vec<Rat> = all.iter().map(|s| ls.length(s)).collect();
    let best = lens.iter().max().expect("nonempty").clone();
    let opt = all.iter().zip(&lens).filter(|(_, l)| **l == best).map(|(s, _)| s.clone()).collect();
    (best, opt)
}

pub fn criterion_6(params: &Params) -> Check {
    let mut r = Recorder::default();
    let mut rng = rng_for(params, 6);
    let paths: Vec<Vec<Structure>> = (0..=8).map(oracle::all_paths).collect();
    let cycles: Vec<Vec<Structure>> =
        (0..=8).map(|n| if n >= 3 { oracle::all_cycles(n) } else { Vec::new() }).collect();
    for t in 0..params.line_sets {
        r.instances += 1;
        let n = 2 * rng.gen_range(1..=4usize);
        let ls = random_line_set(&mut rng, n);
        let what = format!("path set {t} {:?}", ls.values());
        let (best, opt) = optima_1d(&ls, &paths[n]);
        let chars: BTreeSet<Structure> =
            paths[n].iter().filter(|s| is_longest_path_1d(s, &ls).unwrap_or(false)).cloned().collect();
        r.expect(chars == opt, || format!("{what}: characterization picks {} of {} optima", chars.len(), opt.len()));
        r.expect(opt.iter().all(|s| endpoints_straddle_median(s, &ls)), || {
            format!("{what}: optimum with both ends on one side")
        });
        r.expect(longest_path_length_1d(&ls).ok() == Some(best.clone()), || {
            format!("{what}: closed form differs from {best}")
        });

        let n = rng.gen_range(3..=8usize);
        let ls = random_line_set(&mut rng, n);
        let what = format!("cycle set {t} {:?}", ls.values());
        let (best, opt) = optima_1d(&ls, &cycles[n]);
        let chars: BTreeSet<Structure> =
            cycles[n].iter().filter(|s| is_longest_cycle_1d(s, &ls).unwrap_or(false)).cloned().collect();
        r.expect(chars == opt, || format!("{what}: characterization picks {} of {} optima", chars.len(), opt.len()));
        r.expect(longest_cycle_length_1d(&ls).ok() == Some(best.clone()), || {
            format!("{what}: closed form differs from {best}")
        });
    }
    r.finish("6 one-dimensional characterizations")
}

pub fn criterion_7(params: &Params) -> Check {
    let mut r = Recorder::default();
    let mut rng = rng_for(params, 7);
    let cycles = [oracle::all_cycles(5), oracle::all_cycles(7)];
    let mut short = 0usize;
    for t in 0..params.deficit_sets {
        r.instances += 1;
        let which = rng.gen_range(0..2usize);
        let n = 5 + 2 * which;
        let k = n / 2;
        let ls = random_line_set(&mut rng, n);
        let what = format!("set {t} {:?}", ls.values());
        let best = longest_cycle_length_1d(&ls).expect("n >= 3");
        let h = &ls.values()[k + 1] - &ls.values()[k];
        let two_h = &h * &Rat::from_int(2);
        for s in &cycles[which] {
            if edges_over_gap(s, k) < 2 * k {
                short += 1;
                let loss = &best - &ls.length(s);
                r.expect(loss >= two_h, || format!("{what}: cycle {s:?} loses only {loss} < {two_h}"));
                let bound = cycle_deficit_lemma_check(&ls, s);
                r.expect(bound.as_ref() == Ok(&two_h), || format!("{what}: deficit bound {bound:?}"));
            }
        }
    }
    r.note(format!("{short} short cycles checked"));
    r.finish("7 odd cycle deficit")
}

pub fn criterion_8(params: &Params) -> Check {
    let mut r = Recorder::default();
    let mut rng = rng_for(params, 8);

    // perturbations of the flat k = 3 path set by at most 1/24
    let k = 3i64;
    let flat = construct_path_even(k as u32).and_then(|(ps, _)| Ok(ps.x_projection()?));
    match flat {
        Ok(flat) => {
            let h = enumerate_optima(&flat, StructureKind::Path, &Rat::zero(), &brute());
            match h {
                Ok(h) if h.complete && h.unresolved.is_empty() => {
                    let family: BTreeSet<Structure> = h.structures.into_iter().collect();
                    let radius2 = Rat::frac(1, 64 * k * k);
                    let step = 34i64;
                    for t in 0..params.perturbations {
                        r.instances += 1;
                        let pts: Vec<Point> = flat
                            .points()
                            .iter()
                            .map(|p| {
                                let dx = Rat::frac(rng.gen_range(-1000..=1000), 1000 * step);
                                let dy = Rat::frac(rng.gen_range(-1000..=1000), 1000 * step);
                                Point::new(p.label.clone(), &p.x + &dx, &p.y + &dy)
                            })
                            .collect();
                        let moved = flat
                            .points()
                            .iter()
                            .zip(&pts)
                            .all(|(a, b)| (&a.x - &b.x).square() + (&a.y - &b.y).square() <= radius2);
                        r.expect(moved, || format!("perturbation {t} moves a point too far"));
                        let Ok(ps) = PointSet::new(pts) else {
                            r.expect(false, || format!("perturbation {t}: coincident points"));
                            continue;
                        };
                        match max_structure(&ps, StructureKind::Path, &brute()) {
                            Ok(res) => {
                                let optima = match &res.unique {
                                    Uniqueness::Proven => vec![res.best.clone()],
                                    Uniqueness::Refuted(all) => all.clone(),
                                    Uniqueness::Unresolved => {
                                        r.expect(false, || format!("perturbation {t}: unresolved"));
                                        continue;
                                    }
                                };
                                r.expect(optima.iter().all(|s| family.contains(s)), || {
                                    format!(
                                        "perturbation {t}: optimum {:?} is not a flat optimum",
                                        ps.labels_of(&res.best)
                                    )
                                });
                            }
                            Err(e) => r.expect(false, || format!("perturbation {t}: {e}")),
                        }
                    }
                    r.note(format!("{} flat optimal paths", family.len()));
                }
                other => r.expect(false, || format!("flat optima not certified: {other:?}")),
            }
        }
        Err(e) => r.expect(false, || format!("flat path set: {e}")),
    }

    // every optimal cycle on the flat n = 6 cycle set beats every other by 1
    match construct_cycle_even(6) {
        Ok((ps, _)) => {
            r.instances += 1;
            let ls = LineSet::new(ps.points().iter().map(|p| p.x.clone()).collect()).expect("distinct x");
            let all = oracle::all_cycles(ls.len());
            let (best, opt) = optima_1d(&ls, &all);
            let runner_up =
                all.iter().filter(|s| !opt.contains(s)).map(|s| ls.length(s)).max().expect("non-optimal cycles");
            let gap = &best - &runner_up;
            r.expect(gap >= Rat::one(), || format!("cycle gap {gap} below 1"));
            let chars: BTreeSet<Structure> =
                all.iter().filter(|s| is_longest_cycle_1d(s, &ls).unwrap_or(false)).cloned().collect();
            r.expect(chars == opt, || "flat optimal cycles differ from the characterization".into());
            r.note(format!("cycle gap ~{:.6}", gap.to_f64()));
        }
        Err(e) => r.expect(false, || format!("cycle set: {e}")),
    }
    r.finish("8 perturbation stability")
}

fn random_point_set(rng: &mut ChaCha8Rng, n: usize, prefix: &str) -> PointSet {
    loop {
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                Point::new(
                    format!("{prefix}{i}"),
                    Rat::frac(rng.gen_range(0..=1000), 100),
                    Rat::frac(rng.gen_range(0..=1000), 100),
                )
            })
            .collect();
        if let Ok(ps) = PointSet::new(pts) {
            return ps;
        }
    }
}

/// For two polygon edges that share no vertex, some endpoint pair is
/// farther apart than the shorter edge. Returns the violating edge pairs.
pub fn far_endpoint_violations(polygon: &Structure, ps: &PointSet) -> Vec<((usize, usize), (usize, usize))> {
    let edges = polygon.edges();
    let n = edges.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (e, f) = (edges[i], edges[j]);
            let shorter = ps.squared_distance(e.0, e.1).min(ps.squared_distance(f.0, f.1));
            let far = [(e.0, f.0), (e.0, f.1), (e.1, f.0), (e.1, f.1)]
                .iter()
                .any(|&(a, b)| ps.squared_distance(a, b) > shorter);
            if !far {
                out.push((e, f));
            }
        }
    }
    out
}

pub fn criterion_9(params: &Params) -> Check {
    let mut r = Recorder::default();
    let mut rng = rng_for(params, 9);
    for t in 0..params.cycle_sets {
        r.instances += 1;
        let ps = random_point_set(&mut rng, 8, "r");
        match max_structure(&ps, StructureKind::Cycle, &brute()) {
            Ok(res) => {
                let optima = match &res.unique {
                    Uniqueness::Proven => vec![res.best.clone()],
                    Uniqueness::Refuted(all) => all.clone(),
                    Uniqueness::Unresolved => {
                        r.expect(false, || format!("set {t}: unresolved"));
                        continue;
                    }
                };
                for s in optima {
                    for dir in [s.clone(), s.reversed()] {
                        let pairs = find_flippable_pairs(&dir, &ps).map(|p| p.len());
                        r.expect(pairs == Ok(0), || format!("set {t}: optimum has flippable pairs {pairs:?}"));
                    }
                }
            }
            Err(e) => r.expect(false, || format!("set {t}: {e}")),
        }
    }

    for n in [4usize, 6] {
        r.instances += 1;
        match diametric_counterexample(n) {
            Ok((ps, (a, c))) => {
                let diam = ps.squared_distance(a, c);
                let unique_diam =
                    (0..n).all(|i| (i + 1..n).all(|j| (i, j) == (a, c) || ps.squared_distance(i, j) < diam));
                r.expect(unique_diam, || format!("n={n}: a c is not the unique diametric pair"));
                match max_structure(&ps, StructureKind::Cycle, &brute()) {
                    Ok(res) => {
                        r.expect(res.unique != Uniqueness::Unresolved, || format!("n={n}: unresolved"));
                        let optima = match res.unique {
                            Uniqueness::Refuted(all) => all,
                            _ => vec![res.best],
                        };
                        r.expect(optima.iter().all(|s| !s.contains_edge(a, c)), || format!("n={n}: optimum uses a c"));
                    }
                    Err(e) => r.expect(false, || format!("n={n}: {e}")),
                }
            }
            Err(e) => r.expect(false, || format!("n={n}: {e}")),
        }
    }

    let mut worst = Rat::zero();
    let mut diagnostics = 0usize;
    for t in 0..params.polygons {
        r.instances += 1;
        let n = 6 + (t % 9);
        let seed = params.seed.wrapping_mul(1_000_003).wrapping_add(t as u64);
        match random_simple_polygon(n, seed).map_err(|e| e.to_string()).and_then(|(ps, poly)| {
            let rank = min_edge_rank(&poly, &ps).map_err(|e| e.to_string())?;
            Ok((ps, poly, rank))
        }) {
            Ok((ps, poly, rank)) => {
                r.expect(rank.holds(), || {
                    format!("polygon seed {seed} n={n}: rank {} above {}", rank.rank, rank.bound)
                });
                worst = worst.max(Rat::frac(rank.rank as i64, 1) / &rank.bound);
                diagnostics += far_endpoint_violations(&poly, &ps).len();
            }
            Err(e) => r.expect(false, || format!("polygon seed {seed}: {e}")),
        }
    }
    r.note(format!("largest rank/bound ratio {:.4}", worst.to_f64()));
    r.note(format!("{diagnostics} edge pairs without a far endpoint pair (diagnostic only)"));
    r.finish("9 longest cycle structure")
}

pub fn criterion_10(params: &Params) -> Check {
    let mut r = Recorder::default();
    let mut rng = rng_for(params, 10);
    let kinds = [StructureKind::Path, StructureKind::Cycle, StructureKind::Matching];
    for t in 0..params.solver_instances {
        r.instances += 1;
        let kind = kinds[t % 3];
        let mut n = rng.gen_range(3..=10usize);
        if kind == StructureKind::Matching && n % 2 == 1 {
            n -= 1;
        }
        // a coarse grid makes ties and collinear triples common
        let den = if t % 2 == 0 { 1 } else { 16 };
        let ps = loop {
            let pts: Vec<Point> = (0..n)
                .map(|i| {
                    Point::new(
                        format!("q{i}"),
                        Rat::frac(rng.gen_range(0..=4 * den), den),
                        Rat::frac(rng.gen_range(0..=4 * den), den),
                    )
                })
                .collect();
            if let Ok(ps) = PointSet::new(pts) {
                break ps;
            }
        };
        let what = format!("instance {t} ({kind}, n={n})");
        let b = max_structure(&ps, kind, &brute());
        let d = max_structure(&ps, kind, &SolveOptions::default().with_method(Method::SubsetDp));
        match (b, d) {
            (Ok(b), Ok(d)) => {
                let exact = ExactLengths::new(&ps, PrecisionPolicy::default());
                let ord = exact.compare(&b.best, &d.best);
                r.expect(ord == RadicalOrdering::Equal, || format!("{what}: optimal lengths compare {ord:?}"));
                r.expect(b.unique == d.unique, || format!("{what}: verdicts {:?} vs {:?}", b.unique, d.unique));
                if b.unique.is_proven() {
                    r.expect(b.best == d.best, || format!("{what}: different unique optima"));
                }
            }
            (b, d) => r.expect(false, || format!("{what}: {:?} / {:?}", b.err(), d.err())),
        }
    }

    let n = params.dp_n;
    let ps = random_point_set(&mut rng, n, "d");
    for kind in [StructureKind::Path, StructureKind::Cycle] {
        r.instances += 1;
        let start = Instant::now();
        match max_structure(&ps, kind, &SolveOptions::default().with_method(Method::SubsetDp)) {
            Ok(res) => {
                let elapsed = start.elapsed();
                r.expect(elapsed <= params.dp_budget, || format!("n={n} {kind} subset DP took {elapsed:?}"));
                r.expect(res.unique != Uniqueness::Unresolved, || format!("n={n} {kind}: unresolved"));
                // rough footprint: one f64 per table entry
                let bytes = res.stats.peak_table as u64 * 8;
                r.expect(bytes <= 8 << 30, || format!("n={n} {kind}: table of {bytes} bytes"));
                r.note(format!(
                    "n={n} {kind} by subset DP in {:.2}s, {} table entries",
                    elapsed.as_secs_f64(),
                    res.stats.peak_table
                ));
            }
            Err(e) => r.expect(false, || format!("n={n} {kind}: {e}")),
        }
    }
    r.finish("10 solver cross-validation")
}

/// Small sets handled outside the lifted constructions.
pub fn small_sets(_: &Params) -> Check {
    let mut r = Recorder::default();
    for (kind, n) in [
        (StructureKind::Path, 2),
        (StructureKind::Path, 3),
        (StructureKind::Path, 4),
        (StructureKind::Cycle, 3),
        (StructureKind::Cycle, 4),
        (StructureKind::Matching, 2),
    ] {
        r.instances += 1;
        let what = format!("{kind} n={n}");
        let built = if kind == StructureKind::Matching { construct_matching(1) } else { construct_small(kind, n) };
        match built {
            Ok((ps, cert)) => {
                r.expect(is_noncrossing(&cert.claimed_optimum, &ps), || format!("{what}: claimed optimum crosses"));
                match enumerate_optima(&ps, kind, &Rat::zero(), &brute()) {
                    Ok(opt) => r.expect(opt.structures.contains(&cert.claimed_optimum.canonical()), || {
                        format!("{what}: claimed structure is not optimal")
                    }),
                    Err(e) => r.expect(false, || format!("{what}: {e}")),
                }
            }
            Err(e) => r.expect(false, || format!("{what}: {e}")),
        }
    }
    r.finish("small sets")
}

pub type CheckFn = fn(&Params) -> Check;

pub const CRITERIA: [CheckFn; 10] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
];

/// The checks making up a named suite, or `None` for an unknown name.
pub fn suite(name: &str) -> Option<Vec<CheckFn>> {
    let line1d: Vec<CheckFn> = vec![criterion_6, criterion_7, criterion_8];
    let constructions: Vec<CheckFn> = vec![criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, small_sets];
    let properties: Vec<CheckFn> = vec![criterion_9, criterion_10];
    match name {
        "line1d" => Some(line1d),
        "constructions" => Some(constructions),
        "properties" => Some(properties),
        "acceptance" => Some(CRITERIA.to_vec()),
        "all" => Some(constructions.into_iter().chain(line1d).chain(properties).collect()),
        _ => None,
    }
}

/// Runs the checks on worker threads; results keep the input order.
pub fn run(checks: &[CheckFn], params: &Params) -> Vec<Check> {
    std::thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|f| s.spawn(move || f(params))).collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(i, h)| {
                h.join().unwrap_or_else(|_| Check {
                    name: format!("check {}", i + 1),
                    passed: false,
                    instances: 0,
                    detail: "panicked".into(),
                    failures: vec!["panicked".into()],
                })
            })
            .collect()
    })
}
