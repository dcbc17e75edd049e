//! Structural properties of longest cycles: flippable edge pairs, a set
//! whose longest cycle avoids its diametric pair, the rank of a simple
//! polygon's shortest edge among all pairwise distances, and a generator of
//! random simple polygons.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{sqrt_interval, Interval, Rat};
use crate::geometry::{
    convex_position_same_orientation, crossing_pairs, is_noncrossing, orientation, Edge, GeometryError, Orientation,
    Point, PointSet, Structure,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructPropsError {
    NotACycle,
    TooSmall { n: usize, min: usize },
    NotAFlipPair(Edge, Edge),
    Crossing,
    Degenerate { attempts: usize },
    Geometry(GeometryError),
}

impl fmt::Display for StructPropsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructPropsError::NotACycle => f.write_str("structure is not a cycle"),
            StructPropsError::TooSmall { n, min } => write!(f, "{n} points, need at least {min}"),
            StructPropsError::NotAFlipPair(a, b) => write!(f, "edges {a:?} and {b:?} are not a flippable pair"),
            StructPropsError::Crossing => f.write_str("polygon is not simple"),
            StructPropsError::Degenerate { attempts } => write!(f, "no usable sample after {attempts} attempts"),
            StructPropsError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeometryError> for StructPropsError {
    fn from(e: GeometryError) -> Self {
        StructPropsError::Geometry(e)
    }
}

/// Two non-adjacent directed edges of a cycle, `e1 = a -> b` and
/// `e2 = c -> d`, whose endpoints are in strict convex position with the
/// hull visiting `a, b, c, d` in order. Swapping them for the diagonals
/// `a c` and `b d` keeps a single cycle and adds `gain` to its length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipPair {
    pub e1: Edge,
    pub e2: Edge,
    pub gain: Interval,
}

const GAIN_BITS: u32 = 128;

fn flip_gain(ps: &PointSet, (a, b): Edge, (c, d): Edge) -> Interval {
    let mut bits = GAIN_BITS;
    loop {
        let r = |i: usize, j: usize| sqrt_interval(&ps.squared_distance(i, j), bits).expect("nonnegative");
        let diag = &r(a, c) + &r(b, d);
        let sides = &r(a, b) + &r(c, d);
        let gain = Interval::new(&diag.lo - &sides.hi, &diag.hi - &sides.lo, bits);
        // diagonals of a strictly convex quadrilateral beat a pair of
        // opposite sides, so refining always ends with lo > 0
        if gain.lo.is_positive() || bits >= 1 << 16 {
            return gain;
        }
        bits *= 2;
    }
}

fn cycle_order(cycle: &Structure) -> Result<&[usize], StructPropsError> {
    match cycle {
        Structure::Cycle(o) => Ok(o),
        _ => Err(StructPropsError::NotACycle),
    }
}

/// All flippable pairs of the cycle in the direction it is listed.
pub fn find_flippable_pairs(cycle: &Structure, ps: &PointSet) -> Result<Vec<FlipPair>, StructPropsError> {
    let order = cycle_order(cycle)?;
    let n = order.len();
    if n < 4 {
        return Err(StructPropsError::TooSmall { n, min: 4 });
    }
    let edges: Vec<Edge> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (e1, e2) = (edges[i], edges[j]);
            let p = |v: usize| ps.point(v);
            if convex_position_same_orientation((p(e1.0), p(e1.1)), (p(e2.0), p(e2.1))) {
                out.push(FlipPair { e1, e2, gain: flip_gain(ps, e1, e2) });
            }
        }
    }
    Ok(out)
}

/// Replace the pair by the hull diagonals, reversing the stretch of the
/// cycle between them.
pub fn flip(cycle: &Structure, pair: &FlipPair, ps: &PointSet) -> Result<Structure, StructPropsError> {
    let order = cycle_order(cycle)?;
    let n = order.len();
    let bad = || StructPropsError::NotAFlipPair(pair.e1, pair.e2);
    let pos = |e: Edge| (0..n).find(|&i| order[i] == e.0 && order[(i + 1) % n] == e.1);
    let i = pos(pair.e1).ok_or_else(bad)?;
    let j = pos(pair.e2).ok_or_else(bad)?;
    let adjacent = (i + 1) % n == j || (j + 1) % n == i || i == j;
    let p = |v: usize| ps.point(v);
    if adjacent || !convex_position_same_orientation((p(pair.e1.0), p(pair.e1.1)), (p(pair.e2.0), p(pair.e2.1))) {
        return Err(bad());
    }
    // rotate so e1 ends the prefix: order[i] comes first
    let rotated: Vec<usize> = (0..n).map(|t| order[(i + t) % n]).collect();
    let jj = (j + n - i) % n;
    let mut out = Vec::with_capacity(n);
    out.push(rotated[0]);
    out.extend(rotated[1..=jj].iter().rev());
    out.extend(&rotated[jj + 1..]);
    let s = Structure::Cycle(out);
    s.validate(n)?;
    Ok(s)
}

/// `a = (1, 0)`, `c = (0, 1)` and `n - 2` points on the segment from
/// `(1/100, 0)` to `(0, 1/100)`, close to the right-angle corner `b = (0, 0)`.
/// Returns the set and the diametric pair `(a, c)`.
pub fn diametric_counterexample(n: usize) -> Result<(PointSet, Edge), StructPropsError> {
    if n < 4 {
        return Err(StructPropsError::TooSmall { n, min: 4 });
    }
    let m = (n - 2) as i64;
    let mut pts = Vec::with_capacity(n);
    pts.push(Point::new("a", Rat::one(), Rat::zero()));
    pts.push(Point::new("c", Rat::zero(), Rat::one()));
    for j in 0..m {
        let x = Rat::frac(m - 1 - j, 100 * (m - 1));
        let y = Rat::frac(j, 100 * (m - 1));
        pts.push(Point::new(format!("b{}", j + 1), x, y));
    }
    Ok((PointSet::new(pts)?, (0, 1)))
}

/// Rank of a simple polygon's shortest edge among all pairwise distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRank {
    /// 1-based position in ascending order; tied distances share the
    /// smallest position.
    pub rank: usize,
    pub bound: Rat,
    pub shortest: Edge,
}

impl EdgeRank {
    pub fn holds(&self) -> bool {
        Rat::from_int(self.rank as i64) <= self.bound
    }
}

/// `3n^2/8 + n/8`.
pub fn rank_bound(n: usize) -> Rat {
    let n = n as i64;
    Rat::frac(3 * n * n + n, 8)
}

/// Squared distances are rational, so the ranking is exact.
pub fn min_edge_rank(polygon: &Structure, ps: &PointSet) -> Result<EdgeRank, StructPropsError> {
    let order = cycle_order(polygon)?;
    let n = order.len();
    if n < 4 {
        return Err(StructPropsError::TooSmall { n, min: 4 });
    }
    polygon.validate(ps.len())?;
    if !is_noncrossing(polygon, ps) {
        return Err(StructPropsError::Crossing);
    }
    let shortest = polygon
        .edges()
        .into_iter()
        .min_by(|&(a, b), &(c, d)| ps.squared_distance(a, b).cmp(&ps.squared_distance(c, d)))
        .expect("cycle has edges");
    let len = ps.squared_distance(shortest.0, shortest.1);
    let mut below = 0;
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            if ps.squared_distance(i, j) < len {
                below += 1;
            }
        }
    }
    Ok(EdgeRank { rank: below + 1, bound: rank_bound(n), shortest })
}

const MAX_ATTEMPTS: usize = 100;
/// Coordinates are multiples of 1/DENOM in [-1, 1].
const DENOM: i64 = 1000;

/// Compare directions `u` and `v` by angle in `[0, 2 pi)`.
fn angle_cmp(u: &(Rat, Rat), v: &(Rat, Rat)) -> Ordering {
    let half = |w: &(Rat, Rat)| !(w.1.is_positive() || (w.1.is_zero() && w.0.is_positive()));
    match (half(u), half(v)) {
        (false, true) => Ordering::Less,
        (true, false) => Ordering::Greater,
        _ => {
            let cross = &u.0 * &v.1 - &u.1 * &v.0;
            Rat::zero().cmp(&cross)
        }
    }
}

/// `n` random points sorted by angle around their centroid. Samples with
/// repeated points, a point at the centroid, two points at the same angle
/// or three consecutive collinear vertices are redrawn.
pub fn random_simple_polygon(n: usize, seed: u64) -> Result<(PointSet, Structure), StructPropsError> {
    if n < 3 {
        return Err(StructPropsError::TooSmall { n, min: 3 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let mut raw: Vec<(Rat, Rat)> = (0..n)
            .map(|_| (Rat::frac(rng.gen_range(-DENOM..=DENOM), DENOM), Rat::frac(rng.gen_range(-DENOM..=DENOM), DENOM)))
            .collect();
        let inv = Rat::frac(1, n as i64);
        let cx = raw.iter().map(|p| p.0.clone()).sum::<Rat>() * &inv;
        let cy = raw.iter().map(|p| p.1.clone()).sum::<Rat>() * &inv;
        let rel = |p: &(Rat, Rat)| (&p.0 - &cx, &p.1 - &cy);
        if raw.iter().any(|p| p.0 == cx && p.1 == cy) {
            continue;
        }
        raw.sort_by(|p, q| angle_cmp(&rel(p), &rel(q)));
        for i in 0..n {
            let (p, q) = (&raw[i], &raw[(i + 1) % n]);
            if angle_cmp(&rel(p), &rel(q)) == Ordering::Equal {
                continue 'attempt;
            }
        }
        let pts: Vec<Point> =
            raw.into_iter().enumerate().map(|(i, (x, y))| Point::new(format!("v{}", i + 1), x, y)).collect();
        for i in 0..n {
            let t = (&pts[i], &pts[(i + 1) % n], &pts[(i + 2) % n]);
            if orientation(t.0, t.1, t.2) == Orientation::Collinear {
                continue 'attempt;
            }
        }
        let Ok(ps) = PointSet::new(pts) else { continue };
        let polygon = Structure::Cycle((0..n).collect());
        if !crossing_pairs(&polygon, &ps).is_empty() {
            continue;
        }
        return Ok((ps, polygon));
    }
    Err(StructPropsError::Degenerate { attempts: MAX_ATTEMPTS })
}

/// A simple polygon with no flippable pair in either direction: a spiral
/// band whose outer arm winds about once around the origin and whose inner
/// arm runs back along it.
pub fn spiral_fixture() -> (PointSet, Structure) {
    let coords = [(3, 2), (-17, 28), (-27, -36), (67, -5), (53, -3), (-7, -29), (-15, 11), (9, -4)];
    let pts: Vec<Point> = coords
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Point::new(format!("s{}", i + 1), Rat::from_int(x), Rat::from_int(y)))
        .collect();
    let n = pts.len();
    (PointSet::new(pts).expect("distinct fixture points"), Structure::Cycle((0..n).collect()))
}
