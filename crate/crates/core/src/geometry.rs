//! Exact planar predicates and the spanning structures they are applied to.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::exactnum::{sqrt_interval, Interval, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeometryError {
    DuplicateLabel(String),
    CoincidentPoints(String, String),
    UnknownLabel(String),
    /// The structure does not span the point set or is malformed.
    InvalidStructure(String),
    WrongKind {
        expected: StructureKind,
        found: StructureKind,
    },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DuplicateLabel(l) => write!(f, "duplicate label {l}"),
            GeometryError::CoincidentPoints(a, b) => write!(f, "points {a} and {b} coincide"),
            GeometryError::UnknownLabel(l) => write!(f, "unknown label {l}"),
            GeometryError::InvalidStructure(m) => write!(f, "invalid structure: {m}"),
            GeometryError::WrongKind { expected, found } => {
                write!(f, "expected a {expected}, found a {found}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub label: String,
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(label: impl Into<String>, x: Rat, y: Rat) -> Self {
        Point { label: label.into(), x, y }
    }
}

/// How a point set was produced, with the parameters needed to rebuild it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    pub construction: String,
    pub k: Option<u32>,
    pub epsilon: Option<Rat>,
    pub deltas: Vec<Rat>,
}

/// Labeled points in distinct positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
    pub metadata: Option<Metadata>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        for (i, p) in points.iter().enumerate() {
            for q in &points[..i] {
                if q.label == p.label {
                    return Err(GeometryError::DuplicateLabel(p.label.clone()));
                }
                if q.x == p.x && q.y == p.y {
                    return Err(GeometryError::CoincidentPoints(q.label.clone(), p.label.clone()));
                }
            }
        }
        Ok(PointSet { points, metadata: None })
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    /// Points `(x_i, 0)` labeled `x<i>` for quick 1-D experiments.
    pub fn collinear(xs: &[Rat]) -> Result<Self, GeometryError> {
        let pts = xs
            .iter()
            .enumerate()
            .map(|(i, x)| Point::new(alloc::format!("x{}", i + 1), x.clone(), Rat::zero()))
            .collect();
        PointSet::new(pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p.label == label)
    }

    pub fn require(&self, label: &str) -> Result<usize, GeometryError> {
        self.index_of(label).ok_or_else(|| GeometryError::UnknownLabel(label.to_string()))
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i].label
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> Rat {
        squared_distance(&self.points[i], &self.points[j])
    }

    /// The same labels with every y set to zero (the x-projection). Fails
    /// when two points share an x-coordinate.
    pub fn x_projection(&self) -> Result<PointSet, GeometryError> {
        PointSet::new(self.points.iter().map(|p| Point::new(p.label.clone(), p.x.clone(), Rat::zero())).collect())
    }

    /// Copy without the point at `index`.
    pub fn without(&self, index: usize) -> PointSet {
        let mut pts = self.points.clone();
        pts.remove(index);
        PointSet { points: pts, metadata: None }
    }

    /// Path over labels, in the given order.
    pub fn path(&self, labels: &[&str]) -> Result<Structure, GeometryError> {
        let order = labels.iter().map(|l| self.require(l)).collect::<Result<Vec<_>, _>>()?;
        let s = Structure::Path(order);
        s.validate(self.len())?;
        Ok(s)
    }

    pub fn cycle(&self, labels: &[&str]) -> Result<Structure, GeometryError> {
        let order = labels.iter().map(|l| self.require(l)).collect::<Result<Vec<_>, _>>()?;
        let s = Structure::Cycle(order);
        s.validate(self.len())?;
        Ok(s)
    }

    pub fn matching(&self, pairs: &[(&str, &str)]) -> Result<Structure, GeometryError> {
        let pairs = pairs
            .iter()
            .map(|(a, b)| Ok((self.require(a)?, self.require(b)?)))
            .collect::<Result<Vec<_>, GeometryError>>()?;
        let s = Structure::Matching(pairs);
        s.validate(self.len())?;
        Ok(s)
    }

    /// Label sequence of a path or cycle, pairs flattened for matchings.
    pub fn labels_of(&self, s: &Structure) -> Vec<String> {
        match s {
            Structure::Path(o) | Structure::Cycle(o) => o.iter().map(|&i| self.label(i).to_string()).collect(),
            Structure::Matching(m) => {
                m.iter().flat_map(|&(a, b)| [self.label(a).to_string(), self.label(b).to_string()]).collect()
            }
        }
    }
}

pub fn squared_distance(a: &Point, b: &Point) -> Rat {
    let dx = &a.x - &b.x;
    let dy = &a.y - &b.y;
    dx.square() + dy.square()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StructureKind {
    Path,
    Cycle,
    Matching,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureKind::Path => "path",
            StructureKind::Cycle => "cycle",
            StructureKind::Matching => "matching",
        })
    }
}

impl core::str::FromStr for StructureKind {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(StructureKind::Path),
            "cycle" => Ok(StructureKind::Cycle),
            "matching" => Ok(StructureKind::Matching),
            other => Err(GeometryError::InvalidStructure(alloc::format!("unknown kind {other}"))),
        }
    }
}

/// A spanning path, spanning cycle or perfect matching, by point index.
///
/// Canonical form quotients out reversal, rotation and pair order: paths
/// start at the smaller-index endpoint, cycles start at the smallest index
/// and continue towards the smaller neighbour, matchings are sorted pairs
/// `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    Path(Vec<usize>),
    Cycle(Vec<usize>),
    Matching(Vec<(usize, usize)>),
}

pub type Edge = (usize, usize);

impl Structure {
    pub fn kind(&self) -> StructureKind {
        match self {
            Structure::Path(_) => StructureKind::Path,
            Structure::Cycle(_) => StructureKind::Cycle,
            Structure::Matching(_) => StructureKind::Matching,
        }
    }

    /// Edges in traversal order (directed as traversed).
    pub fn edges(&self) -> Vec<Edge> {
        match self {
            Structure::Path(o) => o.windows(2).map(|w| (w[0], w[1])).collect(),
            Structure::Cycle(o) => (0..o.len()).map(|i| (o[i], o[(i + 1) % o.len()])).collect(),
            Structure::Matching(m) => m.clone(),
        }
    }

    pub fn order(&self) -> Option<&[usize]> {
        match self {
            Structure::Path(o) | Structure::Cycle(o) => Some(o),
            Structure::Matching(_) => None,
        }
    }

    /// Checks that the structure spans `0..n` exactly once.
    pub fn validate(&self, n: usize) -> Result<(), GeometryError> {
        let mut seen = alloc::vec![false; n];
        let mut mark = |i: usize| -> Result<(), GeometryError> {
            if i >= n {
                return Err(GeometryError::InvalidStructure(alloc::format!("index {i} out of range")));
            }
            if core::mem::replace(&mut seen[i], true) {
                return Err(GeometryError::InvalidStructure(alloc::format!("vertex {i} repeated")));
            }
            Ok(())
        };
        match self {
            Structure::Path(o) => o.iter().try_for_each(|&i| mark(i))?,
            Structure::Cycle(o) => {
                if o.len() < 3 {
                    return Err(GeometryError::InvalidStructure("cycle needs at least 3 vertices".into()));
                }
                o.iter().try_for_each(|&i| mark(i))?
            }
            Structure::Matching(m) => m.iter().try_for_each(|&(a, b)| {
                mark(a)?;
                mark(b)
            })?,
        }
        if seen.iter().any(|s| !s) {
            return Err(GeometryError::InvalidStructure("structure does not span every point".into()));
        }
        Ok(())
    }

    pub fn canonical(&self) -> Structure {
        match self {
            Structure::Path(o) => {
                let mut o = o.clone();
                if o.len() > 1 && o[0] > o[o.len() - 1] {
                    o.reverse();
                }
                Structure::Path(o)
            }
            Structure::Cycle(o) => Structure::Cycle(canonical_cycle(o)),
            Structure::Matching(m) => {
                let mut m: Vec<Edge> = m.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                m.sort_unstable();
                Structure::Matching(m)
            }
        }
    }

    /// Traversal in the opposite direction (matchings are unchanged).
    pub fn reversed(&self) -> Structure {
        match self {
            Structure::Path(o) => Structure::Path(o.iter().rev().copied().collect()),
            Structure::Cycle(o) => Structure::Cycle(o.iter().rev().copied().collect()),
            Structure::Matching(m) => Structure::Matching(m.clone()),
        }
    }

    /// Undirected edges as sorted `(lo, hi)` pairs, sorted.
    pub fn edge_set(&self) -> Vec<Edge> {
        let mut e: Vec<Edge> = self.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        e.sort_unstable();
        e
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.edges().iter().any(|&(u, v)| (u == a && v == b) || (u == b && v == a))
    }
}

fn canonical_cycle(o: &[usize]) -> Vec<usize> {
    let n = o.len();
    if n == 0 {
        return Vec::new();
    }
    let start = (0..n).min_by_key(|&i| o[i]).unwrap();
    let fwd: Vec<usize> = (0..n).map(|i| o[(start + i) % n]).collect();
    if n > 2 && fwd[n - 1] < fwd[1] {
        let mut rev = Vec::with_capacity(n);
        rev.push(fwd[0]);
        rev.extend(fwd[1..].iter().rev());
        rev
    } else {
        fwd
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
    Collinear,
}

impl Orientation {
    pub fn reverse(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::Counterclockwise,
            Orientation::Counterclockwise => Orientation::Clockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// Sign of `(b - a) x (c - a)`.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> Orientation {
    let cross = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    if cross.is_positive() {
        Orientation::Counterclockwise
    } else if cross.is_negative() {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Do the open segments `a1a2` and `b1b2` intersect? Collinear overlap of
/// the interiors counts; touching at an endpoint does not.
pub fn segments_cross(a1: &Point, a2: &Point, b1: &Point, b2: &Point) -> bool {
    let o1 = orientation(a1, a2, b1);
    let o2 = orientation(a1, a2, b2);
    let o3 = orientation(b1, b2, a1);
    let o4 = orientation(b1, b2, a2);
    use Orientation::Collinear;
    if o1 == Collinear && o2 == Collinear {
        // all four on one line: compare projections on the dominant axis
        let use_x = a1.x != a2.x;
        let key = |p: &Point| if use_x { p.x.clone() } else { p.y.clone() };
        let (alo, ahi) = sorted_pair(key(a1), key(a2));
        let (blo, bhi) = sorted_pair(key(b1), key(b2));
        let lo = alo.max(blo);
        let hi = ahi.min(bhi);
        return lo < hi;
    }
    if o1 == Collinear || o2 == Collinear || o3 == Collinear || o4 == Collinear {
        // a vertex touches the other segment; the open segments share no point
        return false;
    }
    o1 != o2 && o3 != o4
}

fn sorted_pair(a: Rat, b: Rat) -> (Rat, Rat) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// All unordered pairs of distinct edges whose interiors cross.
pub fn crossing_pairs(s: &Structure, ps: &PointSet) -> Vec<(Edge, Edge)> {
    let edges = s.edges();
    let mut out = Vec::new();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if segments_cross(ps.point(a), ps.point(b), ps.point(c), ps.point(d)) {
                out.push((edges[i], edges[j]));
            }
        }
    }
    out
}

pub fn is_noncrossing(s: &Structure, ps: &PointSet) -> bool {
    crossing_pairs(s, ps).is_empty()
}

/// Strictly increasing or strictly decreasing y along the path order.
pub fn is_y_monotone(path: &Structure, ps: &PointSet) -> Result<bool, GeometryError> {
    let Structure::Path(o) = path else {
        return Err(GeometryError::WrongKind { expected: StructureKind::Path, found: path.kind() });
    };
    if o.len() < 2 {
        return Ok(true);
    }
    let ys: Vec<&Rat> = o.iter().map(|&i| &ps.point(i).y).collect();
    let inc = ys.windows(2).all(|w| w[0] < w[1]);
    let dec = ys.windows(2).all(|w| w[0] > w[1]);
    Ok(inc || dec)
}

/// Certified enclosure of the total Euclidean length, width at most
/// `2^-precision_bits`.
pub fn structure_length(s: &Structure, ps: &PointSet, precision_bits: u32) -> Interval {
    let edges = s.edges();
    let extra = usize::BITS - edges.len().leading_zeros();
    let bits = precision_bits + extra;
    let mut total = Interval::exact(Rat::zero());
    for (a, b) in edges {
        let e = sqrt_interval(&ps.squared_distance(a, b), bits).expect("squared distances are nonnegative");
        total = &total + &e;
    }
    total.precision_bits = precision_bits;
    total
}

/// Directed edges `a -> b` and `c -> d` are both edges of the convex hull of
/// their four endpoints (strict convex position) and run the same way
/// around it.
pub fn convex_position_same_orientation(e1: (&Point, &Point), e2: (&Point, &Point)) -> bool {
    let (a, b) = e1;
    let (c, d) = e2;
    // Same orientation along the hull means the hull visits a, b, c, d in
    // this cyclic order; strict convexity means every turn has one sign.
    let turns = [orientation(a, b, c), orientation(b, c, d), orientation(c, d, a), orientation(d, a, b)];
    turns[0] != Orientation::Collinear && turns.iter().all(|t| *t == turns[0])
}
