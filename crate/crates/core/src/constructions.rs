//! Point sets whose longest spanning path, cycle or perfect matching is
//! unique and noncrossing.
//!
//! Every construction starts from points on the x-axis whose 1-D optimum is
//! known and then lifts them by tiny heights, one step at a time. A step
//! fixes an anchor and picks its intended neighbour among the plausible
//! ones; the neighbour's height is half of a threshold below which no other
//! choice can pay off. Each threshold is a certified rational lower bound,
//! rounded down to a short dyadic so coordinates stay compact.
//!
//! Heights shrink roughly quadratically from step to step, so they leave the
//! `f64` range after a handful of steps. All arithmetic here is exact.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exactnum::{compare_radical_sums, sqrt_interval, PrecisionPolicy, RadicalOrdering, Rat};
use crate::geometry::{orientation, GeometryError, Metadata, Orientation, Point, PointSet, Structure, StructureKind};
use crate::line1d::LineSet;
use crate::maxsolvers::{max_structure, SolveOptions, Uniqueness};

/// Significant bits kept when a threshold is rounded down.
const DYADIC_BITS: u32 = 32;

/// How often the gap below a segment may be halved in the even cycle.
const MAX_EXCHANGE_HALVINGS: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    InvalidParameter(String),
    /// A threshold came out nonpositive, so the chain is inconsistent.
    NonPositiveThreshold {
        step: String,
    },
    /// The exchange inequality for a stage of the even cycle failed.
    ExchangeFailed {
        stage: usize,
    },
    FixpointFailed {
        iterations: usize,
    },
    /// A certificate invariant does not hold for the built set.
    Invariant(String),
    Geometry(GeometryError),
}

impl fmt::Display for ConstructionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionError::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            ConstructionError::NonPositiveThreshold { step } => write!(f, "nonpositive threshold at {step}"),
            ConstructionError::ExchangeFailed { stage } => write!(f, "exchange inequality fails at stage {stage}"),
            ConstructionError::FixpointFailed { iterations } => {
                write!(f, "offset did not settle after {iterations} iterations")
            }
            ConstructionError::Invariant(m) => write!(f, "certificate invariant violated: {m}"),
            ConstructionError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeometryError> for ConstructionError {
    fn from(e: GeometryError) -> Self {
        ConstructionError::Geometry(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    PathEven,
    PathOdd,
    CycleEven4k,
    CycleEven4kMinus2,
    CycleOdd,
    Matching,
    GeneralPath,
    Small,
}

impl CertificateKind {
    pub fn name(&self) -> &'static str {
        match self {
            CertificateKind::PathEven => "path-even",
            CertificateKind::PathOdd => "path-odd",
            CertificateKind::CycleEven4k => "cycle-even-4k",
            CertificateKind::CycleEven4kMinus2 => "cycle-even-4k-2",
            CertificateKind::CycleOdd => "cycle-odd",
            CertificateKind::Matching => "matching",
            CertificateKind::GeneralPath => "general-path",
            CertificateKind::Small => "small",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            CertificateKind::PathEven,
            CertificateKind::PathOdd,
            CertificateKind::CycleEven4k,
            CertificateKind::CycleEven4kMinus2,
            CertificateKind::CycleOdd,
            CertificateKind::Matching,
            CertificateKind::GeneralPath,
            CertificateKind::Small,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }

    pub fn structure_kind(&self) -> Option<StructureKind> {
        match self {
            CertificateKind::PathEven | CertificateKind::PathOdd | CertificateKind::GeneralPath => {
                Some(StructureKind::Path)
            }
            CertificateKind::CycleEven4k | CertificateKind::CycleEven4kMinus2 | CertificateKind::CycleOdd => {
                Some(StructureKind::Cycle)
            }
            CertificateKind::Matching => Some(StructureKind::Matching),
            CertificateKind::Small => None,
        }
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One placement: `label` gets height `y`, justified by threshold `delta`.
///
/// `anchors`, `targets` and `rivals` name the points the threshold was
/// computed from, and `divisor` is the edge count it was split over, so the
/// bound can be recomputed from the finished point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub label: String,
    pub y: Rat,
    pub delta: Rat,
    pub provenance: String,
    pub anchors: Vec<String>,
    pub targets: Vec<String>,
    pub rivals: Vec<String>,
    pub divisor: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub k: u32,
    /// Horizontal offset of the primed or clustered points, when the
    /// construction has one.
    pub epsilon: Option<Rat>,
    pub steps: Vec<Step>,
    pub claimed_optimum: Structure,
    pub note: Option<String>,
}

/// Lower and upper bounds on `|ya|^2 / (l + dx)` where `l = sqrt(dx^2 + ya^2)`,
/// the excess of the edge from a point at height `ya` to a point at height
/// zero over its horizontal extent `dx`.
fn contribution(ya: &Rat, dx: &Rat, bits: u32) -> (Rat, Rat) {
    let h2 = ya.square();
    if h2.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let l = sqrt_interval(&(dx.square() + &h2), bits).expect("sum of squares");
    let lo = &h2 / &(&l.hi + dx);
    let hi = &h2 / &(&l.lo + dx);
    (lo, hi)
}

/// Certified lower bound on
/// `min over anchors (min over targets c - max over rivals c)`, where `c` is
/// the contribution above. With no rivals the second term is zero.
/// Precision doubles until the bound is within a factor two of the upper
/// estimate.
fn stage_gap(anchors: &[(Rat, Rat)], targets: &[Rat], rivals: &[Rat]) -> Option<Rat> {
    let mut bits = 64u32;
    loop {
        let mut gap_lo: Option<Rat> = None;
        let mut gap_hi: Option<Rat> = None;
        for (ax, ay) in anchors {
            let ya = ay.abs();
            let mut t_lo: Option<Rat> = None;
            let mut t_hi: Option<Rat> = None;
            for t in targets {
                let (lo, hi) = contribution(&ya, &(ax - t).abs(), bits);
                t_lo = Some(t_lo.map_or(lo.clone(), |v| v.min(lo)));
                t_hi = Some(t_hi.map_or(hi.clone(), |v| v.min(hi)));
            }
            let mut r_lo = Rat::zero();
            let mut r_hi = Rat::zero();
            for r in rivals {
                let (lo, hi) = contribution(&ya, &(ax - r).abs(), bits);
                r_lo = r_lo.max(lo);
                r_hi = r_hi.max(hi);
            }
            let lo = t_lo.expect("at least one target") - r_hi;
            let hi = t_hi.expect("at least one target") - r_lo;
            gap_lo = Some(gap_lo.map_or(lo.clone(), |v| v.min(lo)));
            gap_hi = Some(gap_hi.map_or(hi.clone(), |v| v.min(hi)));
        }
        let (lo, hi) = (gap_lo?, gap_hi?);
        if lo.is_positive() && &lo * &Rat::from_int(2) >= hi {
            return Some(lo);
        }
        if bits >= 1 << 17 {
            return if lo.is_positive() { Some(lo) } else { None };
        }
        bits *= 2;
    }
}

fn threshold(gap: Rat, divisor: u32) -> Rat {
    (gap / Rat::from_int(divisor as i64)).dyadic_floor(DYADIC_BITS)
}

/// Threshold for one path step: the anchor's intended neighbour is the
/// plausible candidate nearest in `x`, and the bound makes that edge's gain
/// exceed every alternative plus everything the other `n - 2` edges can add.
pub fn compute_delta_path(anchor: &Point, candidates: &[Point], n: usize) -> Result<Rat, ConstructionError> {
    if candidates.is_empty() {
        return Err(ConstructionError::InvalidParameter("no candidates".into()));
    }
    if n < 2 {
        return Err(ConstructionError::InvalidParameter(format!("path on {n} points")));
    }
    let nearest = nearest_index(&anchor.x, candidates.iter().map(|p| &p.x));
    let targets = [candidates[nearest].x.clone()];
    let rivals: Vec<Rat> =
        candidates.iter().enumerate().filter(|(i, _)| *i != nearest).map(|(_, p)| p.x.clone()).collect();
    let step = format!("anchor {}", anchor.label);
    let gap = stage_gap(&[(anchor.x.clone(), anchor.y.clone())], &targets, &rivals)
        .ok_or(ConstructionError::NonPositiveThreshold { step: step.clone() })?;
    let d = threshold(gap, (n - 1) as u32);
    if !d.is_positive() {
        return Err(ConstructionError::NonPositiveThreshold { step });
    }
    Ok(d)
}

fn nearest_index<'a>(x: &Rat, xs: impl Iterator<Item = &'a Rat>) -> usize {
    let mut best: Option<(usize, Rat)> = None;
    for (i, c) in xs.enumerate() {
        let d = (x - c).abs();
        if best.as_ref().is_none_or(|(_, b)| d < *b) {
            best = Some((i, d));
        }
    }
    best.expect("nonempty").0
}

/// Labels and coordinates under construction; heights are filled in as the
/// chain advances.
struct Draft {
    labels: Vec<String>,
    xs: Vec<Rat>,
    ys: Vec<Option<Rat>>,
    steps: Vec<Step>,
}

impl Draft {
    fn new() -> Self {
        Draft { labels: Vec::new(), xs: Vec::new(), ys: Vec::new(), steps: Vec::new() }
    }

    fn add(&mut self, label: impl Into<String>, x: Rat, y: Option<Rat>) -> usize {
        self.labels.push(label.into());
        self.xs.push(x);
        self.ys.push(y);
        self.labels.len() - 1
    }

    fn y(&self, i: usize) -> &Rat {
        self.ys[i].as_ref().expect("height assigned")
    }

    fn idx(&self, label: &str) -> usize {
        self.labels.iter().position(|l| l == label).unwrap_or_else(|| panic!("no point {label}"))
    }

    /// Threshold for a stage: every anchor must prefer some target over
    /// every rival.
    fn stage_delta(
        &self,
        anchors: &[usize],
        targets: &[usize],
        rivals: &[usize],
        divisor: u32,
        step: &str,
    ) -> Result<Rat, ConstructionError> {
        let a: Vec<(Rat, Rat)> = anchors.iter().map(|&i| (self.xs[i].clone(), self.y(i).clone())).collect();
        let t: Vec<Rat> = targets.iter().map(|&i| self.xs[i].clone()).collect();
        let r: Vec<Rat> = rivals.iter().map(|&i| self.xs[i].clone()).collect();
        let gap = stage_gap(&a, &t, &r).ok_or(ConstructionError::NonPositiveThreshold { step: step.into() })?;
        let d = threshold(gap, divisor);
        if !d.is_positive() {
            return Err(ConstructionError::NonPositiveThreshold { step: step.into() });
        }
        Ok(d)
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        target: usize,
        y: Rat,
        delta: &Rat,
        provenance: String,
        anchors: &[usize],
        targets: &[usize],
        rivals: &[usize],
        divisor: u32,
    ) {
        self.ys[target] = Some(y.clone());
        let names = |v: &[usize]| v.iter().map(|&i| self.labels[i].clone()).collect::<Vec<_>>();
        let step = Step {
            label: self.labels[target].clone(),
            y,
            delta: delta.clone(),
            provenance,
            anchors: names(anchors),
            targets: names(targets),
            rivals: names(rivals),
            divisor,
        };
        self.steps.push(step);
    }

    fn finish(self) -> Result<(PointSet, Vec<Step>), ConstructionError> {
        let pts = self
            .labels
            .into_iter()
            .zip(self.xs)
            .zip(self.ys)
            .map(|((l, x), y)| {
                let y = y.ok_or_else(|| ConstructionError::Invariant(format!("{l} has no height")))?;
                Ok(Point::new(l, x, y))
            })
            .collect::<Result<Vec<_>, ConstructionError>>()?;
        Ok((PointSet::new(pts)?, self.steps))
    }
}

/// Which median neighbour of a general path gets the top height.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopSide {
    Lower,
    Upper,
}

/// Greedy chain over an even 1-D set already placed in `draft` (indices
/// `sorted` in increasing `x`): the `top` median neighbour keeps its height,
/// the other median neighbour ends the path at height zero, and every step
/// moves to the nearest unused point across the median. Thresholds are
/// split over `divisor` edges and capped by `cap`.
fn greedy_chain(
    draft: &mut Draft,
    sorted: &[usize],
    top: TopSide,
    divisor: u32,
    cap: Option<&Rat>,
    tag: &str,
) -> Result<Vec<usize>, ConstructionError> {
    let n = sorted.len();
    let m = n / 2;
    let (top_i, bottom_i) = match top {
        TopSide::Lower => (sorted[m - 1], sorted[m]),
        TopSide::Upper => (sorted[m], sorted[m - 1]),
    };
    draft.ys[bottom_i] = Some(Rat::zero());
    let left: Vec<usize> = sorted[..m].to_vec();
    let right: Vec<usize> = sorted[m..].to_vec();
    let mut used = vec![top_i];
    let mut order = vec![top_i];
    let mut anchor = top_i;
    let mut step_no = 0;
    while used.len() < n - 1 {
        step_no += 1;
        let other = if left.contains(&anchor) { &right } else { &left };
        let cands: Vec<usize> = other.iter().copied().filter(|i| !used.contains(i) && *i != bottom_i).collect();
        if cands.is_empty() {
            return Err(ConstructionError::Invariant(format!("{tag}: no plausible neighbour at step {step_no}")));
        }
        let near = cands[nearest_index(&draft.xs[anchor], cands.iter().map(|&i| &draft.xs[i]))];
        let rivals: Vec<usize> = cands.iter().copied().filter(|&i| i != near).collect();
        let name = format!("{tag}-step{step_no}");
        let mut d = draft.stage_delta(&[anchor], &[near], &rivals, divisor, &name)?;
        if let Some(c) = cap {
            d = d.min(c.clone());
        }
        let y = &d * &Rat::frac(1, 2);
        draft.record(near, y, &d, name, &[anchor], &[near], &rivals, divisor);
        used.push(near);
        order.push(near);
        anchor = near;
    }
    order.push(bottom_i);
    Ok(order)
}

fn metadata(name: &str, k: Option<u32>, epsilon: Option<Rat>, steps: &[Step]) -> Metadata {
    Metadata { construction: name.to_string(), k, epsilon, deltas: steps.iter().map(|s| s.delta.clone()).collect() }
}

fn path_label(i: i64) -> String {
    format!("p{i}")
}

/// `2k` points `p_i = (i, y_i)` for `i = -1, +-2, ..., +-k` and `p_1 = (0, 1/8k)`;
/// the unique longest path is `p1, p-2, p2, p-3, p3, ..., pk, p-1`.
pub fn construct_path_even(k: u32) -> Result<(PointSet, Certificate), ConstructionError> {
    if k < 3 {
        return Err(ConstructionError::InvalidParameter(format!("even path needs k >= 3, got {k}")));
    }
    let k = k as i64;
    let mut draft = Draft::new();
    let mut sorted = Vec::new();
    for i in (1..=k).rev() {
        sorted.push(draft.add(path_label(-i), Rat::from_int(-i), None));
    }
    let top = draft.add(path_label(1), Rat::zero(), Some(Rat::frac(1, 8 * k)));
    sorted.push(top);
    for i in 2..=k {
        sorted.push(draft.add(path_label(i), Rat::from_int(i), None));
    }
    let n = (2 * k) as u32;
    let order = greedy_chain(&mut draft, &sorted, TopSide::Upper, n - 1, None, "path")?;
    let (ps, steps) = draft.finish()?;
    let claimed = Structure::Path(order);
    check_decreasing(&steps)?;
    let cert = Certificate {
        kind: CertificateKind::PathEven,
        k: k as u32,
        epsilon: None,
        steps,
        claimed_optimum: claimed,
        note: None,
    };
    let ps = ps.with_metadata(metadata("path-even", Some(k as u32), None, &cert.steps));
    Ok((ps, cert))
}

/// The even set for `k` without `p1`; the longest path loses its first edge.
pub fn construct_path_odd(k: u32) -> Result<(PointSet, Certificate), ConstructionError> {
    let (ps, cert) = construct_path_even(k)?;
    let p1 = ps.require("p1")?;
    let reduced = ps.without(p1);
    let Structure::Path(order) = &cert.claimed_optimum else { unreachable!() };
    let labels: Vec<&str> = order.iter().filter(|&&i| i != p1).map(|&i| ps.label(i)).collect();
    let claimed = reduced.path(&labels)?;
    let cert = Certificate { kind: CertificateKind::PathOdd, claimed_optimum: claimed, ..cert };
    let reduced = reduced.with_metadata(metadata("path-odd", Some(k), None, &cert.steps));
    Ok((reduced, cert))
}

/// Lift an even 1-D set so its longest path is unique and noncrossing, with
/// heights in `[0, delta]` and endpoints at heights `delta` (the lower
/// median neighbour) and `0`. Points are labeled `q1, q2, ...` by
/// increasing `x`.
pub fn construct_path_general(xs: &LineSet, delta: &Rat) -> Result<(PointSet, Certificate), ConstructionError> {
    construct_path_general_with_top(xs, delta, TopSide::Lower)
}

pub fn construct_path_general_with_top(
    xs: &LineSet,
    delta: &Rat,
    top: TopSide,
) -> Result<(PointSet, Certificate), ConstructionError> {
    let n = xs.len();
    if n % 2 == 1 || n < 2 {
        return Err(ConstructionError::InvalidParameter(format!("general path needs an even count, got {n}")));
    }
    if !delta.is_positive() {
        return Err(ConstructionError::InvalidParameter("delta must be positive".into()));
    }
    let med = xs.median();
    if xs.values().iter().any(|v| (v - &med).abs() <= *delta) {
        return Err(ConstructionError::InvalidParameter(format!("a value lies within {delta} of the median {med}")));
    }
    let mut draft = Draft::new();
    let sorted: Vec<usize> =
        xs.values().iter().enumerate().map(|(i, x)| draft.add(format!("q{}", i + 1), x.clone(), None)).collect();
    let m = n / 2;
    let top_i = if top == TopSide::Lower { m - 1 } else { m };
    draft.ys[top_i] = Some(delta.clone());
    let order = greedy_chain(&mut draft, &sorted, top, (n - 1).max(1) as u32, None, "general")?;
    let (ps, steps) = draft.finish()?;
    check_decreasing(&steps)?;
    let cert = Certificate {
        kind: CertificateKind::GeneralPath,
        k: m as u32,
        epsilon: None,
        steps,
        claimed_optimum: Structure::Path(order),
        note: None,
    };
    let ps = ps.with_metadata(metadata("general-path", None, None, &cert.steps));
    Ok((ps, cert))
}

fn primed(i: i64) -> String {
    format!("p'{i}")
}

/// Height of segment `a b` at abscissa `x`.
fn segment_height(ax: &Rat, ay: &Rat, bx: &Rat, by: &Rat, x: &Rat) -> Rat {
    ay + &((by - ay) * (x - ax) / (bx - ax))
}

/// Even cycle on `n = 4k - 2` or `n = 4k` points: `p_i = (i, y_i)` and
/// `p'_i = (i + eps, y'_i)`. The longest cycle is the union of two
/// interleaved y-monotone paths from `p1` to the lowest point.
pub fn construct_cycle_even(n: usize) -> Result<(PointSet, Certificate), ConstructionError> {
    if n < 6 || n % 2 == 1 {
        return Err(ConstructionError::InvalidParameter(format!("even cycle needs even n >= 6, got {n}")));
    }
    let four_k = n.is_multiple_of(4);
    let k = if four_k { n / 4 } else { (n + 2) / 4 } as i64;
    let mut eps = Rat::frac(1, 16 * k * k);
    const MAX_ITER: usize = 10;
    for _ in 0..MAX_ITER {
        let (draft, claimed, final_delta) = even_cycle_chain(n, k, four_k, &eps)?;
        if eps <= final_delta {
            let (ps, steps) = draft.finish()?;
            for s in &steps {
                if s.y > s.delta {
                    return Err(ConstructionError::Invariant(format!("{} sits above its threshold", s.label)));
                }
            }
            check_decreasing(&steps)?;
            let kind = if four_k { CertificateKind::CycleEven4k } else { CertificateKind::CycleEven4kMinus2 };
            let labels: Vec<&str> = claimed.iter().map(|s| s.as_str()).collect();
            let claimed = ps.cycle(&labels)?;
            let cert = Certificate {
                kind,
                k: k as u32,
                epsilon: Some(eps.clone()),
                steps,
                claimed_optimum: claimed,
                note: None,
            };
            let ps = ps.with_metadata(metadata(kind.name(), Some(k as u32), Some(eps), &cert.steps));
            return Ok((ps, cert));
        }
        eps = (eps.min(final_delta) * Rat::frac(1, 2)).dyadic_floor(DYADIC_BITS);
    }
    Err(ConstructionError::FixpointFailed { iterations: MAX_ITER })
}

/// One pass of the even-cycle chain for a fixed offset. Returns the draft,
/// the claimed cycle as labels and the last threshold.
fn even_cycle_chain(n: usize, k: i64, four_k: bool, eps: &Rat) -> Result<(Draft, Vec<String>, Rat), ConstructionError> {
    let mut d = Draft::new();
    for i in (1..=k).rev() {
        d.add(path_label(-i), Rat::from_int(-i), None);
    }
    for i in 1..=k {
        d.add(path_label(i), Rat::from_int(i), None);
    }
    if four_k {
        d.add(path_label(k + 1), Rat::from_int(k + 1), None);
    }
    let mut primed_idx: Vec<i64> = vec![-1];
    for i in 2..k {
        primed_idx.push(i);
        primed_idx.push(-i);
    }
    primed_idx.push(k);
    if four_k {
        primed_idx.push(-k);
    }
    for &i in &primed_idx {
        d.add(primed(i), Rat::from_int(i) + eps, None);
    }
    let p1 = d.idx("p1");
    d.ys[p1] = Some(Rat::frac(1, 16 * k));
    let last = if four_k { d.idx(&path_label(k + 1)) } else { d.idx(&path_label(-k)) };
    d.ys[last] = Some(Rat::zero());

    // stage targets: (point set to delta / 2, point placed just below the
    // segment from its partner anchor to the first)
    let mut stages: Vec<(usize, usize)> = Vec::new();
    let mut i = 1;
    loop {
        stages.push((d.idx(&path_label(-i)), d.idx(&primed(-i))));
        if i + 1 > k {
            break;
        }
        stages.push((d.idx(&primed(i + 1)), d.idx(&path_label(i + 1))));
        i += 1;
        if i == k && !four_k {
            break;
        }
    }
    let divisor = (2 * n) as u32;
    let mut anchors: Vec<usize> = vec![p1];
    let mut used: Vec<usize> = vec![p1];
    let mut delta = Rat::zero();
    for (s, &(t_delta, t_below)) in stages.iter().enumerate() {
        let stage_no = s + 1;
        let negative_side = d.xs[anchors[0]].is_positive();
        let cands: Vec<usize> = (0..d.labels.len())
            .filter(|j| !used.contains(j) && d.xs[*j].is_negative() == negative_side && *j != p1)
            .collect();
        let targets = [t_delta, t_below];
        let rivals: Vec<usize> = cands.iter().copied().filter(|j| !targets.contains(j)).collect();
        let name = format!("cycle-stage{stage_no}");
        delta = d.stage_delta(&anchors, &targets, &rivals, divisor, &name)?;
        let y = &delta * &Rat::frac(1, 2);
        // the anchor that continues to the delta-placed target
        let same_side = d.labels[t_delta].starts_with("p'") == d.labels[anchors[0]].starts_with("p'");
        let a_delta = if anchors.len() == 1 || same_side { anchors[0] } else { anchors[1] };
        d.ys[t_delta] = Some(y.clone());
        let h = segment_height(&d.xs[a_delta], d.y(a_delta), &d.xs[t_delta], &y, &d.xs[t_below]);
        let room = &h - &y;
        if !room.is_positive() {
            return Err(ConstructionError::Invariant(format!("no room below the segment at stage {stage_no}")));
        }
        // the lower point starts a quarter of the room below the segment
        // and moves up until the exchange inequality holds
        let a_other = anchors.iter().copied().find(|&a| a != a_delta);
        let mut gap = room * Rat::frac(1, 4);
        let mut tries = 0;
        loop {
            d.ys[t_below] = Some(&h - &gap);
            match a_other {
                Some(o) if !exchange_holds(&d, a_delta, t_delta, o, t_below) => {
                    tries += 1;
                    if tries > MAX_EXCHANGE_HALVINGS {
                        return Err(ConstructionError::ExchangeFailed { stage: stage_no });
                    }
                    gap = gap * Rat::frac(1, 2);
                }
                _ => break,
            }
        }
        let y_below = &h - &gap;
        d.record(t_below, y_below, &delta, format!("{name}-below"), &anchors, &targets, &rivals, divisor);
        d.record(t_delta, y, &delta, name, &anchors, &targets, &rivals, divisor);
        used.extend(anchors.iter().copied());
        anchors = vec![t_delta, t_below];
    }

    // claimed cycle: p1, p-1, p2, p-2, ... down to the last point, then
    // back up along the primed side
    let mut side_a = vec![path_label(1)];
    let mut side_b = Vec::new();
    for i in 1..=k {
        side_a.push(path_label(-i));
        side_b.push(primed(-i));
        if i < k || four_k {
            side_a.push(path_label(i + 1));
            side_b.push(primed(i + 1));
        }
    }
    // the final unprimed point is shared, so it has no primed twin
    side_b.pop();
    let mut out = side_a;
    out.extend(side_b.into_iter().rev());
    Ok((d, out, delta))
}

/// `|a_delta t_delta| + |a_other t_below| > |a_delta t_below| + |a_other t_delta|`.
fn exchange_holds(d: &Draft, a_delta: usize, t_delta: usize, a_other: usize, t_below: usize) -> bool {
    let sq = |i: usize, j: usize| (&d.xs[i] - &d.xs[j]).square() + (d.y(i) - d.y(j)).square();
    let one = Rat::one();
    let lhs = [(one.clone(), sq(a_delta, t_delta)), (one.clone(), sq(a_other, t_below))];
    let rhs = [(one.clone(), sq(a_delta, t_below)), (one, sq(a_other, t_delta))];
    matches!(compare_radical_sums(&lhs, &rhs, &PrecisionPolicy::with_cap(1 << 16)), Ok(RadicalOrdering::Greater))
}

/// Odd cycle on `2k + 1` points: `p-k = (-k, -1/16k)`, a cluster
/// `p-{i}e = (-i eps, y)` for `i = 1..k-1`, `p0 = (0, y0)` and
/// `p_i = (i, y_i)` for `i = 1..k`. The longest cycle is `p-k, p0`, then the
/// greedy path on the remaining points down to `p1`.
pub fn construct_cycle_odd(k: u32) -> Result<(PointSet, Certificate), ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::InvalidParameter(format!("odd cycle needs k >= 2, got {k}")));
    }
    let ki = k as i64;
    let n = 2 * ki + 1;
    let divisor = (2 * n) as u32;
    let a = Rat::frac(1, 16 * ki);
    let low = (Rat::from_int(-ki), -a.clone());

    // the lowest point must pair with the cluster and with p1: everything
    // right of p1 is a rival
    let rivals_x: Vec<Rat> = (2..=ki).map(Rat::from_int).collect();
    let gap_a = stage_gap(core::slice::from_ref(&low), &[Rat::zero(), Rat::one()], &rivals_x)
        .ok_or(ConstructionError::NonPositiveThreshold { step: "odd-cycle-apex".into() })?;
    let delta_a = threshold(gap_a, divisor);
    let y0 = &delta_a * &Rat::frac(1, 2);

    // p-k p0 must beat the edge to any other cluster point, at any height
    // up to y0 / 2
    let kk = Rat::from_int(ki);
    let bits = 128 + y0.bit_size() as u32;
    let top = sqrt_interval(&(kk.square() + (&a + &y0).square()), bits).expect("positive");
    let other = sqrt_interval(&(kk.square() + (&a + &(&y0 * &Rat::frac(1, 2))).square()), bits).expect("positive");
    let g = &top.lo - &other.hi;
    if !g.is_positive() {
        return Err(ConstructionError::NonPositiveThreshold { step: "odd-cycle-cap".into() });
    }
    let delta1 = threshold(g, divisor).min((&y0 * &Rat::frac(1, 2)).dyadic_floor(DYADIC_BITS));

    // cluster points at height <= delta1 stay below the line p-k p0
    let below_line = (&y0 - &delta1) * Rat::from_int(ki) / (Rat::from_int(ki - 1) * (&y0 + &a));
    let eps = (delta1.clone().min(below_line) * Rat::frac(1, 4)).dyadic_floor(DYADIC_BITS);
    if eps >= Rat::frac(1, 16 * ki * ki) {
        return Err(ConstructionError::Invariant("cluster offset too large".into()));
    }

    let mut d = Draft::new();
    let mut sorted = Vec::new();
    for i in (1..ki).rev() {
        sorted.push(d.add(format!("p-{i}e"), -(Rat::from_int(i) * &eps), None));
    }
    let p0 = d.add("p0", Rat::zero(), Some(y0.clone()));
    sorted.push(p0);
    for i in 1..=ki {
        sorted.push(d.add(path_label(i), Rat::from_int(i), None));
    }
    let pk = d.add(path_label(-ki), low.0.clone(), Some(low.1.clone()));
    d.steps.push(Step {
        label: "p0".into(),
        y: y0.clone(),
        delta: delta_a.clone(),
        provenance: "odd-cycle-apex".into(),
        anchors: vec![path_label(-ki)],
        targets: vec!["p0".into(), path_label(1)],
        rivals: (2..=ki).map(path_label).collect(),
        divisor,
    });
    let order = greedy_chain(&mut d, &sorted, TopSide::Lower, divisor, Some(&delta1), "odd-cycle-path")?;
    let (ps, steps) = d.finish()?;

    let (lx, ly) = (&ps.point(pk).x, &ps.point(pk).y);
    let apex = ps.point(p0);
    for i in 0..ps.len() {
        if i == pk || i == p0 || ps.point(i).x >= Rat::zero() {
            continue;
        }
        let line = segment_height(lx, ly, &apex.x, &apex.y, &ps.point(i).x);
        if ps.point(i).y >= line {
            return Err(ConstructionError::Invariant(format!("{} is not below p-k p0", ps.label(i))));
        }
    }
    check_decreasing(&steps)?;
    let mut cycle = vec![pk];
    cycle.extend(order);
    let claimed = Structure::Cycle(cycle);
    claimed.validate(ps.len())?;
    let cert = Certificate {
        kind: CertificateKind::CycleOdd,
        k,
        epsilon: Some(eps.clone()),
        steps,
        claimed_optimum: claimed,
        note: None,
    };
    let ps = ps.with_metadata(metadata("cycle-odd", Some(k), Some(eps), &cert.steps));
    Ok((ps, cert))
}

/// `2k` points `p_i = (i, y_i)`, `i = +-1..+-k`, with `y_1 = 1/8k`,
/// `y_-i = y_{i+1}` and `y_-k = 0`. The longest matching pairs `p-i` with
/// `p_i`, and its edges are nested.
pub fn construct_matching(k: u32) -> Result<(PointSet, Certificate), ConstructionError> {
    if k < 1 {
        return Err(ConstructionError::InvalidParameter("matching needs k >= 1".into()));
    }
    let ki = k as i64;
    let mut d = Draft::new();
    for i in (1..=ki).rev() {
        d.add(path_label(-i), Rat::from_int(-i), None);
    }
    for i in 1..=ki {
        d.add(path_label(i), Rat::from_int(i), None);
    }
    let (top, bottom) = (d.idx("p1"), d.idx(&path_label(-ki)));
    d.ys[top] = Some(Rat::frac(1, 8 * ki));
    d.ys[bottom] = Some(Rat::zero());
    let divisor = k;
    for i in 1..ki {
        let anchor = d.idx(&path_label(i));
        let target = d.idx(&path_label(-i));
        let rivals: Vec<usize> = (i + 1..=ki).map(|j| d.idx(&path_label(-j))).collect();
        let name = format!("matching-step{i}");
        let delta = d.stage_delta(&[anchor], &[target], &rivals, divisor, &name)?;
        let y = &delta * &Rat::frac(1, 2);
        d.record(target, y.clone(), &delta, name.clone(), &[anchor], &[target], &rivals, divisor);
        let next = d.idx(&path_label(i + 1));
        d.record(next, y, &delta, format!("{name}-tie"), &[anchor], &[target], &rivals, divisor);
    }
    let (ps, steps) = d.finish()?;
    let pairs: Vec<(String, String)> = (1..=ki).map(|i| (path_label(-i), path_label(i))).collect();
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let claimed = ps.matching(&refs)?;
    let cert =
        Certificate { kind: CertificateKind::Matching, k, epsilon: None, steps, claimed_optimum: claimed, note: None };
    let ps = ps.with_metadata(metadata("matching", Some(k), None, &cert.steps));
    Ok((ps, cert))
}

/// Hand-made sets below the sizes the chains cover: paths on 1 to 5 points
/// and cycles on 3 or 4. The claimed structure is whatever the exact solver
/// returns, and the note records its uniqueness verdict.
pub fn construct_small(kind: StructureKind, n: usize) -> Result<(PointSet, Certificate), ConstructionError> {
    let p = |l: &str, x: i64, y: i64| Point::new(l, Rat::from_int(x), Rat::from_int(y));
    let pts = match (kind, n) {
        (StructureKind::Path, 1) => vec![p("a", 0, 0)],
        (StructureKind::Path, 2) => vec![p("a", 0, 0), p("b", 4, 0)],
        (StructureKind::Path, 3) | (StructureKind::Cycle, 3) => vec![p("a", 0, 0), p("b", 4, 0), p("c", 2, 3)],
        (StructureKind::Path, 4) | (StructureKind::Cycle, 4) => {
            vec![p("a", 0, 0), p("b", 4, 0), p("c", 2, 3), p("d", 2, 1)]
        }
        (StructureKind::Path, 5) => {
            let (ps, cert) = construct_path_odd(3)?;
            let cert = Certificate { kind: CertificateKind::Small, note: Some("odd path with k = 3".into()), ..cert };
            return Ok((ps, cert));
        }
        _ => return Err(ConstructionError::InvalidParameter(format!("no small {kind} on {n} points"))),
    };
    let ps = PointSet::new(pts)?;
    let (claimed, note) = if n == 1 {
        (Structure::Path(vec![0]), "single point".to_string())
    } else {
        let r = max_structure(&ps, kind, &SolveOptions::default())
            .map_err(|e| ConstructionError::Invariant(format!("{e}")))?;
        let verdict = match r.unique {
            Uniqueness::Proven => "unique",
            Uniqueness::Refuted(_) => "not unique",
            Uniqueness::Unresolved => "unresolved",
        };
        (r.best, verdict.to_string())
    };
    let cert = Certificate {
        kind: CertificateKind::Small,
        k: 0,
        epsilon: None,
        steps: Vec::new(),
        claimed_optimum: claimed,
        note: Some(note),
    };
    let ps = ps.with_metadata(Metadata { construction: "small".into(), ..Default::default() });
    Ok((ps, cert))
}

/// The construction for `n` points of the given kind, dispatching to the
/// hand-made sets where the chains do not apply.
pub fn construct(kind: StructureKind, n: usize) -> Result<(PointSet, Certificate), ConstructionError> {
    match kind {
        StructureKind::Path if n <= 5 => construct_small(kind, n),
        StructureKind::Path if n.is_multiple_of(2) => construct_path_even((n / 2) as u32),
        StructureKind::Path => construct_path_odd(n.div_ceil(2) as u32),
        StructureKind::Cycle if n <= 4 => construct_small(kind, n),
        StructureKind::Cycle if n.is_multiple_of(2) => construct_cycle_even(n),
        StructureKind::Cycle => construct_cycle_odd(((n - 1) / 2) as u32),
        StructureKind::Matching if n.is_multiple_of(2) && n >= 2 => construct_matching((n / 2) as u32),
        StructureKind::Matching => {
            Err(ConstructionError::InvalidParameter(format!("no perfect matching on {n} points")))
        }
    }
}

/// Recompute every step's threshold from the finished point set. Each
/// result should be at least the recorded value.
pub fn replay_deltas(ps: &PointSet, cert: &Certificate) -> Result<Vec<Rat>, ConstructionError> {
    cert.steps
        .iter()
        .map(|s| {
            let coords = |names: &[String]| -> Result<Vec<(Rat, Rat)>, ConstructionError> {
                names
                    .iter()
                    .map(|l| {
                        let p = ps.point(ps.require(l)?);
                        Ok((p.x.clone(), p.y.clone()))
                    })
                    .collect()
            };
            let anchors = coords(&s.anchors)?;
            let targets: Vec<Rat> = coords(&s.targets)?.into_iter().map(|c| c.0).collect();
            let rivals: Vec<Rat> = coords(&s.rivals)?.into_iter().map(|c| c.0).collect();
            let gap = stage_gap(&anchors, &targets, &rivals)
                .ok_or(ConstructionError::NonPositiveThreshold { step: s.provenance.clone() })?;
            Ok(gap / Rat::from_int(s.divisor as i64))
        })
        .collect()
}

/// Heights strictly decrease along the step list.
fn check_decreasing(steps: &[Step]) -> Result<(), ConstructionError> {
    for w in steps.windows(2) {
        let ok = if w[1].provenance.ends_with("-tie") { w[1].y == w[0].y } else { w[1].y < w[0].y };
        if !ok {
            return Err(ConstructionError::Invariant(format!("{} is not below {}", w[1].label, w[0].label)));
        }
    }
    Ok(())
}

/// With the path directed from its first vertex, the line through every
/// edge, extended beyond its head, meets every later edge.
pub fn extensions_meet_later_edges(ps: &PointSet, path: &Structure) -> bool {
    path.order().is_some() && extension_failures(ps, path).is_empty()
}

/// Pairs `(i, j)` of edge positions, `i < j`, where the extension of edge
/// `i` beyond its head misses edge `j`.
pub fn extension_failures(ps: &PointSet, path: &Structure) -> Vec<(usize, usize)> {
    let Some(order) = path.order() else { return Vec::new() };
    let edges: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
    let mut out = Vec::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for (j, &(c, d)) in edges.iter().enumerate().skip(i + 1) {
            if !ray_meets_segment(ps.point(a), ps.point(b), ps.point(c), ps.point(d)) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Does the ray from `a` through `b` (starting at `b`) meet segment `cd`?
fn ray_meets_segment(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let oc = orientation(a, b, c);
    let od = orientation(a, b, d);
    if oc != Orientation::Collinear && oc == od {
        return false;
    }
    // parameter t of the intersection along a + t (b - a) must be >= 1
    let rx = &b.x - &a.x;
    let ry = &b.y - &a.y;
    let sx = &d.x - &c.x;
    let sy = &d.y - &c.y;
    let denom = &rx * &sy - &ry * &sx;
    let qx = &c.x - &a.x;
    let qy = &c.y - &a.y;
    if denom.is_zero() {
        // collinear: some endpoint of cd must lie at or beyond b
        let proj = |p: &Point| (&p.x - &a.x) * &rx + (&p.y - &a.y) * &ry;
        let bb = proj(b);
        return oc == Orientation::Collinear && (proj(c) >= bb || proj(d) >= bb);
    }
    let t = (&qx * &sy - &qy * &sx) / denom;
    t >= Rat::one()
}

/// Re-check the exchange inequality of every two-anchor even-cycle stage on
/// the finished set. Each entry is the stage's provenance tag and the exact
/// comparison of the claimed pairing against the swapped one.
pub fn exchange_checks(ps: &PointSet, cert: &Certificate) -> Result<Vec<(String, RadicalOrdering)>, ConstructionError> {
    let mut out = Vec::new();
    for s in cert.steps.iter().filter(|s| s.provenance.ends_with("-below") && s.anchors.len() == 2) {
        let t_below = ps.require(&s.label)?;
        let t_delta_label = s
            .targets
            .iter()
            .find(|t| **t != s.label)
            .ok_or_else(|| ConstructionError::Invariant(format!("{} has no partner target", s.provenance)))?;
        let t_delta = ps.require(t_delta_label)?;
        let primed = |l: &str| l.starts_with("p'");
        let (a_delta, a_other) = if primed(&s.anchors[0]) == primed(t_delta_label) {
            (&s.anchors[0], &s.anchors[1])
        } else {
            (&s.anchors[1], &s.anchors[0])
        };
        let (a_delta, a_other) = (ps.require(a_delta)?, ps.require(a_other)?);
        let one = Rat::one();
        let sq = |i: usize, j: usize| ps.squared_distance(i, j);
        let lhs = [(one.clone(), sq(a_delta, t_delta)), (one.clone(), sq(a_other, t_below))];
        let rhs = [(one.clone(), sq(a_delta, t_below)), (one, sq(a_other, t_delta))];
        let ord = compare_radical_sums(&lhs, &rhs, &PrecisionPolicy::with_cap(1 << 16))
            .map_err(|e| ConstructionError::Invariant(format!("{e}")))?;
        out.push((s.provenance.clone(), ord));
    }
    Ok(out)
}
