//! Exact maximum spanning paths, cycles and perfect matchings.
//!
//! Both methods run the same two phases. A floating-point enumeration keeps
//! every structure whose approximate length is within a rounding margin of
//! the approximate optimum, and records an upper bound for everything it
//! throws away. The survivors are then ranked with exact comparisons of
//! sums of square roots, and uniqueness is only claimed when the certified
//! best length sits strictly above every other structure, including the
//! discarded ones.
//!
//! `BruteForce` visits every canonical structure. `SubsetDp` first fills a
//! Held-Karp style table of optimal completions over vertex subsets and uses
//! it to cut off branches that cannot reach the candidate band.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::exactnum::{root_sum_interval, CachedRoot, Interval, PrecisionPolicy, RadicalOrdering, Rat};
use crate::geometry::{PointSet, Structure, StructureKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Brute force up to the brute-force caps, subset DP above them.
    Auto,
    BruteForce,
    SubsetDp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::BruteForce => "brute",
            Method::SubsetDp => "dp",
        })
    }
}

impl core::str::FromStr for Method {
    type Err = SolveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Method::Auto),
            "brute" | "bruteforce" | "brute-force" => Ok(Method::BruteForce),
            "dp" | "subset-dp" | "subsetdp" => Ok(Method::SubsetDp),
            other => Err(SolveError::UnknownMethod(other.into())),
        }
    }
}

/// Largest `n` each method accepts, per structure kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub brute_tour: usize,
    pub brute_matching: usize,
    pub dp_tour: usize,
    pub dp_matching: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { brute_tour: 10, brute_matching: 12, dp_tour: 20, dp_matching: 22 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub method: Method,
    /// Width target for the reported length enclosures.
    pub precision_bits: u32,
    /// Escalation schedule for exact comparisons.
    pub policy: PrecisionPolicy,
    pub caps: Caps,
    /// Most near-optimal candidates kept for exact ranking. Past this the
    /// co-optimal list may be incomplete, which is flagged in the stats.
    pub candidate_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: Method::Auto,
            precision_bits: 256,
            policy: PrecisionPolicy::default(),
            caps: Caps::default(),
            candidate_limit: 20_000,
        }
    }
}

impl SolveOptions {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    TooFew { n: usize, min: usize },
    OddMatching { n: usize },
    Capacity { n: usize, cap: usize, method: Method },
    UnknownMethod(alloc::string::String),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::TooFew { n, min } => write!(f, "{n} points, need at least {min}"),
            SolveError::OddMatching { n } => write!(f, "no perfect matching on {n} points"),
            SolveError::Capacity { n, cap, method } => {
                write!(f, "{n} points exceed the {method} limit of {cap}")
            }
            SolveError::UnknownMethod(m) => write!(f, "unknown method {m:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniqueness {
    Proven,
    /// All certified co-optimal structures, in canonical form and sorted.
    Refuted(Vec<Structure>),
    Unresolved,
}

impl Uniqueness {
    pub fn is_proven(&self) -> bool {
        matches!(self, Uniqueness::Proven)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Complete structures whose length was evaluated.
    pub examined: u64,
    /// Entries in the subset table, zero for brute force.
    pub peak_table: usize,
    /// Structures that went through exact ranking.
    pub candidates: usize,
    /// Set when the candidate limit was hit.
    pub truncated: bool,
    /// Filled in by callers that have a clock.
    pub wall_time: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub kind: StructureKind,
    pub best: Structure,
    pub best_length: Interval,
    /// Enclosure of the largest length over the other canonical structures,
    /// `None` when there are none.
    pub second_best_length: Option<Interval>,
    pub unique: Uniqueness,
    pub method: Method,
    pub stats: Stats,
}

pub fn max_path(ps: &PointSet, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    max_structure(ps, StructureKind::Path, opts)
}

pub fn max_cycle(ps: &PointSet, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    max_structure(ps, StructureKind::Cycle, opts)
}

pub fn max_matching(ps: &PointSet, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    max_structure(ps, StructureKind::Matching, opts)
}

pub fn max_structure(ps: &PointSet, kind: StructureKind, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    let method = resolve_method(ps.len(), kind, opts)?;
    let collected = collect(ps, kind, method, 0.0, opts.candidate_limit);
    let exact = ExactLengths::new(ps, opts.policy);
    Ok(certify(&exact, kind, method, collected, opts))
}

/// Every structure whose length is at least `optimum - slack`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optima {
    pub best_length: Interval,
    /// Certified members, canonical and sorted.
    pub structures: Vec<Structure>,
    /// Candidates that could be neither included nor excluded at the
    /// precision cap.
    pub unresolved: Vec<Structure>,
    /// False when some structure outside the list could not be ruled out.
    pub complete: bool,
}

pub fn enumerate_optima(
    ps: &PointSet,
    kind: StructureKind,
    slack: &Rat,
    opts: &SolveOptions,
) -> Result<Optima, SolveError> {
    assert!(!slack.is_negative(), "slack must be nonnegative");
    let method = resolve_method(ps.len(), kind, opts)?;
    let collected = collect(ps, kind, method, slack.to_f64(), opts.candidate_limit);
    let exact = ExactLengths::new(ps, opts.policy);
    let truncated = collected.truncated;
    let outside = collected.outside_bound();
    let result = certify(&exact, kind, method, collected.clone(), opts);
    let best = &result.best;
    let slack_root = CachedRoot::new(slack.square()).expect("square is nonnegative");

    let mut structures = Vec::new();
    let mut unresolved = Vec::new();
    let best_roots = exact.roots(best);
    for (_, s) in &collected.candidates {
        let mut lhs = exact.roots(s);
        lhs.push(&slack_root);
        match exact.compare_roots(&lhs, &best_roots) {
            RadicalOrdering::Greater | RadicalOrdering::Equal => structures.push(s.clone()),
            RadicalOrdering::Less => {}
            RadicalOrdering::Unresolved => unresolved.push(s.clone()),
        }
    }
    structures.sort();
    unresolved.sort();

    let complete = !truncated
        && match outside {
            None => true,
            Some(bound) => {
                let levels = bits_schedule(opts);
                levels.into_iter().any(|bits| exact.interval(best, bits).lo - slack > bound)
            }
        };
    Ok(Optima { best_length: result.best_length, structures, unresolved, complete })
}

fn resolve_method(n: usize, kind: StructureKind, opts: &SolveOptions) -> Result<Method, SolveError> {
    let min = match kind {
        StructureKind::Path => 2,
        StructureKind::Cycle => 3,
        StructureKind::Matching => 2,
    };
    if n < min {
        return Err(SolveError::TooFew { n, min });
    }
    if kind == StructureKind::Matching && n % 2 == 1 {
        return Err(SolveError::OddMatching { n });
    }
    let (brute, dp) = match kind {
        StructureKind::Matching => (opts.caps.brute_matching, opts.caps.dp_matching),
        _ => (opts.caps.brute_tour, opts.caps.dp_tour),
    };
    let method = match opts.method {
        Method::Auto if n <= brute => Method::BruteForce,
        Method::Auto => Method::SubsetDp,
        m => m,
    };
    let cap = if method == Method::BruteForce { brute } else { dp };
    if n > cap {
        return Err(SolveError::Capacity { n, cap, method });
    }
    Ok(method)
}

/// Bound on the difference between the computed and the true length of any
/// structure with `n` edges and approximate length `m`, for any summation
/// order. Each edge is a correctly rounded square root of a correctly
/// rounded squared distance, so the relative error per edge is a few ulps.
fn error_bound(n: usize, m: f64) -> f64 {
    1e-14 * n as f64 * m.abs() + n as f64 * 1e-150
}

#[derive(Clone, Debug)]
struct Collected {
    n: usize,
    max: f64,
    /// Sorted by decreasing approximate length, then canonical order.
    candidates: Vec<(f64, Structure)>,
    /// Largest approximate length (or completion bound) of anything not
    /// kept, `-inf` when nothing was dropped.
    outside: f64,
    truncated: bool,
    examined: u64,
    table: usize,
}

impl Collected {
    /// Certified upper bound on the true length of every dropped structure.
    fn outside_bound(&self) -> Option<Rat> {
        if self.outside == f64::NEG_INFINITY {
            return None;
        }
        let e = error_bound(self.n, self.max.max(self.outside));
        Some(Rat::from_f64(self.outside).expect("finite") + Rat::from_f64(e).expect("finite"))
    }
}

struct Collector {
    n: usize,
    slack: f64,
    max: f64,
    candidates: Vec<(f64, Structure)>,
    outside: f64,
    limit: usize,
    truncated: bool,
    examined: u64,
}

impl Collector {
    fn new(n: usize, slack: f64, limit: usize) -> Self {
        Collector {
            n,
            slack,
            max: f64::NEG_INFINITY,
            candidates: Vec::new(),
            outside: f64::NEG_INFINITY,
            limit: limit.max(1),
            truncated: false,
            examined: 0,
        }
    }

    /// Lengths below this can be dropped. The band is four error bounds
    /// wide so that everything tied with the optimum up to rounding stays.
    fn threshold(&self) -> f64 {
        self.max - self.slack - 4.0 * error_bound(self.n, self.max)
    }

    fn offer(&mut self, v: f64, make: impl FnOnce() -> Structure) {
        self.examined += 1;
        if v > self.max {
            self.max = v;
        }
        if v >= self.threshold() {
            self.candidates.push((v, make()));
            if self.candidates.len() >= 2 * self.limit.max(512) {
                self.prune();
            }
        } else {
            self.exclude(v);
        }
    }

    fn exclude(&mut self, bound: f64) {
        if bound > self.outside {
            self.outside = bound;
        }
    }

    /// The threshold only rises, so anything below the current one stays
    /// below the final one.
    fn prune(&mut self) {
        let thr = self.threshold();
        let mut kept = Vec::with_capacity(self.candidates.len());
        for (v, s) in core::mem::take(&mut self.candidates) {
            if v >= thr {
                kept.push((v, s));
            } else {
                self.exclude(v);
            }
        }
        if kept.len() > self.limit {
            kept.sort_by(|a, b| b.0.total_cmp(&a.0));
            for (v, _) in kept.drain(self.limit..) {
                self.exclude(v);
            }
            self.truncated = true;
        }
        self.candidates = kept;
    }

    fn finish(mut self, table: usize) -> Collected {
        self.prune();
        let mut candidates = self.candidates;
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        Collected {
            n: self.n,
            max: self.max,
            candidates,
            outside: self.outside,
            truncated: self.truncated,
            examined: self.examined,
            table,
        }
    }
}

/// Approximate edge lengths.
struct Weights {
    n: usize,
    w: Vec<f64>,
}

impl Weights {
    fn new(ps: &PointSet) -> Self {
        let n = ps.len();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = libm_sqrt(ps.squared_distance(i, j).to_f64());
                w[i * n + j] = d;
                w[j * n + i] = d;
            }
        }
        Weights { n, w }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }
}

fn libm_sqrt(v: f64) -> f64 {
    num_traits::Float::sqrt(v)
}

fn collect(ps: &PointSet, kind: StructureKind, method: Method, slack: f64, limit: usize) -> Collected {
    let w = Weights::new(ps);
    let n = ps.len();
    let mut col = Collector::new(n, slack, limit);
    let table = match (kind, method) {
        (StructureKind::Path, Method::BruteForce) => {
            path_search(&w, None, &mut col);
            0
        }
        (StructureKind::Path, _) => {
            let t = path_table(&w);
            col.max = (0..n).map(|v| t[((1usize << n) - 1) * n + v]).fold(f64::NEG_INFINITY, f64::max);
            path_search(&w, Some(&t), &mut col);
            t.len()
        }
        (StructureKind::Cycle, Method::BruteForce) => {
            cycle_search(&w, None, &mut col);
            0
        }
        (StructureKind::Cycle, _) => {
            let t = cycle_table(&w);
            let full = (1usize << (n - 1)) - 1;
            col.max = (1..n).map(|v| t[full * n + v] + w.get(v, 0)).fold(f64::NEG_INFINITY, f64::max);
            cycle_search(&w, Some(&t), &mut col);
            t.len()
        }
        (StructureKind::Matching, Method::BruteForce) => {
            matching_search(&w, None, &mut col);
            0
        }
        (StructureKind::Matching, _) => {
            let t = matching_table(&w);
            col.max = t[(1usize << n) - 1];
            matching_search(&w, Some(&t), &mut col);
            t.len()
        }
    };
    col.finish(table)
}

/// `t[mask * n + v]`: longest path visiting exactly `mask` and ending at
/// `v`, from any start.
fn path_table(w: &Weights) -> Vec<f64> {
    let n = w.n;
    let mut t = vec![f64::NEG_INFINITY; (1usize << n) * n];
    for v in 0..n {
        t[(1usize << v) * n + v] = 0.0;
    }
    for mask in 1usize..(1 << n) {
        for v in 0..n {
            let cur = t[mask * n + v];
            if cur == f64::NEG_INFINITY {
                continue;
            }
            for u in 0..n {
                if mask & (1 << u) == 0 {
                    let idx = (mask | (1 << u)) * n + u;
                    let cand = cur + w.get(v, u);
                    if cand > t[idx] {
                        t[idx] = cand;
                    }
                }
            }
        }
    }
    t
}

/// `t[mask * n + v]` with `mask` over vertices `1..n` (bit `i - 1` for
/// vertex `i`): longest path from vertex 0 through exactly `mask`, ending
/// at `v`.
fn cycle_table(w: &Weights) -> Vec<f64> {
    let n = w.n;
    let m = n - 1;
    let mut t = vec![f64::NEG_INFINITY; (1usize << m) * n];
    for v in 1..n {
        t[(1usize << (v - 1)) * n + v] = w.get(0, v);
    }
    for mask in 1usize..(1 << m) {
        for v in 1..n {
            let cur = t[mask * n + v];
            if cur == f64::NEG_INFINITY {
                continue;
            }
            for u in 1..n {
                let bit = 1usize << (u - 1);
                if mask & bit == 0 {
                    let idx = (mask | bit) * n + u;
                    let cand = cur + w.get(v, u);
                    if cand > t[idx] {
                        t[idx] = cand;
                    }
                }
            }
        }
    }
    t
}

/// `t[mask]`: heaviest perfect matching on `mask`, `-inf` for odd sizes.
fn matching_table(w: &Weights) -> Vec<f64> {
    let n = w.n;
    let mut t = vec![f64::NEG_INFINITY; 1usize << n];
    t[0] = 0.0;
    for mask in 1usize..(1 << n) {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let low = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << low);
        let mut best = f64::NEG_INFINITY;
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let v = w.get(low, j) + t[rest & !(1 << j)];
            if v > best {
                best = v;
            }
        }
        t[mask] = best;
    }
    t
}

/// Depth-first over all paths, keeping those with first index below last.
/// With a table, branches whose best completion misses the band are cut.
fn path_search(w: &Weights, table: Option<&[f64]>, col: &mut Collector) {
    let n = w.n;
    let full = (1usize << n) - 1;
    let mut order = Vec::with_capacity(n);
    fn rec(
        w: &Weights,
        table: Option<&[f64]>,
        col: &mut Collector,
        order: &mut Vec<usize>,
        mask: usize,
        full: usize,
        partial: f64,
    ) {
        let n = w.n;
        let cur = *order.last().unwrap();
        if mask == full {
            if order[0] < cur {
                col.offer(partial, || Structure::Path(order.clone()));
            }
            return;
        }
        if let Some(t) = table {
            let rest = (full & !mask) | (1 << cur);
            let bound = partial + t[rest * n + cur];
            if bound < col.threshold() {
                col.exclude(bound);
                return;
            }
        }
        for u in 0..n {
            if mask & (1 << u) == 0 {
                order.push(u);
                rec(w, table, col, order, mask | (1 << u), full, partial + w.get(cur, u));
                order.pop();
            }
        }
    }
    // a path with first index above its last is the reverse of one we keep,
    // so the last start vertex can be skipped
    for s in 0..n.saturating_sub(1) {
        order.clear();
        order.push(s);
        rec(w, table, col, &mut order, 1 << s, full, 0.0);
    }
}

/// Cycles through vertex 0, keeping the direction with the smaller second
/// vertex.
fn cycle_search(w: &Weights, table: Option<&[f64]>, col: &mut Collector) {
    let n = w.n;
    let full = (1usize << (n - 1)) - 1;
    fn rec(
        w: &Weights,
        table: Option<&[f64]>,
        col: &mut Collector,
        order: &mut Vec<usize>,
        mask: usize,
        full: usize,
        partial: f64,
    ) {
        let n = w.n;
        let cur = *order.last().unwrap();
        if mask == full {
            if order[1] < cur {
                col.offer(partial + w.get(cur, 0), || Structure::Cycle(order.clone()));
            }
            return;
        }
        if let Some(t) = table {
            if cur != 0 {
                let rest = (full & !mask) | (1 << (cur - 1));
                let bound = partial + t[rest * n + cur];
                if bound < col.threshold() {
                    col.exclude(bound);
                    return;
                }
            }
        }
        for u in 1..n {
            let bit = 1usize << (u - 1);
            if mask & bit == 0 {
                order.push(u);
                rec(w, table, col, order, mask | bit, full, partial + w.get(cur, u));
                order.pop();
            }
        }
    }
    let mut order = vec![0];
    rec(w, table, col, &mut order, 0, full, 0.0);
}

/// Matchings built by pairing the lowest free vertex first, which yields
/// each matching once, already in canonical form.
fn matching_search(w: &Weights, table: Option<&[f64]>, col: &mut Collector) {
    let n = w.n;
    fn rec(
        w: &Weights,
        table: Option<&[f64]>,
        col: &mut Collector,
        pairs: &mut Vec<(usize, usize)>,
        free: usize,
        partial: f64,
    ) {
        if free == 0 {
            col.offer(partial, || Structure::Matching(pairs.clone()));
            return;
        }
        let low = free.trailing_zeros() as usize;
        let rest = free & !(1 << low);
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let next = rest & !(1 << j);
            let val = partial + w.get(low, j);
            if let Some(t) = table {
                let bound = val + t[next];
                if bound < col.threshold() {
                    col.exclude(bound);
                    continue;
                }
            }
            pairs.push((low, j));
            rec(w, table, col, pairs, next, val);
            pairs.pop();
        }
    }
    let mut pairs = Vec::with_capacity(n / 2);
    rec(w, table, col, &mut pairs, (1usize << n) - 1, 0.0);
}

/// Exact edge lengths as cached square roots of squared distances.
pub struct ExactLengths {
    n: usize,
    roots: Vec<CachedRoot>,
    policy: PrecisionPolicy,
}

impl ExactLengths {
    pub fn new(ps: &PointSet, policy: PrecisionPolicy) -> Self {
        let n = ps.len();
        let mut roots = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (i.min(j), i.max(j));
                // the lower triangle is never read
                let q = if a == i { ps.squared_distance(a, b) } else { Rat::zero() };
                roots.push(CachedRoot::new(q).expect("squared distances are nonnegative"));
            }
        }
        ExactLengths { n, roots, policy }
    }

    pub fn edge(&self, a: usize, b: usize) -> &CachedRoot {
        &self.roots[a.min(b) * self.n + a.max(b)]
    }

    pub fn roots(&self, s: &Structure) -> Vec<&CachedRoot> {
        s.edges().into_iter().map(|(a, b)| self.edge(a, b)).collect()
    }

    pub fn compare(&self, a: &Structure, b: &Structure) -> RadicalOrdering {
        self.compare_roots(&self.roots(a), &self.roots(b))
    }

    fn compare_roots(&self, a: &[&CachedRoot], b: &[&CachedRoot]) -> RadicalOrdering {
        crate::exactnum::compare_root_sums(a, b, &self.policy)
    }

    /// Enclosure of the length with width at most about `2^-bits`.
    pub fn interval(&self, s: &Structure, bits: u32) -> Interval {
        let roots = self.roots(s);
        let extra = usize::BITS - roots.len().leading_zeros();
        let mut iv = root_sum_interval(&roots, bits + extra);
        iv.precision_bits = bits;
        iv
    }
}

fn bits_schedule(opts: &SolveOptions) -> Vec<u32> {
    let mut out = vec![opts.precision_bits.max(1)];
    let cap = opts.policy.cap_bits.max(opts.precision_bits);
    while *out.last().unwrap() < cap {
        let next = (out.last().unwrap() * 2).min(cap);
        out.push(next);
    }
    out
}

fn certify(
    exact: &ExactLengths,
    kind: StructureKind,
    method: Method,
    collected: Collected,
    opts: &SolveOptions,
) -> SolveResult {
    let outside = collected.outside_bound();
    let cands: Vec<Structure> = collected.candidates.iter().map(|(_, s)| s.clone()).collect();
    assert!(!cands.is_empty(), "the maximum itself is always a candidate");

    // Tournament, then a verification pass that restarts if an earlier
    // unresolved comparison hid a longer structure.
    let mut best = 0;
    for i in 1..cands.len() {
        if exact.compare(&cands[i], &cands[best]) == RadicalOrdering::Greater {
            best = i;
        }
    }
    let (co_optimal, unresolved) = loop {
        let mut co = vec![best];
        let mut unresolved = false;
        let mut restart = None;
        for i in 0..cands.len() {
            if i == best {
                continue;
            }
            match exact.compare(&cands[i], &cands[best]) {
                RadicalOrdering::Less => {}
                RadicalOrdering::Equal => co.push(i),
                RadicalOrdering::Unresolved => unresolved = true,
                RadicalOrdering::Greater => {
                    restart = Some(i);
                    break;
                }
            }
        }
        match restart {
            Some(i) => best = i,
            None => break (co, unresolved),
        }
    };

    let mut co: Vec<Structure> = co_optimal.iter().map(|&i| cands[i].clone()).collect();
    co.sort();
    let best_structure = co[0].clone();
    let best_idx = cands.iter().position(|s| *s == best_structure).unwrap();

    let enclosures = |bits: u32| -> (Interval, Option<Interval>) {
        let b = exact.interval(&best_structure, bits);
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for (i, s) in cands.iter().enumerate() {
            if i == best_idx {
                continue;
            }
            let iv = exact.interval(s, bits);
            lo = Some(lo.map_or(iv.lo.clone(), |l| l.max(iv.lo.clone())));
            hi = Some(hi.map_or(iv.hi.clone(), |h| h.max(iv.hi.clone())));
        }
        if let Some(bound) = &outside {
            hi = Some(hi.map_or(bound.clone(), |h| h.max(bound.clone())));
            lo = Some(lo.unwrap_or_else(Rat::zero));
        }
        let second = match (lo, hi) {
            (Some(lo), Some(hi)) => Some(Interval::new(lo.clone().min(hi.clone()), hi, bits)),
            _ => None,
        };
        (b, second)
    };

    let mut unique = if co.len() > 1 {
        Uniqueness::Refuted(co.clone())
    } else if unresolved {
        Uniqueness::Unresolved
    } else {
        Uniqueness::Proven
    };

    let (mut best_length, mut second_best_length) = enclosures(opts.precision_bits);
    if unique.is_proven() {
        let separated = |b: &Interval, s: &Option<Interval>| s.as_ref().is_none_or(|s| b.lo > s.hi);
        if !separated(&best_length, &second_best_length) {
            unique = Uniqueness::Unresolved;
            for bits in bits_schedule(opts).into_iter().skip(1) {
                let (b, s) = enclosures(bits);
                let ok = separated(&b, &s);
                best_length = b;
                second_best_length = s;
                if ok {
                    unique = Uniqueness::Proven;
                    break;
                }
            }
        }
    }

    SolveResult {
        kind,
        best: best_structure,
        best_length,
        second_best_length,
        unique,
        method,
        stats: Stats {
            examined: collected.examined,
            peak_table: collected.table,
            candidates: cands.len(),
            truncated: collected.truncated,
            wall_time: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use alloc::format;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn collinear(xs: &[i64]) -> PointSet {
        PointSet::collinear(&xs.iter().map(|&x| Rat::from_int(x)).collect::<Vec<_>>()).unwrap()
    }

    fn random_set(rng: &mut ChaCha8Rng, n: usize) -> PointSet {
        let mut pts: Vec<Point> = Vec::new();
        while pts.len() < n {
            let x = Rat::frac(rng.gen_range(-40..=40), rng.gen_range(1..=4));
            let y = Rat::frac(rng.gen_range(-40..=40), rng.gen_range(1..=4));
            if pts.iter().any(|p| p.x == x && p.y == y) {
                continue;
            }
            pts.push(Point::new(format!("q{}", pts.len()), x, y));
        }
        PointSet::new(pts).unwrap()
    }

    fn opts(m: Method) -> SolveOptions {
        SolveOptions::default().with_method(m)
    }

    /// Exact lengths of every canonical structure, by a separate route:
    /// all permutations, canonicalized and deduplicated.
    fn all_canonical(n: usize, kind: StructureKind) -> Vec<Structure> {
        let perms = crate::line1d::oracle::permutations(n);
        let mut out: Vec<Structure> = perms
            .into_iter()
            .map(|p| match kind {
                StructureKind::Path => Structure::Path(p).canonical(),
                StructureKind::Cycle => Structure::Cycle(p).canonical(),
                StructureKind::Matching => Structure::Matching(p.chunks(2).map(|c| (c[0], c[1])).collect()).canonical(),
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn enumerators_visit_every_canonical_structure_once() {
        for n in 2..=7 {
            let ps = collinear(&(0..n as i64).map(|i| i * i + 1).collect::<Vec<_>>());
            for kind in [StructureKind::Path, StructureKind::Cycle, StructureKind::Matching] {
                if (kind == StructureKind::Cycle && n < 3) || (kind == StructureKind::Matching && n % 2 == 1) {
                    continue;
                }
                let w = Weights::new(&ps);
                // an infinite slack keeps everything
                let mut col = Collector::new(n, f64::INFINITY, usize::MAX / 4);
                match kind {
                    StructureKind::Path => path_search(&w, None, &mut col),
                    StructureKind::Cycle => cycle_search(&w, None, &mut col),
                    StructureKind::Matching => matching_search(&w, None, &mut col),
                }
                let mut got: Vec<Structure> = col.candidates.into_iter().map(|(_, s)| s).collect();
                got.sort();
                let mut canon: Vec<Structure> = got.iter().map(|s| s.canonical()).collect();
                canon.dedup();
                assert_eq!(got, canon, "non-canonical output for {kind} n={n}");
                assert_eq!(got, all_canonical(n, kind), "{kind} n={n}");
            }
        }
    }

    #[test]
    fn collinear_examples() {
        let ps = collinear(&[1, 2, 3, 4]);
        let r = max_path(&ps, &SolveOptions::default()).unwrap();
        assert!(r.best_length.is_exact() && r.best_length.lo == Rat::from_int(7));
        let r = max_cycle(&ps, &SolveOptions::default()).unwrap();
        assert!(r.best_length.is_exact() && r.best_length.lo == Rat::from_int(8));
        assert!(r.unique.is_proven());
        assert_eq!(r.best, Structure::Cycle(vec![0, 2, 1, 3]));

        let ps = collinear(&[-2, -1, 1, 2]);
        let r = max_matching(&ps, &SolveOptions::default()).unwrap();
        let Uniqueness::Refuted(co) = &r.unique else { panic!("{:?}", r.unique) };
        assert_eq!(co, &vec![Structure::Matching(vec![(0, 2), (1, 3)]), Structure::Matching(vec![(0, 3), (1, 2)])]);
    }

    #[test]
    fn trivial_cases_are_proven() {
        let ps = collinear(&[-1, 1]);
        let r = max_path(&ps, &SolveOptions::default()).unwrap();
        assert!(r.unique.is_proven());
        assert_eq!(r.second_best_length, None);
        let r = max_matching(&ps, &SolveOptions::default()).unwrap();
        assert!(r.unique.is_proven());
        let tri = PointSet::new(vec![
            Point::new("a", Rat::zero(), Rat::zero()),
            Point::new("b", Rat::from_int(3), Rat::zero()),
            Point::new("c", Rat::zero(), Rat::from_int(4)),
        ])
        .unwrap();
        for m in [Method::BruteForce, Method::SubsetDp] {
            let r = max_cycle(&tri, &opts(m)).unwrap();
            assert!(r.unique.is_proven());
            assert!(r.best_length.is_exact() && r.best_length.lo == Rat::from_int(12));
            assert_eq!(r.best, Structure::Cycle(vec![0, 1, 2]));
        }
    }

    #[test]
    fn errors() {
        let ps = collinear(&[1, 2, 3]);
        assert_eq!(max_matching(&ps, &SolveOptions::default()), Err(SolveError::OddMatching { n: 3 }));
        assert_eq!(max_cycle(&collinear(&[1, 2]), &SolveOptions::default()), Err(SolveError::TooFew { n: 2, min: 3 }));
        let big = collinear(&(0..11).collect::<Vec<_>>());
        assert!(matches!(max_path(&big, &opts(Method::BruteForce)), Err(SolveError::Capacity { n: 11, cap: 10, .. })));
    }

    #[test]
    fn dp_agrees_with_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..60 {
            let n = 2 + round % 7;
            let ps = random_set(&mut rng, n);
            let mut kinds = vec![StructureKind::Path];
            if n >= 3 {
                kinds.push(StructureKind::Cycle);
            }
            if n % 2 == 0 {
                kinds.push(StructureKind::Matching);
            }
            for kind in kinds {
                let a = max_structure(&ps, kind, &opts(Method::BruteForce)).unwrap();
                let b = max_structure(&ps, kind, &opts(Method::SubsetDp)).unwrap();
                let exact = ExactLengths::new(&ps, PrecisionPolicy::default());
                assert_eq!(exact.compare(&a.best, &b.best), RadicalOrdering::Equal, "{kind} round {round}");
                assert_eq!(a.unique, b.unique, "{kind} round {round}");
                if a.unique.is_proven() {
                    assert_eq!(a.best, b.best);
                }
                // the brute force optimum really beats every structure
                for s in all_canonical(n, kind) {
                    assert_ne!(exact.compare(&s, &a.best), RadicalOrdering::Greater);
                }
            }
        }
    }

    #[test]
    fn enumerate_optima_on_collinear_paths() {
        let ps = collinear(&[1, 2, 3, 4]);
        let o = enumerate_optima(&ps, StructureKind::Path, &Rat::zero(), &SolveOptions::default()).unwrap();
        assert!(o.complete && o.unresolved.is_empty());
        let ls = crate::line1d::LineSet::from_ints(&[1, 2, 3, 4]).unwrap();
        for s in all_canonical(4, StructureKind::Path) {
            let conforming = crate::line1d::is_longest_path_1d(&s, &ls).unwrap();
            assert_eq!(o.structures.contains(&s), conforming, "{s:?}");
        }
        // slack 1 also admits the paths of length 6
        let o = enumerate_optima(&ps, StructureKind::Path, &Rat::one(), &SolveOptions::default()).unwrap();
        let exact = ExactLengths::new(&ps, PrecisionPolicy::default());
        for s in &o.structures {
            assert!(exact.interval(s, 64).lo >= Rat::from_int(6));
        }
        let count_6 = all_canonical(4, StructureKind::Path)
            .into_iter()
            .filter(|s| exact.interval(s, 64).lo >= Rat::from_int(6))
            .count();
        assert_eq!(o.structures.len(), count_6);
    }

    #[test]
    fn candidate_limit_flags_truncation() {
        // collinear points have many tied optimal paths
        let ps = collinear(&(0..8).collect::<Vec<_>>());
        let o = SolveOptions { candidate_limit: 3, ..SolveOptions::default() };
        let r = max_path(&ps, &o).unwrap();
        assert!(r.stats.truncated);
        assert_eq!(r.best_length.lo, Rat::from_int(31));
    }
}
