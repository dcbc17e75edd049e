//! Longest paths and cycles on the real line.
//!
//! Structures over a [`LineSet`] use indices into its sorted values. The
//! characterizations here are checked against exhaustive enumeration in the
//! tests; the closed forms count how many edges run over each gap between
//! consecutive values.

use alloc::vec::Vec;
use core::fmt;

use crate::exactnum::Rat;
use crate::geometry::{GeometryError, Structure, StructureKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Line1dError {
    Empty,
    Duplicate(Rat),
    /// The statement only covers the other parity.
    UnsupportedParity {
        n: usize,
    },
    TooFew {
        n: usize,
        min: usize,
    },
    Structure(GeometryError),
}

impl fmt::Display for Line1dError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line1dError::Empty => write!(f, "empty value set"),
            Line1dError::Duplicate(v) => write!(f, "duplicate value {v}"),
            Line1dError::UnsupportedParity { n } => write!(f, "not supported for {n} values"),
            Line1dError::TooFew { n, min } => write!(f, "{n} values, need at least {min}"),
            Line1dError::Structure(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeometryError> for Line1dError {
    fn from(e: GeometryError) -> Self {
        Line1dError::Structure(e)
    }
}

/// Strictly increasing distinct values on a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineSet {
    values: Vec<Rat>,
}

impl LineSet {
    /// Sorts the values; duplicates are rejected.
    pub fn new(mut values: Vec<Rat>) -> Result<Self, Line1dError> {
        if values.is_empty() {
            return Err(Line1dError::Empty);
        }
        values.sort();
        if let Some(w) = values.windows(2).find(|w| w[0] == w[1]) {
            return Err(Line1dError::Duplicate(w[0].clone()));
        }
        Ok(LineSet { values })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self, Line1dError> {
        LineSet::new(values.iter().map(|&v| Rat::from_int(v)).collect())
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn median(&self) -> Rat {
        median(self)
    }

    /// Index of a value, if present.
    pub fn index_of(&self, v: &Rat) -> Option<usize> {
        self.values.binary_search(v).ok()
    }

    fn gap(&self, i: usize) -> Rat {
        &self.values[i + 1] - &self.values[i]
    }

    /// Length of a structure over this set.
    pub fn length(&self, s: &Structure) -> Rat {
        s.edges().iter().map(|&(a, b)| (&self.values[a] - &self.values[b]).abs()).sum()
    }
}

/// Middle value for odd counts, mean of the two middle values for even.
pub fn median(ls: &LineSet) -> Rat {
    let n = ls.values.len();
    if n % 2 == 1 {
        ls.values[n / 2].clone()
    } else {
        (&ls.values[n / 2 - 1] + &ls.values[n / 2]) * Rat::frac(1, 2)
    }
}

/// The closed interval spanned by the edge contains `m`.
fn edge_meets(ls: &LineSet, a: usize, b: usize, m: &Rat) -> bool {
    let (lo, hi) =
        if ls.values[a] <= ls.values[b] { (&ls.values[a], &ls.values[b]) } else { (&ls.values[b], &ls.values[a]) };
    lo <= m && m <= hi
}

fn expect_kind(s: &Structure, kind: StructureKind, n: usize) -> Result<(), Line1dError> {
    if s.kind() != kind {
        return Err(GeometryError::WrongKind { expected: kind, found: s.kind() }.into());
    }
    s.validate(n)?;
    Ok(())
}

/// For an even count: every edge meets the median and the endpoints are the
/// two values closest to it.
pub fn is_longest_path_1d(path: &Structure, ls: &LineSet) -> Result<bool, Line1dError> {
    let n = ls.len();
    if n % 2 == 1 {
        return Err(Line1dError::UnsupportedParity { n });
    }
    expect_kind(path, StructureKind::Path, n)?;
    let m = ls.median();
    let all_meet = path.edges().iter().all(|&(a, b)| edge_meets(ls, a, b, &m));
    let order = path.order().unwrap();
    let mut ends = [order[0], order[n - 1]];
    ends.sort_unstable();
    Ok(all_meet && ends == [n / 2 - 1, n / 2])
}

/// Odd-count variant: every edge meets the median, one endpoint is the
/// median and the other is a value closest to it.
pub fn is_longest_path_1d_odd(path: &Structure, ls: &LineSet) -> Result<bool, Line1dError> {
    let n = ls.len();
    if n.is_multiple_of(2) {
        return Err(Line1dError::UnsupportedParity { n });
    }
    expect_kind(path, StructureKind::Path, n)?;
    if n == 1 {
        return Ok(true);
    }
    let mid = n / 2;
    let m = &ls.values[mid];
    let all_meet = path.edges().iter().all(|&(a, b)| edge_meets(ls, a, b, m));
    let order = path.order().unwrap();
    let (s, e) = (order[0], order[n - 1]);
    let other = if s == mid {
        e
    } else if e == mid {
        s
    } else {
        return Ok(false);
    };
    let dist = |i: usize| (&ls.values[i] - m).abs();
    let closest = dist(mid - 1).min(dist(mid + 1));
    Ok(all_meet && dist(other) == closest)
}

/// Every edge meets the median; for odd counts the two edges at the median
/// go to opposite sides.
pub fn is_longest_cycle_1d(cycle: &Structure, ls: &LineSet) -> Result<bool, Line1dError> {
    let n = ls.len();
    if n < 3 {
        return Err(Line1dError::TooFew { n, min: 3 });
    }
    expect_kind(cycle, StructureKind::Cycle, n)?;
    let m = ls.median();
    if !cycle.edges().iter().all(|&(a, b)| edge_meets(ls, a, b, &m)) {
        return Ok(false);
    }
    if n % 2 == 1 {
        let mid = n / 2;
        let order = cycle.order().unwrap();
        let pos = order.iter().position(|&i| i == mid).unwrap();
        let prev = order[(pos + n - 1) % n];
        let next = order[(pos + 1) % n];
        if (prev < mid) == (next < mid) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Endpoints of a path lie strictly on different sides of the median.
pub fn endpoints_straddle_median(path: &Structure, ls: &LineSet) -> bool {
    let Some(order) = path.order() else { return false };
    let m = ls.median();
    let (a, b) = (&ls.values[order[0]], &ls.values[order[order.len() - 1]]);
    (a < &m && b > &m) || (a > &m && b < &m)
}

/// Closed-form optimum for an even count `n = 2m`: the central gap is
/// covered by all `n - 1` edges, the `j`-th gap out from the centre on
/// either side by `2(m - j)` edges.
pub fn longest_path_length_1d(ls: &LineSet) -> Result<Rat, Line1dError> {
    let n = ls.len();
    if n % 2 == 1 {
        return Err(Line1dError::UnsupportedParity { n });
    }
    let m = n / 2;
    let mut total = ls.gap(m - 1) * Rat::from_int((n - 1) as i64);
    for j in 1..m {
        let mult = Rat::from_int(2 * (m - j) as i64);
        total += &(ls.gap(m - 1 + j) * &mult);
        total += &(ls.gap(m - 1 - j) * &mult);
    }
    Ok(total)
}

/// Closed-form optimum cycle length.
///
/// Even `n = 2m`: the central gap is covered `n` times, the `j`-th gap out
/// `2(m - j)` times. Odd `n = 2k + 1`: every edge meets the median value, so
/// the `j`-th gap on either side of it is covered twice per value beyond
/// it, `2(k - j + 1)` times.
pub fn longest_cycle_length_1d(ls: &LineSet) -> Result<Rat, Line1dError> {
    let n = ls.len();
    if n < 3 {
        return Err(Line1dError::TooFew { n, min: 3 });
    }
    let mut total = Rat::zero();
    if n.is_multiple_of(2) {
        let m = n / 2;
        total += &(ls.gap(m - 1) * Rat::from_int(n as i64));
        for j in 1..m {
            let mult = Rat::from_int(2 * (m - j) as i64);
            total += &(ls.gap(m - 1 + j) * &mult);
            total += &(ls.gap(m - 1 - j) * &mult);
        }
    } else {
        let k = n / 2;
        for j in 1..=k {
            let mult = Rat::from_int(2 * (k - j + 1) as i64);
            total += &(ls.gap(k + j - 1) * &mult);
            total += &(ls.gap(k - j) * &mult);
        }
    }
    Ok(total)
}

/// Certified lower bound on how much shorter `cycle` is than an optimal
/// cycle, for `n = 2k + 1`: with `I` the gap between the leftmost `k + 1`
/// and the rightmost `k` values and `h` its length, a cycle with fewer than
/// `2k` edges over `I` loses at least `2h`.
pub fn cycle_deficit_lemma_check(ls: &LineSet, cycle: &Structure) -> Result<Rat, Line1dError> {
    let n = ls.len();
    if n.is_multiple_of(2) {
        return Err(Line1dError::UnsupportedParity { n });
    }
    if n < 3 {
        return Err(Line1dError::TooFew { n, min: 3 });
    }
    expect_kind(cycle, StructureKind::Cycle, n)?;
    let k = n / 2;
    let through = edges_over_gap(cycle, k);
    if through < 2 * k {
        Ok(ls.gap(k) * Rat::from_int(2))
    } else {
        Ok(Rat::zero())
    }
}

/// Number of edges spanning the gap between sorted indices `i` and `i + 1`.
pub fn edges_over_gap(s: &Structure, i: usize) -> usize {
    s.edges().iter().filter(|&&(a, b)| a.min(b) <= i && a.max(b) > i).count()
}
