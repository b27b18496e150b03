//! Finite unions of disjoint real intervals.
//!
//! Boundary comparisons are exact IEEE comparisons; each endpoint carries its
//! own open/closed flag. Infinite endpoints are always open.

use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub closed: bool,
}

impl Bound {
    pub fn closed(value: f64) -> Self {
        Self { value, closed: value.is_finite() }
    }

    pub fn open(value: f64) -> Self {
        Self { value, closed: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound) -> Self {
        // Normalize: an infinite endpoint can never be attained.
        let lo = if lo.value.is_finite() { lo } else { Bound::open(lo.value) };
        let hi = if hi.value.is_finite() { hi } else { Bound::open(hi.value) };
        Self { lo, hi }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(Bound::closed(lo), Bound::closed(hi))
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(Bound::open(lo), Bound::open(hi))
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: f64, hi: f64) -> Self {
        Self::new(Bound::closed(lo), Bound::open(hi))
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.value.partial_cmp(&self.hi.value) {
            Some(Ordering::Less) => false,
            Some(Ordering::Equal) => !(self.lo.closed && self.hi.closed),
            _ => true,
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        let above = y > self.lo.value || (y == self.lo.value && self.lo.closed);
        let below = y < self.hi.value || (y == self.hi.value && self.hi.closed);
        above && below
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.value.is_finite() && self.hi.value.is_finite()
    }

    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi.value - self.lo.value
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = match self.lo.value.partial_cmp(&other.lo.value) {
            Some(Ordering::Greater) => self.lo,
            Some(Ordering::Less) => other.lo,
            _ => Bound { value: self.lo.value, closed: self.lo.closed && other.lo.closed },
        };
        let hi = match self.hi.value.partial_cmp(&other.hi.value) {
            Some(Ordering::Less) => self.hi,
            Some(Ordering::Greater) => other.hi,
            _ => Bound { value: self.hi.value, closed: self.hi.closed && other.hi.closed },
        };
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo.closed { '[' } else { '(' };
        let close = if self.hi.closed { ']' } else { ')' };
        write!(f, "{open}{},{}{close}", self.lo.value, self.hi.value)
    }
}

/// A prediction set: sorted, pairwise disjoint intervals.
///
/// `length_window`, when set, is the range that unbounded ends are clipped to
/// for length reporting. Membership always uses the unclipped intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    intervals: Vec<Interval>,
    length_window: Option<(f64, f64)>,
    clipped: bool,
}

impl PredictionSet {
    pub fn empty() -> Self {
        Self { intervals: Vec::new(), length_window: None, clipped: false }
    }

    /// Builds the union of `intervals`, merging overlapping or touching pieces.
    pub fn from_union<I: IntoIterator<Item = Interval>>(intervals: I) -> Self {
        let mut pieces: Vec<Interval> = intervals.into_iter().filter(|iv| !iv.is_empty()).collect();
        pieces.sort_by(|a, b| {
            a.lo.value
                .total_cmp(&b.lo.value)
                .then_with(|| b.lo.closed.cmp(&a.lo.closed))
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match merged.last_mut() {
                Some(cur)
                    if piece.lo.value < cur.hi.value
                        || (piece.lo.value == cur.hi.value && (piece.lo.closed || cur.hi.closed)) =>
                {
                    cur.hi = match piece.hi.value.partial_cmp(&cur.hi.value) {
                        Some(Ordering::Greater) => piece.hi,
                        Some(Ordering::Equal) => Bound {
                            value: cur.hi.value,
                            closed: cur.hi.closed || piece.hi.closed,
                        },
                        _ => cur.hi,
                    };
                }
                _ => merged.push(piece),
            }
        }
        Self { intervals: merged, length_window: None, clipped: false }
    }

    pub fn single(interval: Interval) -> Self {
        Self::from_union([interval])
    }

    /// Sets the window that unbounded ends are clipped to in [`length`](Self::length).
    pub fn with_length_window(mut self, lo: f64, hi: f64) -> Self {
        self.length_window = Some((lo, hi));
        self.clipped = self
            .intervals
            .iter()
            .any(|iv| !iv.lo.value.is_finite() || !iv.hi.value.is_finite());
        self
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn length_window(&self) -> Option<(f64, f64)> {
        self.length_window
    }

    /// True when an unbounded end was clipped to the length window.
    pub fn clipped(&self) -> bool {
        self.clipped
    }

    pub fn contains(&self, y: f64) -> bool {
        // Intervals are sorted and disjoint; find the last one starting at or below y.
        let idx = self.intervals.partition_point(|iv| iv.lo.value <= y);
        idx > 0 && self.intervals[idx - 1].contains(y)
    }

    /// Total width. Unbounded ends are clipped to the length window when one
    /// is set; otherwise an unbounded set has infinite length.
    pub fn length(&self) -> f64 {
        self.intervals
            .iter()
            .map(|iv| {
                let (mut lo, mut hi) = (iv.lo.value, iv.hi.value);
                if let Some((wlo, whi)) = self.length_window {
                    if !lo.is_finite() {
                        lo = wlo;
                    }
                    if !hi.is_finite() {
                        hi = whi;
                    }
                }
                (hi - lo).max(0.0)
            })
            .sum()
    }

    /// Smallest single interval containing the set. The empty set is returned unchanged.
    pub fn hull(&self) -> PredictionSet {
        let (Some(first), Some(last)) = (self.intervals.first(), self.intervals.last()) else {
            return self.clone();
        };
        let hull = PredictionSet {
            intervals: vec![Interval::new(first.lo, last.hi)],
            length_window: None,
            clipped: false,
        };
        match self.length_window {
            Some((lo, hi)) => hull.with_length_window(lo, hi),
            None => hull,
        }
    }

    /// The single hull interval, if the set is nonempty.
    pub fn hull_interval(&self) -> Option<Interval> {
        self.hull().intervals.first().copied()
    }
}

impl fmt::Display for PredictionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "empty");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}
