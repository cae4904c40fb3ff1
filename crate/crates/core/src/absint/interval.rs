//! Intervals over 32-bit machine words.
//!
//! A range carries the view its bounds are written in; the same word set
//! can often be written in either view. Results that cannot be represented
//! as one range become [`Interval::Top`].

use core::fmt;

pub use crate::space::View;

/// Number of distinct machine words.
pub const WORD: i128 = 1 << 32;

const S_MIN: i64 = i32::MIN as i64;
const S_MAX: i64 = i32::MAX as i64;
const U_MAX: i64 = u32::MAX as i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Interval {
    Bottom,
    Range { lo: i64, hi: i64, view: View },
    Top,
}

/// Whether concrete executions of an operation can trap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fault {
    Never,
    Maybe,
    Always,
}

impl Interval {
    /// `[lo, hi]` under `view`; empty ranges are Bottom and ranges covering
    /// the whole view are Top.
    pub fn range(lo: i64, hi: i64, view: View) -> Interval {
        if lo > hi {
            return Interval::Bottom;
        }
        debug_assert!(view.contains(lo) && view.contains(hi), "[{lo}, {hi}] outside {view:?}");
        if lo <= view.min() && hi >= view.max() {
            Interval::Top
        } else {
            Interval::Range { lo, hi, view }
        }
    }

    pub fn signed(lo: i64, hi: i64) -> Interval {
        Interval::range(lo, hi, View::Signed)
    }

    pub fn unsigned(lo: i64, hi: i64) -> Interval {
        Interval::range(lo, hi, View::Unsigned)
    }

    /// The singleton holding `w`, written in the signed view.
    pub fn word(w: u32) -> Interval {
        let v = w as i32 as i64;
        Interval::Range {
            lo: v,
            hi: v,
            view: View::Signed,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Interval::Bottom)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Interval::Top)
    }

    /// The single word this interval denotes, if it denotes exactly one.
    pub fn as_word(&self) -> Option<u32> {
        match *self {
            Interval::Range { lo, hi, .. } if lo == hi => Some(lo as u32),
            _ => None,
        }
    }

    /// Number of words denoted.
    pub fn cardinality(&self) -> u64 {
        match *self {
            Interval::Bottom => 0,
            Interval::Range { lo, hi, .. } => (hi - lo + 1) as u64,
            Interval::Top => 1 << 32,
        }
    }

    pub fn contains_word(&self, w: u32) -> bool {
        match *self {
            Interval::Bottom => false,
            Interval::Top => true,
            Interval::Range { lo, hi, view } => {
                let v = view.of_word(w);
                lo <= v && v <= hi
            }
        }
    }

    /// Bounds under `view`, or `None` when the word set is not contiguous
    /// in that view (or is empty). Top is the full view.
    pub fn bounds(&self, view: View) -> Option<(i64, i64)> {
        match *self {
            Interval::Bottom => None,
            Interval::Top => Some((view.min(), view.max())),
            Interval::Range { lo, hi, view: v } if v == view => Some((lo, hi)),
            Interval::Range { lo, hi, view: v } => match (v, view) {
                (View::Signed, View::Unsigned) => {
                    if lo >= 0 {
                        Some((lo, hi))
                    } else if hi < 0 {
                        Some((lo + WORD as i64, hi + WORD as i64))
                    } else {
                        None
                    }
                }
                _ => {
                    if hi <= S_MAX {
                        Some((lo, hi))
                    } else if lo > S_MAX {
                        Some((lo - WORD as i64, hi - WORD as i64))
                    } else {
                        None
                    }
                }
            },
        }
    }

    /// Bounds under `view`, widening to the full view when the set is not
    /// contiguous there. `None` only for Bottom.
    pub fn bounds_or_full(&self, view: View) -> Option<(i64, i64)> {
        if self.is_bottom() {
            return None;
        }
        Some(self.bounds(view).unwrap_or((view.min(), view.max())))
    }

    /// Bounds in the interval's own view; Top is the full signed range.
    fn any_bounds(&self) -> Option<(i64, i64)> {
        match *self {
            Interval::Bottom => None,
            Interval::Top => Some((S_MIN, S_MAX)),
            Interval::Range { lo, hi, .. } => Some((lo, hi)),
        }
    }

    pub fn to_view(&self, view: View) -> Interval {
        match self {
            Interval::Bottom | Interval::Top => *self,
            _ => match self.bounds(view) {
                Some((lo, hi)) => Interval::range(lo, hi, view),
                None => Interval::Top,
            },
        }
    }

    pub fn join(&self, other: &Interval) -> Interval {
        match (*self, *other) {
            (Interval::Bottom, x) | (x, Interval::Bottom) => x,
            (Interval::Top, _) | (_, Interval::Top) => Interval::Top,
            (Interval::Range { lo, hi, view }, _) => {
                if let Some((l2, h2)) = other.bounds(view) {
                    return Interval::range(lo.min(l2), hi.max(h2), view);
                }
                let Interval::Range { view: v2, lo: l2, hi: h2 } = *other else {
                    unreachable!()
                };
                match self.bounds(v2) {
                    Some((l1, h1)) => Interval::range(l1.min(l2), h1.max(h2), v2),
                    None => Interval::Top,
                }
            }
        }
    }

    /// Intersection. When the two sets cannot be intersected within one
    /// view the left operand is kept, which still over-approximates.
    pub fn meet(&self, other: &Interval) -> Interval {
        match (*self, *other) {
            (Interval::Bottom, _) | (_, Interval::Bottom) => Interval::Bottom,
            (Interval::Top, x) | (x, Interval::Top) => x,
            (Interval::Range { lo, hi, view }, _) => {
                if let Some((l2, h2)) = other.bounds(view) {
                    return Interval::range(lo.max(l2), hi.min(h2), view);
                }
                let Interval::Range { view: v2, lo: l2, hi: h2 } = *other else {
                    unreachable!()
                };
                match self.bounds(v2) {
                    Some((l1, h1)) => Interval::range(l1.max(l2), h1.min(h2), v2),
                    None => *self,
                }
            }
        }
    }

    /// Whether every word of `self` is in `other`.
    pub fn is_subset(&self, other: &Interval) -> bool {
        match (*self, *other) {
            (Interval::Bottom, _) | (_, Interval::Top) => true,
            (_, Interval::Bottom) | (Interval::Top, _) => false,
            (Interval::Range { lo, hi, view }, _) => match other.bounds(view) {
                Some((l2, h2)) => l2 <= lo && hi <= h2,
                None => {
                    let Interval::Range { lo: l2, hi: h2, view: v2 } = *other else {
                        unreachable!()
                    };
                    self.bounds(v2).is_some_and(|(l, h)| l2 <= l && h <= h2)
                }
            },
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Bottom => f.write_str("bottom"),
            Interval::Top => f.write_str("top"),
            Interval::Range { lo, hi, view } => {
                let tag = match view {
                    View::Signed => 's',
                    View::Unsigned => 'u',
                };
                write!(f, "[{lo}, {hi}]{tag}")
            }
        }
    }
}

/// The words `{x mod 2^32 | lo <= x <= hi}` as one interval, signed view
/// preferred.
pub fn wrap(lo: i128, hi: i128) -> Interval {
    if lo > hi {
        return Interval::Bottom;
    }
    if hi - lo >= WORD - 1 {
        return Interval::Top;
    }
    let half = WORD / 2;
    let k = (lo + half).div_euclid(WORD);
    if (hi + half).div_euclid(WORD) == k {
        let base = k * WORD;
        return Interval::signed((lo - base) as i64, (hi - base) as i64);
    }
    let k = lo.div_euclid(WORD);
    if hi.div_euclid(WORD) == k {
        let base = k * WORD;
        return Interval::unsigned((lo - base) as i64, (hi - base) as i64);
    }
    Interval::Top
}

fn in_view(lo: i64, hi: i64, view: View) -> Interval {
    if view.contains(lo) && view.contains(hi) {
        Interval::range(lo, hi, view)
    } else {
        Interval::Top
    }
}

/// Interval addition in the view of `a`; Top on leaving the view.
pub fn iv_add(a: &Interval, b: &Interval) -> Interval {
    binary_in_view(a, b, |(al, ah), (bl, bh)| (al + bl, ah + bh))
}

/// Interval subtraction in the view of `a`; Top on leaving the view.
pub fn iv_sub(a: &Interval, b: &Interval) -> Interval {
    binary_in_view(a, b, |(al, ah), (bl, bh)| (al - bh, ah - bl))
}

fn binary_in_view(a: &Interval, b: &Interval, f: impl Fn((i64, i64), (i64, i64)) -> (i64, i64)) -> Interval {
    if a.is_bottom() || b.is_bottom() {
        return Interval::Bottom;
    }
    let view = match a {
        Interval::Range { view, .. } => *view,
        _ => match b {
            Interval::Range { view, .. } => *view,
            _ => return Interval::Top,
        },
    };
    let (Some(x), Some(y)) = (a.bounds(view), b.bounds(view)) else {
        return Interval::Top;
    };
    let (lo, hi) = f(x, y);
    in_view(lo, hi, view)
}

/// Modular (wrapping) addition.
pub fn add_mod(a: &Interval, b: &Interval) -> Interval {
    match (a.any_bounds(), b.any_bounds()) {
        (Some((al, ah)), Some((bl, bh))) => wrap(al as i128 + bl as i128, ah as i128 + bh as i128),
        _ => Interval::Bottom,
    }
}

/// Modular (wrapping) subtraction.
pub fn sub_mod(a: &Interval, b: &Interval) -> Interval {
    match (a.any_bounds(), b.any_bounds()) {
        (Some((al, ah)), Some((bl, bh))) => wrap(al as i128 - bh as i128, ah as i128 - bl as i128),
        _ => Interval::Bottom,
    }
}

fn trapping(lo: i64, hi: i64) -> (Interval, Fault) {
    if hi < S_MIN || lo > S_MAX {
        return (Interval::Bottom, Fault::Always);
    }
    let fault = if lo < S_MIN || hi > S_MAX {
        Fault::Maybe
    } else {
        Fault::Never
    };
    (Interval::signed(lo.max(S_MIN), hi.min(S_MAX)), fault)
}

/// Signed addition that traps on overflow: the non-trapping results and
/// whether a trap is possible.
pub fn add_trap(a: &Interval, b: &Interval) -> (Interval, Fault) {
    match (a.bounds_or_full(View::Signed), b.bounds_or_full(View::Signed)) {
        (Some((al, ah)), Some((bl, bh))) => trapping(al + bl, ah + bh),
        _ => (Interval::Bottom, Fault::Never),
    }
}

pub fn sub_trap(a: &Interval, b: &Interval) -> (Interval, Fault) {
    match (a.bounds_or_full(View::Signed), b.bounds_or_full(View::Signed)) {
        (Some((al, ah)), Some((bl, bh))) => trapping(al - bh, ah - bl),
        _ => (Interval::Bottom, Fault::Never),
    }
}

/// Smallest all-ones mask covering `x`.
fn mask_above(x: i64) -> i64 {
    if x <= 0 {
        0
    } else {
        (1i64 << (64 - (x as u64).leading_zeros())) - 1
    }
}

fn both_words(a: &Interval, b: &Interval) -> Option<(u32, u32)> {
    Some((a.as_word()?, b.as_word()?))
}

fn unsigned_pair(a: &Interval, b: &Interval) -> Option<((i64, i64), (i64, i64))> {
    Some((a.bounds_or_full(View::Unsigned)?, b.bounds_or_full(View::Unsigned)?))
}

pub fn iv_and(a: &Interval, b: &Interval) -> Interval {
    if let Some((x, y)) = both_words(a, b) {
        return Interval::word(x & y);
    }
    match unsigned_pair(a, b) {
        Some(((_, ah), (_, bh))) => Interval::unsigned(0, ah.min(bh)),
        None => Interval::Bottom,
    }
}

pub fn iv_or(a: &Interval, b: &Interval) -> Interval {
    if let Some((x, y)) = both_words(a, b) {
        return Interval::word(x | y);
    }
    match unsigned_pair(a, b) {
        Some(((al, ah), (bl, bh))) => Interval::unsigned(al.max(bl), mask_above(ah.max(bh))),
        None => Interval::Bottom,
    }
}

pub fn iv_xor(a: &Interval, b: &Interval) -> Interval {
    if let Some((x, y)) = both_words(a, b) {
        return Interval::word(x ^ y);
    }
    match unsigned_pair(a, b) {
        Some(((_, ah), (_, bh))) => Interval::unsigned(0, mask_above(ah.max(bh))),
        None => Interval::Bottom,
    }
}

pub fn iv_nor(a: &Interval, b: &Interval) -> Interval {
    if let Some((x, y)) = both_words(a, b) {
        return Interval::word(!(x | y));
    }
    match iv_or(a, b).bounds_or_full(View::Unsigned) {
        Some((l, h)) => Interval::unsigned(U_MAX - h, U_MAX - l),
        None => Interval::Bottom,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    Left,
    RightLogical,
    RightArith,
}

/// Shift `value` by `amount`, of which only the low five bits count.
pub fn iv_shift(kind: Shift, value: &Interval, amount: &Interval) -> Interval {
    if value.is_bottom() || amount.is_bottom() {
        return Interval::Bottom;
    }
    if let Some((x, k)) = both_words(value, amount) {
        let k = k & 31;
        return Interval::word(match kind {
            Shift::Left => x << k,
            Shift::RightLogical => x >> k,
            Shift::RightArith => ((x as i32) >> k) as u32,
        });
    }
    let (k1, k2) = match amount.bounds_or_full(View::Unsigned) {
        Some((l, h)) if h <= 31 => (l as u32, h as u32),
        _ => (0, 31),
    };
    match kind {
        Shift::Left => {
            let (l, h) = value.any_bounds().unwrap();
            let (l, h) = (l as i128, h as i128);
            if l >= 0 {
                wrap(l << k1, h << k2)
            } else if h <= 0 {
                wrap(l << k2, h << k1)
            } else {
                wrap(l << k2, h << k2)
            }
        }
        Shift::RightLogical => {
            let (l, h) = value.bounds_or_full(View::Unsigned).unwrap();
            Interval::unsigned(l >> k2, h >> k1)
        }
        Shift::RightArith => {
            let (l, h) = value.bounds_or_full(View::Signed).unwrap();
            Interval::signed((l >> k1).min(l >> k2), (h >> k1).max(h >> k2))
        }
    }
}

fn compare(a: &Interval, b: &Interval, view: View) -> Interval {
    match (a.bounds_or_full(view), b.bounds_or_full(view)) {
        (Some((al, ah)), Some((bl, bh))) => {
            if ah < bl {
                Interval::word(1)
            } else if al >= bh {
                Interval::word(0)
            } else {
                Interval::signed(0, 1)
            }
        }
        _ => Interval::Bottom,
    }
}

pub fn iv_slt(a: &Interval, b: &Interval) -> Interval {
    compare(a, b, View::Signed)
}

pub fn iv_sltu(a: &Interval, b: &Interval) -> Interval {
    compare(a, b, View::Unsigned)
}

/// Full 64-bit product split into `(hi, lo)` words.
pub fn iv_mult(a: &Interval, b: &Interval, view: View) -> (Interval, Interval) {
    let (Some((al, ah)), Some((bl, bh))) = (a.bounds_or_full(view), b.bounds_or_full(view)) else {
        return (Interval::Bottom, Interval::Bottom);
    };
    let corners = [
        al as i128 * bl as i128,
        al as i128 * bh as i128,
        ah as i128 * bl as i128,
        ah as i128 * bh as i128,
    ];
    let pmin = *corners.iter().min().unwrap();
    let pmax = *corners.iter().max().unwrap();
    let hi = Interval::range((pmin >> 32) as i64, (pmax >> 32) as i64, view);
    (hi, wrap(pmin, pmax))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivOut {
    pub quot: Interval,
    pub rem: Interval,
    pub fault: Fault,
}

/// Division with truncation toward zero; a zero divisor traps.
pub fn iv_div(a: &Interval, b: &Interval, view: View) -> DivOut {
    let bottom = DivOut {
        quot: Interval::Bottom,
        rem: Interval::Bottom,
        fault: Fault::Never,
    };
    let (Some((al, ah)), Some((bl, bh))) = (a.bounds_or_full(view), b.bounds_or_full(view)) else {
        return bottom;
    };
    if let (Some(x), Some(y)) = (a.as_word(), b.as_word()) {
        if y == 0 {
            return DivOut {
                fault: Fault::Always,
                ..bottom
            };
        }
        let (q, r) = match view {
            View::Signed => (
                (x as i32).wrapping_div(y as i32) as u32,
                (x as i32).wrapping_rem(y as i32) as u32,
            ),
            View::Unsigned => (x / y, x % y),
        };
        return DivOut {
            quot: Interval::word(q),
            rem: Interval::word(r),
            fault: Fault::Never,
        };
    }
    let mut parts = [None, None];
    if bl <= -1 {
        parts[0] = Some((bl, bh.min(-1)));
    }
    if bh >= 1 {
        parts[1] = Some((bl.max(1), bh));
    }
    let fault = if bl <= 0 && 0 <= bh {
        if bl == bh {
            return DivOut {
                fault: Fault::Always,
                ..bottom
            };
        }
        Fault::Maybe
    } else {
        Fault::Never
    };
    let mut qmin = i128::MAX;
    let mut qmax = i128::MIN;
    let mut m: i64 = 0;
    for (pl, ph) in parts.into_iter().flatten() {
        for x in [al, ah] {
            for y in [pl, ph] {
                let q = x as i128 / y as i128;
                qmin = qmin.min(q);
                qmax = qmax.max(q);
            }
        }
        m = m.max(pl.abs()).max(ph.abs());
    }
    let quot = match view {
        View::Signed => wrap(qmin, qmax),
        View::Unsigned => Interval::unsigned(qmin as i64, qmax as i64),
    };
    let rem = if al >= 0 {
        Interval::range(0, ah.min(m - 1), view)
    } else if ah <= 0 {
        Interval::signed(al.max(-(m - 1)), 0)
    } else {
        Interval::signed(al.max(-(m - 1)), ah.min(m - 1))
    };
    DivOut { quot, rem, fault }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchKind {
    Eq,
    Ne,
    Lez,
    Gtz,
    Ltz,
    Gez,
}

/// Operands refined under one branch outcome, or `None` if the outcome is
/// impossible.
pub type Refined = Option<(Interval, Interval)>;

fn remove_endpoint(a: &Interval, b: &Interval) -> Interval {
    let (Interval::Range { lo, hi, view }, Some(w)) = (*a, b.as_word()) else {
        return *a;
    };
    let v = view.of_word(w);
    if lo == v && hi == v {
        Interval::Bottom
    } else if lo == v {
        Interval::range(lo + 1, hi, view)
    } else if hi == v {
        Interval::range(lo, hi - 1, view)
    } else {
        *a
    }
}

fn pair(a: Interval, b: Interval) -> Refined {
    (!a.is_bottom() && !b.is_bottom()).then_some((a, b))
}

/// Splits the operands of a branch into `(taken, not_taken)` refinements.
/// `sb` is ignored by the compare-with-zero kinds.
pub fn refine_branch(kind: BranchKind, sa: &Interval, sb: &Interval) -> (Refined, Refined) {
    if sa.is_bottom() || sb.is_bottom() {
        return (None, None);
    }
    let equal = || {
        let m = sa.meet(sb);
        pair(m, sb.meet(&m))
    };
    let unequal = || {
        if let (Some(x), Some(y)) = (sa.as_word(), sb.as_word()) {
            return (x != y).then_some((*sa, *sb));
        }
        pair(remove_endpoint(sa, sb), remove_endpoint(sb, sa))
    };
    let sign = |lo: i64, hi: i64| pair(sa.meet(&Interval::signed(lo, hi)), *sb);
    match kind {
        BranchKind::Eq => (equal(), unequal()),
        BranchKind::Ne => (unequal(), equal()),
        BranchKind::Lez => (sign(S_MIN, 0), sign(1, S_MAX)),
        BranchKind::Gtz => (sign(1, S_MAX), sign(S_MIN, 0)),
        BranchKind::Ltz => (sign(S_MIN, -1), sign(0, S_MAX)),
        BranchKind::Gez => (sign(0, S_MAX), sign(S_MIN, -1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(lo: i64, hi: i64) -> Interval {
        Interval::signed(lo, hi)
    }

    fn u(lo: i64, hi: i64) -> Interval {
        Interval::unsigned(lo, hi)
    }

    #[test]
    fn add_bounds() {
        assert_eq!(iv_add(&s(1, 3), &s(2, 5)), s(3, 8));
        assert_eq!(iv_add(&s(S_MAX, S_MAX), &s(1, 1)), Interval::Top);
        assert_eq!(iv_sub(&s(1, 3), &s(2, 5)), s(-4, 1));
        assert_eq!(iv_add(&Interval::Bottom, &s(1, 1)), Interval::Bottom);
    }

    #[test]
    fn modular_add_rebases() {
        assert_eq!(add_mod(&s(S_MAX, S_MAX), &s(1, 1)), Interval::word(0x8000_0000));
        assert_eq!(add_mod(&s(S_MAX - 1, S_MAX), &s(0, 2)), u(S_MAX - 1, S_MAX + 2));
        assert_eq!(add_mod(&u(0, U_MAX - 1), &s(0, 1)), Interval::Top);
        assert_eq!(sub_mod(&s(0, 0), &s(1, 1)), s(-1, -1));
    }

    #[test]
    fn trapping_add() {
        assert_eq!(add_trap(&s(1, 2), &s(3, 3)), (s(4, 5), Fault::Never));
        assert_eq!(add_trap(&s(S_MAX - 1, S_MAX), &s(1, 1)), (s(S_MAX, S_MAX), Fault::Maybe));
        assert_eq!(add_trap(&s(S_MAX, S_MAX), &s(1, 1)).1, Fault::Always);
    }

    #[test]
    fn slt() {
        assert_eq!(iv_slt(&s(0, 3), &s(10, 10)), Interval::word(1));
        assert_eq!(iv_slt(&s(10, 13), &s(10, 10)), Interval::word(0));
        assert_eq!(iv_slt(&s(0, 13), &s(10, 10)), s(0, 1));
        assert_eq!(iv_sltu(&s(-1, -1), &s(0, 5)), Interval::word(0));
    }

    #[test]
    fn bitwise() {
        assert_eq!(iv_and(&s(0xF0, 0xF0), &s(0x3C, 0x3C)), s(0x30, 0x30));
        assert_eq!(iv_and(&Interval::Top, &s(7, 7)), u(0, 7));
        assert_eq!(iv_or(&u(1, 5), &u(8, 8)), u(8, 15));
        assert_eq!(iv_xor(&u(0, 9), &u(3, 3)), u(0, 15));
        assert_eq!(iv_nor(&u(0, 3), &u(0, 0)), u(U_MAX - 3, U_MAX));
        assert_eq!(iv_xor(&s(-1, 1), &u(3, 3)), Interval::Top);
    }

    #[test]
    fn shifts() {
        let k = |n: u32| Interval::word(n);
        assert_eq!(iv_shift(Shift::Left, &s(1, 3), &k(2)), s(4, 12));
        assert_eq!(iv_shift(Shift::RightLogical, &s(-8, -8), &k(28)), Interval::word(15));
        assert_eq!(iv_shift(Shift::RightArith, &s(-8, 8), &k(2)), s(-2, 2));
        assert_eq!(iv_shift(Shift::RightLogical, &u(16, 64), &u(1, 3)), u(2, 32));
        assert_eq!(iv_shift(Shift::Left, &s(0, 1), &k(31)), u(0, 0x8000_0000));
    }

    #[test]
    fn multiply_and_divide() {
        assert_eq!(iv_mult(&s(-2, 3), &s(4, 5), View::Signed), (s(-1, 0), s(-10, 15)));
        let d = iv_div(&s(7, 20), &s(2, 3), View::Signed);
        assert_eq!((d.quot, d.rem, d.fault), (s(2, 10), s(0, 2), Fault::Never));
        assert_eq!(iv_div(&s(1, 1), &s(0, 0), View::Signed).fault, Fault::Always);
        let d = iv_div(&s(-9, 9), &s(-1, 2), View::Signed);
        assert_eq!(d.fault, Fault::Maybe);
        assert_eq!(d.quot, s(-9, 9));
        assert_eq!(d.rem, s(-1, 1));
        let d = iv_div(&u(10, 100), &u(0, 7), View::Unsigned);
        assert_eq!((d.quot, d.rem), (u(1, 100), u(0, 6)));
    }

    #[test]
    fn lattice() {
        assert_eq!(s(0, 1).join(&s(5, 9)), s(0, 9));
        assert_eq!(s(0, 4).meet(&s(3, 9)), s(3, 4));
        assert_eq!(s(0, 1).meet(&s(5, 9)), Interval::Bottom);
        assert_eq!(s(-1, -1).join(&u(5, 5)), s(-1, 5));
        assert_eq!(s(-1, 1).join(&u(U_MAX - 1, U_MAX)), s(-2, 1));
        assert_eq!(u(0, 10).meet(&Interval::Top), u(0, 10));
        assert_eq!(s(-2, 2).to_view(View::Unsigned), Interval::Top);
        assert_eq!(s(-2, -1).to_view(View::Unsigned), u(U_MAX - 1, U_MAX));
        assert_eq!(Interval::signed(S_MIN, S_MAX), Interval::Top);
    }

    #[test]
    fn refinement() {
        let z = s(0, 0);
        assert_eq!(refine_branch(BranchKind::Eq, &z, &z), (Some((z, z)), None));
        let (t, f) = refine_branch(BranchKind::Ne, &s(0, 5), &s(3, 3));
        assert_eq!(t, Some((s(0, 5), s(3, 3))));
        assert_eq!(f, Some((s(3, 3), s(3, 3))));
        let (t, f) = refine_branch(BranchKind::Gez, &s(-4, 7), &z);
        assert_eq!(t.unwrap().0, s(0, 7));
        assert_eq!(f.unwrap().0, s(-4, -1));
        let (t, f) = refine_branch(BranchKind::Ne, &s(0, 5), &z);
        assert_eq!(t.unwrap().0, s(1, 5));
        assert_eq!(f.unwrap().0, z);
        let (t, f) = refine_branch(BranchKind::Ne, &s(1, 5), &z);
        assert_eq!(t.unwrap().0, s(1, 5));
        assert_eq!(f, None);
    }

    #[test]
    fn wrap_prefers_signed() {
        assert_eq!(wrap(-3, 3), s(-3, 3));
        assert_eq!(wrap(WORD - 1, WORD + 1), s(-1, 1));
        assert_eq!(wrap(0x7fff_fff0, 0x8000_0010), u(0x7fff_fff0, 0x8000_0010));
        assert_eq!(wrap(0, WORD - 1), Interval::Top);
    }
}
