//! Finite unions of half-open intervals with endpoints in ℚπ, the sets
//! `S_n`, `W_n`, `F_n` and friends, and the tiling tests that decide
//! whether a set is a wavelet set.
//!
//! Intervals are always half-open `[lo, hi)`. Closed and half-open intervals
//! differ by finitely many points, which no a.e. statement can see, and the
//! half-open convention makes partition tests exact.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{pow2, rat_int, Rational, RationalPi};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: RationalPi,
    pub hi: RationalPi,
}

impl Interval {
    pub fn new(lo: RationalPi, hi: RationalPi) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn length(&self) -> RationalPi {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &RationalPi) -> bool {
        &self.lo <= x && x < &self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max_ref(&other.lo).clone();
        let hi = self.hi.min_ref(&other.hi).clone();
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// Image under `ξ ↦ 2^j ξ`.
    pub fn dilate(&self, j: i32) -> Interval {
        Interval::new(self.lo.scale_pow2(j), self.hi.scale_pow2(j))
    }

    /// Image under `ξ ↦ ξ + α`.
    pub fn shift(&self, alpha: &RationalPi) -> Interval {
        Interval::new(&self.lo + alpha, &self.hi + alpha)
    }

    /// Image under `ξ ↦ -ξ`, re-normalised to half-open form.
    pub fn negate(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }

    /// Pieces of this interval moved into `[base, base + 2π)` by integer
    /// multiples of 2π. Each entry carries `k` such that the piece was
    /// translated by `-2kπ`.
    pub fn reduce_mod_2pi(&self, base: &RationalPi) -> Vec<(BigInt, Interval)> {
        let mut out = Vec::new();
        if self.is_empty() {
            return out;
        }
        let mut k = (&self.lo - base).floor_2pi();
        loop {
            let offset = RationalPi::new(Rational::from_integer(&k * 2));
            let win = Interval::new(base + &offset, &(base + &offset) + &RationalPi::two_pi());
            if win.lo >= self.hi {
                break;
            }
            if let Some(part) = self.intersect(&win) {
                out.push((k.clone(), part.shift(&-&offset)));
            }
            k += 1;
        }
        out
    }

    /// Pieces of a positive interval moved into the dyadic band `[α, 2α)`.
    /// Each entry carries `j` such that the piece is `2^j` times a part of
    /// the original.
    pub fn reduce_dyadic(&self, alpha: &RationalPi) -> Vec<(i32, Interval)> {
        debug_assert!(self.lo.is_positive() && alpha.is_positive());
        let mut out = Vec::new();
        if self.is_empty() {
            return out;
        }
        let two_alpha = alpha.scale_pow2(1);
        // smallest j with 2^j lo >= α, then walk down the band
        let mut j = crate::exact::ceil_log2_ratio(alpha.coeff(), self.lo.coeff());
        let mut cur = self.dilate(j);
        loop {
            let band = Interval::new(alpha.clone(), two_alpha.clone());
            if let Some(part) = cur.intersect(&band) {
                out.push((j, part));
            }
            if cur.hi <= two_alpha {
                break;
            }
            let rest = Interval::new(two_alpha.clone(), cur.hi.clone());
            cur = rest.dilate(-1);
            j -= 1;
        }
        out
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi) = <(RationalPi, RationalPi)>::deserialize(d)?;
        Ok(Interval { lo, hi })
    }
}

/// Finite union of disjoint half-open intervals, kept sorted and merged.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct IntervalSet {
    pieces: Vec<Interval>,
}

#[derive(Deserialize)]
struct IntervalSetRepr {
    pieces: Vec<Interval>,
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntervalSetRepr::deserialize(d)?;
        Ok(IntervalSet::from_intervals(r.pieces))
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { pieces: Vec::new() }
    }

    pub fn interval(lo: RationalPi, hi: RationalPi) -> Self {
        Self::from_intervals(vec![Interval::new(lo, hi)])
    }

    /// Builds a set from arbitrary (possibly overlapping, unsorted,
    /// degenerate) intervals.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> Self {
        let mut v: Vec<Interval> = items.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort();
        let mut pieces: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(last) = pieces.last_mut() {
                if iv.lo <= last.hi {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                    continue;
                }
            }
            pieces.push(iv);
        }
        IntervalSet { pieces }
    }

    /// Convenience constructor from `(numer, denom)` coefficient pairs sharing one denominator.
    pub fn from_coeffs(denom: i64, pairs: &[(i64, i64)]) -> Self {
        Self::from_intervals(
            pairs.iter().map(|&(l, h)| {
                Interval::new(RationalPi::frac(l, denom), RationalPi::frac(h, denom))
            }),
        )
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn normalize(&self) -> Self {
        Self::from_intervals(self.pieces.iter().cloned())
    }

    pub fn measure(&self) -> RationalPi {
        self.pieces
            .iter()
            .fold(RationalPi::zero(), |acc, p| acc + p.length())
    }

    pub fn contains(&self, x: &RationalPi) -> bool {
        let idx = self.pieces.partition_point(|p| &p.hi <= x);
        idx < self.pieces.len() && self.pieces[idx].contains(x)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_intervals(self.pieces.iter().chain(other.pieces.iter()).cloned())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.pieces.len() && j < other.pieces.len() {
            let a = &self.pieces[i];
            let b = &other.pieces[j];
            if let Some(x) = a.intersect(b) {
                out.push(x);
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.pieces {
            let mut cur = a.lo.clone();
            for b in &other.pieces {
                if b.hi <= cur || b.lo >= a.hi {
                    continue;
                }
                if b.lo > cur {
                    out.push(Interval::new(cur.clone(), b.lo.clone()));
                }
                if b.hi > cur {
                    cur = b.hi.clone();
                }
            }
            if cur < a.hi {
                out.push(Interval::new(cur, a.hi.clone()));
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn dilate(&self, j: i32) -> IntervalSet {
        IntervalSet {
            pieces: self.pieces.iter().map(|p| p.dilate(j)).collect(),
        }
    }

    pub fn shift(&self, alpha: &RationalPi) -> IntervalSet {
        IntervalSet {
            pieces: self.pieces.iter().map(|p| p.shift(alpha)).collect(),
        }
    }

    pub fn translate_2pi(&self, k: i64) -> IntervalSet {
        self.shift(&RationalPi::int(2 * k))
    }

    pub fn negate(&self) -> IntervalSet {
        Self::from_intervals(self.pieces.iter().map(|p| p.negate()))
    }

    pub fn positive_part(&self) -> IntervalSet {
        self.intersection(&IntervalSet::interval(
            RationalPi::zero(),
            self.sup_abs().unwrap_or_else(RationalPi::zero).shift_2pi(1),
        ))
    }

    pub fn negative_part(&self) -> IntervalSet {
        let s = self.sup_abs().unwrap_or_else(RationalPi::zero).shift_2pi(1);
        self.intersection(&IntervalSet::interval(-s, RationalPi::zero()))
    }

    /// `sup |ξ|` over the set.
    pub fn sup_abs(&self) -> Option<RationalPi> {
        let first = self.pieces.first()?;
        let last = self.pieces.last()?;
        Some(first.lo.abs().max_ref(&last.hi.abs()).clone())
    }

    /// `inf |ξ|` over the set (zero if the closure meets the origin).
    pub fn inf_abs(&self) -> Option<RationalPi> {
        self.pieces
            .iter()
            .map(|p| {
                if p.lo.is_positive() {
                    p.lo.clone()
                } else if p.hi.is_negative() {
                    p.hi.abs()
                } else {
                    RationalPi::zero()
                }
            })
            .min()
    }

    /// True when the closure of the set contains 0.
    pub fn touches_zero(&self) -> bool {
        self.pieces
            .iter()
            .any(|p| !p.lo.is_positive() && !p.hi.is_negative())
    }

    pub fn apply(&self, action: &SetAction) -> IntervalSet {
        match action {
            SetAction::Dilate(j) => self.dilate(*j),
            SetAction::Translate(k) => self.translate_2pi(*k),
            SetAction::Negate => self.negate(),
        }
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.pieces.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

/// Moves used throughout the wavelet equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetAction {
    /// `ξ ↦ 2^j ξ`
    Dilate(i32),
    /// `ξ ↦ ξ + 2kπ`
    Translate(i64),
    Negate,
}

pub fn set_transform(s: &IntervalSet, action: &SetAction) -> IntervalSet {
    s.apply(action)
}

/// Endpoints of `S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnGeometry {
    pub n: u32,
    pub a: RationalPi,
    pub b: RationalPi,
    pub c: RationalPi,
    pub d: RationalPi,
    pub e: RationalPi,
}

impl SnGeometry {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfRange(format!("n = {n}; need n >= 2")));
        }
        let p = pow2(n as i32);
        let denom = &p - rat_int(1);
        let half = pow2(n as i32 - 1);
        let a = RationalPi::new(&half / &denom);
        let b = a.scale_pow2(1);
        let d = a.scale_pow2(n as i32);
        let c = RationalPi::new(&half * (&p - rat_int(2)) / &denom);
        let e = RationalPi::new((&p - rat_int(2)) / &denom);
        Ok(SnGeometry { n, a, b, c, d, e })
    }

    pub fn require_full_geometry(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::OutOfRange(format!(
                "n = {}; this operation needs n >= 3",
                self.n
            )));
        }
        Ok(())
    }

    /// `2^{n-1}`, the dilation exponent coupling `[e,b)` with `[c,d)`.
    pub fn coupling_exponent(&self) -> i32 {
        self.n as i32 - 1
    }

    /// `2^{n-1} π`.
    pub fn half_band_shift(&self) -> RationalPi {
        RationalPi::new(pow2(self.n as i32 - 1))
    }

    pub fn positive_half(&self) -> IntervalSet {
        IntervalSet::from_intervals([
            Interval::new(self.a.clone(), self.b.clone()),
            Interval::new(self.c.clone(), self.d.clone()),
        ])
    }

    pub fn s_n(&self) -> IntervalSet {
        let pos = self.positive_half();
        pos.union(&pos.negate())
    }

    /// The bell window `[e_n, b_n)`.
    pub fn bell_window(&self) -> Interval {
        Interval::new(self.e.clone(), self.b.clone())
    }

    /// `W_n = [-b,-a) ∪ [a,e) ∪ [c,d)`.
    pub fn w_n(&self) -> IntervalSet {
        IntervalSet::from_intervals([
            Interval::new(-&self.b, -&self.a),
            Interval::new(self.a.clone(), self.e.clone()),
            Interval::new(self.c.clone(), self.d.clone()),
        ])
    }

    /// Support of the non-MSF wavelet that lands in class `M_{n-2}`.
    pub fn f_n(&self) -> IntervalSet {
        let shift = RationalPi::new(pow2(self.n as i32));
        IntervalSet::from_intervals([
            Interval::new(-&self.b, -&self.a),
            Interval::new(self.a.scale_pow2(-1), self.e.scale_pow2(-1)),
            Interval::new(self.a.clone(), self.e.clone()),
            Interval::new(self.c.clone(), self.d.clone()),
            Interval::new(&self.a + &shift, &self.e + &shift),
        ])
    }
}

pub fn build_sn(n: u32) -> Result<(SnGeometry, IntervalSet)> {
    let g = SnGeometry::new(n)?;
    let s = g.s_n();
    Ok((g, s))
}

/// The six rows of the admissibility table for `S_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SnRow {
    AE,
    EB,
    CD,
    NegEA,
    NegBE,
    NegDC,
}

impl SnRow {
    pub const ALL: [SnRow; 6] = [
        SnRow::AE,
        SnRow::EB,
        SnRow::CD,
        SnRow::NegEA,
        SnRow::NegBE,
        SnRow::NegDC,
    ];

    pub fn interval(self, g: &SnGeometry) -> Interval {
        match self {
            SnRow::AE => Interval::new(g.a.clone(), g.e.clone()),
            SnRow::EB => Interval::new(g.e.clone(), g.b.clone()),
            SnRow::CD => Interval::new(g.c.clone(), g.d.clone()),
            SnRow::NegEA => Interval::new(-&g.e, -&g.a),
            SnRow::NegBE => Interval::new(-&g.b, -&g.e),
            SnRow::NegDC => Interval::new(-&g.d, -&g.c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleMoves {
    pub k: BTreeSet<i64>,
    pub j: BTreeSet<i32>,
}

/// Translations `2kπ` and dilations `2^j` that carry a positive-measure
/// part of `row` back into `S_n`. Computed by exact intersection over a
/// search range that covers every `k`, `j` with `|ξ + 2kπ| <= d_n` and
/// `a_n <= |2^j ξ| <= d_n`.
pub fn admissible_moves(g: &SnGeometry, row: SnRow) -> Result<AdmissibleMoves> {
    g.require_full_geometry()?;
    let s = g.s_n();
    let iv = row.interval(g);
    let piece = IntervalSet::from_intervals([iv.clone()]);

    // k range: -d - hi <= 2kπ <= d - lo
    let k_lo = ((-&g.d - iv.hi.clone()).coeff() / rat_int(2))
        .ceil()
        .to_integer();
    let k_hi = ((&g.d - &iv.lo).coeff() / rat_int(2)).floor().to_integer();
    let mut ks = BTreeSet::new();
    let mut k = k_lo;
    while k <= k_hi {
        let kk = k.to_i64().expect("k fits in i64");
        if !piece.translate_2pi(kk).intersection(&s).is_empty() {
            ks.insert(kk);
        }
        k += 1;
    }

    // j range from |ξ| in [min|iv|, max|iv|]
    let (lo_abs, hi_abs) = if iv.lo.is_positive() {
        (iv.lo.clone(), iv.hi.clone())
    } else {
        (iv.hi.abs(), iv.lo.abs())
    };
    let j_lo = crate::exact::ceil_log2_ratio(g.a.coeff(), hi_abs.coeff()) - 1;
    let j_hi = crate::exact::ceil_log2_ratio(g.d.coeff(), lo_abs.coeff()) + 1;
    let mut js = BTreeSet::new();
    for j in j_lo..=j_hi {
        if !piece.dilate(j).intersection(&s).is_empty() {
            js.insert(j);
        }
    }
    Ok(AdmissibleMoves { k: ks, j: js })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WaveletSetVerdict {
    pub is_wavelet_set: bool,
    pub translation_tiling: bool,
    pub dilation_tiling: bool,
    pub measure: RationalPi,
}

/// True when `parts` partition `[start, end)` exactly.
fn partitions(mut parts: Vec<Interval>, start: &RationalPi, end: &RationalPi) -> bool {
    parts.sort();
    let mut cur = start.clone();
    for p in parts {
        if p.lo != cur {
            return false;
        }
        cur = p.hi;
    }
    &cur == end
}

/// Whether the translates `K + 2πm` tile the line.
pub fn translation_tiles(k: &IntervalSet) -> bool {
    let base = RationalPi::zero();
    let parts: Vec<Interval> = k
        .pieces()
        .iter()
        .flat_map(|p| p.reduce_mod_2pi(&base))
        .map(|(_, iv)| iv)
        .collect();
    partitions(parts, &base, &RationalPi::two_pi())
}

fn half_line_dilation_tiles(positive: &IntervalSet) -> bool {
    let Some(first) = positive.pieces().first() else {
        return false;
    };
    let alpha = first.lo.clone();
    if !alpha.is_positive() {
        return false;
    }
    let parts: Vec<Interval> = positive
        .pieces()
        .iter()
        .flat_map(|p| p.reduce_dyadic(&alpha))
        .map(|(_, iv)| iv)
        .collect();
    let end = alpha.scale_pow2(1);
    partitions(parts, &alpha, &end)
}

/// Whether the dilates `2^j K` tile `ℝ \ {0}`.
pub fn dilation_tiles(k: &IntervalSet) -> bool {
    if k.is_empty() || k.touches_zero() {
        return false;
    }
    let pos = k.positive_part();
    let neg = k.negative_part().negate();
    half_line_dilation_tiles(&pos) && half_line_dilation_tiles(&neg)
}

pub fn wavelet_set_check(k: &IntervalSet) -> WaveletSetVerdict {
    let translation_tiling = translation_tiles(k);
    let dilation_tiling = dilation_tiles(k);
    WaveletSetVerdict {
        is_wavelet_set: translation_tiling && dilation_tiling,
        translation_tiling,
        dilation_tiling,
        measure: k.measure(),
    }
}

pub fn shannon_set() -> IntervalSet {
    IntervalSet::from_coeffs(1, &[(-2, -1), (1, 2)])
}

pub fn journe_set() -> IntervalSet {
    IntervalSet::from_coeffs(7, &[(-32, -28), (-7, -4), (4, 7), (28, 32)])
}

pub fn lemarie_set() -> IntervalSet {
    IntervalSet::from_coeffs(7, &[(-8, -4), (4, 6), (24, 32)])
}

/// Registry lookup for the named sets: `shannon`, `journe`, `lemarie`,
/// and the parametrised `S_n`, `W_n`, `F_n`.
pub fn named_set(key: &str, n: Option<u32>) -> Result<IntervalSet> {
    let need_n = || n.ok_or_else(|| Error::OutOfRange(format!("set '{key}' needs n")));
    match key {
        "shannon" => Ok(shannon_set()),
        "journe" => Ok(journe_set()),
        "lemarie" => Ok(lemarie_set()),
        "S_n" => Ok(SnGeometry::new(need_n()?)?.s_n()),
        "W_n" => {
            let g = SnGeometry::new(need_n()?)?;
            g.require_full_geometry()?;
            Ok(g.w_n())
        }
        "F_n" => {
            let g = SnGeometry::new(need_n()?)?;
            g.require_full_geometry()?;
            Ok(g.f_n())
        }
        other => Err(Error::OutOfRange(format!("unknown set '{other}'"))),
    }
}
