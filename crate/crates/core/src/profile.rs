//! Piecewise-constant functions on ℝ with breakpoints in ℚπ.
//!
//! [`StepProfile`] carries rational values (squared magnitudes, dimension
//! counts) and treats zero as "no piece". [`PhaseProfile`] carries phases
//! and keeps every piece, since a zero phase is still a defined phase.

use std::fmt::Debug;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{format_rational, serde_rational, PhasePi, Rational, RationalPi};
use crate::sets::{Interval, IntervalSet};

/// Values a piecewise function can carry.
pub trait PieceValue: Clone + PartialEq + Debug {
    /// Values for which no piece is stored.
    fn is_absent(&self) -> bool {
        false
    }
}

impl PieceValue for Rational {
    fn is_absent(&self) -> bool {
        self.is_zero()
    }
}

impl PieceValue for PhasePi {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece<V> {
    pub lo: RationalPi,
    pub hi: RationalPi,
    pub value: V,
}

impl<V> Piece<V> {
    pub fn new(lo: RationalPi, hi: RationalPi, value: V) -> Self {
        Piece { lo, hi, value }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }
}

/// A piecewise-constant function, undefined (or zero) off its pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piecewise<V> {
    pieces: Vec<Piece<V>>,
}

pub type StepProfile = Piecewise<Rational>;
pub type PhaseProfile = Piecewise<PhasePi>;

/// Domain substitutions `ξ ↦ 2^j ξ` and `ξ ↦ ξ + 2kπ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pullback {
    Dilate(i32),
    Translate(i64),
}

impl<V: PieceValue> Default for Piecewise<V> {
    fn default() -> Self {
        Piecewise { pieces: Vec::new() }
    }
}

impl<V: PieceValue> Piecewise<V> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validated constructor: pieces may come in any order but must not
    /// overlap. Degenerate and absent pieces are dropped; touching pieces
    /// with equal values are merged.
    pub fn from_pieces(pieces: Vec<Piece<V>>) -> Result<Self> {
        let mut v: Vec<Piece<V>> = pieces
            .into_iter()
            .filter(|p| p.lo < p.hi && !p.value.is_absent())
            .collect();
        v.sort_by(|a, b| a.lo.cmp(&b.lo));
        for w in v.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::InvalidValue(format!(
                    "overlapping pieces [{}, {}) and [{}, {})",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(Self::merged(v))
    }

    /// Constructor for pieces already known to be sorted and disjoint.
    pub(crate) fn from_sorted(pieces: Vec<Piece<V>>) -> Self {
        let v = pieces
            .into_iter()
            .filter(|p| p.lo < p.hi && !p.value.is_absent())
            .collect();
        Self::merged(v)
    }

    fn merged(v: Vec<Piece<V>>) -> Self {
        let mut out: Vec<Piece<V>> = Vec::with_capacity(v.len());
        for p in v {
            if let Some(last) = out.last_mut() {
                if last.hi == p.lo && last.value == p.value {
                    last.hi = p.hi;
                    continue;
                }
            }
            out.push(p);
        }
        Piecewise { pieces: out }
    }

    /// Constant `value` on every piece of `set`.
    pub fn constant_on(set: &IntervalSet, value: V) -> Self {
        Self::from_sorted(
            set.pieces()
                .iter()
                .map(|iv| Piece::new(iv.lo.clone(), iv.hi.clone(), value.clone()))
                .collect(),
        )
    }

    pub fn pieces(&self) -> &[Piece<V>] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn support(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.pieces.iter().map(|p| p.interval()))
    }

    pub fn eval(&self, x: &RationalPi) -> Option<&V> {
        let idx = self.pieces.partition_point(|p| &p.hi <= x);
        self.pieces
            .get(idx)
            .filter(|p| &p.lo <= x)
            .map(|p| &p.value)
    }

    pub fn breakpoints(&self) -> Vec<RationalPi> {
        let mut v: Vec<RationalPi> = self
            .pieces
            .iter()
            .flat_map(|p| [p.lo.clone(), p.hi.clone()])
            .collect();
        v.dedup();
        v
    }

    /// `r(ξ) = p(2^j ξ)` or `r(ξ) = p(ξ + 2kπ)`.
    pub fn pullback(&self, action: Pullback) -> Self {
        let pieces = match action {
            Pullback::Dilate(j) => self
                .pieces
                .iter()
                .map(|p| Piece::new(p.lo.scale_pow2(-j), p.hi.scale_pow2(-j), p.value.clone()))
                .collect(),
            Pullback::Translate(k) => self
                .pieces
                .iter()
                .map(|p| Piece::new(p.lo.shift_2pi(-k), p.hi.shift_2pi(-k), p.value.clone()))
                .collect(),
        };
        Piecewise { pieces }
    }

    /// `r(ξ) = p(ξ + α)` for an arbitrary shift.
    pub fn pullback_shift(&self, alpha: &RationalPi) -> Self {
        Piecewise {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece::new(&p.lo - alpha, &p.hi - alpha, p.value.clone()))
                .collect(),
        }
    }

    /// `r(ξ) = p(-ξ)`.
    pub fn reflect(&self) -> Self {
        Piecewise {
            pieces: self
                .pieces
                .iter()
                .rev()
                .map(|p| Piece::new(-&p.hi, -&p.lo, p.value.clone()))
                .collect(),
        }
    }

    pub fn restrict(&self, window: &IntervalSet) -> Self {
        let mut out = Vec::new();
        for p in &self.pieces {
            for w in window.pieces() {
                if let Some(iv) = p.interval().intersect(w) {
                    out.push(Piece::new(iv.lo, iv.hi, p.value.clone()));
                }
            }
        }
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        Self::from_sorted(out)
    }

    pub fn map_values<W: PieceValue>(&self, f: impl Fn(&V) -> W) -> Piecewise<W> {
        Piecewise::from_sorted(
            self.pieces
                .iter()
                .map(|p| Piece::new(p.lo.clone(), p.hi.clone(), f(&p.value)))
                .collect(),
        )
    }

    /// Splits `window` into maximal cells on which the function is
    /// constant; gaps report `None`.
    pub fn cells_on(&self, window: &IntervalSet) -> Vec<(Interval, Option<V>)> {
        let mut out = Vec::new();
        for w in window.pieces() {
            let mut cur = w.lo.clone();
            let start = self.pieces.partition_point(|p| p.hi <= w.lo);
            for p in &self.pieces[start..] {
                if p.lo >= w.hi {
                    break;
                }
                let lo = p.lo.max_ref(&w.lo).clone();
                let hi = p.hi.min_ref(&w.hi).clone();
                if lo > cur {
                    out.push((Interval::new(cur.clone(), lo.clone()), None));
                }
                out.push((Interval::new(lo, hi.clone()), Some(p.value.clone())));
                cur = hi;
            }
            if cur < w.hi {
                out.push((Interval::new(cur, w.hi.clone()), None));
            }
        }
        out
    }
}

impl StepProfile {
    /// `Σ value · (hi − lo)`.
    pub fn integrate(&self) -> RationalPi {
        self.pieces.iter().fold(RationalPi::zero(), |acc, p| {
            acc + (&p.hi - &p.lo).scale(&p.value)
        })
    }

    pub fn scale_values(&self, factor: &Rational) -> StepProfile {
        self.map_values(|v| v * factor)
    }

    /// Pointwise sum.
    pub fn sum<'a, I: IntoIterator<Item = &'a StepProfile>>(profiles: I) -> StepProfile {
        let items: Vec<(Interval, Rational)> = profiles
            .into_iter()
            .flat_map(|p| p.pieces.iter().map(|q| (q.interval(), q.value.clone())))
            .collect();
        sum_pieces(items)
    }

    pub fn add(&self, other: &StepProfile) -> StepProfile {
        Self::sum([self, other])
    }

    /// Value at a point, with zero off the support.
    pub fn value_at(&self, x: &RationalPi) -> Rational {
        self.eval(x).cloned().unwrap_or_else(Rational::zero)
    }

    /// `1 − p` on `window`, `p` elsewhere ignored.
    pub fn one_minus_on(&self, window: &IntervalSet) -> StepProfile {
        let one = Rational::one();
        Self::from_sorted(
            self.cells_on(window)
                .into_iter()
                .map(|(iv, v)| {
                    let v = v.unwrap_or_else(Rational::zero);
                    Piece::new(iv.lo, iv.hi, &one - v)
                })
                .collect(),
        )
    }

    /// Cells of `window` where the function differs from `value`.
    pub fn mismatches(&self, window: &IntervalSet, value: &Rational) -> Vec<(Interval, Rational)> {
        self.cells_on(window)
            .into_iter()
            .map(|(iv, v)| (iv, v.unwrap_or_else(Rational::zero)))
            .filter(|(_, v)| v != value)
            .collect()
    }

    pub fn max_value(&self) -> Option<&Rational> {
        self.pieces.iter().map(|p| &p.value).max()
    }

    pub fn min_value(&self) -> Option<&Rational> {
        self.pieces.iter().map(|p| &p.value).min()
    }

    pub fn has_negative(&self) -> bool {
        self.pieces.iter().any(|p| p.value.is_negative())
    }
}

/// Partition of a finite set of intervals into elementary cells. Each cell
/// lists the items covering it. Cells not covered by any item are omitted.
pub(crate) fn sweep_cells<T: Clone>(items: Vec<(Interval, T)>) -> Vec<(Interval, Vec<T>)> {
    let mut points: Vec<RationalPi> = items
        .iter()
        .flat_map(|(iv, _)| [iv.lo.clone(), iv.hi.clone()])
        .collect();
    points.sort();
    points.dedup();
    if points.len() < 2 {
        return Vec::new();
    }
    let mut cells: Vec<Vec<T>> = vec![Vec::new(); points.len() - 1];
    for (iv, t) in items {
        if iv.is_empty() {
            continue;
        }
        let start = points.partition_point(|x| x < &iv.lo);
        let end = points.partition_point(|x| x < &iv.hi);
        for c in &mut cells[start..end] {
            c.push(t.clone());
        }
    }
    cells
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .map(|(i, v)| (Interval::new(points[i].clone(), points[i + 1].clone()), v))
        .collect()
}

pub(crate) fn sum_pieces(items: Vec<(Interval, Rational)>) -> StepProfile {
    let pieces = sweep_cells(items)
        .into_iter()
        .map(|(iv, vals)| {
            let total = vals.iter().fold(Rational::zero(), |acc, v| acc + v);
            Piece::new(iv.lo, iv.hi, total)
        })
        .collect();
    StepProfile::from_sorted(pieces)
}

/// Common refinement of several step profiles over the union of their
/// supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub cells: Vec<Interval>,
    /// `values[c][i]` is profile `i` on cell `c` (zero off its support).
    pub values: Vec<Vec<Rational>>,
}

pub fn common_refinement(ps: &[StepProfile]) -> Result<Refinement> {
    if ps.is_empty() {
        return Err(Error::InvalidValue("empty profile list".into()));
    }
    let items: Vec<(Interval, usize)> = ps
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.pieces.iter().map(move |q| (q.interval(), i)))
        .collect();
    let mut points: Vec<RationalPi> = items
        .iter()
        .flat_map(|(iv, _)| [iv.lo.clone(), iv.hi.clone()])
        .collect();
    points.sort();
    points.dedup();
    let support = IntervalSet::from_intervals(items.iter().map(|(iv, _)| iv.clone()));
    let mut cells = Vec::new();
    let mut values = Vec::new();
    for w in points.windows(2) {
        let cell = Interval::new(w[0].clone(), w[1].clone());
        if !support.contains(&cell.lo) {
            continue;
        }
        values.push(ps.iter().map(|p| p.value_at(&cell.lo)).collect());
        cells.push(cell);
    }
    Ok(Refinement { cells, values })
}

/// The lattices over which squared magnitudes are summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lattice {
    /// `Σ_{j∈ℤ} p(2^j ξ)`
    DyadicDilations,
    /// `Σ_{k∈ℤ} p(ξ + 2kπ)`
    Translations,
    /// `Σ_{j≥1} Σ_{k∈ℤ} p(2^j (ξ + 2kπ))`
    DilationsThenTranslations,
}

/// Result of a lattice sum, restricted to a fundamental window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSum {
    pub lattice: Lattice,
    pub profile: StepProfile,
    /// Fundamental domain the profile is reported on: `±[α, 2α)` for the
    /// dyadic lattice, `[0, 2π)` for translations, `[-π, π)` for the
    /// double sum.
    pub window: IntervalSet,
    /// The common value when the sum is constant on the window.
    pub constant: Option<Rational>,
}

impl LatticeSum {
    fn new(lattice: Lattice, profile: StepProfile, window: IntervalSet) -> Self {
        let constant = constant_value(&profile, &window);
        LatticeSum {
            lattice,
            profile,
            window,
            constant,
        }
    }
}

/// The value of `p` on `window` if it is constant there.
pub fn constant_value(p: &StepProfile, window: &IntervalSet) -> Option<Rational> {
    let cells = p.cells_on(window);
    let first = cells.first()?.1.clone().unwrap_or_else(Rational::zero);
    cells
        .iter()
        .all(|(_, v)| v.clone().unwrap_or_else(Rational::zero) == first)
        .then_some(first)
}

/// Periodises `p` by `2π` and reports it on `[base, base + 2π)`.
pub fn periodize(p: &StepProfile, base: &RationalPi) -> StepProfile {
    let items = p
        .pieces
        .iter()
        .flat_map(|q| {
            q.interval()
                .reduce_mod_2pi(base)
                .into_iter()
                .map(|(_, iv)| (iv, q.value.clone()))
        })
        .collect();
    sum_pieces(items)
}

/// The reference band `[α, 2α)` used for dyadic sums: `α` is the smallest
/// `|ξ|` over the support.
pub fn dyadic_alpha(p: &StepProfile) -> Result<RationalPi> {
    let support = p.support();
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    if support.touches_zero() {
        return Err(Error::SupportTouchesZero);
    }
    Ok(support.inf_abs().expect("nonempty support"))
}

/// `Σ_{j∈ℤ} p(2^j ξ)` on `[α, 2α) ∪ [-2α, -α)`.
pub fn dyadic_sum(p: &StepProfile, alpha: &RationalPi) -> Result<StepProfile> {
    if p.support().touches_zero() {
        return Err(Error::SupportTouchesZero);
    }
    let mut items = Vec::new();
    for q in &p.pieces {
        if q.lo.is_positive() {
            for (_, iv) in q.interval().reduce_dyadic(alpha) {
                items.push((iv, q.value.clone()));
            }
        } else {
            for (_, iv) in q.interval().negate().reduce_dyadic(alpha) {
                items.push((iv.negate(), q.value.clone()));
            }
        }
    }
    Ok(sum_pieces(items))
}

fn dyadic_window(alpha: &RationalPi) -> IntervalSet {
    let two = alpha.scale_pow2(1);
    IntervalSet::from_intervals([
        Interval::new(-&two, -alpha),
        Interval::new(alpha.clone(), two),
    ])
}

/// `Σ_{j≥1} p(2^j ξ)` as a step profile.
///
/// Near the origin this sum equals the full dyadic sum, which must be
/// constant on each half-line for the result to be a finite step function.
pub fn one_sided_dyadic_sum(p: &StepProfile) -> Result<StepProfile> {
    let alpha = dyadic_alpha(p)?;
    let rho = dyadic_sum(p, &alpha)?;
    let two = alpha.scale_pow2(1);
    let pos_band = IntervalSet::interval(alpha.clone(), two.clone());
    let neg_band = IntervalSet::interval(-&two, -&alpha);
    let c_pos =
        constant_value(&rho, &pos_band).ok_or(Error::NonConstantNearOrigin { side: "positive" })?;
    let c_neg =
        constant_value(&rho, &neg_band).ok_or(Error::NonConstantNearOrigin { side: "negative" })?;

    let support = p.support();
    let sup = support.sup_abs().expect("nonempty");
    // 2^j α > sup for j > j_max: no more contributions
    let j_max = crate::exact::ceil_log2_ratio(sup.coeff(), alpha.coeff()).max(1);
    let mut items: Vec<(Interval, Rational)> = Vec::new();
    let far = IntervalSet::from_intervals([
        Interval::new(-&sup, -&alpha),
        Interval::new(alpha.clone(), sup.clone()),
    ]);
    for j in 1..=j_max {
        for q in p.pullback(Pullback::Dilate(j)).restrict(&far).pieces {
            items.push((q.interval(), q.value));
        }
    }
    items.push((Interval::new(RationalPi::zero(), alpha.clone()), c_pos));
    items.push((Interval::new(-&alpha, RationalPi::zero()), c_neg));
    Ok(sum_pieces(items))
}

pub fn lattice_sum(p: &StepProfile, lattice: Lattice) -> Result<LatticeSum> {
    match lattice {
        Lattice::DyadicDilations => {
            let alpha = dyadic_alpha(p)?;
            let profile = dyadic_sum(p, &alpha)?;
            Ok(LatticeSum::new(lattice, profile, dyadic_window(&alpha)))
        }
        Lattice::Translations => {
            let base = RationalPi::zero();
            let profile = periodize(p, &base);
            let window = IntervalSet::interval(base, RationalPi::two_pi());
            Ok(LatticeSum::new(lattice, profile, window))
        }
        Lattice::DilationsThenTranslations => {
            let g = one_sided_dyadic_sum(p)?;
            let base = -RationalPi::pi();
            let profile = periodize(&g, &base);
            let window = IntervalSet::interval(base, RationalPi::pi());
            Ok(LatticeSum::new(lattice, profile, window))
        }
    }
}

// --- serde -----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct StepPieceRepr {
    lo: RationalPi,
    hi: RationalPi,
    #[serde(with = "serde_rational")]
    value: Rational,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    pieces: Vec<StepPieceRepr>,
}

impl Serialize for StepProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepRepr {
            pieces: self
                .pieces
                .iter()
                .map(|p| StepPieceRepr {
                    lo: p.lo.clone(),
                    hi: p.hi.clone(),
                    value: p.value.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = StepRepr::deserialize(d)?;
        StepProfile::from_pieces(
            r.pieces
                .into_iter()
                .map(|p| Piece::new(p.lo, p.hi, p.value))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PhasePieceRepr {
    lo: RationalPi,
    hi: RationalPi,
    #[serde(with = "serde_rational")]
    turns: Rational,
}

#[derive(Serialize, Deserialize)]
struct PhaseRepr {
    pieces: Vec<PhasePieceRepr>,
}

impl Serialize for PhaseProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseRepr {
            pieces: self
                .pieces
                .iter()
                .map(|p| PhasePieceRepr {
                    lo: p.lo.clone(),
                    hi: p.hi.clone(),
                    turns: p.value.turns().clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhaseProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PhaseRepr::deserialize(d)?;
        PhaseProfile::from_pieces(
            r.pieces
                .into_iter()
                .map(|p| Piece::new(p.lo, p.hi, PhasePi::new(p.turns)))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Human-readable one-line rendering, e.g. for CLI summaries.
pub fn describe(p: &StepProfile) -> String {
    p.pieces
        .iter()
        .map(|q| format!("[{}, {}) -> {}", q.lo, q.hi, format_rational(&q.value)))
        .collect::<Vec<_>>()
        .join(", ")
}
