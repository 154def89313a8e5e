//! Frequency-side wavelet candidates: bell extension over `S_n`, phase
//! validation, the built-in families, and seeded random candidates.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{
    phase_sum_is_odd_pi, pow2, rat, rat_int, PhasePi, Rational, RationalPi, SqrtRational,
};
use crate::profile::{PhaseProfile, Piece, Pullback, StepProfile};
use crate::sets::{shannon_set, Interval, IntervalSet, SnGeometry};

/// `ψ̂ = e^{iθ} b`, stored as `b²` and `θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyWavelet {
    /// Parameter of the enclosing `S_n`, when there is one.
    pub n: Option<u32>,
    pub family: String,
    mag2: StepProfile,
    phase: PhaseProfile,
}

impl FrequencyWavelet {
    /// Checks `0 ≤ b² ≤ 1` and that `θ` is defined on the whole support.
    pub fn new(
        n: Option<u32>,
        family: impl Into<String>,
        mag2: StepProfile,
        phase: PhaseProfile,
    ) -> Result<Self> {
        if let Some(p) = mag2
            .pieces()
            .iter()
            .find(|p| p.value.is_negative() || p.value > Rational::one())
        {
            return Err(Error::InvalidValue(format!(
                "|ψ̂|² = {} on [{}, {}) is outside [0, 1]",
                p.value, p.lo, p.hi
            )));
        }
        let uncovered = mag2.support().difference(&phase.support());
        if let Some(iv) = uncovered.pieces().first() {
            return Err(Error::PhaseUndefined {
                lo: iv.lo.to_string(),
                hi: iv.hi.to_string(),
            });
        }
        // phase only matters on the support
        let phase = phase.restrict(&mag2.support());
        Ok(FrequencyWavelet {
            n,
            family: family.into(),
            mag2,
            phase,
        })
    }

    /// Zero phase on the support of `mag2`.
    pub fn real_positive(
        n: Option<u32>,
        family: impl Into<String>,
        mag2: StepProfile,
    ) -> Result<Self> {
        let phase = PhaseProfile::constant_on(&mag2.support(), PhasePi::zero());
        Self::new(n, family, mag2, phase)
    }

    pub fn mag2(&self) -> &StepProfile {
        &self.mag2
    }

    pub fn phase(&self) -> &PhaseProfile {
        &self.phase
    }

    pub fn support(&self) -> IntervalSet {
        self.mag2.support()
    }

    pub fn geometry(&self) -> Option<SnGeometry> {
        self.n.and_then(|n| SnGeometry::new(n).ok())
    }

    /// `(|ψ̂(ξ)|, arg ψ̂(ξ))`, or `None` off the support.
    pub fn value_at(&self, x: &RationalPi) -> Option<(SqrtRational, PhasePi)> {
        let m = self.mag2.eval(x)?;
        let t = self.phase.eval(x)?;
        Some((
            SqrtRational::new(m.clone()).expect("nonnegative"),
            t.clone(),
        ))
    }

    /// `e^{ic} ψ̂`.
    pub fn with_global_phase(&self, c: &PhasePi) -> FrequencyWavelet {
        FrequencyWavelet {
            n: self.n,
            family: self.family.clone(),
            mag2: self.mag2.clone(),
            phase: self.phase.map_values(|t| t.add(c)),
        }
    }

    /// Every piece of `|ψ̂|²` equals 0 or 1.
    pub fn is_msf(&self) -> bool {
        self.mag2.pieces().iter().all(|p| p.value.is_one())
    }

    /// Smallest piece length, the resolution a sampling grid must beat.
    pub fn min_piece_length(&self) -> Option<RationalPi> {
        let a = self.mag2.pieces().iter().map(|p| &p.hi - &p.lo);
        let b = self.phase.pieces().iter().map(|p| &p.hi - &p.lo);
        a.chain(b).min()
    }
}

/// Extends `b²` from `[e_n, b_n)` to `S_n` using conditions (i)–(iv) of the
/// characterisation of `S_n`-supported wavelets.
pub fn extend_bell(g: &SnGeometry, bell2: &StepProfile) -> Result<StepProfile> {
    let window = IntervalSet::from_intervals([g.bell_window()]);
    if !bell2.support().is_subset(&window) {
        return Err(Error::InvalidValue(format!(
            "bell support {} is not inside [{}, {})",
            bell2.support(),
            g.e,
            g.b
        )));
    }
    if let Some(p) = bell2
        .pieces()
        .iter()
        .find(|p| p.value.is_negative() || p.value > Rational::one())
    {
        return Err(Error::InvalidValue(format!(
            "bell value {} on [{}, {}) is outside [0, 1]",
            p.value, p.lo, p.hi
        )));
    }
    let k = g.coupling_exponent();
    let comp = bell2.one_minus_on(&window);
    let ones = StepProfile::constant_on(
        &IntervalSet::from_intervals([
            Interval::new(-&g.e, -&g.a),
            Interval::new(g.a.clone(), g.e.clone()),
        ]),
        Rational::one(),
    );
    // (ii): 1 − b²(2^{-(n-1)} ξ) on [c, d)
    let on_cd = comp.pullback(Pullback::Dilate(-k));
    // (iii): 1 − b²(ξ + 2π) on [−b, −e)
    let on_neg_be = comp.pullback(Pullback::Translate(1));
    // (iv): b²(2^{-(n-1)} ξ + 2π) on [−d, −c)
    let on_neg_dc = bell2
        .pullback(Pullback::Translate(1))
        .pullback(Pullback::Dilate(-k));
    Ok(StepProfile::sum([
        &ones, bell2, &on_cd, &on_neg_be, &on_neg_dc,
    ]))
}

/// `[e_n, b_n) ∩ supp b ∩ 2^{-(n-1)} supp b`, where condition (v) binds.
pub fn theta_domain(g: &SnGeometry, mag2: &StepProfile) -> IntervalSet {
    let supp = mag2.support();
    IntervalSet::from_intervals([g.bell_window()])
        .intersection(&supp)
        .intersection(&supp.dilate(-g.coupling_exponent()))
}

/// `θ = π` on the coupled cells of `[e_n, b_n)`, zero elsewhere on the
/// support.
pub fn canonical_theta(g: &SnGeometry, mag2: &StepProfile) -> PhaseProfile {
    let t = theta_domain(g, mag2);
    let rest = mag2.support().difference(&t);
    let mut pieces: Vec<Piece<PhasePi>> = rest
        .pieces()
        .iter()
        .map(|iv| Piece::new(iv.lo.clone(), iv.hi.clone(), PhasePi::zero()))
        .chain(
            t.pieces()
                .iter()
                .map(|iv| Piece::new(iv.lo.clone(), iv.hi.clone(), PhasePi::half_turn())),
        )
        .collect();
    pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
    PhaseProfile::from_pieces(pieces).expect("disjoint by construction")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaWitness {
    /// Cells of the binding set with their integer `m`.
    pub cells: Vec<(Interval, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaCheck {
    Valid(ThetaWitness),
    /// First cell on which the alternating phase sum is not an odd
    /// multiple of `π`; `sum_turns` is that sum in units of `π`.
    Violation {
        cell: Interval,
        sum_turns: Rational,
    },
}

impl ThetaCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, ThetaCheck::Valid(_))
    }
}

/// Checks `θ(ξ) + θ(2^{n-1}(ξ−2π)) − θ(ξ−2π) − θ(2^{n-1}ξ) ∈ (2ℤ+1)π` on
/// the binding set.
pub fn validate_theta(
    g: &SnGeometry,
    mag2: &StepProfile,
    phase: &PhaseProfile,
) -> Result<ThetaCheck> {
    let supp = mag2.support();
    if let Some(iv) = supp.difference(&phase.support()).pieces().first() {
        return Err(Error::PhaseUndefined {
            lo: iv.lo.to_string(),
            hi: iv.hi.to_string(),
        });
    }
    let t = theta_domain(g, mag2);
    let k = g.coupling_exponent();
    let dil = phase.pullback(Pullback::Dilate(k));
    let views = [
        phase.restrict(&t),
        dil.pullback(Pullback::Translate(-1)).restrict(&t),
        phase.pullback(Pullback::Translate(-1)).restrict(&t),
        dil.restrict(&t),
    ];
    let mut points: Vec<RationalPi> = t
        .pieces()
        .iter()
        .flat_map(|iv| [iv.lo.clone(), iv.hi.clone()])
        .chain(views.iter().flat_map(|v| v.breakpoints()))
        .collect();
    points.sort();
    points.dedup();

    let mut cells = Vec::new();
    for w in points.windows(2) {
        let cell = Interval::new(w[0].clone(), w[1].clone());
        if !t.contains(&cell.lo) {
            continue;
        }
        // a view off the support multiplies a zero magnitude; only
        // magnitudes that break (i)-(iv) can produce such a cell
        let Some(vals) = views
            .iter()
            .map(|v| v.eval(&cell.lo))
            .collect::<Option<Vec<&PhasePi>>>()
        else {
            continue;
        };
        let test = phase_sum_is_odd_pi(vals[0], vals[1], vals[2], vals[3]);
        match test.m {
            Some(m) if test.holds => cells.push((cell, m)),
            _ => {
                let sum_turns =
                    vals[0].turns() + vals[1].turns() - vals[2].turns() - vals[3].turns();
                return Ok(ThetaCheck::Violation { cell, sum_turns });
            }
        }
    }
    Ok(ThetaCheck::Valid(ThetaWitness { cells }))
}

/// Built-in constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `χ_{W_n}`.
    Gamma,
    /// MSF wavelet on `±([a_n, π) ∪ [2^{n-1}π, d_n))`.
    MsfA,
    /// Two-parameter MSF family; `p = 2^{n-2} − 1` recovers `W_n`.
    MsfB,
    /// Non-MSF wavelet supported on `F_n`.
    PsiSixOne,
    /// Bell `1/2` on `[e_n, π)` with `θ = π` there.
    WSixTwo,
    Shannon,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Gamma,
        Family::MsfA,
        Family::MsfB,
        Family::PsiSixOne,
        Family::WSixTwo,
        Family::Shannon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gamma => "gamma",
            Family::MsfA => "msf-a",
            Family::MsfB => "msf-b",
            Family::PsiSixOne => "psi-sixone",
            Family::WSixTwo => "w-sixtwo",
            Family::Shannon => "shannon",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown family '{s}'")))
    }
}

fn geometry_for(n: u32) -> Result<SnGeometry> {
    let g = SnGeometry::new(n)?;
    g.require_full_geometry()?;
    Ok(g)
}

fn chi(set: &IntervalSet) -> StepProfile {
    StepProfile::constant_on(set, Rational::one())
}

fn bell_on(pieces: &[(RationalPi, RationalPi, Rational)]) -> StepProfile {
    StepProfile::from_pieces(
        pieces
            .iter()
            .map(|(lo, hi, v)| Piece::new(lo.clone(), hi.clone(), v.clone()))
            .collect(),
    )
    .expect("disjoint bell pieces")
}

/// Builds a family member. `p` is only read by `msf-b`.
pub fn build_family(family: Family, n: u32, p: Option<u32>) -> Result<FrequencyWavelet> {
    let name = family.name();
    match family {
        Family::Shannon => FrequencyWavelet::real_positive(None, name, chi(&shannon_set())),
        Family::Gamma => {
            let g = geometry_for(n)?;
            FrequencyWavelet::real_positive(Some(n), name, chi(&g.w_n()))
        }
        Family::MsfA => {
            let g = geometry_for(n)?;
            let bell = bell_on(&[(g.e.clone(), RationalPi::pi(), Rational::one())]);
            let mag2 = extend_bell(&g, &bell)?;
            FrequencyWavelet::real_positive(Some(n), name, mag2)
        }
        Family::MsfB => {
            geometry_for(n)?;
            let max_p = (1u64 << (n - 1)) - 2;
            let p = p.ok_or_else(|| Error::OutOfRange("msf-b needs p".into()))?;
            if p < 1 || p as u64 > max_p {
                return Err(Error::OutOfRange(format!(
                    "p = {p}; need 1 <= p <= {max_p}"
                )));
            }
            let mag2 = chi(&msf_b_support(n, p));
            // K lies in S_n only for p = 2^{n-2} − 1
            let in_sn = SnGeometry::new(n)?.s_n();
            let tag = mag2.support().is_subset(&in_sn).then_some(n);
            FrequencyWavelet::real_positive(tag, name, mag2)
        }
        Family::PsiSixOne => {
            let g = geometry_for(n)?;
            let shift = g.half_band_shift();
            let full = RationalPi::new(pow2(n as i32));
            let (a2, e2) = (g.a.scale_pow2(-1), g.e.scale_pow2(-1));
            let one = Rational::one();
            let half = rat(1, 2);
            let mut mag = vec![
                Piece::new(-&g.b, -&g.a, one.clone()),
                Piece::new(g.c.clone(), &a2 + &shift, one.clone()),
                Piece::new(&e2 + &shift, g.d.clone(), one.clone()),
                Piece::new(a2.clone(), e2.clone(), half.clone()),
                Piece::new(g.a.clone(), g.e.clone(), half.clone()),
                Piece::new(&a2 + &shift, &e2 + &shift, half.clone()),
            ];
            let flipped = Interval::new(&g.a + &full, &g.e + &full);
            mag.push(Piece::new(flipped.lo.clone(), flipped.hi.clone(), half));
            let mag2 = StepProfile::from_pieces(mag)?;
            let rest = mag2
                .support()
                .difference(&IntervalSet::from_intervals([flipped.clone()]));
            let mut ph: Vec<Piece<PhasePi>> = rest
                .pieces()
                .iter()
                .map(|iv| Piece::new(iv.lo.clone(), iv.hi.clone(), PhasePi::zero()))
                .collect();
            ph.push(Piece::new(flipped.lo, flipped.hi, PhasePi::half_turn()));
            let phase = PhaseProfile::from_pieces(ph)?;
            // supp ⊄ S_n, so no S_n tag
            FrequencyWavelet::new(None, name, mag2, phase)
        }
        Family::WSixTwo => {
            let g = geometry_for(n)?;
            let bell = bell_on(&[(g.e.clone(), RationalPi::pi(), rat(1, 2))]);
            let mag2 = extend_bell(&g, &bell)?;
            let phase = canonical_theta(&g, &mag2);
            FrequencyWavelet::new(Some(n), name, mag2, phase)
        }
    }
}

/// `K = K⁻ ∪ K⁺` of the two-parameter MSF family.
pub fn msf_b_support(n: u32, p: u32) -> IntervalSet {
    let m = pow2(n as i32) - rat_int(1);
    let p = rat_int(p as i64);
    let one = Rational::one();
    let two = rat_int(2);
    let r = &one - (&two * &p + &one) / &m;
    let neg = Interval::new(RationalPi::new(-(&two * &r)), RationalPi::new(-r));
    let pos1 = Interval::new(
        RationalPi::new(&two * (&p + &one) / &m),
        RationalPi::new(&two * (&two * &p + &one) / &m),
    );
    let pos2 = Interval::new(
        RationalPi::new(pow2(n as i32) * (&two * &p + &one) / &m),
        RationalPi::new(pow2(n as i32 + 1) * (&p + &one) / &m),
    );
    IntervalSet::from_intervals([neg, pos1, pos2])
}

/// What a random candidate is meant to exercise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateKind {
    Valid,
    /// One `[c_n, d_n)` value perturbed, breaking (ii).
    BrokenIii,
    /// Valid magnitudes, `θ ≡ 0` on a nonempty binding set.
    BrokenV,
}

impl CandidateKind {
    pub fn name(self) -> &'static str {
        match self {
            CandidateKind::Valid => "valid",
            CandidateKind::BrokenIii => "broken-iii",
            CandidateKind::BrokenV => "broken-v",
        }
    }
}

impl FromStr for CandidateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "valid" => Ok(CandidateKind::Valid),
            "broken-iii" => Ok(CandidateKind::BrokenIii),
            "broken-v" => Ok(CandidateKind::BrokenV),
            other => Err(Error::OutOfRange(format!(
                "unknown candidate kind '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub wavelet: FrequencyWavelet,
    pub kind: CandidateKind,
    pub bell2: StepProfile,
    /// Where the defect was planted: the perturbed `[c_n, d_n)` cell for
    /// `broken-iii`, the binding set for `broken-v`.
    pub defect: Option<IntervalSet>,
}

const GRID: i64 = 64;
const LEVELS: i64 = 16;
const MAX_CELLS: usize = 8;

fn random_cuts(rng: &mut ChaCha8Rng, grid: i64) -> Vec<i64> {
    let cells = rng.gen_range(1..=MAX_CELLS.min(grid as usize));
    let mut cuts: Vec<i64> = sample(rng, grid as usize - 1, cells - 1)
        .into_iter()
        .map(|i| i as i64 + 1)
        .collect();
    cuts.push(0);
    cuts.push(grid);
    cuts.sort_unstable();
    cuts
}

fn random_level(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(0..=LEVELS), LEVELS)
}

/// Random bell on `[e_n, b_n)`. The even variant draws `[e_n, π)` and sets
/// `b²(2π − ξ) = 1 − b²(ξ)`.
fn random_bell(
    g: &SnGeometry,
    rng: &mut ChaCha8Rng,
    even: bool,
    need_fractional: bool,
) -> StepProfile {
    let (lo, hi, grid) = if even {
        (g.e.clone(), RationalPi::pi(), GRID / 2)
    } else {
        (g.e.clone(), g.b.clone(), GRID)
    };
    let width = &hi - &lo;
    let at = |i: i64| &lo + &width.scale(&rat(i, grid));
    let cuts = random_cuts(rng, grid);
    let mut values: Vec<Rational> = (1..cuts.len()).map(|_| random_level(rng)).collect();
    let fractional = |v: &Rational| v.is_positive() && v < &Rational::one();
    if need_fractional && !values.iter().any(fractional) {
        let i = rng.gen_range(0..values.len());
        values[i] = rat(rng.gen_range(1..LEVELS), LEVELS);
    }
    let mut pieces = Vec::new();
    for (w, v) in cuts.windows(2).zip(values) {
        let (l, h) = (at(w[0]), at(w[1]));
        if even {
            let two_pi = RationalPi::two_pi();
            pieces.push(Piece::new(&two_pi - &h, &two_pi - &l, Rational::one() - &v));
        }
        pieces.push(Piece::new(l, h, v));
    }
    StepProfile::from_pieces(pieces).expect("grid pieces are disjoint")
}

/// Seeded candidate over `S_n`. The same `(n, seed, kind, even)` always
/// produces the same candidate.
pub fn random_candidate(
    g: &SnGeometry,
    seed: u64,
    kind: CandidateKind,
    even: bool,
) -> Result<Candidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bell2 = random_bell(g, &mut rng, even, kind == CandidateKind::BrokenV);
    let mag2 = extend_bell(g, &bell2)?;
    let label = format!("random-{}", kind.name());
    match kind {
        CandidateKind::Valid => {
            let phase = canonical_theta(g, &mag2);
            let wavelet = FrequencyWavelet::new(Some(g.n), label, mag2, phase)?;
            Ok(Candidate {
                wavelet,
                kind,
                bell2,
                defect: None,
            })
        }
        CandidateKind::BrokenV => {
            let phase = PhaseProfile::constant_on(&mag2.support(), PhasePi::zero());
            let defect = theta_domain(g, &mag2);
            let wavelet = FrequencyWavelet::new(Some(g.n), label, mag2, phase)?;
            Ok(Candidate {
                wavelet,
                kind,
                bell2,
                defect: Some(defect),
            })
        }
        CandidateKind::BrokenIii => {
            let cd = Interval::new(g.c.clone(), g.d.clone());
            let cells: Vec<&Piece<Rational>> = mag2
                .pieces()
                .iter()
                .filter(|p| cd.contains(&p.lo))
                .collect();
            // a bell ≡ 1 leaves [c, d) empty; then perturb it upward from 0
            let eps = rat(1, 32);
            let (cell, new_value) = if cells.is_empty() {
                (cd.clone(), eps.clone())
            } else {
                let p = cells[rng.gen_range(0..cells.len())];
                let v = if &p.value + &eps <= Rational::one() {
                    &p.value + &eps
                } else {
                    &p.value - &eps
                };
                (p.interval(), v)
            };
            let mut pieces: Vec<Piece<Rational>> = mag2
                .pieces()
                .iter()
                .filter(|p| p.interval() != cell)
                .cloned()
                .collect();
            pieces.push(Piece::new(cell.lo.clone(), cell.hi.clone(), new_value));
            let perturbed = StepProfile::from_pieces(pieces)?;
            let phase = canonical_theta(g, &perturbed);
            let wavelet = FrequencyWavelet::new(Some(g.n), label, perturbed, phase)?;
            Ok(Candidate {
                wavelet,
                kind,
                bell2,
                defect: Some(IntervalSet::from_intervals([cell])),
            })
        }
    }
}

/// Bell supported on `[e_n, b_n)` given as explicit pieces, extended with
/// the canonical phase.
pub fn from_bell(g: &SnGeometry, bell2: &StepProfile, family: &str) -> Result<FrequencyWavelet> {
    let mag2 = extend_bell(g, bell2)?;
    let phase = canonical_theta(g, &mag2);
    FrequencyWavelet::new(Some(g.n), family, mag2, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{journe_set, lemarie_set};
    use num_traits::Zero;

    fn g(n: u32) -> SnGeometry {
        SnGeometry::new(n).unwrap()
    }

    #[test]
    fn zero_bell_gives_w_n() {
        for n in 3..=10 {
            let g = g(n);
            let out = extend_bell(&g, &StepProfile::empty()).unwrap();
            assert_eq!(out, chi(&g.w_n()), "n = {n}");
        }
    }

    #[test]
    fn half_bell_values() {
        let g = g(3);
        let bell = bell_on(&[(g.e.clone(), g.b.clone(), rat(1, 2))]);
        let out = extend_bell(&g, &bell).unwrap();
        let half = rat(1, 2);
        for (lo, hi) in [
            (&-&g.b, &-&g.e),
            (&g.e, &g.b),
            (&g.c, &g.d),
            (&-&g.d, &-&g.c),
        ] {
            assert_eq!(out.value_at(&lo.midpoint(hi)), half);
        }
        assert_eq!(out.value_at(&g.a.midpoint(&g.e)), Rational::one());
        assert_eq!(out.value_at(&(-&g.a).midpoint(&-&g.e)), Rational::one());
        assert_eq!(out.integrate(), RationalPi::two_pi());
    }

    #[test]
    fn extend_bell_rejects_bad_input() {
        let g = g(3);
        let outside = bell_on(&[(RationalPi::zero(), g.e.clone(), rat(1, 2))]);
        assert!(extend_bell(&g, &outside).is_err());
        let big = bell_on(&[(g.e.clone(), g.b.clone(), rat(3, 2))]);
        assert!(extend_bell(&g, &big).is_err());
    }

    #[test]
    fn msf_a_support() {
        let w = build_family(Family::MsfA, 3, None).unwrap();
        assert_eq!(w.support(), journe_set());
        let g = g(5);
        let w = build_family(Family::MsfA, 5, None).unwrap();
        let pos = IntervalSet::from_intervals([
            Interval::new(g.a.clone(), RationalPi::pi()),
            Interval::new(g.half_band_shift(), g.d.clone()),
        ]);
        assert_eq!(w.support(), pos.union(&pos.negate()));
        assert!(w.is_msf());
    }

    #[test]
    fn msf_b_cases() {
        let w = build_family(Family::MsfB, 3, Some(1)).unwrap();
        assert_eq!(w.support(), lemarie_set());
        for n in 3..=8 {
            let p = (1u32 << (n - 2)) - 1;
            assert_eq!(msf_b_support(n, p), g(n).w_n(), "n = {n}");
            for p in 1..=(1u32 << (n - 1)) - 2 {
                assert_eq!(msf_b_support(n, p).measure(), RationalPi::two_pi());
            }
        }
        assert!(build_family(Family::MsfB, 3, Some(3)).is_err());
        assert!(build_family(Family::MsfB, 3, Some(0)).is_err());
        assert!(build_family(Family::MsfB, 3, None).is_err());
    }

    #[test]
    fn psi_sixone_n3() {
        let w = build_family(Family::PsiSixOne, 3, None).unwrap();
        let ones = IntervalSet::from_coeffs(7, &[(-8, -4), (24, 30), (31, 32)]);
        let halves = IntervalSet::from_coeffs(7, &[(2, 3), (4, 6), (30, 31), (60, 62)]);
        let expect = StepProfile::sum([&chi(&ones), &StepProfile::constant_on(&halves, rat(1, 2))]);
        assert_eq!(w.mag2(), &expect);
        assert_eq!(w.support(), g(3).f_n());
        let flipped = RationalPi::frac(61, 7);
        assert_eq!(w.phase().eval(&flipped), Some(&PhasePi::half_turn()));
        assert_eq!(
            w.phase().eval(&RationalPi::frac(5, 7)),
            Some(&PhasePi::zero())
        );
    }

    #[test]
    fn w_sixtwo_shape() {
        let g = g(3);
        let w = build_family(Family::WSixTwo, 3, None).unwrap();
        assert_eq!(
            theta_domain(&g, w.mag2()),
            IntervalSet::interval(g.e.clone(), RationalPi::pi())
        );
        let check = validate_theta(&g, w.mag2(), w.phase()).unwrap();
        match check {
            ThetaCheck::Valid(wit) => {
                assert_eq!(wit.cells.len(), 1);
                assert_eq!(wit.cells[0].1, 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_checks() {
        let g = g(4);
        let gamma = build_family(Family::Gamma, 4, None).unwrap();
        assert!(theta_domain(&g, gamma.mag2()).is_empty());
        assert_eq!(
            validate_theta(&g, gamma.mag2(), gamma.phase()).unwrap(),
            ThetaCheck::Valid(ThetaWitness { cells: vec![] })
        );
        let bell = bell_on(&[(g.e.clone(), g.b.clone(), rat(1, 2))]);
        let mag2 = extend_bell(&g, &bell).unwrap();
        let zero = PhaseProfile::constant_on(&mag2.support(), PhasePi::zero());
        match validate_theta(&g, &mag2, &zero).unwrap() {
            ThetaCheck::Violation { cell, sum_turns } => {
                assert_eq!(cell, g.bell_window());
                assert!(sum_turns.is_zero());
            }
            other => panic!("{other:?}"),
        }
        let missing = PhaseProfile::empty();
        assert!(matches!(
            validate_theta(&g, &mag2, &missing),
            Err(Error::PhaseUndefined { .. })
        ));
    }

    #[test]
    fn random_candidates_are_deterministic() {
        let g = g(4);
        for kind in [
            CandidateKind::Valid,
            CandidateKind::BrokenIii,
            CandidateKind::BrokenV,
        ] {
            let a = random_candidate(&g, 1, kind, false).unwrap();
            let b = random_candidate(&g, 1, kind, false).unwrap();
            assert_eq!(a.wavelet, b.wavelet);
        }
        let v = random_candidate(&g, 7, CandidateKind::BrokenV, false).unwrap();
        assert!(!v.defect.unwrap().is_empty());
    }

    #[test]
    fn even_bell_satisfies_mirror_identity() {
        let g = g(5);
        for seed in 0..20 {
            let c = random_candidate(&g, seed, CandidateKind::Valid, true).unwrap();
            let bell = &c.bell2;
            let window = IntervalSet::from_intervals([g.bell_window()]);
            for (iv, v) in bell.cells_on(&window) {
                let x = iv.lo.midpoint(&iv.hi);
                let mirror = &RationalPi::two_pi() - &x;
                let total = v.unwrap_or_else(Rational::zero) + bell.value_at(&mirror);
                assert_eq!(total, Rational::one());
            }
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
        assert!(build_family(Family::Gamma, 2, None).is_err());
    }
}
