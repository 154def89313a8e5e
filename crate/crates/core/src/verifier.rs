//! Exact verification of step-profile wavelet candidates.
//!
//! A function with `‖ψ‖ = 1` is an orthonormal wavelet exactly when
//!
//! 1. `Σ_{j∈ℤ} |ψ̂(2^j ξ)|² = 1`,
//! 2. `t_m(ξ) = Σ_{j≥0} ψ̂(2^j ξ) conj ψ̂(2^j(ξ + 2mπ)) = 0` for odd `m`,
//! 3. `Σ_{k∈ℤ} |ψ̂(ξ + 2kπ)|² = 1`,
//! 4. `Σ_{k∈ℤ} ψ̂(ξ + 2kπ) conj ψ̂(2^j(ξ + 2kπ)) = 0` for `j ≥ 1`.
//!
//! Every sum is finite for band-limited inputs, with index bounds read off
//! the exact support endpoints.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::builder::{validate_theta, FrequencyWavelet, ThetaCheck};
use crate::cancel::{sum_is_zero, Term};
use crate::error::{Error, Result};
use crate::exact::{format_rational, to_f64, PhasePi, Rational, RationalPi, SqrtRational};
use crate::profile::{lattice_sum, sweep_cells, Lattice, PhaseProfile, Pullback, StepProfile};
use crate::sets::{Interval, IntervalSet, SnGeometry};

/// Where a check failed. `index` is `m` for the cross terms `t_m`, `j` for
/// the cross-scale sums and 0 otherwise; `residual` is the deviation from
/// the expected value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub index: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<Interval>,
    /// Cell endpoints in units of `π`.
    pub cell_approx: [f64; 2],
    pub residual: f64,
}

impl Witness {
    pub(crate) fn exact(index: i64, cell: Interval, residual: f64) -> Self {
        let cell_approx = [cell.lo.coeff_f64(), cell.hi.coeff_f64()];
        Witness {
            index,
            cell: Some(cell),
            cell_approx,
            residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationCheck {
    pub ok: bool,
    /// The summed profile (dyadic and periodized sums, exact mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<StepProfile>,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric { tolerance: f64, grid_step: f64 },
}

/// Per-condition outcome of the `S_n` characterisation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thm32Report {
    pub n: u32,
    /// Conditions (i)–(v) in order: `b² = 1` on `±[a, e)`; `b² + b²∘2^k = 1`,
    /// `b² + b²(· + 2π) = 1` on `[e, b)`; `b²` on `[e, b)` matching its image on
    /// `[−d, −c)`; the phase sum test on the θ domain.
    pub conditions: [bool; 5],
    /// First failing cell per failed condition: `(condition, cell)` with
    /// conditions numbered from 1.
    pub failures: Vec<(u8, Interval)>,
}

impl Thm32Report {
    pub fn all(&self) -> bool {
        self.conditions.iter().all(|&c| c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: Mode,
    /// `‖ψ‖²` as `"p/q"` in exact mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_sq: Option<String>,
    pub norm_sq_approx: f64,
    pub eq1: EquationCheck,
    pub eq2: EquationCheck,
    pub eq3: EquationCheck,
    pub eq4: EquationCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thm32: Option<Thm32Report>,
    /// Some cancellation was decided by the high-precision fallback.
    pub numeric_assisted: bool,
    pub verdict: bool,
}

impl VerificationReport {
    pub fn norm_ok(&self) -> bool {
        match self.mode {
            Mode::Exact => self.norm_sq.as_deref() == Some("1/1"),
            Mode::Numeric { tolerance, .. } => (self.norm_sq_approx - 1.0).abs() <= tolerance,
        }
    }
}

/// `∫|ψ̂|² / 2π`.
pub fn check_norm(w: &FrequencyWavelet) -> Rational {
    w.mag2().integrate().coeff() / Rational::from_integer(2.into())
}

fn profile_failures(p: &StepProfile, window: &IntervalSet) -> Vec<Witness> {
    let one = Rational::one();
    p.mismatches(window, &one)
        .into_iter()
        .map(|(cell, v)| Witness::exact(0, cell, to_f64(&(v - &one))))
        .collect()
}

/// Eq. 1, reported on the bands `±[α, 2α)` with `α = inf |supp|`.
pub fn check_eq1(w: &FrequencyWavelet) -> Result<EquationCheck> {
    let s = lattice_sum(w.mag2(), Lattice::DyadicDilations)?;
    let witnesses = profile_failures(&s.profile, &s.window);
    Ok(EquationCheck {
        ok: witnesses.is_empty(),
        profile: Some(s.profile),
        witnesses,
    })
}

/// Eq. 3, reported on `[0, 2π)`.
pub fn check_eq3(w: &FrequencyWavelet) -> Result<EquationCheck> {
    let s = lattice_sum(w.mag2(), Lattice::Translations)?;
    let witnesses = profile_failures(&s.profile, &s.window);
    Ok(EquationCheck {
        ok: witnesses.is_empty(),
        profile: Some(s.profile),
        witnesses,
    })
}

/// Pieces of `η ↦ ψ̂(η) · conj ψ̂(2^j η + s)` as `(cell, term)`.
fn cross_pieces(w: &FrequencyWavelet, j: i32, s: &RationalPi) -> Vec<(Interval, Term)> {
    let m1 = w.mag2();
    let p1 = w.phase();
    let supp = m1.support();
    let common = supp.intersection(&supp.shift(&-s).dilate(-j));
    if common.is_empty() {
        return Vec::new();
    }
    let m2 = m1.pullback_shift(s).pullback(Pullback::Dilate(j));
    let p2: PhaseProfile = p1.pullback_shift(s).pullback(Pullback::Dilate(j));
    let mut points: Vec<RationalPi> = common
        .pieces()
        .iter()
        .flat_map(|iv| [iv.lo.clone(), iv.hi.clone()])
        .chain(
            [m1, &m2]
                .into_iter()
                .flat_map(|p| p.restrict(&common).breakpoints()),
        )
        .chain(
            [p1, &p2]
                .into_iter()
                .flat_map(|p| p.restrict(&common).breakpoints()),
        )
        .collect();
    points.sort();
    points.dedup();
    let mut out = Vec::new();
    for pair in points.windows(2) {
        let x = &pair[0];
        if !common.contains(x) {
            continue;
        }
        let (Some(a), Some(b), Some(ta), Some(tb)) =
            (m1.eval(x), m2.eval(x), p1.eval(x), p2.eval(x))
        else {
            continue;
        };
        let term = Term::new(SqrtRational::new(a * b).expect("nonnegative"), ta.sub(tb));
        out.push((Interval::new(pair[0].clone(), pair[1].clone()), term));
    }
    out
}

/// Cell data of `t_m`: each cell lists the nonzero summands, in order of
/// increasing `j`.
pub fn t_m_cells(w: &FrequencyWavelet, m: i64) -> Vec<(Interval, Vec<Term>)> {
    let Some(sup) = w.support().sup_abs() else {
        return Vec::new();
    };
    let diameter = sup.scale_pow2(1);
    let mut items = Vec::new();
    let mut j = 0;
    loop {
        // shift between the two factors, in the η = 2^j ξ variable
        let s = RationalPi::int(2 * m).scale_pow2(j);
        if s.abs() > diameter {
            break;
        }
        for (cell, term) in cross_pieces(w, 0, &s) {
            items.push((cell.dilate(-j), term));
        }
        j += 1;
    }
    sweep_cells(items)
}

/// Odd `m` with `|m| ≤ ⌈2 sup|supp| / 2π⌉`.
pub fn eq2_range(w: &FrequencyWavelet) -> i64 {
    let Some(sup) = w.support().sup_abs() else {
        return 0;
    };
    sup.coeff()
        .ceil()
        .to_integer()
        .try_into()
        .unwrap_or(i64::MAX)
}

/// Eq. 2. Since `t_m(ξ) = conj t_{−m}(ξ + 2mπ)`, only negative `m` are
/// enumerated.
pub fn check_eq2(w: &FrequencyWavelet) -> (EquationCheck, bool) {
    let bound = eq2_range(w);
    let mut witnesses = Vec::new();
    let mut numeric = false;
    for m in (1..=bound).step_by(2).map(|m| -m) {
        for (cell, terms) in t_m_cells(w, m) {
            let z = sum_is_zero(&terms);
            numeric |= z.numeric;
            if !z.is_zero {
                witnesses.push(Witness::exact(m, cell, z.residual));
            }
        }
    }
    (
        EquationCheck {
            ok: witnesses.is_empty(),
            profile: None,
            witnesses,
        },
        numeric,
    )
}

/// Cells of `Σ_k ψ̂(ξ + 2kπ) conj ψ̂(2^j(ξ + 2kπ))` on `[0, 2π)`.
pub fn eq4_cells(w: &FrequencyWavelet, j: i32) -> Vec<(Interval, Vec<Term>)> {
    let base = RationalPi::zero();
    let items = cross_pieces(w, j, &RationalPi::zero())
        .into_iter()
        .flat_map(|(cell, term)| {
            cell.reduce_mod_2pi(&base)
                .into_iter()
                .map(move |(_, iv)| (iv, term.clone()))
        })
        .collect();
    sweep_cells(items)
}

/// Largest `j` with `2^j inf|supp| ≤ sup|supp|`.
pub fn eq4_range(w: &FrequencyWavelet) -> i32 {
    let supp = w.support();
    match (supp.inf_abs(), supp.sup_abs()) {
        (Some(lo), Some(hi)) if lo.is_positive() => {
            let mut j = 0;
            while lo.scale_pow2(j + 1) <= hi {
                j += 1;
            }
            j
        }
        _ => 0,
    }
}

pub fn check_eq4(w: &FrequencyWavelet) -> (EquationCheck, bool) {
    let mut witnesses = Vec::new();
    let mut numeric = false;
    for j in 1..=eq4_range(w) {
        for (cell, terms) in eq4_cells(w, j) {
            let z = sum_is_zero(&terms);
            numeric |= z.numeric;
            if !z.is_zero {
                witnesses.push(Witness::exact(j as i64, cell, z.residual));
            }
        }
    }
    (
        EquationCheck {
            ok: witnesses.is_empty(),
            profile: None,
            witnesses,
        },
        numeric,
    )
}

/// Conditions (i)–(v) for a candidate supported in `S_n`.
pub fn check_thm32(w: &FrequencyWavelet) -> Result<Thm32Report> {
    let n =
        w.n.ok_or_else(|| Error::InvalidValue("candidate carries no S_n parameter".into()))?;
    let g = SnGeometry::new(n)?;
    let escape = w.support().difference(&g.s_n());
    if let Some(iv) = escape.pieces().first() {
        return Err(Error::SupportEscapes {
            n,
            lo: iv.lo.to_string(),
            hi: iv.hi.to_string(),
        });
    }
    let b2 = w.mag2();
    let k = g.coupling_exponent();
    let window = IntervalSet::from_intervals([g.bell_window()]);
    let one = Rational::one();
    let first = |cells: Vec<(Interval, Rational)>| cells.into_iter().next().map(|(c, _)| c);

    let flat = IntervalSet::from_intervals([
        Interval::new(-&g.e, -&g.a),
        Interval::new(g.a.clone(), g.e.clone()),
    ]);
    let c1 = first(b2.mismatches(&flat, &one));
    let c2 = first(
        b2.add(&b2.pullback(Pullback::Dilate(k)))
            .mismatches(&window, &one),
    );
    let c3 = first(
        b2.add(&b2.pullback(Pullback::Translate(-1)))
            .mismatches(&window, &one),
    );
    let coupled = b2
        .pullback(Pullback::Dilate(k))
        .pullback(Pullback::Translate(-1))
        .scale_values(&-Rational::one());
    let c4 = first(b2.add(&coupled).mismatches(&window, &Rational::zero()));
    let c5 = match validate_theta(&g, b2, w.phase())? {
        ThetaCheck::Valid(_) => None,
        ThetaCheck::Violation { cell, .. } => Some(cell),
    };
    let cells = [c1, c2, c3, c4, c5];
    let conditions = std::array::from_fn(|i| cells[i].is_none());
    let failures = cells
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| (i as u8 + 1, c)))
        .collect();
    Ok(Thm32Report {
        n,
        conditions,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvenBell {
    /// `|ψ̂(ξ)| = |ψ̂(−ξ)|`.
    pub is_even: bool,
    /// `b²(ξ) + b²(2π − ξ) = 1` on `[e_n, b_n)`.
    pub e5_holds: bool,
}

impl EvenBell {
    /// The two tests agree for verified `S_n` wavelets.
    pub fn consistent(&self) -> bool {
        self.is_even == self.e5_holds
    }
}

pub fn check_even_bell(w: &FrequencyWavelet) -> Result<EvenBell> {
    let report = verify(w)?;
    if !report.verdict {
        return Err(Error::NotAWavelet(w.family.clone()));
    }
    let thm = report
        .thm32
        .ok_or_else(|| Error::InvalidValue("evenness test needs a candidate in S_n".into()))?;
    let g = SnGeometry::new(thm.n)?;
    let b2 = w.mag2();
    let is_even = &b2.reflect() == b2;
    // b²(2π − ξ)
    let mirrored = b2.reflect().pullback(Pullback::Translate(-1));
    let window = IntervalSet::from_intervals([g.bell_window()]);
    let e5_holds = b2
        .add(&mirrored)
        .mismatches(&window, &Rational::one())
        .is_empty();
    Ok(EvenBell { is_even, e5_holds })
}

/// Full exact verification.
pub fn verify(w: &FrequencyWavelet) -> Result<VerificationReport> {
    if w.support().is_empty() {
        return Err(Error::EmptySupport);
    }
    let norm = check_norm(w);
    let eq1 = check_eq1(w)?;
    let (eq2, n2) = check_eq2(w);
    let eq3 = check_eq3(w)?;
    let (eq4, n4) = check_eq4(w);
    let thm32 = match w.n {
        Some(_) => match check_thm32(w) {
            Ok(t) => Some(t),
            Err(Error::SupportEscapes { .. }) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    let verdict = norm.is_one() && eq1.ok && eq2.ok && eq3.ok && eq4.ok;
    Ok(VerificationReport {
        mode: Mode::Exact,
        norm_sq: Some(format_rational(&norm)),
        norm_sq_approx: to_f64(&norm),
        eq1,
        eq2,
        eq3,
        eq4,
        thm32,
        numeric_assisted: n2 || n4,
        verdict,
    })
}

/// `e^{ic} ψ̂` verifies exactly when `ψ̂` does.
pub fn verify_with_global_phase(w: &FrequencyWavelet, c: &PhasePi) -> Result<VerificationReport> {
    verify(&w.with_global_phase(c))
}
