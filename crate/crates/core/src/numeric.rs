//! Grid-sampled verification for profiles that are not step functions.
//!
//! Every sum keeps the index bounds of the exact checker, read off the
//! support endpoints; only the evaluation points become a grid.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::builder::FrequencyWavelet;
use crate::error::{Error, Result};
use crate::sets::SnGeometry;
use crate::time_domain::{spectral_pieces, SpectralPiece};
use crate::verifier::{EquationCheck, Mode, VerificationReport, Witness};

type Spectrum = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// `ψ̂` as a point function with known compact support.
#[derive(Clone)]
pub struct NumericWavelet {
    pub label: String,
    eval: Spectrum,
    /// Disjoint `[lo, hi)` pieces, sorted.
    support: Vec<(f64, f64)>,
    /// Shortest interval on which the profile has no breakpoint.
    min_feature: f64,
}

impl std::fmt::Debug for NumericWavelet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NumericWavelet")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("min_feature", &self.min_feature)
            .finish()
    }
}

fn lookup(pieces: &[SpectralPiece], x: f64) -> Complex64 {
    let i = pieces.partition_point(|p| p.lo <= x);
    match i.checked_sub(1).map(|i| &pieces[i]) {
        Some(p) if x < p.hi => p.value,
        _ => Complex64::new(0.0, 0.0),
    }
}

fn merge_support(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.retain(|(lo, hi)| lo < hi);
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

impl NumericWavelet {
    pub fn new(
        label: impl Into<String>,
        support: Vec<(f64, f64)>,
        min_feature: f64,
        eval: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let support = merge_support(support);
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        if min_feature.is_nan() || min_feature <= 0.0 {
            return Err(Error::InvalidValue(format!("feature length {min_feature}")));
        }
        Ok(NumericWavelet {
            label: label.into(),
            eval: Arc::new(eval),
            support,
            min_feature,
        })
    }

    /// Samples an exact step wavelet in double precision.
    pub fn from_exact(w: &FrequencyWavelet) -> Result<Self> {
        let pieces = spectral_pieces(w);
        let support = pieces.iter().map(|p| (p.lo, p.hi)).collect();
        let min_feature = pieces
            .iter()
            .map(|p| p.hi - p.lo)
            .fold(f64::INFINITY, f64::min);
        Self::new(w.family.clone(), support, min_feature, move |x| {
            lookup(&pieces, x)
        })
    }

    /// The `S_n` extension of a real bell `b²` on `[e_n, b_n)`, with phase
    /// `π` where both `b²` and `1 − b²` are positive.
    pub fn from_bell_fn(
        n: u32,
        bell2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let g = SnGeometry::new(n)?;
        let [a, b, c, d, e] = [&g.a, &g.b, &g.c, &g.d, &g.e].map(|v| v.to_f64());
        let s = 2f64.powi(g.coupling_exponent());
        let tp = 2.0 * PI;
        let bell = move |x: f64| bell2(x).clamp(0.0, 1.0);
        let f = move |x: f64| -> Complex64 {
            let m2 = if (a <= x && x < e) || (-e <= x && x < -a) {
                1.0
            } else if e <= x && x < b {
                let v = bell(x);
                let amp = v.sqrt();
                return if v > 0.0 && v < 1.0 {
                    Complex64::new(-amp, 0.0)
                } else {
                    Complex64::new(amp, 0.0)
                };
            } else if c <= x && x < d {
                1.0 - bell(x / s)
            } else if -b <= x && x < -e {
                1.0 - bell(x + tp)
            } else if -d <= x && x < -c {
                bell(x / s + tp)
            } else {
                0.0
            };
            Complex64::new(m2.sqrt(), 0.0)
        };
        let support = vec![(-d, -a), (a, d)];
        let min_feature = [e - a, b - e, d - c]
            .into_iter()
            .filter(|&l| l > 0.0)
            .fold(f64::INFINITY, f64::min);
        Self::new(format!("bell-n{n}"), support, min_feature, f)
    }

    /// Adds `eps` to `|ψ̂|` on `[lo, hi)` inside the support.
    pub fn perturb_magnitude(&self, lo: f64, hi: f64, eps: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidValue(format!("empty window [{lo}, {hi})")));
        }
        let inner = self.eval.clone();
        let f = move |x: f64| {
            let v = inner(x);
            if lo <= x && x < hi && v.norm() > 0.0 {
                v + Complex64::from_polar(eps, v.arg())
            } else {
                v
            }
        };
        Self::new(
            format!("{}+perturbed", self.label),
            self.support.clone(),
            self.min_feature.min(hi - lo),
            f,
        )
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.eval)(x)
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    pub fn sup_abs(&self) -> f64 {
        self.support
            .iter()
            .map(|(lo, hi)| lo.abs().max(hi.abs()))
            .fold(0.0, f64::max)
    }

    /// Distance from the origin to the support.
    pub fn inf_abs(&self) -> f64 {
        self.support
            .iter()
            .map(|&(lo, hi)| {
                if lo <= 0.0 && 0.0 < hi {
                    0.0
                } else {
                    lo.abs().min(hi.abs())
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Offset that keeps grid points away from rational breakpoints.
const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let start = lo + step * GOLDEN;
    (0..)
        .map(move |i| start + step * i as f64)
        .take_while(move |&x| x < hi)
}

struct Worst {
    index: i64,
    at: f64,
    residual: f64,
}

impl Worst {
    fn new() -> Self {
        Worst {
            index: 0,
            at: 0.0,
            residual: 0.0,
        }
    }

    fn record(&mut self, index: i64, at: f64, residual: f64) {
        if residual.abs() > self.residual.abs() {
            *self = Worst {
                index,
                at,
                residual,
            };
        }
    }

    fn check(self, tolerance: f64) -> EquationCheck {
        let ok = self.residual.abs() <= tolerance;
        let witnesses = if ok {
            Vec::new()
        } else {
            vec![Witness {
                index: self.index,
                cell: None,
                cell_approx: [self.at / PI, self.at / PI],
                residual: self.residual,
            }]
        };
        EquationCheck {
            ok,
            profile: None,
            witnesses,
        }
    }
}

/// Checks norm and the four equations on a grid of spacing `grid_step`.
pub fn numeric_verify(
    w: &NumericWavelet,
    grid_step: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidValue(format!("tolerance {tolerance}")));
    }
    if grid_step.is_nan() || grid_step <= 0.0 || grid_step > w.min_feature / 2.0 {
        return Err(Error::GridTooCoarse {
            step: grid_step,
            piece: w.min_feature,
        });
    }
    let inf = w.inf_abs();
    if inf <= 0.0 {
        return Err(Error::SupportTouchesZero);
    }
    let sup = w.sup_abs();
    let tp = 2.0 * PI;
    let kmax = (sup / tp).ceil() as i64 + 1;

    // dyadic sum on ±[α, 2α)
    let mut w1 = Worst::new();
    let jmax = (sup / inf).log2().ceil() as i32 + 1;
    for sign in [1.0, -1.0] {
        for x in grid(inf, 2.0 * inf, grid_step) {
            let x = sign * x;
            let s: f64 = (-1..=jmax)
                .map(|j| w.eval(x * 2f64.powi(j)).norm_sqr())
                .sum();
            w1.record(0, x, s - 1.0);
        }
    }

    // periodization on [0, 2π), whose mean is the squared norm
    let mut w3 = Worst::new();
    let mut total = 0.0;
    let mut count = 0usize;
    for x in grid(0.0, tp, grid_step) {
        let s: f64 = (-kmax..=kmax)
            .map(|k| w.eval(x + tp * k as f64).norm_sqr())
            .sum();
        total += s;
        count += 1;
        w3.record(0, x, s - 1.0);
    }
    let norm_sq_approx = total / count.max(1) as f64;

    // t_m for odd m < 0; positive m follow by conjugate symmetry
    let mut w2 = Worst::new();
    let mmax = (sup / PI).ceil() as i64;
    for m in (1..=mmax).step_by(2).map(|m| -m) {
        let shift = tp * m as f64;
        for x in grid(-sup, sup, grid_step).filter(|&x| x != 0.0) {
            let mut t = Complex64::new(0.0, 0.0);
            let mut j = 0;
            while x.abs() * 2f64.powi(j) < sup {
                let s = 2f64.powi(j);
                t += w.eval(s * x) * w.eval(s * (x + shift)).conj();
                j += 1;
            }
            w2.record(m, x, t.norm());
        }
    }

    // cross-scale sums for 1 ≤ j while 2^j inf |supp| < sup |supp|
    let mut w4 = Worst::new();
    let j4 = ((sup / inf).log2().ceil() as i32).max(1);
    for j in 1..=j4 {
        let s = 2f64.powi(j);
        for x in grid(0.0, tp, grid_step) {
            let t: Complex64 = (-kmax..=kmax)
                .map(|k| {
                    let y = x + tp * k as f64;
                    w.eval(y) * w.eval(s * y).conj()
                })
                .sum();
            w4.record(j as i64, x, t.norm());
        }
    }

    let eq1 = w1.check(tolerance);
    let eq2 = w2.check(tolerance);
    let eq3 = w3.check(tolerance);
    let eq4 = w4.check(tolerance);
    let mode = Mode::Numeric {
        tolerance,
        grid_step,
    };
    let norm_ok = (norm_sq_approx - 1.0).abs() <= tolerance;
    let verdict = norm_ok && eq1.ok && eq2.ok && eq3.ok && eq4.ok;
    Ok(VerificationReport {
        mode,
        norm_sq: None,
        norm_sq_approx,
        eq1,
        eq2,
        eq3,
        eq4,
        thm32: None,
        numeric_assisted: true,
        verdict,
    })
}

/// `sin²` ramp from 0 at `e_n` to 1 at `b_n`.
pub fn sin2_ramp(n: u32) -> Result<impl Fn(f64) -> f64 + Send + Sync + 'static> {
    let g = SnGeometry::new(n)?;
    let (e, b) = (g.e.to_f64(), g.b.to_f64());
    Ok(move |x: f64| (0.5 * PI * (x - e) / (b - e)).sin().powi(2))
}
