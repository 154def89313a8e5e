//! Closed-form inversion of step spectra and Gram entries of `ψ_{j,k}`.
//!
//! With `f̂(ξ) = ∫ f(x) e^{−iξx} dx`, a piece `c·χ_{[lo,hi)}` of `ψ̂`
//! contributes `c e^{i lo x} (e^{ihx} − 1) / (2π i x)` to `ψ(x)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::builder::FrequencyWavelet;
use crate::error::{Error, Result};
use crate::exact::to_f64;

/// One constant piece of `ψ̂` in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPiece {
    pub lo: f64,
    pub hi: f64,
    pub value: Complex64,
}

/// Pieces of `ψ̂` in double precision, sorted by `lo`.
pub fn spectral_pieces(w: &FrequencyWavelet) -> Vec<SpectralPiece> {
    let phase = w.phase();
    let mut out = Vec::new();
    for p in w.mag2().pieces() {
        let amp = to_f64(&p.value).sqrt();
        for (cell, t) in phase.cells_on(&crate::sets::IntervalSet::from_intervals([p.interval()])) {
            let theta = t.map(|t| t.radians()).unwrap_or(0.0);
            out.push(SpectralPiece {
                lo: cell.lo.to_f64(),
                hi: cell.hi.to_f64(),
                value: Complex64::from_polar(amp, theta),
            });
        }
    }
    out
}

/// `(e^{iφ} − 1) / (iφ)`, with a series near the origin.
pub fn phase_kernel(phi: f64) -> Complex64 {
    if phi.abs() < 1e-6 {
        let p2 = phi * phi;
        Complex64::new(1.0 - p2 / 6.0, phi / 2.0 - p2 * phi / 24.0)
    } else {
        let s = (phi / 2.0).sin();
        Complex64::new(phi.sin() / phi, 2.0 * s * s / phi)
    }
}

/// `∫_lo^hi e^{iβξ} dξ`.
fn exp_integral(lo: f64, hi: f64, beta: f64) -> Complex64 {
    let h = hi - lo;
    Complex64::from_polar(1.0, beta * lo) * h * phase_kernel(beta * h)
}

pub fn psi_at(pieces: &[SpectralPiece], x: f64) -> Complex64 {
    pieces
        .iter()
        .map(|p| p.value * exp_integral(p.lo, p.hi, x))
        .sum::<Complex64>()
        / (2.0 * PI)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSamples {
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `ψ̂(−ξ) = conj ψ̂(ξ)`, decided exactly on the profiles.
    pub real_valued: bool,
}

impl TimeSamples {
    /// Columns `x,re,im` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re,im\n");
        for (x, v) in self.xs.iter().zip(&self.values) {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", x, v.re, v.im);
        }
        out
    }
}

/// `|ψ̂|` even and `arg ψ̂` odd.
pub fn is_hermitian(w: &FrequencyWavelet) -> bool {
    let m = w.mag2();
    let t = w.phase();
    &m.reflect() == m && &t.reflect().map_values(|p| p.neg()) == t
}

/// `count` equispaced samples of `ψ` on `[x_min, x_max]`.
pub fn sample_time(
    w: &FrequencyWavelet,
    x_min: f64,
    x_max: f64,
    count: usize,
) -> Result<TimeSamples> {
    if count < 2 {
        return Err(Error::OutOfRange(format!(
            "need at least 2 points, got {count}"
        )));
    }
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        return Err(Error::OutOfRange(format!("bad range [{x_min}, {x_max}]")));
    }
    let pieces = spectral_pieces(w);
    let step = (x_max - x_min) / (count - 1) as f64;
    let xs: Vec<f64> = (0..count).map(|i| x_min + step * i as f64).collect();
    let values = xs.iter().map(|&x| psi_at(&pieces, x)).collect();
    Ok(TimeSamples {
        xs,
        values,
        real_valued: is_hermitian(w),
    })
}

/// `(1/2π) Σ |c|² (hi − lo)`, the squared norm assembled piece by piece.
pub fn plancherel_norm_sq(w: &FrequencyWavelet) -> f64 {
    spectral_pieces(w)
        .iter()
        .map(|p| p.value.norm_sqr() * (p.hi - p.lo))
        .sum::<f64>()
        / (2.0 * PI)
}

pub const MAX_SCALE: i32 = 30;

/// Precomputed dilates of `ψ̂` for repeated inner products.
pub struct GramContext {
    pieces: Vec<SpectralPiece>,
}

impl GramContext {
    pub fn new(w: &FrequencyWavelet) -> Self {
        GramContext {
            pieces: spectral_pieces(w),
        }
    }

    /// Pieces of `ξ ↦ 2^{−j/2} ψ̂(2^{−j} ξ)`.
    fn dilated(&self, j: i32) -> Vec<SpectralPiece> {
        let s = 2f64.powi(j);
        let a = 2f64.powf(-j as f64 / 2.0);
        self.pieces
            .iter()
            .map(|p| SpectralPiece {
                lo: p.lo * s,
                hi: p.hi * s,
                value: p.value * a,
            })
            .collect()
    }

    fn inner(p1: &[SpectralPiece], beta1: f64, p2: &[SpectralPiece], beta2: f64) -> Complex64 {
        let beta = beta2 - beta1;
        let (mut i, mut k) = (0, 0);
        let mut acc = Complex64::new(0.0, 0.0);
        while i < p1.len() && k < p2.len() {
            let lo = p1[i].lo.max(p2[k].lo);
            let hi = p1[i].hi.min(p2[k].hi);
            if lo < hi {
                acc += p1[i].value * p2[k].value.conj() * exp_integral(lo, hi, beta);
            }
            if p1[i].hi <= p2[k].hi {
                i += 1;
            } else {
                k += 1;
            }
        }
        acc / (2.0 * PI)
    }

    /// `⟨ψ_{j,k}, ψ_{j2,k2}⟩` with `ψ_{j,k}(x) = 2^{j/2} ψ(2^j x − k)`.
    pub fn entry(&self, j: i32, k: i64, j2: i32, k2: i64) -> Result<Complex64> {
        check_scale(j)?;
        check_scale(j2)?;
        let b1 = k as f64 * 2f64.powi(-j);
        let b2 = k2 as f64 * 2f64.powi(-j2);
        Ok(Self::inner(&self.dilated(j), b1, &self.dilated(j2), b2))
    }

    /// Gram matrix over `js × ks`, rows in `(j, k)` lexicographic order.
    pub fn matrix(&self, js: &[i32], ks: &[i64]) -> Result<Vec<Vec<Complex64>>> {
        for &j in js {
            check_scale(j)?;
        }
        let dil: Vec<Vec<SpectralPiece>> = js.iter().map(|&j| self.dilated(j)).collect();
        let idx: Vec<(usize, f64)> = js
            .iter()
            .enumerate()
            .flat_map(|(a, &j)| ks.iter().map(move |&k| (a, k as f64 * 2f64.powi(-j))))
            .collect();
        Ok(idx
            .iter()
            .map(|&(a, b1)| {
                idx.iter()
                    .map(|&(c, b2)| Self::inner(&dil[a], b1, &dil[c], b2))
                    .collect()
            })
            .collect())
    }
}

fn check_scale(j: i32) -> Result<()> {
    if j.abs() > MAX_SCALE {
        return Err(Error::OutOfRange(format!(
            "|j| = {} exceeds {MAX_SCALE}",
            j.abs()
        )));
    }
    Ok(())
}

pub fn gram_entry(w: &FrequencyWavelet, j: i32, k: i64, j2: i32, k2: i64) -> Result<Complex64> {
    GramContext::new(w).entry(j, k, j2, k2)
}

/// Largest `|G − I|` entry.
pub fn identity_defect(g: &[Vec<Complex64>]) -> f64 {
    g.iter()
        .enumerate()
        .flat_map(|(r, row)| {
            row.iter().enumerate().map(move |(c, v)| {
                let target = if r == c { 1.0 } else { 0.0 };
                (v - target).norm()
            })
        })
        .fold(0.0, f64::max)
}
