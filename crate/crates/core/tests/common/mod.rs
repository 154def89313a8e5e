//! Point-evaluation oracles. Each one reads the stored pieces directly and
//! sums lattice terms one point at a time, without the profile algebra
//! used by the library.

#![allow(dead_code)]

use bandwave::builder::{random_candidate, Candidate, CandidateKind, FrequencyWavelet};
use bandwave::exact::{rat, Rational, RationalPi};
use bandwave::sets::{Interval, IntervalSet, SnGeometry};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

/// `|ψ̂(x)|²` by linear scan of the stored pieces.
pub fn mag2_at(w: &FrequencyWavelet, x: &RationalPi) -> Rational {
    w.mag2()
        .pieces()
        .iter()
        .find(|p| &p.lo <= x && x < &p.hi)
        .map(|p| p.value.clone())
        .unwrap_or_else(Rational::zero)
}

/// `ψ̂(x)` in double precision.
pub fn psi_hat_at(w: &FrequencyWavelet, x: &RationalPi) -> Complex64 {
    let m = mag2_at(w, x);
    if m.is_zero() {
        return Complex64::new(0.0, 0.0);
    }
    let theta = w
        .phase()
        .pieces()
        .iter()
        .find(|p| &p.lo <= x && x < &p.hi)
        .map(|p| p.value.radians())
        .expect("phase covers the support");
    Complex64::from_polar(m.to_f64().unwrap().sqrt(), theta)
}

fn sup(w: &FrequencyWavelet) -> RationalPi {
    w.support().sup_abs().unwrap()
}

/// Dyadic exponents `j` whose dilate `2^j x` can reach the support.
fn dyadic_range(w: &FrequencyWavelet, x: &RationalPi) -> std::ops::RangeInclusive<i32> {
    let r = sup(w).coeff().to_f64().unwrap() / x.coeff().to_f64().unwrap().abs();
    let top = r.log2().ceil() as i32 + 1;
    (top - 64)..=top
}

fn translation_range(w: &FrequencyWavelet) -> std::ops::RangeInclusive<i64> {
    let k = sup(w).coeff().to_f64().unwrap().ceil() as i64;
    -k..=k
}

/// `Σ_j |ψ̂(2^j x)|²` with `x ≠ 0`.
pub fn rho_at(w: &FrequencyWavelet, x: &RationalPi) -> Rational {
    dyadic_range(w, x)
        .map(|j| mag2_at(w, &x.scale_pow2(j)))
        .sum()
}

/// `Σ_k |ψ̂(x + 2kπ)|²`.
pub fn periodized_at(w: &FrequencyWavelet, x: &RationalPi) -> Rational {
    translation_range(w)
        .map(|k| mag2_at(w, &x.shift_2pi(k)))
        .sum()
}

/// `Σ_{j≥1} Σ_k |ψ̂(2^j(x + 2kπ))|²`.
pub fn dimension_at(w: &FrequencyWavelet, x: &RationalPi) -> Rational {
    let mut total = Rational::zero();
    let s = sup(w);
    for j in 1..=64 {
        // 2^j |x + 2kπ| ≤ sup forces |x + 2kπ| ≤ sup / 2^j
        let reach = s.scale_pow2(-j);
        let kmax = (reach.coeff() + x.abs().coeff()).to_f64().unwrap().ceil() as i64 + 1;
        for k in -kmax..=kmax {
            total += mag2_at(w, &x.shift_2pi(k).scale_pow2(j));
        }
    }
    total
}

/// `Σ_{j≥1} |ψ̂(2^j x)|²`.
pub fn scaling_at(w: &FrequencyWavelet, x: &RationalPi) -> Rational {
    (1..=64).map(|j| mag2_at(w, &x.scale_pow2(j))).sum()
}

/// `t_m(x)` in double precision.
pub fn t_m_at(w: &FrequencyWavelet, m: i64, x: &RationalPi) -> Complex64 {
    let y = x.shift_2pi(m);
    (0..64)
        .map(|j| psi_hat_at(w, &x.scale_pow2(j)) * psi_hat_at(w, &y.scale_pow2(j)).conj())
        .sum()
}

/// `Σ_k ψ̂(x + 2kπ) conj ψ̂(2^j(x + 2kπ))` in double precision.
pub fn eq4_at(w: &FrequencyWavelet, j: i32, x: &RationalPi) -> Complex64 {
    translation_range(w)
        .map(|k| {
            let y = x.shift_2pi(k);
            psi_hat_at(w, &y) * psi_hat_at(w, &y.scale_pow2(j)).conj()
        })
        .sum()
}

/// Random rational point of `[lo, hi)` on a fine grid that avoids the
/// endpoints.
pub fn random_point(rng: &mut impl Rng, iv: &Interval) -> RationalPi {
    let denom = 1_000_003i64;
    let t = rng.gen_range(1..denom);
    &iv.lo + &(&iv.hi - &iv.lo).scale(&rat(t, denom))
}

pub fn random_point_in(rng: &mut impl Rng, set: &IntervalSet) -> RationalPi {
    let pieces = set.pieces();
    let iv = &pieces[rng.gen_range(0..pieces.len())];
    random_point(rng, iv)
}

/// Candidates cycling through the three kinds, with alternating evenness.
pub fn candidates(n: u32, count: u64, offset: u64) -> Vec<Candidate> {
    let g = SnGeometry::new(n).unwrap();
    let kinds = [
        CandidateKind::Valid,
        CandidateKind::BrokenIii,
        CandidateKind::BrokenV,
    ];
    (0..count)
        .map(|i| {
            let seed = offset + i;
            random_candidate(&g, seed, kinds[(i % 3) as usize], (i / 3) % 2 == 0).unwrap()
        })
        .collect()
}

/// Trapezoid rule for `ψ(x) = (1/2π) ∫ ψ̂(ξ) e^{iξx} dξ`, with nodes placed
/// on each support piece in proportion to its length.
pub fn quadrature_psi(w: &FrequencyWavelet, x: f64, nodes: usize) -> Complex64 {
    let pieces: Vec<(f64, f64, Complex64)> = w
        .mag2()
        .pieces()
        .iter()
        .flat_map(|p| {
            w.phase()
                .pieces()
                .iter()
                .filter_map(|q| {
                    let lo = p.lo.clone().max(q.lo.clone());
                    let hi = p.hi.clone().min(q.hi.clone());
                    (lo < hi).then(|| {
                        let v = Complex64::from_polar(
                            p.value.to_f64().unwrap().sqrt(),
                            q.value.radians(),
                        );
                        (lo.to_f64(), hi.to_f64(), v)
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let total: f64 = pieces.iter().map(|(lo, hi, _)| hi - lo).sum();
    let mut acc = Complex64::new(0.0, 0.0);
    for (lo, hi, v) in pieces {
        let m = (((hi - lo) / total) * nodes as f64).ceil().max(2.0) as usize;
        let h = (hi - lo) / m as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..=m {
            let xi = lo + h * i as f64;
            let wgt = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += Complex64::from_polar(wgt, xi * x);
        }
        acc += v * s * h;
    }
    acc / (2.0 * std::f64::consts::PI)
}
