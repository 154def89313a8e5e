//! Dimension function, scaling modulus and the MRA test.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::builder::FrequencyWavelet;
use crate::error::{Error, Result};
use crate::exact::{format_rational, pow2, rat_int, Rational, RationalPi};
use crate::profile::{
    constant_value, lattice_sum, one_sided_dyadic_sum, Lattice, Piece, StepProfile,
};
use crate::sets::{Interval, IntervalSet, SnGeometry};

/// `D_ψ` on `[−π, π)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionProfile {
    pub profile: StepProfile,
    pub max_value: Rational,
    /// Values taken on cells of positive length, zero included when some
    /// cell of `[−π, π)` is uncovered.
    pub attained: BTreeSet<Rational>,
    pub integer_valued: bool,
    pub is_mra: bool,
}

fn window() -> IntervalSet {
    IntervalSet::interval(-RationalPi::pi(), RationalPi::pi())
}

impl DimensionProfile {
    pub fn from_profile(profile: StepProfile) -> Self {
        let w = window();
        let attained: BTreeSet<Rational> = profile
            .cells_on(&w)
            .into_iter()
            .map(|(_, v)| v.unwrap_or_else(Rational::zero))
            .collect();
        let max_value = attained
            .iter()
            .next_back()
            .cloned()
            .unwrap_or_else(Rational::zero);
        let integer_valued = attained.iter().all(|v| v.is_integer());
        let is_mra = constant_value(&profile, &w).is_some_and(|c| c.is_one());
        DimensionProfile {
            profile,
            max_value,
            attained,
            integer_valued,
            is_mra,
        }
    }

    /// Value at `ξ`, using `2π`-periodicity.
    pub fn value_at(&self, x: &RationalPi) -> Rational {
        let shifted = x + &RationalPi::pi();
        let k = shifted.floor_2pi();
        let k = k.to_i64().expect("moderate argument");
        self.profile.value_at(&x.shift_2pi(-k))
    }

    pub fn is_even(&self) -> bool {
        // reflection maps [−π, π) to (−π, π]; compare on the open interval
        self.profile.reflect().restrict(&window()) == self.profile.restrict(&window())
    }

    /// Cells of `[−π, π)` with their values, gaps reported as zero.
    pub fn cells(&self) -> Vec<(Interval, Rational)> {
        self.profile
            .cells_on(&window())
            .into_iter()
            .map(|(c, v)| (c, v.unwrap_or_else(Rational::zero)))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let num = |v: &Rational| match v.to_integer().to_i64() {
            Some(i) if v.is_integer() => json!(i),
            _ => json!(format_rational(v)),
        };
        json!({
            "pieces": self.cells().iter().map(|(c, v)| json!({
                "lo": format_rational(c.lo.coeff()),
                "hi": format_rational(c.hi.coeff()),
                "value": format_rational(v),
            })).collect::<Vec<_>>(),
            "max": num(&self.max_value),
            "attained": self.attained.iter().map(num).collect::<Vec<_>>(),
            "integer_valued": self.integer_valued,
            "is_mra": self.is_mra,
        })
    }

    /// CSV rows `lo_over_pi,hi_over_pi,value,lo_exact,hi_exact,value_exact`;
    /// decimals carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lo_over_pi,hi_over_pi,value,lo_exact,hi_exact,value_exact\n");
        for (c, v) in self.cells() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{},{},{}",
                c.lo.coeff_f64(),
                c.hi.coeff_f64(),
                crate::exact::to_f64(&v),
                format_rational(c.lo.coeff()),
                format_rational(c.hi.coeff()),
                format_rational(&v)
            );
        }
        out
    }
}

/// `Σ_{j≥1} Σ_k |ψ̂(2^j(ξ + 2kπ))|²` on `[−π, π)`.
pub fn dimension_function(w: &FrequencyWavelet) -> Result<DimensionProfile> {
    let s = lattice_sum(w.mag2(), Lattice::DilationsThenTranslations)?;
    Ok(DimensionProfile::from_profile(s.profile))
}

/// `|φ̂(ξ)|² = Σ_{j≥1} |ψ̂(2^j ξ)|²`.
pub fn scaling_modulus_sq(w: &FrequencyWavelet) -> Result<StepProfile> {
    one_sided_dyadic_sum(w.mag2())
}

/// Ladder points `p_l = 2^l a_n` and `q_l = 2^{l−1} e_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicLadder {
    pub n: u32,
    pub l: i32,
    pub p_l: RationalPi,
    pub q_l: RationalPi,
}

pub fn dyadic_ladder(n: u32, l: i32) -> Result<DyadicLadder> {
    let g = SnGeometry::new(n)?;
    Ok(DyadicLadder {
        n,
        l,
        p_l: g.a.scale_pow2(l),
        q_l: g.e.scale_pow2(l - 1),
    })
}

/// The common dimension function of all wavelets supported in `S_n`:
/// `n − 1` near the origin, `r − 1` on `|ξ| ∈ [2^{n−r}, 2^{n−r+1}) π/(2^n−1)`,
/// `0` on `|ξ| ∈ [a_n, e_n)` and `1` on `|ξ| ∈ [e_n, π)`.
pub fn closed_form_dn(n: u32) -> Result<DimensionProfile> {
    let g = SnGeometry::new(n)?;
    g.require_full_geometry()?;
    let unit = RationalPi::new(Rational::one() / (pow2(n as i32) - rat_int(1)));
    let mut half: Vec<(RationalPi, RationalPi, Rational)> = vec![(
        RationalPi::zero(),
        unit.scale_pow2(1),
        rat_int(n as i64 - 1),
    )];
    for r in 2..n as i32 {
        half.push((
            unit.scale_pow2(n as i32 - r),
            unit.scale_pow2(n as i32 - r + 1),
            rat_int(r as i64 - 1),
        ));
    }
    half.push((g.a.clone(), g.e.clone(), Rational::zero()));
    half.push((g.e.clone(), RationalPi::pi(), Rational::one()));
    let pieces = half
        .iter()
        .flat_map(|(lo, hi, v)| {
            [
                Piece::new(lo.clone(), hi.clone(), v.clone()),
                Piece::new(-hi, -lo, v.clone()),
            ]
        })
        .collect();
    Ok(DimensionProfile::from_profile(StepProfile::from_pieces(
        pieces,
    )?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MraKind {
    Mra,
    NonMra,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MraVerdict {
    pub kind: MraKind,
    /// A maximal cell of `[−π, π)` where `D ≠ 1`, with its value.
    pub evidence: Option<(Interval, Rational)>,
}

/// MRA iff `D ≡ 1`. Evidence favours the smallest value, then cells on
/// the nonnegative half-line, then the leftmost.
pub fn mra_verdict(w: &FrequencyWavelet) -> Result<MraVerdict> {
    let d = dimension_function(w)?;
    if d.is_mra {
        return Ok(MraVerdict {
            kind: MraKind::Mra,
            evidence: None,
        });
    }
    let one = Rational::one();
    let evidence = d
        .cells()
        .into_iter()
        .filter(|(_, v)| v != &one)
        .min_by_key(|(c, v)| (v.clone(), c.lo.is_negative(), c.lo.clone()));
    Ok(MraVerdict {
        kind: MraKind::NonMra,
        evidence,
    })
}

pub fn closed_form_matches(d: &DimensionProfile, n: u32) -> Result<bool> {
    if n < 3 {
        return Err(Error::OutOfRange(format!(
            "closed form needs n >= 3, got {n}"
        )));
    }
    Ok(closed_form_dn(n)?.profile == d.profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_family, Family};
    use crate::exact::rat;
    use crate::sets::shannon_set;

    fn shannon() -> FrequencyWavelet {
        FrequencyWavelet::real_positive(
            None,
            "shannon",
            StepProfile::constant_on(&shannon_set(), Rational::one()),
        )
        .unwrap()
    }

    #[test]
    fn shannon_is_mra() {
        let d = dimension_function(&shannon()).unwrap();
        assert!(d.is_mra);
        assert_eq!(mra_verdict(&shannon()).unwrap().kind, MraKind::Mra);
        let phi = scaling_modulus_sq(&shannon()).unwrap();
        assert_eq!(
            phi,
            StepProfile::constant_on(&IntervalSet::from_coeffs(1, &[(-1, 1)]), Rational::one())
        );
    }

    #[test]
    fn gamma3_profile() {
        let d = dimension_function(&build_family(Family::Gamma, 3, None).unwrap()).unwrap();
        let expect = [((0, 2), 2), ((2, 4), 1), ((4, 6), 0), ((6, 7), 1)];
        for ((lo, hi), v) in expect {
            let x = RationalPi::frac(lo, 7).midpoint(&RationalPi::frac(hi, 7));
            assert_eq!(d.value_at(&x), rat_int(v));
            assert_eq!(d.value_at(&-&x), rat_int(v));
        }
        assert_eq!(d, closed_form_dn(3).unwrap());
        assert!(d.is_even());
        assert!(!d.is_mra);
    }

    #[test]
    fn closed_form_n4() {
        let d = closed_form_dn(4).unwrap();
        for ((lo, hi), v) in [
            ((0, 2), 3),
            ((2, 4), 2),
            ((4, 8), 1),
            ((8, 14), 0),
            ((14, 15), 1),
        ] {
            let x = RationalPi::frac(lo, 15).midpoint(&RationalPi::frac(hi, 15));
            assert_eq!(d.value_at(&x), rat_int(v));
        }
        for n in 3..=10 {
            let d = closed_form_dn(n).unwrap();
            let all: BTreeSet<Rational> = (0..n as i64).map(rat_int).collect();
            assert_eq!(d.attained, all);
            assert_eq!(d.max_value, rat_int(n as i64 - 1));
            assert!(d.integer_valued && d.is_even());
        }
        assert!(closed_form_dn(2).is_err());
    }

    #[test]
    fn ladder_points() {
        for n in 3..=8 {
            let g = SnGeometry::new(n).unwrap();
            let l = |l| dyadic_ladder(n, l).unwrap();
            assert_eq!(l(0).p_l, g.a);
            assert_eq!(l(1).p_l, g.b);
            assert_eq!(l(n as i32).p_l, g.d);
            assert_eq!(l(1).q_l, g.e);
            assert_eq!(l(n as i32).q_l, g.c);
            for k in 0..n as i32 {
                assert!(l(k).p_l < l(k + 1).q_l && l(k + 1).q_l < l(k + 1).p_l);
            }
        }
    }

    #[test]
    fn psi_sixone_exceeds_two() {
        for n in 3..=6 {
            let g = SnGeometry::new(n).unwrap();
            let d = dimension_function(&build_family(Family::PsiSixOne, n, None).unwrap()).unwrap();
            let lo = g.a.scale_pow2(-2);
            let hi = g.e.scale_pow2(-2);
            for (c, v) in d.cells() {
                if c.lo < hi && c.hi > lo {
                    assert!(v >= rat_int(2));
                }
            }
            assert_eq!(d.profile.integrate(), RationalPi::two_pi());
        }
    }

    #[test]
    fn verdict_evidence() {
        for n in 3..=6 {
            let g = SnGeometry::new(n).unwrap();
            for f in [Family::Gamma, Family::WSixTwo, Family::MsfA] {
                let v = mra_verdict(&build_family(f, n, None).unwrap()).unwrap();
                assert_eq!(v.kind, MraKind::NonMra);
                assert_eq!(
                    v.evidence,
                    Some((Interval::new(g.a.clone(), g.e.clone()), Rational::zero()))
                );
            }
        }
    }

    #[test]
    fn telescoping() {
        let w = build_family(Family::WSixTwo, 4, None).unwrap();
        let phi = scaling_modulus_sq(&w).unwrap();
        let lhs = phi.add(
            &phi.pullback(crate::profile::Pullback::Dilate(1))
                .scale_values(&rat(-1, 1)),
        );
        let rhs = w.mag2().pullback(crate::profile::Pullback::Dilate(1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_shape() {
        let d = closed_form_dn(3).unwrap();
        let v = d.to_json();
        assert_eq!(v["max"], json!(2));
        assert_eq!(v["attained"], json!([0, 1, 2]));
        assert_eq!(v["is_mra"], json!(false));
        let csv = d.to_csv();
        assert!(csv.lines().count() > 4);
    }
}
