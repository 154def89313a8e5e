//! Deciding whether `Σ √r_i · e^{iπ t_i}` vanishes, with `r_i ≥ 0` and
//! `t_i` rational.
//!
//! Terms are grouped by square class of the radicand, so each group reads
//! `√r · Σ q_i e^{iπ t_i}` with rational `q_i`. Within a group the phase sum
//! lives in a cyclotomic field and is decided exactly. Across groups the
//! square roots are independent over `ℚ(i)`, so when every phase is a
//! quarter turn the groups vanish separately. Mixed square classes with
//! finer phases fall back to 200-bit floating evaluation.

use std::collections::{BTreeMap, HashMap};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::{rat_int, rational_sqrt, PhasePi, Rational, SqrtRational};

/// One summand `√r · e^{iπ t}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub mag: SqrtRational,
    pub phase: PhasePi,
}

impl Term {
    pub fn new(mag: SqrtRational, phase: PhasePi) -> Self {
        Term { mag, phase }
    }

    pub fn conj(&self) -> Term {
        Term::new(self.mag.clone(), self.phase.neg())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        let m = self.mag.to_f64();
        let a = self.phase.radians();
        (m * a.cos(), m * a.sin())
    }
}

/// Outcome of a zero test.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTest {
    pub is_zero: bool,
    /// Decided by the floating fallback rather than exactly.
    pub numeric: bool,
    /// `|Σ|` in double precision, for reporting.
    pub residual: f64,
}

/// Largest cyclotomic order tried before giving up on exact decision.
const MAX_ORDER: u64 = 4096;
const FALLBACK_BITS: usize = 200;

pub fn sum_is_zero(terms: &[Term]) -> ZeroTest {
    let residual = {
        let (re, im) = terms.iter().fold((0.0, 0.0), |(a, b), t| {
            let (x, y) = t.to_f64();
            (a + x, b + y)
        });
        re.hypot(im)
    };
    let groups = square_classes(terms);
    let mut live: Vec<(Rational, BTreeMap<Rational, Rational>)> = Vec::new();
    let mut decided = true;
    for (rep, coeffs) in groups {
        let folded = fold_antipodes(coeffs);
        match cyclotomic_zero(&folded) {
            Some(true) => continue,
            Some(false) => {}
            None => decided = false,
        }
        live.push((rep, folded));
    }
    let exact = |is_zero| ZeroTest {
        is_zero,
        numeric: false,
        residual,
    };
    match live.len() {
        0 => exact(true),
        1 if decided => exact(false),
        _ => {
            let quarter = live
                .iter()
                .all(|(_, c)| c.keys().all(|t| (t * rat_int(2)).is_integer()));
            if quarter && decided {
                exact(false)
            } else {
                ZeroTest {
                    is_zero: numeric_zero(&live),
                    numeric: true,
                    residual,
                }
            }
        }
    }
}

/// Groups by square class: `r_i / rep` a rational square. Each group maps
/// phase turns to the summed rational coefficient.
fn square_classes(terms: &[Term]) -> Vec<(Rational, BTreeMap<Rational, Rational>)> {
    let mut groups: Vec<(Rational, BTreeMap<Rational, Rational>)> = Vec::new();
    for t in terms {
        let r = t.mag.radicand();
        if r.is_zero() {
            continue;
        }
        let hit = groups
            .iter_mut()
            .find_map(|(rep, map)| rational_sqrt(&(r / &*rep)).map(|q| (q, map)));
        let (q, map) = match hit {
            Some(h) => h,
            None => {
                groups.push((r.clone(), BTreeMap::new()));
                let (_, map) = groups.last_mut().expect("just pushed");
                (Rational::one(), map)
            }
        };
        *map.entry(t.phase.turns().clone())
            .or_insert_with(Rational::zero) += q;
    }
    groups
}

/// Uses `e^{iπ(t+1)} = −e^{iπ t}` to move every phase into `[0, 1)`, then
/// drops vanished coefficients.
fn fold_antipodes(coeffs: BTreeMap<Rational, Rational>) -> BTreeMap<Rational, Rational> {
    let mut out: BTreeMap<Rational, Rational> = BTreeMap::new();
    for (t, c) in coeffs {
        let (t, c) = if t >= Rational::one() {
            (t - Rational::one(), -c)
        } else {
            (t, c)
        };
        *out.entry(t).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `Σ c_t e^{iπ t} = 0` exactly, via divisibility by the cyclotomic
/// polynomial `Φ_M` with `e^{iπ t} = ζ_M^{e_t}`. `None` when `M` is too
/// large to attempt.
fn cyclotomic_zero(coeffs: &BTreeMap<Rational, Rational>) -> Option<bool> {
    if coeffs.is_empty() {
        return Some(true);
    }
    let mut order = BigInt::one();
    for t in coeffs.keys() {
        order = order.lcm(&(t.denom() * BigInt::from(2)));
    }
    let order = order.to_u64().filter(|&m| m <= MAX_ORDER)?;
    let m = Rational::from_integer(BigInt::from(order));
    let mut poly = vec![Rational::zero(); order as usize];
    for (t, c) in coeffs {
        // e^{iπ t} = ζ_M^{t M / 2}
        let e = (t * &m / rat_int(2))
            .to_integer()
            .to_usize()
            .expect("small exponent");
        poly[e % order as usize] += c;
    }
    let phi = cyclotomic(order);
    Some(poly_rem(&poly, &phi).iter().all(Zero::is_zero))
}

/// Integer coefficients of `Φ_m`, lowest degree first.
fn cyclotomic(m: u64) -> Vec<BigInt> {
    thread_local! {
        static CACHE: std::cell::RefCell<HashMap<u64, Vec<BigInt>>> = Default::default();
    }
    if let Some(p) = CACHE.with(|c| c.borrow().get(&m).cloned()) {
        return p;
    }
    // x^m − 1 = Π_{d | m} Φ_d
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = -BigInt::one();
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic(d));
        }
    }
    CACHE.with(|c| c.borrow_mut().insert(m, num.clone()));
    num
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let lead = &den[dn];
    let mut q = vec![BigInt::zero(); rem.len() - dn];
    for i in (0..q.len()).rev() {
        let c = &rem[i + dn] / lead;
        for (k, dk) in den.iter().enumerate() {
            rem[i + k] -= &c * dk;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    q
}

fn poly_rem(num: &[Rational], den: &[BigInt]) -> Vec<Rational> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let den: Vec<Rational> = den.iter().cloned().map(Rational::from_integer).collect();
    if rem.len() <= dn {
        return rem;
    }
    for i in (dn..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &den[dn];
        for (k, dk) in den.iter().enumerate() {
            rem[i - dn + k] -= &c * dk;
        }
    }
    rem.truncate(dn);
    rem
}

fn big(q: &Rational, cc: &mut Consts) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let n = BigFloat::parse(&q.numer().to_string(), Radix::Dec, FALLBACK_BITS, rm, cc);
    let d = BigFloat::parse(&q.denom().to_string(), Radix::Dec, FALLBACK_BITS, rm, cc);
    n.div(&d, FALLBACK_BITS, rm)
}

fn numeric_zero(groups: &[(Rational, BTreeMap<Rational, Rational>)]) -> bool {
    let p = FALLBACK_BITS;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("constants cache");
    let pi = cc.pi(p, rm);
    let mut re = BigFloat::from_u8(0, p);
    let mut im = BigFloat::from_u8(0, p);
    for (rep, coeffs) in groups {
        let root = big(rep, &mut cc).sqrt(p, rm);
        for (t, c) in coeffs {
            let angle = big(t, &mut cc).mul(&pi, p, rm);
            let w = big(c, &mut cc).mul(&root, p, rm);
            re = re.add(&w.mul(&angle.cos(p, rm, &mut cc), p, rm), p, rm);
            im = im.add(&w.mul(&angle.sin(p, rm, &mut cc), p, rm), p, rm);
        }
    }
    let threshold = BigFloat::parse("1e-50", Radix::Dec, p, rm, &mut cc);
    let small = |x: &BigFloat| x.abs().cmp(&threshold).is_some_and(|o| o < 0);
    small(&re) && small(&im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn term(r: (i64, i64), t: (i64, i64)) -> Term {
        Term::new(
            SqrtRational::new(rat(r.0, r.1)).unwrap(),
            PhasePi::frac(t.0, t.1),
        )
    }

    #[test]
    fn antipodal_halves_cancel() {
        // 1/√2·1/√2 at phase 0 plus the same at phase π
        let t = [term((1, 4), (0, 1)), term((1, 4), (1, 1))];
        let z = sum_is_zero(&t);
        assert!(z.is_zero && !z.numeric);
    }

    #[test]
    fn positive_sum_is_nonzero() {
        let t = [term((1, 4), (0, 1)), term((1, 4), (0, 1))];
        assert!(!sum_is_zero(&t).is_zero);
        assert!(sum_is_zero(&[]).is_zero);
    }

    #[test]
    fn square_class_merging() {
        // √8 = 2√2
        let t = [
            term((8, 1), (0, 1)),
            term((2, 1), (1, 1)),
            term((2, 1), (1, 1)),
        ];
        assert!(sum_is_zero(&t).is_zero);
        let t = [term((2, 1), (0, 1)), term((3, 1), (1, 1))];
        let z = sum_is_zero(&t);
        assert!(!z.is_zero && !z.numeric);
    }

    #[test]
    fn quarter_turns() {
        let t = [term((1, 1), (1, 2)), term((1, 1), (3, 2))];
        assert!(sum_is_zero(&t).is_zero);
        let t = [term((1, 1), (1, 2)), term((1, 1), (0, 1))];
        assert!(!sum_is_zero(&t).is_zero);
    }

    #[test]
    fn cube_roots_of_unity() {
        let t = [
            term((1, 1), (0, 1)),
            term((1, 1), (2, 3)),
            term((1, 1), (4, 3)),
        ];
        let z = sum_is_zero(&t);
        assert!(z.is_zero && !z.numeric);
        let t = [term((1, 1), (0, 1)), term((1, 1), (2, 3))];
        assert!(!sum_is_zero(&t).is_zero);
        // fifth roots
        let t: Vec<Term> = (0..5).map(|k| term((9, 4), (2 * k, 5))).collect();
        assert!(sum_is_zero(&t).is_zero);
    }

    #[test]
    fn mixed_classes_fall_back() {
        // √2 = e^{iπ/4} + e^{-iπ/4}, so √2 − e^{iπ/4} − e^{−iπ/4} = 0
        let t = [
            term((2, 1), (0, 1)),
            term((1, 1), (5, 4)),
            term((1, 1), (3, 4)),
        ];
        let z = sum_is_zero(&t);
        assert!(z.is_zero && z.numeric);
        let t = [term((2, 1), (0, 1)), term((1, 1), (1, 4))];
        let z = sum_is_zero(&t);
        assert!(!z.is_zero && z.numeric);
    }

    #[test]
    fn cyclotomic_polys() {
        let to_i = |v: Vec<BigInt>| v.iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(cyclotomic(1)), vec![-1, 1]);
        assert_eq!(to_i(cyclotomic(4)), vec![1, 0, 1]);
        assert_eq!(to_i(cyclotomic(6)), vec![1, -1, 1]);
        assert_eq!(to_i(cyclotomic(12)), vec![1, 0, -1, 0, 1]);
    }
}
