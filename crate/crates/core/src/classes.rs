//! Weber classes `M_k` through partial self-similarity of the support.

use serde::{Serialize, Serializer};

use crate::builder::FrequencyWavelet;
use crate::error::{Error, Result};
use crate::exact::{rat_int, RationalPi};
use crate::sets::IntervalSet;
use crate::verifier::verify;

/// `F ⊆ E` and `F + α ⊆ E` with `|F| > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfSimilarityWitness {
    pub alpha: RationalPi,
    /// The maximal such set, `E ∩ (E − α)`.
    pub f: IntervalSet,
    pub measure: RationalPi,
}

/// Maximal witness of partial self-similarity of `e` under `α`.
pub fn partial_self_similarity(
    e: &IntervalSet,
    alpha: &RationalPi,
) -> Option<SelfSimilarityWitness> {
    let f = e.intersection(&e.shift(&-alpha));
    let measure = f.measure();
    measure.is_positive().then(|| SelfSimilarityWitness {
        alpha: alpha.clone(),
        f,
        measure,
    })
}

/// `|ψ̂| ∈ {0, 1}`.
pub fn msf_test(w: &FrequencyWavelet) -> bool {
    w.is_msf()
}

/// A probed shift `α = 2^k q π`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelProbe {
    pub k: u32,
    /// Odd multipliers tried at this level, all with empty overlap unless
    /// the level produced the witness.
    pub probes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// `M_k`.
    Finite(u32),
    /// MSF wavelets.
    Infinite,
    /// No witness up to the search bound.
    Inconclusive,
}

impl ClassKind {
    pub fn label(&self) -> String {
        match self {
            ClassKind::Finite(k) => format!("M_{k}"),
            ClassKind::Infinite => "M_inf".into(),
            ClassKind::Inconclusive => "inconclusive".into(),
        }
    }
}

impl Serialize for ClassKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassLabel {
    pub class: ClassKind,
    pub witnesses: Vec<SelfSimilarityWitness>,
    /// Levels whose every admissible shift had empty overlap.
    pub cleared: Vec<LevelProbe>,
}

/// Odd `q` with `|2^k q π| ≤ bound`, ordered by `|q|` and then sign.
fn odd_multipliers(k: u32, bound: &RationalPi) -> Vec<i64> {
    let step = RationalPi::int(1).scale_pow2(k as i32);
    let mut out = Vec::new();
    let mut q = 1i64;
    while step.scale(&rat_int(q)) <= *bound {
        out.push(q);
        out.push(-q);
        q += 2;
    }
    out
}

/// Classification of a wavelet already known to be one. `max_k` bounds
/// the dyadic levels searched.
pub fn classify_verified(w: &FrequencyWavelet, max_k: u32) -> ClassLabel {
    if msf_test(w) {
        debug_assert_eq!(w.support().measure(), RationalPi::two_pi());
        return ClassLabel {
            class: ClassKind::Infinite,
            witnesses: Vec::new(),
            cleared: Vec::new(),
        };
    }
    let e = w.support();
    let bound = e.sup_abs().unwrap_or_else(RationalPi::zero).scale_pow2(1);
    let mut cleared = Vec::new();
    for k in 1..=max_k {
        let qs = odd_multipliers(k, &bound);
        if qs.is_empty() {
            // every larger shift moves E off itself
            break;
        }
        for &q in &qs {
            let alpha = RationalPi::int(q).scale_pow2(k as i32);
            if let Some(wit) = partial_self_similarity(&e, &alpha) {
                return ClassLabel {
                    class: ClassKind::Finite(k - 1),
                    witnesses: vec![wit],
                    cleared,
                };
            }
        }
        cleared.push(LevelProbe {
            k,
            probes: qs.len(),
        });
    }
    ClassLabel {
        class: ClassKind::Inconclusive,
        witnesses: Vec::new(),
        cleared,
    }
}

/// Verifies first, then classifies.
pub fn classify(w: &FrequencyWavelet, max_k: u32) -> Result<ClassLabel> {
    let report = verify(w)?;
    if !report.verdict {
        return Err(Error::NotAWavelet(w.family.clone()));
    }
    Ok(classify_verified(w, max_k))
}

pub const DEFAULT_MAX_K: u32 = 32;
