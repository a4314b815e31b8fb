//! Cofactors of `f` with respect to `g`.
//!
//! A cofactor is any function that agrees with `f` on the ON-set of `g`.
//! The set of them, written Ξ(f, g) here, is exactly the interval
//! `[f·g, f + g′]`, so membership reduces to one canonical equality and the
//! whole interval is reachable through [`general_cofactor`].

use thiserror::Error;

use crate::engine::{BoolFunc, Manager};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CofactorError {
    #[error("{bases} base functions but {cofactors} cofactors")]
    LengthMismatch { bases: usize, cofactors: usize },
    #[error("f is not covered by the sum of the base functions")]
    CoverViolation,
    #[error("cofactor {index} is not a cofactor of f with respect to its base function")]
    NotACofactor { index: usize },
}

/// The bounds of Ξ(f, g): `lower = f·g`, `upper = f + g′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CofactorInterval {
    pub lower: BoolFunc,
    pub upper: BoolFunc,
}

impl CofactorInterval {
    /// True when `lower ≤ a ≤ upper`.
    pub fn contains(&self, mgr: &Manager, a: BoolFunc) -> bool {
        mgr.leq(self.lower, a) && mgr.leq(a, self.upper)
    }
}

pub fn cofactor_interval(mgr: &Manager, f: BoolFunc, g: BoolFunc) -> CofactorInterval {
    CofactorInterval {
        lower: mgr.and(f, g),
        upper: mgr.or(f, mgr.not(g)),
    }
}

/// `a ∈ Ξ(f, g)`, tested as `a·g = f·g`.
pub fn is_cofactor(mgr: &Manager, a: BoolFunc, f: BoolFunc, g: BoolFunc) -> bool {
    mgr.and(a, g) == mgr.and(f, g)
}

/// `f·g + p·g′`. Every member of Ξ(f, g) has this form for some `p`.
pub fn general_cofactor(mgr: &Manager, f: BoolFunc, g: BoolFunc, p: BoolFunc) -> BoolFunc {
    mgr.ite(g, f, p)
}

/// Rebuilds `f` as `Σ αᵢ·gᵢ`, after checking that the `gᵢ` cover `f` and
/// that each `αᵢ` is a cofactor of `f` with respect to `gᵢ`.
pub fn expand(
    mgr: &Manager,
    f: BoolFunc,
    bases: &[BoolFunc],
    cofactors: &[BoolFunc],
) -> Result<BoolFunc, CofactorError> {
    if bases.len() != cofactors.len() {
        return Err(CofactorError::LengthMismatch {
            bases: bases.len(),
            cofactors: cofactors.len(),
        });
    }
    if !mgr.leq(f, mgr.or_all(bases.iter().copied())) {
        return Err(CofactorError::CoverViolation);
    }
    if let Some(index) = bases
        .iter()
        .zip(cofactors)
        .position(|(&g, &a)| !is_cofactor(mgr, a, f, g))
    {
        return Err(CofactorError::NotACofactor { index });
    }
    let sum = mgr.or_all(bases.iter().zip(cofactors).map(|(&g, &a)| mgr.and(a, g)));
    debug_assert_eq!(sum, f);
    Ok(sum)
}
