//! Deformed-coframe conditions.
//!
//! Given coefficients `Phi^p_q`, build the deformed (1,0) coframe
//! `alpha^p = omega^p + sum_q Phi^p_q conj(omega^q)` and derive polynomial
//! conditions on the `Phi` coefficients:
//!
//! * **integrable** — the (0,2) part of each `d alpha^p` vanishes in the new
//!   type decomposition, computed without inverting `I + Phi` as
//!   `d alpha^p ^ alpha^1 ^ ... ^ alpha^tot = 0`;
//! * **abelian** — additionally `d alpha^p ^ conj(alpha^1) ^ ... = 0`.
//!
//! Conjugates of the symbolic coefficients are handled with a second block
//! of formal variables (`Psi^p_q = conj(Phi^p_q)`): the abelian coefficients
//! are conjugate-swapped back into `Phi` variables, split by their
//! `Psi`-monomials (each split coefficient is `Psi`-free), and reduced: the
//! degree-<=1 pieces form a linear system whose reduced row echelon form
//! yields the conditions, and the higher-degree pieces must reduce to zero
//! modulo those pivots — any that do not are appended as extra conditions.
//! The output is therefore always a sufficient system; on the bundled
//! examples it is exact.

use std::collections::BTreeMap;

use crate::algebra::AlgebraSpec;
use crate::exact::{ExactMatrix, GaussianRational, Poly};
use crate::{Error, Result};

use super::InvariantForm;

/// Polynomial conditions on the coframe coefficients.
#[derive(Clone, Debug)]
pub struct CoframeConditions {
    /// Vanishing of all of these makes the deformed coframe integrable.
    pub integrable: Vec<Poly>,
    /// Vanishing of all of these (plus `integrable`) makes the deformed
    /// structure abelian. Linear conditions first, in echelon form.
    pub abelian: Vec<Poly>,
}

fn phi_nvars(phi: &BTreeMap<(usize, usize), Poly>) -> Result<usize> {
    let mut nvars = None;
    for p in phi.values() {
        match nvars {
            None => nvars = Some(p.nvars()),
            Some(v) if v == p.nvars() => {}
            Some(v) => {
                return Err(Error::BadArgument(format!(
                    "coframe coefficients mix variable counts {v} and {}",
                    p.nvars()
                )))
            }
        }
    }
    Ok(nvars.unwrap_or(0))
}

fn check_indices(tot: usize, phi_keys: impl Iterator<Item = (usize, usize)>) -> Result<()> {
    for (p, q) in phi_keys {
        if !(1..=tot).contains(&p) || !(1..=tot).contains(&q) {
            return Err(Error::BadArgument(format!(
                "coframe coefficient index ({p},{q}) out of range 1..={tot}"
            )));
        }
    }
    Ok(())
}

/// The change-of-coframe matrix at the origin: rows/cols over
/// `(omega^1..omega^tot, conj versions)`, mapping to `(alpha, conj alpha)`.
fn origin_matrix(tot: usize, phi0: &BTreeMap<(usize, usize), GaussianRational>) -> ExactMatrix {
    ExactMatrix::from_fn(2 * tot, 2 * tot, |r, c| {
        let lookup = |p: usize, q: usize, conjugate: bool| {
            let v = phi0
                .get(&(p, q))
                .cloned()
                .unwrap_or_else(GaussianRational::zero);
            if conjugate {
                v.conj()
            } else {
                v
            }
        };
        if r < tot {
            if c < tot {
                if r == c {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                }
            } else {
                lookup(r + 1, c - tot + 1, false)
            }
        } else if c < tot {
            lookup(r - tot + 1, c + 1, true)
        } else if r == c {
            GaussianRational::one()
        } else {
            GaussianRational::zero()
        }
    })
}

/// Raw condition coefficients: for each `p`, the coefficients of
/// `d alpha^p ^ against` in canonical monomial order.
fn raw_coefficients(
    spec: &AlgebraSpec,
    alphas: &[InvariantForm],
    against: &InvariantForm,
) -> Vec<Poly> {
    let mut out = Vec::new();
    for alpha in alphas {
        let product = alpha.d(spec).wedge(against);
        for (_, coeff) in product.terms() {
            out.push(coeff.clone());
        }
    }
    out
}

fn wedge_all(forms: &[InvariantForm], tot: usize, nvars: usize) -> InvariantForm {
    let mut acc = InvariantForm::scalar(tot, Poly::one(nvars));
    for f in forms {
        acc = acc.wedge(f);
    }
    acc
}

/// Sort key: total degree, then the deterministic printed form.
fn poly_sort_key(p: &Poly) -> (u32, String) {
    (p.total_degree().unwrap_or(0), format!("{p:?}"))
}

fn integrability_pipeline(raw: Vec<Poly>) -> Vec<Poly> {
    let mut polys: Vec<Poly> = Vec::new();
    for c in raw {
        let c = c.normalized();
        if c.is_zero() || polys.contains(&c) {
            continue;
        }
        polys.push(c);
    }
    polys.sort_by_cached_key(poly_sort_key);
    let mut kept: Vec<Poly> = Vec::new();
    for q in polys {
        if kept.iter().any(|h| q.try_div_exact(h).is_some()) {
            continue;
        }
        kept.push(q);
    }
    kept
}

fn abelian_pipeline(raw: Vec<Poly>, nvars: usize) -> Result<Vec<Poly>> {
    // swap the Phi block (0..nvars) with the Psi block (nvars..2*nvars)
    let swap: Vec<usize> = (0..2 * nvars)
        .map(|i| if i < nvars { i + nvars } else { i - nvars })
        .collect();
    let psi_block: Vec<usize> = (nvars..2 * nvars).collect();
    let mut linear: Vec<Poly> = Vec::new();
    let mut higher: Vec<Poly> = Vec::new();
    for c in raw {
        let sw = c.conj_coeffs().permute_vars(&swap);
        if sw.is_zero() {
            continue;
        }
        for (_psi_mono, coeff) in sw.split_by_block(&psi_block) {
            let coeff = coeff.restrict_vars(nvars);
            if coeff.is_zero() {
                continue;
            }
            if coeff.total_degree().unwrap_or(0) <= 1 {
                if !coeff.constant_term().is_zero() {
                    return Err(Error::Internal(
                        "coframe condition with a constant term".into(),
                    ));
                }
                linear.push(coeff);
            } else {
                higher.push(coeff);
            }
        }
    }
    // echelonize the linear system over the Phi variables
    let rows: Vec<Vec<GaussianRational>> = linear
        .iter()
        .map(|l| {
            (0..nvars)
                .map(|j| {
                    let mut expo = vec![0u32; nvars];
                    expo[j] = 1;
                    l.coeff(&expo)
                })
                .collect()
        })
        .collect();
    let mut conditions: Vec<Poly> = Vec::new();
    let mut substitutions: Vec<(usize, Poly)> = Vec::new();
    if !rows.is_empty() {
        let matrix = ExactMatrix::from_rows(rows);
        let (rref, pivots) = matrix.rref();
        for (i, &pcol) in pivots.iter().enumerate() {
            let mut cond = Poly::zero(nvars);
            for j in 0..nvars {
                cond = &cond + &Poly::var(nvars, j).scale(rref.entry(i, j));
            }
            substitutions.push((pcol, &Poly::var(nvars, pcol) - &cond));
            conditions.push(cond);
        }
    }
    for h in higher {
        let reduced = h.substitute_poly(&substitutions);
        if !reduced.is_zero() {
            conditions.push(reduced);
        }
    }
    Ok(conditions)
}

/// Derives the integrability and abelian conditions for the deformed
/// coframe with coefficients `phi` (keys `(p, q)`, 1-based; missing entries
/// are zero). All coefficient polynomials must share one variable count.
pub fn coframe_conditions(
    spec: &AlgebraSpec,
    phi: &BTreeMap<(usize, usize), Poly>,
) -> Result<CoframeConditions> {
    let tot = spec.total_dim();
    check_indices(tot, phi.keys().copied())?;
    let nvars = phi_nvars(phi)?;

    // invertibility of the full coframe at the origin of parameter space
    let phi0: BTreeMap<(usize, usize), GaussianRational> =
        phi.iter().map(|(&k, v)| (k, v.constant_term())).collect();
    if origin_matrix(tot, &phi0).rank() != 2 * tot {
        return Err(Error::BadArgument(
            "deformed coframe is degenerate at the origin".into(),
        ));
    }

    if nvars == 0 {
        // constant coefficients: conditions are just "these numbers vanish"
        let (integ, abel) = coframe_residual(spec, &phi0)?;
        let flag = |nonzero: bool| {
            if nonzero {
                vec![Poly::one(0)]
            } else {
                Vec::new()
            }
        };
        return Ok(CoframeConditions {
            integrable: flag(integ.iter().any(|c| !c.is_zero())),
            abelian: flag(abel.iter().any(|c| !c.is_zero())),
        });
    }

    // integrability, in the plain Phi variables
    let alphas: Vec<InvariantForm> = (1..=tot)
        .map(|p| {
            let mut a = InvariantForm::omega(tot, nvars, p);
            for q in 1..=tot {
                if let Some(c) = phi.get(&(p, q)) {
                    a = &a + &InvariantForm::omega_bar(tot, nvars, q).scale(c);
                }
            }
            a
        })
        .collect();
    let top = wedge_all(&alphas, tot, nvars);
    let integrable = integrability_pipeline(raw_coefficients(spec, &alphas, &top));

    // abelian, with a second block of formal conjugate variables
    let wide = 2 * nvars;
    let alphas_wide: Vec<InvariantForm> = (1..=tot)
        .map(|p| {
            let mut a = InvariantForm::omega(tot, wide, p);
            for q in 1..=tot {
                if let Some(c) = phi.get(&(p, q)) {
                    a = &a + &InvariantForm::omega_bar(tot, wide, q).scale(&c.extend_vars(wide, 0));
                }
            }
            a
        })
        .collect();
    let alphas_bar: Vec<InvariantForm> = (1..=tot)
        .map(|p| {
            let mut a = InvariantForm::omega_bar(tot, wide, p);
            for q in 1..=tot {
                if let Some(c) = phi.get(&(p, q)) {
                    let psi = c.conj_coeffs().extend_vars(wide, nvars);
                    a = &a + &InvariantForm::omega(tot, wide, q).scale(&psi);
                }
            }
            a
        })
        .collect();
    let top_bar = wedge_all(&alphas_bar, tot, wide);
    let abelian = abelian_pipeline(raw_coefficients(spec, &alphas_wide, &top_bar), nvars)?;

    Ok(CoframeConditions {
        integrable,
        abelian,
    })
}

/// Evaluates the raw coframe coefficients at a concrete `Phi`: returns the
/// integrability coefficient list and the abelian coefficient list. The
/// deformed structure is integrable (resp. abelian) exactly when the
/// corresponding list vanishes.
pub fn coframe_residual(
    spec: &AlgebraSpec,
    phi: &BTreeMap<(usize, usize), GaussianRational>,
) -> Result<(Vec<GaussianRational>, Vec<GaussianRational>)> {
    let tot = spec.total_dim();
    check_indices(tot, phi.keys().copied())?;
    if origin_matrix(tot, phi).rank() != 2 * tot {
        return Err(Error::BadArgument("deformed coframe is degenerate".into()));
    }
    let alphas: Vec<InvariantForm> = (1..=tot)
        .map(|p| {
            let mut a = InvariantForm::omega(tot, 0, p);
            for q in 1..=tot {
                if let Some(c) = phi.get(&(p, q)) {
                    a = &a + &InvariantForm::omega_bar(tot, 0, q).scale_const(c);
                }
            }
            a
        })
        .collect();
    let top = wedge_all(&alphas, tot, 0);
    let top_bar = wedge_all(&alphas.iter().map(|a| a.conj()).collect::<Vec<_>>(), tot, 0);
    let constants = |polys: Vec<Poly>| -> Vec<GaussianRational> {
        polys.into_iter().map(|p| p.constant_term()).collect()
    };
    Ok((
        constants(raw_coefficients(spec, &alphas, &top)),
        constants(raw_coefficients(spec, &alphas, &top_bar)),
    ))
}
