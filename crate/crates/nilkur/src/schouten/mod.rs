//! The Schouten bracket on invariant vector-valued (0,1)-forms.
//!
//! Because the complex structure is abelian, `[V, V′] = 0` for all (1,0)
//! vectors, and the bracket of two decomposable elements reduces to
//!
//! ```text
//! {ω̄ ⊗ V, ω̄′ ⊗ V′} = ω̄′ ∧ ι_{V′} dω̄ ⊗ V + ω̄ ∧ ι_V dω̄′ ⊗ V′,
//! ```
//!
//! a symmetric pairing with values in (0,2)-forms.  Two independent
//! implementations are kept deliberately:
//!
//! * [`schouten`] — the normative route: closed-form coefficient expressions
//!   in the structure constants `Ē^α_{ik}`, extended bilinearly over the
//!   polynomial coefficients of the arguments;
//! * [`schouten_via_forms`] — the same pairing computed through the
//!   wedge/contract/d machinery of [`crate::forms`].
//!
//! The two must agree exactly; the tests enforce this, and the bracket is
//! the engine of the deformation recursion, so the agreement is load-bearing.
//!
//! [`condition_a`] is the companion linear test: together with closedness it
//! characterizes the directions whose deformed structures stay abelian.
//! Only degree (0,1) × (0,1) brackets are provided — that is all the
//! recursion ever needs.

use crate::algebra::AlgebraSpec;
use crate::dolbeault::{pairing_conditions, TensorBasis, VectorForm};
use crate::exact::{GaussianRational, Poly};
use crate::forms::InvariantForm;
use crate::{Error, Result};

/// The value of a bracket: a degree-2 [`VectorForm`], alternating in the form
/// part and symmetric in the two arguments.
pub type BracketValue = VectorForm;

fn check_args(spec: &AlgebraSpec, mu: &VectorForm, nu: &VectorForm) -> Result<()> {
    if mu.degree() != 1 || nu.degree() != 1 {
        return Err(Error::BadArgument(format!(
            "the bracket takes two degree-1 forms, got degrees {} and {}",
            mu.degree(),
            nu.degree()
        )));
    }
    if mu.tot() != spec.total_dim() || nu.tot() != spec.total_dim() {
        return Err(Error::BadArgument(
            "bracket arguments must live on the same algebra as the spec".into(),
        ));
    }
    if mu.nvars() != nu.nvars() {
        return Err(Error::BadArgument(format!(
            "bracket arguments must share one parameter ring, got {} and {} variables",
            mu.nvars(),
            nu.nvars()
        )));
    }
    Ok(())
}

/// The Schouten bracket `{μ, ν}` via the closed-form coefficient expressions.
///
/// For basis elements, with `p` central and `q′ ≤ n`,
///
/// ```text
/// {ω̄^p ⊗ e_q, ω̄^{p′} ⊗ e_{q′}}  ∋  −Σ_k Ē^p_{q′k} ω̄^{p′} ∧ ω̄^k ⊗ e_q
/// ```
///
/// plus the mirrored term with the roles of the arguments swapped; all other
/// combinations contribute nothing.  The bracket is extended bilinearly over
/// the polynomial coefficients, which makes it symmetric by construction.
pub fn schouten(spec: &AlgebraSpec, mu: &VectorForm, nu: &VectorForm) -> Result<BracketValue> {
    check_args(spec, mu, nu)?;
    let tot = spec.total_dim();
    let n = spec.n();
    let nvars = mu.nvars();
    let basis = TensorBasis::new(tot, 1);
    let target = TensorBasis::new(tot, 2);
    let mut out = VectorForm::zero(tot, 2, nvars);

    // One directed half of the bracket: the side where dω̄ falls on `a`.
    let mut half = |a_idx: usize, ca: &Poly, b_idx: usize, cb: &Poly| {
        let (pa, qa) = basis.element(a_idx);
        let (pb, qb) = basis.element(b_idx);
        let (pa, pb) = (pa[0], pb[0]);
        if pa <= n || qb > n {
            return; // dω̄^{pa} = 0, or ι_{W} kills the t-indexed leg
        }
        for k in 1..=n {
            let e = spec.e(pa, qb, k);
            if e.is_zero() || pb == k {
                continue;
            }
            let (lo, hi, sign) = if pb < k {
                (pb, k, 1i64)
            } else {
                (k, pb, -1i64)
            };
            let row = target.index_of(&[lo, hi], qa).expect("pair in range");
            let scale = e.conj() * &GaussianRational::from_integer(-sign);
            let term = (ca * cb).scale(&scale);
            let updated = out.coeff(row).clone();
            out.set_coeff(row, &updated + &term);
        }
    };

    for a_idx in 0..basis.len() {
        let ca = mu.coeff(a_idx).clone();
        if ca.is_zero() {
            continue;
        }
        for b_idx in 0..basis.len() {
            let cb = nu.coeff(b_idx).clone();
            if cb.is_zero() {
                continue;
            }
            half(a_idx, &ca, b_idx, &cb);
            half(b_idx, &cb, a_idx, &ca);
        }
    }
    Ok(out)
}

/// The same bracket computed through the forms machinery:
/// `{ω̄ ⊗ V, ω̄′ ⊗ V′} = ω̄′ ∧ ι_{V′} dω̄ ⊗ V + ω̄ ∧ ι_V dω̄′ ⊗ V′`,
/// extended bilinearly.  Must agree with [`schouten`] exactly.
pub fn schouten_via_forms(
    spec: &AlgebraSpec,
    mu: &VectorForm,
    nu: &VectorForm,
) -> Result<BracketValue> {
    check_args(spec, mu, nu)?;
    let tot = spec.total_dim();
    let nvars = mu.nvars();
    let basis = TensorBasis::new(tot, 1);
    let omega_bar = |p: usize| InvariantForm::omega_bar(tot, nvars, p);
    let mut out = VectorForm::zero(tot, 2, nvars);
    for a_idx in 0..basis.len() {
        let ca = mu.coeff(a_idx);
        if ca.is_zero() {
            continue;
        }
        let (pa, qa) = basis.element(a_idx);
        let da = omega_bar(pa[0]).d(spec);
        for b_idx in 0..basis.len() {
            let cb = nu.coeff(b_idx);
            if cb.is_zero() {
                continue;
            }
            let (pb, qb) = basis.element(b_idx);
            let db = omega_bar(pb[0]).d(spec);
            let weight = ca * cb;
            let t1 = omega_bar(pb[0]).wedge(&da.contract(qb - 1));
            if !t1.is_zero() {
                out.add_form_part(&t1.scale(&weight), qa);
            }
            let t2 = omega_bar(pa[0]).wedge(&db.contract(qa - 1));
            if !t2.is_zero() {
                out.add_form_part(&t2.scale(&weight), qb);
            }
        }
    }
    Ok(out)
}

/// Condition A on a degree-1 form: the same index families as the closedness
/// test, evaluated against the conjugate-linear structure constants `F`
/// instead of `E`.  Zero polynomials are dropped; an empty result means the
/// condition holds identically.
///
/// A closed form satisfying Condition A spans an infinitesimally abelian
/// deformation direction, and Condition A depends only on the T-valued
/// components, so the image of `∂̄₀` (which is W-valued) always satisfies it.
pub fn condition_a(spec: &AlgebraSpec, mu: &VectorForm) -> Vec<Poly> {
    pairing_conditions(spec, mu, |alpha, k, j| spec.f(alpha, k, j))
}

/// The coefficient matrix of Condition A on a generic degree-1 form: one row
/// per condition, one column per tensor-basis coordinate.  A form satisfies
/// Condition A exactly when its coordinate vector lies in the kernel.
pub fn condition_a_matrix(spec: &AlgebraSpec) -> crate::exact::ExactMatrix {
    let tot = spec.total_dim();
    let mu = VectorForm::generic(tot, 1);
    let nvars = mu.nvars();
    let rows: Vec<Vec<GaussianRational>> = condition_a(spec, &mu)
        .iter()
        .map(|p| {
            (0..nvars)
                .map(|i| {
                    let mut e = vec![0u32; nvars];
                    e[i] = 1;
                    p.coeff(&e)
                })
                .collect()
        })
        .collect();
    if rows.is_empty() {
        crate::exact::ExactMatrix::zeros(0, nvars)
    } else {
        crate::exact::ExactMatrix::from_rows(rows)
    }
}

/// Dimension of the space of first-order abelian deformation classes:
/// `dim(ker D₁ ∩ ker A) − rank D₀`, where `A` is the Condition-A matrix.
pub(crate) fn abelian_dim(spec: &AlgebraSpec) -> usize {
    let d1 = crate::dolbeault::dbar_matrix(spec, 1).expect("degree 1 in range");
    let d0 = crate::dolbeault::dbar_matrix(spec, 0).expect("degree 0 in range");
    let system = d1.vstack(&condition_a_matrix(spec));
    system.cols() - system.rank() - d0.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dolbeault::{apply_matrix, dbar_matrix, DolbeaultComplex};

    fn builtin(name: &str) -> AlgebraSpec {
        AlgebraSpec::builtin(name, &[]).unwrap()
    }

    fn all_builtins() -> Vec<AlgebraSpec> {
        AlgebraSpec::BUILTIN_NAMES
            .iter()
            .map(|n| builtin(n))
            .collect()
    }

    /// Two generic degree-1 forms over one shared parameter ring.
    fn generic_pair(tot: usize) -> (VectorForm, VectorForm) {
        let len = TensorBasis::new(tot, 1).len();
        let nvars = 2 * len;
        let mk = |offset: usize| {
            VectorForm::from_coeffs(
                tot,
                1,
                nvars,
                (0..len).map(|i| Poly::var(nvars, offset + i)).collect(),
            )
        };
        (mk(0), mk(len))
    }

    #[test]
    fn w6_self_bracket_worked_example() {
        // μ = a·ω̄¹⊗T₁ + b·ω̄³⊗T₁ + c·ω̄³⊗W: the self-bracket picks up every
        // ordered pair, so the diagonal b² term carries coefficient 2 like
        // the cross terms.
        let spec = builtin("w6");
        let a = Poly::var(3, 0);
        let b = Poly::var(3, 1);
        let c = Poly::var(3, 2);
        let mu = &(&VectorForm::unit(3, 3, &[1], 1).scale(&a)
            + &VectorForm::unit(3, 3, &[3], 1).scale(&b))
            + &VectorForm::unit(3, 3, &[3], 3).scale(&c);
        let bracket = schouten(&spec, &mu, &mu).unwrap();
        let two = GaussianRational::from_integer(2);
        let expected = &(&(&VectorForm::unit(3, 3, &[1, 2], 1).scale(&(&a * &b).scale(&two))
            + &VectorForm::unit(3, 3, &[1, 2], 3).scale(&(&a * &c).scale(&two)))
            - &VectorForm::unit(3, 3, &[2, 3], 1).scale(&(&b * &b).scale(&two)))
            - &VectorForm::unit(3, 3, &[2, 3], 3).scale(&(&b * &c).scale(&two));
        assert_eq!(bracket, expected);
        assert_eq!(schouten_via_forms(&spec, &mu, &mu).unwrap(), expected);
    }

    #[test]
    fn t_indexed_central_values_bracket_to_zero() {
        // Anything of the shape ω̄^j⊗W (t-indexed form, central value)
        // brackets to zero with everything.
        for spec in [builtin("w6"), builtin("p6"), builtin("kodaira_product")] {
            let tot = spec.total_dim();
            let (mu, _) = generic_pair(tot);
            let nvars = mu.nvars();
            for j in 1..=spec.n() {
                for beta in spec.n() + 1..=tot {
                    let w_valued = VectorForm::unit(tot, nvars, &[j], beta);
                    assert!(schouten(&spec, &w_valued, &mu).unwrap().is_zero());
                    assert!(schouten(&spec, &mu, &w_valued).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn basic_generator_brackets_via_forms() {
        // p6: {ω̄¹⊗T₁, ω̄³⊗T₂} = −Ē³₁₁ ω̄¹∧ω̄¹⊗T₂ − Ē³₁₂ ω̄¹∧ω̄²⊗T₂
        //                      = −(1/2) ω̄¹∧ω̄²⊗T₂.
        let spec = builtin("p6");
        let x = VectorForm::unit(3, 0, &[1], 1);
        let y = VectorForm::unit(3, 0, &[3], 2);
        let expected = VectorForm::unit(3, 0, &[1, 2], 2)
            .scale_const(&GaussianRational::from_parts(-1, 2, 0, 1));
        assert_eq!(schouten(&spec, &x, &y).unwrap(), expected);
        assert_eq!(schouten_via_forms(&spec, &x, &y).unwrap(), expected);
        // Two t-indexed forms with T values have closed form parts on both
        // sides, so their bracket vanishes.
        let t1 = VectorForm::unit(3, 0, &[1], 1);
        let t2 = VectorForm::unit(3, 0, &[2], 2);
        assert!(schouten(&spec, &t1, &t2).unwrap().is_zero());
    }

    #[test]
    fn torus_brackets_vanish() {
        let spec = builtin("torus");
        let (mu, nu) = generic_pair(3);
        assert!(schouten(&spec, &mu, &nu).unwrap().is_zero());
        assert!(schouten_via_forms(&spec, &mu, &nu).unwrap().is_zero());
    }

    #[test]
    fn bracket_routes_agree_and_are_symmetric() {
        for spec in all_builtins() {
            let (mu, nu) = generic_pair(spec.total_dim());
            let ab = schouten(&spec, &mu, &nu).unwrap();
            assert_eq!(
                ab,
                schouten_via_forms(&spec, &mu, &nu).unwrap(),
                "routes disagree on {}",
                spec.display_name()
            );
            assert_eq!(
                ab,
                schouten(&spec, &nu, &mu).unwrap(),
                "bracket not symmetric on {}",
                spec.display_name()
            );
        }
    }

    #[test]
    fn closed_condition_a_directions_bracket_to_zero() {
        // Every pair from ker D₁ ∩ ker(Condition A) brackets to zero
        // identically, not merely up to exact terms.
        for spec in all_builtins() {
            let tot = spec.total_dim();
            let d1 = dbar_matrix(&spec, 1).unwrap();
            let a = condition_a_matrix(&spec);
            let kernel = d1.vstack(&a).kernel_basis();
            let vectors: Vec<VectorForm> = kernel
                .iter()
                .map(|v| VectorForm::from_constant_vec(tot, 1, v))
                .collect();
            for x in &vectors {
                for y in &vectors {
                    assert!(
                        schouten(&spec, x, y).unwrap().is_zero(),
                        "nonzero bracket on {}",
                        spec.display_name()
                    );
                }
            }
        }
    }

    #[test]
    fn condition_a_on_w6_and_torus() {
        let mu = VectorForm::generic(3, 1);
        let basis = TensorBasis::new(3, 1);
        let var = |p: usize, q: usize| Poly::var(9, basis.index_of(&[p], q).unwrap());
        let conds: Vec<Poly> = condition_a(&builtin("w6"), &mu)
            .iter()
            .map(|p| p.normalized())
            .collect();
        assert_eq!(conds, vec![var(1, 1), var(3, 1)]);
        assert!(condition_a(&builtin("torus"), &mu).is_empty());
    }

    #[test]
    fn condition_a_kills_the_mixed_harmonic_direction_on_hxh() {
        // Of the four harmonic directions of hxh, exactly the mixed one
        // (a multiple of ω̄¹⊗T₂ + i·ω̄²⊗T₁) violates Condition A.
        let spec = builtin("hxh");
        let complex = DolbeaultComplex::new(&spec);
        let verdicts: Vec<bool> = complex
            .harmonic_basis(1)
            .iter()
            .map(|h| condition_a(&spec, h).iter().all(|p| p.is_zero()))
            .collect();
        assert_eq!(verdicts, vec![true, false, true, true]);
    }

    #[test]
    fn image_of_degree_zero_satisfies_condition_a() {
        // ∂̄-exact degree-1 forms are W-valued, and Condition A only reads
        // the T-valued components.
        for spec in all_builtins() {
            let tot = spec.total_dim();
            let xi = VectorForm::generic(tot, 0);
            let d0 = dbar_matrix(&spec, 0).unwrap();
            let image = apply_matrix(&d0, &xi, 1);
            assert!(condition_a(&spec, &image).is_empty());
        }
    }

    #[test]
    fn degree_mismatch_is_an_input_error() {
        let spec = builtin("w6");
        let mu = VectorForm::generic(3, 1);
        let two_form = VectorForm::zero(3, 2, 9);
        assert!(schouten(&spec, &mu, &two_form)
            .unwrap_err()
            .is_input_error());
        assert!(schouten_via_forms(&spec, &two_form, &mu)
            .unwrap_err()
            .is_input_error());
        // Mismatched parameter rings are rejected too.
        let other = VectorForm::generic(3, 1);
        let small = VectorForm::zero(3, 1, 2);
        assert!(schouten(&spec, &other, &small)
            .unwrap_err()
            .is_input_error());
    }
}
