//! Hodge operators, the deformation recursion, obstruction polynomials, and
//! dimension certificates.
//!
//! Starting from a basis `β₁ … β_N` of harmonic degree-1 forms, the series
//!
//! ```text
//! φ₁ = Σ_k t_k β_k,       φ_r = −½ Σ_{s=1}^{r−1} ∂̄* G {φ_s, φ_{r−s}}   (r ≥ 2)
//! ```
//!
//! is computed symbolically in the parameters `t`.  Its partial sum
//! `Φ_R = φ₁ + … + φ_R` satisfies the Maurer–Cartan equation
//! `∂̄Φ + ½{Φ, Φ} = 0` through order `R` except for a purely harmonic
//! remainder; pairing that remainder against a harmonic (0,2) basis
//! `γ₁ … γ_M` gives the obstruction polynomials `f_k = ⟨{Φ, Φ}, γ_k⟩`.
//!
//! [`certificate`] condenses this into exact dimension bounds for the
//! deformation space:
//!
//! * `exact_solution` — the polynomial `Φ_R` solves Maurer–Cartan on the
//!   nose; the space is smooth of dimension `N`;
//! * `unobstructed_to_order R` — all obstructions vanish through total degree
//!   `R + 1`; the abelian directions give the all-orders lower bound;
//! * `obstructed` — a minimal set of parameters must vanish; bounds come from
//!   that set and from exact Jacobian ranks at deterministic sample points.
//!
//! Everything is exact arithmetic; no floating point, no truncation beyond
//! the declared series order.

use std::collections::BTreeSet;

use crate::algebra::AlgebraSpec;
use crate::dolbeault::{
    self, apply_matrix, dbar_matrix, harmonic_basis_with_metric, subsets_lex, weights, Metric,
    VectorForm,
};
use crate::exact::{hermitian_solve_weighted, ExactMatrix, GaussianRational, Poly};
use crate::schouten::{abelian_dim, schouten};
use crate::{Error, Result};

/// `∂̄* : Ω^k → Ω^{k−1}`, the conjugate transpose of `D_{k−1}` in the
/// orthonormal tensor basis (`1 ≤ k ≤ n+m`).
pub fn adjoint_matrix(spec: &AlgebraSpec, k: usize) -> Result<ExactMatrix> {
    adjoint_matrix_with_metric(spec, k, Metric::Uniform)
}

/// The metric-aware version of [`adjoint_matrix`].
pub fn adjoint_matrix_with_metric(
    spec: &AlgebraSpec,
    k: usize,
    metric: Metric,
) -> Result<ExactMatrix> {
    if k == 0 || k > spec.total_dim() {
        return Err(Error::BadArgument(format!(
            "adjoint degree {k} out of range 1..={}",
            spec.total_dim()
        )));
    }
    dolbeault::adjoint_matrix(spec, k - 1, metric)
}

/// Green's operator at degree `k`: returns `x` with `Δ_k x = y − H(y)` and
/// `x ⊥ ker Δ_k`, where `H` is the harmonic projection.  Applied
/// coefficientwise to the parameter monomials of `y` (the Laplacian has
/// scalar entries).
pub fn greens_apply(spec: &AlgebraSpec, k: usize, y: &VectorForm) -> Result<VectorForm> {
    greens_apply_with_metric(spec, k, y, Metric::Uniform)
}

/// The metric-aware version of [`greens_apply`].
pub fn greens_apply_with_metric(
    spec: &AlgebraSpec,
    k: usize,
    y: &VectorForm,
    metric: Metric,
) -> Result<VectorForm> {
    if y.degree() != k || y.tot() != spec.total_dim() {
        return Err(Error::BadArgument(
            "Green's operator argument has the wrong degree or frame".into(),
        ));
    }
    if y.is_zero() {
        return Ok(VectorForm::zero(spec.total_dim(), k, y.nvars()));
    }
    let lap = dolbeault::laplacian(spec, k, metric)?;
    let w = weights(spec, k, metric);
    let nvars = y.nvars();
    let mut out = VectorForm::zero(spec.total_dim(), k, nvars);
    for expo in y.monomials() {
        let rhs = y.monomial_vector(&expo);
        let x = hermitian_solve_weighted(&lap, &rhs, &w);
        for (j, value) in x.into_iter().enumerate() {
            if !value.is_zero() {
                let add = Poly::monomial(nvars, expo.clone(), value);
                out.set_coeff(j, &out.coeff(j).clone() + &add);
            }
        }
    }
    Ok(out)
}

/// Orthogonal projection onto the harmonic subspace of degree `k`, applied
/// coefficientwise to the parameter monomials.
pub fn harmonic_projection(
    spec: &AlgebraSpec,
    k: usize,
    y: &VectorForm,
    metric: Metric,
) -> Result<VectorForm> {
    let harm = harmonic_basis_with_metric(spec, k, metric)?;
    let span: Vec<Vec<GaussianRational>> = harm
        .iter()
        .map(|h| h.constant_vector().expect("harmonic basis is constant"))
        .collect();
    let w = weights(spec, k, metric);
    let nvars = y.nvars();
    let mut out = VectorForm::zero(spec.total_dim(), k, nvars);
    for expo in y.monomials() {
        let rhs = y.monomial_vector(&expo);
        let proj = crate::exact::project_onto_span(&span, &rhs, &w);
        for (j, value) in proj.into_iter().enumerate() {
            if !value.is_zero() {
                let add = Poly::monomial(nvars, expo.clone(), value);
                out.set_coeff(j, &out.coeff(j).clone() + &add);
            }
        }
    }
    Ok(out)
}

/// A truncated deformation series `φ₁ … φ_R` in `N` parameters.
#[derive(Clone, Debug)]
pub struct KuranishiSeries {
    tot: usize,
    n_params: usize,
    order: usize,
    metric: Metric,
    restriction: Option<Vec<usize>>,
    /// `terms[r - 1]` is `φ_r`; every term is a degree-1 form whose
    /// coefficients are homogeneous of total degree `r` in the parameters.
    terms: Vec<VectorForm>,
}

impl KuranishiSeries {
    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn restriction(&self) -> Option<&[usize]> {
        self.restriction.as_deref()
    }

    /// The term `φ_r` (1-based, `1 ≤ r ≤ order`).
    pub fn phi(&self, r: usize) -> &VectorForm {
        assert!(r >= 1 && r <= self.order, "series term out of range");
        &self.terms[r - 1]
    }

    pub fn terms(&self) -> &[VectorForm] {
        &self.terms
    }

    /// The partial sum `Φ_R = φ₁ + … + φ_R`.
    pub fn full_sum(&self) -> VectorForm {
        let mut acc = VectorForm::zero(self.tot, 1, self.n_params);
        for t in &self.terms {
            acc = &acc + t;
        }
        acc
    }
}

/// The deformation series to the given order, optionally restricting the
/// first-order term to a subset of the harmonic basis directions (indices
/// into the degree-1 harmonic basis).  Parameters keep their full-basis
/// numbering either way.
pub fn series(
    spec: &AlgebraSpec,
    order: usize,
    restrict: Option<&[usize]>,
) -> Result<KuranishiSeries> {
    series_with_metric(spec, order, restrict, Metric::Uniform)
}

/// The metric-aware version of [`series`].
pub fn series_with_metric(
    spec: &AlgebraSpec,
    order: usize,
    restrict: Option<&[usize]>,
    metric: Metric,
) -> Result<KuranishiSeries> {
    if order < 1 {
        return Err(Error::BadArgument("series order must be at least 1".into()));
    }
    let tot = spec.total_dim();
    let harm = harmonic_basis_with_metric(spec, 1, metric)?;
    let n_params = harm.len();
    let selected: Vec<usize> = match restrict {
        None => (0..n_params).collect(),
        Some(idx) => {
            let set: BTreeSet<usize> = idx.iter().copied().collect();
            if let Some(&bad) = set.iter().find(|&&i| i >= n_params) {
                return Err(Error::BadArgument(format!(
                    "parameter index {bad} out of range 0..{n_params}"
                )));
            }
            set.into_iter().collect()
        }
    };
    let mut phi1 = VectorForm::zero(tot, 1, n_params);
    for &k in &selected {
        let t_k = Poly::var(n_params, k);
        let lifted = harm[k].map_coeffs(|c| {
            // Harmonic basis coefficients are constants; move them into the
            // parameter ring.
            Poly::constant(n_params, c.constant_term())
        });
        phi1 = &phi1 + &lifted.scale(&t_k);
    }
    let terms = recurse(spec, phi1, order, metric)?;
    Ok(KuranishiSeries {
        tot,
        n_params,
        order,
        metric,
        restriction: restrict.map(|s| s.to_vec()),
        terms,
    })
}

/// The deformation series seeded with an arbitrary first-order span: one
/// parameter per spanning vector (each a constant degree-1 form).
pub fn series_from_span(
    spec: &AlgebraSpec,
    order: usize,
    span: &[VectorForm],
    metric: Metric,
) -> Result<KuranishiSeries> {
    if order < 1 {
        return Err(Error::BadArgument("series order must be at least 1".into()));
    }
    let tot = spec.total_dim();
    let n_params = span.len();
    let mut phi1 = VectorForm::zero(tot, 1, n_params);
    for (j, v) in span.iter().enumerate() {
        if v.degree() != 1 || v.tot() != tot {
            return Err(Error::BadArgument(
                "spanning vectors must be degree-1 forms on the same algebra".into(),
            ));
        }
        let vec = v.constant_vector().ok_or_else(|| {
            Error::BadArgument("spanning vectors must have constant coefficients".into())
        })?;
        let t_j = Poly::var(n_params, j);
        let lifted = VectorForm::from_coeffs(
            tot,
            1,
            n_params,
            vec.into_iter()
                .map(|c| Poly::constant(n_params, c))
                .collect(),
        );
        phi1 = &phi1 + &lifted.scale(&t_j);
    }
    let terms = recurse(spec, phi1, order, metric)?;
    Ok(KuranishiSeries {
        tot,
        n_params,
        order,
        metric,
        restriction: None,
        terms,
    })
}

/// The recursion core: given `φ₁`, produce `φ₁ … φ_R`.
fn recurse(
    spec: &AlgebraSpec,
    phi1: VectorForm,
    order: usize,
    metric: Metric,
) -> Result<Vec<VectorForm>> {
    let adj2 = adjoint_matrix_with_metric(spec, 2, metric)?;
    let minus_half = GaussianRational::from_parts(-1, 2, 0, 1);
    let mut terms = vec![phi1];
    for r in 2..=order {
        let mut bracket = VectorForm::zero(spec.total_dim(), 2, terms[0].nvars());
        for s in 1..r {
            bracket = &bracket + &schouten(spec, &terms[s - 1], &terms[r - 1 - s])?;
        }
        let green = greens_apply_with_metric(spec, 2, &bracket, metric)?;
        let phi_r = apply_matrix(&adj2, &green, 1).scale_const(&minus_half);
        terms.push(phi_r);
    }
    Ok(terms)
}

/// The obstruction polynomials of a computed series: inner products of
/// `{Φ_R, Φ_R}` against a harmonic (0,2) basis, truncated to total degree
/// `R + 1`.
#[derive(Clone, Debug)]
pub struct ObstructionSystem {
    /// One polynomial per harmonic (0,2) direction, truncated.
    pub polys: Vec<Poly>,
    /// Obstructions are valid through this total degree.
    pub truncation_degree: u32,
    /// The harmonic (0,2) basis used for the pairing.
    pub gammas: Vec<VectorForm>,
}

impl ObstructionSystem {
    pub fn all_zero(&self) -> bool {
        self.polys.iter().all(|p| p.is_zero())
    }
}

/// Computes the obstruction system of a series (same metric as the series).
pub fn obstructions(spec: &AlgebraSpec, series: &KuranishiSeries) -> Result<ObstructionSystem> {
    let metric = series.metric();
    let phi = series.full_sum();
    let bracket = schouten(spec, &phi, &phi)?;
    let gammas = if spec.total_dim() >= 2 {
        harmonic_basis_with_metric(spec, 2, metric)?
    } else {
        Vec::new()
    };
    let w = weights(spec, 2, metric);
    let truncation = (series.order() + 1) as u32;
    let mut polys = Vec::with_capacity(gammas.len());
    for gamma in &gammas {
        let gvec = gamma.constant_vector().expect("harmonic basis is constant");
        let mut f = Poly::zero(series.n_params());
        for (i, coeff) in bracket.coeffs().iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let scale = GaussianRational::from_rational(w[i].clone()) * &gvec[i].conj();
            f = &f + &coeff.scale(&scale);
        }
        polys.push(f.truncate_degree(truncation));
    }
    Ok(ObstructionSystem {
        polys,
        truncation_degree: truncation,
        gammas,
    })
}

/// The Maurer–Cartan residual `D₁Φ + ½{Φ, Φ}` of a degree-1 form, as an
/// exact polynomial (no truncation).
pub fn maurer_cartan_residual(spec: &AlgebraSpec, phi: &VectorForm) -> Result<VectorForm> {
    let d1 = dbar_matrix(spec, 1)?;
    let linear = apply_matrix(&d1, phi, 2);
    let half = GaussianRational::from_parts(1, 2, 0, 1);
    let quadratic = schouten(spec, phi, phi)?.scale_const(&half);
    Ok(&linear + &quadratic)
}

/// The outcome class of a dimension certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KurStatus {
    /// The truncated series already solves Maurer–Cartan exactly.
    ExactSolution,
    /// All obstructions vanish through the inspected order.
    UnobstructedToOrder(usize),
    /// Nonzero obstructions; bounds come from a vanishing set and Jacobian
    /// ranks.
    Obstructed,
}

impl KurStatus {
    /// Stable machine-readable label.
    pub fn label(&self) -> String {
        match self {
            KurStatus::ExactSolution => "exact_solution".into(),
            KurStatus::UnobstructedToOrder(r) => format!("unobstructed_to_order {r}"),
            KurStatus::Obstructed => "obstructed".into(),
        }
    }
}

/// Exact dimension bounds for the deformation space.
#[derive(Clone, Debug)]
pub struct KurCertificate {
    pub status: KurStatus,
    pub dim_lower: usize,
    pub dim_upper: usize,
    /// For `Obstructed`: the minimal (by size, then lexicographically)
    /// 0-based set of parameters whose vanishing kills every truncated
    /// obstruction.
    pub vanishing_set: Option<Vec<usize>>,
    /// For `Obstructed`: the maximal exact Jacobian rank observed at the
    /// deterministic sample points on the vanishing locus.
    pub jacobian_rank: Option<usize>,
}

const PRIMES: [i64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// The two deterministic sample points on `{t_S = 0}`: free coordinates get
/// `1, 2, 3, …` (first point) or `2, 3, 5, 7, …` (second point).
fn sample_points(n: usize, vanish: &BTreeSet<usize>) -> [Vec<GaussianRational>; 2] {
    let mut a = vec![GaussianRational::zero(); n];
    let mut b = vec![GaussianRational::zero(); n];
    let mut pos = 0usize;
    for i in 0..n {
        if vanish.contains(&i) {
            continue;
        }
        a[i] = GaussianRational::from_integer((pos + 1) as i64);
        b[i] = GaussianRational::from_integer(PRIMES[pos % PRIMES.len()]);
        pos += 1;
    }
    [a, b]
}

/// Exact rank of the Jacobian `[∂f_k/∂t_j]` evaluated at a point.
fn jacobian_rank_at(polys: &[Poly], point: &[GaussianRational]) -> usize {
    let n = point.len();
    let rows: Vec<Vec<GaussianRational>> = polys
        .iter()
        .map(|f| (0..n).map(|j| f.derivative(j).evaluate(point)).collect())
        .collect();
    if rows.is_empty() {
        return 0;
    }
    ExactMatrix::from_rows(rows).rank()
}

/// Smallest set of parameters (by size, then lexicographic) whose vanishing
/// annihilates every polynomial.
fn minimal_vanishing_set(polys: &[Poly], n: usize) -> Vec<usize> {
    let zero = GaussianRational::zero();
    for size in 1..=n {
        for subset in subsets_lex(n, size) {
            let assignment: Vec<(usize, GaussianRational)> =
                subset.iter().map(|&i| (i - 1, zero.clone())).collect();
            if polys.iter().all(|f| f.substitute(&assignment).is_zero()) {
                return subset.iter().map(|&i| i - 1).collect();
            }
        }
    }
    (0..n).collect()
}

/// Computes the dimension certificate at the given series order (uniform
/// metric).
pub fn certificate(spec: &AlgebraSpec, order: usize) -> Result<KurCertificate> {
    certificate_with_metric(spec, order, Metric::Uniform)
}

/// The metric-aware version of [`certificate`]; the reported dimensions must
/// not depend on the metric.
pub fn certificate_with_metric(
    spec: &AlgebraSpec,
    order: usize,
    metric: Metric,
) -> Result<KurCertificate> {
    if order < 2 {
        return Err(Error::BadArgument(
            "certificates need a series order of at least 2".into(),
        ));
    }
    let s = series_with_metric(spec, order, None, metric)?;
    let n = s.n_params();
    let phi = s.full_sum();
    if maurer_cartan_residual(spec, &phi)?.is_zero() {
        return Ok(KurCertificate {
            status: KurStatus::ExactSolution,
            dim_lower: n,
            dim_upper: n,
            vanishing_set: None,
            jacobian_rank: None,
        });
    }
    let obs = obstructions(spec, &s)?;
    let abel = abelian_dim(spec);
    if obs.all_zero() {
        return Ok(KurCertificate {
            status: KurStatus::UnobstructedToOrder(order),
            dim_lower: abel,
            dim_upper: n,
            vanishing_set: None,
            jacobian_rank: None,
        });
    }
    let vanish = minimal_vanishing_set(&obs.polys, n);
    let vanish_set: BTreeSet<usize> = vanish.iter().copied().collect();
    let rank = sample_points(n, &vanish_set)
        .iter()
        .map(|p| jacobian_rank_at(&obs.polys, p))
        .max()
        .unwrap_or(0);
    let dim_lower = abel.max(n - vanish.len());
    let dim_upper = n - rank;
    Ok(KurCertificate {
        status: KurStatus::Obstructed,
        dim_lower,
        dim_upper,
        vanishing_set: Some(vanish),
        jacobian_rank: Some(rank),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dolbeault::{laplacian, DolbeaultComplex, TensorBasis};
    use crate::exact::{weighted_inner, Rational};

    fn builtin(name: &str) -> AlgebraSpec {
        AlgebraSpec::builtin(name, &[]).unwrap()
    }

    fn ones(n: usize) -> Vec<Rational> {
        vec![Rational::from_integer(1.into()); n]
    }

    #[test]
    fn adjoint_satisfies_the_defining_pairing() {
        for name in ["w6", "p6", "hxh"] {
            let spec = builtin(name);
            let d0 = dbar_matrix(&spec, 0).unwrap();
            let adj = adjoint_matrix(&spec, 1).unwrap();
            let (n0, n1) = (d0.cols(), d0.rows());
            let w = ones(n1);
            for v in 0..n0 {
                for u in 0..n1 {
                    let mut ev = vec![GaussianRational::zero(); n0];
                    ev[v] = GaussianRational::one();
                    let mut eu = vec![GaussianRational::zero(); n1];
                    eu[u] = GaussianRational::one();
                    let lhs = weighted_inner(&d0.mul_vec(&ev), &eu, &w);
                    let rhs = weighted_inner(&ev, &adj.mul_vec(&eu), &ones(n0));
                    assert_eq!(lhs, rhs);
                }
            }
        }
        assert!(adjoint_matrix(&builtin("torus"), 2).unwrap().is_zero());
        assert!(adjoint_matrix(&builtin("w6"), 0).is_err());
    }

    #[test]
    fn w6_adjoint_of_d1_is_supported_on_one_coordinate() {
        // ∂̄* of ω̄²∧ω̄¹⊗W = −ω̄^{12}⊗W lands on the μ[2→2] coordinate alone.
        let spec = builtin("w6");
        let adj = adjoint_matrix(&spec, 2).unwrap();
        let input =
            VectorForm::unit(3, 0, &[1, 2], 3).scale_const(&GaussianRational::from_integer(-1));
        let out = apply_matrix(&adj, &input, 1);
        let basis = TensorBasis::new(3, 1);
        let idx = basis.index_of(&[2], 2).unwrap();
        for (i, c) in out.coeffs().iter().enumerate() {
            assert_eq!(c.is_zero(), i != idx);
        }
    }

    #[test]
    fn greens_kills_harmonics_and_inverts_the_laplacian() {
        let spec = builtin("w6");
        let complex = DolbeaultComplex::new(&spec);
        for h in complex.harmonic_basis(1) {
            assert!(greens_apply(&spec, 1, h).unwrap().is_zero());
        }
        // Round trip: x₀ = Δz is orthogonal to ker Δ, and G(Δx₀) = x₀.
        let lap = laplacian(&spec, 1, Metric::Uniform).unwrap();
        let z: Vec<GaussianRational> = (0..lap.cols())
            .map(|i| GaussianRational::from_integer(i as i64 + 1))
            .collect();
        let x0 = lap.mul_vec(&z);
        let y = lap.mul_vec(&x0);
        let x0_form = VectorForm::from_constant_vec(3, 1, &x0);
        let y_form = VectorForm::from_constant_vec(3, 1, &y);
        assert_eq!(greens_apply(&spec, 1, &y_form).unwrap(), x0_form);
    }

    #[test]
    fn w6_gauge_identity_behind_phi2() {
        // ω̄²⊗T₂ lies in (ker D₁)^⊥, so ∂̄*∘G∘D₁ returns it unchanged.
        let spec = builtin("w6");
        let v = VectorForm::unit(3, 0, &[2], 2);
        let d1 = dbar_matrix(&spec, 1).unwrap();
        let image = apply_matrix(&d1, &v, 2);
        let green = greens_apply(&spec, 2, &image).unwrap();
        let adj2 = adjoint_matrix(&spec, 2).unwrap();
        assert_eq!(apply_matrix(&adj2, &green, 1), v);
    }

    #[test]
    fn w6_series_and_obstructions() {
        // Full 6-parameter series: φ₂ = t₀t₅·ω̄²⊗T₂, higher terms vanish;
        // obstructions are generated by the parameter t₄ (the ω̄³⊗T₁
        // direction): [2t₀t₄, 0, 0, 0, −2t₄², −2t₄t₅].
        let spec = builtin("w6");
        let s = series(&spec, 4, None).unwrap();
        assert_eq!(s.n_params(), 6);
        let t = |i: usize| Poly::var(6, i);
        let expected_phi2 = VectorForm::unit(3, 6, &[2], 2).scale(&(&t(0) * &t(5)));
        assert_eq!(s.phi(2), &expected_phi2);
        assert!(s.phi(3).is_zero());
        assert!(s.phi(4).is_zero());
        let obs = obstructions(&spec, &s).unwrap();
        let two = GaussianRational::from_integer(2);
        let minus_two = GaussianRational::from_integer(-2);
        let expected = vec![
            (&t(0) * &t(4)).scale(&two),
            Poly::zero(6),
            Poly::zero(6),
            Poly::zero(6),
            (&t(4) * &t(4)).scale(&minus_two),
            (&t(4) * &t(5)).scale(&minus_two),
        ];
        assert_eq!(obs.polys, expected);
        assert_eq!(obs.truncation_degree, 5);
        // Every nonzero obstruction is divisible by t₄.
        for f in &obs.polys {
            if !f.is_zero() {
                assert!(f.try_div_exact(&t(4)).is_some());
            }
        }
    }

    #[test]
    fn w6_restricted_series_matches_the_three_parameter_slice() {
        // Restricting μ to span{ω̄¹⊗T₁, ω̄³⊗T₁, ω̄³⊗W} leaves φ₂ = t₀t₅·ω̄²⊗T₂.
        let spec = builtin("w6");
        let s = series(&spec, 3, Some(&[0, 4, 5])).unwrap();
        let t = |i: usize| Poly::var(6, i);
        assert_eq!(
            s.phi(1),
            &(&(&VectorForm::unit(3, 6, &[1], 1).scale(&t(0))
                + &VectorForm::unit(3, 6, &[3], 1).scale(&t(4)))
                + &VectorForm::unit(3, 6, &[3], 3).scale(&t(5)))
        );
        assert_eq!(
            s.phi(2),
            &VectorForm::unit(3, 6, &[2], 2).scale(&(&t(0) * &t(5)))
        );
        assert!(s.phi(3).is_zero());
    }

    #[test]
    fn hxh_series_terminates_and_solves_maurer_cartan() {
        // Parameters follow the harmonic basis: t₁ ↔ the mixed direction
        // −i·ω̄¹⊗T₂ + ω̄²⊗T₁, t₃ ↔ ω̄³⊗W.  φ₂ = i·t₁t₃·ω̄¹⊗T₂ + t₁t₃·ω̄²⊗T₁.
        let spec = builtin("hxh");
        let s = series(&spec, 4, None).unwrap();
        assert_eq!(s.n_params(), 4);
        let t = |i: usize| Poly::var(4, i);
        let prod = &t(1) * &t(3);
        let expected_phi2 = &VectorForm::unit(3, 4, &[1], 2)
            .scale(&prod.scale(&GaussianRational::i()))
            + &VectorForm::unit(3, 4, &[2], 1).scale(&prod);
        assert_eq!(s.phi(2), &expected_phi2);
        assert!(s.phi(3).is_zero());
        assert!(s.phi(4).is_zero());
        assert!(obstructions(&spec, &s).unwrap().all_zero());
        assert!(maurer_cartan_residual(&spec, &s.full_sum())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn p6_series_is_geometric_in_the_central_parameter() {
        // φ₂ = (2/3)t₁t₃·(−i·ω̄¹⊗T₁ + ω̄²⊗T₁ + i·ω̄²⊗T₂) and each later term
        // multiplies by −t₃/3, so the series never terminates.
        let spec = builtin("p6");
        let s = series(&spec, 4, None).unwrap();
        assert_eq!(s.n_params(), 4);
        let t = |i: usize| Poly::var(4, i);
        let prod = &t(1) * &t(3);
        let third = |a: i64, b: i64| GaussianRational::from_parts(a, 3, b, 3);
        let expected_phi2 = &(&VectorForm::unit(3, 4, &[1], 1).scale(&prod.scale(&third(0, -2)))
            + &VectorForm::unit(3, 4, &[2], 1).scale(&prod.scale(&third(2, 0))))
            + &VectorForm::unit(3, 4, &[2], 2).scale(&prod.scale(&third(0, 2)));
        assert_eq!(s.phi(2), &expected_phi2);
        let ratio = Poly::var(4, 3).scale(&GaussianRational::from_parts(-1, 3, 0, 1));
        assert_eq!(s.phi(3), &s.phi(2).scale(&ratio));
        assert_eq!(s.phi(4), &s.phi(3).scale(&ratio));
        assert!(obstructions(&spec, &s).unwrap().all_zero());
        assert!(!maurer_cartan_residual(&spec, &s.full_sum())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn parallel_structures_have_trivial_series() {
        // When every harmonic direction satisfies Condition A the recursion
        // never produces higher terms.
        for (name, params) in [
            ("torus", vec![]),
            ("kodaira", vec![1]),
            ("heisenberg_abelian", vec![2, 1]),
            ("heisenberg_abelian", vec![1, 2]),
            ("kodaira_product", vec![]),
        ] {
            let spec = AlgebraSpec::builtin(name, &params).unwrap();
            let s = series(&spec, 3, None).unwrap();
            for r in 2..=3 {
                assert!(s.phi(r).is_zero(), "{name} has nonzero φ_{r}");
            }
            assert!(obstructions(&spec, &s).unwrap().all_zero());
        }
    }

    #[test]
    fn certificates_match_known_dimensions() {
        let cases: [(&str, Vec<usize>, KurStatus, usize, usize); 6] = [
            ("torus", vec![], KurStatus::ExactSolution, 9, 9),
            (
                "heisenberg_abelian",
                vec![2, 1],
                KurStatus::ExactSolution,
                4,
                4,
            ),
            (
                "heisenberg_abelian",
                vec![1, 2],
                KurStatus::ExactSolution,
                6,
                6,
            ),
            ("hxh", vec![], KurStatus::ExactSolution, 4, 4),
            ("w6", vec![], KurStatus::Obstructed, 5, 5),
            ("p6", vec![], KurStatus::UnobstructedToOrder(4), 3, 4),
        ];
        for (name, params, status, lower, upper) in cases {
            let spec = AlgebraSpec::builtin(name, &params).unwrap();
            let cert = certificate(&spec, 4).unwrap();
            assert_eq!(cert.status, status, "{name}");
            assert_eq!((cert.dim_lower, cert.dim_upper), (lower, upper), "{name}");
        }
        let kp = certificate(&builtin("kodaira_product"), 4).unwrap();
        assert_eq!(kp.status, KurStatus::ExactSolution);
        assert_eq!((kp.dim_lower, kp.dim_upper), (8, 8));
    }

    #[test]
    fn w6_certificate_witness_details() {
        let cert = certificate(&builtin("w6"), 4).unwrap();
        assert_eq!(cert.vanishing_set, Some(vec![4]));
        assert_eq!(cert.jacobian_rank, Some(1));
    }

    #[test]
    fn maurer_cartan_residual_is_harmonic_order_by_order() {
        // Through the computed order, D₁Φ + ½{Φ,Φ} equals the harmonic
        // projection of ½{Φ,Φ} degree by degree.
        let half = GaussianRational::from_parts(1, 2, 0, 1);
        for name in ["w6", "p6", "hxh"] {
            let spec = builtin(name);
            let order = 4;
            let s = series(&spec, order, None).unwrap();
            let phi = s.full_sum();
            let residual = maurer_cartan_residual(&spec, &phi).unwrap();
            let half_bracket = schouten(&spec, &phi, &phi).unwrap().scale_const(&half);
            let projected = harmonic_projection(&spec, 2, &half_bracket, Metric::Uniform).unwrap();
            for r in 1..=order as u32 {
                let lhs = residual.map_coeffs(|p| p.homogeneous_part(r));
                let rhs = projected.map_coeffs(|p| p.homogeneous_part(r));
                assert_eq!(lhs, rhs, "{name} at order {r}");
            }
        }
    }

    #[test]
    fn higher_terms_are_orthogonal_to_harmonics() {
        for name in ["w6", "p6", "hxh"] {
            let spec = builtin(name);
            let s = series(&spec, 4, None).unwrap();
            let harm = harmonic_basis_with_metric(&spec, 1, Metric::Uniform).unwrap();
            let w = ones(TensorBasis::new(spec.total_dim(), 1).len());
            for r in 2..=4 {
                for expo in s.phi(r).monomials() {
                    let vec = s.phi(r).monomial_vector(&expo);
                    for h in &harm {
                        let hv = h.constant_vector().unwrap();
                        assert!(weighted_inner(&hv, &vec, &w).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn certificate_dimensions_are_metric_independent() {
        for name in ["torus", "heisenberg_abelian", "hxh", "w6", "p6"] {
            let spec = builtin(name);
            let uniform = certificate_with_metric(&spec, 3, Metric::Uniform).unwrap();
            let perturbed = certificate_with_metric(&spec, 3, Metric::Perturbed).unwrap();
            assert_eq!(
                (uniform.dim_lower, uniform.dim_upper),
                (perturbed.dim_lower, perturbed.dim_upper),
                "{name}"
            );
        }
        let spec = AlgebraSpec::builtin("heisenberg_abelian", &[1, 2]).unwrap();
        let uniform = certificate_with_metric(&spec, 3, Metric::Uniform).unwrap();
        let perturbed = certificate_with_metric(&spec, 3, Metric::Perturbed).unwrap();
        assert_eq!(
            (uniform.dim_lower, uniform.dim_upper),
            (perturbed.dim_lower, perturbed.dim_upper)
        );
    }

    #[test]
    fn condition_a_spans_stay_flat() {
        // Seeding the recursion with the abelian directions produces no
        // higher terms and no obstructions, for every built-in.
        for name in AlgebraSpec::BUILTIN_NAMES {
            let spec = builtin(name);
            let harm = harmonic_basis_with_metric(&spec, 1, Metric::Uniform).unwrap();
            let a = crate::schouten::condition_a_matrix(&spec);
            // Solve A·(Σ c_k h_k) = 0 for the harmonic coordinates c.
            let cols: Vec<Vec<GaussianRational>> = harm
                .iter()
                .map(|h| a.mul_vec(&h.constant_vector().unwrap()))
                .collect();
            let a_on_harm = ExactMatrix::from_cols(cols, a.rows());
            let span: Vec<VectorForm> = a_on_harm
                .kernel_basis()
                .into_iter()
                .map(|c| {
                    let mut v = VectorForm::zero(spec.total_dim(), 1, 0);
                    for (ck, h) in c.iter().zip(&harm) {
                        v = &v + &h.scale_const(ck);
                    }
                    v
                })
                .collect();
            if span.is_empty() {
                continue;
            }
            let s = series_from_span(&spec, 3, &span, Metric::Uniform).unwrap();
            assert!(s.phi(2).is_zero(), "{name}");
            assert!(s.phi(3).is_zero(), "{name}");
            assert!(obstructions(&spec, &s).unwrap().all_zero(), "{name}");
            assert!(maurer_cartan_residual(&spec, &s.full_sum())
                .unwrap()
                .is_zero());
        }
    }
}
