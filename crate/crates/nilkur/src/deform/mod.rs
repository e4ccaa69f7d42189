//! High-level analysis and deformation: abelian parameter counts, deformed
//! frames and their direct Lie brackets, extraction of the deformed algebra,
//! Heisenberg recognition, and the assembled [`AnalysisReport`].
//!
//! A numeric degree-1 form `Φ = Σ μ^p_q ω̄^p ⊗ e_q` deforms the complex
//! structure by tilting the anti-holomorphic frame:
//!
//! ```text
//! S̄_j = T̄_j + Φ(T̄_j),    V̄_α = W̄_α + Φ(W̄_α).
//! ```
//!
//! [`frame_bracket_residual`] computes all Lie brackets of the tilted frame
//! directly in the algebra — an independent route to the integrability
//! question that [`maurer_cartan_residual`] answers through the bracket
//! calculus: the frame brackets' components along the deformed holomorphic
//! directions vanish exactly when `∂̄Φ + ½{Φ, Φ} = 0`, and the brackets
//! vanish outright exactly when the deformed structure is again abelian
//! (∂̄-closed plus Condition A).  [`deform`] re-expresses an abelian result
//! in a frame adapted to the center and returns it as a new [`AlgebraSpec`],
//! so the whole analysis can run again on the deformed structure.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraSpec;
use crate::dolbeault::{
    self, harmonic_basis_with_metric, DolbeaultComplex, Metric, TensorBasis, VectorForm,
};
use crate::exact::{ExactMatrix, GaussianRational};
use crate::kuranishi;
use crate::schouten;
use crate::{Error, Result};

pub use crate::kuranishi::maurer_cartan_residual;

/// Number of independent first-order directions that deform the structure
/// through abelian ones: harmonic degree-1 forms satisfying Condition A.
///
/// Computed two ways and asserted equal: as the kernel of the Condition-A
/// pairing restricted to the harmonic space, and as the dimension of
/// `(ker D₁ ∩ Condition A) / im D₀`.
pub fn dim_abel(spec: &AlgebraSpec) -> usize {
    let harm = harmonic_basis_with_metric(spec, 1, Metric::Uniform).expect("degree 1 in range");
    let a = schouten::condition_a_matrix(spec);
    let cols: Vec<Vec<GaussianRational>> = harm
        .iter()
        .map(|h| a.mul_vec(&h.constant_vector().expect("harmonic basis is constant")))
        .collect();
    let on_harmonic = ExactMatrix::from_cols(cols, a.rows());
    let via_harmonic = harm.len() - on_harmonic.rank();
    let via_quotient = schouten::abelian_dim(spec);
    assert_eq!(
        via_harmonic, via_quotient,
        "abelian dimension routes disagree"
    );
    via_harmonic
}

/// The Lie bracket of two complexified algebra elements, both written in the
/// basis `T_1..T_n, W_1..W_m, T̄_1..T̄_n, W̄_1..W̄_m`.  Only the mixed pairs
/// `[T̄_k, T_j]` contribute; every value is central.
fn lie_bracket(
    spec: &AlgebraSpec,
    u: &[GaussianRational],
    v: &[GaussianRational],
) -> Vec<GaussianRational> {
    let n = spec.n();
    let tot = spec.total_dim();
    let mut out = vec![GaussianRational::zero(); 2 * tot];
    for k in 1..=n {
        for j in 1..=n {
            let c = &(&u[tot + k - 1] * &v[j - 1]) - &(&v[tot + k - 1] * &u[j - 1]);
            if c.is_zero() {
                continue;
            }
            for alpha in n + 1..=tot {
                let e = spec.e(alpha, k, j);
                if !e.is_zero() {
                    out[alpha - 1] += &(&c * &e);
                }
                let f = spec.f(alpha, k, j);
                if !f.is_zero() {
                    out[tot + alpha - 1] += &(&c * &f);
                }
            }
        }
    }
    out
}

/// The tilted frame of a numeric deformation, stored as one `2N × 2N` matrix
/// over the original complexified basis (rows `T, W, T̄, W̄`; columns
/// `S_1..S_n, V_1..V_m, S̄_1..S̄_n, V̄_1..V̄_m`).  At `Φ = 0` this is the
/// identity; the tilted vectors span the complexification exactly when the
/// matrix is invertible.
#[derive(Clone, Debug)]
pub struct DeformedFrame {
    tot: usize,
    matrix: ExactMatrix,
}

impl DeformedFrame {
    /// Builds the frame from a degree-1 form with constant (parameter-free)
    /// coefficients.
    pub fn new(spec: &AlgebraSpec, phi: &VectorForm) -> Result<Self> {
        let tot = spec.total_dim();
        if phi.degree() != 1 || phi.tot() != tot {
            return Err(Error::BadArgument(
                "deformations are degree-1 forms on the same algebra".into(),
            ));
        }
        let mu = phi.constant_vector().ok_or_else(|| {
            Error::BadArgument(
                "deformations must have numeric coefficients; substitute parameters first".into(),
            )
        })?;
        let basis = TensorBasis::new(tot, 1);
        let mut matrix = ExactMatrix::identity(2 * tot);
        for (i, (p_set, q)) in basis.elements().enumerate() {
            let p = p_set[0];
            let value = &mu[i];
            if value.is_zero() {
                continue;
            }
            // Column S̄_p (anti-holomorphic) picks up μ^p_q in the e_q row;
            // its conjugate column S_p picks up the conjugate in the ē_q row.
            matrix.set(q - 1, tot + p - 1, value.clone());
            matrix.set(tot + q - 1, p - 1, value.conj());
        }
        Ok(DeformedFrame { tot, matrix })
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    /// The deformed holomorphic frame vector (`S_a` for `a ≤ n`, else
    /// `V_{a−n}`), 1-based.
    pub fn holomorphic(&self, a: usize) -> Vec<GaussianRational> {
        self.matrix.col(a - 1)
    }

    /// The deformed anti-holomorphic frame vector (`S̄_a` for `a ≤ n`, else
    /// `V̄_{a−n}`), 1-based.
    pub fn antiholomorphic(&self, a: usize) -> Vec<GaussianRational> {
        self.matrix.col(self.tot + a - 1)
    }

    pub fn is_invertible(&self) -> bool {
        self.matrix.rank() == 2 * self.tot
    }
}

/// All Lie brackets of the deformed anti-holomorphic frame, split into the
/// two vanishing questions they answer.
#[derive(Clone, Debug)]
pub struct FrameBracketResidual {
    n: usize,
    /// Unordered frame pairs `(a, b)`, `1 ≤ a < b ≤ n+m`.
    pairs: Vec<(usize, usize)>,
    /// Full bracket values in the original complexified basis (length `2N`).
    brackets: Vec<Vec<GaussianRational>>,
    /// Components of each bracket along the deformed holomorphic frame
    /// (length `N`); all zero exactly when the deformation is integrable.
    mc_components: Vec<Vec<GaussianRational>>,
}

impl FrameBracketResidual {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn position(&self, a: usize, b: usize) -> usize {
        self.pairs
            .iter()
            .position(|&p| p == (a, b))
            .expect("pair out of range")
    }

    /// The bracket `[X̄_a, X̄_b]` in the original complexified basis.
    pub fn bracket(&self, a: usize, b: usize) -> &[GaussianRational] {
        &self.brackets[self.position(a, b)]
    }

    /// The components of `[X̄_a, X̄_b]` along the deformed holomorphic frame.
    pub fn mc_component(&self, a: usize, b: usize) -> &[GaussianRational] {
        &self.mc_components[self.position(a, b)]
    }

    /// True when the deformed structure is integrable.
    pub fn mc_equivalent_is_zero(&self) -> bool {
        self.mc_components.iter().flatten().all(|v| v.is_zero())
    }

    /// True when the deformed structure is again abelian.
    pub fn abelian_defect_is_zero(&self) -> bool {
        self.brackets.iter().flatten().all(|v| v.is_zero())
    }

    fn frame_label(&self, a: usize) -> String {
        if a <= self.n {
            format!("Sb{a}")
        } else {
            format!("Vb{}", a - self.n)
        }
    }

    fn describe(&self, values: &[Vec<GaussianRational>]) -> String {
        let mut parts = Vec::new();
        for (idx, &(a, b)) in self.pairs.iter().enumerate() {
            if values[idx].iter().all(|v| v.is_zero()) {
                continue;
            }
            let rendered: Vec<String> = values[idx].iter().map(|v| v.to_string()).collect();
            parts.push(format!(
                "[{},{}] -> ({})",
                self.frame_label(a),
                self.frame_label(b),
                rendered.join(", ")
            ));
        }
        parts.join("; ")
    }

    /// Human-readable rendering of the nonzero holomorphic components.
    pub fn describe_mc(&self) -> String {
        self.describe(&self.mc_components)
    }

    /// Human-readable rendering of the nonzero bracket values.
    pub fn describe_defect(&self) -> String {
        self.describe(&self.brackets)
    }
}

/// Brackets the deformed anti-holomorphic frame directly in the Lie algebra.
///
/// This is deliberately independent of the bracket calculus on forms: it
/// expands `[S̄_a, S̄_b]`, `[S̄_a, V̄_β]`, `[V̄_α, V̄_β]` from the structure
/// constants, then resolves each value against the full deformed frame.
pub fn frame_bracket_residual(
    spec: &AlgebraSpec,
    phi: &VectorForm,
) -> Result<FrameBracketResidual> {
    let frame = DeformedFrame::new(spec, phi)?;
    if !frame.is_invertible() {
        return Err(Error::FrameNotInvertible);
    }
    let tot = spec.total_dim();
    let mut pairs = Vec::new();
    let mut brackets = Vec::new();
    let mut mc_components = Vec::new();
    for a in 1..=tot {
        for b in a + 1..=tot {
            let value = lie_bracket(spec, &frame.antiholomorphic(a), &frame.antiholomorphic(b));
            let in_new_frame = frame
                .matrix()
                .solve(&value)
                .expect("invertible frame resolves every value");
            pairs.push((a, b));
            brackets.push(value);
            mc_components.push(in_new_frame[..tot].to_vec());
        }
    }
    Ok(FrameBracketResidual {
        n: spec.n(),
        pairs,
        brackets,
        mc_components,
    })
}

/// A successfully deformed algebra plus advisory notes.
#[derive(Clone, Debug)]
pub struct DeformOutcome {
    pub spec: AlgebraSpec,
    pub warnings: Vec<String>,
}

/// Applies a numeric deformation and returns the deformed structure as a new
/// spec in a center-adapted frame.
///
/// Fails when the deformed structure is not integrable (carrying the
/// holomorphic components of the frame brackets) or not abelian (carrying
/// the bracket values), and when the deformed structure no longer keeps the
/// declared center invariant.
pub fn deform(spec: &AlgebraSpec, phi: &VectorForm) -> Result<DeformOutcome> {
    let residual = frame_bracket_residual(spec, phi)?;
    if !residual.mc_equivalent_is_zero() {
        return Err(Error::NotIntegrable(residual.describe_mc()));
    }
    if !residual.abelian_defect_is_zero() {
        return Err(Error::NotAbelian(residual.describe_defect()));
    }
    let n = spec.n();
    let m = spec.m();
    let tot = n + m;
    let mu = phi.constant_vector().expect("checked by the frame builder");
    let basis = TensorBasis::new(tot, 1);
    let mut warnings = Vec::new();
    let mut central_mixing = false;
    for alpha in 1..=m {
        for q in 1..=tot {
            let idx = basis.index_of(&[n + alpha], q).expect("index in range");
            if !mu[idx].is_zero() {
                central_mixing = true;
            }
        }
    }
    if central_mixing {
        warnings.push("central frame directions were remixed to stay adapted to the center".into());
    }
    let frame = DeformedFrame::new(spec, phi)?;
    // The vectors taking over the central role must actually be central:
    // they have to commute with the whole deformed frame.  (Their brackets
    // with the holomorphic half are the only ones the defect check missed.)
    let center_lost = Error::BadArgument(
        "the deformed structure does not keep the declared center invariant; \
         declare the full center and retry"
            .to_string(),
    );
    for beta in 1..=m {
        let v_beta = frame.holomorphic(n + beta);
        for a in 1..=tot {
            let value = lie_bracket(spec, &frame.antiholomorphic(a), &v_beta);
            if value.iter().any(|c| !c.is_zero()) {
                return Err(center_lost);
            }
        }
    }
    let mut entries = Vec::new();
    let mut e_new = vec![vec![vec![GaussianRational::zero(); n]; n]; m];
    let mut f_new = vec![vec![vec![GaussianRational::zero(); n]; n]; m];
    for k in 1..=n {
        for j in 1..=n {
            let value = lie_bracket(spec, &frame.antiholomorphic(k), &frame.holomorphic(j));
            let x = frame
                .matrix()
                .solve(&value)
                .expect("invertible frame resolves every value");
            for q in 1..=n {
                if !x[q - 1].is_zero() || !x[tot + q - 1].is_zero() {
                    // The value is central but cannot be written in the new
                    // central frame alone.
                    return Err(Error::BadArgument(
                        "the deformed structure does not keep the declared center invariant; \
                         declare the full center and retry"
                            .to_string(),
                    ));
                }
            }
            for alpha in 1..=m {
                e_new[alpha - 1][k - 1][j - 1] = x[n + alpha - 1].clone();
                f_new[alpha - 1][k - 1][j - 1] = x[tot + n + alpha - 1].clone();
            }
        }
    }
    for alpha in 1..=m {
        for k in 1..=n {
            for j in 1..=n {
                let expected_f = -e_new[alpha - 1][j - 1][k - 1].conj();
                if f_new[alpha - 1][k - 1][j - 1] != expected_f {
                    return Err(Error::Internal(
                        "deformed structure constants violate the conjugation symmetry".into(),
                    ));
                }
                let e_val = e_new[alpha - 1][k - 1][j - 1].clone();
                if !e_val.is_zero() {
                    entries.push(((n + alpha, k, j), e_val));
                }
            }
        }
    }
    let name = format!("{} (deformed)", spec.display_name());
    let new_spec = AlgebraSpec::new(Some(name), n, m, entries)?;
    Ok(DeformOutcome {
        spec: new_spec,
        warnings,
    })
}

/// The outcome of Heisenberg recognition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeisenbergVerdict {
    /// The algebra is a Heisenberg algebra plus a 1-dimensional abelian
    /// factor.
    Heisenberg,
    /// The structure constants rule that shape out.
    NotHeisenberg,
    /// The test does not apply (wrong central dimension, or the declared
    /// center undersells the actual one).
    Inapplicable,
}

impl HeisenbergVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            HeisenbergVerdict::Heisenberg => "heisenberg",
            HeisenbergVerdict::NotHeisenberg => "not_heisenberg",
            HeisenbergVerdict::Inapplicable => "inapplicable",
        }
    }
}

/// Result of [`recognize_heisenberg`]: the verdict plus the exact witnesses
/// behind it.
#[derive(Clone, Debug)]
pub struct HeisenbergCertificate {
    pub verdict: HeisenbergVerdict,
    /// The phase unit `u` with `Ē_{lj} = u · E_{jl}` over all pairs, when
    /// that relation holds (a Gaussian rational of modulus 1).
    pub unit: Option<GaussianRational>,
    /// The scalar `c` with `E·E* = c·I`, when that relation holds.
    pub scalar: Option<GaussianRational>,
    pub diagnostics: Vec<String>,
}

impl HeisenbergCertificate {
    fn conclude(verdict: HeisenbergVerdict, note: impl Into<String>) -> Self {
        HeisenbergCertificate {
            verdict,
            unit: None,
            scalar: None,
            diagnostics: vec![note.into()],
        }
    }
}

/// Decides whether the algebra is a Heisenberg algebra times a line, from
/// the structure constants alone.
///
/// Requires a 1-dimensional declared center that matches the actual center.
/// The three structural tests — equal moduli `|E_{kj}| = |E_{jk}|`, a
/// constant unit ratio `u = Ē_{jl}/E_{lj}` across nonzero entries, and
/// `E·E* = c·I` — are each exact.  Together they certify that a unit
/// multiple of `E` is skew-Hermitian with all eigenvalue moduli equal; the
/// square root normalizing `E` itself is never materialized, since it need
/// not exist in the Gaussian rationals.  The sign pattern of the spectrum is
/// not separated in exact arithmetic, so the certificate notes it instead.
pub fn recognize_heisenberg(spec: &AlgebraSpec) -> HeisenbergCertificate {
    if spec.m() != 1 {
        return HeisenbergCertificate::conclude(
            HeisenbergVerdict::Inapplicable,
            format!(
                "recognition needs a 1-dimensional declared center, this algebra declares {}",
                spec.m()
            ),
        );
    }
    if spec.is_abelian() {
        return HeisenbergCertificate::conclude(
            HeisenbergVerdict::NotHeisenberg,
            "every structure constant vanishes, so the algebra is abelian",
        );
    }
    if spec.actual_center_dim() != spec.declared_center_dim() {
        return HeisenbergCertificate::conclude(
            HeisenbergVerdict::Inapplicable,
            "the actual center is larger than the declared one",
        );
    }
    let n = spec.n();
    let alpha = n + 1;
    let e = ExactMatrix::from_fn(n, n, |k, j| spec.e(alpha, k + 1, j + 1));
    for k in 0..n {
        for j in 0..n {
            let fwd = e.entry(k, j);
            let bwd = e.entry(j, k);
            if fwd * &fwd.conj() != bwd * &bwd.conj() {
                return HeisenbergCertificate::conclude(
                    HeisenbergVerdict::NotHeisenberg,
                    format!("|E_{}{}| differs from |E_{}{}|", k + 1, j + 1, j + 1, k + 1),
                );
            }
        }
    }
    let mut unit: Option<GaussianRational> = None;
    for j in 0..n {
        for l in 0..n {
            let denom = e.entry(j, l);
            if denom.is_zero() {
                continue;
            }
            let ratio = &e.entry(l, j).conj() / denom;
            match &unit {
                None => unit = Some(ratio),
                Some(u) if *u == ratio => {}
                Some(_) => {
                    return HeisenbergCertificate::conclude(
                        HeisenbergVerdict::NotHeisenberg,
                        "the phase ratio is not constant across the structure constants",
                    );
                }
            }
        }
    }
    let u = unit.expect("a nonzero entry exists");
    if &u * &u.conj() != GaussianRational::one() {
        return HeisenbergCertificate::conclude(
            HeisenbergVerdict::NotHeisenberg,
            "the phase ratio is not a unit",
        );
    }
    let gram = e.mul(&e.conj_transpose());
    let scalar = gram.entry(0, 0).clone();
    for k in 0..n {
        for j in 0..n {
            let expected = if k == j {
                scalar.clone()
            } else {
                GaussianRational::zero()
            };
            if gram.entry(k, j) != &expected {
                return HeisenbergCertificate::conclude(
                    HeisenbergVerdict::NotHeisenberg,
                    "E·E* is not a scalar matrix, so the eigenvalue moduli differ",
                );
            }
        }
    }
    if scalar.is_zero() {
        return HeisenbergCertificate::conclude(
            HeisenbergVerdict::NotHeisenberg,
            "E·E* vanishes, so the bracket form is degenerate",
        );
    }
    HeisenbergCertificate {
        verdict: HeisenbergVerdict::Heisenberg,
        diagnostics: vec![
            format!("phase unit u = {u}: a unit multiple of E is skew-Hermitian"),
            format!(
                "E·E* = ({scalar})·I: all eigenvalue moduli are equal \
                 (the sign pattern is not separated in exact arithmetic)"
            ),
        ],
        unit: Some(u),
        scalar: Some(scalar),
    }
}

/// Kuranishi summary inside a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KurSummary {
    pub status: String,
    pub lower: usize,
    pub upper: usize,
}

/// Heisenberg summary inside a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeisenbergSummary {
    pub verdict: String,
}

/// Everything the analysis pipeline knows about one algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub dim_ker_dbar1: usize,
    pub generic_d: usize,
    pub dim_abel: usize,
    /// Nonzero obstruction polynomials, rendered in the parameters `t1…tN`.
    pub obstructions: Vec<String>,
    pub kur: KurSummary,
    pub heisenberg: HeisenbergSummary,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Runs the full pipeline: cohomology, kernel counts, abelian dimension,
/// deformation series and certificate, Heisenberg recognition, warnings.
pub fn analyze(spec: &AlgebraSpec, order: usize) -> Result<AnalysisReport> {
    let complex = DolbeaultComplex::new(spec);
    let h0 = complex.cohomology_dim(0);
    let h1 = complex.cohomology_dim(1);
    let h2 = if spec.total_dim() >= 2 {
        complex.cohomology_dim(2)
    } else {
        0
    };
    let dim_ker_dbar1 = dolbeault::dim_ker_dbar1(spec);
    let generic_d = spec.total_dim() - h0 + h1;
    let dim_abel = dim_abel(spec);
    let cert = kuranishi::certificate(spec, order)?;
    let series = kuranishi::series(spec, order, None)?;
    let obs = kuranishi::obstructions(spec, &series)?;
    let names: Vec<String> = (1..=series.n_params()).map(|k| format!("t{k}")).collect();
    let obstructions: Vec<String> = obs
        .polys
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| p.display(&names).to_string())
        .collect();
    let heisenberg = recognize_heisenberg(spec);
    let mut warnings = spec.validate();
    if dim_ker_dbar1 != generic_d {
        warnings.push(format!(
            "dim ker ∂̄₁ = {dim_ker_dbar1} differs from the generic count {generic_d}: \
             this complex structure sits at a special point"
        ));
    }
    assert!(dim_abel <= h1, "abelian directions live in H¹");
    assert!(
        cert.dim_lower >= dim_abel,
        "abelian deformations bound the dimension from below"
    );
    Ok(AnalysisReport {
        h0,
        h1,
        h2,
        dim_ker_dbar1,
        generic_d,
        dim_abel,
        obstructions,
        kur: KurSummary {
            status: cert.status.label(),
            lower: cert.dim_lower,
            upper: cert.dim_upper,
        },
        heisenberg: HeisenbergSummary {
            verdict: heisenberg.verdict.label().to_string(),
        },
        warnings,
    })
}
