//! Data model for a 2-step nilpotent Lie algebra carrying an abelian complex
//! structure.
//!
//! The algebra is described by two counts and a sparse table of complex
//! structure constants:
//!
//! * `n` — number of non-central (1,0) directions `T_1 … T_n`,
//! * `m` — number of central (1,0) directions `W_{n+1} … W_{n+m}`,
//! * `E` — map `(alpha, k, j) -> GaussianRational` with `alpha` in
//!   `n+1..=n+m` and `k, j` in `1..=n`, encoding the only nonzero brackets
//!
//! ```text
//!   [conj(T_k), T_j] = sum_alpha E^alpha_{kj} W_alpha
//!                    + sum_alpha F^alpha_{kj} conj(W_alpha)
//! ```
//!
//! The companion constants `F^alpha_{kj} = -conj(E^alpha_{jk})` are derived,
//! never stored: they are forced by the requirement that the brackets come
//! from a real Lie algebra. All other utility data (the real-basis structure
//! constants, the complex-structure operator J, the center) is derived from
//! `E` as well.

mod real;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::{ExactMatrix, GaussianRational};
use crate::{Error, Result};

pub use real::{RealBasisIndex, RealBrackets};

/// Key into the `E` table: `(alpha, k, j)`, all 1-based.
pub type EKey = (usize, usize, usize);

/// A 2-step nilpotent Lie algebra with abelian complex structure, presented
/// by its complex structure constants.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraSpec {
    name: Option<String>,
    n: usize,
    m: usize,
    e: BTreeMap<EKey, GaussianRational>,
}

impl AlgebraSpec {
    /// Builds a spec, checking every index against the declared ranges.
    /// Zero-valued entries are dropped; duplicate keys are rejected.
    pub fn new<I>(name: Option<String>, n: usize, m: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (EKey, GaussianRational)>,
    {
        if n + m == 0 {
            return Err(Error::SpecValidation(
                "algebra must have at least one direction (n + m >= 1)".into(),
            ));
        }
        let mut e = BTreeMap::new();
        for ((alpha, k, j), value) in entries {
            if !(n + 1..=n + m).contains(&alpha) || !(1..=n).contains(&k) || !(1..=n).contains(&j) {
                return Err(Error::SpecValidation(format!(
                    "index (alpha={alpha}, k={k}, j={j}) out of range for n={n}, m={m}: \
                     need alpha in {}..={} and k, j in 1..={n}",
                    n + 1,
                    n + m,
                )));
            }
            if value.is_zero() {
                continue;
            }
            if e.insert((alpha, k, j), value).is_some() {
                return Err(Error::SpecValidation(format!(
                    "duplicate E entry at (alpha={alpha}, k={k}, j={j})"
                )));
            }
        }
        Ok(AlgebraSpec { name, n, m, e })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Number of non-central (1,0) directions `T_1..T_n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of central (1,0) directions `W_{n+1}..W_{n+m}`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Complex dimension `n + m`.
    pub fn total_dim(&self) -> usize {
        self.n + self.m
    }

    /// `E^alpha_{kj}`; absent entries are zero.
    pub fn e(&self, alpha: usize, k: usize, j: usize) -> GaussianRational {
        self.e
            .get(&(alpha, k, j))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// `F^alpha_{kj} = -conj(E^alpha_{jk})`.
    pub fn f(&self, alpha: usize, k: usize, j: usize) -> GaussianRational {
        -self.e(alpha, j, k).conj()
    }

    /// The stored (nonzero) `E` entries in deterministic key order.
    pub fn e_entries(&self) -> impl Iterator<Item = (&EKey, &GaussianRational)> {
        self.e.iter()
    }

    /// The full derived `F` table (nonzero entries only).
    pub fn derive_f(&self) -> BTreeMap<EKey, GaussianRational> {
        self.e
            .iter()
            .map(|(&(alpha, k, j), v)| ((alpha, j, k), -v.conj()))
            .collect()
    }

    /// True when every bracket vanishes.
    pub fn is_abelian(&self) -> bool {
        self.e.is_empty()
    }

    /// Real dimension of the declared center (the span of `Z`, `JZ`).
    pub fn declared_center_dim(&self) -> usize {
        2 * self.m
    }

    /// Real dimension of the actual center, found by solving `[v, g] = 0`
    /// over the real basis.
    pub fn actual_center_dim(&self) -> usize {
        let rb = self.real_brackets();
        rb.center_dim()
    }

    /// Structural warnings for a spec that is valid but unusual. Index-range
    /// problems are construction errors, not warnings.
    pub fn validate(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let actual = self.actual_center_dim();
        let declared = self.declared_center_dim();
        if actual > declared {
            if actual == 2 * self.total_dim() {
                warnings.push(
                    "actual center is the whole algebra (all brackets vanish); \
                     declared center is smaller"
                        .into(),
                );
            } else {
                warnings.push(format!(
                    "actual center (real dimension {actual}) exceeds the declared center \
                     (real dimension {declared})"
                ));
            }
        }
        warnings
    }

    /// Expands the brackets over the real basis `{X_j, JX_j, Z_a, JZ_a}`.
    pub fn real_brackets(&self) -> RealBrackets {
        RealBrackets::from_spec(self)
    }

    /// A display name: the stored name, or a summary of the dimensions.
    pub fn display_name(&self) -> String {
        match &self.name {
            Some(s) => s.clone(),
            None => format!("custom(n={}, m={})", self.n, self.m),
        }
    }

    /// The matrix of the linear map `c -> (sum_j c_j E^alpha_{kj})_{k,alpha}`
    /// on T-coefficient vectors, stacked over all rows `(k, alpha)`; its
    /// kernel intersected with the F-version describes central combinations
    /// of the `T_j`.
    pub fn e_action_matrix(&self) -> ExactMatrix {
        let rows = self.n * self.m;
        ExactMatrix::from_fn(rows, self.n, |r, c| {
            let k = r / self.m + 1;
            let alpha = self.n + 1 + r % self.m;
            self.e(alpha, k, c + 1)
        })
    }

    /// Same as [`Self::e_action_matrix`] for the derived `F` constants.
    pub fn f_action_matrix(&self) -> ExactMatrix {
        let rows = self.n * self.m;
        ExactMatrix::from_fn(rows, self.n, |r, c| {
            let k = r / self.m + 1;
            let alpha = self.n + 1 + r % self.m;
            self.f(alpha, k, c + 1)
        })
    }

    // ---- built-in families -------------------------------------------------

    /// Constructs one of the built-in examples. `params` supplies dimensions
    /// for the parametric families; pass `&[]` for each family's default.
    ///
    /// * `torus(n=2, m=1)` — abelian: `E = 0`.
    /// * `kodaira(n=1)` — `m = 1`, `E^{n+1}_{jj} = -i/2` for all `j`.
    /// * `heisenberg_abelian(n=2, m=1)` — `E^{n+1}_{jj} = -i/2`, other
    ///   central rows zero.
    /// * `hxh(a=1, b=1)` — two Heisenberg blocks sharing one complexified
    ///   central direction: `E_{jj} = -i/2` on the first block,
    ///   `E_{kk} = 1/2` on the second.
    /// * `w6` — `n = 2`, `m = 1`, `E^3_{12} = -1`.
    /// * `p6` — `n = 2`, `m = 1`, `E^3_{11} = i/2`, `E^3_{12} = E^3_{21} = 1/2`.
    /// * `kodaira_product` — `n = 2`, `m = 2`, `E^3_{11} = 1`, `E^4_{22} = 1`.
    pub fn builtin(name: &str, params: &[usize]) -> Result<Self> {
        let half_i_neg = || GaussianRational::from_parts(0, 1, -1, 2);
        let half = || GaussianRational::from_parts(1, 2, 0, 1);
        let dims = |params: &[usize], defaults: &[usize]| -> Result<Vec<usize>> {
            if params.is_empty() {
                return Ok(defaults.to_vec());
            }
            if params.len() != defaults.len() {
                return Err(Error::BadArgument(format!(
                    "{name} takes {} parameter(s), got {}",
                    defaults.len(),
                    params.len()
                )));
            }
            if params.contains(&0) {
                return Err(Error::BadArgument(format!(
                    "{name} parameters must be positive"
                )));
            }
            Ok(params.to_vec())
        };
        match name {
            "torus" => {
                let d = dims(params, &[2, 1])?;
                let label = format!("torus({},{})", d[0], d[1]);
                AlgebraSpec::new(Some(label), d[0], d[1], [])
            }
            "kodaira" => {
                let d = dims(params, &[1])?;
                let n = d[0];
                let entries = (1..=n).map(move |j| ((n + 1, j, j), half_i_neg()));
                AlgebraSpec::new(Some(format!("kodaira({n})")), n, 1, entries)
            }
            "heisenberg_abelian" => {
                let d = dims(params, &[2, 1])?;
                let (n, m) = (d[0], d[1]);
                let entries = (1..=n).map(move |j| ((n + 1, j, j), half_i_neg()));
                AlgebraSpec::new(Some(format!("heisenberg_abelian({n},{m})")), n, m, entries)
            }
            "hxh" => {
                let d = dims(params, &[1, 1])?;
                let (a, b) = (d[0], d[1]);
                let n = a + b;
                let mut entries = Vec::new();
                for j in 1..=a {
                    entries.push(((n + 1, j, j), half_i_neg()));
                }
                for k in a + 1..=n {
                    entries.push(((n + 1, k, k), half()));
                }
                AlgebraSpec::new(Some(format!("hxh({a},{b})")), n, 1, entries)
            }
            "w6" => {
                dims(params, &[])?;
                AlgebraSpec::new(
                    Some("w6".into()),
                    2,
                    1,
                    [((3, 1, 2), -GaussianRational::one())],
                )
            }
            "p6" => {
                dims(params, &[])?;
                AlgebraSpec::new(
                    Some("p6".into()),
                    2,
                    1,
                    [
                        ((3, 1, 1), GaussianRational::i() * half()),
                        ((3, 1, 2), half()),
                        ((3, 2, 1), half()),
                    ],
                )
            }
            "kodaira_product" => {
                dims(params, &[])?;
                AlgebraSpec::new(
                    Some("kodaira_product".into()),
                    2,
                    2,
                    [
                        ((3, 1, 1), GaussianRational::one()),
                        ((4, 2, 2), GaussianRational::one()),
                    ],
                )
            }
            other => Err(Error::UnknownExample(other.to_string())),
        }
    }

    /// Names accepted by [`Self::builtin`].
    pub const BUILTIN_NAMES: [&'static str; 7] = [
        "torus",
        "kodaira",
        "heisenberg_abelian",
        "hxh",
        "w6",
        "p6",
        "kodaira_product",
    ];

    // ---- JSON --------------------------------------------------------------

    /// Parses the JSON representation (see the module docs of the crate for
    /// the schema). Unknown fields are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpecJson =
            serde_json::from_str(text).map_err(|err| Error::Json(err.to_string()))?;
        raw.try_into()
    }

    /// Serializes to the JSON representation with values as exact strings.
    pub fn to_json(&self) -> String {
        let raw: SpecJson = self.into();
        serde_json::to_string_pretty(&raw).expect("spec serialization cannot fail")
    }
}

impl fmt::Debug for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AlgebraSpec({}, n={}, m={}, {} E entries)",
            self.display_name(),
            self.n,
            self.m,
            self.e.len()
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    alpha: usize,
    k: usize,
    j: usize,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n: usize,
    m: usize,
    #[serde(rename = "E")]
    e: Vec<EntryJson>,
}

impl TryFrom<SpecJson> for AlgebraSpec {
    type Error = Error;

    fn try_from(raw: SpecJson) -> Result<Self> {
        let mut entries = Vec::with_capacity(raw.e.len());
        for item in raw.e {
            let value: GaussianRational = item.value.parse()?;
            entries.push(((item.alpha, item.k, item.j), value));
        }
        AlgebraSpec::new(raw.name, raw.n, raw.m, entries)
    }
}

impl From<&AlgebraSpec> for SpecJson {
    fn from(spec: &AlgebraSpec) -> Self {
        SpecJson {
            name: spec.name.clone(),
            n: spec.n,
            m: spec.m,
            e: spec
                .e
                .iter()
                .map(|(&(alpha, k, j), v)| EntryJson {
                    alpha,
                    k,
                    j,
                    value: v.to_string(),
                })
                .collect(),
        }
    }
}
