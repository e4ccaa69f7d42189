//! Invariant exterior algebra on the complexified dual space.
//!
//! Generators are the invariant 1-forms, encoded by a single index `g` in
//! `0..2*tot` where `tot = n + m`:
//!
//! * `g < tot` — the (1,0)-form `omega^{g+1}`,
//! * `g >= tot` — the (0,1)-form `conj(omega^{g-tot+1})`.
//!
//! A form is a sparse map from strictly increasing generator lists to
//! polynomial coefficients (so it can carry deformation parameters). The
//! conventions, fixed once and checked against the structure equations:
//!
//! * `d sigma (A, B) = -sigma([A, B])`,
//! * `(sigma ^ tau)(A, B) = sigma(A) tau(B) - sigma(B) tau(A)` on 1-forms,
//!
//! under which `d omega^a = sum_{i,j} E^a_{ji} omega^i ^ conj(omega^j)` with
//! no extra factor, and `d conj(omega^a)` is the conjugate expression.

mod coframe;

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::AlgebraSpec;
use crate::exact::{GaussianRational, Poly};

pub use coframe::{coframe_conditions, CoframeConditions};

/// Merges two strictly increasing generator lists, counting the sign of the
/// permutation; `None` when they share a generator.
fn merge_keys(a: &[usize], b: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining a-elements
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((sign, out))
}

/// Sorts an arbitrary generator list into canonical order, tracking the
/// permutation sign; `None` on a repeated generator.
fn sort_key(key: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut v = key.to_vec();
    let mut sign = 1;
    // insertion sort, counting swaps
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((sign, v))
}

/// An invariant differential form with polynomial coefficients. Possibly of
/// mixed degree; all coefficient polynomials share one variable count.
#[derive(Clone, PartialEq, Eq)]
pub struct InvariantForm {
    tot: usize,
    nvars: usize,
    terms: BTreeMap<Vec<usize>, Poly>,
}

impl InvariantForm {
    pub fn zero(tot: usize, nvars: usize) -> Self {
        InvariantForm {
            tot,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// A degree-0 form (a scalar).
    pub fn scalar(tot: usize, value: Poly) -> Self {
        let mut f = InvariantForm::zero(tot, value.nvars());
        if !value.is_zero() {
            f.terms.insert(Vec::new(), value);
        }
        f
    }

    /// The (1,0)-generator `omega^p`, `p` in `1..=tot`.
    pub fn omega(tot: usize, nvars: usize, p: usize) -> Self {
        assert!((1..=tot).contains(&p));
        InvariantForm::generator(tot, nvars, p - 1)
    }

    /// The (0,1)-generator `conj(omega^p)`.
    pub fn omega_bar(tot: usize, nvars: usize, p: usize) -> Self {
        assert!((1..=tot).contains(&p));
        InvariantForm::generator(tot, nvars, tot + p - 1)
    }

    /// A generator by flat index in `0..2*tot`.
    pub fn generator(tot: usize, nvars: usize, g: usize) -> Self {
        assert!(g < 2 * tot);
        let mut f = InvariantForm::zero(tot, nvars);
        f.terms.insert(vec![g], Poly::one(nvars));
        f
    }

    /// Builds a form from (generator list, coefficient) pairs; lists need
    /// not be sorted.
    pub fn from_terms<I>(tot: usize, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, Poly)>,
    {
        let mut f = InvariantForm::zero(tot, nvars);
        for (key, coeff) in terms {
            f.add_term(&key, coeff);
        }
        f
    }

    pub fn tot(&self) -> usize {
        self.tot
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates (canonical generator list, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of a generator list (sorted into canonical order first).
    pub fn coeff(&self, key: &[usize]) -> Poly {
        match sort_key(key) {
            None => Poly::zero(self.nvars),
            Some((sign, sorted)) => {
                let c = self
                    .terms
                    .get(&sorted)
                    .cloned()
                    .unwrap_or_else(|| Poly::zero(self.nvars));
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Common degree of all terms (`Some(0)` for zero), or `None` if mixed.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(|k| k.len());
        match degrees.next() {
            None => Some(0),
            Some(d) => {
                if degrees.all(|x| x == d) {
                    Some(d)
                } else {
                    None
                }
            }
        }
    }

    fn add_term(&mut self, key: &[usize], coeff: Poly) {
        assert_eq!(coeff.nvars(), self.nvars, "coefficient variable count");
        assert!(key.iter().all(|&g| g < 2 * self.tot), "generator range");
        if coeff.is_zero() {
            return;
        }
        let Some((sign, sorted)) = sort_key(key) else {
            return; // repeated generator: the term is zero
        };
        let signed = if sign < 0 { -coeff } else { coeff };
        match self.terms.entry(sorted) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(signed);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &signed;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Poly) -> InvariantForm {
        let mut out = InvariantForm::zero(self.tot, self.nvars);
        for (key, coeff) in &self.terms {
            out.add_term(key, coeff * c);
        }
        out
    }

    pub fn scale_const(&self, c: &GaussianRational) -> InvariantForm {
        self.scale(&Poly::constant(self.nvars, c.clone()))
    }

    pub fn map_coefficients(&self, f: impl Fn(&Poly) -> Poly) -> InvariantForm {
        let mut out = InvariantForm::zero(self.tot, self.nvars);
        for (key, coeff) in &self.terms {
            out.add_term(key, f(coeff));
        }
        out
    }

    /// Wedge product.
    pub fn wedge(&self, rhs: &InvariantForm) -> InvariantForm {
        assert_eq!(self.tot, rhs.tot);
        assert_eq!(self.nvars, rhs.nvars, "coefficient variable count");
        let mut out = InvariantForm::zero(self.tot, self.nvars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                if let Some((sign, key)) = merge_keys(ka, kb) {
                    let mut coeff = ca * cb;
                    if sign < 0 {
                        coeff = -coeff;
                    }
                    // key is already canonical; reuse add_term for merging
                    out.add_term(&key, coeff);
                }
            }
        }
        out
    }

    /// Graded interior product with the invariant vector paired to
    /// generator `v`: `v < tot` is `e_{v+1}` (a `T` or `W`), `v >= tot` its
    /// conjugate. `omega^p(e_q) = delta_{pq}`, conjugates pair likewise, and
    /// mixed pairings vanish.
    pub fn contract(&self, v: usize) -> InvariantForm {
        assert!(v < 2 * self.tot);
        let mut out = InvariantForm::zero(self.tot, self.nvars);
        for (key, coeff) in &self.terms {
            if let Some(pos) = key.iter().position(|&g| g == v) {
                let mut rest = key.clone();
                rest.remove(pos);
                let c = if pos % 2 == 1 {
                    -coeff.clone()
                } else {
                    coeff.clone()
                };
                out.add_term(&rest, c);
            }
        }
        out
    }

    /// Complex conjugate: swaps `omega <-> conj(omega)` and conjugates the
    /// coefficients (variables are treated as formal/real; callers that use
    /// paired conjugate variables permute them separately).
    pub fn conj(&self) -> InvariantForm {
        let mut out = InvariantForm::zero(self.tot, self.nvars);
        for (key, coeff) in &self.terms {
            let mapped: Vec<usize> = key
                .iter()
                .map(|&g| {
                    if g < self.tot {
                        g + self.tot
                    } else {
                        g - self.tot
                    }
                })
                .collect();
            out.add_term(&mapped, coeff.conj_coeffs());
        }
        out
    }

    /// The part where exactly `p` holomorphic and `q` antiholomorphic
    /// generators occur.
    pub fn part_of_type(&self, p: usize, q: usize) -> InvariantForm {
        let mut out = InvariantForm::zero(self.tot, self.nvars);
        for (key, coeff) in &self.terms {
            let holo = key.iter().filter(|&&g| g < self.tot).count();
            if holo == p && key.len() - holo == q {
                out.terms.insert(key.clone(), coeff.clone());
            }
        }
        out
    }

    /// Exterior derivative induced by the structure constants:
    /// `d omega^a = sum E^a_{ji} omega^i ^ conj(omega^j)` for central `a`,
    /// zero on the other generators, extended as a degree-+1 derivation
    /// (coefficients are constants for `d`).
    pub fn d(&self, spec: &AlgebraSpec) -> InvariantForm {
        assert_eq!(self.tot, spec.total_dim(), "form/spec dimension mismatch");
        let mut out = InvariantForm::zero(self.tot, self.nvars);
        for (key, coeff) in &self.terms {
            for (pos, &g) in key.iter().enumerate() {
                let dg = d_generator(spec, self.nvars, g);
                if dg.is_zero() {
                    continue;
                }
                let mut rest = key.clone();
                rest.remove(pos);
                let sign_pos = pos % 2 == 1;
                for (dkey, dcoeff) in &dg.terms {
                    if let Some((sign, merged)) = merge_keys(dkey, &rest) {
                        let mut c = coeff * dcoeff;
                        if (sign < 0) != sign_pos {
                            c = -c;
                        }
                        out.add_term(&merged, c);
                    }
                }
            }
        }
        out
    }
}

/// `d` of a single generator.
fn d_generator(spec: &AlgebraSpec, nvars: usize, g: usize) -> InvariantForm {
    let tot = spec.total_dim();
    let n = spec.n();
    let mut out = InvariantForm::zero(tot, nvars);
    if g < tot {
        let p = g + 1;
        if p > n {
            // d omega^a = sum_{(a,j,i)} E^a_{ji} omega^i ^ conj(omega^j)
            for (&(alpha, j, i), value) in spec.e_entries() {
                if alpha == p {
                    out.add_term(&[i - 1, tot + j - 1], Poly::constant(nvars, value.clone()));
                }
            }
        }
    } else {
        let p = g - tot + 1;
        if p > n {
            // d conj(omega^a) = sum conj(E^a_{ji}) conj(omega^i) ^ omega^j
            for (&(alpha, j, i), value) in spec.e_entries() {
                if alpha == p {
                    out.add_term(&[tot + i - 1, j - 1], Poly::constant(nvars, value.conj()));
                }
            }
        }
    }
    out
}

impl std::ops::Add for &InvariantForm {
    type Output = InvariantForm;
    fn add(self, rhs: &InvariantForm) -> InvariantForm {
        assert_eq!(self.tot, rhs.tot);
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (key, coeff) in &rhs.terms {
            out.add_term(key, coeff.clone());
        }
        out
    }
}

impl std::ops::Sub for &InvariantForm {
    type Output = InvariantForm;
    fn sub(self, rhs: &InvariantForm) -> InvariantForm {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &InvariantForm {
    type Output = InvariantForm;
    fn neg(self) -> InvariantForm {
        let mut out = InvariantForm::zero(self.tot, self.nvars);
        for (key, coeff) in &self.terms {
            out.terms.insert(key.clone(), -coeff);
        }
        out
    }
}

/// Renders `omega^p` as `w<p>` and its conjugate as `wb<p>`.
impl fmt::Debug for InvariantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let gens: Vec<String> = key
                .iter()
                .map(|&g| {
                    if g < self.tot {
                        format!("w{}", g + 1)
                    } else {
                        format!("wb{}", g - self.tot + 1)
                    }
                })
                .collect();
            if gens.is_empty() {
                write!(f, "({:?})", coeff)?;
            } else {
                write!(f, "({:?})*{}", coeff, gens.join("^"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn constant_form(tot: usize, key: &[usize], c: &str) -> InvariantForm {
        InvariantForm::from_terms(tot, 0, [(key.to_vec(), Poly::constant(0, gr(c)))])
    }

    #[test]
    fn wedge_antisymmetry_and_signs() {
        let tot = 3;
        let w1 = InvariantForm::omega(tot, 0, 1);
        let w2 = InvariantForm::omega(tot, 0, 2);
        assert_eq!(w1.wedge(&w2), -&w2.wedge(&w1));
        assert!(w1.wedge(&w1).is_zero());
        // (w1^w2)^w3 == w1^(w2^w3)
        let w3 = InvariantForm::omega_bar(tot, 0, 1);
        assert_eq!(w1.wedge(&w2).wedge(&w3), w1.wedge(&w2.wedge(&w3)));
    }

    #[test]
    fn differential_of_central_generators() {
        let w6 = AlgebraSpec::builtin("w6", &[]).unwrap();
        // d omega^3 = -omega^2 ^ conj(omega^1)
        let d3 = InvariantForm::omega(3, 0, 3).d(&w6);
        assert_eq!(d3, constant_form(3, &[1, 3], "-1"));
        // d conj(omega^3) = omega^1 ^ conj(omega^2)
        let db3 = InvariantForm::omega_bar(3, 0, 3).d(&w6);
        assert_eq!(db3, constant_form(3, &[0, 4], "1"));

        // P6: 2 d omega^3 = i w1^wb1 + w1^wb2 - wb1^w2
        let p6 = AlgebraSpec::builtin("p6", &[]).unwrap();
        let d3 = InvariantForm::omega(3, 0, 3).d(&p6).scale_const(&gr("2"));
        let expected = &(&constant_form(3, &[0, 3], "i") + &constant_form(3, &[0, 4], "1"))
            + &constant_form(3, &[1, 3], "1");
        assert_eq!(d3, expected);

        let torus = AlgebraSpec::builtin("torus", &[]).unwrap();
        for g in 0..6 {
            assert!(InvariantForm::generator(3, 0, g).d(&torus).is_zero());
        }
    }

    #[test]
    fn contraction_identities() {
        let w6 = AlgebraSpec::builtin("w6", &[]).unwrap();
        let db3 = InvariantForm::omega_bar(3, 0, 3).d(&w6);
        // iota_{T_1} d conj(omega^3) = conj(omega^2); iota_{T_2} gives 0
        assert_eq!(db3.contract(0), constant_form(3, &[4], "1"));
        assert!(db3.contract(1).is_zero());
    }

    #[test]
    fn d_squared_vanishes_everywhere() {
        for name in AlgebraSpec::BUILTIN_NAMES {
            let spec = AlgebraSpec::builtin(name, &[]).unwrap();
            let tot = spec.total_dim();
            for g in 0..2 * tot {
                let dd = InvariantForm::generator(tot, 0, g).d(&spec).d(&spec);
                assert!(dd.is_zero(), "{name}: d(d(generator {g})) != 0");
            }
        }
    }

    #[test]
    fn antiholomorphic_generators_are_dbar_closed() {
        // d of a (0,1)-generator has no (0,2) part, for every builtin
        for name in AlgebraSpec::BUILTIN_NAMES {
            let spec = AlgebraSpec::builtin(name, &[]).unwrap();
            let tot = spec.total_dim();
            for p in 1..=tot {
                let d = InvariantForm::omega_bar(tot, 0, p).d(&spec);
                assert!(d.part_of_type(0, 2).is_zero(), "{name}: conj(omega^{p})");
            }
        }
    }

    #[test]
    fn conjugation_is_an_involution() {
        let p6 = AlgebraSpec::builtin("p6", &[]).unwrap();
        let d3 = InvariantForm::omega(3, 0, 3).d(&p6);
        assert_eq!(d3.conj().conj(), d3);
        // conj(d omega^3) = d conj(omega^3)
        assert_eq!(d3.conj(), InvariantForm::omega_bar(3, 0, 3).d(&p6));
    }

    #[test]
    fn type_parts_partition_a_form() {
        let p6 = AlgebraSpec::builtin("p6", &[]).unwrap();
        let d3 = InvariantForm::omega(3, 0, 3).d(&p6);
        let sum = &d3.part_of_type(2, 0) + &(&d3.part_of_type(1, 1) + &d3.part_of_type(0, 2));
        assert_eq!(sum, d3);
        assert!(d3.part_of_type(2, 0).is_zero());
        assert!(d3.part_of_type(0, 2).is_zero());
    }
}
