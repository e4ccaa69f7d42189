use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::gaussian::GaussianRational;

/// Sparse multivariate polynomial over the Gaussian rationals.
///
/// Invariants: every stored coefficient is nonzero, and every exponent
/// vector has length `nvars`. Monomials live in a `BTreeMap`, so iteration
/// order (and therefore printing and all derived data) is deterministic.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, value: GaussianRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !value.is_zero() {
            p.terms.insert(vec![0; nvars], value);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, GaussianRational::one())
    }

    /// The variable `x_idx`.
    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars, "variable index {idx} out of range {nvars}");
        let mut expo = vec![0u32; nvars];
        expo[idx] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(expo, GaussianRational::one());
        p
    }

    pub fn monomial(nvars: usize, expo: Vec<u32>, coeff: GaussianRational) -> Self {
        assert_eq!(expo.len(), nvars);
        let mut p = Poly::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(expo, coeff);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, expo: &[u32]) -> GaussianRational {
        self.terms
            .get(expo)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&vec![0; self.nvars])
    }

    /// Largest total degree of any monomial; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn insert(&mut self, expo: Vec<u32>, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(expo) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    /// Coefficient-wise complex conjugation (variables untouched).
    pub fn conj_coeffs(&self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v.conj());
        }
        out
    }

    /// Applies a permutation of the variable indices: exponent of old
    /// variable `j` moves to `perm[j]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Poly {
        assert_eq!(perm.len(), self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            let mut ne = vec![0u32; self.nvars];
            for (j, &x) in e.iter().enumerate() {
                ne[perm[j]] += x;
            }
            out.insert(ne, v.clone());
        }
        out
    }

    /// Substitutes exact values for a subset of the variables; the variable
    /// count is preserved (substituted variables simply no longer occur).
    pub fn substitute(&self, values: &[(usize, GaussianRational)]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        'terms: for (e, v) in &self.terms {
            let mut ne = e.clone();
            let mut coeff = v.clone();
            for (idx, val) in values {
                let k = ne[*idx];
                if k > 0 {
                    ne[*idx] = 0;
                    if val.is_zero() {
                        continue 'terms;
                    }
                    for _ in 0..k {
                        coeff = &coeff * val;
                    }
                }
            }
            out.insert(ne, coeff);
        }
        out
    }

    /// Evaluates at a full point.
    pub fn evaluate(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = GaussianRational::zero();
        for (e, v) in &self.terms {
            let mut term = v.clone();
            for (j, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = &term * &point[j];
                }
            }
            acc += &term;
        }
        acc
    }

    /// The sum of the monomials of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            if e.iter().sum::<u32>() == d {
                out.terms.insert(e.clone(), v.clone());
            }
        }
        out
    }

    /// Drops every monomial of total degree greater than `d`.
    pub fn truncate_degree(&self, d: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            if e.iter().sum::<u32>() <= d {
                out.terms.insert(e.clone(), v.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to variable `idx`.
    pub fn derivative(&self, idx: usize) -> Poly {
        assert!(idx < self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            let k = e[idx];
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] = k - 1;
            out.insert(ne, v * &GaussianRational::from_integer(k as i64));
        }
        out
    }

    /// Divides out the largest monomial dividing every term (the monomial
    /// content). The zero polynomial is returned unchanged.
    pub fn divide_monomial_content(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut content = vec![u32::MAX; self.nvars];
        for e in self.terms.keys() {
            for (c, &x) in content.iter_mut().zip(e.iter()) {
                *c = (*c).min(x);
            }
        }
        if content.iter().all(|&c| c == 0) {
            return self.clone();
        }
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            let ne = e.iter().zip(&content).map(|(x, c)| x - c).collect();
            out.terms.insert(ne, v.clone());
        }
        out
    }

    /// Monomial order used for leading terms and printing: total degree
    /// first, then lexicographic on exponents, largest first.
    fn monomials_desc(&self) -> Vec<&Vec<u32>> {
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        keys
    }

    pub fn leading_coeff(&self) -> Option<GaussianRational> {
        self.monomials_desc()
            .first()
            .map(|e| self.terms[*e].clone())
    }

    /// Scales so the leading coefficient is 1; canonical representative of
    /// the polynomial up to a scalar unit.
    pub fn normalized(&self) -> Poly {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => self.scale(&lc.inv().expect("leading coefficient is nonzero")),
        }
    }

    /// True when no monomial has total degree above 1.
    pub fn is_affine(&self) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() <= 1)
    }

    /// Groups terms by their exponents on the variable block `block`
    /// (a sorted list of variable indices): returns pairs of
    /// (block-monomial, polynomial in the remaining variables). The returned
    /// polynomials keep the full variable count with zero block exponents.
    pub fn split_by_block(&self, block: &[usize]) -> Vec<(Vec<u32>, Poly)> {
        let mut groups: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (e, v) in &self.terms {
            let key: Vec<u32> = block.iter().map(|&j| e[j]).collect();
            let mut rest = e.clone();
            for &j in block {
                rest[j] = 0;
            }
            groups
                .entry(key)
                .or_insert_with(|| Poly::zero(self.nvars))
                .insert(rest, v.clone());
        }
        groups.into_iter().collect()
    }

    /// Re-embeds into a polynomial ring with `nvars` variables, sending old
    /// variable `j` to the new variable `offset + j`.
    pub fn extend_vars(&self, nvars: usize, offset: usize) -> Poly {
        assert!(offset + self.nvars <= nvars, "extension does not fit");
        let mut out = Poly::zero(nvars);
        for (e, v) in &self.terms {
            let mut ne = vec![0u32; nvars];
            ne[offset..offset + self.nvars].copy_from_slice(e);
            out.terms.insert(ne, v.clone());
        }
        out
    }

    /// Inverse of [`Self::extend_vars`] with offset 0: shrinks to the first
    /// `nvars` variables. Panics if any dropped variable actually occurs
    /// (internal invariant of the callers).
    pub fn restrict_vars(&self, nvars: usize) -> Poly {
        assert!(nvars <= self.nvars);
        let mut out = Poly::zero(nvars);
        for (e, v) in &self.terms {
            assert!(
                e[nvars..].iter().all(|&x| x == 0),
                "restricted variable occurs in polynomial"
            );
            out.terms.insert(e[..nvars].to_vec(), v.clone());
        }
        out
    }

    /// Exact polynomial division: returns `q` with `self = q * div` when the
    /// divisor divides exactly, `None` otherwise. Long division by a single
    /// divisor in the [`Self::monomials_desc`] order, which is compatible
    /// with multiplication, so exact multiples always reduce to zero.
    pub fn try_div_exact(&self, div: &Poly) -> Option<Poly> {
        assert_eq!(self.nvars, div.nvars);
        assert!(!div.is_zero(), "division by the zero polynomial");
        let lead_expo = div.monomials_desc().first().cloned().cloned()?;
        let lead_coeff = div.terms[&lead_expo].clone();
        let lead_inv = lead_coeff.inv().expect("nonzero leading coefficient");
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while !rem.is_zero() {
            let r_expo = (*rem.monomials_desc().first().unwrap()).clone();
            // the leading monomial of the divisor must divide stepwise
            if r_expo.iter().zip(&lead_expo).any(|(a, b)| a < b) {
                return None;
            }
            let q_expo: Vec<u32> = r_expo.iter().zip(&lead_expo).map(|(a, b)| a - b).collect();
            let q_coeff = &rem.terms[&r_expo] * &lead_inv;
            let q_term = Poly::monomial(self.nvars, q_expo, q_coeff);
            rem = &rem - &(&q_term * div);
            quot = &quot + &q_term;
        }
        Some(quot)
    }

    /// Substitutes polynomials for a subset of the variables
    /// (simultaneously); all polynomials share this one's variable count.
    pub fn substitute_poly(&self, assignments: &[(usize, Poly)]) -> Poly {
        for (_, p) in assignments {
            assert_eq!(p.nvars, self.nvars, "variable count mismatch");
        }
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            let mut ne = e.clone();
            let mut factor = Poly::one(self.nvars);
            for (idx, replacement) in assignments {
                let k = ne[*idx];
                ne[*idx] = 0;
                for _ in 0..k {
                    factor = &factor * replacement;
                }
            }
            let base = Poly::monomial(self.nvars, ne, v.clone());
            out = &out + &(&base * &factor);
        }
        out
    }

    /// Renders with the given variable names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        assert_eq!(names.len(), self.nvars);
        PolyDisplay { poly: self, names }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.insert(e.clone(), v.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), -v);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (ea, va) in &self.terms {
            for (eb, vb) in &rhs.terms {
                let expo: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.insert(expo, va * vb);
            }
        }
        out
    }
}

macro_rules! forward_poly_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_poly_owned!(Add, add);
forward_poly_owned!(Sub, sub);
forward_poly_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|k| format!("t{k}")).collect();
        write!(f, "{}", self.display(&names))
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for expo in self.poly.monomials_desc() {
            let coeff = &self.poly.terms[expo];
            let mono: Vec<String> = expo
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| {
                    if k == 1 {
                        self.names[j].clone()
                    } else {
                        format!("{}^{}", self.names[j], k)
                    }
                })
                .collect();
            // Pull a real sign out front; complex coefficients print in
            // parentheses.
            let (sign, body) = coefficient_body(coeff, mono.is_empty());
            if first {
                if sign < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if let Some(b) = body {
                parts.push(b);
            }
            parts.extend(mono);
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Splits a coefficient into a printed sign and an optional textual factor.
/// `standalone` is true for the constant monomial, which must always print
/// its coefficient.
fn coefficient_body(c: &GaussianRational, standalone: bool) -> (i32, Option<String>) {
    if c.is_real() {
        let sign = if c.re.is_negative() { -1 } else { 1 };
        let abs = c.re.abs();
        if abs.is_one() && !standalone {
            (sign, None)
        } else {
            (sign, Some(abs.to_string()))
        }
    } else if c.re.is_zero() {
        let sign = if c.im.is_negative() { -1 } else { 1 };
        let abs = GaussianRational::new(num_traits::Zero::zero(), c.im.abs());
        (sign, Some(format!("({abs})")))
    } else {
        (1, Some(format!("({c})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|k| format!("t{k}")).collect()
    }

    #[test]
    fn complex_factorization_of_sum_of_squares() {
        // (t1 + i*t2)(t1 - i*t2) = t1^2 + t2^2.
        let t1 = Poly::var(2, 0);
        let t2 = Poly::var(2, 1);
        let i = Poly::constant(2, GaussianRational::i());
        let left = &(&t1 + &(&i * &t2)) * &(&t1 - &(&i * &t2));
        let expected = &(&t1 * &t1) + &(&t2 * &t2);
        assert_eq!(left, expected);
    }

    #[test]
    fn substitution_and_degree_parts() {
        let t1 = Poly::var(2, 0);
        let t2 = Poly::var(2, 1);
        // p = t1^2*t2 + 2*t2 + 3
        let p = &(&(&t1 * &t1) * &t2)
            + &(&t2.scale(&GaussianRational::from_integer(2))
                + &Poly::constant(2, GaussianRational::from_integer(3)));
        assert_eq!(p.total_degree(), Some(3));
        let at_t1_2 = p.substitute(&[(0, GaussianRational::from_integer(2))]);
        // 4*t2 + 2*t2 + 3 = 6*t2 + 3
        assert_eq!(
            at_t1_2,
            &Poly::var(2, 1).scale(&GaussianRational::from_integer(6))
                + &Poly::constant(2, GaussianRational::from_integer(3))
        );
        assert_eq!(p.homogeneous_part(3), &(&t1 * &t1) * &t2);
        assert_eq!(
            p.evaluate(&[
                GaussianRational::from_integer(1),
                GaussianRational::from_integer(5)
            ]),
            GaussianRational::from_integer(5 + 10 + 3)
        );
        assert!(p.truncate_degree(1).total_degree() == Some(1));
    }

    #[test]
    fn zero_coefficients_never_stored() {
        let t1 = Poly::var(1, 0);
        let diff = &t1 - &t1;
        assert!(diff.is_zero());
        assert_eq!(diff.num_terms(), 0);
        let p = &t1 + &Poly::constant(1, GaussianRational::zero());
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn content_and_normalization() {
        let t1 = Poly::var(2, 0);
        let t2 = Poly::var(2, 1);
        // t1*t2^2 + t1^2*t2^2 has content t1*t2^2.
        let p = &(&t1 * &(&t2 * &t2)) + &(&(&t1 * &t1) * &(&t2 * &t2));
        let reduced = p.divide_monomial_content();
        assert_eq!(reduced, &Poly::one(2) + &t1);
        let q = t2.scale(&GaussianRational::from_parts(0, 1, 2, 1));
        assert_eq!(q.normalized(), t2);
    }

    #[test]
    fn display_is_deterministic_and_readable() {
        let t = names(3);
        let t1 = Poly::var(3, 0);
        let t2 = Poly::var(3, 1);
        let t3 = Poly::var(3, 2);
        let p = &(&(&t1 * &t2).scale(&GaussianRational::from_integer(-2)) + &t3)
            + &Poly::constant(3, GaussianRational::from_parts(1, 2, -1, 2));
        assert_eq!(p.display(&t).to_string(), "-2*t1*t2 + t3 + (1/2-1/2i)");
        let q = t1.scale(&GaussianRational::from_parts(0, 1, -1, 2));
        assert_eq!(q.display(&t).to_string(), "-(1/2i)*t1");
        assert_eq!(Poly::zero(3).display(&t).to_string(), "0");
    }

    #[test]
    fn block_splitting() {
        // p = a*x + b with block {1} (the x variable at index 1): groups 1 and x.
        let a = Poly::var(3, 0);
        let x = Poly::var(3, 1);
        let b = Poly::var(3, 2);
        let p = &(&a * &x) + &b;
        let groups = p.split_by_block(&[1]);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0], (vec![0], b));
        assert_eq!(groups[1], (vec![1], a));
    }

    #[test]
    fn exact_division() {
        let t1 = Poly::var(2, 0);
        let t2 = Poly::var(2, 1);
        let h = &t1 + &t2;
        let q = &(&t1 * &t1) + &t2;
        let prod = &h * &q;
        assert_eq!(prod.try_div_exact(&h), Some(q.clone()));
        assert_eq!((&prod + &Poly::one(2)).try_div_exact(&h), None);
        assert_eq!(t1.try_div_exact(&t2), None);
    }

    #[test]
    fn polynomial_substitution_and_var_embedding() {
        let t1 = Poly::var(2, 0);
        let t2 = Poly::var(2, 1);
        // substitute t1 := t2^2 into t1^2 + t1*t2
        let p = &(&t1 * &t1) + &(&t1 * &t2);
        let sub = p.substitute_poly(&[(0, &t2 * &t2)]);
        let t2pow = |k: u32| Poly::monomial(2, vec![0, k], GaussianRational::one());
        assert_eq!(sub, &t2pow(4) + &t2pow(3));

        let wide = p.extend_vars(4, 1);
        assert_eq!(wide.nvars(), 4);
        assert_eq!(wide.coeff(&[0, 2, 0, 0]), GaussianRational::one());
        assert_eq!(
            wide.restrict_vars(3)
                .extend_vars(4, 0)
                .restrict_vars(3)
                .nvars(),
            3
        );
    }

    #[test]
    fn derivative_rules() {
        let t1 = Poly::var(2, 0);
        let t2 = Poly::var(2, 1);
        let p = &(&(&t1 * &t1) * &t2) + &t1; // t1^2 t2 + t1
        let dp = p.derivative(0); // 2 t1 t2 + 1
        assert_eq!(
            dp,
            &(&t1 * &t2).scale(&GaussianRational::from_integer(2)) + &Poly::one(2)
        );
    }
}
