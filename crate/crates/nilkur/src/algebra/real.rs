//! Expansion of the complex structure constants over the real basis
//! `{X_1..X_n, Y_1..Y_n, Z_{n+1}..Z_{n+m}, Z'_{n+1}..Z'_{n+m}}`, where
//! `Y_j = J X_j` and `Z'_a = J Z_a`.
//!
//! The complex directions are `T_j = (X_j - i Y_j) / 2` and
//! `W_a = (Z_a - i Z'_a) / 2`. Writing `E = E^a_{kj}`, `F = F^a_{kj}`, the
//! real structure constants are
//!
//! ```text
//!   [X_k, X_j] = sum_a  Re(E+F) Z_a + Im(E-F) Z'_a
//!   [X_k, Y_j] = sum_a -Im(E+F) Z_a + Re(E-F) Z'_a
//!   [Y_k, Y_j] = [X_k, X_j]
//! ```
//!
//! and conversely `E^a_{kj} = (c + f)/2 + i (d - e)/2` with `(c, d)` the
//! coordinates of `[X_k, X_j]` and `(e, f)` those of `[X_k, Y_j]`.

use std::collections::BTreeMap;

use crate::exact::{ExactMatrix, GaussianRational, Rational};
use crate::Result;

use super::AlgebraSpec;

/// A basis vector of the real algebra. `X`/`Y` indices are 1-based in
/// `1..=n`; `Z`/`Zp` indices are the central labels `n+1..=n+m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RealBasisIndex {
    X(usize),
    Y(usize),
    Z(usize),
    Zp(usize),
}

impl RealBasisIndex {
    /// Flat position in `0..2(n+m)`: all `X`, then `Y`, then `Z`, then `Z'`.
    pub fn flat(self, n: usize, m: usize) -> usize {
        match self {
            RealBasisIndex::X(j) => j - 1,
            RealBasisIndex::Y(j) => n + j - 1,
            RealBasisIndex::Z(a) => 2 * n + (a - n - 1),
            RealBasisIndex::Zp(a) => 2 * n + m + (a - n - 1),
        }
    }

    /// Enumerates the whole basis in flat order.
    pub fn all(n: usize, m: usize) -> Vec<RealBasisIndex> {
        let mut out = Vec::with_capacity(2 * (n + m));
        out.extend((1..=n).map(RealBasisIndex::X));
        out.extend((1..=n).map(RealBasisIndex::Y));
        out.extend((n + 1..=n + m).map(RealBasisIndex::Z));
        out.extend((n + 1..=n + m).map(RealBasisIndex::Zp));
        out
    }

    /// The complex structure: `J X = Y`, `J Y = -X`, `J Z = Z'`, `J Z' = -Z`.
    /// Returns `(sign, image)`.
    pub fn j(self) -> (i8, RealBasisIndex) {
        match self {
            RealBasisIndex::X(j) => (1, RealBasisIndex::Y(j)),
            RealBasisIndex::Y(j) => (-1, RealBasisIndex::X(j)),
            RealBasisIndex::Z(a) => (1, RealBasisIndex::Zp(a)),
            RealBasisIndex::Zp(a) => (-1, RealBasisIndex::Z(a)),
        }
    }

    fn is_central(self) -> bool {
        matches!(self, RealBasisIndex::Z(_) | RealBasisIndex::Zp(_))
    }
}

/// Structure constants of the real algebra. Every bracket lies in the span
/// of `{Z_a, Z'_a}`; values are vectors of length `2m` over that span
/// (`Z` coordinates first, then `Z'`).
#[derive(Clone, Debug)]
pub struct RealBrackets {
    n: usize,
    m: usize,
    /// Keyed by flat indices `(i, j)` with `i < j`, both non-central.
    table: BTreeMap<(usize, usize), Vec<Rational>>,
}

impl RealBrackets {
    pub(super) fn from_spec(spec: &AlgebraSpec) -> Self {
        let (n, m) = (spec.n(), spec.m());
        let zero_vec = || vec![Rational::from_integer(0.into()); 2 * m];
        let mut table: BTreeMap<(usize, usize), Vec<Rational>> = BTreeMap::new();
        let mut put = |i: usize, j: usize, coords: Vec<Rational>| {
            if coords.iter().any(|c| !num_traits::Zero::is_zero(c)) {
                table.insert((i, j), coords);
            }
        };
        for k in 1..=n {
            for j in 1..=n {
                let mut xx = zero_vec();
                let mut xy = zero_vec();
                for alpha in n + 1..=n + m {
                    let e = spec.e(alpha, k, j);
                    let f = spec.f(alpha, k, j);
                    let sum = &e + &f;
                    let diff = &e - &f;
                    let t = alpha - n - 1;
                    xx[t] = sum.re.clone(); // Re(E+F)
                    xx[m + t] = diff.im.clone(); // Im(E-F)
                    xy[t] = -sum.im.clone(); // -Im(E+F)
                    xy[m + t] = diff.re.clone(); // Re(E-F)
                }
                if k < j {
                    // [X_k, X_j] and [Y_k, Y_j] (equal, by the abelian
                    // condition, which is structural here)
                    put(k - 1, j - 1, xx.clone());
                    put(n + k - 1, n + j - 1, xx);
                }
                // [X_k, Y_j]; flat X index always precedes flat Y index
                put(k - 1, n + j - 1, xy);
            }
        }
        RealBrackets { n, m, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn zero_central(&self) -> Vec<Rational> {
        vec![Rational::from_integer(0.into()); 2 * self.m]
    }

    /// `[a, b]` as coordinates over `{Z, Z'}`.
    pub fn bracket(&self, a: RealBasisIndex, b: RealBasisIndex) -> Vec<Rational> {
        if a.is_central() || b.is_central() {
            return self.zero_central();
        }
        let (i, j) = (a.flat(self.n, self.m), b.flat(self.n, self.m));
        if i == j {
            return self.zero_central();
        }
        let (key, negate) = if i < j {
            ((i, j), false)
        } else {
            ((j, i), true)
        };
        match self.table.get(&key) {
            None => self.zero_central(),
            Some(v) if negate => v.iter().map(|c| -c).collect(),
            Some(v) => v.clone(),
        }
    }

    /// Checks `[J a, J b] = [a, b]` over every basis pair.
    pub fn abelian_condition_holds(&self) -> bool {
        let basis = RealBasisIndex::all(self.n, self.m);
        for &a in &basis {
            for &b in &basis {
                let (sa, ja) = a.j();
                let (sb, jb) = b.j();
                let mut lhs = self.bracket(ja, jb);
                if sa * sb < 0 {
                    for c in &mut lhs {
                        *c = -c.clone();
                    }
                }
                if lhs != self.bracket(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// Brute-force Jacobi identity over all basis triples. Brackets land in
    /// the center, so `[[a,b],c]` expands through the central coordinates.
    pub fn jacobi_holds(&self) -> bool {
        let basis = RealBasisIndex::all(self.n, self.m);
        let central: Vec<RealBasisIndex> =
            basis.iter().copied().filter(|b| b.is_central()).collect();
        let nested = |a: RealBasisIndex, b: RealBasisIndex, c: RealBasisIndex| {
            // [[a, b], c] via the central expansion of [a, b]
            let ab = self.bracket(a, b);
            let mut acc = self.zero_central();
            for (coef, &z) in ab.iter().zip(&central) {
                let zc = self.bracket(z, c);
                for (dst, src) in acc.iter_mut().zip(&zc) {
                    *dst = &*dst + &(coef * src);
                }
            }
            acc
        };
        for &a in &basis {
            for &b in &basis {
                for &c in &basis {
                    let mut total = self.zero_central();
                    for term in [nested(a, b, c), nested(b, c, a), nested(c, a, b)] {
                        for (dst, src) in total.iter_mut().zip(&term) {
                            *dst = &*dst + src;
                        }
                    }
                    if total.iter().any(|c| !num_traits::Zero::is_zero(c)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Real dimension of the center: the kernel of `v -> ([v, b])_b` over
    /// all basis vectors `b`.
    pub fn center_dim(&self) -> usize {
        let basis = RealBasisIndex::all(self.n, self.m);
        let dim = basis.len();
        let rows = dim * 2 * self.m;
        let mat = ExactMatrix::from_fn(rows, dim, |r, c| {
            let b = basis[r / (2 * self.m)];
            let coord = r % (2 * self.m);
            let v = basis[c];
            GaussianRational::from_rational(self.bracket(v, b)[coord].clone())
        });
        dim - mat.rank()
    }

    /// Reconstructs the complex structure constants. Inverse of
    /// [`AlgebraSpec::real_brackets`] up to the (unrecoverable) name.
    pub fn recover_spec(&self) -> Result<AlgebraSpec> {
        let (n, m) = (self.n, self.m);
        let half = Rational::new(1.into(), 2.into());
        let mut entries = Vec::new();
        for k in 1..=n {
            for j in 1..=n {
                let xx = self.bracket(RealBasisIndex::X(k), RealBasisIndex::X(j));
                let xy = self.bracket(RealBasisIndex::X(k), RealBasisIndex::Y(j));
                for alpha in n + 1..=n + m {
                    let t = alpha - n - 1;
                    let (c, d) = (&xx[t], &xx[m + t]);
                    let (e, f) = (&xy[t], &xy[m + t]);
                    let value = GaussianRational::new(&(c + f) * &half, &(d - e) * &half);
                    entries.push(((alpha, k, j), value));
                }
            }
        }
        AlgebraSpec::new(None, n, m, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(num: i64, den: i64) -> Rational {
        Rational::new(num.into(), den.into())
    }

    #[test]
    fn hxh_real_constants() {
        let spec = AlgebraSpec::builtin("hxh", &[]).unwrap();
        let rb = spec.real_brackets();
        // First Heisenberg block: [X1, Y1] = Z3
        assert_eq!(
            rb.bracket(RealBasisIndex::X(1), RealBasisIndex::Y(1)),
            vec![rat(1, 1), rat(0, 1)]
        );
        // Second block lands in the J-rotated central direction: [X2, Y2] = Z'3
        assert_eq!(
            rb.bracket(RealBasisIndex::X(2), RealBasisIndex::Y(2)),
            vec![rat(0, 1), rat(1, 1)]
        );
        // No cross-block brackets
        assert!(rb
            .bracket(RealBasisIndex::X(1), RealBasisIndex::X(2))
            .iter()
            .all(num_traits::Zero::is_zero));
    }

    #[test]
    fn kodaira_real_constants() {
        let spec = AlgebraSpec::builtin("kodaira", &[]).unwrap();
        let rb = spec.real_brackets();
        assert_eq!(
            rb.bracket(RealBasisIndex::X(1), RealBasisIndex::Y(1)),
            vec![rat(1, 1), rat(0, 1)]
        );
        assert_eq!(
            rb.bracket(RealBasisIndex::Y(1), RealBasisIndex::X(1)),
            vec![rat(-1, 1), rat(0, 1)]
        );
    }

    #[test]
    fn torus_is_flat() {
        let spec = AlgebraSpec::builtin("torus", &[]).unwrap();
        let rb = spec.real_brackets();
        for a in RealBasisIndex::all(2, 1) {
            for b in RealBasisIndex::all(2, 1) {
                assert!(rb.bracket(a, b).iter().all(num_traits::Zero::is_zero));
            }
        }
    }

    #[test]
    fn structural_identities_on_builtins() {
        for name in AlgebraSpec::BUILTIN_NAMES {
            let spec = AlgebraSpec::builtin(name, &[]).unwrap();
            let rb = spec.real_brackets();
            assert!(rb.abelian_condition_holds(), "{name}: [JA,JB] != [A,B]");
            assert!(rb.jacobi_holds(), "{name}: Jacobi fails");
            let recovered = rb.recover_spec().unwrap();
            assert_eq!(
                recovered.e_entries().collect::<Vec<_>>(),
                spec.e_entries().collect::<Vec<_>>(),
                "{name}: real-bracket round trip"
            );
        }
    }

    #[test]
    fn w6_center() {
        let spec = AlgebraSpec::builtin("w6", &[]).unwrap();
        assert_eq!(spec.real_brackets().center_dim(), 2);
    }
}
