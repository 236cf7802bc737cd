//! Spacetime indices and the constant tensors δ, ε and Z.

use std::fmt;

use crate::error::{Error, Result};

/// Euclidean spacetime index, 0..=3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpacetimeIndex(u8);

impl SpacetimeIndex {
    pub fn new(value: usize) -> Result<Self> {
        if value < 4 {
            Ok(SpacetimeIndex(value as u8))
        } else {
            Err(Error::IndexOutOfRange {
                kind: "spacetime",
                value,
                bound: 4,
            })
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = SpacetimeIndex> {
        (0..4u8).map(SpacetimeIndex)
    }
}

impl fmt::Display for SpacetimeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn kronecker(mu: usize, rho: usize) -> i32 {
    i32::from(mu == rho)
}

/// Sign of the permutation (μνρσ) of (0123), zero on repeated indices.
pub fn levi_civita(mu: usize, nu: usize, rho: usize, sigma: usize) -> i32 {
    let p = [mu, nu, rho, sigma];
    let mut sign = 1;
    for i in 0..4 {
        if p[i] > 3 {
            return 0;
        }
        for j in (i + 1)..4 {
            if p[i] == p[j] {
                return 0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Z_{μλνκ} = δ_μλ δ_νκ − δ_μκ δ_νλ − ε_μνλκ.
pub fn z_component(mu: usize, lambda: usize, nu: usize, kappa: usize) -> i32 {
    kronecker(mu, lambda) * kronecker(nu, kappa)
        - kronecker(mu, kappa) * kronecker(nu, lambda)
        - levi_civita(mu, nu, lambda, kappa)
}

/// Typed wrappers over [`SpacetimeIndex`].
pub fn z(mu: SpacetimeIndex, lambda: SpacetimeIndex, nu: SpacetimeIndex, kappa: SpacetimeIndex) -> i32 {
    z_component(mu.get(), lambda.get(), nu.get(), kappa.get())
}

/// Sparse list of the nonzero Z_{μλνκ} for fixed (μ, ν), as (λ, κ, value).
pub fn z_support(mu: usize, nu: usize) -> Vec<(usize, usize, i32)> {
    let mut out = Vec::new();
    for lambda in 0..4 {
        for kappa in 0..4 {
            let v = z_component(mu, lambda, nu, kappa);
            if v != 0 {
                out.push((lambda, kappa, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuples() -> impl Iterator<Item = [usize; 4]> {
        (0..256).map(|i| [i & 3, (i >> 2) & 3, (i >> 4) & 3, (i >> 6) & 3])
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(0, 0), 1);
        assert_eq!(kronecker(0, 1), 0);
        assert_eq!(kronecker(3, 3), 1);
    }

    #[test]
    fn levi_civita_examples() {
        assert_eq!(levi_civita(0, 1, 2, 3), 1);
        assert_eq!(levi_civita(1, 0, 2, 3), -1);
        assert_eq!(levi_civita(0, 0, 2, 3), 0);
        assert_eq!(levi_civita(3, 2, 1, 0), 1);
    }

    #[test]
    fn z_examples() {
        assert_eq!(z_component(0, 0, 1, 1), 1);
        assert_eq!(z_component(0, 2, 1, 3), -1);
        assert_eq!(z_component(0, 1, 1, 0), -1);
    }

    #[test]
    fn levi_civita_antisymmetric_and_vanishing() {
        for [a, b, c, d] in tuples() {
            let e = levi_civita(a, b, c, d);
            assert_eq!(e, -levi_civita(b, a, c, d));
            assert_eq!(e, -levi_civita(a, c, b, d));
            assert_eq!(e, -levi_civita(a, b, d, c));
            let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
            assert_eq!(e != 0, distinct);
        }
    }

    #[test]
    fn z_antisymmetries() {
        for [mu, lambda, nu, kappa] in tuples() {
            let v = z_component(mu, lambda, nu, kappa);
            assert_eq!(v, -z_component(mu, kappa, nu, lambda));
            assert_eq!(v, -z_component(nu, lambda, mu, kappa));
        }
    }

    #[test]
    fn z_is_anti_self_dual() {
        // (1/2) Σ ε_μναβ Z_{αλβκ} = −Z_{μλνκ}, checked as Σ ε Z = −2 Z
        for [mu, lambda, nu, kappa] in tuples() {
            let mut dual = 0;
            for alpha in 0..4 {
                for beta in 0..4 {
                    dual += levi_civita(mu, nu, alpha, beta) * z_component(alpha, lambda, beta, kappa);
                }
            }
            assert_eq!(dual, -2 * z_component(mu, lambda, nu, kappa), "{mu}{lambda}{nu}{kappa}");
        }
    }

    #[test]
    fn index_range_checked() {
        assert!(SpacetimeIndex::new(3).is_ok());
        assert!(matches!(SpacetimeIndex::new(4), Err(Error::IndexOutOfRange { .. })));
        assert_eq!(SpacetimeIndex::all().count(), 4);
    }
}
