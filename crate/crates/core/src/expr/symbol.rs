use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use once_cell::sync::Lazy;

/// Auxiliary functions of x used by the reduced determining system:
/// ∂_κ H_λ = f_λκ + δ_λκ G and Φ_aκ = f_κα A_aα + h_an A_nκ + F_aκ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AuxFn {
    /// f_{λκ} stored with λ < κ.
    F(u8, u8),
    G,
    /// h_{an}
    H(u8, u8),
    /// F_{aκ}
    Inhom(u8, u8),
}

/// A variable of the polynomial ring.
///
/// Index conventions follow the tuple order documented on each variant.
/// The derived order (variant, then indices) is the canonical monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// x_ν
    Coord(u8),
    /// A_{aσ} as (a, σ)
    Field(u8, u8),
    /// u_{aσλ} = ∂_λ A_{aσ} as (a, σ, λ)
    Jet(u8, u8, u8),
    /// S_{n{λα}} = u_{nαλ} + u_{nλα} as (n, λ, α), λ ≤ α
    JetSym(u8, u8, u8),
    /// T_{n[pq]} = ∂_p A_{nq} − ∂_q A_{np} as (n, p, q)
    JetAnti(u8, u8, u8),
    /// H_κ
    H(u8),
    /// Φ_{aκ} as (a, κ)
    Phi(u8, u8),
    /// ∂_λ H_κ as (κ, λ)
    DH(u8, u8),
    /// ∂_λ Φ_{aκ} as (a, κ, λ)
    DPhi(u8, u8, u8),
    /// ∂H_β/∂A_{nα} as (β, n, α)
    DHdA(u8, u8, u8),
    /// ∂Φ_{aκ}/∂A_{nα} as (a, κ, n, α)
    DPhidA(u8, u8, u8, u8),
    /// An auxiliary function, or its x-partial ∂_λ when the second field is set.
    Aux(AuxFn, Option<u8>),
    /// Named free constant, see [`Symbol::param`].
    Param(u32),
}

/// Names by id, and ids by name.
type ParamTable = (Vec<String>, HashMap<String, u32>);

static PARAMS: Lazy<RwLock<ParamTable>> = Lazy::new(|| RwLock::new((Vec::new(), HashMap::new())));

impl Symbol {
    /// Interns a named parameter. Ids are assigned in first-use order.
    pub fn param(name: &str) -> Symbol {
        if let Some(&id) = PARAMS.read().unwrap().1.get(name) {
            return Symbol::Param(id);
        }
        let mut guard = PARAMS.write().unwrap();
        let (names, ids) = &mut *guard;
        if let Some(&id) = ids.get(name) {
            return Symbol::Param(id);
        }
        let id = names.len() as u32;
        names.push(name.to_string());
        ids.insert(name.to_string(), id);
        Symbol::Param(id)
    }

    pub fn param_name(id: u32) -> String {
        PARAMS.read().unwrap().0[id as usize].clone()
    }

    pub fn coord(nu: usize) -> Symbol {
        Symbol::Coord(nu as u8)
    }

    pub fn field(a: usize, sigma: usize) -> Symbol {
        Symbol::Field(a as u8, sigma as u8)
    }

    /// u_{aσλ} = ∂_λ A_{aσ}
    pub fn jet(a: usize, sigma: usize, lambda: usize) -> Symbol {
        Symbol::Jet(a as u8, sigma as u8, lambda as u8)
    }

    pub fn is_jet_variable(self) -> bool {
        matches!(self, Symbol::Jet(..) | Symbol::JetSym(..) | Symbol::JetAnti(..))
    }

    pub fn is_jet_basis(self) -> bool {
        matches!(self, Symbol::JetSym(..) | Symbol::JetAnti(..))
    }

    /// The symbols standing for H, Φ and their partials.
    pub fn is_unknown(self) -> bool {
        matches!(
            self,
            Symbol::H(_) | Symbol::Phi(..) | Symbol::DH(..) | Symbol::DPhi(..) | Symbol::DHdA(..) | Symbol::DPhidA(..)
        )
    }

    pub fn is_aux(self) -> bool {
        matches!(self, Symbol::Aux(..))
    }

    pub fn is_field(self) -> bool {
        matches!(self, Symbol::Field(..))
    }

    pub fn is_coord(self) -> bool {
        matches!(self, Symbol::Coord(_))
    }

    pub fn is_param(self) -> bool {
        matches!(self, Symbol::Param(_))
    }
}

impl fmt::Display for AuxFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuxFn::F(l, k) => write!(f, "f[{l}{k}]"),
            AuxFn::G => write!(f, "G"),
            AuxFn::H(a, n) => write!(f, "h[{a},{n}]"),
            AuxFn::Inhom(a, k) => write!(f, "F[{a},{k}]"),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Symbol::Coord(n) => write!(f, "x{n}"),
            Symbol::Field(a, s) => write!(f, "A[{a},{s}]"),
            Symbol::Jet(a, s, l) => write!(f, "u[{a},{s},{l}]"),
            Symbol::JetSym(n, l, a) => write!(f, "S[{n},{l}{a}]"),
            Symbol::JetAnti(n, p, q) => write!(f, "T[{n},{p}{q}]"),
            Symbol::H(k) => write!(f, "H[{k}]"),
            Symbol::Phi(a, k) => write!(f, "Phi[{a},{k}]"),
            Symbol::DH(k, l) => write!(f, "dH[{k};{l}]"),
            Symbol::DPhi(a, k, l) => write!(f, "dPhi[{a},{k};{l}]"),
            Symbol::DHdA(b, n, a) => write!(f, "dHdA[{b};{n},{a}]"),
            Symbol::DPhidA(a, k, n, al) => write!(f, "dPhidA[{a},{k};{n},{al}]"),
            Symbol::Aux(func, None) => write!(f, "{func}"),
            Symbol::Aux(func, Some(l)) => write!(f, "d{l}{func}"),
            Symbol::Param(id) => write!(f, "{}", Symbol::param_name(id)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_intern_once() {
        let a = Symbol::param("alpha_test");
        let b = Symbol::param("alpha_test");
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "alpha_test");
    }

    #[test]
    fn order_is_by_kind_then_index() {
        assert!(Symbol::coord(3) < Symbol::field(0, 0));
        assert!(Symbol::field(0, 3) < Symbol::field(1, 0));
        assert!(Symbol::jet(2, 3, 3) < Symbol::JetSym(0, 0, 0));
    }
}
