//! Sign and normalisation conventions shared by every module.
//!
//! Reports embed [`convention_hash`] so that numbers produced under different
//! conventions are never compared by accident.

use sha2::{Digest, Sha256};

/// Version tag of the convention ledger.
pub const CONVENTION_VERSION: &str = "1";

/// Human-readable convention ledger; hashed verbatim.
pub const CONVENTIONS: &str = "\
metric: signature (-,+,+,+); p.q = -p0 q0 + k.k'
theta: mixed tensor theta^mu_nu, eta*theta antisymmetric; p.theta q = dot(p, theta q); the Moyal factor 1/2 is absorbed into theta, none appears explicitly
on-shell: p = sign * (eps(k), k), eps(k) = sqrt(m^2 + k^2)
fourier: f~(p) = (2 pi)^-2 int d^4x f(x) exp(-i p.x); phi(f) = int d^4p phi~(p) f~(-p)
translations: U(x) = exp(i x.P); U(x) phi~(p) U(-x) = exp(i p.x) phi~(p)
fields: phi~(p) creates for p0 > 0 and annihilates for p0 < 0
deformed field: phi~_theta(p) = phi~(p) U(-theta p)
commutator: [phi~(p), phi~(p')] = c(p) delta(p + p'), c(p) = -sgn(p0)
two-point kernel: omega(phi~(q) phi~(-q)) = c(q) / (1 - exp(beta q0))
general kernel: omega(phi~(q_1)..phi~(q_2n) U(y)) = sigma^(y) sum_contractions prod_k c(q_l) / (1 - exp(beta q_l0 - i q_l.y))
dynamics: tau_t(F) = exp(itH) F exp(-itH) = Ad U(-t e0); tau_t(phi~(q)) = exp(i t q0) phi~(q)
sigma^: sigma^(x) = int exp(i q.x) d sigma(q) for x != 0, sigma^(0) = 1
mass-shell measure: weight Delta^3k / (2 eps) per mode; each contracted pair carries one weight
discrete field: phi(f) = sum_i sqrt(w_i) [ f~(-p_i) a_i^+ + f~(p_i) a_i ], p_i on the positive shell
";

/// Hex SHA-256 digest of [`CONVENTIONS`].
pub fn convention_hash() -> String {
    hex::encode(Sha256::digest(CONVENTIONS.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_hex() {
        let h = convention_hash();
        assert_eq!(h.len(), 64);
        assert_eq!(h, convention_hash());
    }
}
