//! Bilinear 2-cocycle data on the dual lattice.
//!
//! The double cover of the lattice is described by a bilinear map
//! `eps0 : L* x L* -> Z/q` (values written as exponents of a fixed
//! primitive `q`-th root of unity `omega`), subject to two laws:
//!
//! * diagonal law: `eps0(x, x) = (q/4) (x, x)  (mod q)`,
//! * commutator law: `eps0(x, y) - eps0(y, x) = (q/2) (x, y)  (mod q)`
//!   for `x, y` in the lattice itself.
//!
//! Here `q` is the smallest positive even integer with `(q/2) (x, y)`
//! and `(q/4) (x, x)` integral on the dual basis. The map is stored as a
//! matrix over `Z/q` in dual-basis coordinates, so
//! `eps0(x, y) = m^T E n (mod q)` with `m = G x`, `n = G y`.
//!
//! A triangular table built directly on the dual basis satisfies the
//! diagonal law and the exact symmetrization identity
//! `E + E^T = (q/2) B` (with `B` the inverse Gram matrix), but the
//! commutator law can fail for it. When it does, the same triangular
//! construction is carried out in a basis adapted to the Smith normal
//! form of the Gram matrix and pulled back; in that basis lattice
//! vectors have coordinates that are multiples of the elementary
//! divisors, which restores the commutator law (the lattice being even
//! supplies the diagonal parity). Both constructions are checked at
//! build time.

use crate::error::{FusionError, Result};
use crate::lattice::Lattice;
use crate::matrix::{rat_int, IMat, Int, QMat, Rat};
use num::{Integer, One, ToPrimitive, Zero};

/// A root of unity `zeta^e`, where `zeta = exp(pi i / q)` is a fixed
/// primitive `2q`-th root of unity. Exponents are kept modulo `2q`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RootOfUnity {
    exponent: i64,
    two_q: i64,
}

impl RootOfUnity {
    pub fn new(exponent: i64, two_q: i64) -> RootOfUnity {
        assert!(two_q > 0 && two_q % 2 == 0, "modulus must be a positive even integer");
        RootOfUnity {
            exponent: exponent.rem_euclid(two_q),
            two_q,
        }
    }

    /// The unit, `zeta^0`.
    pub fn one(two_q: i64) -> RootOfUnity {
        RootOfUnity::new(0, two_q)
    }

    /// The primitive `q`-th root `omega = zeta^2`.
    pub fn omega(two_q: i64) -> RootOfUnity {
        RootOfUnity::new(2, two_q)
    }

    /// `omega^k`.
    pub fn omega_pow(k: i64, two_q: i64) -> RootOfUnity {
        RootOfUnity::new(2 * (k.rem_euclid(two_q)), two_q)
    }

    /// `-1 = zeta^q`.
    pub fn minus_one(two_q: i64) -> RootOfUnity {
        RootOfUnity::new(two_q / 2, two_q)
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn modulus(&self) -> i64 {
        self.two_q
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        assert_eq!(self.two_q, other.two_q, "mixed moduli");
        RootOfUnity::new(self.exponent + other.exponent, self.two_q)
    }

    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity::new(-self.exponent, self.two_q)
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        let e = (self.exponent % self.two_q) as i128 * (k.rem_euclid(self.two_q)) as i128;
        RootOfUnity::new((e % self.two_q as i128) as i64, self.two_q)
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    /// Interprets the value as `+1` or `-1`, failing otherwise.
    pub fn as_sign(&self) -> Result<i32> {
        if self.exponent == 0 {
            Ok(1)
        } else if self.exponent == self.two_q / 2 {
            Ok(-1)
        } else {
            Err(FusionError::NotPlusMinusOne {
                exponent: self.exponent,
                two_q: self.two_q,
            })
        }
    }
}

impl std::fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exponent == 0 {
            write!(f, "1")
        } else if self.exponent == self.two_q / 2 {
            write!(f, "-1")
        } else {
            write!(f, "zeta_{}^{}", self.two_q, self.exponent)
        }
    }
}

/// The cocycle table for a fixed lattice.
#[derive(Clone)]
pub struct CocycleContext {
    q: i64,
    eps0: Vec<Vec<i64>>,
    gram: IMat,
    adapted: bool,
}

/// Smallest positive even `q` with `(q/2) B_ij` and `(q/4) B_ii`
/// integral, where `B` is the inverse Gram matrix.
pub fn minimal_modulus(gram_inv: &QMat) -> Int {
    let n = gram_inv.rows();
    let mut l = Int::one();
    let half = Rat::new(Int::one(), Int::from(2));
    let quarter = Rat::new(Int::one(), Int::from(4));
    for i in 0..n {
        for j in 0..n {
            let d = (gram_inv.at(i, j) * &half).denom().clone();
            l = l.lcm(&d);
        }
        let d = (gram_inv.at(i, i) * &quarter).denom().clone();
        l = l.lcm(&d);
    }
    if (&l % 2u8).is_zero() {
        l
    } else {
        l * 2
    }
}

/// Triangular table on the basis with pairing matrix `b`: `(q/2) b_ij`
/// below the diagonal, `(q/4) b_ii` on it, zero above. All entries are
/// integral by the choice of `q`.
fn triangular_table(b: &QMat, q: i64) -> Vec<Vec<i64>> {
    let n = b.rows();
    let qr = rat_int(q);
    let mut t = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let entry = if i > j {
                b.at(i, j) * &qr / rat_int(2)
            } else if i == j {
                b.at(i, i) * &qr / rat_int(4)
            } else {
                Rat::zero()
            };
            assert!(entry.is_integer(), "table entry must be integral");
            let e = entry.to_integer().mod_floor(&Int::from(q));
            t[i][j] = e.to_i64().expect("reduced entry fits machine word");
        }
    }
    t
}

/// Checks the commutator law on lattice basis pairs:
/// `G (E - E^T) G = (q/2) G  (mod q)` entrywise.
fn commutator_law_holds(gram: &IMat, eps0: &[Vec<i64>], q: i64) -> bool {
    let n = gram.rows();
    let qi = Int::from(q);
    let half_q = Int::from(q / 2);
    for k in 0..n {
        for l in 0..n {
            // dual coordinates of the basis vectors e_k, e_l
            let mut c = Int::zero();
            for i in 0..n {
                for j in 0..n {
                    let diff = Int::from(eps0[i][j]) - Int::from(eps0[j][i]);
                    c += gram.at(i, k) * diff * gram.at(j, l);
                }
            }
            let target = &half_q * gram.at(k, l);
            if !((c - target) % &qi).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Exact symmetrization identity `E + E^T = (q/2) B` over the rationals.
fn symmetrization_holds(b: &QMat, eps0: &[Vec<i64>], q: i64) -> bool {
    let n = b.rows();
    let qi = Int::from(q);
    for i in 0..n {
        for j in 0..n {
            let lhs = Int::from(eps0[i][j]) + Int::from(eps0[j][i]);
            let rhs = b.at(i, j) * rat_int(q) / rat_int(2);
            if !rhs.is_integer() {
                return false;
            }
            // Entries were reduced mod q, so compare modulo q; for i == j
            // the two table entries coincide, making the comparison exact
            // modulo 2q there as well -- which the diagonal law needs.
            let diff = lhs - rhs.to_integer();
            let modulus = if i == j { &qi * 2 } else { qi.clone() };
            if !(diff % modulus).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Builds the cocycle table for a lattice: the direct triangular table
/// when it satisfies the commutator law, otherwise the table built in a
/// Smith-adapted basis and pulled back.
pub fn build_context(lattice: &Lattice) -> CocycleContext {
    let b = lattice.gram_inv().clone();
    let q_big = minimal_modulus(&b);
    let q = q_big
        .to_i64()
        .expect("cocycle modulus exceeds machine word; lattice far beyond supported size");
    let naive = triangular_table(&b, q);
    let (eps0, adapted) = if commutator_law_holds(lattice.gram(), &naive, q) {
        (naive, false)
    } else {
        let sm = crate::matrix::smith(lattice.gram());
        let u_inv = sm.u.unimodular_inverse().to_qmat();
        // Pairing matrix in the adapted basis: (U^-1)^T B U^-1.
        let b_adapted = u_inv.transpose().mul(&b).mul(&u_inv);
        let x = triangular_table(&b_adapted, q);
        // Pull back: E = U^T X U.
        let n = b.rows();
        let qi = Int::from(q);
        let mut e = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Int::zero();
                for a in 0..n {
                    for c in 0..n {
                        acc += sm.u.at(a, i) * Int::from(x[a][c]) * sm.u.at(c, j);
                    }
                }
                e[i][j] = acc.mod_floor(&qi).to_i64().expect("fits");
            }
        }
        assert!(
            commutator_law_holds(lattice.gram(), &e, q),
            "adapted table must satisfy the commutator law"
        );
        (e, true)
    };
    debug_assert!(symmetrization_holds(&b, &eps0, q));
    CocycleContext {
        q,
        eps0,
        gram: lattice.gram().clone(),
        adapted,
    }
}

impl CocycleContext {
    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn two_q(&self) -> i64 {
        2 * self.q
    }

    /// Whether the table had to be built in a Smith-adapted basis.
    pub fn adapted(&self) -> bool {
        self.adapted
    }

    pub fn table(&self) -> &[Vec<i64>] {
        &self.eps0
    }

    pub fn rank(&self) -> usize {
        self.eps0.len()
    }

    /// `omega`, the primitive `q`-th root of unity.
    pub fn omega(&self) -> RootOfUnity {
        RootOfUnity::omega(self.two_q())
    }

    fn dual_coords(&self, x: &[Rat]) -> Result<Vec<Int>> {
        if x.len() != self.rank() {
            return Err(FusionError::DimensionMismatch {
                expected: self.rank(),
                got: x.len(),
            });
        }
        let gx = self.gram.mul_rat_vec(x);
        if !gx.iter().all(|c| c.is_integer()) {
            return Err(FusionError::NotInDual);
        }
        Ok(gx.iter().map(|c| c.to_integer()).collect())
    }

    /// Pairing `x^T G y` (no membership requirement).
    pub fn pairing(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let gy = self.gram.mul_rat_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    /// `eps0` on integral dual coordinates, reduced into `[0, q)`.
    pub fn epsilon0_coords(&self, m: &[Int], n: &[Int]) -> i64 {
        let mut acc = Int::zero();
        for (i, mi) in m.iter().enumerate() {
            if mi.is_zero() {
                continue;
            }
            for (j, nj) in n.iter().enumerate() {
                if nj.is_zero() || self.eps0[i][j] == 0 {
                    continue;
                }
                acc += mi * Int::from(self.eps0[i][j]) * nj;
            }
        }
        acc.mod_floor(&Int::from(self.q)).to_i64().expect("fits")
    }

    /// `eps0(x, y)` for dual vectors, as an exponent of `omega` in `[0, q)`.
    pub fn epsilon0(&self, x: &[Rat], y: &[Rat]) -> Result<i64> {
        let m = self.dual_coords(x)?;
        let n = self.dual_coords(y)?;
        Ok(self.epsilon0_coords(&m, &n))
    }

    /// Commutator exponent `c0(x, y) = eps0(x, y) - eps0(y, x)` mod `q`.
    pub fn c0(&self, x: &[Rat], y: &[Rat]) -> Result<i64> {
        let m = self.dual_coords(x)?;
        let n = self.dual_coords(y)?;
        Ok((self.epsilon0_coords(&m, &n) - self.epsilon0_coords(&n, &m)).rem_euclid(self.q))
    }

    /// The commutator pairing
    /// `pi(lambda, mu) = exp(pi i (lambda, mu)) * omega^{c0(mu, lambda)}`
    /// as a root of unity; defined for dual vectors.
    pub fn pi(&self, lambda: &[Rat], mu: &[Rat]) -> Result<RootOfUnity> {
        let m = self.dual_coords(lambda)?;
        let n = self.dual_coords(mu)?;
        let pair = self.pairing(lambda, mu) * rat_int(self.q);
        // q (x, y) is an even integer for dual vectors by the choice of q.
        assert!(pair.is_integer(), "q times a dual pairing is integral");
        let pair = pair.to_integer().mod_floor(&Int::from(self.two_q()));
        let c0 = (self.epsilon0_coords(&n, &m) - self.epsilon0_coords(&m, &n)).rem_euclid(self.q);
        Ok(RootOfUnity::new(
            pair.to_i64().expect("fits") + 2 * c0,
            self.two_q(),
        ))
    }

    /// `pi(lambda, mu)` asserted to be a sign.
    pub fn pi_sign(&self, lambda: &[Rat], mu: &[Rat]) -> Result<i32> {
        self.pi(lambda, mu)?.as_sign()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lattice_from_rows;
    use crate::matrix::rat;
    use crate::presets;

    fn ctx(rows: &[Vec<i64>]) -> CocycleContext {
        build_context(&lattice_from_rows(rows).unwrap())
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(build_context(&presets::a1()).q(), 8);
        assert_eq!(build_context(&presets::a2()).q(), 6);
        assert_eq!(build_context(&presets::e8()).q(), 2);
        assert_eq!(build_context(&presets::a1_plus_a1()).q(), 8);
        for k in 1..=5 {
            assert_eq!(build_context(&presets::a1_scaled(k).unwrap()).q(), 8 * k);
        }
    }

    #[test]
    fn a1_table_and_anchor_values() {
        let c = ctx(&[vec![2]]);
        assert_eq!(c.table(), &[vec![1]]);
        assert!(!c.adapted());
        let half = vec![rat(1, 2)];
        let alpha = vec![rat(1, 1)];
        assert_eq!(c.epsilon0(&half, &half).unwrap(), 1);
        assert_eq!(c.epsilon0(&alpha, &alpha).unwrap(), 4);
        // The pairing of the half root against the root is -1.
        assert_eq!(c.pi_sign(&half, &alpha).unwrap(), -1);
        // And against zero everything is +1.
        assert_eq!(c.pi_sign(&vec![rat(0, 1)], &half).unwrap(), 1);
        assert!(c.epsilon0(&[rat(1, 3)], &half).is_err());
    }

    #[test]
    fn orthogonal_rank_two_sign_example() {
        let c = ctx(&[vec![2, 0], vec![0, 2]]);
        let lam = vec![rat(1, 2), rat(0, 1)];
        let mu = vec![rat(0, 1), rat(1, 1)];
        assert_eq!(c.pi_sign(&lam, &mu).unwrap(), 1);
    }

    fn check_laws(c: &CocycleContext, rows: &[Vec<i64>]) {
        let l = lattice_from_rows(rows).unwrap();
        let n = l.rank();
        // Radius-2 coordinate ball of lattice vectors.
        let mut vecs: Vec<Vec<Rat>> = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for v in &vecs {
                for c0 in -2i64..=2 {
                    let mut w = v.clone();
                    w.push(rat(c0, 1));
                    next.push(w);
                }
            }
            vecs = next;
        }
        for x in &vecs {
            for y in &vecs {
                let c0 = c.c0(x, y).unwrap();
                let target = l.pairing(x, y).unwrap() * rat_int(c.q()) / rat_int(2);
                assert!(target.is_integer());
                let target = target.to_integer().mod_floor(&Int::from(c.q()));
                assert_eq!(Int::from(c0), target, "commutator law at {x:?}, {y:?}");
            }
            let diag = c.epsilon0(x, x).unwrap();
            let target = l.norm(x).unwrap() * rat_int(c.q()) / rat_int(4);
            assert!(target.is_integer());
            assert_eq!(
                Int::from(diag),
                target.to_integer().mod_floor(&Int::from(c.q())),
                "diagonal law at {x:?}"
            );
        }
    }

    #[test]
    fn laws_hold_on_corpus() {
        for (_, l) in presets::corpus() {
            if l.rank() > 2 {
                continue; // rank 8 ball is large; exercised in integration tests
            }
            let rows: Vec<Vec<i64>> = (0..l.rank())
                .map(|i| {
                    (0..l.rank())
                        .map(|j| l.gram().at(i, j).to_i64().unwrap())
                        .collect()
                })
                .collect();
            check_laws(&build_context(&l), &rows);
        }
    }

    #[test]
    fn adapted_table_kicks_in_and_is_lawful() {
        // Search a small deterministic family for a gram whose direct
        // table violates the commutator law, then check the repair.
        let mut found_adapted = false;
        for a in 0..3i64 {
            for b in 0..3i64 {
                for c in 0..3i64 {
                    let rows = vec![
                        vec![4, a, b],
                        vec![a, 4, c],
                        vec![b, c, 6],
                    ];
                    let Ok(l) = lattice_from_rows(&rows) else { continue };
                    let ctx = build_context(&l);
                    if ctx.adapted() && !found_adapted {
                        found_adapted = true;
                        check_laws(&ctx, &rows);
                    }
                }
            }
        }
        assert!(found_adapted, "family should contain at least one repaired table");
    }

    #[test]
    fn pi_is_multiplicative_in_lattice_translates() {
        let c = ctx(&[vec![2, -1], vec![-1, 2]]);
        let lam = vec![rat(1, 3), rat(2, 3)];
        let mu = vec![rat(2, 3), rat(1, 3)];
        let alpha = vec![rat(1, 1), rat(0, 1)];
        let shifted: Vec<Rat> = mu.iter().zip(&alpha).map(|(a, b)| a + b).collect();
        let p1 = c.pi(&lam, &mu).unwrap();
        let p2 = c.pi(&lam, &shifted).unwrap();
        let p3 = c.pi(&lam, &alpha).unwrap();
        assert_eq!(p2, p1.mul(&p3));
    }
}
