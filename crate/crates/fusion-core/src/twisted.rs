//! Central characters acting on the twisted modules.
//!
//! The involution-twisted modules of the lattice vertex algebra are
//! parametrized by characters of a finite central quotient. The relevant
//! data is the radical `R = { x in L : (x, y) in 2Z for all y in L }`,
//! which contains `2L` with `R / 2L` an elementary abelian 2-group. A
//! central character assigns to each generator `g` of `R / 2L` a root of
//! unity `chi(e_g)` with `chi(e_g)^2 = omega^{eps0(g, g)}`, two choices
//! per generator; the `2^k` resulting characters are indexed by the bit
//! pattern of those choices (first generator most significant).

use crate::cocycle::{CocycleContext, RootOfUnity};
use crate::error::{FusionError, Result};
use crate::lattice::Lattice;
use crate::matrix::{int, kernel_mod2, smith, IMat, Int, QMat, Quotient, Rat};
use num::{Integer, Signed, ToPrimitive, Zero};

/// The radical `R` of the mod-2 reduced form, as a sublattice of `L`
/// containing `2L`, together with the quotient `R / 2L`.
pub struct RadicalLattice {
    /// Basis of `R` in lattice coordinates (columns).
    pub basis: IMat,
    /// Index `[L : R]`.
    pub index_in_l: Int,
    /// Generators of `R / 2L` in lattice coordinates; all have order 2.
    pub generators: Vec<Vec<Int>>,
    quotient: Quotient,
}

/// Computes the radical from the Gram matrix: its generators are lifts
/// of a kernel basis of `G` mod 2 together with the doubled coordinate
/// vectors, assembled into a basis via the Smith normal form.
pub fn compute_radical(lattice: &Lattice) -> RadicalLattice {
    let d = lattice.rank();
    let kernel = kernel_mod2(lattice.gram());
    let k = kernel.len();
    // Columns: kernel lifts, then 2 e_j.
    let mut gen_mat = IMat::zero(d, k + d);
    for (j, v) in kernel.iter().enumerate() {
        for i in 0..d {
            *gen_mat.at_mut(i, j) = v[i].clone();
        }
    }
    for j in 0..d {
        *gen_mat.at_mut(j, k + j) = int(2);
    }
    let sm = smith(&gen_mat);
    let u_inv = sm.u.unimodular_inverse();
    // Column span of the generators equals the span of s_j * (U^-1 e_j).
    let mut basis = IMat::zero(d, d);
    for j in 0..d {
        let s = sm.s.at(j, j).clone();
        assert!(!s.is_zero(), "radical contains 2L, hence has full rank");
        for i in 0..d {
            *basis.at_mut(i, j) = u_inv.at(i, j) * &s;
        }
    }
    let index_in_l = basis.det().abs();
    let mut two_id = QMat::zero(d, d);
    for j in 0..d {
        *two_id.at_mut(j, j) = crate::matrix::rat_int(2);
    }
    let quotient =
        Quotient::new(&basis.to_qmat(), &two_id).expect("2L inside R is always well formed");
    for div in quotient.divisors() {
        assert_eq!(div, int(2), "R / 2L is elementary abelian of exponent 2");
    }
    let generators: Vec<Vec<Int>> = quotient
        .generators()
        .into_iter()
        .map(|g| {
            g.iter()
                .map(|c| {
                    assert!(c.is_integer(), "radical generators are lattice vectors");
                    c.to_integer()
                })
                .collect()
        })
        .collect();
    RadicalLattice {
        basis,
        index_in_l,
        generators,
        quotient,
    }
}

impl RadicalLattice {
    /// Number of generators of `R / 2L`.
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Coordinates of a lattice vector in `R / 2L` (one bit per
    /// generator), or `None` if the vector is not in the radical.
    pub fn coords_mod_2l(&self, x: &[Int]) -> Option<Vec<u8>> {
        let xr: Vec<Rat> = x.iter().map(|c| Rat::from_integer(c.clone())).collect();
        self.quotient.coords(&xr).map(|cs| {
            cs.iter()
                .map(|c| if c.is_zero() { 0u8 } else { 1u8 })
                .collect()
        })
    }
}

/// A central character, determined by its value exponents on the
/// generators of `R / 2L` (exponents of the primitive `2q`-th root).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralCharacter {
    /// Position in the enumeration order.
    pub index: usize,
    /// Value exponent on each generator, modulo `2q`.
    pub exponents: Vec<i64>,
}

/// The twisted-sector data of a lattice: the radical and the full list
/// of central characters.
pub struct TwistedSector {
    pub radical: RadicalLattice,
    chars: Vec<CentralCharacter>,
    /// `eps0(g_i, g_i)` per generator, reduced into `[0, q)`: the "bit 0"
    /// value exponent of each generator.
    base: Vec<i64>,
    /// `eps0(g_a, g_b)` for all generator pairs.
    eps_pairs: Vec<Vec<i64>>,
    two_q: i64,
}

impl TwistedSector {
    /// Enumerates all central characters for the lattice.
    pub fn new(lattice: &Lattice, ctx: &CocycleContext) -> TwistedSector {
        let radical = compute_radical(lattice);
        let k = radical.num_generators();
        let q = ctx.q();
        let gens_rat: Vec<Vec<Rat>> = radical
            .generators
            .iter()
            .map(|g| g.iter().map(|c| Rat::from_integer(c.clone())).collect())
            .collect();
        let base: Vec<i64> = gens_rat
            .iter()
            .map(|g| ctx.epsilon0(g, g).expect("generators lie in the lattice"))
            .collect();
        let eps_pairs: Vec<Vec<i64>> = gens_rat
            .iter()
            .map(|a| {
                gens_rat
                    .iter()
                    .map(|b| ctx.epsilon0(a, b).expect("generators lie in the lattice"))
                    .collect()
            })
            .collect();
        let mut chars = Vec::with_capacity(1 << k);
        for index in 0..(1usize << k) {
            let exponents: Vec<i64> = (0..k)
                .map(|i| {
                    // First generator occupies the most significant bit.
                    let bit = (index >> (k - 1 - i)) & 1;
                    (base[i] + q * bit as i64).rem_euclid(2 * q)
                })
                .collect();
            chars.push(CentralCharacter { index, exponents });
        }
        TwistedSector {
            radical,
            chars,
            base,
            eps_pairs,
            two_q: 2 * q,
        }
    }

    pub fn characters(&self) -> &[CentralCharacter] {
        &self.chars
    }

    pub fn num_characters(&self) -> usize {
        self.chars.len()
    }

    /// Dimension of the irreducible twisted projective representation,
    /// the square root of `[L : R]`.
    pub fn twisted_dim(&self) -> Int {
        let n = &self.radical.index_in_l;
        let s = n.sqrt();
        assert_eq!(&(&s * &s), n, "the index [L : R] is a perfect square");
        s
    }

    fn index_from_exponents(&self, exps: &[i64]) -> Result<usize> {
        let k = self.base.len();
        let q = self.two_q / 2;
        let mut index = 0usize;
        for i in 0..k {
            let e = exps[i].rem_euclid(self.two_q);
            let bit = if e == self.base[i].rem_euclid(self.two_q) {
                0usize
            } else if e == (self.base[i] + q).rem_euclid(self.two_q) {
                1usize
            } else {
                return Err(FusionError::NotClosed);
            };
            index |= bit << (k - 1 - i);
        }
        Ok(index)
    }

    /// Value of character `chi` on the central element attached to a
    /// radical vector `x` (lattice coordinates required to lie in `R`).
    pub fn eval_central(
        &self,
        ctx: &CocycleContext,
        chi: usize,
        x: &[Int],
    ) -> Result<RootOfUnity> {
        let bits = self.radical.coords_mod_2l(x).ok_or_else(|| {
            FusionError::PreconditionFailed("vector is not in the radical".into())
        })?;
        let support: Vec<usize> = (0..bits.len()).filter(|&i| bits[i] == 1).collect();
        let exps = &self.chars[chi].exponents;
        let mut e: i64 = support.iter().map(|&i| exps[i]).sum();
        for (a_pos, &a) in support.iter().enumerate() {
            for &b in &support[a_pos + 1..] {
                e -= 2 * self.eps_pairs[a][b];
            }
        }
        // x = s + (x - s) with s the sum of the supporting generators and
        // x - s in 2L, whose central element acts trivially.
        let mut s = vec![Int::zero(); x.len()];
        for &i in &support {
            for (sc, gc) in s.iter_mut().zip(&self.radical.generators[i]) {
                *sc += gc;
            }
        }
        let rest: Vec<Rat> = x
            .iter()
            .zip(&s)
            .map(|(xc, sc)| Rat::from_integer(xc - sc))
            .collect();
        let s_rat: Vec<Rat> = s.iter().map(|c| Rat::from_integer(c.clone())).collect();
        e -= 2 * ctx.epsilon0(&s_rat, &rest)?;
        Ok(RootOfUnity::new(e, self.two_q))
    }

    /// The character `chi^(lambda)`, with
    /// `chi^(lambda)(e_g) = (-1)^{(g, lambda)} chi(e_g)`; `lambda` must be
    /// a dual vector.
    pub fn twist(&self, ctx: &CocycleContext, chi: usize, lambda: &[Rat]) -> Result<usize> {
        let q = self.two_q / 2;
        let mut exps = self.chars[chi].exponents.clone();
        for (i, g) in self.radical.generators.iter().enumerate() {
            let g_rat: Vec<Rat> = g.iter().map(|c| Rat::from_integer(c.clone())).collect();
            let pair = ctx.pairing(&g_rat, lambda);
            if !pair.is_integer() {
                return Err(FusionError::NotInDual);
            }
            if pair.to_integer().is_odd() {
                exps[i] = (exps[i] + q).rem_euclid(self.two_q);
            }
        }
        self.index_from_exponents(&exps)
    }

    /// The character of the contragredient twisted module:
    /// `chi'(e_g) = (-1)^{(g, g)/2} chi(e_g)`.
    pub fn contragredient_char(&self, ctx: &CocycleContext, chi: usize) -> usize {
        let q = self.two_q / 2;
        let mut exps = self.chars[chi].exponents.clone();
        for (i, g) in self.radical.generators.iter().enumerate() {
            let g_rat: Vec<Rat> = g.iter().map(|c| Rat::from_integer(c.clone())).collect();
            let norm = ctx.pairing(&g_rat, &g_rat);
            let half: Int = norm.to_integer() / 2;
            if half.is_odd() {
                exps[i] = (exps[i] + q).rem_euclid(self.two_q);
            }
        }
        self.index_from_exponents(&exps)
            .expect("contragredient character stays in the enumerated set")
    }

    /// The sign `c_chi(lambda) = (-1)^{(lambda, 2 lambda)}
    /// omega^{eps0(lambda, 2 lambda)} chi(e_{2 lambda})`, defined for dual
    /// vectors with `2 lambda` in the lattice (then `2 lambda` lies in the
    /// radical automatically).
    pub fn c_chi(&self, ctx: &CocycleContext, chi: usize, lambda: &[Rat]) -> Result<i32> {
        let q = self.two_q / 2;
        let two_lambda: Vec<Rat> = lambda.iter().map(|c| c * crate::matrix::rat_int(2)).collect();
        if !two_lambda.iter().all(|c| c.is_integer()) {
            return Err(FusionError::PreconditionFailed(
                "twice the vector must lie in the lattice".into(),
            ));
        }
        let pair = ctx.pairing(lambda, &two_lambda);
        if !pair.is_integer() {
            return Err(FusionError::NotInDual);
        }
        let two_lambda_int: Vec<Int> = two_lambda.iter().map(|c| c.to_integer()).collect();
        let parity = pair
            .to_integer()
            .mod_floor(&int(2))
            .to_i64()
            .expect("parity is 0 or 1");
        let mut e = parity * q;
        e += 2 * ctx.epsilon0(lambda, &two_lambda)?;
        e += self.eval_central(ctx, chi, &two_lambda_int)?.exponent();
        RootOfUnity::new(e, self.two_q).as_sign()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::build_context;
    use crate::matrix::rat;
    use crate::presets;

    #[test]
    fn radical_shapes_on_corpus() {
        let a1 = presets::a1();
        let r = compute_radical(&a1);
        assert_eq!(r.index_in_l, int(1));
        assert_eq!(r.num_generators(), 1);

        let a2 = presets::a2();
        let r = compute_radical(&a2);
        assert_eq!(r.index_in_l, int(4));
        assert_eq!(r.num_generators(), 0);

        let e8 = presets::e8();
        let r = compute_radical(&e8);
        assert_eq!(r.index_in_l, int(256));
        assert_eq!(r.num_generators(), 0);

        let dd = presets::a1_plus_a1();
        let r = compute_radical(&dd);
        assert_eq!(r.index_in_l, int(1));
        assert_eq!(r.num_generators(), 2);
    }

    #[test]
    fn character_counts_and_dims() {
        for (name, l) in presets::corpus() {
            let ctx = build_context(&l);
            let tw = TwistedSector::new(&l, &ctx);
            let expected = match name {
                "A1" => 2,
                "A1(2)" => 2,
                "A2" => 1,
                "A1+A1" => 4,
                "E8" => 1,
                _ => unreachable!(),
            };
            assert_eq!(tw.num_characters(), expected, "characters for {name}");
            let dim = match name {
                "A1" => 1,
                "A1(2)" => 1,
                "A2" => 2,
                "A1+A1" => 1,
                "E8" => 16,
                _ => unreachable!(),
            };
            assert_eq!(tw.twisted_dim(), int(dim), "twisted dim for {name}");
        }
    }

    #[test]
    fn rank_one_character_values() {
        let l = presets::a1();
        let ctx = build_context(&l);
        let tw = TwistedSector::new(&l, &ctx);
        // chi_0(e_alpha) = zeta_16^4 = i and chi_1(e_alpha) = zeta_16^12 = -i.
        let alpha = vec![int(1)];
        assert_eq!(tw.eval_central(&ctx, 0, &alpha).unwrap().exponent(), 4);
        assert_eq!(tw.eval_central(&ctx, 1, &alpha).unwrap().exponent(), 12);
        // Values square to omega^{eps0(alpha, alpha)} = zeta^8 = -1.
        let v = tw.eval_central(&ctx, 0, &alpha).unwrap();
        assert_eq!(v.mul(&v).exponent(), 8);
    }

    #[test]
    fn rank_one_twist_contragredient_and_sign() {
        let l = presets::a1();
        let ctx = build_context(&l);
        let tw = TwistedSector::new(&l, &ctx);
        let half = vec![rat(1, 2)];
        assert_eq!(tw.twist(&ctx, 0, &half).unwrap(), 1);
        assert_eq!(tw.twist(&ctx, 1, &half).unwrap(), 0);
        // Twisting by a lattice vector does nothing: (alpha, alpha) = 2.
        assert_eq!(tw.twist(&ctx, 0, &[rat(1, 1)]).unwrap(), 0);
        assert_eq!(tw.contragredient_char(&ctx, 0), 1);
        assert_eq!(tw.contragredient_char(&ctx, 1), 0);
        assert_eq!(tw.c_chi(&ctx, 0, &half).unwrap(), 1);
        assert_eq!(tw.c_chi(&ctx, 1, &half).unwrap(), -1);
        // c_chi is invariant under lattice translation of lambda.
        assert_eq!(tw.c_chi(&ctx, 0, &[rat(3, 2)]).unwrap(), 1);
        assert_eq!(tw.c_chi(&ctx, 1, &[rat(-1, 2)]).unwrap(), -1);
        assert!(tw.c_chi(&ctx, 0, &[rat(1, 4)]).is_err());
    }

    #[test]
    fn twist_composes_additively() {
        let l = presets::a1_plus_a1();
        let ctx = build_context(&l);
        let tw = TwistedSector::new(&l, &ctx);
        let lam = vec![rat(1, 2), rat(0, 1)];
        let mu = vec![rat(0, 1), rat(1, 2)];
        let sum = vec![rat(1, 2), rat(1, 2)];
        for chi in 0..tw.num_characters() {
            let a = tw.twist(&ctx, chi, &lam).unwrap();
            let ab = tw.twist(&ctx, a, &mu).unwrap();
            let direct = tw.twist(&ctx, chi, &sum).unwrap();
            assert_eq!(ab, direct);
        }
    }

    #[test]
    fn eval_central_rejects_non_radical_vectors() {
        let l = presets::a2();
        let ctx = build_context(&l);
        let tw = TwistedSector::new(&l, &ctx);
        // (1, 0) is not in the radical of the rank-two root lattice.
        assert!(tw.eval_central(&ctx, 0, &[int(1), int(0)]).is_err());
        // (2, 0) is.
        assert!(tw.eval_central(&ctx, 0, &[int(2), int(0)]).is_ok());
    }
}
