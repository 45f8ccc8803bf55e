//! Randomized property tests over small even positive-definite lattices.
//!
//! Gram matrices are generated with a strictly dominant even diagonal, so
//! they are always symmetric, even, and positive definite.

use fusion_core::cocycle::{build_context, RootOfUnity};
use fusion_core::fock;
use fusion_core::lattice::{lattice_from_rows, Lattice};
use fusion_core::m1::{self, M1Module};
use fusion_core::matrix::{rat, rat_int};
use fusion_core::twisted::TwistedSector;
use fusion_core::vl::FusionContext;
use fusion_core::{Int, Rat};
use num::{Integer, ToPrimitive, Zero};
use proptest::prelude::*;

/// Strategy data for a random even positive-definite Gram matrix.
fn arb_gram() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=3).prop_flat_map(|rank| {
        let off = prop::collection::vec(-2i64..=2, rank * (rank - 1) / 2);
        let bumps = prop::collection::vec(0i64..=2, rank);
        (off, bumps).prop_map(move |(off, bumps)| {
            let mut g = vec![vec![0i64; rank]; rank];
            let mut it = off.into_iter();
            for i in 0..rank {
                for j in (i + 1)..rank {
                    let v = it.next().unwrap();
                    g[i][j] = v;
                    g[j][i] = v;
                }
            }
            for i in 0..rank {
                let s: i64 = (0..rank).filter(|&j| j != i).map(|j| g[i][j].abs()).sum();
                // Even and strictly larger than the off-diagonal row sum.
                g[i][i] = s + 2 + (s % 2) + 2 * bumps[i];
            }
            g
        })
    })
}

fn build(rows: &[Vec<i64>]) -> Lattice {
    lattice_from_rows(rows).expect("generated Gram matrices are valid")
}

/// Interprets `m` as integral dual coordinates and returns the lattice
/// coordinates of the corresponding dual vector.
fn dual_vector(l: &Lattice, m: &[i64]) -> Vec<Rat> {
    let m_rat: Vec<Rat> = m.iter().map(|&c| rat_int(c)).collect();
    l.gram_inv().mul_vec(&m_rat)
}

fn int_vector(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&c| rat_int(c)).collect()
}

fn add(x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// A Gram matrix together with integer coefficient vectors, all of the
/// same rank.
fn gram_with_vectors(n: usize) -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    arb_gram().prop_flat_map(move |g| {
        let rank = g.len();
        let vecs = prop::collection::vec(prop::collection::vec(-6i64..=6, rank), n);
        (Just(g), vecs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn coset_labels_are_translation_invariant((g, vs) in gram_with_vectors(2)) {
        let l = build(&g);
        let x = dual_vector(&l, &vs[0]);
        let shift: Vec<Rat> = vs[1].iter().map(|&c| rat_int(c.rem_euclid(7) - 3)).collect();
        let shifted = add(&x, &shift);
        let a = l.canonical_coset(&x).unwrap();
        let b = l.canonical_coset(&shifted).unwrap();
        prop_assert_eq!(&a, &b);
        // The unordered-pair label is idempotent and negation invariant.
        let neg: Vec<Rat> = x.iter().map(|c| -c).collect();
        let pm = a.pm_label();
        prop_assert_eq!(&pm.pm_label(), &pm);
        prop_assert_eq!(&l.canonical_coset(&neg).unwrap().pm_label(), &pm);
    }

    #[test]
    fn epsilon_is_symmetrized_by_the_pairing((g, vs) in gram_with_vectors(2)) {
        let l = build(&g);
        let c = build_context(&l);
        let q = c.q();
        let x = dual_vector(&l, &vs[0]);
        let y = dual_vector(&l, &vs[1]);

        let sym = (c.epsilon0(&x, &y).unwrap() + c.epsilon0(&y, &x).unwrap()).rem_euclid(q);
        let half = c.pairing(&x, &y) * rat(q, 2);
        prop_assert!(half.is_integer());
        prop_assert_eq!(sym, half.to_integer().to_i64().unwrap().rem_euclid(q));

        let diag = c.epsilon0(&x, &x).unwrap();
        let quarter = c.pairing(&x, &x) * rat(q, 4);
        prop_assert!(quarter.is_integer());
        prop_assert_eq!(diag, quarter.to_integer().to_i64().unwrap().rem_euclid(q));
    }

    #[test]
    fn commutator_pairing_is_multiplicative((g, vs) in gram_with_vectors(3)) {
        let l = build(&g);
        let c = build_context(&l);
        let q = c.q();
        let x = dual_vector(&l, &vs[0]);
        let y = dual_vector(&l, &vs[1]);
        let z = dual_vector(&l, &vs[2]);

        let bilinear = (c.c0(&x, &y).unwrap() + c.c0(&x, &z).unwrap()).rem_euclid(q);
        prop_assert_eq!(c.c0(&x, &add(&y, &z)).unwrap(), bilinear);

        let product = c.pi(&x, &y).unwrap().mul(&c.pi(&x, &z).unwrap());
        prop_assert_eq!(c.pi(&x, &add(&y, &z)).unwrap(), product);
        // Negating an argument inverts the pairing.
        let neg_y: Vec<Rat> = y.iter().map(|c| -c).collect();
        prop_assert_eq!(c.pi(&x, &neg_y).unwrap(), c.pi(&x, &y).unwrap().inv());
        // The braiding square: swapping the arguments costs exactly the
        // exponential of the pairing.
        let square = c.pi(&x, &y).unwrap().mul(&c.pi(&y, &x).unwrap());
        let pair = c.pairing(&x, &y) * rat_int(2 * q);
        prop_assert!(pair.is_integer());
        let expected = RootOfUnity::new(
            pair.to_integer().mod_floor(&Int::from(c.two_q())).to_i64().unwrap(),
            c.two_q(),
        );
        prop_assert_eq!(square, expected);
    }

    #[test]
    fn commutator_pairing_is_trivial_on_the_lattice((g, vs) in gram_with_vectors(2)) {
        let l = build(&g);
        let c = build_context(&l);
        let alpha = int_vector(&vs[0]);
        let beta = int_vector(&vs[1]);
        prop_assert_eq!(c.pi(&alpha, &beta).unwrap(), RootOfUnity::one(c.two_q()));
    }

    #[test]
    fn twists_compose_and_signs_translate((g, vs) in gram_with_vectors(2)) {
        let l = build(&g);
        let c = build_context(&l);
        let tw = TwistedSector::new(&l, &c);
        let lam = dual_vector(&l, &vs[0]);
        let mu = dual_vector(&l, &vs[1]);
        let alpha = int_vector(&vs[1]);

        for chi in 0..tw.num_characters() {
            let step = tw.twist(&c, chi, &mu).unwrap();
            let composed = tw.twist(&c, step, &lam).unwrap();
            prop_assert_eq!(composed, tw.twist(&c, chi, &add(&lam, &mu)).unwrap());
            prop_assert_eq!(tw.twist(&c, chi, &alpha).unwrap(), chi);
            prop_assert_eq!(tw.contragredient_char(&c, tw.contragredient_char(&c, chi)), chi);

            for t in l.two_torsion_cosets() {
                let rep = t.coords().to_vec();
                let sign = tw.c_chi(&c, chi, &rep).unwrap();
                prop_assert!(sign == 1 || sign == -1);
                let shifted = add(&rep, &alpha);
                prop_assert_eq!(tw.c_chi(&c, chi, &shifted).unwrap(), sign);
            }
        }
    }
}

/// One random free-boson module: the four vacuum-sector modules or a
/// momentum module with entries `num/den`.
fn arb_m1_module(rank: usize) -> impl Strategy<Value = M1Module> {
    let momenta = prop::collection::vec((-8i64..=8, 1i64..=4), rank).prop_filter_map(
        "zero momentum is not an irreducible momentum module",
        |pairs| {
            if pairs.iter().all(|(n, _)| *n == 0) {
                return None;
            }
            let coords: Vec<Rat> = pairs.iter().map(|&(n, d)| rat(n, d)).collect();
            Some(M1Module::momentum(&coords).unwrap())
        },
    );
    prop_oneof![
        Just(M1Module::Plus),
        Just(M1Module::Minus),
        Just(M1Module::TwistedPlus),
        Just(M1Module::TwistedMinus),
        momenta,
    ]
}

fn arb_m1_triple() -> impl Strategy<Value = (M1Module, M1Module, M1Module)> {
    (1usize..=3).prop_flat_map(|rank| {
        (arb_m1_module(rank), arb_m1_module(rank), arb_m1_module(rank))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn free_boson_rules_are_symmetric_signs((a, b, t) in arb_m1_triple()) {
        let base = m1::rule_m1(&a, &b, &t).unwrap();
        prop_assert!(base <= 1);
        let perms = [
            (&a, &b, &t), (&a, &t, &b), (&b, &a, &t),
            (&b, &t, &a), (&t, &a, &b), (&t, &b, &a),
        ];
        for (x, y, z) in perms {
            prop_assert_eq!(m1::rule_m1(x, y, z).unwrap(), base);
        }
    }

    #[test]
    fn free_boson_sum_momenta_fuse((pairs, shift) in (
        prop::collection::vec(((-8i64..=8), (1i64..=4), (-8i64..=8), (1i64..=4)), 1..=3),
        1i64..=5,
    )) {
        let lam: Vec<Rat> = pairs.iter().map(|&(n, d, _, _)| rat(n, d)).collect();
        let mu: Vec<Rat> = pairs.iter().map(|&(_, _, n, d)| rat(n, d)).collect();
        let sum = add(&lam, &mu);
        prop_assume!(lam.iter().any(|c| !c.is_zero()));
        prop_assume!(mu.iter().any(|c| !c.is_zero()));
        prop_assume!(sum.iter().any(|c| !c.is_zero()));

        let la = M1Module::momentum(&lam).unwrap();
        let lb = M1Module::momentum(&mu).unwrap();
        let ls = M1Module::momentum(&sum).unwrap();
        prop_assert_eq!(m1::rule_m1(&la, &lb, &ls).unwrap(), 1);

        // A target far outside the orbit of sums and differences misses.
        let off: Vec<Rat> = sum
            .iter()
            .map(|c| c.clone() + rat_int(40 + shift))
            .collect();
        let lo = M1Module::momentum(&off).unwrap();
        prop_assert_eq!(m1::rule_m1(&la, &lb, &lo).unwrap(), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn small_fusion_tables_are_commutative_sign_valued(
        (g, picks) in arb_gram().prop_flat_map(|g| {
            let take = if g.len() > 2 { 2usize } else { 3 };
            (Just(g), prop::collection::vec((0usize..1000, 0usize..1000, 0usize..1000), take))
        })
    ) {
        let l = build(&g);
        let ctx = match FusionContext::new(l, &Int::from(4000)) {
            Ok(ctx) => ctx,
            Err(_) => return Ok(()), // determinant above the test bound
        };
        let n = ctx.modules().len();
        for (i, j, k) in picks {
            let a = &ctx.modules()[i % n];
            let b = &ctx.modules()[j % n];
            let t = &ctx.modules()[k % n];
            let forward = ctx.fusion_rule(a, b, t).unwrap();
            prop_assert!(forward <= 1);
            prop_assert_eq!(ctx.fusion_rule(b, a, t).unwrap(), forward);
            // Duality: move the output to an input slot.
            let tb = ctx.contragredient(b);
            let tt = ctx.contragredient(t);
            prop_assert_eq!(ctx.fusion_rule(a, &tt, &tb).unwrap(), forward);
            // The vacuum row is the identity permutation.
            let unit = &ctx.modules()[0];
            prop_assert_eq!(ctx.fusion_rule(unit, a, a).unwrap(), 1);
        }
    }

    #[test]
    fn correction_coefficients_are_symmetric(cutoff in 1usize..=5) {
        let d = fock::delta_coefficients(cutoff).unwrap();
        for (&(m, n), value) in d.entries() {
            prop_assert_eq!(&d.get(n, m), value);
        }
    }

    #[test]
    fn twisted_vertex_is_linear((den, a, b) in (1i64..=2, -3i64..=3, -3i64..=3)) {
        prop_assume!(a != 0 || b != 0);
        let space = m1::BilinearSpace::new(
            fusion_core::matrix::QMat::diagonal(&[rat_int(2)])
        ).unwrap();
        let lam = vec![rat(1, den)];
        let max = 3;

        let mut v1 = fock::FockVector::new();
        v1.insert(vec![1], rat_int(1));
        let mut v2 = fock::FockVector::new();
        v2.insert(vec![1, 1], rat_int(1));
        let mut combo = fock::FockVector::new();
        if a != 0 {
            combo.insert(vec![1], rat_int(a));
        }
        if b != 0 {
            combo.insert(vec![1, 1], rat_int(b));
        }

        let s1 = fock::twisted_vertex(&space, &lam, &v1, max).unwrap();
        let s2 = fock::twisted_vertex(&space, &lam, &v2, max).unwrap();
        let sc = fock::twisted_vertex(&space, &lam, &combo, max).unwrap();
        prop_assert_eq!(&s1.prefactor, &sc.prefactor);

        let (lo, hi) = sc.window();
        for k in lo..=hi {
            let mut expected: fock::FockVector = fock::FockVector::new();
            for (mon, coeff) in s1.coefficient(k).unwrap() {
                let scaled = coeff * rat_int(a);
                if !scaled.is_zero() {
                    expected.insert(mon, scaled);
                }
            }
            for (mon, coeff) in s2.coefficient(k).unwrap() {
                let scaled = coeff * rat_int(b);
                if scaled.is_zero() {
                    continue;
                }
                let entry = expected.entry(mon).or_insert_with(|| rat_int(0));
                *entry += scaled;
            }
            expected.retain(|_, c| !c.is_zero());
            prop_assert_eq!(sc.coefficient(k).unwrap(), expected);
        }
    }
}
