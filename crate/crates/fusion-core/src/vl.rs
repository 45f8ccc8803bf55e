//! Classification and fusion rules for the irreducible modules of the
//! plus fixed-point subalgebra of a lattice vertex algebra.
//!
//! For an even positive-definite lattice `L` the irreducible modules
//! come in three kinds:
//!
//! * `V[c]+` / `V[c]-`: a pair of signed modules for every coset `c` of
//!   `L` in its dual with `2c = 0` (the zero coset gives `VL+`, `VL-`);
//! * `V[c]`: one module for every unordered pair `{c, -c}` of cosets
//!   with `2c != 0`;
//! * `Tk+` / `Tk-`: a pair of signed twisted modules for every central
//!   character `k`.
//!
//! All fusion multiplicities are 0 or 1. The decision procedure,
//! normalized by commutativity and the duality symmetry
//! `N(M1, M2; M3) = N(M1, M3'; M2')`, is:
//!
//! * an odd number of twisted factors: 0;
//! * all untwisted, labels `(c1, c2, c3)`: nonzero only when
//!   `c1 + s2 c2 + s3 c3 = 0` for some signs `s2, s3`; then 1 unless all
//!   three cosets are self-paired, in which case the product of the
//!   three module signs must equal the commutator pairing
//!   `pi(c1, 2 c2)`;
//! * one untwisted factor `U` with label `c` and two twisted factors
//!   with characters `k1, k2`: nonzero only when `k2` is the `c`-twist
//!   of `k1`; then 1 if `U` is a paired module, and otherwise the
//!   product of the three signs must equal the sign `c_chi(k1; c)`.

use crate::cocycle::{build_context, CocycleContext};
use crate::error::{FusionError, Result};
use crate::lattice::{CosetLabel, Lattice};
use crate::matrix::{int, rat_int, Int, Rat};
use crate::twisted::TwistedSector;
use num::Integer;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Sign decoration of a module.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i32(s: i32) -> Sign {
        if s >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

/// An irreducible module of the fixed-point subalgebra. The variant
/// order (signed untwisted, paired untwisted, signed twisted) together
/// with the field orders gives the canonical classification order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum IrreducibleModule {
    /// Coset with `2c = 0`; carries a sign.
    UntwistedSigned { coset: CosetLabel, sign: Sign },
    /// Unordered pair `{c, -c}` with `2c != 0`, labeled by the smaller
    /// coset.
    UntwistedPair { coset: CosetLabel },
    /// Twisted module for central character `chi`, with a sign.
    TwistedSigned { chi: usize, sign: Sign },
}

use IrreducibleModule::*;

impl IrreducibleModule {
    pub fn is_twisted(&self) -> bool {
        matches!(self, TwistedSigned { .. })
    }

    fn coset(&self) -> Option<&CosetLabel> {
        match self {
            UntwistedSigned { coset, .. } | UntwistedPair { coset } => Some(coset),
            TwistedSigned { .. } => None,
        }
    }

    fn sign(&self) -> Option<Sign> {
        match self {
            UntwistedSigned { sign, .. } | TwistedSigned { sign, .. } => Some(*sign),
            UntwistedPair { .. } => None,
        }
    }
}

/// One verification check with an optional counterexample description.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckResult {
    fn ok(name: &'static str) -> CheckResult {
        CheckResult {
            name,
            pass: true,
            witness: None,
        }
    }

    fn fail(name: &'static str, witness: String) -> CheckResult {
        CheckResult {
            name,
            pass: false,
            witness: Some(witness),
        }
    }
}

/// Report on the special structure available for unimodular lattices.
#[derive(Clone, Debug)]
pub struct UnimodularReport {
    pub unimodular: bool,
    pub rank: usize,
    pub det: Int,
    /// `None` unless unimodular. Labels of the four modules.
    pub module_labels: Option<Vec<String>>,
    pub rank_multiple_of_eight: bool,
    /// Lowest weights of the two twisted modules `(T0+, T0-)`:
    /// `(rank/16, rank/16 + 1/2)`.
    pub lowest_twisted_weights: Option<(Rat, Rat)>,
    /// Which twisted module carries integral weights (the even part of
    /// the twisted sector): `T0-` when `rank/8` is odd, `T0+` when even.
    pub theta_even_label: Option<String>,
    /// The full 4x4 fusion table as label strings, row x column ->
    /// product summands.
    pub table: Option<Vec<Vec<Vec<String>>>>,
    /// Whether the table matches the closed form for unimodular
    /// lattices: `V- x V- = V+`, `V- x T_e = T_o`, `V- x T_o = T_e`,
    /// `T_e x T_e = T_o x T_o = V+`, `T_e x T_o = V-`, with `V+` the
    /// unit.
    pub table_ok: Option<bool>,
}

/// Classification and fusion engine for one lattice.
pub struct FusionContext {
    lattice: Lattice,
    cocycle: CocycleContext,
    twisted: TwistedSector,
    modules: Vec<IrreducibleModule>,
    index: BTreeMap<IrreducibleModule, usize>,
}

/// Default bound on the discriminant group order for classification.
pub const DEFAULT_DET_BOUND: i64 = 10_000;

impl FusionContext {
    /// Classifies all irreducible modules. Fails if the discriminant
    /// group order exceeds `det_bound`.
    pub fn new(lattice: Lattice, det_bound: &Int) -> Result<FusionContext> {
        let cocycle = build_context(&lattice);
        let twisted = TwistedSector::new(&lattice, &cocycle);
        let cosets = lattice.all_cosets(det_bound)?;
        let mut modules = Vec::new();
        for c in &cosets {
            if c.is_two_torsion() {
                modules.push(UntwistedSigned {
                    coset: c.clone(),
                    sign: Sign::Plus,
                });
                modules.push(UntwistedSigned {
                    coset: c.clone(),
                    sign: Sign::Minus,
                });
            }
        }
        let mut pairs = BTreeSet::new();
        for c in &cosets {
            if !c.is_two_torsion() {
                pairs.insert(c.pm_label());
            }
        }
        for c in pairs {
            modules.push(UntwistedPair { coset: c });
        }
        for chi in 0..twisted.num_characters() {
            modules.push(TwistedSigned {
                chi,
                sign: Sign::Plus,
            });
            modules.push(TwistedSigned {
                chi,
                sign: Sign::Minus,
            });
        }
        debug_assert!(modules.windows(2).all(|w| w[0] < w[1]));
        let index = modules
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        Ok(FusionContext {
            lattice,
            cocycle,
            twisted,
            modules,
            index,
        })
    }

    pub fn with_default_bound(lattice: Lattice) -> Result<FusionContext> {
        FusionContext::new(lattice, &int(DEFAULT_DET_BOUND))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn cocycle(&self) -> &CocycleContext {
        &self.cocycle
    }

    pub fn twisted(&self) -> &TwistedSector {
        &self.twisted
    }

    /// All irreducible modules in classification order; index 0 is the
    /// algebra itself, the unit of the fusion ring.
    pub fn modules(&self) -> &[IrreducibleModule] {
        &self.modules
    }

    pub fn module_index(&self, m: &IrreducibleModule) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Counts by kind: (signed untwisted, paired untwisted, signed twisted).
    pub fn classification_counts(&self) -> (usize, usize, usize) {
        let s = self
            .modules
            .iter()
            .filter(|m| matches!(m, UntwistedSigned { .. }))
            .count();
        let p = self
            .modules
            .iter()
            .filter(|m| matches!(m, UntwistedPair { .. }))
            .count();
        let t = self
            .modules
            .iter()
            .filter(|m| matches!(m, TwistedSigned { .. }))
            .count();
        (s, p, t)
    }

    /// Formats a module label in the grammar accepted by
    /// [`FusionContext::parse_module`].
    pub fn display_module(&self, m: &IrreducibleModule) -> String {
        match m {
            UntwistedSigned { coset, sign } => {
                if coset.is_zero() {
                    format!("VL{sign}")
                } else {
                    format!("V[{}]{sign}", coords_string(coset))
                }
            }
            UntwistedPair { coset } => format!("V[{}]", coords_string(coset)),
            TwistedSigned { chi, sign } => format!("T{chi}{sign}"),
        }
    }

    /// Parses a module label: `VL+`, `VL-`, `V[r1,...,rd]` (paired
    /// coset), `V[r1,...,rd]+` / `...-` (self-paired coset) or `Tk+` /
    /// `Tk-`.
    pub fn parse_module(&self, s: &str) -> Result<IrreducibleModule> {
        let s = s.trim();
        match s {
            "VL+" => {
                return Ok(UntwistedSigned {
                    coset: CosetLabel::zero(self.lattice.rank()),
                    sign: Sign::Plus,
                })
            }
            "VL-" => {
                return Ok(UntwistedSigned {
                    coset: CosetLabel::zero(self.lattice.rank()),
                    sign: Sign::Minus,
                })
            }
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("V[") {
            let (inner, tail) = rest
                .split_once(']')
                .ok_or_else(|| FusionError::Parse(format!("missing ']' in {s:?}")))?;
            let coords: Result<Vec<Rat>> =
                inner.split(',').map(crate::m1::parse_rational).collect();
            let coords = coords?;
            if coords.len() != self.lattice.rank() {
                return Err(FusionError::DimensionMismatch {
                    expected: self.lattice.rank(),
                    got: coords.len(),
                });
            }
            let coset = self.lattice.canonical_coset(&coords)?;
            let sign = match tail {
                "" => None,
                "+" => Some(Sign::Plus),
                "-" => Some(Sign::Minus),
                _ => {
                    return Err(FusionError::Parse(format!(
                        "unexpected trailing {tail:?} in {s:?}"
                    )))
                }
            };
            if coset.is_zero() {
                return Err(FusionError::Parse(
                    "the zero coset is written VL+ or VL-".into(),
                ));
            }
            return if coset.is_two_torsion() {
                let sign = sign.ok_or_else(|| {
                    FusionError::Parse(format!(
                        "coset in {s:?} is self-paired and needs a sign suffix + or -"
                    ))
                })?;
                Ok(UntwistedSigned { coset, sign })
            } else {
                if sign.is_some() {
                    return Err(FusionError::Parse(format!(
                        "coset in {s:?} is paired with its negative and takes no sign"
                    )));
                }
                Ok(UntwistedPair {
                    coset: coset.pm_label(),
                })
            };
        }
        if let Some(rest) = s.strip_prefix('T') {
            let (num, sign) = if let Some(n) = rest.strip_suffix('+') {
                (n, Sign::Plus)
            } else if let Some(n) = rest.strip_suffix('-') {
                (n, Sign::Minus)
            } else {
                return Err(FusionError::Parse(format!(
                    "twisted label {s:?} must end in + or -"
                )));
            };
            let chi: usize = num
                .parse()
                .map_err(|_| FusionError::Parse(format!("bad character index in {s:?}")))?;
            if chi >= self.twisted.num_characters() {
                return Err(FusionError::UnclassifiedModule(s.to_string()));
            }
            return Ok(TwistedSigned { chi, sign });
        }
        Err(FusionError::Parse(format!(
            "unrecognized module label {s:?}"
        )))
    }

    fn ensure_module(&self, m: &IrreducibleModule) -> Result<()> {
        if self.module_index(m).is_some() {
            Ok(())
        } else {
            Err(FusionError::UnclassifiedModule(format!("{m:?}")))
        }
    }

    /// The contragredient (dual) module.
    pub fn contragredient(&self, m: &IrreducibleModule) -> IrreducibleModule {
        match m {
            UntwistedPair { .. } => m.clone(),
            UntwistedSigned { coset, sign } => {
                let rep = coset.coords().to_vec();
                let two_rep: Vec<Rat> = rep.iter().map(|c| c * rat_int(2)).collect();
                let pair = self
                    .cocycle
                    .pairing(&rep, &two_rep)
                    .to_integer();
                let sign = if pair.is_odd() { sign.flip() } else { *sign };
                UntwistedSigned {
                    coset: coset.clone(),
                    sign,
                }
            }
            TwistedSigned { chi, sign } => TwistedSigned {
                chi: self.twisted.contragredient_char(&self.cocycle, *chi),
                sign: *sign,
            },
        }
    }

    /// The commutator pairing sign `pi(c1, 2 c2)` for self-paired cosets.
    fn pi_sign_cosets(&self, c1: &CosetLabel, c2: &CosetLabel) -> Result<i32> {
        let rep1 = c1.coords().to_vec();
        let doubled: Vec<Rat> = c2.coords().iter().map(|c| c * rat_int(2)).collect();
        self.cocycle.pi_sign(&rep1, &doubled)
    }

    fn rule_untwisted(
        &self,
        m1: &IrreducibleModule,
        m2: &IrreducibleModule,
        m3: &IrreducibleModule,
    ) -> Result<u64> {
        let c1 = m1.coset().expect("untwisted");
        let c2 = m2.coset().expect("untwisted");
        let c3 = m3.coset().expect("untwisted");
        let mut admissible = false;
        for flip2 in [false, true] {
            for flip3 in [false, true] {
                let a = if flip2 { c2.neg() } else { c2.clone() };
                let b = if flip3 { c3.neg() } else { c3.clone() };
                if c1.add(&a).add(&b).is_zero() {
                    admissible = true;
                }
            }
        }
        if !admissible {
            return Ok(0);
        }
        let signs: Vec<Sign> = [m1, m2, m3].iter().filter_map(|m| m.sign()).collect();
        if signs.len() == 3 {
            let pi = self.pi_sign_cosets(c1, c2)?;
            let prod: i32 = signs.iter().map(|s| s.as_i32()).product();
            Ok(u64::from(prod == pi))
        } else {
            // An admissible triple of cosets has zero or one self-paired
            // entries, or all three.
            debug_assert!(signs.len() <= 1);
            Ok(1)
        }
    }

    fn rule_mixed(
        &self,
        u: &IrreducibleModule,
        t1: &IrreducibleModule,
        t2: &IrreducibleModule,
    ) -> Result<u64> {
        let (chi1, e1) = match t1 {
            TwistedSigned { chi, sign } => (*chi, *sign),
            _ => unreachable!("normalized to twisted"),
        };
        let (chi2, e2) = match t2 {
            TwistedSigned { chi, sign } => (*chi, *sign),
            _ => unreachable!("normalized to twisted"),
        };
        let coset = u.coset().expect("untwisted in slot one");
        let lam = coset.coords().to_vec();
        let target = self.twisted.twist(&self.cocycle, chi1, &lam)?;
        if target != chi2 {
            return Ok(0);
        }
        match u.sign() {
            None => Ok(1),
            Some(e0) => {
                let c = self.twisted.c_chi(&self.cocycle, chi1, &lam)?;
                let prod = e0.as_i32() * e1.as_i32() * e2.as_i32();
                Ok(u64::from(prod == c))
            }
        }
    }

    /// The fusion multiplicity `N(m1, m2; m3)`; always 0 or 1.
    pub fn fusion_rule(
        &self,
        m1: &IrreducibleModule,
        m2: &IrreducibleModule,
        m3: &IrreducibleModule,
    ) -> Result<u64> {
        self.ensure_module(m1)?;
        self.ensure_module(m2)?;
        self.ensure_module(m3)?;
        let twisted = [m1, m2, m3].iter().filter(|m| m.is_twisted()).count();
        match twisted {
            1 | 3 => Ok(0),
            0 => self.rule_untwisted(m1, m2, m3),
            _ => {
                // Exactly two twisted factors: bring the untwisted one to
                // slot one, using commutativity for slot two and the
                // duality N(M1, M2; M3) = N(M3', M1; M2') for slot three.
                if !m1.is_twisted() {
                    self.rule_mixed(m1, m2, m3)
                } else if !m2.is_twisted() {
                    self.rule_mixed(m2, m1, m3)
                } else {
                    let u = self.contragredient(m3);
                    let t2 = self.contragredient(m2);
                    self.rule_mixed(&u, m1, &t2)
                }
            }
        }
    }

    /// The fusion product `m1 x m2` as a sorted list of modules (all
    /// multiplicities are 0 or 1).
    pub fn fuse(
        &self,
        m1: &IrreducibleModule,
        m2: &IrreducibleModule,
    ) -> Result<Vec<IrreducibleModule>> {
        let mut out = Vec::new();
        for m3 in &self.modules {
            if self.fusion_rule(m1, m2, m3)? == 1 {
                out.push(m3.clone());
            }
        }
        Ok(out)
    }

    /// The full fusion table: `table[i][j][k] = N(M_i, M_j; M_k)`.
    pub fn fusion_table(&self) -> Result<Vec<Vec<Vec<u64>>>> {
        let n = self.modules.len();
        let mut table = vec![vec![vec![0u64; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table[i][j][k] =
                        self.fusion_rule(&self.modules[i], &self.modules[j], &self.modules[k])?;
                }
            }
        }
        Ok(table)
    }

    /// Expected product for the closed-form check, or `None` when no
    /// closed form is stated for the input kinds.
    fn closed_form_product(
        &self,
        a: &IrreducibleModule,
        b: &IrreducibleModule,
    ) -> Result<Option<Vec<IrreducibleModule>>> {
        // Expands a sum-coset into modules: both signs for a self-paired
        // coset, the single paired module otherwise.
        let expand = |c: &CosetLabel| -> Vec<IrreducibleModule> {
            if c.is_two_torsion() {
                vec![
                    UntwistedSigned {
                        coset: c.clone(),
                        sign: Sign::Plus,
                    },
                    UntwistedSigned {
                        coset: c.clone(),
                        sign: Sign::Minus,
                    },
                ]
            } else {
                vec![UntwistedPair {
                    coset: c.pm_label(),
                }]
            }
        };
        let product = match (a, b) {
            (UntwistedPair { coset: ca }, UntwistedPair { coset: cb }) => {
                let mut out = expand(&ca.add(cb));
                out.extend(expand(&ca.sub(cb)));
                out
            }
            (UntwistedSigned { coset: cs, .. }, UntwistedPair { coset: cp })
            | (UntwistedPair { coset: cp }, UntwistedSigned { coset: cs, .. }) => {
                vec![UntwistedPair {
                    coset: cs.add(cp).pm_label(),
                }]
            }
            (
                UntwistedSigned {
                    coset: ca,
                    sign: sa,
                },
                UntwistedSigned {
                    coset: cb,
                    sign: sb,
                },
            ) => {
                let pi = self.pi_sign_cosets(ca, cb)?;
                let sign = Sign::from_i32(sa.as_i32() * sb.as_i32() * pi);
                vec![UntwistedSigned {
                    coset: ca.add(cb),
                    sign,
                }]
            }
            (UntwistedPair { coset }, TwistedSigned { chi, .. })
            | (TwistedSigned { chi, .. }, UntwistedPair { coset }) => {
                let lam = coset.coords().to_vec();
                let twisted = self.twisted.twist(&self.cocycle, *chi, &lam)?;
                vec![
                    TwistedSigned {
                        chi: twisted,
                        sign: Sign::Plus,
                    },
                    TwistedSigned {
                        chi: twisted,
                        sign: Sign::Minus,
                    },
                ]
            }
            (
                UntwistedSigned {
                    coset,
                    sign: s0,
                },
                TwistedSigned { chi, sign: s1 },
            )
            | (
                TwistedSigned { chi, sign: s1 },
                UntwistedSigned {
                    coset,
                    sign: s0,
                },
            ) => {
                let lam = coset.coords().to_vec();
                let twisted = self.twisted.twist(&self.cocycle, *chi, &lam)?;
                let c = self.twisted.c_chi(&self.cocycle, *chi, &lam)?;
                vec![TwistedSigned {
                    chi: twisted,
                    sign: Sign::from_i32(s0.as_i32() * s1.as_i32() * c),
                }]
            }
            (
                TwistedSigned {
                    chi: chi1,
                    sign: Sign::Plus,
                },
                TwistedSigned {
                    chi: chi2,
                    sign: Sign::Plus,
                },
            ) => {
                // Sum over all untwisted modules compatible with the pair
                // of characters: the paired coset classes contribute as
                // wholes, the self-paired cosets with a computed sign.
                let chi2_dual = self.twisted.contragredient_char(&self.cocycle, *chi2);
                let mut out = Vec::new();
                for m in &self.modules {
                    match m {
                        UntwistedPair { coset } => {
                            let lam = coset.coords().to_vec();
                            if self.twisted.twist(&self.cocycle, *chi1, &lam)? == chi2_dual {
                                out.push(m.clone());
                            }
                        }
                        UntwistedSigned {
                            coset,
                            sign: Sign::Plus,
                        } => {
                            let lam = coset.coords().to_vec();
                            if self.twisted.twist(&self.cocycle, *chi1, &lam)? == chi2_dual {
                                let c = self.twisted.c_chi(&self.cocycle, *chi1, &lam)?;
                                let norm_doubled = self
                                    .cocycle
                                    .pairing(&lam, &lam)
                                    * rat_int(2);
                                debug_assert!(norm_doubled.is_integer());
                                let parity =
                                    if norm_doubled.to_integer().is_odd() { -1 } else { 1 };
                                out.push(UntwistedSigned {
                                    coset: coset.clone(),
                                    sign: Sign::from_i32(c * parity),
                                });
                            }
                        }
                        _ => {}
                    }
                }
                out
            }
            _ => return Ok(None),
        };
        let mut product = product;
        product.sort();
        Ok(Some(product))
    }

    /// Runs the whole-algebra verification suite. Check names:
    /// `zero-one`, `commutativity`, `unit`, `associativity`, `duality`,
    /// `closed-forms`.
    pub fn verify_algebra(&self) -> Vec<CheckResult> {
        let n = self.modules.len();
        let table = match self.fusion_table() {
            Ok(t) => t,
            Err(e) => {
                return vec![CheckResult::fail(
                    "zero-one",
                    format!("fusion rule evaluation failed: {e}"),
                )]
            }
        };
        let label = |i: usize| self.display_module(&self.modules[i]);
        let mut results = Vec::new();

        // 0/1 law: every multiplicity is 0 or 1 (totality established by
        // the table construction above).
        let mut zero_one = CheckResult::ok("zero-one");
        'z: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[i][j][k] > 1 {
                        zero_one = CheckResult::fail(
                            "zero-one",
                            format!(
                                "N({}, {}; {}) = {}",
                                label(i),
                                label(j),
                                label(k),
                                table[i][j][k]
                            ),
                        );
                        break 'z;
                    }
                }
            }
        }
        results.push(zero_one);

        let mut comm = CheckResult::ok("commutativity");
        'c: for i in 0..n {
            for j in 0..i {
                for k in 0..n {
                    if table[i][j][k] != table[j][i][k] {
                        comm = CheckResult::fail(
                            "commutativity",
                            format!(
                                "N({}, {}; {}) = {} but N({}, {}; {}) = {}",
                                label(i),
                                label(j),
                                label(k),
                                table[i][j][k],
                                label(j),
                                label(i),
                                label(k),
                                table[j][i][k]
                            ),
                        );
                        break 'c;
                    }
                }
            }
        }
        results.push(comm);

        let mut unit = CheckResult::ok("unit");
        'u: for j in 0..n {
            for k in 0..n {
                let expected = u64::from(j == k);
                if table[0][j][k] != expected {
                    unit = CheckResult::fail(
                        "unit",
                        format!(
                            "N({}, {}; {}) = {}, expected {}",
                            label(0),
                            label(j),
                            label(k),
                            table[0][j][k],
                            expected
                        ),
                    );
                    break 'u;
                }
            }
        }
        results.push(unit);

        let mut assoc = CheckResult::ok("associativity");
        'a: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs: u64 = (0..n).map(|m| table[i][j][m] * table[m][k][l]).sum();
                        let rhs: u64 = (0..n).map(|m| table[j][k][m] * table[i][m][l]).sum();
                        if lhs != rhs {
                            assoc = CheckResult::fail(
                                "associativity",
                                format!(
                                    "sum_m N({}, {}; m) N(m, {}; {}) = {} but \
                                     sum_m N({}, {}; m) N({}, m; {}) = {}",
                                    label(i),
                                    label(j),
                                    label(k),
                                    label(l),
                                    lhs,
                                    label(j),
                                    label(k),
                                    label(i),
                                    label(l),
                                    rhs
                                ),
                            );
                            break 'a;
                        }
                    }
                }
            }
        }
        results.push(assoc);

        let dual_index: Vec<usize> = (0..n)
            .map(|i| {
                self.module_index(&self.contragredient(&self.modules[i]))
                    .expect("contragredient stays classified")
            })
            .collect();
        let mut duality = CheckResult::ok("duality");
        'd: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[i][j][k] != table[i][dual_index[k]][dual_index[j]] {
                        duality = CheckResult::fail(
                            "duality",
                            format!(
                                "N({}, {}; {}) = {} but N({}, {}; {}) = {}",
                                label(i),
                                label(j),
                                label(k),
                                table[i][j][k],
                                label(i),
                                label(dual_index[k]),
                                label(dual_index[j]),
                                table[i][dual_index[k]][dual_index[j]]
                            ),
                        );
                        break 'd;
                    }
                }
            }
        }
        results.push(duality);

        let mut closed = CheckResult::ok("closed-forms");
        'f: for i in 0..n {
            for j in 0..n {
                let expected = match self.closed_form_product(&self.modules[i], &self.modules[j])
                {
                    Ok(Some(e)) => e,
                    Ok(None) => continue,
                    Err(e) => {
                        closed = CheckResult::fail(
                            "closed-forms",
                            format!("evaluation failed at {} x {}: {e}", label(i), label(j)),
                        );
                        break 'f;
                    }
                };
                let actual: Vec<IrreducibleModule> = (0..n)
                    .filter(|&k| table[i][j][k] == 1)
                    .map(|k| self.modules[k].clone())
                    .collect();
                if expected != actual {
                    let fmt_list = |ms: &[IrreducibleModule]| {
                        ms.iter()
                            .map(|m| self.display_module(m))
                            .collect::<Vec<_>>()
                            .join(" + ")
                    };
                    closed = CheckResult::fail(
                        "closed-forms",
                        format!(
                            "{} x {}: closed form gives {} but the rule gives {}",
                            label(i),
                            label(j),
                            fmt_list(&expected),
                            fmt_list(&actual)
                        ),
                    );
                    break 'f;
                }
            }
        }
        results.push(closed);

        results
    }

    /// Structure report for unimodular lattices; for other lattices only
    /// the determinant and rank fields are populated.
    pub fn unimodular_report(&self) -> UnimodularReport {
        let det = self.lattice.det().clone();
        let rank = self.lattice.rank();
        let unimodular = det == int(1);
        let rank_multiple_of_eight = rank % 8 == 0;
        if !unimodular {
            return UnimodularReport {
                unimodular,
                rank,
                det,
                module_labels: None,
                rank_multiple_of_eight,
                lowest_twisted_weights: None,
                theta_even_label: None,
                table: None,
                table_ok: None,
            };
        }
        let labels: Vec<String> = self
            .modules
            .iter()
            .map(|m| self.display_module(m))
            .collect();
        // Twisted sector weights: the whole twisted module is graded in
        // rank/16 + half-integers; the plus part carries the bottom.
        let d16 = Rat::new(int(rank as i64), int(16));
        let weights = (d16.clone(), d16.clone() + Rat::new(int(1), int(2)));
        let even_is_plus = (rank / 8) % 2 == 0;
        let t_plus = TwistedSigned {
            chi: 0,
            sign: Sign::Plus,
        };
        let t_minus = TwistedSigned {
            chi: 0,
            sign: Sign::Minus,
        };
        let theta_even = if even_is_plus { &t_plus } else { &t_minus };
        let theta_odd = if even_is_plus { &t_minus } else { &t_plus };
        let v_plus = UntwistedSigned {
            coset: CosetLabel::zero(rank),
            sign: Sign::Plus,
        };
        let v_minus = UntwistedSigned {
            coset: CosetLabel::zero(rank),
            sign: Sign::Minus,
        };
        let mut table = Vec::new();
        let mut table_ok = self.modules.len() == 4;
        for a in &self.modules {
            let mut row = Vec::new();
            for b in &self.modules {
                let product = self.fuse(a, b).unwrap_or_default();
                row.push(product.iter().map(|m| self.display_module(m)).collect());
                let expected: Option<&IrreducibleModule> = if *a == v_plus {
                    Some(b)
                } else if *b == v_plus {
                    Some(a)
                } else if a == b {
                    // V- x V- = T_e x T_e = T_o x T_o = V+
                    Some(&v_plus)
                } else if (a == &v_minus && b == theta_even)
                    || (b == &v_minus && a == theta_even)
                {
                    Some(theta_odd)
                } else if (a == &v_minus && b == theta_odd) || (b == &v_minus && a == theta_odd)
                {
                    Some(theta_even)
                } else if (a == theta_even && b == theta_odd)
                    || (a == theta_odd && b == theta_even)
                {
                    Some(&v_minus)
                } else {
                    None
                };
                match expected {
                    Some(e) => {
                        if product.len() != 1 || &product[0] != e {
                            table_ok = false;
                        }
                    }
                    None => table_ok = false,
                }
            }
            table.push(row);
        }
        UnimodularReport {
            unimodular,
            rank,
            det,
            module_labels: Some(labels),
            rank_multiple_of_eight,
            lowest_twisted_weights: Some(weights),
            theta_even_label: Some(self.display_module(theta_even)),
            table: Some(table),
            table_ok: Some(table_ok),
        }
    }
}

fn coords_string(c: &CosetLabel) -> String {
    c.coords()
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn ctx(l: Lattice) -> FusionContext {
        FusionContext::with_default_bound(l).unwrap()
    }

    #[test]
    fn classification_counts() {
        assert_eq!(ctx(presets::a1()).modules().len(), 8);
        assert_eq!(ctx(presets::a2()).modules().len(), 5);
        assert_eq!(ctx(presets::e8()).modules().len(), 4);
        assert_eq!(ctx(presets::a1_plus_a1()).modules().len(), 16);
        for k in 1..=5 {
            assert_eq!(
                ctx(presets::a1_scaled(k).unwrap()).modules().len(),
                (k + 7) as usize,
                "rank-one scaled by {k}"
            );
        }
    }

    #[test]
    fn classification_order_and_unit() {
        let c = ctx(presets::a1());
        let labels: Vec<String> = c.modules().iter().map(|m| c.display_module(m)).collect();
        assert_eq!(
            labels,
            vec!["VL+", "VL-", "V[1/2]+", "V[1/2]-", "T0+", "T0-", "T1+", "T1-"]
        );
    }

    #[test]
    fn parse_display_round_trip_and_rejections() {
        let c = ctx(presets::a1());
        for m in c.modules() {
            let s = c.display_module(m);
            assert_eq!(&c.parse_module(&s).unwrap(), m);
        }
        // Shifted representatives name the same module.
        assert_eq!(
            c.parse_module("V[3/2]+").unwrap(),
            c.parse_module("V[1/2]+").unwrap()
        );
        assert!(c.parse_module("V[1/2]").is_err(), "sign required");
        assert!(c.parse_module("V[0]+").is_err(), "zero coset is VL+");
        assert!(c.parse_module("V[1/3]+").is_err(), "not a dual vector");
        assert!(c.parse_module("T2+").is_err(), "character out of range");
        assert!(c.parse_module("T0").is_err(), "missing sign");
        assert!(c.parse_module("W").is_err());

        let c2 = ctx(presets::a2());
        let pair = c2.parse_module("V[1/3,2/3]").unwrap();
        assert_eq!(pair, c2.parse_module("V[2/3,1/3]").unwrap(), "pm identification");
        assert!(c2.parse_module("V[1/3,2/3]+").is_err(), "paired coset takes no sign");
        assert!(c2.parse_module("V[1/3]").is_err(), "dimension mismatch");
    }

    #[test]
    fn rank_one_fusion_anchors() {
        let c = ctx(presets::a1());
        let p = |s: &str| c.parse_module(s).unwrap();
        let fuse_labels = |a: &str, b: &str| -> Vec<String> {
            c.fuse(&p(a), &p(b))
                .unwrap()
                .iter()
                .map(|m| c.display_module(m))
                .collect()
        };
        assert_eq!(fuse_labels("VL+", "T0+"), vec!["T0+"]);
        assert_eq!(fuse_labels("VL-", "T0+"), vec!["T0-"]);
        assert_eq!(fuse_labels("V[1/2]+", "V[1/2]+"), vec!["VL-"]);
        assert_eq!(fuse_labels("V[1/2]+", "V[1/2]-"), vec!["VL+"]);
        assert_eq!(fuse_labels("T0+", "T0+"), vec!["V[1/2]-"]);
        assert_eq!(fuse_labels("T0+", "T0-"), vec!["V[1/2]+"]);
        assert_eq!(fuse_labels("T0+", "T1+"), vec!["VL+"]);
        assert_eq!(fuse_labels("T0+", "T1-"), vec!["VL-"]);
        assert_eq!(fuse_labels("V[1/2]+", "T0+"), vec!["T1+"]);
        assert_eq!(fuse_labels("V[1/2]-", "T0-"), vec!["T1+"]);
    }

    #[test]
    fn rank_two_root_fusion_anchors() {
        let c = ctx(presets::a2());
        let p = |s: &str| c.parse_module(s).unwrap();
        let fuse_labels = |a: &str, b: &str| -> Vec<String> {
            c.fuse(&p(a), &p(b))
                .unwrap()
                .iter()
                .map(|m| c.display_module(m))
                .collect()
        };
        // The paired module squares to everything in the vacuum block
        // plus itself: [c] x [c] = [2c] + [0] with [0] = VL+ + VL-.
        assert_eq!(
            fuse_labels("V[1/3,2/3]", "V[1/3,2/3]"),
            vec!["VL+", "VL-", "V[1/3,2/3]"]
        );
        assert_eq!(fuse_labels("V[1/3,2/3]", "T0+"), vec!["T0+", "T0-"]);
        assert_eq!(fuse_labels("VL-", "VL-"), vec!["VL+"]);
    }

    #[test]
    fn contragredients() {
        let c = ctx(presets::a1());
        let p = |s: &str| c.parse_module(s).unwrap();
        assert_eq!(c.contragredient(&p("VL+")), p("VL+"));
        // (lambda, 2 lambda) = 1 is odd for the half coset: signs flip.
        assert_eq!(c.contragredient(&p("V[1/2]+")), p("V[1/2]-"));
        assert_eq!(c.contragredient(&p("T0+")), p("T1+"));
        assert_eq!(c.contragredient(&p("T1-")), p("T0-"));

        let c2 = ctx(presets::a2());
        let pair = c2.parse_module("V[1/3,2/3]").unwrap();
        assert_eq!(c2.contragredient(&pair), pair);
        // Self-contragredient twisted sector for the rank-two root
        // lattice: (g, g)/2 is even for all radical generators (none).
        assert_eq!(
            c2.contragredient(&c2.parse_module("T0+").unwrap()),
            c2.parse_module("T0+").unwrap()
        );
    }

    #[test]
    fn verification_suite_passes_on_small_corpus() {
        for (name, l) in presets::corpus() {
            let c = ctx(l);
            for check in c.verify_algebra() {
                assert!(
                    check.pass,
                    "check {} failed on {name}: {:?}",
                    check.name, check.witness
                );
            }
        }
    }

    #[test]
    fn unimodular_report_for_rank_eight() {
        let c = ctx(presets::e8());
        let r = c.unimodular_report();
        assert!(r.unimodular);
        assert!(r.rank_multiple_of_eight);
        assert_eq!(
            r.module_labels.as_deref().unwrap(),
            ["VL+", "VL-", "T0+", "T0-"]
        );
        // Rank 8: weights 1/2 and 1; the odd multiple of eight puts the
        // integral-weight (theta-even) half on T0-.
        let (w_plus, w_minus) = r.lowest_twisted_weights.unwrap();
        assert_eq!(w_plus, Rat::new(int(1), int(2)));
        assert_eq!(w_minus, Rat::new(int(1), int(1)));
        assert_eq!(r.theta_even_label.as_deref(), Some("T0-"));
        assert_eq!(r.table_ok, Some(true));
    }

    #[test]
    fn non_unimodular_report() {
        let c = ctx(presets::a1());
        let r = c.unimodular_report();
        assert!(!r.unimodular);
        assert!(r.table.is_none());
    }

    #[test]
    fn determinant_bound_enforced() {
        let err = FusionContext::new(presets::a2(), &int(2));
        assert!(matches!(err, Err(FusionError::DeterminantTooLarge { .. })));
    }

    #[test]
    fn fusion_rule_rejects_foreign_modules() {
        let c = ctx(presets::a1());
        let foreign = TwistedSigned {
            chi: 7,
            sign: Sign::Plus,
        };
        let unit = c.modules()[0].clone();
        assert!(matches!(
            c.fusion_rule(&foreign, &unit, &unit),
            Err(FusionError::UnclassifiedModule(_))
        ));
    }
}
