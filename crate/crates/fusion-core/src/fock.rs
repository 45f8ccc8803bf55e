//! Exact expansion of exponential vertex operators on small Fock
//! spaces, used to verify the operator calculus behind the fusion
//! rules at desk scale.
//!
//! Everything lives in the one-boson Fock space spanned by monomials in
//! the negative modes of a single direction `lam` with squared length
//! `t`: the commutation rule is `[lam(m), lam(n)] = m t` when
//! `m + n = 0` and `0` otherwise. In the twisted sector the modes sit
//! at half-integers (odd doubled indices `1, 3, 5, ...` standing for
//! `lam(-1/2), lam(-3/2), ...`); in the untwisted sector at integers
//! (even doubled indices).
//!
//! The twisted exponential operator attached to `lam` is
//!
//! ```text
//! 2^{-t} z^{-t/2}
//!   exp( sum_{n in 1/2 + Z>=0} lam(-n)/n z^n )
//!   exp( -sum_{n in 1/2 + Z>=0} lam(n)/n z^{-n} )
//! ```
//!
//! and the module computes its action on a state exactly, as a Laurent
//! series in `z^{1/2}` with vector coefficients, truncated above a
//! requested order but exact at every retained order. The scalar
//! prefactor is carried symbolically. The correction operator needed
//! for descendant inputs is built from the coefficient table of
//! `-log((sqrt(1+x) + sqrt(1+y))/2)`, which is also computed here
//! exactly.

use crate::error::{FusionError, Result};
use crate::m1::BilinearSpace;
use crate::matrix::{rat_int, Rat};
use crate::vl::CheckResult;
use num::{One, Zero};
use std::collections::BTreeMap;

/// A monomial in negative modes: a sorted list of doubled mode indices
/// (`1` is `lam(-1/2)`, `2` is `lam(-1)`, `3` is `lam(-3/2)`, ...).
pub type Monomial = Vec<u32>;

/// A Fock-space state: finite sum of monomials applied to the ground
/// state, with rational coefficients.
pub type FockVector = BTreeMap<Monomial, Rat>;

/// The ground state.
pub fn vacuum_vector() -> FockVector {
    let mut v = FockVector::new();
    v.insert(Vec::new(), Rat::one());
    v
}

/// The state given by one monomial of doubled modes (each entry
/// positive), e.g. `&[1]` for `lam(-1/2)` applied to the ground state.
pub fn monomial_state(doubled_modes: &[u32]) -> Result<FockVector> {
    if doubled_modes.iter().any(|&m| m == 0) {
        return Err(FusionError::PreconditionFailed(
            "mode indices must be positive".into(),
        ));
    }
    let mut m = doubled_modes.to_vec();
    m.sort_unstable();
    let mut v = FockVector::new();
    v.insert(m, Rat::one());
    Ok(v)
}

fn vector_add_into(acc: &mut FockVector, v: &FockVector, scale: &Rat) {
    for (m, c) in v {
        let entry = acc.entry(m.clone()).or_insert_with(Rat::zero);
        *entry += c * scale;
        if entry.is_zero() {
            acc.remove(m);
        }
    }
}

/// Multiplies by `lam(-dm/2)`.
fn create(v: &FockVector, dm: u32) -> FockVector {
    let mut out = FockVector::new();
    for (m, c) in v {
        let mut nm = m.clone();
        let pos = nm.partition_point(|&x| x < dm);
        nm.insert(pos, dm);
        out.insert(nm, c.clone());
    }
    out
}

/// Applies `lam(dm/2)` with `[lam(n), lam(-n)] = n t`.
fn annihilate(v: &FockVector, dm: u32, t: &Rat) -> FockVector {
    let n = Rat::new(crate::matrix::int(dm as i64), crate::matrix::int(2));
    let mut out = FockVector::new();
    for (m, c) in v {
        let count = m.iter().filter(|&&x| x == dm).count();
        if count == 0 {
            continue;
        }
        let mut nm = m.clone();
        let pos = nm.iter().position(|&x| x == dm).expect("counted above");
        nm.remove(pos);
        let contrib = c * &n * t * rat_int(count as i64);
        let entry = out.entry(nm).or_insert_with(Rat::zero);
        *entry += contrib;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Total doubled degree of the deepest monomial in a state (0 for the
/// ground state or the zero vector).
fn max_degree(v: &FockVector) -> i64 {
    v.keys()
        .map(|m| m.iter().map(|&x| x as i64).sum())
        .max()
        .unwrap_or(0)
}

/// Symbolic scalar prefactor `2^{log2_coeff} z^{z_exponent}` of a
/// series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefactor {
    pub log2_coeff: Rat,
    pub z_exponent: Rat,
}

/// A Laurent series in `z^{1/2}` with Fock-vector coefficients, exact
/// on the doubled-exponent window `[min_doubled, max_doubled]` relative
/// to the symbolic prefactor. Coefficients below the window are exactly
/// zero; above it they were truncated away.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    pub prefactor: Prefactor,
    min_doubled: i64,
    max_doubled: i64,
    terms: BTreeMap<i64, FockVector>,
}

impl TruncatedSeries {
    /// The window of doubled exponents on which the series is exact.
    pub fn window(&self) -> (i64, i64) {
        (self.min_doubled, self.max_doubled)
    }

    /// The coefficient of `z^{doubled/2}` (relative to the prefactor).
    /// Exponents above the computed window are an error; below it the
    /// coefficient is exactly zero.
    pub fn coefficient(&self, doubled: i64) -> Result<FockVector> {
        if doubled > self.max_doubled {
            return Err(FusionError::CutoffTooSmall {
                requested: doubled,
                computed: self.max_doubled,
            });
        }
        Ok(self.terms.get(&doubled).cloned().unwrap_or_default())
    }

    /// All nonzero retained terms, keyed by doubled exponent.
    pub fn terms(&self) -> &BTreeMap<i64, FockVector> {
        &self.terms
    }

    fn insert_scaled(&mut self, doubled: i64, v: &FockVector, scale: &Rat) {
        if doubled > self.max_doubled || v.is_empty() || scale.is_zero() {
            return;
        }
        let entry = self.terms.entry(doubled).or_default();
        vector_add_into(entry, v, scale);
        if entry.is_empty() {
            self.terms.remove(&doubled);
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_empty());
    }
}

/// Applies `exp(sum lam(-dm/2) (2/dm) z^{dm/2})` with `dm` running over
/// the given parity (1 = twisted half-integer modes, 2 = untwisted
/// integer modes), truncating above `max_doubled`.
fn apply_exp_creation(series: &mut TruncatedSeries, parity_start: u32) {
    let max = series.max_doubled;
    let mut current: BTreeMap<i64, FockVector> = series.terms.clone();
    let mut order = 0i64;
    while !current.is_empty() {
        order += 1;
        let mut next: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (&e, v) in &current {
            let mut dm = parity_start;
            while e + dm as i64 <= max {
                let created = create(v, dm);
                let scale = Rat::new(
                    crate::matrix::int(2),
                    crate::matrix::int(dm as i64) * crate::matrix::int(order),
                );
                let entry = next.entry(e + dm as i64).or_default();
                vector_add_into(entry, &created, &scale);
                dm += 2;
            }
        }
        next.retain(|_, v| !v.is_empty());
        for (e, v) in &next {
            series.insert_scaled(*e, v, &Rat::one());
        }
        current = next;
    }
    series.prune();
}

/// Applies `exp(-sum lam(dm/2) (2/dm) z^{-dm/2})` over the given mode
/// parity.
fn apply_exp_annihilation(series: &mut TruncatedSeries, parity_start: u32, t: &Rat) {
    let mut current: BTreeMap<i64, FockVector> = series.terms.clone();
    let mut order = 0i64;
    while !current.is_empty() {
        order += 1;
        let mut next: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (&e, v) in &current {
            let deepest = max_degree(v);
            let mut dm = parity_start;
            while (dm as i64) <= deepest {
                let killed = annihilate(v, dm, t);
                if !killed.is_empty() {
                    let scale = Rat::new(
                        crate::matrix::int(-2),
                        crate::matrix::int(dm as i64) * crate::matrix::int(order),
                    );
                    let entry = next.entry(e - dm as i64).or_default();
                    vector_add_into(entry, &killed, &scale);
                }
                dm += 2;
            }
        }
        next.retain(|_, v| !v.is_empty());
        for (e, v) in &next {
            series.insert_scaled(*e, v, &Rat::one());
        }
        current = next;
    }
    series.prune();
}

fn squared_length(space: &BilinearSpace, lam: &[Rat]) -> Result<Rat> {
    let t = space.norm(lam)?;
    if t.is_zero() {
        return Err(FusionError::PreconditionFailed(
            "direction vector must have nonzero squared length".into(),
        ));
    }
    Ok(t)
}

fn ensure_mode_parity(target: &FockVector, parity: u32) -> Result<()> {
    for m in target.keys() {
        if m.iter().any(|&x| x % 2 != parity % 2) {
            return Err(FusionError::PreconditionFailed(format!(
                "target state has a mode of the wrong sector parity: {m:?}"
            )));
        }
    }
    Ok(())
}

/// Expands the twisted exponential operator attached to `lam` applied
/// to `target`, keeping relative doubled orders up to `max_doubled`.
/// The prefactor `2^{-t} z^{-t/2}` is returned symbolically.
pub fn twisted_vertex(
    space: &BilinearSpace,
    lam: &[Rat],
    target: &FockVector,
    max_doubled: i64,
) -> Result<TruncatedSeries> {
    let t = squared_length(space, lam)?;
    ensure_mode_parity(target, 1)?;
    let min_doubled = -max_degree(target);
    let mut series = TruncatedSeries {
        prefactor: Prefactor {
            log2_coeff: -t.clone(),
            z_exponent: -&t / rat_int(2),
        },
        min_doubled,
        max_doubled,
        terms: BTreeMap::new(),
    };
    if !target.is_empty() {
        series.terms.insert(0, target.clone());
    }
    apply_exp_annihilation(&mut series, 1, &t);
    apply_exp_creation(&mut series, 1);
    Ok(series)
}

/// Expands the untwisted exponential operator attached to `lam` applied
/// to the highest-weight vector of momentum `mu`: the result is
/// `z^{(lam,mu)} exp(sum_{n>=1} lam(-n)/n z^n)` applied to the shifted
/// ground state, with the monodromy exponent `(lam, mu)` carried in the
/// prefactor.
pub fn untwisted_vertex(
    space: &BilinearSpace,
    lam: &[Rat],
    mu: &[Rat],
    max_doubled: i64,
) -> Result<TruncatedSeries> {
    squared_length(space, lam)?;
    let pairing = space.pairing(lam, mu)?;
    let mut series = TruncatedSeries {
        prefactor: Prefactor {
            log2_coeff: Rat::zero(),
            z_exponent: pairing,
        },
        min_doubled: 0,
        max_doubled,
        terms: BTreeMap::new(),
    };
    series.terms.insert(0, vacuum_vector());
    apply_exp_creation(&mut series, 2);
    Ok(series)
}

/// Expands the operator attached to the descendant input `lam(-1) e^lam`
/// applied to `target` in the twisted sector:
///
/// ```text
/// lam^-(z) Y(e^lam, z) target + Y(e^lam, z) (lam^+(z) target)
///   + 2 c10 t z^{-1} Y(e^lam, z) target
/// ```
///
/// where `lam^-(z) = sum lam(-n) z^{n-1}`, `lam^+(z)` collects the
/// annihilation modes, and `c10 = -1/4` is the first off-center
/// coefficient of the correction generating function (computed here
/// from [`delta_coefficients`], not hard-coded).
pub fn twisted_vertex_descendant(
    space: &BilinearSpace,
    lam: &[Rat],
    target: &FockVector,
    max_doubled: i64,
) -> Result<TruncatedSeries> {
    let t = squared_length(space, lam)?;
    ensure_mode_parity(target, 1)?;
    let base = twisted_vertex(space, lam, target, max_doubled + 2)?;

    let mut out = TruncatedSeries {
        prefactor: base.prefactor.clone(),
        min_doubled: base.min_doubled - 2,
        max_doubled,
        terms: BTreeMap::new(),
    };

    // Piece one: multiply by the creation half of the field,
    // lam^-(z) = sum_{dm odd} lam(-dm/2) z^{(dm-2)/2}.
    for (&e, v) in base.terms() {
        let mut dm = 1u32;
        while e + dm as i64 - 2 <= max_doubled {
            out.insert_scaled(e + dm as i64 - 2, &create(v, dm), &Rat::one());
            dm += 2;
        }
    }

    // Piece two: the annihilation half acts on the target first,
    // lam^+(z) target = sum_{dm odd} (lam(dm/2) target) z^{(-dm-2)/2}.
    let deepest = max_degree(target);
    let mut dm = 1u32;
    while (dm as i64) <= deepest {
        let killed = annihilate(target, dm, &t);
        if !killed.is_empty() {
            let inner = twisted_vertex(space, lam, &killed, max_doubled + dm as i64 + 2)?;
            for (&e, v) in inner.terms() {
                out.insert_scaled(e - dm as i64 - 2, v, &Rat::one());
            }
        }
        dm += 2;
    }

    // Piece three: the quadratic correction contributes
    // (c10 + c01) t z^{-1} on an exponential input.
    let delta = delta_coefficients(1)?;
    let correction = (delta.get(1, 0) + delta.get(0, 1)) * &t;
    for (&e, v) in base.terms() {
        out.insert_scaled(e - 2, v, &correction);
    }

    out.prune();
    Ok(out)
}

/// Coefficient table of the bivariate correction generating function
/// `-log((sqrt(1+x) + sqrt(1+y))/2)`, exact through total degree
/// `cutoff`.
#[derive(Clone, Debug)]
pub struct DeltaCoefficients {
    cutoff: usize,
    coeffs: BTreeMap<(usize, usize), Rat>,
}

impl DeltaCoefficients {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// The coefficient of `x^m y^n`; zero entries are valid answers
    /// within the cutoff.
    pub fn get(&self, m: usize, n: usize) -> Rat {
        self.coeffs.get(&(m, n)).cloned().unwrap_or_else(Rat::zero)
    }

    /// All nonzero coefficients with `m + n <= cutoff`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Rat)> {
        self.coeffs.iter()
    }
}

/// Coefficients of `sqrt(1+x)` through degree `cutoff` via the
/// generalized binomial series.
fn sqrt_series(cutoff: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut coeff = Rat::one();
    out.push(coeff.clone());
    for k in 0..cutoff {
        // binom(1/2, k+1) = binom(1/2, k) * (1/2 - k) / (k + 1)
        let step = (Rat::new(crate::matrix::int(1), crate::matrix::int(2)) - rat_int(k as i64))
            / rat_int(k as i64 + 1);
        coeff *= step;
        out.push(coeff.clone());
    }
    out
}

type Bivariate = BTreeMap<(usize, usize), Rat>;

fn bivariate_mul(a: &Bivariate, b: &Bivariate, cutoff: usize) -> Bivariate {
    let mut out = Bivariate::new();
    for ((i, j), av) in a {
        for ((k, l), bv) in b {
            if i + k + j + l > cutoff {
                continue;
            }
            let entry = out.entry((i + k, j + l)).or_insert_with(Rat::zero);
            *entry += av * bv;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Computes the correction coefficient table through total degree
/// `cutoff`.
pub fn delta_coefficients(cutoff: usize) -> Result<DeltaCoefficients> {
    if cutoff == 0 {
        return Err(FusionError::CutoffTooSmall {
            requested: 0,
            computed: 1,
        });
    }
    let sq = sqrt_series(cutoff);
    // g = (sqrt(1+x) + sqrt(1+y))/2 = 1 + u with u of positive order.
    let half = Rat::new(crate::matrix::int(1), crate::matrix::int(2));
    let mut u = Bivariate::new();
    for (k, v) in sq.iter().enumerate().skip(1) {
        u.insert((k, 0), v * &half);
        u.insert((0, k), v * &half);
    }
    // -log(1 + u) = sum_{k>=1} (-1)^k u^k / k.
    let mut result = Bivariate::new();
    let mut upow = Bivariate::new();
    upow.insert((0, 0), Rat::one());
    for k in 1..=cutoff {
        upow = bivariate_mul(&upow, &u, cutoff);
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let scale = Rat::new(crate::matrix::int(sign), crate::matrix::int(k as i64));
        for (key, v) in &upow {
            let entry = result.entry(*key).or_insert_with(Rat::zero);
            *entry += v * &scale;
        }
    }
    result.retain(|_, v| !v.is_zero());
    Ok(DeltaCoefficients {
        cutoff,
        coeffs: result,
    })
}

/// Outcome of the expansion verification for one direction vector.
#[derive(Clone, Debug)]
pub struct ExpansionReport {
    /// Squared length of the direction vector.
    pub t: Rat,
    pub checks: Vec<CheckResult>,
}

impl ExpansionReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Reference expansion data: `(doubled exponent, monomials)` with each
/// monomial carrying a coefficient `a + b t` given as `(modes, a, b)`.
type ReferenceRow = (i64, &'static [(&'static [u32], i64, i64, i64)]);

// Coefficient entries are (modes, num_const, num_t, den): the value is
// (num_const + num_t * t) / den.
const VACUUM_REFERENCE: &[ReferenceRow] = &[
    (0, &[(&[], 1, 0, 1)]),
    (1, &[(&[1], 2, 0, 1)]),
    (2, &[(&[1, 1], 2, 0, 1)]),
    (3, &[(&[1, 1, 1], 4, 0, 3), (&[3], 2, 0, 3)]),
    (4, &[(&[1, 1, 1, 1], 2, 0, 3), (&[1, 3], 4, 0, 3)]),
    (
        5,
        &[
            (&[1, 1, 1, 1, 1], 4, 0, 15),
            (&[1, 1, 3], 4, 0, 3),
            (&[5], 2, 0, 5),
        ],
    ),
];

const DESCENDANT_TARGET_REFERENCE: &[ReferenceRow] = &[
    (-1, &[(&[], 0, -1, 1)]),
    (0, &[(&[1], 1, -2, 1)]),
    (1, &[(&[1, 1], 2, -2, 1)]),
    (2, &[(&[1, 1, 1], 6, -4, 3), (&[3], 0, -2, 3)]),
    (3, &[(&[1, 1, 1, 1], 4, -2, 3), (&[1, 3], 2, -4, 3)]),
];

const DELTA_REFERENCE: &[(usize, usize, i64, i64)] = &[
    (0, 0, 0, 1),
    (1, 0, -1, 4),
    (1, 1, 1, 16),
    (2, 0, 3, 32),
    (2, 1, -1, 32),
    (3, 0, -5, 96),
    (3, 1, 5, 256),
    (2, 2, 9, 512),
    (4, 0, 35, 1024),
];

fn reference_vector(row: &[(&[u32], i64, i64, i64)], t: &Rat) -> FockVector {
    let mut v = FockVector::new();
    for (modes, num_const, num_t, den) in row {
        let value = (rat_int(*num_const) + rat_int(*num_t) * t) / rat_int(*den);
        if !value.is_zero() {
            v.insert(modes.to_vec(), value);
        }
    }
    v
}

fn describe_vector(v: &FockVector) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter()
        .map(|(m, c)| {
            let name = if m.is_empty() {
                "1".to_string()
            } else {
                m.iter()
                    .map(|dm| format!("lam(-{dm}/2)"))
                    .collect::<Vec<_>>()
                    .join("*")
            };
            format!("({c}){name}")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn compare_rows(
    name: &'static str,
    series: &TruncatedSeries,
    reference: &[ReferenceRow],
    t: &Rat,
) -> CheckResult {
    for (doubled, row) in reference {
        let expected = reference_vector(row, t);
        match series.coefficient(*doubled) {
            Ok(actual) => {
                if actual != expected {
                    return CheckResult {
                        name,
                        pass: false,
                        witness: Some(format!(
                            "coefficient of z^{doubled}/2: computed {} but reference gives {}",
                            describe_vector(&actual),
                            describe_vector(&expected)
                        )),
                    };
                }
            }
            Err(e) => {
                return CheckResult {
                    name,
                    pass: false,
                    witness: Some(format!("coefficient of z^{doubled}/2 unavailable: {e}")),
                }
            }
        }
    }
    CheckResult {
        name,
        pass: true,
        witness: None,
    }
}

/// Differentiates `prefactor * series` in `z` and divides the prefactor
/// back out: each coefficient at doubled exponent `e` moves to `e - 2`
/// scaled by `(e + 2 z_exp)/2` where `z_exp` is the prefactor exponent.
fn differentiate_with_prefactor(series: &TruncatedSeries) -> TruncatedSeries {
    let mut out = TruncatedSeries {
        prefactor: series.prefactor.clone(),
        min_doubled: series.min_doubled - 2,
        max_doubled: series.max_doubled - 2,
        terms: BTreeMap::new(),
    };
    for (&e, v) in series.terms() {
        let scale = (rat_int(e) + &series.prefactor.z_exponent * rat_int(2)) / rat_int(2);
        out.insert_scaled(e - 2, v, &scale);
    }
    out.prune();
    out
}

/// Verifies the expansion tables and the translation-covariance
/// (derivative) identity for the twisted operator attached to `lam`.
/// The squared length of `lam` must be a half-integer for the frozen
/// reference rows to apply; any nonzero value is accepted.
pub fn verify_expansions(space: &BilinearSpace, lam: &[Rat]) -> Result<ExpansionReport> {
    let t = squared_length(space, lam)?;
    let mut checks = Vec::new();

    // Correction table against the frozen reference, plus symmetry.
    let delta = delta_coefficients(4)?;
    let mut delta_check = CheckResult {
        name: "delta-table",
        pass: true,
        witness: None,
    };
    for (m, n, num, den) in DELTA_REFERENCE {
        let expected = Rat::new(crate::matrix::int(*num), crate::matrix::int(*den));
        for (a, b) in [(*m, *n), (*n, *m)] {
            let got = delta.get(a, b);
            if got != expected {
                delta_check = CheckResult {
                    name: "delta-table",
                    pass: false,
                    witness: Some(format!("c[{a}][{b}] = {got}, expected {expected}")),
                };
            }
        }
    }
    checks.push(delta_check);

    // Vacuum expansion against the frozen table.
    let vac = vacuum_vector();
    let on_vacuum = twisted_vertex(space, lam, &vac, 5)?;
    let expected_prefactor = Prefactor {
        log2_coeff: -t.clone(),
        z_exponent: -&t / rat_int(2),
    };
    checks.push(if on_vacuum.prefactor == expected_prefactor {
        CheckResult {
            name: "vacuum-prefactor",
            pass: true,
            witness: None,
        }
    } else {
        CheckResult {
            name: "vacuum-prefactor",
            pass: false,
            witness: Some(format!(
                "prefactor {:?}, expected {:?}",
                on_vacuum.prefactor, expected_prefactor
            )),
        }
    });
    checks.push(compare_rows("vacuum-expansion", &on_vacuum, VACUUM_REFERENCE, &t));

    // Expansion on lam(-1/2) applied to the ground state.
    let excited = monomial_state(&[1])?;
    let on_excited = twisted_vertex(space, lam, &excited, 3)?;
    checks.push(compare_rows(
        "descendant-target-expansion",
        &on_excited,
        DESCENDANT_TARGET_REFERENCE,
        &t,
    ));

    // Translation covariance: d/dz of the vacuum series equals the
    // series of the descendant input lam(-1) e^lam.
    let derivative = differentiate_with_prefactor(&on_vacuum);
    let descendant = twisted_vertex_descendant(space, lam, &vac, 3)?;
    let mut lminus_check = CheckResult {
        name: "translation-covariance",
        pass: true,
        witness: None,
    };
    for doubled in -2..=3 {
        let lhs = derivative.coefficient(doubled)?;
        let rhs = descendant.coefficient(doubled)?;
        if lhs != rhs {
            lminus_check = CheckResult {
                name: "translation-covariance",
                pass: false,
                witness: Some(format!(
                    "z^{doubled}/2: derivative gives {} but the descendant expansion gives {}",
                    describe_vector(&lhs),
                    describe_vector(&rhs)
                )),
            };
            break;
        }
    }
    checks.push(lminus_check);

    Ok(ExpansionReport { t, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{int, QMat};

    fn space(entries: &[&[i64]]) -> BilinearSpace {
        let rows: Vec<Vec<Rat>> = entries
            .iter()
            .map(|r| r.iter().map(|&x| rat_int(x)).collect())
            .collect();
        let n = rows.len();
        let mut m = QMat::zero(n, n);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                *m.at_mut(i, j) = v.clone();
            }
        }
        BilinearSpace::new(m).unwrap()
    }

    fn half() -> Rat {
        Rat::new(int(1), int(2))
    }

    #[test]
    fn delta_table_matches_reference_and_is_symmetric() {
        let d = delta_coefficients(4).unwrap();
        assert_eq!(d.get(0, 0), Rat::zero());
        assert_eq!(d.get(1, 0), Rat::new(int(-1), int(4)));
        assert_eq!(d.get(1, 1), Rat::new(int(1), int(16)));
        assert_eq!(d.get(2, 0), Rat::new(int(3), int(32)));
        assert_eq!(d.get(2, 1), Rat::new(int(-1), int(32)));
        assert_eq!(d.get(3, 0), Rat::new(int(-5), int(96)));
        assert_eq!(d.get(3, 1), Rat::new(int(5), int(256)));
        assert_eq!(d.get(2, 2), Rat::new(int(9), int(512)));
        assert_eq!(d.get(4, 0), Rat::new(int(35), int(1024)));
        for ((m, n), v) in d.entries() {
            assert_eq!(&d.get(*n, *m), v, "symmetry at ({m},{n})");
        }
    }

    #[test]
    fn delta_truncation_is_stable() {
        let small = delta_coefficients(4).unwrap();
        let large = delta_coefficients(8).unwrap();
        for ((m, n), v) in small.entries() {
            assert_eq!(&large.get(*m, *n), v);
        }
        assert!(delta_coefficients(0).is_err());
    }

    #[test]
    fn expansion_reports_pass_for_small_lengths() {
        // Squared lengths 1/2, 1, 1, 2 through different forms.
        let cases: Vec<(BilinearSpace, Vec<Rat>)> = vec![
            (space(&[&[2]]), vec![half()]),
            (space(&[&[4]]), vec![half()]),
            (space(&[&[1]]), vec![rat_int(1)]),
            (space(&[&[2]]), vec![rat_int(1)]),
            (space(&[&[2, 0], &[0, 2]]), vec![half(), half()]),
        ];
        for (sp, lam) in cases {
            let report = verify_expansions(&sp, &lam).unwrap();
            for c in &report.checks {
                assert!(
                    c.pass,
                    "check {} failed at t = {}: {:?}",
                    c.name, report.t, c.witness
                );
            }
        }
    }

    #[test]
    fn vacuum_expansion_first_terms() {
        let sp = space(&[&[2]]);
        let lam = vec![half()];
        let s = twisted_vertex(&sp, &lam, &vacuum_vector(), 3).unwrap();
        // Prefactor carries t = 1/2.
        assert_eq!(s.prefactor.log2_coeff, -half());
        assert_eq!(s.prefactor.z_exponent, Rat::new(int(-1), int(4)));
        let c0 = s.coefficient(0).unwrap();
        let empty: Monomial = Vec::new();
        assert_eq!(c0.get(&empty), Some(&Rat::one()));
        let c1 = s.coefficient(1).unwrap();
        let one_mode: Monomial = vec![1];
        assert_eq!(c1.get(&one_mode), Some(&rat_int(2)));
        // Below the target the coefficients vanish identically.
        assert!(s.coefficient(-1).unwrap().is_empty());
        // Above the window the series is not computed.
        assert!(matches!(
            s.coefficient(4),
            Err(FusionError::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn twisted_vertex_is_linear_and_graded() {
        let sp = space(&[&[2]]);
        let lam = vec![rat_int(1)];
        let a = monomial_state(&[1]).unwrap();
        let b = monomial_state(&[3]).unwrap();
        let mut combo = a.clone();
        vector_add_into(&mut combo, &b, &rat_int(5));
        let sa = twisted_vertex(&sp, &lam, &a, 4).unwrap();
        let sb = twisted_vertex(&sp, &lam, &b, 4).unwrap();
        let sc = twisted_vertex(&sp, &lam, &combo, 4).unwrap();
        for doubled in -3..=4 {
            let mut expected = sa.coefficient(doubled).unwrap();
            vector_add_into(&mut expected, &sb.coefficient(doubled).unwrap(), &rat_int(5));
            assert_eq!(sc.coefficient(doubled).unwrap(), expected, "z^{doubled}/2");
        }
        // Grading: on the vacuum, the coefficient at doubled exponent e
        // is homogeneous of doubled degree e.
        let sv = twisted_vertex(&sp, &lam, &vacuum_vector(), 5).unwrap();
        for (e, v) in sv.terms() {
            for m in v.keys() {
                let deg: i64 = m.iter().map(|&x| x as i64).sum();
                assert_eq!(deg, *e);
            }
        }
    }

    #[test]
    fn untwisted_expansion_first_terms() {
        let sp = space(&[&[2]]);
        let lam = vec![rat_int(1)];
        let mu = vec![half()];
        let s = untwisted_vertex(&sp, &lam, &mu, 4).unwrap();
        // Monodromy exponent (lam, mu) = 1.
        assert_eq!(s.prefactor.z_exponent, rat_int(1));
        assert_eq!(s.prefactor.log2_coeff, Rat::zero());
        let c2 = s.coefficient(2).unwrap();
        let m2: Monomial = vec![2];
        let m22: Monomial = vec![2, 2];
        let m4: Monomial = vec![4];
        assert_eq!(c2.get(&m2), Some(&Rat::one()));
        let c4 = s.coefficient(4).unwrap();
        assert_eq!(c4.get(&m22), Some(&half()));
        assert_eq!(c4.get(&m4), Some(&half()));
        // Odd half-integer orders never appear in the untwisted sector.
        assert!(s.coefficient(3).unwrap().is_empty());
    }

    #[test]
    fn twisted_vertex_rejects_bad_inputs() {
        let sp = space(&[&[2]]);
        let zero = vec![Rat::zero()];
        assert!(twisted_vertex(&sp, &zero, &vacuum_vector(), 2).is_err());
        let untwisted_modes = monomial_state(&[2]).unwrap();
        assert!(twisted_vertex(&sp, &[rat_int(1)], &untwisted_modes, 2).is_err());
        assert!(monomial_state(&[0]).is_err());
    }
}
