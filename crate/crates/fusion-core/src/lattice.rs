//! Even positive-definite lattices, their duals and dual-coset labels.
//!
//! A lattice of rank `d` is presented by its Gram matrix `G` with respect
//! to a fixed basis; vectors are given by their rational coordinates in
//! that basis. The lattice consists of the integer coordinate vectors,
//! its dual of the vectors `x` with `G x` integral, and the pairing is
//! `(x, y) = x^T G y`.

use crate::error::{FusionError, Result};
use crate::matrix::{frac, rat_int, IMat, Int, QMat, Quotient, Rat};
use itertools::Itertools;
use num::{Signed, Zero};

/// A validated even positive-definite lattice.
#[derive(Clone)]
pub struct Lattice {
    rank: usize,
    gram: IMat,
    gram_inv: QMat,
    det: Int,
}

/// Checks symmetry, evenness of the diagonal and positive definiteness
/// (all leading principal minors positive), and precomputes the inverse
/// Gram matrix.
pub fn validate_lattice(gram: IMat) -> Result<Lattice> {
    if !gram.is_square() || gram.rows() == 0 {
        return Err(FusionError::NotSquare {
            rows: gram.rows(),
            cols: gram.cols(),
        });
    }
    if let Some((i, j)) = gram.asymmetry() {
        return Err(FusionError::NotSymmetric { i, j });
    }
    let n = gram.rows();
    for i in 0..n {
        if (gram.at(i, i) % 2) != Int::zero() {
            return Err(FusionError::NotEven { i });
        }
    }
    for k in 1..=n {
        if !gram.leading_minor(k).is_positive() {
            return Err(FusionError::NotPositiveDefinite { order: k });
        }
    }
    let det = gram.det();
    let gram_inv = gram
        .to_qmat()
        .inverse()
        .expect("positive determinant implies invertible");
    Ok(Lattice {
        rank: n,
        gram,
        gram_inv,
        det,
    })
}

/// Label for a coset of the lattice inside its dual: the coordinatewise
/// fractional parts of any representative, each in `[0, 1)`. Ordered
/// lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct CosetLabel {
    coords: Vec<Rat>,
}

impl CosetLabel {
    fn from_rep(x: &[Rat]) -> CosetLabel {
        CosetLabel {
            coords: x.iter().map(frac).collect(),
        }
    }

    /// The zero coset of the given rank.
    pub fn zero(rank: usize) -> CosetLabel {
        CosetLabel {
            coords: vec![Rat::zero(); rank],
        }
    }

    /// Canonical representative coordinates, all in `[0, 1)`.
    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Whether the coset is killed by 2, i.e. twice a representative lies
    /// in the lattice.
    pub fn is_two_torsion(&self) -> bool {
        self.coords.iter().all(|c| (c * rat_int(2)).is_integer())
    }

    /// Coset of the sum of representatives.
    pub fn add(&self, other: &CosetLabel) -> CosetLabel {
        CosetLabel {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| frac(&(a + b)))
                .collect(),
        }
    }

    /// Coset of the negated representative.
    pub fn neg(&self) -> CosetLabel {
        CosetLabel {
            coords: self.coords.iter().map(|c| frac(&-c)).collect(),
        }
    }

    /// Coset of the difference of representatives.
    pub fn sub(&self, other: &CosetLabel) -> CosetLabel {
        self.add(&other.neg())
    }

    /// Coset of the doubled representative.
    pub fn double(&self) -> CosetLabel {
        self.add(self)
    }

    /// The smaller of the labels of `C` and `-C`, used to name the
    /// unordered pair `{C, -C}`.
    pub fn pm_label(&self) -> CosetLabel {
        let n = self.neg();
        if n < *self {
            n
        } else {
            self.clone()
        }
    }
}

/// Structure of the finite quotient (dual lattice) / (lattice).
pub struct DiscriminantGroup {
    /// Elementary divisors greater than 1, in the Smith chain order.
    pub elementary_divisors: Vec<Int>,
    /// Dual vectors generating the cyclic factors, aligned with the
    /// divisors.
    pub generator_reps: Vec<Vec<Rat>>,
    /// Order of the group (the lattice determinant).
    pub cardinality: Int,
    quotient: Quotient,
}

impl DiscriminantGroup {
    /// Coordinates of a dual vector along the generators, each reduced
    /// modulo the matching divisor; `None` if the vector is not dual.
    pub fn coords(&self, x: &[Rat]) -> Option<Vec<Int>> {
        self.quotient.coords(x)
    }
}

impl Lattice {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &IMat {
        &self.gram
    }

    pub fn gram_inv(&self) -> &QMat {
        &self.gram_inv
    }

    pub fn det(&self) -> &Int {
        &self.det
    }

    fn check_dim(&self, x: &[Rat]) -> Result<()> {
        if x.len() != self.rank {
            return Err(FusionError::DimensionMismatch {
                expected: self.rank,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// The bilinear pairing `x^T G y`.
    pub fn pairing(&self, x: &[Rat], y: &[Rat]) -> Result<Rat> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let gy = self.gram.mul_rat_vec(y);
        Ok(x.iter().zip(&gy).map(|(a, b)| a * b).sum())
    }

    /// Squared norm `(x, x)`.
    pub fn norm(&self, x: &[Rat]) -> Result<Rat> {
        self.pairing(x, x)
    }

    /// Whether `x` has integer coordinates, i.e. lies in the lattice.
    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.rank && x.iter().all(|c| c.is_integer())
    }

    /// Whether `x` lies in the dual lattice, i.e. `G x` is integral.
    pub fn in_dual(&self, x: &[Rat]) -> bool {
        x.len() == self.rank && self.gram.mul_rat_vec(x).iter().all(|c| c.is_integer())
    }

    /// Coordinates of `x` with respect to the dual basis, i.e. `G x`;
    /// integral exactly when `x` is a dual vector.
    pub fn dual_coords(&self, x: &[Rat]) -> Result<Vec<Int>> {
        self.check_dim(x)?;
        let gx = self.gram.mul_rat_vec(x);
        if !gx.iter().all(|c| c.is_integer()) {
            return Err(FusionError::NotInDual);
        }
        Ok(gx.iter().map(|c| c.to_integer()).collect())
    }

    /// Canonical label of the coset `x + L` in the dual; errors if `x` is
    /// not a dual vector.
    pub fn canonical_coset(&self, x: &[Rat]) -> Result<CosetLabel> {
        self.check_dim(x)?;
        if !self.in_dual(x) {
            return Err(FusionError::NotInDual);
        }
        Ok(CosetLabel::from_rep(x))
    }

    /// Canonical label of the unordered pair of cosets `{x + L, -x + L}`.
    pub fn canonical_pm_coset(&self, x: &[Rat]) -> Result<CosetLabel> {
        Ok(self.canonical_coset(x)?.pm_label())
    }

    /// The discriminant group of the lattice, presented with adapted
    /// generators and a coordinate map.
    pub fn discriminant_group(&self) -> DiscriminantGroup {
        let quotient = Quotient::new(&self.gram_inv, &QMat::identity(self.rank))
            .expect("dual/lattice quotient is always well formed");
        DiscriminantGroup {
            elementary_divisors: quotient.divisors(),
            generator_reps: quotient.generators(),
            cardinality: quotient.order(),
            quotient,
        }
    }

    /// All cosets of order dividing 2 in the discriminant group, sorted.
    pub fn two_torsion_cosets(&self) -> Vec<CosetLabel> {
        let disc = self.discriminant_group();
        let mut halves: Vec<Vec<Rat>> = Vec::new();
        for (d, g) in disc.elementary_divisors.iter().zip(&disc.generator_reps) {
            if (d % 2u8).is_zero() {
                let h: Int = d / 2u8;
                halves.push(g.iter().map(|c| c * Rat::from_integer(h.clone())).collect());
            }
        }
        let mut out = Vec::new();
        // Every 2-torsion element is a 0/1 combination of the half-order
        // generators.
        for mask in 0..(1u64 << halves.len()) {
            let mut x = vec![Rat::zero(); self.rank];
            for (i, h) in halves.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (xc, hc) in x.iter_mut().zip(h) {
                        *xc += hc;
                    }
                }
            }
            out.push(self.canonical_coset(&x).expect("generators are dual vectors"));
        }
        out.sort();
        out.dedup();
        out
    }

    /// All cosets of the discriminant group, sorted; errors if the group
    /// order exceeds `bound`.
    pub fn all_cosets(&self, bound: &Int) -> Result<Vec<CosetLabel>> {
        let disc = self.discriminant_group();
        if &disc.cardinality > bound {
            return Err(FusionError::DeterminantTooLarge {
                order: disc.cardinality.to_string(),
                bound: bound.to_string(),
            });
        }
        let ranges: Vec<Vec<Int>> = disc
            .elementary_divisors
            .iter()
            .map(|d| {
                let mut v = Vec::new();
                let mut c = Int::zero();
                while &c < d {
                    v.push(c.clone());
                    c += 1;
                }
                v
            })
            .collect();
        let mut out = Vec::new();
        if ranges.is_empty() {
            out.push(CosetLabel::zero(self.rank));
        } else {
            for combo in ranges.iter().multi_cartesian_product() {
                let mut x = vec![Rat::zero(); self.rank];
                for (c, g) in combo.iter().zip(&disc.generator_reps) {
                    for (xc, gc) in x.iter_mut().zip(g) {
                        *xc += gc * Rat::from_integer((*c).clone());
                    }
                }
                out.push(self.canonical_coset(&x).expect("combination of dual vectors"));
            }
        }
        out.sort();
        out.dedup();
        assert_eq!(
            Int::from(out.len()),
            disc.cardinality,
            "coset enumeration must hit every class exactly once"
        );
        Ok(out)
    }

    /// A representative with coordinates in `[0, 1)` for a coset label.
    pub fn coset_rep(&self, c: &CosetLabel) -> Vec<Rat> {
        c.coords().to_vec()
    }
}

/// Convenience: parse and validate a Gram matrix given as rows of
/// machine integers.
pub fn lattice_from_rows(rows: &[Vec<i64>]) -> Result<Lattice> {
    validate_lattice(IMat::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{int, rat};

    fn a1() -> Lattice {
        lattice_from_rows(&[vec![2]]).unwrap()
    }

    fn a2() -> Lattice {
        lattice_from_rows(&[vec![2, -1], vec![-1, 2]]).unwrap()
    }

    #[test]
    fn validation_rejects_bad_grams() {
        assert!(matches!(
            lattice_from_rows(&[vec![2, 1], vec![0, 2]]),
            Err(FusionError::NotSymmetric { i: 0, j: 1 })
        ));
        assert!(matches!(
            lattice_from_rows(&[vec![1]]),
            Err(FusionError::NotEven { i: 0 })
        ));
        assert!(matches!(
            lattice_from_rows(&[vec![-2]]),
            Err(FusionError::NotPositiveDefinite { order: 1 })
        ));
        assert!(matches!(
            lattice_from_rows(&[vec![2, 2], vec![2, 2]]),
            Err(FusionError::NotPositiveDefinite { order: 2 })
        ));
    }

    #[test]
    fn pairing_and_dual_membership() {
        let l = a2();
        let x = vec![rat(1, 3), rat(2, 3)];
        assert!(l.in_dual(&x));
        assert!(!l.contains(&x));
        // (x, x) = 2/3 for this dual vector.
        assert_eq!(l.norm(&x).unwrap(), rat(2, 3));
        assert!(!l.in_dual(&[rat(1, 2), rat(0, 1)]));
        assert!(matches!(
            l.pairing(&[rat(1, 2)], &x),
            Err(FusionError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn coset_labels_are_translation_invariant() {
        let l = a1();
        let a = l.canonical_coset(&[rat(1, 2)]).unwrap();
        let b = l.canonical_coset(&[rat(-7, 2)]).unwrap();
        assert_eq!(a, b);
        assert!(a.is_two_torsion());
        let pm = l.canonical_pm_coset(&[rat(1, 2)]).unwrap();
        assert_eq!(pm, a, "self-negative coset");
    }

    #[test]
    fn pm_label_picks_smaller() {
        let l = a2();
        let c = l.canonical_coset(&[rat(1, 3), rat(2, 3)]).unwrap();
        let n = c.neg();
        let pm = c.pm_label();
        assert_eq!(pm, n.pm_label());
        assert!(pm == c.clone().min(n));
    }

    #[test]
    fn discriminant_groups() {
        assert_eq!(a1().discriminant_group().cardinality, int(2));
        assert_eq!(a2().discriminant_group().cardinality, int(3));
        let e8 = lattice_from_rows(&crate::presets::E8_GRAM_ROWS.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        let e8 = e8.unwrap();
        assert_eq!(e8.discriminant_group().cardinality, int(1));
        assert_eq!(*e8.det(), int(1));
    }

    #[test]
    fn two_torsion_and_all_cosets() {
        let l = a1();
        assert_eq!(l.two_torsion_cosets().len(), 2);
        let all = l.all_cosets(&int(100)).unwrap();
        assert_eq!(all.len(), 2);

        let a2 = a2();
        assert_eq!(a2.two_torsion_cosets().len(), 1);
        assert_eq!(a2.all_cosets(&int(100)).unwrap().len(), 3);
        assert!(matches!(
            a2.all_cosets(&int(2)),
            Err(FusionError::DeterminantTooLarge { .. })
        ));

        let dd = lattice_from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(dd.two_torsion_cosets().len(), 4);
        assert_eq!(dd.all_cosets(&int(100)).unwrap().len(), 4);
    }
}
