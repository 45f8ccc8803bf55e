//! Named Gram matrices used by the command line tool, the tests and the
//! benchmarks.

use crate::error::{FusionError, Result};
use crate::lattice::{lattice_from_rows, Lattice};
use num::One;

/// Gram matrix of the rank-one root lattice with `(a, a) = 2`.
pub const A1_GRAM_ROWS: [[i64; 1]; 1] = [[2]];

/// Gram matrix of the rank-two root lattice with Coxeter diagram `o--o`.
pub const A2_GRAM_ROWS: [[i64; 2]; 2] = [[2, -1], [-1, 2]];

/// Gram matrix of the even unimodular lattice of rank eight, in the
/// standard simple-root basis (nodes numbered with the branch at node 2).
pub const E8_GRAM_ROWS: [[i64; 8]; 8] = [
    [2, 0, -1, 0, 0, 0, 0, 0],
    [0, 2, 0, -1, 0, 0, 0, 0],
    [-1, 0, 2, -1, 0, 0, 0, 0],
    [0, -1, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, 0, 0, -1, 2],
];

fn rows_to_vecs<const N: usize>(rows: &[[i64; N]]) -> Vec<Vec<i64>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

/// The rank-one lattice scaled so that the generator has norm `2k`.
pub fn a1_scaled(k: i64) -> Result<Lattice> {
    if k < 1 {
        return Err(FusionError::Parse(format!(
            "scale factor in A1({k}) must be a positive integer"
        )));
    }
    lattice_from_rows(&[vec![2 * k]])
}

/// Orthogonal sum of two copies of the rank-one root lattice.
pub fn a1_plus_a1() -> Lattice {
    lattice_from_rows(&[vec![2, 0], vec![0, 2]]).expect("fixed valid gram")
}

pub fn a1() -> Lattice {
    lattice_from_rows(&rows_to_vecs(&A1_GRAM_ROWS)).expect("fixed valid gram")
}

pub fn a2() -> Lattice {
    lattice_from_rows(&rows_to_vecs(&A2_GRAM_ROWS)).expect("fixed valid gram")
}

/// The rank-eight even unimodular lattice; validated on every load, and
/// its determinant is checked to be one.
pub fn e8() -> Lattice {
    let l = lattice_from_rows(&rows_to_vecs(&E8_GRAM_ROWS)).expect("fixed valid gram");
    assert!(l.det().is_one(), "the rank-eight preset must be unimodular");
    l
}

/// Looks up a preset by name. Accepted names: `A1`, `A2`, `A1+A1`, `E8`
/// and `A1(k)` for a positive integer `k` (generator of norm `2k`).
pub fn by_name(name: &str) -> Result<Lattice> {
    let trimmed = name.trim();
    match trimmed {
        "A1" => Ok(a1()),
        "A2" => Ok(a2()),
        "A1+A1" => Ok(a1_plus_a1()),
        "E8" => Ok(e8()),
        _ => {
            if let Some(rest) = trimmed.strip_prefix("A1(").and_then(|r| r.strip_suffix(')')) {
                let k: i64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| FusionError::Parse(format!("bad scale in preset {trimmed:?}")))?;
                a1_scaled(k)
            } else {
                Err(FusionError::Parse(format!(
                    "unknown preset {trimmed:?}; expected A1, A2, A1+A1, E8 or A1(k)"
                )))
            }
        }
    }
}

/// The lattices exercised by the verification corpus, with display names.
pub fn corpus() -> Vec<(&'static str, Lattice)> {
    vec![
        ("A1", a1()),
        ("A1(2)", a1_scaled(2).expect("fixed valid gram")),
        ("A2", a2()),
        ("A1+A1", a1_plus_a1()),
        ("E8", e8()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    #[test]
    fn presets_load_and_have_expected_determinants() {
        assert_eq!(*a1().det(), int(2));
        assert_eq!(*a2().det(), int(3));
        assert_eq!(*a1_plus_a1().det(), int(4));
        assert_eq!(*e8().det(), int(1));
        assert_eq!(*a1_scaled(3).unwrap().det(), int(6));
    }

    #[test]
    fn by_name_parses() {
        assert_eq!(by_name("A1(4)").unwrap().rank(), 1);
        assert_eq!(by_name(" E8 ").unwrap().rank(), 8);
        assert!(by_name("D4").is_err());
        assert!(by_name("A1(0)").is_err());
        assert!(by_name("A1(x)").is_err());
    }
}
