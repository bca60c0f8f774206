// SPDX-License-Identifier: Apache-2.0

//! Subgroups of ℤ² in Hermite normal form.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The subgroup generated by `(a, 0)` and `(c, d)`, with `a, d ≥ 0`,
/// `0 ≤ c < a` when `a > 0`, and `c = 0` when `d = 0`. Every subgroup of
/// ℤ² has exactly one such form, so equality is structural.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<[i64; 2]>", try_from = "Vec<[i64; 2]>")]
pub struct Lattice2 {
    a: i64,
    c: i64,
    d: i64,
}

impl Lattice2 {
    pub const TRIVIAL: Lattice2 = Lattice2 { a: 0, c: 0, d: 0 };
    pub const FULL: Lattice2 = Lattice2 { a: 1, c: 0, d: 1 };
    /// `{(k, 0) : k ∈ ℤ}`.
    pub const FIRST_AXIS: Lattice2 = Lattice2 { a: 1, c: 0, d: 0 };

    pub fn from_generators<I: IntoIterator<Item = (i64, i64)>>(gens: I) -> Self {
        gens.into_iter().fold(Self::TRIVIAL, |l, g| l.with(g))
    }

    /// The subgroup generated by `self` and `(x, y)`.
    pub fn with(self, (x, y): (i64, i64)) -> Self {
        let Lattice2 {
            mut a,
            mut c,
            mut d,
        } = self;
        if y == 0 {
            a = a.gcd(&x);
        } else if d == 0 {
            (c, d) = if y < 0 { (-x, -y) } else { (x, y) };
        } else {
            let e = d.extended_gcd(&y);
            let (g, s, t) = if e.gcd < 0 {
                (-e.gcd, -e.x, -e.y)
            } else {
                (e.gcd, e.x, e.y)
            };
            // (y/g)(c, d) - (d/g)(x, y) lies on the first axis
            a = a.gcd(&((y * c - d * x) / g));
            (c, d) = (s * c + t * x, g);
        }
        Self::normalized(a, c, d)
    }

    fn normalized(a: i64, c: i64, d: i64) -> Self {
        let c = if d == 0 {
            0
        } else if a > 0 {
            c.rem_euclid(a)
        } else {
            c
        };
        Lattice2 { a, c, d }
    }

    /// Canonical generators, zero vectors omitted.
    pub fn generators(&self) -> Vec<[i64; 2]> {
        let mut out = Vec::new();
        if self.a != 0 {
            out.push([self.a, 0]);
        }
        if self.d != 0 {
            out.push([self.c, self.d]);
        }
        out
    }

    /// `a` with `{k : (k, 0) ∈ L} = aℤ`.
    pub fn first_axis_step(&self) -> i64 {
        self.a
    }

    pub fn contains(&self, (k, m): (i64, i64)) -> bool {
        let rest = if self.d == 0 {
            if m != 0 {
                return false;
            }
            k
        } else {
            if m % self.d != 0 {
                return false;
            }
            k - (m / self.d) * self.c
        };
        if self.a == 0 {
            rest == 0
        } else {
            rest % self.a == 0
        }
    }

    pub fn is_subgroup_of(&self, other: &Lattice2) -> bool {
        self.generators()
            .iter()
            .all(|g| other.contains((g[0], g[1])))
    }
}

impl From<Lattice2> for Vec<[i64; 2]> {
    fn from(l: Lattice2) -> Self {
        l.generators()
    }
}

impl TryFrom<Vec<[i64; 2]>> for Lattice2 {
    type Error = Error;

    fn try_from(gens: Vec<[i64; 2]>) -> Result<Self, Error> {
        Ok(Lattice2::from_generators(
            gens.into_iter().map(|g| (g[0], g[1])),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(Lattice2::from_generators([(1, 0), (0, 1)]), Lattice2::FULL);
        assert_eq!(Lattice2::from_generators([(2, 3), (1, 1)]), Lattice2::FULL);
        assert_eq!(Lattice2::from_generators([(0, 0)]), Lattice2::TRIVIAL);
        assert_eq!(
            Lattice2::from_generators([(-3, 0), (6, 0)]).generators(),
            vec![[3, 0]]
        );
        let l = Lattice2::from_generators([(4, 6), (2, 2)]);
        // (4,6) - 2(2,2) = (0,2); (2,2) - (0,2) = (2,0)
        assert_eq!(l, Lattice2::from_generators([(2, 0), (0, 2)]));
        assert!(l.contains((2, 2)) && !l.contains((1, 1)) && !l.contains((0, 1)));
    }

    #[test]
    fn membership_agrees_with_brute_force() {
        // index 31; the third generator is redundant
        let gens = [(3, 5), (-2, 7), (6, 10)];
        let l = Lattice2::from_generators(gens);
        let mut spanned = std::collections::HashSet::new();
        for i in -6..=6i64 {
            for j in -6..=6i64 {
                for h in -6..=6i64 {
                    spanned.insert((3 * i - 2 * j + 6 * h, 5 * i + 7 * j + 10 * h));
                }
            }
        }
        for k in -5..=5 {
            for m in -5..=5 {
                assert_eq!(l.contains((k, m)), spanned.contains(&(k, m)), "({k},{m})");
            }
        }
    }

    #[test]
    fn serde_as_generator_list() {
        let json = serde_json::to_string(&Lattice2::FIRST_AXIS).unwrap();
        assert_eq!(json, "[[1,0]]");
        let back: Lattice2 = serde_json::from_str("[[1,0],[5,1]]").unwrap();
        assert_eq!(back, Lattice2::FULL);
    }
}
