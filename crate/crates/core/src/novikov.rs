//! Classes of the Novikov group: exponent vectors over a declared basis of
//! (Maslov, area) classes, plus the word-area weight.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::Q;

/// One declared class: its name, Maslov index and symplectic area.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntry {
    pub name: String,
    pub maslov: i64,
    pub area: Q,
}

/// The user-declared basis of the class group together with the minimal
/// disk area `epsilon_D` used by the weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassBasis {
    pub entries: Vec<ClassEntry>,
    pub epsilon_d: Q,
}

impl ClassBasis {
    pub fn new(entries: Vec<ClassEntry>, epsilon_d: Q) -> Result<Self> {
        if epsilon_d <= Q::zero() {
            return Err(Error::Invalid("epsilon_D must be positive".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.name == e.name) {
                return Err(Error::Invalid(format!("duplicate class `{}`", e.name)));
            }
            if e.area < Q::zero() {
                return Err(Error::Invalid(format!(
                    "class `{}` has negative area",
                    e.name
                )));
            }
        }
        Ok(ClassBasis { entries, epsilon_d })
    }

    /// A basis with no classes (the no-bubbling case).
    pub fn empty(epsilon_d: Q) -> Self {
        ClassBasis {
            entries: Vec::new(),
            epsilon_d,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn zero(&self) -> NovikovExponent {
        NovikovExponent::zero(self.len())
    }

    /// The exponent of a single basis class.
    pub fn unit(&self, name: &str) -> Result<NovikovExponent> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))?;
        let mut v = vec![0; self.len()];
        v[i] = 1;
        Ok(NovikovExponent(v))
    }

    fn check(&self, e: &NovikovExponent) -> Result<()> {
        if e.0.len() != self.len() {
            return Err(Error::BasisMismatch {
                expected: self.len(),
                found: e.0.len(),
            });
        }
        Ok(())
    }

    /// `(mu(lambda), omega(lambda))`.
    pub fn maslov_area(&self, e: &NovikovExponent) -> Result<(i64, Q)> {
        self.check(e)?;
        Ok((self.maslov_unchecked(e), self.area_unchecked(e)))
    }

    pub(crate) fn maslov_unchecked(&self, e: &NovikovExponent) -> i64 {
        e.0.iter()
            .zip(&self.entries)
            .map(|(c, entry)| c * entry.maslov)
            .sum()
    }

    pub(crate) fn area_unchecked(&self, e: &NovikovExponent) -> Q {
        e.0.iter()
            .zip(&self.entries)
            .fold(Q::zero(), |acc, (c, entry)| {
                acc + &entry.area * Q::from_integer((*c).into())
            })
    }

    /// Word-area weight `k + 2 omega(lambda) / epsilon_D`.
    pub fn weight(&self, word_len: u32, e: &NovikovExponent) -> Result<Q> {
        self.check(e)?;
        Ok(self.weight_unchecked(word_len, e))
    }

    pub(crate) fn weight_unchecked(&self, word_len: u32, e: &NovikovExponent) -> Q {
        Q::from_integer(word_len.into())
            + self.area_unchecked(e) * Q::from_integer(2.into()) / &self.epsilon_d
    }
}

/// An element of the class group, as integer coordinates in a [`ClassBasis`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NovikovExponent(pub Vec<i64>);

impl NovikovExponent {
    pub fn zero(len: usize) -> Self {
        NovikovExponent(vec![0; len])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Group law: componentwise sum.
    pub fn combine(&self, other: &NovikovExponent) -> Result<NovikovExponent> {
        if self.0.len() != other.0.len() {
            return Err(Error::BasisMismatch {
                expected: self.0.len(),
                found: other.0.len(),
            });
        }
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &NovikovExponent) -> NovikovExponent {
        NovikovExponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn negate(&self) -> NovikovExponent {
        NovikovExponent(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &NovikovExponent) -> Result<NovikovExponent> {
        self.combine(&other.negate())
    }
}

/// Displays as `2*lam0 - lam1`, or `0` for the zero class.
pub struct ExponentDisplay<'a> {
    pub exponent: &'a NovikovExponent,
    pub basis: &'a ClassBasis,
}

impl fmt::Display for ExponentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, entry) in self.exponent.0.iter().zip(&self.basis.entries) {
            if *c == 0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else if *c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mag == 1 {
                write!(f, "{}", entry.name)?;
            } else {
                write!(f, "{}*{}", mag, entry.name)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn basis2() -> ClassBasis {
        ClassBasis::new(
            vec![
                ClassEntry {
                    name: "lam0".into(),
                    maslov: 2,
                    area: q(1, 1),
                },
                ClassEntry {
                    name: "lam1".into(),
                    maslov: 0,
                    area: q(3, 2),
                },
            ],
            q(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn combine_identity_inverse_componentwise() {
        let b = basis2();
        let lam0 = b.unit("lam0").unwrap();
        assert_eq!(lam0.combine(&b.zero()).unwrap(), lam0);
        assert!(lam0.combine(&lam0.negate()).unwrap().is_zero());
        let x = NovikovExponent(vec![1, 0]);
        let y = NovikovExponent(vec![0, 2]);
        assert_eq!(x.combine(&y).unwrap(), NovikovExponent(vec![1, 2]));
    }

    #[test]
    fn combine_rejects_mismatched_lengths() {
        let err = NovikovExponent(vec![1]).combine(&NovikovExponent(vec![1, 2]));
        assert!(matches!(err, Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn maslov_area_values() {
        let b = ClassBasis::new(
            vec![ClassEntry {
                name: "lam0".into(),
                maslov: 2,
                area: q(1, 1),
            }],
            q(1, 1),
        )
        .unwrap();
        assert_eq!(b.maslov_area(&b.zero()).unwrap(), (0, q(0, 1)));
        assert_eq!(
            b.maslov_area(&NovikovExponent(vec![1])).unwrap(),
            (2, q(1, 1))
        );
        assert_eq!(
            b.maslov_area(&NovikovExponent(vec![-1])).unwrap(),
            (-2, q(-1, 1))
        );
    }

    #[test]
    fn weight_values() {
        let b = ClassBasis::new(
            vec![ClassEntry {
                name: "lam0".into(),
                maslov: 2,
                area: q(1, 1),
            }],
            q(1, 1),
        )
        .unwrap();
        assert_eq!(b.weight(0, &b.zero()).unwrap(), q(0, 1));
        assert_eq!(b.weight(1, &NovikovExponent(vec![1])).unwrap(), q(3, 1));
        assert_eq!(b.weight(0, &NovikovExponent(vec![-1])).unwrap(), q(-2, 1));
    }

    #[test]
    fn basis_validation() {
        assert!(ClassBasis::new(vec![], q(0, 1)).is_err());
        let dup = vec![
            ClassEntry {
                name: "a".into(),
                maslov: 2,
                area: q(1, 1),
            },
            ClassEntry {
                name: "a".into(),
                maslov: 2,
                area: q(1, 1),
            },
        ];
        assert!(ClassBasis::new(dup, q(1, 1)).is_err());
        assert!(ClassBasis::new(vec![], q(1, 2)).unwrap().is_empty());
    }

    #[test]
    fn display() {
        let b = basis2();
        let e = NovikovExponent(vec![2, -1]);
        assert_eq!(
            ExponentDisplay {
                exponent: &e,
                basis: &b
            }
            .to_string(),
            "2*lam0 - lam1"
        );
        let z = b.zero();
        assert_eq!(
            ExponentDisplay {
                exponent: &z,
                basis: &b
            }
            .to_string(),
            "0"
        );
        let n = NovikovExponent(vec![-1, 0]);
        assert_eq!(
            ExponentDisplay {
                exponent: &n,
                basis: &b
            }
            .to_string(),
            "-lam0"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn weight_is_additive(k1 in 0u32..6, k2 in 0u32..6,
                                  a in proptest::collection::vec(-4i64..5, 2),
                                  b in proptest::collection::vec(-4i64..5, 2)) {
                let basis = basis2();
                let (a, b) = (NovikovExponent(a), NovikovExponent(b));
                let sum = a.combine(&b).unwrap();
                prop_assert_eq!(
                    basis.weight(k1 + k2, &sum).unwrap(),
                    basis.weight(k1, &a).unwrap() + basis.weight(k2, &b).unwrap()
                );
            }

            #[test]
            fn maslov_area_is_homomorphism(a in proptest::collection::vec(-4i64..5, 2),
                                           b in proptest::collection::vec(-4i64..5, 2)) {
                let basis = basis2();
                let (a, b) = (NovikovExponent(a), NovikovExponent(b));
                let (ma, wa) = basis.maslov_area(&a).unwrap();
                let (mb, wb) = basis.maslov_area(&b).unwrap();
                let (ms, ws) = basis.maslov_area(&a.combine(&b).unwrap()).unwrap();
                prop_assert_eq!(ms, ma + mb);
                prop_assert_eq!(ws, wa + wb);
            }
        }
    }
}
