//! Exact computer algebra for cluster complexes over Novikov rings.
//!
//! Everything is computed over `Q` inside a finite truncation [`Window`]:
//! Leibniz differentials given as data, windowed homology, acyclicity
//! certificates, spectral pages, minimal models, the tilde module and
//! fine Floer complexes.

pub mod algebra;
pub mod certificates;
pub mod complex;
pub mod error;
pub mod fine;
pub mod format;
pub mod homology;
pub mod linalg;
pub mod minimal;
pub mod module;
pub mod novikov;
pub mod scenarios;
pub mod spectral;
pub mod text;
pub mod tilde;
pub mod trees;

/// Exact rationals, the only scalars used anywhere.
pub type Q = num_rational::BigRational;

pub use algebra::{AlgebraMap, Cutoff, Element, Generator, GradedAlgebra, Monomial, Window};
pub use complex::ComplexSpec;
pub use error::{Error, Result};
pub use homology::HomologyReport;
pub use novikov::{ClassBasis, ClassEntry, NovikovExponent};

/// Parses `p` or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: num_bigint::BigInt = num.parse().ok()?;
    let den: num_bigint::BigInt = den.parse().ok()?;
    if den == num_bigint::BigInt::from(0) || den.sign() == num_bigint::Sign::Minus {
        return None;
    }
    Some(Q::new(num, den))
}

/// Prints `p` for integers and `p/q` otherwise.
pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
