//! Concrete finite-dimensional C*-ternary algebras.
//!
//! Three families are provided:
//!
//! * [`AlgebraDescriptor::MatrixConjugation`]: `n × n` complex matrices with
//!   `[a, b, c] = a · b* · c` and the operator norm. Unital, noncommutative.
//! * [`AlgebraDescriptor::PointwiseDiagonal`]: `ℂ^d` with the componentwise
//!   product `aᵢ · conj(bᵢ) · cᵢ` and the sup norm. Unital, commutative.
//! * [`AlgebraDescriptor::InnerProductModule`]: `ℂ^d` as a Hilbert module over
//!   `ℂ`, `[a, b, c] = ⟨a, b⟩ c` with the Euclidean norm. No unit for `d > 1`.
//!
//! Elements are immutable values; every operation returns a fresh element.

mod axioms;
pub(crate) mod dense;
mod random;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use axioms::{
    axiom_violations, check_axioms, induced_cstar_check, induced_cstar_violations, AxiomLaw, AxiomReport,
    InducedLaw,
};
pub use random::{random_element, random_in_ball, random_unitary};

/// Complex scalars. Public operations reject non-finite components.
pub type ComplexScalar = Complex64;

pub const MAX_MATRIX_ORDER: usize = 16;
pub const MAX_VECTOR_DIM: usize = 256;

/// Which concrete algebra, and its size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlgebraDescriptor {
    MatrixConjugation(usize),
    PointwiseDiagonal(usize),
    InnerProductModule(usize),
}

impl AlgebraDescriptor {
    pub fn matrix(n: usize) -> Result<Self> {
        AlgebraDescriptor::MatrixConjugation(n).validated()
    }

    pub fn diagonal(d: usize) -> Result<Self> {
        AlgebraDescriptor::PointwiseDiagonal(d).validated()
    }

    pub fn module(d: usize) -> Result<Self> {
        AlgebraDescriptor::InnerProductModule(d).validated()
    }

    /// Checks the size bounds, returning `self` on success.
    pub fn validated(self) -> Result<Self> {
        let (size, cap) = match self {
            AlgebraDescriptor::MatrixConjugation(n) => (n, MAX_MATRIX_ORDER),
            AlgebraDescriptor::PointwiseDiagonal(d) | AlgebraDescriptor::InnerProductModule(d) => {
                (d, MAX_VECTOR_DIM)
            }
        };
        if size == 0 || size > cap {
            return Err(Error::Validation(format!("{self}: size must lie in 1..={cap}")));
        }
        Ok(self)
    }

    /// Number of complex entries in an element.
    pub fn len(&self) -> usize {
        match *self {
            AlgebraDescriptor::MatrixConjugation(n) => n * n,
            AlgebraDescriptor::PointwiseDiagonal(d) | AlgebraDescriptor::InnerProductModule(d) => d,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_unital(&self) -> bool {
        match *self {
            AlgebraDescriptor::MatrixConjugation(_) | AlgebraDescriptor::PointwiseDiagonal(_) => true,
            AlgebraDescriptor::InnerProductModule(d) => d == 1,
        }
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraDescriptor::MatrixConjugation(n) => write!(f, "matrix:{n}"),
            AlgebraDescriptor::PointwiseDiagonal(d) => write!(f, "diag:{d}"),
            AlgebraDescriptor::InnerProductModule(d) => write!(f, "module:{d}"),
        }
    }
}

impl FromStr for AlgebraDescriptor {
    type Err = Error;

    /// Parses `matrix:N`, `diag:D` or `module:D`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, size) =
            s.split_once(':').ok_or_else(|| Error::Config(format!("algebra `{s}`: expected KIND:SIZE")))?;
        let size: usize =
            size.trim().parse().map_err(|_| Error::Config(format!("algebra `{s}`: bad size")))?;
        let descriptor = match kind.trim() {
            "matrix" => AlgebraDescriptor::MatrixConjugation(size),
            "diag" => AlgebraDescriptor::PointwiseDiagonal(size),
            "module" => AlgebraDescriptor::InnerProductModule(size),
            other => {
                return Err(Error::Config(format!("algebra kind `{other}`: expected matrix, diag or module")))
            }
        };
        descriptor.validated()
    }
}

impl TryFrom<String> for AlgebraDescriptor {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AlgebraDescriptor> for String {
    fn from(d: AlgebraDescriptor) -> String {
        d.to_string()
    }
}

/// A dense element of one algebra. Matrices are stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    algebra: AlgebraDescriptor,
    data: Vec<Complex64>,
}

fn all_finite(data: &[Complex64]) -> bool {
    data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

impl Element {
    pub fn new(algebra: AlgebraDescriptor, data: Vec<Complex64>) -> Result<Self> {
        let algebra = algebra.validated()?;
        if data.len() != algebra.len() {
            return Err(Error::shape(
                format!("{} entries for {algebra}", algebra.len()),
                format!("{} entries", data.len()),
            ));
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("Element::new"));
        }
        Ok(Element { algebra, data })
    }

    /// Convenience constructor from real entries.
    pub fn from_real(algebra: AlgebraDescriptor, data: &[f64]) -> Result<Self> {
        Self::new(algebra, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    fn checked(algebra: AlgebraDescriptor, data: Vec<Complex64>, op: &'static str) -> Result<Self> {
        if all_finite(&data) {
            Ok(Element { algebra, data })
        } else {
            Err(Error::NonFinite(op))
        }
    }

    pub fn zeros(algebra: AlgebraDescriptor) -> Self {
        Element { algebra, data: vec![Complex64::new(0.0, 0.0); algebra.len()] }
    }

    /// The `k`-th standard basis element (`E_{ij}` with `k = i·n + j` for matrices).
    pub fn basis(algebra: AlgebraDescriptor, k: usize) -> Result<Self> {
        if k >= algebra.len() {
            return Err(Error::shape(format!("basis index < {}", algebra.len()), k));
        }
        let mut e = Self::zeros(algebra);
        e.data[k] = Complex64::new(1.0, 0.0);
        Ok(e)
    }

    pub fn algebra(&self) -> AlgebraDescriptor {
        self.algebra
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    fn same_algebra(&self, other: &Element) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::shape(self.algebra, other.algebra))
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.same_algebra(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::checked(self.algebra, data, "add")
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.same_algebra(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self::checked(self.algebra, data, "sub")
    }

    pub fn scale(&self, lambda: ComplexScalar) -> Result<Element> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::NonFinite("scale factor"));
        }
        let data = self.data.iter().map(|z| lambda * z).collect();
        Self::checked(self.algebra, data, "scale")
    }

    pub fn scale_real(&self, factor: f64) -> Result<Element> {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Element {
        Element { algebra: self.algebra, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Element) -> Result<f64> {
        self.sub(other)?.norm()
    }

    /// The algebra's norm: operator norm, sup norm or Euclidean norm.
    pub fn norm(&self) -> Result<f64> {
        match self.algebra {
            AlgebraDescriptor::MatrixConjugation(n) => dense::operator_norm(n, &self.data),
            AlgebraDescriptor::PointwiseDiagonal(_) => {
                Ok(self.data.iter().map(|z| z.norm()).fold(0.0, f64::max))
            }
            AlgebraDescriptor::InnerProductModule(_) => Ok(self.euclidean_norm()),
        }
    }

    /// Euclidean (Frobenius) norm of the raw entries.
    pub fn euclidean_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `[e, x, e]` for matrices and diagonals: the conjugate transpose / conjugate.
    pub fn adjoint(&self) -> Result<Element> {
        match self.algebra {
            AlgebraDescriptor::MatrixConjugation(n) => {
                Ok(Element { algebra: self.algebra, data: dense::adjoint(n, &self.data) })
            }
            AlgebraDescriptor::PointwiseDiagonal(_) => Ok(self.conj()),
            AlgebraDescriptor::InnerProductModule(_) => Err(Error::Unsupported {
                descriptor: self.algebra,
                reason: "adjoint is defined only for unital algebras",
            }),
        }
    }

    /// Ordinary matrix product `self · other` (MatrixConjugation only).
    pub fn matmul(&self, other: &Element) -> Result<Element> {
        self.same_algebra(other)?;
        match self.algebra {
            AlgebraDescriptor::MatrixConjugation(n) => {
                Self::checked(self.algebra, dense::matmul(n, &self.data, &other.data), "matmul")
            }
            _ => Err(Error::Unsupported {
                descriptor: self.algebra,
                reason: "matrix product requires a matrix algebra",
            }),
        }
    }

    /// Frobenius inner product `Σ aᵢ conj(bᵢ)` of the raw entries.
    pub fn inner(&self, other: &Element) -> Result<Complex64> {
        self.same_algebra(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum())
    }
}

/// The ternary product `[a, b, c]`.
pub fn ternary_product(a: &Element, b: &Element, c: &Element) -> Result<Element> {
    a.same_algebra(b)?;
    a.same_algebra(c)?;
    let algebra = a.algebra;
    let data = match algebra {
        AlgebraDescriptor::MatrixConjugation(n) => {
            dense::matmul(n, &dense::matmul_adj(n, &a.data, &b.data), &c.data)
        }
        AlgebraDescriptor::PointwiseDiagonal(_) => {
            a.data.iter().zip(&b.data).zip(&c.data).map(|((x, y), z)| x * y.conj() * z).collect()
        }
        AlgebraDescriptor::InnerProductModule(_) => {
            let pairing: Complex64 = a.data.iter().zip(&b.data).map(|(x, y)| x * y.conj()).sum();
            c.data.iter().map(|z| pairing * z).collect()
        }
    };
    Element::checked(algebra, data, "ternary_product")
}

/// The unit `e` with `[x, e, e] = [e, e, x] = x`, when one exists.
pub fn unit(algebra: AlgebraDescriptor) -> Option<Element> {
    match algebra {
        AlgebraDescriptor::MatrixConjugation(n) => {
            let mut e = Element::zeros(algebra);
            for i in 0..n {
                e.data[i * n + i] = Complex64::new(1.0, 0.0);
            }
            Some(e)
        }
        AlgebraDescriptor::PointwiseDiagonal(d) => {
            Some(Element { algebra, data: vec![Complex64::new(1.0, 0.0); d] })
        }
        // For d = 1 the module is ℂ itself with [a, b, c] = a·conj(b)·c.
        AlgebraDescriptor::InnerProductModule(1) => {
            Some(Element { algebra, data: vec![Complex64::new(1.0, 0.0)] })
        }
        AlgebraDescriptor::InnerProductModule(_) => None,
    }
}
