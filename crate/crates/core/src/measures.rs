//! Volume elements on spectra and cosets: the signed block density, the
//! naive absolute Vandermonde, invariant coset densities and the polar
//! Jacobian.

use num_traits::{Float, Signed};

use crate::linalg::{CosetPoint, Matrix, Signature};
use crate::Error;

/// Which spectral volume element an integral uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// [`ps_density`], signed across spectral sectors.
    Conjectured,
    /// [`naive_density`], the absolute Vandermonde.
    Naive,
}

impl Measure {
    pub fn density<T: Signed + Copy>(&self, p: &Spectrum<T>) -> T {
        match self {
            Measure::Conjectured => ps_density(p),
            Measure::Naive => naive_density(p),
        }
    }
}

/// Diagonal of `P = diag(P1, P2)`, split into its two signature blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    block1: Vec<T>,
    block2: Vec<T>,
}

impl<T: Copy> Spectrum<T> {
    pub fn new(block1: Vec<T>, block2: Vec<T>) -> Self {
        Self { block1, block2 }
    }

    pub fn block1(&self) -> &[T] {
        &self.block1
    }

    pub fn block2(&self) -> &[T] {
        &self.block2
    }

    pub fn len(&self) -> usize {
        self.block1.len() + self.block2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries of block 1 followed by block 2.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.block1.iter().chain(self.block2.iter())
    }

    pub fn concat(&self) -> Vec<T> {
        self.iter().copied().collect()
    }

    /// Splits `p` after its first `sig.m()` entries.
    pub fn from_slice(sig: Signature, p: &[T]) -> Result<Self, Error> {
        if p.len() != sig.dim() {
            return Err(Error::DimensionMismatch {
                expected: sig.dim(),
                found: p.len(),
            });
        }
        Ok(Self::new(p[..sig.m()].to_vec(), p[sig.m()..].to_vec()))
    }
}

/// `∏_{i<j} (v_i − v_j)`.
pub fn vandermonde<T: Signed + Copy>(v: &[T]) -> T {
    let mut prod = T::one();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            prod = prod * (v[i] - v[j]);
        }
    }
    prod
}

fn cross_product<T: Signed + Copy>(p: &Spectrum<T>) -> T {
    let mut prod = T::one();
    for &a in p.block1() {
        for &b in p.block2() {
            prod = prod * (a - b);
        }
    }
    prod
}

/// Signed density `|Δ(P1)|·|Δ(P2)|·∏(p_{1i} − p_{2j})`.
pub fn ps_density<T: Signed + Copy>(p: &Spectrum<T>) -> T {
    vandermonde(p.block1()).abs() * vandermonde(p.block2()).abs() * cross_product(p)
}

/// `|Δ(P)|` of the whole spectrum.
pub fn naive_density<T: Signed + Copy>(p: &Spectrum<T>) -> T {
    vandermonde(&p.concat()).abs()
}

/// Sign of `∏(p_{1i} − p_{2j})`, zero on a cross-block tie.
pub fn sector_sign<T: Signed + Copy>(p: &Spectrum<T>) -> i8 {
    let c = cross_product(p);
    // Signed::is_positive counts +0.0 for floats
    if c.is_zero() {
        0
    } else if c.is_positive() {
        1
    } else {
        -1
    }
}

/// Number of interleaving orders of the two blocks, `C(m+n, m)`.
pub fn sector_count(sig: Signature) -> u64 {
    let (m, d) = (sig.m() as u64, sig.dim() as u64);
    (1..=m).fold(1u64, |acc, k| acc * (d - m + k) / k)
}

/// `det(1 ∓ ZᵀZ)^{−(m+n)/2}`, upper sign for hyperbolic cosets.
pub fn coset_measure_density<T: Float>(zp: &CosetPoint<T>) -> Result<T, Error> {
    let det = zp.gram_complement()?.det()?;
    if !(det > T::zero()) {
        return Err(Error::NotPositiveDefinite);
    }
    let exponent = T::from(zp.signature().dim()).unwrap() / (T::one() + T::one());
    Ok(det.powf(-exponent))
}

/// Polar coordinates `Z = O(φ1)·diag(r, s)·O(φ2)` of a 2×2 coset point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint<T> {
    pub r: T,
    pub s: T,
    pub angle1: T,
    pub angle2: T,
}

fn rotation<T: Float>(phi: T) -> Matrix<T> {
    let (s, c) = phi.sin_cos();
    Matrix::from_rows(2, 2, vec![c, s, -s, c]).expect("2x2 rotation")
}

/// The matrix `Z` of a polar point.
pub fn polar_to_z<T: Float>(pp: &PolarPoint<T>) -> Matrix<T> {
    let d = Matrix::from_diag(&[pp.r, pp.s]);
    rotation(pp.angle1)
        .matmul(&d)
        .and_then(|m| m.matmul(&rotation(pp.angle2)))
        .expect("2x2 products")
}

/// Jacobian `|r² − s²|` of the polar map.
pub fn polar_jacobian<T: Float>(r: T, s: T) -> T {
    (r * r - s * s).abs()
}
