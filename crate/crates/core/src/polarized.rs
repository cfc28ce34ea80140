//! Block operators over a truncated polarization `H = H₊ ⊕ H₋`.
//!
//! An operator is stored as one dense `(n₊ + n₋)²` matrix; the first `n₊`
//! basis vectors span `H₊`. Block accessors return copies of the `++`, `+-`,
//! `-+` and `--` corners.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg;
use crate::{CMatrix, C64};

/// Default tolerance for real-form membership tests.
pub const REAL_FORM_TOLERANCE: f64 = 1e-12;

/// Truncation dimensions of `H₊` and `H₋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Dims {
    pub fn new(n_plus: usize, n_minus: usize) -> Result<Self> {
        if n_plus == 0 || n_minus == 0 {
            return Err(Error::InvalidDims { n_plus, n_minus });
        }
        Ok(Self { n_plus, n_minus })
    }

    pub fn total(&self) -> usize {
        self.n_plus + self.n_minus
    }
}

/// One of the four corners of the block decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::PlusPlus, Block::PlusMinus, Block::MinusPlus, Block::MinusMinus];

    /// (row offset, column offset, rows, columns)
    fn window(self, d: Dims) -> (usize, usize, usize, usize) {
        let (p, m) = (d.n_plus, d.n_minus);
        match self {
            Block::PlusPlus => (0, 0, p, p),
            Block::PlusMinus => (0, p, p, m),
            Block::MinusPlus => (p, 0, m, p),
            Block::MinusMinus => (p, p, m, m),
        }
    }
}

/// A polarized operator: a square complex matrix with block structure fixed by
/// [`Dims`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    dims: Dims,
    m: CMatrix,
}

impl BlockOperator {
    pub fn zeros(dims: Dims) -> Self {
        let n = dims.total();
        Self { dims, m: CMatrix::zeros(n, n) }
    }

    pub fn identity(dims: Dims) -> Self {
        Self { dims, m: linalg::identity(dims.total()) }
    }

    /// The orthogonal projector `P₊` onto `H₊`.
    pub fn p_plus(dims: Dims) -> Self {
        let mut out = Self::zeros(dims);
        for i in 0..dims.n_plus {
            out.m[(i, i)] = C64::new(1.0, 0.0);
        }
        out
    }

    pub fn from_matrix(dims: Dims, m: CMatrix) -> Result<Self> {
        let n = dims.total();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n}x{n} matrix for {dims:?}, found {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite("block operator entries".into()));
        }
        Ok(Self { dims, m })
    }

    pub fn from_blocks(dims: Dims, app: &CMatrix, apm: &CMatrix, amp: &CMatrix, amm: &CMatrix) -> Result<Self> {
        let mut out = Self::zeros(dims);
        for (b, src) in Block::ALL.into_iter().zip([app, apm, amp, amm]) {
            out.set_block(b, src)?;
        }
        if !linalg::is_finite(&out.m) {
            return Err(Error::NonFinite("block operator entries".into()));
        }
        Ok(out)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn block(&self, b: Block) -> CMatrix {
        let (r, c, nr, nc) = b.window(self.dims);
        self.m.view((r, c), (nr, nc)).into_owned()
    }

    pub fn app(&self) -> CMatrix {
        self.block(Block::PlusPlus)
    }

    pub fn apm(&self) -> CMatrix {
        self.block(Block::PlusMinus)
    }

    pub fn amp(&self) -> CMatrix {
        self.block(Block::MinusPlus)
    }

    pub fn amm(&self) -> CMatrix {
        self.block(Block::MinusMinus)
    }

    pub fn set_block(&mut self, b: Block, src: &CMatrix) -> Result<()> {
        let (r, c, nr, nc) = b.window(self.dims);
        if src.nrows() != nr || src.ncols() != nc {
            return Err(Error::ShapeMismatch(format!(
                "{b:?} block must be {nr}x{nc}, found {}x{}",
                src.nrows(),
                src.ncols()
            )));
        }
        self.m.view_mut((r, c), (nr, nc)).copy_from(src);
        Ok(())
    }

    /// Keeps only the given block, zeroing the other three.
    pub fn restrict_to(&self, b: Block) -> Self {
        let mut out = Self::zeros(self.dims);
        let (r, c, nr, nc) = b.window(self.dims);
        out.m.view_mut((r, c), (nr, nc)).copy_from(&self.m.view((r, c), (nr, nc)));
        out
    }

    pub fn diagonal_part(&self) -> Self {
        &self.restrict_to(Block::PlusPlus) + &self.restrict_to(Block::MinusMinus)
    }

    pub fn off_diagonal_part(&self) -> Self {
        &self.restrict_to(Block::PlusMinus) + &self.restrict_to(Block::MinusPlus)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.dims, found: other.dims });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { dims: self.dims, m: &self.m + &other.m })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { dims: self.dims, m: &self.m - &other.m })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { dims: self.dims, m: &self.m * &other.m })
    }

    /// `[a, b] = ab - ba`.
    pub fn try_commutator(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { dims: self.dims, m: &self.m * &other.m - &other.m * &self.m })
    }

    /// Commutator; panics on dimension mismatch.
    pub fn commutator(&self, other: &Self) -> Self {
        self.try_commutator(other).expect("commutator of operators with different dims")
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { dims: self.dims, m: &self.m * c }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self { dims: self.dims, m: self.m.adjoint() }
    }

    pub fn add_identity(&self, c: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dims.total() {
            out.m[(i, i)] += c;
        }
        out
    }

    /// `self + c·P₊`.
    pub fn add_p_plus(&self, c: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dims.n_plus {
            out.m[(i, i)] += c;
        }
        out
    }

    /// `P₊·self`, formed by zeroing the `-` rows.
    pub fn p_plus_left(&self) -> Self {
        let mut out = self.clone();
        let (p, n) = (self.dims.n_plus, self.dims.total());
        out.m.view_mut((p, 0), (n - p, n)).fill(C64::default());
        out
    }

    /// `self·P₊`, formed by zeroing the `-` columns.
    pub fn p_plus_right(&self) -> Self {
        let mut out = self.clone();
        let (p, n) = (self.dims.n_plus, self.dims.total());
        out.m.view_mut((0, p), (n, n - p)).fill(C64::default());
        out
    }

    /// `[P₊, self] = P₊·self·P₋ − P₋·self·P₊`; diagonal blocks are exactly zero.
    pub fn p_plus_commutator(&self) -> Self {
        let mut out = self.restrict_to(Block::PlusMinus);
        let (r, c, nr, nc) = Block::MinusPlus.window(self.dims);
        out.m.view_mut((r, c), (nr, nc)).copy_from(&(-self.m.view((r, c), (nr, nc)).into_owned()));
        out
    }

    /// `Tr(A₊₊) + Tr(A₋₋)`.
    pub fn restricted_trace(&self) -> C64 {
        // the two diagonal blocks tile the full diagonal
        self.m.trace()
    }

    /// `‖A₊₊‖₁ + ‖A₋₋‖₁ + ‖A₋₊‖₂ + ‖A₊₋‖₂`.
    pub fn star_norm(&self) -> f64 {
        linalg::trace_norm(&self.app())
            + linalg::trace_norm(&self.amm())
            + linalg::frobenius_norm(&self.amp())
            + linalg::frobenius_norm(&self.apm())
    }

    /// `‖A₊₊‖_∞ + ‖A₋₋‖_∞ + ‖A₋₊‖₂ + ‖A₊₋‖₂`.
    pub fn res_norm(&self) -> f64 {
        linalg::operator_norm(&self.app())
            + linalg::operator_norm(&self.amm())
            + linalg::frobenius_norm(&self.amp())
            + linalg::frobenius_norm(&self.apm())
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius_norm(&self.m)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖A + A⁺‖_F`, zero exactly for skew-hermitian operators.
    pub fn skew_hermitian_residual(&self) -> f64 {
        linalg::frobenius_norm(&(&self.m + self.m.adjoint()))
    }

    pub fn is_finite(&self) -> bool {
        linalg::is_finite(&self.m)
    }
}

impl Add for &BlockOperator {
    type Output = BlockOperator;
    fn add(self, rhs: &BlockOperator) -> BlockOperator {
        self.try_add(rhs).expect("sum of operators with different dims")
    }
}

impl Sub for &BlockOperator {
    type Output = BlockOperator;
    fn sub(self, rhs: &BlockOperator) -> BlockOperator {
        self.try_sub(rhs).expect("difference of operators with different dims")
    }
}

impl Mul for &BlockOperator {
    type Output = BlockOperator;
    fn mul(self, rhs: &BlockOperator) -> BlockOperator {
        self.try_mul(rhs).expect("product of operators with different dims")
    }
}

impl Neg for &BlockOperator {
    type Output = BlockOperator;
    fn neg(self) -> BlockOperator {
        BlockOperator { dims: self.dims, m: -&self.m }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for BlockOperator {
            type Output = BlockOperator;
            fn $method(self, rhs: BlockOperator) -> BlockOperator {
                (&self).$method(&rhs)
            }
        }

        impl $tr<&BlockOperator> for BlockOperator {
            type Output = BlockOperator;
            fn $method(self, rhs: &BlockOperator) -> BlockOperator {
                (&self).$method(rhs)
            }
        }

        impl $tr<BlockOperator> for &BlockOperator {
            type Output = BlockOperator;
            fn $method(self, rhs: BlockOperator) -> BlockOperator {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BlockOperator {
    type Output = BlockOperator;
    fn neg(self) -> BlockOperator {
        -&self
    }
}

/// `P₊` for the given truncation.
pub fn projector_p_plus(dims: Dims) -> BlockOperator {
    BlockOperator::p_plus(dims)
}

pub fn restricted_trace(a: &BlockOperator) -> C64 {
    a.restricted_trace()
}

pub fn star_norm(a: &BlockOperator) -> f64 {
    a.star_norm()
}

pub fn res_norm(x: &BlockOperator) -> f64 {
    x.res_norm()
}

/// The trace pairing `⟨μ, A⟩ = Tr_res(μA)` between `L¹_res` and `gl_res`.
pub fn pairing(mu: &BlockOperator, x: &BlockOperator) -> Result<C64> {
    mu.check(x)?;
    // Tr(μA) without forming the product
    let n = mu.dims.total();
    let mut acc = C64::default();
    for i in 0..n {
        for j in 0..n {
            acc += mu.m[(i, j)] * x.m[(j, i)];
        }
    }
    Ok(acc)
}

/// A point `(γ, μ)` of `C ⊕ L¹_res`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPoint {
    pub gamma: C64,
    pub mu: BlockOperator,
}

impl ExtendedPoint {
    pub fn new(gamma: C64, mu: BlockOperator) -> Self {
        Self { gamma, mu }
    }

    pub fn dims(&self) -> Dims {
        self.mu.dims()
    }

    /// `μ − γP₊`.
    pub fn shifted(&self) -> BlockOperator {
        self.mu.add_p_plus(-self.gamma)
    }

    /// Distance from the real form `iR ⊕ UL¹_res`: `max(|γ + γ̄|, ‖μ + μ⁺‖_F)`.
    pub fn real_form_residual(&self) -> f64 {
        (2.0 * self.gamma.re).abs().max(self.mu.skew_hermitian_residual())
    }

    pub fn is_real_form(&self, tol: f64) -> bool {
        self.real_form_residual() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.gamma.re.is_finite() && self.gamma.im.is_finite() && self.mu.is_finite()
    }
}

/// Eigenvalues of `μ − γP₊` in lexicographic (real, imaginary) order.
pub fn spectrum_shifted(p: &ExtendedPoint) -> Result<Vec<C64>> {
    Ok(linalg::sort_spectrum(linalg::eigenvalues(p.shifted().matrix())?))
}
