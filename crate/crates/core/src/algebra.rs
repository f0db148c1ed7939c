//! Admissible 2x2 block algebras: parts, projections, involution, products.
//!
//! Each instance splits its scalar algebra three ways (minus0 / diag / plus0).
//! The fourteen part tags below are unions of those pieces inside one of the
//! four corners A, B, C, D.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexVector};
use crate::operators::{Segment, Window};

/// Union of the three elementary pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mask {
    pub minus: bool,
    pub diag: bool,
    pub plus: bool,
}

impl Mask {
    pub const NONE: Mask = Mask::new(false, false, false);
    pub const ALL: Mask = Mask::new(true, true, true);
    pub const MINUS0: Mask = Mask::new(true, false, false);
    pub const DIAG: Mask = Mask::new(false, true, false);
    pub const PLUS0: Mask = Mask::new(false, false, true);
    /// diag + plus0
    pub const PLUS: Mask = Mask::new(false, true, true);
    /// minus0 + diag
    pub const MINUS: Mask = Mask::new(true, true, false);

    pub const fn new(minus: bool, diag: bool, plus: bool) -> Mask {
        Mask { minus, diag, plus }
    }

    pub fn complement(self) -> Mask {
        Mask::new(!self.minus, !self.diag, !self.plus)
    }

    /// Does the signed index (j for sequences, j - i for matrices) belong to the mask.
    pub fn keeps(self, offset: i64) -> bool {
        match offset.signum() {
            -1 => self.minus,
            0 => self.diag,
            _ => self.plus,
        }
    }
}

/// Corner of the block algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    A,
    B,
    C,
    D,
}

/// Which of X = A (+) B or Y = C (+) D a vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
}

impl Block {
    /// (rows, cols) of the corner.
    pub fn shape(self, p: usize, q: usize) -> (usize, usize) {
        match self {
            Block::A => (p, p),
            Block::B => (p, q),
            Block::C => (q, p),
            Block::D => (q, q),
        }
    }

    /// Left multiplication by an element of this corner maps `domain()` into `codomain()`.
    pub fn domain(self) -> Letter {
        match self {
            Block::A | Block::C => Letter::X,
            Block::B | Block::D => Letter::Y,
        }
    }

    pub fn codomain(self) -> Letter {
        match self {
            Block::A | Block::B => Letter::X,
            Block::C | Block::D => Letter::Y,
        }
    }

    pub fn adjoint(self) -> Block {
        match self {
            Block::A => Block::A,
            Block::B => Block::C,
            Block::C => Block::B,
            Block::D => Block::D,
        }
    }

    /// Corner of a product x*y.
    pub fn product(self, rhs: Block) -> Option<Block> {
        match (self.domain(), rhs.codomain()) {
            (l, r) if l == r => Some(match (self.codomain(), rhs.domain()) {
                (Letter::X, Letter::X) => Block::A,
                (Letter::X, Letter::Y) => Block::B,
                (Letter::Y, Letter::X) => Block::C,
                (Letter::Y, Letter::Y) => Block::D,
            }),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartTag {
    APlus0,
    ADiag,
    AMinus0,
    APlus,
    AMinus,
    BPlus,
    BMinus,
    CPlus,
    CMinus,
    DPlus0,
    DDiag,
    DMinus0,
    DPlus,
    DMinus,
}

impl PartTag {
    pub const ALL: [PartTag; 14] = [
        PartTag::APlus0,
        PartTag::ADiag,
        PartTag::AMinus0,
        PartTag::APlus,
        PartTag::AMinus,
        PartTag::BPlus,
        PartTag::BMinus,
        PartTag::CPlus,
        PartTag::CMinus,
        PartTag::DPlus0,
        PartTag::DDiag,
        PartTag::DMinus0,
        PartTag::DPlus,
        PartTag::DMinus,
    ];

    pub fn block(self) -> Block {
        use PartTag::*;
        match self {
            APlus0 | ADiag | AMinus0 | APlus | AMinus => Block::A,
            BPlus | BMinus => Block::B,
            CPlus | CMinus => Block::C,
            DPlus0 | DDiag | DMinus0 | DPlus | DMinus => Block::D,
        }
    }

    pub fn mask(self) -> Mask {
        use PartTag::*;
        match self {
            APlus0 | DPlus0 | CPlus => Mask::PLUS0,
            ADiag | DDiag => Mask::DIAG,
            AMinus0 | DMinus0 | BMinus => Mask::MINUS0,
            APlus | DPlus | BPlus => Mask::PLUS,
            AMinus | DMinus | CMinus => Mask::MINUS,
        }
    }

    /// Tag of the complementary part when it has a name.
    pub fn complement(self) -> Option<PartTag> {
        use PartTag::*;
        Some(match self {
            APlus => AMinus0,
            AMinus0 => APlus,
            AMinus => APlus0,
            APlus0 => AMinus,
            DPlus => DMinus0,
            DMinus0 => DPlus,
            DMinus => DPlus0,
            DPlus0 => DMinus,
            BPlus => BMinus,
            BMinus => BPlus,
            CPlus => CMinus,
            CMinus => CPlus,
            ADiag | DDiag => return None,
        })
    }
}

/// The four signed halves X+, X-, Y+, Y- acted on by the compressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subspace {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
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
}

impl Subspace {
    pub fn new(letter: Letter, sign: Sign) -> Subspace {
        match (letter, sign) {
            (Letter::X, Sign::Plus) => Subspace::XPlus,
            (Letter::X, Sign::Minus) => Subspace::XMinus,
            (Letter::Y, Sign::Plus) => Subspace::YPlus,
            (Letter::Y, Sign::Minus) => Subspace::YMinus,
        }
    }

    /// X+ = A+ (+) B+, X- = A-0 (+) B-, Y+ = C+ (+) D+0, Y- = C- (+) D-.
    /// In both instances the A and B (resp. C and D) halves carry the same mask.
    pub fn mask(self) -> Mask {
        match self {
            Subspace::XPlus => Mask::PLUS,
            Subspace::XMinus => Mask::MINUS0,
            Subspace::YPlus => Mask::PLUS0,
            Subspace::YMinus => Mask::MINUS,
        }
    }

    pub fn letter(self) -> Letter {
        match self {
            Subspace::XPlus | Subspace::XMinus => Letter::X,
            Subspace::YPlus | Subspace::YMinus => Letter::Y,
        }
    }

    pub fn sign(self) -> Sign {
        match self {
            Subspace::XPlus | Subspace::YPlus => Sign::Plus,
            Subspace::XMinus | Subspace::YMinus => Sign::Minus,
        }
    }

    /// Index range allowed for sequence windows: (lowest, highest), None = unbounded.
    pub fn index_bounds(self) -> (Option<i64>, Option<i64>) {
        match self {
            Subspace::XPlus => (Some(0), None),
            Subspace::XMinus => (None, Some(-1)),
            Subspace::YPlus => (Some(1), None),
            Subspace::YMinus => (None, Some(0)),
        }
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Subspace::XPlus => "X+",
            Subspace::XMinus => "X-",
            Subspace::YPlus => "Y+",
            Subspace::YMinus => "Y-",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    TriangularMatrix,
    Sequence,
}

/// Contract shared by the built-in instances.
///
/// Elements of all four corners use one representation. Vectors of X and Y
/// are represented by their reduced column blocks: `block_width()` columns
/// at a time (p for the matrix instance, 1 for sequences), since left
/// multiplication acts on each block of [a | b] the same way.
pub trait Algebra: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn kind(&self) -> InstanceKind;
    fn p(&self) -> usize;
    fn q(&self) -> usize;

    fn shape(&self, x: &Self::Elem) -> (usize, usize);
    fn zeros(&self, rows: usize, cols: usize) -> Self::Elem;
    fn identity(&self, n: usize) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem>;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem>;
    fn scale(&self, x: &Self::Elem, s: C64) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem>;
    fn adjoint(&self, x: &Self::Elem) -> Self::Elem;
    fn project_mask(&self, x: &Self::Elem, mask: Mask) -> Self::Elem;
    /// Frobenius norm (l2 over all coefficients for sequences).
    fn norm(&self, x: &Self::Elem) -> f64;
    /// Largest |j| carrying a nonzero coefficient; 0 for matrices.
    fn degree(&self, x: &Self::Elem) -> usize;

    fn block_width(&self) -> usize;
    fn column_blocks(&self, x: &Self::Elem) -> Result<Vec<Self::Elem>>;
    fn hcat(&self, blocks: &[Self::Elem]) -> Result<Self::Elem>;

    /// Segment of the given half with default rows/columns.
    fn segment(&self, sub: Subspace, window: Option<Window>) -> Segment;
    fn basis(&self, seg: &Segment) -> Vec<Self::Elem>;
    /// Coordinates in `basis(seg)`; fails if x has nonzero entries outside the segment.
    fn coords(&self, seg: &Segment, x: &Self::Elem) -> Result<ComplexVector>;
    fn from_coords(&self, seg: &Segment, v: &ComplexVector) -> Self::Elem;
    /// Smallest window of `target` containing rho * (domain); None for the matrix instance.
    fn image_window(&self, rho: &Self::Elem, domain: &Segment, target: Subspace) -> Option<Window>;

    /// Inverse of an element of A_d or D_d, if sigma_min > rel * sigma_max.
    fn diag_inverse(&self, x: &Self::Elem, rel: f64) -> Result<Self::Elem>;
    fn diag_condition(&self, x: &Self::Elem) -> f64;
    /// Inverse inside the plus half (A+), truncated to degrees 0..=degree.
    fn invert_in_plus(&self, x: &Self::Elem, degree: usize, rel: f64) -> Result<Self::Elem>;

    /// z^k times the n x n identity, where the instance has a shift; None otherwise.
    fn shift_unit(&self, n: usize, k: i64) -> Option<Self::Elem>;

    /// Random element supported in `mask`, entries standard complex Gaussian.
    fn random(&self, rng: &mut dyn RngCore, rows: usize, cols: usize, mask: Mask, degree: usize) -> Self::Elem;

    fn project(&self, x: &Self::Elem, part: PartTag) -> Result<Self::Elem> {
        self.check_block(x, part)?;
        Ok(self.project_mask(x, part.mask()))
    }

    /// Norm of what lies outside the part.
    fn part_residual(&self, x: &Self::Elem, part: PartTag) -> Result<f64> {
        self.check_block(x, part)?;
        Ok(self.norm(&self.project_mask(x, part.mask().complement())))
    }

    fn check_block(&self, x: &Self::Elem, part: PartTag) -> Result<()> {
        let want = part.block().shape(self.p(), self.q());
        if self.shape(x) != want {
            return Err(Error::WrongPart { part, shape: self.shape(x) });
        }
        Ok(())
    }

    /// Unit of A (Block::A) or D (Block::D).
    fn unit(&self, block: Block) -> Self::Elem {
        match block {
            Block::A | Block::B => self.identity(self.p()),
            Block::C | Block::D => self.identity(self.q()),
        }
    }

    fn neg(&self, x: &Self::Elem) -> Self::Elem {
        self.scale(x, C64::new(-1.0, 0.0))
    }
}

/// M = [[a, b], [c, d]] with a in A, b in B, c in C, d in D.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockElement<E> {
    pub a: E,
    pub b: E,
    pub c: E,
    pub d: E,
}

/// The three summands M-0, M_d, M+0 of the block algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockPart {
    Minus0,
    Diag,
    Plus0,
}

impl BlockPart {
    pub const ALL: [BlockPart; 3] = [BlockPart::Minus0, BlockPart::Diag, BlockPart::Plus0];

    /// Masks of the four corners: M-0 = [[A-0, B-], [C-, D-0]], M_d = diag(A_d, D_d),
    /// M+0 = [[A+0, B+], [C+, D+0]].
    pub fn masks(self) -> [Mask; 4] {
        match self {
            BlockPart::Minus0 => [Mask::MINUS0, Mask::MINUS0, Mask::MINUS, Mask::MINUS0],
            BlockPart::Diag => [Mask::DIAG, Mask::NONE, Mask::NONE, Mask::DIAG],
            BlockPart::Plus0 => [Mask::PLUS0, Mask::PLUS, Mask::PLUS0, Mask::PLUS0],
        }
    }

    /// Part containing every product x*y with x in self, y in rhs; None if unrestricted.
    pub fn product(self, rhs: BlockPart) -> Option<BlockPart> {
        use BlockPart::*;
        match (self, rhs) {
            (Minus0, Minus0) | (Minus0, Diag) | (Diag, Minus0) => Some(Minus0),
            (Diag, Diag) => Some(Diag),
            (Diag, Plus0) | (Plus0, Diag) | (Plus0, Plus0) => Some(Plus0),
            (Minus0, Plus0) | (Plus0, Minus0) => None,
        }
    }
}

impl<E: Clone> BlockElement<E> {
    pub fn new(a: E, b: E, c: E, d: E) -> Self {
        BlockElement { a, b, c, d }
    }

    pub fn identity<A: Algebra<Elem = E>>(alg: &A) -> Self {
        let (p, q) = (alg.p(), alg.q());
        BlockElement::new(alg.identity(p), alg.zeros(p, q), alg.zeros(q, p), alg.identity(q))
    }

    pub fn diag<A: Algebra<Elem = E>>(alg: &A, a: E, d: E) -> Self {
        let (p, q) = (alg.p(), alg.q());
        BlockElement::new(a, alg.zeros(p, q), alg.zeros(q, p), d)
    }

    fn corners(&self) -> [&E; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

fn named<T>(block: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::BlockMismatch { block, detail: e.to_string() })
}

pub fn block_mul<A: Algebra>(alg: &A, m1: &BlockElement<A::Elem>, m2: &BlockElement<A::Elem>) -> Result<BlockElement<A::Elem>> {
    let entry = |x1: &A::Elem, y1: &A::Elem, x2: &A::Elem, y2: &A::Elem| -> Result<A::Elem> {
        alg.add(&alg.mul(x1, y1)?, &alg.mul(x2, y2)?)
    };
    Ok(BlockElement {
        a: named("a", entry(&m1.a, &m2.a, &m1.b, &m2.c))?,
        b: named("b", entry(&m1.a, &m2.b, &m1.b, &m2.d))?,
        c: named("c", entry(&m1.c, &m2.a, &m1.d, &m2.c))?,
        d: named("d", entry(&m1.c, &m2.b, &m1.d, &m2.d))?,
    })
}

pub fn block_adjoint<A: Algebra>(alg: &A, m: &BlockElement<A::Elem>) -> BlockElement<A::Elem> {
    BlockElement {
        a: alg.adjoint(&m.a),
        b: alg.adjoint(&m.c),
        c: alg.adjoint(&m.b),
        d: alg.adjoint(&m.d),
    }
}

pub fn block_add<A: Algebra>(alg: &A, m1: &BlockElement<A::Elem>, m2: &BlockElement<A::Elem>) -> Result<BlockElement<A::Elem>> {
    Ok(BlockElement {
        a: named("a", alg.add(&m1.a, &m2.a))?,
        b: named("b", alg.add(&m1.b, &m2.b))?,
        c: named("c", alg.add(&m1.c, &m2.c))?,
        d: named("d", alg.add(&m1.d, &m2.d))?,
    })
}

pub fn block_sub<A: Algebra>(alg: &A, m1: &BlockElement<A::Elem>, m2: &BlockElement<A::Elem>) -> Result<BlockElement<A::Elem>> {
    block_add(alg, m1, &block_scale(alg, m2, C64::new(-1.0, 0.0)))
}

pub fn block_scale<A: Algebra>(alg: &A, m: &BlockElement<A::Elem>, s: C64) -> BlockElement<A::Elem> {
    BlockElement {
        a: alg.scale(&m.a, s),
        b: alg.scale(&m.b, s),
        c: alg.scale(&m.c, s),
        d: alg.scale(&m.d, s),
    }
}

pub fn block_project<A: Algebra>(alg: &A, m: &BlockElement<A::Elem>, part: BlockPart) -> BlockElement<A::Elem> {
    let [ma, mb, mc, md] = part.masks();
    BlockElement {
        a: alg.project_mask(&m.a, ma),
        b: alg.project_mask(&m.b, mb),
        c: alg.project_mask(&m.c, mc),
        d: alg.project_mask(&m.d, md),
    }
}

/// Frobenius norm over the four corners.
pub fn block_norm<A: Algebra>(alg: &A, m: &BlockElement<A::Elem>) -> f64 {
    m.corners().iter().map(|x| alg.norm(x).powi(2)).sum::<f64>().sqrt()
}

/// Norm of what lies outside `part`.
pub fn block_part_residual<A: Algebra>(alg: &A, m: &BlockElement<A::Elem>, part: BlockPart) -> Result<f64> {
    let diff = block_sub(alg, m, &block_project(alg, m, part))?;
    Ok(block_norm(alg, &diff))
}

pub fn random_block<A: Algebra>(alg: &A, rng: &mut dyn RngCore, part: BlockPart, degree: usize) -> BlockElement<A::Elem> {
    let (p, q) = (alg.p(), alg.q());
    let [ma, mb, mc, md] = part.masks();
    BlockElement {
        a: alg.random(rng, p, p, ma, degree),
        b: alg.random(rng, p, q, mb, degree),
        c: alg.random(rng, q, p, mc, degree),
        d: alg.random(rng, q, q, md, degree),
    }
}

/// One cell of the multiplication table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableCell {
    pub left: String,
    pub right: String,
    /// None when the table leaves the product unrestricted.
    pub target: Option<String>,
    pub samples: usize,
    pub violations: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableReport {
    pub cells: Vec<TableCell>,
}

impl TableReport {
    pub fn violations(&self) -> usize {
        self.cells.iter().map(|c| c.violations).sum()
    }
}

/// Draws `samples` random pairs per cell and checks that products land in the
/// prescribed summand with exactly zero off-part mass.
pub fn verify_multiplication_table<A: Algebra>(alg: &A, samples: usize, degree: usize, rng: &mut dyn RngCore) -> Result<TableReport> {
    let mut cells = Vec::new();
    for left in BlockPart::ALL {
        for right in BlockPart::ALL {
            let target = left.product(right);
            let mut violations = 0;
            let mut max_residual: f64 = 0.0;
            for _ in 0..samples.max(1) {
                let m1 = random_block(alg, rng, left, degree);
                let m2 = random_block(alg, rng, right, degree);
                let prod = block_mul(alg, &m1, &m2)?;
                if let Some(t) = target {
                    let r = block_part_residual(alg, &prod, t)?;
                    max_residual = max_residual.max(r);
                    if r != 0.0 {
                        violations += 1;
                    }
                }
            }
            cells.push(TableCell {
                left: format!("{left:?}"),
                right: format!("{right:?}"),
                target: target.map(|t| format!("{t:?}")),
                samples: samples.max(1),
                violations,
                max_residual,
            });
        }
    }
    Ok(TableReport { cells })
}
