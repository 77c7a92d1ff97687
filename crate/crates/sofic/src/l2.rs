//! Matrices over integral group rings, their approximation operators on
//! labeled graphs, and the normalized spectral invariants computed from
//! them: kernel dimension, log-determinant of the positive part, spectral
//! density, and exact trace identities for polynomials.
//!
//! An element `A = Σ_γ A^γ·γ` with d×d integer blocks acts by the
//! convolution kernel `K_A(x, y) = A^γ` for `x = γy`.  On a labeled graph,
//! every vertex `y` whose ball of radius ≥ width(A) is labeled-isomorphic to
//! the group ball carries a pulled-back copy of the kernel; all other
//! columns are zero.  The resulting finite matrices `A_m` (and
//! `Δ_m = A_mᵀA_m`) have row/column profiles independent of the graph size,
//! which is what makes the normalized invariants comparable across a graph
//! family.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::approx::LabeledGraph;
use crate::exactla::{
    self, default_zero_tol, det_star, float_spectrum, inertia, ln_bigint, SparseIntMatrix,
};
use crate::groups::{Elem, MarkedGroup};
use crate::{Error, Rat, Result};

/// Largest matrix dimension handled by the exact integer/rational path;
/// larger instances go through the floating Jacobi path.
pub const EXACT_DIM_CAP: usize = 200;

/// A d×d integer block.
pub type Block = Vec<Vec<BigInt>>;

/// Finitely supported `Σ_γ A^γ·γ` with d×d integer blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingMatrix {
    group: MarkedGroup,
    d: usize,
    terms: BTreeMap<Elem, Block>,
    width: usize,
}

impl GroupRingMatrix {
    /// Builds from (element, block) pairs; duplicate elements are summed and
    /// zero blocks dropped.
    pub fn new<I>(group: MarkedGroup, d: usize, terms: I) -> Result<GroupRingMatrix>
    where
        I: IntoIterator<Item = (Elem, Block)>,
    {
        if d == 0 {
            return Err(Error::BadArgument("block size must be ≥ 1".into()));
        }
        let mut map: BTreeMap<Elem, Block> = BTreeMap::new();
        for (e, b) in terms {
            if b.len() != d || b.iter().any(|row| row.len() != d) {
                return Err(Error::Dimension(format!(
                    "block at {e} is not {d}×{d}"
                )));
            }
            match map.get_mut(&e) {
                Some(acc) => block_add_assign(acc, &b),
                None => {
                    map.insert(e, b);
                }
            }
        }
        GroupRingMatrix::from_raw(group, d, map)
    }

    fn from_raw(
        group: MarkedGroup,
        d: usize,
        mut terms: BTreeMap<Elem, Block>,
    ) -> Result<GroupRingMatrix> {
        terms.retain(|_, b| !block_is_zero(b));
        let mut width = 0usize;
        for e in terms.keys() {
            width = width.max(group.word_length(e)?);
        }
        Ok(GroupRingMatrix { group, d, terms, width })
    }

    pub fn zero(group: MarkedGroup, d: usize) -> GroupRingMatrix {
        GroupRingMatrix { group, d, terms: BTreeMap::new(), width: 0 }
    }

    /// `c·1` (a scalar multiple of the identity block at the identity).
    pub fn constant(group: MarkedGroup, d: usize, c: BigInt) -> GroupRingMatrix {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            let mut b = vec![vec![BigInt::zero(); d]; d];
            for (i, row) in b.iter_mut().enumerate() {
                row[i] = c.clone();
            }
            terms.insert(group.identity(), b);
        }
        GroupRingMatrix { group, d, terms, width: 0 }
    }

    pub fn identity(group: MarkedGroup, d: usize) -> GroupRingMatrix {
        GroupRingMatrix::constant(group, d, BigInt::one())
    }

    /// One-term element `block·γ`.
    pub fn monomial(group: MarkedGroup, e: Elem, block: Block) -> Result<GroupRingMatrix> {
        let d = block.len();
        GroupRingMatrix::new(group, d, vec![(e, block)])
    }

    /// The combinatorial Laplacian `m·1 − Σ_s s` over all m labels (d = 1).
    pub fn laplacian(group: &MarkedGroup) -> Result<GroupRingMatrix> {
        let m = group.generator_count();
        let mut terms = vec![(group.identity(), vec![vec![BigInt::from(m as i64)]])];
        for i in 0..m {
            let s = group.word_reduce(&[i as u16])?;
            terms.push((s, vec![vec![BigInt::from(-1)]]));
        }
        GroupRingMatrix::new(group.clone(), 1, terms)
    }

    pub fn group(&self) -> &MarkedGroup {
        &self.group
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Maximum word length over the support.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Elem, &Block)> {
        self.terms.iter()
    }

    pub fn term(&self, e: &Elem) -> Option<&Block> {
        self.terms.get(e)
    }

    fn check_compatible(&self, rhs: &GroupRingMatrix) -> Result<()> {
        if self.group != rhs.group {
            return Err(Error::MarkingMismatch(format!(
                "{} vs {}",
                self.group.name(),
                rhs.group.name()
            )));
        }
        if self.d != rhs.d {
            return Err(Error::Dimension(format!(
                "block sizes {} vs {}",
                self.d, rhs.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &GroupRingMatrix) -> Result<GroupRingMatrix> {
        self.check_compatible(rhs)?;
        let mut terms = self.terms.clone();
        for (e, b) in &rhs.terms {
            match terms.get_mut(e) {
                Some(acc) => block_add_assign(acc, b),
                None => {
                    terms.insert(e.clone(), b.clone());
                }
            }
        }
        GroupRingMatrix::from_raw(self.group.clone(), self.d, terms)
    }

    /// `A*`: the block at γ becomes the transposed block at γ⁻¹.
    pub fn adjoint(&self) -> GroupRingMatrix {
        let mut terms = BTreeMap::new();
        for (e, b) in &self.terms {
            terms.insert(self.group.inv(e), block_transpose(b, self.d));
        }
        // Inverses preserve word length, so the width is unchanged.
        GroupRingMatrix { group: self.group.clone(), d: self.d, terms, width: self.width }
    }

    /// Group-ring convolution with block products; width ≤ sum of widths.
    pub fn multiply(&self, rhs: &GroupRingMatrix) -> Result<GroupRingMatrix> {
        self.check_compatible(rhs)?;
        let mut terms: BTreeMap<Elem, Block> = BTreeMap::new();
        for (e1, b1) in &self.terms {
            for (e2, b2) in &rhs.terms {
                let prod = block_mul(b1, b2, self.d);
                if block_is_zero(&prod) {
                    continue;
                }
                let e = self.group.mul(e1, e2);
                match terms.get_mut(&e) {
                    Some(acc) => block_add_assign(acc, &prod),
                    None => {
                        terms.insert(e, prod);
                    }
                }
            }
        }
        GroupRingMatrix::from_raw(self.group.clone(), self.d, terms)
    }

    pub fn power(&self, k: usize) -> Result<GroupRingMatrix> {
        let mut acc = GroupRingMatrix::identity(self.group.clone(), self.d);
        for _ in 0..k {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Trace of the block at the identity element.
    pub fn group_trace(&self) -> BigInt {
        match self.terms.get(&self.group.identity()) {
            Some(b) => (0..self.d).map(|i| b[i][i].clone()).sum(),
            None => BigInt::zero(),
        }
    }
}

fn block_is_zero(b: &Block) -> bool {
    b.iter().all(|row| row.iter().all(BigInt::is_zero))
}

fn block_add_assign(acc: &mut Block, b: &Block) {
    for (ra, rb) in acc.iter_mut().zip(b) {
        for (va, vb) in ra.iter_mut().zip(rb) {
            *va += vb;
        }
    }
}

fn block_transpose(b: &Block, d: usize) -> Block {
    let mut t = vec![vec![BigInt::zero(); d]; d];
    for i in 0..d {
        for j in 0..d {
            t[j][i] = b[i][j].clone();
        }
    }
    t
}

fn block_mul(a: &Block, b: &Block, d: usize) -> Block {
    let mut c = vec![vec![BigInt::zero(); d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[k][j].is_zero() {
                    continue;
                }
                c[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    c
}

/// Evaluates the integer polynomial `p` (ascending coefficients) at `a`.
pub fn poly_apply(a: &GroupRingMatrix, p: &[BigInt]) -> Result<GroupRingMatrix> {
    let Some(last) = p.last() else {
        return Ok(GroupRingMatrix::zero(a.group.clone(), a.d));
    };
    let mut acc = GroupRingMatrix::constant(a.group.clone(), a.d, last.clone());
    for c in p.iter().rev().skip(1) {
        acc = acc
            .multiply(a)?
            .add(&GroupRingMatrix::constant(a.group.clone(), a.d, c.clone()))?;
    }
    Ok(acc)
}

/// The finite approximation `A_m` of a group-ring matrix on a labeled graph.
#[derive(Clone, Debug)]
pub struct ApproxOperator {
    /// The (d·|V|)×(d·|V|) integer matrix; column block y is nonzero only
    /// for good vertices y.
    pub matrix: SparseIntMatrix,
    pub d: usize,
    /// |V| of the underlying graph — the normalization constant.
    pub vertices: usize,
    /// Number of good vertices (columns actually carrying the kernel).
    pub good_count: usize,
}

impl ApproxOperator {
    pub fn dim(&self) -> usize {
        self.d * self.vertices
    }

    /// `Δ_m = A_mᵀ A_m` — symmetric positive semidefinite by construction.
    pub fn delta(&self) -> SparseIntMatrix {
        self.matrix
            .transpose()
            .mul(&self.matrix)
            .expect("square matrix times itself")
    }
}

/// Pulls the convolution kernel of `a` back onto `g`.
///
/// Requires `g.good_set` computed at radius ≥ width(a): each good vertex `y`
/// contributes the column `K(φ_y(γ)·d+i, y·d+j) = A^γ[i][j]`, where `φ_y`
/// follows the word of γ through the graph labels; columns of non-good
/// vertices are zero.
pub fn approximate(a: &GroupRingMatrix, g: &LabeledGraph) -> Result<ApproxOperator> {
    if g.labels() != a.group.generator_count() {
        return Err(Error::MarkingMismatch(format!(
            "graph has {} labels, group {} has {}",
            g.labels(),
            a.group.name(),
            a.group.generator_count()
        )));
    }
    let w = a.width();
    match g.good_radius {
        Some(r) if r >= w => {}
        Some(r) => {
            return Err(Error::GoodSet(format!(
                "good set computed at radius {r}, operator width is {w}"
            )))
        }
        None => return Err(Error::GoodSet("good set has not been computed".into())),
    }

    let d = a.d;
    let n = g.vertex_count();
    let mut words = Vec::with_capacity(a.terms.len());
    for (e, b) in &a.terms {
        words.push((a.group.word_for(e)?, b));
    }

    let mut m = SparseIntMatrix::new(d * n, d * n);
    for &y in &g.good_set {
        for (word, block) in &words {
            let x = g.apply_word(word, y).ok_or_else(|| {
                Error::GoodSet(format!(
                    "vertex {} is marked good but lacks its ball",
                    y + 1
                ))
            })?;
            for (i, row) in block.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    m.add_at(x * d + i, y * d + j, v.clone())?;
                }
            }
        }
    }
    Ok(ApproxOperator { matrix: m, d, vertices: n, good_count: g.good_set.len() })
}

/// `dim ker(Δ_m)/|V|` as an exact rational in `[0, d]` (computed from the
/// rank of `A_m`, which has the same kernel as `Δ_m = A_mᵀA_m`).
pub fn normalized_kernel_dim(a: &GroupRingMatrix, g: &LabeledGraph) -> Result<Rat> {
    let op = approximate(a, g)?;
    let kernel = op.dim() - exactla::rank(&op.matrix);
    Ok(Rat::new(BigInt::from(kernel), BigInt::from(op.vertices)))
}

/// Result of a normalized log-det* computation.
#[derive(Clone, Debug)]
pub struct LogDetStar {
    /// `ln det*(M) / vertices`.
    pub value: f64,
    /// The exact positive integer det*, on the exact path only.
    pub det_star: Option<BigInt>,
    pub exact: bool,
}

/// `ln det*(m)/vertices` for a symmetric PSD integer matrix: exact when
/// `dim ≤ exact_cap` (with the positive integer det* reported), floating
/// Jacobi otherwise.
pub fn log_det_star_matrix(
    m: &SparseIntMatrix,
    vertices: usize,
    exact_cap: usize,
) -> Result<LogDetStar> {
    let dim = m.rows();
    if dim <= exact_cap {
        let ds = det_star(m)?;
        debug_assert!(ds.is_positive());
        let value = ln_bigint(&ds)? / vertices as f64;
        Ok(LogDetStar { value, det_star: Some(ds), exact: true })
    } else {
        let tol = default_zero_tol(dim, &m.norm_bound());
        let eig = float_spectrum(m, tol)?;
        if eig.first().is_some_and(|&l| l < -tol) {
            return Err(Error::NotPsd);
        }
        let value: f64 = eig.iter().filter(|&&l| l > 0.0).map(|l| l.ln()).sum();
        Ok(LogDetStar { value: value / vertices as f64, det_star: None, exact: false })
    }
}

/// `ln det*(Δ_m)/|V|` for `Δ_m = A_mᵀA_m`.
pub fn log_det_star_normalized(a: &GroupRingMatrix, g: &LabeledGraph) -> Result<LogDetStar> {
    log_det_star_normalized_with_cap(a, g, EXACT_DIM_CAP)
}

pub fn log_det_star_normalized_with_cap(
    a: &GroupRingMatrix,
    g: &LabeledGraph,
    exact_cap: usize,
) -> Result<LogDetStar> {
    let op = approximate(a, g)?;
    log_det_star_matrix(&op.delta(), op.vertices, exact_cap)
}

/// Exact eigenvalue-counting function of `Δ_m`: for each λ the fraction
/// `#{eigenvalues ≤ λ}/|V|`, a nondecreasing step function reaching d.
pub fn spectral_density(
    a: &GroupRingMatrix,
    g: &LabeledGraph,
    lambdas: &[Rat],
) -> Result<Vec<Rat>> {
    let op = approximate(a, g)?;
    let dim = op.dim();
    if dim > EXACT_DIM_CAP {
        return Err(Error::CapExceeded {
            what: "exact spectral density dimension",
            got: dim as u64,
            cap: EXACT_DIM_CAP as u64,
        });
    }
    let delta = op.delta();
    let mut out = Vec::with_capacity(lambdas.len());
    for l in lambdas {
        let (below, at, _) = inertia(&delta, l)?;
        out.push(Rat::new(BigInt::from(below + at), BigInt::from(op.vertices)));
    }
    Ok(out)
}

/// Both sides of the polynomial trace identity: the exact group-ring trace
/// `Tr_Γ p(Δ)` with `Δ = A*A`, and the exact normalized matrix trace
/// `Tr p(Δ_m)/|V|`.  They agree as integers whenever the graph's good set is
/// everything and no wraparound occurs within `2·deg(p)·width(Δ)`.
pub fn trace_poly(
    a: &GroupRingMatrix,
    p: &[BigInt],
    g: &LabeledGraph,
) -> Result<(BigInt, Rat)> {
    let delta_ring = a.adjoint().multiply(a)?;
    let left = poly_apply(&delta_ring, p)?.group_trace();

    let op = approximate(a, g)?;
    let delta_m = op.delta();
    let right = matrix_poly_trace(&delta_m, p)?;
    Ok((left, Rat::new(right, BigInt::from(op.vertices))))
}

/// `Tr p(M)` for ascending integer coefficients p.
fn matrix_poly_trace(m: &SparseIntMatrix, p: &[BigInt]) -> Result<BigInt> {
    let Some(c0) = p.first() else {
        return Ok(BigInt::zero());
    };
    let mut total = c0 * BigInt::from(m.rows() as u64);
    let mut power = SparseIntMatrix::identity(m.rows());
    for c in p.iter().skip(1) {
        power = power.mul(m)?;
        if !c.is_zero() {
            total += c * matrix_trace(&power);
        }
    }
    Ok(total)
}

fn matrix_trace(m: &SparseIntMatrix) -> BigInt {
    m.iter()
        .filter(|&(r, c, _)| r == c)
        .map(|(_, _, v)| v.clone())
        .sum()
}

/// One row of a convergence study.
#[derive(Clone, Debug)]
pub struct StudyRow {
    pub size: usize,
    pub good_fraction: Rat,
    /// Exact normalized kernel dimension (exact path only).
    pub kernel_dim: Option<Rat>,
    /// `ln det*(Δ_m)/|V|`.
    pub log_det_star: Option<f64>,
    /// Exact det*(Δ_m) when the exact path was used.
    pub det_star: Option<BigInt>,
    pub exact: bool,
    /// One value per requested λ (exact path only, else empty).
    pub densities: Vec<Rat>,
    /// A failure message when this row could not be computed.
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct StudyTable {
    pub lambdas: Vec<Rat>,
    pub rows: Vec<StudyRow>,
}

/// Runs the normalized invariants over a graph family (ordered by size);
/// failures are recorded per row and do not stop the study.
pub fn convergence_study(
    a: &GroupRingMatrix,
    graphs: &mut [LabeledGraph],
    lambdas: &[Rat],
    exact_cap: usize,
) -> StudyTable {
    let mut rows = Vec::with_capacity(graphs.len());
    for g in graphs.iter_mut() {
        rows.push(study_row(a, g, lambdas, exact_cap));
    }
    StudyTable { lambdas: lambdas.to_vec(), rows }
}

fn study_row(
    a: &GroupRingMatrix,
    g: &mut LabeledGraph,
    lambdas: &[Rat],
    exact_cap: usize,
) -> StudyRow {
    let size = g.vertex_count();
    let mut row = StudyRow {
        size,
        good_fraction: Rat::zero(),
        kernel_dim: None,
        log_det_star: None,
        det_star: None,
        exact: false,
        densities: Vec::new(),
        error: None,
    };
    match fill_study_row(a, g, lambdas, exact_cap, &mut row) {
        Ok(()) => row,
        Err(e) => {
            row.error = Some(e.to_string());
            row
        }
    }
}

fn fill_study_row(
    a: &GroupRingMatrix,
    g: &mut LabeledGraph,
    lambdas: &[Rat],
    exact_cap: usize,
    row: &mut StudyRow,
) -> Result<()> {
    let good = crate::approx::good_set(g, a.group(), a.width());
    row.good_fraction = Rat::new(BigInt::from(good.len()), BigInt::from(row.size));

    let op = approximate(a, g)?;
    let dim = op.dim();
    let delta = op.delta();
    if dim <= exact_cap {
        let kernel = dim - exactla::rank(&op.matrix);
        row.kernel_dim = Some(Rat::new(BigInt::from(kernel), BigInt::from(op.vertices)));
        for l in lambdas {
            let (below, at, _) = inertia(&delta, l)?;
            row.densities
                .push(Rat::new(BigInt::from(below + at), BigInt::from(op.vertices)));
        }
    }
    let ld = log_det_star_matrix(&delta, op.vertices, exact_cap)?;
    row.log_det_star = Some(ld.value);
    row.det_star = ld.det_star;
    row.exact = ld.exact;
    Ok(())
}
