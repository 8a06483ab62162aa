//! The level-matrix operator model on the truncated full Fock space:
//! moments computed by three independent methods (operator products,
//! Motzkin-path enumeration, and a matrix continued fraction), the monic
//! orthogonal polynomial recursion, the Boolean semigroup action on the
//! lowest-level data, the Boolean cumulant operator formula, the general
//! Boolean Fock decomposition of symmetric matrices, and the truncated
//! extended Boolean Fock process.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::appell::NCPolynomial;
use crate::combinat::MultiIndex;
use crate::cumulants::{words, FunctionalData};
use crate::error::{Error, Result};
use crate::scalar::Q;
use crate::series::NCSeries;

/// A dense square matrix over the rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    n: usize,
    e: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        QMatrix { n, e: vec![Q::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.e[i * n + i] = Q::one();
        }
        m
    }

    pub fn scalar(v: Q) -> Self {
        QMatrix { n: 1, e: vec![v] }
    }

    pub fn diagonal(entries: Vec<Q>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n);
        for (i, v) in entries.into_iter().enumerate() {
            m.e[i * n + i] = v;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let n = rows.len();
        let mut e = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Shape("matrix rows of unequal length".into()));
            }
            e.extend(r);
        }
        Ok(QMatrix { n, e })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.e[i * self.n + j].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.e[i * self.n + j] = v;
    }

    fn check_shape(&self, other: &QMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Shape(format!("{} x {} vs {} x {}", self.n, self.n, other.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_shape(other)?;
        let e = self.e.iter().zip(&other.e).map(|(a, b)| a + b).collect();
        Ok(QMatrix { n: self.n, e })
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_shape(other)?;
        let e = self.e.iter().zip(&other.e).map(|(a, b)| a - b).collect();
        Ok(QMatrix { n: self.n, e })
    }

    pub fn scale(&self, c: &Q) -> QMatrix {
        QMatrix { n: self.n, e: self.e.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_shape(other)?;
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.e[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.e[k * n + j];
                    if !b.is_zero() {
                        out.e[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Q]) -> Result<Vec<Q>> {
        if v.len() != self.n {
            return Err(Error::Shape(format!("matrix {} x {} times vector {}", self.n, self.n, v.len())));
        }
        let mut out = vec![Q::zero(); self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                let a = &self.e[i * self.n + j];
                if !a.is_zero() && !v[j].is_zero() {
                    out[i] += a * &v[j];
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut out = QMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.e[j * self.n + i] = self.e[i * self.n + j].clone();
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in 0..i {
                if self.e[i * self.n + j] != self.e[j * self.n + i] {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && !self.e[i * self.n + j].is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Index of the word `w` among words of its length, with the first letter
/// as the most significant digit.
pub fn word_index(d: usize, w: &[u8]) -> usize {
    w.iter().fold(0, |acc, &l| acc * d + (l as usize - 1))
}

/// Inverse of [`word_index`] for words of length `k`.
pub fn index_word(d: usize, k: usize, mut idx: usize) -> Vec<u8> {
    let mut w = vec![0u8; k];
    for p in (0..k).rev() {
        w[p] = (idx % d) as u8 + 1;
        idx /= d;
    }
    w
}

/// The level-matrix data of the operator model: a diagonal matrix
/// `C^(k)` for each level `k = 1..L` and a symmetric matrix `T_i^(k)` for
/// each variable `i` and level `k = 0..L`, each of size `d^k`.
///
/// The represented operators on the truncated full Fock space are
/// `X_i = a_i^+ + T_i + a_i^- C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockData {
    d: usize,
    depth: usize,
    /// `c[k-1]` is `C^(k)`, for `k = 1..=depth`.
    c: Vec<QMatrix>,
    /// `t[i-1][k]` is `T_i^(k)`, for `k = 0..=depth`.
    t: Vec<Vec<QMatrix>>,
}

impl FockData {
    pub fn new(d: usize, depth: usize, c: Vec<QMatrix>, t: Vec<Vec<QMatrix>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Size("d must be positive".into()));
        }
        if c.len() != depth {
            return Err(Error::Shape(format!("expected {depth} C matrices, got {}", c.len())));
        }
        for (k, m) in c.iter().enumerate() {
            let want = d.pow(k as u32 + 1);
            if m.n() != want {
                return Err(Error::Shape(format!("C^({}) is {} x {}, expected {want}", k + 1, m.n(), m.n())));
            }
            if !m.is_diagonal() {
                return Err(Error::Shape(format!("C^({}) is not diagonal", k + 1)));
            }
        }
        if t.len() != d {
            return Err(Error::Shape(format!("expected {d} T families, got {}", t.len())));
        }
        for (i, ti) in t.iter().enumerate() {
            if ti.len() != depth + 1 {
                return Err(Error::Shape(format!(
                    "expected {} T matrices for variable {}, got {}",
                    depth + 1,
                    i + 1,
                    ti.len()
                )));
            }
            for (k, m) in ti.iter().enumerate() {
                let want = d.pow(k as u32);
                if m.n() != want {
                    return Err(Error::Shape(format!(
                        "T_{}^({k}) is {} x {}, expected {want}",
                        i + 1,
                        m.n(),
                        m.n()
                    )));
                }
                if !m.is_symmetric() {
                    return Err(Error::Shape(format!("T_{}^({k}) is not symmetric", i + 1)));
                }
            }
        }
        Ok(FockData { d, depth, c, t })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `C^(k)` for `1 <= k <= depth`.
    pub fn c_level(&self, k: usize) -> &QMatrix {
        &self.c[k - 1]
    }

    /// `T_i^(k)` for `1 <= i <= d`, `0 <= k <= depth`.
    pub fn t_level(&self, i: u8, k: usize) -> &QMatrix {
        &self.t[i as usize - 1][k]
    }

    /// Positivity predicate on the diagonal entries of every `C^(k)`.
    pub fn is_c_nonnegative(&self) -> bool {
        self.c.iter().all(|m| (0..m.n()).all(|i| !m.get(i, i).is_negative()))
    }

    /// The model's commutation predicate `(T_i^(k))* K^(k) = K^(k) T_i^(k)`
    /// with `K^(k) = (I^{⊗(k-1)} ⊗ C^(1)) ⋯ (I ⊗ C^(k-1)) C^(k)` diagonal.
    /// Reported, not enforced: moments are well defined regardless.
    pub fn commutation_ok(&self) -> bool {
        for k in 1..=self.depth {
            let dim = self.d.pow(k as u32);
            // K^(k) entry at word w is the product of C values over the
            // suffixes of w of every length.
            let mut kdiag = vec![Q::one(); dim];
            for (idx, kv) in kdiag.iter_mut().enumerate() {
                let w = index_word(self.d, k, idx);
                for j in 1..=k {
                    let suffix = &w[k - j..];
                    let cj = self.c_level(j);
                    *kv *= cj.get(word_index(self.d, suffix), word_index(self.d, suffix));
                }
            }
            for i in 1..=self.d as u8 {
                let t = self.t_level(i, k);
                for r in 0..dim {
                    for cidx in 0..dim {
                        // Symmetric T: condition is T[r][c](K[c] - K[r]) = 0.
                        if !t.get(r, cidx).is_zero() && kdiag[r] != kdiag[cidx] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Moments by operator products.
// ---------------------------------------------------------------------------

fn check_word(data: &FockData, u: &MultiIndex) -> Result<()> {
    if u.d() != data.d {
        return Err(Error::Shape(format!("word d = {} vs data d = {}", u.d(), data.d)));
    }
    if u.len() > 2 * data.depth {
        return Err(Error::Depth(format!(
            "word of length {} needs depth >= {}, have {}",
            u.len(),
            u.len().div_ceil(2),
            data.depth
        )));
    }
    Ok(())
}

fn zero_levels(data: &FockData) -> Vec<Vec<Q>> {
    (0..=data.depth).map(|k| vec![Q::zero(); data.d.pow(k as u32)]).collect()
}

/// Applies `X_i = a_i^+ + T_i + a_i^- C` to a truncated level vector.
/// Components rising above the depth are dropped; this is sound whenever
/// the total word length is at most `2 * depth`, since such components can
/// never return to the vacuum within the remaining steps.
fn apply_x(data: &FockData, i: u8, levels: &[Vec<Q>]) -> Vec<Vec<Q>> {
    apply_operator(data, i, levels, false)
}

/// Applies `Z_i = a_i^+ + T_i + ã_i^{b-}`, whose annihilation part is
/// zeroed on levels 0 and 1.
fn apply_z(data: &FockData, i: u8, levels: &[Vec<Q>]) -> Vec<Vec<Q>> {
    apply_operator(data, i, levels, true)
}

fn apply_operator(data: &FockData, i: u8, levels: &[Vec<Q>], boolean: bool) -> Vec<Vec<Q>> {
    let d = data.d;
    let mut out = zero_levels(data);
    for k in 0..=data.depth {
        let dim = d.pow(k as u32);
        let src = &levels[k];
        // a_i^+ : level k -> k+1, word u -> (i, u).
        if k < data.depth {
            for (idx, v) in src.iter().enumerate() {
                if !v.is_zero() {
                    out[k + 1][(i as usize - 1) * dim + idx] += v;
                }
            }
        }
        // T_i^(k).
        let tv = data.t_level(i, k).mul_vec(src).expect("dimensions agree");
        for (idx, v) in tv.into_iter().enumerate() {
            if !v.is_zero() {
                out[k][idx] += v;
            }
        }
        // a_i^- C^(k): level k -> k-1, only for words starting with i.
        let min_level = if boolean { 2 } else { 1 };
        if k >= min_level {
            let lower = d.pow(k as u32 - 1);
            let c = data.c_level(k);
            for rem in 0..lower {
                let idx = (i as usize - 1) * lower + rem;
                if !src[idx].is_zero() {
                    out[k - 1][rem] += c.get(idx, idx) * &src[idx];
                }
            }
        }
    }
    out
}

/// The vacuum moment `⟨Ω, X_{u(1)} ⋯ X_{u(n)} Ω⟩`, by explicit sparse
/// application of the operators level by level.
pub fn fock_moments(data: &FockData, u: &MultiIndex) -> Result<Q> {
    check_word(data, u)?;
    let mut levels = zero_levels(data);
    levels[0][0] = Q::one();
    for &letter in u.letters().iter().rev() {
        levels = apply_x(data, letter, &levels);
    }
    Ok(levels[0][0].clone())
}

/// All moments up to degree `cap` as a functional.
pub fn fock_to_functional(data: &FockData, cap: usize) -> Result<FunctionalData> {
    if cap > 2 * data.depth {
        return Err(Error::Depth(format!("cap {cap} needs depth >= {}", cap.div_ceil(2))));
    }
    let mut phi = FunctionalData::delta_zero(data.d, cap);
    for w in words(data.d, 1, cap) {
        let u = MultiIndex::new(data.d, w.clone())?;
        phi.set_moment(&w, fock_moments(data, &u)?)?;
    }
    Ok(phi)
}

// ---------------------------------------------------------------------------
// Moments by Motzkin path enumeration.
// ---------------------------------------------------------------------------

/// The same vacuum moment as [`fock_moments`], via explicit enumeration of
/// Motzkin paths of length `|u|`, multiplying the matrix step weights
/// (creation, `T^(s)`, or annihilation against `C^(s)`) along each path.
pub fn motzkin_moments(data: &FockData, u: &MultiIndex) -> Result<Q> {
    check_word(data, u)?;
    let n = u.len();
    let mut total = Q::zero();
    let mut steps: Vec<i8> = Vec::with_capacity(n);
    enumerate_paths(data, u.letters(), &mut steps, 0, &mut total)?;
    Ok(total)
}

/// Recursively chooses the step at each word position from right to left;
/// `level` is the current level of the state vector after the steps chosen
/// so far.
fn enumerate_paths(
    data: &FockData,
    word: &[u8],
    steps: &mut Vec<i8>,
    level: usize,
    total: &mut Q,
) -> Result<()> {
    let n = word.len();
    let done = steps.len();
    if done == n {
        if level == 0 {
            *total += path_weight(data, word, steps)?;
        }
        return Ok(());
    }
    let remaining = n - done - 1;
    for step in [1i8, 0, -1] {
        let next = level as i64 + step as i64;
        if next < 0 || next as usize > data.depth || next as usize > remaining {
            continue;
        }
        steps.push(step);
        enumerate_paths(data, word, steps, next as usize, total)?;
        steps.pop();
    }
    Ok(())
}

/// The contribution of a single path: apply the chosen step operators to
/// the vacuum, rightmost word position first.
fn path_weight(data: &FockData, word: &[u8], steps: &[i8]) -> Result<Q> {
    let d = data.d;
    let n = word.len();
    let mut v = vec![Q::one()];
    let mut level = 0usize;
    for p in (0..n).rev() {
        let i = word[p] as usize;
        match steps[n - 1 - p] {
            1 => {
                // Rising step: a_i^+.
                let dim = v.len();
                let mut next = vec![Q::zero(); dim * d];
                for (idx, val) in v.iter().enumerate() {
                    next[(i - 1) * dim + idx] = val.clone();
                }
                v = next;
                level += 1;
            }
            0 => {
                v = data.t_level(i as u8, level).mul_vec(&v)?;
            }
            _ => {
                // Falling step: a_i^- C^(level).
                let lower = d.pow(level as u32 - 1);
                let c = data.c_level(level);
                let mut next = vec![Q::zero(); lower];
                for rem in 0..lower {
                    let idx = (i - 1) * lower + rem;
                    next[rem] = c.get(idx, idx) * &v[idx];
                }
                v = next;
                level -= 1;
            }
        }
        if v.iter().all(|x| x.is_zero()) {
            return Ok(Q::zero());
        }
    }
    Ok(v[0].clone())
}

// ---------------------------------------------------------------------------
// Moments by the matrix continued fraction.
// ---------------------------------------------------------------------------

/// Square matrix of truncated series, row-major.
struct SMat {
    m: usize,
    e: Vec<NCSeries>,
}

impl SMat {
    fn identity(m: usize, d: usize, cap: usize) -> SMat {
        let mut e = vec![NCSeries::zero(d, cap); m * m];
        for i in 0..m {
            e[i * m + i] = NCSeries::one(d, cap);
        }
        SMat { m, e }
    }

    fn zeros(m: usize, d: usize, cap: usize) -> SMat {
        SMat { m, e: vec![NCSeries::zero(d, cap); m * m] }
    }

    fn is_zero(&self) -> bool {
        self.e.iter().all(|s| s.is_zero())
    }

    fn add(&self, other: &SMat) -> Result<SMat> {
        let e = self
            .e
            .iter()
            .zip(&other.e)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(SMat { m: self.m, e })
    }

    fn mul(&self, other: &SMat) -> Result<SMat> {
        let m = self.m;
        let zero = NCSeries::zero(self.e[0].d(), self.e[0].cap());
        let mut out = vec![zero; m * m];
        for i in 0..m {
            for k in 0..m {
                if self.e[i * m + k].is_zero() {
                    continue;
                }
                for j in 0..m {
                    if other.e[k * m + j].is_zero() {
                        continue;
                    }
                    out[i * m + j] = out[i * m + j].add(&self.e[i * m + k].mul(&other.e[k * m + j])?)?;
                }
            }
        }
        Ok(SMat { m, e: out })
    }

    /// `(I - Y)^{-1}` by the Neumann expansion; `Y` must have entries of
    /// strictly positive degree, so the expansion terminates at the cap.
    fn neumann_inverse(y: &SMat, d: usize, cap: usize) -> Result<SMat> {
        let mut out = SMat::identity(y.m, d, cap);
        let mut power = SMat::identity(y.m, d, cap);
        loop {
            power = power.mul(y)?;
            if power.is_zero() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }
}

/// Evaluates `1 + M(z)` by the matrix continued fraction, descending from
/// `G_cutoff = I`:
/// `G_k = (1 − Σ_i z_i T_i^(k) − Σ_{j,l} z_j ⟨e_j ⊗ I…| C^(k+1) G_{k+1} |e_l ⊗ I…⟩ z_l)^{-1}`,
/// returning the scalar `G_0` truncated at degree `n`.
pub fn continued_fraction_moments(data: &FockData, n: usize) -> Result<NCSeries> {
    continued_fraction_moments_with_cutoff(data, n, n.div_ceil(2))
}

/// As [`continued_fraction_moments`], with an explicit cutoff level. Any
/// cutoff `>= ceil(n/2)` yields the same series up to degree `n`, since
/// falling below a deeper cutoff exceeds the degree budget; this is
/// asserted by tests.
pub fn continued_fraction_moments_with_cutoff(
    data: &FockData,
    n: usize,
    cutoff: usize,
) -> Result<NCSeries> {
    if cutoff < n.div_ceil(2) {
        return Err(Error::Depth(format!("cutoff {cutoff} too small for degree {n}")));
    }
    if cutoff > data.depth {
        return Err(Error::Depth(format!("cutoff {cutoff} exceeds data depth {}", data.depth)));
    }
    let d = data.d;
    let mut g = SMat::identity(d.pow(cutoff as u32), d, n);
    for k in (0..cutoff).rev() {
        let dim = d.pow(k as u32);
        let mut y = SMat::zeros(dim, d, n);
        // Σ_i z_i T_i^(k).
        for i in 1..=d as u8 {
            let t = data.t_level(i, k);
            for r in 0..dim {
                for c in 0..dim {
                    let v = t.get(r, c);
                    if !v.is_zero() {
                        let term = NCSeries::monomial(d, n, &[i], v);
                        y.e[r * dim + c] = y.e[r * dim + c].add(&term)?;
                    }
                }
            }
        }
        // Σ_{j,l} z_j · block_{j,l}(C^(k+1) G_{k+1}) · z_l.
        let cmat = data.c_level(k + 1);
        let upper = dim * d;
        for j in 1..=d {
            let zj = NCSeries::generator(d, n, j as u8)?;
            for l in 1..=d {
                let zl = NCSeries::generator(d, n, l as u8)?;
                for p in 0..dim {
                    let row = (j - 1) * dim + p;
                    let cw = cmat.get(row, row);
                    if cw.is_zero() {
                        continue;
                    }
                    for q in 0..dim {
                        let entry = &g.e[row * upper + (l - 1) * dim + q];
                        if entry.is_zero() {
                            continue;
                        }
                        let term = zj.mul(&entry.scale(&cw))?.mul(&zl)?;
                        y.e[p * dim + q] = y.e[p * dim + q].add(&term)?;
                    }
                }
            }
        }
        g = SMat::neumann_inverse(&y, d, n)?;
    }
    Ok(g.e[0].clone())
}

// ---------------------------------------------------------------------------
// Monic orthogonal polynomial system.
// ---------------------------------------------------------------------------

/// The MOPS of the model, built by the recursion
/// `x_i P_ū = P_{(i,ū)} + Σ_{|w̄|=|ū|} B_{i,w̄,ū} P_w̄ + δ_{i,u(1)} C_ū P_{(u(2..))}`,
/// where `B_{i,w̄,ū} = T_i^{(|ū|)}[w̄, ū]`. Returns `P_ū` for all `|ū| <= n`.
pub fn mops_polynomials(data: &FockData, n: usize) -> Result<BTreeMap<MultiIndex, NCPolynomial>> {
    if n > data.depth {
        return Err(Error::Depth(format!("degree {n} exceeds data depth {}", data.depth)));
    }
    let d = data.d;
    let mut out: BTreeMap<MultiIndex, NCPolynomial> = BTreeMap::new();
    out.insert(MultiIndex::empty(d), NCPolynomial::one(d));
    for len in 1..=n {
        let k = len - 1; // length of the parent word u
        let dim = d.pow(k as u32);
        for uw in words(d, k, k) {
            let u_idx = word_index(d, &uw);
            let pu = out[&MultiIndex::new(d, uw.clone())?].clone();
            for i in 1..=d as u8 {
                // P_(i,u) = x_i P_u - Σ_w B_{i,w,u} P_w - δ_{i,u(1)} C_u P_(u(2..)).
                let mut p = NCPolynomial::monomial(d, &[i], Q::one())?.mul(&pu)?;
                let t = data.t_level(i, k);
                for w_idx in 0..dim {
                    let b = t.get(w_idx, u_idx);
                    if !b.is_zero() {
                        let w = MultiIndex::new(d, index_word(d, k, w_idx))?;
                        p = p.sub(&out[&w].scale(&b))?;
                    }
                }
                if k >= 1 && uw[0] == i {
                    let cu = data.c_level(k).get(u_idx, u_idx);
                    if !cu.is_zero() {
                        let tail = MultiIndex::new(d, uw[1..].to_vec())?;
                        p = p.sub(&out[&tail].scale(&cu))?;
                    }
                }
                let mut iw = vec![i];
                iw.extend_from_slice(&uw);
                out.insert(MultiIndex::new(d, iw)?, p);
            }
        }
    }
    Ok(out)
}

/// Checks that the MOPS are orthogonal under the model's state:
/// `φ[P_ū^* P_v̄] = 0` for `ū ≠ v̄`, `|ū|, |v̄| <= n`, using the
/// involution `(α x_ū)^* = α x_{ū reversed}`.
pub fn mops_orthogonality_check(data: &FockData, n: usize) -> Result<bool> {
    let polys = mops_polynomials(data, n)?;
    let phi = fock_to_functional(data, 2 * n)?;
    let keys: Vec<&MultiIndex> = polys.keys().collect();
    for (a, u) in keys.iter().enumerate() {
        for v in keys.iter().skip(a + 1) {
            let pairing = polys[*u].star().mul(&polys[*v])?.eval(&phi)?;
            if !pairing.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Boolean semigroup and cumulants.
// ---------------------------------------------------------------------------

/// The Boolean convolution power at the level of recursion data: `T_i^(0)`
/// and `C^(1)` are multiplied by `t`, all other levels unchanged.
pub fn boolean_power_fock(data: &FockData, t: &Q) -> FockData {
    let mut out = data.clone();
    out.c[0] = out.c[0].scale(t);
    for ti in out.t.iter_mut() {
        ti[0] = ti[0].scale(t);
    }
    out
}

/// Boolean cumulants straight from the operator model:
/// `η[x_i] = T_i^(0)` and
/// `η[x_i x_w̄ x_j] = C^(1)_i ⟨e_i, Z_w̄ e_j⟩` with
/// `Z_i = a_i^+ + T_i + ã_i^{b-}` (annihilation zeroed on levels ≤ 1).
pub fn boolean_cumulants_from_fock(data: &FockData, u: &MultiIndex) -> Result<Q> {
    check_word(data, u)?;
    let w = u.letters();
    match w.len() {
        0 => Err(Error::Shape("the empty word has no cumulant".into())),
        1 => Ok(data.t_level(w[0], 0).get(0, 0)),
        n => {
            let (i, j) = (w[0], w[n - 1]);
            let mut levels = zero_levels(data);
            levels[1][j as usize - 1] = Q::one();
            for &letter in w[1..n - 1].iter().rev() {
                levels = apply_z(data, letter, &levels);
            }
            let c1 = data.c_level(1);
            Ok(c1.get(i as usize - 1, i as usize - 1) * &levels[1][i as usize - 1])
        }
    }
}

// ---------------------------------------------------------------------------
// Univariate Jacobi data and product-state constructors.
// ---------------------------------------------------------------------------

/// Jacobi (three-term recursion) coefficients of a univariate functional:
/// `x P_k = P_{k+1} + β_k P_k + γ_k P_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiData {
    /// `β_0 .. β_{L-1}`.
    pub beta: Vec<Q>,
    /// `γ_1 .. γ_L`.
    pub gamma: Vec<Q>,
}

impl JacobiData {
    pub fn new(beta: Vec<Q>, gamma: Vec<Q>) -> Result<Self> {
        if beta.len() != gamma.len() {
            return Err(Error::Shape(format!(
                "{} beta vs {} gamma entries",
                beta.len(),
                gamma.len()
            )));
        }
        Ok(JacobiData { beta, gamma })
    }

    /// Depth `L` of the stored prefix.
    pub fn depth(&self) -> usize {
        self.beta.len()
    }

    /// Semicircle parameters: all `β = 0`, all `γ = 1`.
    pub fn semicircle(depth: usize) -> Self {
        JacobiData { beta: vec![Q::zero(); depth], gamma: vec![Q::one(); depth] }
    }

    /// Moments `m_1 .. m_n` of the tridiagonal operator at the first basis
    /// vector; valid for `n <= 2 depth`.
    pub fn moments(&self, n: usize) -> Result<Vec<Q>> {
        let depth = self.depth();
        if n > 2 * depth {
            return Err(Error::Depth(format!("n = {n} needs depth >= {}", n.div_ceil(2))));
        }
        let mut v = vec![Q::zero(); depth + 1];
        v[0] = Q::one();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut next = vec![Q::zero(); depth + 1];
            for k in 0..=depth {
                if v[k].is_zero() {
                    continue;
                }
                if k + 1 <= depth {
                    next[k + 1] += &v[k];
                }
                if k < depth {
                    next[k] += &self.beta[k] * &v[k];
                }
                if k >= 1 {
                    next[k - 1] += &self.gamma[k - 1] * &v[k];
                }
            }
            v = next;
            out.push(v[0].clone());
        }
        Ok(out)
    }

    /// The univariate operator model with `T^(k) = [β_k]`, `C^(k) = [γ_k]`.
    pub fn to_fock(&self) -> FockData {
        let depth = self.depth();
        let c = self.gamma.iter().map(|g| QMatrix::scalar(g.clone())).collect();
        let mut t = vec![QMatrix::scalar(Q::zero()); depth + 1];
        for (k, b) in self.beta.iter().enumerate() {
            t[k] = QMatrix::scalar(b.clone());
        }
        FockData::new(1, depth, c, vec![t]).expect("valid univariate data")
    }

    /// The univariate functional with these Jacobi parameters, to degree
    /// `cap <= 2 depth`.
    pub fn to_functional(&self, cap: usize) -> Result<FunctionalData> {
        FunctionalData::univariate(cap, &self.moments(cap)?)
    }
}

/// Recovers Jacobi coefficients from moments by the Stieltjes procedure;
/// requires moments up to degree `2 depth` and a nondegenerate pairing
/// (no orthogonal polynomial of zero norm).
pub fn jacobi_from_moments(mu: &FunctionalData, depth: usize) -> Result<JacobiData> {
    if mu.d() != 1 {
        return Err(Error::Shape("Jacobi data requires a univariate functional".into()));
    }
    if mu.cap() < 2 * depth {
        return Err(Error::Depth(format!("depth {depth} needs moments to degree {}", 2 * depth)));
    }
    // Commutative univariate polynomials as coefficient vectors.
    let pair = |p: &[Q], q: &[Q]| -> Q {
        let mut acc = Q::zero();
        for (a, pa) in p.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (b, qb) in q.iter().enumerate() {
                if !qb.is_zero() {
                    acc += pa * qb * mu.moment(&vec![1u8; a + b]);
                }
            }
        }
        acc
    };
    let shift = |p: &[Q]| -> Vec<Q> {
        let mut out = vec![Q::zero()];
        out.extend_from_slice(p);
        out
    };
    let mut beta = Vec::with_capacity(depth);
    let mut gamma = Vec::with_capacity(depth);
    let mut p_prev: Vec<Q> = vec![Q::one()];
    let mut norm_prev = Q::one();
    beta.push(mu.moment(&[1]));
    let mut p_cur = vec![-mu.moment(&[1]), Q::one()];
    for k in 1..=depth {
        let norm = pair(&p_cur, &p_cur);
        if norm.is_zero() {
            return Err(Error::Precondition(format!(
                "degenerate pairing: orthogonal polynomial {k} has zero norm"
            )));
        }
        gamma.push(&norm / &norm_prev);
        if k < depth {
            let b = pair(&shift(&p_cur), &p_cur) / &norm;
            beta.push(b.clone());
            // P_{k+1} = (x - β_k) P_k - γ_k P_{k-1}.
            let mut next = shift(&p_cur);
            for (idx, coeff) in p_cur.iter().enumerate() {
                next[idx] -= &b * coeff;
            }
            let g = gamma.last().expect("just pushed");
            for (idx, coeff) in p_prev.iter().enumerate() {
                next[idx] -= g * coeff;
            }
            norm_prev = norm;
            p_prev = std::mem::replace(&mut p_cur, next);
        }
    }
    JacobiData::new(beta, gamma)
}

/// Leading run length of the first letter of `w` (0 for the empty word).
fn leading_run(w: &[u8]) -> usize {
    match w.first() {
        None => 0,
        Some(&f) => w.iter().take_while(|&&l| l == f).count(),
    }
}

/// The operator model of the free product of univariate laws: with
/// `w = i^r ū` (maximal leading run of `i = w(1)`), the diagonal recursion
/// coefficients are `B^i_{w,w} = β^{(i)}_r` (for the run letter) and
/// `C_w = γ^{(w(1))}_r`; all off-diagonal entries vanish.
pub fn fock_free_product(factors: &[JacobiData], depth: usize) -> Result<FockData> {
    product_fock(factors, depth, true)
}

/// The operator model of the Boolean product of univariate laws: only the
/// single-letter words carry coefficients, `B^i_{i^k,i^k} = β^{(i)}_k` and
/// `C_{i^k} = γ^{(i)}_k`; the remaining entries do not affect observable
/// moments and this constructor sets them to 0.
pub fn fock_boolean_product(factors: &[JacobiData], depth: usize) -> Result<FockData> {
    product_fock(factors, depth, false)
}

fn product_fock(factors: &[JacobiData], depth: usize, free: bool) -> Result<FockData> {
    let d = factors.len();
    if d == 0 {
        return Err(Error::Shape("empty product".into()));
    }
    for f in factors {
        if f.depth() < depth {
            return Err(Error::Depth(format!(
                "factor depth {} below requested depth {depth}",
                f.depth()
            )));
        }
    }
    let mut c = Vec::with_capacity(depth);
    for k in 1..=depth {
        let dim = d.pow(k as u32);
        let mut diag = Vec::with_capacity(dim);
        for idx in 0..dim {
            let w = index_word(d, k, idx);
            let run = leading_run(&w);
            let j = w[0] as usize - 1;
            let applies = if free { true } else { run == k };
            diag.push(if applies { factors[j].gamma[run - 1].clone() } else { Q::zero() });
        }
        c.push(QMatrix::diagonal(diag));
    }
    let mut t = Vec::with_capacity(d);
    for (i, factor) in factors.iter().enumerate() {
        let mut ti = Vec::with_capacity(depth + 1);
        for k in 0..=depth {
            let dim = d.pow(k as u32);
            let mut m = QMatrix::zeros(dim);
            for idx in 0..dim {
                let w = index_word(d, k, idx);
                // Run of the letter i at the head of w (k = 0 gives run 0).
                let run = if w.first() == Some(&((i + 1) as u8)) { leading_run(&w) } else { 0 };
                let applies = if free {
                    run == k || w.get(run) != Some(&((i + 1) as u8))
                } else {
                    run == k
                };
                // At the top level, a run of full length asks for β_depth,
                // which the factors need not store; such an entry only
                // enters moments beyond the validity cap, so leave it 0.
                if applies && run < factor.beta.len() {
                    m.set(idx, idx, factor.beta[run].clone());
                }
            }
            ti.push(m);
        }
        t.push(ti);
    }
    FockData::new(d, depth, c, t)
}

// ---------------------------------------------------------------------------
// General Boolean Fock decomposition.
// ---------------------------------------------------------------------------

/// The decomposition `X_i = a_{ξ_i}^+ + a_{ξ_i}^- + T_i + λ_i` of a family
/// of symmetric matrices with respect to a distinguished basis vector,
/// together with the Boolean cumulant evaluator
/// `η[x_i x_w̄ x_j] = ⟨ξ_i, T_w̄ ξ_j⟩`.
#[derive(Debug, Clone)]
pub struct GbfDecomposition {
    dim: usize,
    omega: usize,
    x: Vec<QMatrix>,
    pub lambda: Vec<Q>,
    pub xi: Vec<Vec<Q>>,
    pub t: Vec<QMatrix>,
}

/// Decomposes symmetric matrices `X_i` over the distinguished vacuum basis
/// vector `e_omega`: `λ_i = ⟨Ω, X_i Ω⟩`, `ξ_i = (X_i − λ_i)Ω`, and
/// `T_i = X_i − ξ_i Ω^T − Ω ξ_i^T − λ_i I`, which annihilates `Ω` and
/// preserves its orthocomplement.
pub fn general_boolean_fock_decompose(x: &[QMatrix], omega: usize) -> Result<GbfDecomposition> {
    if x.is_empty() {
        return Err(Error::Shape("no matrices given".into()));
    }
    let dim = x[0].n();
    if omega >= dim {
        return Err(Error::Shape(format!("vacuum index {omega} out of range for dimension {dim}")));
    }
    let mut lambda = Vec::with_capacity(x.len());
    let mut xi = Vec::with_capacity(x.len());
    let mut t = Vec::with_capacity(x.len());
    for (i, m) in x.iter().enumerate() {
        if m.n() != dim {
            return Err(Error::Shape("matrices of mixed dimensions".into()));
        }
        if !m.is_symmetric() {
            return Err(Error::Shape(format!("X_{} is not symmetric", i + 1)));
        }
        let l = m.get(omega, omega);
        let mut v: Vec<Q> = (0..dim).map(|r| m.get(r, omega)).collect();
        v[omega] = Q::zero();
        let mut ti = m.clone();
        for r in 0..dim {
            // Subtract ξ Ω^T + Ω ξ^T + λ Ω Ω^T, leaving the compression
            // of X_i to the orthocomplement of Ω.
            let a = ti.get(r, omega) - &v[r];
            ti.set(r, omega, a);
            let b = ti.get(omega, r) - &v[r];
            ti.set(omega, r, b);
        }
        let oo = ti.get(omega, omega) - &l;
        ti.set(omega, omega, oo);
        debug_assert!((0..dim).all(|r| ti.get(r, omega).is_zero() && ti.get(omega, r).is_zero()));
        lambda.push(l);
        xi.push(v);
        t.push(ti);
    }
    Ok(GbfDecomposition { dim, omega, x: x.to_vec(), lambda, xi, t })
}

impl GbfDecomposition {
    pub fn d(&self) -> usize {
        self.x.len()
    }

    /// Rebuilds `X_i` from the parts; exact by construction, exposed so
    /// callers can assert the decomposition identity.
    pub fn reconstruct(&self, i: u8) -> QMatrix {
        let idx = i as usize - 1;
        let mut m = self.t[idx].clone();
        for r in 0..self.dim {
            let a = m.get(r, self.omega) + &self.xi[idx][r];
            m.set(r, self.omega, a);
            let b = m.get(self.omega, r) + &self.xi[idx][r];
            m.set(self.omega, r, b);
        }
        let oo = m.get(self.omega, self.omega) + &self.lambda[idx];
        m.set(self.omega, self.omega, oo);
        m
    }

    /// The matrix-model moment `⟨Ω, X_{u(1)} ⋯ X_{u(n)} Ω⟩`.
    pub fn moment(&self, w: &[u8]) -> Result<Q> {
        let mut v = vec![Q::zero(); self.dim];
        v[self.omega] = Q::one();
        for &l in w.iter().rev() {
            if l < 1 || l as usize > self.x.len() {
                return Err(Error::Shape(format!("letter {l} out of range")));
            }
            v = self.x[l as usize - 1].mul_vec(&v)?;
        }
        Ok(v[self.omega].clone())
    }

    /// The joint distribution as a functional, to degree `cap`.
    pub fn to_functional(&self, cap: usize) -> Result<FunctionalData> {
        let d = self.x.len();
        let mut phi = FunctionalData::delta_zero(d, cap);
        for w in words(d, 1, cap) {
            phi.set_moment(&w, self.moment(&w)?)?;
        }
        Ok(phi)
    }

    /// Boolean cumulants from the decomposition:
    /// `η[x_i] = λ_i`, `η[x_i x_w̄ x_j] = ⟨ξ_i, T_w̄ ξ_j⟩`.
    pub fn boolean_cumulant(&self, w: &[u8]) -> Result<Q> {
        match w.len() {
            0 => Err(Error::Shape("the empty word has no cumulant".into())),
            1 => Ok(self.lambda[w[0] as usize - 1].clone()),
            n => {
                let mut v = self.xi[w[n - 1] as usize - 1].clone();
                for &l in w[1..n - 1].iter().rev() {
                    v = self.t[l as usize - 1].mul_vec(&v)?;
                }
                let left = &self.xi[w[0] as usize - 1];
                let mut acc = Q::zero();
                for (a, b) in left.iter().zip(&v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                Ok(acc)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Extended Boolean Fock process (truncated matrix scale).
// ---------------------------------------------------------------------------

/// Moments `m_1 .. m_n` of `X(χ_[0,t)) = a^+ + b a^0 + a^- + c ã` on the
/// extended Boolean Fock space, restricted to the invariant subspace
/// spanned by the vacuum and the level copies of the indicator (using
/// `f² = f`, `ψ[f] = t`).
///
/// In coordinates `(α, c_1, c_2, …)` one application of `X` sends
/// `α ↦ t c_1`, `c_1 ↦ α + b c_1 + c c_2`, `c_k ↦ c_{k-1} + b c_k + c c_{k+1}`.
pub fn extended_boolean_fock_moments(b: &Q, c: &Q, t: &Q, n: usize) -> Result<Vec<Q>> {
    if !t.is_positive() || t > &Q::one() {
        return Err(Error::Domain("t must satisfy 0 < t <= 1".into()));
    }
    // Levels above n cannot return to the vacuum within n steps.
    let levels = n + 1;
    let mut alpha = Q::one();
    let mut cs = vec![Q::zero(); levels];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let new_alpha = t * &cs[0];
        let mut new_cs = vec![Q::zero(); levels];
        for k in 0..levels {
            let mut v = b * &cs[k];
            if k == 0 {
                v += &alpha;
            } else {
                v += &cs[k - 1];
            }
            if k + 1 < levels {
                v += c * &cs[k + 1];
            }
            new_cs[k] = v;
        }
        alpha = new_alpha;
        cs = new_cs;
        out.push(alpha.clone());
    }
    Ok(out)
}
