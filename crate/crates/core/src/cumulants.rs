//! Functionals as truncated moment tables, the moment/cumulant transforms
//! by two independent routes (partition sums and generating functions),
//! and the convolution / power / product operations built on them.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::combinat::{MultiIndex, SetPartition};
use crate::error::{Error, Result};
use crate::scalar::Q;
use crate::series::{self, NCSeries};

/// A unital linear functional on polynomials in `d` noncommuting
/// variables, given by its moments up to total degree `cap`.
///
/// `moments[∅] = 1` is implicit; positivity is not enforced (negative
/// convolution powers are legitimate at the functional level).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalData {
    d: usize,
    cap: usize,
    moments: BTreeMap<Vec<u8>, Q>,
}

/// Every word over `{1..d}` of length `lo..=hi`, in graded lex order.
pub fn words(d: usize, lo: usize, hi: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for n in lo..=hi {
        if n == 0 {
            out.push(Vec::new());
            continue;
        }
        let mut w = vec![1u8; n];
        'gen: loop {
            out.push(w.clone());
            // next word in lex order
            let mut i = n;
            while i > 0 {
                if (w[i - 1] as usize) < d {
                    w[i - 1] += 1;
                    for x in w[i..].iter_mut() {
                        *x = 1;
                    }
                    continue 'gen;
                }
                i -= 1;
            }
            break;
        }
    }
    out
}

impl FunctionalData {
    /// The point mass `δ_0`: every nonconstant moment vanishes.
    pub fn delta_zero(d: usize, cap: usize) -> Self {
        FunctionalData { d, cap, moments: BTreeMap::new() }
    }

    /// Builds a univariate functional from the moment list `m_1..m_n`.
    pub fn univariate(cap: usize, moments: &[Q]) -> Result<Self> {
        if moments.len() > cap {
            return Err(Error::Shape(format!(
                "{} moments exceed cap {cap}",
                moments.len()
            )));
        }
        let mut f = FunctionalData::delta_zero(1, cap);
        for (k, m) in moments.iter().enumerate() {
            f.set_moment(&vec![1u8; k + 1], m.clone())?;
        }
        Ok(f)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// The moment `φ[x_w]`; the empty word gives 1.
    pub fn moment(&self, word: &[u8]) -> Q {
        if word.is_empty() {
            return Q::one();
        }
        self.moments.get(word).cloned().unwrap_or_else(Q::zero)
    }

    /// Sets a moment; the empty word may only carry the value 1.
    pub fn set_moment(&mut self, word: &[u8], value: Q) -> Result<()> {
        if word.is_empty() {
            if value.is_one() {
                return Ok(());
            }
            return Err(Error::Validation("moments[∅] must equal 1".into()));
        }
        if word.len() > self.cap {
            return Err(Error::Shape(format!(
                "word of length {} exceeds cap {}",
                word.len(),
                self.cap
            )));
        }
        if word.iter().any(|&l| l < 1 || l as usize > self.d) {
            return Err(Error::Shape("letter out of range".into()));
        }
        if value.is_zero() {
            self.moments.remove(word);
        } else {
            self.moments.insert(word.to_vec(), value);
        }
        Ok(())
    }

    /// The moment generating function `M(z) = Σ_{|w| ≥ 1} φ[x_w] z_w`
    /// (zero constant term).
    pub fn moment_series(&self) -> NCSeries {
        let mut m = NCSeries::zero(self.d, self.cap);
        for (w, c) in &self.moments {
            m.set_coeff(w, c.clone()).expect("stored word is valid");
        }
        m
    }

    /// Rebuilds a functional from a moment generating function with zero
    /// constant term.
    pub fn from_moment_series(m: &NCSeries) -> Result<Self> {
        if !m.constant_term().is_zero() {
            return Err(Error::Validation(
                "moment generating function must have zero constant term".into(),
            ));
        }
        let mut f = FunctionalData::delta_zero(m.d(), m.cap());
        for (w, c) in m.terms() {
            f.set_moment(w, c.clone())?;
        }
        Ok(f)
    }

    /// Evaluates `φ` on an explicit coefficient map (pairing).
    pub fn pair(&self, coeffs: &BTreeMap<Vec<u8>, Q>) -> Q {
        let mut acc = Q::zero();
        for (w, c) in coeffs {
            acc += c * self.moment(w);
        }
        acc
    }

    /// True iff `φ[x_i] = 0` and `φ[x_i x_j] = δ_ij`.
    pub fn has_standard_covariance(&self) -> bool {
        for i in 1..=self.d as u8 {
            if !self.moment(&[i]).is_zero() {
                return false;
            }
            for j in 1..=self.d as u8 {
                let expect = if i == j { Q::one() } else { Q::zero() };
                if self.moment(&[i, j]) != expect {
                    return false;
                }
            }
        }
        true
    }

    fn check_shape(&self, other: &FunctionalData) -> Result<()> {
        if self.d != other.d || self.cap != other.cap {
            return Err(Error::Shape(format!(
                "(d = {}, cap = {}) vs (d = {}, cap = {})",
                self.d, self.cap, other.d, other.cap
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Moment -> cumulant transforms, partition-sum route.
//
// The defining recursions sum over interval (Boolean) and non-crossing
// (free) partitions. Both factor over the block containing the first
// element, so they are computed by dynamic programming over sub-words
// rather than literal partition enumeration.
// ---------------------------------------------------------------------------

/// Boolean cumulants `η[x_w]` for every word with `1 ≤ |w| ≤ cap`, from the
/// interval-partition recursion. Interval partitions factor over the first
/// block: `m[w] = Σ_k η[w(1..k)] m[w(k+1..n)]`.
pub fn moments_to_boolean_cumulants_lattice(phi: &FunctionalData) -> BTreeMap<MultiIndex, Q> {
    let mut memo: HashMap<Vec<u8>, Q> = HashMap::new();
    let mut out = BTreeMap::new();
    for w in words(phi.d, 1, phi.cap) {
        let v = boolean_cumulant_dp(phi, &w, &mut memo);
        out.insert(MultiIndex::new(phi.d, w).expect("valid word"), v);
    }
    out
}

/// A single Boolean cumulant `η[x_w]`.
pub fn boolean_cumulant(phi: &FunctionalData, w: &[u8]) -> Q {
    boolean_cumulant_dp(phi, w, &mut HashMap::new())
}

fn boolean_cumulant_dp(phi: &FunctionalData, w: &[u8], memo: &mut HashMap<Vec<u8>, Q>) -> Q {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let n = w.len();
    let mut v = phi.moment(w);
    for k in 1..n {
        let head = boolean_cumulant_dp(phi, &w[..k], memo);
        v -= head * phi.moment(&w[k..]);
    }
    memo.insert(w.to_vec(), v.clone());
    v
}

/// Free cumulants `R[x_w]` for every word with `1 ≤ |w| ≤ cap`, from the
/// non-crossing-partition recursion. Non-crossing partitions factor over
/// the block containing the first element: the complement splits into
/// intervals, each independently partitioned, so
/// `m[w] = Σ_{B ∋ 1} R[w_B] Π_gaps m[w_gap]`.
pub fn moments_to_free_cumulants_lattice(phi: &FunctionalData) -> BTreeMap<MultiIndex, Q> {
    let mut memo: HashMap<Vec<u8>, Q> = HashMap::new();
    let mut out = BTreeMap::new();
    for w in words(phi.d, 1, phi.cap) {
        let v = free_cumulant_dp(phi, &w, &mut memo);
        out.insert(MultiIndex::new(phi.d, w).expect("valid word"), v);
    }
    out
}

fn free_cumulant_dp(phi: &FunctionalData, w: &[u8], memo: &mut HashMap<Vec<u8>, Q>) -> Q {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let n = w.len();
    let mut v = phi.moment(w);
    if n > 1 {
        // Subsets of {2..n}; chosen positions join position 1 in the block.
        for mask in 0u32..(1 << (n - 1)) {
            if mask == (1 << (n - 1)) - 1 {
                continue; // the full block is the term being solved for
            }
            let mut block = vec![w[0]];
            let mut gaps: Vec<Vec<u8>> = Vec::new();
            let mut gap: Vec<u8> = Vec::new();
            for (idx, &letter) in w.iter().enumerate().skip(1) {
                if mask & (1 << (idx - 1)) != 0 {
                    block.push(letter);
                    gaps.push(std::mem::take(&mut gap));
                } else {
                    gap.push(letter);
                }
            }
            gaps.push(gap);
            let mut term = free_cumulant_dp(phi, &block, memo);
            for g in &gaps {
                if term.is_zero() {
                    break;
                }
                term *= phi.moment(g);
            }
            v -= term;
        }
    }
    memo.insert(w.to_vec(), v.clone());
    v
}

// ---------------------------------------------------------------------------
// Generating-function route.
// ---------------------------------------------------------------------------

/// Boolean cumulant generating function `η(z) = 1 - (1 + M(z))^{-1}`.
pub fn moments_to_boolean_cumulants_gf(phi: &FunctionalData) -> NCSeries {
    let m = phi.moment_series();
    let one = NCSeries::one(phi.d, phi.cap);
    let inv = one.add(&m).expect("shapes match").mul_inverse().expect("constant term 1");
    one.sub(&inv).expect("shapes match")
}

/// Inverse direction: `M = (1 - η)^{-1} - 1` for `η` with zero constant.
pub fn boolean_cumulants_to_moments_gf(eta: &NCSeries) -> Result<FunctionalData> {
    if !eta.constant_term().is_zero() {
        return Err(Error::Validation("η must have zero constant term".into()));
    }
    let one = NCSeries::one(eta.d(), eta.cap());
    let m = one.sub(eta)?.mul_inverse()?.sub(&one)?;
    FunctionalData::from_moment_series(&m)
}

/// Free cumulant generating function, solving `R(z_1(1+M), …) = M` through
/// the compositional inverse of the substitution tuple.
pub fn moments_to_free_cumulants_gf(phi: &FunctionalData) -> NCSeries {
    let m = phi.moment_series();
    let one_plus_m = NCSeries::one(phi.d, phi.cap).add(&m).expect("shapes match");
    let w: Vec<NCSeries> = (1..=phi.d as u8)
        .map(|i| {
            NCSeries::generator(phi.d, phi.cap, i)
                .expect("index in range")
                .mul(&one_plus_m)
                .expect("shapes match")
        })
        .collect();
    let w_inv = series::comp_inverse(&w).expect("identity linear part");
    m.substitute(&w_inv).expect("zero constant arguments")
}

/// Inverse direction: recovers `M` from `R` by the fixed point
/// `M ← R(z_1(1+M), …, z_d(1+M))`, which gains one degree per pass.
pub fn free_cumulants_to_moments_gf(r: &NCSeries) -> Result<FunctionalData> {
    if !r.constant_term().is_zero() {
        return Err(Error::Validation("R must have zero constant term".into()));
    }
    let d = r.d();
    let cap = r.cap();
    let one = NCSeries::one(d, cap);
    let mut m = NCSeries::zero(d, cap);
    for _ in 0..=cap {
        let one_plus_m = one.add(&m)?;
        let args: Vec<NCSeries> = (1..=d as u8)
            .map(|i| NCSeries::generator(d, cap, i).expect("in range").mul(&one_plus_m))
            .collect::<Result<_>>()?;
        let next = r.substitute(&args)?;
        if next == m {
            break;
        }
        m = next;
    }
    FunctionalData::from_moment_series(&m)
}

// ---------------------------------------------------------------------------
// Convolutions, powers, products.
// ---------------------------------------------------------------------------

/// Boolean convolution: Boolean cumulant generating functions add.
pub fn boolean_convolve(phi: &FunctionalData, psi: &FunctionalData) -> Result<FunctionalData> {
    phi.check_shape(psi)?;
    let eta = moments_to_boolean_cumulants_gf(phi).add(&moments_to_boolean_cumulants_gf(psi))?;
    boolean_cumulants_to_moments_gf(&eta)
}

/// Boolean convolution power `φ^{⊎ t}`: `η` scales by `t` (any rational).
pub fn boolean_power(phi: &FunctionalData, t: &Q) -> FunctionalData {
    let eta = moments_to_boolean_cumulants_gf(phi).scale(t);
    boolean_cumulants_to_moments_gf(&eta).expect("η has zero constant term")
}

/// Free convolution: free cumulant generating functions add.
pub fn free_convolve(phi: &FunctionalData, psi: &FunctionalData) -> Result<FunctionalData> {
    phi.check_shape(psi)?;
    let r = moments_to_free_cumulants_gf(phi).add(&moments_to_free_cumulants_gf(psi))?;
    free_cumulants_to_moments_gf(&r)
}

/// Free convolution power `φ^{⊞ t}`.
pub fn free_power(phi: &FunctionalData, t: &Q) -> FunctionalData {
    let r = moments_to_free_cumulants_gf(phi).scale(t);
    free_cumulants_to_moments_gf(&r).expect("R has zero constant term")
}

/// Embeds a univariate series into variable `i` of a `d`-variable series.
fn embed_univariate(f: &NCSeries, d: usize, i: u8) -> NCSeries {
    let mut out = NCSeries::zero(d, f.cap());
    for (w, c) in f.terms() {
        let word = vec![i; w.len()];
        out.set_coeff(&word, out.coeff(&word) + c).expect("valid word");
    }
    out
}

/// Boolean product of univariate functionals:
/// `η_φ(z) = Σ_i η_{φ_i}(z_i)`.
pub fn boolean_product(factors: &[FunctionalData]) -> Result<FunctionalData> {
    product_common(factors, moments_to_boolean_cumulants_gf, boolean_cumulants_to_moments_gf)
}

/// Free product of univariate functionals: `R_φ(z) = Σ_i R_{φ_i}(z_i)`.
pub fn free_product(factors: &[FunctionalData]) -> Result<FunctionalData> {
    product_common(factors, moments_to_free_cumulants_gf, free_cumulants_to_moments_gf)
}

fn product_common(
    factors: &[FunctionalData],
    to_cum: fn(&FunctionalData) -> NCSeries,
    to_mom: fn(&NCSeries) -> Result<FunctionalData>,
) -> Result<FunctionalData> {
    let d = factors.len();
    if d == 0 {
        return Err(Error::Shape("empty product".into()));
    }
    let cap = factors[0].cap;
    for f in factors {
        if f.d != 1 || f.cap != cap {
            return Err(Error::Shape("product factors must be univariate with equal cap".into()));
        }
    }
    let mut cum = NCSeries::zero(d, cap);
    for (i, f) in factors.iter().enumerate() {
        cum = cum.add(&embed_univariate(&to_cum(f), d, (i + 1) as u8))?;
    }
    to_mom(&cum)
}

// ---------------------------------------------------------------------------
// Independence.
// ---------------------------------------------------------------------------

/// Checks Boolean independence of the variable groups under `φ` by two
/// equivalent criteria, up to the functional's degree cap:
/// (i) all mixed Boolean cumulants vanish, and (ii) alternating monomials
/// factor as `φ[w_1 … w_k] = φ[w_1] … φ[w_k]` over maximal same-group runs.
/// Returns true iff both hold.
pub fn check_boolean_independence(phi: &FunctionalData, groups: &SetPartition) -> Result<bool> {
    if groups.n() != phi.d {
        return Err(Error::Shape(format!(
            "groups partition {} variables but φ has d = {}",
            groups.n(),
            phi.d
        )));
    }
    let mut label = vec![0usize; phi.d + 1];
    for (bi, b) in groups.blocks().iter().enumerate() {
        for &x in b {
            label[x] = bi;
        }
    }

    // (i) mixed cumulants vanish.
    let cumulants = moments_to_boolean_cumulants_lattice(phi);
    let mut mixed_vanish = true;
    for (u, v) in &cumulants {
        let lets = u.letters();
        let mixed = lets.windows(2).any(|p| label[p[0] as usize] != label[p[1] as usize]);
        if mixed && !v.is_zero() {
            mixed_vanish = false;
            break;
        }
    }

    // (ii) factorization over alternating monomials.
    let mut factorizes = true;
    'outer: for w in words(phi.d, 1, phi.cap) {
        let mut product = Q::one();
        let mut start = 0usize;
        for i in 1..=w.len() {
            if i == w.len() || label[w[i] as usize] != label[w[i - 1] as usize] {
                product *= phi.moment(&w[start..i]);
                start = i;
            }
        }
        if product != phi.moment(&w) {
            factorizes = false;
            break 'outer;
        }
    }

    Ok(mixed_vanish && factorizes)
}

// ---------------------------------------------------------------------------
// Conditionally free convolution (univariate).
// ---------------------------------------------------------------------------

/// The conditionally free C-transform of the pair `(μ, ν)`, the series
/// solving `C[z(1+M_ν)](1+M_μ) = M_μ(1+M_ν)`.
pub fn cfree_c_transform(mu: &FunctionalData, nu: &FunctionalData) -> Result<NCSeries> {
    mu.check_shape(nu)?;
    if mu.d != 1 {
        return Err(Error::Shape("C-transform requires univariate functionals".into()));
    }
    let cap = mu.cap;
    let one = NCSeries::one(1, cap);
    let m_mu = mu.moment_series();
    let m_nu = nu.moment_series();
    // C = [M_μ (1+M_ν) (1+M_μ)^{-1}] ∘ (z(1+M_ν))^{<-1>}; in one variable
    // the series commute, so the quotient is unambiguous.
    let rhs = m_mu
        .mul(&one.add(&m_nu)?)?
        .mul(&one.add(&m_mu)?.mul_inverse()?)?;
    let w = vec![NCSeries::generator(1, cap, 1)?.mul(&one.add(&m_nu)?)?];
    let w_inv = series::comp_inverse(&w)?;
    rhs.substitute(&w_inv)
}

/// Conditionally free convolution of pairs: C-transforms add and the
/// second components free-convolve; the first component is recovered from
/// the defining relation.
pub fn cfree_convolve(
    first: (&FunctionalData, &FunctionalData),
    second: (&FunctionalData, &FunctionalData),
) -> Result<(FunctionalData, FunctionalData)> {
    let (mu1, nu1) = first;
    let (mu2, nu2) = second;
    let c = cfree_c_transform(mu1, nu1)?.add(&cfree_c_transform(mu2, nu2)?)?;
    let nu = free_convolve(nu1, nu2)?;
    let cap = nu.cap;
    let one = NCSeries::one(1, cap);
    let m_nu = nu.moment_series();
    // G = C[z(1+M_ν)], then M_μ = G (1 + M_ν - G)^{-1}.
    let arg = vec![NCSeries::generator(1, cap, 1)?.mul(&one.add(&m_nu)?)?];
    let g = c.substitute(&arg)?;
    let m_mu = g.mul(&one.add(&m_nu)?.sub(&g)?.mul_inverse()?)?;
    Ok((FunctionalData::from_moment_series(&m_mu)?, nu))
}

// ---------------------------------------------------------------------------
// Stock functionals used across the crate.
// ---------------------------------------------------------------------------

/// Standard semicircle moments (Catalan numbers at even orders).
pub fn semicircle(cap: usize) -> FunctionalData {
    let mut m = Vec::with_capacity(cap);
    for n in 1..=cap {
        if n % 2 == 1 {
            m.push(Q::zero());
        } else {
            m.push(Q::from_integer(catalan(n / 2).into()));
        }
    }
    FunctionalData::univariate(cap, &m).expect("lengths match")
}

/// Symmetric Bernoulli `(δ_1 + δ_{-1})/2` moments: 0, 1, 0, 1, ….
pub fn symmetric_bernoulli(cap: usize) -> FunctionalData {
    let mut m = Vec::with_capacity(cap);
    for n in 1..=cap {
        m.push(if n % 2 == 0 { Q::one() } else { Q::zero() });
    }
    FunctionalData::univariate(cap, &m).expect("lengths match")
}

fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * 2 * (2 * i as u64 + 1) / (i as u64 + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{enumerate_partitions, PartitionFamily};
    use crate::scalar::{q, qr};
    use rand::{Rng, SeedableRng};

    fn uni(cap: usize, ms: &[i64]) -> FunctionalData {
        let moments: Vec<Q> = ms.iter().map(|&x| q(x)).collect();
        FunctionalData::univariate(cap, &moments).unwrap()
    }

    /// Independent oracle: verifies that the claimed cumulants reproduce
    /// the moments through literal partition-sum enumeration.
    fn check_partition_sum(
        phi: &FunctionalData,
        cumulants: &BTreeMap<MultiIndex, Q>,
        family: PartitionFamily,
    ) {
        for w in words(phi.d(), 1, phi.cap()) {
            let mut total = Q::zero();
            for pi in enumerate_partitions(w.len(), family).unwrap() {
                let mut term = Q::one();
                for block in pi.blocks() {
                    let sub: Vec<u8> = block.iter().map(|&i| w[i - 1]).collect();
                    let key = MultiIndex::new(phi.d(), sub).unwrap();
                    term *= cumulants.get(&key).unwrap();
                }
                total += term;
            }
            assert_eq!(total, phi.moment(&w), "word {w:?}");
        }
    }

    #[test]
    fn bernoulli_boolean_cumulants() {
        let phi = symmetric_bernoulli(6);
        let eta = moments_to_boolean_cumulants_lattice(&phi);
        for (u, v) in &eta {
            let expect = if u.len() == 2 { q(1) } else { q(0) };
            assert_eq!(*v, expect, "{u:?}");
        }
        check_partition_sum(&phi, &eta, PartitionFamily::Interval);
    }

    #[test]
    fn first_cumulant_is_first_moment() {
        let phi = uni(4, &[3, 10, 4, 7]);
        let eta = moments_to_boolean_cumulants_lattice(&phi);
        let r = moments_to_free_cumulants_lattice(&phi);
        let k1 = MultiIndex::new(1, vec![1]).unwrap();
        assert_eq!(eta[&k1], q(3));
        assert_eq!(r[&k1], q(3));
    }

    #[test]
    fn semicircle_boolean_cumulants() {
        let phi = semicircle(6);
        let eta = moments_to_boolean_cumulants_lattice(&phi);
        let expect = [0i64, 1, 0, 1, 0, 2];
        for (n, &e) in expect.iter().enumerate() {
            let key = MultiIndex::new(1, vec![1u8; n + 1]).unwrap();
            assert_eq!(eta[&key], q(e), "order {}", n + 1);
        }
        check_partition_sum(&phi, &eta, PartitionFamily::Interval);
    }

    #[test]
    fn boolean_gf_examples() {
        // M = z^2 gives η = z^2 - z^4 + z^6.
        let phi = uni(6, &[0, 1, 0, 0, 0, 0]);
        let eta = moments_to_boolean_cumulants_gf(&phi);
        assert_eq!(eta.coeff(&[1, 1]), q(1));
        assert_eq!(eta.coeff(&[1, 1, 1, 1]), q(-1));
        assert_eq!(eta.coeff(&[1, 1, 1, 1, 1, 1]), q(1));
        // η = 0 recovers δ_0.
        let zero = NCSeries::zero(1, 6);
        assert_eq!(
            boolean_cumulants_to_moments_gf(&zero).unwrap(),
            FunctionalData::delta_zero(1, 6)
        );
    }

    #[test]
    fn free_cumulants_examples() {
        let bern = symmetric_bernoulli(6);
        let r = moments_to_free_cumulants_lattice(&bern);
        assert_eq!(r[&MultiIndex::new(1, vec![1, 1]).unwrap()], q(1));
        assert_eq!(r[&MultiIndex::new(1, vec![1, 1, 1, 1]).unwrap()], q(-1));
        check_partition_sum(&bern, &r, PartitionFamily::NonCrossing);

        // Semicircle has R = z^2.
        let semi = semicircle(6);
        let r_gf = moments_to_free_cumulants_gf(&semi);
        let mut expect = NCSeries::zero(1, 6);
        expect.set_coeff(&[1, 1], q(1)).unwrap();
        assert_eq!(r_gf, expect);
    }

    fn random_functional(rng: &mut impl Rng, d: usize, cap: usize) -> FunctionalData {
        let mut phi = FunctionalData::delta_zero(d, cap);
        for w in words(d, 1, cap) {
            let num = rng.gen_range(-3i64..=3);
            let den = *[1i64, 2, 3].get(rng.gen_range(0..3)).unwrap();
            phi.set_moment(&w, qr(num, den)).unwrap();
        }
        phi
    }

    #[test]
    fn lattice_and_gf_routes_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let phi = random_functional(&mut rng, 2, 5);
            let eta_gf = moments_to_boolean_cumulants_gf(&phi);
            for (u, v) in moments_to_boolean_cumulants_lattice(&phi) {
                assert_eq!(eta_gf.coeff(u.letters()), v);
            }
            let r_gf = moments_to_free_cumulants_gf(&phi);
            for (u, v) in moments_to_free_cumulants_lattice(&phi) {
                assert_eq!(r_gf.coeff(u.letters()), v);
            }
            // Round trips are identities.
            assert_eq!(boolean_cumulants_to_moments_gf(&eta_gf).unwrap(), phi);
            assert_eq!(free_cumulants_to_moments_gf(&r_gf).unwrap(), phi);
        }
    }

    #[test]
    fn boolean_power_of_semicircle() {
        let phi = boolean_power(&semicircle(6), &q(2));
        assert_eq!(phi.moment(&[1, 1]), q(2));
        assert_eq!(phi.moment(&[1, 1, 1, 1]), q(6));
    }

    #[test]
    fn convolution_identities() {
        let phi = uni(5, &[1, 2, -1, 4, 0]);
        let delta = FunctionalData::delta_zero(1, 5);
        assert_eq!(boolean_convolve(&phi, &delta).unwrap(), phi);
        // Semigroup: s-power convolved with t-power equals (s+t)-power.
        let a = boolean_power(&phi, &qr(1, 2));
        let b = boolean_power(&phi, &qr(3, 2));
        assert_eq!(boolean_convolve(&a, &b).unwrap(), boolean_power(&phi, &q(2)));
        // Commutativity.
        let psi = uni(5, &[0, 1, 1, 2, 3]);
        assert_eq!(
            boolean_convolve(&phi, &psi).unwrap(),
            boolean_convolve(&psi, &phi).unwrap()
        );
    }

    #[test]
    fn free_power_of_bernoulli_is_arcsine() {
        let phi = free_power(&symmetric_bernoulli(6), &q(2));
        assert_eq!(phi.moment(&[1, 1]), q(2));
        assert_eq!(phi.moment(&[1, 1, 1, 1]), q(6));
        assert_eq!(phi.moment(&[1, 1, 1, 1, 1, 1]), q(20));
    }

    #[test]
    fn boolean_product_factorization() {
        let bern = symmetric_bernoulli(4);
        let phi = boolean_product(&[bern.clone(), bern]).unwrap();
        // Alternating factorization: φ[x1 x2 x1 x2] = 0.
        assert_eq!(phi.moment(&[1, 2, 1, 2]), q(0));
        assert_eq!(phi.moment(&[1, 1, 2, 2]), q(1));
        let groups = SetPartition::bottom(2);
        assert!(check_boolean_independence(&phi, &groups).unwrap());

        let d0 = FunctionalData::delta_zero(1, 4);
        assert_eq!(
            boolean_product(&[d0.clone(), d0.clone(), d0]).unwrap(),
            FunctionalData::delta_zero(3, 4)
        );
    }

    #[test]
    fn free_product_of_semicircles() {
        let s = semicircle(4);
        let phi = free_product(&[s.clone(), s]).unwrap();
        assert_eq!(phi.moment(&[1, 2, 1, 2]), q(0));
        assert_eq!(phi.moment(&[1, 1, 2, 2]), q(1));
        // Free product is not Boolean independent: φ[x1 x2 x2 x1] = 1 by the
        // non-crossing pairing {1,4}{2,3}, but the run factorization gives
        // φ[x1]φ[x2 x2]φ[x1] = 0; likewise η[x1 x2 x2 x1] = 1 is mixed.
        assert_eq!(phi.moment(&[1, 2, 2, 1]), q(1));
        let groups = SetPartition::bottom(2);
        assert!(!check_boolean_independence(&phi, &groups).unwrap());
        let eta = moments_to_boolean_cumulants_lattice(&phi);
        assert_eq!(eta[&MultiIndex::new(2, vec![1, 2, 2, 1]).unwrap()], q(1));
    }

    #[test]
    fn cfree_special_cases() {
        let mu = uni(6, &[1, 3, 2, 5, 1, 0]);
        let delta = FunctionalData::delta_zero(1, 6);
        // ν = δ_0 gives C = η_μ.
        assert_eq!(
            cfree_c_transform(&mu, &delta).unwrap(),
            moments_to_boolean_cumulants_gf(&mu)
        );
        // μ = ν gives C = R_μ.
        assert_eq!(
            cfree_c_transform(&mu, &mu).unwrap(),
            moments_to_free_cumulants_gf(&mu)
        );
    }

    #[test]
    fn cfree_scalar_multiple_is_boolean_power() {
        // If C = α R_ν then η_μ = α η_ν, i.e. μ = ν^{⊎ α}; check with the
        // semicircle and α = 2 via the convolution of two identical pairs.
        let nu = semicircle(6);
        let mu = boolean_power(&nu, &q(2));
        let c = cfree_c_transform(&mu, &nu).unwrap();
        assert_eq!(c, moments_to_free_cumulants_gf(&nu).scale(&q(2)));
    }

    #[test]
    fn cfree_convolution_reduces_to_boolean_and_free() {
        let mu1 = uni(5, &[0, 1, 1, 2, 0]);
        let mu2 = uni(5, &[1, 2, 0, 3, 1]);
        let delta = FunctionalData::delta_zero(1, 5);
        // Both ν = δ_0: first components Boolean-convolve.
        let (m, n) = cfree_convolve((&mu1, &delta), (&mu2, &delta)).unwrap();
        assert_eq!(m, boolean_convolve(&mu1, &mu2).unwrap());
        assert_eq!(n, delta);
        // μ_i = ν_i: free convolution on both.
        let (m, n) = cfree_convolve((&mu1, &mu1), (&mu2, &mu2)).unwrap();
        assert_eq!(n, free_convolve(&mu1, &mu2).unwrap());
        assert_eq!(m, n);
    }

    #[test]
    fn independence_ignores_non_monomial_counterexample() {
        // φ[x1 · 1 · x1] = φ[x1^2] ≠ φ[x1]φ[1]φ[x1] does not violate the
        // monomial-only criterion: a product state still passes.
        let bern = symmetric_bernoulli(4);
        let phi = boolean_product(&[bern.clone(), bern]).unwrap();
        assert_ne!(
            phi.moment(&[1, 1]),
            phi.moment(&[1]).clone() * phi.moment(&[1])
        );
        assert!(check_boolean_independence(&phi, &SetPartition::bottom(2)).unwrap());
    }
}
