//! The free/Boolean Meixner class: parameter data `(T_i, C)`, its operator
//! model, the second-order PDE residuals for the free and Boolean cumulant
//! generating functions, the Sheffer generating-function coincidence, the
//! `B_t` and Boolean-to-free bijections, Bernoulli distributions, and the
//! Boolean Laha–Lukacs moment identities.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::appell::NCPolynomial;
use crate::cumulants::{
    self, boolean_cumulant, boolean_power, free_power, FunctionalData,
};
use crate::error::{Error, Result};
use crate::fock::{FockData, JacobiData, QMatrix};
use crate::scalar::Q;
use crate::series::{
    embed_z_block, prune_z_degree, two_block_geometric, two_block_mul, NCSeries,
};

/// Meixner parameters: `d` symmetric `d x d` matrices `T_i` (recursion
/// coefficients `B^k_{ij}`) and a diagonal `d² x d²` matrix `C` indexed by
/// letter pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeixnerParams {
    d: usize,
    t: Vec<QMatrix>,
    c: QMatrix,
}

impl MeixnerParams {
    pub fn new(t: Vec<QMatrix>, c: QMatrix) -> Result<Self> {
        let d = t.len();
        if d == 0 {
            return Err(Error::Size("at least one variable required".into()));
        }
        for (i, m) in t.iter().enumerate() {
            if m.n() != d {
                return Err(Error::Shape(format!("T_{} is {} x {}, expected {d}", i + 1, m.n(), m.n())));
            }
            if !m.is_symmetric() {
                return Err(Error::Shape(format!("T_{} is not symmetric", i + 1)));
            }
        }
        if c.n() != d * d {
            return Err(Error::Shape(format!("C is {} x {}, expected {}", c.n(), c.n(), d * d)));
        }
        if !c.is_diagonal() {
            return Err(Error::Shape("C is not diagonal".into()));
        }
        Ok(MeixnerParams { d, t, c })
    }

    pub fn univariate(b: Q, c: Q) -> Self {
        MeixnerParams { d: 1, t: vec![QMatrix::scalar(b)], c: QMatrix::scalar(c) }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn t_matrix(&self, i: u8) -> &QMatrix {
        &self.t[i as usize - 1]
    }

    /// `C_{ij}`, the diagonal entry of `C` at the pair `(i, j)`.
    pub fn c_entry(&self, i: u8, j: u8) -> Q {
        let idx = (i as usize - 1) * self.d + (j as usize - 1);
        self.c.get(idx, idx)
    }

    /// The recursion coefficient `B^k_{ij}`: the coefficient of `P_(k,ū)`
    /// in `x_i P_(j,ū)`, which in the operator model is `T_i[k, j]`.
    pub fn b_coeff(&self, k: u8, i: u8, j: u8) -> Q {
        self.t[i as usize - 1].get(k as usize - 1, j as usize - 1)
    }

    /// The commutation predicate `(T_i ⊗ I) C = C (T_i ⊗ I)`; reported,
    /// not enforced.
    pub fn commutation_ok(&self) -> bool {
        // With C diagonal the condition reads T_i[a,c] (C_{cb} - C_{ab}) = 0.
        for t in &self.t {
            for a in 1..=self.d as u8 {
                for b in 1..=self.d as u8 {
                    for c in 1..=self.d as u8 {
                        if !t.get(a as usize - 1, c as usize - 1).is_zero()
                            && self.c_entry(c, b) != self.c_entry(a, b)
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The positivity predicate `I + C >= 0` (diagonal entries); reported,
    /// not enforced.
    pub fn i_plus_c_nonnegative(&self) -> bool {
        (0..self.c.n()).all(|i| !(Q::one() + self.c.get(i, i)).is_negative())
    }
}

/// One-variable Meixner parameters `(b, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateMeixner {
    pub b: Q,
    pub c: Q,
}

impl UnivariateMeixner {
    pub fn new(b: Q, c: Q) -> Self {
        UnivariateMeixner { b, c }
    }

    pub fn to_params(&self) -> MeixnerParams {
        MeixnerParams::univariate(self.b.clone(), self.c.clone())
    }

    /// The Jacobi parameters `β = (0, b, b, …)`, `γ = (1, 1+c, 1+c, …)`.
    pub fn jacobi(&self, depth: usize) -> JacobiData {
        let mut beta = vec![self.b.clone(); depth];
        if depth > 0 {
            beta[0] = Q::zero();
        }
        let mut gamma = vec![Q::one() + &self.c; depth];
        if depth > 0 {
            gamma[0] = Q::one();
        }
        JacobiData::new(beta, gamma).expect("equal lengths")
    }
}

/// The operator model of the Meixner state: `C^(1) = I`,
/// `C^(k) = (I + C) ⊗ I^{⊗(k-2)}` for `k >= 2` (so the recursion
/// coefficient at level `k >= 2` is `δ_ij (1 + C_{i, u(1)})`),
/// `T_i^(0) = 0`, and `T_i^(k) = T_i ⊗ I^{⊗(k-1)}`.
pub fn meixner_to_fock(p: &MeixnerParams, depth: usize) -> Result<FockData> {
    let d = p.d;
    let mut c = Vec::with_capacity(depth);
    for k in 1..=depth {
        let dim = d.pow(k as u32);
        let mut diag = Vec::with_capacity(dim);
        for idx in 0..dim {
            if k == 1 {
                diag.push(Q::one());
            } else {
                let w = crate::fock::index_word(d, k, idx);
                diag.push(Q::one() + p.c_entry(w[0], w[1]));
            }
        }
        c.push(QMatrix::diagonal(diag));
    }
    let mut t = Vec::with_capacity(d);
    for i in 1..=d as u8 {
        let ti_small = p.t_matrix(i);
        let mut ti = Vec::with_capacity(depth + 1);
        ti.push(QMatrix::scalar(Q::zero()));
        for k in 1..=depth {
            let lower = d.pow(k as u32 - 1);
            let dim = d * lower;
            let mut m = QMatrix::zeros(dim);
            for a in 0..d {
                for b in 0..d {
                    let v = ti_small.get(a, b);
                    if v.is_zero() {
                        continue;
                    }
                    for rest in 0..lower {
                        m.set(a * lower + rest, b * lower + rest, v.clone());
                    }
                }
            }
            ti.push(m);
        }
        t.push(ti);
    }
    FockData::new(d, depth, c, t)
}

/// Residual table of a cumulant PDE, one truncated series per pair `(i, j)`.
pub type ResidualTable = BTreeMap<(u8, u8), NCSeries>;

/// Lowest total degree carrying a nonzero coefficient anywhere in the
/// table, or `None` if every residual vanishes identically.
pub fn residual_min_degree(table: &ResidualTable) -> Option<usize> {
    table
        .values()
        .flat_map(|s| s.terms().map(|(w, _)| w.len()))
        .min()
}

fn check_standardized(phi: &FunctionalData, p: &MeixnerParams) -> Result<()> {
    if phi.d() != p.d {
        return Err(Error::Shape(format!("functional d = {} vs params d = {}", phi.d(), p.d)));
    }
    if !phi.has_standard_covariance() {
        return Err(Error::Precondition(
            "PDE residuals require zero means and identity covariance".into(),
        ));
    }
    Ok(())
}

fn pde_residual(phi: &FunctionalData, p: &MeixnerParams, boolean: bool) -> Result<ResidualTable> {
    check_standardized(phi, p)?;
    let d = p.d;
    let gen = if boolean {
        cumulants::moments_to_boolean_cumulants_gf(phi)
    } else {
        cumulants::moments_to_free_cumulants_gf(phi)
    };
    let cap = phi.cap().saturating_sub(2);
    let derivs: Vec<NCSeries> = (1..=d as u8)
        .map(|i| gen.left_derivative(i).map(|s| s.with_cap(cap)))
        .collect::<Result<_>>()?;
    let mut out = ResidualTable::new();
    for i in 1..=d as u8 {
        for j in 1..=d as u8 {
            let mut r = gen.left_derivative(j)?.left_derivative(i)?.with_cap(cap);
            if i == j {
                r = r.sub(&NCSeries::one(d, cap))?;
            }
            for k in 1..=d as u8 {
                let b = p.b_coeff(k, i, j);
                if !b.is_zero() {
                    r = r.sub(&derivs[k as usize - 1].scale(&b))?;
                }
            }
            let mut cij = p.c_entry(i, j);
            if boolean {
                cij += Q::one();
            }
            if !cij.is_zero() {
                let prod = derivs[i as usize - 1].mul(&derivs[j as usize - 1])?;
                r = r.sub(&prod.scale(&cij))?;
            }
            out.insert((i, j), r.with_cap(cap));
        }
    }
    Ok(out)
}

/// For each `(i, j)`, the truncated series
/// `D_i D_j R − δ_ij − Σ_k B^k_{ij} D_k R − C_{ij} (D_i R)(D_j R)`,
/// identically 0 up to degree `cap − 2` exactly when `φ` is the Meixner
/// state with parameters `p`. Requires zero means and identity covariance.
pub fn free_pde_residual(phi: &FunctionalData, p: &MeixnerParams) -> Result<ResidualTable> {
    pde_residual(phi, p, false)
}

/// The Boolean counterpart:
/// `D_i D_j η − δ_ij − Σ_k B^k_{ij} D_k η − (1 + C_{ij}) (D_i η)(D_j η)`.
pub fn boolean_pde_residual(phi: &FunctionalData, p: &MeixnerParams) -> Result<ResidualTable> {
    pde_residual(phi, p, true)
}

/// Verifies the coincidence of the free and Boolean Sheffer generating
/// functions for `φ`: with `V = z` and `U = (1 + M(V)) V`, asserts
/// `R(U) = M(V)`, `(1 + R(U))^{-1} U = V`, and the exact identity
/// `(1 − x·U + R(U))^{-1} = (1 − x·V)^{-1} (1 − η(V))` in `2d` variables
/// to degree `n` in `z`.
pub fn sheffer_coincidence_check(phi: &FunctionalData, n: usize) -> Result<bool> {
    if phi.cap() < n {
        return Err(Error::Depth(format!("functional cap {} below degree {n}", phi.cap())));
    }
    let d = phi.d();
    let m = phi.moment_series().with_cap(n);
    let one = NCSeries::one(d, n);
    let one_plus_m = one.add(&m)?;
    let u: Vec<NCSeries> = (1..=d as u8)
        .map(|i| NCSeries::generator(d, n, i).and_then(|zi| one_plus_m.mul(&zi)))
        .collect::<Result<_>>()?;

    // R(U) = M(V) with V = z.
    let r = cumulants::moments_to_free_cumulants_gf(phi).with_cap(n);
    let r_of_u = r.substitute(&u)?;
    if r_of_u != m {
        return Ok(false);
    }
    // (1 + R(U))^{-1} U_i = V_i = z_i.
    let inv = one.add(&r_of_u)?.mul_inverse()?;
    for (i, ui) in u.iter().enumerate() {
        if inv.mul(ui)? != NCSeries::generator(d, n, i as u8 + 1)? {
            return Ok(false);
        }
    }
    // The generating-function identity in the two-block quotient with
    // x = letters 1..d and z = letters d+1..2d.
    let total = 2 * n;
    let mut y = NCSeries::zero(2 * d, total);
    for (i, ui) in u.iter().enumerate() {
        let xi = NCSeries::generator(2 * d, total, i as u8 + 1)?;
        y = y.add(&xi.mul(&embed_z_block(ui, d, total))?)?;
    }
    y = y.sub(&embed_z_block(&r_of_u, d, total))?;
    let lhs = two_block_geometric(&y, d, n)?;

    let mut xz = NCSeries::zero(2 * d, total);
    for i in 1..=d as u8 {
        let xi = NCSeries::generator(2 * d, total, i)?;
        let zi = NCSeries::generator(2 * d, total, d as u8 + i)?;
        xz = xz.add(&xi.mul(&zi)?)?;
    }
    let eta = cumulants::moments_to_boolean_cumulants_gf(phi).with_cap(n);
    let geo = two_block_geometric(&xz, d, n)?;
    let factor = NCSeries::one(2 * d, total).sub(&embed_z_block(&eta, d, total))?;
    let rhs = prune_z_degree(&two_block_mul(&geo, &factor, d)?, d, n);
    Ok(lhs == rhs)
}

/// The `B_t` map on parameters: `C ↦ tI + C`, `T` unchanged.
pub fn bt_transform_params(p: &MeixnerParams, t: &Q) -> MeixnerParams {
    let mut c = p.c.clone();
    for i in 0..c.n() {
        let v = c.get(i, i) + t;
        c.set(i, i, v);
    }
    MeixnerParams { d: p.d, t: p.t.clone(), c }
}

/// The `B_t` map on functionals: `(φ^{⊞(1+t)})^{⊎ 1/(1+t)}`.
pub fn bt_transform_series(phi: &FunctionalData, t: &Q) -> Result<FunctionalData> {
    let scale = Q::one() + t;
    if scale.is_zero() {
        return Err(Error::Domain("B_t is undefined at t = -1".into()));
    }
    Ok(boolean_power(&free_power(phi, &scale), &scale.recip()))
}

/// The Boolean-to-free bijection on parameters: `C ↦ I + C`.
pub fn bp_bijection_params(p: &MeixnerParams) -> MeixnerParams {
    bt_transform_params(p, &Q::one())
}

/// The Boolean-to-free bijection on functionals: the law `ψ` whose free
/// cumulant series equals the Boolean cumulant series of `φ`.
pub fn bp_bijection_series(phi: &FunctionalData) -> Result<FunctionalData> {
    cumulants::free_cumulants_to_moments_gf(&cumulants::moments_to_boolean_cumulants_gf(phi))
}

/// The two-atom law with mean 0, variance 1, and `m_3 = b = β − 1/β`:
/// weights `1/(1+β²)` at `β` and `β²/(1+β²)` at `−1/β`, so
/// `m_n = (βⁿ + β² (−1/β)ⁿ)/(1+β²)`.
pub fn bernoulli_functional(beta: &Q, degree: usize) -> Result<FunctionalData> {
    if beta.is_zero() {
        return Err(Error::Domain("beta must be nonzero".into()));
    }
    let other = -beta.clone().recip();
    let weight = (Q::one() + beta * beta).recip();
    let mut moments = Vec::with_capacity(degree);
    let mut pow_a = Q::one();
    let mut pow_b = Q::one();
    for _ in 0..degree {
        pow_a *= beta;
        pow_b *= &other;
        moments.push(&weight * (&pow_a + beta * beta * &pow_b));
    }
    FunctionalData::univariate(degree, &moments)
}

/// The centered, variance-one two-atom law with `m_3 = b`, defined by its
/// moment recursion `m_k = b m_{k-1} + m_{k-2}` (equivalently
/// `M(z)(1 − bz − z²) = z²`); rational in `b` even when the atoms are not.
pub fn bernoulli_moment_law(b: &Q, degree: usize) -> Result<FunctionalData> {
    let mut moments: Vec<Q> = Vec::with_capacity(degree);
    for k in 1..=degree {
        let v = match k {
            1 => Q::zero(),
            2 => Q::one(),
            _ => b * &moments[k - 2] + &moments[k - 3],
        };
        moments.push(v);
    }
    FunctionalData::univariate(degree, &moments)
}

/// Report of the Boolean Laha–Lukacs moment identities at order `n` for
/// the pair `X = 𝔖-law^{⊎α}`, `Y = 𝔖-law^{⊎(1−α)}` joined as a Boolean
/// product, where the `𝔖`-law is the centered variance-one two-atom law
/// with third moment `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LahaLukacsReport {
    /// `φ[𝔖ⁿ 𝔙²] = α(1−α) φ[𝔖^{n+2}]` with `𝔖 = X + Y`, `𝔙 = (1−α)X − αY`.
    pub regression_identity: bool,
    /// `κ_m(X) = α κ_m(𝔖)` (Boolean cumulants) for `m <= n + 2`.
    pub cumulant_proportionality: bool,
    /// `M_𝔖(z)(1 − bz − z²) = z²` to degree `n + 2`.
    pub bernoulli_form: bool,
}

impl LahaLukacsReport {
    pub fn all_pass(&self) -> bool {
        self.regression_identity && self.cumulant_proportionality && self.bernoulli_form
    }
}

pub fn laha_lukacs_check(b: &Q, alpha: &Q, n: usize) -> Result<LahaLukacsReport> {
    let cap = n + 2;
    let base = bernoulli_moment_law(b, cap)?;
    let beta = Q::one() - alpha;
    let x = boolean_power(&base, alpha);
    let y = boolean_power(&base, &beta);
    let phi = cumulants::boolean_product(&[x.clone(), y])?;

    let s = NCPolynomial::monomial(2, &[1], Q::one())?.add(&NCPolynomial::monomial(2, &[2], Q::one())?)?;
    let v = NCPolynomial::monomial(2, &[1], beta.clone())?
        .sub(&NCPolynomial::monomial(2, &[2], alpha.clone())?)?;
    let mut s_n = NCPolynomial::one(2);
    for _ in 0..n {
        s_n = s_n.mul(&s)?;
    }
    let lhs = s_n.mul(&v)?.mul(&v)?.eval(&phi)?;
    let s_n2 = s_n.mul(&s)?.mul(&s)?;
    let rhs = alpha * &beta * s_n2.eval(&phi)?;
    let regression_identity = lhs == rhs;

    // Moments of 𝔖 under φ, as a univariate law.
    let mut s_pow = NCPolynomial::one(2);
    let mut s_moments = Vec::with_capacity(cap);
    for _ in 0..cap {
        s_pow = s_pow.mul(&s)?;
        s_moments.push(s_pow.eval(&phi)?);
    }
    let s_law = FunctionalData::univariate(cap, &s_moments)?;
    let mut cumulant_proportionality = true;
    for m in 1..=cap {
        let w = vec![1u8; m];
        if boolean_cumulant(&x, &w) != alpha * boolean_cumulant(&s_law, &w) {
            cumulant_proportionality = false;
            break;
        }
    }

    let mut bernoulli_form = true;
    for (k, mk) in s_moments.iter().enumerate() {
        let expect = match k {
            0 => Q::zero(),
            1 => Q::one(),
            _ => b * &s_moments[k - 1] + &s_moments[k - 2],
        };
        if *mk != expect {
            bernoulli_form = false;
            break;
        }
    }
    Ok(LahaLukacsReport { regression_identity, cumulant_proportionality, bernoulli_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{boolean_product, free_product, semicircle, words};
    use crate::fock::{fock_moments, fock_to_functional};
    use crate::combinat::MultiIndex;
    use crate::scalar::{q, qr};
    use rand::{Rng, SeedableRng};

    fn rand_q(rng: &mut impl Rng) -> Q {
        qr(rng.gen_range(-2i64..=2), *[1i64, 2].get(rng.gen_range(0..2)).unwrap())
    }

    /// Random d = 2 parameters satisfying the commutation predicate:
    /// C_{(a,b)} depending only on b commutes with every T ⊗ I.
    fn random_params(rng: &mut impl Rng) -> MeixnerParams {
        let mut ts = Vec::new();
        for _ in 0..2 {
            let mut m = QMatrix::zeros(2);
            for r in 0..2 {
                for c in 0..=r {
                    let v = rand_q(rng);
                    m.set(r, c, v.clone());
                    m.set(c, r, v);
                }
            }
            ts.push(m);
        }
        let g = [rand_q(rng), rand_q(rng)];
        let c = QMatrix::diagonal(vec![g[0].clone(), g[1].clone(), g[0].clone(), g[1].clone()]);
        MeixnerParams::new(ts, c).unwrap()
    }

    fn random_functional(rng: &mut impl Rng, d: usize, cap: usize) -> FunctionalData {
        let mut phi = FunctionalData::delta_zero(d, cap);
        for w in words(d, 1, cap) {
            phi.set_moment(&w, rand_q(rng)).unwrap();
        }
        phi
    }

    #[test]
    fn univariate_fock_is_jacobi() {
        // (0, 0) is the semicircle recursion.
        let p = MeixnerParams::univariate(q(0), q(0));
        let data = meixner_to_fock(&p, 3).unwrap();
        assert_eq!(data, JacobiData::semicircle(3).to_fock());
        // (b, c) gives β = (0, b, b), γ = (1, 1+c, 1+c). The data differ
        // only in the unobservable top-level T entry, so compare moments.
        let um = UnivariateMeixner::new(qr(1, 2), q(3));
        let data = meixner_to_fock(&um.to_params(), 3).unwrap();
        assert_eq!(
            fock_to_functional(&data, 6).unwrap(),
            fock_to_functional(&um.jacobi(3).to_fock(), 6).unwrap()
        );
        for k in 1..=3usize {
            assert_eq!(data.c_level(k), um.jacobi(3).to_fock().c_level(k));
        }
    }

    #[test]
    fn zero_params_give_free_semicircles() {
        let p = MeixnerParams::new(
            vec![QMatrix::zeros(2), QMatrix::zeros(2)],
            QMatrix::zeros(4),
        )
        .unwrap();
        let data = meixner_to_fock(&p, 2).unwrap();
        let u = MultiIndex::new(2, vec![1, 2, 2, 1]).unwrap();
        assert_eq!(fock_moments(&data, &u).unwrap(), q(1));
        let u = MultiIndex::new(2, vec![1, 2, 1, 2]).unwrap();
        assert_eq!(fock_moments(&data, &u).unwrap(), q(0));
    }

    #[test]
    fn pde_residuals_vanish_for_meixner_states() {
        // Semicircle: R = z², so D D R = 1 and the free residual is 0;
        // η = z² + z⁴ + 2 z⁶ + … satisfies D D η = 1 + (D η)².
        let p = MeixnerParams::univariate(q(0), q(0));
        let mu = semicircle(6);
        assert!(residual_min_degree(&free_pde_residual(&mu, &p).unwrap()).is_none());
        assert!(residual_min_degree(&boolean_pde_residual(&mu, &p).unwrap()).is_none());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..4 {
            let p = random_params(&mut rng);
            assert!(p.commutation_ok());
            let phi = fock_to_functional(&meixner_to_fock(&p, 3).unwrap(), 6).unwrap();
            assert!(residual_min_degree(&free_pde_residual(&phi, &p).unwrap()).is_none());
            assert!(residual_min_degree(&boolean_pde_residual(&phi, &p).unwrap()).is_none());
            // Perturbing C breaks both residuals at the same lowest degree.
            let mut c = p.c.clone();
            c.set(1, 1, c.get(1, 1) + q(1));
            let bad = MeixnerParams::new(p.t.clone(), c).unwrap();
            let df = residual_min_degree(&free_pde_residual(&phi, &bad).unwrap());
            let db = residual_min_degree(&boolean_pde_residual(&phi, &bad).unwrap());
            assert!(df.is_some());
            assert_eq!(df, db);
        }
    }

    #[test]
    fn pde_requires_standard_covariance() {
        let p = MeixnerParams::univariate(q(0), q(0));
        let mut phi = FunctionalData::delta_zero(1, 4);
        phi.set_moment(&[1, 1], q(2)).unwrap();
        assert!(matches!(free_pde_residual(&phi, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn sheffer_coincidence() {
        // δ_0: both sides are (1 − x·z)^{-1}.
        assert!(sheffer_coincidence_check(&FunctionalData::delta_zero(1, 6), 6).unwrap());
        // Semicircle to degree 6.
        assert!(sheffer_coincidence_check(&semicircle(6), 6).unwrap());
        // The identity is unconditional: random functionals, d = 2.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..3 {
            let phi = random_functional(&mut rng, 2, 5);
            assert!(sheffer_coincidence_check(&phi, 5).unwrap());
        }
    }

    #[test]
    fn bt_transform_paths_agree() {
        // B_1 maps the symmetric Bernoulli (c = −1) to the semicircle.
        let bern = MeixnerParams::univariate(q(0), q(-1));
        assert_eq!(bt_transform_params(&bern, &q(1)), MeixnerParams::univariate(q(0), q(0)));
        let bern_phi = fock_to_functional(&meixner_to_fock(&bern, 4).unwrap(), 8).unwrap();
        assert_eq!(bt_transform_series(&bern_phi, &q(1)).unwrap(), semicircle(8));
        // t = 0 is the identity.
        assert_eq!(bt_transform_series(&bern_phi, &q(0)).unwrap(), bern_phi);
        assert!(bt_transform_series(&bern_phi, &q(-1)).is_err());
        // Parameter map and series map agree to degree 8 on random (b, c).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..3 {
            let p = MeixnerParams::univariate(rand_q(&mut rng), rand_q(&mut rng));
            let t = qr(1, 2);
            let phi = fock_to_functional(&meixner_to_fock(&p, 4).unwrap(), 8).unwrap();
            let via_params =
                fock_to_functional(&meixner_to_fock(&bt_transform_params(&p, &t), 4).unwrap(), 8)
                    .unwrap();
            assert_eq!(bt_transform_series(&phi, &t).unwrap(), via_params);
        }
        // Additivity in t on parameters.
        let p = random_params(&mut rng);
        let (s, t) = (qr(1, 3), q(-2));
        assert_eq!(
            bt_transform_params(&bt_transform_params(&p, &s), &t),
            bt_transform_params(&p, &(s + t))
        );
    }

    #[test]
    fn bp_bijection_paths_agree() {
        // Bernoulli ±1 (η = z²) ↦ semicircle (R = z²).
        let bern = crate::cumulants::symmetric_bernoulli(6);
        assert_eq!(bp_bijection_series(&bern).unwrap(), semicircle(6));
        // δ_0 is fixed.
        let delta = FunctionalData::delta_zero(2, 4);
        assert_eq!(bp_bijection_series(&delta).unwrap(), delta);
        // Parameter map = series map on Meixner inputs, d = 2, degree 6.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..3 {
            let p = random_params(&mut rng);
            let phi = fock_to_functional(&meixner_to_fock(&p, 3).unwrap(), 6).unwrap();
            let via_params =
                fock_to_functional(&meixner_to_fock(&bp_bijection_params(&p), 3).unwrap(), 6)
                    .unwrap();
            assert_eq!(bp_bijection_series(&phi).unwrap(), via_params);
        }
    }

    #[test]
    fn bp_bijection_maps_boolean_products_to_free_products() {
        let mu = bernoulli_moment_law(&qr(1, 2), 6).unwrap();
        let nu = bernoulli_moment_law(&q(-1), 6).unwrap();
        let lhs = bp_bijection_series(&boolean_product(&[mu.clone(), nu.clone()]).unwrap()).unwrap();
        let rhs = free_product(&[
            bp_bijection_series(&mu).unwrap(),
            bp_bijection_series(&nu).unwrap(),
        ])
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bernoulli_functional_moments() {
        // β = 1: symmetric atoms ±1.
        let phi = bernoulli_functional(&q(1), 6).unwrap();
        for k in 1..=6usize {
            assert_eq!(phi.moment(&vec![1u8; k]), if k % 2 == 0 { q(1) } else { q(0) });
        }
        // β = 2: atoms 2 and −1/2 with weights 1/5, 4/5.
        let phi = bernoulli_functional(&q(2), 4).unwrap();
        assert_eq!(phi.moment(&[1]), q(0));
        assert_eq!(phi.moment(&[1, 1]), q(1));
        assert_eq!(phi.moment(&[1, 1, 1]), qr(3, 2));
        assert_eq!(phi.moment(&[1, 1, 1, 1]), qr(13, 4));
        assert!(bernoulli_functional(&q(0), 4).is_err());
        // M(z)(1 − bz − z²) = z² with b = β − 1/β: matches the recursion law.
        assert_eq!(phi, bernoulli_moment_law(&qr(3, 2), 4).unwrap());
    }

    #[test]
    fn laha_lukacs_identities() {
        // Symmetric case, α = 1/2, n = 0: φ[𝔙²] = 1/4 = φ[𝔖²]/4.
        let r = laha_lukacs_check(&q(0), &qr(1, 2), 0).unwrap();
        assert!(r.all_pass());
        // General α at n = 0: φ[𝔙²] = α(1−α).
        for alpha in [qr(1, 3), qr(2, 5), qr(3, 4)] {
            assert!(laha_lukacs_check(&q(0), &alpha, 0).unwrap().all_pass());
        }
        // Higher order with a skewed Bernoulli.
        assert!(laha_lukacs_check(&qr(1, 2), &qr(1, 3), 3).unwrap().all_pass());
        assert!(laha_lukacs_check(&q(-2), &qr(2, 3), 4).unwrap().all_pass());
    }

    #[test]
    fn predicates_and_validation() {
        let p = MeixnerParams::univariate(q(1), q(-2));
        assert!(p.commutation_ok());
        assert!(!p.i_plus_c_nonnegative());
        assert!(MeixnerParams::univariate(q(1), q(0)).i_plus_c_nonnegative());
        // Non-commuting example: T connecting letters with different C.
        let mut t1 = QMatrix::zeros(2);
        t1.set(0, 1, q(1));
        t1.set(1, 0, q(1));
        let c = QMatrix::diagonal(vec![q(1), q(1), q(0), q(0)]);
        let p = MeixnerParams::new(vec![t1, QMatrix::zeros(2)], c).unwrap();
        assert!(!p.commutation_ok());
        // Shape validation.
        assert!(MeixnerParams::new(vec![QMatrix::zeros(2)], QMatrix::zeros(1)).is_err());
        let asym = QMatrix::from_rows(vec![vec![q(0), q(1)], vec![q(0), q(0)]]).unwrap();
        assert!(MeixnerParams::new(vec![asym, QMatrix::zeros(2)], QMatrix::zeros(4)).is_err());
    }

    #[test]
    fn series_helpers_are_consistent() {
        // D_i of the free cumulant series of the semicircle is z_i.
        let r = cumulants::moments_to_free_cumulants_gf(&semicircle(6));
        let dr = r.left_derivative(1).unwrap();
        assert_eq!(dr, NCSeries::generator(1, 6, 1).unwrap());
    }
}
