//! Boolean Appell polynomials: construction from cumulants, the
//! expansion/recursion identities relating them to monomials, the Boolean
//! binomial property under product states, and the symbolic Kailath–Segall
//! expansion.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::combinat::{enumerate_partitions, MultiIndex, PartitionFamily, SetPartition};
use crate::cumulants::{
    boolean_cumulant, check_boolean_independence, moments_to_boolean_cumulants_gf, FunctionalData,
};
use crate::error::{Error, Result};
use crate::scalar::{format_q, Q};
use crate::series::{
    self, two_block_geometric, two_block_mul, z_coefficient, NCSeries,
};

/// A polynomial in `d` noncommuting variables with rational coefficients
/// and finite support (no degree cap).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCPolynomial {
    d: usize,
    coeffs: BTreeMap<Vec<u8>, Q>,
}

impl NCPolynomial {
    pub fn zero(d: usize) -> Self {
        NCPolynomial { d, coeffs: BTreeMap::new() }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Q::one())
    }

    pub fn constant(d: usize, c: Q) -> Self {
        let mut p = Self::zero(d);
        if !c.is_zero() {
            p.coeffs.insert(Vec::new(), c);
        }
        p
    }

    /// The monomial `c · x_w`.
    pub fn monomial(d: usize, word: &[u8], c: Q) -> Result<Self> {
        let mut p = Self::zero(d);
        p.set_coeff(word, c)?;
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeff(&self, word: &[u8]) -> Q {
        self.coeffs.get(word).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set_coeff(&mut self, word: &[u8], c: Q) -> Result<()> {
        if word.iter().any(|&l| l < 1 || l as usize > self.d) {
            return Err(Error::Shape("letter out of range".into()));
        }
        if c.is_zero() {
            self.coeffs.remove(word);
        } else {
            self.coeffs.insert(word.to_vec(), c);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Q)> {
        self.coeffs.iter()
    }

    pub fn coeff_map(&self) -> &BTreeMap<Vec<u8>, Q> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Monic: exactly one monomial of top degree, with coefficient 1.
    pub fn is_monic(&self) -> bool {
        let deg = self.degree();
        let mut top = self.coeffs.iter().filter(|(w, _)| w.len() == deg);
        match (top.next(), top.next()) {
            (Some((_, c)), None) => c.is_one(),
            _ => false,
        }
    }

    fn check_shape(&self, other: &NCPolynomial) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Shape(format!("d = {} vs d = {}", self.d, other.d)));
        }
        Ok(())
    }

    pub fn add(&self, other: &NCPolynomial) -> Result<NCPolynomial> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            let v = out.coeff(w) + c;
            out.set_coeff(w, v)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NCPolynomial) -> Result<NCPolynomial> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCPolynomial {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> NCPolynomial {
        if c.is_zero() {
            return NCPolynomial::zero(self.d);
        }
        let coeffs = self.coeffs.iter().map(|(w, v)| (w.clone(), v * c)).collect();
        NCPolynomial { d: self.d, coeffs }
    }

    pub fn mul(&self, other: &NCPolynomial) -> Result<NCPolynomial> {
        self.check_shape(other)?;
        let mut out = NCPolynomial::zero(self.d);
        for (w1, c1) in &self.coeffs {
            for (w2, c2) in &other.coeffs {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                let v = out.coeff(&w) + c1 * c2;
                out.set_coeff(&w, v)?;
            }
        }
        Ok(out)
    }

    /// Left derivative: `D_i(x_w) = x_{w(2..)}` when `w` starts with `i`,
    /// and 0 otherwise (constants included).
    pub fn left_derivative(&self, i: u8) -> Result<NCPolynomial> {
        if i < 1 || i as usize > self.d {
            return Err(Error::Shape(format!("variable {i} out of range")));
        }
        let mut out = NCPolynomial::zero(self.d);
        for (w, c) in &self.coeffs {
            if w.first() == Some(&i) {
                let v = out.coeff(&w[1..]) + c;
                out.set_coeff(&w[1..], v)?;
            }
        }
        Ok(out)
    }

    /// The involution `(α x_w)* = α x_{w reversed}` (real coefficients).
    pub fn star(&self) -> NCPolynomial {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, c)| (w.iter().rev().copied().collect(), c.clone()))
            .collect();
        NCPolynomial { d: self.d, coeffs }
    }

    /// Pairs against a functional: `φ[P] = Σ coeffs[w] φ[x_w]`.
    pub fn eval(&self, phi: &FunctionalData) -> Result<Q> {
        if phi.d() != self.d {
            return Err(Error::Shape(format!("polynomial d = {} vs φ d = {}", self.d, phi.d())));
        }
        if self.degree() > phi.cap() {
            return Err(Error::Shape(format!(
                "degree {} exceeds moment cap {}",
                self.degree(),
                phi.cap()
            )));
        }
        Ok(phi.pair(&self.coeffs))
    }
}

// ---------------------------------------------------------------------------
// Boolean Appell polynomials.
// ---------------------------------------------------------------------------

/// The Boolean Appell polynomial of `φ` at the word `ū`, by the closed
/// form `A_ū = x_ū − Σ_{i=0}^{n−1} x_{u(1..i)} η[x_{u(i+1..n)}]`.
///
/// `A_ū` is monic with leading term `x_ū` and `φ[A_ū] = 0` for `ū ≠ ∅`.
pub fn boolean_appell(phi: &FunctionalData, u: &MultiIndex) -> Result<NCPolynomial> {
    if u.d() != phi.d() {
        return Err(Error::Shape(format!("word d = {} vs φ d = {}", u.d(), phi.d())));
    }
    if u.len() > phi.cap() {
        return Err(Error::Shape(format!(
            "word length {} exceeds moment cap {}",
            u.len(),
            phi.cap()
        )));
    }
    let w = u.letters();
    let n = w.len();
    let mut a = NCPolynomial::monomial(phi.d(), w, Q::one())?;
    for i in 0..n {
        let eta = boolean_cumulant(phi, &w[i..]);
        if !eta.is_zero() {
            let v = a.coeff(&w[..i]) - eta;
            a.set_coeff(&w[..i], v)?;
        }
    }
    Ok(a)
}

/// The generating function `H(x,z) = (1 − x·z)^{-1} (1 − η(z))` as a
/// two-block series over the `2d` symbols `x_1..x_d, z_1..z_d` (x letters
/// `1..d`, z letters `d+1..2d`), with z degree capped at `n`. Every term
/// has the normalized form `A_ū(x) · z_ū`.
pub fn appell_generating_function(phi: &FunctionalData, n: usize) -> Result<NCSeries> {
    let d = phi.d();
    let total = 2 * d;
    let cap = 2 * n;
    // x·z = Σ_i x_i z_i.
    let mut xz = NCSeries::zero(total, cap);
    for i in 1..=d as u8 {
        xz.set_coeff(&[i, i + d as u8], Q::one())?;
    }
    let geom = two_block_geometric(&xz, d, n)?;
    let eta = moments_to_boolean_cumulants_gf(phi).with_cap(n);
    let eta_z = series::embed_z_block(&eta, d, cap);
    let factor = NCSeries::one(total, cap).sub(&eta_z)?;
    Ok(series::prune_z_degree(&two_block_mul(&geom, &factor, d)?, d, n))
}

/// Reads the coefficient of `z_ū` in a two-block generating function as a
/// polynomial in the x variables.
pub fn generating_function_coefficient(h: &NCSeries, d: usize, u: &MultiIndex) -> Result<NCPolynomial> {
    let mut p = NCPolynomial::zero(d);
    for (xw, c) in z_coefficient(h, d, u.letters()) {
        p.set_coeff(&xw, c)?;
    }
    Ok(p)
}

/// The inverse expansion `x_ū = Σ_{k=0}^{n} A_{u(1..k)} · φ[x_{u(k+1..n)}]`,
/// returned as the map `u(1..k) ↦ φ[x_{u(k+1..n)}]`.
pub fn monomial_in_appell(phi: &FunctionalData, u: &MultiIndex) -> Result<BTreeMap<MultiIndex, Q>> {
    if u.d() != phi.d() {
        return Err(Error::Shape(format!("word d = {} vs φ d = {}", u.d(), phi.d())));
    }
    let w = u.letters();
    let mut out = BTreeMap::new();
    for k in 0..=w.len() {
        let prefix = MultiIndex::new(phi.d(), w[..k].to_vec())?;
        out.insert(prefix, phi.moment(&w[k..]));
    }
    Ok(out)
}

/// Checks the recursion `x_i · A_ū = A_{(i,ū)} + η[x_i x_ū]` as an exact
/// polynomial identity.
pub fn appell_recursion_check(phi: &FunctionalData, i: u8, u: &MultiIndex) -> Result<bool> {
    if i < 1 || i as usize > phi.d() {
        return Err(Error::Shape(format!("variable {i} out of range")));
    }
    let mut iw = vec![i];
    iw.extend_from_slice(u.letters());
    let extended = MultiIndex::new(phi.d(), iw.clone())?;
    let lhs = NCPolynomial::monomial(phi.d(), &[i], Q::one())?.mul(&boolean_appell(phi, u)?)?;
    let rhs = boolean_appell(phi, &extended)?
        .add(&NCPolynomial::constant(phi.d(), boolean_cumulant(phi, &iw)))?;
    Ok(lhs == rhs)
}

// ---------------------------------------------------------------------------
// One-variable property suite.
// ---------------------------------------------------------------------------

/// Outcome of one clause of the univariate property suite.
#[derive(Debug, Clone)]
pub struct ClauseReport {
    pub name: &'static str,
    pub pass: bool,
    /// First counterexample coefficient on failure.
    pub detail: Option<String>,
}

/// Per-clause results of [`univariate_appell_suite`].
#[derive(Debug, Clone)]
pub struct AppellSuiteReport {
    pub clauses: Vec<ClauseReport>,
}

impl AppellSuiteReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

fn clause(name: &'static str, counterexample: Option<String>) -> ClauseReport {
    ClauseReport { name, pass: counterexample.is_none(), detail: counterexample }
}

fn first_difference(lhs: &NCPolynomial, rhs: &NCPolynomial, label: String) -> Option<String> {
    if lhs == rhs {
        return None;
    }
    let mut words: Vec<&Vec<u8>> = lhs.coeff_map().keys().chain(rhs.coeff_map().keys()).collect();
    words.sort();
    words.dedup();
    for w in words {
        if lhs.coeff(w) != rhs.coeff(w) {
            return Some(format!(
                "{label}: coefficient of {w:?} is {} vs {}",
                format_q(&lhs.coeff(w)),
                format_q(&rhs.coeff(w))
            ));
        }
    }
    None
}

/// Verifies the six classical properties of the one-variable Boolean
/// Appell family `A_0..A_n` of `μ`: centering, the differential recursion
/// `D A_k = A_{k−1}`, the three-term recursion `x A_k = A_{k+1} + κ_{k+1}`,
/// the explicit formula, the generating function
/// `Σ A_k(x) z^k = (1 − η(z))/(1 − xz)`, and the powers-of-x expansion
/// `x^k = Σ_j m_j A_{k−j}`.
pub fn univariate_appell_suite(mu: &FunctionalData, n: usize) -> Result<AppellSuiteReport> {
    if mu.d() != 1 {
        return Err(Error::Shape("suite requires a univariate functional".into()));
    }
    if n > mu.cap() {
        return Err(Error::Shape(format!("n = {n} exceeds moment cap {}", mu.cap())));
    }
    let idx = |k: usize| MultiIndex::new(1, vec![1u8; k]).expect("valid word");
    let a: Vec<NCPolynomial> =
        (0..=n).map(|k| boolean_appell(mu, &idx(k))).collect::<Result<_>>()?;
    let kappa: Vec<Q> = (0..=n).map(|k| boolean_cumulant(mu, &vec![1u8; k])).collect();
    let mut clauses = Vec::new();

    // (1) centering.
    let mut bad = None;
    for (k, ak) in a.iter().enumerate().skip(1) {
        let v = ak.eval(mu)?;
        if !v.is_zero() {
            bad = Some(format!("μ[A_{k}] = {}", format_q(&v)));
            break;
        }
    }
    clauses.push(clause("centering", bad));

    // (2) D A_k = A_{k-1}.
    let mut bad = None;
    for k in 1..=n {
        if let Some(s) = first_difference(&a[k].left_derivative(1)?, &a[k - 1], format!("D A_{k}")) {
            bad = Some(s);
            break;
        }
    }
    clauses.push(clause("differential-recursion", bad));

    // (3) x A_k = A_{k+1} + κ_{k+1}.
    let x = NCPolynomial::monomial(1, &[1], Q::one())?;
    let mut bad = None;
    for k in 0..n {
        let lhs = x.mul(&a[k])?;
        let rhs = a[k + 1].add(&NCPolynomial::constant(1, kappa[k + 1].clone()))?;
        if let Some(s) = first_difference(&lhs, &rhs, format!("x A_{k}")) {
            bad = Some(s);
            break;
        }
    }
    clauses.push(clause("recursion", bad));

    // (4) A_k = x^k - Σ_{j=1}^k κ_j x^{k-j}.
    let mut bad = None;
    for k in 0..=n {
        let mut rhs = NCPolynomial::monomial(1, &vec![1u8; k], Q::one())?;
        for j in 1..=k {
            rhs = rhs.sub(&NCPolynomial::monomial(1, &vec![1u8; k - j], kappa[j].clone())?)?;
        }
        if let Some(s) = first_difference(&a[k], &rhs, format!("A_{k}")) {
            bad = Some(s);
            break;
        }
    }
    clauses.push(clause("explicit-formula", bad));

    // (5) generating function coefficients.
    let h = appell_generating_function(mu, n)?;
    let mut bad = None;
    for k in 0..=n {
        let coeff = generating_function_coefficient(&h, 1, &idx(k))?;
        if let Some(s) = first_difference(&coeff, &a[k], format!("[z^{k}] H")) {
            bad = Some(s);
            break;
        }
    }
    clauses.push(clause("generating-function", bad));

    // (6) x^k = Σ_{j=0}^k m_j A_{k-j}.
    let mut bad = None;
    for k in 0..=n {
        let mut rhs = NCPolynomial::zero(1);
        for j in 0..=k {
            rhs = rhs.add(&a[k - j].scale(&mu.moment(&vec![1u8; j])))?;
        }
        let lhs = NCPolynomial::monomial(1, &vec![1u8; k], Q::one())?;
        if let Some(s) = first_difference(&lhs, &rhs, format!("x^{k}")) {
            bad = Some(s);
            break;
        }
    }
    clauses.push(clause("powers-expansion", bad));

    Ok(AppellSuiteReport { clauses })
}

// ---------------------------------------------------------------------------
// Boolean binomial property.
// ---------------------------------------------------------------------------

/// The marginal law of variable `i` under `φ`.
pub fn marginal(phi: &FunctionalData, i: u8) -> Result<FunctionalData> {
    if i < 1 || i as usize > phi.d() {
        return Err(Error::Shape(format!("variable {i} out of range")));
    }
    let mut mu = FunctionalData::delta_zero(1, phi.cap());
    for k in 1..=phi.cap() {
        mu.set_moment(&vec![1u8; k], phi.moment(&vec![i; k]))?;
    }
    Ok(mu)
}

/// Checks the Boolean binomial property for a product state: with
/// `k = min(i | u(i+1) = … = u(n))`, asserts
/// `A_ū(x) = x_{u(1..k)} · A_{n−k}(x_{u(n)})` exactly, where the right
/// factor is the univariate Appell polynomial of the marginal of `x_{u(n)}`.
///
/// Errors with a precondition violation if `φ` is not a Boolean product
/// state (up to its cap).
pub fn boolean_binomial_check(phi: &FunctionalData, u: &MultiIndex) -> Result<bool> {
    if !check_boolean_independence(phi, &SetPartition::bottom(phi.d()))? {
        return Err(Error::Precondition(
            "the functional is not a Boolean product state".into(),
        ));
    }
    let w = u.letters();
    let n = w.len();
    if n == 0 {
        return Ok(true);
    }
    let last = w[n - 1];
    let k = (0..n).find(|&i| w[i..].iter().all(|&l| l == last)).expect("i = n-1 works");
    let mu = marginal(phi, last)?;
    let tail = univariate_to_variable(
        &boolean_appell(&mu, &MultiIndex::new(1, vec![1u8; n - k])?)?,
        phi.d(),
        last,
    )?;
    let rhs = NCPolynomial::monomial(phi.d(), &w[..k], Q::one())?.mul(&tail)?;
    Ok(boolean_appell(phi, u)? == rhs)
}

/// Re-letters a univariate polynomial onto variable `i` of a `d`-variable
/// algebra.
pub fn univariate_to_variable(p: &NCPolynomial, d: usize, i: u8) -> Result<NCPolynomial> {
    if p.d() != 1 {
        return Err(Error::Shape("expected a univariate polynomial".into()));
    }
    let mut out = NCPolynomial::zero(d);
    for (w, c) in p.terms() {
        out.set_coeff(&vec![i; w.len()], c.clone())?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Kailath–Segall expansion (symbolic).
// ---------------------------------------------------------------------------

/// A sorted, nonempty subset of `{1..n}`, standing for the product
/// `∏_{i∈S} f_i`.
pub type Subset = Vec<usize>;

/// A word whose letters are subsets: the product `X(∏_{S_1} f) ⋯ X(∏_{S_k} f)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolWord {
    pub letters: Vec<Subset>,
}

/// One symbolic monomial: an X-word times a (commutative) product of
/// formal moments `ψ[∏_S f]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct KsKey {
    pub word: SymbolWord,
    /// Sorted multiset of ψ-moment subsets.
    pub psis: Vec<Subset>,
}

/// A polynomial in the symbols `X(∏_S f)` with formal ψ-moment
/// coefficients and integer scalars.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KsExpansion {
    pub terms: BTreeMap<KsKey, i64>,
}

impl KsExpansion {
    fn insert(&mut self, key: KsKey, c: i64) {
        let entry = self.terms.entry(key).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    fn add(&mut self, other: &KsExpansion, sign: i64) {
        for (k, v) in &other.terms {
            self.insert(k.clone(), v * sign);
        }
    }

    /// Prepends the symbol `X(∏_S f)` to every term.
    fn left_mul_symbol(&self, s: &Subset) -> KsExpansion {
        let mut out = KsExpansion::default();
        for (k, v) in &self.terms {
            let mut word = vec![s.clone()];
            word.extend(k.word.letters.iter().cloned());
            out.insert(KsKey { word: SymbolWord { letters: word }, psis: k.psis.clone() }, *v);
        }
        out
    }

    pub fn coefficient(&self, key: &KsKey) -> i64 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    /// Largest subset size appearing as an X-symbol letter.
    pub fn max_symbol_size(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|k| k.word.letters.iter().map(|s| s.len()))
            .max()
            .unwrap_or(0)
    }
}

fn merge_subsets(a: &Subset, b: &Subset) -> Subset {
    let mut out = a.clone();
    out.extend_from_slice(b);
    out.sort_unstable();
    out
}

/// Expands the Wick product `W(g_1, …, g_m)` of subset products by the
/// defining recursion: `W(f) = X(f)`,
/// `W(f, f_1) = X(f) W(f_1) − W(f f_1) − ψ[f f_1]`, and
/// `W(f, f_1, …, f_m) = X(f) W(f_1, …, f_m) − W(f f_1, f_2, …, f_m)`.
pub fn wick_expand(args: &[Subset]) -> KsExpansion {
    let mut out = KsExpansion::default();
    match args.len() {
        0 => {
            out.insert(KsKey { word: SymbolWord { letters: Vec::new() }, psis: Vec::new() }, 1);
        }
        1 => {
            out.insert(
                KsKey { word: SymbolWord { letters: vec![args[0].clone()] }, psis: Vec::new() },
                1,
            );
        }
        len => {
            let rest = wick_expand(&args[1..]);
            out.add(&rest.left_mul_symbol(&args[0]), 1);
            let mut merged = vec![merge_subsets(&args[0], &args[1])];
            merged.extend_from_slice(&args[2..]);
            out.add(&wick_expand(&merged), -1);
            if len == 2 {
                out.insert(
                    KsKey {
                        word: SymbolWord { letters: Vec::new() },
                        psis: vec![merge_subsets(&args[0], &args[1])],
                    },
                    -1,
                );
            }
        }
    }
    out
}

/// The Kailath–Segall expansion of the Appell symbol
/// `A(X(f_1), …, X(f_n)) = Σ_{π ∈ Int(n)} W(∏_{B_1} f, …, ∏_{B_k} f)`,
/// with each Wick product expanded symbolically. After cancellation the
/// result involves the singleton symbols `X(f_i)` only.
pub fn kailath_segall_expand(n: usize) -> Result<KsExpansion> {
    let mut out = KsExpansion::default();
    for pi in enumerate_partitions(n, PartitionFamily::Interval)? {
        let blocks: Vec<Subset> = pi.blocks().to_vec();
        out.add(&wick_expand(&blocks), 1);
    }
    Ok(out)
}
