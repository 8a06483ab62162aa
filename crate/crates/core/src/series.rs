//! Degree-truncated noncommutative formal power series with exact rational
//! coefficients.
//!
//! A series carries its alphabet size `d` and a degree cap `N`; arithmetic
//! never reports coefficients beyond degree `N`, and mixing different caps
//! or alphabets is a shape error rather than a silent truncation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::combinat::MultiIndex;
use crate::error::{Error, Result};
use crate::scalar::Q;

/// A noncommutative formal power series truncated at total degree `cap`.
///
/// Coefficients are keyed by words over `{1..d}`; absent keys are zero and
/// zero coefficients are pruned on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCSeries {
    d: usize,
    cap: usize,
    coeffs: BTreeMap<Vec<u8>, Q>,
}

/// A `d`-tuple of series with equal `d` and cap.
pub type SeriesTuple = Vec<NCSeries>;

impl NCSeries {
    /// The zero series.
    pub fn zero(d: usize, cap: usize) -> Self {
        NCSeries { d, cap, coeffs: BTreeMap::new() }
    }

    /// The constant series `c`.
    pub fn constant(d: usize, cap: usize, c: Q) -> Self {
        let mut s = NCSeries::zero(d, cap);
        if !c.is_zero() {
            s.coeffs.insert(Vec::new(), c);
        }
        s
    }

    /// The constant series `1`.
    pub fn one(d: usize, cap: usize) -> Self {
        NCSeries::constant(d, cap, Q::one())
    }

    /// The generator `z_i` (1-based).
    pub fn generator(d: usize, cap: usize, i: u8) -> Result<Self> {
        if i < 1 || i as usize > d {
            return Err(Error::Shape(format!("variable index {i} out of range [1, {d}]")));
        }
        Ok(NCSeries::monomial(d, cap, &[i], Q::one()))
    }

    /// A single monomial `c · z_w` (silently zero when `|w| > cap`).
    pub fn monomial(d: usize, cap: usize, word: &[u8], c: Q) -> Self {
        let mut s = NCSeries::zero(d, cap);
        if word.len() <= cap && !c.is_zero() {
            s.coeffs.insert(word.to_vec(), c);
        }
        s
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// The coefficient of the word `w` (zero if absent).
    pub fn coeff(&self, word: &[u8]) -> Q {
        self.coeffs.get(word).cloned().unwrap_or_else(Q::zero)
    }

    /// Sets a coefficient in place (must respect `d` and the cap).
    pub fn set_coeff(&mut self, word: &[u8], c: Q) -> Result<()> {
        if word.len() > self.cap {
            return Err(Error::Shape(format!(
                "word of length {} exceeds degree cap {}",
                word.len(),
                self.cap
            )));
        }
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

    /// Iterates over the stored (nonzero) terms.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Q)> {
        self.coeffs.iter()
    }

    /// The constant term `F(0)`.
    pub fn constant_term(&self) -> Q {
        self.coeff(&[])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// All nonzero coefficients as `MultiIndex`-keyed pairs.
    pub fn indexed_terms(&self) -> Vec<(MultiIndex, Q)> {
        self.coeffs
            .iter()
            .map(|(w, c)| (MultiIndex::new(self.d, w.clone()).expect("stored word is valid"), c.clone()))
            .collect()
    }

    fn check_shape(&self, other: &NCSeries) -> Result<()> {
        if self.d != other.d || self.cap != other.cap {
            return Err(Error::Shape(format!(
                "(d = {}, cap = {}) vs (d = {}, cap = {})",
                self.d, self.cap, other.d, other.cap
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &NCSeries) -> Result<NCSeries> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            let entry = out.coeffs.entry(w.clone()).or_insert_with(Q::zero);
            *entry += c;
            if entry.is_zero() {
                out.coeffs.remove(w);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NCSeries) -> Result<NCSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCSeries {
        let coeffs = self.coeffs.iter().map(|(w, c)| (w.clone(), -c.clone())).collect();
        NCSeries { d: self.d, cap: self.cap, coeffs }
    }

    pub fn scale(&self, c: &Q) -> NCSeries {
        if c.is_zero() {
            return NCSeries::zero(self.d, self.cap);
        }
        let coeffs = self.coeffs.iter().map(|(w, a)| (w.clone(), a * c)).collect();
        NCSeries { d: self.d, cap: self.cap, coeffs }
    }

    /// Truncated noncommutative Cauchy product: the coefficient of `w` is
    /// the sum of `F[u]·G[v]` over splittings `w = (u, v)`.
    pub fn mul(&self, other: &NCSeries) -> Result<NCSeries> {
        self.check_shape(other)?;
        let mut out = NCSeries::zero(self.d, self.cap);
        for (u, a) in &self.coeffs {
            if u.len() > self.cap {
                continue;
            }
            for (v, b) in &other.coeffs {
                if u.len() + v.len() > self.cap {
                    continue;
                }
                let mut w = u.clone();
                w.extend_from_slice(v);
                let entry = out.coeffs.entry(w.clone()).or_insert_with(Q::zero);
                *entry += a * b;
                if entry.is_zero() {
                    out.coeffs.remove(&w);
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse, computed through the truncated geometric
    /// expansion of `(c(1 + A))^{-1}` with `A = F/c - 1`.
    pub fn mul_inverse(&self) -> Result<NCSeries> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv_c0 = c0.recip();
        // A has zero constant term, so A^k vanishes beyond k = cap.
        let mut a = self.scale(&inv_c0);
        a.coeffs.remove(&Vec::new());
        let mut out = NCSeries::one(self.d, self.cap);
        let mut power = NCSeries::one(self.d, self.cap);
        for _ in 0..self.cap {
            power = power.mul(&a.neg())?;
            if power.is_zero() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out.scale(&inv_c0))
    }

    /// Left noncommutative partial derivative `D_i`:
    /// `D_i z_w = δ_{i, w(1)} z_{(w(2)..w(n))}`, `D_i 1 = 0`.
    pub fn left_derivative(&self, i: u8) -> Result<NCSeries> {
        if i < 1 || i as usize > self.d {
            return Err(Error::Shape(format!("variable index {i} out of range [1, {}]", self.d)));
        }
        let mut out = NCSeries::zero(self.d, self.cap);
        for (w, c) in &self.coeffs {
            if let Some((&head, tail)) = w.split_first() {
                if head == i {
                    let entry = out.coeffs.entry(tail.to_vec()).or_insert_with(Q::zero);
                    *entry += c;
                    if entry.is_zero() {
                        out.coeffs.remove(tail);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Substitutes `z_i := args[i-1]`; every argument must have zero
    /// constant term so degrees filter correctly.
    pub fn substitute(&self, args: &[NCSeries]) -> Result<NCSeries> {
        if args.len() != self.d {
            return Err(Error::Shape(format!(
                "expected {} substitution arguments, got {}",
                self.d,
                args.len()
            )));
        }
        for (i, g) in args.iter().enumerate() {
            if !g.constant_term().is_zero() {
                return Err(Error::Substitution { index: i });
            }
        }
        let (od, ocap) = match args.first() {
            Some(g) => (g.d, g.cap),
            None => (self.d, self.cap),
        };
        for g in args {
            if g.d != od || g.cap != ocap {
                return Err(Error::Shape("substitution arguments have mixed shapes".into()));
            }
        }
        let mut out = NCSeries::zero(od, ocap);
        // Words are visited in lexicographic order, so consecutive words
        // share prefixes; a stack of prefix products avoids recomputing
        // the shared part of each product.
        let mut stack: Vec<(Vec<u8>, NCSeries)> = vec![(Vec::new(), NCSeries::one(od, ocap))];
        for (w, c) in &self.coeffs {
            // Each argument has degree >= 1, so long source words cannot
            // contribute below the cap.
            if w.len() > ocap {
                continue;
            }
            while !w.starts_with(&stack.last().expect("root stays").0) {
                stack.pop();
            }
            let (prefix, mut term) = stack.last().expect("root stays").clone();
            for &letter in &w[prefix.len()..] {
                term = term.mul(&args[(letter - 1) as usize])?;
                let mut key = stack.last().expect("root stays").0.clone();
                key.push(letter);
                stack.push((key, term.clone()));
                if term.is_zero() {
                    break;
                }
            }
            if !term.is_zero() {
                out = out.add(&term.scale(c))?;
            }
        }
        Ok(out)
    }

    /// Returns a copy truncated to a (possibly lower) cap.
    pub fn with_cap(&self, cap: usize) -> NCSeries {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(w, _)| w.len() <= cap)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        NCSeries { d: self.d, cap, coeffs }
    }
}

/// The identity tuple `(z_1, …, z_d)`.
pub fn identity_tuple(d: usize, cap: usize) -> SeriesTuple {
    (1..=d as u8)
        .map(|i| NCSeries::generator(d, cap, i).expect("index in range"))
        .collect()
}

/// Compositional inverse of a tuple with identity linear part, by a
/// triangular degree-by-degree solve: each pass of
/// `H_i := z_i - (G_i - z_i)(H)` fixes one more degree.
pub fn comp_inverse(g: &SeriesTuple) -> Result<SeriesTuple> {
    let d = g.len();
    if d == 0 {
        return Err(Error::Shape("empty tuple".into()));
    }
    let cap = g[0].cap;
    for (i, gi) in g.iter().enumerate() {
        if gi.d != d || gi.cap != cap {
            return Err(Error::Shape("tuple components have mixed shapes".into()));
        }
        if !gi.constant_term().is_zero() {
            return Err(Error::LinearPart(format!("component {} has nonzero constant term", i + 1)));
        }
        for j in 1..=d as u8 {
            let expect = if j as usize == i + 1 { Q::one() } else { Q::zero() };
            if gi.coeff(&[j]) != expect {
                return Err(Error::LinearPart(format!(
                    "component {} has linear coefficient {} at z_{}",
                    i + 1,
                    gi.coeff(&[j]),
                    j
                )));
            }
        }
    }
    // r_i = G_i - z_i has degree >= 2.
    let mut r = Vec::with_capacity(d);
    for (i, gi) in g.iter().enumerate() {
        let zi = NCSeries::generator(d, cap, (i + 1) as u8)?;
        r.push(gi.sub(&zi)?);
    }
    let mut h = identity_tuple(d, cap);
    for _ in 0..cap {
        let mut next = Vec::with_capacity(d);
        for i in 0..d {
            let zi = NCSeries::generator(d, cap, (i + 1) as u8)?;
            next.push(zi.sub(&r[i].substitute(&h)?)?);
        }
        if next == h {
            break;
        }
        h = next;
    }
    Ok(h)
}

/// Composes a tuple with arguments componentwise: `(G ∘ H)_i = G_i(H)`.
pub fn compose_tuple(g: &SeriesTuple, h: &SeriesTuple) -> Result<SeriesTuple> {
    g.iter().map(|gi| gi.substitute(h)).collect()
}

// ---------------------------------------------------------------------------
// Two-block series: words over a doubled alphabet where the first `dx`
// letters (the x block) commute with the remaining letters (the z block).
// Used for the Appell / Sheffer generating functions, whose terms have the
// form P(x) · z_w. Words are normalized by stably moving z letters right.
// ---------------------------------------------------------------------------

/// Normalizes a series over a `dx + dz` alphabet by moving all letters
/// `> dx` to the right of letters `<= dx`, preserving relative orders.
pub fn two_block_normalize(f: &NCSeries, dx: usize) -> NCSeries {
    let mut out = NCSeries::zero(f.d, f.cap);
    for (w, c) in f.terms() {
        let mut xs: Vec<u8> = Vec::with_capacity(w.len());
        let mut zs: Vec<u8> = Vec::new();
        for &l in w {
            if (l as usize) <= dx {
                xs.push(l);
            } else {
                zs.push(l);
            }
        }
        xs.extend_from_slice(&zs);
        let entry = out.coeffs.entry(xs.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            out.coeffs.remove(&xs);
        }
    }
    out
}

/// Product in the two-block quotient: ordinary Cauchy product followed by
/// normalization.
pub fn two_block_mul(f: &NCSeries, g: &NCSeries, dx: usize) -> Result<NCSeries> {
    Ok(two_block_normalize(&f.mul(g)?, dx))
}

/// `(1 - y)^{-1}` in the two-block quotient for `y` with zero constant
/// term whose every monomial has at least one z letter, truncating once the
/// z degree exceeds `z_cap`.
pub fn two_block_geometric(y: &NCSeries, dx: usize, z_cap: usize) -> Result<NCSeries> {
    let y = prune_z_degree(&two_block_normalize(y, dx), dx, z_cap);
    let mut out = NCSeries::one(y.d, y.cap);
    let mut power = NCSeries::one(y.d, y.cap);
    loop {
        power = prune_z_degree(&two_block_mul(&power, &y, dx)?, dx, z_cap);
        if power.is_zero() {
            break;
        }
        out = out.add(&power)?;
    }
    Ok(out)
}

/// Drops terms whose z-letter count exceeds `z_cap`.
pub fn prune_z_degree(f: &NCSeries, dx: usize, z_cap: usize) -> NCSeries {
    let mut out = NCSeries::zero(f.d, f.cap);
    for (w, c) in f.terms() {
        let zdeg = w.iter().filter(|&&l| (l as usize) > dx).count();
        if zdeg <= z_cap {
            out.coeffs.insert(w.clone(), c.clone());
        }
    }
    out
}

/// Embeds a `d`-variable series into the z block of a `dx + d` alphabet
/// (letter `i` becomes `dx + i`), with the given total cap.
pub fn embed_z_block(f: &NCSeries, dx: usize, total_cap: usize) -> NCSeries {
    let mut out = NCSeries::zero(dx + f.d, total_cap);
    for (w, c) in f.terms() {
        if w.len() > total_cap {
            continue;
        }
        let word: Vec<u8> = w.iter().map(|&l| l + dx as u8).collect();
        out.coeffs.insert(word, c.clone());
    }
    out
}

/// Extracts, from a normalized two-block series, the coefficient of the z
/// word `zw` as a map from x words to rationals.
pub fn z_coefficient(f: &NCSeries, dx: usize, zw: &[u8]) -> BTreeMap<Vec<u8>, Q> {
    let target: Vec<u8> = zw.iter().map(|&l| l + dx as u8).collect();
    let mut out = BTreeMap::new();
    for (w, c) in f.terms() {
        let split = w.iter().position(|&l| (l as usize) > dx).unwrap_or(w.len());
        if &w[split..] == target.as_slice() {
            out.insert(w[..split].to_vec(), c.clone());
        }
    }
    out
}
