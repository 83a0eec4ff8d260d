//! Logarithmic forms with polynomial coefficients on a local chart.
//!
//! Coordinates are `z_1 .. z_n` and the divisor is `z_1 ⋯ z_l = 0`. Forms are
//! written in the basis `ξ_B = ξ_{b_1} ∧ ⋯ ∧ ξ_{b_r}` with `ξ_i = dz_i/z_i`
//! for `i <= l` and `ξ_i = dz_i` otherwise. Indices are 1-based in the public
//! API. Internally a subset `B` is a bitmask with bit `i - 1` standing for `i`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{q, RationalMatrix, Q};
use crate::report::Report;

pub const DEFAULT_DEGREE_BOUND: u32 = 3;
pub const DEFAULT_TRIALS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogformError {
    #[error("forms live on different charts: (n, l) = {0:?} and {1:?}")]
    ChartMismatch((usize, usize), (usize, usize)),
    #[error("form is not homogeneous in form degree")]
    NonHomogeneous,
    #[error("form has weight {weight}, above the residue size {size}")]
    WeightTooLow { weight: usize, size: usize },
    #[error("{what} has form degree {found}, expected {expected}")]
    DegreeMismatch {
        what: String,
        expected: i64,
        found: usize,
    },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
}

type Exponents = Vec<u32>;

/// Polynomial in `z_1 .. z_n` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Exponents, Q>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        Self::monomial(n, vec![0; n], c)
    }

    /// The coordinate `z_i`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i - 1] = 1;
        Self::monomial(n, e, Q::one())
    }

    pub fn monomial(n: usize, exponents: Vec<u32>, c: Q) -> Self {
        assert_eq!(exponents.len(), n, "exponent vector length");
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Q)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn add_term(&mut self, e: Exponents, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Q) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// `∂/∂z_i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            let a = e[i - 1];
            if a == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i - 1] -= 1;
            out.add_term(e2, c * q(a as i64));
        }
        out
    }

    /// `z_i · ∂/∂z_i`.
    fn euler_derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            let a = e[i - 1];
            if a > 0 {
                out.add_term(e.clone(), c * q(a as i64));
            }
        }
        out
    }

    /// Sets the coordinates in `mask` to zero.
    fn restrict_zero(&self, mask: u32) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            if !vanishes(e, mask) {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// Every monomial is divisible by some `z_j`, `j` in `mask`.
    fn in_monomial_ideal(&self, mask: u32) -> bool {
        self.terms.keys().all(|e| vanishes(e, mask))
    }
}

fn vanishes(e: &[u32], mask: u32) -> bool {
    e.iter().enumerate().any(|(i, &a)| a > 0 && mask & (1 << i) != 0)
}

fn support(e: &[u32]) -> u32 {
    e.iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .fold(0, |m, (i, _)| m | (1 << i))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let abs = c.abs();
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| {
                    if a == 1 {
                        format!("z{}", i + 1)
                    } else {
                        format!("z{}^{}", i + 1, a)
                    }
                })
                .collect();
            match (abs.is_one(), factors.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{}", factors.join("*"))?,
                (false, true) => write!(f, "{abs}")?,
                (false, false) => write!(f, "{abs}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

fn mask_of(indices: &[usize], n: usize) -> Result<u32, LogformError> {
    let mut m = 0u32;
    for &i in indices {
        if i == 0 || i > n {
            return Err(LogformError::IndexOutOfRange(i));
        }
        m |= 1 << (i - 1);
    }
    Ok(m)
}

fn indices_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

/// `ξ_A ∧ ξ_B = wedge_sign(A, B) · ξ_{A ∪ B}` for disjoint `A`, `B`.
fn wedge_sign(a: u32, b: u32) -> Q {
    let mut inversions = 0;
    for i in 0..32 {
        if b & (1 << i) != 0 {
            inversions += (a >> (i + 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Number of uncancelled log poles of `z^e ξ_B`.
fn monomial_weight(b: u32, e: &[u32], lmask: u32) -> usize {
    let logs = b & lmask;
    (logs & !support(e)).count_ones() as usize
}

/// Local chart data: `I = {1..k}` is the residue set and `J ⊆ {1..l}`
/// indexes the generators of the ideal of `C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogChart {
    pub n: usize,
    pub l: usize,
    pub k: usize,
    pub j: Vec<usize>,
}

impl LogChart {
    pub fn new(n: usize, l: usize, k: usize, j: &[usize]) -> Result<Self, LogformError> {
        if n > 31 {
            return Err(LogformError::InvalidChart(format!("n = {n} exceeds 31")));
        }
        if !(k <= l && l <= n) {
            return Err(LogformError::InvalidChart(format!(
                "need k <= l <= n, got k = {k}, l = {l}, n = {n}"
            )));
        }
        let mut j: Vec<usize> = j.to_vec();
        j.sort_unstable();
        j.dedup();
        if let Some(&bad) = j.iter().find(|&&x| x == 0 || x > l) {
            return Err(LogformError::InvalidChart(format!("J index {bad} is not in 1..={l}")));
        }
        Ok(LogChart { n, l, k, j })
    }

    pub fn j1(&self) -> Vec<usize> {
        self.j.iter().copied().filter(|&x| x <= self.k).collect()
    }

    pub fn j2(&self) -> Vec<usize> {
        self.j.iter().copied().filter(|&x| x > self.k).collect()
    }

    pub fn residue_set(&self) -> Vec<usize> {
        (1..=self.k).collect()
    }

    fn i_mask(&self) -> u32 {
        (1u32 << self.k) - 1
    }

    fn j_mask(&self) -> u32 {
        self.j.iter().fold(0, |m, &x| m | (1 << (x - 1)))
    }

    fn j2_mask(&self) -> u32 {
        self.j_mask() & !self.i_mask()
    }

    fn l_mask(&self) -> u32 {
        (1u32 << self.l) - 1
    }

    pub fn zero_form(&self) -> LogPolyForm {
        LogPolyForm::zero(self.n, self.l)
    }
}

impl fmt::Display for LogChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j: Vec<String> = self.j.iter().map(|x| x.to_string()).collect();
        write!(f, "n={} l={} k={} J={{{}}}", self.n, self.l, self.k, j.join(","))
    }
}

/// `Σ_B f_B ξ_B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogPolyForm {
    n: usize,
    l: usize,
    terms: BTreeMap<u32, Poly>,
}

impl LogPolyForm {
    pub fn zero(n: usize, l: usize) -> Self {
        LogPolyForm {
            n,
            l,
            terms: BTreeMap::new(),
        }
    }

    /// `f · ξ_{b_1} ∧ ⋯ ∧ ξ_{b_r}` in the given order.
    pub fn term(n: usize, l: usize, b: &[usize], f: Poly) -> Result<Self, LogformError> {
        let mut out = Self::zero(n, l);
        let mut acc = 0u32;
        let mut s = Q::one();
        for &i in b {
            let m = mask_of(&[i], n)?;
            if acc & m != 0 {
                return Ok(out);
            }
            s *= wedge_sign(acc, m);
            acc |= m;
        }
        out.add_term(acc, f.scale(&s));
        Ok(out)
    }

    pub fn xi(n: usize, l: usize, b: &[usize]) -> Result<Self, LogformError> {
        Self::term(n, l, b, Poly::constant(n, Q::one()))
    }

    /// `f · dz_{b_1} ∧ ⋯ ∧ dz_{b_r}`, using `dz_i = z_i ξ_i` for `i <= l`.
    pub fn dz(n: usize, l: usize, b: &[usize], f: Poly) -> Result<Self, LogformError> {
        let mut g = f;
        for &i in b {
            if i >= 1 && i <= l {
                g = g.mul(&Poly::var(n, i));
            }
        }
        Self::term(n, l, b, g)
    }

    pub fn chart_dims(&self) -> (usize, usize) {
        (self.n, self.l)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(B, f_B)` with `B` as sorted 1-based indices.
    pub fn terms(&self) -> Vec<(Vec<usize>, Poly)> {
        self.terms.iter().map(|(b, f)| (indices_of(*b), f.clone())).collect()
    }

    pub fn coefficient(&self, b: &[usize]) -> Poly {
        mask_of(b, self.n)
            .ok()
            .and_then(|m| self.terms.get(&m).cloned())
            .unwrap_or_else(|| Poly::zero(self.n))
    }

    fn add_term(&mut self, b: u32, f: Poly) {
        if f.is_zero() {
            return;
        }
        let sum = match self.terms.get(&b) {
            Some(g) => g.add(&f),
            None => f,
        };
        if sum.is_zero() {
            self.terms.remove(&b);
        } else {
            self.terms.insert(b, sum);
        }
    }

    fn check_chart(&self, other: &LogPolyForm) -> Result<(), LogformError> {
        if (self.n, self.l) != (other.n, other.l) {
            return Err(LogformError::ChartMismatch((self.n, self.l), (other.n, other.l)));
        }
        Ok(())
    }

    pub fn add(&self, other: &LogPolyForm) -> Result<LogPolyForm, LogformError> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (b, f) in &other.terms {
            out.add_term(*b, f.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Q) -> LogPolyForm {
        self.mul_poly(&Poly::constant(self.n, s.clone()))
    }

    pub fn mul_poly(&self, g: &Poly) -> LogPolyForm {
        let mut out = Self::zero(self.n, self.l);
        for (b, f) in &self.terms {
            out.add_term(*b, f.mul(g));
        }
        out
    }

    /// Form degrees present, in increasing order.
    pub fn form_degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|b| b.count_ones() as usize).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// `None` for the zero form.
    pub fn form_degree(&self) -> Result<Option<usize>, LogformError> {
        match self.form_degrees().as_slice() {
            [] => Ok(None),
            [p] => Ok(Some(*p)),
            _ => Err(LogformError::NonHomogeneous),
        }
    }

    pub fn wedge(&self, other: &LogPolyForm) -> Result<LogPolyForm, LogformError> {
        self.check_chart(other)?;
        let mut out = Self::zero(self.n, self.l);
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                out.add_term(a | b, f.mul(g).scale(&wedge_sign(*a, *b)));
            }
        }
        Ok(out)
    }

    pub fn exterior_d(&self) -> LogPolyForm {
        let mut out = Self::zero(self.n, self.l);
        for (b, f) in &self.terms {
            for i in 1..=self.n {
                let bit = 1u32 << (i - 1);
                if b & bit != 0 {
                    continue;
                }
                let c = if i <= self.l {
                    f.euler_derivative(i)
                } else {
                    f.derivative(i)
                };
                out.add_term(b | bit, c.scale(&wedge_sign(bit, *b)));
            }
        }
        out
    }

    fn max_weight(&self) -> usize {
        let lmask = (1u32 << self.l) - 1;
        self.terms
            .iter()
            .flat_map(|(b, f)| f.terms.keys().map(move |e| monomial_weight(*b, e, lmask)))
            .max()
            .unwrap_or(0)
    }

    /// Smallest `k` with the form in `W_k`.
    pub fn weight_level(&self) -> Result<usize, LogformError> {
        self.form_degree()?;
        Ok(self.max_weight())
    }

    /// All coefficients lie in the ideal `(z_j : j ∈ J)`.
    pub fn in_ideal(&self, j: &[usize]) -> bool {
        match mask_of(j, self.n) {
            Ok(m) => self.terms.values().all(|f| f.in_monomial_ideal(m)),
            Err(_) => false,
        }
    }

    pub fn in_ideal_subcomplex(&self, chart: &LogChart) -> bool {
        self.in_ideal(&chart.j)
    }

    /// `R_I` on the top graded piece `Gr^W_{|I|}`; monomials of lower weight
    /// go to zero. The result is a form on `D_I` written in the same chart:
    /// its coefficients do not involve `z_i`, `i ∈ I`, and no `ξ_i`, `i ∈ I`,
    /// appears.
    pub fn residue(&self, i: &[usize]) -> Result<LogPolyForm, LogformError> {
        let imask = mask_of(i, self.n)?;
        if let Some(&bad) = i.iter().find(|&&x| x > self.l) {
            return Err(LogformError::IndexOutOfRange(bad));
        }
        let size = imask.count_ones() as usize;
        let lmask = (1u32 << self.l) - 1;
        let mut out = Self::zero(self.n, self.l);
        for (b, f) in &self.terms {
            for (e, c) in &f.terms {
                let w = monomial_weight(*b, e, lmask);
                if w > size {
                    return Err(LogformError::WeightTooLow { weight: w, size });
                }
                if w < size || b & imask != imask || vanishes(e, imask) {
                    continue;
                }
                let rest = b & !imask;
                let s = wedge_sign(imask, rest);
                out.add_term(rest, Poly::monomial(self.n, e.clone(), c * s));
            }
        }
        Ok(out)
    }

    /// Pullback to `D_I`, for forms regular along `D_I`.
    pub fn restrict_to(&self, i: &[usize]) -> Result<LogPolyForm, LogformError> {
        let imask = mask_of(i, self.n)?;
        let mut out = Self::zero(self.n, self.l);
        for (b, f) in &self.terms {
            if b & imask == 0 {
                out.add_term(*b, f.restrict_zero(imask));
            }
        }
        Ok(out)
    }

    /// Coefficients against `dz_B`, if the form has no poles.
    pub fn regular_coefficients(&self) -> Option<BTreeMap<Vec<usize>, Poly>> {
        let mut out = BTreeMap::new();
        for (b, f) in &self.terms {
            let logs = b & ((1u32 << self.l) - 1);
            let mut g = Poly::zero(self.n);
            for (e, c) in &f.terms {
                let mut e2 = e.clone();
                for (idx, a) in e2.iter_mut().enumerate() {
                    if logs & (1 << idx) != 0 {
                        if *a == 0 {
                            return None;
                        }
                        *a -= 1;
                    }
                }
                g.add_term(e2, c.clone());
            }
            out.insert(indices_of(*b), g);
        }
        Some(out)
    }
}

impl fmt::Display for LogPolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, p)| {
                if *b == 0 {
                    return format!("({p})");
                }
                let idx: Vec<String> = indices_of(*b).iter().map(|x| x.to_string()).collect();
                let basis = format!("ξ_{{{}}}", idx.join(","));
                if p.terms.len() == 1 && p.terms.iter().all(|(e, c)| c.is_one() && e.iter().all(|&a| a == 0)) {
                    basis
                } else {
                    format!("({p}) {basis}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn monomials_up_to(n: usize, bound: u32, vars: u32) -> Vec<Exponents> {
    let mut out = vec![vec![0; n]];
    for i in 0..n {
        if vars & (1 << i) == 0 {
            continue;
        }
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for a in 0..=(bound - used) {
                let mut e2 = e.clone();
                e2[i] = a;
                next.push(e2);
            }
        }
        out = next;
    }
    out.sort();
    out
}

fn subsets_of_size(universe: u32, size: usize) -> Vec<u32> {
    let bits = indices_of(universe);
    let mut out = Vec::new();
    let total = 1u32 << bits.len();
    for pick in 0..total {
        if pick.count_ones() as usize != size {
            continue;
        }
        let mut m = 0;
        for (t, &b) in bits.iter().enumerate() {
            if pick & (1 << t) != 0 {
                m |= 1 << (b - 1);
            }
        }
        out.push(m);
    }
    out.sort_unstable();
    out
}

/// Target of the forward inclusion inside regular `(p - k)`-forms on `D_I`
/// truncated at a coefficient degree bound, with a row-reduced spanning set.
struct ClaimTarget {
    index: BTreeMap<(u32, Exponents), usize>,
    rows: RationalMatrix,
    pivots: Vec<usize>,
}

impl ClaimTarget {
    fn new(chart: &LogChart, degree: usize, bound: u32) -> Self {
        let n = chart.n;
        let free = ((1u32 << n) - 1) & !chart.i_mask();
        let bases = subsets_of_size(free, degree);
        let monomials = monomials_up_to(n, bound, free);
        let mut index = BTreeMap::new();
        for &b in &bases {
            for e in &monomials {
                let next = index.len();
                index.insert((b, e.clone()), next);
            }
        }
        let mut span: Vec<Vec<Q>> = Vec::new();
        let unit = |key: &(u32, Exponents), s: Q| {
            let mut v = vec![Q::zero(); index.len()];
            v[index[key]] = s;
            v
        };
        for j in indices_of(chart.j2_mask()) {
            let jbit = 1u32 << (j - 1);
            for &b in &bases {
                for e in &monomials {
                    // z_j · z^e dz_B
                    if e.iter().sum::<u32>() < bound {
                        let mut e2 = e.clone();
                        e2[j - 1] += 1;
                        span.push(unit(&(b, e2), Q::one()));
                    }
                    // dz_j ∧ z^e dz_{B'}
                    if b & jbit != 0 {
                        let rest = b & !jbit;
                        span.push(unit(&(b, e.clone()), wedge_sign(jbit, rest)));
                    }
                }
            }
        }
        let dim = index.len();
        let mut rows = RationalMatrix::zeros(span.len(), dim);
        for (r, v) in span.iter().enumerate() {
            for (c, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    rows.set(r, c, x.clone());
                }
            }
        }
        let rref = rows.rref();
        let pivots = rref.pivots.clone();
        ClaimTarget {
            index,
            rows: rref.matrix,
            pivots,
        }
    }

    fn vector(&self, coeffs: &BTreeMap<Vec<usize>, Poly>, n: usize) -> Option<Vec<Q>> {
        let mut v = vec![Q::zero(); self.index.len()];
        for (b, f) in coeffs {
            let m = mask_of(b, n).ok()?;
            for (e, c) in &f.terms {
                let pos = *self.index.get(&(m, e.clone()))?;
                v[pos] += c;
            }
        }
        Some(v)
    }

    fn contains(&self, v: &[Q]) -> bool {
        let mut rest = v.to_vec();
        for (r, &pc) in self.pivots.iter().enumerate() {
            let factor = rest[pc].clone();
            if factor.is_zero() {
                continue;
            }
            for (c, x) in self.rows.row(r).iter().enumerate() {
                if !x.is_zero() {
                    rest[c] -= x * &factor;
                }
            }
        }
        rest.iter().all(Zero::is_zero)
    }
}

/// Outcome of checking that `R_I` maps `I_C Ω^p(log D) ∩ W_k` into
/// `I_C Ω^{p-k}_{D_I} + dI_C ∧ Ω^{p-k-1}_{D_I}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimCheck {
    pub chart: LogChart,
    pub p: usize,
    pub seed: u64,
    pub degree_bound: u32,
    pub generators: usize,
    pub nonzero_residues: usize,
    /// Generators handled by writing `z_E ξ_B = ±dz_j ∧ z_{E∖j} ξ_{B∖j}`.
    pub case_dz: usize,
    /// Generators whose residue is `z_j` times another residue.
    pub case_ideal: usize,
    pub random_trials: usize,
    pub failures: Vec<String>,
}

impl ClaimCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn claim_forward_check(chart: &LogChart, p: usize, seed: u64) -> ClaimCheck {
    claim_forward_check_with(chart, p, seed, DEFAULT_DEGREE_BOUND, DEFAULT_TRIALS)
}

/// Monomial generators `z^e ξ_B` of `I_C Ω^p(log D) ∩ W_k` with
/// `deg z^e <= bound`.
pub fn claim_generators(chart: &LogChart, p: usize, bound: u32) -> Vec<LogPolyForm> {
    let (n, l) = (chart.n, chart.l);
    let all = (1u32 << n) - 1;
    let jmask = chart.j_mask();
    let mut out = Vec::new();
    for b in subsets_of_size(all, p) {
        for e in monomials_up_to(n, bound, all) {
            if !vanishes(&e, jmask) || monomial_weight(b, &e, chart.l_mask()) > chart.k {
                continue;
            }
            let mut form = LogPolyForm::zero(n, l);
            form.add_term(b, Poly::monomial(n, e, Q::one()));
            out.push(form);
        }
    }
    out
}

pub fn claim_forward_check_with(chart: &LogChart, p: usize, seed: u64, bound: u32, trials: usize) -> ClaimCheck {
    let mut result = ClaimCheck {
        chart: chart.clone(),
        p,
        seed,
        degree_bound: bound,
        generators: 0,
        nonzero_residues: 0,
        case_dz: 0,
        case_ideal: 0,
        random_trials: 0,
        failures: Vec::new(),
    };
    let generators = claim_generators(chart, p, bound);
    result.generators = generators.len();
    if p < chart.k {
        // no ξ_B with |B| = p contains ξ_I, so every residue vanishes
        for g in &generators {
            match g.residue(&chart.residue_set()) {
                Ok(r) if r.is_zero() => {}
                _ => result.failures.push(format!("{g}: nonzero residue below degree k")),
            }
        }
        return result;
    }
    let target = ClaimTarget::new(chart, p - chart.k, bound);
    let i = chart.residue_set();
    let check = |form: &LogPolyForm, result: &mut ClaimCheck| -> Option<LogPolyForm> {
        let r = match form.residue(&i) {
            Ok(r) => r,
            Err(e) => {
                result.failures.push(format!("{form}: {e}"));
                return None;
            }
        };
        let Some(coeffs) = r.regular_coefficients() else {
            result.failures.push(format!("{form}: residue {r} has a pole on D_I"));
            return None;
        };
        match target.vector(&coeffs, chart.n) {
            Some(v) if target.contains(&v) => {}
            _ => result
                .failures
                .push(format!("{form}: residue {r} is not in I_C Ω + dI_C ∧ Ω on D_I")),
        }
        Some(r)
    };
    let j2 = chart.j2_mask();
    for g in &generators {
        let Some(r) = check(g, &mut result) else {
            continue;
        };
        if r.is_zero() {
            continue;
        }
        result.nonzero_residues += 1;
        let (&b, f) = g.terms.iter().next().expect("generators are monomials");
        let e = f.terms.keys().next().expect("generators are monomials");
        let hits = support(e) & j2;
        if hits == 0 {
            result.failures.push(format!("{g}: no j in J₂ ∩ E"));
            continue;
        }
        let j = hits.trailing_zeros() as usize + 1;
        let jbit = 1u32 << (j - 1);
        let coeffs = r.regular_coefficients().expect("checked above");
        if b & jbit != 0 {
            result.case_dz += 1;
            if !coeffs.keys().all(|bb| bb.contains(&j)) {
                result.failures.push(format!("{g}: residue {r} is not a multiple of dz_{j}"));
            }
        } else {
            result.case_ideal += 1;
            if !coeffs.values().all(|f| f.in_monomial_ideal(jbit)) {
                result.failures.push(format!("{g}: residue {r} is not divisible by z_{j}"));
            }
        }
    }
    if !generators.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let mut combo = chart.zero_form();
            let picks = rng.gen_range(1..=4.min(generators.len()));
            for _ in 0..picks {
                let g = &generators[rng.gen_range(0..generators.len())];
                let c = q(rng.gen_range(-5..=5));
                combo = combo.add(&g.scale(&c)).expect("same chart");
            }
            check(&combo, &mut result);
            result.random_trials += 1;
        }
    }
    result
}

/// Lifts `η̃_j`, `ζ̃_j` for one `j ∈ J₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessChoice {
    pub j: usize,
    pub eta: LogPolyForm,
    pub zeta: LogPolyForm,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub omega: LogPolyForm,
    pub residue: Option<LogPolyForm>,
    pub expected: LogPolyForm,
    pub checks: Report,
}

/// Builds `ω = Σ_{j ∈ J₂} ξ_1 ∧ ⋯ ∧ ξ_k ∧ (dz_j ∧ η̃_j + z_j ζ̃_j)` and checks
/// its membership in `I_C Ω^p ∩ W_k`, its residue along `I` and the vanishing
/// of its other residues of size `k`.
pub fn claim_witness(chart: &LogChart, p: usize, choices: &[WitnessChoice]) -> Result<Witness, LogformError> {
    let (n, l, k) = (chart.n, chart.l, chart.k);
    let j2 = chart.j2();
    let i = chart.residue_set();
    let xi_i = LogPolyForm::xi(n, l, &i)?;
    let mut omega = chart.zero_form();
    let mut expected = chart.zero_form();
    for c in choices {
        if !j2.contains(&c.j) {
            return Err(LogformError::InvalidChart(format!("{} is not in J₂", c.j)));
        }
        for (what, form, deg) in [("η", &c.eta, p as i64 - k as i64 - 1), ("ζ", &c.zeta, p as i64 - k as i64)] {
            if form.chart_dims() != (n, l) {
                return Err(LogformError::ChartMismatch((n, l), form.chart_dims()));
            }
            if let Some(found) = form.form_degree()? {
                if found as i64 != deg {
                    return Err(LogformError::DegreeMismatch {
                        what: format!("{what}_{}", c.j),
                        expected: deg,
                        found,
                    });
                }
            }
        }
        let dzj = LogPolyForm::dz(n, l, &[c.j], Poly::constant(n, Q::one()))?;
        let zj = Poly::var(n, c.j);
        let inner = dzj.wedge(&c.eta)?.add(&c.zeta.mul_poly(&zj))?;
        omega = omega.add(&xi_i.wedge(&inner)?)?;
        let on_d = dzj
            .restrict_to(&i)?
            .wedge(&c.eta.restrict_to(&i)?)?
            .add(&c.zeta.restrict_to(&i)?.mul_poly(&zj))?;
        expected = expected.add(&on_d)?;
    }
    let mut checks = Report::new("logforms-witness");
    let loc = format!("{chart}, p={p}");
    checks.assert("ω lies in I_C Ω^p(log D)", &loc, omega.in_ideal_subcomplex(chart));
    let weight = omega.max_weight();
    checks.assert("ω lies in W_k", &loc, weight <= k);
    let residue = omega.residue(&i).ok();
    checks.push(
        "R_I(ω) = Σ (dz_j ∧ η_j + z_j ζ_j)",
        &loc,
        &expected,
        residue.as_ref().map_or_else(|| "undefined".to_string(), ToString::to_string),
    );
    for other in subsets_of_size(chart.l_mask(), k) {
        let idx = indices_of(other);
        if idx == i {
            continue;
        }
        let r = omega.residue(&idx);
        checks.push(
            "R_I'(ω) = 0",
            format!("{loc}, I'={idx:?}"),
            "0",
            r.map_or_else(|e| e.to_string(), |r| r.to_string()),
        );
    }
    Ok(Witness {
        omega,
        residue,
        expected,
        checks,
    })
}

pub fn random_poly<R: Rng>(n: usize, vars: u32, max_degree: u32, max_terms: usize, rng: &mut R) -> Poly {
    let monomials = monomials_up_to(n, max_degree, vars);
    let mut p = Poly::zero(n);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let e = monomials[rng.gen_range(0..monomials.len())].clone();
        p.add_term(e, q(rng.gen_range(-3..=3)));
    }
    p
}

/// Random form of form degree `p` in the log basis.
pub fn random_form<R: Rng>(n: usize, l: usize, p: usize, rng: &mut R) -> LogPolyForm {
    let all = (1u32 << n) - 1;
    let bases = subsets_of_size(all, p);
    let mut out = LogPolyForm::zero(n, l);
    for _ in 0..rng.gen_range(1..=3) {
        let b = bases[rng.gen_range(0..bases.len())];
        out.add_term(b, random_poly(n, all, 2, 3, rng));
    }
    out
}

/// Random form with coefficients in `(z_j : j ∈ J)`.
pub fn random_ideal_form<R: Rng>(chart: &LogChart, p: usize, rng: &mut R) -> LogPolyForm {
    let mut out = chart.zero_form();
    for &j in &chart.j {
        let f = random_form(chart.n, chart.l, p, rng);
        out = out.add(&f.mul_poly(&Poly::var(chart.n, j))).expect("same chart");
    }
    out
}

/// Random regular form `Σ f_B dz_B` of degree `p`, or zero if `p < 0`.
pub fn random_regular_form<R: Rng>(n: usize, l: usize, p: i64, rng: &mut R) -> LogPolyForm {
    if p < 0 || p as usize > n {
        return LogPolyForm::zero(n, l);
    }
    let all = (1u32 << n) - 1;
    let bases = subsets_of_size(all, p as usize);
    let mut out = LogPolyForm::zero(n, l);
    for _ in 0..rng.gen_range(1..=2) {
        let b = indices_of(bases[rng.gen_range(0..bases.len())]);
        let f = random_poly(n, all, 2, 2, rng);
        out = out.add(&LogPolyForm::dz(n, l, &b, f).expect("valid indices")).expect("same chart");
    }
    out
}

pub fn random_witness_choices<R: Rng>(chart: &LogChart, p: usize, rng: &mut R) -> Vec<WitnessChoice> {
    let d = p as i64 - chart.k as i64;
    chart
        .j2()
        .into_iter()
        .map(|j| WitnessChoice {
            j,
            eta: random_regular_form(chart.n, chart.l, d - 1, rng),
            zeta: random_regular_form(chart.n, chart.l, d, rng),
        })
        .collect()
}

/// All charts with `n <= max_n`.
pub fn enumerate_charts(max_n: usize) -> Vec<LogChart> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for l in 0..=n {
            for k in 0..=l {
                for jm in 0..(1u32 << l) {
                    out.push(LogChart::new(n, l, k, &indices_of(jm)).expect("valid by construction"));
                }
            }
        }
    }
    out
}

fn first_failure(kind: &str, trials: usize, failures: &[String]) -> (String, String) {
    let expected = format!("{trials} {kind} trials, 0 failures");
    let actual = match failures.first() {
        None => expected.clone(),
        Some(f) => format!("{trials} {kind} trials, {} failures; first: {f}", failures.len()),
    };
    (expected, actual)
}

/// Seeded verification of `d² = 0`, closure of `I_C Ω(log D)` under `d`, multiplicativity of `W` and of
/// the form-degree filtration, and both inclusions of the residue claim on
/// every chart with `n <= max_n`. Monomial generators are enumerated up to
/// coefficient degree `bound`.
pub fn logforms_report(seed: u64, trials: usize, max_n: usize, bound: u32) -> Report {
    let mut report = Report::new("logforms");
    report.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let charts = enumerate_charts(max_n);
    let mut by_nl: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for chart in &charts {
        let loc = chart.to_string();
        if by_nl.insert((chart.n, chart.l), ()).is_none() {
            let (mut dd, mut mult, mut hodge) = (Vec::new(), Vec::new(), Vec::new());
            for _ in 0..trials {
                let p = rng.gen_range(0..=chart.n);
                let a = random_form(chart.n, chart.l, p, &mut rng);
                let dda = a.exterior_d().exterior_d();
                if !dda.is_zero() {
                    dd.push(format!("a = {a}, d(d a) = {dda}"));
                }
                let p2 = rng.gen_range(0..=chart.n);
                let b = random_form(chart.n, chart.l, p2, &mut rng);
                let ab = a.wedge(&b).expect("same chart");
                let (wa, wb, wab) = (a.max_weight(), b.max_weight(), ab.max_weight());
                if wab > wa + wb {
                    mult.push(format!("a = {a}, b = {b}: weight {wab} > {wa} + {wb}"));
                }
                if !ab.is_zero() && ab.form_degrees() != vec![p + p2] {
                    hodge.push(format!("a = {a}, b = {b}: a ∧ b has form degrees {:?}", ab.form_degrees()));
                }
            }
            let (e, a) = first_failure("d∘d", trials, &dd);
            report.push("d∘d = 0", format!("n={} l={}", chart.n, chart.l), e, a);
            let (e, a) = first_failure("product", trials, &mult);
            report.push("W_a ∧ W_b ⊆ W_{a+b}", format!("n={} l={}", chart.n, chart.l), e, a);
            let (e, a) = first_failure("product", trials, &hodge);
            report.push("F^a ∧ F^b ⊆ F^{a+b}", format!("n={} l={}", chart.n, chart.l), e, a);
        }
        let mut lemma = Vec::new();
        for _ in 0..trials {
            let p = rng.gen_range(0..=chart.n);
            let a = random_ideal_form(chart, p, &mut rng);
            if !a.in_ideal_subcomplex(chart) {
                lemma.push(format!("generator {a} is outside the ideal"));
                continue;
            }
            let da = a.exterior_d();
            if !da.in_ideal_subcomplex(chart) {
                lemma.push(format!("a = {a}, d a = {da}"));
            }
        }
        let (e, a) = first_failure("d-closure", trials, &lemma);
        report.push("d(I_C Ω(log D)) ⊆ I_C Ω(log D)", &loc, e, a);
        for p in 0..=chart.n {
            let c = claim_forward_check_with(chart, p, seed ^ (p as u64), bound, trials);
            let total = c.generators + c.random_trials;
            let (e, a) = first_failure("residue", total, &c.failures);
            report.push("R_I(I_C Ω^p ∩ W_k) ⊆ I_C Ω + dI_C ∧ Ω", format!("{loc}, p={p}"), e, a);
            if p < chart.k {
                continue;
            }
            let mut witness_failures = Vec::new();
            for _ in 0..trials.min(20) {
                let choices = random_witness_choices(chart, p, &mut rng);
                match claim_witness(chart, p, &choices) {
                    Ok(w) => witness_failures.extend(
                        w.checks
                            .failures()
                            .map(|f| format!("ω = {}: {} (got {})", w.omega, f.check, f.actual)),
                    ),
                    Err(e) => witness_failures.push(e.to_string()),
                }
            }
            let (e, a) = first_failure("witness", trials.min(20), &witness_failures);
            report.push("witness ω realizes Σ (dz_j ∧ η_j + z_j ζ_j)", format!("{loc}, p={p}"), e, a);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn one(n: usize) -> Poly {
        Poly::constant(n, Q::one())
    }

    #[test]
    fn wedge_examples() {
        let x1 = LogPolyForm::xi(2, 2, &[1]).unwrap();
        let x2 = LogPolyForm::xi(2, 2, &[2]).unwrap();
        assert_eq!(x1.wedge(&x2).unwrap(), LogPolyForm::xi(2, 2, &[1, 2]).unwrap());
        assert!(x1.wedge(&x1).unwrap().is_zero());
        let a = x1.mul_poly(&z(2, 2));
        let x12 = LogPolyForm::term(2, 2, &[1, 2], z(2, 2)).unwrap();
        assert_eq!(a.wedge(&x2).unwrap(), x12);
        assert_eq!(x2.wedge(&a).unwrap(), x12.scale(&q(-1)));
        let other = LogPolyForm::xi(3, 2, &[1]).unwrap();
        assert!(matches!(x1.wedge(&other), Err(LogformError::ChartMismatch(..))));
    }

    #[test]
    fn exterior_d_examples() {
        let a = LogPolyForm::term(2, 2, &[2], z(2, 1)).unwrap();
        assert_eq!(a.exterior_d(), LogPolyForm::term(2, 2, &[1, 2], z(2, 1)).unwrap());
        assert!(LogPolyForm::term(3, 2, &[1, 3], Poly::constant(3, q(5)))
            .unwrap()
            .exterior_d()
            .is_zero());
        let f = LogPolyForm::term(2, 2, &[], z(2, 1).mul(&z(2, 2))).unwrap();
        assert!(!f.exterior_d().is_zero());
        assert!(f.exterior_d().exterior_d().is_zero());
        // dz_3 with l = 2 is closed; d(z_3^2) = 2 z_3 dz_3
        let g = LogPolyForm::term(3, 2, &[], z(3, 3).mul(&z(3, 3))).unwrap();
        assert_eq!(g.exterior_d(), LogPolyForm::term(3, 2, &[3], z(3, 3).scale(&q(2))).unwrap());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(LogPolyForm::xi(2, 2, &[1, 2]).unwrap().weight_level(), Ok(2));
        assert_eq!(
            LogPolyForm::term(2, 2, &[1, 2], z(2, 1)).unwrap().weight_level(),
            Ok(1)
        );
        assert_eq!(LogPolyForm::xi(3, 2, &[3]).unwrap().weight_level(), Ok(0));
        let mixed = LogPolyForm::xi(2, 2, &[1])
            .unwrap()
            .add(&LogPolyForm::xi(2, 2, &[1, 2]).unwrap())
            .unwrap();
        assert_eq!(mixed.weight_level(), Err(LogformError::NonHomogeneous));
        assert_eq!(LogPolyForm::zero(2, 2).weight_level(), Ok(0));
    }

    #[test]
    fn ideal_examples() {
        let a = LogPolyForm::term(2, 2, &[2], z(2, 1)).unwrap();
        assert!(a.in_ideal(&[1]));
        assert!(!LogPolyForm::xi(2, 2, &[1]).unwrap().in_ideal(&[1]));
        assert!(a.exterior_d().in_ideal(&[1]));
    }

    #[test]
    fn residue_examples() {
        let n = 3;
        let a = LogPolyForm::xi(n, 1, &[1])
            .unwrap()
            .wedge(&LogPolyForm::xi(n, 1, &[3]).unwrap())
            .unwrap();
        assert_eq!(a.residue(&[1]).unwrap(), LogPolyForm::xi(n, 1, &[3]).unwrap());
        // ξ_3 ∧ ξ_1 = -ξ_1 ∧ ξ_3
        let b = LogPolyForm::xi(n, 1, &[3, 1]).unwrap();
        assert_eq!(b.residue(&[1]).unwrap(), LogPolyForm::xi(n, 1, &[3]).unwrap().scale(&q(-1)));
        let c = LogPolyForm::term(1, 1, &[1], z(1, 1)).unwrap();
        assert!(c.residue(&[1]).unwrap().is_zero());
        // weight 2 form has no residue of size 1
        let d = LogPolyForm::xi(2, 2, &[1, 2]).unwrap();
        assert_eq!(d.residue(&[1]), Err(LogformError::WeightTooLow { weight: 2, size: 1 }));
        assert_eq!(d.residue(&[1, 2]).unwrap(), LogPolyForm::term(2, 2, &[], one(2)).unwrap());
        assert_eq!(d.residue(&[2, 1]).unwrap(), d.residue(&[1, 2]).unwrap());
        // z_3 ξ_{1,3} = ξ_1 ∧ dz_3 with l = 3
        let e = LogPolyForm::term(3, 3, &[1, 3], z(3, 3)).unwrap();
        assert_eq!(e.residue(&[1]).unwrap(), LogPolyForm::dz(3, 3, &[3], one(3)).unwrap());
    }

    #[test]
    fn forward_claim_examples() {
        let chart = LogChart::new(2, 2, 2, &[1]).unwrap();
        let g = LogPolyForm::term(2, 2, &[1, 2], z(2, 1)).unwrap();
        assert!(g.residue(&[1, 2]).unwrap().is_zero());
        let c = claim_forward_check(&chart, 2, 7);
        assert!(c.passed(), "{:?}", c.failures);
        assert_eq!(c.nonzero_residues, 0);

        let chart = LogChart::new(3, 3, 1, &[2]).unwrap();
        // z_2 ξ_1 ∧ dz_3 = z_2 z_3 ξ_{1,3}
        let g = LogPolyForm::dz(3, 3, &[3], z(3, 2))
            .and_then(|f| LogPolyForm::xi(3, 3, &[1]).unwrap().wedge(&f))
            .unwrap();
        assert_eq!(g, LogPolyForm::term(3, 3, &[1, 3], z(3, 2).mul(&z(3, 3))).unwrap());
        assert_eq!(g.residue(&[1]).unwrap(), LogPolyForm::dz(3, 3, &[3], z(3, 2)).unwrap());
        for p in 0..=3 {
            let c = claim_forward_check_with(&chart, p, 11, 2, 100);
            assert!(c.passed(), "p={p}: {:?}", c.failures);
            if p == 2 {
                assert!(c.case_dz > 0 && c.case_ideal > 0, "p={p}: {c:?}");
            }
            assert_eq!(c.case_dz + c.case_ideal, c.nonzero_residues);
        }
    }

    #[test]
    fn forward_claim_rejects_missing_generator() {
        // J₂ = {2}: in degree 0 the target is the ideal (z_2)
        let chart = LogChart::new(2, 2, 1, &[2]).unwrap();
        let target = ClaimTarget::new(&chart, 0, 2);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![], one(2));
        assert!(!target.contains(&target.vector(&coeffs, 2).unwrap()));
        coeffs.insert(vec![], z(2, 2));
        assert!(target.contains(&target.vector(&coeffs, 2).unwrap()));
    }

    #[test]
    fn witness_examples() {
        let chart = LogChart::new(3, 3, 1, &[1, 2]).unwrap();
        let zero = chart.zero_form();
        let w = claim_witness(&chart, 2, &[]).unwrap();
        assert!(w.omega.is_zero());
        assert!(w.checks.passed());
        let choice = WitnessChoice {
            j: 2,
            eta: LogPolyForm::term(3, 3, &[], one(3)).unwrap(),
            zeta: zero.clone(),
        };
        let w = claim_witness(&chart, 2, &[choice]).unwrap();
        let expected_omega = LogPolyForm::xi(3, 3, &[1])
            .unwrap()
            .wedge(&LogPolyForm::dz(3, 3, &[2], one(3)).unwrap())
            .unwrap();
        assert_eq!(w.omega, expected_omega);
        assert_eq!(w.residue.unwrap(), LogPolyForm::dz(3, 3, &[2], one(3)).unwrap());
        assert!(w.checks.passed(), "{}", w.checks.to_text());

        let bad = WitnessChoice {
            j: 2,
            eta: LogPolyForm::xi(3, 3, &[3]).unwrap(),
            zeta: zero,
        };
        assert!(matches!(
            claim_witness(&chart, 2, &[bad]),
            Err(LogformError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn witness_random_choices_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for chart in enumerate_charts(4) {
            for p in chart.k..=chart.n {
                let choices = random_witness_choices(&chart, p, &mut rng);
                let w = claim_witness(&chart, p, &choices).unwrap();
                assert!(w.checks.passed(), "{chart} p={p}: {}", w.checks.to_text());
            }
        }
    }

    #[test]
    fn chart_validation() {
        assert!(LogChart::new(2, 3, 1, &[]).is_err());
        assert!(LogChart::new(3, 2, 1, &[3]).is_err());
        let c = LogChart::new(4, 3, 1, &[3, 1]).unwrap();
        assert_eq!(c.j1(), vec![1]);
        assert_eq!(c.j2(), vec![3]);
    }

    #[test]
    fn display_uses_xi_notation() {
        let a = LogPolyForm::term(2, 2, &[1, 2], z(2, 1).scale(&q(-2))).unwrap();
        assert_eq!(a.to_string(), "(-2*z1) ξ_{1,2}");
        assert_eq!(LogPolyForm::xi(2, 2, &[2]).unwrap().to_string(), "ξ_{2}");
        let p = z(2, 1).add(&z(2, 2).mul(&z(2, 2)).scale(&q(-1)));
        assert_eq!(p.to_string(), "z1 - z2^2");
    }

    #[test]
    fn small_report_passes() {
        let r = logforms_report(5, 10, 2, 2);
        assert!(r.passed(), "{}", r.to_text());
    }
}
