//! Alexander polynomial of a closed positive braid through the reduced Burau
//! representation:
//!
//! ```text
//! det(ρ(b) - I) = ± t^k (1 + t + ... + t^(n-1)) Δ(t)
//! ```
//!
//! All arithmetic is over ℤ[t] with checked 128-bit coefficients.

use thiserror::Error;

use super::laurent::LaurentPoly;
use crate::braid::BraidWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlexanderError {
    #[error("closure has {0} components, not a knot")]
    NotAKnot(usize),
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("coefficient overflow")]
    Overflow,
    #[error("cannot normalize {0}: {1}")]
    Normalization(String, &'static str),
}

/// Dense polynomial with nonnegative exponents; `c[i]` multiplies `t^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly(Vec<i128>);

impl Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }

    fn constant(c: i128) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `a*self + b*t*self`-style linear combination helper: `Σ factor_k * p_k`
    /// where each factor is `c * t^shift`.
    fn combine(terms: &[(&Poly, i128, usize)]) -> Result<Poly, AlexanderError> {
        let len = terms
            .iter()
            .map(|(p, _, s)| p.0.len() + s)
            .max()
            .unwrap_or(0);
        let mut out = vec![0i128; len];
        for &(p, c, shift) in terms {
            for (i, &a) in p.0.iter().enumerate() {
                let v = a.checked_mul(c).ok_or(AlexanderError::Overflow)?;
                out[i + shift] = out[i + shift]
                    .checked_add(v)
                    .ok_or(AlexanderError::Overflow)?;
            }
        }
        let mut p = Poly(out);
        p.trim();
        Ok(p)
    }

    fn mul(&self, other: &Poly) -> Result<Poly, AlexanderError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero());
        }
        let mut out = vec![0i128; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                let v = a.checked_mul(b).ok_or(AlexanderError::Overflow)?;
                out[i + j] = out[i + j].checked_add(v).ok_or(AlexanderError::Overflow)?;
            }
        }
        let mut p = Poly(out);
        p.trim();
        Ok(p)
    }

    fn sub(&self, other: &Poly) -> Result<Poly, AlexanderError> {
        Poly::combine(&[(self, 1, 0), (other, -1, 0)])
    }

    /// Exact quotient `self / d`; fails unless the remainder is zero and every
    /// quotient coefficient is an integer.
    fn div_exact(&self, d: &Poly) -> Result<Poly, AlexanderError> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        if self.0.len() < d.0.len() {
            return Err(AlexanderError::InexactDivision);
        }
        let mut rem = self.0.clone();
        let dl = d.0.len();
        let lead = d.0[dl - 1];
        let mut quot = vec![0i128; rem.len() - dl + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + dl - 1];
            if top % lead != 0 {
                return Err(AlexanderError::InexactDivision);
            }
            let q = top / lead;
            quot[k] = q;
            if q != 0 {
                for (j, &dj) in d.0.iter().enumerate() {
                    let v = q.checked_mul(dj).ok_or(AlexanderError::Overflow)?;
                    rem[k + j] = rem[k + j].checked_sub(v).ok_or(AlexanderError::Overflow)?;
                }
            }
        }
        if rem.iter().any(|&c| c != 0) {
            return Err(AlexanderError::InexactDivision);
        }
        let mut p = Poly(quot);
        p.trim();
        Ok(p)
    }
}

/// Reduced Burau image of the braid, as an `(n-1) x (n-1)` matrix.
///
/// σᵢ acts as the identity except on column `i - 1` (0-based), which becomes
/// `(…, t, -t, 1, …)` in rows `i - 2, i - 1, i`, truncated at the borders.
fn reduced_burau(b: &BraidWord) -> Result<Vec<Vec<Poly>>, AlexanderError> {
    let d = b.strands() - 1;
    let mut m: Vec<Vec<Poly>> = (0..d)
        .map(|i| (0..d).map(|j| Poly::constant(i128::from(i == j))).collect())
        .collect();
    for &letter in b.letters() {
        let c = letter - 1;
        for row in m.iter_mut() {
            let mut terms: Vec<(&Poly, i128, usize)> = vec![(&row[c], -1, 1)];
            if c > 0 {
                terms.push((&row[c - 1], 1, 1));
            }
            if c + 1 < d {
                terms.push((&row[c + 1], 1, 0));
            }
            let new = Poly::combine(&terms)?;
            row[c] = new;
        }
    }
    Ok(m)
}

/// Fraction-free (Bareiss) determinant over ℤ[t].
fn determinant(mut m: Vec<Vec<Poly>>) -> Result<Poly, AlexanderError> {
    let n = m.len();
    if n == 0 {
        return Ok(Poly::constant(1));
    }
    let mut negate = false;
    let mut prev = Poly::constant(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(Poly::zero());
            };
            m.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].mul(&m[k][k])?;
                let b = m[i][k].mul(&m[k][j])?;
                m[i][j] = a.sub(&b)?.div_exact(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate {
        Poly::combine(&[(&det, -1, 0)])?
    } else {
        det
    })
}

/// `det(ρ(b) - I)` for the reduced Burau representation ρ, unnormalized.
pub fn burau_closure_determinant(b: &BraidWord) -> Result<LaurentPoly, AlexanderError> {
    to_laurent(&burau_minus_identity_det(b)?)
}

fn burau_minus_identity_det(b: &BraidWord) -> Result<Poly, AlexanderError> {
    let mut m = reduced_burau(b)?;
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = row[i].sub(&Poly::constant(1))?;
    }
    determinant(m)
}

fn to_laurent(p: &Poly) -> Result<LaurentPoly, AlexanderError> {
    let coeffs =
        p.0.iter()
            .map(|&c| i64::try_from(c).map_err(|_| AlexanderError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
    Ok(LaurentPoly::from_dense(0, coeffs))
}

/// Alexander polynomial of the knot closing `b`, normalized so that
/// `Δ(t) = Δ(1/t)` and `Δ(1) = 1`.
pub fn alexander(b: &BraidWord) -> Result<LaurentPoly, AlexanderError> {
    let info = b.closure_info();
    if !info.is_knot {
        return Err(AlexanderError::NotAKnot(info.components));
    }
    let det = burau_minus_identity_det(b)?;
    let closure_factor = Poly(vec![1; b.strands()]);
    let quotient = det.div_exact(&closure_factor)?;
    normalize(to_laurent(&quotient)?)
}

fn normalize(p: LaurentPoly) -> Result<LaurentPoly, AlexanderError> {
    let (Some(lo), Some(hi)) = (p.min_degree(), p.max_degree()) else {
        return Err(AlexanderError::Normalization(
            p.to_string(),
            "zero polynomial",
        ));
    };
    let span = hi - lo;
    if span % 2 != 0 {
        return Err(AlexanderError::Normalization(
            p.to_string(),
            "odd degree span",
        ));
    }
    let mut centered = p.shifted(-lo - span / 2);
    match centered.eval_one() {
        1 => {}
        -1 => centered = -&centered,
        _ => return Err(AlexanderError::Normalization(p.to_string(), "|Δ(1)| != 1")),
    }
    if !centered.is_palindromic() {
        return Err(AlexanderError::Normalization(
            p.to_string(),
            "not palindromic",
        ));
    }
    Ok(centered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid;

    fn delta(word: &str, strands: usize) -> LaurentPoly {
        alexander(&parse_braid(word, Some(strands)).unwrap()).unwrap()
    }

    fn poly(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn reference_values() {
        assert_eq!(delta("", 1), LaurentPoly::one());
        let trefoil = poly(&[(-1, 1), (0, -1), (1, 1)]);
        assert_eq!(delta("111", 2), trefoil);
        // T(2,5)
        assert_eq!(
            delta("11111", 2),
            poly(&[(-2, 1), (-1, -1), (0, 1), (1, -1), (2, 1)])
        );
        // (σ1σ2)² closes to T(3,2), the trefoil again
        assert_eq!(delta("1212", 3), trefoil);
        // T(3,4): t^-3 - t^-2 + 1 - t^2 + t^3
        assert_eq!(
            delta("12121212", 3),
            poly(&[(-3, 1), (-2, -1), (0, 1), (2, -1), (3, 1)])
        );
    }

    #[test]
    fn stabilization_and_conjugation_invariance() {
        let base = delta("111", 2);
        assert_eq!(delta("1112", 3), base);
        assert_eq!(delta("2111", 3), base);
        assert_eq!(delta("11213", 4), base);
        assert_eq!(delta("1211", 3), base);
    }

    #[test]
    fn raw_determinant_carries_the_closure_factor() {
        // σ1³ in B2: ρ = [-t³], det(ρ - I) = -t³ - 1 = -(1 + t)(1 - t + t²)
        let det = burau_closure_determinant(&parse_braid("111", Some(2)).unwrap()).unwrap();
        assert_eq!(det, poly(&[(0, -1), (3, -1)]));
    }

    #[test]
    fn links_are_rejected() {
        assert_eq!(
            alexander(&parse_braid("11", Some(2)).unwrap()),
            Err(AlexanderError::NotAKnot(2))
        );
    }

    #[test]
    fn exact_division() {
        let a = Poly(vec![1, 0, 0, 1]);
        let b = Poly(vec![1, 1]);
        assert_eq!(a.div_exact(&b).unwrap(), Poly(vec![1, -1, 1]));
        assert_eq!(
            Poly(vec![1, 0, 1]).div_exact(&b),
            Err(AlexanderError::InexactDivision)
        );
        assert_eq!(
            Poly(vec![1]).div_exact(&Poly(vec![2])),
            Err(AlexanderError::InexactDivision)
        );
    }
}
