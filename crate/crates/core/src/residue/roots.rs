//! Exact Gaussian-rational roots of univariate polynomials.
//!
//! Floating-point root approximations only propose candidates; every root
//! returned is verified by exact evaluation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use crate::algebra::{GaussianRational as G, UPoly};

#[derive(Debug, Clone, PartialEq)]
pub struct RootSplit {
    /// Distinct exact roots with their multiplicities in the input.
    pub roots: Vec<(G, u32)>,
    /// Monic squarefree cofactor with no verified roots; its roots are not in Q(i)
    /// (or were not recognised).
    pub remainder: UPoly,
}

fn durand_kerner(p: &UPoly) -> Vec<Complex64> {
    let n = p.degree();
    let lc = p.lc().to_complex();
    let c: Vec<Complex64> = p.coeffs().iter().map(|a| a.to_complex() / lc).collect();
    let bound = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound * 0.5).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                z[i] += Complex64::new(1e-9, 1e-9);
                continue;
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    let dc: Vec<Complex64> = (1..=n).map(|k| c[k] * k as f64).collect();
    let deval = |x: Complex64| dc.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a);
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let d = deval(*zi);
            if d.norm() == 0.0 {
                break;
            }
            *zi -= eval(*zi) / d;
        }
    }
    z
}

/// Continued-fraction convergents of `x` close to `x`, smallest denominators first.
fn convergents(x: f64) -> Vec<BigRational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let tol = 1e-7 * (1.0 + x.abs());
    if x.abs() < tol {
        out.push(BigRational::zero());
        return out;
    }
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ab = BigInt::from_f64(a).unwrap_or_default();
        let h2 = &ab * &h1 + &h0;
        let k2 = &ab * &k1 + &k0;
        let cand = BigRational::new(h2.clone(), k2.clone());
        let approx = num_traits::ToPrimitive::to_f64(&cand).unwrap_or(f64::NAN);
        if (approx - x).abs() < tol {
            out.push(cand);
            if out.len() >= 3 {
                break;
            }
        }
        if k2.bits() > 40 {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

pub fn gaussian_roots(p: &UPoly) -> RootSplit {
    let mut s = p.squarefree_part();
    let mut roots = Vec::new();
    let take = |s: &mut UPoly, r: G, roots: &mut Vec<(G, u32)>| {
        let (q, rem) = s.divrem(&UPoly::linear(&r));
        if rem.is_zero() {
            roots.push((r.clone(), p.root_multiplicity(&r)));
            *s = q;
            true
        } else {
            false
        }
    };
    while s.degree() >= 1 {
        if s.degree() == 1 {
            let r = -&(&s.coeff(0) / &s.coeff(1));
            take(&mut s, r, &mut roots);
            break;
        }
        let approx = durand_kerner(&s);
        let mut found = false;
        for z in approx {
            let (re, im) = (convergents(z.re), convergents(z.im));
            'cands: for a in &re {
                for b in &im {
                    let r = G::new(a.clone(), b.clone());
                    if s.eval(&r).is_zero() && take(&mut s, r, &mut roots) {
                        found = true;
                        break 'cands;
                    }
                }
            }
        }
        if !found {
            break;
        }
    }
    roots.sort_by(|a, b| {
        let (x, y) = (a.0.to_f64(), b.0.to_f64());
        x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
    });
    RootSplit { roots, remainder: s.monic() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expression;

    fn up(s: &str) -> UPoly {
        UPoly::from_polynomial(parse_expression(s, &["y".to_string()]).unwrap().num(), "y").unwrap()
    }

    #[test]
    fn rational_and_gaussian_roots() {
        let r = gaussian_roots(&up("(y - 1/3)^2*(y + 2)*(y^2 + 1/4)"));
        assert_eq!(r.remainder.degree(), 0);
        let got: Vec<(String, u32)> = r.roots.iter().map(|(a, k)| (a.to_string(), *k)).collect();
        assert_eq!(got.len(), 4, "{:?}", got);
        assert!(got.contains(&("1/3".to_string(), 2)));
        assert!(got.contains(&("-2".to_string(), 1)));
        assert!(got.contains(&("1/2i".to_string(), 1)));
        assert!(got.contains(&("-1/2i".to_string(), 1)));
    }

    #[test]
    fn irrational_roots_stay_in_remainder() {
        let r = gaussian_roots(&up("y*(y^2 - 2)*(y^3 + y + 1)"));
        assert_eq!(r.roots, vec![(G::zero(), 1)]);
        assert_eq!(r.remainder.degree(), 5);
    }

    #[test]
    fn constants_have_no_roots() {
        let r = gaussian_roots(&up("7"));
        assert!(r.roots.is_empty());
    }
}
