//! Floating-point contour integrals used as an independent oracle in tests.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::Polynomial;
use crate::error::{Error, Result};

use super::grothendieck::GrothendieckData;
use super::oned::OneForm1D;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourParams {
    pub radius: f64,
    pub samples: usize,
}

impl Default for ContourParams {
    fn default() -> Self {
        ContourParams { radius: 1e-2, samples: 256 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericResidue {
    pub value: Complex64,
    /// Difference to the estimate with half the samples.
    pub error: f64,
}

/// `(1/2 pi i) \oint form` on the circle of the given radius around `center`.
pub fn contour_residue_1d(form: &OneForm1D, center: Complex64, params: ContourParams) -> Result<NumericResidue> {
    let mut pt = BTreeMap::new();
    let mut vals = Vec::with_capacity(params.samples);
    for k in 0..params.samples {
        let dz = Complex64::from_polar(params.radius, 2.0 * PI * k as f64 / params.samples as f64);
        pt.insert(form.var.clone(), center + dz);
        let f = form.coeff.eval_c64(&pt) * dz;
        if !f.is_finite() {
            return Err(Error::Residue(format!("radius {} meets a pole", params.radius)));
        }
        vals.push(f);
    }
    let full = vals.iter().sum::<Complex64>() / params.samples as f64;
    let half = vals.iter().step_by(2).sum::<Complex64>() / params.samples.div_ceil(2) as f64;
    Ok(NumericResidue { value: full, error: (full - half).norm() })
}

fn eval_all(ps: &[Polynomial], vars: &[String], z: &[Complex64]) -> Vec<Complex64> {
    let pt: BTreeMap<String, Complex64> = vars.iter().cloned().zip(z.iter().copied()).collect();
    ps.iter().map(|p| p.eval_c64(&pt)).collect()
}

fn solve_c(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))?;
        if a[p][c].norm() < 1e-300 {
            return None;
        }
        a.swap(p, c);
        b.swap(p, c);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for k in c..n {
                let t = a[c][k];
                a[i][k] -= f * t;
            }
            let t = b[c];
            b[i] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

fn det_c(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&i, &j| m[i][c].norm().total_cmp(&m[j][c].norm())) else { return d };
        if m[p][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for k in c..n {
                let t = m[c][k];
                m[i][k] -= f * t;
            }
        }
    }
    d
}

struct Map<'a> {
    vars: &'a [String],
    a: &'a [Polynomial],
    jac: Vec<Vec<Polynomial>>,
}

impl Map<'_> {
    fn jac_at(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.jac.iter().map(|row| eval_all(row, self.vars, z)).collect()
    }

    fn newton(&self, z0: &[Complex64], w: &[Complex64]) -> Option<Vec<Complex64>> {
        let mut z = z0.to_vec();
        for _ in 0..60 {
            let f: Vec<Complex64> = eval_all(self.a, self.vars, &z).iter().zip(w).map(|(x, y)| x - y).collect();
            let dz = solve_c(self.jac_at(&z), f)?;
            let step: f64 = dz.iter().map(|x| x.norm()).sum();
            for (zi, d) in z.iter_mut().zip(&dz) {
                *zi -= d;
            }
            if step < 1e-14 * (1.0 + z.iter().map(|x| x.norm()).sum::<f64>()) {
                return Some(z);
            }
        }
        None
    }
}

/// Reflected base-`m` digits of `idx`: consecutive indices differ in one
/// digit by one step, so tracked preimages move continuously.
fn snake_digits(idx: usize, m: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0usize; k];
    let mut r = idx;
    for j in (0..k).rev() {
        let step = r % m;
        r /= m;
        out[j] = if r % 2 == 1 { m - 1 - step } else { step };
    }
    out
}

fn same(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

/// Integral over `{|a_j| = radius / 2^j}` near the point, computed in the image
/// variables `w = a(z)`: the integrand becomes the sum over local preimages
/// of `h / det Da`, averaged over the torus. Unequal radii keep the torus off
/// the usual branch loci such as `w_1 + w_2 = 0`.
pub fn contour_grothendieck(data: &GrothendieckData, params: ContourParams, window: f64) -> Result<NumericResidue> {
    let k = data.vars.len();
    let jac = data.denominators.iter().map(|p| data.vars.iter().map(|v| p.derivative(v)).collect()).collect();
    let map = Map { vars: &data.vars, a: &data.denominators, jac };
    let p: Vec<Complex64> = data.point.iter().map(|g| g.to_complex()).collect();
    let m = params.samples;
    let total = m.pow(k as u32);
    let w_at = |idx: usize| -> Vec<Complex64> {
        snake_digits(idx, m, k)
            .into_iter()
            .enumerate()
            .map(|(j, d)| Complex64::from_polar(params.radius * 0.5f64.powi(j as i32), 2.0 * PI * d as f64 / m as f64))
            .collect()
    };
    // seed preimages of the first sample from a grid around the point
    let w0 = w_at(0);
    let mut pre: Vec<Vec<Complex64>> = Vec::new();
    let grid = 6i32;
    let mut seeds: Vec<Vec<Complex64>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &seeds {
            for a in -grid..=grid {
                for b in -grid..=grid {
                    let mut t = s.clone();
                    t.push(Complex64::new(a as f64, b as f64) * (window / grid as f64));
                    next.push(t);
                }
            }
        }
        seeds = next;
    }
    for s in seeds {
        let z0: Vec<Complex64> = s.iter().zip(&p).map(|(d, c)| c + d).collect();
        if let Some(z) = map.newton(&z0, &w0) {
            let close = z.iter().zip(&p).all(|(x, c)| (x - c).norm() < window);
            if close && !pre.iter().any(|q| same(q, &z, 1e-9)) {
                pre.push(z);
            }
        }
    }
    if pre.is_empty() {
        return Err(Error::Residue("no preimages near the point; adjust radius or window".into()));
    }
    let mut vals = Vec::with_capacity(total);
    let mut grid_vals = vec![Complex64::new(0.0, 0.0); total];
    for idx in 0..total {
        let w = w_at(idx);
        let mut next = Vec::with_capacity(pre.len());
        for z in &pre {
            let z = map.newton(z, &w).ok_or_else(|| Error::Residue("preimage tracking failed".into()))?;
            if next.iter().any(|q: &Vec<Complex64>| same(q, &z, 1e-9)) {
                return Err(Error::Residue("preimage paths collided; use more samples".into()));
            }
            next.push(z);
        }
        pre = next;
        let mut g = Complex64::new(0.0, 0.0);
        for z in &pre {
            let h = eval_all(std::slice::from_ref(&data.numerator), &data.vars, z)[0];
            g += h / det_c(&map.jac_at(z));
        }
        if !g.is_finite() {
            return Err(Error::Residue("non-finite sample".into()));
        }
        vals.push(g);
        let key = snake_digits(idx, m, k).iter().fold(0usize, |acc, d| acc * m + d);
        grid_vals[key] = g;
    }
    let full = vals.iter().sum::<Complex64>() / total as f64;
    let mut half_sum = Complex64::new(0.0, 0.0);
    let mut half_n = 0usize;
    for (key, v) in grid_vals.iter().enumerate() {
        let mut r = key;
        let mut even = true;
        for _ in 0..k {
            even &= (r % m).is_multiple_of(2);
            r /= m;
        }
        if even {
            half_sum += v;
            half_n += 1;
        }
    }
    let half = half_sum / half_n as f64;
    Ok(NumericResidue { value: full, error: (full - half).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GaussianRational as G;
    use crate::parser::parse_expression;
    use crate::residue::grothendieck::grothendieck_residue;

    fn vars() -> Vec<String> {
        vec!["x".to_string(), "y".to_string()]
    }

    fn p(s: &str) -> Polynomial {
        parse_expression(s, &vars()).unwrap().num().clone()
    }

    #[test]
    fn dy_over_y() {
        let f = OneForm1D::new("y", parse_expression("1/y", &["y".to_string()]).unwrap()).unwrap();
        let r = contour_residue_1d(&f, Complex64::new(0.0, 0.0), ContourParams { radius: 1.0, samples: 256 }).unwrap();
        assert!((r.value - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn linear_pair_matches_exact() {
        let d = GrothendieckData {
            vars: vars(),
            point: vec![G::zero(), G::zero()],
            denominators: vec![p("x + y"), p("x - y")],
            numerator: p("1"),
        };
        let r = contour_grothendieck(&d, ContourParams { radius: 1e-2, samples: 16 }, 0.5).unwrap();
        assert!((r.value - Complex64::new(-0.5, 0.0)).norm() < 1e-6, "{:?}", r);
        assert_eq!(grothendieck_residue(&d).unwrap(), G::from_ratio(-1, 2));
    }

    #[test]
    fn branched_preimages() {
        // two preimages per torus point; the residue is the x coefficient of h at y = 0
        let d = GrothendieckData {
            vars: vars(),
            point: vec![G::zero(), G::zero()],
            denominators: vec![p("x^2 - y"), p("y")],
            numerator: p("3*x + y + 1"),
        };
        let exact = grothendieck_residue(&d).unwrap();
        assert_eq!(exact, G::from_int(3));
        let r = contour_grothendieck(&d, ContourParams { radius: 1e-4, samples: 32 }, 0.05).unwrap();
        assert!((r.value - exact.to_complex()).norm() < 1e-6, "{:?} vs {}", r, exact);
    }
}
