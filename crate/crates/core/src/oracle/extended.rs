//! Eigenvalues of ρ₀ + εH in double-double arithmetic, used for entropy
//! differences well below the f64 resolution of S itself.

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectral::{DensityMatrix, NEGATIVE_TOL, ZERO_FLOOR};

const MAX_SWEEPS: usize = 60;

/// a / b to double-double accuracy. The crate's own division forms its
/// residual without a fused multiply-add and is only f64-accurate.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

#[derive(Clone, Copy)]
struct Cdd {
    re: TwoFloat,
    im: TwoFloat,
}

impl Cdd {
    fn zero() -> Self {
        Cdd { re: TwoFloat::from(0.0), im: TwoFloat::from(0.0) }
    }

    fn norm_sqr(self) -> TwoFloat {
        self.re * self.re + self.im * self.im
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }

    fn conj(self) -> Cdd {
        Cdd { re: self.re, im: -self.im }
    }

    fn scale(self, s: TwoFloat) -> Cdd {
        Cdd { re: self.re * s, im: self.im * s }
    }

    fn sub(self, o: Cdd) -> Cdd {
        Cdd { re: self.re - o.re, im: self.im - o.im }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }
}

/// Ascending eigenvalues of the Hermitian matrix a + eps·b, formed and
/// diagonalised (cyclic complex Jacobi) in double-double.
pub(crate) fn eigenvalues_dd(a: &ComplexMatrix, b: &ComplexMatrix, eps: f64) -> Result<Vec<TwoFloat>> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.dim() });
    }
    let e = TwoFloat::from(eps);
    let mut m = vec![Cdd::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            // Hermitian part only, so the diagonal is exactly real
            let (x, y) = (a.get(i, j), b.get(i, j));
            let (xt, yt) = (a.get(j, i).conj(), b.get(j, i).conj());
            let half = TwoFloat::from(0.5);
            let re = (TwoFloat::from(x.re) + TwoFloat::from(xt.re)) * half
                + e * ((TwoFloat::from(y.re) + TwoFloat::from(yt.re)) * half);
            let im = (TwoFloat::from(x.im) + TwoFloat::from(xt.im)) * half
                + e * ((TwoFloat::from(y.im) + TwoFloat::from(yt.im)) * half);
            m[i * n + j] = Cdd { re, im: if i == j { TwoFloat::from(0.0) } else { im } };
        }
    }
    let frob: f64 = m.iter().map(|z| z.norm_sqr().hi()).sum::<f64>().sqrt();
    let tol = TwoFloat::from(1e-31 * frob.max(f64::MIN_POSITIVE));
    let tol2 = tol * tol;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let r2 = apq.norm_sqr();
                if r2 <= tol2 {
                    continue;
                }
                rotated = true;
                let one = TwoFloat::from(1.0);
                let r = r2.sqrt();
                // phase so that the (p, q) entry becomes r
                let ph = apq.conj().scale(dd_div(one, r));
                for k in 0..n {
                    m[k * n + q] = m[k * n + q].mul(ph);
                }
                let phc = ph.conj();
                for k in 0..n {
                    m[q * n + k] = m[q * n + k].mul(phc);
                }
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let theta = dd_div(aqq - app, r + r);
                let t = {
                    let mag = dd_div(one, theta.abs() + (theta * theta + one).sqrt());
                    if theta.is_sign_negative() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = dd_div(one, (t * t + one).sqrt());
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    let nkp = akp.scale(c).sub(akq.scale(s));
                    let nkq = akp.scale(s).add(akq.scale(c));
                    m[k * n + p] = nkp;
                    m[k * n + q] = nkq;
                    m[p * n + k] = nkp.conj();
                    m[q * n + k] = nkq.conj();
                }
                m[p * n + p] = Cdd { re: app - t * r, im: TwoFloat::from(0.0) };
                m[q * n + q] = Cdd { re: aqq + t * r, im: TwoFloat::from(0.0) };
                m[p * n + q] = Cdd::zero();
                m[q * n + p] = Cdd::zero();
            }
        }
        if !rotated {
            let mut vals: Vec<TwoFloat> = (0..n).map(|i| m[i * n + i].re).collect();
            vals.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
            return Ok(vals);
        }
    }
    Err(Error::EigensolverFailure { dim: n })
}

/// S(ρ₀ + εH) − S(ρ₀) with absolute accuracy far below f64 rounding of S.
/// Sorted eigenvalues are paired and each term is
/// −[δ log E + (E+δ) log1p(δ/E)] with δ = λ − E taken from double-double.
pub fn entropy_shift(rho0: &DensityMatrix, h: &ComplexMatrix, eps: f64) -> Result<f64> {
    let base = eigenvalues_dd(rho0.matrix(), h, 0.0)?;
    let pert = eigenvalues_dd(rho0.matrix(), h, eps)?;
    let min = pert[0].hi();
    if min < -NEGATIVE_TOL {
        return Err(Error::StencilLeavesPsdCone { observed: min, step: eps });
    }
    let mut sum = 0.0;
    for (e, l) in base.iter().zip(&pert) {
        let (ef, lf) = (e.hi(), l.hi());
        let delta = (*l - *e).hi();
        let term = if ef <= ZERO_FLOOR || lf <= ZERO_FLOOR {
            let f = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
            f(lf) - f(ef)
        } else {
            delta * ef.ln() + lf * (delta / ef).ln_1p()
        };
        sum -= term;
    }
    Ok(sum)
}
