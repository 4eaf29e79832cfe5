use std::fmt;

use crate::symcore::Scalar;

use super::{DNumber, GrassmannElement, GrassmannError, Parity};

/// A (p|q) supermatrix over Λ_N, p, q ∈ {1, 2}, stored row-major.
///
/// Rows and columns `0..p` are even, `p..p+q` odd. An even matrix has even
/// diagonal blocks and odd off-diagonal blocks; an odd matrix the reverse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuperMatrix {
    p: usize,
    q: usize,
    n: u8,
    parity: Parity,
    entries: Vec<GrassmannElement>,
}

impl SuperMatrix {
    pub fn new(
        p: usize,
        q: usize,
        parity: Parity,
        entries: Vec<GrassmannElement>,
    ) -> Result<Self, GrassmannError> {
        let k = p + q;
        if !(1..=2).contains(&p) || !(1..=2).contains(&q) || entries.len() != k * k {
            return Err(GrassmannError::BadForm(format!(
                "({p}|{q}) with {} entries",
                entries.len()
            )));
        }
        let n = entries[0].n();
        for (idx, e) in entries.iter().enumerate() {
            if e.n() != n {
                return Err(GrassmannError::Mismatch(n, e.n()));
            }
            let (r, c) = (idx / k, idx % k);
            let want = Parity::of_len(((r >= p) as u32) + ((c >= p) as u32)).add(parity);
            e.check_parity(want)?;
        }
        Ok(SuperMatrix {
            p,
            q,
            n,
            parity,
            entries,
        })
    }

    pub fn identity(p: usize, q: usize, n: u8) -> Self {
        let k = p + q;
        let entries = (0..k * k)
            .map(|i| {
                if i / k == i % k {
                    GrassmannElement::one(n)
                } else {
                    GrassmannElement::zero(n)
                }
            })
            .collect();
        SuperMatrix {
            p,
            q,
            n,
            parity: Parity::Even,
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn get(&self, r: usize, c: usize) -> &GrassmannElement {
        &self.entries[r * self.dim() + c]
    }

    pub fn mul(&self, o: &SuperMatrix) -> Result<SuperMatrix, GrassmannError> {
        if (self.p, self.q) != (o.p, o.q) {
            return Err(GrassmannError::BadForm("block sizes differ".into()));
        }
        if self.n != o.n {
            return Err(GrassmannError::Mismatch(self.n, o.n));
        }
        let k = self.dim();
        let mut entries = Vec::with_capacity(k * k);
        for r in 0..k {
            for c in 0..k {
                let mut s = GrassmannElement::zero(self.n);
                for j in 0..k {
                    s = &s + &(self.get(r, j) * o.get(j, c));
                }
                entries.push(s);
            }
        }
        Ok(SuperMatrix {
            p: self.p,
            q: self.q,
            n: self.n,
            parity: self.parity.add(o.parity),
            entries,
        })
    }

    fn map(&self, f: impl Fn(&GrassmannElement) -> GrassmannElement) -> SuperMatrix {
        SuperMatrix {
            entries: self.entries.iter().map(f).collect(),
            ..self.clone()
        }
    }

    fn add(&self, o: &SuperMatrix) -> SuperMatrix {
        SuperMatrix {
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }

    /// Inverse as Σ_k (−B⁻¹·Nil)^k·B⁻¹ with B the body matrix.
    pub fn inverse(&self) -> Result<SuperMatrix, GrassmannError> {
        let k = self.dim();
        let body: Vec<Scalar> = self.entries.iter().map(GrassmannElement::body).collect();
        let binv = scalar_inverse(&body, k).ok_or(GrassmannError::NotInvertible)?;
        let binv_m = SuperMatrix {
            entries: binv
                .iter()
                .map(|c| GrassmannElement::scalar(self.n, c.clone()))
                .collect(),
            ..self.clone()
        };
        let nil = self.map(GrassmannElement::nilpotent);
        // X = −B⁻¹·Nil is even-parity as a matrix map and nilpotent.
        let x = binv_m.mul(&nil)?.map(|e| -e);
        let mut term = SuperMatrix::identity(self.p, self.q, self.n);
        let mut sum = term.clone();
        for _ in 0..=self.n {
            term = term.mul(&x)?;
            term.parity = Parity::Even;
            sum = sum.add(&term);
        }
        let mut inv = sum.mul(&binv_m)?;
        inv.parity = self.parity;
        Ok(inv)
    }

    /// Invertible iff the body matrix is.
    pub fn is_invertible(&self) -> bool {
        let body: Vec<Scalar> = self.entries.iter().map(GrassmannElement::body).collect();
        scalar_inverse(&body, self.dim()).is_some()
    }

    pub fn is_identity(&self) -> bool {
        *self == SuperMatrix::identity(self.p, self.q, self.n)
    }

    pub fn same_entries(&self, o: &SuperMatrix) -> bool {
        self.entries == o.entries
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.dim();
        write!(f, "[")?;
        for r in 0..k {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..k).map(|c| self.get(r, c).to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Exact Gauss–Jordan inverse of a k×k scalar matrix.
fn scalar_inverse(m: &[Scalar], k: usize) -> Option<Vec<Scalar>> {
    let mut a: Vec<Vec<Scalar>> = (0..k)
        .map(|r| {
            let mut row = m[r * k..(r + 1) * k].to_vec();
            row.extend((0..k).map(|c| {
                if c == r {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Some(a.into_iter().flat_map(|row| row[k..].to_vec()).collect())
}

/// The odd (1|1) swap [[0, 1], [1, 0]].
pub fn swap_matrix(n: u8) -> SuperMatrix {
    let (z, o) = (GrassmannElement::zero(n), GrassmannElement::one(n));
    SuperMatrix::new(1, 1, Parity::Odd, vec![z.clone(), o.clone(), o, z]).expect("valid form")
}

/// Φ on C^{2|2} in the basis (e₀, e₁, E₀, E₁): exchanges eₖ and Eₖ.
pub fn phi_matrix(n: u8) -> SuperMatrix {
    let entries = (0..16)
        .map(|i| {
            let (r, c) = (i / 4, i % 4);
            if (r + 2) % 4 == c {
                GrassmannElement::one(n)
            } else {
                GrassmannElement::zero(n)
            }
        })
        .collect();
    SuperMatrix::new(2, 2, Parity::Odd, entries).expect("valid form")
}

/// Ψ = [[α, a], [a⁻¹, −α]], the general odd involution of a free 1|1 module.
pub fn psi_matrix(
    a: &GrassmannElement,
    alpha: &GrassmannElement,
) -> Result<SuperMatrix, GrassmannError> {
    SuperMatrix::new(
        1,
        1,
        Parity::Odd,
        vec![alpha.clone(), a.clone(), a.ginv()?, -alpha],
    )
}

/// Change of basis P = [[a⁻¹, 0], [a⁻¹α, 1]] with PΨP⁻¹ = [[0, 1], [1, 0]].
///
/// The lower-left entry carries `+a⁻¹α`: with the standard product of
/// supermatrices, `−a⁻¹α` conjugates Ψ to [[2α, 1], [1, −2α]] instead
/// (see [`literal_p`]).
pub fn normalize_psi(psi: &SuperMatrix) -> Result<SuperMatrix, GrassmannError> {
    if (psi.p, psi.q, psi.parity) != (1, 1, Parity::Odd) {
        return Err(GrassmannError::BadForm(
            "Ψ must be an odd (1|1) matrix".into(),
        ));
    }
    let (alpha, a) = (psi.get(0, 0), psi.get(0, 1));
    let ainv = a.ginv()?;
    if psi.get(1, 0) != &ainv || psi.get(1, 1) != &-alpha {
        return Err(GrassmannError::BadForm(
            "Ψ is not [[α, a], [a⁻¹, −α]]".into(),
        ));
    }
    if !psi.mul(psi)?.is_identity() {
        return Err(GrassmannError::BadForm("Ψ² ≠ 1".into()));
    }
    let n = psi.n;
    SuperMatrix::new(
        1,
        1,
        Parity::Even,
        vec![
            ainv.clone(),
            GrassmannElement::zero(n),
            &ainv * alpha,
            GrassmannElement::one(n),
        ],
    )
}

/// The literal matrix [[a⁻¹, 0], [−a⁻¹α, 1]], kept for comparison with [`normalize_psi`].
pub fn literal_p(
    a: &GrassmannElement,
    alpha: &GrassmannElement,
) -> Result<SuperMatrix, GrassmannError> {
    let ainv = a.ginv()?;
    let n = a.n();
    SuperMatrix::new(
        1,
        1,
        Parity::Even,
        vec![
            ainv.clone(),
            GrassmannElement::zero(n),
            -&(&ainv * alpha),
            GrassmannElement::one(n),
        ],
    )
}

/// Embedding D^× → GL(1|1): (a, α) ↦ [[a, α], [α, a]].
pub fn d_to_gl11(x: &DNumber) -> Result<SuperMatrix, GrassmannError> {
    if !x.is_invertible() {
        return Err(GrassmannError::NotInvertible);
    }
    SuperMatrix::new(
        1,
        1,
        Parity::Even,
        vec![x.a.clone(), x.alpha.clone(), x.alpha.clone(), x.a.clone()],
    )
}

/// A vector of C^{2|2} ⊗ Λ_N in the basis (e₀, e₁, E₀, E₁).
pub type GVec4 = [GrassmannElement; 4];

/// Parity of a vector: even when the e-slots are even and the E-slots odd.
pub fn vec_parity(v: &GVec4) -> Option<Parity> {
    let even = v[0].is_even() && v[1].is_even() && v[2].is_odd() && v[3].is_odd();
    let odd = v[0].is_odd() && v[1].is_odd() && v[2].is_even() && v[3].is_even();
    match (even, odd) {
        (true, _) => Some(Parity::Even),
        (false, true) => Some(Parity::Odd),
        _ => None,
    }
}

/// Φ(s₀, s₁, σ₀, σ₁) = (σ₀, σ₁, s₀, s₁).
pub fn phi_apply(v: &GVec4) -> GVec4 {
    [v[2].clone(), v[3].clone(), v[0].clone(), v[1].clone()]
}

/// v·θ = (−1)^{|v|}·Φ(v) for homogeneous v.
pub fn right_theta_action(v: &GVec4) -> Result<GVec4, GrassmannError> {
    let w = phi_apply(v);
    match vec_parity(v).ok_or(GrassmannError::NotHomogeneous)? {
        Parity::Even => Ok(w),
        Parity::Odd => Ok(w.map(|x| -&x)),
    }
}
