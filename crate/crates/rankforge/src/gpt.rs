//! The GPT public-key encryption scheme and its column-scrambler variants:
//!
//! * `Classic` — distortion only: G_pub = S(G + X)
//! * `Go`      — Gabidulin–Ourivski: G_pub = S(X₁ | G + X₂)P, P over F_q
//! * `Gab08`   — general reparation: G_pub = S(X | G)P, P over F_{q^m} with a
//!               structured inverse (base-field lower-right block, low-rank
//!               upper-right block)
//! * `Grh`     — Gabidulin–Rashwan–Honary: G_pub = S G P, P over F_{q^m},
//!               P⁻¹ = (Q₁ | Q₂) with Q₂ over F_q
//! * `Tp`      — isometry T over F_q composed with a Gab08-style P

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gabidulin::{moore_matrix, GabidulinCode};
use crate::linalg::{
    sample_full_rank_vector, sample_gl_base, sample_gl_ext, sample_rank_bounded_matrix,
    sample_rank_vector, BaseMatrix, ExtMatrix, ExtVector,
};

const MAX_KEYGEN_TRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Classic,
    Go,
    Gab08,
    Grh,
    Tp,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Classic => "classic",
            Variant::Go => "go",
            Variant::Gab08 => "gab08",
            Variant::Grh => "grh",
            Variant::Tp => "tp",
        }
    }

    pub fn from_name(s: &str) -> Option<Variant> {
        Some(match s {
            "classic" => Variant::Classic,
            "go" => Variant::Go,
            "gab08" => Variant::Gab08,
            "grh" => Variant::Grh,
            "tp" => Variant::Tp,
            _ => return None,
        })
    }
}

/// Scheme parameters. The distortion rank (t_X, t₂, s or a, depending on the
/// variant) is derived from the public error budget t_pub.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    pub variant: Variant,
    pub q: u32,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub t_pub: usize,
}

impl SchemeParams {
    /// Error capability t = ⌊(n − k)/2⌋ of the secret code.
    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    /// Rank of the hidden structure: t_X (Classic), t₂ (GO), s (GAB08/TP), a (GRH).
    pub fn distortion_rank(&self) -> usize {
        match self.variant {
            Variant::Tp => self.t() - self.ell - self.t_pub,
            _ => self.t() - self.t_pub,
        }
    }

    /// Length of public codewords: n + ℓ (n for GRH).
    pub fn public_len(&self) -> usize {
        self.n + self.ell
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.t();
        let fail = |msg: String| Err(Error::Param(msg));
        if !(self.k < self.n && self.n <= self.m) {
            return fail(format!(
                "need k < n <= m, got k = {}, n = {}, m = {}",
                self.k, self.n, self.m
            ));
        }
        if self.ell >= self.n {
            return fail(format!("need l << n, got l = {}, n = {}", self.ell, self.n));
        }
        if self.t_pub == 0 {
            return fail("need t_pub > 0".into());
        }
        // GO and GAB08 tolerate t_pub = t (zero distortion rank); the other
        // variants need slack.
        if self.t_pub >= t && !matches!(self.variant, Variant::Go | Variant::Gab08) {
            return fail(format!("need t_pub < t = {t}, got t_pub = {}", self.t_pub));
        }
        match self.variant {
            Variant::Classic => {
                if self.ell != 0 {
                    return fail("classic variant has no padding (l must be 0)".into());
                }
                let tx = t - self.t_pub;
                if tx == 0 || tx >= t {
                    return fail(format!("need 0 < t_X < t, got t_X = {tx}"));
                }
            }
            Variant::Go => {
                // t2 = t - t_pub in [0, t)
                if self.t_pub > t {
                    return fail(format!("need t_pub <= t = {t}"));
                }
            }
            Variant::Gab08 => {
                let s = t - self.t_pub;
                if s > self.ell {
                    return fail(format!("need s <= l (got s = {s}, l = {})", self.ell));
                }
            }
            Variant::Grh => {
                if self.ell != 0 {
                    return fail("grh variant has no padding (l must be 0)".into());
                }
                let a = t - self.t_pub;
                if a == 0 {
                    return fail("need a = t - t_pub > 0".into());
                }
            }
            Variant::Tp => {
                if self.t_pub + self.ell >= t {
                    return fail(format!(
                        "need t_pub = t - l - s with s > 0 infeasible: t = {t}, l = {}, t_pub = {}",
                        self.ell, self.t_pub
                    ));
                }
                let s = t - self.ell - self.t_pub;
                if s > self.ell {
                    return fail(format!("need s <= l (got s = {s}, l = {})", self.ell));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PublicKey {
    pub params: SchemeParams,
    pub g_pub: ExtMatrix,
}

/// Variant-specific private material. Fields are public so the structural
/// propositions about the hiding transformation can be tested white-box;
/// the attack path never touches them.
#[derive(Clone, Debug)]
pub enum PrivateParts {
    Classic {
        x: ExtMatrix,
    },
    Go {
        x1: ExtMatrix,
        x2: ExtMatrix,
        p: BaseMatrix,
        p_inv: BaseMatrix,
    },
    Gab08 {
        x: ExtMatrix,
        p: ExtMatrix,
        p_inv: ExtMatrix,
    },
    Grh {
        p: ExtMatrix,
        p_inv: ExtMatrix,
    },
    Tp {
        x: ExtMatrix,
        t: BaseMatrix,
        t_inv: BaseMatrix,
        p: ExtMatrix,
        p_inv: ExtMatrix,
    },
}

#[derive(Clone, Debug)]
pub struct PrivateKey {
    pub params: SchemeParams,
    pub s: ExtMatrix,
    /// Cached S⁻¹; absent for the TP variant, whose decryption solves the
    /// combined system m·(S·G) = codeword instead.
    pub s_inv: Option<ExtMatrix>,
    pub code: GabidulinCode,
    pub parts: PrivateParts,
}

/// Sample a Gab08-style scrambler: returns (P, P⁻¹) where P⁻¹ has blocks
/// Q₁₁ (ℓ×ℓ ext), Q₁₂ (ℓ×n ext, rank weight exactly s), Q₂₁ (n×ℓ ext),
/// Q₂₂ (n×n over F_q).
fn sample_gab08_scrambler<R: Rng + ?Sized>(
    field: &Field,
    n: usize,
    ell: usize,
    s: usize,
    rng: &mut R,
) -> Result<(ExtMatrix, ExtMatrix)> {
    for _ in 0..MAX_KEYGEN_TRIES {
        let q11 = ExtMatrix::random(field, ell, ell, rng);
        let q12 = sample_rank_bounded_matrix(field, ell, n, s, rng)?;
        let q21 = ExtMatrix::random(field, n, ell, rng);
        let q22 = BaseMatrix::random(field.q(), n, n, rng).lift(field);
        let top = q11.hstack(&q12);
        let bottom = q21.hstack(&q22);
        let p_inv = top.vstack(&bottom);
        if let Ok(p) = p_inv.inverse() {
            return Ok((p, p_inv));
        }
    }
    Err(Error::Sampling(MAX_KEYGEN_TRIES))
}

pub fn keygen<R: Rng + ?Sized>(
    params: &SchemeParams,
    field: &Field,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey)> {
    params.validate()?;
    if field.q() != params.q || field.m() != params.m {
        return Err(Error::Param("field does not match scheme parameters".into()));
    }
    let (n, k, ell, t) = (params.n, params.k, params.ell, params.t());
    let g = sample_full_rank_vector(field, n, rng)?;
    let code = GabidulinCode::new(g, k)?;
    let gen = code.generator_matrix();
    let s_mat = sample_gl_ext(field, k, rng)?;
    let s_inv = s_mat.inverse()?;

    let (g_pub, s_inv, parts) = match params.variant {
        Variant::Classic => {
            let tx = t - params.t_pub;
            let x = sample_rank_bounded_matrix(field, k, n, tx, rng)?;
            let g_pub = s_mat.mul(&gen.add(&x));
            (g_pub, Some(s_inv), PrivateParts::Classic { x })
        }
        Variant::Go => {
            let t2 = t - params.t_pub;
            let x1 = ExtMatrix::random(field, k, ell, rng);
            let x2 = sample_rank_bounded_matrix(field, k, n, t2, rng)?;
            let p = sample_gl_base(params.q, n + ell, rng)?;
            let p_inv = p.inverse()?;
            let g_pub = s_mat.mul(&x1.hstack(&gen.add(&x2))).mul_base(&p);
            (g_pub, Some(s_inv), PrivateParts::Go { x1, x2, p, p_inv })
        }
        Variant::Gab08 => {
            let s = t - params.t_pub;
            let x = ExtMatrix::random(field, k, ell, rng);
            let (p, p_inv) = sample_gab08_scrambler(field, n, ell, s, rng)?;
            let g_pub = s_mat.mul(&x.hstack(&gen)).mul(&p);
            (g_pub, Some(s_inv), PrivateParts::Gab08 { x, p, p_inv })
        }
        Variant::Grh => {
            let a = t - params.t_pub;
            let (p, p_inv) = loop {
                let q1 = ExtMatrix::random(field, n, a, rng);
                let q2 = BaseMatrix::random(params.q, n, n - a, rng).lift(field);
                let p_inv = q1.hstack(&q2);
                if let Ok(p) = p_inv.inverse() {
                    break (p, p_inv);
                }
            };
            let g_pub = s_mat.mul(&gen).mul(&p);
            (g_pub, Some(s_inv), PrivateParts::Grh { p, p_inv })
        }
        Variant::Tp => {
            let s = t - ell - params.t_pub;
            let x = ExtMatrix::random(field, k, ell, rng);
            let t_mat = sample_gl_base(params.q, n + ell, rng)?;
            let t_inv = t_mat.inverse()?;
            let (p, p_inv) = sample_gab08_scrambler(field, n, ell, s, rng)?;
            let g_pub = s_mat.mul(&x.hstack(&gen)).mul_base(&t_mat).mul(&p);
            (
                g_pub,
                None,
                PrivateParts::Tp {
                    x,
                    t: t_mat,
                    t_inv,
                    p,
                    p_inv,
                },
            )
        }
    };

    Ok((
        PublicKey {
            params: *params,
            g_pub,
        },
        PrivateKey {
            params: *params,
            s: s_mat,
            s_inv,
            code,
            parts,
        },
    ))
}

/// c = msg·G_pub + e with rank_weight(e) = t_pub exactly (worst case for the
/// attacker, matching the security claim under test).
pub fn encrypt<R: Rng + ?Sized>(
    pk: &PublicKey,
    msg: &ExtVector,
    rng: &mut R,
) -> Result<ExtVector> {
    if msg.len() != pk.params.k {
        return Err(Error::Param(format!(
            "message length {} != k = {}",
            msg.len(),
            pk.params.k
        )));
    }
    let e = sample_rank_vector(msg.field(), pk.params.public_len(), pk.params.t_pub, rng)?;
    Ok(msg.mul_ext(&pk.g_pub).add(&e))
}

pub fn decrypt(sk: &PrivateKey, c: &ExtVector) -> Result<ExtVector> {
    let n = sk.params.n;
    if c.len() != sk.params.public_len() {
        return Err(Error::Param(format!(
            "ciphertext length {} != {}",
            c.len(),
            sk.params.public_len()
        )));
    }
    let map_decode = |e: Error| Error::Decryption(e.to_string());
    let y = match &sk.parts {
        PrivateParts::Classic { .. } => c.clone(),
        PrivateParts::Go { p_inv, .. } => {
            let u = c.mul_base(p_inv);
            u.slice(u.len() - n..u.len())
        }
        PrivateParts::Gab08 { p_inv, .. } => {
            let u = c.mul_ext(p_inv);
            u.slice(u.len() - n..u.len())
        }
        PrivateParts::Grh { p_inv, .. } => c.mul_ext(p_inv),
        PrivateParts::Tp { p_inv, t_inv, .. } => {
            let u = c.mul_ext(p_inv).mul_base(t_inv);
            u.slice(u.len() - n..u.len())
        }
    };
    let (msg_s, _err) = sk.code.decode(&y).map_err(map_decode)?;
    match &sk.s_inv {
        Some(s_inv) => Ok(msg_s.mul_ext(s_inv)),
        None => {
            // m·(S·G) = codeword
            let sg = sk.s.mul(&sk.code.generator_matrix());
            let codeword = msg_s.mul_ext(&sk.code.generator_matrix());
            sg.solve_left(&codeword).map_err(map_decode)
        }
    }
}

/// White-box view of a GO key: G_pub = S(X₁ | G + X₂)P.
#[derive(Clone, Debug)]
pub struct GoDecomposition {
    pub s: ExtMatrix,
    pub x1: ExtMatrix,
    pub code: GabidulinCode,
    pub x2: ExtMatrix,
    pub p: BaseMatrix,
}

impl GoDecomposition {
    pub fn from_private(sk: &PrivateKey) -> Result<GoDecomposition> {
        match &sk.parts {
            PrivateParts::Go { x1, x2, p, .. } => Ok(GoDecomposition {
                s: sk.s.clone(),
                x1: x1.clone(),
                code: sk.code.clone(),
                x2: x2.clone(),
                p: p.clone(),
            }),
            _ => Err(Error::Param("not a GO private key".into())),
        }
    }

    pub fn assemble(&self) -> ExtMatrix {
        self.s
            .mul(&self.x1.hstack(&self.code.generator_matrix().add(&self.x2)))
            .mul_base(&self.p)
    }
}

/// GO decomposition with the rank-t₂ distortion X₂ eliminated:
/// G_pub = S(X* | G*)P* where G* generates an (n − t₂, k)-Gabidulin code.
#[derive(Clone, Debug)]
pub struct NormalizedDecomposition {
    pub s: ExtMatrix,
    pub x_star: ExtMatrix,
    pub code_star: GabidulinCode,
    pub p_star: BaseMatrix,
    pub t_star: usize,
}

impl NormalizedDecomposition {
    pub fn assemble(&self) -> ExtMatrix {
        self.s
            .mul(&self.x_star.hstack(&self.code_star.generator_matrix()))
            .mul_base(&self.p_star)
    }
}

/// Absorb X₂ into the padding: rank-reduce X₂, shorten the Gabidulin code by
/// t₂ positions and widen the distortion block to ℓ + t₂.
pub fn x2_normalize(d: &GoDecomposition) -> Result<NormalizedDecomposition> {
    let n = d.code.n();
    let k = d.code.k();
    let ell = d.x1.cols();
    let (x2_star, t2_mat) = crate::linalg::rank_reduce(&d.x2);
    let t2 = x2_star.cols();
    // T = diag(I_ell, T2); (X1 | G + X2)·T = (X1 | G·T2 + (X2* | 0))
    let g_prime = d.code.g().mul_base(&t2_mat);
    let gen_prime = moore_matrix(&g_prime, k)?;
    let g1 = gen_prime.columns(0..t2);
    let g2 = gen_prime.columns(t2..n);
    let x_star = d.x1.hstack(&g1.add(&x2_star));
    let g_star = g_prime.slice(t2..n);
    let code_star = GabidulinCode::new(g_star, k)?;
    debug_assert!(code_star.generator_matrix() == g2);
    let t_full = BaseMatrix::identity(d.p.q(), ell).block_diag(&t2_mat);
    let p_star = t_full.inverse()?.mul(&d.p);
    Ok(NormalizedDecomposition {
        s: d.s.clone(),
        x_star,
        code_star,
        p_star,
        t_star: (n - t2 - k) / 2,
    })
}
