//! Structural key-recovery attack against the GPT variants.
//!
//! The engine has two layers: a polynomial-time distinguisher based on the
//! growth of dim Λ_i, and the column-scrambler recovery that turns a public
//! generator matrix into an alternative decomposition S*(X* | G*)P* with P*
//! over F_q, yielding a degraded Gabidulin decoder that still covers the
//! public error budget t_pub.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gabidulin::{lambda_op, moore_matrix, recover_generator, GabidulinCode};
use crate::gpt::{PublicKey, Variant};
use crate::linalg::{
    complete_to_invertible, fq_kernel, rank_weight, sample_full_rank_vector, BaseMatrix,
    ExtMatrix, ExtVector,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    GabidulinLike,
    RandomLike,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::GabidulinLike => "GABIDULIN_LIKE",
            Verdict::RandomLike => "RANDOM_LIKE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistinguisherReport {
    /// dims[i] = dim Λ_i(M) for i = 0..=i_max.
    pub dims: Vec<usize>,
    pub verdict: Verdict,
    /// Set when the input already spans the full space at i = 0 (k = n);
    /// the verdict is then vacuous.
    pub degenerate: bool,
}

/// Decision rule: let i₀ be the smallest index whose increment
/// dims[i₀] − dims[i₀−1] is ≤ 1 (the end of the initial jump phase). The
/// input is GABIDULIN_LIKE iff every increment from i₀ to i_max is exactly 1.
/// A random code saturates (increment 0) while a Gabidulin code keeps growing
/// one dimension per Frobenius power up to i = n − k − 1.
pub fn distinguish(m: &ExtMatrix, i_max: usize) -> DistinguisherReport {
    let n = m.cols();
    let dims: Vec<usize> = (0..=i_max).map(|i| lambda_op(m, i).rank()).collect();
    if dims[0] == n {
        return DistinguisherReport {
            dims,
            verdict: Verdict::GabidulinLike,
            degenerate: true,
        };
    }
    let i0 = (1..dims.len()).find(|&i| dims[i] - dims[i - 1] <= 1);
    let verdict = match i0 {
        Some(i0) if (i0..dims.len()).all(|i| dims[i] - dims[i - 1] == 1) => {
            Verdict::GabidulinLike
        }
        _ => Verdict::RandomLike,
    };
    DistinguisherReport {
        dims,
        verdict,
        degenerate: false,
    }
}

#[derive(Clone, Debug)]
pub struct AttackResult {
    /// Alternative column scrambler T ∈ GL_N(F_q): G_pub·T⁻¹ = (X̃ | B).
    pub t_star_mat: BaseMatrix,
    pub t_inv: BaseMatrix,
    /// Width ℓ′ of the junk block X̃.
    pub pad_width: usize,
    /// Gabidulin code of length n′ = N − ℓ′ row-space-equal to B.
    pub degraded_code: GabidulinCode,
    /// Last n′ columns of G_pub·T⁻¹; message recovery solves m·B = codeword.
    pub b: ExtMatrix,
    /// Error capability ⌊(n′ − k)/2⌋ of the degraded code; ≥ t_pub by the
    /// capability formulas of the variants.
    pub t_star: usize,
    /// Stacking depth i = n′ − k − 1 that exposed the 1-dimensional dual.
    pub chosen_i: usize,
}

/// Core scrambler recovery from public data only. Assumes
/// G_pub = S(X | Ĝ)P̂ with P̂ ∈ GL_N(F_q) and Ĝ generating an
/// (n′, k)-Gabidulin code, N = n′ + ℓ′.
///
/// The dual of Λ_{n′−k−1}(G_pub) is spanned by a single vector v of rank
/// weight n′; its F_q-kernel is exactly the span of the first ℓ′ rows of P̂.
/// Completing that kernel to a basis and transposing gives T whose inverse
/// moves the Gabidulin block to the last n′ columns.
pub fn overbeck_core(g_pub: &ExtMatrix, n_prime: usize, ell_prime: usize) -> Result<AttackResult> {
    let k = g_pub.rows();
    let nn = g_pub.cols();
    if n_prime + ell_prime != nn {
        return Err(Error::Param(format!(
            "geometry mismatch: n' + l' = {} but the public matrix has {nn} columns",
            n_prime + ell_prime
        )));
    }
    if n_prime < k + 1 {
        return Err(Error::Param(format!("need n' > k, got n' = {n_prime}, k = {k}")));
    }
    let i = n_prime - k - 1;
    let d = lambda_op(g_pub, i);
    let rank = d.rank();
    if rank != nn - 1 {
        return Err(Error::Distinguisher(format!(
            "rank of Lambda_{i}(G_pub) is {rank}, expected {} (distortion rank below l')",
            nn - 1
        )));
    }
    let kern = d.right_kernel();
    debug_assert_eq!(kern.rows(), 1);
    let v = kern.row(0).normalized();
    let w = rank_weight(&v);
    if w != n_prime {
        return Err(Error::Distinguisher(format!(
            "dual vector has rank weight {w}, expected n' = {n_prime}"
        )));
    }
    // fq_kernel(v) = F_q-span of the first l' rows of the hidden scrambler.
    let kb = fq_kernel(&v);
    debug_assert_eq!(kb.cols(), ell_prime);
    let completed = complete_to_invertible(&kb, nn)
        .map_err(|e| Error::Structure(format!("kernel completion failed: {e}")))?;
    let t_star_mat = completed.transpose();
    let t_inv = t_star_mat
        .inverse()
        .map_err(|e| Error::Structure(format!("scrambler inversion failed: {e}")))?;
    let unscrambled = g_pub.mul_base(&t_inv);
    let b = unscrambled.columns(ell_prime..nn);
    let degraded_code = recover_generator(&b, n_prime, k)
        .map_err(|e| Error::Structure(format!("degraded code recovery failed: {e}")))?;
    Ok(AttackResult {
        t_star_mat,
        t_inv,
        pad_width: ell_prime,
        degraded_code,
        b,
        t_star: (n_prime - k) / 2,
        chosen_i: i,
    })
}

/// Effective Overbeck geometry (n′, ℓ′) of a variant, derived from public
/// parameters only. n′ is clamped to keep n′ − k ≥ 2 so that t* ≥ 1.
pub fn attack_geometry(pk: &PublicKey) -> (usize, usize) {
    let p = &pk.params;
    let nn = p.public_len();
    let mut n_prime = match p.variant {
        Variant::Classic | Variant::Go | Variant::Gab08 | Variant::Grh => {
            p.n - (p.t() - p.t_pub)
        }
        Variant::Tp => p.n - p.distortion_rank() - p.ell,
    };
    if n_prime < p.k + 2 {
        n_prime = p.k + 2;
    }
    (n_prime, nn - n_prime)
}

/// Full attack: derive the geometry from public data, run the core recovery,
/// and on a distinguisher failure fall back to smaller stacking depths,
/// re-deriving (n′, ℓ′) from each candidate.
pub fn attack(pk: &PublicKey) -> Result<AttackResult> {
    pk.params.validate()?;
    let (n_prime, ell_prime) = attack_geometry(pk);
    let first = overbeck_core(&pk.g_pub, n_prime, ell_prime);
    if !matches!(first, Err(Error::Distinguisher(_))) {
        return first;
    }
    let nn = pk.params.public_len();
    for cand in (pk.params.k + 2..n_prime).rev() {
        match overbeck_core(&pk.g_pub, cand, nn - cand) {
            Err(Error::Distinguisher(_)) => continue,
            other => return other,
        }
    }
    first
}

/// Decrypt a ciphertext with the recovered material: unscramble with T⁻¹,
/// decode the last n′ coordinates in the degraded code, then solve the
/// full-rank system m·B = codeword.
pub fn oracle_decrypt(res: &AttackResult, c: &ExtVector) -> Result<ExtVector> {
    let nn = res.t_star_mat.rows();
    if c.len() != nn {
        return Err(Error::Param(format!(
            "ciphertext length {} != {nn}",
            c.len()
        )));
    }
    let y = c.mul_base(&res.t_inv);
    let tail = y.slice(res.pad_width..nn);
    let (msg_b, _err) = res
        .degraded_code
        .decode(&tail)
        .map_err(|e| Error::Decryption(format!("oracle: {e}")))?;
    let codeword = msg_b.mul_ext(&res.degraded_code.generator_matrix());
    res.b
        .solve_left(&codeword)
        .map_err(|e| Error::Decryption(format!("oracle: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Gabidulin,
    Random,
    Padded,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gabidulin => "gabidulin",
            Family::Random => "random",
            Family::Padded => "padded",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusCell {
    pub family: Family,
    pub i: usize,
    /// Observed dim Λ_i values with their frequencies.
    pub counts: BTreeMap<usize, usize>,
    pub lower_bound: usize,
    pub upper_bound: usize,
    /// Samples attaining the upper bound.
    pub at_upper: usize,
    /// Samples outside [lower_bound, upper_bound]; must stay 0.
    pub violations: usize,
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub trials: usize,
    pub cells: Vec<CensusCell>,
}

/// Empirical distribution of dim Λ_i for Gabidulin, random and padded
/// (X | G) generator matrices, for i = 0..=n−k−1, with the dimension bounds
/// checked on every sample.
pub fn dimension_census<R: Rng + ?Sized>(
    field: &Field,
    n: usize,
    k: usize,
    ell: usize,
    trials: usize,
    rng: &mut R,
) -> Result<CensusReport> {
    if !(1 <= k && k < n && n <= field.m()) {
        return Err(Error::Param(format!(
            "census needs 1 <= k < n <= m, got k = {k}, n = {n}, m = {}",
            field.m()
        )));
    }
    let i_max = n - k - 1;
    let bounds = |family: Family, i: usize| -> (usize, usize) {
        match family {
            Family::Gabidulin => (k + i, k + i),
            Family::Random => (k, (n).min((i + 1) * k)),
            Family::Padded => (k + i, k + i + ell.min((i + 1) * k)),
        }
    };
    let mut cells: Vec<CensusCell> = [Family::Gabidulin, Family::Random, Family::Padded]
        .iter()
        .flat_map(|&family| {
            (0..=i_max).map(move |i| {
                let (lower_bound, upper_bound) = bounds(family, i);
                CensusCell {
                    family,
                    i,
                    counts: BTreeMap::new(),
                    lower_bound,
                    upper_bound,
                    at_upper: 0,
                    violations: 0,
                }
            })
        })
        .collect();
    for _ in 0..trials {
        let g = sample_full_rank_vector(field, n, rng)?;
        let gab = moore_matrix(&g, k)?;
        let random = ExtMatrix::random(field, k, n, rng);
        let padded = ExtMatrix::random(field, k, ell, rng).hstack(&gab);
        for (idx, (family, m)) in [
            (Family::Gabidulin, &gab),
            (Family::Random, &random),
            (Family::Padded, &padded),
        ]
        .into_iter()
        .enumerate()
        {
            let _ = family;
            for i in 0..=i_max {
                let dim = lambda_op(m, i).rank();
                let cell = &mut cells[idx * (i_max + 1) + i];
                *cell.counts.entry(dim).or_insert(0) += 1;
                if dim == cell.upper_bound {
                    cell.at_upper += 1;
                }
                if dim < cell.lower_bound || dim > cell.upper_bound {
                    cell.violations += 1;
                }
            }
        }
    }
    Ok(CensusReport {
        n,
        k,
        ell,
        trials,
        cells,
    })
}
