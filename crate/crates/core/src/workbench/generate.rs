use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::complexes::CochainComplex;
use crate::dense::{self, Mat};
use crate::error::{Error, Result};
use crate::gradedlinalg::{GradedDims, Scalar};
use crate::torsion::ChiralityOp;

/// Seeded generator used for every random instance (ChaCha20, 64-bit seed).
pub type Rng = ChaCha20Rng;

/// Summand of a generated complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block {
    /// `z : C^j → C^{j+1}` together with its Γ-mirror `z : C^{d-j-1} → C^{d-j}`
    /// (one self-mirrored block when `j = r − 1`).
    Elementary { j: usize, z: Scalar },
    /// `ℂ` in degrees k and d−k with zero differential, swapped by Γ.
    Harmonic { k: usize },
}

impl Block {
    fn degrees(&self, d: usize) -> Vec<usize> {
        match *self {
            Block::Elementary { j, .. } if j == d - j - 1 => vec![j, j + 1],
            Block::Elementary { j, .. } => vec![j, j + 1, d - j - 1, d - j],
            Block::Harmonic { k } => vec![k, d - k],
        }
    }
}

/// Direct sum of blocks in standard position.
pub fn assemble(d: usize, blocks: &[Block]) -> Result<(CochainComplex, ChiralityOp)> {
    if d.is_multiple_of(2) {
        return Err(Error::EvenLength(d));
    }
    let r = d.div_ceil(2);
    let mut dims = vec![0usize; d + 1];
    // index of each block's vector in each touched degree
    let mut at: Vec<Vec<usize>> = Vec::new();
    for b in blocks {
        match *b {
            Block::Elementary { j, z } => {
                if j >= r {
                    return Err(Error::InvalidParameter(format!(
                        "placement j = {j} must satisfy j < r = {r}"
                    )));
                }
                if z.norm() == 0.0 || !z.is_finite() {
                    return Err(Error::InvalidParameter("elementary block needs z != 0".into()));
                }
            }
            Block::Harmonic { k } => {
                if k >= r {
                    return Err(Error::InvalidParameter(format!(
                        "harmonic degree k = {k} must satisfy k < r = {r}"
                    )));
                }
            }
        }
        let mut idx = vec![usize::MAX; d + 1];
        for q in b.degrees(d) {
            idx[q] = dims[q];
            dims[q] += 1;
        }
        at.push(idx);
    }
    let gd = GradedDims::new(d, dims.clone())?;
    let mut partial: Vec<Mat> = (0..d).map(|j| dense::zeros(dims[j + 1], dims[j])).collect();
    let mut gamma: Vec<Mat> = (0..=d).map(|j| dense::zeros(dims[d - j], dims[j])).collect();
    let one = dense::ONE;
    let pair = |gamma: &mut Vec<Mat>, p: usize, ip: usize, q: usize, iq: usize| {
        gamma[p][(iq, ip)] = one;
        gamma[q][(ip, iq)] = one;
    };
    for (b, idx) in blocks.iter().zip(&at) {
        match *b {
            Block::Elementary { j, z } => {
                partial[j][(idx[j + 1], idx[j])] = z;
                if j == d - j - 1 {
                    pair(&mut gamma, j, idx[j], j + 1, idx[j + 1]);
                } else {
                    let (m, m1) = (d - j - 1, d - j);
                    partial[m][(idx[m1], idx[m])] = z;
                    pair(&mut gamma, j, idx[j], m1, idx[m1]);
                    pair(&mut gamma, j + 1, idx[j + 1], m, idx[m]);
                }
            }
            Block::Harmonic { k } => pair(&mut gamma, k, idx[k], d - k, idx[d - k]),
        }
    }
    let c = CochainComplex::new(gd.clone(), partial)?;
    let g = ChiralityOp::new(&gd, gamma)?;
    Ok((c, g))
}

/// The elementary acyclic block at placement `j` with differential `z`.
pub fn gen_elementary(d: usize, j: usize, z: Scalar) -> Result<(CochainComplex, ChiralityOp)> {
    assemble(d, &[Block::Elementary { j, z }])
}

/// Shape of a random instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// cap on `dim C^j`
    pub max_dim: usize,
    pub min_blocks: usize,
    pub max_blocks: usize,
    /// number of harmonic summands
    pub harmonic: usize,
    /// bound on the condition number of the degreewise conjugations
    pub cond_max: f64,
    /// conjugate by unitaries only (keeps Γ self-adjoint)
    pub unitary: bool,
    /// range of `|z|` for elementary blocks
    pub modulus: (f64, f64),
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            max_dim: 8,
            min_blocks: 1,
            max_blocks: 4,
            harmonic: 0,
            cond_max: 10.0,
            unitary: false,
            modulus: (0.5, 3.0),
        }
    }
}

/// A generated complex with chirality and the blocks it was built from.
#[derive(Debug, Clone)]
pub struct Instance {
    pub complex: CochainComplex,
    pub chirality: ChiralityOp,
    pub blocks: Vec<Block>,
}

impl Instance {
    /// Betti numbers implied by the harmonic summands.
    pub fn expected_betti(&self) -> Vec<usize> {
        let d = self.complex.d();
        let mut b = vec![0; d + 1];
        for blk in &self.blocks {
            if let Block::Harmonic { k } = *blk {
                b[k] += 1;
                b[d - k] += 1;
            }
        }
        b
    }

    /// Distinct values of `|z|²`, the moduli of the eigenvalues of `B²` on
    /// the acyclic blocks, in increasing order.
    pub fn b2_moduli(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .blocks
            .iter()
            .filter_map(|b| match *b {
                Block::Elementary { z, .. } => Some(z.norm_sqr()),
                Block::Harmonic { .. } => None,
            })
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
        v
    }
}

fn unit_scalar(rng: &mut Rng) -> Scalar {
    Scalar::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
}

/// Matrix with independent entries uniform in the unit square.
pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| unit_scalar(rng))
}

fn random_unitary(rng: &mut Rng, n: usize) -> Mat {
    if n == 0 {
        return dense::zeros(0, 0);
    }
    loop {
        let m = random_matrix(rng, n, n);
        if dense::rank(&m) == n {
            return m.qr().q();
        }
    }
}

/// `U diag(σ) V^H` with σ in `[1, cond]`, together with its inverse.
fn random_conditioned(rng: &mut Rng, n: usize, cond: f64, unitary: bool) -> (Mat, Mat) {
    let u = random_unitary(rng, n);
    if unitary {
        return (u.clone(), u.adjoint());
    }
    let v = random_unitary(rng, n);
    let sig: Vec<f64> = (0..n).map(|_| 1.0 + (cond - 1.0) * rng.random::<f64>()).collect();
    let s = Mat::from_fn(n, n, |i, j| if i == j { Scalar::new(sig[i], 0.0) } else { dense::ZERO });
    let si = Mat::from_fn(n, n, |i, j| {
        if i == j {
            Scalar::new(1.0 / sig[i], 0.0)
        } else {
            dense::ZERO
        }
    });
    (&u * s * v.adjoint(), &v * si * u.adjoint())
}

/// Random direct sum of blocks, conjugated degreewise:
/// `∂_j ↦ P_{j+1}∂_j P_j^{-1}`, `Γ_j ↦ P_{d-j}Γ_j P_j^{-1}`.
pub fn gen_random(seed: u64, d: usize, profile: &Profile) -> Result<Instance> {
    if d.is_multiple_of(2) {
        return Err(Error::EvenLength(d));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let r = d.div_ceil(2);
    let mut dims = vec![0usize; d + 1];
    let mut blocks = Vec::new();
    let fits = |dims: &Vec<usize>, b: &Block| b.degrees(d).iter().all(|&q| dims[q] < profile.max_dim);
    for _ in 0..profile.harmonic {
        let b = Block::Harmonic {
            k: rng.random_range(0..r),
        };
        if !fits(&dims, &b) {
            return Err(Error::InvalidParameter("harmonic summands exceed max_dim".into()));
        }
        for q in b.degrees(d) {
            dims[q] += 1;
        }
        blocks.push(b);
    }
    let target = rng.random_range(profile.min_blocks..=profile.max_blocks.max(profile.min_blocks));
    let mut tries = 0;
    while blocks.len() < profile.harmonic + target && tries < 100 {
        tries += 1;
        let (lo, hi) = profile.modulus;
        let modulus = lo + (hi - lo) * rng.random::<f64>();
        let z = Scalar::from_polar(modulus, 2.0 * std::f64::consts::PI * rng.random::<f64>());
        let b = Block::Elementary {
            j: rng.random_range(0..r),
            z,
        };
        if fits(&dims, &b) {
            for q in b.degrees(d) {
                dims[q] += 1;
            }
            blocks.push(b);
        }
    }
    let (c0, g0) = assemble(d, &blocks)?;
    let ps: Vec<(Mat, Mat)> = (0..=d)
        .map(|j| random_conditioned(&mut rng, dims[j], profile.cond_max, profile.unitary))
        .collect();
    let partial = (0..d).map(|j| &ps[j + 1].0 * c0.partial(j) * &ps[j].1).collect();
    let gamma = (0..=d).map(|j| &ps[d - j].0 * g0.block(j) * &ps[j].1).collect();
    let complex = CochainComplex::new(c0.dims().clone(), partial)?;
    let chirality = ChiralityOp::new(c0.dims(), gamma)?;
    Ok(Instance {
        complex,
        chirality,
        blocks,
    })
}

/// Smooth family `Γ_j(t) = S_{d-j}(t) Γ_j S_j(t)^{-1}` with
/// `S_j(t) = 1 + t X_j`, X_j random of norm about 0.3.
pub fn chirality_family(seed: u64, g: &ChiralityOp) -> impl Fn(f64) -> Result<ChiralityOp> {
    let mut rng = Rng::seed_from_u64(seed);
    let d = g.d();
    let xs: Vec<Mat> = (0..=d)
        .map(|j| {
            let n = g.block(j).ncols();
            random_matrix(&mut rng, n, n) * Scalar::new(0.3 / (n.max(1) as f64), 0.0)
        })
        .collect();
    let g = g.clone();
    move |t: f64| {
        let s: Vec<Mat> = xs
            .iter()
            .map(|x| dense::eye(x.nrows()) + x * Scalar::new(t, 0.0))
            .collect();
        let mut blocks = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let inv = s[j]
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Singular("family conjugation".into()))?;
            blocks.push(&s[d - j] * g.block(j) * inv);
        }
        let dims: Vec<usize> = (0..=d).map(|j| g.block(j).ncols()).collect();
        ChiralityOp::new(&GradedDims::new(d, dims)?, blocks)
    }
}
