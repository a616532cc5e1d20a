//! Systematic Reed-Solomon code over GF(2^8) used as the `[K2, L]` MDS code
//! of the baseline scheme.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

const POLY: u16 = 0x11d;

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut exp = [0u8; 512];
        let mut log = [0u8; 256];
        let mut x: u16 = 1;
        for i in 0..255 {
            exp[i] = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & 0x100 != 0 {
                x ^= POLY;
            }
        }
        for i in 255..512 {
            exp[i] = exp[i - 255];
        }
        Tables { exp, log }
    })
}

pub fn gf_mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    let t = tables();
    t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
}

pub fn gf_inv(a: u8) -> u8 {
    assert!(a != 0, "zero has no inverse");
    let t = tables();
    t.exp[255 - t.log[a as usize] as usize]
}

fn gf_pow(a: u8, e: usize) -> u8 {
    (0..e).fold(1, |acc, _| gf_mul(acc, a))
}

/// Inverse of a square matrix by Gauss-Jordan elimination.
fn invert(mut m: Vec<Vec<u8>>) -> Option<Vec<Vec<u8>>> {
    let n = m.len();
    let mut inv: Vec<Vec<u8>> = (0..n)
        .map(|i| (0..n).map(|j| u8::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = gf_inv(m[col][col]);
        for x in 0..n {
            m[col][x] = gf_mul(m[col][x], scale);
            inv[col][x] = gf_mul(inv[col][x], scale);
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let f = m[r][col];
                for x in 0..n {
                    m[r][x] ^= gf_mul(f, m[col][x]);
                    inv[r][x] ^= gf_mul(f, inv[col][x]);
                }
            }
        }
    }
    Some(inv)
}

fn mat_mul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| (0..inner).fold(0, |acc, i| acc ^ gf_mul(row[i], b[i][c])))
                .collect()
        })
        .collect()
}

/// `[n, k]` code: `k` source blocks, `n` coded blocks, the first `k` of
/// which equal the sources.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReedSolomon {
    k: usize,
    n: usize,
    generator: Vec<Vec<u8>>,
}

impl ReedSolomon {
    /// Generator `V V_top^{-1}` for the Vandermonde matrix `V` at the
    /// evaluation points `1..=n`.
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n || n > 255 {
            return Err(Error::Infeasible(format!(
                "Reed-Solomon over GF(256) needs 1 <= k <= n <= 255, got k={k}, n={n}"
            )));
        }
        let v: Vec<Vec<u8>> = (1..=n)
            .map(|x| (0..k).map(|e| gf_pow(x as u8, e)).collect())
            .collect();
        let top_inv = invert(v[..k].to_vec()).expect("distinct evaluation points");
        Ok(Self {
            k,
            n,
            generator: mat_mul(&v, &top_inv),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Evaluation points of the underlying Vandermonde matrix.
    pub fn points(&self) -> Vec<u8> {
        (1..=self.n as u8).collect()
    }

    pub fn generator(&self) -> &[Vec<u8>] {
        &self.generator
    }

    /// Coded block `b` from equally long source blocks.
    pub fn encode_block(&self, b: usize, sources: &[&[u8]]) -> Vec<u8> {
        let len = sources[0].len();
        let mut out = vec![0u8; len];
        for (coef, src) in self.generator[b].iter().zip(sources) {
            if *coef == 0 {
                continue;
            }
            for (o, &s) in out.iter_mut().zip(src.iter()) {
                *o ^= gf_mul(*coef, s);
            }
        }
        out
    }

    pub fn encode(&self, sources: &[&[u8]]) -> Result<Vec<Vec<u8>>> {
        if sources.len() != self.k {
            return Err(Error::Format(format!(
                "expected {} source blocks, got {}",
                self.k,
                sources.len()
            )));
        }
        if sources.iter().any(|s| s.len() != sources[0].len()) {
            return Err(Error::Format("source blocks differ in length".into()));
        }
        Ok((0..self.n).map(|b| self.encode_block(b, sources)).collect())
    }

    /// Recover the sources from shares `(coded index, bytes)`; only the
    /// first `k` distinct indices are used.
    pub fn decode(&self, shares: &[(usize, &[u8])]) -> Result<Vec<Vec<u8>>> {
        let mut picked: Vec<(usize, &[u8])> = Vec::with_capacity(self.k);
        for &(i, bytes) in shares {
            if i >= self.n {
                return Err(Error::Format(format!("share index {i} outside 0..{}", self.n)));
            }
            if picked.iter().all(|&(j, _)| j != i) {
                picked.push((i, bytes));
            }
            if picked.len() == self.k {
                break;
            }
        }
        if picked.len() < self.k {
            return Err(Error::NotEnoughShares {
                needed: self.k,
                got: picked.len(),
            });
        }
        let sub: Vec<Vec<u8>> = picked.iter().map(|&(i, _)| self.generator[i].clone()).collect();
        let inv = invert(sub).expect("any k rows of an MDS generator are independent");
        let blocks: Vec<&[u8]> = picked.iter().map(|&(_, b)| b).collect();
        Ok(inv
            .iter()
            .map(|row| {
                let len = blocks[0].len();
                let mut out = vec![0u8; len];
                for (coef, blk) in row.iter().zip(&blocks) {
                    for (o, &s) in out.iter_mut().zip(blk.iter()) {
                        *o ^= gf_mul(*coef, s);
                    }
                }
                out
            })
            .collect())
    }
}
