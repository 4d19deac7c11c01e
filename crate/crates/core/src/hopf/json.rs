//! JSON description of a finite quantum group.
//!
//! ```json
//! {"name": "...", "blocks": [1, 1],
//!  "mult": [[i, j, k, re, im], ...],        // e_i e_j has coefficient at e_k
//!  "coproduct": [[k, i, j, re, im], ...],   // Δ(e_k) has coefficient at e_i⊗e_j
//!  "counit": [[re, im], ...],
//!  "antipode": [[k, i, re, im], ...],       // S(e_i) has coefficient at e_k
//!  "haar": [[re, im], ...]}
//! ```
//!
//! Indices refer to the matrix-unit basis of `blocks`. `mult` defaults to the
//! block matrix product and `haar` is solved from the invariance equations
//! when omitted.

use serde::{Deserialize, Serialize};

use super::{solve_haar, FiniteQuantumGroup};
use crate::layout::BlockLayout;
use crate::matcore::{c, CMatrix, CVector, C64};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumGroupSpec {
    pub name: String,
    pub blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult: Option<Vec<(usize, usize, usize, f64, f64)>>,
    pub coproduct: Vec<(usize, usize, usize, f64, f64)>,
    pub counit: Vec<(f64, f64)>,
    pub antipode: Vec<(usize, usize, f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<Vec<(f64, f64)>>,
}

fn dense(name: &str, v: &[(f64, f64)], d: usize) -> Result<CVector> {
    if v.len() != d {
        return Err(Error::Parse(format!("`{name}` has {} entries, expected {d}", v.len())));
    }
    Ok(CVector::from_iterator(d, v.iter().map(|&(re, im)| c(re, im))))
}

fn check_index(name: &str, i: usize, bound: usize) -> Result<()> {
    if i >= bound {
        return Err(Error::Parse(format!("`{name}` index {i} out of range (dimension {bound})")));
    }
    Ok(())
}

impl QuantumGroupSpec {
    pub fn build(&self) -> Result<FiniteQuantumGroup> {
        let layout = BlockLayout::new(self.blocks.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let d = layout.dim();
        let mult = match &self.mult {
            None => layout.mult_tensor(),
            Some(entries) => {
                let mut m = CMatrix::zeros(d, d * d);
                for &(i, j, k, re, im) in entries {
                    for x in [i, j, k] {
                        check_index("mult", x, d)?;
                    }
                    m[(k, i * d + j)] += c(re, im);
                }
                m
            }
        };
        let mut coproduct = CMatrix::zeros(d * d, d);
        for &(k, i, j, re, im) in &self.coproduct {
            for x in [i, j, k] {
                check_index("coproduct", x, d)?;
            }
            coproduct[(i * d + j, k)] += c(re, im);
        }
        let mut antipode = CMatrix::zeros(d, d);
        for &(k, i, re, im) in &self.antipode {
            check_index("antipode", k, d)?;
            check_index("antipode", i, d)?;
            antipode[(k, i)] += c(re, im);
        }
        let counit = dense("counit", &self.counit, d)?;
        let unit = layout.unit();
        let haar = match &self.haar {
            Some(h) => dense("haar", h, d)?,
            None => solve_haar(&unit, &coproduct)?,
        };
        Ok(FiniteQuantumGroup {
            name: self.name.clone(),
            star: layout.star_matrix(),
            mult,
            unit,
            coproduct,
            counit,
            antipode,
            haar,
            named: None,
            layout,
        })
    }

    /// Sparse description of `g` (entries below `1e-15` in modulus dropped).
    pub fn from_group(g: &FiniteQuantumGroup) -> Self {
        let d = g.dim();
        let keep = |z: C64| z.norm() > 1e-15;
        let mut mult = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let z = g.mult[(k, i * d + j)];
                    if keep(z) {
                        mult.push((i, j, k, z.re, z.im));
                    }
                }
            }
        }
        let mut coproduct = Vec::new();
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let z = g.coproduct[(i * d + j, k)];
                    if keep(z) {
                        coproduct.push((k, i, j, z.re, z.im));
                    }
                }
            }
        }
        let mut antipode = Vec::new();
        for i in 0..d {
            for k in 0..d {
                let z = g.antipode[(k, i)];
                if keep(z) {
                    antipode.push((k, i, z.re, z.im));
                }
            }
        }
        Self {
            name: g.name.clone(),
            blocks: g.layout.blocks().to_vec(),
            mult: Some(mult),
            coproduct,
            counit: g.counit.iter().map(|z| (z.re, z.im)).collect(),
            antipode,
            haar: Some(g.haar.iter().map(|z| (z.re, z.im)).collect()),
        }
    }
}

pub fn from_json_str(s: &str) -> Result<FiniteQuantumGroup> {
    let spec: QuantumGroupSpec = serde_json::from_str(s)?;
    spec.build()
}

pub fn to_json_string(g: &FiniteQuantumGroup) -> String {
    serde_json::to_string_pretty(&QuantumGroupSpec::from_group(g)).expect("spec serialization cannot fail")
}
