//! Koszul complex of the commuting operators `P_i = z_i d/dz_i + kappa_i` on
//! truncated monomial spaces.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::logform::{exponent_vectors, subsets_of_size, FactorSet};
use crate::model::{Character, ModelConfig};
use crate::primitives::Truncation;
use crate::rational::Rational;

/// Basis element `z^a zbar^b dz_I/z_I` of `E^{|I|}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KoszulBasis {
    pub log: FactorSet,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct KoszulComplex {
    pub l: usize,
    pub truncation: Truncation,
    pub character: Character,
    /// `spaces[j]` indexes `E^j`.
    pub spaces: Vec<Vec<KoszulBasis>>,
    /// `differentials[j] : E^j -> E^{j+1}`.
    pub differentials: Vec<Matrix>,
}

impl KoszulComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(Vec::len).collect()
    }

    /// Checks that consecutive differentials compose to zero.
    pub fn is_complex(&self) -> bool {
        self.differentials.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }
}

/// Builds the complex for value element `v`; monomials range over all `d`
/// coordinates but only the `l` log branches carry operators.
pub fn build_koszul(model: &ModelConfig, v: usize, t: &Truncation) -> Result<KoszulComplex> {
    let (d, l) = (model.d(), model.l());
    if l == 0 {
        return Err(Error::Precondition("Koszul complex needs at least one log branch".into()));
    }
    if v >= model.values().len() {
        return Err(Error::Config(format!("value index {v} out of range")));
    }
    let za = exponent_vectors(d, t.max_z_deg);
    let zb = exponent_vectors(d, t.max_zbar_deg);
    let spaces: Vec<Vec<KoszulBasis>> = (0..=l)
        .map(|j| {
            let mut s = Vec::new();
            for log in subsets_of_size(l, j) {
                for a in &za {
                    for b in &zb {
                        s.push(KoszulBasis { log, a: a.clone(), b: b.clone() });
                    }
                }
            }
            s.sort();
            s
        })
        .collect();
    let mut differentials = Vec::with_capacity(l);
    for j in 0..l {
        let index: BTreeMap<&KoszulBasis, usize> = spaces[j + 1].iter().enumerate().map(|(n, e)| (e, n)).collect();
        let mut m = Matrix::zeros(spaces[j + 1].len(), spaces[j].len());
        for (col, e) in spaces[j].iter().enumerate() {
            for i in (0..l).filter(|&i| !e.log.contains(i)) {
                let eigen = Rational::from(e.a[i]) + model.kappa(v, i);
                if eigen.is_zero() {
                    continue;
                }
                let target = KoszulBasis { log: e.log.with(i), a: e.a.clone(), b: e.b.clone() };
                let entry = if e.log.count_below(i) % 2 == 1 { -eigen } else { eigen };
                m.set(index[&target], col, entry);
            }
        }
        differentials.push(m);
    }
    Ok(KoszulComplex { l, truncation: *t, character: model.values().character(v).clone(), spaces, differentials })
}

/// Homology dimensions `H^0 .. H^l` by exact ranks.
pub fn koszul_homology(kc: &KoszulComplex) -> Vec<usize> {
    let ranks: Vec<usize> = kc.differentials.iter().map(Matrix::rank).collect();
    (0..=kc.l)
        .map(|j| {
            let out = if j < kc.l { ranks[j] } else { 0 };
            let inc = if j > 0 { ranks[j - 1] } else { 0 };
            kc.spaces[j].len() - out - inc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn single_branch_half() {
        let m = fixtures::abelian_khalf();
        let kc = build_koszul(&m, 0, &Truncation::new(2, 0)).unwrap();
        assert_eq!(kc.dims(), vec![3, 3]);
        let diag: Vec<Rational> = (0..3).map(|i| kc.differentials[0].get(i, i).clone()).collect();
        assert_eq!(diag, vec![Rational::new(1, 2), Rational::new(3, 2), Rational::new(5, 2)]);
        assert_eq!(koszul_homology(&kc), vec![0, 0]);
    }

    #[test]
    fn single_branch_trivial() {
        let m = fixtures::abelian_k0();
        let kc = build_koszul(&m, 0, &Truncation::new(2, 1)).unwrap();
        let d = &kc.differentials[0];
        for (col, e) in kc.spaces[0].iter().enumerate() {
            let row = kc.spaces[1].iter().position(|x| x.a == e.a && x.b == e.b).unwrap();
            assert_eq!(d.get(row, col).is_zero(), e.a[0] == 0);
        }
        assert_eq!(koszul_homology(&kc), vec![2, 2]);
    }

    #[test]
    fn two_branches_compose_to_zero() {
        let m = fixtures::abelian_two_branch();
        let kc = build_koszul(&m, 0, &Truncation::new(2, 1)).unwrap();
        assert!(kc.is_complex());
        assert_eq!(koszul_homology(&kc), vec![0, 0, 0]);
    }

    #[test]
    fn no_branches_is_rejected() {
        assert!(matches!(
            build_koszul(&fixtures::smooth_plane(), 0, &Truncation::new(1, 1)),
            Err(Error::Precondition(_))
        ));
    }
}
