//! Named model fixtures shared by tests, the CLI and the benchmarks.

use crate::model::{Character, ModelConfig, StructureConstants, ValueElement, ValueModule};
use crate::rational::Rational;

/// Rank-one model with a single value `mu` and zero bracket.
pub fn rank_one(d: usize, l: usize, kappa: &[(i64, i64)]) -> ModelConfig {
    let vm =
        ValueModule::rank_one("mu", Character::from_fracs(kappa)).with_structure(StructureConstants::new()).unwrap();
    ModelConfig::new(d, l, vm).unwrap()
}

pub fn abelian_k0() -> ModelConfig {
    rank_one(1, 1, &[(0, 1)])
}

pub fn abelian_khalf() -> ModelConfig {
    rank_one(1, 1, &[(1, 2)])
}

pub fn abelian_two_branch() -> ModelConfig {
    rank_one(2, 2, &[(1, 3), (1, 2)])
}

/// Polynomial Dolbeault algebra in two variables, no divisor.
pub fn smooth_plane() -> ModelConfig {
    rank_one(2, 0, &[])
}

/// Three coordinates, two log branches (one with trivial monodromy).
pub fn mixed_three() -> ModelConfig {
    rank_one(3, 2, &[(1, 2), (0, 1)])
}

/// Three log branches with monodromy exponents `(1/3, 0, 2/3)`.
pub fn log_three() -> ModelConfig {
    rank_one(3, 3, &[(1, 3), (0, 1), (2, 3)])
}

/// Two rank-one summands `mu0` (trivial) and `mu1` (`kappa = 1/2`).
pub fn mixed_module() -> ModelConfig {
    let vm = ValueModule::new(
        vec![
            ValueElement { name: "mu0".into(), kappa: Character::from_fracs(&[(0, 1)]) },
            ValueElement { name: "mu1".into(), kappa: Character::from_fracs(&[(1, 2)]) },
        ],
        Some(StructureConstants::new()),
    )
    .unwrap();
    ModelConfig::new(1, 1, vm).unwrap()
}

fn gl2_module(chars: [Character; 4]) -> ValueModule {
    let names = ["E11", "E12", "E21", "E22"];
    let basis = names.iter().zip(chars).map(|(n, kappa)| ValueElement { name: (*n).into(), kappa }).collect();
    // [E_ij, E_kl] = delta_jk E_il - delta_li E_kj
    let idx = |i: usize, j: usize| 2 * i + j;
    let mut s = StructureConstants::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    if j == k {
                        s.add(idx(i, j), idx(k, l), idx(i, l), Rational::one());
                    }
                    if l == i {
                        s.add(idx(i, j), idx(k, l), idx(k, j), -Rational::one());
                    }
                }
            }
        }
    }
    ValueModule::new(basis, Some(s)).unwrap()
}

/// `gl_2` with `E12` of character `2/3` and `E21` of character `1/3`, so that
/// `[E12, E21] = z (E11 - E22)`.
pub fn gl2_carry() -> ModelConfig {
    let vm = gl2_module([
        Character::from_fracs(&[(0, 1)]),
        Character::from_fracs(&[(2, 3)]),
        Character::from_fracs(&[(1, 3)]),
        Character::from_fracs(&[(0, 1)]),
    ]);
    ModelConfig::new(1, 1, vm).unwrap()
}

/// `gl_2` over two log branches; `[E12, E21]` carries on both.
pub fn gl2_carry_two_branches() -> ModelConfig {
    let vm = gl2_module([
        Character::trivial(2),
        Character::from_fracs(&[(2, 3), (1, 2)]),
        Character::from_fracs(&[(1, 3), (1, 2)]),
        Character::trivial(2),
    ]);
    ModelConfig::new(2, 2, vm).unwrap()
}

pub const NAMES: &[&str] = &[
    "abelian-k0",
    "abelian-khalf",
    "abelian-two-branch",
    "smooth-plane",
    "mixed-three",
    "log-three",
    "mixed-module",
    "gl2-carry",
    "gl2-carry-two-branches",
];

pub fn by_name(name: &str) -> Option<ModelConfig> {
    Some(match name {
        "abelian-k0" => abelian_k0(),
        "abelian-khalf" => abelian_khalf(),
        "abelian-two-branch" => abelian_two_branch(),
        "smooth-plane" => smooth_plane(),
        "mixed-three" => mixed_three(),
        "log-three" => log_three(),
        "mixed-module" => mixed_module(),
        "gl2-carry" => gl2_carry(),
        "gl2-carry-two-branches" => gl2_carry_two_branches(),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for n in NAMES {
            assert!(by_name(n).is_some(), "{n}");
        }
        assert!(by_name("nope").is_none());
    }
}
