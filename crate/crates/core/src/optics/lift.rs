use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Occupation};
use crate::linalg::{CMatrix, C64};

use super::permanent::permanent;
use super::unitary::ModeUnitary;

/// A mode unitary represented on a multiphoton Fock basis.
#[derive(Clone, Debug)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    entries: CMatrix,
}

impl FockOperator {
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    /// ⟨out|Û|in⟩ by occupation labels.
    pub fn amplitude(&self, out: &Occupation, input: &Occupation) -> Option<C64> {
        Some(self.entries[(self.basis.index_of(out)?, self.basis.index_of(input)?)])
    }
}

/// `perm(U[out, in]) / √(∏ out! ∏ in!)`, the submatrix repeating row i
/// `out[i]` times and column j `in[j]` times.
fn transition_amplitude(u: &CMatrix, out: &Occupation, input: &Occupation) -> Result<C64> {
    let rows = out.mode_list();
    let cols = input.mode_list();
    let sub = CMatrix::from_fn(rows.len(), cols.len(), |a, b| u[(rows[a], cols[b])]);
    let norm = (out.factorial_product() * input.factorial_product()).sqrt();
    Ok(permanent(&sub)? / norm)
}

/// Fock-space representation of `u` on `basis`. Elements between different
/// photon-number sectors are exactly zero.
pub fn lift_unitary(u: &ModeUnitary, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    if basis.mode_count() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode unitary on a {}-mode basis",
            u.dim(),
            basis.mode_count()
        )));
    }
    let d = basis.len();
    let mut entries = CMatrix::zeros(d, d);
    for range in basis.sector_ranges() {
        for j in range.clone() {
            for i in range.clone() {
                entries[(i, j)] = transition_amplitude(u.matrix(), basis.state(i), basis.state(j))?;
            }
        }
    }
    Ok(FockOperator { basis: Arc::clone(basis), entries })
}

/// Output amplitudes `Û|input⟩` over `basis`; entries in other photon-number
/// sectors are zero. Cheaper than lifting the whole operator when only one
/// input state matters.
pub fn output_amplitudes(u: &ModeUnitary, input: &Occupation, basis: &FockBasis) -> Result<Vec<C64>> {
    if basis.mode_count() != u.dim() || input.modes() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode unitary with {}-mode input on a {}-mode basis",
            u.dim(),
            input.modes(),
            basis.mode_count()
        )));
    }
    let total = input.total();
    basis
        .states()
        .iter()
        .map(
            |out| {
                if out.total() == total {
                    transition_amplitude(u.matrix(), out, input)
                } else {
                    Ok(C64::new(0.0, 0.0))
                }
            },
        )
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{enumerate_fixed, enumerate_up_to};
    use crate::linalg::{max_abs_diff, unitarity_error};
    use crate::optics::haar_unitary;

    fn occ(v: &[u32]) -> Occupation {
        Occupation::new(v.to_vec())
    }

    #[test]
    fn identity_lifts_to_identity() {
        let basis = Arc::new(enumerate_up_to(3, 3).unwrap());
        let op = lift_unitary(&ModeUnitary::identity(3), &basis).unwrap();
        assert!(max_abs_diff(op.matrix(), &CMatrix::identity(basis.len(), basis.len())) < 1e-14);
    }

    #[test]
    fn hong_ou_mandel() {
        let basis = Arc::new(enumerate_fixed(2, 2).unwrap());
        let op = lift_unitary(&ModeUnitary::balanced_beamsplitter(), &basis).unwrap();
        let input = occ(&[1, 1]);
        assert!(op.amplitude(&occ(&[1, 1]), &input).unwrap().norm() < 1e-15);
        assert!((op.amplitude(&occ(&[2, 0]), &input).unwrap().norm_sqr() - 0.5).abs() < 1e-15);
        assert!((op.amplitude(&occ(&[0, 2]), &input).unwrap().norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel_by_creation_operator_expansion() {
        // a0† a1† |0⟩ → (b0† + b1†)(b0† − b1†)/2 |0⟩ = (b0†² − b1†²)/2 |0⟩:
        // amplitude to |2,0⟩ is √2/2, to |0,2⟩ is −√2/2, to |1,1⟩ is 0.
        let basis = enumerate_fixed(2, 2).unwrap();
        let amps = output_amplitudes(&ModeUnitary::balanced_beamsplitter(), &occ(&[1, 1]), &basis).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [(occ(&[0, 2]), -h), (occ(&[1, 1]), 0.0), (occ(&[2, 0]), h)];
        for (o, a) in expect {
            let k = basis.index_of(&o).unwrap();
            assert!((amps[k] - C64::new(a, 0.0)).norm() < 1e-15, "{o}");
        }
    }

    #[test]
    fn lifted_haar_block_is_unitary() {
        let basis = Arc::new(enumerate_fixed(4, 2).unwrap());
        for seed in 0..10 {
            let op = lift_unitary(&haar_unitary(4, seed).unwrap(), &basis).unwrap();
            assert!(unitarity_error(op.matrix()) < 1e-8);
        }
    }

    #[test]
    fn lift_is_a_homomorphism() {
        let basis = Arc::new(enumerate_up_to(3, 2).unwrap());
        for seed in 0..5 {
            let u = haar_unitary(3, 2 * seed).unwrap();
            let v = haar_unitary(3, 2 * seed + 1).unwrap();
            let uv = u.then_after(&v).unwrap();
            let lhs = lift_unitary(&uv, &basis).unwrap();
            let rhs = lift_unitary(&u, &basis).unwrap().matrix() * lift_unitary(&v, &basis).unwrap().matrix();
            assert!(max_abs_diff(lhs.matrix(), &rhs) < 1e-12);
        }
    }

    #[test]
    fn sectors_do_not_mix() {
        let basis = Arc::new(enumerate_up_to(3, 2).unwrap());
        let op = lift_unitary(&haar_unitary(3, 1).unwrap(), &basis).unwrap();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if basis.state(i).total() != basis.state(j).total() {
                    assert_eq!(op.matrix()[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn column_matches_full_lift() {
        let basis = Arc::new(enumerate_up_to(4, 2).unwrap());
        let u = haar_unitary(4, 9).unwrap();
        let op = lift_unitary(&u, &basis).unwrap();
        let input = occ(&[1, 0, 1, 0]);
        let col = output_amplitudes(&u, &input, &basis).unwrap();
        let j = basis.index_of(&input).unwrap();
        for (i, a) in col.iter().enumerate() {
            assert!((a - op.matrix()[(i, j)]).norm() < 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let basis = Arc::new(enumerate_fixed(3, 1).unwrap());
        assert!(matches!(lift_unitary(&ModeUnitary::identity(2), &basis), Err(Error::DimensionMismatch(_))));
    }
}
