use crate::error::{MrError, Result};
use crate::mr::cells_of;
use crate::mr::predict::predict_two_level;
use crate::scheme::PredictionScheme;

/// Keeps the even-indexed samples of a level `k` vector.
pub fn decimate(fine: &[f64]) -> Result<Vec<f64>> {
    let cells = cells_of(fine.len())?;
    if cells % 2 != 0 {
        return Err(MrError::NotDyadic { cells });
    }
    Ok(fine.iter().step_by(2).copied().collect())
}

/// Splits a level `k` vector into its level `k-1` samples and the
/// prediction errors at the odd fine nodes. `detail[i-1]` belongs to fine
/// index `2i-1`.
pub fn forward_two_level(fine: &[f64], scheme: &PredictionScheme) -> Result<(Vec<f64>, Vec<f64>)> {
    let coarse = decimate(fine)?;
    let predicted = predict_two_level(&coarse, scheme)?;
    let detail = fine
        .iter()
        .zip(&predicted)
        .skip(1)
        .step_by(2)
        .map(|(f, p)| f - p)
        .collect();
    Ok((coarse, detail))
}

pub fn inverse_two_level(coarse: &[f64], detail: &[f64], scheme: &PredictionScheme) -> Result<Vec<f64>> {
    let cells = cells_of(coarse.len())?;
    if detail.len() != cells {
        return Err(MrError::LengthMismatch {
            expected: cells,
            found: detail.len(),
        });
    }
    let mut fine = predict_two_level(coarse, scheme)?;
    for (i, d) in detail.iter().enumerate() {
        fine[2 * i + 1] += d;
    }
    Ok(fine)
}

/// Non-redundant multiscale representation `(z^m, d^m, .., d^{L-1})` of a
/// finest-level vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiResData {
    pub coarse: Vec<f64>,
    /// `details[j]` is `d^{base_level + j}`.
    pub details: Vec<Vec<f64>>,
    pub base_level: usize,
}

impl MultiResData {
    pub fn top_level(&self) -> usize {
        self.base_level + self.details.len()
    }

    /// Detail vector `d^k`, if `k` lies in the stored range.
    pub fn detail(&self, k: usize) -> Option<&[f64]> {
        k.checked_sub(self.base_level)
            .and_then(|j| self.details.get(j))
            .map(Vec::as_slice)
    }

    pub fn scalar_count(&self) -> usize {
        self.coarse.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }
}

/// Full transform of `z` (at level `top_level`) down to `base_level`.
pub fn forward_full(
    z: &[f64],
    top_level: usize,
    base_level: usize,
    scheme: &PredictionScheme,
) -> Result<MultiResData> {
    if base_level > top_level {
        return Err(MrError::InvalidConfig(format!(
            "base level {base_level} above top level {top_level}"
        )));
    }
    let mut coarse = z.to_vec();
    let mut details = Vec::with_capacity(top_level - base_level);
    for _ in base_level..top_level {
        let (c, d) = forward_two_level(&coarse, scheme)?;
        details.push(d);
        coarse = c;
    }
    details.reverse();
    Ok(MultiResData {
        coarse,
        details,
        base_level,
    })
}

pub fn inverse_full(rep: &MultiResData, scheme: &PredictionScheme) -> Result<Vec<f64>> {
    rep.details
        .iter()
        .try_fold(rep.coarse.clone(), |z, d| inverse_two_level(&z, d, scheme))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mr::{max_abs, predict_multilevel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn decimate_examples() {
        let v: Vec<f64> = (0..9).map(f64::from).collect();
        assert_eq!(decimate(&v).unwrap(), vec![0.0, 2.0, 4.0, 6.0, 8.0]);
        assert_eq!(decimate(&[2.5; 9]).unwrap(), vec![2.5; 5]);
        let sq = |j: usize| (0..=j).map(|i| (i as f64 / j as f64).powi(2)).collect::<Vec<_>>();
        assert_eq!(decimate(&sq(8)).unwrap(), sq(4));
        assert_eq!(decimate(&[0.0; 4]), Err(MrError::NotDyadic { cells: 3 }));
        assert!(decimate(&[1.0]).is_err());
    }

    #[test]
    fn predicted_data_has_zero_details() {
        for n in [1, 3, 5] {
            let s = PredictionScheme::new(n).unwrap();
            let c = random(9, n as u64);
            let fine = predict_two_level(&c, &s).unwrap();
            let (c2, d) = forward_two_level(&fine, &s).unwrap();
            assert_eq!(c2, c);
            assert!(d.iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn unit_detail_lands_on_odd_node() {
        let s = PredictionScheme::new(3).unwrap();
        let mut d = vec![0.0; 4];
        d[2] = 1.0;
        let fine = inverse_two_level(&[0.0; 5], &d, &s).unwrap();
        let mut expect = vec![0.0; 9];
        expect[5] = 1.0;
        assert_eq!(fine, expect);
        assert!(inverse_two_level(&[0.0; 5], &[0.0; 3], &s).is_err());
    }

    #[test]
    fn two_level_round_trip() {
        for n in [1, 3, 5] {
            let s = PredictionScheme::new(n).unwrap();
            let z = random(33, 3);
            let (c, d) = forward_two_level(&z, &s).unwrap();
            let back = inverse_two_level(&c, &d, &s).unwrap();
            for (a, b) in back.iter().zip(&z) {
                assert!((a - b).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn full_transform_edge_cases() {
        let s = PredictionScheme::new(3).unwrap();
        let z = random(65, 9);
        let same = forward_full(&z, 4, 4, &s).unwrap();
        assert!(same.details.is_empty());
        assert_eq!(same.coarse, z);
        assert_eq!(inverse_full(&same, &s).unwrap(), z);

        let c = random(5, 10);
        let fine = predict_multilevel(&c, 4, &s).unwrap();
        let rep = forward_full(&fine, 4, 0, &s).unwrap();
        assert_eq!(rep.coarse, c);
        assert!(rep.details.iter().all(|d| max_abs(d) == 0.0));
        assert_eq!(rep.scalar_count(), 65);
        assert_eq!(rep.detail(3).unwrap().len(), 32);
        assert!(rep.detail(4).is_none());
    }

    #[test]
    fn full_round_trip_five_levels() {
        for n in [1, 3, 5] {
            let s = PredictionScheme::new(n).unwrap();
            let z = random(8 * 32 + 1, 21);
            let rep = forward_full(&z, 5, 0, &s).unwrap();
            assert_eq!(rep.scalar_count(), z.len());
            let back = inverse_full(&rep, &s).unwrap();
            let err = back.iter().zip(&z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-12, "n={n}: {err}");
        }
    }

    #[test]
    fn zero_details_delta_coarse_gives_basis_shape() {
        let s = PredictionScheme::new(3).unwrap();
        let mut c = vec![0.0; 5];
        c[2] = 1.0;
        let rep = MultiResData {
            coarse: c,
            details: vec![vec![0.0; 4], vec![0.0; 8]],
            base_level: 0,
        };
        let z = inverse_full(&rep, &s).unwrap();
        assert_eq!(z.len(), 17);
        for (i, node) in (0..17).step_by(4).enumerate() {
            assert_eq!(z[node], if i == 2 { 1.0 } else { 0.0 });
        }
    }
}
