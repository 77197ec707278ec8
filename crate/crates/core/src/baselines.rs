//! Hamming and total-variation partition distances.
//!
//! Both use the same matching construction as the transport distance but
//! ignore the graph: Hamming counts relabeled vertices, total variation
//! compares masses vertex by vertex.

use num_traits::{Signed, Zero};

use crate::assignment::{self, hungarian, CostMatrix, Matching, Metric};
use crate::numeric::Rational;
use crate::partition::{MassDistribution, Partition};
use crate::{Error, Result};

/// Which baseline to lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Hamming,
    L1,
}

/// `|a \ b|` for sorted vertex lists.
pub(crate) fn set_difference_size(a: &[usize], b: &[usize]) -> usize {
    let mut j = 0;
    let mut shared = 0;
    for &v in a {
        while j < b.len() && b[j] < v {
            j += 1;
        }
        if j < b.len() && b[j] == v {
            shared += 1;
        }
    }
    a.len() - shared
}

/// `1/2 sum_v |x(v) - y(v)|`.
pub fn total_variation(x: &MassDistribution, y: &MassDistribution) -> Rational {
    let sum = (0..x.len()).fold(Rational::zero(), |acc, v| acc + (x.get(v) - y.get(v)).abs());
    sum / Rational::from_integer(2)
}

fn check_indices(x: &Partition, y: &Partition, i: usize, j: usize) -> Result<()> {
    assignment::check_compatible(None, x, y)?;
    if i >= x.k() || j >= y.k() {
        return Err(Error::InvalidArgument(format!(
            "component pair ({i}, {j}) out of range for k = {}",
            x.k()
        )));
    }
    Ok(())
}

/// Number of vertices in component `i` of `x` that are not in component `j` of `y`.
pub fn hamming_component_cost(x: &Partition, y: &Partition, i: usize, j: usize) -> Result<usize> {
    check_indices(x, y, i, j)?;
    Ok(set_difference_size(x.component(i), y.component(j)))
}

/// Total variation between component `i` of `x` and component `j` of `y`
/// under each partition's mass representation.
pub fn l1_component_cost(x: &Partition, y: &Partition, i: usize, j: usize) -> Result<Rational> {
    check_indices(x, y, i, j)?;
    Ok(total_variation(
        &x.component_distribution(i)?,
        &y.component_distribution(j)?,
    ))
}

/// Lifted Hamming or total-variation distance. Needs no graph.
pub fn lifted_baseline(
    x: &Partition,
    y: &Partition,
    which: Baseline,
) -> Result<Matching<Rational>> {
    assignment::check_compatible(None, x, y)?;
    let k = x.k();
    let mut costs = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            costs.push(match which {
                Baseline::Hamming => {
                    Rational::from_integer(hamming_component_cost(x, y, i, j)? as i128)
                }
                Baseline::L1 => l1_component_cost(x, y, i, j)?,
            });
        }
    }
    Ok(hungarian(&CostMatrix::new(k, costs)?))
}

impl From<Baseline> for Metric {
    fn from(b: Baseline) -> Self {
        match b {
            Baseline::Hamming => Metric::Hamming,
            Baseline::L1 => Metric::L1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::lifted_distance;
    use crate::graph::grid_graph;
    use crate::numeric::int;
    use crate::partition::Representation;

    fn stripes() -> (Partition, Partition) {
        let g = grid_graph(2, 2).unwrap();
        (
            Partition::from_labels(&g, &[0, 1, 0, 1], 2).unwrap(),
            Partition::from_labels(&g, &[0, 0, 1, 1], 2).unwrap(),
        )
    }

    #[test]
    fn per_pair_costs() {
        let (left, top) = stripes();
        assert_eq!(hamming_component_cost(&left, &left, 0, 0).unwrap(), 0);
        assert_eq!(hamming_component_cost(&left, &left, 0, 1).unwrap(), 2);
        assert_eq!(hamming_component_cost(&left, &top, 0, 0).unwrap(), 1);
        assert_eq!(l1_component_cost(&left, &left, 1, 1).unwrap(), int(0));
        assert_eq!(l1_component_cost(&left, &left, 0, 1).unwrap(), int(1));
        assert_eq!(
            l1_component_cost(&left, &top, 0, 0).unwrap(),
            Rational::new(1, 2)
        );
        assert!(hamming_component_cost(&left, &top, 2, 0).is_err());
    }

    #[test]
    fn lifted_stripes() {
        let (left, top) = stripes();
        assert_eq!(
            lifted_baseline(&left, &top, Baseline::Hamming)
                .unwrap()
                .value,
            int(2)
        );
        assert_eq!(
            lifted_baseline(&left, &top, Baseline::L1).unwrap().value,
            int(1)
        );
        assert_eq!(
            lifted_baseline(&left, &left, Baseline::Hamming)
                .unwrap()
                .value,
            int(0)
        );
        assert_eq!(
            lifted_baseline(&top, &top, Baseline::L1).unwrap().value,
            int(0)
        );
    }

    #[test]
    fn agrees_with_generic_lift() {
        let g = grid_graph(3, 3).unwrap();
        let x = Partition::from_labels(&g, &[0, 0, 1, 0, 2, 1, 2, 2, 1], 3).unwrap();
        let y = Partition::from_labels(&g, &[0, 1, 1, 0, 0, 1, 2, 2, 2], 3).unwrap();
        for b in [Baseline::Hamming, Baseline::L1] {
            assert_eq!(
                lifted_baseline(&x, &y, b).unwrap().value,
                lifted_distance(&g, &x, &y, b.into()).unwrap().value
            );
        }
    }

    #[test]
    fn l1_keeps_half_factor_for_raw_masses() {
        let g = grid_graph(1, 3).unwrap();
        let x = Partition::from_labels(&g, &[0, 0, 1], 2)
            .unwrap()
            .with_representation(Representation::Unbalanced, None)
            .unwrap();
        let y = Partition::from_labels(&g, &[0, 1, 1], 2)
            .unwrap()
            .with_representation(Representation::Unbalanced, None)
            .unwrap();
        // {0,1} vs {0}: 1/2 * 1
        assert_eq!(
            l1_component_cost(&x, &y, 0, 0).unwrap(),
            Rational::new(1, 2)
        );
    }

    #[test]
    fn hamming_equals_scaled_l1_for_equal_sizes() {
        let g = grid_graph(3, 3).unwrap();
        let x = Partition::from_labels(&g, &[0, 0, 0, 1, 1, 1, 2, 2, 2], 3).unwrap();
        let y = Partition::from_labels(&g, &[0, 0, 1, 0, 2, 1, 2, 2, 1], 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let h = hamming_component_cost(&x, &y, i, j).unwrap();
                let l = l1_component_cost(&x, &y, i, j).unwrap();
                assert_eq!(l, Rational::new(h as i128, 3));
            }
        }
    }

    #[test]
    fn set_difference() {
        assert_eq!(set_difference_size(&[1, 2, 3, 7], &[2, 7, 9]), 2);
        assert_eq!(set_difference_size(&[], &[1]), 0);
        assert_eq!(set_difference_size(&[4], &[]), 1);
    }
}
