use crate::error::{Error, Result};

pub const MAX_ENUM_SIZE: u64 = 30;
const MAX_SEGMENT: usize = 4;

/// prod over edges of nu * min^{-gamma} * max^{gamma-1}; zero unless the
/// vertices are pairwise distinct.
pub fn path_weight_bound(path: &[u64], nu: f64, gamma: f64) -> f64 {
    for (a, &u) in path.iter().enumerate() {
        if path[a + 1..].contains(&u) {
            return 0.0;
        }
    }
    path.windows(2)
        .map(|e| {
            let (lo, hi) = (e[0].min(e[1]) as f64, e[0].max(e[1]) as f64);
            nu * lo.powf(-gamma) * hi.powf(gamma - 1.0)
        })
        .product()
}

/// f_{[i,k)}(x, y): sum of the path bound over pairwise-disjoint interior
/// tuples with l_j <= pi_j <= t' for i < j < k.
#[allow(clippy::too_many_arguments)]
pub fn expected_good_paths(
    t_prime: u64,
    ell: &[u64],
    i: usize,
    k: usize,
    x: u64,
    y: u64,
    nu: f64,
    gamma: f64,
) -> Result<f64> {
    if t_prime > MAX_ENUM_SIZE || k <= i || k - i > MAX_SEGMENT || ell.len() < k {
        return Err(Error::TheoryDomain(format!(
            "enumeration needs t' <= {MAX_ENUM_SIZE}, 0 < k - i <= {MAX_SEGMENT} and thresholds up to level {k}"
        )));
    }
    if x == 0 || y == 0 || x > t_prime || y > t_prime {
        return Err(Error::VertexOutOfRange { v: x.max(y), bound: t_prime + 1 });
    }
    let mut path = Vec::with_capacity(k - i + 1);
    path.push(x);
    let mut total = 0.0;
    extend(&mut path, i + 1, k, y, t_prime, ell, nu, gamma, &mut total);
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn extend(path: &mut Vec<u64>, j: usize, k: usize, y: u64, tp: u64, ell: &[u64], nu: f64, gamma: f64, total: &mut f64) {
    if j == k {
        path.push(y);
        *total += path_weight_bound(path, nu, gamma);
        path.pop();
        return;
    }
    for v in ell[j].max(1)..=tp {
        if v == y || path.contains(&v) {
            continue;
        }
        path.push(v);
        extend(path, j + 1, k, y, tp, ell, nu, gamma, total);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_is_the_bound() {
        let g = 2.0 / 3.0;
        let v = expected_good_paths(20, &[2, 2, 2], 1, 2, 20, 7, 1.5, g).unwrap();
        assert!((v - 1.5 * 7f64.powf(-g) * 20f64.powf(g - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn same_endpoint_is_zero() {
        assert_eq!(expected_good_paths(12, &[2; 4], 0, 3, 5, 5, 1.0, 0.6).unwrap(), 0.0);
        assert_eq!(path_weight_bound(&[3, 4, 3], 1.0, 0.6), 0.0);
    }

    #[test]
    fn rejects_large_instances() {
        assert!(expected_good_paths(31, &[2; 4], 0, 2, 1, 2, 1.0, 0.6).is_err());
        assert!(expected_good_paths(10, &[2; 8], 0, 6, 1, 2, 1.0, 0.6).is_err());
    }
}
