//! Plug-in entropy and mutual information over count tables, in bits.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Joint count table of two discrete variables with its marginals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteDistribution {
    nx: usize,
    ny: usize,
    /// Row-major `nx × ny`.
    joint: Vec<u64>,
    row_totals: Vec<u64>,
    col_totals: Vec<u64>,
    total: u64,
}

impl DiscreteDistribution {
    pub fn from_joint(nx: usize, ny: usize, joint: Vec<u64>) -> Result<Self> {
        if joint.len() != nx * ny {
            return Err(Error::Shape {
                expected: nx * ny,
                actual: joint.len(),
            });
        }
        let mut row_totals = vec![0u64; nx];
        let mut col_totals = vec![0u64; ny];
        for x in 0..nx {
            for y in 0..ny {
                let c = joint[x * ny + y];
                row_totals[x] += c;
                col_totals[y] += c;
            }
        }
        let total = row_totals.iter().sum();
        Ok(DiscreteDistribution {
            nx,
            ny,
            joint,
            row_totals,
            col_totals,
            total,
        })
    }

    /// Tabulates paired codes; `xs[i] < nx` and `ys[i] < ny` are required.
    pub fn from_codes(xs: &[u32], nx: usize, ys: &[u32], ny: usize) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape {
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        let mut joint = vec![0u64; nx * ny];
        for (&x, &y) in xs.iter().zip(ys) {
            let (x, y) = (x as usize, y as usize);
            if x >= nx || y >= ny {
                return Err(Error::Consistency(format!("code ({x}, {y}) outside a {nx}×{ny} table")));
            }
            joint[x * ny + y] += 1;
        }
        Self::from_joint(nx, ny, joint)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn joint(&self) -> &[u64] {
        &self.joint
    }

    pub fn count(&self, x: usize, y: usize) -> u64 {
        self.joint[x * self.ny + y]
    }

    pub fn marginal_x(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn marginal_y(&self) -> &[u64] {
        &self.col_totals
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn transpose(&self) -> DiscreteDistribution {
        let mut joint = vec![0u64; self.nx * self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                joint[y * self.nx + x] = self.count(x, y);
            }
        }
        DiscreteDistribution {
            nx: self.ny,
            ny: self.nx,
            joint,
            row_totals: self.col_totals.clone(),
            col_totals: self.row_totals.clone(),
            total: self.total,
        }
    }
}

/// Shannon entropy of a count vector; `0 log 0 = 0`.
pub fn entropy<T: Scalar>(counts: &[u64]) -> Result<T> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Size("entropy of an empty distribution".into()));
    }
    let n = T::from_u64(total).expect("count representable");
    let h = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = T::from_u64(c).expect("count representable") / n;
            -p * p.log2()
        })
        .sum::<T>();
    Ok(h.max(T::zero()))
}

pub fn joint_entropy<T: Scalar>(d: &DiscreteDistribution) -> Result<T> {
    entropy(d.joint())
}

/// `Σ p(x,y) log2( p(x,y) / (p(x) p(y)) )`, clamped at 0.
pub fn mutual_information<T: Scalar>(d: &DiscreteDistribution) -> Result<T> {
    if d.total == 0 {
        return Err(Error::Size("mutual information of an empty distribution".into()));
    }
    let n = T::from_u64(d.total).expect("count representable");
    let mut acc = T::zero();
    for x in 0..d.nx {
        let rx = d.row_totals[x];
        if rx == 0 {
            continue;
        }
        let rx = T::from_u64(rx).expect("count representable");
        for y in 0..d.ny {
            let c = d.count(x, y);
            if c == 0 {
                continue;
            }
            let c = T::from_u64(c).expect("count representable");
            let cy = T::from_u64(d.col_totals[y]).expect("count representable");
            acc = acc + (c / n) * ((c * n) / (rx * cy)).log2();
        }
    }
    Ok(acc.max(T::zero()))
}

/// The same quantity as `H(X) + H(Y) - H(X,Y)`.
pub fn mutual_information_from_entropies<T: Scalar>(d: &DiscreteDistribution) -> Result<T> {
    let hx: T = entropy(d.marginal_x())?;
    let hy: T = entropy(d.marginal_y())?;
    let hxy: T = joint_entropy(d)?;
    Ok((hx + hy - hxy).max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy::<f64>(&[5, 5]).unwrap(), 1.0);
        assert_eq!(entropy::<f64>(&[7]).unwrap(), 0.0);
        assert_eq!(entropy::<f64>(&[7, 0, 0]).unwrap(), 0.0);
        let oracle = -0.75f64 * 0.75f64.log2() - 0.25 * 0.25f64.log2();
        assert!((entropy::<f64>(&[3, 1]).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 0.811_278_124_459_132_8).abs() < 1e-15);
        assert!(matches!(entropy::<f64>(&[0, 0]), Err(Error::Size(_))));
        assert!(matches!(entropy::<f64>(&[]), Err(Error::Size(_))));
    }

    #[test]
    fn independence_gives_zero() {
        // outer product of (1,2,3) and (2,5)
        let d = DiscreteDistribution::from_joint(3, 2, vec![2, 5, 4, 10, 6, 15]).unwrap();
        assert!(mutual_information::<f64>(&d).unwrap().abs() < 1e-9);
    }

    #[test]
    fn identity_coupling_is_entropy() {
        let xs = [0u32, 1, 2, 3, 0, 1, 2, 3];
        let d = DiscreteDistribution::from_codes(&xs, 4, &xs, 4).unwrap();
        assert!((mutual_information::<f64>(&d).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_agrees_with_entropy_route() {
        let d = DiscreteDistribution::from_joint(2, 2, vec![4, 1, 1, 4]).unwrap();
        // 2*0.4*log2(1.6) + 2*0.1*log2(0.4)
        let oracle = 0.8 * 1.6f64.log2() + 0.2 * 0.4f64.log2();
        let a = mutual_information::<f64>(&d).unwrap();
        let b = mutual_information_from_entropies::<f64>(&d).unwrap();
        assert!((a - oracle).abs() < 1e-12);
        assert!((a - b).abs() < 1e-9);
        assert!((a - 0.278_071_905_112_638_4).abs() < 1e-12);
    }

    #[test]
    fn transpose_swaps_marginals() {
        let d = DiscreteDistribution::from_joint(2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let t = d.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t.marginal_x(), d.marginal_y());
        assert_eq!(t.count(2, 1), 6);
    }

    #[test]
    fn bad_codes_rejected() {
        assert!(DiscreteDistribution::from_codes(&[0, 3], 2, &[0, 0], 1).is_err());
        assert!(DiscreteDistribution::from_codes(&[0], 2, &[0, 0], 1).is_err());
    }

    #[test]
    fn f32_mutual_information() {
        let d = DiscreteDistribution::from_joint(2, 2, vec![4, 1, 1, 4]).unwrap();
        let a: f32 = mutual_information(&d).unwrap();
        assert!((a - 0.278_071_9).abs() < 1e-5);
    }
}
