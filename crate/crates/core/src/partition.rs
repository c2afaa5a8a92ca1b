//! Finite partitions of [0, T] and the point locator used by the frozen products.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    points: Vec<f64>,
    mesh: f64,
}

/// Neighbourhood of a time `t` inside a partition: `t_n ≤ t < t_plus`,
/// with `t_minus` the point just below `t_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Located {
    pub index: usize,
    pub t_n: f64,
    pub t_minus: Option<f64>,
    pub t_plus: Option<f64>,
}

impl Partition {
    /// Builds a partition from explicit points. The first point must be 0,
    /// the sequence strictly increasing. Repeated points are rejected.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPartition("need at least two points".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPartition("non-finite point".into()));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidPartition(format!(
                "first point must be 0, got {}",
                points[0]
            )));
        }
        let mut mesh = 0.0f64;
        for w in points.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidPartition(format!(
                    "points not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
            mesh = mesh.max(w[1] - w[0]);
        }
        Ok(Self { points, mesh })
    }

    /// `cells` equal cells of [0, horizon].
    pub fn uniform(horizon: f64, cells: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidPartition(format!("horizon must be positive, got {horizon}")));
        }
        if cells == 0 {
            return Err(Error::InvalidPartition("need at least one cell".into()));
        }
        let mut points: Vec<f64> = (0..=cells)
            .map(|i| horizon * i as f64 / cells as f64)
            .collect();
        points[cells] = horizon;
        Self::new(points)
    }

    /// Uniform dyadic partition with mesh `horizon · 2^-level`.
    pub fn dyadic(horizon: f64, level: u32) -> Result<Self> {
        if level > 30 {
            return Err(Error::InvalidPartition(format!("dyadic level {level} too fine")));
        }
        Self::uniform(horizon, 1usize << level)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn cells(&self) -> usize {
        self.points.len() - 1
    }

    pub fn contains_point(&self, t: f64) -> bool {
        self.points.binary_search_by(|p| p.total_cmp(&t)).is_ok()
    }

    pub fn locate(&self, t: f64) -> Result<Located> {
        let horizon = self.horizon();
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::OutOfHorizon { t, horizon });
        }
        // number of points <= t, at least 1 because points[0] = 0 <= t
        let index = self.points.partition_point(|&p| p <= t) - 1;
        Ok(Located {
            index,
            t_n: self.points[index],
            t_minus: index.checked_sub(1).map(|i| self.points[i]),
            t_plus: self.points.get(index + 1).copied(),
        })
    }
}

/// Free-function form of [`Partition::locate`].
pub fn locate(partition: &Partition, t: f64) -> Result<Located> {
    partition.locate(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn locate_examples() {
        let p = Partition::new(vec![0.0, 0.5, 1.0]).unwrap();
        let l = p.locate(0.7).unwrap();
        assert_eq!((l.t_n, l.t_minus, l.t_plus), (0.5, Some(0.0), Some(1.0)));
        let l = p.locate(0.5).unwrap();
        assert_eq!((l.t_n, l.t_minus, l.t_plus), (0.5, Some(0.0), Some(1.0)));

        let q = Partition::uniform(1.0, 4).unwrap();
        let l = q.locate(0.0).unwrap();
        assert_eq!((l.t_n, l.t_minus, l.t_plus), (0.0, None, Some(0.25)));
        let l = q.locate(1.0).unwrap();
        assert_eq!((l.t_n, l.t_plus), (1.0, None));
    }

    #[test]
    fn locate_rejects_outside() {
        let p = Partition::uniform(2.0, 4).unwrap();
        assert!(matches!(p.locate(-1e-12), Err(Error::OutOfHorizon { .. })));
        assert!(matches!(p.locate(2.0 + 1e-12), Err(Error::OutOfHorizon { .. })));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Partition::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Partition::new(vec![0.1, 1.0]).is_err());
        assert!(Partition::new(vec![0.0]).is_err());
        assert!(Partition::new(vec![0.0, 1.0, 0.9]).is_err());
    }

    #[test]
    fn mesh_is_max_gap() {
        let p = Partition::new(vec![0.0, 0.1, 0.6, 1.0]).unwrap();
        assert!((p.mesh() - 0.5).abs() < 1e-15);
        let d = Partition::dyadic(3.0, 5).unwrap();
        assert_eq!(d.cells(), 32);
        assert!((d.mesh() - 3.0 / 32.0).abs() < 1e-15);
        assert_eq!(d.horizon(), 3.0);
    }

    proptest! {
        #[test]
        fn locate_brackets_t(
            gaps in proptest::collection::vec(0.01f64..1.0, 1..20),
            frac in 0.0f64..=1.0,
        ) {
            let mut pts = vec![0.0];
            for g in &gaps {
                let last = *pts.last().unwrap();
                pts.push(last + g);
            }
            let p = Partition::new(pts.clone()).unwrap();
            let t = frac * p.horizon();
            let l = p.locate(t).unwrap();
            prop_assert!(l.t_n <= t);
            prop_assert_eq!(pts[l.index], l.t_n);
            match l.t_plus {
                Some(tp) => {
                    prop_assert!(t < tp);
                    prop_assert_eq!(pts[l.index + 1], tp);
                }
                None => prop_assert_eq!(t, p.horizon()),
            }
            if let Some(tm) = l.t_minus {
                prop_assert_eq!(pts[l.index - 1], tm);
            } else {
                prop_assert_eq!(l.index, 0);
            }
        }
    }
}
