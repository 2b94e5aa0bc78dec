//! Queue-ratio vectors, static-priority corners, convex combinations,
//! the neighbor relation and free-coordinate parameterization of the
//! ratio polytope.

use serde::{Deserialize, Serialize};

use crate::error::RatioError;
use crate::network::NetworkPrimitives;
use crate::numerics::Matrix;

const STATION_SUM_TOL: f64 = 1e-10;
const NEIGHBOR_TOL: f64 = 1e-12;

/// delta weights of a ratio matrix; per station j the weights satisfy
/// sum_{k in C(j)} m_k delta_k = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioVector {
    delta: Vec<f64>,
}

impl RatioVector {
    pub fn new(net: &NetworkPrimitives, delta: Vec<f64>) -> Result<Self, RatioError> {
        if delta.len() != net.class_count() {
            return Err(RatioError::Dimension(format!(
                "expected {} weights, got {}",
                net.class_count(),
                delta.len()
            )));
        }
        if let Some((k, &d)) = delta.iter().enumerate().find(|(_, &d)| !(d >= 0.0)) {
            return Err(RatioError::Invalid(format!(
                "delta_{} = {d} must be nonnegative",
                k + 1
            )));
        }
        for j in 0..net.station_count() {
            let sum: f64 = net
                .classes_at(j)
                .iter()
                .map(|&k| net.mean_service()[k] * delta[k])
                .sum();
            if (sum - 1.0).abs() > STATION_SUM_TOL {
                return Err(RatioError::Invalid(format!(
                    "station {} ratio sum is {sum}, expected 1",
                    j + 1
                )));
            }
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// The K x J ratio matrix with Delta_{kj} = delta_k when s(k) = j.
    pub fn as_matrix(&self, net: &NetworkPrimitives) -> Matrix {
        let mut d = Matrix::zeros(net.class_count(), net.station_count());
        for (k, &v) in self.delta.iter().enumerate() {
            d[(k, net.station_of(k))] = v;
        }
        d
    }
}

/// A static-priority corner, identified by the lowest-priority class of
/// each station (0-based classes, indexed by station).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerSpec {
    pub lowest: Vec<usize>,
}

impl CornerSpec {
    /// 1-based lowest-priority class labels, station order.
    pub fn label_lowest(&self) -> String {
        self.lowest
            .iter()
            .map(|k| (k + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// 1-based high-priority class labels, defined only when every station
    /// has exactly two classes.
    pub fn label_high(&self, net: &NetworkPrimitives) -> Option<String> {
        let mut high = Vec::new();
        for (j, &low) in self.lowest.iter().enumerate() {
            let classes = net.classes_at(j);
            if classes.len() != 2 {
                return None;
            }
            let &h = classes.iter().find(|&&k| k != low)?;
            high.push((h + 1).to_string());
        }
        Some(high.join(","))
    }
}

/// Static-priority ratio vector: delta = 1/m for the lowest-priority class
/// of each station, 0 elsewhere.
pub fn static_priority(
    net: &NetworkPrimitives,
    spec: &CornerSpec,
) -> Result<RatioVector, RatioError> {
    if spec.lowest.len() != net.station_count() {
        return Err(RatioError::Spec(format!(
            "expected one lowest class per station ({}), got {}",
            net.station_count(),
            spec.lowest.len()
        )));
    }
    let mut delta = vec![0.0; net.class_count()];
    for (j, &low) in spec.lowest.iter().enumerate() {
        if low >= net.class_count() || net.station_of(low) != j {
            return Err(RatioError::Spec(format!(
                "class {} is not served at station {}",
                low + 1,
                j + 1
            )));
        }
        delta[low] = 1.0 / net.mean_service()[low];
    }
    RatioVector::new(net, delta)
}

/// All static-priority corners, lexicographic over lowest-class choices
/// (stations ascending).
pub fn corners(net: &NetworkPrimitives) -> Vec<(CornerSpec, RatioVector)> {
    let per_station: Vec<Vec<usize>> = (0..net.station_count())
        .map(|j| net.classes_at(j))
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_station.len()];
    loop {
        let spec = CornerSpec {
            lowest: choice
                .iter()
                .enumerate()
                .map(|(j, &c)| per_station[j][c])
                .collect(),
        };
        let rv = static_priority(net, &spec).expect("corner spec is valid by construction");
        out.push((spec, rv));
        // next lexicographic choice
        let mut j = per_station.len();
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if choice[j] + 1 < per_station[j].len() {
                choice[j] += 1;
                for c in choice.iter_mut().skip(j + 1) {
                    *c = 0;
                }
                break;
            }
            choice[j] = 0;
            if j == 0 {
                return out;
            }
        }
    }
}

/// lambda * d1 + (1 - lambda) * d2 componentwise.
pub fn convex_combine(
    net: &NetworkPrimitives,
    d1: &RatioVector,
    d2: &RatioVector,
    lambda: f64,
) -> Result<RatioVector, RatioError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(RatioError::Invalid(format!("lambda {lambda} outside [0,1]")));
    }
    let delta = d1
        .delta
        .iter()
        .zip(&d2.delta)
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect();
    RatioVector::new(net, delta)
}

/// True iff the two ratio vectors differ (beyond tolerance) in at most
/// one station's weights.
pub fn are_neighbors(net: &NetworkPrimitives, d1: &RatioVector, d2: &RatioVector) -> bool {
    let mut differing = 0;
    for j in 0..net.station_count() {
        let diff = net
            .classes_at(j)
            .iter()
            .any(|&k| (d1.delta[k] - d2.delta[k]).abs() > NEIGHBOR_TOL);
        if diff {
            differing += 1;
        }
    }
    differing <= 1
}

/// Ratio vector equivalent to max-weight with quadratic exponents and
/// class weights `c`: delta_i = (m_i/c_i) / sum_{l in C(j)} m_l^2/c_l.
pub fn max_weight(net: &NetworkPrimitives, c: &[f64]) -> Result<RatioVector, RatioError> {
    if c.len() != net.class_count() {
        return Err(RatioError::Dimension("weight length mismatch".into()));
    }
    if let Some((k, &w)) = c.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(RatioError::Invalid(format!("c_{} = {w} must be positive", k + 1)));
    }
    let m = net.mean_service();
    let mut delta = vec![0.0; net.class_count()];
    for j in 0..net.station_count() {
        let denom: f64 = net.classes_at(j).iter().map(|&l| m[l] * m[l] / c[l]).sum();
        for &k in &net.classes_at(j) {
            delta[k] = (m[k] / c[k]) / denom;
        }
    }
    RatioVector::new(net, delta)
}

/// Free classes per station: all but the lowest-indexed (pinned) class,
/// ascending. The flat coordinate order is stations ascending.
pub fn free_classes(net: &NetworkPrimitives) -> Vec<usize> {
    let mut free = Vec::new();
    for j in 0..net.station_count() {
        let classes = net.classes_at(j);
        free.extend(classes.into_iter().skip(1));
    }
    free
}

/// Rebuild a ratio vector from free coordinates, solving each station's
/// pinned delta from the station-sum identity.
pub fn from_free_coords(
    net: &NetworkPrimitives,
    coords: &[f64],
) -> Result<RatioVector, RatioError> {
    let free = free_classes(net);
    if coords.len() != free.len() {
        return Err(RatioError::Dimension(format!(
            "expected {} free coordinates, got {}",
            free.len(),
            coords.len()
        )));
    }
    let m = net.mean_service();
    let mut delta = vec![0.0; net.class_count()];
    for (&k, &v) in free.iter().zip(coords) {
        delta[k] = v;
    }
    for j in 0..net.station_count() {
        let classes = net.classes_at(j);
        let pinned = classes[0];
        let used: f64 = classes.iter().skip(1).map(|&k| m[k] * delta[k]).sum();
        let pv = (1.0 - used) / m[pinned];
        if pv < -1e-12 {
            return Err(RatioError::OutOfPolytope {
                station: j + 1,
                value: pv,
            });
        }
        delta[pinned] = pv.max(0.0);
    }
    RatioVector::new(net, delta)
}

/// Project a ratio vector onto its free coordinates.
pub fn to_free_coords(net: &NetworkPrimitives, rv: &RatioVector) -> Vec<f64> {
    free_classes(net).iter().map(|&k| rv.delta[k]).collect()
}

/// On-disk ratio vector; `delta` is in class order.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioFile {
    pub delta: Vec<f64>,
}
