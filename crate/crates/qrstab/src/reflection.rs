//! Reflection matrices R = (CMQ Delta)^{-1}, drifts theta = R(rho - e),
//! and the linear-combination identity along neighbor segments.

use crate::error::ReflectionError;
use crate::network::NetworkPrimitives;
use crate::numerics::{Matrix, SINGULARITY_TOL};
use crate::ratio::{are_neighbors, convex_combine, RatioVector};

/// Sign of a determinant with a dead zone around zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetSign {
    Positive,
    Negative,
    Zero,
}

impl DetSign {
    pub fn of(det: f64) -> Self {
        if det.abs() < 1e-10 {
            DetSign::Zero
        } else if det > 0.0 {
            DetSign::Positive
        } else {
            DetSign::Negative
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DetSign::Positive => "+",
            DetSign::Negative => "-",
            DetSign::Zero => "0",
        }
    }
}

/// R^{-1} = CMQ Delta and, when invertible, R, theta and det(R).
#[derive(Debug, Clone)]
pub struct ReflectionData {
    pub rinv: Matrix,
    pub det_rinv: f64,
    pub invertible: bool,
    pub r: Option<Matrix>,
    pub theta: Option<Vec<f64>>,
    pub det_r: Option<f64>,
}

impl ReflectionData {
    pub fn det_sign(&self) -> DetSign {
        DetSign::of(self.det_rinv)
    }
}

/// CMQ Delta for the given ratio vector.
pub fn cmq_delta(
    net: &NetworkPrimitives,
    delta: &RatioVector,
) -> Result<Matrix, ReflectionError> {
    let derived = net.derive().map_err(|e| {
        ReflectionError::Numerics(crate::error::NumericsError::Numerical(e.to_string()))
    })?;
    let c = net.constituency();
    let mut cm = c.clone();
    for j in 0..cm.rows() {
        for k in 0..cm.cols() {
            cm[(j, k)] *= net.mean_service()[k];
        }
    }
    let cmq = cm.matmul(&derived.q)?;
    Ok(cmq.matmul(&delta.as_matrix(net))?)
}

/// Compute the reflection data for one ratio vector. When CMQ Delta is
/// singular the result carries `invertible = false` and no R or theta.
pub fn reflection(
    net: &NetworkPrimitives,
    delta: &RatioVector,
) -> Result<ReflectionData, ReflectionError> {
    let rinv = cmq_delta(net, delta)?;
    let det_rinv = rinv.determinant()?;
    let singular = det_rinv.abs() < SINGULARITY_TOL * rinv.max_abs().max(1.0);
    if singular {
        return Ok(ReflectionData {
            rinv,
            det_rinv,
            invertible: false,
            r: None,
            theta: None,
            det_r: None,
        });
    }
    let r = rinv.invert()?;
    let rho = net
        .derive()
        .map_err(|e| {
            ReflectionError::Numerics(crate::error::NumericsError::Numerical(e.to_string()))
        })?
        .rho;
    let drift: Vec<f64> = rho.iter().map(|&x| x - 1.0).collect();
    let theta = r.matvec(&drift)?;
    let det_r = r.determinant()?;
    Ok(ReflectionData {
        rinv,
        det_rinv,
        invertible: true,
        r: Some(r),
        theta: Some(theta),
        det_r: Some(det_r),
    })
}

/// Combination coefficient beta for a neighbor segment and the
/// reconstructed R at lambda: beta R1 + (1 - beta) R2 with
/// beta = lambda det(R2) / (lambda det(R2) + (1 - lambda) det(R1)).
pub fn combination_coefficient(
    net: &NetworkPrimitives,
    d1: &RatioVector,
    d2: &RatioVector,
    lambda: f64,
) -> Result<(f64, Matrix), ReflectionError> {
    if !are_neighbors(net, d1, d2) {
        return Err(ReflectionError::NotNeighbors);
    }
    let r1 = reflection(net, d1)?;
    let r2 = reflection(net, d2)?;
    let d3 = convex_combine(net, d1, d2, lambda)?;
    let r3 = reflection(net, &d3)?;
    if !(r1.invertible && r2.invertible && r3.invertible) {
        return Err(ReflectionError::Singular);
    }
    let det1 = r1.det_r.unwrap();
    let det2 = r2.det_r.unwrap();
    let denom = lambda * det2 + (1.0 - lambda) * det1;
    if denom.abs() < 1e-14 {
        return Err(ReflectionError::Singular);
    }
    let beta = lambda * det2 / denom;
    let combined = r1
        .r
        .as_ref()
        .unwrap()
        .scale(beta)
        .add(&r2.r.as_ref().unwrap().scale(1.0 - beta))?;
    Ok((beta, combined))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_dhv, build_lu_kumar, NetworkPrimitives};
    use crate::ratio::{static_priority, CornerSpec};
    use crate::numerics::Matrix;

    fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                worst = worst.max((a[(i, j)] - b[(i, j)]).abs());
            }
        }
        worst
    }

    #[test]
    fn dhv_high_246_closed_form() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        let rv = static_priority(&net, &CornerSpec { lowest: vec![0, 4, 2] }).unwrap();
        let data = reflection(&net, &rv).unwrap();
        let r = data.r.as_ref().unwrap();
        let expected = Matrix::from_rows(&[
            vec![0.5, 0.5, -0.5],
            vec![-1.0, 1.0, 0.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap();
        assert!(max_abs_diff(r, &expected) < 1e-12);
        let theta = data.theta.as_ref().unwrap();
        assert!((theta[0] - (-0.0945)).abs() < 1e-12);
        assert!(theta[1].abs() < 1e-12);
        assert!(theta[2].abs() < 1e-12);
        assert!((data.det_r.unwrap() - 0.5).abs() < 1e-12);
        // inverse closed form from the same corner
        let rinv_expected = Matrix::from_rows(&[
            vec![0.5, 0.5, -0.5],
            vec![-1.0, 1.0, 0.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap()
        .invert()
        .unwrap();
        assert!(max_abs_diff(&data.rinv, &rinv_expected) < 1e-12);
    }

    #[test]
    fn dhv_high_246_principal_slices() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        let rv = static_priority(&net, &CornerSpec { lowest: vec![0, 4, 2] }).unwrap();
        let r = reflection(&net, &rv).unwrap().r.unwrap();
        let s = r.principal_submatrix(&[1, 2]).unwrap();
        assert_eq!(s.row(0), &[1.0, 0.0]);
        assert_eq!(s.row(1), &[-1.0, 1.0]);
        let slice = r.submatrix(&[0], &[1, 2]).unwrap();
        assert_eq!(slice.row(0), &[0.5, -0.5]);
    }

    #[test]
    fn lu_kumar_high_12_closed_form() {
        let m = [0.6, 0.4, 0.6, 0.4];
        let net = build_lu_kumar(&m, 0.9).unwrap();
        // high {1,2} -> lowest {4,3}
        let rv = static_priority(&net, &CornerSpec { lowest: vec![3, 2] }).unwrap();
        let data = reflection(&net, &rv).unwrap();
        let r = data.r.as_ref().unwrap();
        let ratio = m[3] / m[2];
        assert!((r[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((r[(0, 1)] + ratio).abs() < 1e-12);
        assert!(r[(1, 0)].abs() < 1e-12);
        assert!((r[(1, 1)] - 1.0).abs() < 1e-12);
        let theta = data.theta.as_ref().unwrap();
        let a = 0.9 - 1.0;
        assert!((theta[0] - a * (1.0 - ratio)).abs() < 1e-12);
        assert!((theta[1] - a).abs() < 1e-12);
    }

    #[test]
    fn scalar_single_station() {
        let net = NetworkPrimitives::new(
            1,
            vec![0],
            vec![0.25],
            Matrix::zeros(1, 1),
            vec![2.0],
        )
        .unwrap();
        let rv = RatioVector::new(&net, vec![4.0]).unwrap();
        let data = reflection(&net, &rv).unwrap();
        assert!((data.rinv[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((data.r.as_ref().unwrap()[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((data.theta.as_ref().unwrap()[0] - (0.5 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn combination_beta_table1_values() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        // high {1,2,3} (det 1) -> lowest {4,5,6}; high {4,2,3} (det m1) -> lowest {1,5,6}
        let d1 = static_priority(&net, &CornerSpec { lowest: vec![3, 4, 5] }).unwrap();
        let d2 = static_priority(&net, &CornerSpec { lowest: vec![0, 4, 5] }).unwrap();
        let (beta, combined) = combination_coefficient(&net, &d1, &d2, 0.5).unwrap();
        assert!((beta - 1.0 / 3.0).abs() < 1e-12);
        let d3 = convex_combine(&net, &d1, &d2, 0.5).unwrap();
        let direct = reflection(&net, &d3).unwrap().r.unwrap();
        assert!(max_abs_diff(&combined, &direct) < 1e-10);
    }

    #[test]
    fn combination_degenerate_cases() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        let d1 = static_priority(&net, &CornerSpec { lowest: vec![3, 4, 5] }).unwrap();
        let d2 = static_priority(&net, &CornerSpec { lowest: vec![0, 4, 5] }).unwrap();
        let (beta, combined) = combination_coefficient(&net, &d1, &d2, 0.0).unwrap();
        assert_eq!(beta, 0.0);
        let r2 = reflection(&net, &d2).unwrap().r.unwrap();
        assert!(max_abs_diff(&combined, &r2) < 1e-12);
        // identical endpoints: beta = lambda, R3 = R1
        let (beta, combined) = combination_coefficient(&net, &d1, &d1, 0.3).unwrap();
        assert!((beta - 0.3).abs() < 1e-12);
        let r1 = reflection(&net, &d1).unwrap().r.unwrap();
        assert!(max_abs_diff(&combined, &r1) < 1e-12);
    }

    #[test]
    fn non_neighbors_rejected() {
        let net = build_dhv(&[0.5; 6], 0.811).unwrap();
        let d1 = static_priority(&net, &CornerSpec { lowest: vec![0, 1, 2] }).unwrap();
        let d2 = static_priority(&net, &CornerSpec { lowest: vec![3, 4, 2] }).unwrap();
        assert!(matches!(
            combination_coefficient(&net, &d1, &d2, 0.5),
            Err(ReflectionError::NotNeighbors)
        ));
    }
}
