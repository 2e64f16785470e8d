use std::f64::consts::PI;

use crate::error::{Error, Result};

fn vt_of(t: f64, v: f64) -> Result<f64> {
    let vt = v * t;
    if !(vt > 0.0 && vt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need v t > 0, got v={v}, t={t}"
        )));
    }
    Ok(vt)
}

/// Projection onto a diameter of the one-collision density.
pub fn rho_proj1(x: f64, t: f64, v: f64) -> Result<f64> {
    let vt = vt_of(t, v)?;
    if x.abs() > vt {
        return Err(Error::OutOfSupport { x, extent: vt });
    }
    let y = x / vt;
    if y.abs() == 1.0 {
        return Ok(0.0);
    }
    Ok((0.5 * (1.0 + y) * ((1.0 - y) / (1.0 + y)).ln() + (2.0 / (1.0 - y)).ln()) / vt)
}

/// d/dx of [`rho_proj1`].
pub fn rho_proj1_slope(x: f64, t: f64, v: f64) -> Result<f64> {
    let vt = vt_of(t, v)?;
    if x.abs() >= vt {
        return Err(Error::OutOfSupport { x, extent: vt });
    }
    Ok(((vt - x) / (vt + x)).ln() / (2.0 * vt * vt))
}

/// One-collision density as a function of radius, normalized on the ball.
pub fn rho1_i(r: f64, t: f64, v: f64) -> Result<f64> {
    let vt = vt_of(t, v)?;
    if r < 0.0 || r > vt {
        return Err(Error::OutOfSupport { x: r, extent: vt });
    }
    if r == vt {
        return Err(Error::Divergent(vt));
    }
    let y = r / vt;
    if y == 0.0 {
        return Ok(1.0 / (2.0 * PI * vt.powi(3)));
    }
    // ln((1+y)/(1-y)) = 2 atanh(y)
    Ok(2.0 * y.atanh() / (4.0 * PI * vt * vt * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_with;
    use proptest::prelude::*;

    #[test]
    fn centre_values() {
        assert!((rho_proj1(0.0, 2.0, 1.5).unwrap() - std::f64::consts::LN_2 / 3.0).abs() < 1e-15);
        assert!((rho1_i(0.0, 1.0, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let near = rho1_i(1e-9, 1.0, 1.0).unwrap();
        assert!((near - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!((rho1_i(0.5, 1.0, 1.0).unwrap() - 3f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!((rho1_i(0.5, 1.0, 1.0).unwrap() - 0.17485).abs() < 5e-6);
    }

    #[test]
    fn edges() {
        assert!(matches!(rho1_i(1.0, 1.0, 1.0), Err(Error::Divergent(_))));
        assert!(matches!(
            rho1_i(1.2, 1.0, 1.0),
            Err(Error::OutOfSupport { .. })
        ));
        assert!(matches!(
            rho_proj1(1.2, 1.0, 1.0),
            Err(Error::OutOfSupport { .. })
        ));
        assert_eq!(rho_proj1(1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(rho_proj1(-1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(rho_proj1(1.0 - 1e-12, 1.0, 1.0).unwrap() < 1e-10);
        assert_eq!(rho_proj1_slope(0.0, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn normalized() {
        let p = integrate_with(
            |x| rho_proj1(x, 1.0, 1.0).unwrap(),
            -1.0,
            1.0,
            &[0.0],
            1e-13,
            1e-13,
        )
        .unwrap();
        assert!((p.value - 1.0).abs() < 1e-10);
        let r = integrate_with(
            |r| 4.0 * PI * r * r * rho1_i(r, 2.0, 0.5).unwrap(),
            0.0,
            1.0,
            &[],
            1e-13,
            1e-13,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn symmetric(y in -0.999f64..0.999, vt in 0.1f64..10.0) {
            let a = rho_proj1(y * vt, vt, 1.0).unwrap();
            let b = rho_proj1(-y * vt, vt, 1.0).unwrap();
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a));
        }

        #[test]
        fn slope_matches_difference(y in -0.9f64..0.9) {
            let h = 1e-6;
            let fd = (rho_proj1(y + h, 1.0, 1.0).unwrap() - rho_proj1(y - h, 1.0, 1.0).unwrap()) / (2.0 * h);
            prop_assert!((fd - rho_proj1_slope(y, 1.0, 1.0).unwrap()).abs() < 1e-6);
        }
    }
}
