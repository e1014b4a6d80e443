use super::{GraphError, Position};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Distance in meters between two positions of the same frame.
///
/// Planar positions use the Euclidean norm; geodetic positions use the
/// haversine great-circle distance.
pub fn spatial_distance(a: &Position, b: &Position) -> Result<f64, GraphError> {
    match (*a, *b) {
        (Position::Planar { x: x1, y: y1 }, Position::Planar { x: x2, y: y2 }) => Ok((x1 - x2).hypot(y1 - y2)),
        (Position::Geodetic { lat: la1, lon: lo1 }, Position::Geodetic { lat: la2, lon: lo2 }) => {
            let (p1, p2) = (la1.to_radians(), la2.to_radians());
            let dp = p2 - p1;
            let dl = (lo2 - lo1).to_radians();
            let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
            Ok(2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin())
        }
        _ => Err(GraphError::FrameMismatch(a.frame(), b.frame())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Position {
        Position::Planar { x, y }
    }

    #[test]
    fn three_four_five() {
        assert_eq!(spatial_distance(&p(0.0, 0.0), &p(3.0, 4.0)).unwrap(), 5.0);
    }

    #[test]
    fn geodetic_identity_and_small_offset() {
        let a = Position::Geodetic { lat: 37.8719, lon: -122.2585 };
        assert_eq!(spatial_distance(&a, &a).unwrap(), 0.0);

        // Independent route: arc length along a meridian is R * dphi.
        let expected = EARTH_RADIUS_M * 0.001_f64.to_radians();
        assert!((expected - 111.19508).abs() < 1e-4);
        let b = Position::Geodetic { lat: 10.0, lon: 20.0 };
        let c = Position::Geodetic { lat: 10.001, lon: 20.0 };
        let d = spatial_distance(&b, &c).unwrap();
        assert!((d - expected).abs() < 1e-6, "{d} vs {expected}");
    }

    #[test]
    fn mixed_frames_rejected() {
        let g = Position::Geodetic { lat: 0.0, lon: 0.0 };
        assert!(matches!(spatial_distance(&p(0.0, 0.0), &g), Err(GraphError::FrameMismatch(..))));
    }

    proptest! {
        #[test]
        fn planar_is_a_metric(
            a in (-1e3..1e3f64, -1e3..1e3f64),
            b in (-1e3..1e3f64, -1e3..1e3f64),
            c in (-1e3..1e3f64, -1e3..1e3f64),
        ) {
            let (a, b, c) = (p(a.0, a.1), p(b.0, b.1), p(c.0, c.1));
            let ab = spatial_distance(&a, &b).unwrap();
            let ba = spatial_distance(&b, &a).unwrap();
            let bc = spatial_distance(&b, &c).unwrap();
            let ac = spatial_distance(&a, &c).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(spatial_distance(&a, &a).unwrap(), 0.0);
            prop_assert!(ac <= ab + bc + 1e-9);
            if a != b {
                prop_assert!(ab > 0.0);
            }
        }
    }
}
