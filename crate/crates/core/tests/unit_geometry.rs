use satshare::geometry::*;

fn spec(n: u32, reuse: u32) -> FootprintSpec {
    FootprintSpec {
        n_cells: n,
        reuse_factor: reuse,
        cell_spacing_km: 250.0,
        altitude_km: 35786.0,
        earth: EarthModel::default(),
    }
}

#[test]
fn center_user_has_zero_angle() {
    let e = EarthModel::default();
    assert_eq!(deviation_angle(36000.0, 36000.0, 0.0, &e).unwrap(), 0.0);
    for d in [1.0, 500.0, 36000.0, 1e6] {
        assert_eq!(deviation_angle(d, d, 0.0, &e).unwrap(), 0.0);
    }
}

#[test]
fn symmetric_in_satellite_distances() {
    let e = EarthModel::default();
    let a = deviation_angle(36000.0, 36010.0, 120.0, &e).unwrap();
    let b = deviation_angle(36010.0, 36000.0, 120.0, &e).unwrap();
    assert_eq!(a, b);
}

#[test]
fn inconsistent_geometry_is_domain_error() {
    let e = EarthModel::default();
    // 100 km apart on the ground but 10000 km apart in slant range
    let err = deviation_angle(36000.0, 46000.0, 100.0, &e).unwrap_err();
    assert!(matches!(err, GeometryError::Domain { .. }));
    assert!(deviation_angle(0.0, 1.0, 0.0, &e).is_err());
    assert!(EarthModel::new(-1.0).is_err());
}

#[test]
fn continuity_in_ground_distance() {
    let e = EarthModel::default();
    for d in [0.0, 1.0, 50.0, 300.0] {
        let a = deviation_angle(36000.0, 36000.0, d, &e).unwrap();
        let b = deviation_angle(36000.0, 36000.0, d + 1e-6, &e).unwrap();
        assert!((a - b).abs() < 1e-8, "jump at {d}: {a} vs {b}");
    }
}

#[test]
fn single_cell_footprint() {
    let cells = build_footprint(&spec(1, 3), 9).unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(co_channel_cells(&cells, &cells[0]).count(), 0);
    assert!((cells[0].d_o_s - 35786.0).abs() < 1e-9);
}

#[test]
fn reuse_seven_on_seven_cells_has_no_co_channel_pairs() {
    let cells = build_footprint(&spec(7, 7), 1).unwrap();
    let mut colors: Vec<_> = cells.iter().map(|c| c.color).collect();
    colors.sort();
    colors.dedup();
    assert_eq!(colors.len(), 7);
    for c in &cells {
        assert_eq!(co_channel_cells(&cells, c).count(), 0);
    }
}

#[test]
fn reuse_one_makes_every_pair_co_channel() {
    let cells = build_footprint(&spec(7, 1), 1).unwrap();
    assert_eq!(co_channel_cells(&cells, &cells[0]).count(), 6);
}

#[test]
fn adjacent_cells_never_share_a_band() {
    for reuse in [3, 4, 7] {
        let cells = build_footprint(&spec(37, reuse), 5).unwrap();
        for a in &cells {
            for b in &cells {
                let dist = a.center.arc_to(&b.center);
                if a.cell_id != b.cell_id && dist < 250.0 * 1.01 {
                    assert_ne!(
                        a.color, b.color,
                        "reuse {reuse}: {} {}",
                        a.cell_id, b.cell_id
                    );
                }
            }
        }
        let mut colors: Vec<_> = cells.iter().map(|c| c.color.0).collect();
        colors.sort();
        colors.dedup();
        assert_eq!(colors.len() as u32, reuse);
    }
}

#[test]
fn co_channel_relation_symmetric_irreflexive() {
    let cells = build_footprint(&spec(19, 3), 2).unwrap();
    for a in &cells {
        assert!(!a.is_co_channel(a));
        for b in &cells {
            assert_eq!(a.is_co_channel(b), b.is_co_channel(a));
        }
    }
}

#[test]
fn layout_is_deterministic_per_seed() {
    let a = build_footprint(&spec(19, 7), 42).unwrap();
    let b = build_footprint(&spec(19, 7), 42).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unsupported_reuse_rejected() {
    assert_eq!(
        build_footprint(&spec(7, 5), 0).unwrap_err(),
        GeometryError::UnsupportedReuse(5)
    );
    assert_eq!(
        build_footprint(&spec(0, 1), 0).unwrap_err(),
        GeometryError::NoCells
    );
}

#[test]
fn slant_range_not_below_altitude() {
    let cells = build_footprint(&spec(19, 3), 3).unwrap();
    for c in &cells {
        assert!(c.d_o_s >= 35786.0);
    }
}

#[test]
fn placed_user_is_consistent_with_its_cell() {
    let e = EarthModel::default();
    let cells = build_footprint(&spec(7, 3), 3).unwrap();
    let u = UserPosition::place(
        "u1",
        &cells[3],
        ArcPosition {
            east_km: 30.0,
            north_km: -40.0,
        },
        &e,
        35786.0,
    )
    .unwrap();
    assert!((u.d_mn_o - 50.0).abs() < 1e-12);
    let theta = user_deviation_angle(&cells[3], &u, &e).unwrap();
    assert!(theta > 0.0 && theta < 0.01);
}
