use super::*;

#[test]
fn shooting_profile_properties() {
    let p = ground_state().unwrap();
    let q0 = p.center_value();
    assert!(q0 > 2.0 && q0 < 2.3, "Q(0) = {q0}");
    assert!((p.l2_norm_sq - 11.70).abs() < 0.01, "mass {}", p.l2_norm_sq);
    assert!(p.values.windows(2).all(|w| w[1] < w[0]));
    assert!(p.values.iter().all(|&v| v > 0.0));
    assert!(*p.values.last().unwrap() <= 1e-10 * q0);
    assert!(p.residual() <= 1e-6 * q0, "residual {}", p.residual());
}

#[test]
fn tolerance_range_is_enforced() {
    assert!(solve_ground_state(1e-3).is_err());
    assert!(solve_ground_state(1e-13).is_err());
}

#[test]
fn mass_is_stable_under_tolerance_refinement() {
    let coarse = solve_ground_state(1e-9).unwrap();
    let fine = ground_state().unwrap();
    assert!((coarse.l2_norm_sq - fine.l2_norm_sq).abs() <= 1e-6 * fine.l2_norm_sq);
}

#[test]
fn bessel_k0_reference_values() {
    // K_0(1) and K_0(5) to 10 digits.
    assert!((bessel_k0(1.0) - 0.421_024_438_2).abs() < 1e-9);
    assert!((bessel_k0(5.0) - 3.691_098_334e-3).abs() < 1e-11);
    let h = 1e-5;
    let fd = (bessel_k0(3.0 + h) - bessel_k0(3.0 - h)) / (2.0 * h);
    assert!((fd - bessel_k0_derivative(3.0)).abs() < 1e-8);
}

#[test]
fn interpolation_hits_mesh_values() {
    let p = ground_state().unwrap();
    for i in [0, 10, 333, 1200] {
        assert!((p.value_at(p.radii[i]) - p.values[i]).abs() < 1e-14);
    }
    assert_eq!(p.value_at(1e3), 0.0);
}

#[test]
fn profile_csv_round_trip() {
    let p = ground_state().unwrap();
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(b"r,Q\n"));
    let rows = RadialProfile::read_csv(&buf[..]).unwrap();
    assert_eq!(rows.len(), p.radii.len());
    assert_eq!(rows[17], (p.radii[17], p.values[17]));
}

#[test]
fn gn_examples() {
    let g = GridSpec::new(64, 30.0).unwrap();
    let z = gn_check(&Field2D::zeros(
        g,
        crate::spectral::Representation::Physical,
    ))
    .unwrap();
    assert_eq!((z.lhs, z.rhs, z.ratio), (0.0, 0.0, 0.0));
    let q = ground_state()
        .unwrap()
        .to_field(GridSpec::new(128, 30.0).unwrap());
    let r = gn_check(&q).unwrap();
    assert!(
        r.ratio >= 0.999 && r.ratio <= 1.0 + 1e-6,
        "ratio {}",
        r.ratio
    );
}

#[test]
fn threshold_examples() {
    let g = GridSpec::new(128, 30.0).unwrap();
    let q = ground_state().unwrap().to_field(g);
    let quarter = with_mass(&q, 0.25 * townes_mass().unwrap());
    let c = mass_threshold_check(&quarter).unwrap();
    assert_eq!(c.class, MassClass::Below);
    assert!((c.margin - 0.75).abs() < 1e-12);
    let c = mass_threshold_check(&q).unwrap();
    assert_eq!(c.class, MassClass::AtOrAbove);
}

#[test]
fn variational_oracle_agrees_with_shooting() {
    let g = GridSpec::new(256, 40.0).unwrap();
    let v = variational_ground_state(g).unwrap();
    let p = ground_state().unwrap();
    assert!((v.l2_norm_sq - p.l2_norm_sq).abs() <= 1e-3 * p.l2_norm_sq);
    assert!((v.mu - 1.0).abs() < 1e-8);
    assert!(v.residual <= 1e-4);
    // Radial symmetry: the grid solution matches the radial profile pointwise.
    let radial = p.to_field(g);
    let dev = v.field.sub(&radial).unwrap().physical().max_abs();
    assert!(dev <= 1e-4 * p.center_value(), "deviation {dev:e}");
}
