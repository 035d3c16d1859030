use resonance_core::poly::parse_rational;
use resonance_core::radial::{find_first_resonance_general, RadialPotential};
use resonance_core::report::Classification;
use resonance_core::variational::{comparison_bound, dominated_by, variational_report};
use resonance_core::wronskian::bracket_first_zero;

/// `(j_{0,1} / 2)²`: for `V = e^{-r}` in three dimensions the zero-energy
/// solution is `J_0(2√κ e^{-r/2})`.
const EXPONENTIAL_KAPPA: f64 = 1.445_796_491_125_649;

fn volterra(v: &RadialPotential, n: u32) -> f64 {
    find_first_resonance_general(v, n, 20.0, 1e-10)
        .unwrap()
        .report()
        .unwrap()
        .estimate()
}

#[test]
fn exponential_matches_bessel_zero() {
    assert!((volterra(&RadialPotential::Exponential, 3) - EXPONENTIAL_KAPPA).abs() < 1e-6);
    let var = variational_report(&RadialPotential::Exponential, 3, 512, 4).unwrap();
    assert!(var.kappa_star.hi() >= EXPONENTIAL_KAPPA);
    assert!(var.kappa_star.hi() - EXPONENTIAL_KAPPA < 1e-4);
}

#[test]
fn dominating_pair_orders_couplings() {
    let y = RadialPotential::Yukawa;
    let e = RadialPotential::Exponential;
    let lower = RadialPotential::min(y.clone(), e.clone());
    let upper = RadialPotential::max(y.clone(), e.clone());
    let (ky, ke) = (volterra(&y, 3), volterra(&e, 3));
    let (kl, ku) = (volterra(&lower, 3), volterra(&upper, 3));
    assert!(ku <= ke.min(ky));
    assert!(kl >= ke.max(ky));
}

#[test]
fn comparison_bound_holds_for_dominated_potential() {
    let v = RadialPotential::min(RadialPotential::Yukawa, RadialPotential::Exponential);
    assert!(dominated_by(&v, &RadialPotential::Yukawa, 1.0, 500));
    let reference = bracket_first_zero(
        &parse_rational("1.67626").unwrap(),
        &parse_rational("1.68742").unwrap(),
        0.012,
    )
    .unwrap()
    .enclosure;
    let bound = comparison_bound(reference, 1.0).unwrap();
    assert!(volterra(&v, 3) >= bound);
    let doubled = RadialPotential::scaled(2.0, RadialPotential::Yukawa).unwrap();
    assert!(volterra(&doubled, 3) >= comparison_bound(reference, 2.0).unwrap());
}

#[test]
fn higher_dimensions_need_more_coupling() {
    let mut prev = 0.0;
    for n in 3..=6 {
        let k = volterra(&RadialPotential::Yukawa, n);
        assert!(k > prev);
        prev = k;
        let var = variational_report(&RadialPotential::Yukawa, n, 256, 3).unwrap();
        assert!((var.kappa_star.hi() - k).abs() < 1e-3 * k, "n={n}");
        let expected = if n <= 4 {
            Classification::ResonanceNotL2
        } else {
            Classification::EigenstateL2
        };
        assert_eq!(var.classification.classification, expected);
    }
}

/// `r^{-2}` on `[0.1, 10]`: `κ = 1/4 + μ²` with `μ ln 100 = 2 arctan(1/(2μ))`.
const TRUNCATED_HARDY_KAPPA: f64 = 0.404_390_041_327_289_2;

#[test]
fn truncated_hardy_matches_closed_form() {
    let v = RadialPotential::truncated_hardy(0.1).unwrap();
    let report = find_first_resonance_general(&v, 3, 20.0, 1e-10).unwrap();
    let report = report.report().unwrap();
    assert!(
        report.kappa_star.contains(TRUNCATED_HARDY_KAPPA),
        "{}",
        report.kappa_star
    );
    let var = variational_report(&v, 3, 512, 4).unwrap();
    assert!(var.kappa_star.hi() >= TRUNCATED_HARDY_KAPPA);
    assert!(var.kappa_star.hi() - TRUNCATED_HARDY_KAPPA < 1e-5);
}
