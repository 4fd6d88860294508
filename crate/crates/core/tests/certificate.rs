use oklab::degeneration::{gluing_certificate, shrink_box, GluingOptions};
use oklab::moment::MomentModel;
use oklab::order::separating_weight;
use oklab::sections::{eliminate, CoordinateChange, ModelSpec};
use oklab::OrderSpec;

#[test]
fn conic_flag_certificate() {
    let m = ModelSpec::projective_space(2, 2).unwrap().with_flag(CoordinateChange::conic()).unwrap();
    let a = eliminate(&OrderSpec::Lex, &m.sections(1).unwrap()).unwrap();
    let gamma = separating_weight(a.order(), a.exponents()).unwrap();
    let model = MomentModel::new(a.exponents()).unwrap();
    let u = shrink_box(&model, 0.8).unwrap();
    let k = shrink_box(&model, 0.95).unwrap();
    let opts = GluingOptions { delta: 1e-2, per_axis: 64, tau_start: None };
    let cert = gluing_certificate(&a, &gamma, &u, &k, &opts).unwrap();
    println!("{cert}");
    assert!(cert.sign_stable());
    assert!(cert.evidence.min_eig_glued > 0.0);
}
