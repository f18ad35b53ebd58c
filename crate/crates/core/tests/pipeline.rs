use std::sync::Arc;

use emint_core::combinatorics::expected_j_oracle;
use emint_core::descriptor::{kernel_hash, KernelDescriptor, SpaceDescriptor};
use emint_core::integral::{eval_j_descaled, PreparedKernel};
use emint_core::montecarlo::{estimate_tail, McConfig, Target};
use emint_core::report::tails_csv;
use emint_core::verify::{run_verify, Scale, SuiteResult, VerifyConfig, VerifyReport};
use emint_core::{AtomSpace, Execution, Kernel, RandomSource, Rational, Scalar};

fn descriptors() -> (SpaceDescriptor, KernelDescriptor) {
    let space: SpaceDescriptor =
        serde_json::from_str(r#"{"weights": ["1/4", 0.25, "1/2"], "labels": ["x", "y", "z"]}"#)
            .unwrap();
    let kernel: KernelDescriptor = serde_json::from_str(
        r#"{"arity": 2, "values": [1, "-1/2", 0, "-1/2", 0.75, "1/3", 0, "1/3", -1]}"#,
    )
    .unwrap();
    (space, kernel)
}

#[test]
fn exact_and_float_pipelines_agree() {
    let (sd, kd) = descriptors();
    let exact_space = Arc::new(sd.build::<Rational>().unwrap());
    let float_space = Arc::new(sd.build::<f64>().unwrap());
    let fe = kd.build(exact_space.clone()).unwrap();
    let ff = kd.build(float_space).unwrap();
    assert_eq!(kernel_hash(&fe), kernel_hash(&fe.clone()));

    let source = RandomSource::new(42);
    let pe = PreparedKernel::new(&fe);
    let pf = PreparedKernel::new(&ff);
    for r in 0..200 {
        let s = source.sample(exact_space.as_ref(), 7, r).unwrap();
        let je = pe.eval_j(&s).unwrap().coeff.to_f64();
        let jf = pf.eval_j(&s).unwrap().coeff;
        assert!((je - jf).abs() < 1e-12, "replicate {r}: {je} vs {jf}");
        assert_eq!(
            pe.eval_j(&s).unwrap().coeff,
            eval_j_descaled(&fe, &s).unwrap().coeff
        );
    }
}

#[test]
fn expectation_vanishes_for_canonical_kernels() {
    let (sd, kd) = descriptors();
    let space = Arc::new(sd.build::<Rational>().unwrap());
    let f = kd.build(space).unwrap().canonical_project();
    for n in 1..=4 {
        assert!(expected_j_oracle(&f, n, 1_000_000).unwrap() == Rational::from_i64(0));
    }
}

#[test]
fn strategies_give_identical_artifacts() {
    let cfg = VerifyConfig::new(3, Scale::Quick);
    let seq = run_verify(&cfg, Execution::Sequential).unwrap();
    let par = run_verify(&cfg, Execution::Parallel).unwrap();
    assert_eq!(
        serde_json::to_string(&seq).unwrap(),
        serde_json::to_string(&par).unwrap()
    );

    let space = Arc::new(AtomSpace::<f64>::uniform(3).unwrap());
    let f = Kernel::from_fn(
        space,
        vec![1, 2],
        |a| if a[0] == a[1] { 0.5 } else { -0.25 },
    )
    .unwrap();
    for target in [Target::J, Target::DescaledU] {
        let mc = McConfig::new(3000, 8, 12).with_target(target);
        let a = estimate_tail(&f, &mc, Execution::Sequential).unwrap();
        let b = estimate_tail(&f, &mc, Execution::Parallel).unwrap();
        let nan = vec![f64::NAN; a.x_grid.len()];
        assert_eq!(tails_csv(&a, &nan, &nan), tails_csv(&b, &nan, &nan));
    }
}

#[test]
fn report_round_trips_and_reports_first_failure() {
    let report = run_verify(&VerifyConfig::new(1, Scale::Quick), Execution::Parallel).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: VerifyReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.exit_code(), 0);

    let failing = |code: i32| SuiteResult {
        code,
        name: format!("s{code}"),
        checks: 1,
        failures: 1,
        worst: 1.0,
        details: serde_json::Value::Null,
    };
    let mut broken = report.clone();
    broken.suites[3] = failing(13);
    broken.suites[5] = failing(15);
    assert_eq!(broken.exit_code(), 13);
}

#[test]
fn descriptor_round_trip_preserves_hash() {
    let (sd, kd) = descriptors();
    let space = Arc::new(sd.build::<Rational>().unwrap());
    let f = kd.build(space.clone()).unwrap();
    let sd2 = SpaceDescriptor::from_space(space.as_ref());
    let kd2 = KernelDescriptor::from_kernel(&f);
    let space2 = Arc::new(sd2.build::<Rational>().unwrap());
    let f2 = kd2.build(space2).unwrap();
    assert_eq!(kernel_hash(&f), kernel_hash(&f2));
    assert_ne!(
        kernel_hash(&f),
        kernel_hash(&f.scale(&Rational::from_i64(2)))
    );
}
