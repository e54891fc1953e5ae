use recsum::pipeline::{theorem1_constant, theorem2_solve};
use recsum::{Certificate, CertifiedReal, PrecisionPolicy, ProblemSpec};

#[test]
fn pipeline_certificate_round_trips_and_rejects_tampering() {
    let sol = theorem2_solve().unwrap_or_else(|f| panic!("{f}"));
    let cert = Certificate::new("solve-fib23", &PrecisionPolicy::default(), Some(ProblemSpec::fibonacci_2_3()), sol.ledger)
        .with_solutions(sol.solutions);
    let text = cert.to_json();
    // expressions round-trip through their text form, so compare text
    let back = Certificate::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
    assert_eq!(back.solutions, cert.solutions);
    back.validate().unwrap();

    // claim a smaller final bound than the reductions support
    let step = back.ledger.step("index_bound").unwrap();
    let n = step.integer().unwrap().to_string();
    let needle = format!("\"statement\": \"n_1 <= {n}\"");
    assert!(text.contains(&needle));
    let mut bad = Certificate::from_json(&text).unwrap();
    let idx = bad.ledger.steps.iter().position(|s| s.name == "index_bound").unwrap();
    bad.ledger.steps[idx].output = recsum::pipeline::StepOutput::Integer(100.into());
    assert!(bad.validate().is_err());

    // a solution that does not satisfy the equation
    let mut bad = Certificate::from_json(&text).unwrap();
    bad.solutions[0].z2 += 1;
    assert!(bad.validate().is_err());
}

#[test]
fn theorem1_certificate_round_trips() {
    let spec = ProblemSpec::fibonacci_2_3();
    let (_, ledger) = theorem1_constant::<CertifiedReal>(&spec).unwrap();
    let cert = Certificate::new("bound-chain", &PrecisionPolicy::default(), Some(spec), ledger);
    let text = cert.to_json();
    let back = Certificate::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
    back.validate().unwrap();

    let (_, ledger) = theorem1_constant::<f64>(&ProblemSpec::fibonacci_2_3()).unwrap();
    let cert = Certificate::new("bound-chain", &PrecisionPolicy::default(), None, ledger);
    Certificate::from_json(&cert.to_json()).unwrap().validate().unwrap();
}
