use cofinitary::{run, verify_transcript, Error, RunConfig, Transcript, WordSource};

fn small() -> RunConfig {
    RunConfig {
        group: "swap".into(),
        words: WordSource::List(vec!["X".into(), "tau X".into(), "X^-1 tau X".into()]),
        code_length: 8,
        targets: vec!["zeta".into()],
        hits_per_target: 3,
        budget: 120,
        ..RunConfig::default()
    }
}

fn failures(t: &Transcript) -> Vec<String> {
    verify_transcript(t).failures().map(|c| c.name.clone()).collect()
}

#[test]
fn runs_verify_and_round_trip() {
    let t = run(&small()).unwrap();
    assert!(verify_transcript(&t).passed(), "{}", verify_transcript(&t));
    let back = Transcript::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.to_json(), t.to_json());
    assert_eq!(t.uncodable, vec!["X^-1 tau X".to_string()]);
    assert_eq!(t.certificates.len(), 2);
    assert_eq!(t.hits.len(), 3);
}

#[test]
fn dropping_a_pair_is_caught() {
    let mut t = run(&small()).unwrap();
    let step = t
        .steps
        .iter_mut()
        .skip(20)
        .find(|s| !s.delta.s.is_empty())
        .unwrap();
    step.delta.s.pop();
    assert!(!failures(&t).is_empty());
}

#[test]
fn changed_certificate_is_caught() {
    let mut t = run(&small()).unwrap();
    t.certificates[0].parameter += 2;
    let failed = failures(&t);
    assert!(
        failed.iter().any(|name| name.starts_with("certificate")),
        "{failed:?}"
    );
}

#[test]
fn changed_final_condition_is_caught() {
    let mut t = run(&small()).unwrap();
    t.final_condition.s.pop();
    assert!(failures(&t).contains(&"final".to_string()));
}

#[test]
fn changed_config_is_caught() {
    let mut t = run(&small()).unwrap();
    t.config.budget += 1;
    assert!(!failures(&t).is_empty());
}

#[test]
fn forged_witnesses_are_caught() {
    let mut t = run(&small()).unwrap();
    t.hits[0].n += 1;
    assert!(failures(&t).iter().any(|name| name.starts_with("hit")));

    let mut t = run(&small()).unwrap();
    t.uncodable.push("X".into());
    assert!(failures(&t).iter().any(|name| name.starts_with("uncodable")));
}

#[test]
fn group_words_are_rejected_up_front() {
    let config = RunConfig {
        words: WordSource::List(vec!["tau".into()]),
        ..small()
    };
    assert!(matches!(run(&config), Err(Error::Config(_))));
}

#[test]
fn plain_runs_have_no_stream() {
    let config = RunConfig { z: None, ..small() };
    let t = run(&config).unwrap();
    assert!(t.certificates.is_empty() && t.uncodable.is_empty());
    assert!(t.to_json().contains("\"z\": null"));
    assert!(verify_transcript(&t).passed());
}
