mod common;

use std::sync::Arc;

use common::*;
use nlkg_core::evolution::{evolve_state, EvolConfig, EvolState, Geometry};
use nlkg_core::exec::Exec;
use nlkg_core::field::{BoxField, BoxGrid, NonlinearityModel, PowerTerm};
use nlkg_core::functionals::StatePair;
use nlkg_core::io::*;
use nlkg_core::NlkgError;
use rand::Rng;

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn radial_snapshot_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = seeded(3);
    let g = grid(3, 20.0, 777);
    let u0 = random_field(&mut rng, g.clone());
    let u1 = random_field(&mut rng, g);
    let s = StatePair::new(u0, u1).unwrap();
    let path = dir.path().join("state.nlkg");
    Snapshot::from_state_pair(&s).write(&path).unwrap();
    let back = Snapshot::read(&path).unwrap().to_state_pair().unwrap();
    assert_eq!(bits(back.u0.values()), bits(s.u0.values()));
    assert_eq!(bits(back.u1.values()), bits(s.u1.values()));
    assert_eq!(back.u0.grid(), s.u0.grid());

    let one = Snapshot::from_radial(&s.u0);
    let back = Snapshot::from_bytes(&one.to_bytes()).unwrap();
    assert_eq!(back, one);
    assert_eq!(bits(back.to_radial().unwrap().values()), bits(s.u0.values()));
    assert_eq!(&one.to_bytes()[..5], MAGIC);
}

#[test]
fn box_and_line_snapshots_round_trip() {
    let mut rng = seeded(4);
    let g = Arc::new(BoxGrid::new(2, 16, 10.0).unwrap());
    let vals: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let u = BoxField::new(g, vals.clone()).unwrap();
    let snap = Snapshot::from_box(&u);
    let back = Snapshot::from_bytes(&snap.to_bytes()).unwrap();
    assert_eq!(back.kind, GridKind::Box);
    assert_eq!(bits(&back.components[0]), bits(&vals));

    // Resuming a radial run from its final state.
    let model = model_3d();
    let s0 = StatePair::at_rest(gaussian(grid(3, 16.0, 4096), 0.5, 1.5));
    let state = EvolState::from_state_pair(Geometry::radial3(16.0, 256).unwrap(), &s0, Exec::Sequential).unwrap();
    let cfg = EvolConfig { checkpoints: 2, exec: Exec::Sequential, ..EvolConfig::reference(0.5) };
    let (_, fin) = evolve_state(state, &model, &cfg).unwrap();
    let snap = Snapshot::from_evol_state(&fin);
    assert_eq!(snap.kind, GridKind::Line);
    let decoded = Snapshot::from_bytes(&snap.to_bytes()).unwrap();
    assert_eq!(decoded.to_bytes(), snap.to_bytes());
    let again = decoded.to_evol_state(None, Exec::Sequential).unwrap();
    assert_eq!(bits(again.w()), bits(fin.w()));
}

#[test]
fn corrupt_snapshots_are_rejected() {
    let snap = Snapshot::from_radial(&gaussian(grid(1, 5.0, 16), 1.0, 1.0));
    let good = snap.to_bytes();
    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(matches!(Snapshot::from_bytes(&bad), Err(NlkgError::Parse(_))));
    assert!(matches!(Snapshot::from_bytes(&good[..good.len() - 3]), Err(NlkgError::Parse(_))));
    let mut bad = good.clone();
    bad[5] = 9;
    assert!(Snapshot::from_bytes(&bad).is_err());
    assert!(snap.to_evol_state(None, Exec::Sequential).is_err());
}

#[test]
fn io_errors_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope").join("x.nlkg");
    match Snapshot::read(&missing) {
        Err(NlkgError::Io(msg)) => assert!(msg.contains("x.nlkg"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let t = Table::new(LANDSCAPE_COLUMNS);
    match t.write(&missing) {
        Err(NlkgError::Io(msg)) => assert!(msg.contains("nope"), "{msg}"),
        other => panic!("{other:?}"),
    }
    match Params::resolve(&["a"], &[], Some(&missing)) {
        Err(NlkgError::Io(msg)) => assert!(msg.contains("x.nlkg")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn key_value_files() {
    let kv = parse_key_values("# comment\n\n model = power:8\ndim=1\n").unwrap();
    assert_eq!(kv, vec![("model".into(), "power:8".into()), ("dim".into(), "1".into())]);
    assert!(parse_key_values("novalue\n").is_err());
    assert!(parse_key_values("a=1\na=2\n").is_err());
    assert!(parse_key_values("=1\n").is_err());
}

#[test]
fn flags_override_config_and_unknown_keys_fail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "dim = 3\nmodel = power:4\n").unwrap();
    let schema = ["dim", "model", "seed"];
    let p = Params::resolve(&schema, &[("dim".into(), "1".into())], Some(&cfg)).unwrap();
    assert_eq!(p.get("dim"), Some("1"));
    assert_eq!(p.get("model"), Some("power:4"));
    assert_eq!(p.usize_or("seed", 7).unwrap(), 7);

    std::fs::write(&cfg, "dim = 3\ncolour = red\n").unwrap();
    assert!(matches!(Params::resolve(&schema, &[], Some(&cfg)), Err(NlkgError::Parse(_))));
    assert!(Params::resolve(&schema, &[("bogus".into(), "1".into())], None).is_err());

    let p = Params::resolve(&["x", "p"], &[("x".into(), "zz".into()), ("p".into(), "3/2".into())], None).unwrap();
    assert!(p.f64("x").is_err());
    assert_eq!(p.rational("p").unwrap(), nlkg_core::exponents::rat(3, 2));
}

#[test]
fn model_strings() {
    assert_eq!(parse_model("power:8", 1).unwrap(), NonlinearityModel::power(8.0));
    assert_eq!(
        parse_model("powersum:4,1;5,0.5", 3).unwrap(),
        NonlinearityModel::PowerSum {
            terms: vec![PowerTerm { lambda: 1.0, q: 4.0 }, PowerTerm { lambda: 0.5, q: 5.0 }]
        }
    );
    assert_eq!(parse_model("critical", 4).unwrap(), NonlinearityModel::CriticalPower { d: 4 });
    assert_eq!(
        parse_model("exp:5,1,0", 2).unwrap(),
        NonlinearityModel::Exponential2D { lambda: 1.0, p: 5.0, kappa0: 1.0, gamma: 0.0 }
    );
    for bad in ["power", "power:x", "cubic", "exp:5,1", "critical:3", "powersum:3"] {
        assert!(parse_model(bad, 3).is_err(), "{bad}");
    }
    // Validated against the dimension.
    assert!(parse_model("power:3", 1).is_err());
    assert!(parse_model("exp:5,1,0", 3).is_err());
}

#[test]
fn init_strings() {
    assert_eq!(parse_init("scaled-groundstate:1.1").unwrap(), InitSpec::ScaledGroundState(1.1));
    assert_eq!(parse_init("gaussian:1,2").unwrap(), InitSpec::Gaussian { a: 1.0, w: 2.0, b: 0.0 });
    assert_eq!(parse_init("gaussian:1,2,-0.5").unwrap(), InitSpec::Gaussian { a: 1.0, w: 2.0, b: -0.5 });
    assert_eq!(parse_init("snapshot:a.nlkg").unwrap(), InitSpec::Snapshot("a.nlkg".into()));
    assert_eq!(parse_init("q.nlkg").unwrap(), InitSpec::Snapshot("q.nlkg".into()));
    assert!(parse_init("scaled-groundstate:x").is_err());
    assert!(parse_init("gaussian:1").is_err());
    assert_eq!(parse_pair("1,-0.5").unwrap(), nlkg_core::field::ScalingPair::new(1.0, -0.5));
    assert!(parse_pair("1").is_err());
}

#[test]
fn output_locations() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(output_dir(Some("/tmp/x")), std::path::PathBuf::from("/tmp/x"));
    let sub = dir.path().join("a").join("b");
    let p = output_path(&sub, "r.csv").unwrap();
    assert!(sub.is_dir());
    assert_eq!(p, sub.join("r.csv"));
    assert_eq!(output_path(&sub, "/abs/r.csv").unwrap(), std::path::PathBuf::from("/abs/r.csv"));
}

#[test]
fn tables_have_fixed_headers_and_are_deterministic() {
    let model = model_1d();
    let s0 = StatePair::at_rest(gaussian(grid(1, 40.0, 4096), 0.3, 2.0));
    let geometry = Geometry::box_grid(1, 512, 40.0).unwrap();
    let cfg = EvolConfig { checkpoints: 2, ..EvolConfig::reference(1.0) };
    let a = nlkg_core::evolution::evolve(geometry.clone(), &s0, &model, &cfg).unwrap();
    let b = nlkg_core::evolution::evolve(geometry, &s0, &model, &cfg).unwrap();
    let (ta, tb) = (Table::record(&a).to_csv_string().unwrap(), Table::record(&b).to_csv_string().unwrap());
    assert_eq!(ta, tb);
    assert_eq!(ta.lines().next().unwrap(), RECORD_COLUMNS.join(","));
    assert_eq!(ta.lines().count(), a.samples.len() + 1);
    for (_, cols) in SCHEMAS {
        assert!(!cols.is_empty());
        let mut sorted = cols.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), cols.len());
    }
    assert_eq!(num(0.1), "0.1");
    assert_eq!(num(1e-300).parse::<f64>().unwrap(), 1e-300);
    let json = to_json_string(&serde_json::json!({"outcome": "Dispersed"})).unwrap();
    assert!(json.ends_with('\n'));
}
