use wavetank::config::{RunConfig, WaveKind};
use wavetank::Error;

#[test]
fn empty_file_gives_the_default_case() {
    let c = RunConfig::from_toml("").unwrap();
    assert_eq!(c.tank.dim, 2);
    assert_eq!((c.tank.length, c.tank.depth), (12.0, 1.1));
    assert_eq!((c.bodies.diameter, c.bodies.height), (0.5, 0.22));
    assert_eq!(c.waves.kind, WaveKind::Regular);
    assert_eq!((c.waves.height, c.waves.period), (0.16, 1.5));
    assert_eq!(c.bodies.k_base, 700.0);
    assert_eq!(c.bodies.spacing, 1.0);
    assert_eq!(c.rl.hidden, vec![128, 128, 64]);
    assert_eq!(c.rl.batch_size, 128);
    let e = c.episode_config();
    assert_eq!((e.duration, e.reset_time, e.episodes), (10.0, 10.0, 100));
    assert_eq!(e.transitions_per_episode(), 100);
}

#[test]
fn three_d_episode_defaults() {
    let c = RunConfig::from_toml("[tank]\ndim = 3\n").unwrap();
    let e = c.episode_config();
    assert_eq!((e.duration, e.reset_time, e.episodes), (20.0, 10.0, 50));
}

#[test]
fn negative_depth_names_the_key() {
    let err = RunConfig::from_toml("[tank]\ndepth = -1.0\n").unwrap_err();
    match &err {
        Error::Config { key, .. } => assert_eq!(key, "tank.depth"),
        other => panic!("unexpected {other}"),
    }
    assert!(err.to_string().contains("tank.depth"));
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(matches!(RunConfig::from_toml("[tank]\ndepht = 1.0\n"), Err(Error::Parse(_))));
    assert!(matches!(RunConfig::from_toml("colour = 1\n"), Err(Error::Parse(_))));
}

#[test]
fn other_constraints() {
    for (text, key) in [
        ("[rl]\ngamma_p = 1.5\n", "rl.gamma_p"),
        ("[tank]\ndim = 4\n", "tank.dim"),
        ("[tank]\ndp = 0.04\n", "tank.depth"),
        ("[bodies]\ndraft = 0.3\n", "bodies.draft"),
        ("[episodes]\nduration = 1.05\n", "episodes.duration"),
        ("[bodies]\ncount = 3\nspacing = 0.4\n", "bodies.spacing"),
        ("[outputs]\ngauges = [13.0]\n", "outputs.gauges"),
    ] {
        match RunConfig::from_toml(text) {
            Err(Error::Config { key: k, .. }) => assert_eq!(k, key, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn serialise_parse_round_trip() {
    let text = "seed = 9\n[waves]\nkind = \"irregular\"\nseed = 4\n[bodies]\ncount = 3\n[rl]\nentropy = \"per_agent\"\n";
    let a = RunConfig::from_toml(text).unwrap();
    let b = RunConfig::from_toml(&a.to_toml()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.hash(), b.hash());
    let c = RunConfig::from_toml("seed = 10\n").unwrap();
    assert_ne!(a.hash(), c.hash());
}
