//! End-to-end runs of the command line through `run_cli`.

use oddwalk::cli::run_cli;
use serde_json::json;

fn run(args: &[&str]) -> oddwalk::cli::CliOutcome {
    run_cli(std::iter::once("oddwalk").chain(args.iter().copied()))
}

#[test]
fn odd_girth_of_a_petersen_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("petersen.el");
    std::fs::write(&path, oddwalk::Graph::petersen().to_edge_list()).unwrap();
    let out = run(&["odd-girth", "--graph", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.code, 0);
    let report = out.report.unwrap();
    assert_eq!(report.result["odd_girth"], json!(5));
    assert_eq!(report.schema_version, 1);
    let parsed: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(parsed["timing"]["wall_ms"].is_number());
}

#[test]
fn color_pipeline_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.el");
    let hom = dir.path().join("phi.map");
    let coloring = dir.path().join("colors.txt");
    std::fs::write(&g, oddwalk::Graph::complete(4).to_edge_list()).unwrap();
    std::fs::write(&hom, "0 -> 0\n1 -> 1\n2 -> 2\n3 -> 3\n").unwrap();
    let (gp, hp) = (g.to_str().unwrap(), hom.to_str().unwrap());
    let args = ["color-pipeline", "--g", gp, "--h", gp, "--hom", hp, "--cycle", "0,1,2,0", "--r", "2", "--assert-sc"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", coloring.to_str().unwrap()]);
    let out = run(&with_out);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let report = out.report.unwrap();
    assert!(report.result["palette_size"].as_u64().unwrap() < 32);
    let colors = oddwalk::Coloring::parse(&std::fs::read_to_string(&coloring).unwrap(), 4).unwrap();
    assert!(colors.is_proper(&oddwalk::Graph::complete(4)));
    // without the assertion the hypothesis is missing
    let out = run(&args[..args.len() - 1]);
    assert_eq!(out.code, 1);
}

#[test]
fn gen_borsuk_writes_graph_dump_and_xref() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.el");
    let out = run(&["gen-borsuk", "--n", "2", "--r", "2", "--N", "100", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    let g = oddwalk::parse_graph(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(g.n(), 200);
    let dump = std::fs::read_to_string(dir.path().join("g.el.dump")).unwrap();
    let (sample, eps) = oddwalk::sphere::SphereSample::parse_dump(&dump).unwrap();
    assert_eq!(sample.len(), 200);
    assert!((eps - std::f64::consts::PI / 5.0).abs() < 1e-15);
    assert_eq!(oddwalk::sphere::ApproxGraph::new(sample, eps).graph(), &g);
    assert!(dir.path().join("g.el.xref").exists());
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    std::fs::write(p("c7.el"), oddwalk::Graph::cycle(7).to_edge_list()).unwrap();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["closure".into(), "--graph".into(), "demo".into(), "--out".into(), p("classes.txt")], 0),
        (vec!["invariants".into(), "--graph".into(), "k4".into(), "--walk".into(), "0,1,2,0".into(), "--pivot".into()], 0),
        (vec!["homotopy".into(), "--graph".into(), "demo".into(), "--p".into(), "0,1,2,0".into(), "--q".into(), "0,5,6,0".into(), "--out".into(), p("moves.log")], 0),
        (vec!["simply-connected".into(), "--graph".into(), "k4".into()], 0),
        (vec!["ncomplex".into(), "--graph".into(), "c5".into(), "--out".into(), p("n.txt")], 0),
        (vec!["h1".into(), "--graph".into(), "c5".into()], 0),
        (vec!["hom-exists".into(), "--g".into(), p("c7.el"), "--h".into(), "c5".into()], 0),
        (vec!["fold".into(), "--graph".into(), "c7".into(), "--forbid".into(), "7".into(), "--allow-cyclic-input".into()], 0),
        (vec!["experiment-dhom".into(), "--n".into(), "2".into(), "--r".into(), "2".into(), "--N".into(), "1,20".into(), "--seeds".into(), "1,2".into()], 0),
        (vec!["experiment-dhom".into(), "--n".into(), "2".into(), "--r".into(), "2".into(), "--N".into(), "".into()], 2),
        (vec!["homotopy".into(), "--graph".into(), "demo".into(), "--p".into(), "0,1,9".into(), "--q".into(), "0".into()], 2),
    ];
    for (args, code) in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&refs);
        assert_eq!(out.code, code, "{args:?}: {}{}", out.stdout, out.stderr);
    }
    let moves = oddwalk::walk::parse_move_log(&std::fs::read_to_string(p("moves.log")).unwrap()).unwrap();
    let g = oddwalk::fixtures::homotopy_demo_graph();
    let start = oddwalk::Walk::new(&g, vec![0, 1, 2, 0]).unwrap();
    assert_eq!(oddwalk::replay_moves(&g, &start, &moves).unwrap().vertices(), &[0, 5, 6, 0]);
    assert!(std::fs::read_to_string(p("n.txt")).unwrap().lines().count() == 5);
}

#[test]
fn degenerate_single_point_sample() {
    let out = run(&["experiment-dhom", "--n", "2", "--r", "2", "--N", "1", "--seeds", "3", "--json"]);
    assert_eq!(out.code, 0);
    let row = &out.report.unwrap().result["rows"][0];
    assert_eq!(row["vertices"], json!(2));
    // a point and its antipode are adjacent
    assert_eq!(row["min_degree_ratio"], json!(0.5));
}
