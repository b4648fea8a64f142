use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sarod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarod")).args(args).output().expect("spawn sarod")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn generate(dir: &TempDir, recipe: &str, n: usize, seed: u64) -> PathBuf {
    let path = dir.path().join(format!("{recipe}-{n}-{seed}.json"));
    let out = sarod(&["generate", "--recipe", recipe, "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", s(&path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    path
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Four-cycle 1-2-3-4 network file with the given 1-based A-vertices.
fn quad_file(dir: &TempDir, name: &str, a: &[usize], pos: [[f64; 2]; 4]) -> PathBuf {
    let vertices: Vec<Value> = (1..=4)
        .map(|id| serde_json::json!({"id": id, "attr": if a.contains(&id) { "A" } else { "D" }, "pos": pos[id - 1]}))
        .collect();
    let file = serde_json::json!({"vertices": vertices, "edges": [[1, 2], [2, 3], [3, 4], [1, 4]]});
    write(dir, name, &file.to_string())
}

const SQUARE_ISH: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.1], [1.2, 0.9], [0.1, 1.1]];

#[test]
fn generate_writes_expected_edge_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (recipe, n, m) in [("quad2v", 70, 103), ("minimal", 6, 7), ("bilat-D1A1", 5, 7)] {
        let f = json(&generate(&dir, recipe, n, 42));
        assert_eq!(f["vertices"].as_array().unwrap().len(), n);
        assert_eq!(f["edges"].as_array().unwrap().len(), m, "{recipe}");
        assert!(!f["construction"].as_array().unwrap().is_empty());
    }
}

#[test]
fn generate_rejects_bad_arguments() {
    for args in [
        &["generate", "--recipe", "bogus", "--n", "10"][..],
        &["generate", "--recipe", "quad2v", "--n", "7"],
        &["generate", "--recipe", "minimal", "--n", "3"],
        &["generate", "--recipe", "minimal", "--n", "6", "--anchors", "0,1"],
    ] {
        let out = sarod(args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(stderr(&out).starts_with("error:"), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn analyze_reports_bilateration_ranks() {
    let dir = tempfile::tempdir().unwrap();
    let net = generate(&dir, "bilat-D1A1", 70, 42);
    let rep = dir.path().join("rep.json");
    let out = sarod(&["analyze", "--input", s(&net), "--out", s(&rep)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&rep);
    assert_eq!(r["m"], 137);
    assert_eq!(r["rigidity"]["rank"], 136);
    assert_eq!(r["rigidity"]["verdict"], "infinitesimally_rigid");
    assert_eq!(r["duality"]["equal"], true);
    assert_eq!(r["localization"]["rank_CB"], 274);
    assert_eq!(r["localization"]["localizability"]["verdict"], "localizable");
}

#[test]
fn analyze_pure_rod_quad_is_flexible() {
    let dir = tempfile::tempdir().unwrap();
    let f = quad_file(&dir, "rod.json", &[], SQUARE_ISH);
    let rep = dir.path().join("rep.json");
    assert_eq!(code(&sarod(&["analyze", "--input", s(&f), "--out", s(&rep)])), 0);
    let r = json(&rep);
    assert_eq!(r["rigidity"]["verdict"], "flexible");
    assert_eq!(r["rigidity"]["rank"], 3);
    assert!(r.get("quad").is_none());
}

#[test]
fn analyze_three_a_quad_is_case_one_rigid() {
    let dir = tempfile::tempdir().unwrap();
    let f = quad_file(&dir, "q.json", &[1, 2, 3], SQUARE_ISH);
    let rep = dir.path().join("rep.json");
    assert_eq!(code(&sarod(&["analyze", "--input", s(&f), "--out", s(&rep)])), 0);
    let q = &json(&rep)["quad"];
    assert_eq!(q["case"], 1);
    assert_eq!(q["globally_rigid"], true);

    let out = sarod(&["check-quad", "--input", s(&f)]);
    assert_eq!(code(&out), 0);
    let q: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(q["case_name"], "three_a");
}

#[test]
fn malformed_json_reports_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "bad.json", "{\n  \"vertices\": [\n    {\"id\": 1,\n");
    let out = sarod(&["analyze", "--input", s(&f)]);
    assert_eq!(code(&out), 1);
    let msg = stderr(&out);
    assert!(msg.contains("malformed network JSON") && msg.contains("line 4"), "{msg}");

    let f = write(&dir, "field.json", r#"{"vertices": [{"id": 1, "attr": "X", "pos": [0, 0]}], "edges": []}"#);
    let msg = stderr(&sarod(&["analyze", "--input", s(&f)]));
    assert!(msg.contains("line 1") && msg.contains("variant"), "{msg}");
}

#[test]
fn localize_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let good = generate(&dir, "quad2v", 70, 42);
    let csv = dir.path().join("out.csv");
    let rep = dir.path().join("rep.json");
    let out = sarod(&["localize", "--input", s(&good), "--out", s(&csv), "--report", s(&rep)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&rep);
    assert_eq!(r["method"], "sa");
    assert!(r["mse"].as_f64().unwrap() < 1e-8);
    assert!(r.get("wall_clock_s").is_none());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("vertex_id,true_x,true_y,est_x,est_y,err\n"));
    assert_eq!(text.lines().count(), 71);

    let bad = generate(&dir, "quad2v-deficient", 70, 42);
    let out = sarod(&["localize", "--input", s(&bad), "--out", s(&csv), "--report", s(&rep)]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&rep)["verdict"], "unlocalizable");
}

#[test]
fn localize_rod_on_sa_network_names_the_missing_connectivity() {
    let dir = tempfile::tempdir().unwrap();
    let net = generate(&dir, "quad2v", 20, 1);
    let out = sarod(&["localize", "--input", s(&net), "--method", "rod"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("RoD index graph"), "{}", stderr(&out));
    assert_eq!(code(&sarod(&["localize", "--input", s(&net), "--method", "magic"])), 1);
}

#[test]
fn localize_accepts_external_measurements() {
    let dir = tempfile::tempdir().unwrap();
    let f = quad_file(&dir, "q.json", &[1, 2, 3], SQUARE_ISH);
    // anchors 1 and 2 (1-based): angles at 1, 2, 3 and the single ratio at 4
    let mut file = json(&f);
    for v in file["vertices"].as_array_mut().unwrap().iter_mut().take(2) {
        v["anchor"] = Value::Bool(true);
    }
    std::fs::write(&f, file.to_string()).unwrap();
    let synth = dir.path().join("synth.csv");
    assert_eq!(code(&sarod(&["localize", "--input", s(&f), "--out", s(&synth)])), 0);

    let angle = |apex: usize, j: usize, k: usize| {
        let p = |i: usize| SQUARE_ISH[i - 1];
        let (a, b) = (p(j), p(k));
        let (u, v) = ([a[0] - p(apex)[0], a[1] - p(apex)[1]], [b[0] - p(apex)[0], b[1] - p(apex)[1]]);
        (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]).rem_euclid(std::f64::consts::TAU)
    };
    let dist = |i: usize, j: usize| {
        let (a, b) = (SQUARE_ISH[i - 1], SQUARE_ISH[j - 1]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    };
    let ms = serde_json::json!({
        "sa": [
            {"apex": 1, "j": 2, "k": 4, "value": angle(1, 2, 4)},
            {"apex": 2, "j": 1, "k": 3, "value": angle(2, 1, 3)},
            {"apex": 3, "j": 2, "k": 4, "value": angle(3, 2, 4)},
        ],
        "rod": [{"apex": 4, "j": 1, "k": 3, "value": dist(4, 3) / dist(4, 1)}],
    });
    let mf = write(&dir, "ms.json", &ms.to_string());
    let ext = dir.path().join("ext.csv");
    let out = sarod(&["localize", "--input", s(&f), "--measurements", s(&mf), "--out", s(&ext)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let err_col = |p: &Path| -> Vec<f64> {
        std::fs::read_to_string(p).unwrap().lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect()
    };
    assert!(err_col(&ext).iter().all(|&e| e < 1e-9), "{:?}", err_col(&ext));
}

#[test]
fn report_batch_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec = serde_json::json!({"runs": [
        {"recipe": "quad2v", "n": 70, "seeds": [1, 2, 3, 4, 5]},
        {"recipe": "bilat-D1A1", "n": 70, "seeds": [1, 2, 3, 4, 5]},
        {"recipe": "mix-D2A1", "n": 70, "seeds": [1, 2, 3, 4, 5]},
        {"recipe": "type2D1", "n": 70, "seeds": [1, 2, 3, 4, 5]},
    ]});
    let spec = write(&dir, "spec.json", &spec.to_string());
    let out = dir.path().join("out.csv");
    let run = sarod(&["report", "--spec", s(&spec), "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 20);
    for row in &rows {
        let expected_m = match &row[col("recipe")] {
            "quad2v" => "103",
            "bilat-D1A1" => "137",
            "mix-D2A1" => "169",
            _ => "114",
        };
        assert_eq!(&row[col("m")], expected_m);
        assert_eq!(&row[col("rank_R")], "136");
        assert_eq!(&row[col("status")], "ok");
        // the multi-start general method labels its unique verdicts as heuristic
        assert!(matches!(&row[col("verdict")], "localizable" | "heuristic-unique"), "{row:?}");
        assert_eq!(&row[col("runtime_s")], "");
        match &row[col("recipe")] {
            "quad2v" => assert_eq!(&row[col("rank_CD")], "103"),
            "bilat-D1A1" => assert_eq!(&row[col("rank_CB")], "274"),
            "mix-D2A1" => assert_eq!((&row[col("rank_CB")], &row[col("null_CB")]), ("334", "4")),
            _ => assert_eq!((&row[col("c_a")], &row[col("c_d")]), ("23", "47")),
        }
    }

    let again = dir.path().join("again.csv");
    assert_eq!(code(&sarod(&["report", "--spec", s(&spec), "--out", s(&again)])), 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn report_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(&dir, "empty.json", r#"{"runs": []}"#);
    let out = sarod(&["report", "--spec", s(&empty)]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "recipe,n,seed,method,m,rank_R,c_a,c_d,rank_CD,rank_CB,null_CB,verdict,mse,runtime_s,status\n"
    );

    let spec = write(&dir, "rep.json", r#"{"runs": [{"recipe": "minimal", "n": 8, "seeds": [3, 3]}, {"recipe": "nope", "n": 8, "seeds": [1]}]}"#);
    let out = sarod(&["report", "--spec", s(&spec), "--timings"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let strip_time = |l: &str| {
        let mut cells: Vec<&str> = l.split(',').collect();
        assert!(cells[13].parse::<f64>().is_ok());
        cells[13] = "";
        cells.join(",")
    };
    assert_eq!(strip_time(lines[1]), strip_time(lines[2]));
    assert!(lines[3].contains("error: ") && lines[3].contains("unknown recipe"), "{}", lines[3]);
}

#[test]
fn outputs_are_bit_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(&dir, "type2D1", 30, 9);
    let b = dir.path().join("b.json");
    assert_eq!(code(&sarod(&["generate", "--recipe", "type2D1", "--n", "30", "--seed", "9", "--out", s(&b)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let run = |tag: &str| {
        let (csv, rep, an) =
            (dir.path().join(format!("{tag}.csv")), dir.path().join(format!("{tag}.rep")), dir.path().join(format!("{tag}.an")));
        assert_eq!(code(&sarod(&["localize", "--input", s(&a), "--out", s(&csv), "--report", s(&rep)])), 0);
        assert_eq!(code(&sarod(&["analyze", "--input", s(&a), "--out", s(&an)])), 0);
        [csv, rep, an].map(|p| std::fs::read(p).unwrap())
    };
    assert_eq!(run("x"), run("y"));
}

#[test]
fn help_lists_defaults() {
    let out = sarod(&["localize", "--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--seed", "--rtol", "--starts", "--out", "--method"] {
        assert!(text.contains(flag), "{flag}");
    }
    for default in ["[default: 0]", "[default: 0.00000001]", "[default: 20]", "[default: auto]"] {
        assert!(text.contains(default), "{default} missing from:\n{text}");
    }
    assert_eq!(code(&sarod(&["frobnicate"])), 2);
}
