use lagsum_core::cli::{run, CSV_HEADER, EXIT_IO, EXIT_OK, EXIT_SINGULAR, EXIT_USAGE};

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lagsum(args: &str) -> Out {
    lagsum_env(args, None)
}

fn lagsum_env(args: &str, nmax: Option<&str>) -> Out {
    let argv = std::iter::once("lagsum").chain(args.split_whitespace());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, nmax, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s.trim()).unwrap()
}

#[test]
fn eval_trivial_point() {
    let o = lagsum("eval --case pp --nu 0.5 --j 0 --x 0 --method closed");
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout.lines().count(), 1);
    let v = json(&o.stdout);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["case"], "pp");
}

#[test]
fn eval_singular_case() {
    let o = lagsum("eval --case pm --nu 2 --j 3 --x 1 --method direct");
    assert_eq!(o.code, EXIT_SINGULAR);
    assert!(o.stderr.contains("Pochhammer base"), "{}", o.stderr);
    assert!(o.stdout.is_empty());
}

#[test]
fn eval_default_method_matches_direct() {
    let closed = json(&lagsum("eval --case pp --nu 0.5 --j 2 --x 1").stdout);
    let direct = json(&lagsum("eval --case pp --nu 0.5 --j 2 --x 1 --method direct").stdout);
    assert_eq!(closed["method"], "closed");
    let (c, d) = (closed["value"].as_f64().unwrap(), direct["value"].as_f64().unwrap());
    assert!((c - d).abs() <= 1e-9 * d.abs());
}

#[test]
fn eval_negative_arguments() {
    let o = lagsum("eval --case mp --nu 0.3 --j 1 --x 2 --method direct");
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = json(&o.stdout)["value"].as_f64().unwrap();
    assert!((v - (-0.140_206_427_813_184_798_28)).abs() < 1e-13);
    let o = lagsum("eval --case pp --nu -0.7 --j 1 --x 1");
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let o = lagsum("verify --nu-list -0.7,-0.3 --j-max 1 --x-list 1 --cases mm");
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout.lines().count(), 5);
}

#[test]
fn usage_errors() {
    assert_eq!(lagsum("eval --case zz --nu 1 --j 0 --x 0").code, EXIT_USAGE);
    assert_eq!(lagsum("eval --case pp --nu 1 --x 0").code, EXIT_USAGE);
    assert_eq!(lagsum("frobnicate").code, EXIT_USAGE);
    assert_eq!(lagsum("eval --case pp --nu 1 --j 0 --x 0 --nmax 3").code, EXIT_USAGE);
    assert_eq!(lagsum("verify --nu-list 0 --j-max 0 --x-list 0 --rel-tol 0").code, EXIT_USAGE);
    assert_eq!(lagsum("--help").code, EXIT_OK);
}

#[test]
fn nmax_from_environment() {
    assert_eq!(lagsum_env("eval --case pp --nu 1 --j 0 --x 1", Some("x")).code, EXIT_USAGE);
    let o = lagsum_env("eval --case pp --nu 1 --j 0 --x 10 --method direct", Some("16"));
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("16 terms"));
    // an explicit flag wins over the environment
    let o = lagsum_env("eval --case pp --nu 1 --j 0 --x 10 --method direct --nmax 500", Some("16"));
    assert_eq!(o.code, EXIT_OK);
}

#[test]
fn verify_minimal_grid_has_one_row_per_case() {
    let o = lagsum("verify --j-max 0 --nu-list 0 --x-list 0");
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let cases: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(cases, ["pp", "pm", "mp", "mm"]);
    assert!(rows.iter().all(|r| &r[8] == "pass"));
    assert!(o.stderr.contains("4 pass"));
}

#[test]
fn verify_skips_do_not_fail_the_run() {
    let o = lagsum("verify --j-max 3 --nu-list 2 --x-list 1 --cases pm");
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("skip,Pochhammer base nonpositive integer"), "{}", o.stdout);
}

#[test]
fn verify_reports_failures() {
    // a tolerance no floating-point comparison can meet
    let o = lagsum("verify --j-max 2 --nu-list 0.5 --x-list 5 --cases mm --rel-tol 1e-300");
    assert_eq!(o.code, 1);
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let grid = "verify --j-max 2 --nu-list -0.7,0.5,2 --x-list 0.25,2.5,25";
    let csv_out = lagsum(grid);
    let json_out = lagsum(&format!("{grid} --format json"));
    assert_eq!(csv_out.code, json_out.code);

    let doc = json(&json_out.stdout);
    let records = doc["records"].as_array().unwrap();
    let mut rdr = csv::Reader::from_reader(csv_out.stdout.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), records.len());
    assert_eq!(doc["summary"]["total"].as_u64().unwrap() as usize, rows.len());

    for (row, rec) in rows.iter().zip(records) {
        for (i, key) in CSV_HEADER.iter().enumerate() {
            let (c, j) = (&row[i], &rec[*key]);
            match j {
                serde_json::Value::Null => assert!(c.is_empty(), "{key}: {c}"),
                serde_json::Value::String(s) => assert_eq!(c, s),
                serde_json::Value::Number(n) => {
                    let parsed: f64 = c.parse().unwrap();
                    assert_eq!(parsed.to_bits(), n.as_f64().unwrap().to_bits(), "{key}");
                }
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn seventeen_digits_round_trip() {
    let o = lagsum("eval --case mm --nu 0.3 --j 2 --x 1.5 --method direct");
    let raw = o.stdout.split("\"value\":").nth(1).unwrap().split(',').next().unwrap();
    let mantissa = raw.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);
    let v: f64 = raw.parse().unwrap();
    assert!((v - (-4.759_195_090_092_386_368_6)).abs() < 1e-13);
}

#[test]
fn verify_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    let o = lagsum(&format!(
        "verify --j-max 1 --nu-list 0.5 --x-list 1 --format json --out {}",
        path.display()
    ));
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.is_empty());
    let doc = json(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(doc["records"].as_array().unwrap().len(), 8);
}

#[test]
fn unwritable_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let o = lagsum(&format!("verify --j-max 0 --nu-list 0 --x-list 0 --out {}", path.display()));
    assert_eq!(o.code, EXIT_IO);
}

#[test]
fn kummer_commands() {
    let v = json(&lagsum("kummer --a 0 --b 0.4 --j 2 --sign plus").stdout);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-13);
    assert!(v.get("oracle").is_none());

    for args in [
        "kummer --a -2 --b 0.3 --j 1 --sign plus --oracle",
        "kummer --a -3 --b 0.7 --j 2 --sign minus --oracle",
    ] {
        let o = lagsum(args);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        let v = json(&o.stdout);
        assert!(v["oracle"].is_number());
        assert!(v["diff"].as_f64().unwrap().abs() < 1e-10, "{args}");
    }

    // Γ(b − j) in the numerator at a pole
    assert_eq!(lagsum("kummer --a -2 --b 1 --j 2 --sign plus").code, EXIT_SINGULAR);
}
