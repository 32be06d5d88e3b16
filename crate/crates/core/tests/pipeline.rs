use robust_wheel::pipeline::config::{OutputFormat, PipelineConfig};
use robust_wheel::pipeline::dataset::{study_config, study_responses, STUDY_CONFIG, STUDY_RESPONSES};
use robust_wheel::pipeline::{emit_report, ingest_responses, parse_config, run_analysis, Report};
use robust_wheel::taguchi::{build_l9, ResponseMatrix};
use robust_wheel::Error;

fn report_with(config: &PipelineConfig) -> Report {
    run_analysis(config, &study_responses().unwrap()).unwrap()
}

#[test]
fn shipped_responses_rows() {
    let r = study_responses().unwrap();
    assert_eq!(r.rows()[0], vec![4.02, 4.07, 5.19]);
    assert_eq!(r.rows()[4], vec![2.99, 2.99, 3.08]);
}

#[test]
fn shipped_study_has_no_warnings() {
    let report = report_with(&study_config().unwrap());
    assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    assert_eq!(report.significant, vec!["A", "B"]);
}

#[test]
fn power_only_weights_follow_sn_level_means() {
    let mut config = study_config().unwrap();
    config.weights = vec![1.0, 0.0, 0.0];
    let report = report_with(&config);

    // Level means of the S/N column, from the L9 layout written out here.
    let layout = [[1, 1, 1], [1, 2, 2], [1, 3, 3], [2, 1, 2], [2, 2, 3], [2, 3, 1], [3, 1, 3], [3, 2, 1], [3, 3, 2]];
    let sn: Vec<f64> = study_responses()
        .unwrap()
        .rows()
        .iter()
        .map(|y| -10.0 * (y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64).log10())
        .collect();
    for f in 0..3 {
        let means: Vec<f64> = (1..=3)
            .map(|l| layout.iter().zip(&sn).filter(|(row, _)| row[f] == l).map(|(_, s)| s).sum::<f64>() / 3.0)
            .collect();
        let best = (0..3).max_by(|&a, &b| means[a].total_cmp(&means[b])).unwrap() + 1;
        assert_eq!(report.influence.factors[f].optimal_level, best, "factor {f}: {means:?}");
    }
}

#[test]
fn emitted_file_set() {
    let report = report_with(&study_config().unwrap());
    let dir = tempfile::tempdir().unwrap();
    let all = [OutputFormat::Csv, OutputFormat::Text, OutputFormat::Svg, OutputFormat::Polyline];
    let files = emit_report(&report, &all, dir.path()).unwrap();
    let named = |suffix: &str| files.iter().filter(|p| p.to_string_lossy().ends_with(suffix)).count();
    assert_eq!(named(".svg"), 9);
    assert_eq!(files.iter().filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("wheel_")).count(), 18);
    let grey = std::fs::read_to_string(dir.path().join("grey.csv")).unwrap();
    assert_eq!(grey.lines().count(), 10);
    assert_eq!(grey.lines().next().unwrap(), "run,grc_power,grc_amplitude,grc_frequency,grade,rank");
    let anova = std::fs::read_to_string(dir.path().join("anova.csv")).unwrap();
    assert!(anova.starts_with("factor,ss,df,ms,f,contribution_pct\n"), "{anova}");
    assert!(anova.contains("\nerror,") && anova.contains("\ntotal,"));
}

#[test]
fn empty_format_list_writes_summary_only() {
    let report = report_with(&study_config().unwrap());
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&report, &[], dir.path()).unwrap();
    assert_eq!(files, vec![dir.path().join("summary.txt")]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn config_formats_may_be_empty() {
    let text = STUDY_CONFIG.replacen("formats = [\"csv\", \"text\", \"svg\", \"polyline\"]", "formats = []", 1);
    assert!(parse_config(&text).unwrap().output.formats.is_empty());
}

#[test]
fn unwritable_output_is_io_error() {
    let report = report_with(&study_config().unwrap());
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let err = emit_report(&report, &[], &blocker.join("sub")).unwrap_err();
    assert!(err.is_io(), "{err}");
}

fn ingest(text: &str) -> Result<ResponseMatrix, Error> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    std::fs::write(&path, text).unwrap();
    let plan = build_l9(&study_config().unwrap().factors).unwrap();
    ingest_responses(&path, &plan)
}

#[test]
fn ingest_alignment_errors() {
    let extra = format!("{STUDY_RESPONSES}10,1,1,1\n");
    assert!(matches!(ingest(&extra), Err(Error::UnknownRun { run: 10, runs: 9 })));

    let dup = STUDY_RESPONSES.replacen("\n2,", "\n3,", 1);
    assert!(matches!(ingest(&dup), Err(Error::DuplicateRun(3))));

    let missing: String = STUDY_RESPONSES.lines().filter(|l| !l.starts_with("7,")).map(|l| format!("{l}\n")).collect();
    assert!(matches!(ingest(&missing), Err(Error::MissingRun(7))));

    let text = STUDY_RESPONSES.replacen("2.99,2.99", "2.99,abc", 1);
    match ingest(&text) {
        Err(Error::NonNumeric { line: 6, column, value }) => {
            assert_eq!(column, "replicate_2");
            assert_eq!(value, "abc");
        }
        other => panic!("{other:?}"),
    }

    let reordered: String = {
        let mut lines: Vec<&str> = STUDY_RESPONSES.lines().collect();
        lines[1..].reverse();
        lines.iter().map(|l| format!("{l}\n")).collect()
    };
    assert_eq!(ingest(&reordered).unwrap(), study_responses().unwrap());

    let plan = build_l9(&study_config().unwrap().factors).unwrap();
    assert!(ingest_responses("/nonexistent/r.csv", &plan).unwrap_err().is_io());
}

#[test]
fn zeta_changes_grades_but_not_power_order() {
    let mut config = study_config().unwrap();
    config.zeta = 1.0;
    let a = report_with(&config);
    let b = report_with(&study_config().unwrap());
    assert_ne!(a.grey.grades, b.grey.grades);
    let order = |r: &Report| {
        let mut idx: Vec<usize> = (0..9).collect();
        idx.sort_by(|&i, &j| r.grey.coefficients[j][0].total_cmp(&r.grey.coefficients[i][0]));
        idx
    };
    assert_eq!(order(&a), order(&b));
}
