#![allow(dead_code)]

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wikiref::artifacts::{read_json, ReportFile, REPORT_JSON};
use wikiref::config::{Overrides, Settings};
use wikiref::workspace::Workspace;
use wikiref_core::linkclassify::{step1_features, Step1Feature};
use wikiref_core::refrank::{step2_features, Step2Feature};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/planted")
}

pub fn fixture_config() -> PathBuf {
    fixture_dir().join("config.toml")
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn run_cli<S: AsRef<str>>(args: &[S]) -> (i32, String, String) {
    let mut argv = vec!["wikiref".to_string()];
    argv.extend(args.iter().map(|a| a.as_ref().to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = wikiref::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

pub fn fixture_workspace(out: &Path) -> Workspace {
    let settings = Settings::load(
        &fixture_config(),
        &Overrides {
            out: Some(out.to_path_buf()),
            ..Overrides::default()
        },
    )
    .unwrap();
    Workspace::open(settings).unwrap()
}

/// `evaluate --train` on the planted fixture into `out`.
pub fn evaluate_fixture(out: &Path) -> Result<ReportFile, String> {
    let config = fixture_config();
    let (code, _, err) = run_cli(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "evaluate",
        "--train",
    ]);
    if code != 0 {
        return Err(format!("exit {code}: {err}"));
    }
    read_json(&out.join(REPORT_JSON)).map_err(|e| e.to_string())
}

#[derive(Debug, Deserialize)]
pub struct ExpectedPair {
    pub target: String,
    pub wikilink: String,
    pub features: std::collections::BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
pub struct ExpectedTriple {
    pub target: String,
    pub wikilink: String,
    pub reference_index: usize,
    pub features: std::collections::BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Deserialize)]
pub struct ExpectedFeatures {
    pub pairs: Vec<ExpectedPair>,
    pub triples: Vec<ExpectedTriple>,
}

/// Largest |library − standalone recomputation| over every designated pair
/// and triple, with the number of values compared.
pub fn feature_deviation(ws: &Workspace) -> Result<(f64, usize), String> {
    let text = std::fs::read_to_string(fixture_dir().join("expected_features.json"))
        .map_err(|e| e.to_string())?;
    let expected: ExpectedFeatures = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let ctx = ws.ctx();
    let page = |t: &str| ws.corpus.get(t).ok_or_else(|| format!("missing page {t}"));
    let mut worst = 0.0f64;
    let mut compared = 0;
    for p in &expected.pairs {
        let got = step1_features(&ctx, page(&p.target)?, page(&p.wikilink)?).map_err(|e| e.to_string())?;
        for f in Step1Feature::ALL {
            let want = p.features[f.name()];
            worst = worst.max((got.get(f) - want).abs());
            compared += 1;
        }
    }
    for t in &expected.triples {
        let got = step2_features(&ctx, page(&t.target)?, page(&t.wikilink)?, t.reference_index)
            .map_err(|e| e.to_string())?;
        for f in Step2Feature::ALL {
            let want = t.features[f.name()].as_f64().ok_or("non-numeric feature")?;
            worst = worst.max((got.get(f) - want).abs());
            compared += 1;
        }
    }
    Ok((worst, compared))
}
