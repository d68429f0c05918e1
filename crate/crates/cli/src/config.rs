//! Run configuration: defaults, then a `key=value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use podles::genfun::LimitMode;
use podles::uqrep::{BtForm, Convention};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown output format {other:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub q: String,
    pub a: String,
    pub precision_bits: u32,
    pub n_max: u32,
    pub gram_n: u32,
    pub convention: Convention,
    pub bt_form: BtForm,
    pub limit_mode: LimitMode,
    pub theta_grid: usize,
    pub lambda_steps: usize,
    pub output_format: Format,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q: "0.5".into(),
            a: "0.3".into(),
            precision_bits: 256,
            n_max: 4,
            gram_n: 2,
            convention: Convention::Right,
            bt_form: BtForm::Canonical,
            limit_mode: LimitMode::Derivative,
            theta_grid: 64,
            lambda_steps: 12,
            output_format: Format::Csv,
            output_dir: PathBuf::from("out"),
            seed: 0,
            threads: 1,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e| format!("{key}: {e}"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key.trim().replace('-', "_").as_str() {
            "q" => self.q = value.trim().to_string(),
            "a" => self.a = value.trim().to_string(),
            "precision" | "precision_bits" => self.precision_bits = parse(key, value)?,
            "nmax" | "n_max" => self.n_max = parse(key, value)?,
            "gram_n" | "gram_N" => self.gram_n = parse(key, value)?,
            "convention" => self.convention = parse(key, value)?,
            "bt_form" => self.bt_form = parse(key, value)?,
            "limit_mode" => self.limit_mode = parse(key, value)?,
            "theta_grid" => self.theta_grid = parse(key, value)?,
            "lambda_steps" => self.lambda_steps = parse(key, value)?,
            "format" | "output_format" => self.output_format = parse(key, value)?,
            "out" | "output_dir" => self.output_dir = PathBuf::from(value.trim()),
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            other => return Err(format!("unknown configuration key {other:?}")),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
            self.set(k, v).map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    /// Key/value pairs echoed into every output file. The output directory
    /// and thread count are left out so that reruns compare byte for byte.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        vec![
            ("q", self.q.clone()),
            ("a", self.a.clone()),
            ("precision_bits", self.precision_bits.to_string()),
            ("n_max", self.n_max.to_string()),
            ("gram_N", self.gram_n.to_string()),
            ("convention", self.convention.to_string()),
            ("bt_form", self.bt_form.to_string()),
            ("limit_mode", self.limit_mode.to_string()),
            ("theta_grid", self.theta_grid.to_string()),
            ("lambda_steps", self.lambda_steps.to_string()),
            ("output_format", self.output_format.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let dir = std::env::temp_dir().join(format!("podles-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# comment\nq = 0.25\nnmax=3\nconvention=left\n").unwrap();
        let mut c = RunConfig::default();
        c.apply_file(&path).unwrap();
        c.set("nmax", "5").unwrap();
        assert_eq!(c.q, "0.25");
        assert_eq!(c.n_max, 5);
        assert_eq!(c.convention, Convention::Left);
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("format", "xml").is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
