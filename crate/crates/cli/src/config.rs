//! Config files, SNR lists and run manifests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ArgMatches;
use polarcm::{Error, Result};

/// Flags that take no value; `key=true` in a config file turns them on.
const SWITCHES: &[&str] = &["allow-large", "ebn0", "crc-overhead"];

pub const SUBCOMMANDS: &[&str] = &["capacity", "search", "construct", "ratecurve", "simulate"];

/// Parses `key=value` lines; `#` starts a comment line.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            msg: format!("expected key=value in {}", path.display()),
        })?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Splices config-file settings in front of the command-line flags so that
/// flags given on the command line win.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut injected = Vec::new();
    for (k, v) in read_config(&path)? {
        if k == "config" {
            continue;
        }
        if SWITCHES.contains(&k.as_str()) {
            match v.as_str() {
                "true" => injected.push(OsString::from(format!("--{k}"))),
                "false" => {}
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "config key '{k}' expects true or false, got '{v}'"
                    )))
                }
            }
        } else {
            injected.push(OsString::from(format!("--{k}")));
            injected.push(OsString::from(v));
        }
    }
    let mut merged = vec![args[0].clone(), args[pos].clone()];
    merged.extend(injected);
    merged.extend(args[1..pos].iter().cloned());
    merged.extend(args[pos + 1..].iter().cloned());
    Ok(merged)
}

/// Comma-separated values; `a:step:b` expands to an inclusive range.
pub fn parse_list(spec: &str) -> Result<Vec<f64>> {
    let bad = |s: &str| Error::InvalidParameter(format!("bad number '{s}' in list '{spec}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(s));
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, step, b] => {
                let (a, step, b) = (num(a)?, num(step)?, num(b)?);
                if !(step > 0.0) || b < a {
                    return Err(Error::InvalidParameter(format!("bad range '{item}'")));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| a + i as f64 * step));
            }
            _ => return Err(bad(item)),
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(format!("empty list '{spec}'")));
    }
    Ok(out)
}

/// Writes `<output>.manifest`: every resolved argument as a config line,
/// so `polarcm <command> --config <manifest>` repeats the run.
pub fn write_manifest(
    root: &clap::Command,
    name: &str,
    sub: &ArgMatches,
    outputs: &[&Path],
) -> Result<PathBuf> {
    let primary = outputs[0];
    let path = PathBuf::from(format!("{}.manifest", primary.display()));
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut text = String::new();
    let _ = writeln!(text, "# polarcm run manifest");
    let _ = writeln!(text, "# command={name}");
    let _ = writeln!(text, "# version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(text, "# timestamp={stamp}");
    for o in outputs {
        let _ = writeln!(text, "# artifact={}", o.display());
    }
    let _ = writeln!(text, "# rerun: polarcm {name} --config {}", path.display());
    // Group ids of flattened structs also show up in the matches.
    let command = root
        .find_subcommand(name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown subcommand '{name}'")))?;
    let args: Vec<&str> = root
        .get_arguments()
        .chain(command.get_arguments())
        .map(|a| a.get_id().as_str())
        .collect();
    let mut ids: Vec<&str> = sub
        .ids()
        .map(|id| id.as_str())
        .filter(|id| args.contains(id))
        .collect();
    ids.sort_unstable();
    for id in ids {
        if id == "config" {
            continue;
        }
        if let Ok(Some(vals)) = sub.try_get_raw(id) {
            let vals: Vec<String> = vals.map(|v| v.to_string_lossy().into_owned()).collect();
            if let Some(v) = vals.last() {
                let _ = writeln!(text, "{}={v}", id.replace('_', "-"));
            }
        }
    }
    std::fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_list("4:0.5:5").unwrap(), vec![4.0, 4.5, 5.0]);
        assert_eq!(parse_list("0:1:2,7").unwrap(), vec![0.0, 1.0, 2.0, 7.0]);
        assert!(parse_list("").is_err());
        assert!(parse_list("1:0:2").is_err());
        assert!(parse_list("x").is_err());
    }

    #[test]
    fn command_line_follows_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "# comment\nn=64\nallow_large=true\nebn0=false\n").unwrap();
        let args: Vec<OsString> = ["polarcm", "--seed", "3", "search", "--n", "128", "--config"]
            .iter()
            .map(OsString::from)
            .chain([cfg.clone().into_os_string()])
            .collect();
        let merged: Vec<String> = merge_config(args)
            .unwrap()
            .into_iter()
            .map(|s| s.into_string().unwrap())
            .collect();
        assert_eq!(
            merged[..6],
            ["polarcm", "search", "--n", "64", "--allow-large", "--seed"]
        );
        let n_pos = merged.iter().rposition(|a| a == "--n").unwrap();
        assert_eq!(merged[n_pos + 1], "128");
    }
}
