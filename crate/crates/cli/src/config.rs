//! `--config FILE` support.
//!
//! The file holds flat `key = value` lines (`#` starts a comment). Each entry
//! becomes a `--key=value` flag placed before the command-line flags, so
//! anything given on the command line wins. Boolean keys take `true`/`false`.

use std::fs;
use std::path::Path;

use crate::CliError;

pub fn parse(text: &str) -> Result<Vec<String>, CliError> {
    let mut flags = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key == "config" {
            return Err(CliError::Config(format!(
                "line {}: invalid key",
                lineno + 1
            )));
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => flags.push(format!("--{key}={value}")),
        }
    }
    Ok(flags)
}

fn config_path(args: &[String]) -> Result<Option<(usize, usize, String)>, CliError> {
    for (i, a) in args.iter().enumerate() {
        if a == "--" {
            break;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some((i, 1, p.to_string())));
        }
        if a == "--config" {
            let p = args
                .get(i + 1)
                .ok_or_else(|| CliError::Config("--config needs a file path".into()))?;
            return Ok(Some((i, 2, p.clone())));
        }
    }
    Ok(None)
}

/// Replaces `--config FILE` in `args` with the file's flags, inserted right
/// after the subcommand name.
pub fn expand(mut args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some((pos, width, path)) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Io(format!("reading config {path}: {e}")))?;
    let flags = parse(&text)?;
    args.drain(pos..pos + width);
    // argv[0] is the program, argv[1] the subcommand
    let at = 2.min(args.len());
    args.splice(at..at, flags);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_flags_and_booleans() {
        let f =
            parse("# comment\nsize = 256\nraw = true\nbinary=false\nout_dir = \"x y\"\n").unwrap();
        assert_eq!(f, v(&["--size=256", "--raw", "--out-dir=x y"]));
        assert!(parse("oops").is_err());
    }

    #[test]
    fn no_config_is_identity() {
        let a = v(&["vortex", "mask", "--n", "2"]);
        assert_eq!(expand(a.clone()).unwrap(), a);
    }
}
