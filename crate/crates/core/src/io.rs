//! Text formats for games and profiles.
//!
//! Game file:
//!
//! ```text
//! anongame v1
//! <n> <k>
//! <C(n+k-2, k-1) payoffs for player 1, strategy 1, canonical partition order>
//! ...                       (n·k payoff lines, player-major)
//! ```
//!
//! Profile file:
//!
//! ```text
//! profile v1
//! <n> <k>
//! <k probabilities for player 1>
//! ...                       (n lines)
//! ```
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! save followed by load is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::game::{AnonymousGame, MixedProfile, MixedStrategy};
use crate::partition::lattice_size;

pub const GAME_HEADER: &str = "anongame v1";
pub const PROFILE_HEADER: &str = "profile v1";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Lines of a file, numbered from 1, with trailing blank lines dropped.
struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    total: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        while lines.last().is_some_and(|(_, l)| l.trim().is_empty()) {
            lines.pop();
        }
        let total = lines.len();
        Self { lines, pos: 0, total }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let item = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| parse_err(self.total + 1, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some((no, _)) => Err(parse_err(*no, "unexpected trailing content")),
            None => Ok(()),
        }
    }
}

fn parse_header(lines: &mut Lines<'_>, header: &str) -> Result<(usize, usize)> {
    let (no, first) = lines.next("header")?;
    if first.trim() != header {
        return Err(parse_err(no, format!("expected header '{header}', found '{}'", first.trim())));
    }
    let (no, dims) = lines.next("dimensions")?;
    let parts: Vec<&str> = dims.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(parse_err(no, "expected '<n> <k>'"));
    }
    let n: usize = parts[0]
        .parse()
        .map_err(|_| parse_err(no, format!("bad player count '{}'", parts[0])))?;
    let k: usize = parts[1]
        .parse()
        .map_err(|_| parse_err(no, format!("bad strategy count '{}'", parts[1])))?;
    if n == 0 || k == 0 {
        return Err(parse_err(no, "n and k must be positive"));
    }
    Ok((n, k))
}

fn parse_row(no: usize, line: &str, expected: usize) -> Result<Vec<f64>> {
    let row: Vec<f64> = line
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| parse_err(no, format!("bad number '{tok}'"))))
        .collect::<Result<_>>()?;
    if row.len() != expected {
        return Err(parse_err(no, format!("expected {expected} values, found {}", row.len())));
    }
    Ok(row)
}

pub fn parse_game(text: &str) -> Result<AnonymousGame> {
    let mut lines = Lines::new(text);
    let (n, k) = parse_header(&mut lines, GAME_HEADER)?;
    let cells = lattice_size(n - 1, k);
    let mut payoffs = Vec::with_capacity(n * k * cells);
    for i in 0..n {
        for a in 0..k {
            let (no, line) = lines.next(&format!("payoffs of player {} strategy {}", i + 1, a + 1))?;
            let row = parse_row(no, line, cells)?;
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(parse_err(no, format!("payoff {v} outside [0, 1]")));
            }
            payoffs.extend(row);
        }
    }
    lines.finish()?;
    AnonymousGame::new(n, k, payoffs)
}

pub fn format_game(game: &AnonymousGame) -> String {
    let mut out = format!("{GAME_HEADER}\n{} {}\n", game.n(), game.k());
    for i in 0..game.n() {
        for a in 0..game.k() {
            push_row(&mut out, game.table(i, a));
        }
    }
    out
}

pub fn parse_profile(text: &str) -> Result<MixedProfile> {
    let mut lines = Lines::new(text);
    let (n, k) = parse_header(&mut lines, PROFILE_HEADER)?;
    let mut strategies = Vec::with_capacity(n);
    for i in 0..n {
        let (no, line) = lines.next(&format!("strategy of player {}", i + 1))?;
        let row = parse_row(no, line, k)?;
        strategies.push(MixedStrategy::new(row).map_err(|e| parse_err(no, e.to_string()))?);
    }
    lines.finish()?;
    MixedProfile::new(strategies)
}

pub fn format_profile(profile: &MixedProfile) -> String {
    let k = profile.strategies().first().map_or(0, MixedStrategy::k);
    let mut out = format!("{PROFILE_HEADER}\n{} {k}\n", profile.n());
    for s in profile.strategies() {
        push_row(&mut out, s.probs());
    }
    out
}

fn push_row(out: &mut String, values: &[f64]) {
    for (j, v) in values.iter().enumerate() {
        if j > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}

pub fn save_game(game: &AnonymousGame, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_game(game))?;
    Ok(())
}

pub fn load_game(path: impl AsRef<Path>) -> Result<AnonymousGame> {
    parse_game(&fs::read_to_string(path)?)
}

pub fn save_profile(profile: &MixedProfile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_profile(profile))?;
    Ok(())
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<MixedProfile> {
    parse_profile(&fs::read_to_string(path)?)
}
