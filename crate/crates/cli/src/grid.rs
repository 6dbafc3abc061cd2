use crate::error::{CliError, CliResult};

const SNAP: f64 = 1e-12;

/// Parses `start:stop:step` into the inclusive grid `start, start + step, ...`
/// whose last point is `stop` whenever `stop` lies on the grid up to `1e-12`.
pub fn parse_t_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::Input(format!("invalid t-grid {text:?}: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("{s:?} is not a number")));
    let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad("entries must be finite"));
    }
    if !(start > 0.0) {
        return Err(bad("start must be positive"));
    }
    if !(step > 0.0) {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("stop is below start"));
    }
    let count = ((stop - start) / step + SNAP).floor() as usize;
    if count > 1_000_000 {
        return Err(bad("more than a million points"));
    }
    let mut out: Vec<f64> = (0..=count).map(|k| start + k as f64 * step).collect();
    if let Some(last) = out.last_mut() {
        if (*last - stop).abs() <= SNAP * stop.abs().max(1.0) {
            *last = stop;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_fifty_points_ending_at_five() {
        let g = parse_t_grid("0.1:5:0.1").unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(*g.last().unwrap(), 5.0);
        assert!((g[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn stop_off_the_grid_is_excluded() {
        assert_eq!(parse_t_grid("1:2.5:1").unwrap(), vec![1.0, 2.0]);
        assert_eq!(parse_t_grid("1:1:0.5").unwrap(), vec![1.0]);
    }

    #[test]
    fn malformed_grids_are_input_errors() {
        for s in ["1:2", "0:1:0.1", "1:2:0", "2:1:0.1", "a:1:0.1", "1:inf:1"] {
            assert!(matches!(parse_t_grid(s), Err(CliError::Input(_))), "{s}");
        }
    }
}
