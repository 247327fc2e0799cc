use super::{first_integrals, pairs, Trajectory};

/// `t, x_k_j..., v_k_j..., r_ij..., energy` with k the coordinate and j the
/// body, body by body.
pub fn trajectory_header(n: usize, d: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for prefix in ["x", "v"] {
        for j in 1..=n {
            for k in 1..=d {
                h.push(format!("{prefix}_{k}_{j}"));
            }
        }
    }
    for (i, j) in pairs(n) {
        h.push(format!("r_{}{}", i + 1, j + 1));
    }
    h.push("energy".into());
    h
}

pub fn trajectory_csv(traj: &Trajectory) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let Some(first) = traj.samples.first() else {
        return Ok(String::new());
    };
    w.write_record(trajectory_header(first.state.n(), first.state.dim()))?;
    for s in &traj.samples {
        let mut row = vec![s.t.to_string()];
        row.extend(s.state.x.iter().map(f64::to_string));
        row.extend(s.state.v.iter().map(f64::to_string));
        row.extend(s.state.distances().iter().map(f64::to_string));
        row.push(first_integrals(&s.state).energy.to_string());
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = trajectory_header(3, 2);
        assert_eq!(h[..4], ["t", "x_1_1", "x_2_1", "x_1_2"]);
        assert_eq!(h.len(), 1 + 6 + 6 + 3 + 1);
        assert_eq!(h[13..], ["r_12", "r_13", "r_23", "energy"]);
    }
}
