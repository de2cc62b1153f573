//! Fixture states shared by the benchmarks.

use combing::{standard_state, PureState, StateKind};

/// Named benchmark inputs: GHZ and seeded Haar states for each Bob count.
pub fn fixtures(bob_counts: &[usize]) -> Vec<(String, PureState)> {
    let mut out = Vec::new();
    for &m in bob_counts {
        out.push((
            format!("ghz/{m}"),
            standard_state(StateKind::Ghz, m, 2, None).unwrap(),
        ));
        out.push((
            format!("haar/{m}"),
            standard_state(StateKind::HaarRandom, m, 2, Some(m as u64)).unwrap(),
        ));
    }
    out
}
