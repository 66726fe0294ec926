//! Optimizes the 7- and 8-factor designs from the Paley parents with both
//! objectives and prints the best frequency vectors.

use comars::designs::{paley_conference, smallest_parent};
use comars::optimizer::{optimize, ObjectiveKind, SearchConfig};

fn main() -> comars::Result<()> {
    for m in [7usize, 8] {
        let parent = smallest_parent(&paley_conference(7)?, m)?;
        for kind in [ObjectiveKind::F, ObjectiveKind::Ssq] {
            let start = std::time::Instant::now();
            let best = optimize(&parent, &parent, 1, &SearchConfig::new(kind, 100, 2024))?;
            println!("m={m} {kind}: {} (restart {}, {:.2?})", best.objective, best.restart, start.elapsed());
        }
    }
    Ok(())
}
