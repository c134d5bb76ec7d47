//! Simplex vs vertex enumeration and synthesis vs brute force on seeded
//! random games.

use ipfp::oracle::{exhaustive_synthesis_oracle, lp_vertex_oracle, random_validated_game};
use ipfp::synthesis::synthesize_n_player;

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let mut lps = 0;
    let mut disagreements = 0;
    for seed in 0..n {
        let game = random_validated_game(seed);
        let fast = synthesize_n_player(&game).unwrap();
        let slow = exhaustive_synthesis_oracle(&game).unwrap();
        if (fast.chosen_y0, &fast.value) != (slow.chosen_y0, &slow.value) {
            disagreements += 1;
            println!("seed {seed}: simplex {:?} {} vs oracle {:?} {}", fast.chosen_y0, fast.value, slow.chosen_y0, slow.value);
        }
        for c in &fast.per_candidate {
            let (best, _) = lp_vertex_oracle(&c.lp).unwrap();
            lps += 1;
            if best.map(|b| b.value) != c.solution.as_ref().map(|s| s.1.clone()) {
                disagreements += 1;
            }
        }
    }
    println!("{n} games, {lps} LPs, {disagreements} disagreements");
}
