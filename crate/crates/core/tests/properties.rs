use ipfp::fictitious_play::{alternating_step, init_state, simulate, IpPolicy};
use ipfp::gamefile::{serialize, GameFile, Metadata};
use ipfp::lp::{LinearProgram, RowLabel};
use ipfp::oracle::{best_response_oracle, lp_vertex_oracle, random_validated_game};
use ipfp::rational::{frac, int};
use ipfp::synthesis::{synthesize_n_player, try_solve_lp};
use ipfp::trajectory::{anchor_frequency_closed_form, block_counts, tau_star};
use ipfp::{ActionProfile, Game, MixedStrategy, Player, Rational, TieRule};
use num_bigint::BigInt;
use proptest::prelude::*;

fn arb_game() -> impl Strategy<Value = Game> {
    prop::collection::vec(1usize..=3, 2..=3).prop_flat_map(|dims| {
        let n = dims.len();
        let cells: usize = dims.iter().product();
        prop::collection::vec(-6i64..=9, cells * n).prop_map(move |vals| {
            let players = dims
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let names: Vec<String> = (0..k).map(|a| format!("a{a}")).collect();
                    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                    Player::new(format!("p{i}"), &refs)
                })
                .collect();
            let mut it = vals.into_iter();
            Game::from_fn(players, |_| (0..n).map(|_| int(it.next().unwrap())).collect()).unwrap()
        })
    })
}

fn arb_tie() -> impl Strategy<Value = TieRule> {
    prop_oneof![Just(TieRule::LowestIndex), Just(TieRule::Inertia)]
}

fn arb_lp() -> impl Strategy<Value = LinearProgram> {
    (1usize..=4, 0usize..=4).prop_flat_map(|(m, r)| {
        (prop::collection::vec(-5i64..=5, m), prop::collection::vec(prop::collection::vec(-5i64..=5, m), r)).prop_map(
            |(obj, rows)| LinearProgram {
                objective: obj.into_iter().map(int).collect(),
                labels: (0..rows.len()).map(|i| RowLabel { opponent: 1, deviation: i }).collect(),
                rows: rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect(),
            },
        )
    })
}

fn arb_mix() -> impl Strategy<Value = MixedStrategy> {
    prop::collection::vec(0u64..=6, 1..=5)
        .prop_filter("some mass", |v| v.iter().any(|&c| c > 0))
        .prop_map(|c| MixedStrategy::from_counts(0, &c).unwrap())
}

fn r(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_conserve_and_average_recurs(game in arb_game(), tie in arb_tie(), horizon in 1usize..60) {
        let init = ActionProfile::new(&game, vec![0; game.player_count()]).unwrap();
        let trace = simulate(&game, &IpPolicy::FictitiousPlay, horizon, tie, &init).unwrap();
        for i in 0..game.player_count() {
            let st = &trace.final_state;
            prop_assert_eq!(st.counts(i).iter().sum::<u64>(), horizon as u64);
            prop_assert_eq!(st.steps_counted(i), horizon as u64);
            for a in 0..game.action_count(i) {
                let seen = trace.steps.iter().filter(|s| s.profile[i] == a).count() as u64;
                prop_assert_eq!(st.counts(i)[a], seen);
            }
        }
        let mut prev = int(0);
        for s in &trace.steps {
            let expected = (&prev * r(s.t - 1) + &s.payoffs[0]) / r(s.t);
            prop_assert_eq!(&s.ip_average, &expected);
            prev = s.ip_average.clone();
        }
    }

    #[test]
    fn opponents_best_respond_to_alternating_beliefs(
        game in arb_game(),
        tie in arb_tie(),
        history in prop::collection::vec(0usize..3, 1..12),
    ) {
        let init = ActionProfile::new(&game, vec![0; game.player_count()]).unwrap();
        let mut state = init_state(&game, &init).unwrap();
        for x in history {
            let ip = x % game.action_count(0);
            let before = state.clone();
            let (profile, next) = alternating_step(&game, &state, ip, tie).unwrap();
            prop_assert_eq!(profile.as_slice()[0], ip);
            for j in 1..game.player_count() {
                let others: Vec<MixedStrategy> = (0..game.player_count())
                    .filter(|&i| i != j)
                    .map(|i| {
                        let mut c = before.counts(i).to_vec();
                        if i < j {
                            c[profile.as_slice()[i]] += 1;
                        }
                        MixedStrategy::from_counts(i, &c).unwrap()
                    })
                    .collect();
                let set = best_response_oracle(&game, j, &others);
                prop_assert!(set.contains(&profile.as_slice()[j]));
                if tie == TieRule::LowestIndex {
                    prop_assert_eq!(profile.as_slice()[j], set[0]);
                } else if set.contains(&before.last_actions()[j]) {
                    prop_assert_eq!(profile.as_slice()[j], before.last_actions()[j]);
                }
            }
            state = next;
        }
    }

    #[test]
    fn simplex_matches_vertex_enumeration(lp in arb_lp()) {
        let (best, vertices) = lp_vertex_oracle(&lp).unwrap();
        let fast = try_solve_lp(&lp);
        prop_assert_eq!(best.as_ref().map(|b| b.value.clone()), fast.as_ref().map(|f| f.1.clone()));
        if let Some((q, v)) = fast {
            prop_assert!(lp.is_feasible(q.probs()));
            prop_assert_eq!(lp.value(q.probs()), v.clone());
            let optimal: Vec<_> = vertices.iter().filter(|x| x.value == v).collect();
            prop_assert!(optimal.iter().all(|x| x.q.probs() >= q.probs()));
        }
    }

    #[test]
    fn synthesis_is_affine_covariant(seed in 0u64..400, a in 1i64..5, b in -4i64..5, c in 1i64..4) {
        let game = random_validated_game(seed);
        let players = game.players().to_vec();
        let scaled = Game::from_fn(players, |p| {
            let u = game.payoff_at(p);
            vec![&u[0] * int(a) + int(b), &u[1] * int(c) - int(b), u[2].clone() + frac(1, c)]
        })
        .unwrap();
        let s = synthesize_n_player(&game).unwrap();
        let t = synthesize_n_player(&scaled).unwrap();
        prop_assert_eq!(s.chosen_y0, t.chosen_y0);
        prop_assert_eq!(&s.mix, &t.mix);
        prop_assert_eq!(&s.value * int(a) + int(b), t.value);
    }

    #[test]
    fn block_composition(mix in arb_mix()) {
        let ts = tau_star(&mix);
        let counts = block_counts(&mix, ts);
        prop_assert_eq!(counts.iter().sum::<usize>(), ts);
        for (a, &k) in counts.iter().enumerate() {
            prop_assert_eq!(r(k) / r(ts), mix.prob(a).clone());
        }
        for smaller in 1..ts {
            prop_assert!(mix.probs().iter().any(|p| !(p * r(smaller)).is_integer()));
        }
    }

    #[test]
    fn anchor_frequency_stays_above_target(mix in arb_mix(), extra in 0usize..5, p in 0usize..30) {
        let ts = tau_star(&mix);
        let q = mix.prob(0).clone();
        let tau_prime = ts + extra;
        let k = block_counts(&mix, ts)[0];
        for t in 0..=k {
            prop_assert!(anchor_frequency_closed_form(tau_prime, ts, &q, p, t) >= q);
        }
    }

    #[test]
    fn game_files_round_trip(game in arb_game(), title in proptest::option::of("[a-z ]{0,12}")) {
        let meta = Metadata { title, source: None };
        let back = GameFile::parse(&serialize(&game, &meta)).unwrap();
        prop_assert_eq!(back.game, game);
        prop_assert_eq!(back.metadata, meta);
    }
}
