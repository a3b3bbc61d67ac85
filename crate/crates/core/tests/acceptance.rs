//! Acceptance checks, one test per criterion. Each test prints a single
//! `criterion N: PASS|FAIL` line (visible with `--nocapture`) and fails the
//! test on any mismatch. All comparisons are exact.

use std::time::Instant;

use ccdim_core::calibration::{necessary_check, sufficient_check, CalibrationStatus};
use ccdim_core::ccdim::{affine_dim, construct_embedding_surrogate, lower_bound_at, permutation_columns_check, tightness_check, upper_bound};
use ccdim_core::linalg::{int, int_vec, rat, RatMatrix, RatVector, Rational};
use ccdim_core::losses::{abstain, hamming, ordinal, zero_one, LossMatrix};
use ccdim_core::ranking::{map_factors, map_loss, pd_loss, pd_loss_tilde, ranking_report, RankingKind};
use ccdim_core::surrogate::{absolute, crammer_singer, eps_insensitive, NormalSets, PLSurrogate};
use ccdim_core::HPolytope;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn report(id: u32, title: &str, started: Instant, outcome: Check) {
    let ms = started.elapsed().as_millis();
    match &outcome {
        Ok(()) => println!("criterion {id}: PASS  {title} ({ms} ms)"),
        Err(e) => println!("criterion {id}: FAIL  {title} ({ms} ms): {e}"),
    }
    if let Err(e) = outcome {
        panic!("criterion {id} failed: {e}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `{p in simplex_n : a_i . p <= b_i}` from integer rows and rational bounds.
fn simplex_with(n: usize, rows: &[(&[i64], (i64, i64))]) -> HPolytope {
    let rows = rows.iter().map(|(a, (p, q))| (int_vec(a), rat(*p, *q))).collect();
    HPolytope::simplex(n).unwrap().with_constraints(rows, vec![]).unwrap()
}

fn same_set(what: &str, got: &HPolytope, want: &HPolytope) -> Check {
    let eq = got.equals_polytope(want).map_err(|e| format!("{what}: {e}"))?;
    ensure(eq, || format!("{what}: computed {got:?} differs from expected {want:?}"))
}

#[test]
fn criterion_01_trigger_sets_n3() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        let zo = zero_one(3).unwrap();
        let want_zo = [
            simplex_with(3, &[(&[-1, 1, 0], (0, 1)), (&[-1, 0, 1], (0, 1))]),
            simplex_with(3, &[(&[1, -1, 0], (0, 1)), (&[0, -1, 1], (0, 1))]),
            simplex_with(3, &[(&[1, 0, -1], (0, 1)), (&[0, 1, -1], (0, 1))]),
        ];
        for (i, w) in want_zo.iter().enumerate() {
            same_set(&format!("0-1 Q{}", i + 1), &zo.trigger_set(i).unwrap(), w)?;
        }
        let ord = ordinal(3).unwrap();
        let want_ord = [
            simplex_with(3, &[(&[-1, 0, 0], (-1, 2))]),
            simplex_with(3, &[(&[1, 0, 0], (1, 2)), (&[0, 0, 1], (1, 2))]),
            simplex_with(3, &[(&[0, 0, -1], (-1, 2))]),
        ];
        for (i, w) in want_ord.iter().enumerate() {
            same_set(&format!("ord Q{}", i + 1), &ord.trigger_set(i).unwrap(), w)?;
        }
        let ab = abstain(3).unwrap();
        let want_ab = [
            simplex_with(3, &[(&[-1, 0, 0], (-1, 2))]),
            simplex_with(3, &[(&[0, -1, 0], (-1, 2))]),
            simplex_with(3, &[(&[0, 0, -1], (-1, 2))]),
            simplex_with(3, &[(&[1, 0, 0], (1, 2)), (&[0, 1, 0], (1, 2)), (&[0, 0, 1], (1, 2))]),
        ];
        for (i, w) in want_ab.iter().enumerate() {
            same_set(&format!("abstain Q{}", i + 1), &ab.trigger_set(i).unwrap(), w)?;
        }
        Ok(())
    })();
    report(1, "trigger sets of 0-1, ordinal, abstain (n=3)", t, outcome);
}

#[test]
fn criterion_02_crammer_singer_normal_sets() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        let cs = crammer_singer(3).unwrap();
        let cases: [(RatVector, RatVector, HPolytope); 4] = [
            (int_vec(&[1, 0, 0]), int_vec(&[0, 2, 2]), simplex_with(3, &[(&[-1, 0, 0], (-1, 2))])),
            (int_vec(&[0, 1, 0]), int_vec(&[2, 0, 2]), simplex_with(3, &[(&[0, -1, 0], (-1, 2))])),
            (int_vec(&[0, 0, 1]), int_vec(&[2, 2, 0]), simplex_with(3, &[(&[0, 0, -1], (-1, 2))])),
            (
                int_vec(&[0, 0, 0]),
                int_vec(&[1, 1, 1]),
                simplex_with(3, &[(&[1, 0, 0], (1, 2)), (&[0, 1, 0], (1, 2)), (&[0, 0, 1], (1, 2))]),
            ),
        ];
        for (i, (u, z, want)) in cases.iter().enumerate() {
            let res = cs.positive_normal_set(u).unwrap();
            ensure(&res.point_z == z, || format!("z{} = {:?}", i + 1, res.point_z))?;
            same_set(&format!("N(z{})", i + 1), &res.polytope, want)?;
        }
        let n4 = cs.positive_normal_set(&int_vec(&[0, 0, 0])).unwrap();
        ensure(n4.a.cols() == 6 && n4.b.cols() == 6, || "expected s = 6 active pieces at the origin".into())
    })();
    report(2, "Crammer-Singer normal sets at u1..u4 (n=3)", t, outcome);
}

#[test]
fn criterion_03_scalar_surrogate_normal_sets() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        let abs = absolute(3).unwrap();
        let abs_cases = [
            (int(1), simplex_with(3, &[(&[-1, 0, 0], (-1, 2))])),
            (int(2), simplex_with(3, &[(&[1, 0, 0], (1, 2)), (&[0, 0, 1], (1, 2))])),
            (int(3), simplex_with(3, &[(&[0, 0, -1], (-1, 2))])),
        ];
        for (u, want) in &abs_cases {
            let got = abs.positive_normal_set(std::slice::from_ref(u)).unwrap().polytope;
            same_set(&format!("abs N at u={u}"), &got, want)?;
        }
        let eps = eps_insensitive(3, &rat(1, 4)).unwrap();
        let eps_cases = [
            (rat(5, 4), simplex_with(3, &[(&[-1, 0, 0], (-1, 2))])),
            (rat(7, 4), simplex_with(3, &[(&[-1, 0, 1], (0, 1)), (&[1, 0, 0], (1, 2))])),
            (rat(9, 4), simplex_with(3, &[(&[1, 0, -1], (0, 1)), (&[0, 0, 1], (1, 2))])),
            (rat(11, 4), simplex_with(3, &[(&[0, 0, -1], (-1, 2))])),
        ];
        for (u, want) in &eps_cases {
            let got = eps.positive_normal_set(std::slice::from_ref(u)).unwrap().polytope;
            same_set(&format!("eps N at u={u}"), &got, want)?;
        }
        Ok(())
    })();
    report(3, "absolute and eps-insensitive normal sets", t, outcome);
}

#[test]
fn criterion_04_calibration_verdicts() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        let cs = crammer_singer(3).unwrap();
        let cs_pts = vec![int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0]), int_vec(&[0, 0, 1]), int_vec(&[0, 0, 0])];
        let v = necessary_check(&zero_one(3).unwrap(), &cs, &cs_pts).unwrap();
        ensure(v.status == CalibrationStatus::NotCalibrated, || format!("CS vs 0-1: {:?}", v.status))?;
        let witnesses: Vec<&RatVector> = v.violations.iter().map(|w| &v.points[w.point].u).collect();
        ensure(witnesses == vec![&int_vec(&[0, 0, 0])], || format!("CS vs 0-1 witnesses {witnesses:?}"))?;

        for (name, loss) in [("abstain", abstain(3).unwrap()), ("ordinal", ordinal(3).unwrap())] {
            let v = sufficient_check(&loss, &cs, &cs_pts).unwrap();
            ensure(v.status == CalibrationStatus::Calibrated, || format!("CS vs {name}: {:?}", v.status))?;
        }

        let abs = absolute(3).unwrap();
        let abs_pts: Vec<RatVector> = (1..=3).map(|u| int_vec(&[u])).collect();
        let eps = eps_insensitive(3, &rat(1, 4)).unwrap();
        let eps_pts: Vec<RatVector> = [5, 7, 9, 11].iter().map(|&k| vec![rat(k, 4)]).collect();
        let scalar: [(&str, &PLSurrogate, &Vec<RatVector>); 2] = [("abs", &abs, &abs_pts), ("eps", &eps, &eps_pts)];
        for (name, s, pts) in scalar {
            let v = sufficient_check(&ordinal(3).unwrap(), s, pts).unwrap();
            ensure(v.status == CalibrationStatus::Calibrated, || format!("{name} vs ordinal: {:?}", v.status))?;
            for (lname, loss) in [("0-1", zero_one(3).unwrap()), ("abstain", abstain(3).unwrap())] {
                let v = necessary_check(&loss, s, pts).unwrap();
                ensure(v.status == CalibrationStatus::NotCalibrated, || format!("{name} vs {lname}: {:?}", v.status))?;
            }
        }
        Ok(())
    })();
    report(4, "calibration verdicts for CS, absolute, eps-insensitive", t, outcome);
}

#[test]
fn criterion_05_zero_one_ccdim() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        for n in 2..=6 {
            let l = zero_one(n).unwrap();
            let up = upper_bound(&l).unwrap();
            let p: RatVector = vec![rat(1, n as i64); n];
            let lo = lower_bound_at(&l, &p).unwrap();
            ensure(up == n - 1 && lo.bound == n - 1, || format!("n={n}: upper {up}, lower {}", lo.bound))?;
        }
        Ok(())
    })();
    report(5, "0-1 loss: upper = lower = n-1 for n in 2..=6", t, outcome);
}

#[test]
fn criterion_06_hamming_affine_dim() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        for r in [2, 3] {
            let l = hamming(r).unwrap();
            let a = affine_dim(&l).unwrap();
            let rank = l.entries().rank();
            ensure(a == r && a < rank, || format!("r={r}: affdim {a}, rank {rank}"))?;
            ensure(upper_bound(&l).unwrap() == r, || format!("r={r}: upper bound"))?;
        }
        Ok(())
    })();
    report(6, "Hamming: affdim = r < rank for r in {2,3}", t, outcome);
}

#[test]
fn criterion_07_pairwise_disagreement() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        for r in 2..=4 {
            let pairs = r * (r - 1) / 2;
            let tilde = pd_loss_tilde(r, None).unwrap();
            let rank = tilde.entries().rank();
            ensure(rank == pairs, || format!("r={r}: centered rank {rank}"))?;
            let plain = pd_loss(r, None).unwrap();
            ensure(permutation_columns_check(&plain), || format!("r={r}: columns are not rearrangements"))?;
            ensure(tightness_check(&plain).unwrap().tight, || format!("r={r}: not tight"))?;
            ensure(tightness_check(&tilde).unwrap().tight, || format!("r={r}: centered matrix not tight"))?;
        }
        for r in [3, 4] {
            let rep = ranking_report(RankingKind::Pd, r, None).unwrap();
            let need = r * (r - 1) / 2 - 2;
            ensure(rep.report.lower_bound >= need, || format!("r={r}: lower {} < {need}", rep.report.lower_bound))?;
        }
        let r4 = ranking_report(RankingKind::Pd, 4, None).unwrap();
        ensure(r4.report.upper_bound == 6, || format!("r=4 upper {}", r4.report.upper_bound))
    })();
    report(7, "PD: centered rank, column permutations, tightness, lower bound", t, outcome);
}

#[test]
fn criterion_08_map_factorization() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        for r in 2..=4 {
            let l = map_loss(r).unwrap();
            let (a, b) = map_factors(r).unwrap();
            let ab = a.mul(&b).unwrap();
            let ones = RatMatrix::new(l.n(), l.k(), vec![Rational::from_integer(1.into()); l.n() * l.k()]).unwrap();
            for y in 0..l.n() {
                for s in 0..l.k() {
                    let lhs = &ones[(y, s)] - &ab[(y, s)];
                    ensure(&lhs == l.entry(y, s), || format!("r={r}: entry ({y},{s}) mismatch"))?;
                }
            }
            let ad = affine_dim(&l).unwrap();
            ensure(ad <= r * (r + 1) / 2, || format!("r={r}: affdim {ad}"))?;
        }
        for r in [3usize, 4] {
            let (a, b) = map_factors(r).unwrap();
            let l = map_loss(r).unwrap();
            let (ra, rb, rl) = (a.rank(), b.rank(), l.entries().rank());
            ensure(ra + 1 >= r * (r + 1) / 2, || format!("r={r}: rank(A) = {ra}"))?;
            ensure(rb >= r * (r - 1) / 2, || format!("r={r}: rank(B) = {rb}"))?;
            ensure(rl + 2 >= r * (r - 1) / 2, || format!("r={r}: rank(L) = {rl}"))?;
        }
        Ok(())
    })();
    report(8, "MAP: factorization identity and rank bounds", t, outcome);
}

#[test]
fn criterion_09_embedding_surrogate() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        let losses: [(&str, LossMatrix); 4] = [
            ("0-1", zero_one(3).unwrap()),
            ("ordinal", ordinal(3).unwrap()),
            ("abstain", abstain(3).unwrap()),
            ("hamming r=2", hamming(2).unwrap()),
        ];
        for (name, l) in losses {
            let e = construct_embedding_surrogate(&l).unwrap();
            let ad = affine_dim(&l).unwrap();
            ensure(e.d() == ad, || format!("{name}: d = {} but affdim = {ad}", e.d()))?;
            for (t, u) in e.anchors().iter().enumerate() {
                ensure(e.evaluate(u).unwrap() == l.column(t), || format!("{name}: anchor {t}"))?;
            }
            let v = sufficient_check(&l, &e, e.anchors()).unwrap();
            ensure(v.status == CalibrationStatus::Calibrated, || format!("{name}: {:?}", v.status))?;
        }
        Ok(())
    })();
    report(9, "affine-embedding surrogate is calibrated in affdim dimensions", t, outcome);
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> RatVector {
    // Integer weights with frequent zeros and ties so boundary cases occur.
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let total: i64 = w.iter().sum();
    if total == 0 {
        return vec![rat(1, n as i64); n];
    }
    w.iter().map(|&x| rat(x, total)).collect()
}

#[test]
fn criterion_10_oracle_equivalence() {
    let t = Instant::now();
    let outcome = (|| -> Check {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        // Trigger membership against the Bayes argmin.
        let losses = [zero_one(3).unwrap(), ordinal(4).unwrap(), abstain(3).unwrap(), hamming(2).unwrap(), zero_one(4).unwrap()];
        let triggers: Vec<Vec<HPolytope>> = losses.iter().map(|l| l.trigger_sets().unwrap()).collect();
        for i in 0..200 {
            let which = i % losses.len();
            let l = &losses[which];
            let p = random_distribution(&mut rng, l.n());
            let argmin = l.bayes_argmin(&p).unwrap();
            for (tt, q) in triggers[which].iter().enumerate() {
                let inside = q.contains_point(&p).unwrap();
                ensure(inside == argmin.contains(&tt), || format!("p={p:?}, t={tt}"))?;
            }
        }

        // Normal-set membership against minimization over a grid.
        let surrogates: Vec<(PLSurrogate, Rational, Rational, Rational)> = vec![
            (absolute(3).unwrap(), int(-3), int(3), rat(1, 4)),
            (eps_insensitive(3, &rat(1, 4)).unwrap(), int(-3), int(3), rat(1, 4)),
            (crammer_singer(3).unwrap(), int(-3), int(3), rat(1, 4)),
        ];
        for (s, lo, hi, step) in &surrogates {
            let grid = s.grid(lo, hi, step).unwrap();
            let mut values: Vec<RatVector> = grid.iter().map(|u| s.evaluate(u).unwrap()).collect();
            values.sort();
            values.dedup();
            for u in NormalSets::default_points(s) {
                let z = s.evaluate(&u).unwrap();
                let mut probes: Vec<RatVector> = (0..12).map(|_| random_distribution(&mut rng, 3)).collect();
                probes.extend(s.positive_normal_set(&u).unwrap().polytope.vertices().unwrap().iter().cloned());
                for p in probes {
                    let risk = |v: &RatVector| -> Rational { p.iter().zip(v).map(|(a, b)| a * b).sum() };
                    let best = values.iter().map(risk).min().unwrap();
                    let grid_min = risk(&z) == best;
                    let member = s.normal_membership(&u, &p).unwrap();
                    ensure(member == grid_min, || format!("u={u:?}, p={p:?}: LP {member}, grid {grid_min}"))?;
                }
            }
        }

        // Face dimensions on planar polytopes: square and triangle.
        let square = HPolytope::from_constraints(
            2,
            vec![
                (int_vec(&[-1, 0]), int(0)),
                (int_vec(&[1, 0]), int(2)),
                (int_vec(&[0, -1]), int(0)),
                (int_vec(&[0, 1]), int(2)),
            ],
            vec![],
        )
        .unwrap();
        let triangle = HPolytope::from_points(2, &[int_vec(&[0, 0]), int_vec(&[3, 0]), int_vec(&[0, 3])]).unwrap();
        for (name, poly, pts) in [
            ("square", &square, [int_vec(&[1, 1]), int_vec(&[2, 1]), int_vec(&[2, 2])]),
            ("triangle", &triangle, [int_vec(&[1, 1]), vec![rat(3, 2), rat(3, 2)], int_vec(&[0, 3])]),
        ] {
            let dims: Vec<usize> = pts.iter().map(|p| poly.feasible_subspace_dim(p).unwrap()).collect();
            ensure(dims == vec![2, 1, 0], || format!("{name}: {dims:?}"))?;
        }
        Ok(())
    })();
    report(10, "oracle equivalences: trigger/argmin, normal/grid, face dimensions", t, outcome);
}
