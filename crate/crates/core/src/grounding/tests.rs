use super::*;
use crate::field::{parse_quadratic, Approx, QuadExt, Rational};
use crate::fixtures;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn qv(xs: &[i64], d: i64) -> Vec<Rational> {
    xs.iter().map(|&n| q(n, d)).collect()
}

fn solve<F: OrderedField>(os: &ObservationSpace<F>) -> AffineSolutionSet<F> {
    solve_affine(&assemble_system(os).unwrap()).unwrap()
}

/// Values listed in point order, rearranged to the system's variable order.
fn by_label<F: OrderedField>(s: &AffineSolutionSet<F>, points: &[String], values: &[F]) -> Vec<F> {
    s.labels().iter().map(|l| values[points.iter().position(|p| p == l).unwrap()].clone()).collect()
}

#[test]
fn piponi_unique_grounding() {
    let os = fixtures::piponi::<Rational>();
    let s = solve(&os);
    assert_eq!(s.dim(), 0);
    assert_eq!(s.labels(), ["00", "01", "10", "11"]);
    assert_eq!(s.particular, vec![q(-1, 2), q(1, 2), q(1, 2), q(1, 2)]);
    let report = nonneg_feasibility(&s);
    assert!(!report.is_feasible());
    let Feasibility::Infeasible(cert) = report.result else { unreachable!() };
    assert!(cert.verifies(&s.system));
}

#[test]
fn piponi_moments() {
    let s = solve(&fixtures::piponi::<Rational>());
    let g = SignedGrounding::new(s.particular.clone(), s.labels().to_vec()).unwrap();
    let l = signed_moments(&g, &qv(&[0, 0, 1, 1], 1)).unwrap();
    assert_eq!((l.mean, l.variance), (q(1, 1), q(0, 1)));
    let sum = signed_moments(&g, &qv(&[0, 1, 1, 2], 1)).unwrap();
    assert_eq!((sum.mean, sum.variance), (q(2, 1), q(-1, 1)));
    assert!(signed_moments(&g, &qv(&[0, 1], 1)).is_err());
}

#[test]
fn piponi_in_floats() {
    let s = solve(&fixtures::piponi::<Approx>());
    let expected = [-0.5, 0.5, 0.5, 0.5];
    for (v, e) in s.particular.iter().zip(expected) {
        assert!((v.to_f64() - e).abs() < 1e-12);
    }
}

#[test]
fn inconsistent_system_has_witness() {
    // x0 + x1 = 1, x0 + x1 = 2.
    let sys = LinearSystem::new(
        vec![qv(&[1, 1], 1), qv(&[1, 1], 1)],
        qv(&[1, 2], 1),
        vec!["a".into(), "b".into()],
        vec!["r0".into(), "r1".into()],
    )
    .unwrap();
    let err = solve_affine(&sys).unwrap_err();
    assert!(err.verifies(&sys));
}

#[test]
fn perturbed_space_is_not_assembled() {
    // Both atoms of the A-algebra disagree between AB and AC.
    assert_eq!(assemble_system(&fixtures::schneider_perturbed()), Err(Error::Inconsistent(2)));
}

fn feynman2_displayed_form<F: OrderedField>(z: &F, x: &F) -> (Vec<F>, Vec<F>) {
    let one = F::one();
    let quarter = F::from_ratio(1, 4);
    let p = vec![
        (one.clone() + z.clone() + x.clone()) * quarter.clone(),
        (one.clone() + z.clone() - x.clone()) * quarter.clone(),
        (one.clone() - z.clone() + x.clone()) * quarter.clone(),
        (one - z.clone() - x.clone()) * quarter.clone(),
    ];
    let d = vec![quarter.clone(), -quarter.clone(), -quarter.clone(), quarter];
    (p, d)
}

fn feynman2_bounds<F: OrderedField>(z: &F, x: &F) -> (F, F) {
    let one = F::one();
    let m = (-one.clone() - z.clone() - x.clone()).max_field(-one.clone() + z.clone() + x.clone());
    let mm = (one.clone() + z.clone() - x.clone()).min_field(one - z.clone() + x.clone());
    (m, mm)
}

#[test]
fn feynman2_interval_matches_bounds_exactly() {
    let states = ["1,0", "3/5,4/5", "1,1", "1,i", "5/13,12/13 i", "2/3,1/3+2/3 i", "1,-1/2"];
    for text in states {
        let st: fixtures::ExactQubit = text.parse().unwrap();
        let (x, _, z) = st.expectations();
        let s = solve(&fixtures::feynman2(z.clone(), x.clone()).unwrap());
        assert_eq!(s.dim(), 1);
        let (p, d) = feynman2_displayed_form(&z, &x);
        let s = s.reparameterize(p, vec![d]).unwrap();
        let iv = parametric_interval(&s).unwrap();
        let (m, mm) = feynman2_bounds(&z, &x);
        assert_eq!(iv.lower, Some(m.clone()), "{text}");
        assert_eq!(iv.upper, Some(mm.clone()), "{text}");
        assert!(m <= mm);
        let report = nonneg_feasibility(&s);
        assert!(report.is_feasible());
        let Feasibility::Witness(w) = report.result else { unreachable!() };
        assert!(s.contains(&w) && w.iter().all(|v| v.is_nonnegative()));
    }
}

#[test]
fn feynman2_at_zero_state_is_pinned() {
    let st = fixtures::ExactQubit::zero_state();
    let (x, _, z) = st.expectations();
    let s = solve(&fixtures::feynman2(z.clone(), x.clone()).unwrap());
    let (p, d) = feynman2_displayed_form(&z, &x);
    let iv = parametric_interval(&s.reparameterize(p, vec![d]).unwrap()).unwrap();
    assert_eq!((iv.lower, iv.upper), (Some(q(0, 1)), Some(q(0, 1))));
}

#[test]
fn schneider_one_parameter_family() {
    let os = fixtures::schneider();
    let s = solve(&os);
    assert_eq!(s.dim(), 1);
    let points = os.space().labels().to_vec();
    let s = s.parameterize_by(&[points[0].as_str()]).unwrap();
    let v = |t: &str| parse_quadratic(t, 2).unwrap();
    // P(i) at t = P(0) = 0, then the coefficient of t.
    let at_zero = ["0", "1/4", "1/4-1/8 r", "1/8 r", "1/4+1/8 r", "-1/8 r", "0", "1/4"].map(v);
    let slope = ["1", "-1", "-1", "1", "-1", "1", "1", "-1"].map(v);
    assert_eq!(s.particular, by_label(&s, &points, &at_zero));
    assert_eq!(s.basis[0], by_label(&s, &points, &slope));

    let report = nonneg_feasibility(&s);
    let Feasibility::Infeasible(cert) = &report.result else { panic!("expected a certificate") };
    assert!(cert.verifies(&s.system));
    assert!(report.interval.unwrap().is_empty());

    // P{2,5} does not depend on t and is negative.
    let i2 = s.system.var_index(&points[2]).unwrap();
    let i5 = s.system.var_index(&points[5]).unwrap();
    let p25 = s.particular[i2].clone() + s.particular[i5].clone();
    assert_eq!(p25, v("1/4-1/4 r"));
    assert!(p25.is_negative());
    assert!((s.basis[0][i2].clone() + s.basis[0][i5].clone()).is_zero());
}

fn hardy_vector(v10: &[i64]) -> Vec<Rational> {
    // Order v0 v1 v2 v3 v5 v6 v7 v10 v11 v15; the rest follow from the swap.
    let idx = [0, 1, 2, 3, 5, 6, 7, 10, 11, 15];
    let mut full = vec![0i64; 16];
    for (&i, &x) in idx.iter().zip(v10) {
        full[i] = x;
    }
    for (a, b) in [(1, 4), (2, 8), (3, 12), (6, 9), (7, 13), (11, 14)] {
        full[b] = full[a];
    }
    qv(&full, 12)
}

fn hardy_pairs() -> Vec<(String, String)> {
    let s = fixtures::hardy_swap();
    (0..16).filter(|&i| i < s[i]).map(|i| (format!("{i:04b}"), format!("{:04b}", s[i]))).collect()
}

#[test]
fn hardy_general_and_symmetric_solutions() {
    let os = fixtures::hardy::<Rational>();
    let points = os.space().labels().to_vec();
    let full = solve(&os);
    assert_eq!(full.system.vars(), 16);
    assert_eq!(full.dim(), 7);

    let pairs = hardy_pairs();
    assert_eq!(pairs.len(), 6);
    let eqs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let sym = apply_constraints(&full, &eqs).unwrap();
    assert_eq!(sym.dim(), 4);

    let particular = by_label(&full, &points, &hardy_vector(&[-3, -1, 2, 0, 9, 2, 0, 0, 0, 0]));
    assert!(sym.contains(&particular));
    let directions = [
        [2, -1, -1, 1, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, -2, -1, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, -1, 0, -2, 1, 0],
        [-1, 1, 1, 0, -1, -1, 0, -1, 0, 1],
    ];
    let basis: Vec<Vec<Rational>> = directions.iter().map(|d| by_label(&full, &points, &hardy_vector(d))).collect();
    for d in &basis {
        assert!(sym.contains_direction(d));
    }
    let displayed = sym.reparameterize(particular, basis).unwrap();
    assert!(displayed.same_set(&sym));
}

#[test]
fn hardy_has_no_nonnegative_grounding() {
    let s = solve(&fixtures::hardy::<Rational>());
    let report = nonneg_feasibility(&s);
    let Feasibility::Infeasible(cert) = &report.result else { panic!("expected a certificate") };
    assert!(cert.verifies(&s.system));
    assert!(report.interval.is_none());
    assert_eq!(vertex_enumerate(&s, DEFAULT_MAX_DIM), Err(Error::DimensionCap { dim: 7, cap: 6 }));
    assert!(vertex_enumerate(&s, 7).unwrap().is_empty());
}

#[test]
fn hardy_symmetrizer_lands_in_symmetric_set() {
    let os = fixtures::hardy::<Rational>();
    let points = os.space().labels().to_vec();
    let full = solve(&os);
    let swap = fixtures::hardy_swap();
    let images: Vec<usize> = full
        .labels()
        .iter()
        .map(|l| {
            let i = points.iter().position(|p| p == l).unwrap();
            full.system.var_index(&points[swap[i]]).unwrap()
        })
        .collect();
    let perm = Permutation::new(images).unwrap();
    assert_eq!(perm.order(), 2);
    let sym = symmetrize(&full, &perm).unwrap();
    let pairs = hardy_pairs();
    let eqs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let constrained = apply_constraints(&full, &eqs).unwrap();
    for t in [vec![q(0, 1); 7], qv(&[1, -2, 3, 0, 5, -1, 7], 3)] {
        let v = full.point(&t);
        let w = sym.apply(&v);
        assert!(constrained.contains(&w));
        assert_eq!(perm.apply(&w), w);
    }
    // A transposition of two unrelated variables is not an automorphism.
    let mut bad: Vec<usize> = (0..16).collect();
    bad.swap(0, 1);
    assert!(matches!(symmetrize(&full, &Permutation::new(bad).unwrap()), Err(Error::NotAutomorphism(_))));
}

#[test]
fn contradictory_constraints_are_reported() {
    let s = solve(&fixtures::piponi::<Rational>());
    assert!(matches!(apply_constraints(&s, &[("00", "01")]), Err(Error::Unsolvable(_))));
    assert!(matches!(apply_constraints(&s, &[("00", "zz")]), Err(Error::UnknownVariable(_))));
}

#[test]
fn feynman3_vertices_at_the_center() {
    let z = q(0, 1);
    let s = solve(&fixtures::feynman3(z.clone(), z.clone(), z).unwrap());
    assert_eq!(s.dim(), 4);
    let vertices = vertex_enumerate(&s, DEFAULT_MAX_DIM).unwrap();
    assert!(!vertices.is_empty());
    for v in &vertices {
        assert!(v.is_nonnegative() && s.contains(&v.values));
        // A vertex has `dim` independent tight constraints: its support has at most n - dim points.
        let zeros = v.values.iter().filter(|x| x.is_zero()).count();
        assert!(zeros >= s.dim());
    }
    // The uniform grounding lies inside, hence is a mix of vertices; it is not a vertex itself.
    let uniform = vec![q(1, 8); 8];
    assert!(s.contains(&uniform));
    assert!(!vertices.iter().any(|v| v.values == uniform));
}

#[test]
fn quadratic_witness_is_exact() {
    let os = fixtures::schneider();
    let s = solve(&os);
    // Nonnegative part is empty, so no vertices.
    assert!(vertex_enumerate(&s, DEFAULT_MAX_DIM).unwrap().is_empty());
    let half_root: QuadExt = parse_quadratic("1/2 r", 2).unwrap();
    assert!((half_root.clone() * half_root).eq_field(&QuadExt::from_ratio(1, 2)));
}

#[test]
fn signed_grounding_must_sum_to_one() {
    assert!(SignedGrounding::new(qv(&[1, 1], 2), vec!["a".into(), "b".into()]).is_ok());
    assert!(SignedGrounding::new(qv(&[1, 1], 1), vec!["a".into(), "b".into()]).is_err());
}

/// Scans `t` over a rational lattice for a nonnegative point of a
/// one-dimensional set.
fn lattice_feasible(s: &AffineSolutionSet<Rational>) -> bool {
    (-400..=400).any(|k| s.point(&[q(k, 40)]).iter().all(|v| v.is_nonnegative()))
}

fn small_system() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>)> {
    // Two equations in three variables with small integer data.
    (proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 2), proptest::collection::vec(-4i64..=4, 2))
}

proptest! {
    #[test]
    fn feasibility_results_certify_themselves((a, b) in small_system()) {
        let labels = vec!["x".into(), "y".into(), "z".into()];
        let sys = LinearSystem::new(
            a.iter().map(|r| qv(r, 1)).collect(),
            qv(&b, 1),
            labels,
            vec!["r0".into(), "r1".into()],
        ).unwrap();
        let Ok(s) = solve_affine(&sys) else { return Ok(()) };
        let report = nonneg_feasibility(&s);
        match &report.result {
            Feasibility::Witness(w) => {
                prop_assert!(sys.satisfied_by(w));
                prop_assert!(w.iter().all(|v| v.is_nonnegative()));
            }
            Feasibility::Infeasible(cert) => {
                prop_assert!(cert.verifies(&sys));
                if s.dim() == 1 {
                    prop_assert!(!lattice_feasible(&s));
                }
            }
        }
        if s.dim() == 1 {
            prop_assert_eq!(report.is_feasible(), !report.interval.unwrap().is_empty());
        }
    }

    #[test]
    fn row_order_does_not_change_the_set(seed in any::<u64>()) {
        let sys = assemble_system(&fixtures::hardy::<Rational>()).unwrap();
        let mut order: Vec<usize> = (0..sys.rows()).collect();
        let mut state = seed;
        for i in (1..order.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let shuffled = LinearSystem::new(
            order.iter().map(|&i| sys.a[i].clone()).collect(),
            order.iter().map(|&i| sys.b[i].clone()).collect(),
            sys.labels.clone(),
            order.iter().map(|&i| sys.row_labels[i].clone()).collect(),
        ).unwrap();
        let s1 = solve_affine(&sys).unwrap();
        let s2 = solve_affine(&shuffled).unwrap();
        prop_assert!(s1.same_set(&s2) && s2.same_set(&s1));
    }

    #[test]
    fn feynman2_float_interval(theta in 0.0..std::f64::consts::PI, phi in 0.0..(2.0 * std::f64::consts::PI)) {
        let z = theta.cos();
        let x = theta.sin() * phi.cos();
        let s = solve(&fixtures::feynman2(Approx::new(z), Approx::new(x)).unwrap());
        let (p, d) = feynman2_displayed_form(&Approx::new(z), &Approx::new(x));
        let iv = parametric_interval(&s.reparameterize(p, vec![d]).unwrap()).unwrap();
        let m = (-1.0 - z - x).max(-1.0 + z + x);
        let mm = (1.0 + z - x).min(1.0 - z + x);
        prop_assert!((iv.lower.unwrap().to_f64() - m).abs() < 1e-12);
        prop_assert!((iv.upper.unwrap().to_f64() - mm).abs() < 1e-12);
        prop_assert!(m <= mm);
    }
}
