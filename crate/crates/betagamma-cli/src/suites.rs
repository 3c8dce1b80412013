//! Verification suites behind `betagamma verify`: each returns the same
//! report type the statistical tests use, with deterministic checks
//! reported as (statistic = worst observed, critical = pinned tolerance).

use betagamma::involution::{apply_tab, jacobian_tab, InvolutionPoint, LinearH};
use betagamma::lattice::{interior_ratio_samples, log_z_replicas};
use betagamma::models::{ModelSpec, StationaryTriple};
use betagamma::rng::{derive_seed, rng_from_seed};
use betagamma::stats::{
    characterization_check, invariance_suite, ks_two_sample, Characterization, TestReport,
};
use betagamma::tolerances::{
    INVOLUTION_ROUNDTRIP_REL, JACOBIAN_FD_REL, POLY_IDENTITY_REL, Q_INVARIANCE_TOL,
    RATIO_PERSISTENCE_REL, SPLIT_IDENTITY_TOL,
};
use betagamma::verify::{
    halton_plan, halton_sy_plan, polynomial_identity_terms, q_invariance_check,
    split_identity_residual, DensityTriple,
};
use betagamma::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Involution,
    Q,
    Identity,
    Invariance,
    Stationarity,
    Characterization,
    All,
}

pub struct SuiteCtx {
    pub spec: ModelSpec,
    pub triple: StationaryTriple,
    pub seed: u64,
    pub level: f64,
    pub samples: usize,
    pub replicas: usize,
    pub points: usize,
}

impl SuiteCtx {
    fn h(&self) -> LinearH {
        self.spec.h()
    }

    fn density(&self) -> DensityTriple {
        DensityTriple::from_model(&self.triple, &self.h())
    }
}

pub fn run(which: Suite, ctx: &SuiteCtx) -> Result<Vec<TestReport>> {
    match which {
        Suite::Involution => involution_suite(ctx),
        Suite::Q => q_suite(ctx),
        Suite::Identity => identity_suite(ctx),
        Suite::Invariance => invariance_suite(&ctx.triple, &ctx.h(), ctx.samples, ctx.seed, ctx.level),
        Suite::Stationarity => stationarity_suite(ctx),
        Suite::Characterization => characterization_suite(ctx),
        Suite::All => {
            let mut all = Vec::new();
            for s in [
                Suite::Involution,
                Suite::Q,
                Suite::Identity,
                Suite::Invariance,
                Suite::Stationarity,
                Suite::Characterization,
            ] {
                all.extend(run(s, ctx)?);
            }
            Ok(all)
        }
    }
}

fn involution_suite(ctx: &SuiteCtx) -> Result<Vec<TestReport>> {
    let h = ctx.h();
    let dom = ctx.spec.domain();
    let mut rng = rng_from_seed(ctx.seed);
    let mut worst_roundtrip = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for _ in 0..ctx.points {
        let p = dom.sample(&mut rng)?;
        let q = apply_tab(&h, p)?;
        let back = apply_tab(&h, q)?;
        for (orig, rec) in [(p.r1, back.r1), (p.r2, back.r2), (p.y, back.y)] {
            worst_roundtrip = worst_roundtrip.max((orig - rec).abs() / orig.abs());
        }
        worst_ratio = worst_ratio.max(((q.r2 / q.r1) - (p.r2 / p.r1)).abs() / (p.r2 / p.r1));
    }

    let fd_points = ctx.points.min(1000);
    let mut worst_jac = 0.0f64;
    for _ in 0..fd_points {
        let p = dom.sample(&mut rng)?;
        let (m, _) = jacobian_tab(&h, p)?;
        let fd = fd_jacobian(&h, &dom, p)?;
        let max_abs = m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs()));
        for i in 0..3 {
            for j in 0..3 {
                let denom = m[i][j].abs().max(fd[i][j].abs()).max(1e-6 * max_abs);
                worst_jac = worst_jac.max((m[i][j] - fd[i][j]).abs() / denom);
            }
        }
    }

    Ok(vec![
        TestReport::new(
            "involution: T∘T returns the input",
            worst_roundtrip,
            INVOLUTION_ROUNDTRIP_REL,
            vec![ctx.points],
            ctx.seed,
        ),
        TestReport::new(
            "involution: output ratio persists",
            worst_ratio,
            RATIO_PERSISTENCE_REL,
            vec![ctx.points],
            ctx.seed,
        ),
        TestReport::new(
            "involution: Jacobian matches finite differences",
            worst_jac,
            JACOBIAN_FD_REL,
            vec![fd_points],
            ctx.seed,
        ),
    ])
}

fn fd_jacobian(
    h: &LinearH,
    dom: &betagamma::involution::DomainSpec,
    p: InvolutionPoint,
) -> Result<[[f64; 3]; 3]> {
    let coords = [p.r1, p.r2, p.y];
    let gaps = [
        dom.r1_interval().gap(p.r1),
        dom.r2_interval().gap(p.r2),
        dom.y_interval().gap(p.y),
    ];
    let mut m = [[0.0; 3]; 3];
    for k in 0..3 {
        let step = (3e-6 * coords[k].abs()).min(0.2 * gaps[k]);
        let eval = |delta: f64| -> Result<InvolutionPoint> {
            let mut c = coords;
            c[k] += delta;
            apply_tab(h, InvolutionPoint::new(c[0], c[1], c[2]))
        };
        let plus = eval(step)?;
        let minus = eval(-step)?;
        let cols = [
            (plus.r1 - minus.r1) / (2.0 * step),
            (plus.r2 - minus.r2) / (2.0 * step),
            (plus.y - minus.y) / (2.0 * step),
        ];
        for (row, v) in cols.into_iter().enumerate() {
            m[row][k] = v;
        }
    }
    Ok(m)
}

fn q_suite(ctx: &SuiteCtx) -> Result<Vec<TestReport>> {
    let d = q_invariance_check(&ctx.density(), ctx.points, ctx.seed)?;
    Ok(vec![TestReport::new(
        "q-condition: max |log q∘T − log q|",
        d,
        Q_INVARIANCE_TOL,
        vec![ctx.points],
        ctx.seed,
    )])
}

fn identity_suite(ctx: &SuiteCtx) -> Result<Vec<TestReport>> {
    let t = ctx.density();
    let n = ctx.points.min(2000);
    let mut worst_split = 0.0f64;
    for p in halton_plan(&t, n, ctx.seed)? {
        worst_split = worst_split.max(split_identity_residual(&t, p)?.abs());
    }
    let mut worst_poly = 0.0f64;
    for (s, y) in halton_sy_plan(&t, n, ctx.seed)? {
        let (terms, scale) = polynomial_identity_terms(&t, s, y)?;
        let residual: f64 = terms.iter().sum();
        worst_poly = worst_poly.max(residual.abs() / scale.max(1.0));
    }
    Ok(vec![
        TestReport::new(
            "identity: split residual",
            worst_split,
            SPLIT_IDENTITY_TOL,
            vec![n],
            ctx.seed,
        ),
        TestReport::new(
            "identity: polynomial residual",
            worst_poly,
            POLY_IDENTITY_REL,
            vec![n],
            ctx.seed,
        ),
    ])
}

fn stationarity_suite(ctx: &SuiteCtx) -> Result<Vec<TestReport>> {
    let sites = [(1usize, 1usize), (2, 5), (10, 10)];
    let mut reports = Vec::new();
    for (idx, site) in sites.iter().enumerate() {
        let seed = derive_seed(ctx.seed, idx as u64);
        let samples = interior_ratio_samples(&ctx.spec, *site, ctx.replicas, seed)?;
        let r1: Vec<f64> = samples.iter().map(|p| p.0).collect();
        let r2: Vec<f64> = samples.iter().map(|p| p.1).collect();
        let r1_ref = ctx
            .triple
            .r1
            .sample_n(&mut rng_from_seed(derive_seed(seed, 1)), ctx.replicas);
        let r2_ref = ctx
            .triple
            .r2
            .sample_n(&mut rng_from_seed(derive_seed(seed, 2)), ctx.replicas);
        reports.push(ks_two_sample(
            &format!("stationarity: R1 law at {site:?}"),
            &r1,
            &r1_ref,
            ctx.level,
            seed,
        )?);
        reports.push(ks_two_sample(
            &format!("stationarity: R2 law at {site:?}"),
            &r2,
            &r2_ref,
            ctx.level,
            seed,
        )?);
    }

    // Mean linearity at (20, 20), when the marginal log-means exist.
    if let (Some(m1), Some(m2)) = (ctx.triple.r1.mean_log(), ctx.triple.r2.mean_log()) {
        let reps = (ctx.replicas / 25).max(400);
        let zs = log_z_replicas(&ctx.spec, 20, 20, reps, derive_seed(ctx.seed, 77))?;
        let mean = zs.iter().sum::<f64>() / reps as f64;
        let var = zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        let expected = 20.0 * (m1 + m2);
        reports.push(TestReport::new(
            "stationarity: mean log Z(20,20) within 4 SE of the digamma value",
            (mean - expected).abs() / se,
            4.0,
            vec![reps],
            ctx.seed,
        ));
    }
    Ok(reports)
}

fn characterization_suite(ctx: &SuiteCtx) -> Result<Vec<TestReport>> {
    let mut reports = Vec::new();
    for (which, params) in [
        (Characterization::Lukacs, [2.0, 3.0, 1.0]),
        (Characterization::LukacsCorollary, [2.0, 3.0, 1.0]),
        (Characterization::SeshadriWesolowski, [1.0, 1.0, 1.0]),
    ] {
        reports.extend(characterization_check(
            which, params, ctx.samples, ctx.seed, ctx.level,
        )?);
    }
    Ok(reports)
}
