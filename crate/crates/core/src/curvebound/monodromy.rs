//! Numerical monodromy factorization of determinantal curves.
//!
//! The sheets of a squarefree plane curve `q(x, z) = 0` over the
//! `z`-plane are permuted by analytic continuation around the branch
//! points, the zeros of the `x`-discriminant. Orbits of the monodromy
//! group acting on the sheets correspond one-to-one to the irreducible
//! factors of `q`, so the factor degrees can be read off without ever
//! constructing the factors: track the sheet values around a loop per
//! branch point, record the induced permutations, and take the orbits
//! of the group they generate.
//!
//! Every sheet evaluation goes through the pencil itself: at any `z`
//! the distinct eigenvalues of `E₁ + z·E₂` are the sheet values of the
//! squarefree part and the eigenvalue group sizes are its sheet
//! multiplicities. A fitted coefficient table is deliberately not used
//! here — its interpolation noise turns the discriminant into a
//! polynomial of inflated degree whose extra roots are exact collisions
//! of the *fitted* sheets at moderate radii, where tracking would stall
//! even though the true curve is regular. Pencil eigenvalues are
//! backward stable and carry no such artifacts.
//!
//! Loops start from a base point on the positive real axis beyond every
//! branch point. Hyperbolicity makes all sheet values real there, which
//! pins the conjugation action: every orbit is closed under complex
//! conjugation (a factor and its conjugate would otherwise share the
//! whole real one-dimensional slice set, impossible for coprime
//! factors), so complex orbits and real factors have equal degrees. A
//! multiple factor of the original curve contributes one orbit of the
//! squarefree part; its multiplicity is recovered from the eigenvalue
//! cluster sizes at the base point and repeats the factor in the
//! reported degree multisets, which therefore sum to the full degree.

use super::curve::{cluster_into, squarefree_table, DeterminantalCurve};
use super::poly;
use crate::error::{Error, Result};
use crate::mat::cmatrix::{opnorm, ComplexMatrix, C64};

/// Knobs for the path-tracking stage.
#[derive(Debug, Clone)]
pub struct TrackSettings {
    /// Anchor count per path leg (segment or full circle).
    pub steps_per_leg: usize,
    /// Hard floor for step halving, as a fraction of the initial step.
    pub min_step_factor: f64,
    /// Accept a step only when each sheet moved less than this fraction
    /// of its distance to every other sheet.
    pub match_ratio: f64,
}

impl Default for TrackSettings {
    fn default() -> Self {
        Self {
            steps_per_leg: 32,
            min_step_factor: (0.5f64).powi(20),
            match_ratio: 0.5,
        }
    }
}

/// Counters describing how much work the tracking needed.
#[derive(Debug, Clone, Default)]
pub struct PathDiagnostics {
    /// Distinct branch points that received a loop.
    pub branch_points: usize,
    /// Loops tracked (branch-point loops, reverse checks, big circle).
    pub loops: usize,
    /// Accepted continuation steps.
    pub accepted_steps: usize,
    /// Steps that had to be halved.
    pub halvings: usize,
}

/// Factor structure of a determinantal curve.
#[derive(Debug, Clone)]
pub struct FactorizationResult {
    /// Degrees of the irreducible factors over ℂ, each repeated as
    /// often as its multiplicity in the curve; sums to the degree.
    pub complex_orbit_sizes: Vec<usize>,
    /// Degrees of the irreducible factors over ℝ, repeated likewise.
    pub real_factor_degrees: Vec<usize>,
    /// Smallest real factor degree: the geometric lower bound.
    pub min_real_degree: usize,
    /// Branch points of the squarefree part in the `z`-plane.
    pub branch_points: Vec<C64>,
    /// Work counters from the tracking stage.
    pub diagnostics: PathDiagnostics,
}

/// Union-find over sheet indices.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Sheet evaluations of the squarefree curve, straight from its pencil.
///
/// Multiple eigenvalues of these pencils are semisimple — repeated
/// sheets come from identical direct summands of the underlying algebra
/// — so the copies of one sheet agree to machine precision at every `z`
/// and single-linkage grouping into the known sheet count separates
/// copies from genuinely distinct sheets at any realistic gap.
struct PencilSheets<'a> {
    e1: &'a ComplexMatrix,
    e2: &'a ComplexMatrix,
    k: usize,
}

impl PencilSheets<'_> {
    /// Distinct sheet values with multiplicities at one point.
    fn spectrum(&self, z: C64) -> Result<Vec<(C64, usize)>> {
        let pencil = self.e1 + self.e2 * z;
        let Some(eigs) = pencil.eigenvalues() else {
            return Err(Error::Inconsistent(format!(
                "pencil eigenvalues did not converge at z = {:.6}{:+.6}i",
                z.re, z.im
            )));
        };
        Ok(collapse_to_groups(eigs.as_slice(), self.k))
    }

    /// Discriminant of the squarefree slice at `z`, up to a constant:
    /// the product of squared differences of distinct sheet values.
    fn disc(&self, z: C64) -> Result<C64> {
        let groups = self.spectrum(z)?;
        let mut prod = C64::new(1.0, 0.0);
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let d = groups[i].0 - groups[j].0;
                prod *= d * d;
            }
        }
        Ok(prod)
    }

    /// Newton quotient `disc/disc′` at `z`, from matched sheet motion.
    ///
    /// Implicit differentiation turns the logarithmic derivative into
    /// `disc′/disc = Σ_{i<j} 2(x_i′ − x_j′)/(x_i − x_j)`, with sheet
    /// values and velocities read off one matched central difference of
    /// spectra. The reciprocal vanishes simply at every discriminant
    /// zero regardless of its order, and its modulus estimates the
    /// distance to the nearest zero. Fails within a differentiation
    /// step of an actual sheet collision, where matching the two
    /// spectra is no longer meaningful.
    fn quotient(&self, z: C64) -> Result<C64> {
        let h = 1e-7 * (1.0 + z.norm());
        let plus = self.spectrum(z + C64::new(h, 0.0))?;
        let minus = self.spectrum(z - C64::new(h, 0.0))?;
        let Some(perm) = match_groups(&plus, &minus, 0.5) else {
            return Err(Error::Inconsistent(
                "sheets could not be matched across a differentiation step".into(),
            ));
        };
        let vals: Vec<C64> = plus
            .iter()
            .enumerate()
            .map(|(i, &(p, _))| (p + minus[perm[i]].0) * 0.5)
            .collect();
        let ders: Vec<C64> = plus
            .iter()
            .enumerate()
            .map(|(i, &(p, _))| (p - minus[perm[i]].0) / C64::new(2.0 * h, 0.0))
            .collect();
        let mut log_der = C64::new(0.0, 0.0);
        for i in 0..vals.len() {
            for j in (i + 1)..vals.len() {
                let gap = vals[i] - vals[j];
                if gap.norm() < 1e-300 {
                    return Err(Error::Inconsistent(
                        "coincident sheets while differentiating the discriminant".into(),
                    ));
                }
                log_der += (ders[i] - ders[j]) * 2.0 / gap;
            }
        }
        if log_der.norm() < 1e-300 || !log_der.is_finite() {
            return Err(Error::Inconsistent(
                "discriminant log-derivative degenerated".into(),
            ));
        }
        Ok(C64::new(1.0, 0.0) / log_der)
    }
}

/// Collapses eigenvalues into exactly `k` groups by single linkage.
fn collapse_to_groups(values: &[C64], k: usize) -> Vec<(C64, usize)> {
    let mut groups: Vec<Vec<C64>> = values.iter().map(|&v| vec![v]).collect();
    while groups.len() > k.max(1) {
        let mut best = (0usize, 1usize, f64::INFINITY);
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let mut d = f64::INFINITY;
                for &a in &groups[i] {
                    for &b in &groups[j] {
                        d = d.min((a - b).norm());
                    }
                }
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        let merged = groups.swap_remove(best.1);
        groups[best.0].extend(merged);
    }
    let mut out: Vec<(C64, usize)> = groups
        .iter()
        .map(|g| {
            let sum: C64 = g.iter().sum();
            (sum / C64::new(g.len() as f64, 0.0), g.len())
        })
        .collect();
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

/// Matches each left group to a distinct right group of the same
/// multiplicity, nearest first.
///
/// Returns the matching as indices into `right`, or `None` when any
/// assignment is ambiguous — a left group must sit closer to its match
/// than `ratio` times its distance to every other right group — or
/// fails to be a bijection.
fn match_groups(left: &[(C64, usize)], right: &[(C64, usize)], ratio: f64) -> Option<Vec<usize>> {
    if left.len() != right.len() {
        return None;
    }
    let mut used = vec![false; right.len()];
    let mut out = vec![0usize; left.len()];
    for (i, &(v, mult)) in left.iter().enumerate() {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, &(w, wm)) in right.iter().enumerate() {
            let d = (v - w).norm();
            if wm == mult && d < best.1 {
                best = (j, d);
            }
        }
        if best.0 == usize::MAX || used[best.0] {
            return None;
        }
        let second = right
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != best.0)
            .map(|(_, &(w, _))| (v - w).norm())
            .fold(f64::INFINITY, f64::min);
        if right.len() > 1 && best.1 >= ratio * second {
            return None;
        }
        used[best.0] = true;
        out[i] = best.0;
    }
    Some(out)
}

/// Spectral continuation of the sheet groups along anchor paths.
struct Tracker<'a, 'b> {
    sheets: &'b PencilSheets<'a>,
    settings: &'b TrackSettings,
    accepted: usize,
    halvings: usize,
}

impl<'a, 'b> Tracker<'a, 'b> {
    fn new(sheets: &'b PencilSheets<'a>, settings: &'b TrackSettings) -> Self {
        Self {
            sheets,
            settings,
            accepted: 0,
            halvings: 0,
        }
    }

    /// One continuation step for all sheet groups.
    ///
    /// Returns `None` when the spectra cannot be matched unambiguously,
    /// in which case the caller halves the step.
    fn try_step(&self, groups: &[(C64, usize)], to: C64) -> Option<Vec<(C64, usize)>> {
        let next = self.sheets.spectrum(to).ok()?;
        let perm = match_groups(groups, &next, self.settings.match_ratio)?;
        Some(perm.into_iter().map(|j| next[j]).collect())
    }

    /// Tracks one step, recursively halving until the floor is hit.
    fn track_step(
        &mut self,
        groups: &mut Vec<(C64, usize)>,
        from: C64,
        to: C64,
        initial: f64,
    ) -> Result<()> {
        if let Some(next) = self.try_step(groups, to) {
            *groups = next;
            self.accepted += 1;
            return Ok(());
        }
        let len = (to - from).norm();
        if len <= initial * self.settings.min_step_factor || len == 0.0 {
            return Err(Error::SolverFailure {
                iterations: self.halvings,
                detail: format!(
                    "sheet tracking stalled near z = {:.6}+{:.6}i after halving to step {len:.3e}",
                    from.re, from.im
                ),
            });
        }
        self.halvings += 1;
        let mid = (from + to) * C64::new(0.5, 0.0);
        self.track_step(groups, from, mid, initial)?;
        self.track_step(groups, mid, to, initial)
    }

    /// Tracks the sheet set along a polyline of anchors.
    fn track_path(&mut self, groups: &mut Vec<(C64, usize)>, anchors: &[C64]) -> Result<()> {
        for w in anchors.windows(2) {
            let initial = (w[1] - w[0]).norm();
            if initial == 0.0 {
                continue;
            }
            self.track_step(groups, w[0], w[1], initial)?;
        }
        Ok(())
    }
}

/// Straight segment sampled with `n` steps, endpoints included.
fn segment(from: C64, to: C64, n: usize) -> Vec<C64> {
    (0..=n)
        .map(|s| from + (to - from) * C64::new(s as f64 / n as f64, 0.0))
        .collect()
}

/// Full circle around `center`, starting and ending at angle `theta0`.
fn circle(center: C64, radius: f64, theta0: f64, n: usize) -> Vec<C64> {
    (0..=n)
        .map(|s| {
            let t = theta0 + std::f64::consts::TAU * s as f64 / n as f64;
            center + C64::new(radius * t.cos(), radius * t.sin())
        })
        .collect()
}

/// Closed loop from the base point around one branch point.
///
/// The approach leg detours through a waypoint lifted off the real axis
/// (on the half-plane opposite the branch point) so that it does not
/// run through other branch points, which concentrate near the axis.
fn loop_anchors(base: C64, bp: C64, radius: f64, n: usize) -> Vec<C64> {
    let dir = (base - bp) / C64::new((base - bp).norm(), 0.0);
    let entry = bp + dir * C64::new(radius, 0.0);
    let lift = 0.25 * (base - entry).norm() + radius;
    let sign = if entry.im > 0.0 { -1.0 } else { 1.0 };
    let waypoint = (base + entry) * C64::new(0.5, 0.0) + C64::new(0.0, sign * lift);
    let theta0 = (entry - bp).im.atan2((entry - bp).re);

    let mut anchors = segment(base, waypoint, n);
    anchors.extend(segment(waypoint, entry, n));
    anchors.extend(circle(bp, radius, theta0, n));
    anchors.extend(segment(entry, waypoint, n));
    anchors.extend(segment(waypoint, base, n));
    anchors
}

/// One interpolation pass for the discriminant roots on the circle `|z| = r`.
///
/// The discriminant of the squarefree slice is a polynomial in `z` of
/// degree at most `k(k−1)`. Its stably evaluated values on equispaced
/// nodes of the circle determine the coefficients of `g(w) = disc(rw)`
/// through the inverse discrete Fourier transform — a unitary system,
/// and one where every monomial keeps constant modulus on the nodes, so
/// roots of widely different magnitudes cannot wash each other out the
/// way they do in any fit on a real interval. The discriminant has real
/// coefficients, so the imaginary parts of the recovered coefficients
/// are pure noise and are dropped. Roots of `g` scale back by `r`.
/// Returns `None` when the discriminant is constant on this scale.
fn discriminant_root_candidates(sheets: &PencilSheets, r: f64) -> Result<Option<Vec<C64>>> {
    let k = sheets.k;
    let n = k * (k - 1) + 1;
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let t = std::f64::consts::TAU * j as f64 / n as f64;
        values.push(sheets.disc(C64::new(r * t.cos(), r * t.sin()))?);
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if peak < 1e-250 {
        return Err(Error::Inconsistent(
            "discriminant of the squarefree part vanishes identically".into(),
        ));
    }
    let mut coeffs = Vec::with_capacity(n);
    for a in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let t = std::f64::consts::TAU * ((a * j) % n) as f64 / n as f64;
            acc += (v / C64::new(peak, 0.0)) * C64::new(t.cos(), -t.sin());
        }
        coeffs.push(acc.re / n as f64);
    }
    let cmax = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= 1e-11 * cmax) {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return Ok(None);
    }
    let points: Vec<C64> = poly::companion_roots(&coeffs)
        .into_iter()
        .map(|w| w * C64::new(r, 0.0))
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .collect();
    Ok(Some(points))
}

/// A monodromy loop target: the centroid of one cluster of branch-point
/// estimates together with the cluster's spread (the largest member
/// distance from the centroid), which lower-bounds how far the tracking
/// circle must stay from the centroid.
struct LoopTarget {
    center: C64,
    spread: f64,
}

/// Groups branch-point estimates into loop targets by single linkage.
///
/// Estimates of one multiple discriminant root scatter over a disc whose
/// radius grows with the multiplicity, so clusters are formed at the
/// `link` radius and then agglomerated further until every pair of
/// clusters is separated by a comfortable multiple of their spreads —
/// otherwise no circle could clear its own cluster while staying away
/// from the neighbour. A loop around a merged cluster is homotopic to
/// the product of the individual loops, so merging loses no generators.
fn cluster_targets(points: Vec<C64>, link: f64) -> Vec<LoopTarget> {
    let n = points.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() <= link {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<C64>> = Vec::new();
    let mut slot_of: Vec<(usize, usize)> = Vec::new();
    for (i, &z) in points.iter().enumerate() {
        let r = uf.find(i);
        match slot_of.iter().find(|&&(root, _)| root == r) {
            Some(&(_, slot)) => groups[slot].push(z),
            None => {
                slot_of.push((r, groups.len()));
                groups.push(vec![z]);
            }
        }
    }
    loop {
        let stats: Vec<(C64, f64)> = groups.iter().map(|g| centroid_spread(g)).collect();
        let mut merge_pair = None;
        'pairs: for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let dist = (stats[i].0 - stats[j].0).norm();
                if dist <= link.max(8.0 * (stats[i].1 + stats[j].1)) {
                    merge_pair = Some((i, j));
                    break 'pairs;
                }
            }
        }
        let Some((i, j)) = merge_pair else { break };
        let absorbed = groups.swap_remove(j);
        groups[i].extend(absorbed);
    }
    let mut targets: Vec<LoopTarget> = groups
        .iter()
        .map(|g| {
            let (center, spread) = centroid_spread(g);
            LoopTarget { center, spread }
        })
        .collect();
    targets.sort_by(|a, b| {
        a.center
            .re
            .total_cmp(&b.center.re)
            .then(a.center.im.total_cmp(&b.center.im))
    });
    targets
}

/// Centroid and largest member distance from it for one cluster.
fn centroid_spread(members: &[C64]) -> (C64, f64) {
    let sum: C64 = members.iter().sum();
    let center = sum / C64::new(members.len() as f64, 0.0);
    let spread = members
        .iter()
        .fold(0.0f64, |m, &z| m.max((z - center).norm()));
    (center, spread)
}

/// Branch points of the squarefree curve: zeros of the discriminant.
///
/// Candidate roots are read off inverse-DFT fits of the discriminant on
/// circles spanning six octaves of radius, so every root gets one pass
/// whose scale matches its magnitude. Every candidate is then polished
/// and kept only if the polisher certifies an actual zero nearby; the
/// kept points are clustered into loop targets (the scattered estimates
/// of one multiple discriminant root must be encircled together, not
/// chased individually). Keeping is deliberately generous — a loop
/// around a non-branch-point costs only the time to discover the
/// identity permutation, while a dropped genuine branch point loses a
/// generator of the monodromy group.
fn branch_points_of(sheets: &PencilSheets, scale: f64) -> Result<Vec<LoopTarget>> {
    let mut candidates: Vec<C64> = Vec::new();
    for octave in 0..6 {
        let radius = scale / f64::powi(2.0, octave);
        match discriminant_root_candidates(sheets, radius) {
            Ok(Some(points)) => candidates.extend(points),
            Ok(None) => {}
            // The widest circle decides whether the discriminant
            // vanishes identically; a narrow one may sit on roots.
            Err(e) if octave == 0 => return Err(e),
            Err(_) => {}
        }
    }
    if candidates.is_empty() {
        return Ok(Vec::new());
    }

    let mut genuine: Vec<C64> = Vec::new();
    for &raw in &candidates {
        let (z, rel) = refine_branch_point(sheets, raw);
        if rel <= 1e-5 {
            genuine.push(z);
        }
    }
    genuine.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let reach = genuine.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let link = 2e-2 * (1.0 + reach);
    Ok(cluster_targets(genuine, link))
}

/// Polishes one branch-point estimate and reports how close it got.
///
/// Iterates a multiplicity-corrected Newton step on the quotient
/// `u = disc/disc′`, which has a simple zero at every root of the
/// discriminant: from `u` at the current point and at the plain Newton
/// iterate, the local multiplicity is `m = u₀/(u₀ − u₁)` — the plain
/// residual contracts by exactly `1 − 1/m` on an `m`-fold zero — and
/// the corrected step `z₂ = z₁ − m·u₁` lands on the zero exactly in
/// that model, where plain Newton alone would crawl linearly. Returns
/// the iterate with the smallest `|u|/(1 + |z|)` seen together with
/// that value, which measures the distance to the nearest genuine zero;
/// a quotient breakdown counts as a certificate, since sheets only fail
/// to match within a differentiation step of an actual collision.
fn refine_branch_point(sheets: &PencilSheets, start: C64) -> (C64, f64) {
    let leash = 0.75 * (1.0 + start.norm());
    let m_cap = (sheets.k * (sheets.k - 1)) as f64;
    let mut z = start;
    let mut best = (start, f64::INFINITY);
    for _ in 0..25 {
        let u0 = match sheets.quotient(z) {
            Ok(u) => u,
            Err(_) => return (z, 0.0),
        };
        let rel0 = u0.norm() / (1.0 + z.norm());
        if rel0 < best.1 {
            best = (z, rel0);
        }
        if rel0 <= 1e-12 {
            break;
        }
        let z1 = z - u0;
        if !(z1.re.is_finite() && z1.im.is_finite()) || (z1 - start).norm() > leash {
            break;
        }
        let u1 = match sheets.quotient(z1) {
            Ok(u) => u,
            Err(_) => return (z1, 0.0),
        };
        let rel1 = u1.norm() / (1.0 + z1.norm());
        if rel1 < best.1 {
            best = (z1, rel1);
        }
        let denom = u0 - u1;
        let mut mult = if denom.norm() > 1e-6 * u0.norm() {
            u0 / denom
        } else {
            C64::new(1.0, 0.0)
        };
        if !(mult.norm() >= 0.8 && mult.norm() <= m_cap && mult.is_finite()) {
            mult = C64::new(1.0, 0.0);
        }
        let z2 = z1 - mult * u1;
        if !(z2.re.is_finite() && z2.im.is_finite()) || (z2 - start).norm() > leash {
            z = z1;
            continue;
        }
        let step = (z2 - z).norm();
        z = z2;
        if step <= 1e-13 * (1.0 + z.norm()) {
            break;
        }
    }
    best
}

/// Matches tracked sheet groups back to the base groups as a permutation.
fn match_to_base(
    tracked: &[(C64, usize)],
    base: &[(C64, usize)],
    settings: &TrackSettings,
) -> Result<Vec<usize>> {
    let scale = base.iter().fold(1.0f64, |m, &(v, _)| m.max(v.norm()));
    let Some(perm) = match_groups(tracked, base, settings.match_ratio) else {
        return Err(Error::Inconsistent(
            "monodromy loop produced an ambiguous or non-bijective sheet matching".into(),
        ));
    };
    for (i, &j) in perm.iter().enumerate() {
        let gap = (tracked[i].0 - base[j].0).norm();
        if gap > 1e-6 * scale {
            return Err(Error::Inconsistent(format!(
                "monodromy loop failed to close: sheet {i} landed {gap:.3e} from its nearest base sheet"
            )));
        }
    }
    Ok(perm)
}

/// Factors a determinantal curve by monodromy and reports the degrees.
pub fn factor_by_monodromy(
    curve: &DeterminantalCurve,
    settings: &TrackSettings,
) -> Result<FactorizationResult> {
    let d = curve.degree();
    let (_, k) = squarefree_table(curve)?;
    let mut diagnostics = PathDiagnostics::default();

    // Branch points of the squarefree part; a single sheet has none.
    let (e1, e2) = curve.source_pair();
    let sheets = PencilSheets { e1, e2, k };
    let sample_scale = 2.0 * (1.0 + opnorm(e1) + opnorm(e2));
    let targets = if k >= 2 {
        branch_points_of(&sheets, sample_scale)?
    } else {
        Vec::new()
    };
    diagnostics.branch_points = targets.len();

    // Base point on the positive real axis beyond every branch point.
    let reach = targets
        .iter()
        .fold(0.0f64, |m, t| m.max(t.center.norm() + t.spread));
    let base_re = 1.25 * reach + 1.0;
    let base = C64::new(base_re, 0.0);

    // Distinct sheet values and their multiplicities at the base.
    let eigs = curve.real_slice_roots(base_re);
    let Some((means, sizes)) = cluster_into(&eigs, k) else {
        return Err(Error::Inconsistent(format!(
            "base slice did not separate into {k} sheets"
        )));
    };
    if sizes.iter().sum::<usize>() != d {
        return Err(Error::Inconsistent(
            "sheet multiplicities at the base do not account for the degree".into(),
        ));
    }
    let base_groups: Vec<(C64, usize)> = means
        .iter()
        .zip(&sizes)
        .map(|(&m, &s)| (C64::new(m, 0.0), s))
        .collect();

    let mut tracker = Tracker::new(&sheets, settings);
    let mut uf = UnionFind::new(k);
    let n = settings.steps_per_leg;

    for (idx, target) in targets.iter().enumerate() {
        let bp = target.center;
        let nearest = targets
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx)
            .map(|(_, other)| (other.center - bp).norm())
            .fold(f64::INFINITY, f64::min);
        let mut radius = if nearest.is_finite() {
            0.25 * nearest
        } else {
            0.25 * (1.0 + bp.norm())
        };
        // The circle must clear the whole cluster it encircles; the
        // separability enforced while clustering keeps this compatible
        // with staying far from every other target.
        radius = radius.max(2.5 * target.spread);
        radius = radius.min(0.45 * (base - bp).norm());

        let mut anchors = loop_anchors(base, bp, radius, n);
        let mut groups = base_groups.clone();
        if let Err(err) = tracker.track_path(&mut groups, &anchors) {
            if !matches!(err, Error::SolverFailure { .. }) {
                return Err(err);
            }
            // A stall means the circle ran through the fringe of its own
            // cluster (the centroid underestimates where the true branch
            // point sits); one retry on a wider circle, still clear of
            // the other targets and the base.
            let mut wide = 2.0 * radius;
            if nearest.is_finite() {
                wide = wide.min(0.45 * nearest);
            }
            wide = wide.min(0.45 * (base - bp).norm());
            if wide <= radius {
                return Err(err);
            }
            diagnostics.loops += 1;
            anchors = loop_anchors(base, bp, wide, n);
            groups = base_groups.clone();
            tracker.track_path(&mut groups, &anchors)?;
        }
        diagnostics.loops += 1;
        let perm = match_to_base(&groups, &base_groups, settings)?;

        // Composition invariant, checked once: a loop followed by its
        // reverse is contractible and must act as the identity.
        if idx == 0 {
            let mut reversed = anchors.clone();
            reversed.reverse();
            let mut back = base_groups.clone();
            tracker.track_path(&mut back, &reversed)?;
            diagnostics.loops += 1;
            let rev = match_to_base(&back, &base_groups, settings)?;
            for i in 0..k {
                if rev[perm[i]] != i {
                    return Err(Error::Inconsistent(
                        "composing a loop with its reverse did not give the identity".into(),
                    ));
                }
            }
        }
        for (i, &j) in perm.iter().enumerate() {
            uf.union(i, j);
        }
    }

    // One big circle enclosing every branch point closes the generator
    // set (its class is the product of all small loops).
    if !targets.is_empty() {
        let big = 2.0 * (1.0 + reach);
        let mut anchors = segment(base, C64::new(big, 0.0), n);
        anchors.extend(circle(C64::new(0.0, 0.0), big, 0.0, 4 * n));
        anchors.extend(segment(C64::new(big, 0.0), base, n));
        let mut groups = base_groups.clone();
        tracker.track_path(&mut groups, &anchors)?;
        diagnostics.loops += 1;
        let perm = match_to_base(&groups, &base_groups, settings)?;
        for (i, &j) in perm.iter().enumerate() {
            uf.union(i, j);
        }
    }
    diagnostics.accepted_steps = tracker.accepted;
    diagnostics.halvings = tracker.halvings;

    // Orbits of the generated group = irreducible factors of q.
    let mut orbit_members: Vec<Vec<usize>> = Vec::new();
    let mut rep_of: Vec<(usize, usize)> = Vec::new();
    for i in 0..k {
        let r = uf.find(i);
        match rep_of.iter().find(|&&(root, _)| root == r) {
            Some(&(_, slot)) => orbit_members[slot].push(i),
            None => {
                rep_of.push((r, orbit_members.len()));
                orbit_members.push(vec![i]);
            }
        }
    }

    let mut complex_orbit_sizes = Vec::new();
    let mut real_factor_degrees = Vec::new();
    for members in &orbit_members {
        let mult = base_groups[members[0]].1;
        if members.iter().any(|&i| base_groups[i].1 != mult) {
            return Err(Error::Inconsistent(
                "one monodromy orbit mixes sheets of different multiplicity".into(),
            ));
        }
        // Hyperbolicity forces every orbit to be closed under complex
        // conjugation: the sheet values at the real base are real. A
        // violation would mean the base roots were not real after all.
        if members.iter().any(|&i| {
            base_groups[i].0.im.abs() > crate::tol::EPS_ROOT * (1.0 + base_groups[i].0.norm())
        }) {
            return Err(Error::Inconsistent(
                "orbit is not conjugation-closed at the real base point".into(),
            ));
        }
        for _ in 0..mult {
            complex_orbit_sizes.push(members.len());
            real_factor_degrees.push(members.len());
        }
    }
    complex_orbit_sizes.sort_unstable();
    real_factor_degrees.sort_unstable();
    if complex_orbit_sizes.iter().sum::<usize>() != d {
        return Err(Error::VerificationFailed {
            context: "orbit sizes weighted by multiplicity must partition the degree".into(),
            residual: complex_orbit_sizes.iter().sum::<usize>() as f64,
            tol: d as f64,
        });
    }
    let min_real_degree = real_factor_degrees[0];

    let branch_points: Vec<C64> = targets.iter().map(|t| t.center).collect();
    Ok(FactorizationResult {
        complex_orbit_sizes,
        real_factor_degrees,
        min_real_degree,
        branch_points,
        diagnostics,
    })
}


#[cfg(test)]
mod probe {
    use super::*;
    use crate::curvebound::curve::{extract_curve, squarefree_table};
    use crate::fixtures::planted_qubit_block;
    use crate::mat::cmatrix::ComplexMatrix;
    use crate::mat::herm::HermitianOperator;
    use crate::mat::random::{std_normal, SeedSplitter};

    fn qubit_draw(which: usize) -> (HermitianOperator, HermitianOperator) {
        let inst = planted_qubit_block();
        let obs = inst.observables;
        let split = SeedSplitter::new(11);
        let mut rng = split.stream("geometric-pair");
        let mut comb = |rng: &mut rand_chacha::ChaCha12Rng| {
            let mut sum = ComplexMatrix::zeros(obs.dim(), obs.dim());
            for op in obs.ops() {
                sum += op.mat().scale(std_normal(rng));
            }
            HermitianOperator::new(sum).unwrap()
        };
        let mut pair = (comb(&mut rng), comb(&mut rng));
        for _ in 0..which {
            pair = (comb(&mut rng), comb(&mut rng));
        }
        pair
    }

    #[test]
    fn probe_qubit_truth() {
        let (e1, e2) = qubit_draw(0);
        // Block structure: 2x2 corner + three diagonal scalars.
        let a1 = e1.mat().view((0, 0), (2, 2)).into_owned();
        let a2 = e2.mat().view((0, 0), (2, 2)).into_owned();
        let quad_roots = |c0: C64, c1: C64, c2: C64| -> Vec<C64> {
            let disc = (c1 * c1 - C64::new(4.0, 0.0) * c2 * c0).sqrt();
            vec![
                (-c1 + disc) / (C64::new(2.0, 0.0) * c2),
                (-c1 - disc) / (C64::new(2.0, 0.0) * c2),
            ]
        };
        let tr = |m: &ComplexMatrix| m[(0, 0)] + m[(1, 1)];
        let t0 = tr(&a1);
        let t1 = tr(&a2);
        let det2 = |m: &ComplexMatrix| m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let d0 = det2(&a1);
        let d2 = det2(&a2);
        let d1 = a1[(0, 0)] * a2[(1, 1)] + a2[(0, 0)] * a1[(1, 1)]
            - a1[(0, 1)] * a2[(1, 0)]
            - a2[(0, 1)] * a1[(1, 0)];
        let mut truth: Vec<(String, C64)> = Vec::new();
        for r in quad_roots(
            t0 * t0 - C64::new(4.0, 0.0) * d0,
            C64::new(2.0, 0.0) * t0 * t1 - C64::new(4.0, 0.0) * d1,
            t1 * t1 - C64::new(4.0, 0.0) * d2,
        ) {
            truth.push(("corner-disc".into(), r));
        }
        let lines: Vec<(C64, C64)> = (2..5)
            .map(|l| (e1.mat()[(l, l)], e2.mat()[(l, l)]))
            .collect();
        for (li, &(b, s)) in lines.iter().enumerate() {
            let c0 = b * b - t0 * b + d0;
            let c1 = C64::new(2.0, 0.0) * b * s - t0 * s - t1 * b + d1;
            let c2 = s * s - t1 * s + d2;
            for r in quad_roots(c0, c1, c2) {
                truth.push((format!("corner-line{li}"), r));
            }
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (bi, si) = lines[i];
                let (bj, sj) = lines[j];
                truth.push((format!("line{i}-line{j}"), -(bi - bj) / (si - sj)));
            }
        }
        let curve = extract_curve(&e1, &e2).unwrap();
        let (_, k) = squarefree_table(&curve).unwrap();
        let sheets = PencilSheets {
            e1: curve.source_pair().0,
            e2: curve.source_pair().1,
            k,
        };
        let scale = 2.0 * (1.0 + crate::mat::cmatrix::opnorm(e1.mat()) + crate::mat::cmatrix::opnorm(e2.mat()));
        let targets = branch_points_of(&sheets, scale).unwrap();
        println!("k={k}; {} truth points, {} targets found", truth.len(), targets.len());
        for t in &targets {
            println!("  target {:>9.5}{:+9.5}i spread {:.2e}", t.center.re, t.center.im, t.spread);
        }
        let mut worst = 0.0f64;
        for (tag, z) in &truth {
            let nearest = targets
                .iter()
                .map(|t| (t.center - z).norm())
                .fold(f64::INFINITY, f64::min);
            println!("  {tag:>14} z = {:>9.5}{:+9.5}i nearest target {:.3e}", z.re, z.im, nearest);
            worst = worst.max(nearest);
        }
        assert!(worst < 2e-2, "worst truth-to-target distance {worst:.3e}");
    }

    #[test]
    fn probe_qubit() {
        for draw in 0..4 {
            let (e1, e2) = qubit_draw(draw);
            let curve = extract_curve(&e1, &e2).unwrap();
            match factor_by_monodromy(&curve, &TrackSettings::default()) {
                Ok(r) => println!(
                    "draw {draw}: orbits {:?} bps {} loops {} halvings {}",
                    r.complex_orbit_sizes,
                    r.diagnostics.branch_points,
                    r.diagnostics.loops,
                    r.diagnostics.halvings
                ),
                Err(e) => println!("draw {draw}: MONODROMY ERR {e}"),
            }
        }
    }
}
