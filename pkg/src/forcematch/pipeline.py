"""End-to-end recovery experiment: simulate, degrade, extract, fit, report."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .core import GroupDataset
from .errors import InvalidConfig
from .extraction import ExtractionOptions, extract_design_rows
from .force_model import BootstrapConfig, DEConfig, FitResult, bootstrap_ci, fit, form_for
from .io import write_fit
from .report import write_report
from .simulator import SimConfig, simulate
from .sparsifier import degrade, distribution_for_target_mean

log = logging.getLogger(__name__)

#: Focal observation counts reported for the 48 h simulated group.
REFERENCE_ROW_COUNTS = {1: 3247, 5: 610, 10: 323, 15: 212, 20: 151}
#: Focal observation counts at 10 min mean revisit time, by extent (h).
REFERENCE_EXTENT_COUNTS = {48: 323, 96: 662, 144: 967, 192: 1310}


@dataclass
class RunConfig:
    """Flat configuration of a recovery run (mirrors the config JSON)."""

    seed: int = 0
    # simulation
    n_agents: int = 14
    duration_h: float = 48.0
    step: float = 1.0
    iso_iid: float = 350.0
    iso_da: float = 0.8
    speed: float = 1.0
    perception_radius: float = 50.0
    arena_width: float = 2000.0
    arena_height: float = 2000.0
    patch_count: int = 30
    patch_radius: float = 5.0
    patch_lifetime: float = 3600.0
    heading_noise: float = 0.1
    start_radius: float = 30.0
    # extraction
    focal_id: str = "0"
    min_step: float = 0.1
    max_dt_next: float | None = None
    max_dt_prev: float | None = None
    max_interpolation_gap: float | None = None
    # fitting
    bound_iid: float = 1000.0
    bound_da: float = 1.0
    bound_sd: float = 10.0
    de_pop_size: int | None = None
    de_F: float = 0.8
    de_CR: float = 0.9
    de_max_gens: int = 300
    de_tol: float = 1e-10
    de_patience: int = 30
    # degradation and extent experiments
    resolutions_min: list = field(default_factory=lambda: [1, 5, 10, 15, 20])
    sdlog: float = 0.6
    extent_hours: list = field(default_factory=lambda: [48, 96, 144, 192])
    extent_resolution_min: float = 10.0
    bootstrap_replicates: int = 200
    bootstrap_max_gens: int = 60
    bootstrap_patience: int = 15

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise InvalidConfig(f"unknown config keys: {unknown}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{path}: {exc}") from None
        if not isinstance(d, dict):
            raise InvalidConfig("config must be a flat JSON object")
        return cls.from_dict(d)

    def validate(self):
        self.sim_config().validate()
        self.de_config().validate(3)
        if self.bootstrap_replicates and self.bootstrap_replicates < 50:
            raise InvalidConfig("bootstrap_replicates must be 0 (off) or at least 50")
        if any(not r > 0 for r in self.resolutions_min) or any(not h > 0 for h in self.extent_hours):
            raise InvalidConfig("resolutions and extents must be positive")
        if not self.sdlog > 0:
            raise InvalidConfig("sdlog must be positive")

    def sim_config(self, hours=None) -> SimConfig:
        names = {f.name for f in fields(SimConfig)} - {"duration", "seed"}
        kw = {k: getattr(self, k) for k in names}
        return SimConfig(duration=3600.0 * (hours or self.duration_h), seed=self.seed, **kw)

    def extraction_options(self) -> ExtractionOptions:
        return ExtractionOptions(self.min_step, self.max_dt_next, self.max_dt_prev,
                                 self.max_interpolation_gap)

    def de_config(self) -> DEConfig:
        return DEConfig(self.de_pop_size, self.de_F, self.de_CR, self.de_max_gens,
                        self.de_tol, self.de_patience, self.seed)

    def bounds(self):
        return [(0.0, self.bound_iid), (0.0, self.bound_da), (0.0, self.bound_sd)]

    def to_dict(self):
        return asdict(self)


def truncate(data: GroupDataset, t_end: float) -> GroupDataset:
    """Keep fixes with ``t < t_end``."""
    return GroupDataset(
        {a: data[a].subset(data[a].t < t_end) for a in data.ids}, crs_note=data.crs_note
    )


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _assoc_max(res: FitResult):
    return max(res.weights.beta_assoc.values(), default=0.0)


def run_pipeline(config: RunConfig, outdir) -> list[Check]:
    """Run the full recovery experiment and write fits, report and checks."""
    outdir = Path(outdir)
    (outdir / "fits").mkdir(parents=True, exist_ok=True)
    (outdir / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")
    opts, bounds, de = config.extraction_options(), config.bounds(), config.de_config()
    checks: list[Check] = []
    results: dict[str, FitResult] = {}

    def do_fit(label, rows, variant, boot=False, **meta):
        form = form_for(rows, variant)
        b = bounds if variant == "eq2" else bounds[:2]
        res = fit(rows, form, b, de)
        if boot and config.bootstrap_replicates:
            bc = BootstrapConfig(config.bootstrap_replicates, config.seed,
                                 de=DEConfig(config.de_pop_size, config.de_F, config.de_CR,
                                             config.bootstrap_max_gens, config.de_tol,
                                             config.bootstrap_patience))
            bres = bootstrap_ci(rows, form, b, bc)
            res.ci, res.ci_failures = bres.intervals, bres.n_failed
        res.metadata = {"label": label, **meta}
        write_fit(outdir / "fits" / f"{label}.json", res)
        results[label] = res
        log.info("fitted %s (%d rows)", label, len(rows))
        return res

    longest = max([config.duration_h, *config.extent_hours])
    full, _ = simulate(config.sim_config(longest))
    dense = truncate(full, config.duration_h * 3600.0)
    rows = extract_design_rows(dense, config.focal_id, opts)
    eq2 = do_fit("dense_eq2", rows, "eq2", resolution_min=0, extent_h=config.duration_h)
    eq1 = do_fit("dense_eq1", rows, "eq1", resolution_min=0, extent_h=config.duration_h)
    g = eq2.gates
    checks.append(Check(
        "dense gate recovery",
        abs(g.alpha_iid - config.iso_iid) <= 10 and abs(g.alpha_da - config.iso_da) <= 0.02,
        f"alpha_iid={g.alpha_iid:.2f} alpha_da={g.alpha_da:.3f}"))
    checks.append(Check(
        "dense associate weights < 5% of group weight",
        _assoc_max(eq2) < 0.05 * eq2.weights.beta_cm,
        f"max assoc={_assoc_max(eq2):.4g} cm={eq2.weights.beta_cm:.4g}"))
    checks.append(Check(
        "nested model R^2", eq2.r_squared >= eq1.r_squared - 0.01,
        f"eq2={eq2.r_squared:.4f} eq1={eq1.r_squared:.4f}"))

    for res_min in config.resolutions_min:
        sparse = degrade(dense, distribution_for_target_mean(res_min, config.sdlog), config.seed)
        srows = extract_design_rows(sparse, config.focal_id, opts)
        r = do_fit(f"res_{res_min:g}min", srows, "eq2", resolution_min=res_min, extent_h=config.duration_h)
        checks.append(Check(
            f"{res_min:g} min: group weight dominates", r.weights.beta_cm > _assoc_max(r),
            f"cm={r.weights.beta_cm:.4g} max assoc={_assoc_max(r):.4g}"))
        ref = REFERENCE_ROW_COUNTS.get(res_min) if config.duration_h == 48 else None
        if ref:
            checks.append(Check(f"{res_min:g} min: row count", abs(len(srows) - ref) <= 0.15 * ref,
                                f"{len(srows)} rows vs {ref}"))

    for hours in config.extent_hours:
        part = truncate(full, hours * 3600.0)
        sparse = degrade(part, distribution_for_target_mean(config.extent_resolution_min, config.sdlog),
                         config.seed)
        srows = extract_design_rows(sparse, config.focal_id, opts)
        r = do_fit(f"extent_{hours:g}h", srows, "eq2", boot=hours == max(config.extent_hours),
                   resolution_min=config.extent_resolution_min, extent_h=hours)
    if config.extent_hours and config.bootstrap_replicates:
        r = results[f"extent_{max(config.extent_hours):g}h"]
        covered = all(r.ci[f"beta_{a}"][0] <= 0.0 <= r.ci[f"beta_{a}"][1]
                      for a in r.model_form.associate_ids)
        checks.append(Check("longest extent: associate CIs contain 0", covered,
                            f"{r.n_rows} rows, {r.ci_failures} failed replicates"))
        checks.append(Check(
            "longest extent: gates within 25 m / 0.05",
            abs(r.gates.alpha_iid - config.iso_iid) <= 25 and abs(r.gates.alpha_da - config.iso_da) <= 0.05,
            f"alpha_iid={r.gates.alpha_iid:.2f} alpha_da={r.gates.alpha_da:.3f}"))

    write_report(results, outdir / "report")
    (outdir / "checks.txt").write_text("\n".join(c.line() for c in checks) + "\n", encoding="utf-8")
    return checks
