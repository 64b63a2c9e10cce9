"""Command-line front end.

Exit codes: 0 success, 1 inequality/assertion failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import calibration
from .bank import decompose, default_bank
from .corpus import divfree_sample, scalar_sample, scalar_samples
from .errors import StabilityError
from .euler import SolverConfig, solve, taylor_green
from .fields import (Grid, GridField, SpectrumSpec, VectorField, as_physical,
                     random_divergence_free, read_field, vector_as_physical,
                     write_field)
from .norms import (NormSpec, besov_norm, field_norm, kernel_l1_bound,
                    kernel_l1_terms, sup_norm, verify_embedding, verify_lifting)
from .reports import dump_json, write_csv, write_svg_polyline

_VERIFY_SUITES = ("moser", "commutator", "embedding", "lifting", "maximal",
                  "fefferman-stein", "kernel-l1", "counterexample-scan")


def _float_or_inf(text: str) -> float:
    return math.inf if text in ("inf", "Inf", "INF") else float(text)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpflow",
                                description="dyadic-analysis toolbox and torus flow solver")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=64)
    common.add_argument("--dim", type=int, default=2)
    common.add_argument("--s", type=float, default=3.0)
    common.add_argument("--p", type=_float_or_inf, default=1.0)
    common.add_argument("--q", type=_float_or_inf, default=1.0)
    common.add_argument("--T", type=float, default=0.2)
    common.add_argument("--dt", type=float, default=1e-3)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--config", type=Path, default=None)
    common.add_argument("--out", type=Path, default=None)

    sub = p.add_subparsers(dest="command", required=True)

    pn = sub.add_parser("norm", parents=[common], help="norm of a stored field")
    pn.add_argument("file", type=Path)
    pn.add_argument("--flavor", choices=("tl", "besov"), default="tl")
    pn.add_argument("--homogeneous", action="store_true")

    pd = sub.add_parser("decompose", parents=[common], help="emit dyadic blocks")
    pd.add_argument("file", type=Path)

    pv = sub.add_parser("verify", parents=[common], help="run a named inequality suite")
    pv.add_argument("suite", choices=_VERIFY_SUITES)
    pv.add_argument("--count", type=int, default=10)
    pv.add_argument("--form", default=None)
    pv.add_argument("--family", default="lacunary")
    pv.add_argument("--scales", type=int, nargs="+", default=[2, 3, 4])

    sub.add_parser("solve", parents=[common], help="integrate the torus dynamics")
    pi = sub.add_parser("iterate", parents=[common], help="successive-approximation ladder")
    pi.add_argument("--members", type=int, default=6)
    sub.add_parser("bona-smith", parents=[common], help="mollified-data continuity ladder")
    sub.add_parser("lipschitz", parents=[common], help="lower-norm dependence moduli")
    sub.add_parser("continuity", parents=[common], help="three-piece continuity assembly")
    return p


# ---------------------------------------------------------------------------
# shared plumbing


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    return json.loads(args.config.read_text())


def _grid_from(args, cfg: dict) -> Grid:
    g = cfg.get("grid", {})
    return Grid(int(g.get("n", args.n)), int(g.get("dim", args.dim)))


def _norm_spec_from(args, cfg: dict, homogeneous: bool = False) -> NormSpec:
    m = cfg.get("norm", {})
    q = m.get("q", args.q)
    if isinstance(q, str):
        q = _float_or_inf(q)
    return NormSpec(float(m.get("s", args.s)), float(m.get("p", args.p)), float(q),
                    bool(m.get("homogeneous", homogeneous)))


def _solver_from(args, cfg: dict, stride: int = 20) -> SolverConfig:
    sv = cfg.get("solver", {})
    return SolverConfig(dt=float(sv.get("dt", args.dt)), T=float(sv.get("T", args.T)),
                        dealias=bool(sv.get("dealias", True)),
                        record_stride=int(sv.get("record_stride", stride)))


def _initial_field(grid: Grid, args, cfg: dict) -> VectorField:
    init = cfg.get("initial", {"kind": "random"})
    kind = init.get("kind", "random")
    if kind == "taylor-green":
        return taylor_green(grid)
    if kind == "shell":
        x = grid.meshes()
        comps = [np.sin(x[1]), np.sin(x[0])] + [np.zeros(grid.shape)] * (grid.d - 2)
        return VectorField(tuple(GridField(grid, c, "physical", True) for c in comps),
                           div_free=True)
    if kind == "random":
        seed = int(init.get("seed", args.seed))
        band = tuple(init.get("band", (1, 4)))
        decay = float(init.get("decay", 2.0))
        amp = float(init.get("amplitude", 0.5))
        u = vector_as_physical(random_divergence_free(grid, SpectrumSpec(decay, band, seed)))
        peak = max(float(np.abs(c.values).max()) for c in u.components)
        return u * (amp / peak)
    raise ValueError(f"unknown initial-data kind {kind!r}")


def _out_dir(args) -> Path:
    out = args.out or Path("lpflow-out")
    (out / "tables").mkdir(parents=True, exist_ok=True)
    (out / "fields").mkdir(exist_ok=True)
    (out / "plots").mkdir(exist_ok=True)
    return out


def _emit(report: dict, args) -> None:
    text = dump_json(report, None if args.out is None else _out_dir(args) / "report.json")
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verify suites


def _bound_or_none(key: str, spec, calibrated: tuple[float, float, float]):
    """Regression bound when the requested indices match the calibrated ones."""
    if (spec.s, spec.p, spec.q) == calibrated:
        return calibration.regression_bound(key)
    return None


def _verify_moser(args, bank, spec) -> tuple[dict, bool]:
    from .paraproduct import moser_sweep

    ratios = moser_sweep(bank, spec, args.count, args.seed or 100)
    bound = _bound_or_none("product_endpoint_s3_p1_q1", spec, (3.0, 1.0, 1.0))
    ok = (max(ratios) <= bound) if bound else all(math.isfinite(r) for r in ratios)
    return {"suite": "moser", "ratios": ratios, "max": max(ratios),
            "bound": bound}, ok


def _verify_commutator(args, bank, spec) -> tuple[dict, bool]:
    from .paraproduct import commutator_sweep

    form = args.form or "esti1"
    ratios = commutator_sweep(bank, spec, form, args.count, args.seed or 400)
    key = ("commutator_esti1_s3_p1_q1" if form == "esti1"
           else "commutator_esti2_s3_p1_q1")
    bound = _bound_or_none(key, spec, (3.0, 1.0, 1.0))
    if bound is None and form == "esti1":
        bound = _bound_or_none("commutator_esti1_s2p5_p2_q2", spec, (2.5, 2.0, 2.0))
    ok = (max(ratios) <= bound) if bound else all(math.isfinite(r) for r in ratios)
    return {"suite": "commutator", "form": form, "ratios": ratios,
            "max": max(ratios), "bound": bound}, ok


def _verify_embedding(args, bank, spec) -> tuple[dict, bool]:
    grid = bank.grid
    d = grid.d
    source = (spec.s, spec.p, spec.q)
    p1 = 2.0 * spec.p
    target = (spec.s - d / spec.p + d / p1, p1)
    ratios = [verify_embedding(bank, f, source, target)
              for f in scalar_samples(grid, args.count, args.seed or 800)]
    violations = 0
    for f in scalar_samples(grid, args.count, args.seed or 800):
        b = besov_norm(bank, f, NormSpec(0.0, math.inf, 1.0, flavor="besov"))
        if sup_norm(f) > b * (1 + 1e-12):
            violations += 1
    report = {"suite": "embedding", "source": list(source), "target": list(target),
              "ratios": ratios, "max": max(ratios), "sup_chain_violations": violations}
    return report, violations == 0 and all(math.isfinite(r) for r in ratios)


def _verify_lifting(args, bank, spec) -> tuple[dict, bool]:
    grid = bank.grid
    x = grid.meshes()
    pure = GridField(grid, 2.0 * np.cos(4 * x[0]), "physical", True)
    r_pure = verify_lifting(bank, pure, s=1.0, p=2.0, q=2.0, k=1.0)
    ratios = [verify_lifting(bank, f, s=1.0, p=2.0, q=2.0, k=1.0)
              for f in scalar_samples(grid, args.count, args.seed or 700)]
    lo, hi = calibration.bracket("lifting_s1_order1")
    ok = abs(r_pure - 1.0) <= 1e-12 and all(lo <= r <= hi for r in ratios)
    return {"suite": "lifting", "pure_mode_ratio": r_pure, "ratios": ratios,
            "bracket": [lo, hi]}, ok


def _verify_maximal(args, bank, spec) -> tuple[dict, bool]:
    from .maximal import default_config, hl_maximal, verify_pointwise_bound

    grid = bank.grid
    cfgm = default_config(grid)
    bad = 0
    for i in range(args.count):
        f = scalar_sample(grid, (args.seed or 500) + i)
        g2 = scalar_sample(grid, (args.seed or 500) + i + 10000)
        mf, mg = hl_maximal(f, cfgm).values.real, hl_maximal(g2, cfgm).values.real
        fg = GridField(grid, f.values + g2.values, "physical", True)
        if (hl_maximal(fg, cfgm).values.real > mf + mg + 1e-12).any():
            bad += 1
    ratios = [verify_pointwise_bound(bank, scalar_sample(grid, (args.seed or 500) + i,
                                                         band=(1, 16)),
                                     j=4, k=2, theta=1.0, r=0.5)
              for i in range(args.count)]
    bound = calibration.regression_bound("pointwise_block_maximal")
    ok = bad == 0 and max(ratios) <= bound
    return {"suite": "maximal", "sublinearity_violations": bad,
            "pointwise_ratios": ratios, "max": max(ratios), "bound": bound}, ok


def _verify_fs(args, bank, spec) -> tuple[dict, bool]:
    from .maximal import verify_fefferman_stein

    grid = bank.grid
    worst = 0.0
    for i in range(args.count):
        f = scalar_sample(grid, (args.seed or 600) + i)
        fam = [as_physical(b) for b in decompose(bank, f).blocks[:8]]
        worst = max(worst, verify_fefferman_stein(fam, 2.0, 2.0))
    bound = calibration.regression_bound("vector_maximal_p2_q2")
    return {"suite": "fefferman-stein", "max": worst, "bound": bound}, worst <= bound


def _verify_kernel(args, bank, spec) -> tuple[dict, bool]:
    terms = kernel_l1_terms()
    ratios = []
    for (j1, t1), (j2, t2) in zip(terms, terms[1:]):
        if j2 <= -2:
            ratios.append(t2 / t1)
    total7 = kernel_l1_bound(refinement=7)
    total8 = kernel_l1_bound(refinement=8)
    change = abs(total8 - total7) / total7
    ok = all(r <= 0.6 for r in ratios) and change <= 0.01
    return {"suite": "kernel-l1", "terms": terms, "decay_ratios": ratios,
            "total": total7, "refinement_change": change}, ok


def _verify_scan(args, bank, spec) -> tuple[dict, bool]:
    from .paraproduct import counterexample_scan

    rep = counterexample_scan(bank, args.family, spec.s, spec.p, spec.q, args.scales)
    return rep.to_json_dict(), True


def _run_verify(args) -> int:
    bank = default_bank(args.n, args.dim)
    spec = NormSpec(args.s, args.p, args.q, homogeneous=True)
    handlers = {
        "moser": _verify_moser, "commutator": _verify_commutator,
        "embedding": _verify_embedding, "lifting": _verify_lifting,
        "maximal": _verify_maximal, "fefferman-stein": _verify_fs,
        "kernel-l1": _verify_kernel, "counterexample-scan": _verify_scan,
    }
    report, ok = handlers[args.suite](args, bank, spec)
    report["pass"] = bool(ok)
    _emit(report, args)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# dynamics commands


def _run_solve(args) -> int:
    cfg = _load_config(args)
    grid = _grid_from(args, cfg)
    u0 = _initial_field(grid, args, cfg)
    spec = _norm_spec_from(args, cfg)
    traj = solve(u0, _solver_from(args, cfg), record=(spec,))
    out = _out_dir(args)
    files = []
    for t, st in zip(traj.times, traj.states):
        name = f"fields/state_{t:.6f}.lpf"
        write_field(vector_as_physical(st), out / name)
        files.append(name)
    diag_rows = [dict(time=t, **{k: v[i] for k, v in traj.diagnostics.items()})
                 for i, t in enumerate(traj.times)]
    manifest = {"times": list(traj.times), "files": files, "diagnostics": diag_rows}
    dump_json(manifest, out / "report.json")
    write_csv(out / "tables" / "diagnostics.csv",
              ["time"] + sorted(traj.diagnostics),
              [[t] + [traj.diagnostics[k][i] for k in sorted(traj.diagnostics)]
               for i, t in enumerate(traj.times)])
    write_svg_polyline(out / "plots" / "energy.svg",
                       {"energy": (list(traj.times), list(traj.diagnostics["energy"]))},
                       title="kinetic energy")
    sys.stdout.write(dump_json({"written": str(out), "snapshots": len(files)}))
    return 0


def _run_iterate(args) -> int:
    from .iteration import cauchy_report, iterate

    cfg = _load_config(args)
    grid = _grid_from(args, cfg)
    bank = default_bank(grid.n, grid.d)
    u0 = _initial_field(grid, args, cfg)
    spec = _norm_spec_from(args, cfg)
    scfg = _solver_from(args, cfg, stride=1)
    M = int(cfg.get("experiment", {}).get("members", args.members))
    ladder = iterate(bank, u0, M, scfg, spec)
    out = _out_dir(args)
    member_files = []
    for m, traj in enumerate(ladder.members):
        name = f"fields/member_{m}_final.lpf"
        write_field(vector_as_physical(traj.states[-1]), out / name)
        member_files.append(name)
    manifest = {"M": M, "norm_spec": spec.label, "delta": list(ladder.decay_table),
                "ratios": list(ladder.decay_ratios()), "member_files": member_files}
    dump_json(manifest, out / "report.json")
    if M >= 4:
        rep = cauchy_report(ladder)
        dump_json(rep.to_json_dict(), out / "tables" / "cauchy.json")
    write_svg_polyline(out / "plots" / "decay.svg",
                       {"delta": (list(range(1, M + 1)), list(ladder.decay_table))},
                       title="member-difference decay", log_y=True)
    sys.stdout.write(dump_json(manifest))
    return 0


def _run_dependence(args, kind: str) -> int:
    from .experiments import (DependenceConfig, bona_smith_experiment,
                              continuity_assembly, lipschitz_lowernorm_experiment)

    cfg = _load_config(args)
    grid = _grid_from(args, cfg)
    ex = cfg.get("experiment", {})
    dcfg = DependenceConfig(
        norm_spec=_norm_spec_from(args, cfg),
        T=float(cfg.get("solver", {}).get("T", args.T)),
        dt=float(cfg.get("solver", {}).get("dt", args.dt)),
        N_list=tuple(ex.get("N_list", (3, 4, 5))),
        eps_list=tuple(ex.get("eps_list", (1e-1, 1e-2, 1e-3, 1e-4))),
        seed=int(ex.get("seed", args.seed)),
    )
    u0 = _initial_field(grid, args, cfg)
    if "initial" not in cfg:
        u0 = divfree_sample(grid, dcfg.seed + 21, decay=6.0, band=(1, grid.n // 3))
        u0 = u0 * (0.5 / max(float(np.abs(c.values).max()) for c in u0.components))
    ok = True
    if kind == "bona-smith":
        rep = bona_smith_experiment(u0, dcfg)
        plot = {"rho": ([float(N) for N in rep.seeds], list(rep.ratios))}
    elif kind == "lipschitz":
        w = divfree_sample(grid, dcfg.seed + 22, decay=2.0, band=(1, 8))
        rep = lipschitz_lowernorm_experiment(u0, w, dcfg)
        plot = {"L": ([math.log10(e) for e in dcfg.eps_list], list(rep.ratios))}
    else:
        w = divfree_sample(grid, dcfg.seed + 22, decay=2.0, band=(1, 8))
        psi = u0 + w * (1e-3 / field_norm(default_bank(grid.n, grid.d), w, dcfg.norm_spec))
        rep = continuity_assembly(u0, psi, dcfg)
        pieces = dict(rep.tables["pieces"])
        ok = pieces["direct"] <= 1.05 * pieces["chain"]
        plot = {"pieces": ([1, 2, 3], [pieces["tail_u"], pieces["tail_psi"],
                                       pieces["interpolated_diff"]])}
    out = _out_dir(args)
    payload = rep.to_json_dict()
    payload["pass"] = bool(ok)
    dump_json(payload, out / "report.json")
    write_csv(out / "tables" / "ratios.csv", ["row", "ratio"],
              list(zip(rep.seeds, rep.ratios)))
    write_svg_polyline(out / "plots" / f"{kind}.svg", plot, title=rep.estimate_id)
    sys.stdout.write(dump_json(payload))
    return 0 if ok else 1


def _run_norm(args) -> int:
    f = read_field(args.file)
    bank = default_bank(f.grid.n, f.grid.d)
    cfg = _load_config(args)
    spec = _norm_spec_from(args, cfg)
    if args.flavor == "besov":
        spec = NormSpec(spec.s, spec.p, spec.q, spec.homogeneous, flavor="besov")
    value = field_norm(bank, f, spec)
    sys.stdout.write(dump_json({"file": str(args.file), "spec": spec.label,
                                "value": value}))
    return 0


def _run_decompose(args) -> int:
    f = read_field(args.file)
    if isinstance(f, VectorField):
        raise ValueError("decompose expects a scalar field file")
    bank = default_bank(f.grid.n, f.grid.d)
    dec = decompose(bank, f)
    out = _out_dir(args)
    files = []
    write_field(as_physical(dec.low), out / "fields" / "low.lpf")
    files.append("fields/low.lpf")
    for j, b in enumerate(dec.blocks):
        name = f"fields/block_{j:02d}.lpf"
        write_field(as_physical(b), out / name)
        files.append(name)
    manifest = {"file": str(args.file), "j_max": bank.j_max, "files": files}
    dump_json(manifest, out / "report.json")
    sys.stdout.write(dump_json(manifest))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "norm":
            return _run_norm(args)
        if args.command == "decompose":
            return _run_decompose(args)
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "solve":
            return _run_solve(args)
        if args.command == "iterate":
            return _run_iterate(args)
        if args.command in ("bona-smith", "lipschitz", "continuity"):
            return _run_dependence(args, args.command)
        parser.error(f"unknown command {args.command!r}")
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"lpflow: {exc}", file=sys.stderr)
        return 2
    except StabilityError as exc:
        print(f"lpflow: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
