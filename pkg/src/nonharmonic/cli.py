"""Experiment runner: config ingestion, task execution, CSV/JSON artifacts.

Command shape:

    nonharmonic run --config cfg.json [--out DIR] [--seed U64]
    nonharmonic report --registry PATH

Exit codes: 0 all assertions pass, 1 assertion failure, 2 invalid config,
3 numerical guard tripped.

Every numeric CSV cell is written with 17 significant digits so doubles
round-trip exactly; reruns of the same config and seed produce
byte-identical CSV files.  The env var NONHARMONIC_THREADS caps internal
(BLAS) parallelism; 0 or unset means automatic.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from pathlib import Path

VERSION = "0.1.0"

TASKS = ("model-check", "transform-check", "symbol-order", "compose", "parametrix",
         "funcalc", "garding", "l2norm", "evolve")

_SYMBOL_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "power": {"type": "number"},
        "order": {"type": "number"},
        "value": {"type": "number"},
        "amplitude": {"type": "number"},
        "mode": {"type": "integer"},
        "exponent": {"type": "number"},
        "scale": {"type": "number"},
    },
    "required": ["name"],
    "additionalProperties": False,
}

_PARAMS_SCHEMAS = {
    "model-check": {"type": "object", "properties": {"tail_s": {"type": "number"}},
                    "additionalProperties": False},
    "transform-check": {"type": "object", "properties": {"trials": {"type": "integer", "minimum": 1}},
                        "additionalProperties": False},
    "symbol-order": {"type": "object",
                     "properties": {"symbol": _SYMBOL_SCHEMA, "rho": {"type": "number"},
                                    "delta": {"type": "number"},
                                    "expected_order": {"type": "number"},
                                    "tolerance": {"type": "number"}},
                     "required": ["symbol"], "additionalProperties": False},
    "compose": {"type": "object",
                "properties": {"a": _SYMBOL_SCHEMA, "b": _SYMBOL_SCHEMA,
                               "terms": {"type": "array", "items": {"type": "integer", "minimum": 1}}},
                "required": ["a", "b"], "additionalProperties": False},
    "parametrix": {"type": "object",
                   "properties": {"symbol": _SYMBOL_SCHEMA, "order": {"type": "number"},
                                  "rho": {"type": "number"}, "delta": {"type": "number"},
                                  "n_terms": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                   "required": ["symbol", "order"], "additionalProperties": False},
    "funcalc": {"type": "object",
                "properties": {"symbol": _SYMBOL_SCHEMA,
                               "functions": {"type": "array",
                                             "items": {"oneOf": [{"type": "string"}, _SYMBOL_SCHEMA]}},
                               "nodes_per_segment": {"type": "integer", "minimum": 4},
                               "tolerance": {"type": "number"}},
                "required": ["symbol"], "additionalProperties": False},
    "garding": {"type": "object",
                "properties": {"symbol": _SYMBOL_SCHEMA, "order": {"type": "number"},
                               "trials": {"type": "integer", "minimum": 1},
                               "min_c1": {"type": "number"}},
                "required": ["symbol", "order"], "additionalProperties": False},
    "l2norm": {"type": "object",
               "properties": {"symbol": _SYMBOL_SCHEMA,
                              "truncations": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                              "max_growth": {"type": "number"}},
               "required": ["symbol"], "additionalProperties": False},
    "evolve": {"type": "object",
               "properties": {"generator": _SYMBOL_SCHEMA,
                              "scheme": {"enum": ["crank_nicolson", "backward_euler", "picard"]},
                              "steps": {"type": "integer", "minimum": 1},
                              "horizon": {"type": "number", "exclusiveMinimum": 0},
                              "order": {"type": "number"},
                              "u0_mode": {"type": "integer"},
                              "forcing_mode": {"type": "integer"},
                              "gate": {"enum": ["dissipative", "literal", "off"]}},
               "required": ["generator"], "additionalProperties": False},
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "model": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["torus_derivative", "h_derivative", "torus_laplacian"]},
                "N": {"type": "integer", "minimum": 0},
                "Q": {"type": "integer", "minimum": 2},
                "h": {"type": "number", "exclusiveMinimum": 0},
                "m": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["kind", "N", "Q"],
            "additionalProperties": False,
        },
        "task": {"enum": list(TASKS)},
        "params": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
        "out_dir": {"type": "string"},
    },
    "required": ["model", "task"],
    "additionalProperties": False,
}


def _setup_threads():
    """Apply NONHARMONIC_THREADS before numpy is imported anywhere."""
    raw = os.environ.get("NONHARMONIC_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                    "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, str(n))


def fmt(x) -> str:
    """One CSV cell: integers as-is, reals with 17 significant digits."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(c) for c in row])


def config_digest(config: dict, seed: int) -> str:
    canon = json.dumps({"config": config, "seed": seed}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def load_config(path: str) -> dict:
    import jsonschema

    from .errors import ConfigurationError

    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
        schema = _PARAMS_SCHEMAS[config["task"]]
        jsonschema.validate(config.get("params", {}), schema)
    except jsonschema.ValidationError as exc:
        raise ConfigurationError(f"config schema violation: {exc.message}") from exc
    return config


def _build_symbol(block: dict, model):
    from .symbols import make_symbol

    block = dict(block)
    name = block.pop("name")
    scale = block.pop("scale", None)
    if name == "lambda_multiplier" and "order" not in block:
        block["order"] = model.order
    sym = make_symbol(name, **block)
    if scale is not None and scale != 1.0:
        base_fn = sym.fn
        sym.fn = lambda x, xi, lam, br: scale * base_fn(x, xi, lam, br)
        sym.name = f"{scale:g}*{sym.name}"
    return sym


# ---------------------------------------------------------------------------
# task runners: each returns (passed, summary, artifacts)
#   artifacts: list of (csv filename, header, rows)
# ---------------------------------------------------------------------------

def _task_model_check(model, params, seed):
    import numpy as np

    from .model import bracket, check_biorthogonality, check_wz, s0_tail

    dev = check_biorthogonality(model)
    wz = check_wz(model)
    br = bracket(model)
    tail = s0_tail(model, float(params.get("tail_s", 2.0)))
    gram = (model.u * model.w) @ model.v.conj().T
    row_dev = np.max(np.abs(gram - np.eye(len(model.indices))), axis=1)
    rows = []
    for i, xi in enumerate(model.indices):
        lam = model.eigenvalues[i]
        rows.append([int(xi), lam.real, lam.imag, br.values[i], wz.inf_u[i], wz.inf_v[i],
                     float(row_dev[i])])
    nondecreasing = bool(np.all(np.diff(br.values[model.N:]) >= -1e-14)
                         and np.all(np.diff(br.values[:model.N + 1]) <= 1e-14))
    passed = bool(dev <= 1e-12 and wz.passed and nondecreasing)
    summary = {"biorthogonality_deviation": dev, "wz_passed": wz.passed,
               "wz_fitted_exponent": wz.fitted_exponent,
               "bracket_nondecreasing": nondecreasing,
               "tail_convergent_looking": tail.convergent_looking,
               "tail_fitted_decay": tail.fitted_decay}
    return passed, summary, [("model_check.csv",
                              ["xi", "lambda_re", "lambda_im", "bracket", "inf_u", "inf_v",
                               "biorth_row_dev"], rows)]


def _task_transform_check(model, params, seed):
    import numpy as np

    from .quantize import band_limited
    from .transform import fourier, inverse, l2L_norm, l2_grid_norm

    trials = int(params.get("trials", 20))
    rng = np.random.default_rng(seed)
    rows = []
    worst_rt, worst_pv = 0.0, 0.0
    for t in range(trials):
        f = band_limited(model, rng)
        c = fourier(model, f)
        rt = float(np.max(np.abs(inverse(model, c) - f)))
        pv = abs(l2L_norm(model, c) - l2_grid_norm(model, f))
        rows.append([t, rt, pv])
        worst_rt, worst_pv = max(worst_rt, rt), max(worst_pv, pv)
    passed = bool(worst_rt <= 1e-12 and worst_pv <= 1e-10)
    return passed, {"max_roundtrip_error": worst_rt, "max_parseval_error": worst_pv}, [
        ("transform_check.csv", ["trial", "roundtrip_error", "parseval_error"], rows)]


def _task_symbol_order(model, params, seed):
    from .symbols import estimate_order

    sym = _build_symbol(params["symbol"], model)
    rho = float(params.get("rho", 1.0))
    delta = float(params.get("delta", 0.0))
    tol = float(params.get("tolerance", 0.1))
    expected = float(params.get("expected_order", sym.order))
    rep = estimate_order(model, sym, rho, delta)
    rows = [[a, b, v] for (a, b), v in sorted(rep.values.items())]
    passed = bool(abs(rep.fitted_order - expected) <= tol)
    return passed, {"fitted_order": rep.fitted_order, "expected_order": expected,
                    "tolerance": tol}, [
        ("symbol_order.csv", ["alpha", "beta", "seminorm"], rows)]


def _task_compose(model, params, seed):
    import numpy as np

    from .quantize import compose_symbols, composition_oracle, inner_window

    a = _build_symbol(params["a"], model)
    b = _build_symbol(params["b"], model)
    terms_list = [int(t) for t in params.get("terms", [1, 2, 3])]
    oracle = composition_oracle(model, a, b).table(model, 0)
    mask = inner_window(model, 0.5)
    br = model.bracket_val(model.indices)
    rows, sups = [], []
    for terms in terms_list:
        approx = compose_symbols(model, a, b, terms).table(model, 0)
        rem = np.max(np.abs(oracle - approx), axis=1)
        weight = br ** (-(a.order + b.order) + terms)
        wsup = float(np.max((rem * weight)[mask]))
        sups.append(wsup)
        for i, xi in enumerate(model.indices):
            rows.append([terms, int(xi), float(rem[i]), float(rem[i] * weight[i])])
    floor = 1e-8
    monotone = all(s1 <= s0 or s1 <= floor for s0, s1 in zip(sups, sups[1:]))
    return bool(monotone), {"weighted_sups": dict(zip(map(str, terms_list), sups)),
                            "floor": floor}, [
        ("compose.csv", ["terms", "xi", "remainder", "weighted_remainder"], rows)]


def _task_parametrix(model, params, seed):
    import numpy as np

    from .calculus import parametrix
    from .quantize import composition_oracle

    sym = _build_symbol(params["symbol"], model)
    m_ord = float(params["order"])
    rho = float(params.get("rho", 1.0))
    delta = float(params.get("delta", 0.0))
    n_list = [int(n) for n in params.get("n_terms", [0, 1, 2])]

    tab = sym.table(model, 0)
    x_indep = bool(np.max(np.abs(tab - tab[:, :1])) < 1e-13 * max(1.0, float(np.max(np.abs(tab)))))
    band = (np.abs(model.indices) >= (3 * model.N) // 8) & (np.abs(model.indices) <= model.N // 2)
    rows, sups = [], []
    for n in n_list:
        res = parametrix(model, sym, m_ord, rho, delta, n)
        prod = composition_oracle(model, sym, res.symbol)
        rem = np.max(np.abs(prod.table(model, 0) - 1.0), axis=1)
        sups.append(float(np.max(rem[band])))
        for i, xi in enumerate(model.indices):
            rows.append([n, int(xi), float(rem[i])])
    if x_indep:
        scale = float(np.max(np.abs(tab))) * float(np.max(np.abs(1.0 / tab)))
        passed = bool(max(sups) / scale <= 1e-12)
        summary = {"multiplier_case": True, "normalized_sup": max(sups) / scale,
                   "ellipticity_sup": res.ellipticity_sup}
    else:
        ratio = sups[0] / sups[-1] if sups[-1] > 0 else float("inf")
        passed = bool(ratio >= 2.0)
        summary = {"multiplier_case": False, "band_sups": dict(zip(map(str, n_list), sups)),
                   "decrease_ratio": ratio, "ellipticity_sup": res.ellipticity_sup}
    return passed, summary, [("parametrix.csv", ["n_terms", "xi", "sup_x_remainder"], rows)]


def _task_funcalc(model, params, seed):
    import numpy as np

    from .calculus import (Contour, dunford_riesz, fractional_power_symbol,
                           make_scalar_function)

    sym = _build_symbol(params["symbol"], model)
    nps = int(params.get("nodes_per_segment", 100))
    tol = float(params.get("tolerance", 1e-6))
    specs = params.get("functions", ["inverse", "inverse_sqrt"])
    tab0 = sym.table(model, 0)
    # the diagonal spectral oracle F(a(xi)) is exact only for multipliers;
    # for x-dependent symbols the leading-term deviation is reported, not asserted
    x_indep = bool(np.max(np.abs(tab0 - tab0[:, :1]))
                   < 1e-13 * max(1.0, float(np.max(np.abs(tab0)))))

    rows = []
    passed = True
    summary = {"multiplier_oracle_asserted": x_indep}
    for fspec in specs:
        if isinstance(fspec, str):
            fname, fkw = fspec, {}
        else:
            fkw = dict(fspec)
            fname = fkw.pop("name")
        F, s = make_scalar_function(fname, **fkw)
        errs = []
        for n in (max(nps // 4, 4), max(nps // 2, 4), nps):
            contour = Contour.default_keyhole(model, sym, nodes_per_segment=n)
            res = dunford_riesz(model, sym, F, contour, decay_exponent=s)
            got = res.symbol.table(model, 0)
            oracle = tab0**s if x_indep else res.leading_term.table(model, 0)
            rel = float(np.max(np.abs(got - oracle) / np.maximum(np.abs(oracle), 1e-300)))
            errs.append(rel)
            for i, xi in enumerate(model.indices):
                e = float(np.max(np.abs(got[i] - oracle[i]) / np.maximum(np.abs(oracle[i]), 1e-300)))
                rows.append([fname, 4 * n, int(xi), got[i][0].real, got[i][0].imag,
                             oracle[i][0].real, oracle[i][0].imag, e])
        if x_indep:
            mono = all(e1 <= e0 * (1 + 1e-9) or e1 <= 1e-13 for e0, e1 in zip(errs, errs[1:]))
            ok = bool(errs[-1] <= tol and mono)
        else:
            mono = None
            ok = True
        if fname == "inverse_sqrt":
            frac = fractional_power_symbol(model, sym, -0.5).table(model, 0)
            cross = float(np.max(np.abs(res.symbol.table(model, 0) - frac)
                                 / np.maximum(np.abs(frac), 1e-300)))
            if x_indep:
                ok = ok and cross <= tol
            summary["inverse_sqrt_cross_check"] = cross
        passed = passed and ok
        summary[fname] = {"errors": errs, "monotone": mono}
    return bool(passed), summary, [
        ("funcalc.csv", ["function", "total_nodes", "xi", "sigma_re", "sigma_im",
                         "oracle_re", "oracle_im", "relative_error"], rows)]


def _task_garding(model, params, seed):
    from .analysis import garding_estimate

    sym = _build_symbol(params["symbol"], model)
    m_ord = float(params["order"])
    trials = int(params.get("trials", 200))
    min_c1 = float(params.get("min_c1", 0.0))
    rep = garding_estimate(model, sym, m_ord, trials=trials, seed=seed)
    rows = [[t, rep.quad_forms[t], rep.sobolev_sq[t], rep.l2_sq[t],
             rep.quad_forms[t] - rep.C1 * rep.sobolev_sq[t] + rep.C2 * rep.l2_sq[t]]
            for t in range(trials)]
    passed = bool(rep.verdict and rep.violations == 0 and rep.C1 >= min_c1)
    return passed, {"C0": rep.C0, "C1": rep.C1, "C2": rep.C2,
                    "violations": rep.violations, "seed": seed}, [
        ("garding.csv", ["trial", "re_quadform", "sobolev_sq", "l2_sq", "margin"], rows)]


def _task_l2norm(model, params, seed):
    import numpy as np

    from .analysis import hilbert_schmidt_norm, l2_operator_norm

    sym = _build_symbol(params["symbol"], model)
    truncs = [int(n) for n in params.get("truncations", [8, 16, 32])]
    max_growth = float(params.get("max_growth", 0.01))
    norms = l2_operator_norm(model.spec, sym, truncs)
    hs = hilbert_schmidt_norm(model, sym)
    rows = [[n, float(v)] for n, v in zip(truncs, norms)]
    growth = float(norms[-1] / norms[-2] - 1.0) if len(norms) >= 2 else 0.0
    passed = bool(abs(growth) <= max_growth)
    summary = {"operator_norms": dict(zip(map(str, truncs), map(float, norms))),
               "relative_growth_last_two": growth, "hilbert_schmidt_norm": hs}
    tab = sym.table(model, 0)
    if model.spec.kind in ("torus_derivative", "torus_laplacian"):
        oracle = float(np.sqrt(np.sum(np.abs(tab) ** 2) / model.Q))
        summary["hs_identity_error"] = abs(hs - oracle)
        passed = passed and abs(hs - oracle) <= 1e-10 * max(1.0, oracle)
    return passed, summary, [("l2norm.csv", ["N", "operator_norm"], rows)]


def _task_evolve(model, params, seed):
    import numpy as np

    from .evolve import EvolutionProblem, energy_check, residual, solve_ivp, uniqueness_probe

    gen = _build_symbol(params["generator"], model)
    scheme = params.get("scheme", "crank_nicolson")
    steps = int(params.get("steps", 200))
    T = float(params.get("horizon", 0.1))
    m_ord = float(params.get("order", gen.order))
    gate = params.get("gate", "dissipative")
    u0 = model.u_row(int(params.get("u0_mode", 1)))
    forcing = None
    if "forcing_mode" in params:
        fmode = int(params["forcing_mode"])
        forcing = lambda t: model.u_row(fmode)
    prob = EvolutionProblem(symbol_factory=lambda t: gen, u0=u0, T=T, steps=steps,
                            scheme=scheme, forcing=forcing, order_m=m_ord,
                            ellipticity_gate=gate)
    traj = solve_ivp(model, prob)
    erep = energy_check(model, prob, traj, seed=seed)
    urep = uniqueness_probe(model, prob, seed=seed)
    res = residual(model, prob, traj)
    rows = [[k, float(traj.times[k]), float(traj.norms[k])] for k in range(len(traj.times))]
    rrows = [[k, float(traj.times[k]), float(res[k - 1])] for k in range(1, steps)]
    passed = bool(erep.passed and urep.passed)
    summary = {"scheme": scheme, "energy_C": erep.C, "energy_C2": erep.C2,
               "energy_C_prime": erep.C_prime, "energy_violations": erep.violations,
               "bitwise_identical": urep.bitwise_identical,
               "homogeneous_max_norm": urep.homogeneous_max_norm,
               "picard_iterations": traj.picard_iterations}
    return passed, summary, [
        ("evolve.csv", ["step", "t", "l2_norm"], rows),
        ("evolve_residual.csv", ["step", "t", "residual_norm"], rrows)]


_RUNNERS = {
    "model-check": _task_model_check,
    "transform-check": _task_transform_check,
    "symbol-order": _task_symbol_order,
    "compose": _task_compose,
    "parametrix": _task_parametrix,
    "funcalc": _task_funcalc,
    "garding": _task_garding,
    "l2norm": _task_l2norm,
    "evolve": _task_evolve,
}


def run(config_path: str, out_dir: str = None, seed: int = None) -> int:
    """Execute one experiment; returns the process exit code."""
    from .errors import GUARD_ERRORS, ConfigurationError

    try:
        config = load_config(config_path)
        from .model import ModelSpec, build_model

        mdl_block = config["model"]
        spec = ModelSpec(kind=mdl_block["kind"], N=mdl_block["N"], Q=mdl_block["Q"],
                         h=mdl_block.get("h"), m=mdl_block.get("m"))
        model = build_model(spec)
    except ConfigurationError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2

    if seed is None:
        seed = int(config.get("seed", 0))
    out = Path(out_dir or config.get("out_dir", "runs"))
    out.mkdir(parents=True, exist_ok=True)

    task = config["task"]
    params = config.get("params", {})
    try:
        passed, summary, artifacts = _RUNNERS[task](model, params, seed)
    except ConfigurationError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    except GUARD_ERRORS as exc:
        print(f"error: numerical guard tripped: {exc}", file=sys.stderr)
        return 3

    digest = config_digest(config, seed)
    csv_paths = []
    for name, header, rows in artifacts:
        path = out / name
        write_csv(path, header, rows)
        csv_paths.append(str(path))
    summary_doc = {"task": task, "digest": digest, "seed": seed, "passed": passed,
                   "summary": summary, "csv": csv_paths}
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary_doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")

    record = {"digest": digest, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
              "version": VERSION, "task": task, "passed": passed, "csv": csv_paths}
    with open(out / "registry.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")

    status = "pass" if passed else "FAIL"
    print(f"{task}: {status} (digest {digest}, artifacts in {out})")
    return 0 if passed else 1


def report(registry_path: str, out_path: str = None) -> int:
    """Aggregate a registry file into a one-line-per-run CSV summary."""
    path = Path(registry_path)
    if not path.exists():
        print(f"error: registry {registry_path} does not exist", file=sys.stderr)
        return 2
    header = ["digest", "timestamp", "version", "task", "passed"]
    rows, corrupt, total = [], 0, 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            total += 1
            try:
                rec = json.loads(line)
                rows.append([rec["digest"], rec["timestamp"], rec["version"],
                             rec["task"], "1" if rec["passed"] else "0"])
            except (json.JSONDecodeError, KeyError, TypeError):
                corrupt += 1
                print(f"warning: skipping corrupt registry entry at line {total}", file=sys.stderr)
    if total > 0 and corrupt == total:
        print("error: every registry entry is corrupt", file=sys.stderr)
        return 1
    out = sys.stdout
    if out_path:
        out = open(out_path, "w", newline="", encoding="utf-8")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if out_path:
        out.close()
    return 0


def main(argv=None) -> int:
    _setup_threads()
    parser = argparse.ArgumentParser(prog="nonharmonic",
                                     description="Run operator-calculus experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_rep = sub.add_parser("report", help="summarize a run registry")
    p_rep.add_argument("--registry", required=True)
    p_rep.add_argument("--out", default=None)
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.config, out_dir=args.out, seed=args.seed)
    return report(args.registry, out_path=args.out)


if __name__ == "__main__":
    sys.exit(main())
