"""Batch driver: build a model, enumerate Phi subsets or V subspaces, run the
ideal / congruence / geometry pipelines, write one report per task and exit
with status 0 exactly when every verdict passes."""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import congruence as cg
from . import geometry as ge
from . import models, serialize
from .errors import ArgumentError, ConfigurationError, OrbitCertError
from .rootspace import phi_indices, proper_subsets
from .structure import SolvableStructure, solvable_structure
from .subalgebra import (
    build_parabolic,
    build_s_Phi,
    build_s_V,
    check_parabolic_ideal,
    hopf_algebras,
    is_ideal,
)

log = logging.getLogger("orbitcert")

MODES = ("ideal", "congruence", "geometry", "all")
MAX_ENUMERATE_RANK = 6
EXIT_FAIL = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class RunConfig:
    model: str = "sl"
    n: int = 3
    mode: str = "all"
    phi: Any = "all"  # "all", or a list of 1-based simple-root indices
    v: Any = None  # path to a spanning-set file, or a loaded list of vectors
    tol_orbit: float = 1e-6
    tol_conjugator: float = 1e-9
    tol_normality: float = 1e-9
    tol_mean: float = 1e-9
    tol_einstein: float = 1e-7
    budget: int = 64
    pairs: int = 3
    seed: int = 0
    workers: int = 4
    out: str | None = None

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigurationError("mode", f"expected one of {MODES}, got {self.mode!r}")
        models.make_model(self.model, self.n)  # raises naming the bad field
        for name in ("tol_orbit", "tol_conjugator", "tol_normality", "tol_mean", "tol_einstein"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or not val > 0:
                raise ConfigurationError(name, f"must be a positive number, got {val!r}")
        for name, low in (("budget", 1), ("pairs", 1), ("workers", 1), ("seed", 0)):
            val = getattr(self, name)
            if not isinstance(val, int) or isinstance(val, bool) or val < low:
                raise ConfigurationError(name, f"must be an integer >= {low}, got {val!r}")
        if self.model == "hopf" and self.mode == "geometry":
            raise ConfigurationError("mode", "the hopf model supports ideal and congruence only")
        return self


def parse_phi(text) -> Any:
    """"all" -> "all"; "" / "none" / "empty" -> []; "1,3" -> [1, 3]."""
    if text is None:
        return "all"
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    text = str(text).strip().lower()
    if text == "all":
        return "all"
    if text in ("", "none", "empty", "{}", "[]"):
        return []
    try:
        return sorted({int(tok) for tok in text.replace(" ", "").split(",") if tok})
    except ValueError as exc:
        raise ConfigurationError("phi", f"expected comma list of integers or 'all', got {text!r}") from exc


def load_config(path: str | None, overrides: dict) -> RunConfig:
    data: dict = {}
    if path:
        loaded = serialize.load_structured(path)
        if not isinstance(loaded, dict):
            raise ConfigurationError("config", "file must hold a mapping of option names")
        data = {k.replace("-", "_"): v for k, v in loaded.items()}
        known = {f.name for f in fields(RunConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(unknown[0], "unknown configuration key")
    data.update({k: v for k, v in overrides.items() if v is not None})
    if "phi" in data:
        data["phi"] = parse_phi(data["phi"])
    for key in ("tol_orbit", "tol_conjugator", "tol_normality", "tol_mean", "tol_einstein"):
        if isinstance(data.get(key), str):
            try:
                data[key] = float(data[key])
            except ValueError as exc:
                raise ConfigurationError(key, f"not a number: {data[key]!r}") from exc
    return RunConfig(**data).validate()


# -- tasks --------------------------------------------------------------------

@dataclass(frozen=True)
class Task:
    mode: str
    key: str
    run: Callable[[], dict] = field(compare=False)

    @property
    def name(self) -> str:
        return f"{self.mode}_{self.key}"


def phi_key(phi) -> str:
    return "phi-" + ("empty" if not phi else "-".join(str(i) for i in phi))


def _rng(cfg: RunConfig, salt: str) -> np.random.Generator:
    # the seed sequence is a pure function of the config and the task key
    return np.random.default_rng([cfg.seed] + [ord(ch) for ch in salt])


def _pairs(model, cfg: RunConfig, salt: str) -> list[tuple]:
    rng = _rng(cfg, salt)
    return [(models.random_point(model, rng), models.random_point(model, rng)) for _ in range(cfg.pairs)]


def _congruence_config(cfg: RunConfig) -> cg.CongruenceConfig:
    return cg.CongruenceConfig(
        tol_conjugator=cfg.tol_conjugator,
        tol_normality=cfg.tol_normality,
        tol_orbit=cfg.tol_orbit,
        budget=cfg.budget,
        search=cg.SearchOptions(seed=cfg.seed),
    )


def _congruence_doc(model, sub, certificate, cfg: RunConfig, salt: str, ambient) -> dict:
    chart = cg.make_chart(model, sub, ambient)
    reports = [
        cg.verify_congruence(model, sub, p, q, _congruence_config(cfg), certificate=certificate, chart=chart)
        for p, q in _pairs(model, cfg, salt)
    ]
    worst = max(r.max_distance_to_orbit for r in reports)
    return {
        "kind": "congruence",
        "model": model.descriptor(),
        "subalgebra": sub.tag,
        "ideal_certificate": certificate.to_dict(),
        "seed": cfg.seed,
        "pairs": [r.to_dict() for r in reports],
        "max_distance_to_orbit": worst,
        "verdict": "pass" if all(r.passed for r in reports) else "fail",
    }


def _ideal_phi(st: SolvableStructure, phi) -> dict:
    s_phi = build_s_Phi(st.dec, st.ps, phi)
    q_phi = build_parabolic(st.dec, st.ps, phi)
    ideal = is_ideal(s_phi, st.s)
    contained = q_phi.contains_span(st.s)
    parabolic = check_parabolic_ideal(s_phi, q_phi)
    ok = ideal.holds and contained and parabolic.holds
    return {
        "kind": "ideal",
        "model": st.model.descriptor(),
        "phi": list(phi),
        "s_Phi": s_phi.to_dict(),
        "s_in_q_Phi": contained,
        "s_Phi_ideal_in_s": ideal.to_dict(),
        "s_Phi_ideal_in_q_Phi": parabolic.to_dict(),
        "verdict": "pass" if ok else "fail",
    }


def _ideal_v(st: SolvableStructure, V, key: str) -> dict:
    s_v = build_s_V(st.s, st.dec.a_basis, V)
    ideal = is_ideal(s_v, st.s)
    return {
        "kind": "ideal",
        "model": st.model.descriptor(),
        "v": key,
        "s_V": s_v.to_dict(),
        "s_V_ideal_in_s": ideal.to_dict(),
        "verdict": "pass" if ideal.holds else "fail",
    }


def _geometry_phi(st: SolvableStructure, phi, cfg: RunConfig) -> dict:
    s_phi = build_s_Phi(st.dec, st.ps, phi)
    rep = ge.geometry_report(st.model, s_phi, st.s, cfg.tol_mean, cfg.tol_einstein)
    return {"kind": "geometry", **rep.to_dict()}


def _load_v(cfg: RunConfig, st: SolvableStructure) -> list | None:
    if cfg.v is None:
        return None
    V = serialize.load_structured(cfg.v) if isinstance(cfg.v, (str, Path)) else cfg.v
    if isinstance(V, dict):
        V = V.get("V", V.get("v"))
    if not isinstance(V, list) or not V:
        raise ConfigurationError("v", "expected a non-empty list of vectors or matrices")
    try:
        build_s_V(st.s, st.dec.a_basis, V)
    except (ArgumentError, ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError("v", str(exc)) from exc
    return V


def plan(cfg: RunConfig) -> list[Task]:
    """All tasks for a validated config, in sorted key order."""
    model = models.make_model(cfg.model, cfg.n)
    modes = ("ideal", "congruence", "geometry") if cfg.mode == "all" else (cfg.mode,)
    tasks: list[Task] = []
    if model.compact:
        u1, u = hopf_algebras(model)

        def hopf_ideal() -> dict:
            chk = is_ideal(u1, u)
            return {"kind": "ideal", "model": model.descriptor(), "ideal": chk.to_dict(),
                    "verdict": "pass" if chk.holds else "fail"}

        def hopf_congruence() -> dict:
            return _congruence_doc(model, u1, is_ideal(u1, u), cfg, "u1", u)

        for mode in modes:
            if mode == "ideal":
                tasks.append(Task("ideal", "u1", hopf_ideal))
            elif mode == "congruence":
                tasks.append(Task("congruence", "u1", hopf_congruence))
        return tasks

    st = solvable_structure(model)
    if cfg.phi == "all":
        if st.rank > MAX_ENUMERATE_RANK:
            raise ConfigurationError("phi", f"rank {st.rank} exceeds {MAX_ENUMERATE_RANK}; pass an explicit list")
        phis = proper_subsets(st.ps)
    else:
        try:
            idx = phi_indices(st.ps, cfg.phi)
        except ArgumentError as exc:
            raise ConfigurationError("phi", str(exc)) from exc
        if len(idx) == st.rank:
            raise ConfigurationError("phi", "Phi must be a proper subset of the simple roots")
        phis = [idx]
    V = _load_v(cfg, st)

    for mode in modes:
        for phi in phis:
            key = phi_key(phi)
            if mode == "ideal":
                tasks.append(Task(mode, key, lambda phi=phi: _ideal_phi(st, phi)))
            elif mode == "congruence":
                def run(phi=phi, key=key) -> dict:
                    s_phi = build_s_Phi(st.dec, st.ps, phi)
                    return _congruence_doc(model, s_phi, is_ideal(s_phi, st.s), cfg, key, st.s)
                tasks.append(Task(mode, key, run))
            else:
                tasks.append(Task(mode, key, lambda phi=phi: _geometry_phi(st, phi, cfg)))
        if V is not None and mode in ("ideal", "congruence"):
            if mode == "ideal":
                tasks.append(Task(mode, "V", lambda: _ideal_v(st, V, "V")))
            else:
                def run_v() -> dict:
                    s_v = build_s_V(st.s, st.dec.a_basis, V)
                    return _congruence_doc(model, s_v, is_ideal(s_v, st.s), cfg, "V", st.s)
                tasks.append(Task(mode, "V", run_v))
    return sorted(tasks, key=lambda t: (MODES.index(t.mode), t.key))


def run(cfg: RunConfig, stream=None) -> tuple[int, list[tuple[Task, dict]]]:
    """Execute every task; returns (exit status, [(task, report)]).

    Tasks run on a thread pool but results are collected in plan order, so the
    written files and the summary do not depend on scheduling.
    """
    stream = stream or sys.stdout
    tasks = plan(cfg)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        docs = list(pool.map(lambda t: t.run(), tasks))
    results = list(zip(tasks, docs))
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"{cfg.model}{cfg.n}"
        for task, doc in results:
            serialize.write_report(out / f"{stem}_{task.name}.json", doc)
    print_summary(cfg, results, stream)
    ok = all(doc["verdict"] == "pass" for _, doc in results)
    return (0 if ok else EXIT_FAIL), results


def _headline(doc: dict) -> str:
    kind = doc["kind"]
    if kind == "congruence":
        worst_res = max(max(p["conjugator_residual"], p["normality_residual"]) for p in doc["pairs"])
        return f"orbit {doc['max_distance_to_orbit']:.1e}  conj/norm {worst_res:.1e}"
    if kind == "geometry":
        return (f"|H| {doc['mean_curvature_norm']:.1e}  c {doc['einstein_constant']:+.6f}  "
                f"res {doc['einstein_residual']:.1e}{'  flat' if doc['flat'] else ''}")
    return "exact"


def print_summary(cfg: RunConfig, results, stream) -> None:
    print(f"model {cfg.model}(n={cfg.n})  mode {cfg.mode}  tasks {len(results)}", file=stream)
    print(f"{'task':<28} {'verdict':<8} detail", file=stream)
    for task, doc in results:
        print(f"{task.name:<28} {doc['verdict']:<8} {_headline(doc)}", file=stream)
    failed = sum(doc["verdict"] != "pass" for _, doc in results)
    print(f"{len(results) - failed} passed, {failed} failed", file=stream)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbitcert", description=__doc__.split("\n")[0])
    # defaults are None so that values from --config survive unless given on the command line
    p.add_argument("--config", help="YAML or JSON file with option values (flags override it)")
    p.add_argument("--model", choices=models.MODEL_NAMES)
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--phi", help="comma list of simple-root indices, 'all', or 'none' for the empty set")
    p.add_argument("--v", help="file with a spanning set of V in a (coordinate vectors or matrices)")
    p.add_argument("--tol-orbit", type=float, dest="tol_orbit")
    p.add_argument("--budget", type=int, help="orbit samples per pass")
    p.add_argument("--pairs", type=int, help="random point pairs per congruence task")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="directory for report files")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "verbose")}
    try:
        cfg = load_config(args.config, overrides)
        status, _ = run(cfg)
    except ConfigurationError as exc:
        print(f"orbitcert: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OrbitCertError, OSError) as exc:
        print(f"orbitcert: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
