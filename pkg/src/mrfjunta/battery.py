"""Oracle batteries: named checks over seeded instance families, reported as verdicts.

A battery spec is a JSON document ``{"checks": [{"name": ..., **params}, ...]}``.
Every verdict carries ``check``, ``instances``, ``max_residual``, ``bound``
and ``pass``. Identity checks report their largest residual against a
tolerance. Floor checks (lower bounds) report the largest violation, floor
minus observed, against a bound of 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Iterator

from .instances import ising_chain, random_model, three_chain
from .junta import Junta, random_junta
from .mrf import ModelValidationError, MrfModel, derive_seed, load_model, rng_for
from .oracle import (
    anticoncentration_bound,
    anticoncentration_trial,
    build_derived_model,
    claim34_experiment,
    conditional_floor_scan,
    exact_statistic,
    unbiasedness_scan,
    verify_density_ratio,
    verify_eq3,
)
from .polynomial import MultilinearPolynomial
from .sampling import Restriction, enumerate_distribution, restrictions_on

IDENTITY_TOL = 1e-10
RATIO_TOL = 1e-9


class BatterySpecError(ValueError):
    pass


@dataclass(frozen=True)
class BatteryParams:
    instances: int = 50
    juntas: int = 20
    seed: int = 0
    n_min: int = 6
    n_max: int = 10
    d_max: int = 3
    lambda_max: float = 1.0
    sigma: float = 0.3
    k_max: int = 3

    @classmethod
    def from_entry(cls, entry: dict) -> "BatteryParams":
        known = {k: entry[k] for k in cls.__dataclass_fields__ if k in entry}
        return cls(**known)


def model_battery(p: BatteryParams) -> Iterator[MrfModel]:
    for m in range(p.instances):
        rng = rng_for(p.seed, m)
        n = int(rng.integers(p.n_min, p.n_max + 1))
        d = int(rng.integers(1, min(p.d_max, n - 1) + 1))
        lam = float(rng.uniform(0, p.lambda_max))
        yield random_model(n, d, lam, p.sigma, derive_seed(p.seed, m))


def junta_battery(model: MrfModel, p: BatteryParams, m: int) -> list[Junta]:
    out = []
    for j in range(p.juntas):
        rng = rng_for(p.seed, m, j)
        k = int(rng.integers(1, min(p.k_max, model.n) + 1))
        out.append(random_junta(model.n, k, derive_seed(p.seed, m, j)))
    return out


def _models(entry: dict, p: BatteryParams) -> list[MrfModel]:
    models = list(model_battery(p))
    models.extend(load_model(path) for path in entry.get("models", []))
    return models


def _verdict(check: str, instances: int, worst: float, bound: float, ok: bool, **extra) -> dict:
    out = {"check": check, "instances": instances, "max_residual": float(worst), "bound": float(bound), "pass": bool(ok)}
    out.update(extra)
    return out


def check_irrelevant_zero(entry: dict) -> dict:
    p = BatteryParams.from_entry(entry)
    worst, count = 0.0, 0
    for m, model in enumerate(_models(entry, p)):
        dist = enumerate_distribution(model)
        for f in junta_battery(model, p, m):
            for i in range(model.n):
                if i in f.relevant:
                    continue
                for rho in restrictions_on(model.n, model.graph.neighbors(i)):
                    worst = max(worst, exact_statistic(dist, f, i, rho, model.graph))
                    count += 1
    return _verdict("irrelevant_zero", count, worst, IDENTITY_TOL, worst <= IDENTITY_TOL)


def check_factorization(entry: dict) -> dict:
    p = BatteryParams.from_entry(entry)
    worst, count = 0.0, 0
    for m, model in enumerate(_models(entry, p)):
        dist = enumerate_distribution(model)
        for f in junta_battery(model, p, m):
            for i in range(model.n):
                for rho in restrictions_on(model.n, model.graph.neighbors(i)):
                    worst = max(worst, verify_eq3(dist, f, i, rho, model.graph).worst)
                    count += 1
    return _verdict("factorization", count, worst, IDENTITY_TOL, worst <= IDENTITY_TOL)


def check_factorization_control(entry: dict) -> dict:
    """Dropping the neighbor from the conditioning must break independence."""
    threshold = float(entry.get("min_residual", 1e-3))
    model, f = three_chain()
    res = verify_eq3(enumerate_distribution(model), f, 0, Restriction.free(3))
    return _verdict("factorization_control", 1, res.independence, threshold, res.independence > threshold)


def check_density_ratio(entry: dict) -> dict:
    p = BatteryParams.from_entry(entry)
    worst, factor_slack, count = 0.0, math.inf, 0
    for m, model in enumerate(_models(entry, p)):
        for f in junta_battery(model, p, m):
            for i in range(model.n):
                derived = build_derived_model(model, f, i)
                for rho in restrictions_on(model.n, model.graph.neighbors(i)):
                    for z in product((0, 1), repeat=len(derived.far)):
                        chk = verify_density_ratio(derived, rho, z)
                        worst = max(worst, chk.residual)
                        factor_slack = min(factor_slack, chk.shared_factor / chk.floor)
                        count += 1
    ok = worst <= RATIO_TOL and factor_slack >= 1.0
    return _verdict("density_ratio", count, worst, RATIO_TOL, ok, min_factor_over_floor=factor_slack)


def check_unbiasedness(entry: dict) -> dict:
    p = BatteryParams.from_entry(entry)
    worst, count = -math.inf, 0
    for model in _models(entry, p):
        smoothed_floor = math.exp(-model.lam) / 4
        if model.smoothing is not None:
            worst = max(worst, smoothed_floor - unbiasedness_scan(model)[0])
            count += 1
        bare = model.unsmoothed()
        worst = max(worst, math.exp(-model.lam) / 2 - unbiasedness_scan(bare)[0])
        count += 1
    return _verdict("unbiasedness", count, worst, 0.0, worst <= 0.0)


def check_conditional_floor(entry: dict) -> dict:
    p = BatteryParams.from_entry(entry)
    max_support = int(entry.get("max_support", 3))
    worst, count = -math.inf, 0
    for model in _models(entry, p):
        for mdl, delta in ((model, math.exp(-model.lam) / 4), (model.unsmoothed(), math.exp(-model.lam) / 2)):
            scan = conditional_floor_scan(enumerate_distribution(mdl), delta, max_support)
            worst = max(worst, 1.0 - scan.joint_ratio, 1.0 - scan.site_ratio)
            count += scan.restrictions
    return _verdict("conditional_floor", count, worst, 0.0, worst <= 0.0)


def polynomial_battery(count: int, seed: int, n: int = 4) -> list[tuple[MultilinearPolynomial, int, float]]:
    """Random multilinear polynomials of degree 1-3 with their degree and min top coefficient."""
    out = []
    for t in range(count):
        rng = rng_for(seed, t)
        ell = 1 + t % 3
        terms = {}
        for size in range(ell + 1):
            for vars_ in combinations(range(n), size):
                if size == ell or rng.random() < 0.5:
                    terms[vars_] = rng.uniform(-1, 1)
        poly = MultilinearPolynomial(n, terms)
        top = [abs(c) for k, c in poly.terms.items() if len(k) == ell]
        out.append((poly, ell, min(top)))
    return out


def check_anticoncentration(entry: dict) -> dict:
    polys = int(entry.get("polynomials", 12))
    trials = int(entry.get("trials", 100_000))
    sigma = float(entry.get("sigma", 0.3))
    eps_list = entry.get("epsilons", [1e-4, 1e-3, 1e-2])
    seed = int(entry.get("seed", 0))
    worst, count = -math.inf, 0
    for t, (poly, ell, c) in enumerate(polynomial_battery(polys, seed)):
        for e_idx, eps in enumerate(eps_list):
            emp = anticoncentration_trial(poly, c, ell, sigma, eps, trials, derive_seed(seed, t, e_idx))
            bound = anticoncentration_bound(ell, eps)
            b = min(bound, 1.0)
            se = math.sqrt(b * (1 - b) / trials)
            worst = max(worst, emp - (bound + 3 * se))
            count += 1
    return _verdict("anticoncentration", count, worst, 0.0, worst <= 0.0)


def check_completeness(entry: dict) -> dict:
    gamma = float(entry.get("gamma", 0.2))
    smoothings = int(entry.get("smoothings", 500))
    n = int(entry.get("n", 8))
    k = int(entry.get("k", 3))
    lam = float(entry.get("lambda", 1.0))
    sigma = float(entry.get("sigma", 0.3))
    instances = int(entry.get("instances", 4))
    seed = int(entry.get("seed", 0))
    floor = 1 - gamma - 3 * math.sqrt((1 - gamma) * gamma / smoothings)
    worst, count = -math.inf, 0
    for m in range(instances):
        model = ising_chain(n, lam, None, derive_seed(seed, m))
        f = random_junta(n, k, derive_seed(seed, m, 1))
        for i in f.relevant:
            res = claim34_experiment(model.psi_bar, model.graph, lam, sigma, f, i, gamma, smoothings, derive_seed(seed, m, i))
            worst = max(worst, floor - res.fraction)
            count += 1
    return _verdict("completeness", count, worst, 0.0, worst <= 0.0)


def check_validate(entry: dict) -> dict:
    paths = entry.get("models", [])
    errors = []
    for path in paths:
        try:
            load_model(path)
        except (ModelValidationError, ValueError) as exc:
            errors.append(f"{path}: {exc}")
    return _verdict("validate", len(paths), float(len(errors)), 0.0, not errors, errors=errors)


CHECKS: dict[str, Callable[[dict], dict]] = {
    "irrelevant_zero": check_irrelevant_zero,
    "factorization": check_factorization,
    "factorization_control": check_factorization_control,
    "density_ratio": check_density_ratio,
    "unbiasedness": check_unbiasedness,
    "conditional_floor": check_conditional_floor,
    "anticoncentration": check_anticoncentration,
    "completeness": check_completeness,
    "validate": check_validate,
}


def default_battery_spec() -> dict:
    return {"checks": [{"name": name} for name in CHECKS if name != "validate"]}


def parse_battery_spec(spec) -> list[dict]:
    if isinstance(spec, dict):
        entries = spec.get("checks")
    else:
        entries = spec
    if not isinstance(entries, list) or not all(isinstance(e, dict) and "name" in e for e in entries):
        raise BatterySpecError("battery spec must be {'checks': [{'name': ...}, ...]}")
    for e in entries:
        if e["name"] not in CHECKS:
            raise BatterySpecError(f"unknown check {e['name']!r}; known: {sorted(CHECKS)}")
    return entries


def run_oracle_battery(spec) -> Iterator[dict]:
    """Yield one verdict per configured check; invalid model files fail their check."""
    for entry in parse_battery_spec(spec):
        try:
            yield CHECKS[entry["name"]](entry)
        except ModelValidationError as exc:
            yield {"check": entry["name"], "instances": 0, "max_residual": None, "bound": 0.0, "pass": False, "error": str(exc)}
