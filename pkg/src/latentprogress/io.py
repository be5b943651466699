"""CSV ingestion, dichotomization, run configuration, and sample persistence.

Responses travel as long-format CSV (individual,item,time,response). Fits are
persisted as a directory of CSVs plus a manifest; floats are written with 17
significant digits so a save/load round trip is bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .andersen import AndersenSamples
from .engine import ChainConfig, PosteriorSamples
from .errors import DataError
from .geometry import EUCLIDEAN, POINCARE, MetricSpace, euclidean, poincare_disk
from .model import Hyperparams, ResponseTensor

SCHEMA_VERSION = "1.0.0"
RESPONSE_COLUMNS = ["individual", "item", "time", "response"]
CESD_RULE = {1: 1, 2: 0, 3: 0, 4: 0}
_FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# response panels


def load_responses(path, return_labels: bool = False):
    """Long-format CSV -> ResponseTensor.

    Individuals and items are indexed by first appearance; times must cover
    1..T without gaps and T >= 2; a missing row leaves the cell unobserved.
    Duplicate cells, non-binary responses, and any (individual, time) with no
    observed response at all are rejected.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    try:
        frame = pd.read_csv(path)
    except Exception as exc:
        raise DataError(f"cannot parse {path}: {exc}") from exc
    if list(frame.columns) != RESPONSE_COLUMNS:
        raise DataError(
            f"expected header {','.join(RESPONSE_COLUMNS)}, got {','.join(map(str, frame.columns))}"
        )
    if len(frame) == 0:
        raise DataError("no response rows")

    for col in ("time", "response"):
        vals = frame[col]
        try:
            as_int = vals.astype(int)
        except (ValueError, TypeError) as exc:
            coerced = pd.to_numeric(vals, errors="coerce")
            bad_rows = np.nonzero(coerced.isna().to_numpy())[0]
            where = f" (row {int(bad_rows[0]) + 2})" if bad_rows.size else ""
            raise DataError(f"column {col} must be integer{where}: {exc}") from exc
        if not np.all(as_int == vals):
            row = int(np.nonzero(np.asarray(as_int != vals))[0][0]) + 2
            raise DataError(f"column {col} must be integer (row {row})")
        frame[col] = as_int

    resp = frame["response"].to_numpy()
    bad = ~np.isin(resp, (0, 1))
    if bad.any():
        row = int(np.nonzero(bad)[0][0]) + 2
        raise DataError(f"non-binary response {resp[np.nonzero(bad)[0][0]]} (row {row})")

    times = frame["time"].to_numpy()
    t_values = np.unique(times)
    T = int(t_values.max()) if t_values.size else 0
    if t_values.min() < 1 or set(t_values.tolist()) != set(range(1, T + 1)):
        raise DataError(f"times must cover 1..T contiguously, saw {t_values.tolist()}")
    if T < 2:
        raise DataError("need at least two time points")

    ind_labels = list(dict.fromkeys(frame["individual"].tolist()))
    item_labels = list(dict.fromkeys(frame["item"].tolist()))
    ind_idx = {v: k for k, v in enumerate(ind_labels)}
    item_idx = {v: k for k, v in enumerate(item_labels)}
    n, p = len(ind_labels), len(item_labels)

    values = np.zeros((n, p, T), dtype=float)
    observed = np.zeros((n, p, T), dtype=bool)
    ii = frame["individual"].map(ind_idx).to_numpy()
    jj = frame["item"].map(item_idx).to_numpy()
    tt = times - 1
    dup = pd.Series(list(zip(ii, jj, tt))).duplicated()
    if dup.any():
        row = int(np.nonzero(dup.to_numpy())[0][0]) + 2
        raise DataError(f"duplicate (individual, item, time) cell (row {row})")
    values[ii, jj, tt] = resp
    observed[ii, jj, tt] = True

    coverage = observed.any(axis=1)
    if not coverage.all():
        i, t = np.argwhere(~coverage)[0]
        raise DataError(
            f"individual {ind_labels[i]} has no observed response at time {t+1}"
        )
    data = ResponseTensor(values=values, observed=observed)
    if return_labels:
        return data, ind_labels, item_labels
    return data


def save_responses(data: ResponseTensor, path, individual_labels=None, item_labels=None):
    """Write the observed cells back out in the long format load_responses
    reads; labels default to 1-based integers."""
    n, p, T = data.n, data.p, data.T
    ind = individual_labels if individual_labels is not None else list(range(1, n + 1))
    items = item_labels if item_labels is not None else list(range(1, p + 1))
    cells = np.argwhere(np.asarray(data.observed, dtype=bool))
    vals = np.asarray(data.values)
    frame = pd.DataFrame(
        {
            "individual": [ind[i] for i, _, _ in cells],
            "item": [items[j] for _, j, _ in cells],
            "time": [int(t) + 1 for _, _, t in cells],
            "response": [int(vals[i, j, t]) for i, j, t in cells],
        }
    )
    frame.to_csv(path, index=False, lineterminator="\n")


def dichotomize(in_path, out_path, rule=None):
    """Map ordinal categories to bits and write the binary panel. The default
    rule is the symptom-frequency one: category 1 -> 1, categories 2-4 -> 0."""
    rule = dict(CESD_RULE if rule is None else rule)
    in_path = Path(in_path)
    if not in_path.exists():
        raise DataError(f"no such file: {in_path}")
    frame = pd.read_csv(in_path)
    if list(frame.columns) != RESPONSE_COLUMNS:
        raise DataError(
            f"expected header {','.join(RESPONSE_COLUMNS)}, got {','.join(map(str, frame.columns))}"
        )
    resp = frame["response"].to_numpy()
    known = np.isin(resp, list(rule.keys()))
    if not known.all():
        k = int(np.nonzero(~known)[0][0])
        raise DataError(f"category {resp[k]} outside the dichotomization map (row {k+2})")
    frame["response"] = pd.Series(resp).map(rule).astype(int)
    frame.to_csv(out_path, index=False, lineterminator="\n")


def parse_rule(text: str) -> dict:
    """Parse "1:1,2:0,3:0" into a category -> bit map."""
    rule = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            cat, bit = piece.split(":")
            rule[int(cat)] = int(bit)
        except ValueError as exc:
            raise DataError(f"bad map entry {piece!r}: want CATEGORY:BIT") from exc
    if not rule:
        raise DataError("empty dichotomization map")
    if any(b not in (0, 1) for b in rule.values()):
        raise DataError("map values must be 0 or 1")
    return rule


# ---------------------------------------------------------------------------
# run configuration


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _to_bool(text, key):
    s = str(text).strip().lower()
    if s in _TRUE:
        return True
    if s in _FALSE:
        return False
    raise DataError(f"config key {key} wants a boolean, got {text!r}")


@dataclass
class RunConfig:
    model: str = "latent-process"
    metric: str = EUCLIDEAN
    dim: int = 2
    radius: float | None = None
    iterations: int = 5000
    burnin: int = 2500
    thin: int = 1
    seed: int = 0
    chains: int = 1
    proposal_sd_a: float = 1.4
    proposal_sd_b: float = 0.8
    proposal_sd_lambda: float = 5.0
    adapt: bool = False
    constrain_scale: bool = True
    input: str | None = None
    out: str | None = None

    allowed_dims = (1, 2, 3, 4)

    _COERCE = {
        "model": str,
        "metric": str,
        "dim": int,
        "radius": float,
        "iterations": int,
        "burnin": int,
        "thin": int,
        "seed": int,
        "chains": int,
        "proposal_sd_a": float,
        "proposal_sd_b": float,
        "proposal_sd_lambda": float,
        "adapt": "bool",
        "constrain_scale": "bool",
        "input": str,
        "out": str,
    }

    def apply(self, values: dict):
        for key, raw in values.items():
            if raw is None:
                continue
            coerce = self._COERCE.get(key)
            if coerce is None:
                raise DataError(f"unknown config key: {key}")
            try:
                val = _to_bool(raw, key) if coerce == "bool" else coerce(raw)
            except (TypeError, ValueError) as exc:
                raise DataError(f"bad value for config key {key}: {raw!r}") from exc
            setattr(self, key, val)
        return self

    def validate(self):
        if self.model not in ("latent-process", "andersen"):
            raise DataError(f"unknown model: {self.model}")
        if self.metric not in (EUCLIDEAN, POINCARE):
            raise DataError(f"unknown metric: {self.metric}")
        if self.dim not in self.allowed_dims:
            raise DataError(f"dim must be one of {self.allowed_dims}")
        if self.metric == POINCARE:
            if self.radius is None:
                raise DataError("poincare metric needs radius")
            if self.dim != 2:
                raise DataError("poincare metric is two-dimensional")
        if not (0 <= self.burnin < self.iterations):
            raise DataError("need 0 <= burnin < iterations")
        if self.thin < 1 or self.chains < 1:
            raise DataError("thin and chains must be >= 1")
        if self.input is not None and not Path(self.input).exists():
            raise DataError(f"input path does not exist: {self.input}")
        return self

    def space(self) -> MetricSpace:
        if self.metric == POINCARE:
            return poincare_disk(self.radius)
        return euclidean(self.dim)

    def to_chain_config(self, seed=None) -> ChainConfig:
        return ChainConfig(
            iterations=self.iterations,
            burnin=self.burnin,
            thin=self.thin,
            seed=self.seed if seed is None else seed,
            space=self.space(),
            hyper=Hyperparams(),
            proposal_sd_a=self.proposal_sd_a,
            proposal_sd_b=self.proposal_sd_b,
            proposal_sd_lambda=self.proposal_sd_lambda,
            adapt=self.adapt,
            constrain_scale=self.constrain_scale,
        )

    def echo(self) -> dict:
        d = asdict(self)
        return d


def parse_config_file(path) -> dict:
    """Flat key=value lines; # starts a comment, blanks are skipped."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such config file: {path}")
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values


# ---------------------------------------------------------------------------
# sample persistence


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def persist_samples(samples, outdir):
    """Write a fit to a directory: manifest.json plus params / positions /
    lambda / r / loglik CSVs (positions and rates only for the latent-process
    model)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    latent = isinstance(samples, PosteriorSamples)
    S = samples.n_retained
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "model": samples.model,
        "seed": samples.seed,
        "n": samples.n,
        "p": samples.p,
        "T": samples.T,
        "retained": S,
        "n_obs": int(samples.loglik.shape[1]),
        "acceptance": {k: list(v) for k, v in samples.acceptance.items()},
        "config": samples.config,
    }
    if latent:
        manifest["space"] = {
            "kind": samples.space.kind,
            "q": samples.space.q,
            "rho": samples.space.rho,
        }
    _write_json(outdir / "manifest.json", manifest)

    iters = np.arange(1, S + 1)
    if latent:
        cols = {"iter": iters, "gamma": samples.gamma,
                "sigma_alpha2": samples.sigma_alpha2, "log_post": samples.log_post}
        for i in range(samples.n):
            cols[f"alpha_{i+1}"] = samples.alpha[:, i]
        for j in range(samples.p):
            cols[f"beta_{j+1}"] = samples.beta[:, j]
    else:
        cols = {"iter": iters, "sigma_alpha2": samples.sigma_alpha2,
                "log_post": samples.log_post}
        for i in range(samples.n):
            for t in range(samples.T):
                cols[f"alpha_{i+1}_{t+1}"] = samples.alpha[:, i, t]
        for j in range(samples.p):
            cols[f"beta_{j+1}"] = samples.beta[:, j]
    pd.DataFrame(cols).to_csv(
        outdir / "params.csv", index=False, float_format=_FLOAT_FMT, lineterminator="\n"
    )

    if latent:
        n, p, T, q = samples.n, samples.p, samples.T, samples.q
        ent = n + p
        pos = np.concatenate([samples.a1, samples.B], axis=1)  # (S, n+p, q)
        frame = {
            "iter": np.repeat(iters, ent),
            "entity": np.tile(["individual"] * n + ["item"] * p, S),
            "index": np.tile(list(range(1, n + 1)) + list(range(1, p + 1)), S),
        }
        for k in range(q):
            frame[f"x{k+1}"] = pos[:, :, k].reshape(-1)
        pd.DataFrame(frame).to_csv(
            outdir / "positions.csv", index=False, float_format=_FLOAT_FMT,
            lineterminator="\n",
        )

        base = {
            "iter": np.repeat(iters, n * (T - 1)),
            "individual": np.tile(np.repeat(np.arange(1, n + 1), T - 1), S),
            "time": np.tile(np.tile(np.arange(2, T + 1), n), S),
        }
        lam_frame = dict(base)
        lam_frame["lam"] = samples.lam.reshape(-1)
        lam_frame["pi"] = samples.pi.reshape(-1)
        pd.DataFrame(lam_frame).to_csv(
            outdir / "lambda.csv", index=False, float_format=_FLOAT_FMT,
            lineterminator="\n",
        )
        r_frame = dict(base)
        r_frame["r"] = samples.r.reshape(-1).astype(int)
        pd.DataFrame(r_frame).to_csv(
            outdir / "r.csv", index=False, lineterminator="\n"
        )

    headers = [f"{i+1}:{j+1}:{t+1}" for i, j, t in samples.obs_index]
    ll = pd.DataFrame(samples.loglik, columns=headers)
    ll.to_csv(outdir / "loglik.csv", index=False, float_format=_FLOAT_FMT,
              lineterminator="\n")


def _manifest_check(cond, message):
    if not cond:
        raise DataError(f"manifest mismatch: {message}")


def load_samples(indir):
    """Rebuild a persisted fit. The manifest's counts must agree with the CSV
    shapes; a truncated or tampered directory is rejected."""
    indir = Path(indir)
    man_path = indir / "manifest.json"
    if not man_path.exists():
        raise DataError(f"no manifest.json under {indir}")
    manifest = json.loads(man_path.read_text())
    version = str(manifest.get("schema_version", ""))
    if version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise DataError(f"unsupported schema version: {version!r}")
    model = manifest["model"]
    n, p, T = int(manifest["n"]), int(manifest["p"]), int(manifest["T"])
    S = int(manifest["retained"])
    n_obs = int(manifest["n_obs"])

    params = pd.read_csv(indir / "params.csv", float_precision="round_trip")
    _manifest_check(len(params) == S, "params.csv row count != retained")
    ll = pd.read_csv(indir / "loglik.csv", float_precision="round_trip")
    _manifest_check(len(ll) == S, "loglik.csv row count != retained")
    _manifest_check(ll.shape[1] == n_obs, "loglik.csv column count != n_obs")
    obs_index = np.array(
        [[int(x) - 1 for x in c.split(":")] for c in ll.columns], dtype=int
    )
    loglik = ll.to_numpy(dtype=float)
    acceptance = {k: tuple(v) for k, v in manifest.get("acceptance", {}).items()}
    config = manifest.get("config", {})
    seed = int(manifest["seed"])

    beta = np.column_stack(
        [params[f"beta_{j+1}"].to_numpy(dtype=float) for j in range(p)]
    )
    if model == "andersen":
        alpha = np.empty((S, n, T))
        for i in range(n):
            for t in range(T):
                alpha[:, i, t] = params[f"alpha_{i+1}_{t+1}"].to_numpy(dtype=float)
        return AndersenSamples(
            model=model,
            seed=seed,
            alpha=alpha,
            beta=beta,
            sigma_alpha2=params["sigma_alpha2"].to_numpy(dtype=float),
            loglik=loglik,
            obs_index=obs_index,
            log_post=params["log_post"].to_numpy(dtype=float),
            acceptance=acceptance,
            n=n,
            p=p,
            T=T,
            config=config,
        )

    spc = manifest["space"]
    space = (
        poincare_disk(float(spc["rho"]))
        if spc["kind"] == POINCARE
        else euclidean(int(spc["q"]))
    )
    q = space.q
    alpha = np.column_stack(
        [params[f"alpha_{i+1}"].to_numpy(dtype=float) for i in range(n)]
    )

    posf = pd.read_csv(indir / "positions.csv", float_precision="round_trip")
    _manifest_check(len(posf) == S * (n + p), "positions.csv row count")
    coords = posf[[f"x{k+1}" for k in range(q)]].to_numpy(dtype=float)
    coords = coords.reshape(S, n + p, q)
    ent = posf["entity"].to_numpy()
    _manifest_check(
        bool(np.all(ent.reshape(S, n + p)[:, :n] == "individual"))
        and bool(np.all(ent.reshape(S, n + p)[:, n:] == "item")),
        "positions.csv entity layout",
    )
    a1 = coords[:, :n, :]
    B = coords[:, n:, :]

    lamf = pd.read_csv(indir / "lambda.csv", float_precision="round_trip")
    _manifest_check(len(lamf) == S * n * (T - 1), "lambda.csv row count")
    lam = lamf["lam"].to_numpy(dtype=float).reshape(S, n, T - 1)
    pi = lamf["pi"].to_numpy(dtype=float).reshape(S, n, T - 1)
    rf = pd.read_csv(indir / "r.csv")
    _manifest_check(len(rf) == S * n * (T - 1), "r.csv row count")
    r = rf["r"].to_numpy(dtype=int).reshape(S, n, T - 1).astype(np.int8)

    return PosteriorSamples(
        model=model,
        space=space,
        seed=seed,
        alpha=alpha,
        beta=beta,
        gamma=params["gamma"].to_numpy(dtype=float),
        sigma_alpha2=params["sigma_alpha2"].to_numpy(dtype=float),
        a1=a1,
        B=B,
        lam=lam,
        r=r,
        pi=pi,
        loglik=loglik,
        obs_index=obs_index,
        log_post=params["log_post"].to_numpy(dtype=float),
        acceptance=acceptance,
        n=n,
        p=p,
        T=T,
        config=config,
    )
