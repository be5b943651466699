import csv
import dataclasses
import json

import numpy as np
import pytest

from latentprogress import persist_samples, run_chain
from latentprogress.cli import main
from conftest import random_tensor, tiny_chain_config


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture()
def sim_csv(tmp_path):
    out = tmp_path / "sim.csv"
    code = run_cli("simulate", "--groups", "6,6", "--items", "4",
                   "--t1-prob", "0.3", "--t2-probs", "0.3,0.7",
                   "--seed", "4", "--out", str(out))
    assert code == 0
    return out


def test_simulate_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for out in (a, b):
        assert run_cli("simulate", "--groups", "5", "--items", "3",
                       "--t1-prob", "0.4", "--t2-probs", "0.6",
                       "--seed", "9", "--out", str(out)) == 0
    assert a.read_bytes() == b.read_bytes()
    labels = tmp_path / "labels.csv"
    assert run_cli("simulate", "--groups", "2,3", "--items", "3",
                   "--t1-prob", "0.4", "--t2-probs", "0.6,0.4",
                   "--seed", "9", "--out", str(a),
                   "--labels-out", str(labels)) == 0
    rows = labels.read_text().splitlines()
    assert rows[0] == "individual,group"
    assert len(rows) == 6


def test_bad_invocations(tmp_path, capsys):
    assert run_cli("frobnicate") == 1
    assert run_cli() == 1
    assert run_cli("fit", str(tmp_path / "missing.csv"),
                   "--iters", "20", "--burnin", "5") == 1
    assert run_cli("simulate", "--groups", "3", "--items", "2",
                   "--t1-prob", "1.5", "--t2-probs", "0.5",
                   "--out", str(tmp_path / "x.csv")) == 1
    capsys.readouterr()


def test_pipeline_happy_path(tmp_path, sim_csv, capsys):
    fitdir = tmp_path / "fit"
    # long enough that the psrf batch-means covariance has full rank
    code = run_cli("fit", str(sim_csv), "--iters", "1100", "--burnin", "60",
                   "--thin", "2", "--seed", "1", "--chains", "2",
                   "--out", str(fitdir))
    assert code == 0
    assert (fitdir / "run.json").exists()
    assert (fitdir / "chain_1" / "manifest.json").exists()
    assert (fitdir / "chain_2" / "manifest.json").exists()

    diagdir = tmp_path / "diag"
    code = run_cli("diagnose", str(fitdir), "--out", str(diagdir))
    assert code in (0, 2)  # short toy chains may legitimately fail the gate
    for name in ("waic.json", "acceptance.json", "psrf.json"):
        assert (diagdir / name).exists()
    psrf = json.loads((diagdir / "psrf.json").read_text())
    assert psrf["psrf"] is not None and psrf["n_chains"] == 2

    sumdir = tmp_path / "summ"
    assert run_cli("summarize", str(fitdir), "--out", str(sumdir)) == 0
    summ = json.loads((sumdir / "summaries.json").read_text())
    assert len(summ["rows"]) == 12  # 12 individuals, one transition
    assert {r["individual"] for r in summ["rows"]} == set(range(1, 13))
    dens_header = (sumdir / "density.csv").read_text().splitlines()[0]
    assert dens_header.startswith("lambda,")

    ppc = tmp_path / "ppc"
    assert run_cli("predict", str(fitdir), "--data", str(sim_csv),
                   "--draws", "40", "--seed", "2", "--out", str(ppc)) == 0
    with open(ppc / "ppc.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {"individual", "time", "observed", "lo", "mid", "hi"}
    assert len(rows) == 12 * 2

    mapdir = tmp_path / "map"
    assert run_cli("export-map", str(fitdir), "--out", str(mapdir)) == 0
    with open(mapdir / "map.csv") as fh:
        rows = list(csv.DictReader(fh))
    kinds = {r["kind"] for r in rows}
    assert kinds == {"individual", "item", "target"}
    assert "x1" in rows[0] and "x2" in rows[0]
    capsys.readouterr()


def test_config_file_and_flag_override(tmp_path, sim_csv, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("iterations = 100\nburnin = 30\nseed = 6\ndim = 1\n")
    fitdir = tmp_path / "fit"
    code = run_cli("fit", str(sim_csv), "--config", str(cfgfile),
                   "--iters", "80", "--out", str(fitdir))
    assert code == 0
    echo = json.loads((fitdir / "run.json").read_text())["config"]
    assert echo["iterations"] == 80  # flag beats file
    assert echo["burnin"] == 30  # file beats default
    assert echo["seed"] == 6
    assert echo["dim"] == 1
    capsys.readouterr()


def _iid_chain_pair(rng, tmp_path, divergent=False, S=4000):
    data = random_tensor(rng, n=3, p=3, T=2)
    base = run_chain(data, tiny_chain_config(iterations=30, burnin=10, seed=8))
    fitdir = tmp_path / "fit"
    fitdir.mkdir()
    gen = np.random.default_rng(123)
    for k in range(2):
        n, p = base.n, base.p
        off = 5.0 if (divergent and k == 1) else 0.0
        lam_rng = (0.7, 0.95) if (divergent and k == 1) else (0.2, 0.5)
        s = dataclasses.replace(
            base,
            seed=k,
            alpha=gen.normal(size=(S, n)) + off,
            beta=gen.normal(size=(S, p)) - off,
            gamma=np.abs(gen.normal(size=S)) + 0.5 + off,
            sigma_alpha2=gen.uniform(0.5, 1.5, size=S) * (4.0 if off else 1.0),
            a1=gen.normal(size=(S, n, 2)),
            B=gen.normal(size=(S, p, 2)),
            lam=gen.uniform(*lam_rng, size=(S, n, 1)),
            r=(gen.uniform(size=(S, n, 1)) < 0.5).astype(np.int8),
            pi=gen.uniform(0.2, 0.8, size=(S, n, 1)),
            loglik=gen.normal(-0.7, 0.05, size=(S, base.loglik.shape[1])),
            log_post=gen.normal(size=S),
        )
        persist_samples(s, fitdir / f"chain_{k + 1}")
    return fitdir


def test_diagnose_gate_passes_iid(tmp_path, rng, capsys):
    fitdir = _iid_chain_pair(rng, tmp_path)
    out = tmp_path / "diag"
    assert run_cli("diagnose", str(fitdir), "--out", str(out)) == 0
    psrf = json.loads((out / "psrf.json").read_text())
    assert psrf["converged"] is True
    capsys.readouterr()


def test_diagnose_gate_fails_divergent(tmp_path, rng, capsys):
    fitdir = _iid_chain_pair(rng, tmp_path, divergent=True)
    out = tmp_path / "diag"
    assert run_cli("diagnose", str(fitdir), "--out", str(out)) == 2
    err = capsys.readouterr().err
    assert "convergence gate failed" in err
    psrf = json.loads((out / "psrf.json").read_text())
    assert psrf["converged"] is False
    assert psrf["psrf"] >= psrf["cutoff"]


def test_diagnose_single_chain_no_gate(tmp_path, sim_csv, capsys):
    fitdir = tmp_path / "fit"
    assert run_cli("fit", str(sim_csv), "--iters", "60", "--burnin", "20",
                   "--out", str(fitdir)) == 0
    out = tmp_path / "diag"
    assert run_cli("diagnose", str(fitdir), "--out", str(out)) == 0
    psrf = json.loads((out / "psrf.json").read_text())
    assert psrf["psrf"] is None
    capsys.readouterr()


def test_compare_single_minimizer(tmp_path, sim_csv, capsys):
    dirs = []
    for k, dim in enumerate((1, 2)):
        fd = tmp_path / f"fit{k}"
        assert run_cli("fit", str(sim_csv), "--iters", "80", "--burnin", "30",
                       "--dim", str(dim), "--seed", str(k),
                       "--out", str(fd)) == 0
        dirs.append(str(fd))
    outfile = tmp_path / "cmp.json"
    assert run_cli("compare", *dirs, "--out", str(outfile)) == 0
    table = json.loads(outfile.read_text())["rows"]
    assert len(table) == 2
    assert sum(1 for row in table if row["minimizer"]) == 1
    printed = capsys.readouterr().out
    assert "waic" in printed.lower()


def test_andersen_fit_and_diagnose(tmp_path, sim_csv, capsys):
    fitdir = tmp_path / "fit"
    assert run_cli("fit", str(sim_csv), "--model", "andersen",
                   "--iters", "560", "--burnin", "50", "--chains", "2",
                   "--out", str(fitdir)) == 0
    man = json.loads((fitdir / "chain_1" / "manifest.json").read_text())
    assert man["model"] == "andersen"
    out = tmp_path / "diag"
    assert run_cli("diagnose", str(fitdir), "--out", str(out)) in (0, 2)
    assert (out / "waic.json").exists()
    capsys.readouterr()


def test_dichotomize_cli(tmp_path, capsys):
    raw = tmp_path / "raw.csv"
    raw.write_text(
        "individual,item,time,response\n"
        "a,q,1,1\na,q,2,3\nb,q,1,4\nb,q,2,1\n"
    )
    out = tmp_path / "bin.csv"
    assert run_cli("dichotomize", str(raw), "--out", str(out)) == 0
    body = out.read_text().splitlines()
    assert body[1].endswith(",1")
    assert body[2].endswith(",0")
    out2 = tmp_path / "bin2.csv"
    assert run_cli("dichotomize", str(raw), "--out", str(out2),
                   "--map", "1:0,2:0,3:1,4:1") == 0
    assert out2.read_text().splitlines()[1].endswith(",0")
    capsys.readouterr()


def test_study_cli(tmp_path, capsys):
    out = tmp_path / "study.json"
    code = run_cli("study", "--groups", "5,5", "--items", "3",
                   "--t1-prob", "0.3", "--t2-probs", "0.3,0.7",
                   "--dims", "1,2", "--reps", "1", "--shorten", "400",
                   "--thin", "1", "--seed", "2", "--out", str(out))
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["scenario"]["group_sizes"] == [5, 5]
    assert set(blob["waic"]) == {"1", "2"}
    printed = capsys.readouterr().out
    assert "q=1" in printed and "q=2" in printed
