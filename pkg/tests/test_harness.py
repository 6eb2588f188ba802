import json

import numpy as np
import pytest

from shortlist_secretary.cli import main
from shortlist_secretary.constraints import constraint_from_dict
from shortlist_secretary.harness import (
    COLUMNS,
    TrialConfig,
    compare_modes,
    generate_instance,
    load_instance,
    run_sweep,
)
from shortlist_secretary.shortlist import AlgoConfig
from shortlist_secretary.submodular import MalformedInstance


def coverage_instance(seed=0, n=20, constraint=None):
    params = {"n": n, "k": 3, "constraint": constraint or {"type": "partition", "k": 3}}
    return generate_instance("coverage", params, np.random.default_rng(seed))


class TestGenerate:
    def test_hardness_levels(self):
        inst = generate_instance("hardness", {"n": 64, "k": 4}, np.random.default_rng(0))
        assert inst["meta"]["L"] == 8
        f, c = load_instance(inst)
        assert f.ground_size == 64 and c.rank == 5

    def test_hardness_too_small(self):
        with pytest.raises(MalformedInstance):
            generate_instance("hardness", {"n": 5, "k": 4}, np.random.default_rng(0))

    def test_reproducible(self):
        assert coverage_instance(3) == coverage_instance(3)
        assert coverage_instance(3) != coverage_instance(4)

    def test_partition_covers_ground(self):
        c = constraint_from_dict(coverage_instance(1, n=17)["constraint"])
        blocks = c.blocks
        assert sorted(e for b in blocks for e in b) == list(range(17))

    @pytest.mark.parametrize("kind", ["modular", "facility", "coverage"])
    @pytest.mark.parametrize("ctype", [{"type": "uniform", "k": 2}, {"type": "graphic", "num_vertices": 5},
                                       {"type": "matching", "num_vertices": 6}])
    def test_kinds(self, kind, ctype):
        inst = generate_instance(kind, {"n": 10, "constraint": ctype}, np.random.default_rng(2))
        f, c = load_instance(json.loads(json.dumps(inst)))
        assert f.ground_size == 10 and c.rank >= 1

    def test_small_universe(self):
        f, _ = load_instance(generate_instance("coverage", {"n": 4, "k": 1}, np.random.default_rng(0)))
        assert f.ground_size == 4

    def test_unknown(self):
        with pytest.raises(MalformedInstance):
            generate_instance("nope", {"n": 3}, np.random.default_rng(0))


class TestSweep:
    def test_single_item(self):
        inst = generate_instance("modular", {"n": 1, "k": 1}, np.random.default_rng(0))
        rep = run_sweep(TrialConfig(inst, trials=1))
        assert len(rep["rows"]) == 1 and rep["rows"][0]["ratio"] == 1.0 and rep["ok"]
        assert rep["columns"] == COLUMNS

    def test_identical_files(self, tmp_path):
        for fmt in ("csv", "json"):
            path = tmp_path / f"r.{fmt}"
            blobs = []
            for _ in range(2):
                run_sweep(TrialConfig(coverage_instance(), trials=3, wall_clock=False, out=str(path), fmt=fmt))
                blobs.append(path.read_bytes())
            assert blobs[0] == blobs[1]

    def test_streaming_columns(self):
        rep = run_sweep(TrialConfig(coverage_instance(), AlgoConfig(mode="streaming"), trials=2))
        assert rep["columns"][-2:] == ["buffer_hw", "buffer_bound"]
        assert all(r["buffer_hw"] <= r["buffer_bound"] for r in rep["rows"])

    def test_generate_block_per_seed(self):
        cfg = TrialConfig({"generate": {"kind": "coverage", "params": {"n": 12, "k": 2}}}, trials=3, seed=5)
        rep = run_sweep(cfg)
        assert [r["seed"] for r in rep["rows"]] == [5, 6, 7]
        assert all(0 <= r["ratio"] <= 1 + 1e-9 for r in rep["rows"])

    def test_invalid(self):
        with pytest.raises(ValueError):
            run_sweep(TrialConfig(coverage_instance(), trials=0))

    def test_preemption_summary(self):
        rep = run_sweep(TrialConfig(coverage_instance(), AlgoConfig(mode="preemption"), trials=2))
        assert rep["summary"]["reference"] == pytest.approx(0.5 * (1 - np.exp(-1)) * (1 - np.exp(-2)) * 0.8)
        assert all(r["shortlist_size"] <= 3 for r in rep["rows"])


class TestCompare:
    def test_streaming(self):
        v = compare_modes(TrialConfig(coverage_instance(), AlgoConfig(0.3, 2, 1), trials=5))
        assert v["equal"] and v["mean_buffer_other"] <= v["mean_buffer_full"]

    def test_preemption(self):
        v = compare_modes(TrialConfig(coverage_instance(), AlgoConfig(), trials=5), "preemption")
        assert v["equal"]

    def test_preemption_needs_unit_windows(self):
        with pytest.raises(ValueError):
            compare_modes(TrialConfig(coverage_instance(), AlgoConfig(alpha=2), trials=1), "preemption")


class TestCli:
    def test_gen_run_compare(self, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        assert main(["gen", "coverage", "--n", "15", "--k", "3", "--constraint-type", "partition",
                     "--seed", "1", "--out", str(inst)]) == 0
        out = tmp_path / "r.csv"
        plan = tmp_path / "plan.json"
        assert main(["run", "--instance", str(inst), "--trials", "3", "--mode", "streaming",
                     "--out", str(out), "--dump-plan", str(plan)]) == 0
        assert out.read_text().splitlines()[0].endswith("buffer_hw,buffer_bound")
        assert sum(json.loads(plan.read_text())["slot_sizes"]) == 15
        assert main(["compare", "--instance", str(inst), "--trials", "3"]) == 0
        capsys.readouterr()
        assert main(["opt", "--instance", str(inst)]) == 0
        opt = json.loads(capsys.readouterr().out)
        assert main(["greedy", "--instance", str(inst)]) == 0
        greedy = json.loads(capsys.readouterr().out)
        assert greedy["value"] <= opt["value"] + 1e-9

    def test_split_objective_constraint(self, tmp_path):
        d = coverage_instance()
        (tmp_path / "o.json").write_text(json.dumps({"objective": d["objective"]}))
        (tmp_path / "c.json").write_text(json.dumps(d["constraint"]))
        assert main(["run", "--objective", str(tmp_path / "o.json"), "--constraint", str(tmp_path / "c.json")]) == 0

    def test_check_fn(self, tmp_path, capsys):
        p = tmp_path / "h.json"
        main(["gen", "hardness", "--n", "8", "--k", "2", "--out", str(p)])
        assert main(["check-fn", str(p)]) == 1
        assert json.loads(capsys.readouterr().out)["ok"] is False
        q = tmp_path / "m.json"
        main(["gen", "modular", "--n", "6", "--k", "2", "--out", str(q)])
        assert main(["check-fn", str(q)]) == 0

    def test_large_p_refused(self, tmp_path):
        d = coverage_instance(constraint={"type": "matching", "num_vertices": 6})
        d["constraint"]["matchoid"]["p"] = 4
        p = tmp_path / "i.json"
        p.write_text(json.dumps(d))
        with pytest.raises(SystemExit):
            main(["run", "--instance", str(p)])

    def test_secretary_max(self, capsys):
        assert main(["secretary-max", "--N", "50", "--trials", "200"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["max_shortlist"] <= out["cap"] == 10
