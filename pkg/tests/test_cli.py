import json

from negdep.cli import main
from negdep.samplers import point_set_from_csv, point_set_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGenerate:
    def test_csv_to_stdout(self, capsys):
        code, out, _ = run(capsys, "generate", "--scheme", "rsj", "--n", "5",
                           "--dim", "2", "--seed", "7")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "# scheme=rsj_lattice, n=5, dim=2, seed=7"
        assert len(lines) == 2 + 5
        meta, pts = point_set_from_csv(out)
        assert pts.shape == (5, 2)

    def test_composite_n_rejected(self, capsys):
        code, _, err = run(capsys, "generate", "--scheme", "rsj", "--n", "6",
                           "--dim", "2", "--seed", "1")
        assert code == 2
        assert "prime" in err

    def test_degenerate_generator_rejected(self, capsys):
        code, _, err = run(capsys, "generate", "--scheme", "rsj", "--n", "5",
                           "--dim", "2", "--seed", "1", "--generator", "0,1")
        assert code == 2
        assert "degenerate" in err

    def test_json_round_trip(self, capsys):
        code, out, _ = run(capsys, "generate", "--scheme", "lhs", "--n", "4",
                           "--dim", "3", "--seed", "2", "--format", "json")
        assert code == 0
        ps = point_set_from_json(out)
        assert ps.n == 4 and ps.dim == 3 and ps.seed == 2

    def test_fixed_generator_diagonal_cosets(self, capsys):
        code, out, _ = run(capsys, "generate", "--scheme", "rsj", "--n", "5",
                           "--dim", "2", "--seed", "3", "--generator", "1,1",
                           "--jitter", "off", "--shift", "grid", "--format", "json")
        assert code == 0
        ps = point_set_from_json(out)
        cells = ps.cells()
        assert len({(c2 - c1) % 5 for c1, c2 in cells.tolist()}) == 1

    def test_byte_identical_reruns_with_manifest(self, tmp_path, capsys):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for path in (out1, out2):
            code, _, _ = run(capsys, "generate", "--scheme", "patterson", "--n", "5",
                             "--dim", "2", "--seed", "9", "--out", str(path))
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        assert manifest["seed"] == 9
        assert manifest["outputs"] == [str(out1)]
        assert "duration_seconds" in manifest


def test_byte_identical_reruns_three_commands(tmp_path, capsys):
    # equal arguments give byte-identical data files for generate, analyze
    # and variance (manifests carry timing and are excluded)
    jobs = [
        ("gen", ["generate", "--scheme", "rsj", "--n", "5", "--dim", "2",
                 "--seed", "11", "--format", "json"]),
        ("scan", ["analyze", "nuod", "--scheme", "rsj", "--n", "5", "--dim", "2",
                  "--generator", "1,1", "--grid", "5"]),
        ("var", ["variance", "--scheme", "lhs", "--n", "5", "--dim", "2",
                 "--integrand", "product", "--replications", "150", "--seed", "6"]),
    ]
    for tag, argv in jobs:
        paths = []
        for attempt in range(2):
            path = tmp_path / f"{tag}{attempt}.out"
            full = list(argv)
            if tag == "var":
                full += ["--out-json", str(path)]
            else:
                full += ["--out", str(path)]
            main(full)
            capsys.readouterr()
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes(), tag


class TestAnalyze:
    def test_pairprob_exact_strings(self, capsys):
        code, out, _ = run(capsys, "analyze", "pairprob", "--scheme", "rsj",
                           "--n", "5", "--dim", "2", "--generator", "1,1",
                           "--Q", "0.6,0.6", "--R", "0.8,0.8")
        assert code == 0
        payload = json.loads(out)
        assert payload["joint"] == "1/100"
        assert payload["product"] == "4/625"
        assert payload["violation"] is True

    def test_pairprob_accepts_fraction_strings(self, capsys):
        code, out, _ = run(capsys, "analyze", "pairprob", "--scheme", "rsj",
                           "--n", "5", "--dim", "2", "--generator", "1,1",
                           "--Q", "3/5,3/5", "--R", "4/5,4/5")
        assert code == 0
        assert json.loads(out)["joint"] == "1/100"

    def test_nuod_clean_exit_zero(self, capsys):
        code, out, _ = run(capsys, "analyze", "nuod", "--scheme", "lhs",
                           "--n", "4", "--dim", "2", "--grid", "8")
        assert code == 0
        payload = json.loads(out)
        assert payload["violations"] == []
        assert payload["worst_violation"] == "0/1"

    def test_nuod_violation_exit_one(self, capsys):
        code, out, _ = run(capsys, "analyze", "nuod", "--scheme", "rsj",
                           "--n", "5", "--dim", "2", "--generator", "1,1",
                           "--grid", "5")
        assert code == 1
        assert len(json.loads(out)["violations"]) > 0

    def test_budget_exceeded_exit_three(self, capsys):
        code, _, err = run(capsys, "analyze", "nuod", "--scheme", "rsj",
                           "--n", "7", "--dim", "3", "--grid", "14",
                           "--budget", "1000")
        assert code == 3
        assert "budget" in err

    def test_nd_budget_env(self, capsys, monkeypatch):
        monkeypatch.setenv("ND_BUDGET", "10")
        code, _, err = run(capsys, "analyze", "copula", "--scheme", "rsj",
                           "--n", "5", "--dim", "2")
        assert code == 3

    def test_copula(self, capsys):
        code, out, _ = run(capsys, "analyze", "copula", "--scheme", "rsj",
                           "--n", "3", "--dim", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["equal"] is True and payload["max_discrepancy"] == "0/1"

    def test_independence_witness(self, capsys):
        code, out, _ = run(capsys, "analyze", "independence", "--scheme", "rsj",
                           "--n", "5", "--dim", "2", "--generator", "1,1")
        assert code == 0
        payload = json.loads(out)
        assert payload["independent"] is False
        assert "witness" in payload

    def test_triple(self, capsys):
        code, out, _ = run(capsys, "analyze", "triple", "--n", "5", "--dim", "2",
                           "--a", "0,0", "--b", "1,2")
        assert code == 0
        payload = json.loads(out)
        assert payload["lattice"] == 1 and payload["lhs"] == 6

    def test_triple_shared_cell_usage_error(self, capsys):
        code, _, err = run(capsys, "analyze", "triple", "--n", "5", "--dim", "2",
                           "--a", "0,0", "--b", "0,2")
        assert code == 2

    def test_ablation(self, capsys):
        code, out, _ = run(capsys, "analyze", "ablation", "--n", "5", "--dim", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["no_shift"]["first_cell_mass"] == "1/5"
        assert payload["no_shift"]["sampling_scheme"] is False
        assert payload["fixed_distance"]["conditional"] == "1/1"
        assert payload["fixed_distance"]["negatively_dependent"] is False
        assert payload["fixed_generator"]["joint"] == "1/100"
        assert payload["fixed_generator"]["violation"] is True

    def test_report_written_with_manifest(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code, _, _ = run(capsys, "analyze", "nuod", "--scheme", "lhs", "--n", "4",
                         "--dim", "2", "--grid", "4", "--out", str(out))
        assert code == 0
        assert json.loads(out.read_text())["violations"] == []
        assert (tmp_path / "report.json.manifest.json").exists()

    def test_nuod_pairs_csv(self, tmp_path, capsys):
        pairs = tmp_path / "pairs.csv"
        code, _, _ = run(capsys, "analyze", "nuod", "--scheme", "rsj", "--n", "5",
                         "--dim", "2", "--generator", "1,1", "--grid", "5",
                         "--pairs-csv", str(pairs))
        assert code == 1
        lines = pairs.read_text().strip().splitlines()
        assert lines[0] == "Q,R,joint,product,violation"
        assert len(lines) == 1 + 5**4
        assert "3/5;3/5,4/5;4/5,1/100,4/625,True" in lines


class TestVariance:
    def test_inline(self, capsys):
        code, out, _ = run(capsys, "variance", "--scheme", "rsj", "--n", "5",
                           "--dim", "2", "--integrand", "additive",
                           "--replications", "200", "--seed", "4")
        assert code == 0
        payload = json.loads(out)
        row = payload["results"][0]
        assert row["dominates"] is True
        assert row["mc_variance_exact"] is True

    def test_unknown_integrand(self, capsys):
        code, _, err = run(capsys, "variance", "--scheme", "rsj", "--n", "5",
                           "--dim", "2", "--integrand", "nope",
                           "--replications", "200", "--seed", "4")
        assert code == 2
        assert "library provides" in err

    def test_missing_spec_usage_error(self, capsys):
        code, _, err = run(capsys, "variance", "--replications", "100")
        assert code == 2

    def test_config_batch_with_csv(self, tmp_path, capsys):
        cfg = {
            "seed": 3,
            "replications": 150,
            "sizes": [[5, 2]],
            "schemes": [
                {"kind": "rsj_lattice"},
                {"kind": "lhs"},
                {"kind": "rsj_lattice", "shift": "none"},
            ],
            "integrands": ["additive", "origin_box"],
        }
        cfg_path = tmp_path / "batch.json"
        cfg_path.write_text(json.dumps(cfg))
        csv_path = tmp_path / "out.csv"
        json_path = tmp_path / "out.json"
        code, _, _ = run(capsys, "variance", "--config", str(cfg_path),
                         "--out-csv", str(csv_path), "--out-json", str(json_path))
        assert code == 0
        lines = csv_path.read_text().strip().splitlines()
        assert len(lines) == 1 + 6
        header = lines[0].split(",")
        assert "biased_capable" in header and "bias" in header
        payload = json.loads(json_path.read_text())
        flags = {(r["scheme"]["kind"], r["scheme"]["shift"]): r["biased_capable"]
                 for r in payload["results"]}
        assert flags[("rsj_lattice", "none")] is True
        assert flags[("rsj_lattice", "grid")] is False


class TestReproduce:
    def test_fast_subset(self, capsys):
        code, out, _ = run(capsys, "reproduce-paper", "--criteria", "2,5,6,7")
        assert code == 0
        lines = [l for l in out.strip().splitlines() if l.startswith("PASS")]
        assert len(lines) == 4

    def test_usage_error_exit_two(self, capsys):
        assert main(["analyze"]) == 2
        capsys.readouterr()
