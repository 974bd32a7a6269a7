import json

from fatou.catalog import by_name, paper_g
from fatou.cli import dispatch
from fatou.ratmap import map_to_jsonable


def _run(capsys, argv):
    code = dispatch(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_portrait_output(capsys):
    code, out, err = _run(capsys, ["portrait", "--map", "paper-g"])
    assert code == 0
    assert out.count("\n") == 1  # single line of JSON
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert doc["map"] == "paper-g"
    assert doc["degree"] == 3
    pts = {tuple(e["point"]) if isinstance(e["point"], list) else e["point"]:
           e["local_degree"] for e in doc["critical_points"]}
    assert pts == {"inf": 2, (0.0, 0.0): 3, (1.0, 0.0): 2}
    assert doc["critically_finite"] is True
    assert doc["hyperbolic"] is True
    assert doc["all_postcritical_periodic"] is True
    post = doc["postcritical"]
    assert "inf" in post and len(post) == 3


def test_json_output_is_deterministic(capsys):
    _, a, _ = _run(capsys, ["portrait", "--map", "paper-g"])
    _, b, _ = _run(capsys, ["portrait", "--map", "paper-g"])
    assert a == b
    _, a, _ = _run(capsys, ["periodic", "--map", "paper-g", "--period", "2"])
    _, b, _ = _run(capsys, ["periodic", "--map", "paper-g", "--period", "2"])
    assert a == b


def test_periodic_output(capsys):
    code, out, _ = _run(capsys, ["periodic", "--map", "paper-g",
                                 "--period", "2"])
    assert code == 0
    doc = json.loads(out)
    assert doc["period"] == 2
    assert doc["count"] == 10
    assert sum(p["multiplicity"] for p in doc["points"]) == 10
    assert {p["minimal_period"] for p in doc["points"]} == {1, 2}
    infs = [p for p in doc["points"] if p["point"] == "inf"]
    assert len(infs) == 1 and infs[0]["multiplicity"] == 1


def test_ray_output_dedupes_angles(capsys):
    code, out, _ = _run(capsys, ["ray", "--map", "paper-g", "--angle", "1/3",
                                 "--angle", "1/3", "--angle", "2/3"])
    assert code == 0
    doc = json.loads(out)
    assert doc["basin"] == "inf"
    assert [r["angle"] for r in doc["rays"]] == ["1/3", "2/3"]
    for r in doc["rays"]:
        assert r["landed"] is True
        assert abs(r["landing"][0] + 1.2807764064044149) < 1e-6
        assert r["residual"] < 1e-6
        assert "samples" not in r


def test_ray_samples_flag(capsys):
    code, out, _ = _run(capsys, ["ray", "--map", "paper-g", "--angle", "0",
                                 "--samples"])
    assert code == 0
    doc = json.loads(out)
    ray = doc["rays"][0]
    assert len(ray["samples"]) == len(ray["potentials"])
    assert ray["potentials"][0] == 100.0
    # first sample is far out, near the r0 circle
    x, y = ray["samples"][0]
    assert abs(complex(x, y)) > 10.0


def test_ray_thread_env_does_not_change_output(capsys, monkeypatch):
    args = ["ray", "--map", "paper-g", "--angle", "1/6", "--angle", "5/6"]
    monkeypatch.setenv("FATOU_THREADS", "1")
    _, a, _ = _run(capsys, args)
    monkeypatch.setenv("FATOU_THREADS", "3")
    _, b, _ = _run(capsys, args)
    assert a == b


def test_lift_report(capsys):
    code, out, _ = _run(capsys, ["lift", "--map", "paper-g",
                                 "--center=-2,0", "--radius", "0.1"])
    assert code == 0
    doc = json.loads(out)
    assert doc["total_degree"] == 3
    assert doc["monodromy"] == [1, 2, 0]
    assert [l["degree"] for l in doc["lifts"]] == [3]
    assert doc["lifts"][0]["sign"] == 1


def test_sign_sequence_report(capsys):
    code, out, _ = _run(capsys, ["lift", "--map", "paper-g", "--center=-2,0",
                                 "--radius", "0.1", "--steps", "2",
                                 "--omega", "0,0"])
    assert code == 0
    doc = json.loads(out)
    assert doc["base_sign"] == 1
    assert doc["signs"] == [-1, 1]
    assert doc["sign_changes"] == 2
    assert doc["outermost_counts"] == [1, 2]


def test_catalog_listing(capsys):
    code, out, _ = _run(capsys, ["catalog"])
    assert code == 0
    doc = json.loads(out)
    names = {m["name"]: m["degree"] for m in doc["maps"]}
    assert names["paper-g"] == 3
    assert names["paper-degree4"] == 4
    assert "num" not in doc["maps"][0]
    code, out, _ = _run(capsys, ["catalog", "--coeffs"])
    doc = json.loads(out)
    assert all("num" in m and "den" in m for m in doc["maps"])
    g = next(m for m in doc["maps"] if m["name"] == "paper-g")
    assert len(g["num"]) == 4 and len(g["den"]) == 2


def test_map_loading_from_json_file(capsys, tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps(map_to_jsonable(paper_g())))
    code, out, _ = _run(capsys, ["portrait", "--map", str(path)])
    assert code == 0
    doc = json.loads(out)
    assert doc["degree"] == 3
    assert doc["critically_finite"] is True


def test_render_writes_ppm(capsys, tmp_path):
    out_path = tmp_path / "basins.ppm"
    args = ["render", "--map", "paper-g", "--resolution", "80x60",
            "--out", str(out_path)]
    code, out, _ = _run(capsys, args)
    assert code == 0
    doc = json.loads(out)
    assert doc["resolution"] == [80, 60]
    assert doc["out"] == str(out_path)
    data = out_path.read_bytes()
    assert data.startswith(b"P6\n80 60\n255\n")
    assert len(data) == len(b"P6\n80 60\n255\n") + 80 * 60 * 3
    # byte-identical on a second run
    code, _, _ = _run(capsys, args)
    assert code == 0
    assert out_path.read_bytes() == data


def test_usage_errors_exit_two(capsys):
    cases = [
        ["portrait", "--map", "no-such-map"],
        ["ray", "--map", "paper-g", "--angle", "0.25"],
        ["ray", "--map", "paper-g"],  # missing required --angle
        ["ray", "--map", "paper-g", "--angle", "0", "--depth", "0"],
        ["ray", "--map", "paper-g", "--angle", "0", "--r0", "-5"],
        ["render", "--map", "paper-g", "--resolution", "axb",
         "--out", "/tmp/x.ppm"],
        ["verify", "--only", "bogus-group"],
        ["no-such-command"],
        [],
    ]
    for argv in cases:
        code, out, err = _run(capsys, argv)
        assert code == 2, f"argv {argv} gave {code}"


def test_unknown_map_error_names_the_flag_and_catalog(capsys):
    code, _, err = _run(capsys, ["portrait", "--map", "no-such-map"])
    assert code == 2
    assert "--map" in err
    assert "paper-g" in err


def test_computational_failures_exit_one(capsys):
    # repelling fixed point is not a valid basin
    code, _, err = _run(capsys, ["ray", "--map", "paper-g", "--angle", "0",
                                 "--basin", "2,0"])
    assert code == 1
    assert "error" in err
    # base curve passes through a critical value
    code, _, err = _run(capsys, ["lift", "--map", "paper-g",
                                 "--center=-1.9,0", "--radius", "0.1"])
    assert code == 1


def test_verify_single_group(capsys):
    code, out, _ = _run(capsys, ["verify", "--only", "rays"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("PASS ray-landings")
    assert "measured:" in lines[0]
    assert "tolerance:" in lines[0]
    assert lines[-1] == "1/1 checks passed"


def test_verify_detects_a_tampered_map(capsys, monkeypatch):
    # swap the flagship map for another catalog member; the ray landing
    # facts no longer hold, so the gate must fail loudly
    import fatou.verify as verify_mod

    monkeypatch.setattr(verify_mod, "paper_g",
                        lambda: by_name("pseudo-basilica:4"))
    code, out, _ = _run(capsys, ["verify", "--only", "rays"])
    assert code == 1
    assert "FAIL ray-landings" in out
    assert out.strip().endswith("0/1 checks passed")
